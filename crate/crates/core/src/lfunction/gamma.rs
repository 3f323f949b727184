use num_complex::Complex64;
use std::f64::consts::PI;

/// B_{2k}/(2k(2k−1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// B_{2k}/(2k) for k = 1..=8.
const DIGAMMA: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const SHIFT: f64 = 15.0;

/// log Γ(z) for z off the poles. The branch is analytic on Re z > 0
/// (it agrees with the principal branch there up to a multiple of 2πi only
/// where Im log Γ wraps, which callers never rely on outside exp).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < SHIFT {
        acc -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    acc + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// ψ(x) = Γ′/Γ(x) for real x > 0.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs a positive argument");
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut p = inv2;
    let mut series = 0.0;
    for c in DIGAMMA {
        series += c * p;
        p *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        assert!((ln_gamma(Complex64::new(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma(Complex64::new(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((digamma(1.0) + 0.577_215_664_901_532_9).abs() < 1e-14);
        // ψ(1/4) = −γ − π/2 − 3 log 2
        let exact = -0.577_215_664_901_532_9 - PI / 2.0 - 3.0 * 2f64.ln();
        assert!((digamma(0.25) - exact).abs() < 1e-13);
    }

    #[test]
    fn reflection_and_modulus() {
        // |Γ(1/2 + it)|² = π/cosh(πt)
        for t in [0.3, 4.0, 25.0, 90.0] {
            let v = ln_gamma(Complex64::new(0.5, t)).re;
            assert!((2.0 * v - (PI / (PI * t).cosh()).ln()).abs() < 1e-12, "t={t}");
        }
        // Γ(z)Γ(1−z) = π/sin(πz)
        let z = Complex64::new(-0.3, 2.2);
        let lhs = (ln_gamma(z) + ln_gamma(1.0 - z)).exp();
        let rhs = PI / (z * PI).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
}
