use crate::error::{Error, Result};
use crate::numeric::Scalar;
use num_complex::Complex;

/// B_{2j} for j = 1..=20 as (numerator, denominator).
const BERNOULLI: [(f64, f64); 20] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
];

/// Largest supported correction order.
pub const MAX_ORDER: usize = 19;

/// B_{2j}/(2j)! for j = 1..=20.
fn bernoulli_scaled(j: usize) -> f64 {
    let (n, d) = BERNOULLI[j - 1];
    let mut fact = 1.0;
    for k in 2..=(2 * j) {
        fact *= k as f64;
    }
    n / d / fact
}

/// Euler–Maclaurin parameters: `cutoff` explicit terms, `order` Bernoulli
/// corrections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmConfig {
    pub cutoff: usize,
    pub order: usize,
    /// Relative accuracy below which the result is accepted.
    pub target: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            cutoff: 50,
            order: 10,
            target: 1e-12,
        }
    }
}

impl EmConfig {
    pub fn new(cutoff: usize, order: usize) -> Self {
        Self {
            cutoff,
            order,
            ..Self::default()
        }
    }

    /// Cutoff raised with |s| so the correction series still converges fast.
    pub fn for_argument(self, abs_s: f64) -> Self {
        Self {
            cutoff: self.cutoff.max((0.65 * abs_s).ceil() as usize + 4),
            ..self
        }
    }
}

/// Value, derivative in s, and a bound on the Euler–Maclaurin remainder.
#[derive(Clone, Copy, Debug)]
pub struct EmValue<T> {
    pub value: Complex<T>,
    pub derivative: Complex<T>,
    pub error: T,
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{−s} and its s-derivative by
/// Euler–Maclaurin summation, no accuracy check.
pub fn hurwitz_em<T: Scalar>(s: Complex<T>, a: T, cfg: EmConfig) -> Result<EmValue<T>> {
    let one = Complex::new(T::one(), T::zero());
    if s == one {
        return Err(Error::Pole);
    }
    if !(a > T::zero()) {
        return Err(Error::InvalidArgument("Hurwitz shift must be positive".into()));
    }
    if cfg.order == 0 || cfg.order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "correction order must lie in 1..={MAX_ORDER}"
        )));
    }
    let mut value = Complex::new(T::zero(), T::zero());
    let mut deriv = value;
    let mut comp_v = value;
    let mut comp_d = value;
    for k in 0..cfg.cutoff {
        let x = T::from_usize_lossy(k) + a;
        let lx = x.ln();
        let term = (-s * lx).exp();
        kahan(&mut value, &mut comp_v, term);
        kahan(&mut deriv, &mut comp_d, -term * lx);
    }
    let x = T::from_usize_lossy(cfg.cutoff) + a;
    let lx = x.ln();
    let x_s = (-s * lx).exp(); // x^{−s}
    let sm1 = s - one;
    let x1s = x_s * x;
    let half = T::lit(0.5);
    value = value + x1s / sm1 + x_s * half;
    deriv = deriv - x1s * lx / sm1 - x1s / (sm1 * sm1) - x_s * lx * half;

    // Σ_j c_j (s)_{2j−1} x^{−s−2j+1}, tracking the Pochhammer symbol and its derivative
    let mut poch = s;
    let mut dpoch = one;
    let mut xpow = x_s / x; // x^{−s−1}
    let x2 = x * x;
    let mut last = T::zero();
    for j in 1..=(cfg.order + 1) {
        let c = T::lit(bernoulli_scaled(j));
        let term = poch * xpow * c;
        if j > cfg.order {
            // remainder bound: next term times |s + 2J + 1|/(Re s + 2J + 1)
            let k = T::from_usize_lossy(2 * cfg.order + 1);
            let sigma_k = s.re + k;
            let factor = if sigma_k > T::zero() {
                ((s + k).norm() / sigma_k).max(T::one())
            } else {
                T::infinity()
            };
            last = term.norm() * factor;
            break;
        }
        value = value + term;
        deriv = deriv + (dpoch * xpow - poch * xpow * lx) * c;
        // advance (s)_{2j−1} → (s)_{2j+1}
        let jj = T::from_usize_lossy(2 * j - 1);
        let f1 = s + jj;
        let f2 = s + jj + T::one();
        dpoch = dpoch * f1 * f2 + poch * (f1 + f2);
        poch = poch * f1 * f2;
        xpow = xpow / x2;
    }
    Ok(EmValue {
        value,
        derivative: deriv,
        error: last,
    })
}

/// Σ_{k≥0} (x + k)^{−s} − x^{1−s}/(s − 1) for x ≫ |s| by Euler–Maclaurin,
/// with a bound on the remainder. The integral term is left to the caller,
/// which may need to combine it across shifts before dividing by s − 1.
pub(crate) fn em_tail(s: Complex<f64>, x: f64, ln_x: f64, order: usize) -> (Complex<f64>, f64) {
    let x_s = (-s * ln_x).exp();
    let mut value = x_s * 0.5;
    let mut poch = s;
    let mut xpow = x_s / x;
    let x2 = x * x;
    for j in 1..=order {
        value += poch * xpow * bernoulli_scaled(j);
        let jj = (2 * j - 1) as f64;
        poch = poch * (s + jj) * (s + jj + 1.0);
        xpow /= x2;
    }
    let k = (2 * order + 1) as f64;
    let factor = ((s + k).norm() / (s.re + k)).max(1.0);
    let err = (poch * xpow * bernoulli_scaled(order + 1)).norm() * factor;
    (value, err)
}

#[inline]
fn kahan<T: Scalar>(sum: &mut Complex<T>, comp: &mut Complex<T>, term: Complex<T>) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

fn accept<T: Scalar>(v: EmValue<T>, cfg: EmConfig) -> Result<EmValue<T>> {
    let floor = T::lit(cfg.target.max(64.0 * T::epsilon().to_f64().unwrap_or(1e-16)));
    if !(v.error <= floor * v.value.norm().max(T::lit(1e-300))) {
        return Err(Error::AccuracyLoss(format!(
            "Euler–Maclaurin remainder {:e} too large for |value| {:e}",
            v.error.to_f64().unwrap_or(f64::NAN),
            v.value.norm().to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(v)
}

/// ζ(s, a) with the accuracy check; the cutoff is raised with |s|.
pub fn hurwitz_zeta<T: Scalar>(s: Complex<T>, a: T) -> Result<Complex<T>> {
    let cfg = EmConfig::default().for_argument(s.norm().to_f64().unwrap_or(0.0));
    accept(hurwitz_em(s, a, cfg)?, cfg).map(|v| v.value)
}

/// Riemann ζ(s) at real s with the default configuration.
pub fn zeta<T: Scalar>(s: T) -> Result<T> {
    zeta_with(s, EmConfig::default().for_argument(s.abs().to_f64().unwrap_or(0.0))).map(|v| v.value.re)
}

/// ζ(s) and ζ′(s) at real s with an explicit configuration.
pub fn zeta_with<T: Scalar>(s: T, cfg: EmConfig) -> Result<EmValue<T>> {
    let v = hurwitz_em(Complex::new(s, T::zero()), T::one(), cfg)?;
    accept(v, cfg)
}

/// ζ(s) at complex s.
pub fn zeta_complex<T: Scalar>(s: Complex<T>) -> Result<Complex<T>> {
    hurwitz_zeta(s, T::one())
}

/// ζ′(s)/ζ(s) at real s.
pub fn zeta_log_derivative<T: Scalar>(s: T) -> Result<T> {
    let v = zeta_with(s, EmConfig::default().for_argument(s.abs().to_f64().unwrap_or(0.0)))?;
    if v.value.re == T::zero() {
        return Err(Error::ZeroDenominator("ζ(s) = 0".into()));
    }
    Ok(v.derivative.re / v.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        assert!((zeta(2.0f64).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(6.0f64).unwrap() - PI.powi(6) / 945.0).abs() < 1e-14);
        assert!((zeta(4.0f32).unwrap() - (PI.powi(4) / 90.0) as f32).abs() < 1e-6);
        assert_eq!(zeta(1.0f64), Err(Error::Pole));
    }

    #[test]
    fn zeta_half_two_configurations() {
        let a = zeta_with(0.5f64, EmConfig::new(50, 10)).unwrap().value.re;
        let b = zeta_with(0.5f64, EmConfig::new(137, 16)).unwrap().value.re;
        assert!((a - b).abs() < 1e-13);
        assert!((a + 1.4603545088).abs() < 1e-10);
    }

    #[test]
    fn hurwitz_identities() {
        let s = Complex::new(2.0, 0.0);
        let v = hurwitz_zeta(s, 1.0f64).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-14);
        let v = hurwitz_zeta(s, 0.5f64).unwrap();
        assert!((v.re - PI * PI / 2.0).abs() < 1e-13);
        // ζ(s, 1/2) = (2^s − 1) ζ(s) at a complex point
        let s = Complex::new(0.5, 37.0);
        let lhs = hurwitz_zeta(s, 0.5f64).unwrap();
        let rhs = (Complex::new(2.0f64, 0.0).powc(s) - 1.0) * zeta_complex(s).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn hurwitz_against_direct_sum_oracle() {
        // direct partial sum to M plus a three-term tail, at two values of M
        let s = Complex::new(0.5, 10.0);
        let a = 1.0 / 3.0;
        let oracle = |m: usize| {
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..m {
                acc += (-s * (k as f64 + a).ln()).exp();
            }
            let x = m as f64 + a;
            let xs = (-s * x.ln()).exp();
            acc + xs * x / (s - 1.0) + xs * 0.5 + s * xs / x / 12.0
                - s * (s + 1.0) * (s + 2.0) * xs / x.powi(3) / 720.0
        };
        let o1 = oracle(20_000);
        let o2 = oracle(40_000);
        assert!((o1 - o2).norm() < 1e-12);
        let v = hurwitz_zeta(s, a).unwrap();
        assert!((v - o2).norm() < 1e-10, "{v} vs {o2}");
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for s in [0.5f64, 2.0, 3.5, -1.5] {
            let h = 1e-5;
            let d = zeta_with(s, EmConfig::new(60, 12)).unwrap().derivative.re;
            let fd = (zeta(s + h).unwrap() - zeta(s - h).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * d.abs().max(1.0), "s={s}");
        }
        // ζ′(0) = −½ log 2π
        let d0 = zeta_with(0.0f64, EmConfig::default()).unwrap().derivative.re;
        assert!((d0 + 0.5 * (2.0 * PI).ln()).abs() < 1e-13);
    }

    #[test]
    fn accuracy_loss_reported() {
        let cfg = EmConfig::new(2, 2);
        let s = Complex::new(0.5, 150.0);
        let v = hurwitz_em(s, 1.0f64, cfg).unwrap();
        assert!(accept(v, cfg).is_err());
    }
}
