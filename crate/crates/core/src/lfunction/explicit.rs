use super::gamma::digamma;
use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::numeric::{integrate_breakpoints, QuadConfig};
use crate::primes::simple_sieve;
use crate::testfn::TestFunction;

/// Σ_ρ f̂(γ log Q/2π) over all nontrivial zeros of L(s, χ*), χ* inducing χ,
/// by the explicit formula:
///
/// (f(0)/L)(log(q*/π) + ψ(1/4 + a/2)) − (2/L) Σ_n Λ(n) Re χ*(n) n^{−1/2} f(log n/L)
/// + 2∫₀^∞ Q^{−(1+2a)t/2}(f(0) − f(t))/(1 − Q^{−2t}) dt,
///
/// plus 4∫₀^σ f(x) cosh(xL/2) dx from the pole when χ* = 1.
pub fn explicit_formula_character(chi: &DirichletCharacter, tf: &TestFunction<f64>, scale: f64) -> Result<f64> {
    let (qs, inducer) = chi.conductor_and_inducer();
    let a = inducer.parity() as f64;
    let l = scale.ln();
    let sigma = tf.sigma();
    let f0 = tf.eval(0.0);

    let mut total = f0 / l * ((qs as f64 / std::f64::consts::PI).ln() + digamma(0.25 + a / 2.0));

    let nmax = (sigma * l).exp().floor() as u64;
    let mut prime_sum = 0.0;
    for p in simple_sieve(nmax) {
        let p = p as u64;
        let lp = (p as f64).ln();
        let mut n = p;
        loop {
            let w = inducer.evaluate(n as i64).re;
            prime_sum += lp * w / (n as f64).sqrt() * tf.eval((n as f64).ln() / l);
            match n.checked_mul(p) {
                Some(m) if m <= nmax => n = m,
                _ => break,
            }
        }
    }
    total -= 2.0 / l * prime_sum;

    let c = (1.0 + 2.0 * a) / 2.0;
    let cfg = QuadConfig::with_abs_tol(1e-13);
    let pts: Vec<f64> = (0..=16).map(|i| sigma * i as f64 / 16.0).collect();
    let head = integrate_breakpoints(
        |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            let q = (-c * t * l).exp();
            q * (f0 - tf.eval(t)) / (-(-2.0 * t * l).exp_m1())
        },
        &pts,
        &cfg,
    )?
    .value;
    // on t ≥ σ the integrand is f(0) Σ_k Q^{−(c + 2k)t}
    let mut far = 0.0;
    for k in 0..200 {
        let e = c + 2.0 * k as f64;
        let term = (-e * sigma * l).exp() / (e * l);
        far += term;
        if term < 1e-18 * far {
            break;
        }
    }
    total += 2.0 * (head + f0 * far);

    if qs == 1 {
        let pole = integrate_breakpoints(|x: f64| tf.eval(x) * (x * l / 2.0).cosh(), &pts, &cfg)?.value;
        total += 4.0 * pole;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::lfunction::find_zeros;
    use crate::testfn::default_test_function;
    use std::f64::consts::PI;

    #[test]
    fn matches_zero_sums_for_small_conductors() {
        let f = default_test_function();
        for q in [1u64, 3, 4, 5] {
            for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive()) {
                let scale = 5.0;
                let zs = find_zeros(&chi, 120.0).unwrap();
                let zc = find_zeros(&chi.conjugate(), 120.0).unwrap();
                let lq = f64::ln(scale);
                let zero_side: f64 = zs
                    .ordinates
                    .iter()
                    .chain(&zc.ordinates)
                    .map(|g| f.fourier(g * lq / (2.0 * PI)).unwrap())
                    .sum();
                let prime_side = explicit_formula_character(&chi, &f, scale).unwrap();
                assert!((zero_side - prime_side).abs() < 2e-3, "q={q}: {zero_side} vs {prime_side}");
            }
        }
    }
}
