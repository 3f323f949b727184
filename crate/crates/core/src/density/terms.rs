use crate::arith::{factorize, pow_mod, totient};
use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_breakpoints, CompensatedSum, QuadConfig};
use crate::primes::PrimeTable;
use crate::special::{constant, zeta};
use crate::testfn::TestFunction;
use std::f64::consts::PI;

/// Absolute tolerance of the T3 quadrature.
pub const T3_TOL: f64 = 1e-10;
/// Absolute tolerance of each T4 quadrature (both integral forms).
pub const T4_TOL: f64 = 1e-10;

fn check_scale(scale: f64) -> Result<f64> {
    if !(scale > 1.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scale Q must exceed 1, got {scale}")));
    }
    Ok(scale.ln())
}

fn check_modulus(q: u64) -> Result<()> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("modulus must be at least 3, got {q}")));
    }
    Ok(())
}

/// T1 = (f(0)/log Q)(log q − log(8πe^γ) − Σ_{p|q} log p/(p−1)).
pub fn term_t1(q: u64, scale: f64, tf: &TestFunction<f64>) -> Result<f64> {
    check_modulus(q)?;
    let l = check_scale(scale)?;
    let gamma = constant("gamma")?.value;
    let sp: f64 = factorize(q).iter().map(|&(p, _)| (p as f64).ln() / (p as f64 - 1.0)).sum();
    Ok(tf.eval(0.0) / l * ((q as f64).ln() - (8.0 * PI).ln() - gamma - sp))
}

/// T2 = −(2/log Q) Σ_{p^ν∥q} Σ_{e: p^e ≡ 1 mod q/p^ν, p^e ≤ Q^σ} log p/(φ(p^ν)p^{e/2}) f(log p^e/log Q).
pub fn term_t2(q: u64, scale: f64, tf: &TestFunction<f64>) -> Result<f64> {
    check_modulus(q)?;
    let l = check_scale(scale)?;
    let sigma = tf.sigma();
    let mut acc = CompensatedSum::new();
    for (p, nu) in factorize(q) {
        let pnu = p.pow(nu);
        let m = q / pnu;
        let phi = totient(pnu) as f64;
        let lp = (p as f64).ln();
        let mut e = 1u32;
        while e as f64 * lp <= sigma * l {
            if m == 1 || pow_mod(p, e as u64, m) == 1 {
                let u = e as f64 * lp / l;
                acc += lp / (phi * (p as f64).powf(e as f64 / 2.0)) * tf.eval(u);
            }
            e += 1;
        }
    }
    Ok(-2.0 / l * acc.value())
}

/// T3 by quadrature together with its truncated Taylor series.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct T3Value {
    pub quadrature: f64,
    pub quadrature_error: f64,
    /// −Σ_{k≤K} (2^{k+1} − 1) ζ(k+1) f^{(k)}(0)/(log Q)^{k+1}.
    pub series: f64,
    pub order: u32,
}

/// T3 = ∫₀^∞ (f(0) − f(t))/(Q^{t/2} − Q^{−t/2}) dt, with the series to order K.
///
/// Beyond σ the integrand is f(0)/(2 sinh(t log Q/2)), integrated in closed
/// form as −(f(0)/log Q) log tanh(σ log Q/4).
pub fn term_t3(scale: f64, tf: &TestFunction<f64>, order: u32) -> Result<T3Value> {
    let l = check_scale(scale)?;
    let f0 = tf.eval(0.0);
    let sigma = tf.sigma();
    let pts: Vec<f64> = (0..=8).map(|i| sigma * i as f64 / 8.0).collect();
    let cfg = QuadConfig::with_abs_tol(T3_TOL / 10.0);
    let head = integrate_breakpoints(
        |t: f64| {
            let d = 2.0 * (0.5 * t * l).sinh();
            (f0 - tf.eval(t)) / d
        },
        &pts,
        &cfg,
    )?;
    let tail = -f0 / l * (0.25 * sigma * l).tanh().ln();

    let mut series = CompensatedSum::new();
    for k in 1..=order {
        let dk = tf.derivative_at_zero(k)?;
        if dk == 0.0 {
            continue;
        }
        let c = (2f64.powi(k as i32 + 1) - 1.0) * zeta::<f64>(k as f64 + 1.0)?;
        series += -c * dk / l.powi(k as i32 + 1);
    }
    Ok(T3Value {
        quadrature: head.value + tail,
        quadrature_error: head.error,
        series: series.value(),
        order,
    })
}

/// Which representation of T4 to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum T4Form {
    /// −(2/log Q)(Σ_{n≡1} − (1/φ(q))Σ_n) Λ(n) n^{−1/2} f(log n/log Q).
    PrimeSum,
    /// −2∫ (f/2 − f′/log Q)(ψ(Q^u;q,1) − ψ(Q^u)/φ(q)) Q^{−u/2} du.
    Psi,
    /// −2∫ (3f/4 − 2f′/log Q + f″/log²Q)(ψ2(Q^u;q,1) − ψ2(Q^u)/φ(q)) Q^{−u/2} du.
    Psi2,
}

/// Integrals of the smooth weights against ψ-type step functions, shared
/// between moduli with the same scale Q.
pub(crate) struct T4Kernel<'a> {
    tf: &'a TestFunction<f64>,
    table: &'a PrimeTable,
    l: f64,
    x_max: f64,
    form: T4Form,
    /// The all-n integral for `form`.
    full: f64,
}

impl<'a> T4Kernel<'a> {
    pub(crate) fn new(scale: f64, tf: &'a TestFunction<f64>, table: &'a PrimeTable, form: T4Form) -> Result<Self> {
        let l = check_scale(scale)?;
        let x_max = scale.powf(tf.sigma());
        if x_max > table.limit() as f64 {
            return Err(Error::OutOfRange {
                arg: x_max,
                limit: table.limit(),
            });
        }
        let mut k = Self {
            tf,
            table,
            l,
            x_max,
            form,
            full: 0.0,
        };
        if !tf.is_zero() {
            let n = table.count_powers_le(x_max);
            let jumps: Vec<(u64, f64)> = table.prime_powers()[..n]
                .iter()
                .zip(&table.lambdas()[..n])
                .map(|(&n, &l)| (n as u64, l))
                .collect();
            k.full = k.integral(&jumps)?;
        }
        Ok(k)
    }

    pub(crate) fn t4(&self, q: u64) -> Result<f64> {
        check_modulus(q)?;
        if self.tf.is_zero() {
            return Ok(0.0);
        }
        let class = self.table.class_powers(self.x_max, q, 1);
        let c = self.integral(&class)?;
        Ok(c - self.full / totient(q) as f64)
    }

    /// The form's functional of the step function with jumps Λ(n) at `jumps`.
    fn integral(&self, jumps: &[(u64, f64)]) -> Result<f64> {
        let l = self.l;
        let tf = self.tf;
        let f = |u: f64| tf.eval(u);
        let d1 = |u: f64| tf.derivative(u, 1).unwrap_or(f64::NAN);
        let d2 = |u: f64| tf.derivative(u, 2).unwrap_or(f64::NAN);
        match self.form {
            T4Form::PrimeSum => {
                let mut acc = CompensatedSum::new();
                for &(n, lam) in jumps {
                    let x = n as f64;
                    acc += lam / x.sqrt() * f(x.ln() / l);
                }
                Ok(-2.0 / l * acc.value())
            }
            T4Form::Psi => {
                let w = |u: f64| (0.5 * f(u) - d1(u) / l) * (-0.5 * u * l).exp();
                Ok(-2.0 * step_integral(jumps, l, tf.sigma(), &w)?)
            }
            T4Form::Psi2 => {
                let h = |u: f64| 0.75 * f(u) - 2.0 * d1(u) / l + d2(u) / (l * l);
                let wa = |u: f64| h(u) * (-0.5 * u * l).exp();
                let wb = |u: f64| h(u) * (-1.5 * u * l).exp();
                let nl: Vec<(u64, f64)> = jumps.iter().map(|&(n, lam)| (n, n as f64 * lam)).collect();
                let a = step_integral(jumps, l, tf.sigma(), &wa)?;
                let b = step_integral(&nl, l, tf.sigma(), &wb)?;
                Ok(-2.0 * (a - b))
            }
        }
    }
}

/// ∫₀^σ w(u) S(Q^u) du where S(x) = Σ_{n≤x} c_n jumps at the (sorted) n of
/// `jumps`. Each gap between consecutive jumps is one quadrature panel set.
fn step_integral(jumps: &[(u64, f64)], l: f64, sigma: f64, w: &dyn Fn(f64) -> f64) -> Result<f64> {
    let us: Vec<f64> = jumps.iter().map(|&(n, _)| (n as f64).ln() / l).take_while(|&u| u < sigma).collect();
    if us.is_empty() {
        return Ok(0.0);
    }
    let mut level = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    let pieces = us.len() as f64;
    for (i, &a) in us.iter().enumerate() {
        level += jumps[i].1;
        let s = level.value();
        let b = us.get(i + 1).copied().unwrap_or(sigma);
        if b <= a || s == 0.0 {
            continue;
        }
        let cfg = QuadConfig::with_abs_tol(T4_TOL / (4.0 * pieces * s.abs()));
        let r = integrate(|u| w(u), a, b, &cfg)?;
        total += s * r.value;
    }
    Ok(total.value())
}

/// T4(q) in the chosen form, for a single modulus.
pub fn term_t4(q: u64, scale: f64, tf: &TestFunction<f64>, table: &PrimeTable, form: T4Form) -> Result<f64> {
    T4Kernel::new(scale, tf, table, form)?.t4(q)
}

/// g(u) = f(u)/2 − f′(u)/log Q, the weight of the ψ form.
pub(crate) fn g_weight(tf: &TestFunction<f64>, l: f64, u: f64) -> f64 {
    0.5 * tf.eval(u) - tf.derivative(u, 1).unwrap_or(f64::NAN) / l
}

/// ∫_a^b w(u) g(u) du with a knot at σ.
pub(crate) fn integrate_g(tf: &TestFunction<f64>, l: f64, a: f64, b: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut pts = vec![a];
    let s = tf.sigma();
    if s > a && s < b {
        pts.push(s);
    }
    pts.push(b);
    let cfg = QuadConfig::with_abs_tol(1e-13);
    Ok(integrate_breakpoints(|u| w(u) * g_weight(tf, l, u), &pts, &cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::default_test_function;

    #[test]
    fn t1_oracle() {
        let f = default_test_function();
        // f(0) = 1 for the default bump
        let l5 = 5f64.ln();
        let want = (l5 - (8.0 * PI).ln() - 0.577_215_664_901_532_9 - l5 / 4.0) / l5;
        let got = term_t1(5, 5.0, &f).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got + 1.6119).abs() < 1e-4);
        // scaling by f(0) = 32/35 reproduces the other normalization
        assert!((got * 32.0 / 35.0 + 1.4738).abs() < 1e-4);
        assert_eq!(term_t1(5, 5.0, &TestFunction::zero(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn t2_prime_modulus_vanishes() {
        let f = default_test_function();
        for q in [5u64, 7, 101, 1009] {
            assert_eq!(term_t2(q, q as f64, &f).unwrap(), 0.0);
        }
    }

    #[test]
    fn t2_modulus_six() {
        // p = 2: 2^e ≡ 1 mod 3 for even e; p = 3: every e (mod 2)
        let f = TestFunction::polynomial_bump(2.0, 3).unwrap();
        let l = 6f64.ln();
        let mut want = 0.0;
        for e in 1..20u32 {
            let u2 = e as f64 * 2f64.ln() / l;
            if e % 2 == 0 && u2 <= 2.0 {
                want += 2f64.ln() / 2f64.powf(e as f64 / 2.0) * f.eval(u2);
            }
            let u3 = e as f64 * 3f64.ln() / l;
            if u3 <= 2.0 {
                want += 3f64.ln() / (2.0 * 3f64.powf(e as f64 / 2.0)) * f.eval(u3);
            }
        }
        want *= -2.0 / l;
        let got = term_t2(6, 6.0, &f).unwrap();
        assert!(got != 0.0);
        assert!((got - want).abs() < 1e-14);
        // σ below log 4/log 6 leaves only the p = 3 branch
        let g = TestFunction::polynomial_bump(0.7, 3).unwrap();
        let only3 = -2.0 / l * 3f64.ln() / (2.0 * 3f64.sqrt()) * g.eval(3f64.ln() / l);
        assert!((term_t2(6, 6.0, &g).unwrap() - only3).abs() < 1e-15);
    }

    #[test]
    fn t2_prime_power_branch() {
        // q = 9: single p = 3 with q/p^ν = 1, so every e counts
        let f = TestFunction::polynomial_bump(2.0, 3).unwrap();
        let l = 9f64.ln();
        let want: f64 = (1..=4)
            .map(|e| 3f64.ln() / (6.0 * 3f64.powf(e as f64 / 2.0)) * f.eval(e as f64 * 3f64.ln() / l))
            .sum::<f64>()
            * (-2.0 / l);
        assert!((term_t2(9, 9.0, &f).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn t3_quadrature_and_bound() {
        let f = default_test_function();
        for q in [1e2, 1e4] {
            let t = term_t3(q, &f, 2).unwrap();
            assert!(t.quadrature > 0.0);
            assert!(t.quadrature_error < T3_TOL);
            // sup |f′| of (1 − x²)³ is 6·(1/√5)(4/5)² at x = 1/√5
            let sup = 6.0 / 5f64.sqrt() * 0.64;
            assert!(t.quadrature <= PI / (4.0 * q.ln()) * sup);
        }
        let z = term_t3(100.0, &TestFunction::zero(1.0), 3).unwrap();
        assert_eq!((z.quadrature, z.series), (0.0, 0.0));
    }

    #[test]
    fn t3_series_matches_quadrature_for_large_scale() {
        // the series is asymptotic in 1/log Q: check it at a very large Q
        let f = default_test_function();
        let q = 1e80f64;
        let t = term_t3(q, &f, 2).unwrap();
        let want = 42.0 * 1.202_056_903_159_594 / q.ln().powi(3);
        assert!((t.series - want).abs() < 1e-15);
        assert!((t.quadrature - t.series).abs() < 20.0 / q.ln().powi(4));
    }

    #[test]
    fn t4_forms_agree() {
        let table = PrimeTable::new(20_000).unwrap();
        let f = TestFunction::polynomial_bump(1.4, 3).unwrap();
        let q = 101u64;
        let s = term_t4(q, q as f64, &f, &table, T4Form::PrimeSum).unwrap();
        let a = term_t4(q, q as f64, &f, &table, T4Form::Psi).unwrap();
        let b = term_t4(q, q as f64, &f, &table, T4Form::Psi2).unwrap();
        assert!((a - b).abs() < 10.0 * T4_TOL, "{a} {b}");
        assert!((a - s).abs() < 10.0 * T4_TOL, "{a} {s}");
    }

    #[test]
    fn t4_below_unit_support_is_the_full_psi_integral() {
        // no n ≡ 1 mod q lies in [2, q], so only the ψ(Q^u)/φ(q) part survives
        let table = PrimeTable::new(2_000).unwrap();
        let f = default_test_function();
        let q = 1009u64;
        let l = (q as f64).ln();
        let cfg = QuadConfig::with_abs_tol(1e-13);
        let mut pts: Vec<f64> = table.prime_powers().iter().map(|&n| (n as f64).ln() / l).filter(|&u| u < 1.0).collect();
        pts.insert(0, 0.0);
        pts.push(1.0);
        let direct = integrate_breakpoints(
            |u: f64| g_weight(&f, l, u) * table.psi((q as f64).powf(u).min(q as f64), None).unwrap().value / (q as f64).powf(u / 2.0),
            &pts,
            &cfg,
        )
        .unwrap()
        .value;
        let want = 2.0 / (q - 1) as f64 * direct;
        let got = term_t4(q, q as f64, &f, &table, T4Form::Psi).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} {want}");
        assert!(got > 0.0);
    }

    #[test]
    fn t4_table_overflow() {
        let table = PrimeTable::new(1_000).unwrap();
        let f = TestFunction::polynomial_bump(1.5, 3).unwrap();
        assert!(matches!(
            term_t4(101, 101.0, &f, &table, T4Form::Psi),
            Err(Error::OutOfRange { .. })
        ));
    }
}
