use super::terms::{integrate_g, term_t2, term_t3};
use crate::arith::{factorize, totient};
use crate::error::{Error, Result};
use crate::special::constant;
use crate::testfn::TestFunction;
use serde::Serialize;
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

/// Spacing of the grid on which interval support conditions are sampled.
pub const SUPPORT_GRID: f64 = 1e-3;
/// Values of f at most this (relative to |f(0)|) count as vanishing.
pub const SUPPORT_ZERO: f64 = 1e-12;
/// Order of the T3 series reported next to every prediction.
const SERIES_ORDER: u32 = 3;

/// A closed-form prediction. The serialized names are the command-line tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Source {
    /// Main term plus T3 for the family mod q, Q = q.
    #[serde(rename = "ratios")]
    Ratios,
    /// Adds the T2 sum and the 1/φ(q) correction; needs σ ≤ 1.
    #[serde(rename = "thm14")]
    UnitSupport,
    /// The main term alone for σ ≤ 2.
    #[serde(rename = "thm15")]
    DoubleSupport,
    /// Averaged family with the S_f(Q) term; needs σ < 3/2.
    #[serde(rename = "thm17_1")]
    AveragedSmooth,
    /// Averaged family with f vanishing on (1, 1 + κ).
    #[serde(rename = "thm17_2")]
    AveragedGap,
    /// Averaged family with f vanishing on (1, a).
    #[serde(rename = "thm17_3")]
    AveragedInnerEdge,
    /// The mean μ0(a, M) of ψ(x;q,a) − Λ(a) − ψ(x)/φ(q) over q.
    #[serde(rename = "thm41_mu0")]
    Mu0,
}

impl Source {
    pub const ALL: [Source; 7] = [
        Source::Ratios,
        Source::UnitSupport,
        Source::DoubleSupport,
        Source::AveragedSmooth,
        Source::AveragedGap,
        Source::AveragedInnerEdge,
        Source::Mu0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Ratios => "ratios",
            Source::UnitSupport => "thm14",
            Source::DoubleSupport => "thm15",
            Source::AveragedSmooth => "thm17_1",
            Source::AveragedGap => "thm17_2",
            Source::AveragedInnerEdge => "thm17_3",
            Source::Mu0 => "thm41_mu0",
        }
    }

    /// Whether the prediction concerns the averaged family over (Q/2, Q].
    pub fn is_averaged(self) -> bool {
        matches!(self, Source::AveragedSmooth | Source::AveragedGap | Source::AveragedInnerEdge)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::UnknownSource(s.to_string()))
    }
}

/// Inputs of a prediction. Fixed-modulus sources use Q = q.
#[derive(Clone, Debug)]
pub struct PredictParams<'a> {
    pub tf: &'a TestFunction<f64>,
    pub modulus: Option<u64>,
    pub scale: Option<f64>,
    /// κ of the gapped support (−3/2, −1−κ] ∪ [−1, 1] ∪ [1+κ, 3/2).
    pub kappa: Option<f64>,
    /// a of the gapped support (−2, −a] ∪ [−1, 1] ∪ [a, 2).
    pub inner_edge: Option<f64>,
    /// (a, M) for μ0(a, M).
    pub mu0: Option<(i64, f64)>,
}

impl<'a> PredictParams<'a> {
    pub fn for_modulus(tf: &'a TestFunction<f64>, q: u64) -> Self {
        Self {
            tf,
            modulus: Some(q),
            scale: None,
            kappa: None,
            inner_edge: None,
            mu0: None,
        }
    }

    pub fn for_range(tf: &'a TestFunction<f64>, scale: f64) -> Self {
        Self {
            tf,
            modulus: None,
            scale: Some(scale),
            kappa: None,
            inner_edge: None,
            mu0: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub source: Source,
    pub value: f64,
    /// The displayed error term with implied constant 1, when there is one.
    pub envelope: Option<f64>,
}

fn gate(source: Source, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::SupportViolation {
            source_name: source.as_str().to_string(),
            detail: detail(),
        })
    }
}

/// Checks that f vanishes on the open interval (lo, hi), sampled on the grid.
fn vanishes_on(tf: &TestFunction<f64>, lo: f64, hi: f64) -> Option<f64> {
    let scale = tf.eval(0.0).abs().max(1.0);
    let mut k = 1u64;
    loop {
        let u = lo + k as f64 * SUPPORT_GRID;
        if u >= hi {
            return None;
        }
        if tf.eval(u).abs() > SUPPORT_ZERO * scale {
            return Some(u);
        }
        k += 1;
    }
}

fn need_modulus(p: &PredictParams, source: Source) -> Result<u64> {
    match p.modulus {
        Some(q) if q >= 3 => Ok(q),
        Some(q) => Err(Error::InvalidArgument(format!("{source} needs a modulus q ≥ 3, got {q}"))),
        None => Err(Error::InvalidArgument(format!("{source} needs a modulus"))),
    }
}

fn need_scale(p: &PredictParams, source: Source) -> Result<f64> {
    match p.scale {
        Some(q) if q >= 6.0 => Ok(q),
        Some(q) => Err(Error::InvalidArgument(format!("{source} needs a scale Q ≥ 6, got {q}"))),
        None => Err(Error::InvalidArgument(format!("{source} needs a scale Q"))),
    }
}

/// f(0)(1 − log(8πe^γ)/log q − Σ_{p|q} log p/((p−1) log q)) + T3 with Q = q.
fn fixed_main(tf: &TestFunction<f64>, q: u64) -> Result<f64> {
    let l = (q as f64).ln();
    let gamma = constant("gamma")?.value;
    let sp: f64 = factorize(q).iter().map(|&(p, _)| (p as f64).ln() / (p as f64 - 1.0)).sum();
    let main = tf.eval(0.0) * (1.0 - ((8.0 * PI).ln() + gamma) / l - sp / l);
    Ok(main + term_t3(q as f64, tf, SERIES_ORDER)?.quadrature)
}

/// (f(0)/log Q)(log Q − 1 − γ − log 4π − Σ_p log p/(p(p−1))).
pub fn averaged_main_term(tf: &TestFunction<f64>, scale: f64) -> Result<f64> {
    let l = scale.ln();
    let gamma = constant("gamma")?.value;
    let s_pp = constant("S_pp")?.value;
    Ok(tf.eval(0.0) / l * (l - 1.0 - gamma - (4.0 * PI).ln() - s_pp))
}

/// The averaged contribution of u ∈ [0, 1]: (4 log 2/Q) D1 ∫₀^1 Q^{u/2} g(u) du.
///
/// The sign is the one obtained from the prime-sum definition of T4; the
/// ψ-integral form carries the opposite sign (see the module notes).
fn d1_term(tf: &TestFunction<f64>, scale: f64) -> Result<f64> {
    let l = scale.ln();
    let d1 = constant("D1")?.value;
    let i = integrate_g(tf, l, 0.0, 1.0, |u| (0.5 * u * l).exp())?;
    Ok(4.0 * LN_2 / scale * d1 * i)
}

/// S_f(Q) with the two printed terms.
pub fn s_f(tf: &TestFunction<f64>, scale: f64) -> Result<f64> {
    let l = scale.ln();
    let zh = constant("zeta_half")?.value;
    let zld = constant("zeta_log_deriv_half")?.value;
    let s_h = constant("S_h")?.value;
    let prod_h = constant("prod_h")?.value;
    let f1 = tf.eval(1.0);
    let d1 = tf.derivative(1.0, 1)?;
    let coeff = (SQRT_2 + 4.0) / 3.0 - (zld - s_h);
    Ok((2.0 - SQRT_2) * zh * prod_h * (f1 + coeff * d1 / l))
}

/// μ0(a, M): −½ log M − C6/2 for a = ±1, −½ log p for a = ±p^e, else 0.
pub fn mu0(a: i64, m: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::InvalidArgument("μ0 needs a ≠ 0".into()));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("μ0 needs M > 0, got {m}")));
    }
    let n = a.unsigned_abs();
    if n == 1 {
        return Ok(-0.5 * m.ln() - 0.5 * constant("C6_mu0")?.value);
    }
    let f = factorize(n);
    Ok(if f.len() == 1 { -0.5 * (f[0].0 as f64).ln() } else { 0.0 })
}

/// Evaluates the prediction of `source`, checking its support condition first.
pub fn predict(source: Source, p: &PredictParams) -> Result<Prediction> {
    let tf = p.tf;
    let sigma = tf.sigma();
    let (value, envelope) = match source {
        Source::Ratios => {
            let q = need_modulus(p, source)?;
            (fixed_main(tf, q)?, Some((q as f64).powf(-0.5)))
        }
        Source::UnitSupport => {
            gate(source, sigma <= 1.0, || format!("σ = {sigma} exceeds 1"))?;
            let q = need_modulus(p, source)?;
            let qf = q as f64;
            let l = qf.ln();
            let corr = 2.0 / totient(q) as f64 * integrate_g(tf, l, 0.0, 1.0, |u| (0.5 * u * l).exp())?;
            let v = fixed_main(tf, q)? + term_t2(q, qf, tf)? + corr;
            (v, Some(qf.powf(sigma / 2.0 - 1.0)))
        }
        Source::DoubleSupport => {
            gate(source, sigma <= 2.0, || format!("σ = {sigma} exceeds 2"))?;
            let q = need_modulus(p, source)?;
            let qf = q as f64;
            let env = qf.ln().ln().abs() / qf.ln() * qf.powf(sigma / 2.0 - 1.0);
            (fixed_main(tf, q)?, Some(env))
        }
        Source::AveragedSmooth => {
            gate(source, sigma < 1.5, || format!("σ = {sigma} is not below 3/2"))?;
            let q = need_scale(p, source)?;
            let l = q.ln();
            let v = averaged_main_term(tf, q)? + term_t3(q, tf, SERIES_ORDER)?.quadrature - q.powf(-0.5) / l * s_f(tf, q)?;
            let env = q.powf(-0.5) / l * (l.ln() / l).powi(2);
            (v, Some(env))
        }
        Source::AveragedGap => {
            gate(source, sigma < 1.5, || format!("σ = {sigma} is not below 3/2"))?;
            let kappa = p
                .kappa
                .ok_or_else(|| Error::InvalidArgument("thm17_2 needs κ".into()))?;
            if !(kappa > 0.0) {
                return Err(Error::InvalidArgument(format!("κ must be positive, got {kappa}")));
            }
            if let Some(u) = vanishes_on(tf, 1.0, 1.0 + kappa) {
                gate(source, false, || format!("f({u:.3}) ≠ 0 inside the gap (1, 1 + κ)"))?;
            }
            let q = need_scale(p, source)?;
            let l = q.ln();
            let c6 = constant("C6")?.value;
            let gap = integrate_g(tf, l, 1.0 + kappa, 4.0 / 3.0, |u| ((u - 1.0) * l + c6) * (-0.5 * u * l).exp())?;
            let v = averaged_main_term(tf, q)? + term_t3(q, tf, SERIES_ORDER)?.quadrature + d1_term(tf, q)? + gap;
            let env = q.powf(-0.5 - kappa) + q.powf(-2.0 / 3.0) * l + q.powf(sigma - 2.0) * l;
            (v, Some(env))
        }
        Source::AveragedInnerEdge => {
            gate(source, sigma < 2.0, || format!("σ = {sigma} is not below 2"))?;
            let a = p.inner_edge.unwrap_or(1.0);
            if !(1.0..2.0).contains(&a) {
                return Err(Error::InvalidArgument(format!("inner edge a must lie in [1, 2), got {a}")));
            }
            if let Some(u) = vanishes_on(tf, 1.0, a) {
                gate(source, false, || format!("f({u:.3}) ≠ 0 inside the gap (1, a)"))?;
            }
            let q = need_scale(p, source)?;
            let l = q.ln();
            let v = averaged_main_term(tf, q)? + term_t3(q, tf, SERIES_ORDER)?.quadrature + d1_term(tf, q)?;
            (v, Some(q.powf(-a / 2.0) + q.powf(sigma - 2.0) * l))
        }
        Source::Mu0 => {
            let (a, m) = p
                .mu0
                .ok_or_else(|| Error::InvalidArgument("thm41_mu0 needs (a, M)".into()))?;
            (mu0(a, m)?, None)
        }
    };
    Ok(Prediction {
        source,
        value,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::default_test_function;

    #[test]
    fn source_names_round_trip() {
        for s in Source::ALL {
            assert_eq!(s.as_str().parse::<Source>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
        assert!(matches!("thm99".parse::<Source>(), Err(Error::UnknownSource(_))));
    }

    #[test]
    fn mu0_cases() {
        let c6 = constant("C6_mu0").unwrap().value;
        let m = 50.0f64;
        assert!((mu0(1, m).unwrap() - (-0.5 * m.ln() - c6 / 2.0)).abs() < 1e-15);
        assert_eq!(mu0(-1, m).unwrap(), mu0(1, m).unwrap());
        assert_eq!(mu0(6, m).unwrap(), 0.0);
        assert!((mu0(8, m).unwrap() + 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((mu0(-9, m).unwrap() + 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!(mu0(0, m).is_err());
    }

    #[test]
    fn support_gates() {
        let wide = TestFunction::polynomial_bump(2.0, 3).unwrap();
        let p = PredictParams::for_modulus(&wide, 9);
        let e = predict(Source::UnitSupport, &p).unwrap_err();
        assert_eq!(e.kind(), crate::ErrorKind::SupportGate);
        let mid = TestFunction::polynomial_bump(1.5, 3).unwrap();
        let p = PredictParams::for_range(&mid, 1000.0);
        assert!(matches!(predict(Source::AveragedSmooth, &p), Err(Error::SupportViolation { .. })));
        // a bump of width 1.2 does not vanish on (1, 1.1)
        let b = TestFunction::polynomial_bump(1.2, 3).unwrap();
        let mut p = PredictParams::for_range(&b, 1000.0);
        p.kappa = Some(0.1);
        assert!(matches!(predict(Source::AveragedGap, &p), Err(Error::SupportViolation { .. })));
        let f = default_test_function();
        let mut p = PredictParams::for_range(&f, 1000.0);
        p.kappa = Some(0.1);
        assert!(predict(Source::AveragedGap, &p).is_ok());
    }

    #[test]
    fn gapped_support_passes_the_gate() {
        // mass on [1.2, 1.4] and none on (1, 1.2)
        let g = TestFunction::custom(1.4, "shell", |x: f64| {
            let a = x.abs();
            if a < 1.0 {
                (1.0 - a * a).powi(3)
            } else if (1.2..1.4).contains(&a) {
                let t = (a - 1.3) / 0.1;
                (1.0 - t * t).powi(3)
            } else {
                0.0
            }
        })
        .unwrap();
        let mut p = PredictParams::for_range(&g, 1e4);
        p.kappa = Some(0.2);
        let with_gap = predict(Source::AveragedGap, &p).unwrap();
        p.kappa = Some(0.25);
        assert!(predict(Source::AveragedGap, &p).is_err());
        let plain = predict(Source::AveragedInnerEdge, &PredictParams { inner_edge: Some(1.2), ..PredictParams::for_range(&g, 1e4) }).unwrap();
        assert!(with_gap.value != plain.value);
    }

    #[test]
    fn unit_support_components() {
        let f = default_test_function();
        let q = 1009u64;
        let p = predict(Source::UnitSupport, &PredictParams::for_modulus(&f, q)).unwrap();
        let r = predict(Source::Ratios, &PredictParams::for_modulus(&f, q)).unwrap();
        // prime q: T2 vanishes, leaving the 1/φ(q) correction
        let d = p.value - r.value;
        assert!(d > 0.0 && d < 0.01, "{d}");
        assert!((p.envelope.unwrap() - (q as f64).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn linear_in_test_function() {
        let f = default_test_function();
        let g = TestFunction::polynomial_bump(0.8, 4).unwrap();
        let sum = TestFunction::linear_combination(vec![(1.0, f.clone()), (1.0, g.clone())]);
        let twice = TestFunction::linear_combination(vec![(2.0, f.clone())]);
        for s in [Source::Ratios, Source::UnitSupport, Source::DoubleSupport] {
            let v = |t: &TestFunction<f64>| predict(s, &PredictParams::for_modulus(t, 101)).unwrap().value;
            assert!((v(&sum) - v(&f) - v(&g)).abs() < 1e-10, "{s}");
            assert!((v(&twice) - 2.0 * v(&f)).abs() < 1e-10, "{s}");
        }
        for s in [Source::AveragedSmooth, Source::AveragedInnerEdge] {
            let v = |t: &TestFunction<f64>| predict(s, &PredictParams::for_range(t, 1e3)).unwrap().value;
            assert!((v(&sum) - v(&f) - v(&g)).abs() < 1e-10, "{s}");
        }
    }
}
