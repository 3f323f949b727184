//! The prime side of the explicit formula for the family of characters mod q,
//! and for its average over q ∈ (Q/2, Q], with the closed-form predictions
//! it is compared against.
//!
//! Signs: the terms T1–T4 follow the prime-sum form of the explicit
//! formula. Written as an integral against ψ(Q^u; q, 1) − ψ(Q^u)/φ(q), T4
//! is −2∫(f/2 − f′/log Q)(…)Q^{−u/2} du; every prediction built from that
//! integral (the 1/φ(q) correction, the D1 term, the C6 gap term and the
//! S_f term) inherits this sign.

mod predict;
mod terms;

pub use predict::{averaged_main_term, mu0, predict, s_f, PredictParams, Prediction, Source, SUPPORT_GRID, SUPPORT_ZERO};
pub use terms::{term_t1, term_t2, term_t3, term_t4, T3Value, T4Form, T3_TOL, T4_TOL};

use crate::arith::totient_table;
use crate::error::{Error, Result};
use crate::lfunction::FamilyZeroSum;
use crate::numeric::CompensatedSum;
use crate::primes::PrimeTable;
use crate::testfn::{TestFunction, TestFunctionSpec};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use terms::T4Kernel;

/// Multiple of 1/φ(q) allowed between the zero and prime sides, on top of
/// the zero-side tail bound.
pub const EXPLICIT_SLACK: f64 = 3.0;
/// Order of the T3 series stored in reports.
pub const REPORT_SERIES_ORDER: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Modulus { q: u64 },
    Range { lower: u64, upper: u64, weighted: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Terms {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl Terms {
    pub fn total(&self) -> f64 {
        [self.t1, self.t2, self.t3, self.t4].into_iter().collect::<CompensatedSum<f64>>().value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSide {
    pub value: f64,
    pub tail_bound: f64,
    pub height: f64,
    pub zeros_used: usize,
}

/// `lhs − rhs` for two named totals, with the envelope it is judged against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub lhs: String,
    pub rhs: String,
    pub value: f64,
    pub envelope: Option<f64>,
    pub within_envelope: Option<bool>,
}

impl Residual {
    fn new(lhs: &str, rhs: &str, a: f64, b: f64, envelope: Option<f64>) -> Self {
        let value = a - b;
        Self {
            lhs: lhs.into(),
            rhs: rhs.into(),
            value,
            envelope,
            within_envelope: envelope.map(|e| value.abs() <= e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub family: Family,
    pub scale: f64,
    pub test_function: TestFunctionSpec,
    pub terms: Terms,
    /// T3 from its Taylor series, for comparison with the quadrature value.
    pub t3_series: f64,
    pub prime_side: f64,
    /// Size of the omitted O(·) term of the explicit formula (constant 1).
    pub slack: f64,
    /// Closed form of the averaged T1, for range families.
    pub main_term_closed_form: Option<f64>,
    pub zero_side: Option<ZeroSide>,
    pub predictions: Vec<Prediction>,
    pub residuals: Vec<Residual>,
}

impl DensityReport {
    /// Records the zero side and its residual against the prime side.
    pub fn attach_zero_side(&mut self, z: &FamilyZeroSum) {
        self.attach_zero_side_with_slack(z, EXPLICIT_SLACK);
    }

    /// As [`Self::attach_zero_side`] with `multiple` in place of [`EXPLICIT_SLACK`].
    pub fn attach_zero_side_with_slack(&mut self, z: &FamilyZeroSum, multiple: f64) {
        self.zero_side = Some(ZeroSide {
            value: z.value,
            tail_bound: z.tail_bound,
            height: z.height,
            zeros_used: z.zeros_used,
        });
        let env = z.tail_bound + multiple * self.slack;
        self.residuals.push(Residual::new("zero_side", "prime_side", z.value, self.prime_side, Some(env)));
    }

    /// Records a prediction and its residual against the prime side.
    pub fn attach_prediction(&mut self, p: Prediction) {
        let r = Residual::new("prime_side", p.source.as_str(), self.prime_side, p.value, p.envelope);
        self.residuals.push(r);
        self.predictions.push(p);
    }

    pub fn residual(&self, lhs: &str, rhs: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.lhs == lhs && r.rhs == rhs)
    }
}

/// T1 + T2 + T3 + T4 for the characters mod q at scale Q, with T4 in ψ form.
pub fn density_prime_side(q: u64, scale: f64, tf: &TestFunction<f64>, table: &PrimeTable) -> Result<DensityReport> {
    let t3 = term_t3(scale, tf, REPORT_SERIES_ORDER)?;
    let kernel = T4Kernel::new(scale, tf, table, T4Form::Psi)?;
    let terms = Terms {
        t1: term_t1(q, scale, tf)?,
        t2: term_t2(q, scale, tf)?,
        t3: t3.quadrature,
        t4: kernel.t4(q)?,
    };
    Ok(DensityReport {
        family: Family::Modulus { q },
        scale,
        test_function: tf.spec(),
        prime_side: terms.total(),
        terms,
        t3_series: t3.series,
        slack: 1.0 / crate::arith::totient(q) as f64,
        main_term_closed_form: None,
        zero_side: None,
        predictions: Vec::new(),
        residuals: Vec::new(),
    })
}

/// Σ_{Q/2<q≤Q} φ(q) approximated by (9/π²)(Q/2)².
pub fn unweighted_normalization(scale: f64) -> f64 {
    9.0 / (PI * PI) * (scale / 2.0).powi(2)
}

/// The prime side averaged over q ∈ (Q/2, Q] with the common scale Q.
///
/// Weighted: (1/(Q/2)) Σ_q D_q. Unweighted: Σ_q φ(q) D_q / ((9/π²)(Q/2)²),
/// which counts every character once.
pub fn density_averaged(scale: f64, tf: &TestFunction<f64>, weighted: bool, table: &PrimeTable) -> Result<DensityReport> {
    if !(scale >= 6.0) {
        return Err(Error::InvalidArgument(format!("averaged family needs Q ≥ 6, got {scale}")));
    }
    let lower = (scale / 2.0).floor() as u64 + 1;
    let upper = scale.floor() as u64;
    let t3 = term_t3(scale, tf, REPORT_SERIES_ORDER)?;
    let kernel = T4Kernel::new(scale, tf, table, T4Form::Psi)?;
    let phis = totient_table(upper as usize);
    let per_q: Vec<(f64, [f64; 3])> = (lower..=upper)
        .into_par_iter()
        .map(|q| {
            let w = if weighted { 1.0 } else { phis[q as usize] as f64 };
            Ok((w, [term_t1(q, scale, tf)?, term_t2(q, scale, tf)?, kernel.t4(q)?]))
        })
        .collect::<Result<_>>()?;
    let norm = if weighted { scale / 2.0 } else { unweighted_normalization(scale) };
    let mut acc = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut weight = CompensatedSum::new();
    for (w, t) in &per_q {
        weight += *w;
        for i in 0..3 {
            acc[i] += w * t[i];
        }
    }
    let terms = Terms {
        t1: acc[0].value() / norm,
        t2: acc[1].value() / norm,
        t3: t3.quadrature * weight.value() / norm,
        t4: acc[2].value() / norm,
    };
    let closed = averaged_main_term(tf, scale)?;
    let mut report = DensityReport {
        family: Family::Range { lower, upper, weighted },
        scale,
        test_function: tf.spec(),
        prime_side: terms.total(),
        terms,
        t3_series: t3.series,
        slack: 1.0 / scale,
        main_term_closed_form: Some(closed),
        zero_side: None,
        predictions: Vec::new(),
        residuals: Vec::new(),
    };
    if weighted {
        report.residuals.push(Residual::new("t1_average", "t1_closed_form", terms.t1, closed, Some(10.0 / scale)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::default_test_function;

    #[test]
    fn zero_test_function_gives_zero_terms() {
        let table = PrimeTable::new(1000).unwrap();
        let z = TestFunction::zero(1.0);
        let r = density_prime_side(7, 7.0, &z, &table).unwrap();
        assert_eq!(r.terms, Terms { t1: 0.0, t2: 0.0, t3: 0.0, t4: 0.0 });
        let a = density_averaged(100.0, &z, true, &table).unwrap();
        assert_eq!(a.prime_side, 0.0);
    }

    #[test]
    fn total_is_sum_of_terms() {
        let table = PrimeTable::new(100_000).unwrap();
        let f = TestFunction::polynomial_bump(1.3, 3).unwrap();
        let r = density_prime_side(60, 60.0, &f, &table).unwrap();
        let t = r.terms;
        assert!((r.prime_side - (t.t1 + t.t2 + t.t3 + t.t4)).abs() < 1e-15);
    }

    #[test]
    fn averaged_t1_matches_closed_form() {
        let table = PrimeTable::new(2000).unwrap();
        let f = default_test_function();
        let r = density_averaged(1000.0, &f, true, &table).unwrap();
        let res = r.residual("t1_average", "t1_closed_form").unwrap();
        assert_eq!(res.within_envelope, Some(true), "{res:?}");
    }

    #[test]
    fn totient_normalization() {
        let q = 10_000u64;
        let phis = totient_table(q as usize);
        let s: f64 = (q / 2 + 1..=q).map(|n| phis[n as usize] as f64).sum();
        let n = unweighted_normalization(q as f64);
        assert!((s / n - 1.0).abs() <= 0.01);
    }

    #[test]
    fn main_term_trends_to_f0() {
        let f = default_test_function();
        let mut prev = f64::NEG_INFINITY;
        for q in [1_009u64, 100_003, 10_000_019] {
            let t1 = term_t1(q, q as f64, &f).unwrap();
            let t3 = term_t3(q as f64, &f, 2).unwrap().quadrature;
            assert!(t1 > prev && t1 < 1.0);
            prev = t1;
            assert!(t3 > 0.0 && t3 < 0.2);
        }
    }

    #[test]
    fn prime_side_is_linear() {
        let table = PrimeTable::new(20_000).unwrap();
        let f = default_test_function();
        let g = TestFunction::polynomial_bump(1.2, 5).unwrap();
        let fg = TestFunction::linear_combination(vec![(1.0, f.clone()), (1.0, g.clone())]);
        let v = |t: &TestFunction<f64>| density_prime_side(77, 77.0, t, &table).unwrap().terms;
        let (a, b, c) = (v(&f), v(&g), v(&fg));
        for (x, y, z) in [(a.t1, b.t1, c.t1), (a.t2, b.t2, c.t2), (a.t3, b.t3, c.t3), (a.t4, b.t4, c.t4)] {
            assert!((x + y - z).abs() < 1e-9, "{x} {y} {z}");
        }
    }
}
