//! Empirical prime-distribution statistics: the variance of ψ(x; q, a) over
//! moduli and classes, the share of the class a = 1 in it, and exponent fits
//! for the size of E(x, q, 1).
//!
//! All sums of squares are accumulated in plain floating point in a fixed
//! order. Adding nonnegative terms is monotone under rounding, so the
//! relation V₁ ≤ V_range holds exactly as computed.

use crate::arith::{factorize, totient};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::special::constant;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceSample {
    pub x: f64,
    pub q_max: u64,
    /// V(x, Q) = Σ_{q≤Q} Σ_{(a,q)=1} E(x,q,a)².
    pub variance: f64,
    /// V₁ = Σ_{Q/2<q≤Q} E(x,q,1)².
    pub class_one: f64,
    /// Σ_{Q/2<q≤Q} Σ_{(a,q)=1} E(x,q,a)².
    pub range_variance: f64,
    /// Qx log Q − cxQ.
    pub main_term: f64,
    pub c: f64,
    /// V / main term.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeaveragingSample {
    pub x: f64,
    pub q_max: u64,
    pub class_one: f64,
    pub range_variance: f64,
    /// V₁ / Σ_{Q/2<q≤Q} Σ_a E².
    pub ratio: f64,
    /// 1 + log(ratio)/log Q.
    pub eta_hat: f64,
}

/// Σ_{(a,q)=1} E(x,q,a)² and E(x,q,1)² for one modulus.
fn modulus_variance(table: &PrimeTable, x: f64, q: u64, psi_x: f64) -> Result<(f64, f64)> {
    if q == 1 {
        return Ok((0.0, 0.0));
    }
    let buckets = table.residue_buckets(x, q)?;
    let mean = psi_x / totient(q) as f64;
    let mut coprime = vec![true; q as usize];
    for (p, _) in factorize(q) {
        for m in (0..q).step_by(p as usize) {
            coprime[m as usize] = false;
        }
    }
    let mut s = 0.0;
    for (a, &b) in buckets.iter().enumerate() {
        if coprime[a] {
            let e = b - mean;
            s += e * e;
        }
    }
    let e1 = buckets[1] - mean;
    Ok((s, e1 * e1))
}

fn check_inputs(table: &PrimeTable, x: f64, q_max: u64) -> Result<()> {
    if !(x >= 1.0) || x > table.limit() as f64 {
        return Err(Error::OutOfRange {
            arg: x,
            limit: table.limit(),
        });
    }
    if q_max < 1 || q_max as f64 > x {
        return Err(Error::InvalidArgument(format!("need 1 ≤ Q ≤ x, got Q = {q_max}, x = {x}")));
    }
    Ok(())
}

/// Per-modulus (Σ_a E², E(x,q,1)²) for q in `lo..=hi`, in increasing q.
fn per_modulus(table: &PrimeTable, x: f64, lo: u64, hi: u64) -> Result<Vec<(f64, f64)>> {
    let psi_x = table.psi(x, None)?.value;
    (lo..=hi)
        .into_par_iter()
        .map(|q| modulus_variance(table, x, q, psi_x))
        .collect()
}

/// The variance V(x, Q) with its class-1 and range restrictions.
pub fn gv_variance(table: &PrimeTable, x: f64, q_max: u64) -> Result<VarianceSample> {
    check_inputs(table, x, q_max)?;
    let rows = per_modulus(table, x, 1, q_max)?;
    let half = q_max / 2;
    let mut v = 0.0;
    let mut v1 = 0.0;
    let mut vr = 0.0;
    for (i, &(s, e1)) in rows.iter().enumerate() {
        let q = i as u64 + 1;
        v += s;
        if q > half {
            vr += s;
            v1 += e1;
        }
    }
    let c = constant("c_gv")?.value;
    let qf = q_max as f64;
    let main = qf * x * qf.ln() - c * x * qf;
    Ok(VarianceSample {
        x,
        q_max,
        variance: v,
        class_one: v1,
        range_variance: vr,
        main_term: main,
        c,
        ratio: v / main,
    })
}

/// V₁(x, Q) over Σ_{Q/2<q≤Q} Σ_a E(x,q,a)², and the implied η̂.
pub fn deaveraging_ratio(table: &PrimeTable, x: f64, q_max: u64) -> Result<DeaveragingSample> {
    check_inputs(table, x, q_max)?;
    if q_max < 2 {
        return Err(Error::InvalidArgument("de-averaging needs Q ≥ 2".into()));
    }
    let rows = per_modulus(table, x, q_max / 2 + 1, q_max)?;
    let mut v1 = 0.0;
    let mut vr = 0.0;
    for &(s, e1) in &rows {
        vr += s;
        v1 += e1;
    }
    if vr == 0.0 {
        return Err(Error::ZeroDenominator(format!("all E(x, q, a) vanish for x = {x}, Q = {q_max}")));
    }
    let ratio = v1 / vr;
    Ok(DeaveragingSample {
        x,
        q_max,
        class_one: v1,
        range_variance: vr,
        ratio,
        eta_hat: 1.0 + ratio.ln() / (q_max as f64).ln(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Eta,
    Theta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitPoint {
    pub x: f64,
    /// q for θ scans, Q for η scans.
    pub q: u64,
    pub statistic: f64,
    /// |E|·q^{1/2}/x^{1/2} for θ scans, η̂ for η scans.
    pub normalized: f64,
    pub used: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub hypothesis: Hypothesis,
    pub smoothed: bool,
    pub points: Vec<FitPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub exponent: f64,
    /// Euclidean norm of the least-squares residuals.
    pub residual_norm: f64,
    /// Points dropped because the statistic was zero.
    pub dropped_zero: usize,
}

/// Ordinary least squares y = a + b t; returns (b, a, residual norm).
fn ols(t: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = t.len();
    if n < 3 {
        return Err(Error::DegenerateFit(format!("{n} usable points, need at least 3")));
    }
    let nf = n as f64;
    let mt = t.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let stt: f64 = t.iter().map(|v| (v - mt).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let b = sty / stt;
    let a = my - b * mt;
    let r = t.iter().zip(y).map(|(ti, yi)| (yi - a - b * ti).powi(2)).sum::<f64>().sqrt();
    Ok((b, a, r))
}

/// Fits log(|E(x,q,1)|/√x) = c − θ log q over the grid; with `smoothed`,
/// E is replaced by ψ2(x;q,1) − ψ2(x)/φ(q) and only q ≤ √x is used.
pub fn montgomery_scan(table: &PrimeTable, xs: &[f64], qs: &[u64], smoothed: bool) -> Result<ExponentFit> {
    let mut points = Vec::new();
    for &x in xs {
        if x > table.limit() as f64 {
            return Err(Error::OutOfRange {
                arg: x,
                limit: table.limit(),
            });
        }
        for &q in qs {
            if q == 0 || q as f64 > x || (smoothed && (q as f64) > x.sqrt()) {
                continue;
            }
            let stat = if q == 1 {
                0.0
            } else if smoothed {
                let c = table.psi2(x, Some((q, 1)))?.value;
                let t = table.psi2(x, None)?.value;
                (c - t / totient(q) as f64).abs()
            } else {
                table.progression_error(x, q, 1)?.abs()
            };
            points.push(FitPoint {
                x,
                q,
                statistic: stat,
                normalized: stat * (q as f64).sqrt() / x.sqrt(),
                used: stat > 0.0,
            });
        }
    }
    let (t, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.used)
        .map(|p| ((p.q as f64).ln(), (p.statistic / p.x.sqrt()).ln()))
        .unzip();
    let dropped = points.iter().filter(|p| !p.used).count();
    let (slope, intercept, r) = ols(&t, &y)?;
    Ok(ExponentFit {
        hypothesis: Hypothesis::Theta,
        smoothed,
        points,
        slope,
        intercept,
        exponent: -slope,
        residual_norm: r,
        dropped_zero: dropped,
    })
}

/// Fits log(ratio) = c + (η − 1) log Q over de-averaging samples.
pub fn deaveraging_scan(table: &PrimeTable, pairs: &[(f64, u64)]) -> Result<ExponentFit> {
    let mut points = Vec::new();
    for &(x, q) in pairs {
        let s = deaveraging_ratio(table, x, q)?;
        points.push(FitPoint {
            x,
            q,
            statistic: s.ratio,
            normalized: s.eta_hat,
            used: s.ratio > 0.0,
        });
    }
    let (t, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.used)
        .map(|p| ((p.q as f64).ln(), p.statistic.ln()))
        .unzip();
    let dropped = points.iter().filter(|p| !p.used).count();
    let (slope, intercept, r) = ols(&t, &y)?;
    Ok(ExponentFit {
        hypothesis: Hypothesis::Eta,
        smoothed: false,
        points,
        slope,
        intercept,
        exponent: 1.0 + slope,
        residual_norm: r,
        dropped_zero: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use crate::numeric::CompensatedSum;

    fn lambda(n: u64) -> f64 {
        let f = factorize(n);
        if f.len() == 1 {
            (f[0].0 as f64).ln()
        } else {
            0.0
        }
    }

    /// Direct double loop: ψ(x;q,a) by walking each progression.
    fn naive(x: u64, q_lo: u64, q_hi: u64, psi_x: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut v1 = 0.0;
        for q in q_lo..=q_hi {
            if q == 1 {
                continue;
            }
            let mean = psi_x / totient(q) as f64;
            let mut s = 0.0;
            for a in 0..q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let mut acc = CompensatedSum::new();
                let mut n = a;
                while n <= x {
                    if n >= 2 {
                        let l = lambda(n);
                        if l > 0.0 {
                            acc += l;
                        }
                    }
                    n += q;
                }
                let e = acc.value() - mean;
                s += e * e;
                if a == 1 {
                    v1 += e * e;
                }
            }
            v += s;
        }
        (v, v1)
    }

    #[test]
    fn matches_naive_double_loop_exactly() {
        let table = PrimeTable::new(10_000).unwrap();
        for (x, q) in [(10_000u64, 100u64), (5_000, 37), (777, 50)] {
            let psi_x = table.psi(x as f64, None).unwrap().value;
            let s = gv_variance(&table, x as f64, q).unwrap();
            let (v, _) = naive(x, 1, q, psi_x);
            let (vr, v1) = naive(x, q / 2 + 1, q, psi_x);
            assert_eq!(s.variance, v);
            assert_eq!(s.range_variance, vr);
            assert_eq!(s.class_one, v1);
        }
    }

    #[test]
    fn trivial_modulus() {
        let table = PrimeTable::new(1000).unwrap();
        assert_eq!(gv_variance(&table, 1000.0, 1).unwrap().variance, 0.0);
    }

    #[test]
    fn variance_monotone_in_q() {
        let table = PrimeTable::new(5000).unwrap();
        let mut prev = 0.0;
        for q in [1u64, 2, 5, 10, 40, 100, 300] {
            let v = gv_variance(&table, 5000.0, q).unwrap().variance;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn deaveraging_bounded_by_one() {
        let table = PrimeTable::new(20_000).unwrap();
        for q in [4u64, 10, 57, 200] {
            let s = deaveraging_ratio(&table, 20_000.0, q).unwrap();
            assert!(s.class_one <= s.range_variance);
            assert!(s.eta_hat <= 1.0);
        }
        assert!(matches!(deaveraging_ratio(&table, 1.0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn table_limit_is_enforced() {
        let table = PrimeTable::new(1000).unwrap();
        assert!(matches!(gv_variance(&table, 2000.0, 10), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn smoothed_statistic_by_enumeration() {
        let table = PrimeTable::new(10_000).unwrap();
        let fit = montgomery_scan(&table, &[10_000.0], &[3, 5, 11, 17, 29], true).unwrap();
        let p = fit.points.iter().find(|p| p.q == 11).unwrap();
        let x = 10_000.0f64;
        let mut c = 0.0;
        let mut t = 0.0;
        for n in 2..=10_000u64 {
            let w = lambda(n) * (1.0 - n as f64 / x);
            t += w;
            if n % 11 == 1 {
                c += w;
            }
        }
        let want = (c - t / 10.0).abs();
        assert!((p.statistic - want).abs() < 1e-8 * t, "{} {want}", p.statistic);
        assert!(fit.points.iter().all(|p| p.normalized.is_finite()));
    }

    #[test]
    fn modulus_one_is_excluded() {
        let table = PrimeTable::new(10_000).unwrap();
        let fit = montgomery_scan(&table, &[10_000.0, 5_000.0], &[1, 3, 7, 13], false).unwrap();
        let ones: Vec<_> = fit.points.iter().filter(|p| p.q == 1).collect();
        assert_eq!(ones.len(), 2);
        assert!(ones.iter().all(|p| !p.used && p.statistic == 0.0));
        assert_eq!(fit.dropped_zero, 2);
        assert!(fit.exponent.is_finite());
    }

    #[test]
    fn too_few_points() {
        let table = PrimeTable::new(1_000).unwrap();
        assert!(matches!(
            montgomery_scan(&table, &[1000.0], &[1, 3, 5], false),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn ols_recovers_a_line() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = t.iter().map(|v| 2.0 - 0.25 * v).collect();
        let (b, a, r) = ols(&t, &y).unwrap();
        assert!((b + 0.25).abs() < 1e-15 && (a - 2.0).abs() < 1e-15 && r < 1e-15);
    }
}
