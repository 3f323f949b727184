//! Weighted sums of 1/φ(r) and their asymptotic expansions.

use super::constants::value;
use crate::error::{Error, Result};
use crate::numeric::{integrate, CompensatedSum, QuadConfig, Scalar};

/// Largest polynomial degree for which every correction term is known.
pub const MAX_DEGREE: usize = 1;
/// Largest R accepted by the direct sums.
pub const MAX_DIRECT_R: f64 = 1e7;

/// Which of the three sums.
#[derive(Clone, Debug, PartialEq)]
pub enum TotientVariant<T> {
    /// Σ_{r≤R} (1/φ(r)) (√R + r/√R − 2√r).
    Plain,
    /// Σ_{r≤R} (1/φ(r)) ∫_{log r/log R}^1 P(u)(R^{u/2} − r R^{−u/2}) du.
    Polynomial(Vec<T>),
    /// The same with R replaced by R/2 and r by r/2 inside the integral.
    Halved(Vec<T>),
}

fn poly_eval<T: Scalar>(p: &[T], u: T) -> T {
    p.iter().rev().fold(T::zero(), |acc, &c| acc * u + c)
}

/// Σ_{i≥k} (−1)^i P^{(i)}(1).
fn alternating_derivatives<T: Scalar>(p: &[T], from: usize) -> T {
    let d = p.len();
    let mut total = T::zero();
    // P^{(i)}(1) = Σ_{j≥i} a_j j!/(j−i)!
    for i in from..d {
        let mut deriv = T::zero();
        for j in i..d {
            let mut falling = T::one();
            for k in 0..i {
                falling = falling * T::from_usize_lossy(j - k);
            }
            deriv = deriv + p[j] * falling;
        }
        total = if i % 2 == 0 { total + deriv } else { total - deriv };
    }
    total
}

/// φ(r) for r ≤ n.
fn totients(n: usize) -> Vec<u32> {
    crate::arith::totient_table(n)
}

/// The exact left-hand side; inner integrals by adaptive quadrature.
pub fn totient_sum_direct<T: Scalar>(r_max: T, variant: &TotientVariant<T>) -> Result<T> {
    let rf = r_max.to_f64().unwrap_or(f64::NAN);
    if !(rf >= 1.0) || rf > MAX_DIRECT_R {
        return Err(Error::InvalidArgument(format!(
            "direct totient sum needs 1 ≤ R ≤ {MAX_DIRECT_R:e}, got {rf}"
        )));
    }
    let n = rf.floor() as usize;
    let phi = totients(n);
    let mut acc = CompensatedSum::new();
    let cfg = QuadConfig::with_abs_tol(T::lit(1e-13));
    match variant {
        TotientVariant::Plain => {
            let sr = r_max.sqrt();
            for r in 1..=n {
                let rt = T::from_usize_lossy(r);
                let w = sr + rt / sr - T::lit(2.0) * rt.sqrt();
                acc.add(w / T::from_usize_lossy(phi[r] as usize));
            }
        }
        TotientVariant::Polynomial(p) | TotientVariant::Halved(p) => {
            if p.iter().all(|c| *c == T::zero()) {
                return Ok(T::zero());
            }
            let halved = matches!(variant, TotientVariant::Halved(_));
            let big = if halved { r_max / T::lit(2.0) } else { r_max };
            let lb = big.ln();
            for r in 1..=n {
                let rt = T::from_usize_lossy(r);
                let small = if halved { rt / T::lit(2.0) } else { rt };
                let lower = small.ln() / lb;
                if lower >= T::one() {
                    continue;
                }
                let inner = integrate(
                    |u: T| {
                        let e = (u * lb / T::lit(2.0)).exp();
                        poly_eval(p, u) * (e - small / e)
                    },
                    lower,
                    T::one(),
                    &cfg,
                )?;
                acc.add(inner.value / T::from_usize_lossy(phi[r] as usize));
            }
        }
    }
    Ok(acc.value())
}

/// ∫_{−∞}^1 e^{λu} u^k du = e^λ Σ_{i=0}^k (−1)^i k!/(k−i)! λ^{−(i+1)}.
pub fn exp_moment<T: Scalar>(lambda: T, k: usize) -> T {
    let mut total = T::zero();
    let mut falling = T::one();
    let mut lp = lambda;
    for i in 0..=k {
        let term = falling / lp;
        total = if i % 2 == 0 { total + term } else { total - term };
        falling = falling * T::from_usize_lossy(k - i);
        lp = lp * lambda;
    }
    lambda.exp() * total
}

/// ∫_{−∞}^1 X^{u/2} u^shift P(u) du.
fn moment_integral<T: Scalar>(x: T, p: &[T], shift: usize) -> T {
    let lambda = x.ln() / T::lit(2.0);
    p.iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, &c)| acc + c * exp_moment(lambda, k + shift))
}

/// The main terms of the asymptotic expansion.
pub fn totient_sum_asymptotic<T: Scalar>(r_max: T, variant: &TotientVariant<T>) -> Result<T> {
    if !(r_max > T::one()) {
        return Err(Error::InvalidArgument("asymptotic form needs R > 1".into()));
    }
    let c = |id: &str| T::lit(value(id));
    match variant {
        TotientVariant::Plain => {
            let sr = r_max.sqrt();
            Ok(c("D1") * sr * r_max.ln() + c("D2") * sr + c("D3"))
        }
        TotientVariant::Polynomial(p) | TotientVariant::Halved(p) => {
            let degree = p.iter().rposition(|x| *x != T::zero()).unwrap_or(0);
            if degree > MAX_DEGREE {
                return Err(Error::DegreeTooLarge {
                    degree,
                    max: MAX_DEGREE,
                });
            }
            let halved = matches!(variant, TotientVariant::Halved(_));
            let x = if halved { r_max / T::lit(2.0) } else { r_max };
            let lx = x.ln();
            let e1 = c("E1");
            let e2 = if halved {
                c("E2") + e1 * T::LN_2()
            } else {
                c("E2")
            };
            let (f1, f2) = if halved {
                (c("F1_2"), c("F2_2"))
            } else {
                (c("F1"), c("F2"))
            };
            let f1p = f1 * alternating_derivatives(p, 0);
            let f2p = f2 * alternating_derivatives(p, 1);
            Ok(e1 * lx * moment_integral(x, p, 1) + e2 * moment_integral(x, p, 0) + f1p / lx + f2p / (lx * lx))
        }
    }
}
