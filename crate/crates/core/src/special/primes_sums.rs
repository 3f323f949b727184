//! Prime sums Σ_p g(p) over all primes, split as an explicit sum over
//! p ≤ P0 plus a tail expanded in prime zeta values P_{>P0}(s) = Σ_{p>P0} p^{−s}
//! and their log-weighted versions, obtained by Möbius inversion of log ζ
//! and ζ′/ζ with the small primes removed.

use super::zeta::{zeta_with, EmConfig};
use crate::arith::mobius;
use crate::error::Result;
use crate::numeric::CompensatedSum;

/// Upper bound on θ(x)/x (Rosser–Schoenfeld).
pub const THETA_RATIO_BOUND: f64 = 1.01624;

/// Tail prime-zeta values for a fixed list of small primes.
#[derive(Clone, Debug)]
pub struct PrimeZetaTail {
    primes: Vec<u64>,
    p0: u64,
    cfg: EmConfig,
}

/// A value with an absolute error radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
}

impl PrimeZetaTail {
    /// Uses the primes ≤ `p0`.
    pub fn new(p0: u64) -> Self {
        let primes = crate::primes::simple_sieve(p0)
            .into_iter()
            .map(u64::from)
            .collect();
        Self {
            primes,
            p0,
            cfg: EmConfig::new(60, 14),
        }
    }

    pub fn p0(&self) -> u64 {
        self.p0
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// log ζ_{>P0}(u) = log ζ(u) + Σ_{p≤P0} log(1 − p^{−u}).
    fn log_zeta_tail(&self, u: f64) -> Result<Bounded> {
        let z = zeta_with(u, self.cfg)?;
        let mut acc = CompensatedSum::new();
        let lz = z.value.re.ln();
        acc.add(lz);
        let mut mass = lz.abs();
        for &p in &self.primes {
            let t = (-(p as f64).powf(-u)).ln_1p();
            acc.add(t);
            mass += t.abs();
        }
        let err = z.error / z.value.re + rounding(mass, self.primes.len());
        Ok(Bounded {
            value: acc.value(),
            error: err,
        })
    }

    /// (−ζ′/ζ)_{>P0}(u) = −ζ′/ζ(u) − Σ_{p≤P0} log p · p^{−u}/(1 − p^{−u}).
    fn neg_log_deriv_tail(&self, u: f64) -> Result<Bounded> {
        let z = zeta_with(u, self.cfg)?;
        let r = z.derivative.re / z.value.re;
        let mut acc = CompensatedSum::new();
        acc.add(-r);
        let mut mass = r.abs();
        for &p in &self.primes {
            let pu = (p as f64).powf(-u);
            let t = -(p as f64).ln() * pu / (1.0 - pu);
            acc.add(t);
            mass += t.abs();
        }
        // derivative error is of the same order as the value error times log N
        let err = z.error * (1.0 + r.abs()) * 10.0 / z.value.re + rounding(mass, self.primes.len());
        Ok(Bounded {
            value: acc.value(),
            error: err,
        })
    }

    /// Number of Möbius terms after which P0^{−ms} is negligible.
    fn mobius_terms(&self, s: f64) -> usize {
        let lp = (self.p0.max(2) as f64).ln();
        ((40.0 * std::f64::consts::LN_10 / (s * lp)).ceil() as usize).max(2) + 1
    }

    /// Σ_{p>P0} p^{−s}, s > 1.
    pub fn prime_zeta(&self, s: f64) -> Result<Bounded> {
        assert!(s > 1.0);
        let mut acc = CompensatedSum::new();
        let mut err = 0.0;
        for m in 1..=self.mobius_terms(s) {
            let mu = mobius(m as u64);
            if mu == 0 {
                continue;
            }
            let t = self.log_zeta_tail(m as f64 * s)?;
            acc.add(mu as f64 / m as f64 * t.value);
            err += t.error / m as f64;
        }
        Ok(Bounded {
            value: acc.value(),
            error: err + self.truncation_bound(s, false),
        })
    }

    /// Σ_{p>P0} log p · p^{−s}, s > 1.
    pub fn prime_zeta_log(&self, s: f64) -> Result<Bounded> {
        assert!(s > 1.0);
        let mut acc = CompensatedSum::new();
        let mut err = 0.0;
        for m in 1..=self.mobius_terms(s) {
            let mu = mobius(m as u64);
            if mu == 0 {
                continue;
            }
            let t = self.neg_log_deriv_tail(m as f64 * s)?;
            acc.add(mu as f64 * t.value);
            err += t.error;
        }
        Ok(Bounded {
            value: acc.value(),
            error: err + self.truncation_bound(s, true),
        })
    }

    /// Bound on the omitted Möbius terms: Σ_{m>M} Σ_{n>P0} log n · n^{−ms}.
    fn truncation_bound(&self, s: f64, weighted: bool) -> f64 {
        let m = self.mobius_terms(s) as f64 + 1.0;
        let p0 = self.p0.max(2) as f64;
        let e = m * s;
        let lp = if weighted { p0.ln() + 1.0 } else { 1.0 };
        2.0 * lp * p0.powf(1.0 - e) / (e - 1.0)
    }

    /// Explicit envelope Σ_{p>P0} log p · p^{−s} ≤ 1.01624 · s/(s − 1) · P0^{1−s}.
    pub fn log_envelope(&self, s: f64) -> f64 {
        let p0 = self.p0.max(2) as f64;
        THETA_RATIO_BOUND * s / (s - 1.0) * p0.powf(1.0 - s)
    }

    /// Σ_p log p · g(p) where g(p) = Σ_k c_k p^{−k·step} for p > P0.
    /// `head` evaluates the exact summand at the explicit primes.
    pub fn log_weighted_sum(
        &self,
        head: impl Fn(f64) -> f64,
        coeffs: &[f64],
        step: f64,
    ) -> Result<Bounded> {
        let mut acc = CompensatedSum::new();
        let mut mass = 0.0;
        for &p in &self.primes {
            let t = (p as f64).ln() * head(p as f64);
            acc.add(t);
            mass += t.abs();
        }
        let mut err = rounding(mass, self.primes.len());
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let s = k as f64 * step;
            let t = self.prime_zeta_log(s)?;
            acc.add(c * t.value);
            err += c.abs() * t.error;
        }
        err += self.series_remainder(coeffs, step, true);
        Ok(Bounded {
            value: acc.value(),
            error: err,
        })
    }

    /// Σ_p g(p) with the same conventions as [`Self::log_weighted_sum`].
    pub fn plain_sum(&self, head: impl Fn(f64) -> f64, coeffs: &[f64], step: f64) -> Result<Bounded> {
        let mut acc = CompensatedSum::new();
        let mut mass = 0.0;
        for &p in &self.primes {
            let t = head(p as f64);
            acc.add(t);
            mass += t.abs();
        }
        let mut err = rounding(mass, self.primes.len());
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let t = self.prime_zeta(k as f64 * step)?;
            acc.add(c * t.value);
            err += c.abs() * t.error;
        }
        err += self.series_remainder(coeffs, step, false);
        Ok(Bounded {
            value: acc.value(),
            error: err,
        })
    }

    /// Bound for dropping the series beyond `coeffs.len()` terms, assuming
    /// coefficients bounded by the largest one seen.
    fn series_remainder(&self, coeffs: &[f64], step: f64, weighted: bool) -> f64 {
        let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        let k = coeffs.len() as f64;
        let p0 = self.p0.max(2) as f64;
        let x = p0.powf(-step);
        // Σ_{j≥K} x_p^j ≤ x_p^K/(1 − x_p), summed over p > P0 with the envelope
        let s = k * step;
        let env = if weighted {
            self.log_envelope(s)
        } else {
            self.log_envelope(s) / p0.ln()
        };
        cmax * env / (1.0 - x)
    }
}

/// Rounding radius of a compensated sum of terms with total magnitude `mass`
/// (each term carries a few ulps of its own evaluation error).
fn rounding(mass: f64, n: usize) -> f64 {
    4.0 * f64::EPSILON * mass + 2.0 * (n as f64) * f64::EPSILON * f64::EPSILON * mass
}

/// Power-series coefficients of x^3/(1 − x² + x³) up to degree `n`.
pub fn coeffs_h(n: usize) -> Vec<f64> {
    // d(x) = 1/(1 − x² + x³): d_k = d_{k−2} − d_{k−3}
    let mut d = vec![0.0; n + 1];
    for k in 0..=n {
        d[k] = match k {
            0 => 1.0,
            1 => 0.0,
            2 => 1.0,
            _ => d[k - 2] - d[k - 3],
        };
    }
    let mut c = vec![0.0; n + 1];
    for k in 3..=n {
        c[k] = d[k - 3];
    }
    c
}

/// Coefficients of x²(1 + x)/(1 + x³) = 1/(p² − p + 1) with x = 1/p.
pub fn coeffs_s2(n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    // (x² + x³)(1 − x³ + x⁶ − …)
    let mut k = 0;
    let mut sign = 1.0;
    while 2 + 3 * k <= n {
        c[2 + 3 * k] += sign;
        if 3 + 3 * k <= n {
            c[3 + 3 * k] += sign;
        }
        sign = -sign;
        k += 1;
    }
    c
}

/// Coefficients of log(1 − x² + x³) − log(1 − x²), i.e. of
/// log(1 + 1/((p − 1)√p)) with x = p^{−1/2}.
pub fn coeffs_log_prod(n: usize) -> Vec<f64> {
    let a = series_log(&{
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        if n >= 2 {
            v[2] = -1.0;
        }
        if n >= 3 {
            v[3] = 1.0;
        }
        v
    });
    // log(1 − x²) = −Σ x^{2k}/k
    let mut c = a;
    let mut k = 1;
    while 2 * k <= n {
        c[2 * k] += 1.0 / k as f64;
        k += 1;
    }
    c
}

/// log of a power series with constant term 1.
fn series_log(a: &[f64]) -> Vec<f64> {
    // b′ = a′/a: k b_k = k a_k − Σ_{j=1}^{k−1} j b_j a_{k−j}
    let n = a.len();
    let mut b = vec![0.0; n];
    for k in 1..n {
        let mut s = k as f64 * a[k];
        for j in 1..k {
            s -= j as f64 * b[j] * a[k - j];
        }
        b[k] = s / k as f64;
    }
    b
}
