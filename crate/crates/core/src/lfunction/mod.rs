//! Dirichlet L-functions on and near the critical line, their zeros, and the
//! family zero sum of the one-level density.

mod explicit;
mod family;
mod gamma;
mod zeros;

pub use explicit::explicit_formula_character;
pub use family::{family_zero_sum, family_zero_sum_with, FamilyZeroSum, ZeroProvider};
pub use gamma::{digamma, ln_gamma};
pub use zeros::{find_zeros, find_zeros_with, ZeroCertificate, ZeroSet, ZeroSearch, ENGINE_VERSION};

use crate::arith::factorize;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::special::{em_tail, hurwitz_zeta};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Relative accuracy demanded of every L-value.
pub const L_VALUE_TOL: f64 = 1e-10;
/// Euler–Maclaurin correction order used by [`LSeries`].
const EM_ORDER: usize = 12;

/// L(s, χ) through the primitive character χ* inducing χ:
/// L(s, χ) = L(s, χ*) Π_{p | q, p ∤ q*} (1 − χ*(p) p^{−s}), and
/// L(s, χ*) = q*^{−s} Σ_a χ*(a) ζ(s, a/q*).
#[derive(Clone, Debug)]
pub struct LSeries {
    character: DirichletCharacter,
    inducer: DirichletCharacter,
    conductor: u64,
    parity: u8,
    /// (a/q*, χ*(a)) for the units a mod q*.
    residues: Vec<(f64, Complex64)>,
    /// Euler factors removed by imprimitivity: (p, χ*(p)).
    removed: Vec<(u64, Complex64)>,
    cutoff: usize,
    /// ln(k + a/q*) for k < cutoff, one row per residue, plus the tail start.
    logs: Vec<f64>,
    max_height: f64,
    root_number: Complex64,
}

impl LSeries {
    /// Evaluator tuned for |Im s| ≤ `max_height`; taller points fall back to
    /// a slower per-call configuration.
    pub fn new(chi: &DirichletCharacter, max_height: f64) -> Result<Self> {
        let (conductor, inducer) = chi.conductor_and_inducer();
        let residues: Vec<(f64, Complex64)> = (1..=conductor)
            .filter_map(|a| {
                inducer
                    .value_exact(a as i64)
                    .map(|v| (a as f64 / conductor as f64, v.to_complex()))
            })
            .collect();
        let removed = factorize(chi.modulus())
            .into_iter()
            .filter(|&(p, _)| conductor % p != 0)
            .map(|(p, _)| (p, inducer.evaluate(p as i64)))
            .collect();
        let max_height = max_height.abs().max(1.0);
        let cutoff = 40usize.max((0.65 * (max_height + 2.0)).ceil() as usize + 8);
        let mut logs = Vec::with_capacity(residues.len() * (cutoff + 1));
        for &(a, _) in &residues {
            for k in 0..=cutoff {
                logs.push((k as f64 + a).ln());
            }
        }
        let root_number = if conductor == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            let tau = inducer.gauss_sum()?;
            let i_a = if inducer.parity() == 1 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(1.0, 0.0)
            };
            tau / (i_a * (conductor as f64).sqrt())
        };
        Ok(Self {
            character: chi.clone(),
            parity: inducer.parity(),
            inducer,
            conductor,
            residues,
            removed,
            cutoff,
            logs,
            max_height,
            root_number,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn inducer(&self) -> &DirichletCharacter {
        &self.inducer
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// ε_χ* = τ(χ*)/(i^a √q*).
    pub fn root_number(&self) -> Complex64 {
        self.root_number
    }

    /// L(s, χ*) with the accumulated Euler–Maclaurin error bound.
    fn primitive_value(&self, s: Complex64) -> Result<(Complex64, f64)> {
        if self.conductor == 1 && s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole);
        }
        if s.norm() > self.max_height + 2.0 {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, c) in &self.residues {
                acc += c * hurwitz_zeta(s, a)?;
            }
            let scale = (-s * (self.conductor as f64).ln()).exp();
            return Ok((scale * acc, 0.0));
        }
        let row = self.cutoff + 1;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (i, &(a, c)) in self.residues.iter().enumerate() {
            let logs = &self.logs[i * row..(i + 1) * row];
            let mut head = Complex64::new(0.0, 0.0);
            for &l in &logs[..self.cutoff] {
                head += (-s * l).exp();
            }
            let ln_x = logs[self.cutoff];
            let (tail, e) = em_tail(s, self.cutoff as f64 + a, ln_x, EM_ORDER);
            // x^{1−s}/(s − 1); for χ* ≠ 1 the 1/(s − 1) parts cancel over a,
            // so only (x^{1−s} − 1)/(s − 1) = −ln x · expm1(w)/w, w = (1 − s) ln x, is kept
            let w = (1.0 - s) * ln_x;
            let integral = if self.conductor == 1 {
                w.exp() / (s - 1.0)
            } else {
                -ln_x * expm1_over(w)
            };
            acc += c * (head + tail + integral);
            err += e;
        }
        let scale = (-s * (self.conductor as f64).ln()).exp();
        Ok((scale * acc, err * scale.norm()))
    }

    /// L(s, χ).
    pub fn value(&self, s: Complex64) -> Result<Complex64> {
        let (v, err) = self.primitive_value(s)?;
        if err > L_VALUE_TOL * v.norm().max(1.0) {
            return Err(Error::AccuracyLoss(format!(
                "L-value error bound {err:e} at s = {s}"
            )));
        }
        let mut out = v;
        for &(p, c) in &self.removed {
            out *= 1.0 - c * (-s * (p as f64).ln()).exp();
        }
        Ok(out)
    }

    /// G(s) = ((s + a)/2) log(q*/π) + log Γ((s + a)/2), the log of the gamma factor.
    pub fn log_gamma_factor(&self, s: Complex64) -> Complex64 {
        let z = (s + self.parity as f64) / 2.0;
        z * (self.conductor as f64 / PI).ln() + ln_gamma(z)
    }

    /// Phase θ(t) making e^{iθ} L(1/2 + it, χ*) real.
    pub fn theta(&self, t: f64) -> f64 {
        let g = self.log_gamma_factor(Complex64::new(0.5, t));
        g.im - self.root_number.arg() / 2.0
    }

    /// Rotated completed function Z(t) = Re(e^{iθ(t)} L(1/2 + it, χ*)); the
    /// sign matches ε^{−1/2} Λ(1/2 + it, χ*). Also returns the imaginary part,
    /// which vanishes up to rounding.
    pub fn rotated(&self, t: f64) -> Result<(f64, f64)> {
        let (v, _) = self.primitive_value(Complex64::new(0.5, t))?;
        let r = Complex64::from_polar(1.0, self.theta(t)) * v;
        Ok((r.re, r.im))
    }

    pub fn z(&self, t: f64) -> Result<f64> {
        self.rotated(t).map(|r| r.0)
    }

    /// |L(s) − ε e^{G(1−s) − G(s)} L(1 − s, χ̄*)| / max(1, |L(s)|) for the
    /// primitive function.
    pub fn functional_equation_residual(&self, s: Complex64) -> Result<f64> {
        let (lhs, _) = self.primitive_value(s)?;
        let r = Complex64::new(1.0, 0.0) - s;
        // L(1 − s, χ̄) = conj L(conj(1 − s), χ)
        let (dual, _) = self.primitive_value(r.conj())?;
        let rhs = self.root_number * (self.log_gamma_factor(r) - self.log_gamma_factor(s)).exp() * dual.conj();
        Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
    }
}

/// (e^w − 1)/w without cancellation near w = 0.
fn expm1_over(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0)))
    } else {
        (w.exp() - 1.0) / w
    }
}

/// L(s, χ) for primitive or principal χ.
pub fn l_value(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    if !chi.is_primitive() && !chi.is_principal() {
        return Err(Error::NotPrimitive {
            q: chi.modulus(),
            index: chi.index(),
        });
    }
    LSeries::new(chi, s.im.abs())?.value(s)
}

/// ε_χ for primitive χ.
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive {
            q: chi.modulus(),
            index: chi.index(),
        });
    }
    Ok(LSeries::new(chi, 1.0)?.root_number())
}
