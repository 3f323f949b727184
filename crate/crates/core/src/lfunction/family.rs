use super::zeros::{find_zeros, ZeroSet, COUNT_C1, COUNT_C2};
use crate::characters::{enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadConfig};
use crate::testfn::TestFunction;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Source of zero sets for primitive characters (a cache, or direct search).
pub trait ZeroProvider: Sync {
    fn zeros(&self, primitive: &DirichletCharacter, height: f64) -> Result<ZeroSet>;
}

impl<F> ZeroProvider for F
where
    F: Fn(&DirichletCharacter, f64) -> Result<ZeroSet> + Sync,
{
    fn zeros(&self, primitive: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
        self(primitive, height)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyZeroSum {
    pub modulus: u64,
    pub scale: f64,
    pub height: f64,
    /// (1/φ(q)) Σ_χ Σ_{|γ| ≤ T} f̂(γ log Q/2π).
    pub value: f64,
    /// Bound on the omitted zeros with |γ| > T.
    pub tail_bound: f64,
    pub characters: usize,
    /// Positive ordinates used, summed over characters.
    pub zeros_used: usize,
    pub max_fe_residual: f64,
}

/// The zero side of the family's one-level density, zeros found directly.
pub fn family_zero_sum(q: u64, tf: &TestFunction<f64>, scale: f64, height: f64) -> Result<FamilyZeroSum> {
    family_zero_sum_with(q, tf, scale, height, &|chi: &DirichletCharacter, t: f64| find_zeros(chi, t))
}

/// As [`family_zero_sum`] with zero sets from `provider`. Each character
/// contributes 2 Σ_{0<γ≤T} f̂, since χ̄ carries the conjugate ordinates and f̂
/// is even.
pub fn family_zero_sum_with(
    q: u64,
    tf: &TestFunction<f64>,
    scale: f64,
    height: f64,
    provider: &dyn ZeroProvider,
) -> Result<FamilyZeroSum> {
    if !(scale > 1.0) {
        return Err(Error::InvalidArgument(format!("scale Q must exceed 1, got {scale}")));
    }
    let chars = enumerate_characters(q)?;
    let phi = chars.len() as f64;
    if tf.is_zero() {
        return Ok(FamilyZeroSum {
            modulus: q,
            scale,
            height,
            value: 0.0,
            tail_bound: 0.0,
            characters: chars.len(),
            zeros_used: 0,
            max_fe_residual: 0.0,
        });
    }

    let mut inducers: HashMap<(u64, usize), DirichletCharacter> = HashMap::new();
    let keys: Vec<(u64, usize)> = chars
        .iter()
        .map(|chi| {
            let (qs, ind) = chi.conductor_and_inducer();
            let key = (qs, ind.index());
            inducers.entry(key).or_insert(ind);
            key
        })
        .collect();
    let sets: HashMap<(u64, usize), ZeroSet> = inducers
        .into_par_iter()
        .map(|(k, ind)| provider.zeros(&ind, height).map(|z| (k, z)))
        .collect::<Result<_>>()?;

    let log_q = scale.ln();
    let c_f = tf.decay_constant()?;
    let g_t = c_f / (1.0 + (height * log_q / (2.0 * PI)).powi(2));
    let mut tails: HashMap<u64, f64> = HashMap::new();

    let mut value = 0.0;
    let mut tail = 0.0;
    let mut zeros_used = 0;
    let mut max_fe: f64 = 0.0;
    for key in &keys {
        let zs = &sets[key];
        let mut s = 0.0;
        for &g in &zs.ordinates {
            s += 2.0 * tf.fourier_cached(g * log_q / (2.0 * PI))?;
        }
        let central = if zs.central_zero { 1.0 } else { 0.0 };
        s += central * tf.fourier(0.0)?;
        value += s;
        zeros_used += zs.ordinates.len();
        max_fe = max_fe.max(zs.max_fe_residual);
        let upper = match tails.get(&key.0) {
            Some(v) => *v,
            None => {
                let v = upper_tail_integral(key.0 as f64, c_f, log_q, height)?;
                tails.insert(key.0, v);
                v
            }
        };
        let counted = 2.0 * zs.ordinates.len() as f64 + central;
        tail += (upper - g_t * counted).max(0.0);
    }
    Ok(FamilyZeroSum {
        modulus: q,
        scale,
        height,
        value: value / phi,
        tail_bound: tail / phi,
        characters: chars.len(),
        zeros_used,
        max_fe_residual: max_fe,
    })
}

/// ∫_T^∞ N⁺(t)(−g′(t)) dt with g(t) = C_f/(1 + (t log Q/2π)²) and
/// N⁺(t) = (t/π) log(q*t/2πe) + C1 log(q*t) + C2 bounding the zero count.
fn upper_tail_integral(qs: f64, c_f: f64, log_q: f64, height: f64) -> Result<f64> {
    let c = log_q / (2.0 * PI);
    let t_min = height.max(1.0);
    let n_up = |t: f64| {
        ((t / PI) * (qs * t / (2.0 * PI * std::f64::consts::E)).ln() + COUNT_C1 * (qs * t).ln() + COUNT_C2).max(0.0)
    };
    let dg = |t: f64| c_f * 2.0 * t * c * c / (1.0 + (c * t).powi(2)).powi(2);
    // t = T/u maps [T, ∞) onto (0, 1]
    let cfg = QuadConfig::with_abs_tol(1e-12);
    let r = integrate(
        |u: f64| {
            let t = t_min / u;
            n_up(t) * dg(t) * t_min / (u * u)
        },
        0.0,
        1.0,
        &cfg,
    )?;
    // below T = 1 the counting bound is not available; use N⁺(1) on [T, 1)
    let low = if height < 1.0 {
        n_up(1.0) * (c_f / (1.0 + (c * height).powi(2)) - c_f / (1.0 + c * c))
    } else {
        0.0
    };
    Ok(r.value + low)
}
