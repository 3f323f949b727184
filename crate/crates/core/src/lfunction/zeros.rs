use super::LSeries;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use num_complex::Complex64;
use roots::{find_root_brent, Convergency};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

/// Bumped whenever a change could alter located ordinates; part of cache keys.
pub const ENGINE_VERSION: &str = "1";
/// Largest supported height.
pub const MAX_HEIGHT: f64 = 200.0;
/// Constants of the explicit zero-counting bound
/// |N(T, χ) − (T/π) log(qT/2πe)| ≤ C1 log(qT) + C2 (zeros with |γ| ≤ T, T ≥ 1).
pub const COUNT_C1: f64 = 0.9185;
pub const COUNT_C2: f64 = 5.512;

/// Parameters of the zero search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSearch {
    /// Initial scan step; `None` picks min(0.05, π/(2 log(qT/2π))).
    pub step: Option<f64>,
    /// Bracket width at which refinement stops.
    pub tolerance: f64,
    /// Abscissa of the right edge of the counting contour.
    pub sigma0: f64,
    /// Times the scan step is quartered before giving up.
    pub max_refinements: u32,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        Self {
            step: None,
            tolerance: 1e-11,
            sigma0: 2.5,
            max_refinements: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    /// Zeros with 0 < γ ≤ `counting_height` by the argument principle.
    pub counted: i64,
    /// Ordinates located in the same range.
    pub found: usize,
    pub counting_height: f64,
    /// Distance of the winding number from the nearest integer.
    pub winding_defect: f64,
    /// (T/2π) log(q*T/2πe), the one-sided main term.
    pub formula_estimate: f64,
    /// C1 log(q*T) + C2.
    pub formula_window: f64,
}

impl ZeroCertificate {
    pub fn mismatch(&self) -> i64 {
        self.counted - self.found as i64
    }

    pub fn within_formula_window(&self) -> bool {
        (self.counted as f64 - self.formula_estimate).abs() <= self.formula_window
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub modulus: u64,
    pub index: usize,
    pub conductor: u64,
    pub parity: u8,
    pub height: f64,
    /// Sorted ordinates in (0, height].
    pub ordinates: Vec<f64>,
    pub certificate: ZeroCertificate,
    pub max_fe_residual: f64,
    /// L(1/2, χ) = 0 was detected; such a zero is counted once by the family sum.
    pub central_zero: bool,
}

struct Tolerance(f64);

impl Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() < self.0
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter > 200
    }
}

pub fn find_zeros(chi: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
    find_zeros_with(chi, height, &ZeroSearch::default())
}

/// Ordinates of L(s, χ*) in (0, height], χ* the character inducing χ,
/// certified by the argument principle.
pub fn find_zeros_with(chi: &DirichletCharacter, height: f64, search: &ZeroSearch) -> Result<ZeroSet> {
    if !(height > 0.0) || height > MAX_HEIGHT {
        return Err(Error::InvalidArgument(format!(
            "zero search height must lie in (0, {MAX_HEIGHT}], got {height}"
        )));
    }
    let l = LSeries::new(chi, height + 1.0)?;
    let qs = l.conductor() as f64;

    let (central, _) = l.primitive_value(Complex64::new(0.5, 0.0))?;
    let central_zero = central.norm() < 1e-10;
    let start = if central_zero { 1e-3 } else { 0.0 };

    // move the counting height off any zero sitting on it
    let mut counting_height = height;
    while l.z(counting_height)?.abs() < 1e-6 {
        counting_height += 1e-4;
    }

    let base_step = search.step.unwrap_or_else(|| {
        let dens = (qs * height / (2.0 * PI)).ln().max(1.0);
        0.05f64.min(PI / (2.0 * dens))
    });
    let counted = argument_count(&l, counting_height, search.sigma0, central_zero)?;

    let mut step = base_step;
    let mut ordinates = scan(&l, start, counting_height, step, search.tolerance)?;
    let mut attempt = 0;
    while ordinates.len() as i64 != counted.0 && attempt < search.max_refinements {
        step /= 4.0;
        attempt += 1;
        ordinates = scan(&l, start, counting_height, step, search.tolerance)?;
    }
    let found = ordinates.len();
    if found as i64 != counted.0 {
        let gaps = locate_gaps(&l, &ordinates, counting_height, search.sigma0, central_zero)?;
        return Err(Error::IncompleteZeroSet {
            q: chi.modulus(),
            index: chi.index(),
            expected: counted.0,
            found,
            gaps,
        });
    }

    let mut max_fe_residual: f64 = 0.0;
    for &g in &ordinates {
        max_fe_residual = max_fe_residual.max(l.functional_equation_residual(Complex64::new(0.5, g))?);
    }
    let formula_estimate = counting_height / (2.0 * PI) * (qs * counting_height / (2.0 * PI * std::f64::consts::E)).ln();
    let formula_window = COUNT_C1 * (qs * counting_height.max(1.0)).ln() + COUNT_C2;
    ordinates.retain(|&g| g <= height);
    Ok(ZeroSet {
        modulus: chi.modulus(),
        index: chi.index(),
        conductor: l.conductor(),
        parity: l.parity(),
        height,
        ordinates,
        certificate: ZeroCertificate {
            counted: counted.0,
            found,
            counting_height,
            winding_defect: counted.1,
            formula_estimate,
            formula_window,
        },
        max_fe_residual,
        central_zero,
    })
}

/// Sign changes of Z on a uniform grid, each refined by Brent's method.
fn scan(l: &LSeries, start: f64, end: f64, step: f64, tol: f64) -> Result<Vec<f64>> {
    let n = ((end - start) / step).ceil() as usize;
    let h = (end - start) / n as f64;
    let mut out = Vec::new();
    let mut t0 = start;
    let mut z0 = l.z(t0)?;
    for k in 1..=n {
        let t1 = if k == n { end } else { start + h * k as f64 };
        let z1 = l.z(t1)?;
        if (z0 < 0.0) != (z1 < 0.0) {
            let failure = RefCell::new(None);
            let f = |t: f64| match l.z(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            };
            let root = find_root_brent(t0, t1, f, &mut Tolerance(tol))
                .map_err(|e| Error::AccuracyLoss(format!("zero refinement in [{t0}, {t1}]: {e:?}")))?;
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            out.push(root);
        }
        t0 = t1;
        z0 = z1;
    }
    Ok(out)
}

/// Change of arg f along [a, b], subdividing until successive increments are
/// small and consistent under bisection.
fn track_arg<F: Fn(Complex64) -> Result<Complex64>>(f: &F, a: Complex64, b: Complex64, pieces: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut u = a;
    let mut fu = f(u)?;
    for k in 1..=pieces {
        let v = a + (b - a) * (k as f64 / pieces as f64);
        let fv = f(v)?;
        total += refine_arg(f, u, v, fu, fv, 0)?;
        u = v;
        fu = fv;
    }
    Ok(total)
}

fn refine_arg<F: Fn(Complex64) -> Result<Complex64>>(
    f: &F,
    u: Complex64,
    v: Complex64,
    fu: Complex64,
    fv: Complex64,
    depth: u32,
) -> Result<f64> {
    let m = (u + v) / 2.0;
    let fm = f(m)?;
    let d = (fv / fu).arg();
    let d1 = (fm / fu).arg();
    let d2 = (fv / fm).arg();
    if d.abs() < 0.5 && (d1 + d2 - d).abs() < 1e-9 {
        return Ok(d);
    }
    if depth > 45 {
        return Err(Error::AccuracyLoss(format!(
            "argument tracking stalled near s = {m} (value {fm})"
        )));
    }
    Ok(refine_arg(f, u, m, fu, fm, depth + 1)? + refine_arg(f, m, v, fm, fv, depth + 1)?)
}

/// Winding count of the completed function over the right half of the
/// rectangle [1 − σ0, σ0] × [0, T]; the functional equation makes the left
/// half contribute the same. Returns (count, distance to nearest integer).
fn argument_count(l: &LSeries, height: f64, sigma0: f64, central_zero: bool) -> Result<(i64, f64)> {
    let f = |s: Complex64| l.primitive_value(s).map(|v| v.0);
    let top_right = Complex64::new(sigma0, height);
    let top_left = Complex64::new(0.5, height);
    let right = Complex64::new(sigma0, 0.0);
    let top_pieces = 32 + (height / 4.0) as usize;

    let mut total;
    if l.conductor() == 1 {
        // ξ(s) = ½ s(s − 1) π^{−s/2} Γ(s/2) ζ(s) is real and positive on [1/2, σ0]
        let v = f(top_right)?;
        total = v.arg() + track_arg(&f, top_right, top_left, top_pieces)?;
        total += top_left.arg() + (top_left - 1.0).arg();
        total += l.log_gamma_factor(top_left).im - l.log_gamma_factor(right).im;
    } else {
        let start = if central_zero {
            Complex64::new(0.5, 1e-3)
        } else {
            Complex64::new(0.5, 0.0)
        };
        total = 0.0;
        if central_zero {
            total += track_arg(&f, start, Complex64::new(0.5 + 1e-3, 0.0), 4)?;
            total += track_arg(&f, Complex64::new(0.5 + 1e-3, 0.0), right, 16)?;
        } else {
            total += track_arg(&f, start, right, 16)?;
        }
        // |L(σ0 + it) − 1| ≤ ζ(σ0) − 1 < 1, so the principal branch is continuous
        total += (f(top_right)? / f(right)?).arg();
        total += track_arg(&f, top_right, top_left, top_pieces)?;
        total += l.log_gamma_factor(top_left).im - l.log_gamma_factor(start).im;
    }
    let w = total / PI;
    let n = w.round();
    Ok((n as i64, (w - n).abs()))
}

/// Binary search over the midpoints between located ordinates for the first
/// interval whose certified count exceeds what the scan found.
fn locate_gaps(
    l: &LSeries,
    ordinates: &[f64],
    height: f64,
    sigma0: f64,
    central_zero: bool,
) -> Result<Vec<(f64, f64)>> {
    let mut bounds = vec![0.0];
    bounds.extend_from_slice(ordinates);
    bounds.push(height);
    // cut i lies between bounds[i] and bounds[i + 1]; found below it = i
    let cut = |i: usize| (bounds[i] + bounds[i + 1]) / 2.0;
    let deficit = |i: usize| -> Result<bool> {
        let h = cut(i);
        if h <= 0.0 {
            return Ok(false);
        }
        Ok(argument_count(l, h, sigma0, central_zero)?.0 > i as i64)
    };
    let (mut lo, mut hi) = (0usize, ordinates.len());
    if !deficit(hi)? {
        return Ok(vec![(0.0, height)]);
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if deficit(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(vec![(bounds[lo], bounds[lo + 1])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    #[test]
    fn first_zeta_zero() {
        let zeta = enumerate_characters(1).unwrap().remove(0);
        let zs = find_zeros(&zeta, 20.0).unwrap();
        assert_eq!(zs.ordinates.len(), 1);
        assert!((zs.ordinates[0] - 14.134_725_141_734_69).abs() < 1e-8);
        assert_eq!(zs.certificate.mismatch(), 0);
        // independent coarse-grid oracle: sign change of Re(e^{iθ}ζ) bracketed at 0.01
        let l = LSeries::new(&zeta, 20.0).unwrap();
        let mut t = 14.0;
        while l.z(t).unwrap().signum() == l.z(t + 0.01).unwrap().signum() {
            t += 0.01;
        }
        assert!(zs.ordinates[0] >= t && zs.ordinates[0] <= t + 0.01);
    }

    #[test]
    fn odd_mod4_first_zero() {
        let chi = enumerate_characters(4).unwrap().into_iter().find(|c| c.parity() == 1).unwrap();
        let zs = find_zeros(&chi, 7.0).unwrap();
        assert_eq!(zs.ordinates.len(), 1);
        assert!((zs.ordinates[0] - 6.020_948_904_697_6).abs() < 1e-7, "{:?}", zs.ordinates);
    }

    #[test]
    fn zeta_zero_count_to_100() {
        let zeta = enumerate_characters(1).unwrap().remove(0);
        let zs = find_zeros(&zeta, 100.0).unwrap();
        assert_eq!(zs.ordinates.len(), 29);
        assert!((zs.ordinates[28] - 98.831_194_218_193_69).abs() < 1e-8);
        assert!(zs.certificate.within_formula_window());
        assert!(zs.max_fe_residual < 1e-8);
    }

    #[test]
    fn conjugate_and_induced_share_zeros() {
        let chars = enumerate_characters(15).unwrap();
        for chi in &chars {
            let a = find_zeros(chi, 25.0).unwrap();
            let (_, inducer) = chi.conductor_and_inducer();
            let b = find_zeros(&inducer, 25.0).unwrap();
            assert_eq!(a.ordinates, b.ordinates);
            assert_eq!(a.conductor, inducer.modulus());
        }
    }

    #[test]
    fn missing_zeros_are_reported() {
        // a scan step far too coarse and no refinement must fail loudly
        let chi = enumerate_characters(7).unwrap().into_iter().find(|c| c.is_primitive()).unwrap();
        let search = ZeroSearch {
            step: Some(5.0),
            max_refinements: 0,
            ..ZeroSearch::default()
        };
        match find_zeros_with(&chi, 40.0, &search) {
            Err(Error::IncompleteZeroSet { expected, found, gaps, .. }) => {
                assert!(expected > found as i64);
                assert_eq!(gaps.len(), 1);
                assert!(gaps[0].0 < gaps[0].1);
            }
            other => panic!("expected an incomplete set, got {other:?}"),
        }
    }

    #[test]
    fn height_validated() {
        let zeta = enumerate_characters(1).unwrap().remove(0);
        assert!(find_zeros(&zeta, 250.0).is_err());
        assert!(find_zeros(&zeta, -1.0).is_err());
    }
}
