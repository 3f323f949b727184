//! Even, compactly supported test functions and their Fourier transforms
//! f̂(y) = ∫ f(x) e^{−2πixy} dx.

use crate::error::{Error, Result};
use crate::numeric::{integrate_breakpoints, QuadConfig, Scalar};
use serde::Serialize;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Step of the central difference used for first derivatives of custom f.
pub const FD_STEP: f64 = 1e-6;
/// Step of the second difference (larger, since rounding grows like ε/h²).
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Absolute tolerance of the Fourier quadrature.
pub const FOURIER_TOL: f64 = 1e-12;

type Func<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Kind<T: Scalar> {
    Zero,
    Bump { power: u32 },
    Tabulated(Arc<Spline<T>>),
    Custom { f: Func<T>, label: String },
    Combination(Vec<(T, TestFunction<T>)>),
}

/// An even test function supported on [−σ, σ].
#[derive(Clone)]
pub struct TestFunction<T: Scalar> {
    sigma: T,
    kind: Kind<T>,
    cache: Arc<OnceLock<FourierGrid<T>>>,
}

/// Serializable summary of a test function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunctionSpec {
    pub family: String,
    pub sigma: f64,
    pub power: Option<u32>,
}

impl<T: Scalar> fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.describe())
    }
}

impl<T: Scalar> TestFunction<T> {
    fn with_kind(sigma: T, kind: Kind<T>) -> Self {
        Self {
            sigma,
            kind,
            cache: Arc::new(OnceLock::new()),
        }
    }

    /// f ≡ 0 (σ is kept only for bookkeeping).
    pub fn zero(sigma: T) -> Self {
        Self::with_kind(sigma, Kind::Zero)
    }

    /// (1 − (x/σ)²)^power on [−σ, σ]; power ≥ 3 keeps f in C² across ±σ.
    pub fn polynomial_bump(sigma: T, power: u32) -> Result<Self> {
        if power < 3 {
            return Err(Error::InvalidArgument(format!(
                "bump power must be at least 3, got {power}"
            )));
        }
        if !(sigma > T::zero()) {
            return Err(Error::InvalidArgument("support half-width must be positive".into()));
        }
        Ok(Self::with_kind(sigma, Kind::Bump { power }))
    }

    /// A user function on [0, σ], extended evenly; derivatives by central differences.
    pub fn custom(sigma: T, label: &str, f: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        if !(sigma > T::zero()) {
            return Err(Error::InvalidArgument("support half-width must be positive".into()));
        }
        Ok(Self::with_kind(
            sigma,
            Kind::Custom {
                f: Arc::new(f),
                label: label.to_string(),
            },
        ))
    }

    /// Cubic spline through samples (x, f(x)) with x ≥ 0; σ is the last abscissa.
    pub fn tabulated(xs: &[T], ys: &[T]) -> Result<Self> {
        let spline = Spline::fit(xs, ys)?;
        let sigma = *xs.last().expect("nonempty after fit");
        Ok(Self::with_kind(sigma, Kind::Tabulated(Arc::new(spline))))
    }

    /// Σ c_i f_i, supported on the largest of the supports.
    pub fn linear_combination(terms: Vec<(T, TestFunction<T>)>) -> Self {
        let sigma = terms
            .iter()
            .map(|(_, f)| f.sigma)
            .fold(T::zero(), |a, b| a.max(b));
        Self::with_kind(sigma, Kind::Combination(terms))
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            Kind::Zero => true,
            Kind::Combination(t) => t.iter().all(|(c, f)| *c == T::zero() || f.is_zero()),
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        let s = self.sigma.to_f64().unwrap_or(f64::NAN);
        match &self.kind {
            Kind::Zero => "zero".into(),
            Kind::Bump { power } => format!("bump(sigma={s}, power={power})"),
            Kind::Tabulated(sp) => format!("tabulated(sigma={s}, knots={})", sp.x.len()),
            Kind::Custom { label, .. } => format!("custom({label}, sigma={s})"),
            Kind::Combination(t) => {
                let parts: Vec<String> = t
                    .iter()
                    .map(|(c, f)| format!("{}*{}", c.to_f64().unwrap_or(f64::NAN), f.describe()))
                    .collect();
                parts.join(" + ")
            }
        }
    }

    pub fn spec(&self) -> TestFunctionSpec {
        let (family, power) = match &self.kind {
            Kind::Zero => ("zero".to_string(), None),
            Kind::Bump { power } => ("bump".to_string(), Some(*power)),
            Kind::Tabulated(_) => ("tabulated".to_string(), None),
            Kind::Custom { label, .. } => (format!("custom:{label}"), None),
            Kind::Combination(_) => (self.describe(), None),
        };
        TestFunctionSpec {
            family,
            sigma: self.sigma.to_f64().unwrap_or(f64::NAN),
            power,
        }
    }

    /// f(x).
    pub fn eval(&self, x: T) -> T {
        self.derivative(x, 0).expect("order 0 is always available")
    }

    /// f^{(order)}(x) for order ≤ 2.
    pub fn derivative(&self, x: T, order: u32) -> Result<T> {
        if order > 2 {
            return Err(Error::InvalidArgument(format!("derivative order {order} > 2")));
        }
        let ax = x.abs();
        if ax > self.sigma {
            return Ok(T::zero());
        }
        // odd derivatives of an even function flip sign with x
        let sign = if order % 2 == 1 && x < T::zero() { -T::one() } else { T::one() };
        let v = match &self.kind {
            Kind::Zero => T::zero(),
            Kind::Bump { power } => bump_derivative(ax, self.sigma, *power, order),
            Kind::Tabulated(sp) => sp.eval(ax, order),
            Kind::Custom { f, .. } => custom_derivative(f.as_ref(), ax, self.sigma, order),
            Kind::Combination(terms) => {
                let mut acc = T::zero();
                for (c, g) in terms {
                    acc = acc + *c * g.derivative(ax, order)?;
                }
                acc
            }
        };
        Ok(sign * v)
    }

    /// f^{(k)}(0) for any k where it is available (closed form for bumps,
    /// spline pieces for tabulated f, k ≤ 2 otherwise).
    pub fn derivative_at_zero(&self, k: u32) -> Result<T> {
        if k % 2 == 1 {
            return Ok(T::zero());
        }
        match &self.kind {
            Kind::Zero => Ok(T::zero()),
            Kind::Bump { power } => {
                let j = k / 2;
                if j > *power {
                    return Ok(T::zero());
                }
                // f = Σ_j C(n,j)(−1)^j x^{2j}/σ^{2j}
                let mut binom = T::one();
                for i in 0..j {
                    binom = binom * T::from_usize_lossy((*power - i) as usize)
                        / T::from_usize_lossy((i + 1) as usize);
                }
                let mut fact = T::one();
                for i in 2..=k {
                    fact = fact * T::from_usize_lossy(i as usize);
                }
                let sign = if j % 2 == 0 { T::one() } else { -T::one() };
                Ok(sign * binom * fact / self.sigma.powi(k as i32))
            }
            Kind::Tabulated(sp) => Ok(if k <= 3 { sp.eval(T::zero(), k) } else { T::zero() }),
            Kind::Combination(terms) => {
                let mut acc = T::zero();
                for (c, g) in terms {
                    acc = acc + *c * g.derivative_at_zero(k)?;
                }
                Ok(acc)
            }
            Kind::Custom { .. } if k <= 2 => self.derivative(T::zero(), k),
            Kind::Custom { .. } => Err(Error::InvalidArgument(format!(
                "derivative of order {k} unavailable for a custom test function"
            ))),
        }
    }

    /// Breakpoints where f may fail to be smooth: 0, σ and spline knots.
    fn breakpoints(&self, panels: usize) -> Vec<T> {
        let mut pts: Vec<T> = (0..=panels)
            .map(|i| self.sigma * T::from_usize_lossy(i) / T::from_usize_lossy(panels))
            .collect();
        self.collect_knots(&mut pts);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup();
        pts
    }

    fn collect_knots(&self, pts: &mut Vec<T>) {
        match &self.kind {
            Kind::Tabulated(sp) => pts.extend(sp.x.iter().copied()),
            Kind::Combination(terms) => {
                for (_, g) in terms {
                    pts.push(g.sigma);
                    g.collect_knots(pts);
                }
            }
            _ => {}
        }
    }

    /// f̂(y) = 2∫₀^σ f(x) cos(2πxy) dx by adaptive quadrature.
    pub fn fourier(&self, y: T) -> Result<T> {
        self.fourier_kernel(y, false)
    }

    /// f̂′(y) = −2∫₀^σ 2πx f(x) sin(2πxy) dx.
    pub fn fourier_derivative(&self, y: T) -> Result<T> {
        self.fourier_kernel(y, true)
    }

    fn fourier_kernel(&self, y: T, derivative: bool) -> Result<T> {
        if self.is_zero() {
            return Ok(T::zero());
        }
        let y = if derivative { y } else { y.abs() };
        let two_pi = T::lit(2.0) * T::PI();
        let panels = (T::lit(2.0) * self.sigma * y.abs()).ceil().to_usize().unwrap_or(1).max(1);
        let pts = self.breakpoints(panels);
        let cfg = QuadConfig::with_abs_tol(T::lit(FOURIER_TOL).max(T::epsilon() * T::lit(64.0)));
        let r = integrate_breakpoints(
            |x: T| {
                if derivative {
                    -two_pi * x * self.eval(x) * (two_pi * x * y).sin()
                } else {
                    self.eval(x) * (two_pi * x * y).cos()
                }
            },
            &pts,
            &cfg,
        )?;
        Ok(T::lit(2.0) * r.value)
    }

    /// ∫|f| and ∫|f″| over the support.
    pub fn l1_norms(&self) -> Result<(T, T)> {
        let pts = self.breakpoints(8);
        let cfg = QuadConfig::with_abs_tol(T::lit(1e-12).max(T::epsilon() * T::lit(64.0)));
        let n0 = integrate_breakpoints(|x: T| self.eval(x).abs(), &pts, &cfg)?.value;
        let n2 = integrate_breakpoints(
            |x: T| self.derivative(x, 2).map(|v| v.abs()).unwrap_or(T::zero()),
            &pts,
            &cfg,
        )?
        .value;
        Ok((T::lit(2.0) * n0, T::lit(2.0) * n2))
    }

    /// C_f with |f̂(y)| ≤ C_f/(1 + y²): C_f = ‖f‖₁ + ‖f″‖₁/(4π²).
    pub fn decay_constant(&self) -> Result<T> {
        let (n0, n2) = self.l1_norms()?;
        let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
        // small safety margin for the quadrature error of the norms
        Ok((n0 + n2 / four_pi2) * T::lit(1.0 + 1e-9))
    }

    /// Checks |f̂(y)|(1 + y²) ≤ C_f on a log grid up to y = 10³.
    pub fn validate_decay(&self) -> Result<bool> {
        let c = self.decay_constant()?;
        for i in 0..=60 {
            let y = T::lit(10f64.powf(-2.0 + 5.0 * i as f64 / 60.0));
            let v = self.fourier(y)?.abs() * (T::one() + y * y);
            if v > c * T::lit(1.0 + 1e-6) + T::lit(1e-9) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// f̂(y) from the memoized Hermite grid when y lies inside it.
    pub fn fourier_cached(&self, y: T) -> Result<T> {
        let y = y.abs();
        let grid = match self.cache.get() {
            Some(g) => g,
            None => {
                let g = FourierGrid::build(self, T::lit(DEFAULT_GRID_MAX), T::lit(FOURIER_TOL * 10.0))?;
                let _ = self.cache.set(g);
                self.cache.get().expect("just set")
            }
        };
        match grid.eval(y) {
            Some(v) => Ok(v),
            None => self.fourier(y),
        }
    }
}

/// Default extent of the memoized f̂ grid.
pub const DEFAULT_GRID_MAX: f64 = 64.0;

struct FourierGrid<T> {
    h: T,
    ymax: T,
    values: Vec<T>,
    derivs: Vec<T>,
}

impl<T: Scalar> FourierGrid<T> {
    fn build(tf: &TestFunction<T>, ymax: T, tol: T) -> Result<Self> {
        // Hermite error ≤ h⁴ M4/384 with M4 = sup|f̂⁗| ≤ ∫(2πx)⁴|f(x)| dx
        let two_pi = T::lit(2.0) * T::PI();
        let cfg = QuadConfig::with_abs_tol(T::lit(1e-10).max(T::epsilon() * T::lit(64.0)));
        let m4 = T::lit(2.0)
            * integrate_breakpoints(|x: T| (two_pi * x).powi(4) * tf.eval(x).abs(), &tf.breakpoints(8), &cfg)?
                .value;
        let m4 = m4.max(T::epsilon());
        let h = (T::lit(384.0) * tol / m4).powf(T::lit(0.25)).min(T::lit(0.05));
        let n = (ymax / h).ceil().to_usize().unwrap_or(1) + 1;
        let mut values = Vec::with_capacity(n);
        let mut derivs = Vec::with_capacity(n);
        for i in 0..n {
            let y = h * T::from_usize_lossy(i);
            values.push(tf.fourier(y)?);
            derivs.push(tf.fourier_derivative(y)?);
        }
        Ok(Self {
            h,
            ymax: h * T::from_usize_lossy(n - 1),
            values,
            derivs,
        })
    }

    fn eval(&self, y: T) -> Option<T> {
        if y >= self.ymax {
            return None;
        }
        let t = y / self.h;
        let i = t.floor().to_usize()?;
        let s = t - T::from_usize_lossy(i);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * self.h, self.derivs[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        Some(h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1)
    }
}

fn bump_derivative<T: Scalar>(ax: T, sigma: T, power: u32, order: u32) -> T {
    let u = ax / sigma;
    let w = T::one() - u * u;
    let n = T::from_usize_lossy(power as usize);
    match order {
        0 => w.powi(power as i32),
        // d/dx w^n = n w^{n−1} (−2x/σ²)
        1 => -n * w.powi(power as i32 - 1) * T::lit(2.0) * ax / (sigma * sigma),
        _ => {
            let s2 = sigma * sigma;
            let a = n * (n - T::one()) * w.powi(power as i32 - 2) * T::lit(4.0) * ax * ax / (s2 * s2);
            let b = n * w.powi(power as i32 - 1) * T::lit(2.0) / s2;
            a - b
        }
    }
}

/// Central differences; f is evaluated through its even extension so that
/// stencils crossing 0 stay exact. Truncation error h²|f‴|/6 (order 1) and
/// h²|f⁗|/12 (order 2); rounding ε|f|/h and 4ε|f|/h² respectively.
fn custom_derivative<T: Scalar>(f: &(dyn Fn(T) -> T + Send + Sync), ax: T, sigma: T, order: u32) -> T {
    let g = |x: T| {
        let a = x.abs();
        if a > sigma {
            T::zero()
        } else {
            f(a)
        }
    };
    match order {
        0 => g(ax),
        1 => {
            let h = T::lit(FD_STEP).max(T::epsilon().sqrt());
            (g(ax + h) - g(ax - h)) / (T::lit(2.0) * h)
        }
        _ => {
            let h = T::lit(FD_STEP_SECOND).max(T::epsilon().powf(T::lit(0.25)));
            (g(ax + h) - T::lit(2.0) * g(ax) + g(ax - h)) / (h * h)
        }
    }
}

/// Natural-at-σ, clamped-at-0 (f′(0) = 0) cubic spline.
struct Spline<T> {
    x: Vec<T>,
    y: Vec<T>,
    m: Vec<T>,
}

impl<T: Scalar> Spline<T> {
    fn fit(xs: &[T], ys: &[T]) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 3 {
            return Err(Error::InvalidArgument(
                "tabulated test function needs at least 3 (x, f(x)) pairs".into(),
            ));
        }
        if xs[0] != T::zero() {
            return Err(Error::InvalidArgument("tabulation must start at x = 0".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        // second-derivative unknowns m_0..m_{n−1}; tridiagonal system
        let mut a = vec![T::zero(); n];
        let mut b = vec![T::zero(); n];
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        // clamped: 2h0 m0 + h0 m1 = 6((y1 − y0)/h0 − 0)
        b[0] = two * h[0];
        c[0] = h[0];
        d[0] = six * ((ys[1] - ys[0]) / h[0]);
        for i in 1..n - 1 {
            a[i] = h[i - 1];
            b[i] = two * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = six * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        b[n - 1] = T::one();
        d[n - 1] = T::zero();
        // Thomas algorithm
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] = b[i] - w * c[i - 1];
            d[i] = d[i] - w * d[i - 1];
        }
        let mut m = vec![T::zero(); n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        Ok(Self {
            x: xs.to_vec(),
            y: ys.to_vec(),
            m,
        })
    }

    fn eval(&self, x: T, order: u32) -> T {
        let n = self.x.len();
        let i = match self.x.iter().position(|&k| k > x) {
            Some(0) => 0,
            Some(j) => j - 1,
            None => n - 2,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - x) / h;
        let b = (x - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let six = T::lit(6.0);
        match order {
            0 => a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / six,
            1 => {
                (y1 - y0) / h - (T::lit(3.0) * a * a - T::one()) * h * m0 / six
                    + (T::lit(3.0) * b * b - T::one()) * h * m1 / six
            }
            2 => a * m0 + b * m1,
            _ => (m1 - m0) / h,
        }
    }
}

/// Default test function: (1 − x²)³ on [−1, 1].
pub fn default_test_function() -> TestFunction<f64> {
    TestFunction::polynomial_bump(1.0, 3).expect("valid parameters")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bump_examples() {
        let f = default_test_function();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.derivative(1.0, 2).unwrap(), 0.0);
        let g = TestFunction::polynomial_bump(2.0f64, 3).unwrap();
        assert!((g.eval(1.0) - 27.0 / 64.0).abs() < 1e-15);
        assert!(TestFunction::polynomial_bump(1.0f64, 2).is_err());
        assert_eq!(f.derivative(0.0, 1).unwrap(), 0.0);
        assert!((f.eval(0.5) - 27.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn fourier_at_zero_symbolic() {
        let f = default_test_function();
        assert!((f.fourier(0.0).unwrap() - 32.0 / 35.0).abs() < 1e-12);
        let f32_bump = TestFunction::polynomial_bump(1.0f32, 3).unwrap();
        assert!((f32_bump.fourier(0.0).unwrap() - 32.0 / 35.0).abs() < 1e-5);
    }

    #[test]
    fn fourier_closed_form_oracle() {
        // independent composite Simpson rule on a fine grid
        let f = default_test_function();
        let exact = |y: f64| {
            let a = 2.0 * std::f64::consts::PI * y;
            let n = 20000;
            let h = 1.0 / n as f64;
            let mut s = 0.0;
            for i in 0..=n {
                let x = i as f64 * h;
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * (1.0 - x * x).powi(3) * (a * x).cos();
            }
            2.0 * s * h / 3.0
        };
        for y in [0.3, 1.7, 5.2] {
            assert!((f.fourier(y).unwrap() - exact(y)).abs() < 1e-10);
        }
    }

    #[test]
    fn decay_constant_validated() {
        let f = default_test_function();
        assert!(f.validate_decay().unwrap());
        let c = f.decay_constant().unwrap();
        for y in [10.0, 100.0, 1000.0] {
            let v = f.fourier(y).unwrap().abs() * y * y;
            assert!(v.is_finite() && v <= c);
        }
    }

    #[test]
    fn fourier_inversion_by_poisson_summation() {
        // with N ≥ 2σ, (1/N) Σ_k f̂(k/N) e^{2πixk/N} = Σ_m f(x + mN) = f(x) for |x| < N/2
        let f = default_test_function();
        let n = 4.0;
        let kmax = 4000;
        let fh: Vec<f64> = (0..=kmax).map(|k| f.fourier_cached(k as f64 / n).unwrap()).collect();
        for i in 0..20 {
            let x = -1.2 + 2.4 * i as f64 / 19.0;
            let mut s = fh[0];
            for (k, v) in fh.iter().enumerate().skip(1) {
                s += 2.0 * v * (2.0 * std::f64::consts::PI * x * k as f64 / n).cos();
            }
            assert!((s / n - f.eval(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn cached_matches_direct() {
        let f = TestFunction::polynomial_bump(1.3, 4).unwrap();
        for i in 0..200 {
            let y = 0.173 * i as f64;
            let a = f.fourier_cached(y).unwrap();
            let b = f.fourier(y).unwrap();
            assert!((a - b).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn finite_difference_fallback() {
        let f = default_test_function();
        let g = TestFunction::custom(1.0, "bump3", |x: f64| (1.0 - x * x).powi(3)).unwrap();
        for x in [-0.7, -0.2, 0.0, 0.35, 0.9] {
            assert!((f.derivative(x, 1).unwrap() - g.derivative(x, 1).unwrap()).abs() < 1e-6);
            assert!((f.derivative(x, 2).unwrap() - g.derivative(x, 2).unwrap()).abs() < 1e-5);
        }
        assert!(g.derivative_at_zero(4).is_err());
    }

    #[test]
    fn tabulated_reproduces_bump() {
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (1.0 - x * x).powi(3)).collect();
        let t = TestFunction::tabulated(&xs, &ys).unwrap();
        let f = default_test_function();
        for x in [0.0, 0.123, -0.5, 0.77, 0.999] {
            assert!((t.eval(x) - f.eval(x)).abs() < 1e-8);
            assert!((t.derivative(x, 1).unwrap() - f.derivative(x, 1).unwrap()).abs() < 1e-5);
        }
        assert!((t.fourier(0.7).unwrap() - f.fourier(0.7).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn taylor_coefficients_at_zero() {
        let f = TestFunction::polynomial_bump(1.5f64, 3).unwrap();
        // f = 1 − 3x²/σ² + …, f″(0) = −6/σ²
        assert!((f.derivative_at_zero(2).unwrap() + 6.0 / 2.25).abs() < 1e-14);
        assert!((f.derivative_at_zero(2).unwrap() - f.derivative(0.0, 2).unwrap()).abs() < 1e-14);
        assert_eq!(f.derivative_at_zero(3).unwrap(), 0.0);
        // f⁗(0) = 4!·3/σ⁴
        assert!((f.derivative_at_zero(4).unwrap() - 72.0 / 1.5f64.powi(4)).abs() < 1e-12);
        assert_eq!(f.derivative_at_zero(8).unwrap(), 0.0);
    }

    #[test]
    fn zero_function() {
        let z = TestFunction::zero(1.0f64);
        assert_eq!(z.fourier(3.0).unwrap(), 0.0);
        assert_eq!(z.eval(0.0), 0.0);
        assert!(z.is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn even_and_supported(sigma in 0.3f64..2.5, power in 3u32..7, x in -4.0f64..4.0, y in -30.0f64..30.0) {
            let f = TestFunction::polynomial_bump(sigma, power).unwrap();
            prop_assert_eq!(f.eval(x), f.eval(-x));
            prop_assert_eq!(f.fourier(y).unwrap(), f.fourier(-y).unwrap());
            if x.abs() > sigma {
                for k in 0..=2 {
                    prop_assert_eq!(f.derivative(x, k).unwrap(), 0.0);
                }
            }
        }

        #[test]
        fn fourier_is_real(y in 0.0f64..40.0) {
            // the odd (sine) part of the two-sided integral vanishes
            let f = default_test_function();
            let cfg = QuadConfig::with_abs_tol(1e-14);
            let im = crate::numeric::integrate(|x: f64| f.eval(x) * (2.0 * std::f64::consts::PI * x * y).sin(), -1.0, 1.0, &cfg).unwrap();
            prop_assert!(im.value.abs() < 1e-12);
        }
    }
}
