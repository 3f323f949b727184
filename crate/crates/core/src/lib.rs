//! Numerical one-level density of low-lying zeros of Dirichlet L-functions.

pub mod arith;
pub mod characters;
pub mod density;
pub mod error;
pub mod hypotheses;
pub mod lfunction;
pub mod numeric;
pub mod primes;
pub mod special;
pub mod testfn;

pub use error::{Error, ErrorKind, Result};

/// Working precision of the L-function, density and hypothesis layers.
pub type Real = f64;
pub type Complex = num_complex::Complex<Real>;
/// Test function at working precision.
pub type TestFn = testfn::TestFunction<Real>;
pub type QuadCfg = numeric::QuadConfig<Real>;
