//! Special values: ζ and Hurwitz ζ by Euler–Maclaurin, certified prime sums
//! and Euler products, the catalog of named constants, and the weighted
//! reciprocal-totient sums with their asymptotic expansions.

mod constants;
mod primes_sums;
mod totient;
mod zeta;

pub use constants::{
    all_constants, constant, constants_at, Definition, EulerProduct, NamedConstant, TailStrategy,
    CATALOG_P0, IDS,
};
pub use primes_sums::{Bounded, PrimeZetaTail};
pub use totient::{
    exp_moment, totient_sum_asymptotic, totient_sum_direct, TotientVariant, MAX_DEGREE, MAX_DIRECT_R,
};
pub use zeta::{
    hurwitz_em, hurwitz_zeta, zeta, zeta_complex, zeta_log_derivative, zeta_with, EmConfig, EmValue,
    MAX_ORDER,
};
pub(crate) use zeta::em_tail;
