use super::primes_sums::{coeffs_h, coeffs_log_prod, coeffs_s2, Bounded, PrimeZetaTail};
use super::zeta::{zeta_with, EmConfig};
use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::OnceLock;

/// How a constant is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definition {
    PrimeSum,
    EulerProduct,
    ZetaExpression,
    Composite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedConstant {
    pub id: &'static str,
    pub value: f64,
    /// Absolute error radius.
    pub error: f64,
    pub definition: Definition,
    pub description: &'static str,
}

/// Truncation prime for the explicit part of every prime sum.
pub const CATALOG_P0: u64 = 10_000;

/// Identifiers in the order they are reported.
pub const IDS: &[&str] = &[
    "gamma",
    "zeta_half",
    "zeta_log_deriv_half",
    "S_pp",
    "S_2",
    "S_h",
    "prod_h",
    "C1",
    "C6",
    "C6_mu0",
    "c_gv",
    "D1",
    "D2",
    "D3",
    "E1",
    "E2",
    "F1",
    "F2",
    "F1_2",
    "F2_2",
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn zeta_bounded(s: f64) -> Result<(Bounded, Bounded)> {
    let v = zeta_with(s, EmConfig::new(60, 14))?;
    let err = v.error + 4.0 * f64::EPSILON * v.value.re.abs();
    Ok((
        Bounded {
            value: v.value.re,
            error: err,
        },
        Bounded {
            value: v.derivative.re,
            error: 10.0 * err * (1.0 + v.derivative.re.abs()),
        },
    ))
}

fn mul(a: Bounded, b: Bounded) -> Bounded {
    Bounded {
        value: a.value * b.value,
        error: a.error * b.value.abs() + b.error * a.value.abs() + a.error * b.error
            + 2.0 * f64::EPSILON * (a.value * b.value).abs(),
    }
}

fn div(a: Bounded, b: Bounded) -> Bounded {
    let v = a.value / b.value;
    Bounded {
        value: v,
        error: (a.error + v.abs() * b.error) / (b.value.abs() - b.error) + 2.0 * f64::EPSILON * v.abs(),
    }
}

fn add(a: Bounded, b: Bounded) -> Bounded {
    Bounded {
        value: a.value + b.value,
        error: a.error + b.error + f64::EPSILON * (a.value + b.value).abs(),
    }
}

fn exact(v: f64) -> Bounded {
    Bounded {
        value: v,
        error: f64::EPSILON * v.abs(),
    }
}

fn scale(a: Bounded, c: f64) -> Bounded {
    Bounded {
        value: a.value * c,
        error: a.error * c.abs() + f64::EPSILON * (a.value * c).abs(),
    }
}

struct Catalog {
    items: Vec<NamedConstant>,
}

fn build(p0: u64) -> Result<Catalog> {
    let tail = PrimeZetaTail::new(p0);
    const TERMS: usize = 48;
    let gamma = exact(EULER_GAMMA);
    let (zh, dzh) = zeta_bounded(0.5)?;
    let zld = div(dzh, zh);
    let s_pp = tail.log_weighted_sum(
        |p| 1.0 / (p * (p - 1.0)),
        &{
            let mut c = vec![1.0; TERMS];
            c[0] = 0.0;
            c[1] = 0.0;
            c
        },
        1.0,
    )?;
    let s_2 = tail.log_weighted_sum(|p| 1.0 / (p * p - p + 1.0), &coeffs_s2(TERMS), 1.0)?;
    let s_h = tail.log_weighted_sum(
        |p| 1.0 / ((p - 1.0) * p.sqrt() + 1.0),
        &coeffs_h(2 * TERMS),
        0.5,
    )?;
    let log_prod = tail.plain_sum(
        |p| (1.0 / ((p - 1.0) * p.sqrt())).ln_1p(),
        &coeffs_log_prod(2 * TERMS),
        0.5,
    )?;
    let prod_h = Bounded {
        value: log_prod.value.exp(),
        error: log_prod.value.exp() * (log_prod.error.exp_m1() + 2.0 * f64::EPSILON),
    };

    let (z2, _) = zeta_bounded(2.0)?;
    let (z3, _) = zeta_bounded(3.0)?;
    let (z6, _) = zeta_bounded(6.0)?;
    let d1 = div(mul(z2, z3), z6);
    let c1 = scale(d1, LN_2);
    let c6 = add(add(exact((PI / 2.0).ln() + 1.0), gamma), s_pp);
    let c6_mu0 = add(add(exact(PI.ln() + 1.0), gamma), s_pp);
    let c_gv = add(add(exact((2.0 * PI).ln() + 1.0), gamma), s_pp);
    let d2 = mul(d1, add(add(gamma, exact(-3.0)), scale(s_2, -1.0)));
    let d3 = scale(mul(zh, prod_h), -2.0);
    let e2 = mul(d1, add(add(gamma, exact(-1.0)), scale(s_2, -1.0)));
    let f1 = scale(mul(zh, prod_h), -4.0);
    let zld_minus_sh = add(zld, scale(s_h, -1.0));
    let f2 = mul(f1, zld_minus_sh);
    let f1_2 = scale(f1, 1.0 / SQRT_2);
    let f2_2 = mul(f1_2, add(zld_minus_sh, exact(LN_2)));

    use Definition::*;
    let mk = |id, b: Bounded, definition, description| NamedConstant {
        id,
        value: b.value,
        error: b.error.max(f64::EPSILON * b.value.abs()).max(f64::MIN_POSITIVE),
        definition,
        description,
    };
    let items = vec![
        mk("gamma", gamma, ZetaExpression, "Euler–Mascheroni constant"),
        mk("zeta_half", zh, ZetaExpression, "ζ(1/2)"),
        mk("zeta_log_deriv_half", zld, ZetaExpression, "ζ′(1/2)/ζ(1/2)"),
        mk("S_pp", s_pp, PrimeSum, "Σ_p log p/(p(p−1))"),
        mk("S_2", s_2, PrimeSum, "Σ_p log p/(p²−p+1)"),
        mk("S_h", s_h, PrimeSum, "Σ_p log p/((p−1)√p+1)"),
        mk("prod_h", prod_h, EulerProduct, "∏_p (1 + 1/((p−1)√p))"),
        mk("C1", c1, Composite, "ζ(2)ζ(3)/ζ(6) · log 2"),
        mk("C6", c6, Composite, "log(π/2) + 1 + γ + Σ_p log p/(p(p−1))"),
        mk("C6_mu0", c6_mu0, Composite, "log π + 1 + γ + Σ_p log p/(p(p−1))"),
        mk("c_gv", c_gv, Composite, "γ + log 2π + 1 + Σ_p log p/(p(p−1))"),
        mk("D1", d1, ZetaExpression, "ζ(2)ζ(3)/ζ(6)"),
        mk("D2", d2, Composite, "D1 (γ − 3 − Σ_p log p/(p²−p+1))"),
        mk("D3", d3, Composite, "−2 ζ(1/2) ∏_p (1 + 1/((p−1)√p))"),
        mk("E1", d1, ZetaExpression, "ζ(2)ζ(3)/ζ(6)"),
        mk("E2", e2, Composite, "E1 (γ − 1 − Σ_p log p/(p²−p+1))"),
        mk("F1", f1, Composite, "−4 ζ(1/2) ∏_p (1 + 1/((p−1)√p))"),
        mk("F2", f2, Composite, "F1 (ζ′/ζ(1/2) − Σ_p log p/((p−1)√p+1))"),
        mk("F1_2", f1_2, Composite, "F1/√2"),
        mk("F2_2", f2_2, Composite, "(F1/√2)(ζ′/ζ(1/2) − Σ_p log p/((p−1)√p+1) + log 2)"),
    ];
    Ok(Catalog { items })
}

fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| build(CATALOG_P0).expect("constant catalog evaluates"))
}

/// Looks up a constant by identifier.
pub fn constant(id: &str) -> Result<NamedConstant> {
    catalog()
        .items
        .iter()
        .find(|c| c.id == id)
        .cloned()
        .ok_or_else(|| Error::UnknownConstant(id.to_string()))
}

/// Value of a constant known to exist.
pub(crate) fn value(id: &str) -> f64 {
    constant(id).expect("catalog constant").value
}

pub fn all_constants() -> Vec<NamedConstant> {
    catalog().items.clone()
}

/// Recomputes the catalog with a different truncation prime (for refinement checks).
pub fn constants_at(p0: u64) -> Result<Vec<NamedConstant>> {
    build(p0).map(|c| c.items)
}

/// Tail-bound strategy of an [`EulerProduct`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStrategy {
    /// log-factor ≤ c/(n(n−1)) summed over integers n > P0: tail ≤ e^{c/P0} − 1.
    Telescoping { numerator: u32 },
    /// log-factor ≤ c·n^{−s}: tail ≤ exp(c·P0^{1−s}/(s−1)) − 1.
    PowerLaw,
}

/// ∏_{p ≤ P0} of a local factor, with a certified relative tail bound.
pub struct EulerProduct {
    pub name: &'static str,
    local: fn(f64) -> f64,
    pub strategy: TailStrategy,
    /// Exponent and constant for [`TailStrategy::PowerLaw`].
    decay: (f64, f64),
}

impl EulerProduct {
    /// ∏_p (1 + 1/(p(p−1))) = ζ(2)ζ(3)/ζ(6).
    pub fn d1() -> Self {
        Self {
            name: "D1",
            local: |p| 1.0 + 1.0 / (p * (p - 1.0)),
            strategy: TailStrategy::Telescoping { numerator: 1 },
            decay: (2.0, 1.0),
        }
    }

    /// ∏_p (1 + 1/((p−1)√p)).
    pub fn prod_h() -> Self {
        Self {
            name: "prod_h",
            local: |p| 1.0 + 1.0 / ((p - 1.0) * p.sqrt()),
            strategy: TailStrategy::PowerLaw,
            // 1/((p−1)√p) ≤ 2 p^{−3/2} for p ≥ 2
            decay: (1.5, 2.0),
        }
    }

    pub fn local_factor(&self, p: f64) -> f64 {
        (self.local)(p)
    }

    /// (partial product over p ≤ P0, absolute bound on full − partial).
    pub fn evaluate(&self, p0: u64) -> (f64, f64) {
        let mut log_sum = crate::numeric::CompensatedSum::new();
        for p in crate::primes::simple_sieve(p0) {
            log_sum.add(((self.local)(p as f64) - 1.0).ln_1p());
        }
        let partial = log_sum.value().exp();
        let p0f = p0.max(2) as f64;
        let rel = match self.strategy {
            TailStrategy::Telescoping { numerator } => (numerator as f64 / p0f).exp_m1(),
            TailStrategy::PowerLaw => {
                let (s, c) = self.decay;
                (c * p0f.powf(1.0 - s) / (s - 1.0)).exp_m1()
            }
        };
        (partial, partial * rel)
    }
}
