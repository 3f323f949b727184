//! Dirichlet characters modulo q.
//!
//! The unit group (Z/qZ)^* is split by CRT into prime-power components:
//! a primitive root for each odd p^e, and the generators {−1, 5} for 2^e
//! (only −1 when e = 2, nothing when e = 1). A character is an exponent
//! vector over those generators. Values are kept as exact roots of unity;
//! complex floats appear only in [`DirichletCharacter::evaluate`] and
//! [`DirichletCharacter::gauss_sum`].

mod cyclotomic;

pub use cyclotomic::{CyclotomicInt, RootOfUnity};

use crate::arith::{factorize, gcd, pow_mod, primitive_root_prime_power, totient};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

/// Largest modulus the character machinery accepts by default.
pub const DEFAULT_MAX_MODULUS: u64 = 1_000_000;

#[derive(Debug)]
enum LocalGroup {
    /// 2^1: trivial.
    Trivial,
    /// Cyclic, discrete logs to a primitive root tabulated mod `modulus`.
    Cyclic { order: u64, dlog: Vec<u32> },
    /// 2^e with e >= 2: n ≡ (−1)^a 5^b, `dlog[n] = (a, b)`.
    TwoPower { order5: u64, dlog: Vec<(u8, u32)> },
}

#[derive(Debug)]
struct Component {
    prime: u64,
    exponent: u32,
    modulus: u64,
    local: LocalGroup,
}

/// One generator of the unit group, lifted by CRT to a residue mod q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub residue: u64,
    pub order: u64,
    component: usize,
    /// For 2^e: 0 is the −1 generator, 1 is the 5 generator.
    part: u8,
}

/// Structure of (Z/qZ)^*.
#[derive(Debug)]
pub struct ResidueGroup {
    modulus: u64,
    components: Vec<Component>,
    generators: Vec<Generator>,
    order: u64,
    exponent: u64,
}

impl ResidueGroup {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_max_modulus(q, DEFAULT_MAX_MODULUS)
    }

    pub fn with_max_modulus(q: u64, max: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if q > max {
            return Err(Error::ModulusTooLarge { q, max });
        }
        let mut components = Vec::new();
        let mut generators = Vec::new();
        for (p, e) in factorize(q) {
            let m = p.pow(e);
            let idx = components.len();
            let lift = |local: u64| crt_lift(local, m, q);
            let local = if p == 2 {
                match e {
                    1 => LocalGroup::Trivial,
                    _ => {
                        let order5 = if e >= 3 { m / 4 } else { 1 };
                        let mut dlog = vec![(u8::MAX, u32::MAX); m as usize];
                        let mut x = 1u64;
                        for b in 0..order5 {
                            dlog[x as usize] = (0, b as u32);
                            dlog[(m - x) as usize] = (1, b as u32);
                            x = x * 5 % m;
                        }
                        generators.push(Generator {
                            residue: lift(m - 1),
                            order: 2,
                            component: idx,
                            part: 0,
                        });
                        if order5 > 1 {
                            generators.push(Generator {
                                residue: lift(5),
                                order: order5,
                                component: idx,
                                part: 1,
                            });
                        }
                        LocalGroup::TwoPower { order5, dlog }
                    }
                }
            } else {
                let root = primitive_root_prime_power(p, e);
                let order = m / p * (p - 1);
                let mut dlog = vec![u32::MAX; m as usize];
                let mut x = 1u64;
                for k in 0..order {
                    dlog[x as usize] = k as u32;
                    x = x * root % m;
                }
                generators.push(Generator {
                    residue: lift(root),
                    order,
                    component: idx,
                    part: 0,
                });
                LocalGroup::Cyclic { order, dlog }
            };
            components.push(Component {
                prime: p,
                exponent: e,
                modulus: m,
                local,
            });
        }
        let order = generators.iter().map(|g| g.order).product::<u64>();
        let exponent = generators
            .iter()
            .fold(1u64, |acc, g| num_integer::lcm(acc, g.order));
        debug_assert_eq!(order, totient(q));
        Ok(Self {
            modulus: q,
            components,
            generators,
            order,
            exponent,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(q).
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent of the group (least common multiple of generator orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Discrete logarithms of `n` with respect to the generators, or `None`
    /// when gcd(n, q) > 1.
    pub fn discrete_log(&self, n: i64) -> Option<Vec<u64>> {
        let r = n.rem_euclid(self.modulus as i64) as u64;
        let mut out = Vec::with_capacity(self.generators.len());
        for c in &self.components {
            let local = (r % c.modulus) as usize;
            match &c.local {
                LocalGroup::Trivial => {
                    if local % 2 == 0 {
                        return None;
                    }
                }
                LocalGroup::Cyclic { dlog, .. } => {
                    let k = dlog[local];
                    if k == u32::MAX {
                        return None;
                    }
                    out.push(k as u64);
                }
                LocalGroup::TwoPower { order5, dlog } => {
                    let (a, b) = dlog[local];
                    if a == u8::MAX {
                        return None;
                    }
                    out.push(a as u64);
                    if *order5 > 1 {
                        out.push(b as u64);
                    }
                }
            }
        }
        Some(out)
    }

    /// Reconstructs the residue with the given discrete logs (inverse of
    /// [`Self::discrete_log`]).
    pub fn element(&self, logs: &[u64]) -> u64 {
        self.generators
            .iter()
            .zip(logs)
            .fold(1u64 % self.modulus, |acc, (g, &k)| {
                acc * pow_mod(g.residue, k, self.modulus) % self.modulus
            })
    }
}

/// Residue ≡ `local` mod `m` and ≡ 1 mod q/m.
fn crt_lift(local: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    if rest == 1 {
        return local % q;
    }
    // x = 1 + rest·t with 1 + rest·t ≡ local (mod m)
    let inv = crate::arith::inv_mod(rest % m, m).expect("coprime CRT components");
    let t = ((local + m - 1) % m) * inv % m;
    (1 + rest * t) % q
}

/// A Dirichlet character modulo q.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<ResidueGroup>,
    exponents: Vec<u64>,
    index: usize,
    parity: u8,
    conductor: u64,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus())
            .field("index", &self.index)
            .field("exponents", &self.exponents)
            .field("parity", &self.parity)
            .field("conductor", &self.conductor)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

/// All φ(q) characters mod q, in lexicographic order of exponent vectors
/// (the principal character first).
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(ResidueGroup::new(q)?);
    Ok(characters_of(&group))
}

/// Characters of an already constructed group.
pub fn characters_of(group: &Arc<ResidueGroup>) -> Vec<DirichletCharacter> {
    let orders: Vec<u64> = group.generators.iter().map(|g| g.order).collect();
    let total = group.order as usize;
    let mut out = Vec::with_capacity(total);
    let mut exps = vec![0u64; orders.len()];
    for index in 0..total {
        out.push(DirichletCharacter::from_exponents(group, exps.clone(), index));
        // increment, last slot fastest
        for slot in (0..orders.len()).rev() {
            exps[slot] += 1;
            if exps[slot] < orders[slot] {
                break;
            }
            exps[slot] = 0;
        }
    }
    out
}

impl DirichletCharacter {
    fn from_exponents(group: &Arc<ResidueGroup>, exponents: Vec<u64>, index: usize) -> Self {
        let mut chi = Self {
            group: Arc::clone(group),
            exponents,
            index,
            parity: 0,
            conductor: 1,
        };
        let minus_one = chi.value_exact(-1).expect("−1 is a unit");
        chi.parity = if minus_one == RootOfUnity::ONE { 0 } else { 1 };
        chi.conductor = chi.compute_conductor();
        chi
    }

    /// Character with exponent vector `exponents` on the generators of `group`.
    pub fn from_exponent_vector(group: &Arc<ResidueGroup>, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != group.generators.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} exponents, got {}",
                group.generators.len(),
                exponents.len()
            )));
        }
        let mut index = 0usize;
        for (g, &k) in group.generators.iter().zip(&exponents) {
            if k >= g.order {
                return Err(Error::InvalidArgument(format!(
                    "exponent {k} out of range for generator order {}",
                    g.order
                )));
            }
            index = index * g.order as usize + k as usize;
        }
        Ok(Self::from_exponents(group, exponents, index))
    }

    /// The character with the given enumeration index mod q.
    pub fn from_index(q: u64, index: usize) -> Result<Self> {
        let group = Arc::new(ResidueGroup::new(q)?);
        if index as u64 >= group.order {
            return Err(Error::InvalidArgument(format!(
                "character index {index} out of range for modulus {q}"
            )));
        }
        let mut exps = vec![0u64; group.generators.len()];
        let mut rest = index as u64;
        for (slot, g) in group.generators.iter().enumerate().rev() {
            exps[slot] = rest % g.order;
            rest /= g.order;
        }
        Ok(Self::from_exponents(&group, exps, index))
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn group(&self) -> &Arc<ResidueGroup> {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// a(χ): 0 when χ(−1) = 1, 1 when χ(−1) = −1.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    /// Whether all values are real (χ = χ̄).
    pub fn is_real(&self) -> bool {
        self.group
            .generators
            .iter()
            .zip(&self.exponents)
            .all(|(g, &k)| (2 * k) % g.order == 0)
    }

    /// Order of χ in the character group.
    pub fn order(&self) -> u64 {
        self.group
            .generators
            .iter()
            .zip(&self.exponents)
            .fold(1u64, |acc, (g, &k)| {
                num_integer::lcm(acc, g.order / num_integer::gcd(k, g.order).max(1))
            })
    }

    /// χ(n) as an exact root of unity, `None` when gcd(n, q) > 1.
    pub fn value_exact(&self, n: i64) -> Option<RootOfUnity> {
        let logs = self.group.discrete_log(n)?;
        let l = self.group.exponent;
        let mut num = 0u64;
        for ((g, &k), &lg) in self.group.generators.iter().zip(&self.exponents).zip(&logs) {
            let step = l / g.order;
            num = (num + (k * lg % g.order) * step) % l;
        }
        Some(RootOfUnity::new(num, l))
    }

    /// χ(n) as a complex number (0 when gcd(n, q) > 1).
    pub fn evaluate(&self, n: i64) -> Complex64 {
        match self.value_exact(n) {
            Some(r) => r.to_complex(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn conjugate(&self) -> Self {
        let exps: Vec<u64> = self
            .group
            .generators
            .iter()
            .zip(&self.exponents)
            .map(|(g, &k)| (g.order - k) % g.order)
            .collect();
        Self::from_exponent_vector(&self.group, exps).expect("conjugate exponents in range")
    }

    fn compute_conductor(&self) -> u64 {
        let mut conductor = 1u64;
        let mut slot = 0usize;
        for c in &self.group.components {
            let p = c.prime;
            let f = match &c.local {
                LocalGroup::Trivial => 0,
                LocalGroup::Cyclic { order, .. } => {
                    let k = self.exponents[slot];
                    slot += 1;
                    if k == 0 {
                        0
                    } else {
                        let o = order / num_integer::gcd(k, *order);
                        1 + p_adic_valuation(o, p)
                    }
                }
                LocalGroup::TwoPower { order5, .. } => {
                    let ka = self.exponents[slot];
                    slot += 1;
                    let kb = if *order5 > 1 {
                        let kb = self.exponents[slot];
                        slot += 1;
                        kb
                    } else {
                        0
                    };
                    if kb != 0 {
                        let ob = order5 / num_integer::gcd(kb, *order5);
                        2 + p_adic_valuation(ob, 2)
                    } else if ka != 0 {
                        2
                    } else {
                        0
                    }
                }
            };
            debug_assert!(f <= c.exponent);
            conductor *= p.pow(f);
        }
        conductor
    }

    /// The conductor q* and the primitive character mod q* inducing χ.
    pub fn conductor_and_inducer(&self) -> (u64, DirichletCharacter) {
        let qs = self.conductor;
        if qs == self.modulus() {
            return (qs, self.clone());
        }
        let group = Arc::new(ResidueGroup::new(qs).expect("conductor divides an admissible modulus"));
        let q = self.modulus();
        let exps: Vec<u64> = group
            .generators
            .iter()
            .map(|g| {
                let mut n = g.residue;
                while gcd(n, q) != 1 {
                    n += qs;
                }
                let v = self.value_exact(n as i64).expect("lifted generator is a unit");
                let k = v.numerator() * g.order / v.order();
                debug_assert_eq!(g.order % v.order(), 0);
                k % g.order
            })
            .collect();
        let inducer = DirichletCharacter::from_exponent_vector(&group, exps)
            .expect("inducer exponents in range");
        debug_assert!(inducer.is_primitive());
        (qs, inducer)
    }

    /// τ(χ) = Σ_{a mod q} χ(a) e^{2πia/q}; only defined for primitive χ.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive {
                q: self.modulus(),
                index: self.index,
            });
        }
        let q = self.modulus();
        let mut re = crate::numeric::CompensatedSum::<f64>::new();
        let mut im = crate::numeric::CompensatedSum::<f64>::new();
        for a in 0..q {
            if let Some(v) = self.value_exact(a as i64) {
                let phase = v.mul(RootOfUnity::new(a, q)).to_complex();
                re.add(phase.re);
                im.add(phase.im);
            }
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    /// χ(0), χ(1), …, χ(q − 1).
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.modulus() as i64).map(|n| self.evaluate(n)).collect()
    }
}

fn p_adic_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Σ_{χ mod q} χ(n) computed exactly in Z[ζ_λ], λ the group exponent.
pub fn character_sum_exact(chars: &[DirichletCharacter], n: i64) -> CyclotomicInt {
    let order = chars
        .first()
        .map(|c| c.group.exponent)
        .unwrap_or(1);
    let mut acc = CyclotomicInt::zero(order);
    for chi in chars {
        if let Some(v) = chi.value_exact(n) {
            acc.add_root(v, 1);
        }
    }
    acc
}

#[cfg(test)]
fn unit_order_check(group: &ResidueGroup) -> bool {
    group
        .generators
        .iter()
        .all(|g| crate::arith::mult_order(g.residue, group.modulus) == g.order || group.modulus <= 2)
}
