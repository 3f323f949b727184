//! Exact arithmetic in the cyclotomic ring Z[ζ_n].
//!
//! Elements are integer combinations of the powers 1, ζ, …, ζ^{n-1}; that
//! representation is redundant, so equality is decided by reducing modulo
//! the cyclotomic polynomial Φ_n.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Reduced fraction `num/den` in [0, 1), standing for e^{2πi·num/den}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = num_integer::gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Order of the root of unity.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn mul(self, other: Self) -> Self {
        let den = num_integer::lcm(self.den, other.den);
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }

    pub fn conj(self) -> Self {
        Self::new(self.den - self.num, self.den)
    }

    pub fn pow(self, k: u64) -> Self {
        Self::new(((self.num as u128 * k as u128) % self.den as u128) as u64, self.den)
    }

    /// Exponent as a fraction of a full turn, in [0, 1).
    pub fn turns(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let angle = 2.0 * std::f64::consts::PI * self.turns();
        num_complex::Complex64::new(angle.cos(), angle.sin())
    }
}

/// Integer polynomial coefficients, lowest degree first.
fn cyclotomic_polynomial(n: usize, cache: &mut HashMap<usize, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d, cache);
            num = exact_div(&num, &phi_d);
        }
    }
    cache.insert(n, num.clone());
    num
}

fn shared_cyclotomic(n: usize) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cyclotomic cache poisoned").get(&n) {
        return Arc::clone(p);
    }
    let mut scratch = HashMap::new();
    let p = Arc::new(cyclotomic_polynomial(n, &mut scratch));
    cache
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(n, Arc::clone(&p));
    p
}

/// Quotient of `a` by monic `b`, assuming exact division.
fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut quo = vec![0i64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db];
        quo[i] = c;
        if c != 0 {
            for j in 0..=db {
                rem[i + j] -= c * b[j];
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quo
}

/// An element Σ c_j ζ_n^j of Z[ζ_n].
#[derive(Clone, Debug)]
pub struct CyclotomicInt {
    order: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn zero(order: u64) -> Self {
        Self {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `mult·r`; the order of `r` must divide the ring's order.
    pub fn add_root(&mut self, r: RootOfUnity, mult: i64) {
        assert!(
            self.order % r.order() == 0,
            "root of order {} outside Z[ζ_{}]",
            r.order(),
            self.order
        );
        let j = r.numerator() * (self.order / r.order());
        self.coeffs[j as usize] += mult;
    }

    pub fn add_integer(&mut self, k: i64) {
        self.coeffs[0] += k;
    }

    /// Canonical coefficients in the power basis of degree < φ(n).
    pub fn reduced(&self) -> Vec<i64> {
        let phi = shared_cyclotomic(self.order as usize);
        let deg = phi.len() - 1;
        let mut rem: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        for i in (deg..rem.len()).rev() {
            let c = rem[i];
            if c != 0 {
                for (j, &pj) in phi.iter().enumerate() {
                    rem[i - deg + j] -= c * pj as i128;
                }
            }
        }
        rem.truncate(deg.max(1));
        rem.into_iter()
            .map(|c| i64::try_from(c).expect("coefficient overflow"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    /// Whether the element is the rational integer `k`.
    pub fn equals_integer(&self, k: i64) -> bool {
        let mut c = self.clone();
        c.add_integer(-k);
        c.is_zero()
    }
}
