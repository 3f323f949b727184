//! Sieve-backed von Mangoldt data: Λ(n), ψ, ψ2 and progression errors.

use crate::arith::{gcd, totient};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use rayon::prelude::*;
use serde::Serialize;

/// Default prime-table limit for command-line runs.
pub const DEFAULT_LIMIT: u64 = 100_000_000;
/// Default sieve segment length (odd numbers per segment ×2).
pub const DEFAULT_SEGMENT: u64 = 1 << 18;

/// A ψ-type value together with the query that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiValue {
    pub x: f64,
    pub progression: Option<(u64, u64)>,
    pub value: f64,
    pub smoothed: bool,
}

/// Primes and prime powers up to a fixed limit, with prefix sums of Λ(n)
/// and nΛ(n) over the sorted prime powers.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    odd_prime_bits: Vec<u64>,
    primes: Vec<u32>,
    powers: Vec<u32>,
    lambda: Vec<f64>,
    cum_lambda: Vec<f64>,
    cum_n_lambda: Vec<f64>,
}

/// Plain Eratosthenes up to `n` (inclusive), used for small bases and as an
/// independent reference.
pub fn simple_sieve(n: u64) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_segment(limit, DEFAULT_SEGMENT)
    }

    pub fn with_segment(limit: u64, segment: u64) -> Result<Self> {
        if limit > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "prime table limit {limit} exceeds {}",
                u32::MAX
            )));
        }
        let limit = limit.max(1);
        let segment = segment.max(128) & !127;
        let base = simple_sieve((limit as f64).sqrt() as u64 + 1);

        // segment k covers [k·segment, (k+1)·segment)
        let n_segments = limit / segment + 1;
        let chunks: Vec<Vec<u64>> = (0..n_segments)
            .into_par_iter()
            .map(|k| sieve_segment(k * segment, ((k + 1) * segment).min(limit + 1), &base))
            .collect();
        let mut odd_prime_bits = Vec::with_capacity((limit / 128 + 1) as usize);
        for c in chunks {
            odd_prime_bits.extend(c);
        }
        odd_prime_bits.truncate((limit / 128 + 1) as usize);

        let mut primes = Vec::new();
        if limit >= 2 {
            primes.push(2u32);
        }
        for (w, &word) in odd_prime_bits.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                let n = (w as u64 * 64 + b) * 2 + 1;
                if n <= limit {
                    primes.push(n as u32);
                }
                bits &= bits - 1;
            }
        }

        let mut pairs: Vec<(u32, f64)> = Vec::with_capacity(primes.len() + 64);
        for &p in &primes {
            let lp = (p as f64).ln();
            let mut n = p as u64;
            while n <= limit {
                pairs.push((n as u32, lp));
                n *= p as u64;
            }
        }
        pairs.sort_unstable_by_key(|&(n, _)| n);
        let powers: Vec<u32> = pairs.iter().map(|&(n, _)| n).collect();
        let lambda: Vec<f64> = pairs.iter().map(|&(_, l)| l).collect();
        let mut cum_lambda = Vec::with_capacity(lambda.len());
        let mut cum_n_lambda = Vec::with_capacity(lambda.len());
        let mut s = CompensatedSum::new();
        let mut sn = CompensatedSum::new();
        for (&n, &l) in powers.iter().zip(&lambda) {
            s.add(l);
            sn.add(n as f64 * l);
            cum_lambda.push(s.value());
            cum_n_lambda.push(sn.value());
        }
        Ok(Self {
            limit,
            odd_prime_bits,
            primes,
            powers,
            lambda,
            cum_lambda,
            cum_n_lambda,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Sorted prime powers n ≤ limit.
    pub fn prime_powers(&self) -> &[u32] {
        &self.powers
    }

    /// Λ(n) for each entry of [`Self::prime_powers`].
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// Number of prime powers ≤ x.
    pub fn count_powers_le(&self, x: f64) -> usize {
        if x < 2.0 {
            return 0;
        }
        let xi = x.floor().min(u32::MAX as f64) as u32;
        self.powers.partition_point(|&n| n <= xi)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= 2 {
            return n == 2;
        }
        if n % 2 == 0 || n > self.limit {
            return false;
        }
        let i = n / 2;
        self.odd_prime_bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x <= self.limit as f64) || x.is_nan() {
            return Err(Error::OutOfRange {
                arg: x,
                limit: self.limit,
            });
        }
        Ok(())
    }

    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                arg: n as f64,
                limit: self.limit,
            });
        }
        Ok(self.lambda_unchecked(n))
    }

    fn lambda_unchecked(&self, n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        if self.is_prime(n) {
            return (n as f64).ln();
        }
        // higher powers are sparse; binary search the sorted list
        match self.powers.binary_search(&(n as u32)) {
            Ok(i) => self.lambda[i],
            Err(_) => 0.0,
        }
    }

    /// ψ(x) or ψ(x; q, a).
    pub fn psi(&self, x: f64, progression: Option<(u64, u64)>) -> Result<PsiValue> {
        self.check_x(x)?;
        let value = match progression {
            None => self.psi_total(x),
            Some((q, a)) => {
                check_progression(q, a)?;
                self.class_sums(x, q, a).0
            }
        };
        Ok(PsiValue {
            x,
            progression,
            value,
            smoothed: false,
        })
    }

    /// ψ2(x) = Σ_{n≤x} Λ(n)(1 − n/x), optionally restricted to n ≡ a mod q.
    pub fn psi2(&self, x: f64, progression: Option<(u64, u64)>) -> Result<PsiValue> {
        self.check_x(x)?;
        let value = if x < 2.0 {
            0.0
        } else {
            match progression {
                None => {
                    let k = self.count_powers_le(x);
                    if k == 0 {
                        0.0
                    } else {
                        self.cum_lambda[k - 1] - self.cum_n_lambda[k - 1] / x
                    }
                }
                Some((q, a)) => {
                    check_progression(q, a)?;
                    let (s, sn) = self.class_sums(x, q, a);
                    s - sn / x
                }
            }
        };
        Ok(PsiValue {
            x,
            progression,
            value: value.max(0.0),
            smoothed: true,
        })
    }

    fn psi_total(&self, x: f64) -> f64 {
        let k = self.count_powers_le(x);
        if k == 0 {
            0.0
        } else {
            self.cum_lambda[k - 1]
        }
    }

    /// (Σ Λ(n), Σ nΛ(n)) over n ≤ x, n ≡ a mod q.
    fn class_sums(&self, x: f64, q: u64, a: u64) -> (f64, f64) {
        let mut s = CompensatedSum::new();
        let mut sn = CompensatedSum::new();
        for (n, l) in self.class_powers(x, q, a) {
            s.add(l);
            sn.add(n as f64 * l);
        }
        (s.value(), sn.value())
    }

    /// Prime powers n ≤ x with n ≡ a mod q, in increasing order, with Λ(n).
    pub fn class_powers(&self, x: f64, q: u64, a: u64) -> Vec<(u64, f64)> {
        if x < 2.0 {
            return Vec::new();
        }
        let k = self.count_powers_le(x);
        let a = a % q;
        // walking the progression beats scanning once q exceeds log x or so
        if q as f64 > 2.0 * x.ln().max(1.0) {
            let xi = x.floor() as u64;
            let mut out = Vec::new();
            let mut n = if a == 0 { q } else { a };
            while n <= xi {
                let l = self.lambda_unchecked(n);
                if l > 0.0 {
                    out.push((n, l));
                }
                n += q;
            }
            out
        } else {
            self.powers[..k]
                .iter()
                .zip(&self.lambda[..k])
                .filter(|(&n, _)| n as u64 % q == a)
                .map(|(&n, &l)| (n as u64, l))
                .collect()
        }
    }

    /// E(x, q, a) = ψ(x; q, a) − ψ(x)/φ(q).
    pub fn progression_error(&self, x: f64, q: u64, a: i64) -> Result<f64> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let r = a.rem_euclid(q as i64) as u64;
        if gcd(r, q) != 1 {
            return Err(Error::NotCoprime { a, q });
        }
        self.check_x(x)?;
        if q == 1 {
            return Ok(0.0);
        }
        let class = self.class_sums(x, q, r).0;
        Ok(class - self.psi_total(x) / totient(q) as f64)
    }

    /// ψ(x; q, a) for every a in 0..q from one pass over the prime powers.
    pub fn residue_buckets(&self, x: f64, q: u64) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let k = self.count_powers_le(x);
        let mut sums = vec![CompensatedSum::new(); q as usize];
        for (&n, &l) in self.powers[..k].iter().zip(&self.lambda[..k]) {
            sums[(n as u64 % q) as usize].add(l);
        }
        Ok(sums.into_iter().map(|s| s.value()).collect())
    }

    /// Smoothed analogue of [`Self::residue_buckets`]: Σ Λ(n)(1 − n/x) per class.
    pub fn residue_buckets_smoothed(&self, x: f64, q: u64) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let k = self.count_powers_le(x);
        let mut sums = vec![CompensatedSum::new(); q as usize];
        for (&n, &l) in self.powers[..k].iter().zip(&self.lambda[..k]) {
            sums[(n as u64 % q) as usize].add(l * (1.0 - n as f64 / x));
        }
        Ok(sums.into_iter().map(|s| s.value()).collect())
    }

    /// ω(n), number of distinct prime factors.
    pub fn omega(&self, n: u64) -> usize {
        crate::arith::omega(n)
    }

    /// τ(n), number of divisors.
    pub fn tau(&self, n: u64) -> u64 {
        crate::arith::num_divisors(n)
    }
}

fn check_progression(q: u64, a: u64) -> Result<()> {
    if q == 0 || a == 0 || a > q {
        return Err(Error::InvalidArgument(format!(
            "progression requires 1 ≤ a ≤ q, got a = {a}, q = {q}"
        )));
    }
    Ok(())
}

/// Odd-only primality bits for [lo, hi); lo is a multiple of 128.
fn sieve_segment(lo: u64, hi: u64, base: &[u32]) -> Vec<u64> {
    let words = ((hi - lo) / 128 + u64::from((hi - lo) % 128 != 0)) as usize;
    let mut bits = vec![u64::MAX; words];
    let bit_index = |n: u64| (n - lo) / 2;
    let clear = |bits: &mut Vec<u64>, n: u64| {
        let i = bit_index(n);
        bits[(i / 64) as usize] &= !(1u64 << (i % 64));
    };
    if lo == 0 {
        clear(&mut bits, 1);
    }
    for &p in base.iter().skip(1) {
        let p = p as u64;
        if p * p >= hi {
            break;
        }
        let mut start = (p * p).max(lo.div_ceil(p) * p);
        if start % 2 == 0 {
            start += p;
        }
        let mut n = start;
        while n < hi {
            clear(&mut bits, n);
            n += 2 * p;
        }
    }
    // mask numbers ≥ hi in the last word
    let valid = (hi - lo).div_ceil(2);
    let total = words as u64 * 64;
    for i in valid..total {
        bits[(i / 64) as usize] &= !(1u64 << (i % 64));
    }
    bits
}
