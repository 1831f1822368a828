//! p-adic order, absolute value, metric and digit expansions over exact rationals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the p-adic order of 0 is undefined")]
    OrdOfZero,
    #[error("a Cauchy profile needs at least two terms, got {0}")]
    TooShort(usize),
    #[error("high index {high} is below the lowest digit index {low}")]
    WindowBelowLow { high: i64, low: i64 },
}

/// A prime below 2^64, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(PadicError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_big(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn as_rational(self) -> Rational {
        Rational::from(self.0)
    }

    /// `p^exp` as an exact rational.
    pub fn pow(self, exp: i64) -> Rational {
        self.as_rational().pow(exp)
    }

    /// The next larger prime.
    pub fn next(self) -> Prime {
        let mut candidate = self.0 + 1;
        while !is_prime(candidate) {
            candidate += 1;
        }
        Prime(candidate)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = PadicError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let p = u64::deserialize(deserializer)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// If `n = p^k` for a prime `p` and `k >= 1`, returns `(p, k)`.
pub fn prime_power(n: u64) -> Option<(Prime, u32)> {
    if n < 2 {
        return None;
    }
    for k in (1..=63u32).rev() {
        let root = integer_root(n, k);
        if root >= 2 && root.checked_pow(k) == Some(n) && is_prime(root) {
            return Some((Prime(root), k));
        }
    }
    None
}

fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // Float estimate may be off by one either way.
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// Multiplicity of `p` in a nonzero integer.
fn multiplicity(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut count = 0;
    let mut rest = n.clone();
    loop {
        let (quot, rem) = rest.div_rem(p);
        if !rem.is_zero() {
            return count;
        }
        rest = quot;
        count += 1;
    }
}

/// `ord_p(x)`: multiplicity of `p` in the numerator minus that in the denominator.
pub fn ord(x: &Rational, p: Prime) -> Result<i64, PadicError> {
    if x.is_zero() {
        return Err(PadicError::OrdOfZero);
    }
    let pb = p.as_big();
    Ok(multiplicity(x.numer(), &pb) - multiplicity(x.denom(), &pb))
}

/// The value `|x|_p`, kept as a symbolic power of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PAdicAbs {
    Zero,
    Pow { p: Prime, exponent: i64 },
}

impl PAdicAbs {
    pub fn to_rational(self) -> Rational {
        match self {
            PAdicAbs::Zero => Rational::zero(),
            PAdicAbs::Pow { p, exponent } => p.pow(exponent),
        }
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            PAdicAbs::Zero => None,
            PAdicAbs::Pow { exponent, .. } => Some(exponent),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, PAdicAbs::Zero)
    }
}

impl std::ops::Mul for PAdicAbs {
    type Output = PAdicAbs;

    /// Panics when multiplying powers of different primes.
    fn mul(self, rhs: PAdicAbs) -> PAdicAbs {
        match (self, rhs) {
            (PAdicAbs::Zero, _) | (_, PAdicAbs::Zero) => PAdicAbs::Zero,
            (PAdicAbs::Pow { p, exponent: a }, PAdicAbs::Pow { p: q, exponent: b }) => {
                assert_eq!(p, q, "mixed primes in PAdicAbs product");
                PAdicAbs::Pow { p, exponent: a + b }
            }
        }
    }
}

impl PartialOrd for PAdicAbs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PAdicAbs {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PAdicAbs::Zero, PAdicAbs::Zero) => Ordering::Equal,
            (PAdicAbs::Zero, _) => Ordering::Less,
            (_, PAdicAbs::Zero) => Ordering::Greater,
            (PAdicAbs::Pow { p, exponent: a }, PAdicAbs::Pow { p: q, exponent: b }) if p == q => {
                a.cmp(b)
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl fmt::Display for PAdicAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

pub fn padic_abs(x: &Rational, p: Prime) -> PAdicAbs {
    match ord(x, p) {
        Err(_) => PAdicAbs::Zero,
        Ok(v) => PAdicAbs::Pow { p, exponent: -v },
    }
}

/// `d_p(x, y) = |x - y|_p` as an exact rational.
pub fn dp(x: &Rational, y: &Rational, p: Prime) -> Rational {
    padic_abs(&(x - y), p).to_rational()
}

/// Digits `d_low ..= d_high` of a p-adic expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitWindow {
    pub p: Prime,
    pub low: i64,
    pub digits: Vec<u64>,
}

impl DigitWindow {
    pub fn high(&self) -> i64 {
        self.low + self.digits.len() as i64 - 1
    }

    /// Digit at index `k`, or `None` outside the window.
    pub fn digit(&self, k: i64) -> Option<u64> {
        let offset = usize::try_from(k - self.low).ok()?;
        self.digits.get(offset).copied()
    }

    /// `sum d_k p^k` over the window.
    pub fn partial_sum(&self) -> Rational {
        self.digits
            .iter()
            .enumerate()
            .map(|(i, &d)| Rational::from(d) * self.p.pow(self.low + i as i64))
            .sum()
    }

    /// Most-significant-first digit string with a radix point when negative
    /// indices are present, leading zeros trimmed (`17` in base 3 is `"122"`).
    /// Only defined for `p <= 10`, where each digit is one character.
    pub fn positional(&self) -> Option<String> {
        if self.p.get() > 10 {
            return None;
        }
        let mut integral = String::new();
        let mut fractional = String::new();
        for k in (self.low..=self.high()).rev() {
            let d = self.digit(k).unwrap_or(0);
            let c = char::from_digit(d as u32, 10).expect("digit below 10");
            if k >= 0 {
                integral.push(c);
            } else {
                fractional.push(c);
            }
        }
        let trimmed = integral.trim_start_matches('0');
        let mut out = if trimmed.is_empty() {
            "0".to_string()
        } else {
            trimmed.to_string()
        };
        if !fractional.is_empty() {
            out.push('.');
            out.push_str(&fractional);
        }
        Some(out)
    }
}

fn mod_prime(n: &BigInt, p: Prime) -> u64 {
    n.mod_floor(&p.as_big())
        .to_u64()
        .expect("residue is below p")
}

/// Expansion digits of `x` from `min(0, ord_p x)` up to `high`.
///
/// The remainder after the window has p-adic absolute value at most
/// `p^-(high+1)`. Each step takes `numerator * denominator^-1 mod p`, then
/// divides `(y - d)` by `p`; the denominator stays prime to `p` throughout.
pub fn digits(x: &Rational, p: Prime, high: i64) -> Result<DigitWindow, PadicError> {
    let low = if x.is_zero() { 0 } else { ord(x, p)?.min(0) };
    if high < low {
        return Err(PadicError::WindowBelowLow { high, low });
    }
    let pr = p.as_rational();
    let mut y = x * p.pow(-low);
    let count = (high - low + 1) as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let b = mod_prime(y.denom(), p);
        debug_assert!(b != 0, "denominator must stay prime to p");
        let inv = pow_mod(b, p.get() - 2, p.get());
        let a = mod_prime(y.numer(), p);
        let d = mul_mod(a, inv, p.get());
        out.push(d);
        y = (y - Rational::from(d)) / &pr;
    }
    Ok(DigitWindow {
        p,
        low,
        digits: out,
    })
}

/// `|a_n - a_{n+1}|_p` for consecutive terms. Data only: no convergence verdict.
pub fn cauchy_profile(prefix: &[Rational], p: Prime) -> Result<Vec<Rational>, PadicError> {
    if prefix.len() < 2 {
        return Err(PadicError::TooShort(prefix.len()));
    }
    Ok(prefix.windows(2).map(|w| dp(&w[0], &w[1], p)).collect())
}
