//! Exact integer primitives and the finite-precision residue ring Z/p^N.
//!
//! Everything that certifies a congruence works over exact big integers;
//! [`Residue`] is only used inside the series engine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[cfg(test)]
use num_bigint::Sign;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Residues are held in a `u128`; keeping the modulus below 2^126 means a sum
/// of two reduced values never overflows.
const MODULUS_LIMIT: u128 = 1 << 126;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime together with the working coefficient precision N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    precision: u32,
    modulus: u128,
}

impl PadicContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let mut modulus: u128 = 1;
        for _ in 0..precision {
            modulus = modulus
                .checked_mul(p as u128)
                .filter(|m| *m < MODULUS_LIMIT)
                .ok_or(Error::ModulusTooLarge { p, precision })?;
        }
        Ok(Self {
            p,
            precision,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The coefficient precision N.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// p^N.
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// p^k for k ≤ N.
    pub fn p_pow(&self, k: u32) -> u128 {
        debug_assert!(k <= self.precision);
        (self.p as u128).pow(k)
    }

    pub fn residue(&self, x: i128) -> Residue {
        Residue {
            value: self.reduce_i128(x),
            ctx: *self,
        }
    }

    pub fn residue_big(&self, x: &BigInt) -> Residue {
        Residue {
            value: self.reduce_big(x),
            ctx: *self,
        }
    }

    pub(crate) fn reduce_i128(&self, x: i128) -> u128 {
        let m = self.modulus as i128;
        x.rem_euclid(m) as u128
    }

    pub(crate) fn reduce_big(&self, x: &BigInt) -> u128 {
        let m = BigInt::from(self.modulus);
        x.mod_floor(&m)
            .to_u128()
            .expect("reduced value is below the modulus")
    }

    #[inline]
    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        if self.modulus <= u64::MAX as u128 {
            return (a * b) % self.modulus;
        }
        // shift-and-add; only reached for moduli above 2^64
        let mut acc = 0u128;
        let mut base = a;
        let mut e = b;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit modulo p^N (extended Euclid over i128 is safe since
    /// the modulus is below 2^126).
    pub(crate) fn inverse(&self, a: u128) -> Option<u128> {
        if a.is_multiple_of(self.p as u128) {
            return None;
        }
        let (mut old_r, mut r) = (a as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Some(self.reduce_i128(old_s))
    }

    /// Valuation of a reduced value; zero maps to the "≥ N" sentinel.
    pub(crate) fn valuation_of(&self, value: u128) -> Valuation {
        if value == 0 {
            return Valuation::AtLeast(self.precision);
        }
        let p = self.p as u128;
        let mut v = 0;
        let mut x = value;
        while x.is_multiple_of(p) {
            x /= p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// `value mod p^k` for `k ≤ N`.
    pub(crate) fn truncate_to(&self, value: u128, k: u32) -> u128 {
        if k >= self.precision {
            value
        } else {
            value % self.p_pow(k)
        }
    }
}

/// An element of Z/p^N, stored as its canonical representative in [0, p^N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u128,
    ctx: PadicContext,
}

impl Residue {
    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn context(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn valuation(&self) -> Valuation {
        self.ctx.valuation_of(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.ctx.p as u128)
    }

    pub fn inverse(&self) -> Option<Residue> {
        self.ctx.inverse(self.value).map(|value| Residue {
            value,
            ctx: self.ctx,
        })
    }

    /// Representative in (-p^N/2, p^N/2].
    pub fn signed_value(&self) -> i128 {
        let m = self.ctx.modulus;
        if self.value > m / 2 {
            self.value as i128 - m as i128
        } else {
            self.value as i128
        }
    }

    pub(crate) fn from_raw(value: u128, ctx: PadicContext) -> Self {
        debug_assert!(value < ctx.modulus);
        Self { value, ctx }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.ctx, rhs.ctx, "residue context mismatch");
        Residue::from_raw(self.ctx.add(self.value, rhs.value), self.ctx)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        assert_eq!(self.ctx, rhs.ctx, "residue context mismatch");
        Residue::from_raw(self.ctx.sub(self.value, rhs.value), self.ctx)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.ctx, rhs.ctx, "residue context mismatch");
        Residue::from_raw(self.ctx.mul(self.value, rhs.value), self.ctx)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::from_raw(self.ctx.neg(self.value), self.ctx)
    }
}

/// A p-adic valuation: exact, known only to be at least a precision
/// threshold, or infinite (the exact integer zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
    Infinite,
}

impl Valuation {
    fn sort_key(&self) -> (u64, u8) {
        match *self {
            Valuation::Finite(k) => (k as u64, 0),
            Valuation::AtLeast(n) => (n as u64, 1),
            Valuation::Infinite => (u64::MAX, 2),
        }
    }

    /// Whether the valuation is certainly at least `bound`.
    pub fn certifies(&self, bound: u64) -> bool {
        match *self {
            Valuation::Finite(k) | Valuation::AtLeast(k) => k as u64 >= bound,
            Valuation::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match *self {
            Valuation::Finite(k) => Some(k),
            _ => None,
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::AtLeast(n) => write!(f, ">={n}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Valuation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Valuation::Infinite);
        }
        if let Some(rest) = s.strip_prefix(">=") {
            return rest
                .parse()
                .map(Valuation::AtLeast)
                .map_err(|_| Error::InvalidArgument(format!("bad valuation {s:?}")));
        }
        s.parse()
            .map(Valuation::Finite)
            .map_err(|_| Error::InvalidArgument(format!("bad valuation {s:?}")))
    }
}

// Finite valuations serialize as JSON numbers, the sentinels as strings.
impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Valuation::Finite(k) => serializer.serialize_u32(k),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(k) => Ok(Valuation::Finite(k)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The integer-part bracket used by every bound formula: `floor(num/den)` for
/// a non-negative numerator and `0` otherwise.
pub fn clamped_floor(numerator: i128, denominator: i128) -> Result<u64> {
    if denominator <= 0 {
        return Err(Error::InvalidArgument(format!(
            "clamped_floor denominator must be positive, got {denominator}"
        )));
    }
    Ok(bracket(numerator, denominator))
}

/// [`clamped_floor`] for callers whose denominator is positive by construction.
pub(crate) fn bracket(numerator: i128, denominator: i128) -> u64 {
    debug_assert!(denominator > 0);
    if numerator < 0 {
        0
    } else {
        (numerator / denominator) as u64
    }
}

pub fn ord_int(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigUint::from(p);
    let mut m = x.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Legendre's formula: the exponent of p in n!.
pub fn ord_factorial(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut m = n;
    while m > 0 {
        m /= p;
        total += m;
    }
    total
}

pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `m(m-1)...(m-j+1)/j!` for any integer m.
pub fn gen_binomial(m: i64, j: u64) -> BigInt {
    let mut numerator = BigInt::one();
    let mut factorial = BigInt::one();
    for i in 0..j {
        numerator *= BigInt::from(m) - BigInt::from(i);
        factorial *= i + 1;
    }
    let (q, r) = numerator.div_rem(&factorial);
    debug_assert!(r.is_zero());
    q
}

pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigInt> {
    let total: u128 = parts.iter().map(|&k| k as u128).sum();
    if total != n as u128 {
        return Err(Error::InvalidArgument(format!(
            "multinomial parts sum to {total}, expected {n}"
        )));
    }
    // product of successive binomials C(i_0 + ... + i_t, i_t)
    let mut acc = BigInt::one();
    let mut running = 0u64;
    for &k in parts {
        running += k;
        acc *= binomial(running, k as i64);
    }
    Ok(acc)
}
