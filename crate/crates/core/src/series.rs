//! Truncated Laurent series in π over Z/p^N.
//!
//! A series stores coefficients for exponents `low..high` together with a
//! per-exponent p-precision. Coefficients below `low` are exact zeros; the
//! coefficients at `high` and beyond are unknown.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::{binomial, PadicContext, Residue, Valuation};

/// Guaranteed p-precision for each π-exponent of a series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionProfile {
    low: i64,
    digits: Vec<u32>,
}

impl PrecisionProfile {
    pub fn new(low: i64, digits: Vec<u32>) -> Self {
        Self { low, digits }
    }

    pub fn exact(low: i64, len: usize, precision: u32) -> Self {
        Self {
            low,
            digits: vec![precision; len],
        }
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.digits.len() as i64
    }

    /// Precision at exponent `e`, or `None` outside the stored window.
    pub fn get(&self, e: i64) -> Option<u32> {
        if e < self.low {
            return None;
        }
        self.digits.get((e - self.low) as usize).copied()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .map(move |(i, &g)| (self.low + i as i64, g))
    }
}

/// Outcome of comparing two series coefficientwise within their shared
/// certified precision.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Agreement {
    /// Exponents where both sides carry at least one certified p-adic digit.
    pub compared: usize,
    pub mismatches: Vec<i64>,
}

impl Agreement {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    ctx: PadicContext,
    low: i64,
    coeffs: Vec<u128>,
    profile: PrecisionProfile,
}

impl LaurentSeries {
    /// Builds a series from raw coefficients and a matching precision vector,
    /// then brings it to canonical form.
    pub(crate) fn from_parts(
        ctx: PadicContext,
        low: i64,
        coeffs: Vec<u128>,
        digits: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), digits.len());
        debug_assert!(!coeffs.is_empty());
        let mut s = Self {
            ctx,
            low,
            coeffs,
            profile: PrecisionProfile::new(low, digits),
        };
        s.canonicalize();
        s
    }

    pub(crate) fn exact(ctx: PadicContext, low: i64, coeffs: Vec<u128>) -> Self {
        let n = coeffs.len();
        Self::from_parts(ctx, low, coeffs, vec![ctx.precision(); n])
    }

    fn canonicalize(&mut self) {
        let n = self.ctx.precision();
        for (c, g) in self.coeffs.iter_mut().zip(self.profile.digits.iter_mut()) {
            *g = (*g).min(n);
            *c = self.ctx.truncate_to(*c, *g);
        }
        let mut strip = 0;
        let stop = (self.coeffs.len() - 1).min((-self.low).max(0) as usize);
        while strip < stop && self.coeffs[strip] == 0 && self.profile.digits[strip] == n {
            strip += 1;
        }
        if strip > 0 {
            self.coeffs.drain(..strip);
            self.profile.digits.drain(..strip);
            self.low += strip as i64;
            self.profile.low = self.low;
        }
    }

    pub fn from_monomials(terms: &[(i64, i128)], ctx: &PadicContext, high: i64) -> Result<Self> {
        if let Some(&(e, _)) = terms.iter().find(|(e, _)| *e >= high) {
            return Err(Error::ExponentOutOfRange {
                exponent: e,
                precision: high,
            });
        }
        let low = terms.iter().map(|t| t.0).min().unwrap_or(0).min(high - 1);
        let mut coeffs = vec![0u128; (high - low) as usize];
        for &(e, c) in terms {
            let slot = &mut coeffs[(e - low) as usize];
            *slot = ctx.add(*slot, ctx.reduce_i128(c));
        }
        Ok(Self::exact(*ctx, low, coeffs))
    }

    pub fn from_residues(low: i64, coeffs: &[Residue], ctx: &PadicContext) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        }
        if coeffs.iter().any(|c| c.context() != ctx) {
            return Err(Error::InvalidArgument("residue context differs".into()));
        }
        Ok(Self::exact(
            *ctx,
            low,
            coeffs.iter().map(Residue::value).collect(),
        ))
    }

    pub fn zero(ctx: &PadicContext, high: i64) -> Self {
        let low = 0.min(high - 1);
        Self::exact(*ctx, low, vec![0; (high - low) as usize])
    }

    pub fn one(ctx: &PadicContext, high: i64) -> Result<Self> {
        Self::from_monomials(&[(0, 1)], ctx, high)
    }

    pub fn context(&self) -> &PadicContext {
        &self.ctx
    }

    /// Lowest stored exponent L.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Exclusive π-precision M.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    pub fn profile(&self) -> &PrecisionProfile {
        &self.profile
    }

    /// Coefficient of π^e; zero below `low`, `None` at or beyond `high`.
    pub fn coeff(&self, e: i64) -> Option<Residue> {
        self.raw(e).map(|v| Residue::from_raw(v, self.ctx))
    }

    pub(crate) fn raw(&self, e: i64) -> Option<u128> {
        if e < self.low {
            Some(0)
        } else {
            self.coeffs.get((e - self.low) as usize).copied()
        }
    }

    /// Certified p-precision at exponent e: N below `low`, 0 at or beyond `high`.
    pub fn precision_at(&self, e: i64) -> u32 {
        if e < self.low {
            self.ctx.precision()
        } else {
            self.profile.get(e).unwrap_or(0)
        }
    }

    /// Valuation of the coefficient of π^e as far as it is certified.
    pub fn valuation_at(&self, e: i64) -> Valuation {
        let g = self.precision_at(e);
        match self.raw(e) {
            Some(v) if v != 0 => self.ctx.valuation_of(v),
            _ => Valuation::AtLeast(g),
        }
    }

    pub fn is_exact(&self) -> bool {
        let n = self.ctx.precision();
        self.profile.digits.iter().all(|&g| g == n)
    }

    /// Lowest exponent with a nonzero stored coefficient.
    pub fn order(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|&c| c != 0)
            .map(|i| self.low + i as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Residue, u32)> + '_ {
        self.coeffs
            .iter()
            .zip(&self.profile.digits)
            .enumerate()
            .map(move |(i, (&c, &g))| (self.low + i as i64, Residue::from_raw(c, self.ctx), g))
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch {
                left_p: self.ctx.p(),
                left_n: self.ctx.precision(),
                right_p: other.ctx.p(),
                right_n: other.ctx.precision(),
            });
        }
        Ok(())
    }

    /// Restricts the series to exponents below `high` (no-op if already lower).
    pub fn truncate(&self, high: i64) -> Self {
        if high >= self.high() || high <= self.low {
            return self.clone();
        }
        let keep = (high - self.low) as usize;
        Self::from_parts(
            self.ctx,
            self.low,
            self.coeffs[..keep].to_vec(),
            self.profile.digits[..keep].to_vec(),
        )
    }

    /// Multiplication by π^k.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_parts(
            self.ctx,
            self.low + k,
            self.coeffs.clone(),
            self.profile.digits.clone(),
        )
    }

    pub fn scale(&self, c: i128) -> Self {
        let c = self.ctx.reduce_i128(c);
        Self::from_parts(
            self.ctx,
            self.low,
            self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect(),
            self.profile.digits.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(
            self.ctx,
            self.low,
            self.coeffs.iter().map(|&x| self.ctx.neg(x)).collect(),
            self.profile.digits.clone(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        self.check_ctx(other)?;
        let low = self.low.min(other.low);
        let high = self.high().min(other.high());
        if high <= low {
            return Err(Error::PrecisionTooLow {
                need: low + 1,
                have: high,
            });
        }
        let mut coeffs = Vec::with_capacity((high - low) as usize);
        let mut digits = Vec::with_capacity((high - low) as usize);
        for e in low..high {
            let (a, b) = (self.raw(e).unwrap(), other.raw(e).unwrap());
            coeffs.push(if subtract {
                self.ctx.sub(a, b)
            } else {
                self.ctx.add(a, b)
            });
            digits.push(self.precision_at(e).min(other.precision_at(e)));
        }
        Ok(Self::from_parts(self.ctx, low, coeffs, digits))
    }

    /// Product; the result is known below `min(M_x + L_y, M_y + L_x)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let low = self.low + other.low;
        let high = (self.high() + other.low).min(other.high() + self.low);
        let len = (high - low) as usize;
        let ctx = &self.ctx;
        let mut coeffs = vec![0u128; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = ctx.add(coeffs[i + j], ctx.mul(a, b));
            }
        }
        let digits = if self.is_exact() && other.is_exact() {
            vec![ctx.precision(); len]
        } else {
            let mut digits = vec![ctx.precision(); len];
            for (i, &ga) in self.profile.digits.iter().enumerate().take(len) {
                for (j, &gb) in other.profile.digits.iter().enumerate().take(len - i) {
                    let slot = &mut digits[i + j];
                    *slot = (*slot).min(ga.min(gb));
                }
            }
            digits
        };
        Ok(Self::from_parts(*ctx, low, coeffs, digits))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 {
            self.invert_unit()?
        } else {
            self.clone()
        };
        let mut acc = Self::one(&self.ctx, base.high().max(1))?;
        let mut e = k.unsigned_abs();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// (1+π)^m truncated at π^M.
    pub fn epsilon_power(m: i64, ctx: &PadicContext, high: i64) -> Result<Self> {
        if high < 1 {
            return Err(Error::InvalidArgument(format!(
                "pi-precision must be positive, got {high}"
            )));
        }
        let len = high as usize;
        let mut coeffs = vec![0u128; len];
        coeffs[0] = 1;
        if m >= 0 {
            // Pascal row m, truncated
            let mut row = vec![0u128; len];
            row[0] = 1;
            for _ in 0..m {
                for i in (1..len).rev() {
                    row[i] = ctx.add(row[i], row[i - 1]);
                }
            }
            coeffs = row;
        } else {
            // divide by (1+π) |m| times: y_i = x_i - y_{i-1}
            for _ in 0..m.unsigned_abs() {
                for i in 1..len {
                    coeffs[i] = ctx.sub(coeffs[i], coeffs[i - 1]);
                }
            }
        }
        Ok(Self::exact(*ctx, 0, coeffs))
    }

    /// Coefficients in the basis [ε]^m = (1+π)^m, m = 0..M-1.
    pub fn pi_to_epsilon(&self) -> Result<Vec<Residue>> {
        if self.low < 0 {
            return Err(Error::InvalidArgument(
                "negative exponents have no finite [eps]-expansion".into(),
            ));
        }
        let poly = self.nonnegative_part();
        Ok(pi_to_epsilon_raw(&self.ctx, &poly)
            .into_iter()
            .map(|v| Residue::from_raw(v, self.ctx))
            .collect())
    }

    /// Σ c_m (1+π)^m truncated at π^M.
    pub fn epsilon_to_pi(c: &[Residue], ctx: &PadicContext, high: i64) -> Result<Self> {
        if high < 1 {
            return Err(Error::InvalidArgument(format!(
                "pi-precision must be positive, got {high}"
            )));
        }
        if c.iter().any(|r| r.context() != ctx) {
            return Err(Error::InvalidArgument("residue context differs".into()));
        }
        let raw: Vec<u128> = c.iter().map(Residue::value).collect();
        Ok(Self::exact(
            *ctx,
            0,
            epsilon_to_pi_raw(ctx, &raw, high as usize),
        ))
    }

    /// Coefficients for exponents 0..M (zeros below `low` included).
    pub(crate) fn nonnegative_part(&self) -> Vec<u128> {
        let high = self.high().max(0);
        (0..high).map(|e| self.raw(e).unwrap()).collect()
    }

    /// The Frobenius substitution π ↦ (1+π)^p − 1.
    pub fn frobenius(&self) -> Self {
        let ctx = &self.ctx;
        let p = ctx.p() as i64;
        let n = ctx.precision();
        let high = self.high();

        // (1+π)^p - 1
        let phi_pi: Vec<u128> = (0..=p)
            .map(|i| {
                if i == 0 {
                    0
                } else {
                    ctx.reduce_big(&binomial(p as u64, i))
                }
            })
            .collect();

        // nonnegative part by Horner in φ(π)
        let mut positive: Vec<u128> = vec![0];
        for e in (0..high.max(0)).rev() {
            positive = poly_mul(ctx, &positive, &phi_pi);
            positive[0] = ctx.add(positive[0], self.raw(e).unwrap());
        }
        trim(&mut positive);

        // negative part, as a polynomial in u = 1/π; φ(1/π) = u^p W(u)
        let mut negative: Vec<u128> = vec![0];
        if self.low < 0 {
            let w = frobenius_inverse_unit(ctx);
            let mut step = vec![0u128; p as usize];
            step.extend_from_slice(&w);
            // Horner from the lowest exponent: acc = (acc + b_e)·u^p W
            for e in self.low..0 {
                negative[0] = ctx.add(negative[0], self.raw(e).unwrap());
                negative = poly_mul(ctx, &negative, &step);
                trim(&mut negative);
            }
        }

        let low_out = -(negative.len() as i64 - 1).max(0);
        let high_out = high * p;
        let len = (high_out - low_out) as usize;
        let mut coeffs = vec![0u128; len];
        for (d, &c) in negative.iter().enumerate().skip(1) {
            let e = -(d as i64);
            coeffs[(e - low_out) as usize] = c;
        }
        for (e, &c) in positive.iter().enumerate() {
            let idx = e as i64 - low_out;
            if (idx as usize) < len {
                coeffs[idx as usize] = ctx.add(coeffs[idx as usize], c);
            }
        }

        let mut digits = vec![n; len];
        let pm1 = p - 1;
        for (idx, slot) in digits.iter_mut().enumerate() {
            let e = low_out + idx as i64;
            let tail = frobenius_tail_precision(high, e, p);
            *slot = (*slot).min(tail.min(n as i64) as u32);
        }
        for (i, g) in self.profile.iter() {
            if g >= n {
                continue;
            }
            for (idx, slot) in digits.iter_mut().enumerate() {
                let e = low_out + idx as i64;
                let gain = if i >= 0 {
                    if e < i || e > i * p {
                        continue;
                    }
                    (i - (e - i).div_euclid(pm1)).max(0)
                } else {
                    if e > i * p {
                        continue;
                    }
                    ceil_div(i * p - e, pm1)
                };
                *slot = (*slot).min((g as i64 + gain).min(n as i64) as u32);
            }
        }
        Self::from_parts(*ctx, low_out, coeffs, digits)
    }

    /// Inverse of π^v·u with u(0) a p-adic unit, v the order of the series.
    pub fn invert_unit(&self) -> Result<Self> {
        let ctx = &self.ctx;
        let start = self
            .coeffs
            .iter()
            .position(|&c| c != 0)
            .ok_or(Error::NonInvertible)?;
        let u = &self.coeffs[start..];
        let lead_inv = ctx.inverse(u[0]).ok_or(Error::NonInvertible)?;
        let order = self.low + start as i64;
        let len = u.len();
        let mut y = vec![0u128; len];
        y[0] = lead_inv;
        for k in 1..len {
            let mut acc = 0u128;
            for i in 1..=k {
                acc = ctx.add(acc, ctx.mul(u[i], y[k - i]));
            }
            y[k] = ctx.neg(ctx.mul(lead_inv, acc));
        }
        let mut digits = Vec::with_capacity(len);
        let mut running = self.profile.digits[..=start].iter().copied().min().unwrap();
        for &g in &self.profile.digits[start..] {
            running = running.min(g);
            digits.push(running);
        }
        Ok(Self::from_parts(*ctx, -order, y, digits))
    }

    /// The ψ-fixed element a/((1+π)^a − 1) − 1/π of A⁺.
    pub fn cyclotomic_element(a: u64, ctx: &PadicContext, high: i64) -> Result<Self> {
        if a == 0 || a.gcd(&ctx.p()) != 1 {
            return Err(Error::InvalidArgument(format!(
                "a = {a} must be a positive integer coprime to p = {}",
                ctx.p()
            )));
        }
        if high < 1 {
            return Err(Error::InvalidArgument(format!(
                "pi-precision must be positive, got {high}"
            )));
        }
        // (1+π)^a − 1 = π·R, and a/(πR) − 1/π = (a − R)/(πR) = −T/R
        // with T = Σ_{i≥2} C(a,i) π^{i−2}.
        let len = high as usize;
        let mut r = vec![0u128; len];
        let mut t = vec![0u128; len];
        for i in 1..=a as usize {
            if i > len {
                break;
            }
            let c = ctx.reduce_big(&binomial(a, i as i64));
            r[i - 1] = c;
            if i >= 2 {
                t[i - 2] = ctx.neg(c);
            }
        }
        let r = Self::exact(*ctx, 0, r);
        Self::exact(*ctx, 0, t).mul(&r.invert_unit()?)
    }

    /// Coefficientwise comparison modulo the smaller of the two certified
    /// precisions, over the exponents both sides know.
    pub fn certified_agreement(&self, other: &Self) -> Result<Agreement> {
        self.check_ctx(other)?;
        let low = self.low.min(other.low);
        let high = self.high().min(other.high());
        let mut out = Agreement::default();
        for e in low..high {
            let g = self.precision_at(e).min(other.precision_at(e));
            if g == 0 {
                continue;
            }
            out.compared += 1;
            let a = self.ctx.truncate_to(self.raw(e).unwrap(), g);
            let b = self.ctx.truncate_to(other.raw(e).unwrap(), g);
            if a != b {
                out.mismatches.push(e);
            }
        }
        Ok(out)
    }

    pub fn render_profile(&self) -> String {
        let parts: Vec<String> = self
            .profile
            .iter()
            .map(|(e, g)| format!("{e}:{g}"))
            .collect();
        parts.join(" ")
    }
}

impl fmt::Display for LaurentSeries {
    /// `c_L*pi^L + ... + O(pi^M)`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c, _) in self.iter() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let v = c.value();
            match (e, v) {
                (0, _) => write!(f, "{v}")?,
                (1, 1) => f.write_str("pi")?,
                (1, _) => write!(f, "{v}*pi")?,
                (_, 1) => write!(f, "pi^{e}")?,
                _ => write!(f, "{v}*pi^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(pi^{})", self.high())
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// Certified precision at exponent e of φ(π^M·A⁺).
fn frobenius_tail_precision(high: i64, e: i64, p: i64) -> i64 {
    let pm1 = p - 1;
    if high >= 0 {
        // φ(π)^M ∈ Σ_k p^k π^{M + (M−k)(p−1)} A⁺
        if e < high {
            i64::MAX
        } else {
            (high - (e - high).div_euclid(pm1)).max(0)
        }
    } else if e >= high * p {
        0
    } else {
        ceil_div(high * p - e, pm1)
    }
}

/// W(u) with φ(π)^{-1} = u^p·W(u), u = 1/π: the inverse of
/// 1 + Σ_{d=1}^{p−1} C(p, p−d) u^d, which is a polynomial modulo p^N.
fn frobenius_inverse_unit(ctx: &PadicContext) -> Vec<u128> {
    let p = ctx.p() as usize;
    let deg = (ctx.precision() as usize - 1) * (p - 1);
    let v: Vec<u128> = (0..p)
        .map(|d| ctx.reduce_big(&binomial(p as u64, (p - d) as i64)))
        .collect();
    let mut w = vec![0u128; deg + 1];
    w[0] = 1;
    for k in 1..=deg {
        let mut acc = 0u128;
        for d in 1..p.min(k + 1) {
            acc = ctx.add(acc, ctx.mul(v[d], w[k - d]));
        }
        w[k] = ctx.neg(acc);
    }
    trim(&mut w);
    w
}

pub(crate) fn trim(poly: &mut Vec<u128>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

pub(crate) fn poly_mul(ctx: &PadicContext, a: &[u128], b: &[u128]) -> Vec<u128> {
    if a.is_empty() || b.is_empty() {
        return vec![0];
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
        }
    }
    out
}

/// π^k = Σ_m (−1)^{k−m} C(k,m) [ε]^m applied to a coefficient vector.
pub(crate) fn pi_to_epsilon_raw(ctx: &PadicContext, b: &[u128]) -> Vec<u128> {
    let len = b.len();
    let mut out = vec![0u128; len];
    let mut row = vec![0u128; len];
    for (k, &bk) in b.iter().enumerate() {
        // advance Pascal row to k
        if k == 0 {
            row[0] = 1;
        } else {
            for i in (1..=k).rev() {
                row[i] = ctx.add(row[i], row[i - 1]);
            }
        }
        if bk == 0 {
            continue;
        }
        for m in 0..=k {
            let term = ctx.mul(bk, row[m]);
            out[m] = if (k - m) % 2 == 0 {
                ctx.add(out[m], term)
            } else {
                ctx.sub(out[m], term)
            };
        }
    }
    out
}

/// [ε]^m = Σ_j C(m,j) π^j, truncated to `len` π-coefficients.
pub(crate) fn epsilon_to_pi_raw(ctx: &PadicContext, c: &[u128], len: usize) -> Vec<u128> {
    let mut out = vec![0u128; len];
    let mut row = vec![0u128; len];
    for (m, &cm) in c.iter().enumerate() {
        if m == 0 {
            row[0] = 1;
        } else {
            for i in (1..len.min(m + 1)).rev() {
                row[i] = ctx.add(row[i], row[i - 1]);
            }
        }
        if cm == 0 {
            continue;
        }
        for j in 0..len.min(m + 1) {
            out[j] = ctx.add(out[j], ctx.mul(cm, row[j]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u64, n: u32) -> PadicContext {
        PadicContext::new(p, n).unwrap()
    }

    fn mono(terms: &[(i64, i128)], c: &PadicContext, m: i64) -> LaurentSeries {
        LaurentSeries::from_monomials(terms, c, m).unwrap()
    }

    fn same(a: &LaurentSeries, b: &LaurentSeries) -> bool {
        let agreement = a.certified_agreement(b).unwrap();
        agreement.compared > 0 && agreement.holds()
    }

    fn residues(c: &PadicContext, xs: &[i128]) -> Vec<Residue> {
        xs.iter().map(|&x| c.residue(x)).collect()
    }

    #[test]
    fn monomials() {
        let c = ctx(3, 4);
        let one = mono(&[(0, 1)], &c, 5);
        assert_eq!(one.to_string(), "1 + O(pi^5)");
        assert_eq!(mono(&[(1, 1)], &c, 5).to_string(), "pi + O(pi^5)");
        let inv = mono(&[(-1, 1)], &c, 5);
        assert_eq!(inv.low(), -1);
        assert_eq!(inv.to_string(), "pi^-1 + O(pi^5)");
        assert!(matches!(
            LaurentSeries::from_monomials(&[(5, 1)], &c, 5),
            Err(Error::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn canonical_form_strips_negative_zeros() {
        let c = ctx(2, 4);
        let s = mono(&[(-3, 16), (-1, 1), (2, 1)], &c, 6);
        assert_eq!(s.low(), -1);
        let t = mono(&[(-2, 16), (3, 1)], &c, 6);
        assert_eq!(t.low(), 0);
    }

    #[test]
    fn ring_examples() {
        let c = ctx(5, 6);
        let pi = mono(&[(1, 1)], &c, 10);
        let sum = pi.add(&pi.neg()).unwrap();
        assert!(sum.iter().all(|(_, r, _)| r.is_zero()));
        let prod = pi.mul(&mono(&[(-1, 1)], &c, 10)).unwrap();
        assert!(same(&prod, &mono(&[(0, 1)], &c, 10)));
        assert_eq!(prod.high(), 9);
        let x = mono(&[(0, 1), (1, 1)], &c, 10);
        assert!(same(
            &x.mul(&x).unwrap(),
            &mono(&[(0, 1), (1, 2), (2, 1)], &c, 10)
        ));
    }

    #[test]
    fn context_mismatch() {
        let a = mono(&[(0, 1)], &ctx(2, 4), 5);
        let b = mono(&[(0, 1)], &ctx(3, 4), 5);
        assert!(matches!(a.add(&b), Err(Error::ContextMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn epsilon_power_examples() {
        let c = ctx(7, 5);
        let sq = LaurentSeries::epsilon_power(2, &c, 6).unwrap();
        assert!(same(&sq, &mono(&[(0, 1), (1, 2), (2, 1)], &c, 6)));
        assert!(same(
            &LaurentSeries::epsilon_power(0, &c, 6).unwrap(),
            &mono(&[(0, 1)], &c, 6)
        ));
        let inv = LaurentSeries::epsilon_power(-1, &c, 12).unwrap();
        for (e, r, _) in inv.iter() {
            assert_eq!(r.signed_value(), if e % 2 == 0 { 1 } else { -1 });
        }
        let check = inv
            .mul(&LaurentSeries::epsilon_power(1, &c, 12).unwrap())
            .unwrap();
        assert!(same(&check, &mono(&[(0, 1)], &c, 12)));
    }

    #[test]
    fn epsilon_power_inverse_pairs() {
        for p in [2u64, 3, 5] {
            let c = ctx(p, 10);
            let one = mono(&[(0, 1)], &c, 30);
            for m in 0..=20i64 {
                let a = LaurentSeries::epsilon_power(m, &c, 30).unwrap();
                let b = LaurentSeries::epsilon_power(-m, &c, 30).unwrap();
                assert!(same(&a.mul(&b).unwrap(), &one), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn basis_change_examples() {
        let c = ctx(3, 6);
        let values = |x: &LaurentSeries| -> Vec<i128> {
            x.pi_to_epsilon()
                .unwrap()
                .iter()
                .map(Residue::signed_value)
                .collect()
        };
        assert_eq!(&values(&mono(&[(2, 1)], &c, 4))[..3], &[1, -2, 1]);
        assert_eq!(values(&mono(&[(0, 1)], &c, 3)), vec![1, 0, 0]);
        assert_eq!(values(&mono(&[(1, 1)], &c, 3)), vec![-1, 1, 0]);
        assert!(mono(&[(-1, 1)], &c, 3).pi_to_epsilon().is_err());

        let x = LaurentSeries::epsilon_to_pi(&residues(&c, &[0, 1]), &c, 4).unwrap();
        assert!(same(&x, &mono(&[(0, 1), (1, 1)], &c, 4)));
        let y = LaurentSeries::epsilon_to_pi(&residues(&c, &[1, 1, 1]), &c, 4).unwrap();
        assert!(same(&y, &mono(&[(0, 3), (1, 3), (2, 1)], &c, 4)));
    }

    #[test]
    fn frobenius_examples() {
        let c = ctx(2, 8);
        let pi = mono(&[(1, 1)], &c, 8);
        assert!(same(&pi.frobenius(), &mono(&[(1, 2), (2, 1)], &c, 16)));
        let one = mono(&[(0, 1)], &c, 8);
        assert!(same(&one.frobenius(), &one));
        let pi2 = mono(&[(2, 1)], &c, 8);
        assert!(same(
            &pi2.frobenius(),
            &mono(&[(2, 4), (3, 4), (4, 1)], &c, 16)
        ));
    }

    #[test]
    fn frobenius_factorization() {
        for p in [2u64, 3, 5, 7] {
            let c = ctx(p, 8);
            let pi = mono(&[(1, 1)], &c, 20);
            let mut sum = LaurentSeries::zero(&c, 20);
            for i in 0..p as i64 {
                sum = sum
                    .add(&LaurentSeries::epsilon_power(i, &c, 20).unwrap())
                    .unwrap();
            }
            assert!(same(&pi.frobenius(), &pi.mul(&sum).unwrap()), "p={p}");
        }
    }

    #[test]
    fn frobenius_of_pole_inverts_frobenius_of_pi() {
        for p in [2u64, 3, 5] {
            let c = ctx(p, 6);
            let pi = mono(&[(1, 1)], &c, 12);
            let inv = mono(&[(-1, 1)], &c, 12);
            let prod = pi.frobenius().mul(&inv.frobenius()).unwrap();
            assert!(same(&prod, &mono(&[(0, 1)], &c, 12)), "p={p}: {prod}");
        }
    }

    #[test]
    fn invert_unit_examples() {
        let c = ctx(3, 6);
        let x = mono(&[(0, 1), (1, 1)], &c, 10);
        let inv = x.invert_unit().unwrap();
        assert!(same(
            &inv,
            &LaurentSeries::epsilon_power(-1, &c, 10).unwrap()
        ));
        let pi = mono(&[(1, 1)], &c, 10);
        assert!(same(&pi.invert_unit().unwrap(), &mono(&[(-1, 1)], &c, 10)));
        let y = mono(&[(0, 2), (1, 1)], &c, 10);
        let prod = y.mul(&y.invert_unit().unwrap()).unwrap();
        assert!(same(&prod, &mono(&[(0, 1)], &c, 10)));
        assert_eq!(
            mono(&[(0, 3), (1, 1)], &c, 10).invert_unit(),
            Err(Error::NonInvertible)
        );
        assert_eq!(
            LaurentSeries::zero(&c, 10).invert_unit(),
            Err(Error::NonInvertible)
        );
    }

    #[test]
    fn cyclotomic_examples() {
        let c = ctx(3, 8);
        let zero = LaurentSeries::cyclotomic_element(1, &c, 20).unwrap();
        assert!(zero.iter().all(|(_, r, _)| r.is_zero()));
        let two = LaurentSeries::cyclotomic_element(2, &c, 20).unwrap();
        let expected = mono(&[(0, 2), (1, 1)], &c, 20).invert_unit().unwrap().neg();
        assert!(same(&two, &expected));
        for a in [1u64, 2, 4, 5, 7, 8] {
            assert!(LaurentSeries::cyclotomic_element(a, &c, 20).unwrap().low() >= 0);
        }
        assert!(LaurentSeries::cyclotomic_element(3, &c, 20).is_err());
        assert!(LaurentSeries::cyclotomic_element(0, &c, 20).is_err());
    }

    #[test]
    fn truncated_profile_flows_through_mul() {
        let c = ctx(5, 6);
        let lossy = LaurentSeries::from_parts(c, 0, vec![1, 2, 3], vec![6, 2, 6]);
        let prod = lossy.mul(&mono(&[(0, 1), (1, 1)], &c, 3)).unwrap();
        assert_eq!(prod.profile().digits(), &[6, 2, 2]);
        assert_eq!(lossy.coeff(1).unwrap().value(), 2);
        assert_eq!(lossy.precision_at(7), 0);
        assert_eq!(lossy.precision_at(-3), 6);
    }

    fn arb_series(p: u64, n: u32, m: i64) -> impl Strategy<Value = LaurentSeries> {
        let c = ctx(p, n);
        (proptest::collection::vec(any::<u64>(), m as usize)).prop_map(move |v| {
            let coeffs = v.iter().map(|&x| x as u128 % c.modulus()).collect();
            LaurentSeries::exact(c, 0, coeffs)
        })
    }

    fn triple() -> impl Strategy<Value = (LaurentSeries, LaurentSeries, LaurentSeries)> {
        prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| {
            (
                arb_series(p, 12, 24),
                arb_series(p, 12, 24),
                arb_series(p, 12, 24),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws((x, y, z) in triple()) {
            prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(
                x.add(&y).unwrap().add(&z).unwrap(),
                x.add(&y.add(&z).unwrap()).unwrap()
            );
            prop_assert_eq!(
                x.mul(&y).unwrap().mul(&z).unwrap(),
                x.mul(&y.mul(&z).unwrap()).unwrap()
            );
            prop_assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
        }

        #[test]
        fn frobenius_is_a_ring_homomorphism((x, y, _z) in triple()) {
            let sum = x.add(&y).unwrap().frobenius();
            prop_assert!(same(&sum, &x.frobenius().add(&y.frobenius()).unwrap()));
            let prod = x.mul(&y).unwrap().frobenius();
            prop_assert!(same(&prod, &x.frobenius().mul(&y.frobenius()).unwrap()));
        }

        #[test]
        fn basis_round_trip((x, _y, _z) in triple()) {
            let eps = x.pi_to_epsilon().unwrap();
            let back = LaurentSeries::epsilon_to_pi(&eps, x.context(), x.high()).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
