//! Exact evaluation of the alternating binomial sums and multinomial sums,
//! their valuation bounds, and sweep certification.
//!
//! All sums are exact big integers, so every reported valuation is
//! unconditional.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{binomial, bracket, gen_binomial, multinomial, ord_factorial, ord_int};
use crate::padic::{PadicContext, Valuation};
use crate::psi::{estimate_exponent_i, estimate_exponent_ii, psi_iterate};
use crate::series::LaurentSeries;

/// Default cap on the number of compositions the literal enumeration visits.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

fn modulus_q(p: u64, a: u32) -> i64 {
    (p as i64).checked_pow(a).expect("p^a must fit in 64 bits")
}

/// Σ_{0≤k≤n, k≡r (mod p^a)} (−1)^{n−k} C(n,k) C((k−r)/p^a, j).
pub fn fleck_sum(n: u64, r: i64, j: u64, p: u64, a: u32) -> BigInt {
    let q = modulus_q(p, a);
    let first = r.rem_euclid(q) as u64;
    let mut total = BigInt::zero();
    for k in (first..=n).step_by(q as usize) {
        let upper = (k as i64 - r) / q;
        let term = binomial(n, k as i64) * gen_binomial(upper, j);
        if (n - k).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Coefficients of (1 + T + ... + T^{q−1})^n, degrees 0..=n(q−1).
pub fn multinomial_coefficients(n: u64, q: u64) -> Vec<BigInt> {
    let q = q as usize;
    let mut coeffs = vec![BigInt::from(1)];
    for _ in 0..n {
        // multiply by 1 + T + ... + T^{q-1} through a sliding window sum
        let mut next = vec![BigInt::zero(); coeffs.len() + q - 1];
        let mut window = BigInt::zero();
        for (d, slot) in next.iter_mut().enumerate() {
            if d < coeffs.len() {
                window += &coeffs[d];
            }
            if d >= q {
                window -= &coeffs[d - q];
            }
            *slot = window.clone();
        }
        coeffs = next;
    }
    coeffs
}

fn weighted_sum(coeffs: &[BigInt], r: i64, j: u64, q: i64) -> BigInt {
    let first = r.rem_euclid(q) as usize;
    coeffs
        .iter()
        .enumerate()
        .skip(first)
        .step_by(q as usize)
        .map(|(m, c)| c * gen_binomial((m as i64 - r) / q, j))
        .sum()
}

/// S_j(n, r, p^a) through the generating function (Σ_{i<q} T^i)^n.
pub fn multinomial_sum(n: u64, r: i64, j: u64, p: u64, a: u32) -> BigInt {
    let q = modulus_q(p, a);
    weighted_sum(&multinomial_coefficients(n, q as u64), r, j, q)
}

/// S_j(n, r, p^a) by enumerating every composition i_0 + ... + i_{q−1} = n.
pub fn multinomial_sum_bruteforce(n: u64, r: i64, j: u64, p: u64, a: u32) -> Result<BigInt> {
    multinomial_sum_bruteforce_guarded(n, r, j, p, a, ENUMERATION_GUARD)
}

pub fn multinomial_sum_bruteforce_guarded(
    n: u64,
    r: i64,
    j: u64,
    p: u64,
    a: u32,
    guard: u64,
) -> Result<BigInt> {
    let q = modulus_q(p, a);
    let count = binomial(n + q as u64 - 1, q - 1);
    if count > BigInt::from(guard) {
        return Err(Error::EnumerationTooLarge {
            count: count.to_string(),
            guard,
        });
    }
    let mut parts = vec![0u64; q as usize];
    let mut total = BigInt::zero();
    enumerate(&mut parts, 0, n, &mut |parts| {
        let weight: i64 = parts
            .iter()
            .enumerate()
            .map(|(t, &i)| t as i64 * i as i64)
            .sum();
        if (weight - r).rem_euclid(q) == 0 {
            let coeff = multinomial(n, parts).expect("parts sum to n");
            total += coeff * gen_binomial((weight - r) / q, j);
        }
    });
    Ok(total)
}

fn enumerate(parts: &mut [u64], idx: usize, remaining: u64, visit: &mut impl FnMut(&[u64])) {
    if idx == parts.len() - 1 {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for v in 0..=remaining {
        parts[idx] = v;
        enumerate(parts, idx + 1, remaining - v, visit);
    }
}

/// `[(n − p^{a−1} − j p^a) / (p^{a−1}(p−1))]`; at a = 1 this is `[(n−1−jp)/(p−1)]`.
pub fn bound_fleck(n: u64, j: u64, p: u64, a: u32) -> u64 {
    estimate_exponent_i(n, j, p, a)
}

/// `[((an−a+1)(p−1) − j(ap−a+1) − 1) / (p−1)]`.
pub fn bound_multinomial(n: u64, j: u64, p: u64, a: u32) -> u64 {
    estimate_exponent_ii(n, j, p, a)
}

/// `[(n − jp)/p]`, the cruder estimate obtained without the extra factor of π.
pub fn bound_weak(n: u64, j: u64, p: u64) -> u64 {
    bracket(n as i128 - j as i128 * p as i128, p as i128)
}

/// `ord_p([n/p^{a−1}]!) − j − ord_p(j!)`, clamped at zero.
pub fn bound_sun_davis(n: u64, j: u64, p: u64, a: u32) -> u64 {
    let scale = (p as u128).checked_pow(a - 1).unwrap_or(u128::MAX);
    let m = (n as u128 / scale) as u64;
    ord_factorial(m, p).saturating_sub(j + ord_factorial(j, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumKind {
    Fleck,
    Multinomial,
}

impl SumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SumKind::Fleck => "fleck",
            SumKind::Multinomial => "multinomial",
        }
    }

    pub fn evaluate(&self, n: u64, r: i64, j: u64, p: u64, a: u32) -> BigInt {
        match self {
            SumKind::Fleck => fleck_sum(n, r, j, p, a),
            SumKind::Multinomial => multinomial_sum(n, r, j, p, a),
        }
    }

    /// The sharp bound proved for this family.
    pub fn primary_bound(&self) -> BoundKind {
        match self {
            SumKind::Fleck => BoundKind::Fleck,
            SumKind::Multinomial => BoundKind::Multinomial,
        }
    }
}

impl FromStr for SumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fleck" => Ok(SumKind::Fleck),
            "multinomial" | "multi" => Ok(SumKind::Multinomial),
            _ => Err(Error::InvalidArgument(format!("unknown sum kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Fleck,
    Multinomial,
    Weak,
    SunDavis,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Fleck => "fleck",
            BoundKind::Multinomial => "multinomial",
            BoundKind::Weak => "weak",
            BoundKind::SunDavis => "sun-davis",
        }
    }

    pub fn evaluate(&self, n: u64, j: u64, p: u64, a: u32) -> u64 {
        match self {
            BoundKind::Fleck => bound_fleck(n, j, p, a),
            BoundKind::Multinomial => bound_multinomial(n, j, p, a),
            BoundKind::Weak => bound_weak(n, j, p),
            BoundKind::SunDavis => bound_sun_davis(n, j, p, a),
        }
    }

    /// Whether the bound is a claim about the given sum family at this `a`.
    pub fn applies_to(&self, kind: SumKind, a: u32) -> bool {
        match (self, kind) {
            (BoundKind::Fleck | BoundKind::SunDavis, SumKind::Fleck) => true,
            (BoundKind::Weak, SumKind::Fleck) => a == 1,
            (BoundKind::Multinomial, SumKind::Multinomial) => true,
            _ => false,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fleck" => Ok(BoundKind::Fleck),
            "multinomial" | "multi" => Ok(BoundKind::Multinomial),
            "weak" => Ok(BoundKind::Weak),
            "sun-davis" | "sun_davis" => Ok(BoundKind::SunDavis),
            _ => Err(Error::InvalidArgument(format!("unknown bound kind {s:?}"))),
        }
    }
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One certified instance of a congruence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRecord {
    pub p: u64,
    pub a: u32,
    pub n: u64,
    pub r: i64,
    pub j: u64,
    #[serde(with = "decimal")]
    pub sum: BigInt,
    pub valuation: Valuation,
    pub bound: u64,
    pub bound_kind: BoundKind,
    pub tight: bool,
}

impl CongruenceRecord {
    pub fn new(p: u64, a: u32, n: u64, r: i64, j: u64, sum: BigInt, bound_kind: BoundKind) -> Self {
        let valuation = ord_int(&sum, p);
        let bound = bound_kind.evaluate(n, j, p, a);
        let tight = valuation == Valuation::Finite(bound as u32);
        Self {
            p,
            a,
            n,
            r,
            j,
            sum,
            valuation,
            bound,
            bound_kind,
            tight,
        }
    }

    pub fn passes(&self) -> bool {
        self.valuation.certifies(self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub kind: SumKind,
    pub p: u64,
    pub a: u32,
    pub n: Vec<u64>,
    pub r: Vec<i64>,
    pub j: Vec<u64>,
    pub bounds: Vec<BoundKind>,
    /// Worker threads; `None` uses the pool default.
    pub workers: Option<usize>,
}

impl SweepSpec {
    /// The standard grid: n ≤ `n_max`, every residue class mod p^a plus
    /// r ∈ {−3, −2, −1}, j ≤ `j_max`, with every bound that applies.
    pub fn standard(kind: SumKind, p: u64, a: u32, n_max: u64, j_max: u64) -> Self {
        let q = modulus_q(p, a);
        let r = (-3..0).chain(0..q).collect();
        let bounds = [
            BoundKind::Fleck,
            BoundKind::Multinomial,
            BoundKind::Weak,
            BoundKind::SunDavis,
        ]
        .into_iter()
        .filter(|b| b.applies_to(kind, a))
        .collect();
        Self {
            kind,
            p,
            a,
            n: (0..=n_max).collect(),
            r,
            j: (0..=j_max).collect(),
            bounds,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !crate::padic::is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.a == 0 {
            return Err(Error::InvalidArgument("a must be at least 1".into()));
        }
        if (self.p as i64).checked_pow(self.a).is_none() {
            return Err(Error::InvalidArgument("p^a overflows".into()));
        }
        Ok(())
    }

    fn tuples(&self) -> Vec<(u64, i64, u64)> {
        let mut n = self.n.clone();
        let mut r = self.r.clone();
        let mut j = self.j.clone();
        n.sort_unstable();
        n.dedup();
        r.sort_unstable();
        r.dedup();
        j.sort_unstable();
        j.dedup();
        let mut out = Vec::with_capacity(n.len() * r.len() * j.len());
        for &nn in &n {
            for &rr in &r {
                for &jj in &j {
                    out.push((nn, rr, jj));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub records: Vec<CongruenceRecord>,
    pub failures: Vec<CongruenceRecord>,
    pub tight_instances: Vec<CongruenceRecord>,
    /// Wall-clock time per record class (sum evaluation, then each bound).
    pub timing: BTreeMap<String, Duration>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Wall-clock timer; reads zero on wasm32, which has no monotonic clock.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    started: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            started: std::time::Instant::now(),
        }
    }

    #[cfg(not(target_arch = "wasm32"))]
    fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    #[cfg(target_arch = "wasm32")]
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, U, F>(items: &[T], workers: Option<usize>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.par_iter().map(&f).collect();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| items.iter().map(&f).collect()),
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, U, F>(items: &[T], _workers: Option<usize>, f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Evaluates every tuple of the grid, in lexicographic (n, r, j) order, and
/// records valuation, bound and tightness for each selected bound.
pub fn verify_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let tuples = spec.tuples();
    let mut report = SweepReport::default();
    if tuples.is_empty() {
        return Ok(report);
    }
    let (p, a) = (spec.p, spec.a);
    let q = modulus_q(p, a);

    let started = Stopwatch::start();
    let sums: Vec<BigInt> = match spec.kind {
        SumKind::Fleck => {
            parallel_map(&tuples, spec.workers, |&(n, r, j)| fleck_sum(n, r, j, p, a))
        }
        SumKind::Multinomial => {
            let mut ns: Vec<u64> = tuples.iter().map(|t| t.0).collect();
            ns.dedup();
            let tables: BTreeMap<u64, Vec<BigInt>> = ns
                .iter()
                .copied()
                .zip(parallel_map(&ns, spec.workers, |&n| {
                    multinomial_coefficients(n, q as u64)
                }))
                .collect();
            parallel_map(&tuples, spec.workers, |&(n, r, j)| {
                weighted_sum(&tables[&n], r, j, q)
            })
        }
    };
    report
        .timing
        .insert(format!("sum:{}", spec.kind.as_str()), started.elapsed());

    let mut per_bound: BTreeMap<String, Duration> = BTreeMap::new();
    for (&(n, r, j), sum) in tuples.iter().zip(sums) {
        for &kind in &spec.bounds {
            let t = Stopwatch::start();
            let record = CongruenceRecord::new(p, a, n, r, j, sum.clone(), kind);
            *per_bound.entry(format!("bound:{kind}")).or_default() += t.elapsed();
            if !record.passes() {
                report.failures.push(record.clone());
            }
            if record.tight {
                report.tight_instances.push(record.clone());
            }
            report.records.push(record);
        }
    }
    report.timing.extend(per_bound);
    Ok(report)
}

/// All instances of the grid where the valuation equals the bound exactly.
pub fn sharpness_scan(spec: &SweepSpec) -> Result<Vec<CongruenceRecord>> {
    Ok(verify_sweep(spec)?.tight_instances)
}

/// Result of comparing ψ-engine coefficients against exact sums.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossCheck {
    /// j values compared with at least one certified digit.
    pub compared: Vec<u64>,
    pub mismatches: Vec<u64>,
}

impl CrossCheck {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn compare_coefficients(
    image: &LaurentSeries,
    offset: i64,
    exact: impl Fn(u64) -> BigInt,
) -> CrossCheck {
    let ctx = image.context();
    let mut out = CrossCheck::default();
    for e in offset..image.high() {
        let g = image.precision_at(e);
        if g == 0 {
            continue;
        }
        let j = (e - offset) as u64;
        let expected = ctx.reduce_big(&exact(j)) % ctx.p_pow(g);
        let actual = image.coeff(e).expect("within range").value() % ctx.p_pow(g);
        out.compared.push(j);
        if expected != actual {
            out.mismatches.push(j);
        }
    }
    out
}

/// Compares coefficient j of ψ^a(π^n (1+π)^{−r}) with `fleck_sum(n, r, j, p, a)`
/// modulo the certified precision. The input is known below π^M.
pub fn cross_check_fleck_detail(
    n: u64,
    r: i64,
    p: u64,
    a: u32,
    ctx: &PadicContext,
    high: i64,
) -> Result<CrossCheck> {
    check_prime(ctx, p)?;
    let n_i = n as i64;
    if high <= n_i {
        return Err(Error::PrecisionTooLow {
            need: n_i + 1,
            have: high,
        });
    }
    let input = LaurentSeries::epsilon_power(-r, ctx, high - n_i)?.shift(n_i);
    let image = psi_iterate(&input, a)?.series;
    Ok(compare_coefficients(&image, 0, |j| {
        fleck_sum(n, r, j, p, a)
    }))
}

pub fn cross_check_fleck(
    n: u64,
    r: i64,
    p: u64,
    a: u32,
    ctx: &PadicContext,
    high: i64,
) -> Result<bool> {
    cross_check_fleck_detail(n, r, p, a, ctx, high).map(|c| c.holds())
}

/// Compares the coefficient of π^{−(n−j)} in ψ^a((1+π)^{−r}/π^n) with
/// `multinomial_sum(n, r, j, p, a)` modulo the certified precision.
pub fn cross_check_multinomial_detail(
    n: u64,
    r: i64,
    p: u64,
    a: u32,
    ctx: &PadicContext,
    high: i64,
) -> Result<CrossCheck> {
    check_prime(ctx, p)?;
    let n_i = n as i64;
    if high < 1 {
        return Err(Error::PrecisionTooLow {
            need: 1,
            have: high,
        });
    }
    let input = LaurentSeries::epsilon_power(-r, ctx, high + n_i)?.shift(-n_i);
    let image = psi_iterate(&input, a)?.series;
    let coeffs = multinomial_coefficients(n, modulus_q(p, a) as u64);
    let q = modulus_q(p, a);
    Ok(compare_coefficients(&image, -n_i, |j| {
        weighted_sum(&coeffs, r, j, q)
    }))
}

pub fn cross_check_multinomial(
    n: u64,
    r: i64,
    p: u64,
    a: u32,
    ctx: &PadicContext,
    high: i64,
) -> Result<bool> {
    cross_check_multinomial_detail(n, r, p, a, ctx, high).map(|c| c.holds())
}

fn check_prime(ctx: &PadicContext, p: u64) -> Result<()> {
    if ctx.p() != p {
        return Err(Error::InvalidArgument(format!(
            "context prime {} differs from requested p = {p}",
            ctx.p()
        )));
    }
    Ok(())
}

/// π-precision for the fleck cross-check input that leaves `extra`
/// certified coefficients after a applications of ψ.
pub fn fleck_check_precision(n: u64, p: u64, a: u32, extra: u64) -> i64 {
    (n + extra * modulus_q(p, a) as u64 + 1) as i64
}

/// π-precision for the multinomial cross-check that keeps the pole
/// headroom through every iteration and ends with `n(p−1) + 2` known
/// exponents at and above π^0.
pub fn multinomial_check_precision(n: u64, p: u64, a: u32) -> i64 {
    modulus_q(p, a) * (n * (p - 1) + 2) as i64
}
