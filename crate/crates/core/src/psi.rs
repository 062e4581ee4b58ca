//! The ψ-operator, the left inverse of Frobenius, on truncated Laurent series.
//!
//! The exact part is computed by the binomial basis change π ↔ [ε] = 1+π:
//! ψ keeps the [ε]^m with p | m and sends them to [ε]^{m/p}. A series with a
//! pole of order n is first multiplied by (Σ_{i<p} [ε]^i)^n = (φ(π)/π)^n, so
//! that ψ(y/π^n) = π^{−n}·ψ(y·(φ(π)/π)^n).
//!
//! Output precision comes from the sharp containments
//! ψ(π^n A⁺) ⊆ Σ_j π^j p^{[(n−1−jp)/(p−1)]} A⁺ and
//! ψ(π^{−n} A⁺) ⊆ Σ_j π^{j−n} p^{[(n(p−1)−jp−1)/(p−1)]} A⁺,
//! applied to the unknown tail π^M A⁺ and to every coefficient that is only
//! known modulo a lower power of p.

use crate::error::{Error, Result};
use crate::padic::{bracket, PadicContext};
use crate::series::{
    epsilon_to_pi_raw, pi_to_epsilon_raw, poly_mul, LaurentSeries, PrecisionProfile,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiResult {
    pub series: LaurentSeries,
}

impl PsiResult {
    pub fn profile(&self) -> &PrecisionProfile {
        self.series.profile()
    }
}

fn pow_i128(p: u64, k: u32) -> Option<i128> {
    (p as i128).checked_pow(k)
}

/// Exponent of p certified for the coefficient of π^j in ψ^a(π^n A⁺):
/// `[(n − p^{a−1} − j p^a) / (p^{a−1}(p−1))]`.
///
/// Panics if `a == 0`.
pub fn estimate_exponent_i(n: u64, j: u64, p: u64, a: u32) -> u64 {
    assert!(a >= 1, "iterate count must be at least 1");
    let (Some(q_prev), Some(q)) = (pow_i128(p, a - 1), pow_i128(p, a)) else {
        return 0;
    };
    let numerator = (n as i128) - q_prev - (j as i128).saturating_mul(q);
    bracket(numerator, q_prev * (p as i128 - 1))
}

/// Exponent of p certified for the coefficient of π^{−(n−j)} in
/// ψ^a(π^{−n} A⁺): `[((an−a+1)(p−1) − j(ap−a+1) − 1) / (p−1)]`.
///
/// Panics if `a == 0`.
pub fn estimate_exponent_ii(n: u64, j: u64, p: u64, a: u32) -> u64 {
    assert!(a >= 1, "iterate count must be at least 1");
    let (n, j, p, a) = (n as i128, j as i128, p as i128, a as i128);
    let numerator = (a * n - a + 1) * (p - 1) - j * (a * p - a + 1) - 1;
    bracket(numerator, p - 1)
}

/// Certified precision of each output exponent of a single ψ step.
struct OutputPrecision<'a> {
    input: &'a LaurentSeries,
    p: u64,
    n: u32,
    /// input exponents whose precision is below N
    lossy: Vec<(i64, u32)>,
}

impl<'a> OutputPrecision<'a> {
    fn new(input: &'a LaurentSeries) -> Self {
        let ctx = input.context();
        let n = ctx.precision();
        Self {
            input,
            p: ctx.p(),
            n,
            lossy: input.profile().iter().filter(|&(_, g)| g < n).collect(),
        }
    }

    fn at(&self, e: i64) -> u32 {
        let mut g = self.n as u64;
        if e >= 0 {
            let high = self.input.high();
            debug_assert!(high >= 0);
            g = g.min(estimate_exponent_i(high as u64, e as u64, self.p, 1));
        }
        for &(i, gi) in &self.lossy {
            let gain = if i >= 0 {
                if e < 0 {
                    continue;
                }
                estimate_exponent_i(i as u64, e as u64, self.p, 1)
            } else {
                if e < i {
                    continue;
                }
                estimate_exponent_ii(i.unsigned_abs(), (e - i) as u64, self.p, 1)
            };
            g = g.min(gi as u64 + gain);
        }
        g as u32
    }
}

/// Builds the output series on `[low, first exponent with zero precision)`.
fn certify(input: &LaurentSeries, low: i64, exact: &[u128], exact_low: i64) -> LaurentSeries {
    let ctx = *input.context();
    let precision = OutputPrecision::new(input);
    let mut coeffs = Vec::new();
    let mut digits = Vec::new();
    let mut e = low;
    loop {
        let g = precision.at(e);
        if g == 0 && !coeffs.is_empty() {
            break;
        }
        let idx = e - exact_low;
        let c = if idx >= 0 {
            exact.get(idx as usize).copied().unwrap_or(0)
        } else {
            0
        };
        coeffs.push(c);
        digits.push(g);
        if g == 0 {
            break;
        }
        e += 1;
    }
    LaurentSeries::from_parts(ctx, low, coeffs, digits)
}

/// Σ_{i<p} (1+π)^i = φ(π)/π.
fn frobenius_quotient(ctx: &PadicContext) -> Vec<u128> {
    let p = ctx.p() as usize;
    let ones = vec![1u128; p];
    epsilon_to_pi_raw(ctx, &ones, p)
}

fn check_headroom(x: &LaurentSeries) -> Result<()> {
    if x.low() < 0 {
        let pole = x.low().unsigned_abs() as i64;
        let need = pole * (x.context().p() as i64 - 1) + 1;
        if x.high() < need {
            return Err(Error::PrecisionTooLow {
                need,
                have: x.high(),
            });
        }
    }
    Ok(())
}

/// The coefficients of π^n·x for n = max(0, −L), as a polynomial.
fn cleared_polynomial(x: &LaurentSeries) -> (u64, Vec<u128>) {
    let pole = (-x.low()).max(0);
    let poly = (-pole..x.high()).map(|e| x.raw(e).unwrap()).collect();
    (pole as u64, poly)
}

/// One application of ψ.
pub fn psi(x: &LaurentSeries) -> Result<PsiResult> {
    check_headroom(x)?;
    let ctx = x.context();
    let p = ctx.p() as usize;
    let (pole, mut poly) = cleared_polynomial(x);
    if pole > 0 {
        let q = frobenius_quotient(ctx);
        for _ in 0..pole {
            poly = poly_mul(ctx, &poly, &q);
        }
    }
    let eps = pi_to_epsilon_raw(ctx, &poly);
    let kept: Vec<u128> = eps.iter().step_by(p).copied().collect();
    let image = epsilon_to_pi_raw(ctx, &kept, kept.len());
    let low = x.low().min(0);
    Ok(PsiResult {
        series: certify(x, low, &image, -(pole as i64)),
    })
}

/// ψ^a by literal iteration; `a = 0` is the identity.
pub fn psi_iterate(x: &LaurentSeries, a: u32) -> Result<PsiResult> {
    let mut current = x.clone();
    for _ in 0..a {
        current = psi(&current)?.series;
    }
    Ok(PsiResult { series: current })
}

/// ψ by explicit decomposition x = Σ_{i<p} (1+π)^i φ(x_i), returning x₀.
///
/// Every basis element (1+π)^i φ(π)^k is monic of degree kp + i, so the
/// decomposition of a polynomial is a top-down triangular elimination.
pub fn psi_reference(x: &LaurentSeries) -> Result<LaurentSeries> {
    if x.low() < 0 {
        return Err(Error::InvalidArgument(
            "reference psi handles power series only".into(),
        ));
    }
    let ctx = x.context();
    let p = ctx.p() as usize;
    let mut residual = x.nonnegative_part();
    let degree = residual.len();
    let blocks = degree.div_ceil(p);

    let shifts: Vec<Vec<u128>> = (0..p)
        .map(|i| {
            let mut row = vec![0u128; p];
            row[i] = 1;
            epsilon_to_pi_raw(ctx, &row, i + 1)
        })
        .collect();
    let phi_pi: Vec<u128> = {
        let mut row = vec![0u128; p + 1];
        row[p] = 1;
        let mut v = epsilon_to_pi_raw(ctx, &row, p + 1);
        v[0] = ctx.sub(v[0], 1);
        v
    };
    let mut phi_powers = vec![vec![1u128]];
    for k in 1..blocks {
        phi_powers.push(poly_mul(ctx, &phi_powers[k - 1], &phi_pi));
    }

    let mut components = vec![vec![0u128; blocks]; p];
    for d in (0..degree).rev() {
        let c = residual[d];
        if c == 0 {
            continue;
        }
        let (k, i) = (d / p, d % p);
        components[i][k] = c;
        let basis = poly_mul(ctx, &shifts[i], &phi_powers[k]);
        debug_assert_eq!(basis.len(), d + 1);
        for (slot, &b) in residual.iter_mut().zip(&basis) {
            *slot = ctx.sub(*slot, ctx.mul(c, b));
        }
    }

    // reassemble Σ_i (1+π)^i φ(x_i) independently and compare
    let mut rebuilt = vec![0u128; degree];
    for (i, comp) in components.iter().enumerate() {
        let mut image = vec![0u128];
        for &c in comp.iter().rev() {
            image = poly_mul(ctx, &image, &phi_pi);
            image[0] = ctx.add(image[0], c);
        }
        let image = poly_mul(ctx, &image, &shifts[i]);
        for (slot, &v) in rebuilt.iter_mut().zip(&image) {
            *slot = ctx.add(*slot, v);
        }
        if image.iter().skip(degree).any(|&v| v != 0) {
            return Err(Error::Internal(format!(
                "component {i} overflows degree {degree}"
            )));
        }
    }
    if rebuilt != x.nonnegative_part() {
        return Err(Error::Internal(
            "basis decomposition does not reproduce the input".into(),
        ));
    }

    Ok(certify(x, 0, &components[0], 0))
}

/// ψ(φ(a)·x) = a·ψ(x) within the certified precision of both sides.
pub fn check_semilinearity(a: &LaurentSeries, x: &LaurentSeries) -> Result<bool> {
    let lhs = psi(&a.frobenius().mul(x)?)?.series;
    let rhs = a.mul(&psi(x)?.series)?;
    Ok(lhs.certified_agreement(&rhs)?.holds())
}

/// ψ(x) = x within certified precision.
pub fn check_fixed_point(x: &LaurentSeries) -> Result<bool> {
    let image = psi(x)?.series;
    Ok(image.certified_agreement(x)?.holds())
}
