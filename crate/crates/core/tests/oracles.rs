use proptest::prelude::*;
use psi_core::congruences::{
    cross_check_fleck_detail, cross_check_multinomial_detail, fleck_check_precision, fleck_sum,
    multinomial_check_precision,
};
use psi_core::expr::evaluate;
use psi_core::{psi, PadicContext};

/// Σ_{k ≡ r (q)} (−1)^{n−k} C(n,k) C((k−r)/q, j) by direct i128 arithmetic.
fn direct_fleck(n: u64, r: i64, j: u64, q: i64) -> i128 {
    let mut total = 0i128;
    let mut c = 1i128;
    for k in 0..=n as i64 {
        if k > 0 {
            c = c * (n as i128 - k as i128 + 1) / k as i128;
        }
        if (k - r).rem_euclid(q) != 0 {
            continue;
        }
        let m = ((k - r) / q) as i128;
        let mut g = 1i128;
        for i in 0..j as i128 {
            g = g * (m - i) / (i + 1);
        }
        total += if (n as i64 - k) % 2 == 0 {
            c * g
        } else {
            -c * g
        };
    }
    total
}

#[test]
fn fleck_sum_matches_direct_summation() {
    for (p, a) in [(2u64, 1u32), (2, 3), (3, 2), (7, 1), (11, 1)] {
        let q = p.pow(a) as i64;
        for n in 0..=40 {
            for r in -5..q.min(20) {
                for j in 0..=4 {
                    assert_eq!(
                        fleck_sum(n, r, j, p, a),
                        direct_fleck(n, r, j, q).into(),
                        "p={p} a={a} n={n} r={r} j={j}"
                    );
                }
            }
        }
    }
}

#[test]
fn psi_coefficients_match_sums_at_larger_primes() {
    for (p, a) in [(7u64, 1u32), (3, 3)] {
        let ctx = PadicContext::new(p, 12).unwrap();
        for n in 0..=20 {
            for r in -2..=3 {
                let check =
                    cross_check_fleck_detail(n, r, p, a, &ctx, fleck_check_precision(n, p, a, 3))
                        .unwrap();
                assert!(
                    check.holds() && !check.compared.is_empty(),
                    "p={p} a={a} n={n} r={r}"
                );
            }
        }
    }
    let ctx = PadicContext::new(5, 12).unwrap();
    for n in 0..=6 {
        for r in -2..5 {
            let check = cross_check_multinomial_detail(
                n,
                r,
                5,
                1,
                &ctx,
                multinomial_check_precision(n, 5, 1),
            )
            .unwrap();
            assert!(
                check.holds() && check.compared.len() as u64 > n,
                "n={n} r={r}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// ψ(Σ c_m (1+π)^m) = Σ_{p | m} c_m (1+π)^{m/p}, with both sides built
    /// by plain ring arithmetic.
    #[test]
    fn psi_on_epsilon_combinations(
        p in prop::sample::select(vec![2u64, 3, 5]),
        terms in prop::collection::vec((-8i64..16, -50i64..50), 1..6),
    ) {
        let ctx = PadicContext::new(p, 10).unwrap();
        let m = 24;
        let src = |pick: &dyn Fn(i64) -> Option<i64>| {
            let parts: Vec<String> = terms
                .iter()
                .filter_map(|&(e, c)| pick(e).map(|e| format!("({c})*(1+pi)^{e}")))
                .collect();
            if parts.is_empty() { "0".to_string() } else { parts.join(" + ") }
        };
        let pi = p as i64;
        let x = evaluate(&src(&|e| Some(e)), &ctx, m * pi).unwrap();
        let expected = evaluate(&src(&|e| (e % pi == 0).then_some(e / pi)), &ctx, m).unwrap();
        let y = psi(&x).unwrap().series;
        let agreement = y.certified_agreement(&expected).unwrap();
        prop_assert!(agreement.holds(), "{agreement:?}");
        prop_assert!(agreement.compared as i64 >= m / 2);
    }
}
