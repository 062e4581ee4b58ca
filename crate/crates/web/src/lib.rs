//! wasm-bindgen bindings for the static demo page in `www/`.

use psi_core::congruences::{verify_sweep, SumKind, SweepSpec};
use psi_core::{expr, psi_iterate, report, PadicContext};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Valuation slack of the fleck sums over n ≤ `n_max` and r ∈ [0, p^a), for
/// a fixed j, as JSON: `{"p","a","j","n":[..],"r":[..],"cells":[[..]]}` where
/// each cell is `[valuation, bound]` and an infinite valuation is `null`.
pub fn fleck_grid_json(p: u64, a: u32, n_max: u64, j: u64) -> Result<String, String> {
    let q = p
        .checked_pow(a)
        .filter(|&q| q <= 4096)
        .ok_or("p^a too large for a grid")?;
    let spec = SweepSpec {
        kind: SumKind::Fleck,
        p,
        a,
        n: (0..=n_max).collect(),
        r: (0..q as i64).collect(),
        j: vec![j],
        bounds: vec![SumKind::Fleck.primary_bound()],
        workers: None,
    };
    let swept = verify_sweep(&spec).map_err(|e| e.to_string())?;
    let width = q as usize;
    let cells: Vec<Vec<serde_json::Value>> = swept
        .records
        .chunks(width)
        .map(|row| {
            row.iter()
                .map(|rec| serde_json::json!([rec.valuation.finite(), rec.bound]))
                .collect()
        })
        .collect();
    let value = serde_json::json!({
        "p": p,
        "a": a,
        "j": j,
        "n": spec.n,
        "r": spec.r,
        "cells": cells,
    });
    Ok(value.to_string())
}

/// ψ^a applied to a series expression, rendered as the series followed by
/// its precision profile.
pub fn psi_text(p: u64, a: u32, src: &str, m: i64, n: u32) -> Result<String, String> {
    let ctx = PadicContext::new(p, n).map_err(|e| e.to_string())?;
    let x = expr::evaluate(src, &ctx, m).map_err(|e| e.to_string())?;
    let y = psi_iterate(&x, a).map_err(|e| e.to_string())?.series;
    Ok(format!("{y}\nprofile: {}", y.render_profile()))
}

/// Tight instances of the standard grid as a JSON record array.
pub fn tight_json(kind: &str, p: u64, a: u32, n_max: u64, j_max: u64) -> Result<String, String> {
    let kind: SumKind = kind.parse().map_err(|e: psi_core::Error| e.to_string())?;
    let mut spec = SweepSpec::standard(kind, p, a, n_max, j_max);
    spec.bounds = vec![kind.primary_bound()];
    let tight = verify_sweep(&spec)
        .map_err(|e| e.to_string())?
        .tight_instances;
    report::to_json(&tight).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn fleck_grid(p: u32, a: u32, n_max: u32, j: u32) -> Result<String, JsValue> {
    fleck_grid_json(p.into(), a, n_max.into(), j.into()).map_err(js_err)
}

#[wasm_bindgen]
pub fn apply_psi(p: u32, a: u32, src: &str, m: i32, n: u32) -> Result<String, JsValue> {
    psi_text(p.into(), a, src, m.into(), n).map_err(js_err)
}

#[wasm_bindgen]
pub fn tight_instances(
    kind: &str,
    p: u32,
    a: u32,
    n_max: u32,
    j_max: u32,
) -> Result<String, JsValue> {
    tight_json(kind, p.into(), a, n_max.into(), j_max.into()).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let v: serde_json::Value =
            serde_json::from_str(&fleck_grid_json(3, 1, 5, 0).unwrap()).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 6);
        // n = 5, r = 0: sum 9, bound 2
        assert_eq!(v["cells"][5][0], serde_json::json!([2, 2]));
        assert!(fleck_grid_json(2, 20, 5, 0).is_err());
    }

    #[test]
    fn psi_rendering() {
        let text = psi_text(2, 1, "pi^2", 16, 8).unwrap();
        assert!(text.starts_with("2 + pi + O(pi^8)\nprofile: "));
        assert!(psi_text(3, 1, "pi^-4", 8, 8)
            .unwrap_err()
            .contains("need at least 9"));
    }

    #[test]
    fn witnesses_are_tight() {
        let text = tight_json("fleck", 2, 1, 10, 1).unwrap();
        let records = report::from_json(&text).unwrap();
        assert!(records.iter().any(|r| r.n == 7 && r.j == 1 && r.r == 0));
    }
}
