//! Browser bindings for the static demo page in `www/`.
//!
//! Each exported function has a plain Rust twin that returns
//! `Result<String, String>` so it can be tested natively.

use projcode::bounds::{cm_alphabet_optimal, griesmer_sum, kopt_upper, singleton_like_defect};
use projcode::cli::{self, JobConfig};
use projcode::matrix::export_matrix;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Runs a TOML job and returns the report as JSON (timings removed).
pub fn analyze_job(config: &str) -> Result<String, String> {
    let cfg = JobConfig::from_toml(config).map_err(|e| e.to_string())?;
    let report = cli::run(&cfg).map_err(|e| e.to_string())?;
    Ok(report.comparable_json())
}

/// Builds the code of a TOML job and returns its generator matrix text.
pub fn generator_matrix(config: &str) -> Result<String, String> {
    let cfg = JobConfig::from_toml(config).map_err(|e| e.to_string())?;
    let dc = cli::build(&cfg).map_err(|e| e.to_string())?;
    Ok(export_matrix(dc.code()))
}

/// Bound quantities for given `[n, k, d]_p` and `(r, δ)`, as JSON.
pub fn explore_bounds(p: u32, n: u64, k: usize, d: u64, r: usize, delta: usize) -> Result<String, String> {
    projcode::PrimeField::new(p as u64).map_err(|e| e.to_string())?;
    if d == 0 || d > n || k == 0 {
        return Err("need 1 <= d <= n and k >= 1".into());
    }
    let kopt = kopt_upper(p, n, d).map_err(|e| e.to_string())?;
    let cm = cm_alphabet_optimal(p, n, k, d, r, delta).ok();
    let defect = singleton_like_defect(n, k, d, r, delta).map_err(|e| e.to_string())?;
    let value = json!({
        "griesmer_sum": griesmer_sum(p, k, d),
        "meets_griesmer": griesmer_sum(p, k, d) == n,
        "kopt_upper": kopt,
        "alphabet_bound": cm,
        "singleton_defect": defect,
    });
    Ok(serde_json::to_string_pretty(&value).expect("value serializes"))
}

#[wasm_bindgen]
pub fn analyze(config: &str) -> Result<String, JsError> {
    analyze_job(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn matrix(config: &str) -> Result<String, JsError> {
    generator_matrix(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bounds(p: u32, n: u32, k: u32, d: u32, r: u32, delta: u32) -> Result<String, JsError> {
    explore_bounds(p, n as u64, k as usize, d as u64, r as usize, delta as usize).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = "p = 5\nm = 3\nblocks = [[[1, 2], [2, 3]]]\n[analyses]\nlocality = { delta = 4 }\n";

    #[test]
    fn analyze_reports_parameters() {
        let out: serde_json::Value = serde_json::from_str(&analyze_job(PAIR).unwrap()).unwrap();
        assert_eq!(out["parameters"]["n"], 20);
        assert_eq!(out["locality"]["certified"], true);
        assert!(out.get("timings_ms").is_none());
        assert!(analyze_job("p = 4\nm = 3\n").unwrap_err().contains("p:"));
    }

    #[test]
    fn matrix_header() {
        assert!(generator_matrix(PAIR).unwrap().starts_with("5 3 20\n"));
    }

    #[test]
    fn bounds_for_pair_of_lines() {
        let out: serde_json::Value =
            serde_json::from_str(&explore_bounds(5, 20, 3, 15, 2, 4).unwrap()).unwrap();
        assert_eq!(out["alphabet_bound"]["optimal"], true);
        assert_eq!(out["singleton_defect"], 0);
        assert_eq!(out["griesmer_sum"], 19);
        assert!(explore_bounds(5, 3, 2, 9, 2, 4).is_err());
    }
}
