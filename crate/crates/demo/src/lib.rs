//! Browser bindings. Each export takes plain numbers and strings and
//! returns a JSON string; the page renders it.

use rand::seq::SliceRandom;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rmflat::counterex::counterexample_experiment;
use rmflat::flattest::{delta_of, rej_exact, rej_montecarlo};
use rmflat::gowers::gowers_exact;
use rmflat::ratio::{render, to_f64};
use rmflat::{seeded_rng, BooleanFunction, RmCode};

/// Largest function the page analyzes exactly.
pub const MAX_EXACT_N: usize = 8;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Degree, distance to degree `d`, the `k`-flat rejection probability and
/// the `U^(d+1)` norm of a function given in table-file form.
pub fn analyze_text(table: &str, d: usize, k: usize, trials: u64, seed: u64) -> Result<Value, String> {
    let f = BooleanFunction::parse_table_file(table).map_err(err)?;
    let n = f.n();
    if d >= n || k <= d || k > n {
        return Err(format!("need d < k <= n, got d = {d}, k = {k}, n = {n}"));
    }
    let mut out = json!({
        "n": n,
        "degree": f.degree(),
        "weight": f.weight(),
        "monomials": f.anf().monomials().len(),
    });
    let exact = n <= MAX_EXACT_N;
    if exact {
        match delta_of(&f, d) {
            Ok(delta) => out["delta"] = json!(render(&delta)),
            Err(e) => out["delta_note"] = json!(e.to_string()),
        }
        let rej = rej_exact(&f, d, k).map_err(err)?.value();
        let g = gowers_exact(&f, d + 1).map_err(err)?;
        out["rej"] = json!(render(&rej));
        out["rej_float"] = json!(to_f64(&rej));
        out["gowers_raw"] = json!(render(&g.raw));
        out["gowers_norm"] = json!(g.norm);
    } else {
        let r = rej_montecarlo(&f, d, k, trials, seed).map_err(err)?;
        out["rej_float"] = json!(r.estimate());
        out["rej_std_error"] = json!(r.std_error());
        out["trials"] = json!(trials);
    }
    out["exact"] = json!(exact);
    Ok(out)
}

/// A function in table-file form: `codeword`, `noisy` (codeword plus
/// `errors` flips), `symmetric` (`S_{d+1,n}`) or `random`.
pub fn generate_text(kind: &str, n: usize, d: usize, errors: usize, seed: u64) -> Result<String, String> {
    if n == 0 || n > 16 {
        return Err("the page handles 1 <= n <= 16".into());
    }
    let mut rng = seeded_rng(seed);
    let f = match kind {
        "codeword" | "noisy" => {
            let g = RmCode::new(d, n).map_err(err)?.random_codeword(&mut rng);
            let flips = if kind == "noisy" { errors.min(1 << n) } else { 0 };
            let pts: Vec<u64> = (0..1u64 << n).collect();
            pts.choose_multiple(&mut rng, flips).fold(g, |f, &p| f.flipped(p))
        }
        "symmetric" => BooleanFunction::symmetric_poly(d + 1, n).map_err(err)?,
        "random" => BooleanFunction::from_fn(n, |_| rand::Rng::gen(&mut rng)),
        other => return Err(format!("unknown kind {other:?}")),
    };
    Ok(f.to_table_file())
}

/// Sampled rejection rate of `S_{d+1,n}` by the `(d+1)`-flat test.
pub fn counterexample_value(d: usize, n: usize, trials: u64, seed: u64) -> Result<Value, String> {
    if trials > 2_000_000 {
        return Err("at most 2000000 trials in the browser".into());
    }
    let r = counterexample_experiment(d, n, trials, seed).map_err(err)?;
    Ok(json!({
        "d": d,
        "n": n,
        "trials": trials,
        "estimate": r.estimate,
        "std_error": r.std_error,
        "bound": render(&r.bound),
        "bound_float": to_f64(&r.bound),
        "mismatches": r.mismatches,
        "below_bound": r.within(0.0),
        "small_d": r.small_d,
    }))
}

fn js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze(table: &str, d: usize, k: usize, trials: u32, seed: u32) -> Result<String, JsValue> {
    js(analyze_text(table, d, k, trials as u64, seed as u64))
}

#[wasm_bindgen]
pub fn generate(kind: &str, n: usize, d: usize, errors: usize, seed: u32) -> Result<String, JsValue> {
    generate_text(kind, n, d, errors, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn counterexample(d: usize, n: usize, trials: u32, seed: u32) -> Result<String, JsValue> {
    js(counterexample_value(d, n, trials as u64, seed as u64))
}
