//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns plain strings (RSF text or JSON) so the
//! page needs no generated type definitions. The same functions are called
//! natively by the tests.

use std::str::FromStr;

use archrec::arc::{recover_arc, ConcernAssignment};
use archrec::corpus::Corpus;
use archrec::eval::{recover as recover_with, Method, RecoveryConfig, SystemFacts};
use archrec::metrics::{a2a, cvg, mojofm, CvgParams};
use archrec::rsf::{parse_arch_rsf, parse_deps_rsf, serialize_arch};
use archrec::smells::{detect_smells, SmellThresholds};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_json<T: serde::de::DeserializeOwned + Default>(text: &str) -> Result<T, String> {
    if text.trim().is_empty() {
        Ok(T::default())
    } else {
        serde_json::from_str(text).map_err(fail)
    }
}

fn render(v: &Value) -> Result<String, String> {
    serde_json::to_string_pretty(v).map_err(fail)
}

/// Recovers an architecture from `depends` facts and an optional corpus.
///
/// `options` is a recovery configuration such as
/// `{"arc": {"topics": 10, "iterations": 200}}`; empty means defaults.
/// Returns `{"rsf", "clusterCount", "entityCount"}` plus `"concerns"` for ARC.
#[wasm_bindgen]
pub fn recover(method: &str, deps_rsf: &str, corpus_json: &str, options: &str) -> Result<String, String> {
    let method = Method::from_str(method).map_err(fail)?;
    let cfg: RecoveryConfig = parse_json(options)?;
    let graph = parse_deps_rsf(deps_rsf).map_err(fail)?;
    let corpus: Corpus = parse_json(corpus_json)?;
    let (arch, concerns) = if method == Method::Arc {
        let rec = recover_arc(&corpus, &graph, &cfg.arc).map_err(fail)?;
        (rec.architecture, Some(rec.concerns))
    } else {
        let facts = SystemFacts::new(graph, corpus).map_err(fail)?;
        (recover_with(method, &facts, &cfg).map_err(fail)?, None)
    };
    let mut out = json!({
        "rsf": serialize_arch(&arch),
        "clusterCount": arch.cluster_count(),
        "entityCount": arch.entity_count(),
    });
    if let Some(c) = concerns {
        out["concerns"] = serde_json::to_value(c).map_err(fail)?;
    }
    render(&out)
}

/// Compares two architectures given as RSF. `metric` is `a2a`, `mojofm` or
/// `cvg`; `threshold` only matters for cvg, which is reported both ways.
#[wasm_bindgen]
pub fn compare(metric: &str, a_rsf: &str, b_rsf: &str, threshold: f64) -> Result<String, String> {
    let a = parse_arch_rsf(a_rsf).map_err(|e| format!("first architecture: {e}"))?;
    let b = parse_arch_rsf(b_rsf).map_err(|e| format!("second architecture: {e}"))?;
    let out = match metric {
        "a2a" => serde_json::to_value(a2a(&a, &b)),
        "mojofm" => serde_json::to_value(mojofm(&a, &b).map_err(fail)?),
        "cvg" => {
            let params = CvgParams::new(threshold).map_err(fail)?;
            let forward = cvg(&a, &b, params).map_err(fail)?;
            let backward = cvg(&b, &a, params).map_err(fail)?;
            Ok(json!({ "forward": forward, "backward": backward }))
        }
        other => return Err(format!("unknown metric `{other}`")),
    }
    .map_err(fail)?;
    render(&out)
}

/// Concern overload and scattered parasitic functionality findings.
/// `thresholds` may leave out any field; empty means defaults.
#[wasm_bindgen]
pub fn smells(arch_rsf: &str, concerns_json: &str, thresholds: &str) -> Result<String, String> {
    let arch = parse_arch_rsf(arch_rsf).map_err(fail)?;
    let ca: ConcernAssignment = serde_json::from_str(concerns_json).map_err(fail)?;
    let th: SmellThresholds = parse_json(thresholds)?;
    th.validate().map_err(fail)?;
    render(&json!({
        "findings": detect_smells(&arch, &ca, &th),
        "thresholds": th,
    }))
}
