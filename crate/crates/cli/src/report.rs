//! JSON renderings of library results.

use qutrit_mes::audit::{AuditReport, AuditSurvivor};
use qutrit_mes::classify::{Classification, SepCase};
use qutrit_mes::io::mat_to_json;
use qutrit_mes::oracle::{OracleVerdict, SymmetrySearch};
use qutrit_mes::protocol::{BranchReport, PovmReport};
use qutrit_mes::seed::GenericityReport;
use qutrit_mes::state::StandardForm;
use qutrit_mes::{PauliIndex, ProbabilityVector, SepFeasibility};
use serde_json::{json, Value};

pub fn pauli(k: PauliIndex) -> Value {
    json!([k.k1, k.k2])
}

pub fn probabilities(p: &ProbabilityVector<f64>) -> Value {
    json!(PauliIndex::ALL.iter().map(|k| p.get(*k)).collect::<Vec<_>>())
}

pub fn genericity(r: &GenericityReport) -> Value {
    json!({
        "generic": r.generic,
        "delta": r.delta,
        "margin": r.margin,
        "violations": r.violations.iter().map(|c| json!({"condition": c.name, "value": c.value})).collect::<Vec<_>>(),
    })
}

pub fn standard_form(sf: &StandardForm<f64>) -> Value {
    json!({
        "seed": {"a": [sf.seed.a.re, sf.seed.a.im], "b": [sf.seed.b.re, sf.seed.b.im], "c": [sf.seed.c.re, sf.seed.c.im]},
        "gauge": pauli(sf.gauge),
        "pivots": sf.pivots.iter().map(|(party, k)| json!({"party": party, "index": pauli(*k)})).collect::<Vec<_>>(),
        "coords": sf.coords.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn sep(f: &SepFeasibility<f64>) -> Value {
    json!({
        "feasible": f.feasible,
        "unique": f.unique,
        "nontrivial": f.nontrivial,
        "witness": f.witness.as_ref().map(probabilities),
        "vertices": f.vertices.iter().map(probabilities).collect::<Vec<_>>(),
        "residual": f.residual,
        "affine_dim": f.affine_dim,
        "eta_conditions_hold": f.eta_check.as_ref().map(|c| c.ok),
    })
}

pub fn oracle(o: &OracleVerdict) -> Value {
    json!({
        "verdict": format!("{:?}", o.verdict).to_lowercase(),
        "feasible": o.feasible,
        "best_residual": o.best_residual,
        "gradient_residual": o.gradient_residual,
        "sample_count": o.sample_count,
        "witness": o.witness,
        "basic_solutions": o.basic_solutions.len(),
    })
}

pub fn classification(c: &Classification) -> Value {
    let first = c.sep_cases.first();
    json!({
        "sep_reachable": c.sep_reachable,
        "case": first.map(|m| match m.case { SepCase::I => "i", SepCase::II => "ii" }),
        "permutation": first.map(|m| m.permutation),
        "w": first.and_then(|m| m.w).map(pauli),
        "all_cases": c.sep_cases.iter().map(|m| json!({
            "case": match m.case { SepCase::I => "i", SepCase::II => "ii" },
            "permutation": m.permutation,
            "w": m.w.map(pauli),
        })).collect::<Vec<_>>(),
        "locc_reachable": c.locc_reachable,
        "sep_only": c.sep_only,
        "lemma3_family": c.lemma3_family,
        "locc_convertible": c.locc_convertible,
        "in_mes": c.in_mes,
        "isolated": c.isolated,
        "near_boundary": c.support.near_boundary,
        "warnings": c.warnings,
    })
}

pub fn branches(povm: &PovmReport, rep: &BranchReport<f64>) -> Value {
    json!({
        "passed": povm.passed && rep.deterministic(),
        "completeness_residual": povm.completeness,
        "povm_residual": povm.povm,
        "unitarity_residual": povm.unitarity,
        "probability_sum": rep.probability_sum,
        "all_match": rep.all_match,
        "max_residual": rep.max_residual(),
        "branches": rep.branches.iter().map(|b| json!({
            "labels": b.labels.iter().map(|k| pauli(*k)).collect::<Vec<_>>(),
            "probability": b.probability,
            "residual": b.residual,
            "lu_match": b.lu_match,
            "zero_probability": b.zero_probability,
        })).collect::<Vec<_>>(),
    })
}

fn survivor(s: &AuditSurvivor<f64>) -> Value {
    json!({
        "b_index": s.b_index,
        "c_index": s.c_index,
        "b_kind": format!("{:?}", s.b_kind).to_lowercase(),
        "c_kind": format!("{:?}", s.c_kind).to_lowercase(),
        "projection_residual": s.projection_residual,
        "full_residual": s.full_residual,
        "pauli": s.pauli.map(pauli),
        "a": s.a.as_ref().map(mat_to_json),
    })
}

pub fn audit(r: &AuditReport<f64>) -> Value {
    json!({
        "passed": r.passed,
        "monomial_candidates": r.monomial_count,
        "dense_candidates": r.dense_count,
        "pairs_tested": r.pairs_tested,
        "survivors": r.survivors.iter().map(survivor).collect::<Vec<_>>(),
        "surplus": r.surplus.iter().map(survivor).collect::<Vec<_>>(),
        "matched": r.matched.iter().map(|k| pauli(*k)).collect::<Vec<_>>(),
        "min_rejected_residual": r.min_rejected_residual,
    })
}

pub fn symmetry_search(s: &SymmetrySearch) -> Value {
    json!({
        "matches_pauli_group": s.matches_pauli_group,
        "converged": s.converged,
        "failed": s.failed,
        "clusters": s.clusters.iter().map(|c| json!({
            "pauli": c.pauli.map(pauli),
            "members": c.members,
            "best_residual": c.best_residual,
        })).collect::<Vec<_>>(),
    })
}

/// `key: value` lines for the top-level entries of a report.
pub fn text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}"),
                Value::Array(a) if a.len() > 12 => format!("{k}: [{} entries]", a.len()),
                _ => format!("{k}: {x}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Array(items) => items.iter().map(text).collect::<Vec<_>>().join("\n\n"),
        other => other.to_string(),
    }
}
