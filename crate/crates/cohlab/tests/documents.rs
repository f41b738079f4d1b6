//! Interchange-document contracts: loaders re-run full validation and
//! reject malformed payloads.

use cohlab::channels::UnitaryEnsemble;
use cohlab::numkernel::ComplexMatrix;
use cohlab::states::{max_coherent_mixed, DensityMatrix};

#[test]
fn matrix_document_rejects_non_finite_entries() {
    let doc = r#"{"dim_rows":1,"dim_cols":1,"entries":[[1e999,0.0]]}"#;
    assert!(serde_json::from_str::<ComplexMatrix>(doc).is_err());
}

#[test]
fn state_document_round_trip_and_rejects() {
    let rho = max_coherent_mixed(3, 0.4).unwrap();
    let text = serde_json::to_string_pretty(&rho).unwrap();
    let back: DensityMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back.dim(), 3);
    assert!(back.matrix().sub(rho.matrix()).max_abs_entry() < 1e-15);

    // dim field must match the matrix shape.
    let mismatched = text.replace("\"dim\": 3", "\"dim\": 2");
    assert!(serde_json::from_str::<DensityMatrix>(&mismatched).is_err());

    // Non-Hermitian payloads are rejected on load.
    let skewed = r#"{"dim":2,"matrix":{"dim_rows":2,"dim_cols":2,
        "entries":[[0.5,0.0],[0.5,0.1],[0.5,0.0],[0.5,0.0]]}}"#;
    assert!(serde_json::from_str::<DensityMatrix>(skewed).is_err());
}

#[test]
fn ensemble_document_rejects_non_unitary_member() {
    let doc = r#"{"dim":2,"members":[
        {"p":1.0,"unitary":{"dim_rows":2,"dim_cols":2,
         "entries":[[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]}}]}"#;
    assert!(serde_json::from_str::<UnitaryEnsemble>(doc).is_err());
}

#[test]
fn ensemble_document_rejects_bad_probabilities() {
    let eye = r#"{"dim_rows":2,"dim_cols":2,"entries":[[1.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#;
    let doc = format!(
        r#"{{"dim":2,"members":[{{"p":0.6,"unitary":{eye}}},{{"p":0.6,"unitary":{eye}}}]}}"#
    );
    assert!(serde_json::from_str::<UnitaryEnsemble>(&doc).is_err());
}
