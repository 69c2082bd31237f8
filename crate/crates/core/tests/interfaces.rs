//! Wire-format tests: the ensemble JSON schema, the protocol-tree JSON
//! schema with 0-based decimal outcome keys, and family-spec configs.
//! Complex numbers are always [re, im] pairs.

use locc_info::ensemble::Ensemble;
use locc_info::measure::{run_protocol, ProtocolTree};
use locc_info::states::EnsembleSpec;

#[test]
fn ensemble_schema_accepts_vectors_and_matrices() {
    let doc = serde_json::json!({
        "dims": [2, 2],
        "states": [
            {
                "prob": 0.5,
                "label": "pure",
                "vector": [[0.7071067811865476, 0.0], [0.0, 0.0],
                           [0.0, 0.0], [0.7071067811865476, 0.0]]
            },
            {
                "prob": 0.5,
                "label": "mixed",
                "matrix": [
                    [[0.25, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                    [[0.0, 0.0], [0.25, 0.0], [0.0, 0.0], [0.0, 0.0]],
                    [[0.0, 0.0], [0.0, 0.0], [0.25, 0.0], [0.0, 0.0]],
                    [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.25, 0.0]]
                ]
            }
        ]
    });
    let e = Ensemble::from_json(&doc).unwrap();
    assert_eq!(e.dims(), &[2, 2]);
    assert_eq!(e.labels(), vec!["pure", "mixed"]);
    assert!(e.items()[0].is_pure_flagged());
    assert!(!e.items()[1].is_pure_flagged());

    // serialization keeps the vector form for pure-flagged states
    let round = e.to_json();
    assert!(round["states"][0].get("vector").is_some());
    assert!(round["states"][1].get("matrix").is_some());
    let back = Ensemble::from_json(&round).unwrap();
    assert!((back.holevo_chi().unwrap() - e.holevo_chi().unwrap()).abs() < 1e-12);
}

#[test]
fn ensemble_schema_error_names_the_field() {
    let doc = serde_json::json!({
        "dims": [2],
        "states": [ { "prob": 1.0, "vector": [[1.0, 0.0], [0.0, 0.0]],
                      "matrix": [[[1.0, 0.0]]] } ]
    });
    let err = Ensemble::from_json(&doc).unwrap_err().to_string();
    assert!(err.contains("states[0]"), "error was: {}", err);
}

#[test]
fn protocol_schema_with_partial_children() {
    // Alice measures; only outcome 0 continues with Bob's round
    let doc = serde_json::json!({
        "party": "A",
        "kraus": [
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
            [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        ],
        "children": {
            "0": {
                "party": "B",
                "kraus": [
                    [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                    [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
                ],
                "children": {}
            }
        }
    });
    let tree = ProtocolTree::from_json(&doc).unwrap();
    assert_eq!(tree.depth(), 2);
    let e = locc_info::states::bell_ensemble(None).unwrap();
    let result = run_protocol(&e, &tree).unwrap();
    // paths: 0.0, 0.1 (continued) and 1 (terminated after round one)
    assert_eq!(result.joint.paths, vec!["0.0", "0.1", "1"]);
    let json = tree.to_json();
    assert!(json["children"].get("0").is_some());
    assert!(json["children"].get("1").is_none());
}

#[test]
fn family_spec_configs_build() {
    let specs = [
        r#"{ "family": "bell4", "params": {} }"#,
        r#"{ "family": "canonical_dxd", "params": { "d": 3 } }"#,
        r#"{ "family": "partial4", "params": { "a1": 0.6 } }"#,
        r#"{ "family": "tensor_power", "params": { "a1_list": [0.6, 0.9] } }"#,
        r#"{ "family": "copy_classical", "params": { "d": 4 } }"#,
        r#"{ "family": "product_basis", "params": { "d": 2 } }"#,
    ];
    let sizes = [4usize, 9, 4, 16, 4, 4];
    for (text, size) in specs.iter().zip(sizes) {
        let spec: EnsembleSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.build().unwrap().len(), size, "spec {}", text);
    }
}
