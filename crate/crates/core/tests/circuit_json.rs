use thermovqa::ansatz::{build_gibbs_pqc, decompose_rp, Circuit, GibbsAnsatz};

#[test]
fn gibbs_circuit_round_trips_through_json() {
    let circuit = build_gibbs_pqc(3, 2, 1).unwrap();
    let back = Circuit::from_json(&circuit.to_json().unwrap()).unwrap();
    assert_eq!(back, circuit);
    let params: Vec<f64> = (0..circuit.parameter_count()).map(|k| 0.1 * k as f64).collect();
    let a = circuit.simulate(&params).unwrap();
    let b = back.simulate(&params).unwrap();
    assert_eq!(a.amplitudes(), b.amplitudes());
}

#[test]
fn native_gibbs_circuit_matches_logical_circuit() {
    let ansatz = GibbsAnsatz::new(2, 1, 1).unwrap();
    let logical = ansatz.gibbs_circuit();
    let native = logical.decompose();
    let params: Vec<f64> = (0..logical.parameter_count()).map(|k| 0.37 * k as f64 - 1.0).collect();
    let a = logical.simulate(&params).unwrap();
    let b = native.simulate(&params).unwrap();
    let overlap = a.inner(&b).unwrap().norm();
    assert!((overlap - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_json_is_rejected() {
    assert!(Circuit::from_json("{\"n_qubits\": 2, \"gates\": [{\"kind\": \"warp\", \"targets\": [0]}]}").is_err());
    let mut value: serde_json::Value = serde_json::from_str(&decompose_rp(0.1, 0.2).to_json().unwrap()).unwrap();
    value["gates"][0]["targets"] = serde_json::json!([7]);
    assert!(Circuit::from_json(&value.to_string()).is_err());
    let mut value: serde_json::Value = serde_json::from_str(&build_gibbs_pqc(2, 1, 1).unwrap().to_json().unwrap()).unwrap();
    value["parameter_count"] = serde_json::json!(3);
    assert!(Circuit::from_json(&value.to_string()).is_err());
}
