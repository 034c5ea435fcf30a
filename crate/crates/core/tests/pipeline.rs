//! Cross-module integration: full pipelines on instances outside the
//! worked micro-cases, including extension fields and composite quantum
//! characteristic.

use cyclohecke::hecke::{AlgebraElement, AlgebraParams, Flavor};
use cyclohecke::idempotents::verify_idempotent_system;
use cyclohecke::periodicity::verify_periodicity;
use cyclohecke::regrep::RegularRep;

#[test]
fn full_pipeline_over_gf4() {
    // p = 2 with e = 3 forces the quadratic extension GF(4).
    let params =
        AlgebraParams::from_characteristics(Flavor::NonDegenerate, 2, Some(3), 2, &[0, 1]).unwrap();
    assert_eq!(params.field().k(), 2);
    assert_eq!(params.field().order(), 4);

    let rep = RegularRep::build(&params, None).unwrap();
    assert!(rep.relation_check().all_pass());

    let idem = verify_idempotent_system(&rep).unwrap();
    assert!(idem.all_pass());
    // Extension-field coefficients serialize as coefficient arrays.
    let json = serde_json::to_string(&idem.to_json(false)).unwrap();
    assert!(
        json.contains("\"c\":[") || json.contains("\"c\": ["),
        "{json}"
    );

    for report in verify_periodicity(&rep).unwrap() {
        assert!(report.verdict, "{report:?}");
    }
}

#[test]
fn composite_quantum_characteristic_with_shifted_multicharge() {
    // e = 4 is composite and kappa = (2) puts the strand-1 spectrum at a
    // residue of multiplicative order 2 < e; the block prediction must
    // still match brute force at every strand.
    let params =
        AlgebraParams::from_characteristics(Flavor::NonDegenerate, 5, Some(4), 2, &[2]).unwrap();
    let rep = RegularRep::build(&params, None).unwrap();
    assert!(rep.relation_check().all_pass());
    assert!(verify_idempotent_system(&rep).unwrap().all_pass());
    for report in verify_periodicity(&rep).unwrap() {
        assert!(report.verdict, "{report:?}");
    }
}

#[test]
fn element_and_matrix_powers_agree() {
    let params =
        AlgebraParams::from_characteristics(Flavor::Degenerate, 3, None, 2, &[0, 1]).unwrap();
    let rep = RegularRep::build(&params, None).unwrap();
    for r in 1..=params.n() {
        let m = rep.gen_x_matrix(r);
        for exp in 0..10u64 {
            let elem = AlgebraElement::jm_power(&params, r, exp).unwrap();
            assert_eq!(rep.to_matrix(&elem), m.pow(exp), "r = {r}, exp = {exp}");
        }
    }
}
