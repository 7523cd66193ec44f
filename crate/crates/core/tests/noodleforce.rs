use std::collections::BTreeMap;

use strrep::exec::Execution;
use strrep::gadgets::{gadget_g1, sausage};
use strrep::noodleforce::{choose_mesh, noodle_force, noodle_force_precise, noodle_force_with, NoodleError};
use strrep::representation::{contains_induced, intersection_graph, is_precise, validate_proper};

#[test]
fn sausage_is_forced_and_kept() {
    let r = sausage(2).unwrap();
    let out = noodle_force(&r).unwrap();
    assert!(validate_proper(&out.representation).proper);
    assert_eq!(out.representation.restrict(["u", "v"]), r);
    let id: BTreeMap<String, String> = r.ids().map(|v| (v.clone(), v.clone())).collect();
    assert!(contains_induced(&out.graph, &intersection_graph(&r).unwrap(), &id).unwrap());
    assert_eq!(intersection_graph(&out.representation).unwrap(), out.graph);
}

#[test]
fn precise_forcing_of_g1() {
    let r = gadget_g1();
    let out = noodle_force_precise(&r, 1).unwrap();
    assert!(is_precise(&out.representation, 1).unwrap());
    assert!(matches!(noodle_force_precise(&r, 2), Err(NoodleError::NotPrecise(2))));
}

#[test]
fn execution_modes_agree() {
    let r = sausage(1).unwrap();
    let a = noodle_force_with(&r, 1, Execution::Sequential).unwrap();
    let b = noodle_force_with(&r, 1, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.mesh, choose_mesh(&r).unwrap());
}
