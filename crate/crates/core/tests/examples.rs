//! Every example runs to completion.

#[path = "../examples/action_image.rs"]
mod action_image;
#[path = "../examples/chase_transitivity.rs"]
mod chase_transitivity;
#[path = "../examples/colimit_preservation.rs"]
mod colimit_preservation;
#[path = "../examples/entailment.rs"]
mod entailment;
#[path = "../examples/factorization.rs"]
mod factorization;
#[path = "../examples/logical_topology.rs"]
mod logical_topology;
#[path = "../examples/model_enumeration.rs"]
mod model_enumeration;
#[path = "../examples/parse_theory.rs"]
mod parse_theory;
#[path = "../examples/stone_duality.rs"]
mod stone_duality;
#[path = "../examples/verify_suites.rs"]
mod verify_suites;

#[test]
fn action_image_example() {
    action_image::main().unwrap();
}

#[test]
fn chase_transitivity_example() {
    chase_transitivity::main().unwrap();
}

#[test]
fn colimit_preservation_example() {
    colimit_preservation::main().unwrap();
}

#[test]
fn entailment_example() {
    entailment::main().unwrap();
}

#[test]
fn factorization_example() {
    factorization::main().unwrap();
}

#[test]
fn logical_topology_example() {
    logical_topology::main().unwrap();
}

#[test]
fn model_enumeration_example() {
    model_enumeration::main().unwrap();
}

#[test]
fn parse_theory_example() {
    parse_theory::main().unwrap();
}

#[test]
fn stone_duality_example() {
    stone_duality::main().unwrap();
}

#[test]
fn verify_suites_example() {
    verify_suites::main().unwrap();
}
