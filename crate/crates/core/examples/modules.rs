//! Build free conformal modules from the family catalog, verify the
//! compatibility axiom, test a submodule, and discover odd actions on a
//! rank-(1+1) module by linear-ansatz enumeration.

use confkernel::catalog::rational_params;
use confkernel::modules::{
    build_module, discover_rank11, families, is_module, submodule_check,
};
use confkernel::poly::{rat, Polynomial};
use confkernel::{catalog, Rational};

fn main() {
    println!("module families: {}", families().len());

    // A rank-1 weight module over Virasoro and a rank-2 family over the
    // full rank-(2+1) algebra, both checked exactly.
    for (key, params) in [
        ("P2.6-M", vec![("Delta", rat(2, 1)), ("a", rat(1, 3))]),
        (
            "T7.3-M1",
            vec![
                ("Delta", rat(1, 1)),
                ("a", rat(0, 1)),
                ("b", rat(2, 1)),
                ("c", rat(3, 1)),
            ],
        ),
        ("T7.4-M7", vec![("a", rat(1, 1)), ("gamma", rat(0, 1))]),
    ] {
        let m = build_module(key, &rational_params(&params)).unwrap();
        let out = is_module(&m).unwrap();
        println!("{key}: {}", if out.passed { "pass" } else { "FAIL" });
    }

    // Submodule test: in the weight-zero rank-1 module the element
    // (del + 2) v generates a proper submodule.
    let m = build_module(
        "P2.6-M",
        &rational_params(&[("Delta", rat(0, 1)), ("a", rat(2, 1))]),
    )
    .unwrap();
    let elem = Polynomial::parse("del + 2", m.algebra().ring()).unwrap();
    let sub = submodule_check(&m, &elem).unwrap();
    println!("(del + 2) v closed: {}", sub.closed);
    for p in &sub.induced {
        println!("    induced action: {p}");
    }

    // Discovery: all odd actions X v0 = h(del, lam) v1 compatible with
    // fixed even weights, over the degenerate rank-(2+1) algebra.
    let alg = catalog::build_algebra(
        "HVS2",
        &rational_params(&[
            ("beta", rat(3, 1)),
            ("gamma", rat(0, 1)),
            ("tau", rat(0, 1)),
        ]),
    )
    .unwrap();
    let zero = Rational::from_integer(0.into());
    let found = discover_rank11(&alg, &rat(1, 1), &rat(1, 1), &zero, &zero, 6).unwrap();
    println!("discovered odd actions at weights (1, 1): {}", found.basis.dimension);
    for m in &found.modules {
        println!("    {} passes: {}", m.basis().join(", "), is_module(m).unwrap().passed);
    }

    // At tau != 0 no such action survives.
    let alg = catalog::build_algebra(
        "HVS2",
        &rational_params(&[
            ("beta", rat(3, 1)),
            ("gamma", rat(0, 1)),
            ("tau", rat(1, 1)),
        ]),
    )
    .unwrap();
    let found = discover_rank11(&alg, &rat(1, 1), &rat(1, 1), &zero, &rat(1, 1), 6).unwrap();
    println!("discovered odd actions at tau = 1: {}", found.basis.dimension);
}
