//! The automorphism family sigma(c, g0, g1) of the rank-(2+1) algebra:
//! L -> L + (g0 + g1*del) H, H -> c^2 H, G -> c G — verified pointwise,
//! composed, and inverted.

use confkernel::algebra::LcsAlgebra;
use confkernel::catalog::{self, Params};
use confkernel::maps::{is_automorphism, PartialEndo};
use confkernel::poly::rat;
use confkernel::Rational;

fn sigma(alg: &LcsAlgebra, c: &Rational, g0: &Rational, g1: &Rational) -> PartialEndo {
    let c2 = c * c;
    let images = [
        ("L", format!("(1) * L + (({g0}) + ({g1})*del) * H")),
        ("H", format!("({c2}) * H")),
        ("G", format!("({c}) * G")),
    ];
    let refs: Vec<(&str, &str)> = images.iter().map(|(g, s)| (*g, s.as_str())).collect();
    PartialEndo::from_images(alg, "sigma", &refs).unwrap()
}

fn main() {
    let alg = catalog::build_algebra("HVS", &Params::new()).unwrap();

    let s = sigma(&alg, &rat(3, 1), &rat(1, 2), &rat(-2, 1));
    let out = is_automorphism(&s, &alg).unwrap();
    println!("sigma(3, 1/2, -2) automorphism: {}", if out.passed { "pass" } else { "FAIL" });

    // Composition: sigma(c,g0,g1) . sigma(c',g0',g1') = sigma(cc', g0+c^2 g0', g1+c^2 g1')
    let a = sigma(&alg, &rat(2, 1), &rat(1, 1), &rat(0, 1));
    let b = sigma(&alg, &rat(3, 1), &rat(0, 1), &rat(1, 1));
    let want = sigma(&alg, &rat(6, 1), &rat(1, 1), &rat(4, 1));
    let got = a.compose(&alg, &b).unwrap();
    println!("composition law: {}", if got.matrix() == want.matrix() { "pass" } else { "FAIL" });

    // Inverse: sigma(1/c, -g0/c^2, -g1/c^2)
    let inv = sigma(&alg, &rat(1, 2), &rat(-1, 4), &rat(0, 1));
    let id = PartialEndo::identity(&alg);
    let got = a.compose(&alg, &inv).unwrap();
    println!("inverse law: {}", if got.matrix() == id.matrix() { "pass" } else { "FAIL" });

    // With a nonzero H-coupling on the odd generator, only the sign maps
    // survive on the even part: this candidate is not a homomorphism.
    let hvs2 = catalog::build_algebra(
        "HVS2",
        &catalog::rational_params(&[
            ("beta", rat(1, 1)),
            ("gamma", rat(0, 1)),
            ("tau", rat(1, 1)),
        ]),
    )
    .unwrap();
    let bad = PartialEndo::from_images(
        &hvs2,
        "bad",
        &[("L", "(1) * L + (1) * H"), ("H", "(1) * H"), ("E", "(1) * E")],
    )
    .unwrap();
    let out = confkernel::maps::is_homomorphism(&bad, &hvs2, &hvs2).unwrap();
    println!("shifted map at tau = 1 rejected: {}", if !out.passed { "pass" } else { "FAIL" });
    for v in out.violations.iter().take(2) {
        println!("    residual {} [{}]: {}", v.context, v.component, v.residual);
    }
}
