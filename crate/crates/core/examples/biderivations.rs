//! Enumerate conformal biderivations of bounded degree.  On the rank-(2+1)
//! degenerate algebra at beta = 2, tau = 0 a parity-shifting map
//! phi(L, L) = (del + 2*lam) E survives alongside the bracket itself.

use confkernel::catalog::{self, rational_params};
use confkernel::poly::rat;
use confkernel::solver::solve_biderivations;

fn show(key: &str, params: &[(&str, confkernel::Rational)]) {
    let alg = catalog::build_algebra(key, &rational_params(params)).unwrap();
    let space = solve_biderivations(&alg, 3, 3).unwrap();
    println!(
        "{key}{params:?}: dim {} = {} inner + {} outer (stable: {})",
        space.dim, space.inner_dim, space.outer_dim, space.stable
    );
    let gens = alg.gens();
    for (v, phi) in space.basis.iter().enumerate() {
        for i in 0..gens.len() {
            for j in 0..gens.len() {
                for k in 0..gens.len() {
                    let p = phi.entry(i, j, k);
                    if !p.is_zero() {
                        println!("    [{v}] ({}, {}) -> ({}) {}", gens[i], gens[j], p, gens[k]);
                    }
                }
            }
        }
    }
}

fn main() {
    show("HVS", &[("alpha", rat(2, 1))]);
    show(
        "HVS2",
        &[("beta", rat(2, 1)), ("gamma", rat(0, 1)), ("tau", rat(0, 1))],
    );
}
