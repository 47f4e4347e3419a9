//! Enumerate bounded-degree conformal derivations and split them into
//! inner (adjoint) maps and outer representatives.

use confkernel::algebra::Parity;
use confkernel::catalog::{self, rational_params};
use confkernel::poly::rat;
use confkernel::solver::solve_derivations;

fn main() {
    let hvs = catalog::build_algebra("HVS", &rational_params(&[("alpha", rat(2, 1))])).unwrap();
    for parity in [Parity::Even, Parity::Odd] {
        let space = solve_derivations(&hvs, parity, 3, 3).unwrap();
        println!(
            "HVS {:?}: dim {} = {} inner + {} outer (stable: {})",
            parity, space.dim, space.inner_dim, space.outer_dim, space.stable
        );
        for rep in &space.outer_reps {
            for (j, row) in rep.matrix().iter().enumerate() {
                for (n, p) in row.iter().enumerate() {
                    if !p.is_zero() {
                        println!("    {} -> ({}) {}", hvs.gens()[j], p, hvs.gens()[n]);
                    }
                }
            }
        }
    }

    // The degenerate rank-(2+1) family: outer derivations appear only at
    // tau = 0, and odd ones additionally need beta = 1.
    for (beta, gamma, tau) in [(1, 0, 0), (2, 0, 0), (1, 0, 1)] {
        let alg = catalog::build_algebra(
            "HVS2",
            &rational_params(&[
                ("beta", rat(beta, 1)),
                ("gamma", rat(gamma, 1)),
                ("tau", rat(tau, 1)),
            ]),
        )
        .unwrap();
        let even = solve_derivations(&alg, Parity::Even, 3, 3).unwrap();
        let odd = solve_derivations(&alg, Parity::Odd, 3, 3).unwrap();
        println!(
            "HVS2(beta={beta}, gamma={gamma}, tau={tau}): outer even {} / odd {}",
            even.outer_dim, odd.outer_dim
        );
    }
}
