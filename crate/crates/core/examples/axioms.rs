//! Run the full axiom suite (parity closure, skew-symmetry, Jacobi) over
//! every built-in algebra with all parameters left symbolic.

use confkernel::catalog::{self, ParamValue, Params};

fn main() {
    for entry in catalog::list() {
        let params: Params = entry
            .params
            .iter()
            .map(|(name, _, _)| (name.clone(), ParamValue::Symbolic))
            .collect();
        let alg = catalog::build_algebra(entry.key, &params).expect("catalog entry builds");
        let outcomes = alg.check_all().expect("checks run");
        let all_pass = outcomes.iter().all(|o| o.passed);
        println!(
            "{:<12} {:<40} {}",
            entry.key,
            entry.description,
            if all_pass { "pass" } else { "FAIL" }
        );
        for outcome in outcomes.iter().filter(|o| !o.passed) {
            for v in &outcome.violations {
                println!("    {} {} [{}]: {}", outcome.check, v.context, v.component, v.residual);
            }
        }
    }
}
