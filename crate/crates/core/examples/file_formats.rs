//! Round-trip the text file formats for algebras and modules, and render
//! a deterministic report in both JSON and plain text.

use confkernel::catalog::{self, rational_params};
use confkernel::poly::rat;
use confkernel::report::Report;
use confkernel::{bider, modules};

fn main() {
    let alg = catalog::build_algebra("HVS", &rational_params(&[("alpha", rat(2, 1))])).unwrap();

    let text = catalog::to_text(&alg);
    println!("--- algebra file ---\n{text}");
    let back = catalog::from_text(&text, "roundtrip").unwrap();
    assert_eq!(catalog::to_text(&back), text);

    let m = modules::build_module(
        "T7.3-M4",
        &rational_params(&[("a", rat(1, 2)), ("k", rat(3, 1))]),
    )
    .unwrap();
    let text = modules::to_text(&m);
    println!("--- module file ---\n{text}");
    let back = modules::from_text(&text, "roundtrip").unwrap();
    assert_eq!(modules::to_text(&back), text);

    let phi = bider::inner_bider(&alg, &rat(1, 1));
    let text = bider::to_text(&alg, &phi);
    println!("--- bilinear map file ---\n{text}");

    let mut report = Report::new("example file-formats");
    report.add_input("algebra", catalog::to_text(&alg).as_bytes());
    report.push_checks(alg.check_all().unwrap());
    report.push_check(modules::is_module(&m).unwrap());
    println!("--- report (text) ---\n{}", report.to_text());
    println!("--- report (json) ---\n{}", report.to_json());
    assert_eq!(report.to_json(), Report::from_json(&report.to_json()).unwrap().to_json());
}
