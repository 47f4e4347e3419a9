//! Solve the key functional equation
//!   (x + b y) f(x+y, z) - (x + a y + z) f(x, z) - (c y - z) f(x, y+z) = 0
//! for polynomial f(x, y) under a degree bound, at several constant triples.

use confkernel::poly::rat;
use confkernel::solver::solve_keyeq;
use confkernel::Rational;

fn show(a: Rational, b: Rational, c: Rational) {
    let sol = solve_keyeq(&a, &b, &c, 4).unwrap();
    let basis: Vec<String> = sol
        .vectors
        .iter()
        .map(|v| v[0].to_string())
        .collect();
    println!("(a, b, c) = ({a}, {b}, {c}): dim {} {:?}", sol.dimension, basis);
}

fn main() {
    // c != 0: solutions graded by a - b + c
    show(rat(1, 1), rat(0, 1), rat(1, 1)); // x (x + y)
    show(rat(1, 1), rat(1, 1), rat(2, 1)); // (x + y)(x + y/2)
    show(rat(5, 3), rat(-2, 3), rat(2, 3)); // cubic (x - y)(x + y/2)(x + 2y)
    show(rat(1, 1), rat(0, 1), rat(2, 1)); // x (x + y/2)(x + y)

    // c = 0: solutions graded by a - b
    show(rat(0, 1), rat(0, 1), rat(0, 1)); // constants
    show(rat(1, 1), rat(0, 1), rat(0, 1)); // span{x, y}
    show(rat(1, 1), rat(-2, 1), rat(0, 1)); // y (x + y)(x + 2y)

    // generic constants admit no nonzero polynomial solution
    show(rat(3, 2), rat(2, 1), rat(1, 1));
}
