//! Bracket tables for finite Lie conformal superalgebras, the λ-bracket
//! calculus on elements, and the axiom checkers.
//!
//! An algebra is a free ℂ[∂]-module over generators `e_0..e_{n-1}` with the
//! λ-bracket presented by structure polynomials `B[i][j][k](∂, λ)`:
//!
//! ```text
//!   [e_i λ e_j] = Σ_k B[i][j][k](∂, λ) e_k
//! ```
//!
//! extended by sesquilinearity: `[p(∂)a λ q(∂)b] = p(-λ) q(∂+λ) [a λ b]`.
//! Structure polynomials may involve rational or symbolic parameters; all
//! checks here are identities in the polynomial ring, so a pass with a
//! symbolic parameter is a proof for every value of it.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poly::{Polynomial, Rational, Ring, Role};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn product_sign(self, other: Parity) -> Rational {
        if self == Parity::Odd && other == Parity::Odd {
            -Rational::from_integer(1.into())
        } else {
            Rational::from_integer(1.into())
        }
    }
}

/// A named parameter of an algebra family, with its domain restriction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    /// True when the family requires the parameter to be nonzero (ℂ*).
    pub nonzero: bool,
}

#[derive(Clone, Debug)]
pub struct LcsAlgebra {
    pub name: String,
    ring: Arc<Ring>,
    gens: Vec<String>,
    parities: Vec<Parity>,
    /// `table[i][j][k]` is B\[i\]\[j\]\[k\](∂, λ).
    table: Vec<Vec<Vec<Polynomial>>>,
    params: Vec<Param>,
}

impl PartialEq for LcsAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && *self.ring == *other.ring
            && self.gens == other.gens
            && self.parities == other.parities
            && self.table == other.table
            && self.params == other.params
    }
}

impl LcsAlgebra {
    pub fn new(
        name: impl Into<String>,
        ring: &Arc<Ring>,
        gens: Vec<(String, Parity)>,
        table: Vec<Vec<Vec<Polynomial>>>,
        params: Vec<Param>,
    ) -> Result<LcsAlgebra> {
        let n = gens.len();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n))
        {
            return Err(Error::Shape(format!(
                "bracket table must be {n}x{n}x{n} for {n} generators"
            )));
        }
        let mu = ring.index_of("mu");
        let nu = ring.index_of("nu");
        for row in &table {
            for cell in row {
                for p in cell {
                    if **p.ring() != **ring {
                        return Err(Error::RingMismatch(
                            "algebra ring".into(),
                            "table entry ring".into(),
                        ));
                    }
                    for idx in [mu, nu].into_iter().flatten() {
                        if p.uses(idx) {
                            return Err(Error::Shape(
                                "table entries may only involve del, lam and parameters".into(),
                            ));
                        }
                    }
                }
            }
        }
        for p in &params {
            if ring.index_of(&p.name).is_none() && !p.name.is_empty() {
                // parameters fixed to rational values are not ring indeterminates
            }
        }
        let (gens, parities) = gens.into_iter().unzip();
        Ok(LcsAlgebra {
            name: name.into(),
            ring: Arc::clone(ring),
            gens,
            parities,
            table,
            params,
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn gen_index(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.table[i][j][k]
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    /// Indices of symbolic parameters actually present in the ring.
    pub fn symbolic_params(&self) -> Vec<usize> {
        (0..self.ring.arity())
            .filter(|&i| self.ring.role(i) == Role::Parameter)
            .collect()
    }

    /// Indices of the generators of a given parity.
    pub fn gens_of_parity(&self, parity: Parity) -> Vec<usize> {
        (0..self.num_gens())
            .filter(|&i| self.parities[i] == parity)
            .collect()
    }

    fn sign(&self, i: usize, j: usize) -> Rational {
        self.parities[i].product_sign(self.parities[j])
    }

    pub fn zero_element(&self) -> Element {
        Element {
            coeffs: vec![Polynomial::zero(&self.ring); self.num_gens()],
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero_element();
        e.coeffs[i] = Polynomial::one(&self.ring);
        e
    }

    /// λ-bracket of two elements; the result lives in ℂ[∂, λ]-coefficients.
    pub fn bracket(&self, a: &Element, b: &Element) -> Result<LambdaElement> {
        let n = self.num_gens();
        if a.coeffs.len() != n || b.coeffs.len() != n {
            return Err(Error::GeneratorCount {
                expected: n,
                got: a.coeffs.len().max(b.coeffs.len()),
            });
        }
        let neg_lam = Polynomial::var(&self.ring, "lam")?.neg();
        let del_plus_lam = Polynomial::var(&self.ring, "del")?
            .add(&Polynomial::var(&self.ring, "lam")?)?;
        let mut out = vec![Polynomial::zero(&self.ring); n];
        for i in 0..n {
            if a.coeffs[i].is_zero() {
                continue;
            }
            let p_shift = a.coeffs[i].substitute_by_name(&[("del", neg_lam.clone())])?;
            for j in 0..n {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let q_shift = b.coeffs[j].substitute_by_name(&[("del", del_plus_lam.clone())])?;
                let factor = p_shift.mul(&q_shift)?;
                if factor.is_zero() {
                    continue;
                }
                for k in 0..n {
                    if self.table[i][j][k].is_zero() {
                        continue;
                    }
                    let term = factor.mul(&self.table[i][j][k])?;
                    out[k] = out[k].add(&term)?;
                }
            }
        }
        Ok(LambdaElement { coeffs: out })
    }

    /// Parity of a homogeneous element; errors when parities are mixed.
    pub fn element_parity(&self, a: &Element) -> Result<Parity> {
        let mut parity = None;
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match parity {
                None => parity = Some(self.parities[i]),
                Some(p) if p == self.parities[i] => {}
                Some(_) => return Err(Error::NotHomogeneous),
            }
        }
        parity.ok_or(Error::NotHomogeneous)
    }

    /// Every nonzero B\[i\]\[j\]\[k\] must land in the parity |i|+|j|.
    pub fn check_parity_closure(&self) -> CheckOutcome {
        let mut violations = Vec::new();
        let n = self.num_gens();
        for i in 0..n {
            for j in 0..n {
                let expect = if self.parities[i] == self.parities[j] {
                    Parity::Even
                } else {
                    Parity::Odd
                };
                for k in 0..n {
                    if !self.table[i][j][k].is_zero() && self.parities[k] != expect {
                        violations.push(Violation {
                            context: format!("[{} _ {}]", self.gens[i], self.gens[j]),
                            component: self.gens[k].clone(),
                            residual: self.table[i][j][k].to_string(),
                        });
                    }
                }
            }
        }
        CheckOutcome::new("parity-closure", violations)
    }

    /// Skew-symmetry: B\[i\]\[j\]\[k\](∂,λ) + (-1)^{|i||j|} B\[j\]\[i\]\[k\](∂,-∂-λ) = 0.
    pub fn check_skew_symmetry(&self) -> Result<CheckOutcome> {
        let n = self.num_gens();
        let neg = Polynomial::var(&self.ring, "del")?
            .add(&Polynomial::var(&self.ring, "lam")?)?
            .neg();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let sign = self.sign(i, j);
                for k in 0..n {
                    let flipped = self.table[j][i][k]
                        .substitute_by_name(&[("lam", neg.clone())])?
                        .scale(&sign);
                    let residual = self.table[i][j][k].add(&flipped)?;
                    if !residual.is_zero() {
                        violations.push(Violation {
                            context: format!("[{} _ {}]", self.gens[i], self.gens[j]),
                            component: self.gens[k].clone(),
                            residual: residual.to_string(),
                        });
                    }
                }
            }
        }
        Ok(CheckOutcome::new("skew-symmetry", violations))
    }

    /// Residuals of the Jacobi identity
    /// `[e_i λ [e_j μ e_k]] - [[e_i λ e_j] λ+μ e_k] - (-1)^{|i||j|} [e_j μ [e_i λ e_k]]`
    /// for one generator triple, indexed by output component.
    pub fn jacobi_residual(&self, i: usize, j: usize, k: usize) -> Result<Vec<Polynomial>> {
        let n = self.num_gens();
        let r = &self.ring;
        let del = Polynomial::var(r, "del")?;
        let lam = Polynomial::var(r, "lam")?;
        let mu = Polynomial::var(r, "mu")?;
        let del_lam = del.add(&lam)?;
        let del_mu = del.add(&mu)?;
        let lam_mu = lam.add(&mu)?;
        let neg_lam_mu = lam_mu.neg();
        let sign = self.sign(i, j);

        let mut residual = vec![Polynomial::zero(r); n];
        for m in 0..n {
            // LHS: [e_i λ [e_j μ e_k]]
            if !self.table[j][k][m].is_zero() {
                let outer = self.table[j][k][m]
                    .substitute_by_name(&[("del", del_lam.clone()), ("lam", mu.clone())])?;
                for nn in 0..n {
                    if self.table[i][m][nn].is_zero() {
                        continue;
                    }
                    residual[nn] = residual[nn].add(&outer.mul(&self.table[i][m][nn])?)?;
                }
            }
            // RHS part 1: [[e_i λ e_j] λ+μ e_k]
            if !self.table[i][j][m].is_zero() {
                let inner = self.table[i][j][m]
                    .substitute_by_name(&[("del", neg_lam_mu.clone())])?;
                for nn in 0..n {
                    if self.table[m][k][nn].is_zero() {
                        continue;
                    }
                    let outer = self.table[m][k][nn]
                        .substitute_by_name(&[("lam", lam_mu.clone())])?;
                    residual[nn] = residual[nn].sub(&inner.mul(&outer)?)?;
                }
            }
            // RHS part 2: (-1)^{|i||j|} [e_j μ [e_i λ e_k]]
            if !self.table[i][k][m].is_zero() {
                let outer = self.table[i][k][m]
                    .substitute_by_name(&[("del", del_mu.clone())])?
                    .scale(&sign);
                for nn in 0..n {
                    if self.table[j][m][nn].is_zero() {
                        continue;
                    }
                    let inner = self.table[j][m][nn]
                        .substitute_by_name(&[("lam", mu.clone())])?;
                    residual[nn] = residual[nn].sub(&outer.mul(&inner)?)?;
                }
            }
        }
        Ok(residual)
    }

    /// Jacobi identity over all generator triples (parallelized; the
    /// violation list is in deterministic (i, j, k, component) order).
    pub fn check_jacobi(&self) -> Result<CheckOutcome> {
        let n = self.num_gens();
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
            .collect();
        let results: Vec<Result<Vec<Violation>>> = triples
            .par_iter()
            .map(|&(i, j, k)| {
                let residual = self.jacobi_residual(i, j, k)?;
                let mut out = Vec::new();
                for (nn, poly) in residual.iter().enumerate() {
                    if !poly.is_zero() {
                        out.push(Violation {
                            context: format!(
                                "({}, {}, {})",
                                self.gens[i], self.gens[j], self.gens[k]
                            ),
                            component: self.gens[nn].clone(),
                            residual: poly.to_string(),
                        });
                    }
                }
                Ok(out)
            })
            .collect();
        let mut violations = Vec::new();
        for r in results {
            violations.extend(r?);
        }
        Ok(CheckOutcome::new("jacobi", violations))
    }

    /// Run all three axiom checks.
    pub fn check_all(&self) -> Result<Vec<CheckOutcome>> {
        Ok(vec![
            self.check_parity_closure(),
            self.check_skew_symmetry()?,
            self.check_jacobi()?,
        ])
    }
}

/// Element of the algebra: ℂ[∂]-coefficients on the generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub coeffs: Vec<Polynomial>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Result of a λ-bracket: coefficients live in ℂ[∂, λ].
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaElement {
    pub coeffs: Vec<Polynomial>,
}

impl LambdaElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    /// The generators (or generator triple) the residual came from.
    pub context: String,
    /// Output component carrying the residual.
    pub component: String,
    /// The nonzero residual polynomial, rendered canonically.
    pub residual: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl CheckOutcome {
    pub fn new(check: &str, violations: Vec<Violation>) -> CheckOutcome {
        CheckOutcome {
            check: check.into(),
            passed: violations.is_empty(),
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::poly::rat;

    #[test]
    fn virasoro_passes_all_axioms() {
        let alg = catalog::build_algebra("Vir", &Default::default()).unwrap();
        for outcome in alg.check_all().unwrap() {
            assert!(outcome.passed, "{}: {:?}", outcome.check, outcome.violations);
        }
    }

    #[test]
    fn virasoro_bracket_of_generators() {
        let alg = catalog::build_algebra("Vir", &Default::default()).unwrap();
        let l = alg.generator(0);
        let out = alg.bracket(&l, &l).unwrap();
        let expect = Polynomial::parse("del + 2*lam", alg.ring()).unwrap();
        assert_eq!(out.coeffs[0], expect);
    }

    #[test]
    fn sesquilinearity_left_partial() {
        // [∂L λ L] = -λ [L λ L]
        let alg = catalog::build_algebra("Vir", &Default::default()).unwrap();
        let mut dl = alg.generator(0);
        dl.coeffs[0] = Polynomial::parse("del", alg.ring()).unwrap();
        let l = alg.generator(0);
        let lhs = alg.bracket(&dl, &l).unwrap();
        let expect = Polynomial::parse("-lam*(del + 2*lam)", alg.ring()).unwrap();
        assert_eq!(lhs.coeffs[0], expect);
    }

    #[test]
    fn sesquilinearity_right_partial() {
        // [L λ ∂L] = (∂+λ) [L λ L]
        let alg = catalog::build_algebra("Vir", &Default::default()).unwrap();
        let mut dl = alg.generator(0);
        dl.coeffs[0] = Polynomial::parse("del", alg.ring()).unwrap();
        let l = alg.generator(0);
        let lhs = alg.bracket(&l, &dl).unwrap();
        let expect = Polynomial::parse("(del + lam)*(del + 2*lam)", alg.ring()).unwrap();
        assert_eq!(lhs.coeffs[0], expect);
    }

    #[test]
    fn broken_table_fails_jacobi() {
        // [L λ L] = (∂ + 2λ)³ L is skew-symmetric but violates Jacobi
        let ring = crate::poly::Ring::new(&["lam", "mu", "nu"], &[]);
        let b = Polynomial::parse("(del + 2*lam)^3", &ring).unwrap();
        let alg = LcsAlgebra::new(
            "broken",
            &ring,
            vec![("L".into(), Parity::Even)],
            vec![vec![vec![b]]],
            vec![],
        )
        .unwrap();
        assert!(alg.check_skew_symmetry().unwrap().passed);
        let jac = alg.check_jacobi().unwrap();
        assert!(!jac.passed);
        assert!(!jac.violations.is_empty());
    }

    #[test]
    fn broken_skew_is_detected() {
        // even generator with [X λ X] = λ X: fails skew ((λ) + (-∂-λ) = -∂ ≠ 0)
        let ring = crate::poly::Ring::new(&["lam", "mu", "nu"], &[]);
        let b = Polynomial::parse("lam", &ring).unwrap();
        let alg = LcsAlgebra::new(
            "skewless",
            &ring,
            vec![("X".into(), Parity::Even)],
            vec![vec![vec![b]]],
            vec![],
        )
        .unwrap();
        assert!(!alg.check_skew_symmetry().unwrap().passed);
    }

    #[test]
    fn parity_closure_violation() {
        // even-even bracket landing on an odd generator
        let ring = crate::poly::Ring::new(&["lam", "mu", "nu"], &[]);
        let zero = Polynomial::zero(&ring);
        let one = Polynomial::one(&ring);
        let mut table = vec![vec![vec![zero.clone(), zero.clone()]; 2]; 2];
        table[0][0][1] = one;
        let alg = LcsAlgebra::new(
            "bad-parity",
            &ring,
            vec![("A".into(), Parity::Even), ("B".into(), Parity::Odd)],
            table,
            vec![],
        )
        .unwrap();
        assert!(!alg.check_parity_closure().passed);
    }

    #[test]
    fn element_parity_detection() {
        let alg = catalog::build_algebra("NS", &Default::default()).unwrap();
        let l = alg.generator(0);
        let g = alg.generator(1);
        assert_eq!(alg.element_parity(&l).unwrap(), Parity::Even);
        assert_eq!(alg.element_parity(&g).unwrap(), Parity::Odd);
        let mut mixed = alg.generator(0);
        mixed.coeffs[1] = Polynomial::one(alg.ring());
        assert!(matches!(alg.element_parity(&mixed), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn ns_odd_bracket() {
        let alg = catalog::build_algebra("NS", &Default::default()).unwrap();
        let g = alg.generator(1);
        let out = alg.bracket(&g, &g).unwrap();
        assert_eq!(out.coeffs[0], Polynomial::constant(alg.ring(), rat(2, 1)));
        assert!(out.coeffs[1].is_zero());
    }
}
