//! Conformal linear maps on a fixed algebra: application, adjoint maps,
//! derivation checking, ℂ[∂]-linear endomorphisms, homomorphism and
//! automorphism checking, and composition.

use std::path::Path;

use crate::algebra::{CheckOutcome, Element, LambdaElement, LcsAlgebra, Parity, Violation};
use crate::catalog::parse_bracket_rhs;
use crate::poly::{Polynomial, Rational};
use crate::{Error, Result};

fn parity_sum(a: Parity, theta: Parity) -> Parity {
    if theta == Parity::Odd {
        a.flip()
    } else {
        a
    }
}

/// Conformal linear map of degree θ: φ_λ e_i = Σ_j D\[i\]\[j\](∂,λ) e_j,
/// extended by φ_λ(p(∂)v) = p(∂+λ) φ_λ(v).
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalEnd {
    pub name: String,
    pub parity: Parity,
    matrix: Vec<Vec<Polynomial>>,
}

/// ℂ[∂]-linear parity-preserving endomorphism: σ(e_i) = Σ_j S\[i\]\[j\](∂) e_j,
/// extended by σ(p(∂)v) = p(∂) σ(v).
#[derive(Clone, Debug, PartialEq)]
pub struct PartialEndo {
    pub name: String,
    matrix: Vec<Vec<Polynomial>>,
}

fn check_matrix_shape(alg: &LcsAlgebra, matrix: &[Vec<Polynomial>]) -> Result<()> {
    let n = alg.num_gens();
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("map matrix must be {n}x{n}")));
    }
    for row in matrix {
        for p in row {
            if **p.ring() != **alg.ring() {
                return Err(Error::RingMismatch(
                    "algebra ring".into(),
                    "map entry ring".into(),
                ));
            }
            for v in ["mu", "nu"] {
                if let Some(idx) = alg.ring().index_of(v) {
                    if p.uses(idx) {
                        return Err(Error::Shape(format!("map entries may not involve {v}")));
                    }
                }
            }
        }
    }
    Ok(())
}

impl ConformalEnd {
    pub fn new(
        alg: &LcsAlgebra,
        name: impl Into<String>,
        parity: Parity,
        matrix: Vec<Vec<Polynomial>>,
    ) -> Result<ConformalEnd> {
        check_matrix_shape(alg, &matrix)?;
        for (i, row) in matrix.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() && alg.parity(j) != parity_sum(alg.parity(i), parity) {
                    return Err(Error::Shape(format!(
                        "degree-{parity:?} map cannot send {} into {}",
                        alg.gens()[i],
                        alg.gens()[j]
                    )));
                }
            }
        }
        Ok(ConformalEnd {
            name: name.into(),
            parity,
            matrix,
        })
    }

    /// Build from image lines in the map file syntax, e.g. `("L", "(1) * H")`.
    pub fn from_images(
        alg: &LcsAlgebra,
        name: &str,
        parity: Parity,
        images: &[(&str, &str)],
    ) -> Result<ConformalEnd> {
        ConformalEnd::new(alg, name, parity, images_to_matrix(alg, images)?)
    }

    pub fn matrix(&self) -> &[Vec<Polynomial>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.matrix[i][j]
    }

    /// φ_λ(x) for an algebra element x.
    pub fn apply(&self, alg: &LcsAlgebra, x: &Element) -> Result<LambdaElement> {
        let n = alg.num_gens();
        if x.coeffs.len() != n {
            return Err(Error::GeneratorCount {
                expected: n,
                got: x.coeffs.len(),
            });
        }
        let shift = Polynomial::var(alg.ring(), "del")?.add(&Polynomial::var(alg.ring(), "lam")?)?;
        let mut out = vec![Polynomial::zero(alg.ring()); n];
        for i in 0..n {
            if x.coeffs[i].is_zero() {
                continue;
            }
            let p = x.coeffs[i].substitute_by_name(&[("del", shift.clone())])?;
            for j in 0..n {
                if self.matrix[i][j].is_zero() {
                    continue;
                }
                out[j] = out[j].add(&p.mul(&self.matrix[i][j])?)?;
            }
        }
        Ok(LambdaElement { coeffs: out })
    }

    /// φ∘σ as a conformal linear map: (φ∘σ)_λ v = φ_λ(σ(v)).
    pub fn compose_after(&self, alg: &LcsAlgebra, sigma: &PartialEndo) -> Result<ConformalEnd> {
        let n = alg.num_gens();
        let shift = Polynomial::var(alg.ring(), "del")?.add(&Polynomial::var(alg.ring(), "lam")?)?;
        let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
        for i in 0..n {
            for j in 0..n {
                if sigma.matrix[i][j].is_zero() {
                    continue;
                }
                let s = sigma.matrix[i][j].substitute_by_name(&[("del", shift.clone())])?;
                for k in 0..n {
                    if self.matrix[j][k].is_zero() {
                        continue;
                    }
                    matrix[i][k] = matrix[i][k].add(&s.mul(&self.matrix[j][k])?)?;
                }
            }
        }
        ConformalEnd::new(
            alg,
            format!("{}*{}", self.name, sigma.name),
            self.parity,
            matrix,
        )
    }
}

impl PartialEndo {
    pub fn new(
        alg: &LcsAlgebra,
        name: impl Into<String>,
        matrix: Vec<Vec<Polynomial>>,
    ) -> Result<PartialEndo> {
        check_matrix_shape(alg, &matrix)?;
        if let Some(lam) = alg.ring().index_of("lam") {
            for row in &matrix {
                for p in row {
                    if p.uses(lam) {
                        return Err(Error::Shape(
                            "endomorphism entries must be polynomials in del only".into(),
                        ));
                    }
                }
            }
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() && alg.parity(j) != alg.parity(i) {
                    return Err(Error::Shape(format!(
                        "endomorphism cannot send {} into {}",
                        alg.gens()[i],
                        alg.gens()[j]
                    )));
                }
            }
        }
        Ok(PartialEndo {
            name: name.into(),
            matrix,
        })
    }

    pub fn from_images(alg: &LcsAlgebra, name: &str, images: &[(&str, &str)]) -> Result<PartialEndo> {
        PartialEndo::new(alg, name, images_to_matrix(alg, images)?)
    }

    pub fn identity(alg: &LcsAlgebra) -> PartialEndo {
        let n = alg.num_gens();
        let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = Polynomial::one(alg.ring());
        }
        PartialEndo {
            name: "id".into(),
            matrix,
        }
    }

    pub fn matrix(&self) -> &[Vec<Polynomial>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.matrix[i][j]
    }

    pub fn apply(&self, alg: &LcsAlgebra, x: &Element) -> Result<Element> {
        let n = alg.num_gens();
        let mut out = vec![Polynomial::zero(alg.ring()); n];
        for i in 0..n {
            if x.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if self.matrix[i][j].is_zero() {
                    continue;
                }
                out[j] = out[j].add(&x.coeffs[i].mul(&self.matrix[i][j])?)?;
            }
        }
        Ok(Element { coeffs: out })
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, alg: &LcsAlgebra, other: &PartialEndo) -> Result<PartialEndo> {
        let n = alg.num_gens();
        let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
        for i in 0..n {
            for j in 0..n {
                if other.matrix[i][j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    if self.matrix[j][k].is_zero() {
                        continue;
                    }
                    matrix[i][k] =
                        matrix[i][k].add(&other.matrix[i][j].mul(&self.matrix[j][k])?)?;
                }
            }
        }
        PartialEndo::new(alg, format!("{}*{}", self.name, other.name), matrix)
    }

    /// σ∘φ as a conformal linear map: v ↦ σ(φ_λ v).
    pub fn compose_after_conf(&self, alg: &LcsAlgebra, phi: &ConformalEnd) -> Result<ConformalEnd> {
        let n = alg.num_gens();
        let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
        for i in 0..n {
            for j in 0..n {
                if phi.matrix[i][j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    if self.matrix[j][k].is_zero() {
                        continue;
                    }
                    matrix[i][k] = matrix[i][k].add(&phi.matrix[i][j].mul(&self.matrix[j][k])?)?;
                }
            }
        }
        ConformalEnd::new(alg, format!("{}*{}", self.name, phi.name), phi.parity, matrix)
    }
}

fn images_to_matrix(alg: &LcsAlgebra, images: &[(&str, &str)]) -> Result<Vec<Vec<Polynomial>>> {
    let n = alg.num_gens();
    let gens: Vec<(String, Parity)> = alg
        .gens()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), alg.parity(i)))
        .collect();
    let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
    for (gen, rhs) in images {
        let i = alg.gen_index(gen)?;
        matrix[i] = parse_bracket_rhs(rhs, alg.ring(), &gens)?;
    }
    Ok(matrix)
}

/// Adjoint map of a homogeneous element: (ad x)_λ e_j = [x_λ e_j].
pub fn ad(alg: &LcsAlgebra, x: &Element) -> Result<ConformalEnd> {
    let parity = alg.element_parity(x)?;
    let n = alg.num_gens();
    let neg_lam = Polynomial::var(alg.ring(), "lam")?.neg();
    let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
    for i in 0..n {
        if x.coeffs[i].is_zero() {
            continue;
        }
        let p = x.coeffs[i].substitute_by_name(&[("del", neg_lam.clone())])?;
        for j in 0..n {
            for k in 0..n {
                if alg.structure(i, j, k).is_zero() {
                    continue;
                }
                matrix[j][k] = matrix[j][k].add(&p.mul(alg.structure(i, j, k))?)?;
            }
        }
    }
    ConformalEnd::new(alg, "ad", parity, matrix)
}

/// Conformal derivation check:
/// d_λ [e_i μ e_j] = [(d_λ e_i)_{λ+μ} e_j] + (-1)^{|i|θ} [e_i μ (d_λ e_j)].
pub fn is_derivation(alg: &LcsAlgebra, d: &ConformalEnd) -> Result<CheckOutcome> {
    let n = alg.num_gens();
    let r = alg.ring();
    let del = Polynomial::var(r, "del")?;
    let lam = Polynomial::var(r, "lam")?;
    let mu = Polynomial::var(r, "mu")?;
    let del_lam = del.add(&lam)?;
    let del_mu = del.add(&mu)?;
    let lam_mu = lam.add(&mu)?;
    let neg_lam_mu = lam_mu.neg();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let sign = if alg.parity(i) == Parity::Odd && d.parity == Parity::Odd {
                -Rational::from_integer(1.into())
            } else {
                Rational::from_integer(1.into())
            };
            let mut residual = vec![Polynomial::zero(r); n];
            for k in 0..n {
                // d_λ applied to [e_i μ e_j]
                if !alg.structure(i, j, k).is_zero() {
                    let b = alg
                        .structure(i, j, k)
                        .substitute_by_name(&[("del", del_lam.clone()), ("lam", mu.clone())])?;
                    for nn in 0..n {
                        if d.matrix[k][nn].is_zero() {
                            continue;
                        }
                        residual[nn] = residual[nn].add(&b.mul(&d.matrix[k][nn])?)?;
                    }
                }
                // [(d_λ e_i)_{λ+μ} e_j]
                if !d.matrix[i][k].is_zero() {
                    let dm = d
                        .matrix[i][k]
                        .substitute_by_name(&[("del", neg_lam_mu.clone())])?;
                    for nn in 0..n {
                        if alg.structure(k, j, nn).is_zero() {
                            continue;
                        }
                        let b = alg
                            .structure(k, j, nn)
                            .substitute_by_name(&[("lam", lam_mu.clone())])?;
                        residual[nn] = residual[nn].sub(&dm.mul(&b)?)?;
                    }
                }
                // (-1)^{|i|θ} [e_i μ (d_λ e_j)]
                if !d.matrix[j][k].is_zero() {
                    let dm = d
                        .matrix[j][k]
                        .substitute_by_name(&[("del", del_mu.clone())])?
                        .scale(&sign);
                    for nn in 0..n {
                        if alg.structure(i, k, nn).is_zero() {
                            continue;
                        }
                        let b = alg
                            .structure(i, k, nn)
                            .substitute_by_name(&[("lam", mu.clone())])?;
                        residual[nn] = residual[nn].sub(&dm.mul(&b)?)?;
                    }
                }
            }
            for (nn, poly) in residual.iter().enumerate() {
                if !poly.is_zero() {
                    violations.push(Violation {
                        context: format!("({}, {})", alg.gens()[i], alg.gens()[j]),
                        component: alg.gens()[nn].clone(),
                        residual: poly.to_string(),
                    });
                }
            }
        }
    }
    Ok(CheckOutcome::new("derivation", violations))
}

/// Homomorphism check σ([a_λ b]) = [σ(a)_λ σ(b)] on all generator pairs.
pub fn is_homomorphism(
    sigma: &PartialEndo,
    alg_a: &LcsAlgebra,
    alg_b: &LcsAlgebra,
) -> Result<CheckOutcome> {
    let n = alg_a.num_gens();
    if alg_b.num_gens() != n {
        return Err(Error::GeneratorCount {
            expected: n,
            got: alg_b.num_gens(),
        });
    }
    if **alg_a.ring() != **alg_b.ring() {
        return Err(Error::RingMismatch(
            "source algebra ring".into(),
            "target algebra ring".into(),
        ));
    }
    for i in 0..n {
        if alg_a.parity(i) != alg_b.parity(i) {
            return Err(Error::Precondition(format!(
                "generator parities differ at index {i}"
            )));
        }
    }
    let r = alg_a.ring();
    let neg_lam = Polynomial::var(r, "lam")?.neg();
    let del_lam = Polynomial::var(r, "del")?.add(&Polynomial::var(r, "lam")?)?;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut residual = vec![Polynomial::zero(r); n];
            // σ applied to [e_i λ e_j]_A
            for k in 0..n {
                if alg_a.structure(i, j, k).is_zero() {
                    continue;
                }
                for nn in 0..n {
                    if sigma.matrix[k][nn].is_zero() {
                        continue;
                    }
                    residual[nn] =
                        residual[nn].add(&alg_a.structure(i, j, k).mul(&sigma.matrix[k][nn])?)?;
                }
            }
            // [σ(e_i) λ σ(e_j)]_B via sesquilinear extension
            for m in 0..n {
                if sigma.matrix[i][m].is_zero() {
                    continue;
                }
                let sm = sigma.matrix[i][m].substitute_by_name(&[("del", neg_lam.clone())])?;
                for l in 0..n {
                    if sigma.matrix[j][l].is_zero() {
                        continue;
                    }
                    let sl = sigma.matrix[j][l].substitute_by_name(&[("del", del_lam.clone())])?;
                    let factor = sm.mul(&sl)?;
                    for nn in 0..n {
                        if alg_b.structure(m, l, nn).is_zero() {
                            continue;
                        }
                        residual[nn] =
                            residual[nn].sub(&factor.mul(alg_b.structure(m, l, nn))?)?;
                    }
                }
            }
            for (nn, poly) in residual.iter().enumerate() {
                if !poly.is_zero() {
                    violations.push(Violation {
                        context: format!("({}, {})", alg_a.gens()[i], alg_a.gens()[j]),
                        component: alg_b.gens()[nn].clone(),
                        residual: poly.to_string(),
                    });
                }
            }
        }
    }
    Ok(CheckOutcome::new("homomorphism", violations))
}

/// Determinant by Laplace expansion (matrices here are at most 3x3).
fn determinant(m: &[Vec<Polynomial>], ring: &std::sync::Arc<crate::Ring>) -> Result<Polynomial> {
    let n = m.len();
    if n == 0 {
        return Ok(Polynomial::one(ring));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut det = Polynomial::zero(ring);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&determinant(&minor, ring)?)?;
        if j % 2 == 0 {
            det = det.add(&term)?;
        } else {
            det = det.sub(&term)?;
        }
    }
    Ok(det)
}

/// Automorphism check: homomorphism plus invertibility, where each
/// parity block's determinant must be a nonzero rational constant (the
/// units of a polynomial ring over a field).
pub fn is_automorphism(sigma: &PartialEndo, alg: &LcsAlgebra) -> Result<CheckOutcome> {
    let homo = is_homomorphism(sigma, alg, alg)?;
    let mut violations = homo.violations;
    for parity in [Parity::Even, Parity::Odd] {
        let idx = alg.gens_of_parity(parity);
        if idx.is_empty() {
            continue;
        }
        let block: Vec<Vec<Polynomial>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| sigma.matrix[i][j].clone()).collect())
            .collect();
        let det = determinant(&block, alg.ring())?;
        let unit = !det.is_zero() && det.total_degree() == Some(0);
        if !unit {
            violations.push(Violation {
                context: format!("{parity:?} block"),
                component: "determinant".into(),
                residual: det.to_string(),
            });
        }
    }
    Ok(CheckOutcome::new("automorphism", violations))
}

// ---------------------------------------------------------------------------
// Map file format:
//   map <name> parity even|odd
//   image <gen> = <poly-expr> * <gen> (+ ...)* | 0
// ---------------------------------------------------------------------------

fn parse_map_text(
    text: &str,
    origin: &str,
    alg: &LcsAlgebra,
) -> Result<(String, Parity, Vec<Vec<Polynomial>>)> {
    let fail = |line: usize, msg: String| Error::Format {
        path: origin.into(),
        line,
        msg,
    };
    let mut header: Option<(String, Parity)> = None;
    let n = alg.num_gens();
    let gens: Vec<(String, Parity)> = alg
        .gens()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), alg.parity(i)))
        .collect();
    let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "map" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words.as_slice() {
                    [name, "parity", p] => {
                        let parity = match *p {
                            "even" => Parity::Even,
                            "odd" => Parity::Odd,
                            other => {
                                return Err(fail(lineno, format!("bad parity `{other}`")))
                            }
                        };
                        header = Some((name.to_string(), parity));
                    }
                    _ => return Err(fail(lineno, "expected `map <name> parity even|odd`".into())),
                }
            }
            "image" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| fail(lineno, "image line needs `=`".into()))?;
                let gen = lhs.trim();
                let i = alg
                    .gen_index(gen)
                    .map_err(|e| fail(lineno, e.to_string()))?;
                matrix[i] = parse_bracket_rhs(rhs, alg.ring(), &gens)
                    .map_err(|e| fail(lineno, e.to_string()))?;
            }
            other => return Err(fail(lineno, format!("unknown directive `{other}`"))),
        }
    }
    let (name, parity) = header.ok_or_else(|| fail(0, "missing `map` header".into()))?;
    Ok((name, parity, matrix))
}

pub fn conformal_end_from_text(text: &str, origin: &str, alg: &LcsAlgebra) -> Result<ConformalEnd> {
    let (name, parity, matrix) = parse_map_text(text, origin, alg)?;
    ConformalEnd::new(alg, name, parity, matrix)
}

pub fn partial_endo_from_text(text: &str, origin: &str, alg: &LcsAlgebra) -> Result<PartialEndo> {
    let (name, parity, matrix) = parse_map_text(text, origin, alg)?;
    if parity != Parity::Even {
        return Err(Error::Format {
            path: origin.into(),
            line: 0,
            msg: "endomorphism files must declare parity even".into(),
        });
    }
    PartialEndo::new(alg, name, matrix)
}

pub fn load_conformal_end(path: impl AsRef<Path>, alg: &LcsAlgebra) -> Result<ConformalEnd> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    conformal_end_from_text(&text, &path.display().to_string(), alg)
}

pub fn load_partial_endo(path: impl AsRef<Path>, alg: &LcsAlgebra) -> Result<PartialEndo> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    partial_endo_from_text(&text, &path.display().to_string(), alg)
}
