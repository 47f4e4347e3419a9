//! Conformal bilinear maps and the biderivation axioms.
//!
//! A bilinear map is presented like a bracket table:
//! φ_λ(e_i, e_j) = Σ_k F\[i\]\[j\]\[k\](∂,λ) e_k, extended by
//! φ_λ(∂a, b) = −λ φ_λ(a,b) and φ_λ(a, ∂b) = (∂+λ) φ_λ(a,b).
//! Biderivations satisfy the argument-swap rule
//! φ_λ(a,b) = −(−1)^{|a||b|} φ_{−∂−λ}(b,a) and the Leibniz rule in the
//! second argument. No parity-homogeneity is imposed: a bilinear map may
//! shift parity (and the interesting non-inner examples do).

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::algebra::{CheckOutcome, LcsAlgebra, Parity, Violation};
use crate::catalog::{complete_table, parse_bracket_rhs};
use crate::poly::{Polynomial, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalBiMap {
    pub name: String,
    table: Vec<Vec<Vec<Polynomial>>>,
}

impl ConformalBiMap {
    pub fn new(
        alg: &LcsAlgebra,
        name: impl Into<String>,
        table: Vec<Vec<Vec<Polynomial>>>,
    ) -> Result<ConformalBiMap> {
        let n = alg.num_gens();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n))
        {
            return Err(Error::Shape(format!("bilinear table must be {n}x{n}x{n}")));
        }
        for row in &table {
            for cell in row {
                for p in cell {
                    if **p.ring() != **alg.ring() {
                        return Err(Error::RingMismatch(
                            "algebra ring".into(),
                            "bilinear entry ring".into(),
                        ));
                    }
                    for v in ["mu", "nu"] {
                        if let Some(idx) = alg.ring().index_of(v) {
                            if p.uses(idx) {
                                return Err(Error::Shape(format!(
                                    "bilinear entries may not involve {v}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(ConformalBiMap {
            name: name.into(),
            table,
        })
    }

    /// Build from pair lines in the bimap file syntax.
    pub fn from_pairs(
        alg: &LcsAlgebra,
        name: &str,
        pairs: &[(&str, &str, &str)],
    ) -> Result<ConformalBiMap> {
        let gens: Vec<(String, Parity)> = alg
            .gens()
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), alg.parity(i)))
            .collect();
        let mut specified = BTreeMap::new();
        for (g1, g2, rhs) in pairs {
            let i = alg.gen_index(g1)?;
            let j = alg.gen_index(g2)?;
            let comps = parse_bracket_rhs(rhs, alg.ring(), &gens)?;
            specified.insert((i, j), comps);
        }
        let table = complete_table(alg.ring(), &gens, specified)?;
        ConformalBiMap::new(alg, name, table)
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.table[i][j][k]
    }

    pub fn table(&self) -> &Vec<Vec<Vec<Polynomial>>> {
        &self.table
    }
}

/// ε·bracket: the inner biderivation attached to ε.
pub fn inner_bider(alg: &LcsAlgebra, eps: &Rational) -> ConformalBiMap {
    let n = alg.num_gens();
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| alg.structure(i, j, k).scale(eps)).collect())
                .collect()
        })
        .collect();
    ConformalBiMap {
        name: format!("inner({eps})"),
        table,
    }
}

/// Both biderivation axioms; one outcome per identity.
pub fn is_biderivation(alg: &LcsAlgebra, phi: &ConformalBiMap) -> Result<Vec<CheckOutcome>> {
    let n = alg.num_gens();
    let r = alg.ring();
    let neg = Polynomial::var(r, "del")?
        .add(&Polynomial::var(r, "lam")?)?
        .neg();

    let mut skew = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let sign = alg.parity(i).product_sign(alg.parity(j));
            for k in 0..n {
                let flipped = phi
                    .entry(j, i, k)
                    .substitute_by_name(&[("lam", neg.clone())])?
                    .scale(&sign);
                let residual = phi.entry(i, j, k).add(&flipped)?;
                if !residual.is_zero() {
                    skew.push(Violation {
                        context: format!("({}, {})", alg.gens()[i], alg.gens()[j]),
                        component: alg.gens()[k].clone(),
                        residual: residual.to_string(),
                    });
                }
            }
        }
    }

    let del = Polynomial::var(r, "del")?;
    let lam = Polynomial::var(r, "lam")?;
    let mu = Polynomial::var(r, "mu")?;
    let del_lam = del.add(&lam)?;
    let del_mu = del.add(&mu)?;
    let lam_mu = lam.add(&mu)?;
    let neg_lam_mu = lam_mu.neg();
    let mut leibniz = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let sign = alg.parity(i).product_sign(alg.parity(j));
            for k in 0..n {
                let mut residual = vec![Polynomial::zero(r); n];
                for m in 0..n {
                    // φ_λ(e_i, [e_j μ e_k])
                    if !alg.structure(j, k, m).is_zero() {
                        let b = alg
                            .structure(j, k, m)
                            .substitute_by_name(&[("del", del_lam.clone()), ("lam", mu.clone())])?;
                        for nn in 0..n {
                            if phi.entry(i, m, nn).is_zero() {
                                continue;
                            }
                            residual[nn] = residual[nn].add(&b.mul(phi.entry(i, m, nn))?)?;
                        }
                    }
                    // [φ_λ(e_i,e_j)_{λ+μ} e_k]
                    if !phi.entry(i, j, m).is_zero() {
                        let f = phi
                            .entry(i, j, m)
                            .substitute_by_name(&[("del", neg_lam_mu.clone())])?;
                        for nn in 0..n {
                            if alg.structure(m, k, nn).is_zero() {
                                continue;
                            }
                            let b = alg
                                .structure(m, k, nn)
                                .substitute_by_name(&[("lam", lam_mu.clone())])?;
                            residual[nn] = residual[nn].sub(&f.mul(&b)?)?;
                        }
                    }
                    // (−1)^{|i||j|} [e_j μ φ_λ(e_i,e_k)]
                    if !phi.entry(i, k, m).is_zero() {
                        let f = phi
                            .entry(i, k, m)
                            .substitute_by_name(&[("del", del_mu.clone())])?
                            .scale(&sign);
                        for nn in 0..n {
                            if alg.structure(j, m, nn).is_zero() {
                                continue;
                            }
                            let b = alg
                                .structure(j, m, nn)
                                .substitute_by_name(&[("lam", mu.clone())])?;
                            residual[nn] = residual[nn].sub(&f.mul(&b)?)?;
                        }
                    }
                }
                for (nn, poly) in residual.iter().enumerate() {
                    if !poly.is_zero() {
                        leibniz.push(Violation {
                            context: format!(
                                "({}, {}, {})",
                                alg.gens()[i],
                                alg.gens()[j],
                                alg.gens()[k]
                            ),
                            component: alg.gens()[nn].clone(),
                            residual: poly.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(vec![
        CheckOutcome::new("bimap-skew", skew),
        CheckOutcome::new("bimap-leibniz", leibniz),
    ])
}

/// Consistency identity every biderivation must satisfy:
/// [φ_λ(a,b)_{λ+ν} [c_μ d]] = [[a_λ b]_{λ+ν} φ_μ(c,d)].
/// The biderivation axioms are re-checked first and any failure is
/// reported as a precondition violation in the same outcome.
pub fn check_consistency(alg: &LcsAlgebra, phi: &ConformalBiMap) -> Result<CheckOutcome> {
    let mut violations = Vec::new();
    for outcome in is_biderivation(alg, phi)? {
        for v in outcome.violations {
            violations.push(Violation {
                context: format!("precondition {} {}", outcome.check, v.context),
                component: v.component,
                residual: v.residual,
            });
        }
    }

    let n = alg.num_gens();
    let r = alg.ring();
    let del = Polynomial::var(r, "del")?;
    let lam = Polynomial::var(r, "lam")?;
    let mu = Polynomial::var(r, "mu")?;
    let nu = Polynomial::var(r, "nu")?;
    let lam_nu = lam.add(&nu)?;
    let neg_lam_nu = lam_nu.neg();
    let del_lam_nu = del.add(&lam_nu)?;

    let tuples: Vec<(usize, usize, usize, usize)> = (0..n)
        .flat_map(|i| {
            (0..n).flat_map(move |j| {
                (0..n).flat_map(move |k| (0..n).map(move |l| (i, j, k, l)))
            })
        })
        .collect();
    let results: Vec<Result<Vec<Violation>>> = tuples
        .par_iter()
        .map(|&(i, j, k, l)| {
            let mut residual = vec![Polynomial::zero(r); n];
            for m in 0..n {
                // weight of e_m inside the outer bracket, from each side
                let f_in = phi
                    .entry(i, j, m)
                    .substitute_by_name(&[("del", neg_lam_nu.clone())])?;
                let b_in = alg
                    .structure(i, j, m)
                    .substitute_by_name(&[("del", neg_lam_nu.clone())])?;
                for p in 0..n {
                    let b_arg = alg
                        .structure(k, l, p)
                        .substitute_by_name(&[("del", del_lam_nu.clone()), ("lam", mu.clone())])?;
                    let f_arg = phi
                        .entry(k, l, p)
                        .substitute_by_name(&[("del", del_lam_nu.clone()), ("lam", mu.clone())])?;
                    let weight = f_in.mul(&b_arg)?.sub(&b_in.mul(&f_arg)?)?;
                    if weight.is_zero() {
                        continue;
                    }
                    for nn in 0..n {
                        if alg.structure(m, p, nn).is_zero() {
                            continue;
                        }
                        let outer = alg
                            .structure(m, p, nn)
                            .substitute_by_name(&[("lam", lam_nu.clone())])?;
                        residual[nn] = residual[nn].add(&weight.mul(&outer)?)?;
                    }
                }
            }
            let mut out = Vec::new();
            for (nn, poly) in residual.iter().enumerate() {
                if !poly.is_zero() {
                    out.push(Violation {
                        context: format!(
                            "({}, {}, {}, {})",
                            alg.gens()[i],
                            alg.gens()[j],
                            alg.gens()[k],
                            alg.gens()[l]
                        ),
                        component: alg.gens()[nn].clone(),
                        residual: poly.to_string(),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    for r in results {
        violations.extend(r?);
    }
    Ok(CheckOutcome::new("bracket-consistency", violations))
}

// ---------------------------------------------------------------------------
// BiMap file format: `bimap <name>` header, then bracket lines as in the
// algebra format. Missing transposes are derived by the swap rule.
// ---------------------------------------------------------------------------

pub fn to_text(alg: &LcsAlgebra, phi: &ConformalBiMap) -> String {
    let mut out = format!("bimap {}\n", phi.name);
    let n = alg.num_gens();
    for i in 0..n {
        for j in 0..n {
            let mut terms = Vec::new();
            for k in 0..n {
                let f = phi.entry(i, j, k);
                if !f.is_zero() {
                    terms.push(format!("({}) * {}", f, alg.gens()[k]));
                }
            }
            if !terms.is_empty() {
                out.push_str(&format!(
                    "bracket {} {} = {}\n",
                    alg.gens()[i],
                    alg.gens()[j],
                    terms.join(" + ")
                ));
            }
        }
    }
    out
}

pub fn from_text(text: &str, origin: &str, alg: &LcsAlgebra) -> Result<ConformalBiMap> {
    let fail = |line: usize, msg: String| Error::Format {
        path: origin.into(),
        line,
        msg,
    };
    let mut name: Option<String> = None;
    let gens: Vec<(String, Parity)> = alg
        .gens()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), alg.parity(i)))
        .collect();
    let mut specified = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "bimap" => {
                if rest.is_empty() {
                    return Err(fail(lineno, "missing bimap name".into()));
                }
                name = Some(rest.to_string());
            }
            "bracket" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| fail(lineno, "bracket line needs `=`".into()))?;
                let mut words = lhs.split_whitespace();
                let g1 = words
                    .next()
                    .ok_or_else(|| fail(lineno, "missing first generator".into()))?;
                let g2 = words
                    .next()
                    .ok_or_else(|| fail(lineno, "missing second generator".into()))?;
                let i = alg.gen_index(g1).map_err(|e| fail(lineno, e.to_string()))?;
                let j = alg.gen_index(g2).map_err(|e| fail(lineno, e.to_string()))?;
                let comps = parse_bracket_rhs(rhs, alg.ring(), &gens)
                    .map_err(|e| fail(lineno, e.to_string()))?;
                if specified.insert((i, j), comps).is_some() {
                    return Err(fail(lineno, format!("duplicate bracket {g1} {g2}")));
                }
            }
            other => return Err(fail(lineno, format!("unknown directive `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| fail(0, "missing `bimap` header".into()))?;
    let table = complete_table(alg.ring(), &gens, specified)?;
    ConformalBiMap::new(alg, name, table)
}

pub fn load(path: impl AsRef<Path>, alg: &LcsAlgebra) -> Result<ConformalBiMap> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    from_text(&text, &path.display().to_string(), alg)
}
