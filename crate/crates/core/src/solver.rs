//! Bounded-degree ansatz enumeration: functional equations that are linear
//! in unknown polynomials are expanded into an exact nullspace problem
//! over ℚ and post-processed into derivation spaces, biderivation spaces
//! and solution spaces of the key functional equation.
//!
//! The nullspace is computed in two phases: a fast modular elimination
//! (mod 2^61−1) selects a candidate set of pivotal rows, then an exact
//! rational reduction of just those rows produces the basis, which is
//! verified against *every* row; any violated row is added and the exact
//! phase repeats. The result is therefore exact regardless of the modular
//! phase, which only affects speed.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, Integer, One, Zero};

use crate::algebra::{LcsAlgebra, Parity};
use crate::bider::ConformalBiMap;
use crate::maps::ConformalEnd;
use crate::poly::{Indeterminate, Monomial, Polynomial, Rational, Ring, Role};
use crate::{Error, Result};

/// An unknown polynomial in a subset of the ambient indeterminates, with
/// per-variable degree bounds and an optional total-degree bound.
#[derive(Clone, Debug)]
pub struct UnknownPoly {
    pub name: String,
    pub vars: Vec<String>,
    pub bounds: Vec<u32>,
    pub total_bound: Option<u32>,
}

impl UnknownPoly {
    pub fn new(name: impl Into<String>, vars: &[&str], bounds: &[u32]) -> UnknownPoly {
        assert_eq!(vars.len(), bounds.len());
        UnknownPoly {
            name: name.into(),
            vars: vars.iter().map(|v| (*v).to_string()).collect(),
            bounds: bounds.to_vec(),
            total_bound: None,
        }
    }

    pub fn with_total_bound(mut self, bound: u32) -> UnknownPoly {
        self.total_bound = Some(bound);
        self
    }

    /// Monomial support, in canonical (graded-lex) order.
    fn monomials(&self) -> Vec<Monomial> {
        let mut out = vec![Monomial::one(self.vars.len())];
        for (i, &b) in self.bounds.iter().enumerate() {
            let mut next = Vec::new();
            for m in &out {
                for e in 0..=b {
                    let mut m2 = m.clone();
                    m2.0[i] = e;
                    next.push(m2);
                }
            }
            out = next;
        }
        if let Some(t) = self.total_bound {
            out.retain(|m| m.total_degree() <= t);
        }
        out.sort();
        out
    }
}

/// One occurrence of an unknown inside an equation:
/// `coeff(ambient) · u(s_1(ambient), …, s_k(ambient))`.
#[derive(Clone, Debug)]
pub struct LinearTermRef {
    pub unknown: String,
    pub subs: Vec<Polynomial>,
    pub coeff: Polynomial,
}

/// Equations are term lists summing to zero, identically in the ambient ring.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub ring: Arc<Ring>,
    pub unknowns: Vec<UnknownPoly>,
    pub equations: Vec<Vec<LinearTermRef>>,
}

#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub unknowns: Vec<String>,
    /// One assignment tuple per basis vector, aligned with `unknowns`.
    pub vectors: Vec<Vec<Polynomial>>,
    pub dimension: usize,
    /// Raw coefficient vectors over the column space (unknown × monomial).
    raw: Vec<Vec<Rational>>,
}

impl SolutionBasis {
    pub fn raw_vectors(&self) -> &[Vec<Rational>] {
        &self.raw
    }

    /// The zero-dimensional solution space over the given unknowns.
    pub fn empty(unknowns: Vec<String>) -> SolutionBasis {
        SolutionBasis {
            unknowns,
            vectors: Vec::new(),
            dimension: 0,
            raw: Vec::new(),
        }
    }
}

type SparseRow = Vec<(usize, Rational)>;

impl LinearSystem {
    fn validate(&self) -> Result<()> {
        if self.unknowns.is_empty() {
            return Err(Error::EmptySystem);
        }
        for u in &self.unknowns {
            for v in &u.vars {
                if self.ring.index_of(v).is_none() {
                    return Err(Error::UnknownIndeterminate(v.clone()));
                }
            }
        }
        for eq in &self.equations {
            for term in eq {
                if !self.unknowns.iter().any(|u| u.name == term.unknown) {
                    return Err(Error::Schema(format!(
                        "equation references undeclared unknown `{}`",
                        term.unknown
                    )));
                }
                for p in term.subs.iter().chain(std::iter::once(&term.coeff)) {
                    for (idx, var) in self.ring.vars().iter().enumerate() {
                        if var.role == Role::Parameter && p.uses(idx) {
                            return Err(Error::SymbolicParameter(var.name.clone()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Column labels: (unknown index, monomial), in declaration order.
    fn columns(&self) -> Vec<(usize, Monomial)> {
        let mut cols = Vec::new();
        for (ui, u) in self.unknowns.iter().enumerate() {
            for m in u.monomials() {
                cols.push((ui, m));
            }
        }
        cols
    }

    fn assemble_rows(&self, cols: &[(usize, Monomial)]) -> Result<Vec<SparseRow>> {
        let col_index: BTreeMap<(usize, Monomial), usize> = cols
            .iter()
            .cloned()
            .enumerate()
            .map(|(c, key)| (key, c))
            .collect();
        let mut rows = Vec::new();
        for eq in &self.equations {
            // per ambient monomial: sparse coefficient row
            let mut acc: BTreeMap<Monomial, BTreeMap<usize, Rational>> = BTreeMap::new();
            for term in eq {
                if term.coeff.is_zero() {
                    continue;
                }
                let ui = self
                    .unknowns
                    .iter()
                    .position(|u| u.name == term.unknown)
                    .unwrap();
                let u = &self.unknowns[ui];
                if term.subs.len() != u.vars.len() {
                    return Err(Error::Shape(format!(
                        "unknown `{}` expects {} substitution polynomials",
                        u.name,
                        u.vars.len()
                    )));
                }
                // powers of each substitution polynomial
                let mut powers: Vec<Vec<Polynomial>> = Vec::with_capacity(u.vars.len());
                for (vi, s) in term.subs.iter().enumerate() {
                    let mut p = vec![Polynomial::one(&self.ring)];
                    for _ in 0..u.bounds[vi] {
                        p.push(p.last().unwrap().mul(s)?);
                    }
                    powers.push(p);
                }
                for m in u.monomials() {
                    let mut contrib = term.coeff.clone();
                    for (vi, &e) in m.0.iter().enumerate() {
                        if e > 0 {
                            contrib = contrib.mul(&powers[vi][e as usize])?;
                        }
                    }
                    let col = col_index[&(ui, m)];
                    for (amb, c) in contrib.terms() {
                        let row = acc.entry(amb.clone()).or_default();
                        let entry = row.entry(col).or_insert_with(Rational::zero);
                        *entry += c;
                        if entry.is_zero() {
                            row.remove(&col);
                        }
                    }
                }
            }
            for (_, row) in acc {
                if !row.is_empty() {
                    rows.push(row.into_iter().collect::<SparseRow>());
                }
            }
        }
        Ok(rows)
    }

    /// Exact nullspace basis of the expanded coefficient matrix, in
    /// canonical (reduced echelon, leading coefficient 1) form.
    pub fn solve(&self) -> Result<SolutionBasis> {
        self.validate()?;
        let cols = self.columns();
        let ncols = cols.len();
        let rows = self.assemble_rows(&cols)?;

        // phase 1: modular elimination picks candidate pivotal rows
        let mut selected: Vec<usize> = Vec::new();
        {
            let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot col, reduced row)
            for (ri, row) in rows.iter().enumerate() {
                if pivots.len() == ncols {
                    break;
                }
                match modp_reduce(row, ncols, &pivots) {
                    Some((pc, reduced)) => {
                        pivots.push((pc, reduced));
                        pivots.sort_by_key(|(c, _)| *c);
                        selected.push(ri);
                    }
                    None => {}
                }
            }
        }

        // phase 2: exact reduction of the selected rows, then global
        // verification; violated rows are independent of the selection,
        // so each round strictly increases the exact rank.
        let mut basis_raw;
        loop {
            let dense: Vec<Vec<Rational>> = selected
                .iter()
                .map(|&ri| to_dense(&rows[ri], ncols))
                .collect();
            basis_raw = exact_nullspace(dense, ncols);
            let mut bad = Vec::new();
            for (ri, row) in rows.iter().enumerate() {
                if selected.contains(&ri) {
                    continue;
                }
                if basis_raw.iter().any(|v| !sparse_dot_is_zero(row, v)) {
                    bad.push(ri);
                }
            }
            if bad.is_empty() {
                break;
            }
            selected.extend(bad);
        }
        rref(&mut basis_raw);
        basis_raw.retain(|v| v.iter().any(|c| !c.is_zero()));

        let vectors = basis_raw
            .iter()
            .map(|v| self.devectorize(&cols, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolutionBasis {
            unknowns: self.unknowns.iter().map(|u| u.name.clone()).collect(),
            dimension: basis_raw.len(),
            vectors,
            raw: basis_raw,
        })
    }

    fn devectorize(
        &self,
        cols: &[(usize, Monomial)],
        raw: &[Rational],
    ) -> Result<Vec<Polynomial>> {
        let mut out = vec![Polynomial::zero(&self.ring); self.unknowns.len()];
        for (c, (ui, m)) in cols.iter().enumerate() {
            if raw[c].is_zero() {
                continue;
            }
            let mut mono = Polynomial::constant(&self.ring, raw[c].clone());
            for (vi, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let v = Polynomial::var(&self.ring, &self.unknowns[*ui].vars[vi])?;
                    mono = mono.mul(&v.pow(e))?;
                }
            }
            out[*ui] = out[*ui].add(&mono)?;
        }
        Ok(out)
    }

    /// Express an assignment tuple as a coefficient vector over the column
    /// space; fails when a polynomial leaves the bounded monomial support.
    pub fn vectorize(&self, assignment: &[Polynomial]) -> Result<Vec<Rational>> {
        let cols = self.columns();
        let col_index: BTreeMap<(usize, Monomial), usize> = cols
            .iter()
            .cloned()
            .enumerate()
            .map(|(c, key)| (key, c))
            .collect();
        if assignment.len() != self.unknowns.len() {
            return Err(Error::Shape("assignment arity mismatch".into()));
        }
        let mut out = vec![Rational::zero(); cols.len()];
        for (ui, p) in assignment.iter().enumerate() {
            let u = &self.unknowns[ui];
            let var_idx: Vec<usize> = u
                .vars
                .iter()
                .map(|v| self.ring.index_of(v).unwrap())
                .collect();
            for (m, c) in p.terms() {
                let mut key = Monomial::one(u.vars.len());
                let mut used: u32 = 0;
                for (vi, &ri) in var_idx.iter().enumerate() {
                    key.0[vi] = m.0[ri];
                    used += m.0[ri];
                }
                if used != m.total_degree() {
                    return Err(Error::Shape(format!(
                        "assignment for `{}` uses indeterminates outside its variable list",
                        u.name
                    )));
                }
                match col_index.get(&(ui, key)) {
                    Some(&col) => out[col] = c.clone(),
                    None => {
                        return Err(Error::Shape(format!(
                            "assignment for `{}` exceeds its degree bounds",
                            u.name
                        )))
                    }
                }
            }
        }
        Ok(out)
    }
}

fn to_dense(row: &SparseRow, ncols: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); ncols];
    for (c, v) in row {
        out[*c] = v.clone();
    }
    out
}

fn sparse_dot_is_zero(row: &SparseRow, v: &[Rational]) -> bool {
    let mut acc = Rational::zero();
    for (c, coeff) in row {
        if !v[*c].is_zero() {
            acc += coeff * &v[*c];
        }
    }
    acc.is_zero()
}

// --- modular arithmetic (p = 2^61 − 1) ------------------------------------

const P: u64 = (1 << 61) - 1;

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn subm(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn powm(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a);
        }
        a = mulm(a, a);
        e >>= 1;
    }
    acc
}

fn invm(a: u64) -> u64 {
    powm(a, P - 2)
}

fn rat_modp(r: &Rational) -> u64 {
    let p = BigInt::from(P);
    let num = r.numer().mod_floor(&p);
    let den = r.denom().mod_floor(&p);
    let num: u64 = num.try_into().unwrap();
    let den: u64 = den.try_into().unwrap();
    // the denominator of an input rational never carries the 61-bit prime
    mulm(num, invm(den))
}

/// Reduce a row against the current pivots; returns the new pivot column
/// and normalized reduced row when the residue is nonzero.
fn modp_reduce(
    row: &SparseRow,
    ncols: usize,
    pivots: &[(usize, Vec<u64>)],
) -> Option<(usize, Vec<u64>)> {
    let mut dense = vec![0u64; ncols];
    for (c, v) in row {
        dense[*c] = rat_modp(v);
    }
    for (pc, prow) in pivots {
        let f = dense[*pc];
        if f != 0 {
            for c in *pc..ncols {
                if prow[c] != 0 {
                    dense[c] = subm(dense[c], mulm(f, prow[c]));
                }
            }
        }
    }
    let pc = dense.iter().position(|&v| v != 0)?;
    let inv = invm(dense[pc]);
    for v in dense.iter_mut() {
        if *v != 0 {
            *v = mulm(*v, inv);
        }
    }
    Some((pc, dense))
}

// --- exact rational linear algebra -----------------------------------------

/// In-place reduced row echelon form; returns the rank.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for c in col..ncols {
            if !rows[rank][c].is_zero() {
                rows[rank][c] = &rows[rank][c] * &inv;
            }
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..ncols {
                    if !rows[rank][c].is_zero() {
                        let delta = &f * &rows[rank][c];
                        rows[r][c] = &rows[r][c] - &delta;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Nullspace basis of the given rows (free-column construction).
fn exact_nullspace(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let rank = rref(&mut rows);
    rows.truncate(rank);
    let mut pivot_cols = Vec::with_capacity(rank);
    for row in &rows {
        let pc = row.iter().position(|v| !v.is_zero()).unwrap();
        pivot_cols.push(pc);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            if !rows[r][free].is_zero() {
                v[pc] = -rows[r][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

// --- derivation spaces ------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub dim: usize,
    pub inner_dim: usize,
    pub outer_dim: usize,
    pub basis: Vec<ConformalEnd>,
    /// Solution basis reduced modulo the inner span, normalized.
    pub outer_reps: Vec<ConformalEnd>,
    /// Whether outer_dim is unchanged when the λ-bound is raised by one.
    pub stable: bool,
}

pub(crate) fn reject_symbolic(alg: &LcsAlgebra) -> Result<()> {
    let n = alg.num_gens();
    for idx in alg.symbolic_params() {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if alg.structure(i, j, k).uses(idx) {
                        return Err(Error::SymbolicParameter(alg.ring().name(idx).into()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn deriv_unknown_name(alg: &LcsAlgebra, i: usize, j: usize) -> String {
    format!("d.{}.{}", alg.gens()[i], alg.gens()[j])
}

fn build_deriv_system(
    alg: &LcsAlgebra,
    parity: Parity,
    bound_del: u32,
    bound_lam: u32,
) -> Result<(LinearSystem, Vec<(usize, usize)>)> {
    let n = alg.num_gens();
    let r = alg.ring();
    let allowed: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            alg.parity(j)
                == if parity == Parity::Odd {
                    alg.parity(i).flip()
                } else {
                    alg.parity(i)
                }
        })
        .collect();
    let unknowns: Vec<UnknownPoly> = allowed
        .iter()
        .map(|&(i, j)| {
            UnknownPoly::new(
                deriv_unknown_name(alg, i, j),
                &["del", "lam"],
                &[bound_del, bound_lam],
            )
        })
        .collect();
    let del = Polynomial::var(r, "del")?;
    let lam = Polynomial::var(r, "lam")?;
    let mu = Polynomial::var(r, "mu")?;
    let del_lam = del.add(&lam)?;
    let del_mu = del.add(&mu)?;
    let lam_mu = lam.add(&mu)?;
    let neg_lam_mu = lam_mu.neg();
    let is_unknown = |i: usize, j: usize| allowed.contains(&(i, j));
    let mut equations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let sign = if alg.parity(i) == Parity::Odd && parity == Parity::Odd {
                -Rational::one()
            } else {
                Rational::one()
            };
            for nn in 0..n {
                let mut terms = Vec::new();
                for k in 0..n {
                    // d_λ [e_i μ e_j]: B[i][j][k](∂+λ,μ) · D[k][nn](∂,λ)
                    if !alg.structure(i, j, k).is_zero() && is_unknown(k, nn) {
                        let coeff = alg
                            .structure(i, j, k)
                            .substitute_by_name(&[("del", del_lam.clone()), ("lam", mu.clone())])?;
                        terms.push(LinearTermRef {
                            unknown: deriv_unknown_name(alg, k, nn),
                            subs: vec![del.clone(), lam.clone()],
                            coeff,
                        });
                    }
                    // −[(d_λ e_i)_{λ+μ} e_j]: D[i][k](−λ−μ,λ) · B[k][j][nn](∂,λ+μ)
                    if is_unknown(i, k) && !alg.structure(k, j, nn).is_zero() {
                        let coeff = alg
                            .structure(k, j, nn)
                            .substitute_by_name(&[("lam", lam_mu.clone())])?
                            .neg();
                        terms.push(LinearTermRef {
                            unknown: deriv_unknown_name(alg, i, k),
                            subs: vec![neg_lam_mu.clone(), lam.clone()],
                            coeff,
                        });
                    }
                    // −(−1)^{|i|θ} [e_i μ (d_λ e_j)]: D[j][k](∂+μ,λ) · B[i][k][nn](∂,μ)
                    if is_unknown(j, k) && !alg.structure(i, k, nn).is_zero() {
                        let coeff = alg
                            .structure(i, k, nn)
                            .substitute_by_name(&[("lam", mu.clone())])?
                            .scale(&sign)
                            .neg();
                        terms.push(LinearTermRef {
                            unknown: deriv_unknown_name(alg, j, k),
                            subs: vec![del_mu.clone(), lam.clone()],
                            coeff,
                        });
                    }
                }
                if !terms.is_empty() {
                    equations.push(terms);
                }
            }
        }
    }
    Ok((
        LinearSystem {
            ring: Arc::clone(r),
            unknowns,
            equations,
        },
        allowed,
    ))
}

/// Matrices of ad(∂^k e_i), parity θ, with entries inside the bounds.
fn bounded_inner_derivations(
    alg: &LcsAlgebra,
    parity: Parity,
    bound_del: u32,
    bound_lam: u32,
) -> Result<Vec<Vec<Vec<Polynomial>>>> {
    let n = alg.num_gens();
    let mut out = Vec::new();
    for i in 0..n {
        if alg.parity(i) != parity {
            continue;
        }
        'powers: for k in 0..=bound_lam {
            let mut x = alg.zero_element();
            x.coeffs[i] = Polynomial::var(alg.ring(), "del")?.pow(k);
            let m = crate::maps::ad(alg, &x)?;
            let mut nonzero = false;
            for a in 0..n {
                for b in 0..n {
                    let e = m.entry(a, b);
                    if e.is_zero() {
                        continue;
                    }
                    nonzero = true;
                    let dd = e.degree_in(alg.ring().index_of("del").unwrap()).unwrap_or(0);
                    let dl = e.degree_in(alg.ring().index_of("lam").unwrap()).unwrap_or(0);
                    if dd > bound_del || dl > bound_lam {
                        break 'powers;
                    }
                }
            }
            if nonzero {
                out.push(m.matrix().to_vec());
            } else if k == 0 {
                // a generator with no brackets at all contributes nothing
                break;
            }
        }
    }
    Ok(out)
}

fn solve_derivations_at(
    alg: &LcsAlgebra,
    parity: Parity,
    bound_del: u32,
    bound_lam: u32,
) -> Result<(usize, usize, usize, Vec<ConformalEnd>, Vec<ConformalEnd>)> {
    let (system, allowed) = build_deriv_system(alg, parity, bound_del, bound_lam)?;
    let basis = system.solve()?;
    let dim = basis.dimension;

    // inner span, expressed in the same column space
    let mut inner_raw = Vec::new();
    for m in bounded_inner_derivations(alg, parity, bound_del, bound_lam)? {
        let assignment: Vec<Polynomial> = allowed.iter().map(|&(i, j)| m[i][j].clone()).collect();
        inner_raw.push(system.vectorize(&assignment)?);
    }
    let mut inner_rref = inner_raw.clone();
    let inner_dim = rref(&mut inner_rref);
    inner_rref.truncate(inner_dim);

    // the inner span must lie inside the solution span
    let mut combined = basis.raw.clone();
    combined.extend(inner_raw);
    if rref(&mut combined) != dim {
        return Err(Error::Precondition(
            "inner derivations escape the solution span".into(),
        ));
    }
    let outer_dim = dim - inner_dim;

    // outer representatives: solutions reduced modulo the inner span
    let mut reduced = Vec::new();
    for v in &basis.raw {
        let mut v = v.clone();
        for irow in &inner_rref {
            let pc = irow.iter().position(|c| !c.is_zero()).unwrap();
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for c in 0..v.len() {
                    if !irow[c].is_zero() {
                        let delta = &f * &irow[c];
                        v[c] = &v[c] - &delta;
                    }
                }
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            reduced.push(v);
        }
    }
    let rr = rref(&mut reduced);
    reduced.truncate(rr);

    let to_end = |raw: &[Rational], name: String| -> Result<ConformalEnd> {
        let cols = system.columns();
        let polys = system_devectorize(&system, &cols, raw)?;
        let n = alg.num_gens();
        let mut matrix = vec![vec![Polynomial::zero(alg.ring()); n]; n];
        for (idx, &(i, j)) in allowed.iter().enumerate() {
            matrix[i][j] = polys[idx].clone();
        }
        ConformalEnd::new(alg, name, parity, matrix)
    };
    let ends = basis
        .raw
        .iter()
        .enumerate()
        .map(|(i, v)| to_end(v, format!("basis{i}")))
        .collect::<Result<Vec<_>>>()?;
    let reps = reduced
        .iter()
        .enumerate()
        .map(|(i, v)| to_end(v, format!("outer{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok((dim, inner_dim, outer_dim, ends, reps))
}

fn system_devectorize(
    system: &LinearSystem,
    cols: &[(usize, Monomial)],
    raw: &[Rational],
) -> Result<Vec<Polynomial>> {
    system.devectorize(cols, raw)
}

/// Derivations of the given parity with bounded entry degrees, split into
/// inner and outer parts; `stable` re-runs at bound_λ + 1.
pub fn solve_derivations(
    alg: &LcsAlgebra,
    parity: Parity,
    bound_del: u32,
    bound_lam: u32,
) -> Result<DerivationSpace> {
    if bound_del < 2 || bound_lam < 2 {
        return Err(Error::Precondition("degree bounds must be at least 2".into()));
    }
    reject_symbolic(alg)?;
    let (dim, inner_dim, outer_dim, basis, outer_reps) =
        solve_derivations_at(alg, parity, bound_del, bound_lam)?;
    let (_, _, outer_next, _, _) = solve_derivations_at(alg, parity, bound_del, bound_lam + 1)?;
    Ok(DerivationSpace {
        dim,
        inner_dim,
        outer_dim,
        basis,
        outer_reps,
        stable: outer_next == outer_dim,
    })
}

// --- biderivation spaces -----------------------------------------------------

#[derive(Clone, Debug)]
pub struct BiderivationSpace {
    pub dim: usize,
    pub inner_dim: usize,
    pub outer_dim: usize,
    pub basis: Vec<ConformalBiMap>,
    pub stable: bool,
}

fn bider_unknown_name(alg: &LcsAlgebra, i: usize, j: usize, k: usize) -> String {
    format!("f.{}.{}.{}", alg.gens()[i], alg.gens()[j], alg.gens()[k])
}

/// Folded reference to table entry (a,b,k) at the point
/// (sub_del, sub_lam): entries with a > b are rewritten through the
/// argument-swap rule onto the (b,a,k) unknown.
fn bider_term(
    alg: &LcsAlgebra,
    a: usize,
    b: usize,
    k: usize,
    sub_del: &Polynomial,
    sub_lam: &Polynomial,
    coeff: Polynomial,
) -> Result<LinearTermRef> {
    if a <= b {
        Ok(LinearTermRef {
            unknown: bider_unknown_name(alg, a, b, k),
            subs: vec![sub_del.clone(), sub_lam.clone()],
            coeff,
        })
    } else {
        let sign = alg.parity(a).product_sign(alg.parity(b));
        Ok(LinearTermRef {
            unknown: bider_unknown_name(alg, b, a, k),
            subs: vec![sub_del.clone(), sub_del.neg().sub(sub_lam)?],
            coeff: coeff.scale(&sign).neg(),
        })
    }
}

fn build_bider_system(
    alg: &LcsAlgebra,
    bound_del: u32,
    bound_lam: u32,
) -> Result<(LinearSystem, Vec<(usize, usize, usize)>)> {
    let n = alg.num_gens();
    let r = alg.ring();
    let mut slots = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                slots.push((i, j, k));
            }
        }
    }
    let unknowns: Vec<UnknownPoly> = slots
        .iter()
        .map(|&(i, j, k)| {
            UnknownPoly::new(
                bider_unknown_name(alg, i, j, k),
                &["del", "lam"],
                &[bound_del, bound_lam],
            )
        })
        .collect();
    let del = Polynomial::var(r, "del")?;
    let lam = Polynomial::var(r, "lam")?;
    let mu = Polynomial::var(r, "mu")?;
    let del_lam = del.add(&lam)?;
    let del_mu = del.add(&mu)?;
    let lam_mu = lam.add(&mu)?;
    let neg_lam_mu = lam_mu.neg();
    let neg_del_lam = del_lam.neg();
    let mut equations = Vec::new();

    // diagonal skew self-consistency: F[i][i][k](∂,λ) + s·F[i][i][k](∂,−∂−λ) = 0
    for i in 0..n {
        let sign = alg.parity(i).product_sign(alg.parity(i));
        for k in 0..n {
            equations.push(vec![
                LinearTermRef {
                    unknown: bider_unknown_name(alg, i, i, k),
                    subs: vec![del.clone(), lam.clone()],
                    coeff: Polynomial::one(r),
                },
                LinearTermRef {
                    unknown: bider_unknown_name(alg, i, i, k),
                    subs: vec![del.clone(), neg_del_lam.clone()],
                    coeff: Polynomial::constant(r, sign.clone()),
                },
            ]);
        }
    }

    // Leibniz rule per generator triple and output component
    for i in 0..n {
        for j in 0..n {
            let sign = alg.parity(i).product_sign(alg.parity(j));
            for k in 0..n {
                for nn in 0..n {
                    let mut terms = Vec::new();
                    for m in 0..n {
                        // φ_λ(e_i, [e_j μ e_k])
                        if !alg.structure(j, k, m).is_zero() {
                            let coeff = alg.structure(j, k, m).substitute_by_name(&[
                                ("del", del_lam.clone()),
                                ("lam", mu.clone()),
                            ])?;
                            terms.push(bider_term(alg, i, m, nn, &del, &lam, coeff)?);
                        }
                        // −[φ_λ(e_i,e_j)_{λ+μ} e_k]
                        if !alg.structure(m, k, nn).is_zero() {
                            let coeff = alg
                                .structure(m, k, nn)
                                .substitute_by_name(&[("lam", lam_mu.clone())])?
                                .neg();
                            terms.push(bider_term(alg, i, j, m, &neg_lam_mu, &lam, coeff)?);
                        }
                        // −(−1)^{|i||j|} [e_j μ φ_λ(e_i,e_k)]
                        if !alg.structure(j, m, nn).is_zero() {
                            let coeff = alg
                                .structure(j, m, nn)
                                .substitute_by_name(&[("lam", mu.clone())])?
                                .scale(&sign)
                                .neg();
                            terms.push(bider_term(alg, i, k, m, &del_mu, &lam, coeff)?);
                        }
                    }
                    if !terms.is_empty() {
                        equations.push(terms);
                    }
                }
            }
        }
    }
    Ok((
        LinearSystem {
            ring: Arc::clone(r),
            unknowns,
            equations,
        },
        slots,
    ))
}

fn solve_biderivations_at(
    alg: &LcsAlgebra,
    bound_del: u32,
    bound_lam: u32,
) -> Result<(usize, usize, usize, Vec<ConformalBiMap>)> {
    let (system, slots) = build_bider_system(alg, bound_del, bound_lam)?;
    let basis = system.solve()?;
    let dim = basis.dimension;

    // inner span: the bracket itself (folded onto the i ≤ j slots)
    let inner_assignment: Vec<Polynomial> = slots
        .iter()
        .map(|&(i, j, k)| alg.structure(i, j, k).clone())
        .collect();
    let inner_raw = system.vectorize(&inner_assignment)?;
    let inner_dim = usize::from(inner_raw.iter().any(|c| !c.is_zero()));
    let mut combined = basis.raw.clone();
    combined.push(inner_raw);
    if rref(&mut combined) != dim {
        return Err(Error::Precondition(
            "the inner biderivation escapes the solution span".into(),
        ));
    }

    // unfold each solution into a full bilinear table
    let n = alg.num_gens();
    let neg = Polynomial::var(alg.ring(), "del")?
        .add(&Polynomial::var(alg.ring(), "lam")?)?
        .neg();
    let mut maps = Vec::new();
    for (bi, assignment) in basis.vectors.iter().enumerate() {
        let mut table = vec![vec![vec![Polynomial::zero(alg.ring()); n]; n]; n];
        for (idx, &(i, j, k)) in slots.iter().enumerate() {
            table[i][j][k] = assignment[idx].clone();
        }
        for i in 0..n {
            for j in 0..i {
                let sign = alg.parity(i).product_sign(alg.parity(j));
                for k in 0..n {
                    table[i][j][k] = table[j][i][k]
                        .substitute_by_name(&[("lam", neg.clone())])?
                        .scale(&sign)
                        .neg();
                }
            }
        }
        maps.push(ConformalBiMap::new(alg, format!("basis{bi}"), table)?);
    }
    Ok((dim, inner_dim, dim - inner_dim, maps))
}

/// Biderivations with bounded entry degrees; the inner span is ℚ·bracket.
pub fn solve_biderivations(
    alg: &LcsAlgebra,
    bound_del: u32,
    bound_lam: u32,
) -> Result<BiderivationSpace> {
    if bound_del < 2 || bound_lam < 2 {
        return Err(Error::Precondition("degree bounds must be at least 2".into()));
    }
    reject_symbolic(alg)?;
    let (dim, inner_dim, outer_dim, basis) = solve_biderivations_at(alg, bound_del, bound_lam)?;
    let (_, _, outer_next, _) = solve_biderivations_at(alg, bound_del, bound_lam + 1)?;
    Ok(BiderivationSpace {
        dim,
        inner_dim,
        outer_dim,
        basis,
        stable: outer_next == outer_dim,
    })
}

// --- key functional equation --------------------------------------------------

/// Ring for the key functional equation, with variables x, y, z.
pub fn keyeq_ring() -> Arc<Ring> {
    Ring::custom(
        ["x", "y", "z"]
            .into_iter()
            .map(|n| Indeterminate {
                name: n.into(),
                role: Role::LambdaVar,
            })
            .collect(),
    )
}

/// All f(x,y) of total degree ≤ bound with
/// (x+by)·f(x+y,z) − (x+ay+z)·f(x,z) − (cy−z)·f(x,y+z) = 0 identically.
pub fn solve_keyeq(a: &Rational, b: &Rational, c: &Rational, bound: u32) -> Result<SolutionBasis> {
    let r = keyeq_ring();
    let x = Polynomial::var(&r, "x")?;
    let y = Polynomial::var(&r, "y")?;
    let z = Polynomial::var(&r, "z")?;
    let unknown = UnknownPoly::new("f", &["x", "y"], &[bound, bound]).with_total_bound(bound);
    let equation = vec![
        LinearTermRef {
            unknown: "f".into(),
            subs: vec![x.add(&y)?, z.clone()],
            coeff: x.add(&y.scale(b))?,
        },
        LinearTermRef {
            unknown: "f".into(),
            subs: vec![x.clone(), z.clone()],
            coeff: x.add(&y.scale(a))?.add(&z)?.neg(),
        },
        LinearTermRef {
            unknown: "f".into(),
            subs: vec![x.clone(), y.add(&z)?],
            coeff: y.scale(c).sub(&z)?.neg(),
        },
    ];
    let system = LinearSystem {
        ring: r,
        unknowns: vec![unknown],
        equations: vec![equation],
    };
    system.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_algebra, rational_params, Params};
    use crate::poly::{int, rat};

    #[test]
    fn constants_solve_shift_invariance() {
        // f(∂+λ) − f(∂) = 0, bound 3 → {1}
        let r = Ring::new(&["lam"], &[]);
        let del = Polynomial::var(&r, "del").unwrap();
        let lam = Polynomial::var(&r, "lam").unwrap();
        let system = LinearSystem {
            ring: Arc::clone(&r),
            unknowns: vec![UnknownPoly::new("f", &["del"], &[3])],
            equations: vec![vec![
                LinearTermRef {
                    unknown: "f".into(),
                    subs: vec![del.add(&lam).unwrap()],
                    coeff: Polynomial::one(&r),
                },
                LinearTermRef {
                    unknown: "f".into(),
                    subs: vec![del.clone()],
                    coeff: Polynomial::one(&r).neg(),
                },
            ]],
        };
        let basis = system.solve().unwrap();
        assert_eq!(basis.dimension, 1);
        assert_eq!(basis.vectors[0][0], Polynomial::one(&r));
    }

    #[test]
    fn annihilated_unknown_gives_dim_zero() {
        // λ·q(∂,λ) = 0, bounds (2,2) → dim 0
        let r = Ring::new(&["lam"], &[]);
        let del = Polynomial::var(&r, "del").unwrap();
        let lam = Polynomial::var(&r, "lam").unwrap();
        let system = LinearSystem {
            ring: Arc::clone(&r),
            unknowns: vec![UnknownPoly::new("q", &["del", "lam"], &[2, 2])],
            equations: vec![vec![LinearTermRef {
                unknown: "q".into(),
                subs: vec![del, lam.clone()],
                coeff: lam,
            }]],
        };
        assert_eq!(system.solve().unwrap().dimension, 0);
    }

    fn lambda_only_system(shuffle: bool) -> LinearSystem {
        // (λ+μ)f(−λ−μ,λ) + (∂+μ)f(∂+μ,λ) − (∂+λ+2μ)f(∂,λ) = 0
        let r = Ring::new(&["lam", "mu"], &[]);
        let p = |s: &str| Polynomial::parse(s, &r).unwrap();
        let mut terms = vec![
            LinearTermRef {
                unknown: "f".into(),
                subs: vec![p("-lam - mu"), p("lam")],
                coeff: p("lam + mu"),
            },
            LinearTermRef {
                unknown: "f".into(),
                subs: vec![p("del + mu"), p("lam")],
                coeff: p("del + mu"),
            },
            LinearTermRef {
                unknown: "f".into(),
                subs: vec![p("del"), p("lam")],
                coeff: p("-del - lam - 2*mu"),
            },
        ];
        if shuffle {
            terms.rotate_left(1);
        }
        LinearSystem {
            ring: r,
            unknowns: vec![UnknownPoly::new("f", &["del", "lam"], &[3, 3])],
            equations: vec![terms],
        }
    }

    #[test]
    fn lambda_only_solutions() {
        let basis = lambda_only_system(false).solve().unwrap();
        assert_eq!(basis.dimension, 4);
        let r = &basis.vectors[0][0].ring().clone();
        let del = r.index_of("del").unwrap();
        for v in &basis.vectors {
            assert_eq!(v[0].degree_in(del), Some(0), "{} depends on del", v[0]);
        }
    }

    #[test]
    fn solve_is_order_independent() {
        let a = lambda_only_system(false).solve().unwrap();
        let b = lambda_only_system(true).solve().unwrap();
        assert_eq!(a.dimension, b.dimension);
        for (va, vb) in a.vectors.iter().zip(&b.vectors) {
            assert_eq!(va, vb);
        }
    }

    #[test]
    fn symbolic_parameters_are_refused() {
        let alg = build_algebra("HVSab", &Params::new()).unwrap();
        assert!(matches!(
            solve_derivations(&alg, Parity::Even, 3, 3),
            Err(Error::SymbolicParameter(_))
        ));
    }

    #[test]
    fn hvs_even_derivations() {
        let alg = build_algebra("HVS", &Params::new()).unwrap();
        let space = solve_derivations(&alg, Parity::Even, 3, 3).unwrap();
        assert_eq!(space.outer_dim, 1);
        assert!(space.stable);
        // the representative is L ↦ H (up to normalization)
        let rep = &space.outer_reps[0];
        assert_eq!(*rep.entry(0, 1), Polynomial::one(alg.ring()));
        for (i, j) in [(0, 0), (1, 0), (1, 1), (2, 2)] {
            assert!(rep.entry(i, j).is_zero(), "entry ({i},{j}) = {}", rep.entry(i, j));
        }
        let odd = solve_derivations(&alg, Parity::Odd, 3, 3).unwrap();
        assert_eq!(odd.outer_dim, 0);
        assert!(odd.stable);
    }

    #[test]
    fn derivation_basis_passes_checker() {
        let alg = build_algebra("NS", &Params::new()).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let space = solve_derivations(&alg, parity, 3, 3).unwrap();
            assert_eq!(space.outer_dim, 0);
            for d in &space.basis {
                assert!(crate::maps::is_derivation(&alg, d).unwrap().passed);
            }
        }
    }

    #[test]
    fn hvs_biderivations_all_inner() {
        let alg = build_algebra("HVS", &Params::new()).unwrap();
        let space = solve_biderivations(&alg, 3, 3).unwrap();
        assert_eq!(space.dim, 1);
        assert_eq!(space.outer_dim, 0);
        assert!(space.stable);
        for phi in &space.basis {
            assert!(crate::bider::is_biderivation(&alg, phi)
                .unwrap()
                .iter()
                .all(|o| o.passed));
        }
    }

    #[test]
    fn hvs2_biderivations_beta2() {
        let alg = build_algebra(
            "HVS2",
            &rational_params(&[("beta", rat(2, 1)), ("gamma", rat(0, 1)), ("tau", rat(0, 1))]),
        )
        .unwrap();
        let space = solve_biderivations(&alg, 3, 3).unwrap();
        assert_eq!(space.dim, 2);
        // one basis map carries a multiple of (∂+2λ)E on (L,L)
        let want = Polynomial::parse("del + 2*lam", alg.ring()).unwrap();
        assert!(space
            .basis
            .iter()
            .any(|phi| *phi.entry(0, 0, 2) == want.scale(&rat(1, 2))));
    }

    #[test]
    fn keyeq_examples() {
        // (1,0,1): a−b+c = 2, b = 0 → x(x+y)
        let basis = solve_keyeq(&int(1), &int(0), &int(1), 4).unwrap();
        assert_eq!(basis.dimension, 1);
        let r = keyeq_ring();
        let want = Polynomial::parse("x*(x + y)", &r).unwrap();
        assert_eq!(basis.vectors[0][0], want);

        // a−b+c = 1/2 → no solutions
        let basis = solve_keyeq(&rat(3, 2), &int(2), &int(1), 4).unwrap();
        assert_eq!(basis.dimension, 0);

        // (1,0,0): c = 0, a−b = 1, b = 0 → span{x, y}
        let basis = solve_keyeq(&int(1), &int(0), &int(0), 4).unwrap();
        assert_eq!(basis.dimension, 2);
    }

    #[test]
    fn monotone_in_bounds() {
        let alg = build_algebra("HVS", &Params::new()).unwrap();
        let d3 = solve_derivations(&alg, Parity::Even, 3, 3).unwrap();
        let d4 = solve_derivations(&alg, Parity::Even, 4, 4).unwrap();
        assert!(d4.dim >= d3.dim);
        assert_eq!(d4.outer_dim, d3.outer_dim);
    }

    #[test]
    fn empty_unknowns_rejected() {
        let r = Ring::new(&["lam"], &[]);
        let system = LinearSystem {
            ring: r,
            unknowns: vec![],
            equations: vec![],
        };
        assert!(matches!(system.solve(), Err(Error::EmptySystem)));
    }
}
