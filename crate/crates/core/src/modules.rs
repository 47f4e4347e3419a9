//! Free graded conformal modules over a fixed algebra: representation,
//! axiom checker, a catalog of the rank-1 and rank-(1+1) module families,
//! a submodule spot-check for rank-1 modules, and the linear branch of
//! rank-(1+1) module discovery (odd action on one basis vector unknown,
//! the other fixed to zero).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::{CheckOutcome, LcsAlgebra, Parity, Violation};
use crate::catalog::{self, ParamValue, Params};
use crate::poly::{rational, Polynomial, Rational, Ring};
use crate::solver::{LinearSystem, LinearTermRef, SolutionBasis, UnknownPoly};
use crate::{Error, Result};

fn parity_sum(a: Parity, b: Parity) -> Parity {
    if b == Parity::Odd {
        a.flip()
    } else {
        a
    }
}

/// A free ℤ₂-graded module with one action matrix per algebra generator:
/// g_λ v_p = Σ_q A\[g\]\[p\]\[q\](∂, λ) v_q.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalModule {
    pub name: String,
    algebra: LcsAlgebra,
    basis: Vec<String>,
    parities: Vec<Parity>,
    action: Vec<Vec<Vec<Polynomial>>>,
}

impl ConformalModule {
    pub fn new(
        algebra: LcsAlgebra,
        name: impl Into<String>,
        basis: Vec<(String, Parity)>,
        action: Vec<Vec<Vec<Polynomial>>>,
    ) -> Result<ConformalModule> {
        let n = algebra.num_gens();
        let r = basis.len();
        if action.len() != n
            || action
                .iter()
                .any(|m| m.len() != r || m.iter().any(|row| row.len() != r))
        {
            return Err(Error::Shape(format!(
                "action must be {n} matrices of shape {r}x{r}"
            )));
        }
        let ring = algebra.ring();
        let mu = ring.index_of("mu");
        let nu = ring.index_of("nu");
        let (basis, parities): (Vec<String>, Vec<Parity>) = basis.into_iter().unzip();
        for (g, m) in action.iter().enumerate() {
            for (p, row) in m.iter().enumerate() {
                for (q, e) in row.iter().enumerate() {
                    if **e.ring() != **ring {
                        return Err(Error::RingMismatch(
                            "module ring".into(),
                            "action entry ring".into(),
                        ));
                    }
                    for idx in [mu, nu].into_iter().flatten() {
                        if e.uses(idx) {
                            return Err(Error::Shape(
                                "action entries may only involve del, lam and parameters".into(),
                            ));
                        }
                    }
                    if !e.is_zero()
                        && parities[q] != parity_sum(algebra.parity(g), parities[p])
                    {
                        return Err(Error::Shape(format!(
                            "action of {} maps {} onto {} across the wrong parity",
                            algebra.gens()[g],
                            basis[p],
                            basis[q]
                        )));
                    }
                }
            }
        }
        Ok(ConformalModule {
            name: name.into(),
            algebra,
            basis,
            parities,
            action,
        })
    }

    pub fn algebra(&self) -> &LcsAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn action(&self, gen: usize, p: usize, q: usize) -> &Polynomial {
        &self.action[gen][p][q]
    }

    /// The same actions with the basis parities swapped.
    pub fn parity_flip(&self) -> ConformalModule {
        let mut out = self.clone();
        out.name = format!("{}-flipped", self.name);
        for p in out.parities.iter_mut() {
            *p = p.flip();
        }
        out
    }
}

/// Bracket-action compatibility on every generator pair and basis vector:
/// [g_i λ g_j]_{λ+μ} v = g_i λ (g_j μ v) − (−1)^{|i||j|} g_j μ (g_i λ v).
pub fn is_module(m: &ConformalModule) -> Result<CheckOutcome> {
    let alg = &m.algebra;
    let ring = alg.ring();
    let n = alg.num_gens();
    let r = m.rank();
    let lam = Polynomial::var(ring, "lam")?;
    let mu = Polynomial::var(ring, "mu")?;
    let del = Polynomial::var(ring, "del")?;
    let lam_mu = lam.add(&mu)?;
    let neg_lam_mu = lam_mu.neg();
    let del_lam = del.add(&lam)?;
    let del_mu = del.add(&mu)?;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let sign = alg.parity(i).product_sign(alg.parity(j));
            for p in 0..r {
                for q in 0..r {
                    let mut residual = Polynomial::zero(ring);
                    for k in 0..n {
                        if alg.structure(i, j, k).is_zero() || m.action[k][p][q].is_zero() {
                            continue;
                        }
                        let b = alg
                            .structure(i, j, k)
                            .substitute_by_name(&[("del", neg_lam_mu.clone())])?;
                        let a = m.action[k][p][q].substitute_by_name(&[("lam", lam_mu.clone())])?;
                        residual = residual.add(&b.mul(&a)?)?;
                    }
                    for s in 0..r {
                        // −g_i λ (g_j μ v_p)
                        if !m.action[j][p][s].is_zero() && !m.action[i][s][q].is_zero() {
                            let first = m.action[j][p][s].substitute_by_name(&[
                                ("del", del_lam.clone()),
                                ("lam", mu.clone()),
                            ])?;
                            residual = residual.sub(&first.mul(&m.action[i][s][q])?)?;
                        }
                        // +(−1)^{|i||j|} g_j μ (g_i λ v_p)
                        if !m.action[i][p][s].is_zero() && !m.action[j][s][q].is_zero() {
                            let first = m.action[i][p][s]
                                .substitute_by_name(&[("del", del_mu.clone())])?;
                            let second = m.action[j][s][q]
                                .substitute_by_name(&[("lam", mu.clone())])?;
                            residual =
                                residual.add(&first.mul(&second)?.scale(&sign))?;
                        }
                    }
                    if !residual.is_zero() {
                        violations.push(Violation {
                            context: format!(
                                "([{} l {}], {})",
                                alg.gens()[i],
                                alg.gens()[j],
                                m.basis[p]
                            ),
                            component: m.basis[q].clone(),
                            residual: residual.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(CheckOutcome::new("module-compatibility", violations))
}

// --- module family catalog ---------------------------------------------------

/// name, nonzero flag, must be rational
type MParamDef = (&'static str, bool, bool);

struct FamilyDef {
    key: &'static str,
    algebra: &'static str,
    description: &'static str,
    params: &'static [MParamDef],
}

const FAMILIES: &[FamilyDef] = &[
    FamilyDef {
        key: "P2.6-M",
        algebra: "Vir",
        description: "rank 1: L v = (del + a + Delta*lam) v",
        params: &[("Delta", false, false), ("a", false, false)],
    },
    FamilyDef {
        key: "P2.7-M",
        algebra: "HV",
        description: "rank 1: L v = (del + a + Delta*lam) v, H v = b v",
        params: &[("Delta", false, false), ("a", false, false), ("b", false, false)],
    },
    FamilyDef {
        key: "T7.3-M1",
        algebra: "HVS",
        description: "rank 1+1: equal weights, G v0 = b v1, G v1 = c v0, H = bc",
        params: &[
            ("Delta", false, false),
            ("a", false, false),
            ("b", false, false),
            ("c", false, false),
        ],
    },
    FamilyDef {
        key: "T7.3-M2",
        algebra: "HVS",
        description: "rank 1+1: weights (Delta0, Delta0-1), G v0 = lam v1",
        params: &[("Delta0", false, false), ("a", false, false)],
    },
    FamilyDef {
        key: "T7.3-M3",
        algebra: "HVS",
        description: "rank 1+1: weights (Delta0, Delta0-2), G v0 = lam(del - Delta1*lam + a) v1",
        params: &[("Delta0", false, false), ("a", false, false)],
    },
    FamilyDef {
        key: "T7.3-M4",
        algebra: "HVS",
        description: "rank 1+1: weights (1, 0), G v0 = (del + k*lam + a) v1",
        params: &[("a", false, false), ("k", false, false)],
    },
    FamilyDef {
        key: "T7.3-M5",
        algebra: "HVS",
        description: "rank 1+1: weights (1, -2), G v0 = lam(del+lam+a)(del+2lam+a) v1",
        params: &[("a", false, false)],
    },
    FamilyDef {
        key: "T7.3-M6",
        algebra: "HVS",
        description: "rank 1+1: weights (3, 0), G v0 = lam(del+a)(del-lam+a) v1",
        params: &[("a", false, false)],
    },
    FamilyDef {
        key: "T7.4-M1",
        algebra: "HVS2",
        description: "rank 1+1: weights (Delta0, Delta0+beta-1), E v0 = v1",
        params: &[
            ("Delta0", false, false),
            ("a", false, false),
            ("beta", false, false),
            ("gamma", false, false),
        ],
    },
    FamilyDef {
        key: "T7.4-M2",
        algebra: "HVS2",
        description: "rank 1+1 at beta=1: weights (Delta0, Delta0-1), E v0 = (lam-gamma) v1",
        params: &[("Delta0", false, false), ("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M3",
        algebra: "HVS2",
        description: "rank 1+1 at beta=1: weights (Delta0, Delta0-2), quadratic E action",
        params: &[("Delta0", false, false), ("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M4",
        algebra: "HVS2",
        description: "rank 1+1: weights (k(beta-1)-beta+2, k(beta-1)), linear E action",
        params: &[
            ("a", false, false),
            ("k", false, false),
            ("beta", false, false),
            ("gamma", false, false),
        ],
    },
    FamilyDef {
        key: "T7.4-M5",
        algebra: "HVS2",
        description: "rank 1+1 at beta not in {1,2}: weights (1, beta-2), quadratic E action",
        params: &[("a", false, false), ("beta", false, true), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M6",
        algebra: "HVS2",
        description: "rank 1+1 at beta != 1: weights (3-beta, 0), quadratic E action",
        params: &[("a", false, false), ("beta", false, true), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M7",
        algebra: "HVS2",
        description: "rank 1+1 at beta=5/3: weights (5/3, -2/3), cubic E action",
        params: &[("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M8",
        algebra: "HVS2",
        description: "rank 1+1 at beta=3: weights (1, 0), cubic E action",
        params: &[("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M9",
        algebra: "HVS2",
        description: "rank 1+1 at beta=1: weights (1, -2), cubic E action",
        params: &[("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M10",
        algebra: "HVS2",
        description: "rank 1+1 at beta=1: weights (3, 0), cubic E action",
        params: &[("a", false, false), ("gamma", false, false)],
    },
    FamilyDef {
        key: "T7.4-M1b",
        algebra: "HVS2",
        description: "rank 1+1: weights (Delta0, Delta0+beta-1), E v0 = v1, H = b",
        params: &[
            ("Delta0", false, false),
            ("a", false, false),
            ("b", true, false),
            ("beta", false, false),
            ("gamma", false, false),
        ],
    },
    FamilyDef {
        key: "T7.4-M2b",
        algebra: "HVS2",
        description: "rank 1+1 at beta=1: weights (Delta0, Delta0-1), E v0 = (lam-gamma) v1, H = b",
        params: &[
            ("Delta0", false, false),
            ("a", false, false),
            ("b", true, false),
            ("gamma", false, false),
        ],
    },
];

pub struct FamilyInfo {
    pub key: String,
    pub algebra: String,
    pub description: String,
    pub params: Vec<String>,
}

pub fn families() -> Vec<FamilyInfo> {
    FAMILIES
        .iter()
        .map(|f| FamilyInfo {
            key: f.key.into(),
            algebra: f.algebra.into(),
            description: f.description.into(),
            params: f.params.iter().map(|(n, _, _)| (*n).to_string()).collect(),
        })
        .collect()
}

/// Resolved parameter: its value in the catalog sense plus its polynomial
/// image in the module ring.
struct Resolved {
    values: BTreeMap<String, ParamValue>,
    ring: Arc<Ring>,
}

impl Resolved {
    fn value(&self, name: &str) -> &ParamValue {
        &self.values[name]
    }

    fn poly(&self, name: &str) -> Polynomial {
        match &self.values[name] {
            ParamValue::Rational(v) => Polynomial::constant(&self.ring, v.clone()),
            ParamValue::Symbolic => Polynomial::var(&self.ring, name).unwrap(),
        }
    }

    fn rational(&self, name: &str) -> Result<Rational> {
        match &self.values[name] {
            ParamValue::Rational(v) => Ok(v.clone()),
            ParamValue::Symbolic => Err(Error::Schema(format!(
                "parameter `{name}` must be a rational value for this family"
            ))),
        }
    }
}

fn resolve_params(def: &FamilyDef, params: &Params) -> Result<Resolved> {
    for name in params.keys() {
        if !def.params.iter().any(|(n, _, _)| n == name) {
            return Err(Error::Schema(format!(
                "family {} has no parameter `{}`",
                def.key, name
            )));
        }
    }
    let mut values = BTreeMap::new();
    let mut symbolic = Vec::new();
    for (name, nonzero, rational_only) in def.params {
        let value = params.get(*name).cloned().unwrap_or(ParamValue::Symbolic);
        match &value {
            ParamValue::Rational(v) => {
                if *nonzero && v.is_zero() {
                    return Err(Error::ZeroParameter((*name).into()));
                }
            }
            ParamValue::Symbolic => {
                if *rational_only {
                    return Err(Error::Schema(format!(
                        "parameter `{name}` must be a rational value for this family"
                    )));
                }
                symbolic.push(*name);
            }
        }
        values.insert((*name).to_string(), value);
    }
    let ring = Ring::new(&["lam", "mu", "nu"], &symbolic);
    Ok(Resolved { values, ring })
}

/// Re-express an algebra's bracket table in the module ring.
fn align_algebra(alg: &LcsAlgebra, ring: &Arc<Ring>) -> Result<LcsAlgebra> {
    let n = alg.num_gens();
    let mut table = vec![vec![vec![Polynomial::zero(ring); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                table[i][j][k] = alg.structure(i, j, k).into_ring(ring)?;
            }
        }
    }
    let gens = alg
        .gens()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), alg.parity(i)))
        .collect();
    LcsAlgebra::new(alg.name.clone(), ring, gens, table, alg.params().to_vec())
}

fn rank2_module(
    algebra: LcsAlgebra,
    name: &str,
    f0: Polynomial,
    f1: Polynomial,
    h_const: Polynomial,
    odd_up: Polynomial,
    odd_down: Polynomial,
) -> Result<ConformalModule> {
    let ring = algebra.ring();
    let zero = Polynomial::zero(ring);
    let action = vec![
        vec![vec![f0, zero.clone()], vec![zero.clone(), f1]],
        vec![
            vec![h_const.clone(), zero.clone()],
            vec![zero.clone(), h_const],
        ],
        vec![
            vec![zero.clone(), odd_up],
            vec![odd_down, zero.clone()],
        ],
    ];
    ConformalModule::new(
        algebra,
        name,
        vec![("v0".into(), Parity::Even), ("v1".into(), Parity::Odd)],
        action,
    )
}

pub fn build_module(key: &str, params: &Params) -> Result<ConformalModule> {
    let def = FAMILIES
        .iter()
        .find(|f| f.key == key)
        .ok_or_else(|| Error::UnknownKey(key.into()))?;
    let res = resolve_params(def, params)?;
    let ring = Arc::clone(&res.ring);

    // forward shared parameters to the algebra builder
    let mut alg_params = Params::new();
    match def.algebra {
        "HVS2" => {
            let beta = match key {
                "T7.4-M7" => ParamValue::Rational(rational("5/3").unwrap()),
                "T7.4-M8" => ParamValue::Rational(rational("3").unwrap()),
                "T7.4-M2" | "T7.4-M3" | "T7.4-M9" | "T7.4-M10" | "T7.4-M2b" => {
                    ParamValue::Rational(Rational::one())
                }
                _ => res.value("beta").clone(),
            };
            alg_params.insert("beta".into(), beta);
            alg_params.insert("gamma".into(), res.value("gamma").clone());
            alg_params.insert("tau".into(), ParamValue::Rational(Rational::zero()));
        }
        _ => {}
    }
    let algebra = align_algebra(&catalog::build_algebra(def.algebra, &alg_params)?, &ring)?;

    let del = Polynomial::var(&ring, "del")?;
    let lam = Polynomial::var(&ring, "lam")?;
    let one = Polynomial::one(&ring);
    let zero = Polynomial::zero(&ring);
    let c = |text: &str| Polynomial::constant(&ring, rational(text).unwrap());
    // weight polynomial del + Delta*lam + shift
    let weight = |delta: &Polynomial, shift: &Polynomial| -> Result<Polynomial> {
        del.add(&delta.mul(&lam)?)?.add(shift)
    };

    match key {
        "P2.6-M" | "P2.7-M" => {
            let f = weight(&res.poly("Delta"), &res.poly("a"))?;
            let action = if key == "P2.6-M" {
                vec![vec![vec![f]]]
            } else {
                vec![vec![vec![f]], vec![vec![res.poly("b")]]]
            };
            ConformalModule::new(
                algebra,
                key,
                vec![("v".into(), Parity::Even)],
                action,
            )
        }
        "T7.3-M1" => {
            let f = weight(&res.poly("Delta"), &res.poly("a"))?;
            let (b, cc) = (res.poly("b"), res.poly("c"));
            rank2_module(algebra, key, f.clone(), f, b.mul(&cc)?, b, cc)
        }
        "T7.3-M2" | "T7.3-M3" => {
            let d0 = res.poly("Delta0");
            let a = res.poly("a");
            let gap = if key == "T7.3-M2" { c("1") } else { c("2") };
            let d1 = d0.sub(&gap)?;
            let h = if key == "T7.3-M2" {
                lam.clone()
            } else {
                // lam * (del - Delta1*lam + a)
                lam.mul(&del.sub(&d1.mul(&lam)?)?.add(&a)?)?
            };
            rank2_module(
                algebra,
                key,
                weight(&d0, &a)?,
                weight(&d1, &a)?,
                zero,
                h,
                Polynomial::zero(&ring),
            )
        }
        "T7.3-M4" => {
            let a = res.poly("a");
            let h = weight(&res.poly("k"), &a)?;
            rank2_module(
                algebra,
                key,
                weight(&one, &a)?,
                weight(&zero, &a)?,
                zero.clone(),
                h,
                zero,
            )
        }
        "T7.3-M5" => {
            let a = res.poly("a");
            let h = lam
                .mul(&weight(&one, &a)?)?
                .mul(&weight(&c("2"), &a)?)?;
            rank2_module(
                algebra,
                key,
                weight(&one, &a)?,
                weight(&c("-2"), &a)?,
                zero.clone(),
                h,
                zero,
            )
        }
        "T7.3-M6" => {
            let a = res.poly("a");
            let h = lam
                .mul(&del.add(&a)?)?
                .mul(&weight(&c("-1"), &a)?)?;
            rank2_module(
                algebra,
                key,
                weight(&c("3"), &a)?,
                weight(&zero, &a)?,
                zero.clone(),
                h,
                zero,
            )
        }
        _ => {
            // shifted variables for the translated weight actions: db = del + a, lb = lam - gamma
            let a = res.poly("a");
            let gamma = res.poly("gamma");
            let db = del.add(&a)?;
            let lb = lam.sub(&gamma)?;
            let shift0 = a.sub(&gamma)?;
            let (d0, d1, h): (Polynomial, Polynomial, Polynomial) = match key {
                "T7.4-M1" | "T7.4-M1b" => {
                    let d0 = res.poly("Delta0");
                    let beta = res.poly("beta");
                    (d0.clone(), d0.add(&beta)?.sub(&one)?, one.clone())
                }
                "T7.4-M2" | "T7.4-M2b" => {
                    let d0 = res.poly("Delta0");
                    (d0.clone(), d0.sub(&one)?, lb.clone())
                }
                "T7.4-M3" => {
                    let d0 = res.poly("Delta0");
                    let d1 = d0.sub(&c("2"))?;
                    (d0, d1.clone(), lb.mul(&db.sub(&d1.mul(&lb)?)?)?)
                }
                "T7.4-M4" => {
                    let k = res.poly("k");
                    let beta = res.poly("beta");
                    let bm1 = beta.sub(&one)?;
                    let d1 = k.mul(&bm1)?;
                    let d0 = d1.sub(&beta)?.add(&c("2"))?;
                    (d0, d1, db.add(&k.mul(&lb)?)?)
                }
                "T7.4-M5" => {
                    let beta = res.rational("beta")?;
                    if beta == Rational::one() || beta == rational("2").unwrap() {
                        return Err(Error::Schema(
                            "this family requires beta distinct from 1 and 2".into(),
                        ));
                    }
                    let slope = (&beta - Rational::from_integer(2.into()))
                        / (&beta - Rational::one());
                    let d1 = Polynomial::constant(&ring, &beta - Rational::from_integer(2.into()));
                    let h = db
                        .add(&lb)?
                        .mul(&db.add(&lb.scale(&slope))?)?;
                    (one.clone(), d1, h)
                }
                "T7.4-M6" => {
                    let beta = res.rational("beta")?;
                    if beta == Rational::one() {
                        return Err(Error::Schema(
                            "this family requires beta distinct from 1".into(),
                        ));
                    }
                    let slope = (&beta - Rational::one()).recip();
                    let d0 = Polynomial::constant(
                        &ring,
                        Rational::from_integer(3.into()) - &beta,
                    );
                    let h = db.mul(&db.add(&lb.scale(&slope))?)?;
                    (d0, zero.clone(), h)
                }
                "T7.4-M7" => {
                    // the cubic solves the bracket compatibility exactly at
                    // weights (5/3, -2/3), verified against the module axioms
                    let h = db
                        .sub(&lb)?
                        .mul(&db.add(&lb.scale(&rational("1/2").unwrap()))?)?
                        .mul(&db.add(&lb.scale(&rational("2").unwrap()))?)?;
                    (c("5/3"), c("-2/3"), h)
                }
                "T7.4-M8" => {
                    let h = db
                        .mul(&db.add(&lb.scale(&rational("1/2").unwrap()))?)?
                        .mul(&db.add(&lb)?)?;
                    (one.clone(), zero.clone(), h)
                }
                "T7.4-M9" => {
                    let h = lb
                        .mul(&db.add(&lb)?)?
                        .mul(&db.add(&lb.scale(&rational("2").unwrap()))?)?;
                    (one.clone(), c("-2"), h)
                }
                "T7.4-M10" => {
                    let h = lb.mul(&db)?.mul(&db.sub(&lb)?)?;
                    (c("3"), zero.clone(), h)
                }
                _ => unreachable!("family key validated above"),
            };
            let h_const = if key.ends_with('b') {
                res.poly("b")
            } else {
                zero
            };
            rank2_module(
                algebra,
                key,
                weight(&d0, &shift0)?,
                weight(&d1, &a)?,
                h_const,
                h,
                Polynomial::zero(&ring),
            )
        }
    }
}

// --- rank-(1+1) discovery (linear branch) --------------------------------------

pub struct Discovery {
    pub basis: SolutionBasis,
    pub modules: Vec<ConformalModule>,
}

/// All odd actions X v₀ = h(∂,λ) v₁, X v₁ = 0 within the degree bound that
/// extend the fixed even action L v_i = (∂+Δ_iλ+a)-type weights and H = b.
///
/// The algebra must be rank (2+1) with generators ordered (L, H, X) and an
/// X-bracket of the shape [L_λ X] = (∂+βλ+γ)X, [H_λ X] = τX, [X_λ X] = αH.
pub fn discover_rank11(
    alg: &LcsAlgebra,
    delta0: &Rational,
    delta1: &Rational,
    a: &Rational,
    b: &Rational,
    bound: u32,
) -> Result<Discovery> {
    crate::solver::reject_symbolic(alg)?;
    if alg.num_gens() != 3
        || alg.parity(0) != Parity::Even
        || alg.parity(1) != Parity::Even
        || alg.parity(2) != Parity::Odd
    {
        return Err(Error::Precondition(
            "discovery requires a rank (2+1) algebra with generators (L, H, X)".into(),
        ));
    }
    let ring = alg.ring();
    let del = Polynomial::var(ring, "del")?;
    let lam = Polynomial::var(ring, "lam")?;
    let mu = Polynomial::var(ring, "mu")?;

    // read beta, gamma, tau, alpha off the bracket table
    let lx = alg.structure(0, 2, 2);
    let constant_of = |p: &Polynomial| -> Result<Rational> {
        if p.is_zero() {
            return Ok(Rational::zero());
        }
        if p.total_degree() != Some(0) {
            return Err(Error::Precondition(
                "expected a constant structure coefficient".into(),
            ));
        }
        rational(&p.to_string()).ok_or_else(|| Error::Precondition(
            "expected a rational constant structure coefficient".into(),
        ))
    };
    let gamma = constant_of(&lx.substitute_by_name(&[
        ("del", Polynomial::zero(ring)),
        ("lam", Polynomial::zero(ring)),
    ])?)?;
    let beta_poly = lx
        .substitute_by_name(&[("del", Polynomial::zero(ring)), ("lam", Polynomial::one(ring))])?
        .sub(&Polynomial::constant(ring, gamma.clone()))?;
    let beta = constant_of(&beta_poly)?;
    let expected = del
        .add(&lam.scale(&beta))?
        .add(&Polynomial::constant(ring, gamma.clone()))?;
    if *lx != expected {
        return Err(Error::Precondition(
            "the [L l X] bracket must have the shape (del + beta*lam + gamma) X".into(),
        ));
    }
    let tau = constant_of(alg.structure(1, 2, 2))?;
    let alpha = constant_of(alg.structure(2, 2, 1))?;

    // odd-odd compatibility: with X v1 = 0, [X l X] = alpha*H forces alpha*b = 0
    if !alpha.is_zero() && !b.is_zero() {
        return Ok(Discovery {
            basis: SolutionBasis::empty(vec!["h".into()]),
            modules: Vec::new(),
        });
    }

    let f0 = del
        .add(&lam.scale(delta0))?
        .add(&Polynomial::constant(ring, a - &gamma))?;
    let f1 = del
        .add(&lam.scale(delta1))?
        .add(&Polynomial::constant(ring, a.clone()))?;
    let del_lam = del.add(&lam)?;
    let lam_mu = lam.add(&mu)?;
    // (beta-1)*lam - mu + gamma
    let rhs_coeff = lam
        .scale(&(&beta - Rational::one()))
        .sub(&mu)?
        .add(&Polynomial::constant(ring, gamma.clone()))?;
    let bc = Polynomial::constant(ring, b.clone());
    let system = LinearSystem {
        ring: Arc::clone(ring),
        unknowns: vec![UnknownPoly::new("h", &["del", "lam"], &[bound, bound])],
        equations: vec![
            vec![
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del_lam.clone(), mu.clone()],
                    coeff: f1.clone(),
                },
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del.clone(), mu.clone()],
                    coeff: f0.substitute_by_name(&[("del", del.add(&mu)?)])?.neg(),
                },
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del.clone(), lam_mu.clone()],
                    coeff: rhs_coeff.neg(),
                },
            ],
            vec![
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del_lam, mu.clone()],
                    coeff: bc.clone(),
                },
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del.clone(), mu.clone()],
                    coeff: bc.neg(),
                },
                LinearTermRef {
                    unknown: "h".into(),
                    subs: vec![del.clone(), lam_mu],
                    coeff: Polynomial::constant(ring, -&tau),
                },
            ],
        ],
    };
    let basis = system.solve()?;

    let mut modules = Vec::new();
    for (i, v) in basis.vectors.iter().enumerate() {
        let m = rank2_module(
            alg.clone(),
            &format!("discovered{i}"),
            f0.clone(),
            f1.clone(),
            bc.clone(),
            v[0].clone(),
            Polynomial::zero(ring),
        )?;
        let outcome = is_module(&m)?;
        if !outcome.passed {
            return Err(Error::Precondition(
                "a discovered action fails the module axioms".into(),
            ));
        }
        modules.push(m);
    }
    Ok(Discovery { basis, modules })
}

// --- submodule spot-check -------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SubmoduleReport {
    pub closed: bool,
    /// Induced action polynomial per generator, when closed.
    pub induced: Vec<Polynomial>,
    pub residuals: Vec<Violation>,
}

/// Whether the ℂ\[∂\]-span of `elem(∂)·v` is closed under the action of a
/// rank-1 module, and the induced action polynomials if so.
pub fn submodule_check(m: &ConformalModule, elem: &Polynomial) -> Result<SubmoduleReport> {
    if m.rank() != 1 {
        return Err(Error::Precondition(
            "the submodule spot-check applies to rank-1 modules".into(),
        ));
    }
    let ring = m.algebra.ring();
    if **elem.ring() != **ring {
        return Err(Error::RingMismatch(
            "module ring".into(),
            "element ring".into(),
        ));
    }
    let del_idx = ring.index_of("del").unwrap();
    for (idx, var) in ring.vars().iter().enumerate() {
        if idx != del_idx && var.role != crate::poly::Role::Parameter && elem.uses(idx) {
            return Err(Error::Precondition(
                "the generator element must be a polynomial in del".into(),
            ));
        }
    }
    let del = Polynomial::var(ring, "del")?;
    let lam = Polynomial::var(ring, "lam")?;
    let shifted = elem.substitute_by_name(&[("del", del.add(&lam)?)])?;
    let mut induced = Vec::new();
    let mut residuals = Vec::new();
    for (g, mat) in m.action.iter().enumerate() {
        let image = shifted.mul(&mat[0][0])?;
        let (quo, rem) = image.divmod_in(elem, del_idx)?;
        if rem.is_zero() {
            induced.push(quo);
        } else {
            induced.push(Polynomial::zero(ring));
            residuals.push(Violation {
                context: m.algebra.gens()[g].clone(),
                component: m.basis[0].clone(),
                residual: rem.to_string(),
            });
        }
    }
    Ok(SubmoduleReport {
        closed: residuals.is_empty(),
        induced,
        residuals,
    })
}

// --- file format -----------------------------------------------------------------

pub fn to_text(m: &ConformalModule) -> String {
    let mut out = String::new();
    out.push_str(&format!("module {} over {}\n", m.name, m.algebra.name));
    for (p, name) in m.basis.iter().enumerate() {
        let parity = match m.parities[p] {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        out.push_str(&format!("basis {name} {parity}\n"));
    }
    for (g, mat) in m.action.iter().enumerate() {
        for (p, row) in mat.iter().enumerate() {
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(q, e)| format!("({e}) * {}", m.basis[q]))
                .collect();
            if !terms.is_empty() {
                out.push_str(&format!(
                    "action {} {} = {}\n",
                    m.algebra.gens()[g],
                    m.basis[p],
                    terms.join(" + ")
                ));
            }
        }
    }
    out
}

pub fn from_text(text: &str, origin: &str) -> Result<ConformalModule> {
    let fail = |line: usize, msg: String| Error::Format {
        path: origin.into(),
        line,
        msg,
    };
    let mut name = None;
    let mut algebra: Option<LcsAlgebra> = None;
    let mut basis: Vec<(String, Parity)> = Vec::new();
    let mut actions: Vec<(usize, usize, usize, Vec<Polynomial>)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("module") => {
                let n = words
                    .next()
                    .ok_or_else(|| fail(ln, "expected `module <name> over <key>`".into()))?;
                if words.next() != Some("over") {
                    return Err(fail(ln, "expected `module <name> over <key>`".into()));
                }
                let key = words
                    .next()
                    .ok_or_else(|| fail(ln, "missing algebra key".into()))?;
                name = Some(n.to_string());
                algebra = Some(catalog::build_algebra(key, &Params::new())?);
            }
            Some("basis") => {
                if algebra.is_none() {
                    return Err(fail(ln, "`basis` before `module` header".into()));
                }
                let n = words
                    .next()
                    .ok_or_else(|| fail(ln, "expected `basis <name> even|odd`".into()))?;
                let parity = match words.next() {
                    Some("even") => Parity::Even,
                    Some("odd") => Parity::Odd,
                    _ => return Err(fail(ln, "expected parity `even` or `odd`".into())),
                };
                if basis.iter().any(|(b, _)| b == n) {
                    return Err(fail(ln, format!("duplicate basis vector `{n}`")));
                }
                basis.push((n.to_string(), parity));
            }
            Some("action") => {
                let alg = algebra
                    .as_ref()
                    .ok_or_else(|| fail(ln, "`action` before `module` header".into()))?;
                let rest = line["action".len()..].trim();
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| fail(ln, "expected `action <gen> <basis> = <rhs>`".into()))?;
                let mut lhs_words = lhs.split_whitespace();
                let gen = lhs_words
                    .next()
                    .ok_or_else(|| fail(ln, "missing generator".into()))?;
                let vec_name = lhs_words
                    .next()
                    .ok_or_else(|| fail(ln, "missing basis vector".into()))?;
                let g = alg
                    .gen_index(gen)
                    .map_err(|_| fail(ln, format!("unknown generator `{gen}`")))?;
                let p = basis
                    .iter()
                    .position(|(b, _)| b == vec_name)
                    .ok_or_else(|| fail(ln, format!("unknown basis vector `{vec_name}`")))?;
                if actions.iter().any(|(ag, ap, _, _)| *ag == g && *ap == p) {
                    return Err(fail(ln, format!("duplicate action for {gen} on {vec_name}")));
                }
                let row = catalog::parse_bracket_rhs(rhs, alg.ring(), &basis)
                    .map_err(|e| fail(ln, e.to_string()))?;
                actions.push((g, p, ln, row));
            }
            Some(other) => {
                return Err(fail(ln, format!("unrecognized directive `{other}`")));
            }
            None => unreachable!(),
        }
    }
    let algebra = algebra.ok_or_else(|| fail(0, "missing `module` header".into()))?;
    let name = name.unwrap();
    let n = algebra.num_gens();
    let r = basis.len();
    let zero = Polynomial::zero(algebra.ring());
    let mut action = vec![vec![vec![zero; r]; r]; n];
    for (g, p, _, row) in actions {
        action[g][p] = row;
    }
    ConformalModule::new(algebra, name, basis, action)
}

pub fn save(m: &ConformalModule, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), to_text(m)).map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

pub fn load(path: impl AsRef<Path>) -> Result<ConformalModule> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref().display().to_string(), e))?;
    from_text(&text, &path.as_ref().display().to_string())
}
