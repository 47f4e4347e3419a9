//! Built-in algebra constructors and the line-oriented text format for
//! user-defined algebras.
//!
//! Catalog keys are stable strings (`Vir`, `HV`, `NS`, `HVS`, `HVSab`,
//! `HVS2`, `rank11-R1..R5`, `prop31-R1..R3`). Family parameters may be
//! given rational values or kept symbolic; symbolic parameters stay in the
//! ring, so a passing axiom check covers every value at once.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::algebra::{LcsAlgebra, Param, Parity};
use crate::poly::{rational, Polynomial, Rational, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Rational(Rational),
    Symbolic,
}

pub type Params = BTreeMap<String, ParamValue>;

pub fn rational_params(pairs: &[(&str, Rational)]) -> Params {
    pairs
        .iter()
        .map(|(n, v)| ((*n).to_string(), ParamValue::Rational(v.clone())))
        .collect()
}

pub fn symbolic_params(names: &[&str]) -> Params {
    names
        .iter()
        .map(|n| ((*n).to_string(), ParamValue::Symbolic))
        .collect()
}

/// name, nonzero flag, default rational value (None = symbolic by default)
type ParamDef = (&'static str, bool, Option<&'static str>);

struct EntryDef {
    key: &'static str,
    aliases: &'static [&'static str],
    description: &'static str,
    gens: &'static [(&'static str, Parity)],
    params: &'static [ParamDef],
    /// (g1, g2, right-hand side in the bracket line syntax)
    brackets: &'static [(&'static str, &'static str, &'static str)],
}

const ENTRIES: &[EntryDef] = &[
    EntryDef {
        key: "Vir",
        aliases: &[],
        description: "Virasoro: [L_l L] = (del + 2*lam) L",
        gens: &[("L", Parity::Even)],
        params: &[],
        brackets: &[("L", "L", "(del + 2*lam) * L")],
    },
    EntryDef {
        key: "HV",
        aliases: &[],
        description: "Heisenberg-Virasoro: Vir plus [L_l H] = (del + lam) H, [H_l H] = 0",
        gens: &[("L", Parity::Even), ("H", Parity::Even)],
        params: &[],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
        ],
    },
    EntryDef {
        key: "NS",
        aliases: &[],
        description: "Neveu-Schwarz: [L_l G] = (del + 3/2*lam) G, [G_l G] = 2 L",
        gens: &[("L", Parity::Even), ("G", Parity::Odd)],
        params: &[],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "G", "(del + 3/2*lam) * G"),
            ("G", "G", "2 * L"),
        ],
    },
    EntryDef {
        key: "HVS",
        aliases: &[],
        description: "HV extended by odd G: [L_l G] = (del + lam) G, [G_l G] = alpha H (default alpha = 2)",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("G", Parity::Odd)],
        params: &[("alpha", true, Some("2"))],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
            ("L", "G", "(del + lam) * G"),
            ("G", "G", "alpha * H"),
        ],
    },
    EntryDef {
        key: "HVSab",
        aliases: &[],
        description: "The HVS family with alpha kept symbolic",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("G", Parity::Odd)],
        params: &[("alpha", true, None)],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
            ("L", "G", "(del + lam) * G"),
            ("G", "G", "alpha * H"),
        ],
    },
    EntryDef {
        key: "HVS2",
        aliases: &[],
        description: "HV extended by odd E: [L_l E] = (del + beta*lam + gamma) E, [H_l E] = tau E, [E_l E] = 0",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("E", Parity::Odd)],
        params: &[("beta", false, None), ("gamma", false, None), ("tau", false, None)],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
            ("L", "E", "(del + beta*lam + gamma) * E"),
            ("H", "E", "tau * E"),
        ],
    },
    EntryDef {
        key: "rank11-R1",
        aliases: &["R1-rank11"],
        description: "rank (1+1): [y_l y] = p(del) x with generic cubic p, all other brackets 0",
        gens: &[("x", Parity::Even), ("y", Parity::Odd)],
        params: &[
            ("p0", false, None),
            ("p1", false, None),
            ("p2", false, None),
            ("p3", false, None),
        ],
        brackets: &[("y", "y", "(p0 + p1*del + p2*del^2 + p3*del^3) * x")],
    },
    EntryDef {
        key: "rank11-R2",
        aliases: &["R2-rank11"],
        description: "rank (1+1): [x_l y] = q(lam) y with generic cubic q, all other brackets 0",
        gens: &[("x", Parity::Even), ("y", Parity::Odd)],
        params: &[
            ("q0", false, None),
            ("q1", false, None),
            ("q2", false, None),
            ("q3", false, None),
        ],
        brackets: &[("x", "y", "(q0 + q1*lam + q2*lam^2 + q3*lam^3) * y")],
    },
    EntryDef {
        key: "rank11-R3",
        aliases: &["R3-rank11"],
        description: "rank (1+1): Virasoro x plus a decoupled odd line",
        gens: &[("x", Parity::Even), ("y", Parity::Odd)],
        params: &[],
        brackets: &[("x", "x", "(del + 2*lam) * x")],
    },
    EntryDef {
        key: "rank11-R4",
        aliases: &["R4-rank11"],
        description: "rank (1+1): Virasoro x acting by [x_l y] = (del + beta*lam + gamma) y",
        gens: &[("x", Parity::Even), ("y", Parity::Odd)],
        params: &[("beta", false, None), ("gamma", false, None)],
        brackets: &[
            ("x", "x", "(del + 2*lam) * x"),
            ("x", "y", "(del + beta*lam + gamma) * y"),
        ],
    },
    EntryDef {
        key: "rank11-R5",
        aliases: &["R5-rank11"],
        description: "rank (1+1): [x_l y] = (del + 3/2*lam) y, [y_l y] = alpha x (NS at alpha = 2)",
        gens: &[("x", Parity::Even), ("y", Parity::Odd)],
        params: &[("alpha", true, None)],
        brackets: &[
            ("x", "x", "(del + 2*lam) * x"),
            ("x", "y", "(del + 3/2*lam) * y"),
            ("y", "y", "alpha * x"),
        ],
    },
    EntryDef {
        key: "prop31-R1",
        aliases: &["Prop3.1-R1"],
        description: "rank (2+1) over HV: odd Y with all brackets into/out of Y zero",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("Y", Parity::Odd)],
        params: &[],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
        ],
    },
    EntryDef {
        key: "prop31-R2",
        aliases: &["Prop3.1-R2"],
        description: "rank (2+1) over HV: [L_l Y] = (del + lam) Y, [Y_l Y] = alpha H (the HVS family)",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("Y", Parity::Odd)],
        params: &[("alpha", true, None)],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
            ("L", "Y", "(del + lam) * Y"),
            ("Y", "Y", "alpha * H"),
        ],
    },
    EntryDef {
        key: "prop31-R3",
        aliases: &["Prop3.1-R3"],
        description: "rank (2+1) over HV: [L_l Y] = (del + beta*lam + gamma) Y, [H_l Y] = tau Y (the HVS2 family)",
        gens: &[("L", Parity::Even), ("H", Parity::Even), ("Y", Parity::Odd)],
        params: &[("beta", false, None), ("gamma", false, None), ("tau", false, None)],
        brackets: &[
            ("L", "L", "(del + 2*lam) * L"),
            ("L", "H", "(del + lam) * H"),
            ("L", "Y", "(del + beta*lam + gamma) * Y"),
            ("H", "Y", "tau * Y"),
        ],
    },
];

/// Metadata for one catalog entry.
#[derive(Clone, Debug)]
pub struct EntryInfo {
    pub key: &'static str,
    pub aliases: &'static [&'static str],
    pub description: &'static str,
    /// (name, nonzero flag, default rational value if any)
    pub params: Vec<(String, bool, Option<String>)>,
}

pub fn list() -> Vec<EntryInfo> {
    ENTRIES
        .iter()
        .map(|e| EntryInfo {
            key: e.key,
            aliases: e.aliases,
            description: e.description,
            params: e
                .params
                .iter()
                .map(|(n, nz, d)| ((*n).to_string(), *nz, d.map(|s| s.to_string())))
                .collect(),
        })
        .collect()
}

fn find_entry(key: &str) -> Result<&'static EntryDef> {
    ENTRIES
        .iter()
        .find(|e| e.key == key || e.aliases.contains(&key))
        .ok_or_else(|| Error::UnknownKey(key.into()))
}

pub fn build_algebra(key: &str, params: &Params) -> Result<LcsAlgebra> {
    let entry = find_entry(key)?;
    for name in params.keys() {
        if !entry.params.iter().any(|(n, _, _)| n == name) {
            return Err(Error::Schema(format!(
                "algebra `{}` has no parameter `{}`",
                entry.key, name
            )));
        }
    }
    // resolve every schema parameter to a rational value or keep it symbolic
    let mut values: Vec<(&str, bool, Option<Rational>)> = Vec::new();
    for (name, nonzero, default) in entry.params {
        let resolved = match params.get(*name) {
            Some(ParamValue::Rational(v)) => Some(v.clone()),
            Some(ParamValue::Symbolic) => None,
            None => match default {
                Some(text) => Some(rational(text).expect("catalog default")),
                None => None,
            },
        };
        if let Some(v) = &resolved {
            if *nonzero && v == &Rational::from_integer(0.into()) {
                return Err(Error::ZeroParameter((*name).to_string()));
            }
        }
        values.push((name, *nonzero, resolved));
    }

    let all_names: Vec<&str> = entry.params.iter().map(|(n, _, _)| *n).collect();
    let full_ring = Ring::new(&["lam", "mu", "nu"], &all_names);
    let gens: Vec<(String, Parity)> = entry
        .gens
        .iter()
        .map(|(n, p)| ((*n).to_string(), *p))
        .collect();
    let mut specified = BTreeMap::new();
    for (g1, g2, rhs) in entry.brackets {
        let i = gens.iter().position(|(n, _)| n == g1).unwrap();
        let j = gens.iter().position(|(n, _)| n == g2).unwrap();
        let comps = parse_bracket_rhs(rhs, &full_ring, &gens)
            .unwrap_or_else(|e| panic!("catalog entry {}: {e}", entry.key));
        specified.insert((i, j), comps);
    }
    let mut table = complete_table(&full_ring, &gens, specified)?;

    // substitute rational parameter values, then drop them from the ring
    let bindings: Vec<(&str, Polynomial)> = values
        .iter()
        .filter_map(|(n, _, v)| {
            v.as_ref()
                .map(|v| (*n, Polynomial::constant(&full_ring, v.clone())))
        })
        .collect();
    let symbolic: Vec<&str> = values
        .iter()
        .filter(|(_, _, v)| v.is_none())
        .map(|(n, _, _)| *n)
        .collect();
    let final_ring = Ring::new(&["lam", "mu", "nu"], &symbolic);
    for row in &mut table {
        for cell in row {
            for p in cell {
                let substituted = p.substitute_by_name(&bindings)?;
                *p = substituted.into_ring(&final_ring)?;
            }
        }
    }
    let kept: Vec<Param> = values
        .iter()
        .filter(|(_, _, v)| v.is_none())
        .map(|(n, nz, _)| Param {
            name: (*n).to_string(),
            nonzero: *nz,
        })
        .collect();
    LcsAlgebra::new(entry.key, &final_ring, gens, table, kept)
}

/// Fill in a full bracket table from the specified pairs: missing (j,i)
/// entries are derived from (i,j) by skew-symmetry, and pairs given from
/// both sides must agree with that derivation.
pub fn complete_table(
    ring: &Arc<Ring>,
    gens: &[(String, Parity)],
    specified: BTreeMap<(usize, usize), Vec<Polynomial>>,
) -> Result<Vec<Vec<Vec<Polynomial>>>> {
    let n = gens.len();
    let zero = Polynomial::zero(ring);
    let mut table = vec![vec![vec![zero.clone(); n]; n]; n];
    let neg = Polynomial::var(ring, "del")?
        .add(&Polynomial::var(ring, "lam")?)?
        .neg();
    let transpose = |cell: &[Polynomial], i: usize, j: usize| -> Result<Vec<Polynomial>> {
        let sign = gens[i].1.product_sign(gens[j].1);
        cell.iter()
            .map(|p| {
                Ok(p.substitute_by_name(&[("lam", neg.clone())])?
                    .scale(&sign)
                    .neg())
            })
            .collect()
    };
    for i in 0..n {
        for j in 0..n {
            let cell = match specified.get(&(i, j)) {
                Some(c) => c.clone(),
                None => match specified.get(&(j, i)) {
                    Some(c) if i != j => transpose(c, j, i)?,
                    _ => continue,
                },
            };
            if i != j {
                if let (Some(a), Some(_)) = (specified.get(&(i, j)), specified.get(&(j, i))) {
                    let derived = transpose(specified.get(&(j, i)).unwrap(), j, i)?;
                    if *a != derived {
                        return Err(Error::Schema(format!(
                            "brackets [{} _ {}] and [{} _ {}] are not skew-consistent",
                            gens[i].0, gens[j].0, gens[j].0, gens[i].0
                        )));
                    }
                }
            }
            table[i][j] = cell;
        }
    }
    Ok(table)
}

/// Parse the right-hand side of a bracket line:
/// `<poly> * <gen> (+ <poly> * <gen>)*` or `0`. The split happens at
/// top-level `+` and the last top-level `*`; parenthesize coefficient sums.
pub fn parse_bracket_rhs(
    rhs: &str,
    ring: &Arc<Ring>,
    gens: &[(String, Parity)],
) -> Result<Vec<Polynomial>> {
    let mut out = vec![Polynomial::zero(ring); gens.len()];
    let trimmed = rhs.trim();
    if trimmed == "0" {
        return Ok(out);
    }
    for chunk in split_top_level(trimmed, '+') {
        let chunk = chunk.trim();
        let (poly_text, gen_name) = match rsplit_top_level(chunk, '*') {
            Some((l, r)) => (l.trim(), r.trim()),
            None => ("1", chunk),
        };
        let idx = gens
            .iter()
            .position(|(n, _)| n == gen_name)
            .ok_or_else(|| Error::UnknownGenerator(gen_name.into()))?;
        let coeff = Polynomial::parse(poly_text, ring)?;
        out[idx] = out[idx].add(&coeff)?;
    }
    Ok(out)
}

fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn rsplit_top_level(text: &str, sep: char) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    let mut pos = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => pos = Some(i),
            _ => {}
        }
    }
    pos.map(|i| (&text[..i], &text[i + 1..]))
}

const RESERVED: &[&str] = &["del", "lam", "mu", "nu"];

pub fn to_text(alg: &LcsAlgebra) -> String {
    let mut out = format!("algebra {}\n", alg.name);
    for p in alg.params() {
        if p.nonzero {
            out.push_str(&format!("params {} nonzero\n", p.name));
        } else {
            out.push_str(&format!("params {}\n", p.name));
        }
    }
    for (i, g) in alg.gens().iter().enumerate() {
        let parity = match alg.parity(i) {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        out.push_str(&format!("gen {g} {parity}\n"));
    }
    let n = alg.num_gens();
    for i in 0..n {
        for j in 0..n {
            let mut terms = Vec::new();
            for k in 0..n {
                let b = alg.structure(i, j, k);
                if !b.is_zero() {
                    terms.push(format!("({}) * {}", b, alg.gens()[k]));
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

pub fn from_text(text: &str, origin: &str) -> Result<LcsAlgebra> {
    let fail = |line: usize, msg: String| Error::Format {
        path: origin.into(),
        line,
        msg,
    };
    let mut name: Option<String> = None;
    let mut params: Vec<Param> = Vec::new();
    let mut gens: Vec<(String, Parity)> = Vec::new();
    let mut brackets: Vec<(usize, String, String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "algebra" => {
                if name.is_some() {
                    return Err(fail(lineno, "duplicate `algebra` line".into()));
                }
                if rest.is_empty() {
                    return Err(fail(lineno, "missing algebra name".into()));
                }
                name = Some(rest.to_string());
            }
            "params" => {
                let mut words = rest.split_whitespace();
                let pname = words
                    .next()
                    .ok_or_else(|| fail(lineno, "missing parameter name".into()))?;
                if RESERVED.contains(&pname) {
                    return Err(fail(lineno, format!("`{pname}` is a reserved name")));
                }
                let nonzero = match words.next() {
                    None => false,
                    Some("nonzero") => true,
                    Some(w) => return Err(fail(lineno, format!("unexpected token `{w}`"))),
                };
                params.push(Param {
                    name: pname.to_string(),
                    nonzero,
                });
            }
            "gen" => {
                let mut words = rest.split_whitespace();
                let gname = words
                    .next()
                    .ok_or_else(|| fail(lineno, "missing generator name".into()))?;
                if RESERVED.contains(&gname) || params.iter().any(|p| p.name == gname) {
                    return Err(fail(lineno, format!("generator name `{gname}` clashes")));
                }
                let parity = match words.next() {
                    Some("even") => Parity::Even,
                    Some("odd") => Parity::Odd,
                    other => {
                        return Err(fail(
                            lineno,
                            format!("expected even|odd, got `{}`", other.unwrap_or("")),
                        ))
                    }
                };
                gens.push((gname.to_string(), parity));
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
                if words.next().is_some() {
                    return Err(fail(lineno, "too many tokens before `=`".into()));
                }
                brackets.push((lineno, g1.to_string(), g2.to_string(), rhs.to_string()));
            }
            other => return Err(fail(lineno, format!("unknown directive `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| fail(0, "missing `algebra` line".into()))?;
    if gens.is_empty() {
        return Err(fail(0, "no generators declared".into()));
    }
    let param_names: Vec<&str> = params.iter().map(|p| p.name.as_str()).collect();
    let ring = Ring::new(&["lam", "mu", "nu"], &param_names);
    let mut specified = BTreeMap::new();
    for (lineno, g1, g2, rhs) in brackets {
        let i = gens
            .iter()
            .position(|(n, _)| *n == g1)
            .ok_or_else(|| fail(lineno, format!("unknown generator `{g1}`")))?;
        let j = gens
            .iter()
            .position(|(n, _)| *n == g2)
            .ok_or_else(|| fail(lineno, format!("unknown generator `{g2}`")))?;
        let comps =
            parse_bracket_rhs(&rhs, &ring, &gens).map_err(|e| fail(lineno, e.to_string()))?;
        if specified.insert((i, j), comps).is_some() {
            return Err(fail(lineno, format!("duplicate bracket {g1} {g2}")));
        }
    }
    let table = complete_table(&ring, &gens, specified)?;
    let alg = LcsAlgebra::new(name, &ring, gens, table, params)?;
    let closure = alg.check_parity_closure();
    if !closure.passed {
        let v = &closure.violations[0];
        return Err(Error::ParityClosure {
            g1: v.context.clone(),
            g2: String::new(),
            g3: v.component.clone(),
        });
    }
    Ok(alg)
}

pub fn save(alg: &LcsAlgebra, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_text(alg)).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load(path: impl AsRef<Path>) -> Result<LcsAlgebra> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    from_text(&text, &path.display().to_string())
}
