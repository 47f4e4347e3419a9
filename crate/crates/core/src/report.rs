//! Deterministic run reports.
//!
//! A [`Report`] collects everything a `check` or `solve` invocation
//! produced: the command that ran, SHA-256 digests of every input file,
//! the per-check verdicts with residuals, and (for solver runs) the
//! dimensions, bounds and a canonical rendering of the basis.  The JSON
//! rendering is byte-identical across repeated runs on the same inputs —
//! all maps are ordered and wall-clock timing lives outside the
//! serialized body ([`Report::elapsed`]) so it never perturbs the bytes.
//! The text rendering carries the same content for human consumption.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{CheckOutcome, LcsAlgebra};
use crate::error::{Error, Result};
use crate::solver::{BiderivationSpace, DerivationSpace, SolutionBasis};

/// Version of the JSON layout; bump on incompatible changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Dimensions, bounds and basis of a solver run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSummary {
    /// What was solved for (`derivations`, `biderivations`, `keyeq`, `modules`).
    pub kind: String,
    /// Degree bounds the ansatz was enumerated under.
    pub bounds: BTreeMap<String, u32>,
    /// Dimension of the full solution space.
    pub dimension: usize,
    /// Dimension of the inner (trivial) subspace, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_dimension: Option<usize>,
    /// Dimension of the quotient by the inner subspace, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_dimension: Option<usize>,
    /// Whether enlarging the bounds by one left the outer dimension fixed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    /// Canonical basis: one map per vector, component label → polynomial.
    pub basis: Vec<BTreeMap<String, String>>,
}

impl SolveSummary {
    /// Summary of a raw nullspace computation.
    pub fn from_basis(kind: &str, bounds: &[(&str, u32)], sol: &SolutionBasis) -> SolveSummary {
        let basis = sol
            .vectors
            .iter()
            .map(|vec| {
                sol.unknowns
                    .iter()
                    .zip(vec)
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(name, p)| (name.clone(), p.to_string()))
                    .collect()
            })
            .collect();
        SolveSummary {
            kind: kind.into(),
            bounds: bounds.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            dimension: sol.dimension,
            inner_dimension: None,
            outer_dimension: None,
            stable: None,
            basis,
        }
    }

    /// Summary of a derivation-space run; outer representatives are listed.
    pub fn from_derivations(
        alg: &LcsAlgebra,
        bounds: &[(&str, u32)],
        space: &DerivationSpace,
    ) -> SolveSummary {
        let gens = alg.gens();
        let basis = space
            .outer_reps
            .iter()
            .map(|end| {
                let mut entries = BTreeMap::new();
                for (j, row) in end.matrix().iter().enumerate() {
                    for (n, p) in row.iter().enumerate() {
                        if !p.is_zero() {
                            entries.insert(format!("{} -> {}", gens[j], gens[n]), p.to_string());
                        }
                    }
                }
                entries
            })
            .collect();
        SolveSummary {
            kind: "derivations".into(),
            bounds: bounds.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            dimension: space.dim,
            inner_dimension: Some(space.inner_dim),
            outer_dimension: Some(space.outer_dim),
            stable: Some(space.stable),
            basis,
        }
    }

    /// Summary of a biderivation-space run; the full basis is listed.
    pub fn from_biderivations(
        alg: &LcsAlgebra,
        bounds: &[(&str, u32)],
        space: &BiderivationSpace,
    ) -> SolveSummary {
        let gens = alg.gens();
        let basis = space
            .basis
            .iter()
            .map(|phi| {
                let mut entries = BTreeMap::new();
                for i in 0..gens.len() {
                    for j in 0..gens.len() {
                        for k in 0..gens.len() {
                            let p = phi.entry(i, j, k);
                            if !p.is_zero() {
                                entries.insert(
                                    format!("({}, {}) -> {}", gens[i], gens[j], gens[k]),
                                    p.to_string(),
                                );
                            }
                        }
                    }
                }
                entries
            })
            .collect();
        SolveSummary {
            kind: "biderivations".into(),
            bounds: bounds.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            dimension: space.dim,
            inner_dimension: Some(space.inner_dim),
            outer_dimension: Some(space.outer_dim),
            stable: Some(space.stable),
            basis,
        }
    }
}

/// Complete, deterministic record of one kernel invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    /// JSON layout version; always [`SCHEMA_VERSION`] for reports we write.
    pub schema: u32,
    /// The invocation being reported, echoed verbatim.
    pub command: String,
    /// SHA-256 digests of input files, keyed by role.
    pub inputs: BTreeMap<String, String>,
    /// Parameter values in effect, rendered as exact rationals or names.
    pub params: BTreeMap<String, String>,
    /// Per-check verdicts with residual polynomials.
    pub checks: Vec<CheckOutcome>,
    /// Solver output, when the invocation enumerated a solution space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    /// True iff every check passed.
    pub passed: bool,
    /// Wall-clock time; side channel only, never serialized.
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            solve: None,
            passed: true,
            elapsed: None,
        }
    }

    /// Record the digest of an input file's bytes under a role label.
    pub fn add_input(&mut self, label: &str, bytes: &[u8]) {
        self.inputs.insert(label.into(), digest(bytes));
    }

    pub fn add_param(&mut self, name: &str, value: impl Into<String>) {
        self.params.insert(name.into(), value.into());
    }

    pub fn push_check(&mut self, outcome: CheckOutcome) {
        self.passed = self.passed && outcome.passed;
        self.checks.push(outcome);
    }

    pub fn push_checks(&mut self, outcomes: Vec<CheckOutcome>) {
        for outcome in outcomes {
            self.push_check(outcome);
        }
    }

    pub fn set_solve(&mut self, summary: SolveSummary) {
        self.solve = Some(summary);
    }

    /// Canonical JSON rendering; byte-identical for identical inputs.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let report: Report =
            serde_json::from_str(text).map_err(|e| Error::Schema(format!("report: {e}")))?;
        if report.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report schema {} (expected {})",
                report.schema, SCHEMA_VERSION
            )));
        }
        Ok(report)
    }

    /// Human-readable rendering with the same content as the JSON body.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (label, hash) in &self.inputs {
            let _ = writeln!(out, "input {label}: sha256:{hash}");
        }
        for (name, value) in &self.params {
            let _ = writeln!(out, "param {name} = {value}");
        }
        for check in &self.checks {
            let verdict = if check.passed { "pass" } else { "FAIL" };
            let _ = writeln!(out, "check {}: {}", check.check, verdict);
            for v in &check.violations {
                let _ = writeln!(out, "  {} [{}]: {}", v.context, v.component, v.residual);
            }
        }
        if let Some(solve) = &self.solve {
            let _ = writeln!(out, "solve {}", solve.kind);
            for (name, bound) in &solve.bounds {
                let _ = writeln!(out, "  bound {name} = {bound}");
            }
            let _ = writeln!(out, "  dimension = {}", solve.dimension);
            if let Some(d) = solve.inner_dimension {
                let _ = writeln!(out, "  inner dimension = {d}");
            }
            if let Some(d) = solve.outer_dimension {
                let _ = writeln!(out, "  outer dimension = {d}");
            }
            if let Some(s) = solve.stable {
                let _ = writeln!(out, "  stable = {s}");
            }
            for (i, vector) in solve.basis.iter().enumerate() {
                let _ = writeln!(out, "  basis[{i}]:");
                for (component, poly) in vector {
                    let _ = writeln!(out, "    {component}: {poly}");
                }
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}

/// Lowercase-hex SHA-256 of a byte string.
pub fn digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}
