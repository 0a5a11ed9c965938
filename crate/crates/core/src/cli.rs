//! Input files, per-command reports and corpus verification behind the
//! `freediv` binary.
//!
//! An input file holds `key=value` header lines followed by the polynomial:
//!
//! ```text
//! # the cusp
//! vars=x,y
//! weights=2,3
//! free=true
//! y^2 - x^3
//! ```
//!
//! Recognized keys are `name`, `vars`, `weights`, and the annotations
//! `free`, `irreducible`, `nc` and `degrees` checked by `corpus verify`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::descent::{
    certify_normal_crossing, descend_to_solvable, smooth_component, DescentState,
    Verdict as NcVerdict,
};
use crate::error::{Error, Result};
use crate::factor::factor_irreducible;
use crate::lie::{
    common_eigenvector, derived_series, find_sl2_triple_in_rep, generate_lie_algebra,
    levi_subalgebra, restrict_to_mprime, solvable_radical, split_annihilator, upoly_string,
    CommonEigenvector, Sl2Search,
};
use crate::linalg::{Matrix, QuadElem};
use crate::logder::{degree_audit, freeness_test, minors_vs_jacobian, Freeness, SaitoMatrix};
use crate::poly::{parse_poly, Poly, Rat};
use crate::weights::{find_weight_system, WeightSystem};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct DivisorInput {
    pub name: String,
    pub vars: Vec<String>,
    pub poly: Poly,
    pub source: String,
    pub weights: Option<Vec<Rat>>,
    pub annotations: BTreeMap<String, String>,
}

const ANNOTATIONS: [&str; 4] = ["free", "irreducible", "nc", "degrees"];

fn header_error(line: usize, message: String) -> Error {
    Error::Parse {
        line,
        column: 1,
        message,
    }
}

fn parse_rat(s: &str) -> Option<Rat> {
    s.trim().parse::<Rat>().ok()
}

impl DivisorInput {
    /// Header lines come first; `#` starts a comment line.
    pub fn parse(text: &str, default_name: &str) -> Result<Self> {
        let mut name = default_name.to_string();
        let mut vars: Option<Vec<String>> = None;
        let mut weights = None;
        let mut annotations = BTreeMap::new();
        // blank out header lines so parse positions match the file
        let mut body = Vec::new();
        let mut in_header = true;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let t = line.trim();
            if t.starts_with('#') {
                body.push("");
                continue;
            }
            if in_header {
                if let Some((k, v)) = t.split_once('=') {
                    let (k, v) = (k.trim(), v.trim());
                    match k {
                        "name" => name = v.to_string(),
                        "vars" => {
                            let vs: Vec<String> =
                                v.split(',').map(|s| s.trim().to_string()).collect();
                            if vs.iter().any(|s| s.is_empty()) {
                                return Err(header_error(lineno, "empty variable name".into()));
                            }
                            vars = Some(vs);
                        }
                        "weights" => {
                            let ws: Option<Vec<Rat>> = v.split(',').map(parse_rat).collect();
                            let ws = ws.ok_or_else(|| {
                                header_error(lineno, format!("bad weight list `{v}`"))
                            })?;
                            weights = Some(ws);
                        }
                        k if ANNOTATIONS.contains(&k) => {
                            annotations.insert(k.to_string(), v.to_string());
                        }
                        _ => return Err(header_error(lineno, format!("unknown header key `{k}`"))),
                    }
                    body.push("");
                    continue;
                }
                if !t.is_empty() {
                    in_header = false;
                }
            }
            body.push(line);
        }
        let source: String = body.join("\n");
        let vars = match vars {
            Some(v) => v,
            None => infer_vars(&source),
        };
        let poly = parse_poly(&source, &vars)?;
        if let Some(w) = &weights {
            if w.len() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: w.len(),
                });
            }
        }
        Ok(DivisorInput {
            name,
            vars,
            poly,
            source: source.trim().to_string(),
            weights,
            annotations,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
        Self::parse(&text, stem)
    }

    /// The given weights, or detected ones.
    pub fn weight_system(&self) -> Result<WeightSystem> {
        match &self.weights {
            Some(w) => WeightSystem::for_poly(w.clone(), &self.poly),
            None => find_weight_system(&self.poly).ok_or_else(|| {
                Error::Precondition("no positive weights make the polynomial homogeneous".into())
            }),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "variables": self.vars,
            "polynomial": self.poly.to_string_with(&self.vars),
        })
    }
}

/// Identifiers in order of first appearance, for files without `vars=`.
fn infer_vars(src: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut cur = String::new();
    for ch in src.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphabetic() || ch == '_' || (!cur.is_empty() && ch.is_ascii_digit()) {
            cur.push(ch);
        } else {
            if !cur.is_empty() && !out.contains(&cur) {
                out.push(cur.clone());
            }
            cur.clear();
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Weights,
    Free,
    Audit,
    Minors,
    Lie,
    Descend,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Free => "free",
            Command::Audit => "audit",
            Command::Minors => "minors",
            Command::Lie => "lie",
            Command::Descend => "descend",
            Command::Certify => "certify",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub trace: bool,
    pub seed: u64,
    pub max_dim: Option<usize>,
    pub allow_extension: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Positive,
    Negative,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Positive => "positive",
            Status::Negative => "negative",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Positive => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }
}

/// A finished run: the JSON body and a one-line summary.
#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub summary: String,
    pub body: Value,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut v = self.body.clone();
        v["tool"] = json!("freediv");
        v["version"] = json!(VERSION);
        v["verdict"] = json!(self.status.as_str());
        v["timing_ms"] = json!(self.elapsed_ms);
        v
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

fn rats(rs: &[Rat]) -> Vec<String> {
    rs.iter().map(|r| r.to_string()).collect()
}

fn quad_string(x: &QuadElem, d: &Rat) -> String {
    if x.b == Rat::from_integer(0.into()) {
        return x.a.to_string();
    }
    format!("{} + {}*sqrt({})", x.a, x.b, d)
}

fn matrix_json(m: &Matrix<Rat>) -> Value {
    json!(m.iter().map(|r| rats(r)).collect::<Vec<_>>())
}

fn free_basis(
    input: &DivisorInput,
    w: &WeightSystem,
) -> Result<std::result::Result<SaitoMatrix, usize>> {
    Ok(
        match freeness_test(&input.poly, w).map_err(|e| e.at_stage("freeness"))? {
            Freeness::Free(s) => Ok(s),
            Freeness::NotFree { generators } => Err(generators.len()),
        },
    )
}

fn not_free(input: &DivisorInput, count: usize) -> (Status, String, Value) {
    (
        Status::Negative,
        format!("{}: not free ({count} minimal generators)", input.name),
        json!({"free": false, "minimal_generators": count}),
    )
}

fn run_inner(
    cmd: Command,
    input: &DivisorInput,
    opts: &Options,
) -> Result<(Status, String, Value)> {
    let w = input.weight_system().map_err(|e| e.at_stage("weights"))?;
    let vars = &input.vars;
    let name = &input.name;
    match cmd {
        Command::Weights => Ok((
            Status::Positive,
            format!(
                "{name}: weights {:?}, degree {}",
                rats(w.weights()),
                w.degree()
            ),
            json!({"weights": w, "detected": input.weights.is_none()}),
        )),
        Command::Free => Ok(match free_basis(input, &w)? {
            Ok(s) => (
                Status::Positive,
                format!("{name}: free, degrees {:?}", rats(&s.degrees)),
                json!({"free": true, "saito": s.to_json(vars)}),
            ),
            Err(k) => not_free(input, k),
        }),
        Command::Audit => {
            let s = match free_basis(input, &w)? {
                Ok(s) => s,
                Err(k) => return Ok(not_free(input, k)),
            };
            let a = degree_audit(&s, &input.poly, &w).map_err(|e| e.at_stage("degree_audit"))?;
            let minors: Vec<Value> = a
                .minors
                .iter()
                .map(|m| {
                    json!({"row": m.row + 1, "col": m.col + 1, "expected": m.expected.to_string(),
                           "actual": m.actual.as_ref().map(|x| x.to_string()), "homogeneous": m.homogeneous})
                })
                .collect();
            let status = if a.nonpositive {
                Status::Positive
            } else {
                Status::Negative
            };
            Ok((
                status,
                format!(
                    "{name}: degrees {:?}, all nonpositive: {}, degree formula: {}",
                    rats(&a.degrees),
                    a.nonpositive,
                    a.formula_holds
                ),
                json!({"degrees": rats(&a.degrees), "nonpositive": a.nonpositive, "formula_holds": a.formula_holds,
                       "nonvanishing": a.nonvanishing, "minors": minors, "weights": w}),
            ))
        }
        Command::Minors => {
            let s = match free_basis(input, &w)? {
                Ok(s) => s,
                Err(k) => return Ok(not_free(input, k)),
            };
            let m = minors_vs_jacobian(&s, &input.poly).map_err(|e| e.at_stage("minors"))?;
            let strs = |ps: &[Poly]| {
                ps.iter()
                    .map(|p| p.to_string_with(vars))
                    .collect::<Vec<_>>()
            };
            Ok((
                if m.equal {
                    Status::Positive
                } else {
                    Status::Negative
                },
                format!("{name}: minors ideal equals Jacobian ideal: {}", m.equal),
                json!({"equal": m.equal, "minors_basis": strs(&m.minors_basis), "jacobian_basis": strs(&m.jacobian_basis)}),
            ))
        }
        Command::Lie => lie_report(input, &w, opts),
        Command::Descend => {
            let s = match free_basis(input, &w)? {
                Ok(s) => s,
                Err(k) => return Ok(not_free(input, k)),
            };
            let start =
                DescentState::from_saito(&input.poly, &s).map_err(|e| e.at_stage("descent"))?;
            let initial = start.mprime_dim();
            let done = descend_to_solvable(start).map_err(|e| e.at_stage("descent"))?;
            let cert = smooth_component(&done).map_err(|e| e.at_stage("smooth_component"))?;
            let mut body = json!({
                "iterations": done.iterations(),
                "lowest_weight_dim": {"initial": initial, "final": done.mprime_dim()},
                "final_weights": done.weights,
                "smooth_component": cert.to_json(),
            });
            if opts.trace {
                body["trace"] = json!(done
                    .history
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.to_json(i))
                    .collect::<Vec<_>>());
            }
            Ok((
                Status::Positive,
                format!(
                    "{name}: solvable after {} iteration(s), smooth component {}",
                    done.iterations(),
                    cert.form_original.to_string_with(vars)
                ),
                body,
            ))
        }
        Command::Certify => {
            let c = certify_normal_crossing(&input.poly, Some(&w))?;
            let mut body = match &c.verdict {
                NcVerdict::Certified(cert) => {
                    json!({"result": "certified", "certificate": cert.to_json(vars)})
                }
                NcVerdict::Refuted { stage, reason } => {
                    json!({"result": "refuted", "stage": stage, "reason": reason})
                }
                NcVerdict::Inconclusive { stage, reason } => {
                    json!({"result": "inconclusive", "stage": stage, "reason": reason})
                }
            };
            body["weights"] = json!(c.weights);
            if opts.trace {
                body["trace"] = json!(c.trace);
            }
            let (status, summary) = match &c.verdict {
                NcVerdict::Certified(cert) => (
                    Status::Positive,
                    format!(
                        "{name}: normal crossing, {} component(s)",
                        cert.components.len()
                    ),
                ),
                NcVerdict::Refuted { stage, reason } => (
                    Status::Negative,
                    format!("{name}: not normal crossing ({stage}: {reason})"),
                ),
                NcVerdict::Inconclusive { stage, reason } => (
                    Status::Negative,
                    format!("{name}: inconclusive ({stage}: {reason})"),
                ),
            };
            Ok((status, summary, body))
        }
    }
}

fn lie_report(
    input: &DivisorInput,
    w: &WeightSystem,
    opts: &Options,
) -> Result<(Status, String, Value)> {
    let s = match free_basis(input, w)? {
        Ok(s) => s,
        Err(k) => return Ok(not_free(input, k)),
    };
    let weights = w.weights();
    let d = generate_lie_algebra(&s.basis, weights, opts.max_dim).map_err(|e| e.at_stage("lie"))?;
    let ann = split_annihilator(&d, weights, &input.poly).map_err(|e| e.at_stage("lie"))?;
    let a0 = ann.degree_zero().map_err(|e| e.at_stage("lie"))?;
    let mprime = w.lowest_weight_vars();
    let rep = restrict_to_mprime(&a0, &mprime).map_err(|e| e.at_stage("lie"))?;
    let (image, _) = rep.image()?;
    let solvable = rep.is_solvable()?;
    let series: Vec<usize> = derived_series(&image).iter().map(|t| t.len()).collect();
    let radical = solvable_radical(&image).len();
    let levi = levi_subalgebra(&image)
        .map_err(|e| e.at_stage("lie"))?
        .len();
    let mut body = json!({
        "derivations": d.to_json(),
        "annihilator_dimension": ann.algebra.dim(),
        "degree_zero_dimension": a0.dim(),
        "lowest_weight_variables": mprime.iter().map(|&i| input.vars[i].clone()).collect::<Vec<_>>(),
        "restricted": {
            "dimension": image.dim(),
            "matrices": rep.matrices().iter().map(matrix_json).collect::<Vec<_>>(),
            "derived_series": series,
            "radical_dimension": radical,
            "levi_dimension": levi,
            "solvable": solvable,
        },
    });
    if solvable {
        body["common_eigenvector"] = match common_eigenvector(&rep, opts.allow_extension)? {
            CommonEigenvector::Rational {
                vector,
                eigenvalues,
            } => {
                json!({"vector": rats(&vector), "eigenvalues": rats(&eigenvalues)})
            }
            CommonEigenvector::Quadratic {
                minimal_polynomial,
                field,
                vector,
                eigenvalues,
            } => json!({
                "field": upoly_string(&minimal_polynomial),
                "vector": vector.iter().map(|x| quad_string(x, &field.d)).collect::<Vec<_>>(),
                "eigenvalues": eigenvalues.iter().map(|x| quad_string(x, &field.d)).collect::<Vec<_>>(),
            }),
        };
    } else {
        body["sl2_triple"] = match find_sl2_triple_in_rep(&rep, opts.allow_extension)? {
            Some(Sl2Search::Rational(t)) => {
                json!({"h": matrix_json(&t.h), "e": matrix_json(&t.e), "f": matrix_json(&t.f)})
            }
            Some(Sl2Search::Quadratic {
                minimal_polynomial,
                field,
                triple,
            }) => {
                let m = |a: &Matrix<QuadElem>| {
                    a.iter()
                        .map(|r| {
                            r.iter()
                                .map(|x| quad_string(x, &field.d))
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                };
                json!({"field": upoly_string(&minimal_polynomial), "h": m(&triple.h), "e": m(&triple.e), "f": m(&triple.f)})
            }
            None => Value::Null,
        };
    }
    Ok((
        Status::Positive,
        format!(
            "{}: annihilator dim {}, restricted dim {}, solvable: {solvable}",
            input.name,
            ann.algebra.dim(),
            image.dim()
        ),
        body,
    ))
}

/// Runs one command; errors become reports with status `Error`.
pub fn run(cmd: Command, input: &DivisorInput, opts: &Options) -> Report {
    let t0 = Instant::now();
    let (status, summary, mut body) = match run_inner(cmd, input, opts) {
        Ok(r) => r,
        Err(e) => (
            Status::Error,
            format!("{}: error: {e}", input.name),
            json!({"error": e.to_string()}),
        ),
    };
    body["command"] = json!(cmd.name());
    body["input"] = input.to_json();
    Report {
        status,
        summary,
        body,
        elapsed_ms: t0.elapsed().as_millis(),
    }
}

/// Report for input that could not be read or parsed.
pub fn error_report(cmd: &str, path: &Path, e: &Error) -> Report {
    Report {
        status: Status::Error,
        summary: format!("{}: error: {e}", path.display()),
        body: json!({"command": cmd, "file": path.display().to_string(), "error": e.to_string()}),
        elapsed_ms: 0,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" => Some(true),
        "false" | "no" => Some(false),
        _ => None,
    }
}

fn check(expected: &str, computed: Value, matches: bool) -> Value {
    json!({"expected": expected, "computed": computed, "confirmed": matches})
}

/// Compares the annotations of one entry with computed values.
fn verify_entry(input: &DivisorInput) -> Result<BTreeMap<String, Value>> {
    let w = input.weight_system()?;
    let mut out = BTreeMap::new();
    let needs_basis =
        input.annotations.contains_key("free") || input.annotations.contains_key("degrees");
    let basis = if needs_basis {
        Some(free_basis(input, &w)?)
    } else {
        None
    };
    for (key, expected) in &input.annotations {
        let v = match key.as_str() {
            "free" => {
                let want = parse_bool(expected)
                    .ok_or_else(|| Error::Precondition(format!("bad boolean `{expected}`")))?;
                let got = matches!(basis, Some(Ok(_)));
                check(expected, json!(got), got == want)
            }
            "degrees" => {
                let want: Option<Vec<Rat>> = expected.split(',').map(parse_rat).collect();
                let want = want
                    .ok_or_else(|| Error::Precondition(format!("bad degree list `{expected}`")))?;
                match &basis {
                    Some(Ok(s)) => {
                        let mut got = s.degrees.clone();
                        let mut want = want;
                        got.sort();
                        want.sort();
                        check(expected, json!(rats(&got)), got == want)
                    }
                    _ => check(expected, Value::Null, false),
                }
            }
            "irreducible" => {
                let want = parse_bool(expected)
                    .ok_or_else(|| Error::Precondition(format!("bad boolean `{expected}`")))?;
                let (_, factors) = factor_irreducible(&input.poly);
                let got = factors.len() == 1 && factors[0].1 == 1;
                check(expected, json!(got), got == want)
            }
            "nc" => {
                let want = parse_bool(expected)
                    .ok_or_else(|| Error::Precondition(format!("bad boolean `{expected}`")))?;
                let c = certify_normal_crossing(&input.poly, Some(&w))?;
                match c.verdict {
                    NcVerdict::Certified(_) => check(expected, json!(true), want),
                    NcVerdict::Refuted { .. } => check(expected, json!(false), !want),
                    NcVerdict::Inconclusive { .. } => check(expected, json!("inconclusive"), false),
                }
            }
            _ => unreachable!("annotation keys are filtered when parsing"),
        };
        out.insert(key.clone(), v);
    }
    Ok(out)
}

fn entry_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for e in std::fs::read_dir(dir)? {
        let p = e?.path();
        if p.is_file() && p.extension().is_some_and(|x| x == "div") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Verifies every `*.div` file of `dir` concurrently. The seed only shuffles
/// the processing order; entries are reported sorted by file name.
pub fn corpus_verify(dir: &Path, opts: &Options) -> Report {
    let t0 = Instant::now();
    let files = match entry_files(dir) {
        Ok(f) => f,
        Err(e) => return error_report("corpus verify", dir, &e),
    };
    let mut order = files.clone();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
    let mut results: Vec<(String, Value, bool)> = order
        .par_iter()
        .map(|p| {
            let file = p.file_name().unwrap().to_string_lossy().to_string();
            match DivisorInput::read(p) {
                Err(e) => (file.clone(), json!({"file": file, "status": "unreadable", "error": e.to_string()}), false),
                Ok(input) => match verify_entry(&input) {
                    Err(e) => (
                        file.clone(),
                        json!({"file": file, "name": input.name, "status": "error", "error": e.to_string()}),
                        false,
                    ),
                    Ok(checks) => {
                        let ok = checks.values().all(|c| c["confirmed"] == json!(true));
                        (
                            file.clone(),
                            json!({"file": file, "name": input.name, "status": if ok { "confirmed" } else { "mismatch" },
                                   "checks": checks}),
                            ok,
                        )
                    }
                },
            }
        })
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.2)
        .map(|r| r.0.clone())
        .collect();
    let mut warnings = Vec::new();
    if results.is_empty() {
        warnings.push(format!("no .div entries in {}", dir.display()));
    }
    let summary = if failed.is_empty() {
        format!("corpus: {} entries confirmed", results.len())
    } else {
        format!(
            "corpus: {} of {} entries failed: {}",
            failed.len(),
            results.len(),
            failed.join(", ")
        )
    };
    Report {
        status: if failed.is_empty() {
            Status::Positive
        } else {
            Status::Negative
        },
        summary,
        body: json!({
            "command": "corpus verify",
            "entries": results.into_iter().map(|r| r.1).collect::<Vec<_>>(),
            "failed": failed,
            "warnings": warnings,
        }),
        elapsed_ms: t0.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUSP: &str = "# cusp\nvars=x,y\nfree=true\ndegrees=0,1\n\ny^2 - x^3\n";

    #[test]
    fn header_and_body() {
        let d = DivisorInput::parse(CUSP, "cusp").unwrap();
        assert_eq!(d.vars, vec!["x", "y"]);
        assert_eq!(d.annotations["degrees"], "0,1");
        assert_eq!(d.source, "y^2 - x^3");
        assert!(d.weights.is_none());
    }

    #[test]
    fn parse_error_keeps_file_position() {
        let e = DivisorInput::parse("vars=x,y\ny^2 - x^^3\n", "bad").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let e = DivisorInput::parse("vars=x\ncolour=red\nx\n", "bad").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn variables_inferred_in_order() {
        let d = DivisorInput::parse("y*x + z1^2", "t").unwrap();
        assert_eq!(d.vars, vec!["y", "x", "z1"]);
    }

    #[test]
    fn cusp_commands() {
        let d = DivisorInput::parse(CUSP, "cusp").unwrap();
        let opts = Options::default();
        let free = run(Command::Free, &d, &opts);
        assert_eq!(free.exit_code(), 0);
        assert_eq!(free.body["saito"]["degrees"], json!(["0", "1"]));
        let cert = run(Command::Certify, &d, &opts);
        assert_eq!(cert.exit_code(), 1);
        assert_eq!(cert.body["stage"], json!("degree_audit"));
        assert_eq!(run(Command::Minors, &d, &opts).exit_code(), 1);
    }

    #[test]
    fn errors_exit_two() {
        let d = DivisorInput::parse("vars=x,y\nx^2*y", "nonreduced").unwrap();
        let r = run(Command::Certify, &d, &Options::default());
        assert_eq!(r.exit_code(), 2);
        assert!(r.to_json()["error"].as_str().unwrap().contains("reduced"));
    }

    #[test]
    fn verify_single_entry() {
        let d = DivisorInput::parse(
            "vars=x,y\nfree=true\nnc=true\nirreducible=false\nx*(x+y)",
            "t",
        )
        .unwrap();
        let checks = verify_entry(&d).unwrap();
        assert!(checks.values().all(|c| c["confirmed"] == json!(true)));
        let d = DivisorInput::parse("vars=x,y\nnc=true\ny^2-x^3", "t").unwrap();
        assert_eq!(verify_entry(&d).unwrap()["nc"]["confirmed"], json!(false));
    }
}
