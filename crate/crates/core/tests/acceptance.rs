//! Acceptance gate. Each check prints one PASS or FAIL line; any failure
//! makes the target exit nonzero.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freediv::cli::DivisorInput;
use freediv::descent::{
    certify_normal_crossing, chi_step, descend_to_solvable, select_epsilon, DescentState, Verdict,
};
use freediv::factor::is_irreducible;
use freediv::lie::{
    common_eigenvector, find_sl2_triple, is_solvable, solvable_radical, CommonEigenvector,
    LieAlgebra, LinearRep, Sl2Search,
};
use freediv::linalg::{self, Field, Matrix, QuadraticField, Q};
use freediv::logder::{
    degree_audit, freeness_test, has_no_unit_coefficient, minors_vs_jacobian, saito_criterion,
    suspension_split, Derivation, Freeness, SaitoMatrix, Suspension,
};
use freediv::poly::{parse_poly, rat, CoordinateMap, Monomial, Poly, Rat};
use freediv::weights::{find_weight_system, WeightSystem};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn p(src: &str, vars: &[&str]) -> Poly {
    parse_poly(src, vars).unwrap()
}

fn rats(rs: &[Rat]) -> String {
    let v: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
    format!("({})", v.join(","))
}

fn free(f: &Poly, w: &WeightSystem) -> Result<SaitoMatrix, String> {
    match freeness_test(f, w).map_err(|e| e.to_string())? {
        Freeness::Free(s) => Ok(s),
        Freeness::NotFree { generators } => {
            Err(format!("not free: {} generators", generators.len()))
        }
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<DivisorInput> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "div"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| DivisorInput::read(f).unwrap())
        .collect()
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        return Err(format!("{what} took {e:?}, limit {limit:?}"));
    }
    Ok(())
}

// ---------------------------------------------------------------- cusp

fn cusp_reproduction() -> Outcome {
    let t = Instant::now();
    let v = ["x", "y"];
    let f = p("y^2 - x^3", &v);
    let w = find_weight_system(&f).ok_or("no weights found")?;
    let ratio = &w.weights()[1] / &w.weights()[0];
    ensure!(
        ratio == Rat::new(3.into(), 2.into()),
        "weights {} not proportional to (2,3)",
        rats(w.weights())
    );
    let s = free(&f, &w)?;
    ensure!(
        s.degrees == vec![rat(0), rat(1)],
        "degrees {}",
        rats(&s.degrees)
    );
    let unit = &s.unit;
    ensure!(
        !unit.is_zero() && s.determinant == f.scale(unit),
        "det Lambda is not a unit times f"
    );
    // the reference basis is logarithmic with determinant a unit times f,
    // hence a basis of the same module
    let reference = [
        Derivation::new(vec![p("2x", &v), p("3y", &v)]),
        Derivation::new(vec![p("2y", &v), p("3x^2", &v)]),
    ];
    let ref_unit = saito_criterion(&reference, &f).map_err(|e| e.to_string())?;
    ensure!(
        ref_unit.is_some(),
        "reference basis fails Saito's criterion"
    );
    // each computed generator lies in the module of the reference basis
    for (i, d) in s.basis.iter().enumerate() {
        ensure!(
            in_module(d, &reference),
            "generator {i} not in the reference module"
        );
    }
    within(t, Duration::from_secs(1), "cusp")?;
    Ok(format!(
        "weights {}, degrees {}, det = {}*f, {:?}",
        rats(w.weights()),
        rats(&s.degrees),
        unit,
        t.elapsed()
    ))
}

/// `d = a*r0 + b*r1` with polynomial `a, b`, found by Cramer's rule.
fn in_module(d: &Derivation, r: &[Derivation; 2]) -> bool {
    let det = &(r[0].coeff(0) * r[1].coeff(1)) - &(r[1].coeff(0) * r[0].coeff(1));
    let na = &(d.coeff(0) * r[1].coeff(1)) - &(r[1].coeff(0) * d.coeff(1));
    let nb = &(r[0].coeff(0) * d.coeff(1)) - &(d.coeff(0) * r[0].coeff(1));
    matches!(na.exact_div(&det), Ok(Some(_))) && matches!(nb.exact_div(&det), Ok(Some(_)))
}

// ---------------------------------------------------------------- minors

fn minors_test() -> Outcome {
    let t = Instant::now();
    let v = ["x", "y", "z", "w"];
    let mut notes = Vec::new();
    for k in 2..=4 {
        let f = p(&v[..k].join("*"), &v[..k]);
        let w = find_weight_system(&f).unwrap();
        let s = free(&f, &w)?;
        let m = minors_vs_jacobian(&s, &f).map_err(|e| e.to_string())?;
        ensure!(
            m.equal,
            "normal crossing with {k} factors: minors differ from Jacobian ideal"
        );
        notes.push(format!("k={k} equal"));
    }
    let f = p("y^2 - x^3", &v[..2]);
    let w = find_weight_system(&f).unwrap();
    let s = free(&f, &w)?;
    let m = minors_vs_jacobian(&s, &f).map_err(|e| e.to_string())?;
    ensure!(!m.equal, "cusp: minors ideal equals Jacobian ideal");
    let (x, y) = (p("x", &v[..2]), p("y", &v[..2]));
    ensure!(
        m.minors_basis == vec![x.clone(), y.clone()]
            || m.minors_basis == vec![y.clone(), x.clone()],
        "cusp minors basis {:?}",
        m.minors_basis
            .iter()
            .map(|q| q.to_string_with(&v[..2]))
            .collect::<Vec<_>>()
    );
    let x2 = p("x^2", &v[..2]);
    ensure!(
        m.jacobian_basis.len() == 2
            && m.jacobian_basis.contains(&x2)
            && m.jacobian_basis.contains(&y),
        "cusp Jacobian basis {:?}",
        m.jacobian_basis
            .iter()
            .map(|q| q.to_string_with(&v[..2]))
            .collect::<Vec<_>>()
    );
    notes.push("cusp (x,y) vs (x^2,y)".into());
    within(t, Duration::from_secs(5), "minors")?;
    Ok(format!("{}, {:?}", notes.join("; "), t.elapsed()))
}

// ---------------------------------------------------------------- degree formula

/// Random invertible change with integer linear part on each weight level.
fn random_weighted_change(rng: &mut ChaCha8Rng, w: &[Rat]) -> CoordinateMap {
    let n = w.len();
    loop {
        let mut images = Vec::new();
        for i in 0..n {
            let mut q = Poly::zero(n);
            for j in 0..n {
                if w[j] == w[i] {
                    let c: i64 = rng.gen_range(-2..=2);
                    if c != 0 {
                        q.add_term(Monomial::var(j, n), rat(c));
                    }
                }
            }
            // a quadratic correction when two lower weights sum to w_i
            for a in 0..n {
                for b in a..n {
                    if &w[a] + &w[b] == w[i] && rng.gen_bool(0.5) {
                        let mut e = vec![0u32; n];
                        e[a] += 1;
                        e[b] += 1;
                        q.add_term(Monomial::new(e), rat(rng.gen_range(-2..=2)));
                    }
                }
            }
            images.push(q);
        }
        if let Ok(c) = CoordinateMap::new(images, w) {
            return c;
        }
    }
}

fn degree_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut minors, mut nonvanishing) = (0, 0, 0);
    for entry in corpus() {
        if entry.annotations.get("free").map(String::as_str) != Some("true") {
            continue;
        }
        let w0 = entry.weight_system().map_err(|e| e.to_string())?;
        // the entry itself and two scrambled presentations
        let mut variants = vec![entry.poly.clone()];
        for _ in 0..2 {
            variants.push(
                random_weighted_change(&mut rng, w0.weights())
                    .apply(&entry.poly)
                    .unwrap(),
            );
        }
        for f in variants {
            let w = WeightSystem::for_poly(w0.weights().to_vec(), &f).map_err(|e| e.to_string())?;
            let s = free(&f, &w).map_err(|e| format!("{}: {e}", entry.name))?;
            let a = degree_audit(&s, &f, &w).map_err(|e| e.to_string())?;
            for m in &a.minors {
                if let Some(actual) = &m.actual {
                    ensure!(
                        m.homogeneous && *actual == m.expected,
                        "{}: minor ({},{}) has degree {actual}, expected {}",
                        entry.name,
                        m.row + 1,
                        m.col + 1,
                        m.expected
                    );
                    minors += 1;
                }
            }
            ensure!(
                a.formula_holds,
                "{}: degree formula reported false",
                entry.name
            );
            if is_irreducible(&f) && has_no_unit_coefficient(&s) {
                ensure!(
                    a.nonvanishing == Some(true),
                    "{}: a minor vanishes",
                    entry.name
                );
                ensure!(
                    s.minors().iter().flatten().all(|m| !m.is_zero()),
                    "{}: zero minor",
                    entry.name
                );
                nonvanishing += 1;
            }
            checked += 1;
        }
    }
    ensure!(checked > 0, "no free corpus entries");
    Ok(format!("{checked} presentations, {minors} nonzero minors on the formula, {nonvanishing} with all minors nonzero"))
}

// ---------------------------------------------------------------- certification

fn certify_scrambled() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases: Vec<(String, Poly, Vec<Rat>)> = Vec::new();
    let v = ["x", "y", "z", "w"];
    cases.push((
        "x*(x+y)".into(),
        p("x*(x + y)", &v[..2]),
        vec![rat(1), rat(1)],
    ));
    cases.push((
        "x*(y+x^2)".into(),
        p("x*(y + x^2)", &v[..2]),
        vec![rat(1), rat(2)],
    ));
    let bases: [(&str, usize, Vec<Rat>); 4] = [
        ("x*y", 2, vec![rat(1), rat(1)]),
        ("x*y*z", 3, vec![rat(1), rat(1), rat(1)]),
        ("x*y*z", 3, vec![rat(1), rat(1), rat(2)]),
        ("x*y*z*w", 4, vec![rat(1), rat(1), rat(1), rat(1)]),
    ];
    for (src, n, w) in &bases {
        for _ in 0..2 {
            let f = random_weighted_change(&mut rng, w)
                .apply(&p(src, &v[..*n]))
                .unwrap();
            cases.push((
                format!("{src} scrambled: {}", f.to_string_with(&v[..*n])),
                f,
                w.clone(),
            ));
        }
    }
    let mut slowest = Duration::ZERO;
    for (name, f, w) in &cases {
        let t = Instant::now();
        let ws = WeightSystem::for_poly(w.clone(), f).map_err(|e| e.to_string())?;
        let c = certify_normal_crossing(f, Some(&ws)).map_err(|e| format!("{name}: {e}"))?;
        let Verdict::Certified(cert) = c.verdict else {
            return Err(format!("{name}: not certified: {:?}", c.verdict));
        };
        let nf = cert.normal_form();
        ensure!(
            cert.coordinates.apply(&nf).unwrap() == *f,
            "{name}: coordinates do not reproduce f"
        );
        ensure!(
            cert.inverse.apply(f).unwrap() == nf,
            "{name}: inverse does not give the normal form"
        );
        let mut pos = cert.positions.clone();
        pos.dedup();
        ensure!(
            pos.len() == cert.components.len(),
            "{name}: repeated variables"
        );
        within(t, Duration::from_secs(10), name)?;
        slowest = slowest.max(t.elapsed());
    }
    Ok(format!(
        "{} scrambled normal crossings certified, slowest {slowest:?}",
        cases.len()
    ))
}

// ---------------------------------------------------------------- swallowtail

/// Weighted monomials of degree `d` (empty for negative `d`).
fn monomials(w: &[Rat], d: &Rat) -> Vec<Monomial> {
    fn rec(w: &[Rat], i: usize, left: Rat, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == w.len() {
            if left.is_zero() {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        let mut rest = left;
        let mut e = 0;
        while !rest.is_negative() {
            cur[i] = e;
            rec(w, i + 1, rest.clone(), cur, out);
            rest -= &w[i];
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(w, 0, d.clone(), &mut vec![0; w.len()], &mut out);
    out
}

/// Logarithmic derivations of degree `e` as coefficient vectors over
/// `(slot, monomial)` pairs, from the linear system `δ(f) = λ f`.
fn log_space(f: &Poly, w: &[Rat], e: &Rat) -> Vec<Vec<Poly>> {
    let n = w.len();
    let slots: Vec<Vec<Monomial>> = (0..n).map(|j| monomials(w, &(e + &w[j]))).collect();
    let lams = monomials(w, e);
    let grads = f.gradient();
    // columns: unknown coefficients; rows: monomials of degree d + e
    let mut cols: Vec<Poly> = Vec::new();
    for j in 0..n {
        for m in &slots[j] {
            cols.push(grads[j].mul_monomial(m, &Rat::one()));
        }
    }
    for m in &lams {
        cols.push(f.mul_monomial(m, &-Rat::one()));
    }
    if cols.is_empty() {
        return vec![];
    }
    let mut rows_idx: Vec<Monomial> = cols
        .iter()
        .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
        .collect();
    rows_idx.sort();
    rows_idx.dedup();
    let matrix: Matrix<Rat> = rows_idx
        .iter()
        .map(|m| cols.iter().map(|c| c.coeff(m)).collect())
        .collect();
    let kernel = if matrix.is_empty() {
        (0..cols.len())
            .map(|i| {
                (0..cols.len())
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect()
    } else {
        linalg::nullspace(&Q, &matrix, cols.len())
    };
    kernel
        .into_iter()
        .map(|v| {
            let mut k = 0;
            (0..n)
                .map(|j| {
                    let mut q = Poly::zero(n);
                    for m in &slots[j] {
                        q.add_term(m.clone(), v[k].clone());
                        k += 1;
                    }
                    q
                })
                .collect::<Vec<Poly>>()
        })
        .filter(|d: &Vec<Poly>| d.iter().any(|q| !q.is_zero()))
        .collect()
}

fn flatten(ds: &[Vec<Poly>], keys: &mut Vec<(usize, Monomial)>) -> Matrix<Rat> {
    for d in ds {
        for (j, q) in d.iter().enumerate() {
            for (m, _) in q.terms() {
                if !keys.contains(&(j, m.clone())) {
                    keys.push((j, m.clone()));
                }
            }
        }
    }
    ds.iter()
        .map(|d| keys.iter().map(|(j, m)| d[*j].coeff(m)).collect())
        .collect()
}

/// Degrees of minimal generators found by sweeping degrees up to `top`.
fn brute_force_degrees(f: &Poly, w: &[Rat], top: i64) -> Vec<Rat> {
    let mut gens: Vec<(Rat, Vec<Poly>)> = Vec::new();
    let lowest = -w.iter().max().unwrap().clone();
    let mut e = lowest;
    while e <= rat(top) {
        let space = log_space(f, w, &e);
        let mut lower: Vec<Vec<Poly>> = Vec::new();
        for (ge, g) in &gens {
            for m in monomials(w, &(&e - ge)) {
                lower.push(g.iter().map(|q| q.mul_monomial(&m, &Rat::one())).collect());
            }
        }
        for d in space {
            let mut keys = Vec::new();
            let mut with = lower.clone();
            with.push(d.clone());
            let r_with = linalg::rank(&Q, &flatten(&with, &mut keys));
            let r_without = if lower.is_empty() {
                0
            } else {
                linalg::rank(&Q, &flatten(&lower, &mut keys))
            };
            if r_with > r_without {
                gens.push((e.clone(), d.clone()));
                lower.push(d);
            }
        }
        e += Rat::one();
    }
    gens.into_iter().map(|(e, _)| e).collect()
}

fn swallowtail() -> Outcome {
    let t = Instant::now();
    let v = ["a", "b", "c"];
    let f = p(
        "16*a^4*c - 4*a^3*b^2 - 128*a^2*c^2 + 144*a*b^2*c - 27*b^4 + 256*c^3",
        &v,
    );
    let w = WeightSystem::for_poly(vec![rat(2), rat(3), rat(4)], &f).map_err(|e| e.to_string())?;
    ensure!(*w.degree() == rat(12), "degree {}", w.degree());
    ensure!(is_irreducible(&f), "swallowtail factors over Q");
    ensure!(
        f.constant_term().is_zero() && f.gradient().iter().all(|g| g.constant_term().is_zero()),
        "swallowtail is smooth at the origin"
    );
    let s = free(&f, &w)?;
    let mut tool = s.degrees.clone();
    tool.sort();
    // frozen from an independent sympy sweep of homogeneous log derivations
    let frozen = vec![rat(0), rat(1), rat(2)];
    let brute = brute_force_degrees(&f, w.weights(), 3);
    ensure!(
        brute == frozen,
        "brute-force syzygy degrees {} differ from frozen {}",
        rats(&brute),
        rats(&frozen)
    );
    ensure!(
        tool == brute,
        "tool degrees {} differ from brute force {}",
        rats(&tool),
        rats(&brute)
    );
    let a = degree_audit(&s, &f, &w).map_err(|e| e.to_string())?;
    ensure!(!a.nonpositive, "degree audit found all degrees nonpositive");
    let c = certify_normal_crossing(&f, Some(&w)).map_err(|e| e.to_string())?;
    ensure!(
        matches!(&c.verdict, Verdict::Refuted { stage, .. } if stage == "degree_audit"),
        "certify: {:?}",
        c.verdict
    );
    Ok(format!(
        "degrees {} (brute force agrees), refuted at degree audit, {:?}",
        rats(&tool),
        t.elapsed()
    ))
}

// ---------------------------------------------------------------- Lie oracle

type Structure = Vec<Vec<Vec<Rat>>>;

fn zero_structure(n: usize) -> Structure {
    vec![vec![vec![Rat::zero(); n]; n]; n]
}

fn set(c: &mut Structure, i: usize, j: usize, k: usize, v: i64) {
    c[i][j][k] = rat(v);
    c[j][i][k] = rat(-v);
}

fn template(rng: &mut ChaCha8Rng) -> (&'static str, Structure) {
    match rng.gen_range(0..9) {
        0 => ("abelian", zero_structure(rng.gen_range(1..=4))),
        1 => {
            let mut c = zero_structure(3);
            set(&mut c, 0, 1, 2, 1);
            ("heisenberg", c)
        }
        2 | 3 => {
            let n = if rng.gen_bool(0.5) { 3 } else { 4 };
            let mut c = zero_structure(n);
            // h, e, f (+ central)
            set(&mut c, 0, 1, 1, 2);
            set(&mut c, 0, 2, 2, -2);
            set(&mut c, 1, 2, 0, 1);
            (if n == 3 { "sl2" } else { "sl2+center" }, c)
        }
        4 => {
            let mut c = zero_structure(3);
            set(&mut c, 0, 1, 2, 1);
            set(&mut c, 1, 2, 0, 1);
            set(&mut c, 2, 0, 1, 1);
            ("so3", c)
        }
        5 => {
            let mut c = zero_structure(2);
            set(&mut c, 0, 1, 1, 1);
            ("affine line", c)
        }
        6 => {
            let mut c = zero_structure(3);
            let l = rng.gen_range(-2..=2);
            set(&mut c, 0, 1, 1, 1);
            set(&mut c, 0, 2, 2, l);
            ("r3", c)
        }
        7 => {
            // gl2 in the basis e11, e12, e21, e22
            let mut c = zero_structure(4);
            set(&mut c, 0, 1, 1, 1);
            set(&mut c, 0, 2, 2, -1);
            set(&mut c, 1, 2, 0, 1);
            c[1][2][3] = rat(-1);
            c[2][1][3] = rat(1);
            set(&mut c, 1, 3, 1, 1);
            set(&mut c, 2, 3, 2, -1);
            ("gl2", c)
        }
        _ => {
            // upper triangular 2x2 plus a derivation-extended abelian ideal
            let mut c = zero_structure(4);
            set(&mut c, 0, 1, 1, 1);
            set(&mut c, 0, 2, 2, 1);
            set(&mut c, 0, 3, 3, 2);
            set(&mut c, 1, 2, 3, 1);
            ("solvable4", c)
        }
    }
}

fn sparse(rng: &mut ChaCha8Rng) -> Structure {
    let n = rng.gen_range(2..=4);
    let mut c = zero_structure(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if rng.gen_bool(0.25) {
                    set(&mut c, i, j, k, rng.gen_range(-1..=1));
                }
            }
        }
    }
    c
}

fn change_basis(c: &Structure, pm: &Matrix<Rat>) -> Structure {
    let n = c.len();
    let inv = linalg::inverse(&Q, pm).unwrap();
    let mut out = zero_structure(n);
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let s = &pm[i][a] * &pm[j][b];
                    if s.is_zero() {
                        continue;
                    }
                    for k in 0..n {
                        if c[a][b][k].is_zero() {
                            continue;
                        }
                        for m in 0..n {
                            out[i][j][m] += &s * &c[a][b][k] * &inv[k][m];
                        }
                    }
                }
            }
        }
    }
    out
}

fn random_basis_change(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rat> {
    loop {
        let m: Matrix<Rat> = (0..n)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-2..=2))).collect())
            .collect();
        if linalg::rank(&Q, &m) == n {
            return m;
        }
    }
}

/// Plain fraction-free independent helpers for the oracle.
mod oracle {
    use super::*;

    pub fn bracket(c: &Structure, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = c.len();
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let s = &x[i] * &y[j];
                if s.is_zero() {
                    continue;
                }
                for k in 0..n {
                    out[k] += &s * &c[i][j][k];
                }
            }
        }
        out
    }

    /// Row echelon rank by hand.
    pub fn rank(rows: &[Vec<Rat>]) -> usize {
        let mut m: Vec<Vec<Rat>> = rows.to_vec();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for col in 0..ncols {
            let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(r, piv);
            for i in 0..m.len() {
                if i != r && !m[i][col].is_zero() {
                    let f = &m[i][col] / &m[r][col];
                    for k in 0..ncols {
                        let t = &f * &m[r][k];
                        m[i][k] -= t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    pub fn basis(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for v in rows {
            let mut t = out.clone();
            t.push(v.clone());
            if rank(&t) > out.len() {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn same_span(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
        let mut ab = a.to_vec();
        ab.extend(b.iter().cloned());
        let (ra, rb) = (rank(a), rank(b));
        ra == rb && rank(&ab) == ra
    }

    pub fn derived_solvable(c: &Structure) -> bool {
        let n = c.len();
        let mut cur: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        loop {
            let mut next = Vec::new();
            for x in &cur {
                for y in &cur {
                    next.push(bracket(c, x, y));
                }
            }
            let next = basis(&next);
            if next.is_empty() {
                return true;
            }
            if next.len() == cur.len() {
                return false;
            }
            cur = next;
        }
    }

    fn ad(c: &Structure, x: &[Rat]) -> Vec<Vec<Rat>> {
        let n = c.len();
        let cols: Vec<Vec<Rat>> = (0..n)
            .map(|j| {
                let mut e = vec![Rat::zero(); n];
                e[j] = Rat::one();
                bracket(c, x, &e)
            })
            .collect();
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    fn trace_of_product(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Rat {
        let n = a.len();
        let mut t = Rat::zero();
        for i in 0..n {
            for k in 0..n {
                t += &a[i][k] * &b[k][i];
            }
        }
        t
    }

    /// Cartan's criterion: solvable iff the Killing form kills `L x [L,L]`.
    pub fn cartan_solvable(c: &Structure) -> bool {
        let n = c.len();
        let units: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        let mut derived = Vec::new();
        for x in &units {
            for y in &units {
                derived.push(bracket(c, x, y));
            }
        }
        let derived = basis(&derived);
        units.iter().all(|x| {
            derived
                .iter()
                .all(|y| trace_of_product(&ad(c, x), &ad(c, y)).is_zero())
        })
    }

    /// Kernel of all `ad b_i` by brute force over the coefficient matrix.
    pub fn center(c: &Structure) -> Vec<Vec<Rat>> {
        let n = c.len();
        let mut rows = Vec::new();
        for i in 0..n {
            for m in 0..n {
                rows.push((0..n).map(|k| c[i][k][m].clone()).collect::<Vec<_>>());
            }
        }
        linalg::nullspace(&Q, &rows, n)
    }
}

fn lie_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut solvable, mut triples, mut quadratic, mut eigen, mut rejected) = (0, 0, 0, 0, 0);
    let mut count = 0;
    while count < 200 {
        let (name, raw) = if rng.gen_bool(0.6) {
            let (name, c) = template(&mut rng);
            let pm = random_basis_change(&mut rng, c.len());
            (name.to_string(), change_basis(&c, &pm))
        } else {
            ("sparse".to_string(), sparse(&mut rng))
        };
        let n = raw.len();
        let labels: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
        let l = match LieAlgebra::from_structure(labels, raw.clone(), None) {
            Ok(l) => l,
            Err(_) => {
                rejected += 1;
                continue;
            }
        };
        count += 1;
        let brute = oracle::derived_solvable(&raw);
        ensure!(
            brute == oracle::cartan_solvable(&raw),
            "#{count} {name}: the two oracles disagree"
        );
        ensure!(
            is_solvable(&l) == brute,
            "#{count} {name}: solvability {} vs oracle {brute}",
            is_solvable(&l)
        );
        let radical = solvable_radical(&l);
        let expected = if brute {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                        .collect()
                })
                .collect()
        } else {
            // in dimension at most 4 the radical of a non-solvable algebra is central
            oracle::center(&raw)
        };
        ensure!(
            oracle::same_span(&radical, &expected) || (radical.is_empty() && expected.is_empty()),
            "#{count} {name}: radical of dimension {} vs oracle {}",
            radical.len(),
            expected.len()
        );
        if brute {
            solvable += 1;
            let mats: Vec<Matrix<Rat>> = (0..n)
                .map(|i| {
                    l.ad(&(0..n)
                        .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                        .collect::<Vec<_>>())
                })
                .collect();
            let rep = LinearRep::new(n, mats.clone()).map_err(|e| e.to_string())?;
            match common_eigenvector(&rep, true).map_err(|e| format!("#{count} {name}: {e}"))? {
                CommonEigenvector::Rational {
                    vector,
                    eigenvalues,
                } => {
                    for (m, lam) in mats.iter().zip(&eigenvalues) {
                        let r: Vec<Rat> = linalg::mat_vec(&Q, m, &vector)
                            .iter()
                            .zip(&vector)
                            .map(|(a, b)| a - lam * b)
                            .collect();
                        ensure!(
                            r.iter().all(Zero::is_zero),
                            "#{count} {name}: nonzero residual"
                        );
                    }
                    ensure!(
                        vector.iter().any(|x| !x.is_zero()),
                        "#{count} {name}: zero eigenvector"
                    );
                }
                CommonEigenvector::Quadratic {
                    field,
                    vector,
                    eigenvalues,
                    ..
                } => {
                    residual_zero(&field, &mats, &vector, &eigenvalues)
                        .then_some(())
                        .ok_or(format!(
                            "#{count} {name}: nonzero residual over the extension"
                        ))?;
                }
            }
            eigen += 1;
        } else {
            match find_sl2_triple(&l, true).map_err(|e| format!("#{count} {name}: {e}"))? {
                Some(Sl2Search::Rational(tr)) => {
                    let br = |x: &[Rat], y: &[Rat]| oracle::bracket(&raw, x, y);
                    let scale =
                        |x: &[Rat], s: i64| x.iter().map(|a| a * rat(s)).collect::<Vec<_>>();
                    ensure!(
                        br(&tr.h, &tr.e) == scale(&tr.e, 2),
                        "#{count} {name}: [h,e] != 2e"
                    );
                    ensure!(
                        br(&tr.h, &tr.f) == scale(&tr.f, -2),
                        "#{count} {name}: [h,f] != -2f"
                    );
                    ensure!(br(&tr.e, &tr.f) == tr.h, "#{count} {name}: [e,f] != h");
                    ensure!(tr.h.iter().any(|x| !x.is_zero()), "#{count} {name}: h = 0");
                    triples += 1;
                }
                Some(Sl2Search::Quadratic { field, triple, .. }) => {
                    let br = |x: &[_], y: &[_]| l.bracket_in(&field, x, y);
                    let scale = |x: &[_], s: i64| {
                        x.iter()
                            .map(|a| field.mul(a, &field.from_rat(&rat(s))))
                            .collect::<Vec<_>>()
                    };
                    ensure!(
                        br(&triple.h, &triple.e) == scale(&triple.e, 2),
                        "#{count} {name}: [h,e] != 2e"
                    );
                    ensure!(
                        br(&triple.h, &triple.f) == scale(&triple.f, -2),
                        "#{count} {name}: [h,f] != -2f"
                    );
                    ensure!(
                        br(&triple.e, &triple.f) == triple.h,
                        "#{count} {name}: [e,f] != h"
                    );
                    quadratic += 1;
                }
                None => {
                    return Err(format!(
                        "#{count} {name}: no triple in a non-solvable algebra"
                    ))
                }
            }
        }
    }
    within(t, Duration::from_secs(60), "Lie oracle")?;
    Ok(format!(
        "200 algebras ({rejected} Jacobi rejects): {solvable} solvable with exact eigenvectors ({eigen}), \
         {triples} rational and {quadratic} quadratic sl2-triples, {:?}",
        t.elapsed()
    ))
}

fn residual_zero(
    k: &QuadraticField,
    mats: &[Matrix<Rat>],
    v: &[freediv::linalg::QuadElem],
    lams: &[freediv::linalg::QuadElem],
) -> bool {
    mats.iter().zip(lams).all(|(m, lam)| {
        let mv = linalg::mat_vec(k, &linalg::to_quad(m), v);
        mv.iter()
            .zip(v)
            .all(|(a, b)| k.is_zero(&k.sub(a, &k.mul(lam, b))))
    })
}

// ---------------------------------------------------------------- descent fixtures

fn sl2_on_xy(n: usize) -> Vec<Derivation> {
    let x = Poly::var(0, n);
    let y = Poly::var(1, n);
    let mut e = vec![Poly::zero(n); n];
    e[1] = x.clone();
    let mut f = vec![Poly::zero(n); n];
    f[0] = y.clone();
    let mut h = vec![Poly::zero(n); n];
    h[0] = x;
    h[1] = -y;
    vec![Derivation::new(e), Derivation::new(f), Derivation::new(h)]
}

fn euler_holds(s: &DescentState) -> bool {
    Derivation::euler(s.weights.weights()).apply(&s.f).unwrap() == s.f.scale(s.weights.degree())
}

fn descent_fixtures() -> Outcome {
    let mut notes = Vec::new();
    for (w, d, from, to) in [(vec![1, 1, 2], 2, 2, 1), (vec![1, 1, 1], 1, 3, 1)] {
        let n = w.len();
        let ws = WeightSystem::new(w.iter().map(|&x| rat(x)).collect(), rat(d)).unwrap();
        let f = Poly::var(2, n);
        let start =
            DescentState::from_annihilator(&f, &ws, &sl2_on_xy(n)).map_err(|e| e.to_string())?;
        ensure!(
            start.mprime_dim() == from,
            "fixture {w:?}: lowest-weight dim {}",
            start.mprime_dim()
        );
        ensure!(
            euler_holds(&start),
            "fixture {w:?}: chi(f) != d f at the start"
        );
        let one = chi_step(&start).map_err(|e| e.to_string())?;
        let rec = &one.history[0];
        ensure!(
            rec.epsilon == select_epsilon(&rec.weights_before, &rec.h_eigenvalues).unwrap(),
            "epsilon differs"
        );
        ensure!(
            one.weights.weights().iter().all(|x| x.is_positive()),
            "fixture {w:?}: nonpositive weight"
        );
        ensure!(
            one.mprime_dim() == to,
            "fixture {w:?}: drop {from} -> {}",
            one.mprime_dim()
        );
        ensure!(
            euler_holds(&one),
            "fixture {w:?}: chi(f) != d f after the step"
        );
        let done = descend_to_solvable(start).map_err(|e| e.to_string())?;
        ensure!(
            done.iterations() < from,
            "fixture {w:?}: {} iterations",
            done.iterations()
        );
        ensure!(
            done.is_solvable().unwrap(),
            "fixture {w:?}: not solvable at the end"
        );
        ensure!(
            euler_holds(&done),
            "fixture {w:?}: chi(f) != d f at the end"
        );
        notes.push(format!(
            "W={w:?}: {from}->{to} with eps {} and weights {}",
            rec.epsilon,
            rats(one.weights.weights())
        ));
    }
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- suspension

fn verdict_stage(v: &Verdict) -> String {
    match v {
        Verdict::Certified(_) => "certified".into(),
        Verdict::Refuted { stage, .. } => format!("refuted at {stage}"),
        Verdict::Inconclusive { stage, .. } => format!("inconclusive at {stage}"),
    }
}

fn suspension() -> Outcome {
    let v2 = ["x", "y"];
    let cusp = p("y^2 - x^3", &v2);
    let cw = find_weight_system(&cusp).unwrap();
    let cs = free(&cusp, &cw)?;
    let cv = verdict_stage(&certify_normal_crossing(&cusp, Some(&cw)).unwrap().verdict);
    let v3 = ["x", "y", "z"];
    let mut notes = Vec::new();
    for src in ["y^2 - x^3", "y^2 - (x + z)^3"] {
        let f = p(src, &v3);
        let w =
            WeightSystem::for_poly(vec![rat(2), rat(3), rat(2)], &f).map_err(|e| e.to_string())?;
        let s = free(&f, &w)?;
        let Suspension::Split(sp) = suspension_split(&s, &f, &w).map_err(|e| e.to_string())? else {
            return Err(format!("{src}: not recognized as suspended"));
        };
        ensure!(
            sp.f.nvars() == 2,
            "{src}: split to {} variables",
            sp.f.nvars()
        );
        // the reduced divisor is the cusp up to the order of its variables
        let swapped = sp.f.rename(&[1, 0], 2);
        ensure!(
            sp.f == cusp || swapped == cusp || sp.f == -cusp.clone() || swapped == -cusp.clone(),
            "{src}: reduced to {}",
            sp.f.to_string_with(&v2)
        );
        let rs = free(&sp.f, &sp.weights)?;
        ensure!(
            rs.degrees == cs.degrees,
            "{src}: reduced degrees {} vs {}",
            rats(&rs.degrees),
            rats(&cs.degrees)
        );
        let mut full = s.degrees.clone();
        full.sort();
        let mut expect = cs.degrees.clone();
        expect.push(rat(-2));
        expect.sort();
        ensure!(
            full == expect,
            "{src}: degrees {} vs {}",
            rats(&full),
            rats(&expect)
        );
        let verdict = verdict_stage(&certify_normal_crossing(&f, Some(&w)).unwrap().verdict);
        ensure!(verdict == cv, "{src}: {verdict} vs cusp {cv}");
        notes.push(format!("{src} -> {} ({verdict})", sp.f.to_string_with(&v2)));
    }
    Ok(notes.join("; "))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 8] = [
        ("cusp reproduction", cusp_reproduction),
        ("minors vs Jacobian", minors_test),
        ("minor degree formula", degree_formula),
        ("normal crossing certificates", certify_scrambled),
        ("swallowtail degree audit", swallowtail),
        ("Lie machinery oracle", lie_oracle),
        ("descent fixtures", descent_fixtures),
        ("suspension", suspension),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
