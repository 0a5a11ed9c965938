//! Logarithmic derivations, Saito matrices and the checks built on them.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor;
use crate::groebner::{self, Ideal, ModuleBasis};
use crate::poly::{determinant, CoordinateMap, Degree, Poly, Rat};
use crate::weights::{euler_derivation, WeightSystem};

/// `sum_i a_i d/dx_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    coeffs: Vec<Poly>,
}

impl Derivation {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        if let Some(first) = coeffs.first() {
            let n = first.nvars();
            assert!(coeffs.iter().all(|c| c.nvars() == n));
            assert_eq!(coeffs.len(), n, "one coefficient per variable");
        }
        Derivation { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Derivation::new(vec![Poly::zero(n); n])
    }

    /// `d/dx_i`.
    pub fn partial(i: usize, n: usize) -> Self {
        let mut c = vec![Poly::zero(n); n];
        c[i] = Poly::one(n);
        Derivation::new(c)
    }

    pub fn euler(weights: &[Rat]) -> Self {
        let n = weights.len();
        Derivation::new((0..n).map(|i| Poly::var(i, n).scale(&weights[i])).collect())
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        if p.nvars() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: p.nvars(),
            });
        }
        let mut out = Poly::zero(p.nvars());
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &(a * &p.partial(i)?);
            }
        }
        Ok(out)
    }

    /// `[self, other]`, whose `i`-th coefficient is `self(b_i) - other(a_i)`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        if self.nvars() != other.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: other.nvars(),
            });
        }
        let coeffs = (0..self.nvars())
            .map(|i| Ok(&self.apply(&other.coeffs[i])? - &other.apply(&self.coeffs[i])?))
            .collect::<Result<_>>()?;
        Ok(Derivation { coeffs })
    }

    /// Common value of `deg(a_i) - w_i`; minus infinity for zero, `None` when inhomogeneous.
    pub fn homogeneous_degree(&self, weights: &[Rat]) -> Option<Degree> {
        let mut deg: Option<Rat> = None;
        for (a, w) in self.coeffs.iter().zip(weights) {
            match a.homogeneous_degree(weights)? {
                Degree::MinusInfinity => continue,
                Degree::Finite(d) => {
                    let e = d - w;
                    match &deg {
                        Some(x) if *x != e => return None,
                        _ => deg = Some(e),
                    }
                }
            }
        }
        Some(deg.map(Degree::Finite).unwrap_or(Degree::MinusInfinity))
    }

    /// Splits into homogeneous parts, ascending by degree.
    pub fn homogeneous_parts(&self, weights: &[Rat]) -> Vec<(Rat, Derivation)> {
        let n = self.nvars();
        let mut parts: std::collections::BTreeMap<Rat, Vec<Poly>> = Default::default();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (d, q) in a.homogeneous_parts(weights) {
                let slot = parts
                    .entry(d - &weights[i])
                    .or_insert_with(|| vec![Poly::zero(n); n]);
                slot[i] = &slot[i] + &q;
            }
        }
        parts
            .into_iter()
            .map(|(d, c)| (d, Derivation { coeffs: c }))
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> Derivation {
        Derivation {
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Derivation {
        Derivation {
            coeffs: self.coeffs.iter().map(|a| a * p).collect(),
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        Derivation {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `delta(f) / f` when `f` divides `delta(f)`.
    pub fn log_cofactor(&self, f: &Poly) -> Result<Option<Poly>> {
        self.apply(f)?.exact_div(f)
    }

    /// Integer primitive multiple whose first nonzero coefficient has a
    /// positive lexicographic leading coefficient.
    pub fn primitive(&self) -> Derivation {
        let n = self.nvars();
        let stacked = self
            .coeffs
            .iter()
            .enumerate()
            .fold(Poly::zero(n + 1), |acc, (i, a)| {
                // tag coefficient i with an extra variable power so contents combine
                let mut e = vec![0u32; n + 1];
                e[n] = (n - i) as u32;
                let tag = Poly::monomial(crate::poly::Monomial::new(e), Rat::one());
                &acc + &(&a.rename(&(0..n).collect::<Vec<_>>(), n + 1) * &tag)
            });
        if stacked.is_zero() {
            return self.clone();
        }
        self.scale(&(Rat::one() / stacked.content()))
    }

    /// Transports the derivation along an invertible substitution: with
    /// `old = sub(new)`, the returned derivation acts on the new variables.
    /// `inverse` expresses the new variables in the old ones.
    pub fn transport(&self, sub: &CoordinateMap, inverse: &CoordinateMap) -> Result<Derivation> {
        // new coordinate y_j = inverse_j(x); its derivative is delta(inverse_j) in x,
        // rewritten in y via sub
        let coeffs = inverse
            .images()
            .iter()
            .map(|yj| sub.apply(&self.apply(yj)?))
            .collect::<Result<_>>()?;
        Ok(Derivation { coeffs })
    }

    pub fn to_string_with<S: AsRef<str>>(&self, vars: &[S]) -> String {
        let mut parts = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let s = a.to_string_with(vars);
            let coeff = if a.is_one() {
                String::new()
            } else if a.len() > 1 {
                format!("({s})*")
            } else {
                format!("{s}*")
            };
            parts.push(format!("{coeff}d{}", vars[i].as_ref()));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            self.to_string_with(&crate::poly::default_var_names(self.nvars()))
        )
    }
}

fn check_input(f: &Poly, w: &WeightSystem) -> Result<()> {
    if f.nvars() != w.nvars() {
        return Err(Error::DimensionMismatch {
            expected: w.nvars(),
            found: f.nvars(),
        });
    }
    if f.is_constant() {
        return Err(Error::Degenerate);
    }
    if f.homogeneous_degree(w.weights()) != Some(Degree::Finite(w.degree().clone())) {
        return Err(Error::NotHomogeneous);
    }
    check_reduced(f)
}

/// A weighted homogeneous `f` is reduced iff it is coprime to its partials.
pub fn check_reduced(f: &Poly) -> Result<()> {
    let mut g = f.clone();
    for d in f.gradient() {
        g = factor::gcd(&g, &d);
        if g.is_constant() {
            return Ok(());
        }
    }
    let (_, fs) = factor::factor_irreducible(f);
    match fs.into_iter().find(|(_, m)| *m > 1) {
        Some((p, m)) => Err(Error::NotReduced {
            factor: p.to_string(),
            multiplicity: m,
        }),
        None => Ok(()),
    }
}

/// Column shifts for syzygies of `(d_1 f, ..., d_n f, f)`.
pub fn augmented_shifts(w: &WeightSystem) -> Vec<Rat> {
    let d = w.degree();
    let mut s: Vec<Rat> = w.weights().iter().map(|wi| d - wi).collect();
    s.push(d.clone());
    s
}

fn augmented(delta: &Derivation, f: &Poly) -> Result<Vec<Poly>> {
    let q = delta
        .log_cofactor(f)?
        .ok_or(Error::NotLogarithmic { index: 0 })?;
    let mut v = delta.coeffs.clone();
    v.push(-q);
    Ok(v)
}

/// Minimal homogeneous generators of `Der(-log f)`, normalized: the Euler
/// derivation first, every other generator annihilating `f`, each integer
/// primitive, ordered by degree.
pub fn log_derivations(f: &Poly, w: &WeightSystem) -> Result<Vec<Derivation>> {
    check_input(f, w)?;
    let n = f.nvars();
    let mut g = f.gradient();
    g.push(f.clone());
    let syz = groebner::syzygy_module(&g, w.weights())?;
    let shifts = augmented_shifts(w);
    let mins = groebner::minimal_generators_of(&syz.generators, w.weights(), &shifts)?;
    let mut gens: Vec<Derivation> = mins
        .iter()
        .map(|v| Derivation::new(v[..n].to_vec()))
        .collect();

    let chi = euler_derivation(w).derivation;
    let chi_aug = augmented(&chi, f)?;
    let weights = w.weights();
    let swap = (0..gens.len()).find(|&k| {
        if gens[k].homogeneous_degree(weights) != Some(Degree::Finite(Rat::zero())) {
            return false;
        }
        let mut trial: Vec<Vec<Poly>> = vec![chi_aug.clone()];
        for (j, v) in mins.iter().enumerate() {
            if j != k {
                trial.push(v.clone());
            }
        }
        ModuleBasis::new(&trial, weights, &shifts).contains(&mins[k])
    });
    let Some(k) = swap else {
        return Err(Error::Internal(
            "Euler derivation is not a minimal generator".into(),
        ));
    };
    gens.remove(k);

    let d = w.degree();
    let mut rest: Vec<(Rat, Derivation)> = gens
        .into_iter()
        .map(|delta| {
            let q = delta
                .log_cofactor(f)?
                .ok_or(Error::NotLogarithmic { index: 0 })?;
            let fixed = delta.sub(&chi.mul_poly(&q.scale(&(Rat::one() / d))));
            let deg = match fixed.homogeneous_degree(weights) {
                Some(Degree::Finite(e)) => e,
                _ => return Err(Error::Internal("inhomogeneous log derivation".into())),
            };
            Ok((deg, fixed.primitive()))
        })
        .collect::<Result<_>>()?;
    rest.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = vec![chi.primitive()];
    out.extend(rest.into_iter().map(|(_, d)| d));
    Ok(out)
}

/// Saito's criterion: `n` logarithmic derivations form a basis iff the
/// determinant of their coefficient matrix is a nonzero constant times `f`.
/// Returns the unit on success.
pub fn saito_criterion(basis: &[Derivation], f: &Poly) -> Result<Option<Rat>> {
    let n = f.nvars();
    if basis.len() != n {
        return Err(Error::WrongBasisSize {
            expected: n,
            found: basis.len(),
        });
    }
    for (i, d) in basis.iter().enumerate() {
        if d.log_cofactor(f)?.is_none() {
            return Err(Error::NotLogarithmic { index: i });
        }
    }
    let rows: Vec<Vec<Poly>> = basis.iter().map(|d| d.coeffs.clone()).collect();
    let det = determinant(&rows, n);
    Ok(match det.exact_div(f)? {
        Some(q) if q.is_constant() && !q.is_zero() => Some(q.constant_term()),
        _ => None,
    })
}

/// Free basis data. Row `i` of `lambda` holds the coefficients of `basis[i]`,
/// so entry `(i, j)` has degree `d_i + w_j`; the Saito matrix is its transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct SaitoMatrix {
    pub weights: WeightSystem,
    pub basis: Vec<Derivation>,
    pub degrees: Vec<Rat>,
    pub determinant: Poly,
    pub unit: Rat,
}

impl SaitoMatrix {
    /// Assembles and checks the matrix; fails if the criterion does not hold.
    pub fn from_basis(basis: Vec<Derivation>, f: &Poly, w: &WeightSystem) -> Result<Self> {
        let unit = saito_criterion(&basis, f)?
            .ok_or_else(|| Error::Precondition("determinant is not a unit multiple of f".into()))?;
        let degrees = basis
            .iter()
            .enumerate()
            .map(|(i, d)| match d.homogeneous_degree(w.weights()) {
                Some(Degree::Finite(e)) => Ok(e),
                _ => Err(Error::InhomogeneousGenerator { index: i }),
            })
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<Poly>> = basis.iter().map(|d| d.coeffs.clone()).collect();
        Ok(SaitoMatrix {
            weights: w.clone(),
            determinant: determinant(&rows, f.nvars()),
            basis,
            degrees,
            unit,
        })
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn nvars(&self) -> usize {
        self.weights.nvars()
    }

    pub fn lambda(&self) -> Vec<Vec<Poly>> {
        self.basis.iter().map(|d| d.coeffs.clone()).collect()
    }

    /// Columns are the basis derivations.
    pub fn saito(&self) -> Vec<Vec<Poly>> {
        let l = self.lambda();
        let n = l.len();
        (0..n)
            .map(|i| (0..n).map(|j| l[j][i].clone()).collect())
            .collect()
    }

    /// Minor of `lambda` with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Poly {
        let l = self.lambda();
        let sub: Vec<Vec<Poly>> = l
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        determinant(&sub, self.nvars())
    }

    pub fn minors(&self) -> Vec<Vec<Poly>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.minor(i, j)).collect())
            .collect()
    }

    pub fn to_json<S: AsRef<str>>(&self, vars: &[S]) -> Value {
        json!({
            "variables": vars.iter().map(|v| v.as_ref()).collect::<Vec<_>>(),
            "weights": self.weights,
            "degrees": self.degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(|d| d.to_string_with(vars)).collect::<Vec<_>>(),
            "lambda": self.lambda().iter().map(|r| r.iter().map(|p| p.to_string_with(vars)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "determinant": self.determinant.to_string_with(vars),
            "unit": self.unit.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Freeness {
    Free(SaitoMatrix),
    NotFree { generators: Vec<Derivation> },
}

/// Free iff the minimal generators number `n`; the Saito criterion is then
/// checked as an internal consistency test.
pub fn freeness_test(f: &Poly, w: &WeightSystem) -> Result<Freeness> {
    let gens = log_derivations(f, w)?;
    if gens.len() != f.nvars() {
        return Ok(Freeness::NotFree { generators: gens });
    }
    SaitoMatrix::from_basis(gens, f, w)
        .map(Freeness::Free)
        .map_err(|e| Error::Internal(format!("minimal basis fails the Saito criterion: {e}")))
}

/// `delta = a * chi + delta'` using the degree-0 part of `delta(f)/f`.
pub fn split_euler(delta: &Derivation, w: &WeightSystem, f: &Poly) -> Result<(Rat, Derivation)> {
    let q = delta
        .log_cofactor(f)?
        .ok_or(Error::NotLogarithmic { index: 0 })?;
    let a = q.constant_term() / w.degree();
    let chi = euler_derivation(w).derivation;
    Ok((a.clone(), delta.sub(&chi.scale(&a))))
}

/// Every entry lies in the maximal ideal.
pub fn has_no_unit_coefficient(s: &SaitoMatrix) -> bool {
    s.lambda()
        .iter()
        .flatten()
        .all(|p| p.constant_term().is_zero())
}

/// Result of splitting off trivial factors.
#[derive(Clone, Debug, PartialEq)]
pub enum Suspension {
    NotSuspended,
    Split(SuspensionSplit),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuspensionSplit {
    /// Original indices of the surviving variables.
    pub kept: Vec<usize>,
    /// The divisor in the surviving variables.
    pub f: Poly,
    pub weights: WeightSystem,
    /// Substitution expressing new coordinates in the old ones: `f = f'(chain(x))`
    /// where `f'` is the reduced divisor re-embedded in all variables.
    pub chain: CoordinateMap,
    /// Reduced divisor embedded in the original variable count.
    pub embedded: Poly,
}

/// Straightens basis derivations with a constant coefficient and drops the
/// corresponding variables, iterating until the matrix lies in the maximal ideal.
pub fn suspension_split(s: &SaitoMatrix, f: &Poly, w: &WeightSystem) -> Result<Suspension> {
    let n = f.nvars();
    let mut kept: Vec<usize> = (0..n).collect();
    let mut cur_f = f.clone();
    let mut cur_w = w.clone();
    let mut cur_s = s.clone();
    // substitution in the original ring: f = embedded(chain)
    let mut chain = CoordinateMap::identity(n);
    let mut changed = false;
    loop {
        let m = cur_f.nvars();
        let found = cur_s.basis.iter().find_map(|d| {
            (0..m).find_map(|i| {
                let c = d.coeff(i);
                (c.is_constant() && !c.is_zero()).then(|| (d.clone(), i, c.constant_term()))
            })
        });
        let Some((delta, i, c)) = found else {
            break;
        };
        if delta.homogeneous_degree(cur_w.weights())
            != Some(Degree::Finite(-cur_w.weights()[i].clone()))
        {
            return Err(Error::NonHomogeneousStraightening(format!(
                "derivation {delta} is not homogeneous of degree -w_{i}"
            )));
        }
        if !delta.apply(&cur_f)?.is_zero() {
            return Err(Error::Internal(
                "negative degree derivation does not annihilate f".into(),
            ));
        }
        // slice s = x_i / c with delta(s) = 1; y_j = sum_k (-1)^k / k! s^k delta^k(x_j)
        let slice = Poly::var(i, m).scale(&(Rat::one() / &c));
        let images: Vec<Poly> = (0..m)
            .map(|j| {
                if j == i {
                    return Poly::var(i, m);
                }
                let mut acc = Poly::zero(m);
                let mut term = Poly::var(j, m);
                let mut k: i64 = 0;
                let mut spow = Poly::one(m);
                let mut fact = Rat::one();
                while !term.is_zero() {
                    let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
                    acc = &acc + &(&spow * &term).scale(&(sign / &fact));
                    k += 1;
                    fact *= Rat::from_integer(k.into());
                    spow = &spow * &slice;
                    term = delta.apply(&term).unwrap();
                }
                acc
            })
            .collect();
        let straighten = CoordinateMap::new(images, cur_w.weights())
            .map_err(|e| Error::NonHomogeneousStraightening(e.to_string()))?;
        let reduced = cur_f.eval_var(i, &Rat::zero());
        if straighten.apply(&reduced)? != cur_f {
            return Err(Error::Internal(
                "straightened divisor does not reproduce f".into(),
            ));
        }
        // lift this step to the original ring and compose
        let lift = {
            let mut imgs: Vec<Poly> = (0..n).map(|v| Poly::var(v, n)).collect();
            for (a, &orig) in kept.iter().enumerate() {
                imgs[orig] = straighten.images()[a].rename(&kept, n);
            }
            CoordinateMap::new_unchecked(imgs, n)
        };
        chain = lift.then(&chain);
        let keep_local: Vec<usize> = (0..m).filter(|&j| j != i).collect();
        cur_f = reduced.restrict_vars(&keep_local);
        kept.remove(i);
        cur_w = cur_w.restrict(&keep_local, cur_w.degree().clone())?;
        changed = true;
        cur_s = match freeness_test(&cur_f, &cur_w)? {
            Freeness::Free(s) => s,
            Freeness::NotFree { .. } => {
                return Err(Error::Internal("suspension factor is not free".into()));
            }
        };
    }
    if !changed {
        return Ok(Suspension::NotSuspended);
    }
    let embedded = cur_f.rename(&kept, n);
    if chain.apply(&embedded)? != *f {
        return Err(Error::Internal(
            "suspension chain does not reproduce f".into(),
        ));
    }
    Ok(Suspension::Split(SuspensionSplit {
        kept,
        f: cur_f,
        weights: cur_w,
        chain,
        embedded,
    }))
}

/// The ideal of submaximal minors against `(d_1 f, ..., d_n f, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorsReport {
    pub equal: bool,
    pub minors_basis: Vec<Poly>,
    pub jacobian_basis: Vec<Poly>,
}

pub fn minors_vs_jacobian(s: &SaitoMatrix, f: &Poly) -> Result<MinorsReport> {
    let w = s.weights.weights();
    let minors: Vec<Poly> = s
        .minors()
        .into_iter()
        .flatten()
        .filter(|p| !p.is_zero())
        .collect();
    let mut jac = f.gradient();
    jac.push(f.clone());
    let j = Ideal::new(jac, w)?;
    let jacobian_basis = groebner::groebner_basis(&j);
    if minors.is_empty() {
        return Ok(MinorsReport {
            equal: false,
            minors_basis: vec![],
            jacobian_basis,
        });
    }
    let i = Ideal::new(minors, w)?;
    let minors_basis = groebner::groebner_basis(&i);
    Ok(MinorsReport {
        equal: minors_basis == jacobian_basis,
        minors_basis,
        jacobian_basis,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinorDegree {
    pub row: usize,
    pub col: usize,
    pub expected: Rat,
    /// `None` for a zero minor.
    pub actual: Option<Rat>,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeAudit {
    pub degrees: Vec<Rat>,
    /// All basis degrees are nonpositive.
    pub nonpositive: bool,
    pub minors: Vec<MinorDegree>,
    /// Every nonzero minor has the predicted degree.
    pub formula_holds: bool,
    /// Whether all minors are nonzero; checked only for irreducible `f`
    /// satisfying the maximal-ideal condition.
    pub nonvanishing: Option<bool>,
}

pub fn degree_audit(s: &SaitoMatrix, f: &Poly, w: &WeightSystem) -> Result<DegreeAudit> {
    let d = w.degree();
    let mut minors = Vec::new();
    let n = s.size();
    for i in 0..n {
        for j in 0..n {
            let m = s.minor(i, j);
            let expected = d - &s.degrees[i] - &w.weights()[j];
            let (actual, homogeneous) = match m.homogeneous_degree(w.weights()) {
                Some(Degree::MinusInfinity) => (None, true),
                Some(Degree::Finite(e)) => (Some(e), true),
                None => (m.weighted_degree(w.weights())?.finite().cloned(), false),
            };
            minors.push(MinorDegree {
                row: i,
                col: j,
                expected,
                actual,
                homogeneous,
            });
        }
    }
    let formula_holds = minors
        .iter()
        .all(|m| m.actual.is_none() || (m.homogeneous && m.actual.as_ref() == Some(&m.expected)));
    let nonvanishing = if has_no_unit_coefficient(s) && factor::is_irreducible(f) {
        Some(minors.iter().all(|m| m.actual.is_some()))
    } else {
        None
    };
    Ok(DegreeAudit {
        nonpositive: s.degrees.iter().all(|e| !e.is_positive()),
        degrees: s.degrees.clone(),
        minors,
        formula_holds,
        nonvanishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat, rat_frac};

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, &["x", "y", "z", "w"][..n]).unwrap()
    }

    fn der(cs: &[&str]) -> Derivation {
        Derivation::new(cs.iter().map(|c| p(c, cs.len())).collect())
    }

    fn ws(w: &[i64], d: i64) -> WeightSystem {
        WeightSystem::new(w.iter().map(|&x| rat(x)).collect(), rat(d)).unwrap()
    }

    #[test]
    fn apply_and_bracket() {
        let f = p("y^2 - x^3", 2);
        let d2 = der(&["2y", "3x^2"]);
        assert!(d2.apply(&f).unwrap().is_zero());
        let chi = der(&["2x", "3y"]);
        assert_eq!(chi.apply(&f).unwrap(), f.scale(&rat(6)));
        assert!(d2.apply(&Poly::one(2)).unwrap().is_zero());
        assert_eq!(chi.bracket(&d2).unwrap(), d2);
        assert!(d2.bracket(&d2).unwrap().is_zero());
        assert!(der(&["x", "0"])
            .bracket(&der(&["0", "y"]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn cusp_basis_exact() {
        let f = p("y^2 - x^3", 2);
        let basis = log_derivations(&f, &ws(&[2, 3], 6)).unwrap();
        assert_eq!(basis, vec![der(&["2x", "3y"]), der(&["2y", "3x^2"])]);
        assert_eq!(saito_criterion(&basis, &f).unwrap(), Some(rat(-6)));
    }

    #[test]
    fn normal_crossing_and_smooth() {
        let f = p("x*y", 2);
        let basis = log_derivations(&f, &ws(&[1, 1], 2)).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], der(&["x", "y"]));
        assert_eq!(basis[1], der(&["x", "-y"]));
        assert!(
            saito_criterion(&[der(&["x", "0"]), der(&["0", "y"])], &f).unwrap() == Some(rat(1))
        );
        assert_eq!(
            saito_criterion(&[der(&["x", "y"]), der(&["x^2", "x*y"])], &f).unwrap(),
            None
        );
        let g = p("x", 2);
        let b = log_derivations(&g, &ws(&[1, 1], 1)).unwrap();
        assert_eq!(b, vec![der(&["x", "y"]), der(&["0", "1"])]);
    }

    #[test]
    fn non_logarithmic_is_an_error() {
        let f = p("x*y", 2);
        assert_eq!(
            saito_criterion(&[der(&["1", "0"]), der(&["0", "y"])], &f),
            Err(Error::NotLogarithmic { index: 0 })
        );
    }

    #[test]
    fn rejects_non_reduced() {
        assert!(matches!(
            log_derivations(&p("x^2*y", 2), &ws(&[1, 1], 3)),
            Err(Error::NotReduced {
                multiplicity: 2,
                ..
            })
        ));
        assert_eq!(
            log_derivations(&p("x + y^2", 2), &ws(&[1, 1], 2)),
            Err(Error::NotHomogeneous)
        );
    }

    #[test]
    fn euler_split() {
        let w = ws(&[1, 1], 2);
        let f = p("x*y", 2);
        let (a, rest) = split_euler(&der(&["x", "0"]), &w, &f).unwrap();
        assert_eq!(a, rat_frac(1, 2));
        assert_eq!(rest, der(&["x", "-y"]).scale(&rat_frac(1, 2)));
        let (a, rest) = split_euler(&der(&["x", "y"]), &w, &f).unwrap();
        assert_eq!((a, rest.is_zero()), (rat(1), true));
    }

    #[test]
    fn cusp_matrix_checks() {
        let f = p("y^2 - x^3", 2);
        let w = ws(&[2, 3], 6);
        let Freeness::Free(s) = freeness_test(&f, &w).unwrap() else {
            panic!("cusp is free");
        };
        assert_eq!(s.degrees, vec![rat(0), rat(1)]);
        assert!(has_no_unit_coefficient(&s));
        assert!(!minors_vs_jacobian(&s, &f).unwrap().equal);
        let audit = degree_audit(&s, &f, &w).unwrap();
        assert!(!audit.nonpositive);
        assert!(audit.formula_holds);
        assert_eq!(audit.nonvanishing, Some(true));
        // minor with row 1 and column 0 removed is the entry 3y
        assert_eq!(s.minor(1, 0), p("3y", 2));
        assert_eq!(
            suspension_split(&s, &f, &w).unwrap(),
            Suspension::NotSuspended
        );
    }

    #[test]
    fn splits_suspended_cusp() {
        let f = p("y^2 - x^3", 3);
        let w = ws(&[2, 3, 2], 6);
        let Freeness::Free(s) = freeness_test(&f, &w).unwrap() else {
            panic!("suspended cusp is free");
        };
        assert!(!has_no_unit_coefficient(&s));
        let Suspension::Split(sp) = suspension_split(&s, &f, &w).unwrap() else {
            panic!("expected a split");
        };
        assert_eq!(sp.kept, vec![0, 1]);
        assert_eq!(sp.f, p("y^2 - x^3", 2));
    }
}
