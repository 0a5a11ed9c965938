//! Finite-dimensional Lie algebras over exact scalars: bracket closure of
//! derivations, derived series, radical, Levi part, sl2-triples and a
//! constructive Lie's theorem.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor::univariate::{self, UPoly};
use crate::linalg::{self, Field, Matrix, QuadElem, QuadraticField, Q};
use crate::logder::Derivation;
use crate::poly::{default_var_names, Degree, Monomial, Poly, Rat};

/// Coordinates with respect to a Lie algebra basis.
pub type Coords = Vec<Rat>;

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// `structure[i][j][k]` is the coefficient of `b_k` in `[b_i, b_j]`.
    structure: Vec<Vec<Vec<Rat>>>,
    degrees: Option<Vec<Rat>>,
    elements: Option<Vec<Derivation>>,
}

fn unit(n: usize, i: usize) -> Coords {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

fn combine<T: Clone>(coeffs: &[Rat], items: &[T], zero: T, add: impl Fn(&T, &T, &Rat) -> T) -> T {
    coeffs
        .iter()
        .zip(items)
        .filter(|(c, _)| !c.is_zero())
        .fold(zero, |acc, (c, x)| add(&acc, x, c))
}

fn combine_vectors(coeffs: &[Rat], vectors: &[Coords], n: usize) -> Coords {
    combine(coeffs, vectors, vec![Rat::zero(); n], |acc, v, c| {
        acc.iter().zip(v).map(|(a, b)| a + c * b).collect()
    })
}

type Key = (usize, Monomial);

fn keys_of<'a>(ds: impl IntoIterator<Item = &'a Derivation>) -> BTreeMap<Key, usize> {
    let mut keys = BTreeMap::new();
    for d in ds {
        for (i, a) in d.coeffs().iter().enumerate() {
            for (m, _) in a.terms() {
                keys.entry((i, m.clone())).or_insert(0);
            }
        }
    }
    for (pos, v) in keys.values_mut().enumerate() {
        *v = pos;
    }
    keys
}

/// `None` when `d` uses a term outside `keys`.
fn vectorize(d: &Derivation, keys: &BTreeMap<Key, usize>) -> Option<Coords> {
    let mut v = vec![Rat::zero(); keys.len()];
    for (i, a) in d.coeffs().iter().enumerate() {
        for (m, c) in a.terms() {
            v[*keys.get(&(i, m.clone()))?] = c.clone();
        }
    }
    Some(v)
}

fn derivation_degree(d: &Derivation, weights: &[Rat], index: usize) -> Result<Rat> {
    match d.homogeneous_degree(weights) {
        Some(Degree::Finite(e)) => Ok(e),
        Some(Degree::MinusInfinity) => Err(Error::Precondition(format!("element {index} is zero"))),
        None => Err(Error::InhomogeneousGenerator { index }),
    }
}

fn linear_combination_label(coeffs: &[Rat], labels: &[String]) -> String {
    let parts: Vec<String> = coeffs
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| {
            if c.is_one() {
                l.clone()
            } else {
                format!("({c})*{l}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl LieAlgebra {
    /// Abstract algebra from structure constants; antisymmetry, Jacobi and
    /// degree compatibility are checked exactly.
    pub fn from_structure(
        labels: Vec<String>,
        structure: Vec<Vec<Vec<Rat>>>,
        degrees: Option<Vec<Rat>>,
    ) -> Result<Self> {
        let n = labels.len();
        let shape_ok = structure.len() == n
            && structure
                .iter()
                .all(|row| row.len() == n && row.iter().all(|c| c.len() == n));
        if !shape_ok {
            return Err(Error::Precondition(
                "structure constants do not match the basis size".into(),
            ));
        }
        if degrees.as_ref().is_some_and(|d| d.len() != n) {
            return Err(Error::Precondition(
                "one degree per basis element required".into(),
            ));
        }
        let alg = LieAlgebra {
            labels,
            structure,
            degrees,
            elements: None,
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = &self.structure[i][j][k];
                    if *c != -&self.structure[j][i][k] {
                        return Err(Error::Precondition(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                    if let Some(d) = &self.degrees {
                        if !c.is_zero() && d[k] != &d[i] + &d[j] {
                            return Err(Error::Precondition(format!(
                                "bracket of elements {i} and {j} violates the grading"
                            )));
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let a = self.bracket(&self.bracket(&ei, &ej), &ek);
                    let b = self.bracket(&self.bracket(&ej, &ek), &ei);
                    let c = self.bracket(&self.bracket(&ek, &ei), &ej);
                    if a.iter()
                        .zip(&b)
                        .zip(&c)
                        .any(|((x, y), z)| !(x + y + z).is_zero())
                    {
                        return Err(Error::Precondition(format!(
                            "Jacobi identity fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Algebra spanned by linearly independent homogeneous derivations closed
    /// under the bracket.
    pub fn from_derivations(elements: Vec<Derivation>, weights: &[Rat]) -> Result<Self> {
        let n = elements.len();
        let degrees = elements
            .iter()
            .enumerate()
            .map(|(i, d)| derivation_degree(d, weights, i))
            .collect::<Result<Vec<_>>>()?;
        let keys = keys_of(&elements);
        let rows: Vec<Coords> = elements
            .iter()
            .map(|d| vectorize(d, &keys).unwrap())
            .collect();
        if linalg::rank(&Q, &rows) != n {
            return Err(Error::Precondition(
                "derivations are linearly dependent".into(),
            ));
        }
        let mut structure = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let b = elements[i].bracket(&elements[j])?;
                let c = vectorize(&b, &keys)
                    .and_then(|v| linalg::coordinates(&Q, &rows, &v))
                    .ok_or_else(|| {
                        Error::Precondition("derivations are not closed under the bracket".into())
                    })?;
                for k in 0..n {
                    structure[j][i][k] = -&c[k];
                    structure[i][j][k] = c[k].clone();
                }
            }
        }
        let names = default_var_names(weights.len());
        let alg = LieAlgebra {
            labels: elements.iter().map(|d| d.to_string_with(&names)).collect(),
            structure,
            degrees: Some(degrees),
            elements: Some(elements),
        };
        alg.validate()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> Option<&[Rat]> {
        self.degrees.as_deref()
    }

    pub fn elements(&self) -> Option<&[Derivation]> {
        self.elements.as_deref()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.structure[i][j][k]
    }

    /// The derivation with coordinates `x`, for derivation-backed algebras.
    pub fn element(&self, x: &[Rat]) -> Option<Derivation> {
        let els = self.elements.as_ref()?;
        let n = els.first().map(|d| d.nvars()).unwrap_or(0);
        Some(combine(x, els, Derivation::zero(n), |acc, d, c| {
            acc.add(&d.scale(c))
        }))
    }

    pub fn bracket_in<F: Field>(&self, k: &F, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let n = self.dim();
        let mut out = vec![k.zero(); n];
        for i in 0..n {
            if k.is_zero(&x[i]) {
                continue;
            }
            for j in 0..n {
                if k.is_zero(&y[j]) || i == j {
                    continue;
                }
                let xy = k.mul(&x[i], &y[j]);
                for (l, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[l] = k.add(&out[l], &k.mul(&xy, &k.from_rat(c)));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Coords {
        self.bracket_in(&Q, x, y)
    }

    /// Matrix of `ad x` acting on coordinate columns.
    pub fn ad_in<F: Field>(&self, k: &F, x: &[F::Elem]) -> Matrix<F::Elem> {
        let n = self.dim();
        let cols: Vec<Vec<F::Elem>> = (0..n)
            .map(|j| {
                let mut e = vec![k.zero(); n];
                e[j] = k.one();
                self.bracket_in(k, x, &e)
            })
            .collect();
        linalg::transpose(&cols)
    }

    pub fn ad(&self, x: &[Rat]) -> Matrix<Rat> {
        self.ad_in(&Q, x)
    }

    pub fn killing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        linalg::trace(&Q, &linalg::mat_mul(&Q, &self.ad(x), &self.ad(y)))
    }

    /// Gram matrix of the Killing form on the basis.
    pub fn killing_matrix(&self) -> Matrix<Rat> {
        let n = self.dim();
        let ads: Vec<Matrix<Rat>> = (0..n).map(|i| self.ad(&unit(n, i))).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| linalg::trace(&Q, &linalg::mat_mul(&Q, &ads[i], &ads[j])))
                    .collect()
            })
            .collect()
    }

    /// The subalgebra spanned by `basis` (coordinates in `self`), with its own
    /// structure constants. Degrees survive when each vector is homogeneous.
    pub fn subalgebra(&self, basis: &[Coords]) -> Result<LieAlgebra> {
        let m = basis.len();
        if linalg::rank(&Q, &basis.to_vec()) != m {
            return Err(Error::Precondition(
                "subalgebra basis is linearly dependent".into(),
            ));
        }
        let mut structure = vec![vec![vec![Rat::zero(); m]; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let b = self.bracket(&basis[i], &basis[j]);
                let c = linalg::coordinates(&Q, basis, &b).ok_or_else(|| {
                    Error::Precondition("subspace is not closed under the bracket".into())
                })?;
                for k in 0..m {
                    structure[j][i][k] = -&c[k];
                    structure[i][j][k] = c[k].clone();
                }
            }
        }
        let degrees = self.degrees.as_ref().and_then(|d| {
            basis
                .iter()
                .map(|v| {
                    let mut it = v
                        .iter()
                        .zip(d)
                        .filter(|(c, _)| !c.is_zero())
                        .map(|(_, e)| e);
                    let first = it.next()?.clone();
                    it.all(|e| *e == first).then_some(first)
                })
                .collect::<Option<Vec<Rat>>>()
        });
        let elements = self.elements.as_ref().map(|_| {
            basis
                .iter()
                .map(|v| self.element(v).unwrap())
                .collect::<Vec<_>>()
        });
        let labels = match &elements {
            Some(els) => {
                let names = default_var_names(els.first().map(|d| d.nvars()).unwrap_or(0));
                els.iter().map(|d| d.to_string_with(&names)).collect()
            }
            None => basis
                .iter()
                .map(|v| linear_combination_label(v, &self.labels))
                .collect(),
        };
        Ok(LieAlgebra {
            labels,
            structure,
            degrees,
            elements,
        })
    }

    /// Basis vectors of the given degree; empty without degrees.
    pub fn graded_part(&self, degree: &Rat) -> Vec<Coords> {
        let n = self.dim();
        match &self.degrees {
            Some(d) => (0..n)
                .filter(|&i| d[i] == *degree)
                .map(|i| unit(n, i))
                .collect(),
            None => vec![],
        }
    }

    pub fn to_json(&self) -> Value {
        let n = self.dim();
        let mut constants = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        constants.push(json!([i, j, k, c.to_string()]));
                    }
                }
            }
        }
        json!({
            "dimension": n,
            "labels": self.labels,
            "degrees": self.degrees.as_ref().map(|d| d.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
            "structure_constants": constants,
        })
    }
}

/// Dimension of the derivations of non-positive degree, a finite space.
pub fn nonpositive_derivation_dimension(weights: &[Rat]) -> usize {
    fn count(weights: &[Rat], idx: usize, budget: &Rat, slots: &[Rat]) -> usize {
        // monomials in variables idx.. of weighted degree <= budget, counted
        // once for every slot whose weight is at least the monomial degree
        if idx == weights.len() {
            return 0;
        }
        let mut total = 0;
        let mut used = Rat::zero();
        while used <= *budget {
            let rest = budget - &used;
            if idx + 1 == weights.len() {
                total += slots.iter().filter(|w| **w >= used).count();
            } else {
                let shifted: Vec<Rat> = slots.iter().map(|w| w - &used).collect();
                total += count(weights, idx + 1, &rest, &shifted);
            }
            used += &weights[idx];
        }
        total
    }
    let max = weights.iter().max().cloned().unwrap_or_else(Rat::zero);
    count(weights, 0, &max, weights)
}

/// Bracket closure of homogeneous derivations. `cap` defaults to the
/// dimension of the non-positive part of all derivations.
pub fn generate_lie_algebra(
    gens: &[Derivation],
    weights: &[Rat],
    cap: Option<usize>,
) -> Result<LieAlgebra> {
    let cap = cap.unwrap_or_else(|| nonpositive_derivation_dimension(weights).max(gens.len()));
    let mut basis: Vec<Derivation> = Vec::new();
    let mut degs: Vec<Rat> = Vec::new();
    let mut add = |cand: Derivation, index: usize, basis: &mut Vec<Derivation>| -> Result<()> {
        if cand.is_zero() {
            return Ok(());
        }
        let deg = derivation_degree(&cand, weights, index)?;
        let same: Vec<&Derivation> = basis
            .iter()
            .zip(&degs)
            .filter(|(_, e)| **e == deg)
            .map(|(d, _)| d)
            .collect();
        let keys = keys_of(same.iter().copied().chain(std::iter::once(&cand)));
        let rows: Vec<Coords> = same.iter().map(|d| vectorize(d, &keys).unwrap()).collect();
        if linalg::in_span(&Q, &rows, &vectorize(&cand, &keys).unwrap()) {
            return Ok(());
        }
        basis.push(cand);
        degs.push(deg);
        if basis.len() > cap {
            return Err(Error::CapExceeded { cap });
        }
        Ok(())
    };
    for (i, g) in gens.iter().enumerate() {
        add(g.clone(), i, &mut basis)?;
    }
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let b = basis[j].bracket(&basis[i])?;
            add(b, gens.len() + i, &mut basis)?;
        }
        i += 1;
    }
    LieAlgebra::from_derivations(basis, weights)
}

/// The annihilator of `f` inside a derivation-backed algebra containing the
/// Euler derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Annihilator {
    pub algebra: LieAlgebra,
    /// Coordinates of the annihilator basis in the parent algebra.
    pub basis_in_parent: Vec<Coords>,
    /// Coordinates of the Euler derivation in the parent algebra.
    pub euler: Coords,
}

impl Annihilator {
    /// The degree-zero part, itself a subalgebra.
    pub fn degree_zero(&self) -> Result<LieAlgebra> {
        let part = self.algebra.graded_part(&Rat::zero());
        self.algebra.subalgebra(&part)
    }
}

pub fn split_annihilator(l: &LieAlgebra, weights: &[Rat], f: &Poly) -> Result<Annihilator> {
    let els = l.elements().ok_or_else(|| {
        Error::Precondition("annihilator needs a derivation-backed algebra".into())
    })?;
    let degrees = l.degrees().unwrap();
    let chi = Derivation::euler(weights);
    let keys = keys_of(els.iter().chain(std::iter::once(&chi)));
    let rows: Vec<Coords> = els.iter().map(|d| vectorize(d, &keys).unwrap()).collect();
    let euler = linalg::coordinates(&Q, &rows, &vectorize(&chi, &keys).unwrap())
        .ok_or(Error::EulerNotInSpan)?;
    for (i, d) in els.iter().enumerate() {
        if d.log_cofactor(f)?.is_none() {
            return Err(Error::NotLogarithmic { index: i });
        }
    }
    let n = l.dim();
    let mut groups: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, e) in degrees.iter().enumerate() {
        groups.entry(e.clone()).or_default().push(i);
    }
    let mut basis = Vec::new();
    for idx in groups.values() {
        let images: Vec<Poly> = idx
            .iter()
            .map(|&i| els[i].apply(f))
            .collect::<Result<_>>()?;
        let mut monos: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in &images {
            for (m, _) in p.terms() {
                let len = monos.len();
                monos.entry(m.clone()).or_insert(len);
            }
        }
        let mut mat = vec![vec![Rat::zero(); idx.len()]; monos.len()];
        for (c, p) in images.iter().enumerate() {
            for (m, v) in p.terms() {
                mat[monos[m]][c] = v.clone();
            }
        }
        for v in linalg::nullspace(&Q, &mat, idx.len()) {
            let mut full = vec![Rat::zero(); n];
            for (c, &i) in idx.iter().enumerate() {
                full[i] = v[c].clone();
            }
            basis.push(full);
        }
    }
    if basis.len() + 1 != n {
        return Err(Error::Internal(format!(
            "annihilator has dimension {} inside an algebra of dimension {n}",
            basis.len()
        )));
    }
    Ok(Annihilator {
        algebra: l.subalgebra(&basis)?,
        basis_in_parent: basis,
        euler,
    })
}

/// Echelon basis of `[A, B]` for subspaces given in coordinates.
pub fn bracket_span(l: &LieAlgebra, a: &[Coords], b: &[Coords]) -> Vec<Coords> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(l.bracket(x, y));
        }
    }
    linalg::span_basis(&Q, &out)
}

/// `L, [L,L], ...` down to the first repeated or zero term (zero included).
pub fn derived_series(l: &LieAlgebra) -> Vec<Vec<Coords>> {
    let n = l.dim();
    let mut series = vec![(0..n).map(|i| unit(n, i)).collect::<Vec<_>>()];
    loop {
        let cur = series.last().unwrap();
        if cur.is_empty() {
            break;
        }
        let next = bracket_span(l, cur, cur);
        if next.len() == cur.len() {
            break;
        }
        series.push(next);
    }
    series
}

pub fn is_solvable(l: &LieAlgebra) -> bool {
    derived_series(l).last().unwrap().is_empty()
}

/// Vectors of `l` Killing-orthogonal to every vector in `space`.
pub fn killing_orthogonal(l: &LieAlgebra, space: &[Coords]) -> Vec<Coords> {
    let n = l.dim();
    if space.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let gram = l.killing_matrix();
    let rows: Matrix<Rat> = space
        .iter()
        .map(|v| linalg::mat_vec(&Q, &gram, v))
        .collect();
    linalg::span_basis(&Q, &linalg::nullspace(&Q, &rows, n))
}

/// Maximal solvable ideal, as the Killing-orthogonal of `[L,L]`.
pub fn solvable_radical(l: &LieAlgebra) -> Vec<Coords> {
    let derived = bracket_span(l, &derived_series(l)[0], &derived_series(l)[0]);
    killing_orthogonal(l, &derived)
}

/// Projection onto the first block of coordinates for the decomposition
/// `L = span(head) + span(tail)`.
struct Splitting {
    inverse: Matrix<Rat>,
    head: usize,
}

impl Splitting {
    fn new(head: &[Coords], tail: &[Coords]) -> Self {
        let cols: Vec<Coords> = head.iter().chain(tail).cloned().collect();
        let inverse =
            linalg::inverse(&Q, &linalg::transpose(&cols)).expect("complementary subspaces");
        Splitting {
            inverse,
            head: head.len(),
        }
    }

    fn head_coords(&self, v: &[Rat]) -> Coords {
        linalg::mat_vec(&Q, &self.inverse, v)[..self.head].to_vec()
    }
}

/// A semisimple subalgebra complementary to the radical, by successive
/// correction along the derived series of the radical.
pub fn levi_subalgebra(l: &LieAlgebra) -> Result<Vec<Coords>> {
    let n = l.dim();
    let radical = solvable_radical(l);
    if radical.len() == n {
        return Ok(vec![]);
    }
    let mut ys = linalg::complement(&Q, &radical, n);
    if radical.is_empty() {
        return Ok(ys);
    }
    let s = ys.len();
    // structure constants of L / R in the image of ys
    let quotient = Splitting::new(&ys, &radical);
    let mut c = vec![vec![vec![Rat::zero(); s]; s]; s];
    for i in 0..s {
        for j in 0..s {
            c[i][j] = quotient.head_coords(&l.bracket(&ys[i], &ys[j]));
        }
    }
    let mut rs = vec![radical];
    loop {
        let last = rs.last().unwrap();
        let next = bracket_span(l, last, last);
        let done = next.is_empty();
        rs.push(next);
        if done {
            break;
        }
    }
    for t in 0..rs.len() - 1 {
        let (rt, rnext) = (&rs[t], &rs[t + 1]);
        let comp = linalg::complement(&Q, rnext, n);
        let modulo = Splitting::new(&comp, rnext);
        let q = comp.len();
        let unknowns = s * rt.len();
        let var = |i: usize, a: usize| i * rt.len() + a;
        let mut rows: Matrix<Rat> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for i in 0..s {
            for j in i + 1..s {
                let mut block = vec![vec![Rat::zero(); unknowns]; q];
                for (a, b) in rt.iter().enumerate() {
                    let yi_b = modulo.head_coords(&l.bracket(&ys[i], b));
                    let b_yj = modulo.head_coords(&l.bracket(b, &ys[j]));
                    let b_mod = modulo.head_coords(b);
                    for r in 0..q {
                        block[r][var(j, a)] += &yi_b[r];
                        block[r][var(i, a)] += &b_yj[r];
                        for k in 0..s {
                            block[r][var(k, a)] -= &c[i][j][k] * &b_mod[r];
                        }
                    }
                }
                let defect: Coords = {
                    let br = l.bracket(&ys[i], &ys[j]);
                    let lin = combine_vectors(&c[i][j], &ys, n);
                    br.iter().zip(&lin).map(|(a, b)| a - b).collect()
                };
                let target = modulo.head_coords(&defect);
                rows.extend(block);
                rhs.extend(target.into_iter().map(|x| -x));
            }
        }
        let sol = linalg::solve(&Q, &rows, &rhs)
            .ok_or_else(|| Error::Infeasible("Levi correction system".into()))?;
        for (i, y) in ys.iter_mut().enumerate() {
            let z = combine_vectors(&sol[var(i, 0)..var(i, 0) + rt.len()], rt, n);
            for (a, b) in y.iter_mut().zip(z) {
                *a += b;
            }
        }
    }
    // exact closure check
    l.subalgebra(&ys)
        .map_err(|_| Error::Internal("Levi complement is not a subalgebra".into()))?;
    Ok(ys)
}

/// A linear representation: one `dim x dim` matrix per basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRep {
    dim: usize,
    matrices: Vec<Matrix<Rat>>,
}

fn flatten<E: Clone>(m: &Matrix<E>) -> Vec<E> {
    m.iter().flatten().cloned().collect()
}

fn unflatten<E: Clone>(v: &[E], dim: usize) -> Matrix<E> {
    v.chunks(dim.max(1)).take(dim).map(|r| r.to_vec()).collect()
}

impl LinearRep {
    pub fn new(dim: usize, matrices: Vec<Matrix<Rat>>) -> Result<Self> {
        if matrices
            .iter()
            .any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim))
        {
            return Err(Error::Precondition(format!(
                "representation matrices must be {dim}x{dim}"
            )));
        }
        Ok(LinearRep { dim, matrices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[Matrix<Rat>] {
        &self.matrices
    }

    pub fn matrix_of(&self, x: &[Rat]) -> Matrix<Rat> {
        combine(
            x,
            &self.matrices,
            linalg::zeros(&Q, self.dim, self.dim),
            |acc, m, c| linalg::mat_add(&Q, acc, &linalg::mat_scale(&Q, m, c)),
        )
    }

    /// `rho([b_i, b_j]) = [rho(b_i), rho(b_j)]` for all basis pairs.
    pub fn is_representation_of(&self, l: &LieAlgebra) -> bool {
        let n = l.dim();
        n == self.matrices.len()
            && (0..n).all(|i| {
                (i + 1..n).all(|j| {
                    self.matrix_of(&l.bracket(&unit(n, i), &unit(n, j)))
                        == linalg::commutator(&Q, &self.matrices[i], &self.matrices[j])
                })
            })
    }

    /// Coordinates of the elements acting as zero.
    pub fn kernel(&self) -> Vec<Coords> {
        let cols: Vec<Coords> = self.matrices.iter().map(flatten).collect();
        let m = linalg::transpose(&cols);
        if m.is_empty() {
            return (0..self.matrices.len())
                .map(|i| unit(self.matrices.len(), i))
                .collect();
        }
        linalg::nullspace(&Q, &m, self.matrices.len())
    }

    /// The image as an abstract algebra together with its basis matrices.
    pub fn image(&self) -> Result<(LieAlgebra, Vec<Matrix<Rat>>)> {
        let flat: Vec<Coords> = self.matrices.iter().map(flatten).collect();
        let basis: Vec<Coords> = linalg::span_basis(&Q, &flat);
        let mats: Vec<Matrix<Rat>> = basis.iter().map(|v| unflatten(v, self.dim)).collect();
        let m = mats.len();
        let mut structure = vec![vec![vec![Rat::zero(); m]; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let b = flatten(&linalg::commutator(&Q, &mats[i], &mats[j]));
                let c = linalg::coordinates(&Q, &basis, &b).ok_or_else(|| {
                    Error::Precondition("matrices do not span a Lie algebra".into())
                })?;
                for k in 0..m {
                    structure[j][i][k] = -&c[k];
                    structure[i][j][k] = c[k].clone();
                }
            }
        }
        let labels = (0..m).map(|i| format!("m{i}")).collect();
        Ok((LieAlgebra::from_structure(labels, structure, None)?, mats))
    }

    pub fn is_solvable(&self) -> Result<bool> {
        Ok(is_solvable(&self.image()?.0))
    }
}

/// Linear action of a derivation-backed algebra on the span of the variables
/// `vars`: entry `(a, b)` is the coefficient of `x_{vars[a]}` in `δ(x_{vars[b]})`.
pub fn restrict_to_mprime(l: &LieAlgebra, vars: &[usize]) -> Result<LinearRep> {
    let els = l.elements().ok_or_else(|| {
        Error::Precondition("restriction needs a derivation-backed algebra".into())
    })?;
    let k = vars.len();
    let mut matrices = Vec::with_capacity(els.len());
    for (idx, d) in els.iter().enumerate() {
        let nonpositive = l.degrees().map(|e| !e[idx].is_positive()).unwrap_or(true);
        let mut m = vec![vec![Rat::zero(); k]; k];
        for (b, &slot) in vars.iter().enumerate() {
            let a = d.coeff(slot);
            let mut linear = Poly::zero(a.nvars());
            for (r, &v) in vars.iter().enumerate() {
                let c = a.linear_coeff(v);
                if !c.is_zero() {
                    linear.add_term(Monomial::var(v, a.nvars()), c.clone());
                }
                m[r][b] = c;
            }
            let rest = a - &linear;
            let bad = if nonpositive {
                !rest.is_zero()
            } else {
                !rest.constant_term().is_zero()
            };
            if bad {
                return Err(Error::NonlinearOnLowestWeight { slot });
            }
        }
        matrices.push(m);
    }
    LinearRep::new(k, matrices)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Triple<T> {
    pub h: T,
    pub e: T,
    pub f: T,
}

/// Outcome of an sl2 search: over Q, or over `Q(sqrt(d))` with the defining
/// irreducible quadratic.
#[derive(Clone, Debug, PartialEq)]
pub enum Sl2Search<R, K> {
    Rational(Sl2Triple<R>),
    Quadratic {
        minimal_polynomial: UPoly,
        field: QuadraticField,
        triple: Sl2Triple<K>,
    },
}

pub fn upoly_string(p: &UPoly) -> String {
    Poly::from_terms(
        1,
        p.iter()
            .enumerate()
            .map(|(k, c)| (vec![k as u32], c.clone())),
    )
    .to_string_with(&["t"])
}

fn extension_error(p: &UPoly) -> Error {
    Error::FieldExtension {
        polynomial: upoly_string(p),
        degree: p.len() - 1,
    }
}

fn rational_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rat::new(n, d))
}

/// The field generated by a root of the monic quadratic `p`, with that root.
fn quadratic_field(p: &UPoly) -> (QuadraticField, QuadElem) {
    let (b, c) = (&p[1], &p[0]);
    let disc = b * b - Rat::from_integer(4.into()) * c;
    let half = Rat::new(1.into(), 2.into());
    (
        QuadraticField { d: disc },
        QuadElem {
            a: -b * &half,
            b: half,
        },
    )
}

/// Fields where eigenvalues can be located: the roots found, and the
/// irreducible rational factors of the characteristic polynomial without a
/// root here.
pub trait Eigen: Field {
    fn eigenvalues(&self, m: &Matrix<Self::Elem>) -> (Vec<Self::Elem>, Vec<UPoly>);
}

fn has_kernel<F: Field>(k: &F, m: &Matrix<F::Elem>, lambda: &F::Elem) -> bool {
    let n = m.len();
    let shifted: Matrix<F::Elem> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        k.sub(&m[i][j], lambda)
                    } else {
                        m[i][j].clone()
                    }
                })
                .collect()
        })
        .collect();
    !linalg::nullspace(k, &shifted, n).is_empty()
}

impl Eigen for Q {
    fn eigenvalues(&self, m: &Matrix<Rat>) -> (Vec<Rat>, Vec<UPoly>) {
        if m.is_empty() {
            return (vec![], vec![]);
        }
        let (_, fs) = univariate::factor(&linalg::char_poly(m));
        let mut roots = Vec::new();
        let mut obstructions = Vec::new();
        for (g, _) in fs {
            if g.len() == 2 {
                roots.push(-g[0].clone() / &g[1]);
            } else {
                obstructions.push(g);
            }
        }
        roots.sort_by(|a, b| b.cmp(a));
        (roots, obstructions)
    }
}

impl Eigen for QuadraticField {
    fn eigenvalues(&self, m: &Matrix<QuadElem>) -> (Vec<QuadElem>, Vec<UPoly>) {
        let n = m.len();
        if n == 0 {
            return (vec![], vec![]);
        }
        // realification: (A + B sqrt d) acting on Q^n + sqrt(d) Q^n
        let mut real = vec![vec![Rat::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                real[i][j] = m[i][j].a.clone();
                real[i][n + j] = &m[i][j].b * &self.d;
                real[n + i][j] = m[i][j].b.clone();
                real[n + i][n + j] = m[i][j].a.clone();
            }
        }
        let (_, fs) = univariate::factor(&linalg::char_poly(&real));
        let mut roots: Vec<QuadElem> = Vec::new();
        let mut obstructions = Vec::new();
        for (g, _) in fs {
            let mut cands = Vec::new();
            if g.len() == 2 {
                cands.push(QuadElem::rational(-g[0].clone() / &g[1]));
            } else if g.len() == 3 {
                let (field, root) = quadratic_field(&g);
                if let Some(s) = rational_sqrt(&(&field.d / &self.d)) {
                    let half_b = &root.b * &s;
                    cands.push(QuadElem {
                        a: root.a.clone(),
                        b: half_b.clone(),
                    });
                    cands.push(QuadElem {
                        a: root.a,
                        b: -half_b,
                    });
                }
            }
            let found: Vec<QuadElem> = cands
                .into_iter()
                .filter(|l| has_kernel(self, m, l))
                .collect();
            if found.is_empty() {
                obstructions.push(g);
            }
            for l in found {
                if !roots.contains(&l) {
                    roots.push(l);
                }
            }
        }
        (roots, obstructions)
    }
}

fn is_nilpotent<F: Field>(k: &F, m: &Matrix<F::Elem>) -> bool {
    let n = m.len();
    let mut p = m.clone();
    for _ in 1..n {
        if linalg::is_zero_matrix(k, &p) {
            return true;
        }
        p = linalg::mat_mul(k, &p, m);
    }
    linalg::is_zero_matrix(k, &p)
}

fn to_field<F: Field>(k: &F, v: &[Rat]) -> Vec<F::Elem> {
    v.iter().map(|x| k.from_rat(x)).collect()
}

/// Completes a nilpotent `e` to an sl2-triple by two linear solves.
fn jacobson_morozov<F: Field>(
    k: &F,
    l: &LieAlgebra,
    e: &[F::Elem],
) -> Option<Sl2Triple<Vec<F::Elem>>> {
    let n = l.dim();
    if e.iter().all(|x| k.is_zero(x)) {
        return None;
    }
    let ad_e = l.ad_in(k, e);
    let ad_e2 = linalg::mat_mul(k, &ad_e, &ad_e);
    let two = k.from_rat(&Rat::from_integer(2.into()));
    let rhs: Vec<F::Elem> = e.iter().map(|x| k.neg(&k.mul(&two, x))).collect();
    let z = linalg::solve(k, &ad_e2, &rhs)?;
    let h = linalg::mat_vec(k, &ad_e, &z);
    let ad_h = l.ad_in(k, &h);
    let mut rows = ad_e.clone();
    for (i, row) in ad_h.iter().enumerate() {
        let mut r = row.clone();
        r[i] = k.add(&r[i], &two);
        rows.push(r);
    }
    let rhs: Vec<F::Elem> = h.iter().cloned().chain((0..n).map(|_| k.zero())).collect();
    let f = linalg::solve(k, &rows, &rhs)?;
    let t = Sl2Triple {
        h,
        e: e.to_vec(),
        f,
    };
    check_sl2(k, l, &t).then_some(t)
}

/// The three defining relations, checked exactly.
pub fn check_sl2<F: Field>(k: &F, l: &LieAlgebra, t: &Sl2Triple<Vec<F::Elem>>) -> bool {
    let two = k.from_rat(&Rat::from_integer(2.into()));
    let scaled =
        |v: &[F::Elem], c: &F::Elem| -> Vec<F::Elem> { v.iter().map(|x| k.mul(x, c)).collect() };
    l.bracket_in(k, &t.h, &t.e) == scaled(&t.e, &two)
        && l.bracket_in(k, &t.h, &t.f) == scaled(&t.f, &k.neg(&two))
        && l.bracket_in(k, &t.e, &t.f) == t.h
        && !t.h.iter().all(|x| k.is_zero(x))
}

/// Candidate elements: basis vectors, pairwise sums and differences.
fn small_candidates(n: usize) -> Vec<Coords> {
    let mut out: Vec<Coords> = (0..n).map(|i| unit(n, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let mut v = unit(n, i);
                v[j] = Rat::from_integer(s.into());
                out.push(v);
            }
        }
    }
    out
}

/// Integer vectors with entries in `-bound..=bound`, at most `budget` of them,
/// in order of increasing maximum norm.
fn integer_candidates(n: usize, bound: i64, budget: usize) -> Vec<Coords> {
    let mut out = Vec::new();
    for norm in 1..=bound {
        let mut v = vec![-norm; n];
        loop {
            if v.iter().any(|x| x.abs() == norm) {
                out.push(v.iter().map(|&x| Rat::from_integer(x.into())).collect());
                if out.len() >= budget {
                    return out;
                }
            }
            let mut i = 0;
            while i < n {
                v[i] += 1;
                if v[i] <= norm {
                    break;
                }
                v[i] = -norm;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

fn search_sl2<F: Eigen>(k: &F, l: &LieAlgebra) -> (Option<Sl2Triple<Vec<F::Elem>>>, Vec<UPoly>) {
    let n = l.dim();
    let mut obstructions: Vec<UPoly> = Vec::new();
    for x in small_candidates(n) {
        let xf = to_field(k, &x);
        let ad = l.ad_in(k, &xf);
        if is_nilpotent(k, &ad) {
            if let Some(t) = jacobson_morozov(k, l, &xf) {
                return (Some(t), obstructions);
            }
            continue;
        }
        let (roots, obs) = k.eigenvalues(&ad);
        for g in obs {
            if !obstructions.contains(&g) {
                obstructions.push(g);
            }
        }
        for lambda in roots.iter().filter(|r| !k.is_zero(r)) {
            let shifted: Matrix<F::Elem> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                k.sub(&ad[i][j], lambda)
                            } else {
                                ad[i][j].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            for e in linalg::nullspace(k, &shifted, n) {
                if let Some(t) = jacobson_morozov(k, l, &e) {
                    return (Some(t), obstructions);
                }
            }
        }
    }
    for x in integer_candidates(n, 2, 4000) {
        let xf = to_field(k, &x);
        if is_nilpotent(k, &l.ad_in(k, &xf)) {
            if let Some(t) = jacobson_morozov(k, l, &xf) {
                return (Some(t), obstructions);
            }
        }
    }
    (None, obstructions)
}

fn lift<F: Field>(k: &F, basis: &[Coords], n: usize, v: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![k.zero(); n];
    for (c, b) in v.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o = k.add(o, &k.mul(c, &k.from_rat(x)));
        }
    }
    out
}

fn lift_triple<F: Field>(
    k: &F,
    basis: &[Coords],
    n: usize,
    t: Sl2Triple<Vec<F::Elem>>,
) -> Sl2Triple<Vec<F::Elem>> {
    Sl2Triple {
        h: lift(k, basis, n, &t.h),
        e: lift(k, basis, n, &t.e),
        f: lift(k, basis, n, &t.f),
    }
}

/// An sl2-triple inside a non-solvable algebra, searched in its Levi part;
/// `None` for solvable input.
pub fn find_sl2_triple(
    l: &LieAlgebra,
    allow_extension: bool,
) -> Result<Option<Sl2Search<Coords, Vec<QuadElem>>>> {
    if is_solvable(l) {
        return Ok(None);
    }
    let n = l.dim();
    let levi = levi_subalgebra(l)?;
    let s = l.subalgebra(&levi)?;
    let (found, obstructions) = search_sl2(&Q, &s);
    if let Some(t) = found {
        return Ok(Some(Sl2Search::Rational(lift_triple(&Q, &levi, n, t))));
    }
    let Some(q) = obstructions.iter().find(|g| g.len() == 3).cloned() else {
        return Err(match obstructions.first() {
            Some(g) => extension_error(g),
            None => Error::Internal("no sl2-triple found in a non-solvable algebra".into()),
        });
    };
    if !allow_extension {
        return Err(extension_error(&q));
    }
    let (field, _) = quadratic_field(&q);
    match search_sl2(&field, &s).0 {
        Some(t) => Ok(Some(Sl2Search::Quadratic {
            minimal_polynomial: q,
            triple: lift_triple(&field, &levi, n, t),
            field,
        })),
        None => Err(extension_error(&q)),
    }
}

fn matrix_of_in<F: Field>(
    k: &F,
    mats: &[Matrix<Rat>],
    dim: usize,
    x: &[F::Elem],
) -> Matrix<F::Elem> {
    let mut out = linalg::zeros(k, dim, dim);
    for (c, m) in x.iter().zip(mats) {
        if k.is_zero(c) {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                out[i][j] = k.add(&out[i][j], &k.mul(c, &k.from_rat(&m[i][j])));
            }
        }
    }
    out
}

/// An sl2-triple of matrices inside the span of a representation's image.
pub fn find_sl2_triple_in_rep(
    r: &LinearRep,
    allow_extension: bool,
) -> Result<Option<Sl2Search<Matrix<Rat>, Matrix<QuadElem>>>> {
    let (alg, mats) = r.image()?;
    let d = r.dim();
    Ok(
        find_sl2_triple(&alg, allow_extension)?.map(|found| match found {
            Sl2Search::Rational(t) => Sl2Search::Rational(Sl2Triple {
                h: matrix_of_in(&Q, &mats, d, &t.h),
                e: matrix_of_in(&Q, &mats, d, &t.e),
                f: matrix_of_in(&Q, &mats, d, &t.f),
            }),
            Sl2Search::Quadratic {
                minimal_polynomial,
                field,
                triple,
            } => Sl2Search::Quadratic {
                triple: Sl2Triple {
                    h: matrix_of_in(&field, &mats, d, &triple.h),
                    e: matrix_of_in(&field, &mats, d, &triple.e),
                    f: matrix_of_in(&field, &mats, d, &triple.f),
                },
                minimal_polynomial,
                field,
            },
        }),
    )
}

/// A vector fixed up to scalars by every matrix, with the scalars.
#[derive(Clone, Debug, PartialEq)]
pub enum CommonEigenvector {
    Rational {
        vector: Vec<Rat>,
        eigenvalues: Vec<Rat>,
    },
    Quadratic {
        minimal_polynomial: UPoly,
        field: QuadraticField,
        vector: Vec<QuadElem>,
        eigenvalues: Vec<QuadElem>,
    },
}

impl CommonEigenvector {
    pub fn rational(&self) -> Option<(&[Rat], &[Rat])> {
        match self {
            CommonEigenvector::Rational {
                vector,
                eigenvalues,
            } => Some((vector, eigenvalues)),
            CommonEigenvector::Quadratic { .. } => None,
        }
    }
}

/// Matrix of `a` on the invariant subspace with basis rows `u`.
fn restrict<F: Field>(k: &F, a: &Matrix<F::Elem>, u: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
    let cols: Vec<Vec<F::Elem>> = u
        .iter()
        .map(|b| linalg::coordinates(k, u, &linalg::mat_vec(k, a, b)).expect("invariant subspace"))
        .collect();
    if cols.is_empty() {
        return vec![];
    }
    linalg::transpose(&cols)
}

fn expand<F: Field>(k: &F, coords: &[F::Elem], u: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let n = u.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![k.zero(); n];
    for (c, b) in coords.iter().zip(u) {
        for (o, x) in out.iter_mut().zip(b) {
            *o = k.add(o, &k.mul(c, x));
        }
    }
    out
}

/// Prefer vectors supported on early coordinates: last nonzero index, then
/// first nonzero index.
fn support_key<F: Field>(k: &F, v: &[F::Elem]) -> (usize, usize) {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !k.is_zero(&v[i])).collect();
    (*nz.last().unwrap_or(&0), *nz.first().unwrap_or(&0))
}

fn simplest<F: Field>(k: &F, vs: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let basis = linalg::span_basis(k, vs);
    basis
        .into_iter()
        .min_by_key(|v| support_key(k, v))
        .expect("nonzero subspace")
}

fn shifted<F: Field>(k: &F, a: &Matrix<F::Elem>, lambda: &F::Elem) -> Matrix<F::Elem> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        k.sub(&a[i][j], lambda)
                    } else {
                        a[i][j].clone()
                    }
                })
                .collect()
        })
        .collect()
}

fn eigenvalue_of<F: Field>(k: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> F::Elem {
    let av = linalg::mat_vec(k, a, v);
    let p = (0..v.len()).find(|&i| !k.is_zero(&v[i])).unwrap();
    k.mul(&av[p], &k.inv(&v[p]))
}

/// Common eigenvector of commuting matrices on the ambient span `u`, by
/// successive restriction to eigenspaces. Returns `u`-coordinates.
fn commuting_eigen<F: Eigen>(
    k: &F,
    family: &[Matrix<F::Elem>],
    u: &[Vec<F::Elem>],
) -> std::result::Result<Vec<Vec<F::Elem>>, UPoly> {
    let m = u.len();
    let mut s: Vec<Vec<F::Elem>> = linalg::identity(k, m);
    for a in family {
        let ra = restrict(k, a, &s);
        let (roots, obs) = k.eigenvalues(&ra);
        if roots.is_empty() {
            return Err(obs
                .into_iter()
                .next()
                .expect("characteristic polynomial has a factor"));
        }
        let mut best: Option<((usize, usize), Vec<Vec<F::Elem>>)> = None;
        for lambda in &roots {
            let space: Vec<Vec<F::Elem>> = linalg::nullspace(k, &shifted(k, &ra, lambda), s.len())
                .iter()
                .map(|c| expand(k, c, &s))
                .collect();
            if space.is_empty() {
                continue;
            }
            let ambient: Vec<Vec<F::Elem>> = space.iter().map(|c| expand(k, c, u)).collect();
            let key = ambient.iter().map(|v| support_key(k, v)).min().unwrap();
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, space));
            }
        }
        s = best.expect("eigenvalue with eigenvector").1;
    }
    Ok(s)
}

fn matrix_span<F: Field>(k: &F, mats: &[Matrix<F::Elem>], dim: usize) -> Vec<Matrix<F::Elem>> {
    let flat: Vec<Vec<F::Elem>> = mats.iter().map(flatten).collect();
    linalg::span_basis(k, &flat)
        .iter()
        .map(|v| unflatten(v, dim))
        .collect()
}

/// Last nonzero term of the derived series of a matrix Lie algebra, and
/// whether the algebra itself is abelian.
fn last_derived<F: Field>(
    k: &F,
    span: &[Matrix<F::Elem>],
    dim: usize,
) -> (Vec<Matrix<F::Elem>>, bool) {
    let mut cur = span.to_vec();
    let mut steps = 0;
    loop {
        let mut brs = Vec::new();
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                brs.push(linalg::commutator(k, &cur[i], &cur[j]));
            }
        }
        let next = matrix_span(k, &brs, dim);
        if next.is_empty() || next.len() == cur.len() {
            return (cur, steps == 0);
        }
        cur = next;
        steps += 1;
    }
}

fn common_eigen_in<F: Eigen>(
    k: &F,
    mats: &[Matrix<F::Elem>],
    n: usize,
) -> std::result::Result<Vec<F::Elem>, UPoly> {
    let mut u: Vec<Vec<F::Elem>> = linalg::identity(k, n);
    loop {
        let m = u.len();
        let rs: Vec<Matrix<F::Elem>> = mats.iter().map(|a| restrict(k, a, &u)).collect();
        let span = matrix_span(k, &rs, m);
        if span.is_empty() {
            return Ok(simplest(k, &u));
        }
        let (ideal, abelian) = last_derived(k, &span, m);
        let s = commuting_eigen(k, &ideal, &u)?;
        if abelian {
            let ambient: Vec<Vec<F::Elem>> = s.iter().map(|c| expand(k, c, &u)).collect();
            return Ok(simplest(k, &ambient));
        }
        // weight space of the abelian ideal: invariant under everything
        let v = &s[0];
        let mut eqs: Matrix<F::Elem> = Vec::new();
        for a in &ideal {
            let lambda = eigenvalue_of(k, a, v);
            eqs.extend(shifted(k, a, &lambda));
        }
        let w: Vec<Vec<F::Elem>> = linalg::nullspace(k, &eqs, m)
            .iter()
            .map(|c| expand(k, c, &u))
            .collect();
        assert!(
            w.len() < m,
            "weight space of a non-central abelian ideal is proper"
        );
        u = w;
    }
}

/// Constructive Lie's theorem for a solvable representation.
pub fn common_eigenvector(r: &LinearRep, allow_extension: bool) -> Result<CommonEigenvector> {
    if !r.is_solvable()? {
        return Err(Error::Precondition(
            "common eigenvector requested for a non-solvable representation".into(),
        ));
    }
    let n = r.dim();
    if n == 0 {
        return Err(Error::Precondition(
            "representation on the zero space".into(),
        ));
    }
    match common_eigen_in(&Q, r.matrices(), n) {
        Ok(v) => {
            let eigenvalues = r
                .matrices()
                .iter()
                .map(|a| eigenvalue_of(&Q, a, &v))
                .collect();
            Ok(CommonEigenvector::Rational {
                vector: v,
                eigenvalues,
            })
        }
        Err(q) if q.len() == 3 && allow_extension => {
            let (field, _) = quadratic_field(&q);
            let mats: Vec<Matrix<QuadElem>> = r.matrices().iter().map(linalg::to_quad).collect();
            let v = common_eigen_in(&field, &mats, n).map_err(|g| extension_error(&g))?;
            let eigenvalues = mats.iter().map(|a| eigenvalue_of(&field, a, &v)).collect();
            Ok(CommonEigenvector::Quadratic {
                minimal_polynomial: q,
                field,
                vector: v,
                eigenvalues,
            })
        }
        Err(q) => Err(extension_error(&q)),
    }
}
