//! Weight detection, Euler derivations and the induced gradings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::logder::Derivation;
use crate::poly::{Degree, Poly, Rat};

/// Positive weights `w_1..w_n` and a positive degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<Rat>,
    degree: Rat,
}

impl WeightSystem {
    pub fn new(weights: Vec<Rat>, degree: Rat) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no variables".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        if !degree.is_positive() {
            return Err(Error::InvalidWeights(format!(
                "degree {degree} is not positive"
            )));
        }
        Ok(WeightSystem { weights, degree })
    }

    /// Weights for a polynomial; the degree is read off `f`.
    pub fn for_poly(weights: Vec<Rat>, f: &Poly) -> Result<Self> {
        if weights.len() != f.nvars() {
            return Err(Error::DimensionMismatch {
                expected: f.nvars(),
                found: weights.len(),
            });
        }
        match f.homogeneous_degree(&weights) {
            Some(Degree::Finite(d)) => WeightSystem::new(weights, d),
            Some(Degree::MinusInfinity) => Err(Error::Degenerate),
            None => Err(Error::NotHomogeneous),
        }
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn degree(&self) -> &Rat {
        &self.degree
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn min_weight(&self) -> &Rat {
        self.weights.iter().min().unwrap()
    }

    /// Indices of the variables of minimal weight.
    pub fn lowest_weight_vars(&self) -> Vec<usize> {
        let m = self.min_weight();
        (0..self.nvars())
            .filter(|&i| self.weights[i] == *m)
            .collect()
    }

    /// Permutation sorting the variables by increasing weight (stable).
    pub fn sorting_permutation(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.nvars()).collect();
        idx.sort_by(|&a, &b| self.weights[a].cmp(&self.weights[b]));
        idx
    }

    /// Same weights restricted to the listed variables, with a new degree.
    pub fn restrict(&self, keep: &[usize], degree: Rat) -> Result<Self> {
        WeightSystem::new(
            keep.iter().map(|&i| self.weights[i].clone()).collect(),
            degree,
        )
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "w=({}), d={}", ws.join(", "), self.degree)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightSystemJson {
    weights: Vec<String>,
    degree: String,
}

fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| format!("bad rational '{s}': {e}"))
}

impl Serialize for WeightSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightSystemJson {
            weights: self.weights.iter().map(|w| w.to_string()).collect(),
            degree: self.degree.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = WeightSystemJson::deserialize(d)?;
        let weights = raw
            .weights
            .iter()
            .map(|s| parse_rat(s))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        let degree = parse_rat(&raw.degree).map_err(serde::de::Error::custom)?;
        WeightSystem::new(weights, degree).map_err(serde::de::Error::custom)
    }
}

/// Set partitions of `0..n` as restricted growth strings, fewest blocks first.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            rec(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0];
    rec(1, n, &mut cur, 0, &mut out);
    out.sort_by_key(|p| p.iter().max().copied().unwrap_or(0));
    out
}

/// Extreme rays of the pointed cone `{u >= 0 : A u = 0}`.
fn extreme_rays(a: &[Vec<Rat>], k: usize) -> Vec<Vec<Rat>> {
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    for mask in 0u32..(1 << k) {
        let mut rows = a.to_vec();
        for z in 0..k {
            if mask & (1 << z) != 0 {
                let mut e = vec![Rat::zero(); k];
                e[z] = Rat::one();
                rows.push(e);
            }
        }
        let ns = linalg::nullspace(&Q, &rows, k);
        if ns.len() != 1 {
            continue;
        }
        let mut r = ns[0].clone();
        if r.iter().all(|c| !c.is_positive()) {
            r.iter_mut().for_each(|c| *c = -c.clone());
        }
        if r.iter().any(|c| c.is_negative()) {
            continue;
        }
        let r = primitive_integer(&r);
        if !rays.contains(&r) {
            rays.push(r);
        }
    }
    rays
}

/// Scales a nonzero vector to coprime integers with its sign kept.
fn primitive_integer(v: &[Rat]) -> Vec<Rat> {
    let mut den = BigInt::one();
    for c in v {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    ints.into_iter()
        .map(|c| Rat::from_integer(c / &g))
        .collect()
}

/// Positive weights making `f` weighted homogeneous, preferring the fewest
/// distinct weights. Within the best variable partition the solution cone's
/// extreme rays are summed (a single ray when the solution is unique).
pub fn find_weight_system(f: &Poly) -> Option<WeightSystem> {
    let n = f.nvars();
    let exps: Vec<Vec<Rat>> = f
        .terms()
        .map(|(m, _)| {
            m.exponents()
                .iter()
                .map(|&e| Rat::from_integer(e.into()))
                .collect()
        })
        .collect();
    let first = exps.first()?;
    if first.iter().all(|e| e.is_zero()) {
        return None;
    }
    let diffs: Vec<Vec<Rat>> = exps[1..]
        .iter()
        .map(|e| e.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let mut best: Option<(usize, Vec<Rat>)> = None;
    for part in set_partitions(n) {
        let k = part.iter().max().unwrap() + 1;
        if let Some((bk, _)) = &best {
            if k > *bk {
                break;
            }
        }
        let a: Vec<Vec<Rat>> = diffs
            .iter()
            .map(|d| {
                let mut row = vec![Rat::zero(); k];
                for (i, c) in d.iter().enumerate() {
                    row[part[i]] += c;
                }
                row
            })
            .collect();
        let rays = extreme_rays(&a, k);
        if rays.is_empty() {
            continue;
        }
        let sum: Vec<Rat> = (0..k)
            .map(|c| rays.iter().map(|r| r[c].clone()).sum())
            .collect();
        if sum.iter().any(|c| !c.is_positive()) {
            continue;
        }
        let w = primitive_integer(&(0..n).map(|i| sum[part[i]].clone()).collect::<Vec<_>>());
        match &best {
            Some((_, bw)) if *bw <= w => {}
            _ => best = Some((k, w)),
        }
    }
    let (_, w) = best?;
    let d: Rat = first.iter().zip(&w).map(|(a, b)| a * b).sum();
    WeightSystem::new(w, d).ok()
}

/// The Euler derivation `sum w_i x_i d/dx_i` with its weights.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerDerivation {
    pub derivation: Derivation,
    pub weights: WeightSystem,
}

pub fn euler_derivation(w: &WeightSystem) -> EulerDerivation {
    let n = w.nvars();
    let coeffs = (0..n)
        .map(|i| Poly::var(i, n).scale(&w.weights[i]))
        .collect();
    EulerDerivation {
        derivation: Derivation::new(coeffs),
        weights: w.clone(),
    }
}

/// Grading verdict for a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChiDegree {
    MinusInfinity,
    Finite(Rat),
    Inhomogeneous,
}

pub fn chi_degree(p: &Poly, chi: &EulerDerivation) -> Result<ChiDegree> {
    if p.nvars() != chi.weights.nvars() {
        return Err(Error::DimensionMismatch {
            expected: chi.weights.nvars(),
            found: p.nvars(),
        });
    }
    Ok(match p.homogeneous_degree(chi.weights.weights()) {
        Some(Degree::MinusInfinity) => ChiDegree::MinusInfinity,
        Some(Degree::Finite(d)) => ChiDegree::Finite(d),
        None => ChiDegree::Inhomogeneous,
    })
}

/// Groups a spanning set of homogeneous polynomials by degree and extracts a
/// basis of each piece, ascending by degree.
pub fn graded_pieces(space: &[Poly], weights: &[Rat]) -> Result<Vec<(Rat, Vec<Poly>)>> {
    let mut groups: BTreeMap<Rat, Vec<Poly>> = BTreeMap::new();
    for p in space {
        match p.homogeneous_degree(weights) {
            Some(Degree::Finite(d)) => groups.entry(d).or_default().push(p.clone()),
            Some(Degree::MinusInfinity) => {}
            None => return Err(Error::NotHomogeneous),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(d, ps)| (d, independent_subset(&ps)))
        .collect())
}

/// A maximal linearly independent subfamily, keeping the earliest members.
fn independent_subset(ps: &[Poly]) -> Vec<Poly> {
    let mut monos: Vec<crate::poly::Monomial> = ps
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    let mut kept: Vec<Poly> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for p in ps {
        let v: Vec<Rat> = monos.iter().map(|m| p.coeff(m)).collect();
        let mut trial = rows.clone();
        trial.push(v.clone());
        if linalg::rank(&Q, &trial) > rows.len() {
            rows.push(v);
            kept.push(p.clone());
        }
    }
    kept
}

/// The lowest-weight variable space: variables of minimal weight.
pub fn lowest_weight_space(w: &WeightSystem) -> Vec<Poly> {
    let n = w.nvars();
    w.lowest_weight_vars()
        .into_iter()
        .map(|i| Poly::var(i, n))
        .collect()
}
