//! Exact multivariate polynomials over the rationals.
//!
//! A [`Poly`] is a sparse map from exponent vectors to nonzero rational
//! coefficients. Storage order is lexicographic on exponents; the weighted
//! term order used by Gröbner computations lives in [`crate::groebner`].

mod coords;
mod parse;

pub use coords::{substitute, CoordinateMap};
pub use parse::{parse_poly, PolyDisplay};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Weighted degree with an explicit sentinel for the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(Rat),
}

impl Degree {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(r) => Some(r),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn weighted_degree(&self, weights: &[Rat]) -> Rat {
        self.0
            .iter()
            .zip(weights)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, w)| w * rat(e as i64))
            .fold(Rat::zero(), |a, b| a + b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

/// Sparse polynomial in a fixed number of variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(rat(1), nvars)
    }

    pub fn constant(c: Rat, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        Self::monomial(Monomial::var(i, nvars), rat(1))
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, merging duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rat)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Lexicographically largest term.
    pub fn lex_leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    /// Variables that occur with positive exponent somewhere.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_nvars(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different rings");
    }

    /// Largest weighted degree over all terms; minus infinity for zero.
    pub fn weighted_degree(&self, weights: &[Rat]) -> Result<Degree> {
        if weights.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: weights.len(),
            });
        }
        Ok(self
            .terms
            .keys()
            .map(|m| m.weighted_degree(weights))
            .max()
            .map(Degree::Finite)
            .unwrap_or(Degree::MinusInfinity))
    }

    /// Common weighted degree when all terms agree; `None` for inhomogeneous input.
    /// Zero yields `Some(MinusInfinity)`.
    pub fn homogeneous_degree(&self, weights: &[Rat]) -> Option<Degree> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(weights));
        let Some(first) = it.next() else {
            return Some(Degree::MinusInfinity);
        };
        if it.all(|d| d == first) {
            Some(Degree::Finite(first))
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self, weights: &[Rat]) -> bool {
        self.homogeneous_degree(weights).is_some()
    }

    /// Splits into weighted homogeneous components, ordered by increasing degree.
    pub fn homogeneous_parts(&self, weights: &[Rat]) -> Vec<(Rat, Poly)> {
        let mut parts: BTreeMap<Rat, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.weighted_degree(weights))
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(m.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    /// Terms of total degree exactly `k`.
    pub fn total_degree_part(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i).unwrap()).collect()
    }

    /// Sets variable `i` to the constant `value`, keeping the ring.
    pub fn eval_var(&self, i: usize, value: &Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            let mut v = c.clone();
            if e > 0 {
                v *= num_traits::pow(value.clone(), e as usize);
            }
            out.add_term(m2, v);
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, x) in m.0.iter().zip(point) {
                if *e > 0 {
                    t *= num_traits::pow(x.clone(), *e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces every variable by the given polynomial (all over a common target ring).
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|p| vec![Poly::one(p.nvars), p.clone()])
            .collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone(), target);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds into a ring with a different variable set; `map[i]` is the
    /// target index of source variable `i`.
    pub fn rename(&self, map: &[usize], target_nvars: usize) -> Poly {
        let mut out = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; target_nvars];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Drops variables not listed in `keep`; panics if a dropped variable occurs.
    pub fn restrict_vars(&self, keep: &[usize]) -> Poly {
        let mut out = Poly::zero(keep.len());
        for (m, c) in &self.terms {
            for i in 0..self.nvars {
                if !keep.contains(&i) {
                    assert_eq!(m.0[i], 0, "dropped variable occurs");
                }
            }
            let e: Vec<u32> = keep.iter().map(|&i| m.0[i]).collect();
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact quotient `self / q`, or `None` when `q` does not divide `self`.
    pub fn exact_div(&self, q: &Poly) -> Result<Option<Poly>> {
        self.check_nvars(q);
        let Some((lm_q, lc_q)) = q.lex_leading() else {
            return Err(Error::DivisionByZero);
        };
        let (lm_q, lc_q) = (lm_q.clone(), lc_q.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((lm, lc)) = rem.lex_leading() {
            let Some(m) = lm.div(&lm_q) else {
                return Ok(None);
            };
            let c = lc / &lc_q;
            rem = &rem - &q.mul_monomial(&m, &c);
            quot.add_term(m, c);
        }
        Ok(Some(quot))
    }

    /// Content: gcd of numerators over lcm of denominators, sign chosen so the
    /// lexicographically leading coefficient of the primitive part is positive.
    pub fn content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rat::zero();
        }
        let mut content = Rat::new(num, den);
        if let Some((_, lc)) = self.lex_leading() {
            if lc.is_negative() {
                content = -content;
            }
        }
        content
    }

    /// Integer primitive part with positive lexicographic leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.scale(&(Rat::one() / c))
    }

    pub fn monic_lex(&self) -> Poly {
        match self.lex_leading() {
            None => self.clone(),
            Some((_, lc)) => self.scale(&(Rat::one() / lc)),
        }
    }

    /// Linear part (terms of total degree one).
    pub fn linear_part(&self) -> Poly {
        self.total_degree_part(1)
    }

    /// Coefficient of `x_i` in the linear part.
    pub fn linear_coeff(&self, i: usize) -> Rat {
        self.coeff(&Monomial::var(i, self.nvars))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_nvars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_nvars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_nvars(rhs);
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Default variable names: `x, y, z, w` for up to four variables, else `x1..xn`.
pub fn default_var_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Determinant by cofactor expansion with memoization on column subsets.
pub fn determinant(matrix: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = matrix.len();
    if n == 0 {
        return Poly::one(nvars);
    }
    let mut memo = std::collections::HashMap::new();
    det_rec(matrix, 0, (1u64 << n) - 1, &mut memo, nvars)
}

fn det_rec(
    m: &[Vec<Poly>],
    row: usize,
    cols: u64,
    memo: &mut std::collections::HashMap<(usize, u64), Poly>,
    nvars: usize,
) -> Poly {
    if cols == 0 {
        return Poly::one(nvars);
    }
    if let Some(p) = memo.get(&(row, cols)) {
        return p.clone();
    }
    let mut acc = Poly::zero(nvars);
    let mut sign = 1i64;
    for j in 0..m.len() {
        if cols & (1 << j) == 0 {
            continue;
        }
        if !m[row][j].is_zero() {
            let sub = det_rec(m, row + 1, cols & !(1 << j), memo, nvars);
            let t = &m[row][j] * &sub;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
        }
        sign = -sign;
    }
    memo.insert((row, cols), acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        parse_poly(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn weighted_degree_examples() {
        let w = [rat(2), rat(3)];
        assert_eq!(
            p("y^2 - x^3").weighted_degree(&w).unwrap(),
            Degree::Finite(rat(6))
        );
        assert_eq!(
            Poly::zero(2).weighted_degree(&w).unwrap(),
            Degree::MinusInfinity
        );
        assert_eq!(
            p("x*y").weighted_degree(&[rat(1), rat(1)]).unwrap(),
            Degree::Finite(rat(2))
        );
        assert!(matches!(
            p("x").weighted_degree(&[rat(1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn minus_infinity_below_everything() {
        assert!(Degree::MinusInfinity < Degree::Finite(rat(-1000)));
    }

    #[test]
    fn partial_derivative_examples() {
        let f = p("y^2 - x^3");
        assert_eq!(f.partial(0).unwrap(), p("-3x^2"));
        assert_eq!(f.partial(1).unwrap(), p("2y"));
        assert_eq!(p("x*y").partial(0).unwrap(), p("y"));
        assert!(matches!(f.partial(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn exact_division_examples() {
        assert_eq!(p("x*y").exact_div(&p("x")).unwrap(), Some(p("y")));
        assert_eq!(p("y^2 - x^3").exact_div(&p("x")).unwrap(), None);
        assert_eq!(
            p("-6y^2 + 6x^3").exact_div(&p("y^2 - x^3")).unwrap(),
            Some(p("-6"))
        );
        assert_eq!(p("x").exact_div(&Poly::zero(2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn determinant_of_cusp_matrix() {
        let m = vec![vec![p("2x"), p("3y")], vec![p("2y"), p("3x^2")]];
        assert_eq!(determinant(&m, 2), p("6x^3 - 6y^2"));
    }

    #[test]
    fn primitive_part_sign_and_scale() {
        assert_eq!(p("-4x + 6y").primitive(), p("2x - 3y"));
        assert_eq!(p("1/2 x + 1/3 y").primitive(), p("3x + 2y"));
    }

    #[test]
    fn homogeneous_parts_split() {
        let parts = p("x + y^2 + x*y").homogeneous_parts(&[rat(1), rat(1)]);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, p("x"));
        assert_eq!(parts[1].1, p("y^2 + x*y"));
    }
}
