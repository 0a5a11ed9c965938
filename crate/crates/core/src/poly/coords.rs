use num_traits::Zero;

use super::{Degree, Poly, Rat};
use crate::error::{Error, Result};
use crate::linalg::{self, Q};

/// Polynomial substitution `x_i -> images[i]`, with all images over a common
/// target ring.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateMap {
    images: Vec<Poly>,
    target_nvars: usize,
}

impl CoordinateMap {
    pub fn identity(n: usize) -> Self {
        CoordinateMap {
            images: (0..n).map(|i| Poly::var(i, n)).collect(),
            target_nvars: n,
        }
    }

    /// No validation; used for variable-dropping maps and internal chains.
    pub fn new_unchecked(images: Vec<Poly>, target_nvars: usize) -> Self {
        assert!(images.iter().all(|p| p.nvars() == target_nvars));
        CoordinateMap {
            images,
            target_nvars,
        }
    }

    /// A square map whose image of `x_i` is weighted homogeneous of degree
    /// `w_i` and whose linear part is invertible.
    pub fn new(images: Vec<Poly>, weights: &[Rat]) -> Result<Self> {
        let n = weights.len();
        if images.len() != n {
            return Err(Error::InvalidCoordinateMap(format!(
                "{} images for {} variables",
                images.len(),
                n
            )));
        }
        for (i, p) in images.iter().enumerate() {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.nvars(),
                });
            }
            if p.homogeneous_degree(weights) != Some(Degree::Finite(weights[i].clone())) {
                return Err(Error::InvalidCoordinateMap(format!(
                    "image of variable {i} is not homogeneous of degree {}",
                    weights[i]
                )));
            }
        }
        let map = CoordinateMap {
            images,
            target_nvars: n,
        };
        if linalg::inverse(&Q, &map.linear_matrix()).is_none() {
            return Err(Error::InvalidCoordinateMap(
                "linear part is not invertible".into(),
            ));
        }
        Ok(map)
    }

    /// Linear substitution `x_i -> sum_j m[i][j] y_j`.
    pub fn linear(m: &[Vec<Rat>]) -> Self {
        let n = m.first().map(|r| r.len()).unwrap_or(0);
        let images = m
            .iter()
            .map(|row| {
                let mut p = Poly::zero(n);
                for (j, c) in row.iter().enumerate() {
                    p.add_term(super::Monomial::var(j, n), c.clone());
                }
                p
            })
            .collect();
        CoordinateMap::new_unchecked(images, n)
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn source_nvars(&self) -> usize {
        self.images.len()
    }

    pub fn target_nvars(&self) -> usize {
        self.target_nvars
    }

    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        if p.nvars() != self.images.len() {
            return Err(Error::DimensionMismatch {
                expected: self.images.len(),
                found: p.nvars(),
            });
        }
        if self.images.is_empty() {
            return Ok(Poly::constant(p.constant_term(), self.target_nvars));
        }
        Ok(p.compose(&self.images))
    }

    /// Substitution that first applies `self`, then `next` to the result.
    pub fn then(&self, next: &CoordinateMap) -> CoordinateMap {
        assert_eq!(self.target_nvars, next.source_nvars());
        CoordinateMap {
            images: self.images.iter().map(|p| next.apply(p).unwrap()).collect(),
            target_nvars: next.target_nvars,
        }
    }

    /// `m[i][j]` = coefficient of `y_j` in the image of `x_i`.
    pub fn linear_matrix(&self) -> Vec<Vec<Rat>> {
        self.images
            .iter()
            .map(|p| (0..self.target_nvars).map(|j| p.linear_coeff(j)).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.len() == self.target_nvars
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, p)| *p == Poly::var(i, self.target_nvars))
    }

    /// Inverse of a square weighted-homogeneous map (same weights on both
    /// sides), solved weight level by weight level.
    pub fn inverse(&self, weights: &[Rat]) -> Result<CoordinateMap> {
        let n = weights.len();
        if self.images.len() != n || self.target_nvars != n {
            return Err(Error::InvalidCoordinateMap(
                "inverse of a non-square map".into(),
            ));
        }
        let lin = self.linear_matrix();
        let mut levels: Vec<Rat> = weights.to_vec();
        levels.sort();
        levels.dedup();
        let mut inv: Vec<Poly> = vec![Poly::zero(n); n];
        for w in levels {
            let idx: Vec<usize> = (0..n).filter(|&i| weights[i] == w).collect();
            // linear block restricted to this level
            let block: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&i| {
                    for (j, c) in lin[i].iter().enumerate() {
                        if !c.is_zero() && weights[j] != w {
                            return Err(Error::InvalidCoordinateMap(
                                "linear part mixes weight levels".into(),
                            ));
                        }
                    }
                    Ok(idx.iter().map(|&j| lin[i][j].clone()).collect())
                })
                .collect::<Result<_>>()?;
            let block_inv = linalg::inverse(&Q, &block).ok_or_else(|| {
                Error::InvalidCoordinateMap("linear part is not invertible".into())
            })?;
            // x_level = L y_level + N(y_lower)  =>  y_level = L^{-1} (x_level - N(psi_lower))
            let rhs: Vec<Poly> = idx
                .iter()
                .map(|&i| {
                    let nonlinear = &self.images[i] - &self.images[i].linear_part();
                    let constant = Poly::constant(nonlinear.constant_term(), n);
                    if !constant.is_zero() {
                        return Err(Error::InvalidCoordinateMap(
                            "image has a constant term".into(),
                        ));
                    }
                    Ok(&Poly::var(i, n) - &nonlinear.compose(&inv))
                })
                .collect::<Result<_>>()?;
            for (a, &j) in idx.iter().enumerate() {
                let mut p = Poly::zero(n);
                for (b, r) in rhs.iter().enumerate() {
                    p = &p + &r.scale(&block_inv[a][b]);
                }
                inv[j] = p;
            }
        }
        let out = CoordinateMap::new_unchecked(inv, n);
        let check = self.then(&out);
        if !check.is_identity() {
            return Err(Error::Internal(
                "coordinate inverse does not compose to the identity".into(),
            ));
        }
        Ok(out)
    }
}

/// `p` with each variable replaced according to `c`.
pub fn substitute(p: &Poly, c: &CoordinateMap) -> Result<Poly> {
    c.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat};

    const V: [&str; 3] = ["x", "y", "z"];

    fn p2(s: &str) -> Poly {
        parse_poly(s, &V[..2]).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let w11 = [rat(1), rat(1)];
        let id = CoordinateMap::new(vec![p2("x"), p2("y")], &w11).unwrap();
        assert_eq!(substitute(&p2("x*y"), &id).unwrap(), p2("x*y"));
        let c = CoordinateMap::new(vec![p2("x+y"), p2("x-y")], &w11).unwrap();
        assert_eq!(substitute(&p2("x*y"), &c).unwrap(), p2("x^2 - y^2"));
        let w23 = [rat(2), rat(3)];
        let s = CoordinateMap::new(vec![p2("x"), p2("-y")], &w23).unwrap();
        assert_eq!(substitute(&p2("y^2 - x^3"), &s).unwrap(), p2("y^2 - x^3"));
    }

    #[test]
    fn rejects_bad_maps() {
        let w11 = [rat(1), rat(1)];
        assert!(CoordinateMap::new(vec![p2("x+y"), p2("x+y")], &w11).is_err());
        assert!(CoordinateMap::new(vec![p2("x^2"), p2("y")], &w11).is_err());
    }

    #[test]
    fn inverse_of_triangular_weighted_map() {
        let w = [rat(1), rat(1), rat(2)];
        let v3 = |s: &str| parse_poly(s, &V).unwrap();
        let c = CoordinateMap::new(vec![v3("x + y"), v3("y"), v3("2z + x^2 - x*y")], &w).unwrap();
        let inv = c.inverse(&w).unwrap();
        assert!(c.then(&inv).is_identity());
        assert!(inv.then(&c).is_identity());
    }
}
