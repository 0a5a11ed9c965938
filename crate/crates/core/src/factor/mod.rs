//! Factorization over Q.
//!
//! Scope: desk-scale inputs (a handful of variables, total degree up to about
//! twenty). Univariate parts use Zassenhaus with Berlekamp mod p; multivariate
//! parts use exact (y - a)-adic Hensel lifting.

mod multivariate;
pub mod univariate;

use std::cmp::Ordering;

use num_traits::Zero;

pub use multivariate::{content_in, gcd};

use crate::poly::{Poly, Rat};

/// Deterministic factor order: ascending total degree, then the factor whose
/// lexicographically largest monomial is larger comes first (x before y).
fn factor_order(a: &Poly, b: &Poly) -> Ordering {
    a.total_degree().cmp(&b.total_degree()).then_with(|| {
        let ta: Vec<_> = a.terms().rev().collect();
        let tb: Vec<_> = b.terms().rev().collect();
        tb.cmp(&ta)
    })
}

/// Irreducible factorization `p = unit * prod f_i^{m_i}` over Q, factors
/// integer-primitive with positive lexicographic leading coefficient.
pub fn factor_irreducible(p: &Poly) -> (Rat, Vec<(Poly, u32)>) {
    assert!(!p.is_zero(), "factoring the zero polynomial");
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in multivariate::factor_rec(&p.primitive()) {
        let g = g.primitive();
        match merged.iter_mut().find(|(h, _)| *h == g) {
            Some(slot) => slot.1 += m,
            None => merged.push((g, m)),
        }
    }
    merged.sort_by(|a, b| factor_order(&a.0, &b.0));
    let prod = merged
        .iter()
        .fold(Poly::one(p.nvars()), |acc, (g, m)| &acc * &g.pow(*m));
    let (_, lp) = p.lex_leading().unwrap();
    let (_, lq) = prod.lex_leading().unwrap();
    (lp / lq, merged)
}

/// Whether `p` is irreducible over Q (constants are not).
pub fn is_irreducible(p: &Poly) -> bool {
    let (_, fs) = factor_irreducible(p);
    fs.len() == 1 && fs[0].1 == 1
}

/// Sufficient test for absolute irreducibility of a Q-irreducible `p`: a
/// smooth rational point. If `p` split over an extension, its conjugate
/// factors would all pass through every rational zero, making it singular.
pub fn has_smooth_rational_point(p: &Poly) -> bool {
    let n = p.nvars();
    let grad = p.gradient();
    let range: Vec<i64> = (-3..=3).collect();
    for solve in p.support_vars() {
        let free: Vec<usize> = (0..n).filter(|&i| i != solve).collect();
        let mut idx = vec![0usize; free.len()];
        loop {
            let mut img = p.clone();
            let mut point = vec![Rat::zero(); n];
            for (k, &i) in free.iter().enumerate() {
                let val = Rat::from_integer(range[idx[k]].into());
                img = img.eval_var(i, &val);
                point[i] = val;
            }
            if !img.is_zero() {
                let u: univariate::UPoly = (0..=img.degree_in(solve).unwrap_or(0))
                    .map(|k| {
                        let mut e = vec![0u32; n];
                        e[solve] = k;
                        img.coeff(&crate::poly::Monomial::new(e))
                    })
                    .collect();
                let (_, fs) = univariate::factor(&u);
                for (g, _) in fs.iter().filter(|(g, _)| g.len() == 2) {
                    point[solve] = -g[0].clone() / &g[1];
                    if grad.iter().any(|d| !d.eval(&point).is_zero()) {
                        return true;
                    }
                }
            }
            // next index tuple
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < range.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat};

    const V: [&str; 3] = ["x", "y", "z"];

    fn p(s: &str) -> Poly {
        parse_poly(s, &V).unwrap()
    }

    #[test]
    fn monomial_and_multiplicity() {
        let (u, fs) = factor_irreducible(&p("x*y*z"));
        assert_eq!(u, rat(1));
        assert_eq!(fs, vec![(p("x"), 1), (p("y"), 1), (p("z"), 1)]);
        let (_, fs) = factor_irreducible(&p("x^2*y"));
        assert_eq!(fs, vec![(p("x"), 2), (p("y"), 1)]);
    }

    #[test]
    fn cusp_is_irreducible() {
        let (u, fs) = factor_irreducible(&p("y^2 - x^3"));
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.scale(&u), p("y^2 - x^3"));
    }

    #[test]
    fn unit_recombines() {
        let f = p("-6*(x - y)^2*(x*z + 2)");
        let (u, fs) = factor_irreducible(&f);
        let prod = fs
            .iter()
            .fold(Poly::one(3), |acc, (g, m)| &acc * &g.pow(*m));
        assert_eq!(prod.scale(&u), f);
    }

    #[test]
    fn smooth_points() {
        assert!(has_smooth_rational_point(&p("y^2 - x^3")));
        assert!(!has_smooth_rational_point(&p("x^2 + y^2")));
    }
}
