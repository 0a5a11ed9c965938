//! Dense exact linear algebra over the rationals and over a single quadratic
//! extension `Q(sqrt(d))`.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::poly::{rat, Rat};

/// Arithmetic context for a field whose elements are `Self::Elem`.
pub trait Field {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_rat(&self, r: &Rat) -> Self::Elem;
}

/// The rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Q;

impl Field for Q {
    type Elem = Rat;
    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn inv(&self, a: &Rat) -> Rat {
        Rat::one() / a
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn from_rat(&self, r: &Rat) -> Rat {
        r.clone()
    }
}

/// `Q(sqrt(d))` for a non-square rational `d`; elements are `a + b*sqrt(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticField {
    pub d: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: Rat,
    pub b: Rat,
}

impl QuadElem {
    pub fn rational(a: Rat) -> Self {
        QuadElem { a, b: Rat::zero() }
    }
}

impl Field for QuadraticField {
    type Elem = QuadElem;
    fn zero(&self) -> QuadElem {
        QuadElem::rational(Rat::zero())
    }
    fn one(&self) -> QuadElem {
        QuadElem::rational(Rat::one())
    }
    fn add(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a + &y.a,
            b: &x.b + &y.b,
        }
    }
    fn sub(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a - &y.a,
            b: &x.b - &y.b,
        }
    }
    fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a * &y.a + &x.b * &y.b * &self.d,
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }
    fn neg(&self, x: &QuadElem) -> QuadElem {
        QuadElem { a: -&x.a, b: -&x.b }
    }
    fn inv(&self, x: &QuadElem) -> QuadElem {
        let norm = &x.a * &x.a - &x.b * &x.b * &self.d;
        QuadElem {
            a: &x.a / &norm,
            b: -&x.b / &norm,
        }
    }
    fn is_zero(&self, x: &QuadElem) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }
    fn from_rat(&self, r: &Rat) -> QuadElem {
        QuadElem::rational(r.clone())
    }
}

pub type Matrix<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(k: &F, n: usize) -> Matrix<F::Elem> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { k.one() } else { k.zero() })
                .collect()
        })
        .collect()
}

pub fn zeros<F: Field>(k: &F, r: usize, c: usize) -> Matrix<F::Elem> {
    vec![vec![k.zero(); c]; r]
}

pub fn mat_mul<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let inner = b.len();
    let mut out = zeros(k, n, m);
    for i in 0..n {
        for l in 0..inner {
            if k.is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..m {
                let t = k.mul(&a[i][l], &b[l][j]);
                out[i][j] = k.add(&out[i][j], &t);
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(k: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y)))
        })
        .collect()
}

pub fn mat_sub<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| k.sub(x, y)).collect())
        .collect()
}

pub fn mat_add<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| k.add(x, y)).collect())
        .collect()
}

pub fn mat_scale<F: Field>(k: &F, a: &Matrix<F::Elem>, c: &F::Elem) -> Matrix<F::Elem> {
    a.iter()
        .map(|r| r.iter().map(|x| k.mul(x, c)).collect())
        .collect()
}

pub fn commutator<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    mat_sub(k, &mat_mul(k, a, b), &mat_mul(k, b, a))
}

pub fn transpose<E: Clone>(a: &Matrix<E>) -> Matrix<E> {
    let r = a.len();
    let c = a.first().map(|x| x.len()).unwrap_or(0);
    (0..c)
        .map(|j| (0..r).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn is_zero_matrix<F: Field>(k: &F, a: &Matrix<F::Elem>) -> bool {
    a.iter().all(|r| r.iter().all(|x| k.is_zero(x)))
}

pub fn trace<F: Field>(k: &F, a: &Matrix<F::Elem>) -> F::Elem {
    (0..a.len()).fold(k.zero(), |acc, i| k.add(&acc, &a[i][i]))
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref<F: Field>(k: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !k.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = k.inv(&m[r][c]);
        for j in c..cols {
            m[r][j] = k.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !k.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = k.mul(&f, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(k: &F, m: &Matrix<F::Elem>) -> usize {
    let mut a = m.clone();
    rref(k, &mut a).len()
}

/// Basis of `{v : m v = 0}` with `ncols` unknowns.
pub fn nullspace<F: Field>(k: &F, m: &Matrix<F::Elem>, ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut a = m.clone();
    let pivots = rref(k, &mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![k.zero(); ncols];
            v[fc] = k.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(&a[r][fc]);
            }
            v
        })
        .collect()
}

/// One solution of `a x = b`, if any.
pub fn solve<F: Field>(k: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Matrix<F::Elem> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut row = r.clone();
            row.push(x.clone());
            row
        })
        .collect();
    let pivots = rref(k, &mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![k.zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(k: &F, a: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    let n = a.len();
    let mut aug: Matrix<F::Elem> = a
        .iter()
        .zip(identity(k, n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    let pivots = rref(k, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Echelon basis of the row span of `vectors`.
pub fn span_basis<F: Field>(k: &F, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let mut a = vectors.to_vec();
    let p = rref(k, &mut a);
    a.truncate(p.len());
    a
}

/// Coordinates of `v` in terms of `basis` (rows), if `v` lies in their span.
pub fn coordinates<F: Field>(k: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    if basis.is_empty() {
        return if v.iter().all(|x| k.is_zero(x)) {
            Some(vec![])
        } else {
            None
        };
    }
    solve(k, &transpose(&basis.to_vec()), v)
}

pub fn in_span<F: Field>(k: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> bool {
    coordinates(k, basis, v).is_some()
}

/// Intersection of two row spans inside a common ambient space of dimension `n`.
pub fn intersect<F: Field>(
    k: &F,
    a: &[Vec<F::Elem>],
    b: &[Vec<F::Elem>],
    n: usize,
) -> Vec<Vec<F::Elem>> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    // solve sum s_i a_i - sum t_j b_j = 0
    let mut m = zeros(k, n, a.len() + b.len());
    for (i, v) in a.iter().enumerate() {
        for r in 0..n {
            m[r][i] = v[r].clone();
        }
    }
    for (j, v) in b.iter().enumerate() {
        for r in 0..n {
            m[r][a.len() + j] = k.neg(&v[r]);
        }
    }
    let ns = nullspace(k, &m, a.len() + b.len());
    let vs: Vec<Vec<F::Elem>> = ns
        .iter()
        .map(|s| {
            (0..n)
                .map(|r| {
                    a.iter()
                        .enumerate()
                        .fold(k.zero(), |acc, (i, v)| k.add(&acc, &k.mul(&s[i], &v[r])))
                })
                .collect()
        })
        .collect();
    span_basis(k, &vs)
}

/// Extends `basis` to a basis of the full space using standard unit vectors;
/// returns only the added vectors.
pub fn complement<F: Field>(k: &F, basis: &[Vec<F::Elem>], n: usize) -> Vec<Vec<F::Elem>> {
    let mut cur = basis.to_vec();
    let mut added = Vec::new();
    let mut r = rank(k, &cur);
    for i in 0..n {
        let mut e = vec![k.zero(); n];
        e[i] = k.one();
        cur.push(e.clone());
        let r2 = rank(k, &cur);
        if r2 > r {
            added.push(e);
            r = r2;
        } else {
            cur.pop();
        }
    }
    added
}

/// Characteristic polynomial `det(t I - a)`, coefficients low to high
/// (Faddeev–LeVerrier).
pub fn char_poly(a: &Matrix<Rat>) -> Vec<Rat> {
    let n = a.len();
    let k = Q;
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut m = zeros(&k, n, n);
    for step in 1..=n {
        // M_step = A M_{step-1} + c_{n-step+1} I
        let mut next = mat_mul(&k, a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - step + 1];
        }
        m = next;
        let am = mat_mul(&k, a, &m);
        coeffs[n - step] = -trace(&k, &am) / rat(step as i64);
    }
    coeffs
}

pub fn to_quad(m: &Matrix<Rat>) -> Matrix<QuadElem> {
    m.iter()
        .map(|r| r.iter().map(|x| QuadElem::rational(x.clone())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_frac;

    fn m(rows: &[&[i64]]) -> Matrix<Rat> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&Q, &a).unwrap();
        assert_eq!(mat_mul(&Q, &a, &inv), identity(&Q, 2));
        assert!(inverse(&Q, &m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn nullspace_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&Q, &a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&Q, &a, v).iter().all(|x| x.is_zero()));
        }
        assert!(solve(&Q, &a, &[rat(1), rat(3)]).is_none());
        assert_eq!(solve(&Q, &a, &[rat(1), rat(2)]).unwrap()[0], rat(1));
    }

    #[test]
    fn characteristic_polynomial() {
        // [[1,1],[0,2]] -> t^2 - 3t + 2
        assert_eq!(
            char_poly(&m(&[&[1, 1], &[0, 2]])),
            vec![rat(2), rat(-3), rat(1)]
        );
        assert_eq!(
            char_poly(&m(&[&[0, -1], &[1, 0]])),
            vec![rat(1), rat(0), rat(1)]
        );
    }

    #[test]
    fn quadratic_field_inverse() {
        let k = QuadraticField { d: rat(2) };
        let x = QuadElem {
            a: rat(1),
            b: rat(1),
        };
        let y = k.inv(&x);
        assert_eq!(
            y,
            QuadElem {
                a: rat(-1),
                b: rat(1)
            }
        );
        assert_eq!(k.mul(&x, &y), k.one());
        let z = QuadElem {
            a: rat_frac(1, 2),
            b: rat(3),
        };
        assert_eq!(k.mul(&z, &k.inv(&z)), k.one());
    }

    #[test]
    fn intersection_and_complement() {
        let a = m(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = m(&[&[0, 1, 0], &[0, 0, 1]]);
        let i = intersect(&Q, &a, &b, 3);
        assert_eq!(i, m(&[&[0, 1, 0]]));
        assert_eq!(complement(&Q, &a, 3), m(&[&[0, 0, 1]]));
    }
}
