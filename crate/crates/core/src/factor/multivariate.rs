//! Multivariate gcd, squarefree decomposition and factorization over Q.
//!
//! Squarefree primitive parts are factored by evaluating all but one variable
//! at an integer point, factoring the univariate image, lifting the factors
//! (y - a)-adically with exact rational arithmetic and recombining subsets.

use num_traits::{One, Zero};

use super::univariate::{self as uni, UPoly};
use crate::poly::{rat, Monomial, Poly, Rat};

/// Coefficients of `p` as a polynomial in `x_v`; entry `k` multiplies `x_v^k`.
pub fn coeffs_in(p: &Poly, v: usize) -> Vec<Poly> {
    let n = p.nvars();
    let mut out: Vec<Poly> = Vec::new();
    for (m, c) in p.terms() {
        let k = m.exponents()[v] as usize;
        if out.len() <= k {
            out.resize(k + 1, Poly::zero(n));
        }
        let mut e = m.exponents().to_vec();
        e[v] = 0;
        out[k].add_term(Monomial::new(e), c.clone());
    }
    out
}

fn x_pow(v: usize, k: u32, n: usize) -> Poly {
    Poly::var(v, n).pow(k)
}

pub fn degree_in(p: &Poly, v: usize) -> u32 {
    p.degree_in(v).unwrap_or(0)
}

/// Leading coefficient of `p` as a polynomial in `x_v`.
pub fn lc_in(p: &Poly, v: usize) -> Poly {
    coeffs_in(p, v)
        .pop()
        .unwrap_or_else(|| Poly::zero(p.nvars()))
}

fn quo(a: &Poly, b: &Poly) -> Poly {
    a.exact_div(b)
        .expect("nonzero divisor")
        .expect("exact division expected to succeed")
}

/// Pseudo-remainder of `a` by `b` in `x_v`, up to factors of `lc_v(b)`.
fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let n = a.nvars();
    let db = degree_in(b, v);
    let lb = lc_in(b, v);
    let mut r = a.clone();
    while !r.is_zero() && degree_in(&r, v) >= db {
        let k = degree_in(&r, v) - db;
        let lr = lc_in(&r, v);
        r = &(&lb * &r) - &(&(&lr * &x_pow(v, k, n)) * b);
    }
    r
}

/// Gcd of the coefficients of `p` in `x_v`.
pub fn content_in(p: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero(p.nvars());
    for c in coeffs_in(p, v) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one(p.nvars());
        }
    }
    g
}

fn pp_in(p: &Poly, v: usize) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    quo(p, &content_in(p, v)).primitive()
}

/// Greatest common divisor, normalized to an integer primitive polynomial.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    let v = (0..n)
        .rev()
        .find(|&i| degree_in(a, i) > 0 || degree_in(b, i) > 0)
        .unwrap();
    let (da, db) = (degree_in(a, v), degree_in(b, v));
    if da == 0 {
        return gcd(a, &content_in(b, v));
    }
    if db == 0 {
        return gcd(&content_in(a, v), b);
    }
    let (ca, cb) = (content_in(a, v), content_in(b, v));
    let c = gcd(&ca, &cb);
    let mut p = quo(a, &ca);
    let mut q = quo(b, &cb);
    if degree_in(&p, v) < degree_in(&q, v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = prem(&p, &q, v);
        p = q;
        q = pp_in(&r, v);
    }
    (&pp_in(&p, v) * &c).primitive()
}

/// Yun's algorithm in `x_v` for `p` primitive in `x_v`.
fn squarefree_in(p: &Poly, v: usize) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if degree_in(p, v) == 0 {
        return out;
    }
    let dp = p.partial(v).unwrap();
    let a0 = gcd(p, &dp);
    let mut b = quo(p, &a0);
    let c = quo(&dp, &a0);
    let mut d = &c - &b.partial(v).unwrap();
    let mut i = 1;
    while degree_in(&b, v) > 0 {
        let a = gcd(&b, &d);
        b = quo(&b, &a);
        let c = quo(&d, &a);
        d = &c - &b.partial(v).unwrap();
        if degree_in(&a, v) > 0 {
            out.push((a.primitive(), i));
        }
        i += 1;
    }
    out
}

fn to_uni(p: &Poly, v: usize) -> UPoly {
    let mut out: UPoly = Vec::new();
    for (m, c) in p.terms() {
        let k = m.exponents()[v] as usize;
        if out.len() <= k {
            out.resize(k + 1, Rat::zero());
        }
        out[k] += c;
    }
    uni::trim(&mut out);
    out
}

fn from_uni(u: &UPoly, v: usize, n: usize) -> Poly {
    let mut p = Poly::zero(n);
    for (k, c) in u.iter().enumerate() {
        let mut e = vec![0; n];
        e[v] = k as u32;
        p.add_term(Monomial::new(e), c.clone());
    }
    p
}

fn t_degree(m: &Monomial, v: usize) -> u32 {
    m.total_degree() - m.exponents()[v]
}

fn truncate(p: &Poly, v: usize, k: u32) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms()
            .filter(|(m, _)| t_degree(m, v) < k)
            .map(|(m, c)| (m.exponents().to_vec(), c.clone())),
    )
}

fn mul_trunc(a: &Poly, b: &Poly, v: usize, k: u32) -> Poly {
    let mut out = Poly::zero(a.nvars());
    for (m1, c1) in a.terms() {
        let d1 = t_degree(m1, v);
        if d1 >= k {
            continue;
        }
        for (m2, c2) in b.terms() {
            if d1 + t_degree(m2, v) < k {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
    }
    out
}

/// Small integers in the order 0, 1, -1, 2, -2, ...
fn small_int(i: usize) -> i64 {
    let k = i.div_ceil(2) as i64;
    if i % 2 == 1 {
        k
    } else {
        -k
    }
}

/// Index tuples of length `len` with entry sum `total`, lexicographically.
fn tuples_with_sum(len: usize, total: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in tuples_with_sum(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn shift_images(n: usize, v: usize, others: &[usize], point: &[i64], sign: i64) -> Vec<Poly> {
    (0..n)
        .map(|i| match others.iter().position(|&o| o == i) {
            Some(k) if i != v => &Poly::var(i, n) + &Poly::constant(rat(sign * point[k]), n),
            _ => Poly::var(i, n),
        })
        .collect()
}

/// Irreducible factors of `f`, squarefree and primitive in `x_v` with positive degree in `x_v`.
fn factor_squarefree(f: &Poly, v: usize) -> Vec<Poly> {
    let n = f.nvars();
    let others: Vec<usize> = f.support_vars().into_iter().filter(|&i| i != v).collect();
    let dv = degree_in(f, v);
    if others.is_empty() {
        let (_, fs) = uni::factor(&to_uni(f, v));
        return fs
            .iter()
            .map(|(u, _)| from_uni(u, v, n).primitive())
            .collect();
    }
    if dv == 1 {
        return vec![f.primitive()];
    }
    let lc = lc_in(f, v);
    let mut chosen = None;
    'search: for total in 0..60 {
        for idx in tuples_with_sum(others.len(), total) {
            let point: Vec<i64> = idx.iter().map(|&i| small_int(i)).collect();
            let mut full = vec![Rat::zero(); n];
            for (k, &o) in others.iter().enumerate() {
                full[o] = rat(point[k]);
            }
            if lc.eval(&full).is_zero() {
                continue;
            }
            let mut img = f.clone();
            for (k, &o) in others.iter().enumerate() {
                img = img.eval_var(o, &rat(point[k]));
            }
            let u = to_uni(&img, v);
            if uni::deg(&u) != Some(dv as usize) {
                continue;
            }
            if uni::deg(&uni::gcd(&u, &uni::derivative(&u))) != Some(0) {
                continue;
            }
            chosen = Some((point, u));
            break 'search;
        }
    }
    let (point, u) = chosen.expect("no good evaluation point among small integers");
    let (_, ufs) = uni::factor(&u);
    if ufs.len() == 1 {
        return vec![f.primitive()];
    }
    let us: Vec<UPoly> = ufs.into_iter().map(|(g, _)| g).collect();

    // Move the evaluation point to the origin: t = y - a.
    let fs = f.compose(&shift_images(n, v, &others, &point, 1));
    let back = shift_images(n, v, &others, &point, -1);
    let t_deg_f = fs.terms().map(|(m, _)| t_degree(m, v)).max().unwrap_or(0);
    let lcs = lc_in(&fs, v);
    let t_deg_lc = lcs.terms().map(|(m, _)| t_degree(m, v)).max().unwrap_or(0);
    let prec = t_deg_f + t_deg_lc + 1;

    // Power series inverse of the leading coefficient.
    let c0 = lcs.constant_term();
    let q = &lcs.scale(&(Rat::one() / &c0)) - &Poly::one(n);
    let mut inv = Poly::one(n);
    let mut term = Poly::one(n);
    for _ in 1..prec {
        term = mul_trunc(&term, &(-&q), v, prec);
        if term.is_zero() {
            break;
        }
        inv = &inv + &term;
    }
    let inv = inv.scale(&(Rat::one() / &c0));
    let target = mul_trunc(&fs, &inv, v, prec);

    // s_i = (U/u_i)^{-1} mod u_i
    let full = us.iter().fold(vec![Rat::one()], |acc, g| uni::mul(&acc, g));
    let bezout: Vec<UPoly> = us
        .iter()
        .map(|g| {
            let cof = uni::divrem(&full, g).0;
            let (_, s, _) = uni::ext_gcd(&uni::rem(&cof, g), g);
            s
        })
        .collect();
    let mut lifted: Vec<Poly> = us.iter().map(|g| from_uni(g, v, n)).collect();
    for k in 1..prec {
        let prod = lifted
            .iter()
            .fold(Poly::one(n), |acc, g| mul_trunc(&acc, g, v, k + 1));
        let err = &truncate(&target, v, k + 1) - &prod;
        // group error terms by their t-monomial
        let mut groups: std::collections::BTreeMap<Monomial, UPoly> = Default::default();
        for (m, c) in err.terms() {
            let mut e = m.exponents().to_vec();
            let xk = e[v] as usize;
            e[v] = 0;
            let slot = groups.entry(Monomial::new(e)).or_default();
            if slot.len() <= xk {
                slot.resize(xk + 1, Rat::zero());
            }
            slot[xk] += c;
        }
        for (tm, mut e) in groups {
            uni::trim(&mut e);
            if e.is_empty() {
                continue;
            }
            let tpoly = Poly::monomial(tm, Rat::one());
            for (i, g) in us.iter().enumerate() {
                let corr = uni::rem(&uni::mul(&bezout[i], &e), g);
                if !corr.is_empty() {
                    lifted[i] = &lifted[i] + &(&from_uni(&corr, v, n) * &tpoly);
                }
            }
        }
    }

    // Recombination of lifted factors.
    let mut current = f.clone();
    let mut remaining = lifted;
    let mut out = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        let idx: Vec<usize> = (0..remaining.len()).collect();
        for subset in uni::combinations(&idx, size) {
            let lc_cur = lc_in(&current.compose(&shift_images(n, v, &others, &point, 1)), v);
            let mut g = lc_cur;
            for &i in &subset {
                g = mul_trunc(&g, &remaining[i], v, prec);
            }
            let cand = pp_in(&g.compose(&back), v);
            if degree_in(&cand, v) == 0 {
                continue;
            }
            if let Some(q) = current.exact_div(&cand).unwrap() {
                out.push(cand);
                current = q;
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, p)| p)
                    .collect();
                continue 'outer;
            }
        }
        size += 1;
    }
    if !current.is_constant() {
        out.push(current.primitive());
    }
    out
}

/// Irreducible factors with multiplicities (unnormalized order, no unit).
pub fn factor_rec(f: &Poly) -> Vec<(Poly, u32)> {
    if f.is_constant() {
        return vec![];
    }
    let v = f
        .support_vars()
        .into_iter()
        .min_by_key(|&i| (degree_in(f, i), i))
        .unwrap();
    let c = content_in(f, v);
    let mut out = factor_rec(&c);
    let pp = quo(f, &c);
    for (a, m) in squarefree_in(&pp, v) {
        for g in factor_squarefree(&a, v) {
            out.push((g, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    const V: [&str; 3] = ["x", "y", "z"];

    fn p(s: &str) -> Poly {
        parse_poly(s, &V).unwrap()
    }

    #[test]
    fn gcd_of_products() {
        let a = p("(x+y)^2*(x-z)");
        let b = p("(x+y)*(y^2-x^3)");
        assert_eq!(gcd(&a, &b), p("x+y"));
        assert_eq!(gcd(&p("x^2-y^2"), &p("x*z+y*z")), p("x+y"));
        assert!(gcd(&p("x^2+1"), &p("y")).is_one());
    }

    #[test]
    fn lifts_bivariate_factors() {
        let f = p("(y^2 - x^3)*(x + 2y)*(x*y - z^2)");
        let fs = factor_rec(&f);
        assert_eq!(fs.len(), 3);
        let prod = fs.iter().fold(Poly::one(3), |acc, (g, _)| &acc * g);
        assert_eq!(prod.primitive(), f.primitive());
    }

    #[test]
    fn irreducible_with_many_modular_factors() {
        // x^4 + y^4 factors at every specialization into quadratics over Q? no:
        // its univariate images x^4 + a^4 are irreducible or split in pairs
        let f = p("x^4 + y^4 + z^4");
        assert_eq!(factor_rec(&f).len(), 1);
        let g = p("x^2 - 2y^2");
        assert_eq!(factor_rec(&g).len(), 1);
    }
}
