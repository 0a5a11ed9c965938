//! Univariate factorization over Z via Berlekamp mod p, linear Hensel lifting
//! and subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Rat;

/// Dense univariate polynomial over Q, coefficients low to high, trimmed.
pub type UPoly = Vec<Rat>;

pub fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn deg(p: &UPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn mul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let mut out: UPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

pub fn add(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let mut out: UPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

pub fn scale(a: &UPoly, c: &Rat) -> UPoly {
    let mut out: UPoly = a.iter().map(|x| x * c).collect();
    trim(&mut out);
    out
}

pub fn derivative(a: &UPoly) -> UPoly {
    let mut out: UPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder over Q.
pub fn divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / &lb;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &UPoly, b: &UPoly) -> UPoly {
    divrem(a, b).1
}

pub fn monic(a: &UPoly) -> UPoly {
    match a.last() {
        None => vec![],
        Some(l) => {
            let inv = Rat::one() / l;
            scale(a, &inv)
        }
    }
}

pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// `(g, s, t)` with `s a + t b = g` monic.
pub fn ext_gcd(a: &UPoly, b: &UPoly) -> (UPoly, UPoly, UPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![Rat::one()], vec![]);
    let (mut t0, mut t1) = (vec![], vec![Rat::one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        let t2 = sub(&t0, &mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let l = Rat::one() / r0.last().cloned().unwrap_or_else(Rat::one);
    (scale(&r0, &l), scale(&s0, &l), scale(&t0, &l))
}

/// Yun's squarefree decomposition over Q: returns `(a_i, i)` with `p = c * prod a_i^i`.
pub fn squarefree(p: &UPoly) -> Vec<(UPoly, u32)> {
    let mut out = Vec::new();
    if deg(p).unwrap_or(0) == 0 {
        return out;
    }
    let dp = derivative(p);
    let a0 = gcd(p, &dp);
    let mut b = divrem(p, &a0).0;
    let c = divrem(&dp, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut i = 1;
    while deg(&b).unwrap_or(0) > 0 {
        let a = gcd(&b, &d);
        b = divrem(&b, &a).0;
        let c = divrem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        if deg(&a).unwrap_or(0) > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

fn to_primitive_int(p: &UPoly) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in p {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let mut out: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
    if out.last().is_some_and(|l| l.is_negative()) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    out
}

fn int_to_rat(p: &[BigInt]) -> UPoly {
    p.iter().map(|c| Rat::from_integer(c.clone())).collect()
}

// ---------- arithmetic mod a small prime ----------

type ModPoly = Vec<u64>;

fn mtrim(a: &mut ModPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn minv(a: u64, p: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, p as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    (t.rem_euclid(p as i128)) as u64
}

fn mmul(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    mtrim(&mut out);
    out
}

fn msub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    let mut out: ModPoly = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    mtrim(&mut out);
    out
}

fn mdivrem(a: &ModPoly, b: &ModPoly, p: u64) -> (ModPoly, ModPoly) {
    let mut r = a.clone();
    mtrim(&mut r);
    let db = b.len() - 1;
    let inv = minv(b[db], p);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1] * inv % p;
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p * p - c * bj % p) % p;
        }
        q[k] = c;
        mtrim(&mut r);
    }
    mtrim(&mut q);
    (q, r)
}

fn mmonic(a: &ModPoly, p: u64) -> ModPoly {
    match a.last() {
        None => vec![],
        Some(&l) => {
            let inv = minv(l, p);
            a.iter().map(|&c| c * inv % p).collect()
        }
    }
}

fn mgcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    mtrim(&mut x);
    mtrim(&mut y);
    while !y.is_empty() {
        let r = mdivrem(&x, &y, p).1;
        x = y;
        y = r;
    }
    mmonic(&x, p)
}

fn mext_gcd(a: &ModPoly, b: &ModPoly, p: u64) -> (ModPoly, ModPoly, ModPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = mdivrem(&r0, &r1, p);
        let s2 = msub(&s0, &mmul(&q, &s1, p), p);
        let t2 = msub(&t0, &mmul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    let l = minv(*r0.last().unwrap(), p);
    let sc = |v: &ModPoly| -> ModPoly { v.iter().map(|&c| c * l % p).collect() };
    (sc(&r0), sc(&s0), sc(&t0))
}

fn mderiv(a: &ModPoly, p: u64) -> ModPoly {
    let mut out: ModPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (i as u64 % p) * c % p)
        .collect();
    mtrim(&mut out);
    out
}

fn reduce_mod(a: &[BigInt], p: u64) -> ModPoly {
    let pb = BigInt::from(p);
    let mut out: ModPoly = a
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    mtrim(&mut out);
    out
}

/// Berlekamp factorization of a monic squarefree polynomial mod p.
fn berlekamp(f: &ModPoly, p: u64) -> Vec<ModPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    // rows: x^{ip} mod f
    let xp = {
        let mut base = vec![0, 1];
        let mut acc = vec![1u64];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mdivrem(&mmul(&acc, &base, p), f, p).1;
            }
            base = mdivrem(&mmul(&base, &base, p), f, p).1;
            e >>= 1;
        }
        acc
    };
    let mut rows: Vec<ModPoly> = vec![vec![1]];
    for i in 1..n {
        let next = mdivrem(&mmul(&rows[i - 1], &xp, p), f, p).1;
        rows.push(next);
    }
    // matrix M[j][i] = coeff j of row i, minus identity; nullspace of M
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let c = rows[i].get(j).copied().unwrap_or(0);
                    if i == j {
                        (c + p - 1) % p
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..n).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = minv(m[r][c], p);
        for j in 0..n {
            m[r][j] = m[r][j] * inv % p;
        }
        for i in 0..n {
            if i != r && m[i][c] != 0 {
                let fct = m[i][c];
                for j in 0..n {
                    m[i][j] = (m[i][j] + p * p - fct * m[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<ModPoly> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u64; n];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[ri][fc]) % p;
            }
            mtrim(&mut v);
            v
        })
        .collect();
    let k = basis.len();
    let mut factors = vec![f.clone()];
    for v in &basis {
        if factors.len() == k {
            break;
        }
        if v.len() <= 1 {
            continue;
        }
        let mut next = Vec::new();
        for h in factors {
            if h.len() <= 2 {
                next.push(h);
                continue;
            }
            let mut rest = h.clone();
            for s in 0..p {
                if rest.len() <= 2 {
                    break;
                }
                let mut vs = v.clone();
                vs[0] = (vs[0] + p - s) % p;
                mtrim(&mut vs);
                let g = mgcd(&rest, &vs, p);
                if g.len() > 1 && g.len() < rest.len() {
                    rest = mdivrem(&rest, &g, p).0;
                    next.push(g);
                }
            }
            next.push(mmonic(&rest, p));
        }
        factors = next;
    }
    factors
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Irreducible factors of a primitive squarefree integer polynomial.
fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f[n].clone();
    let primes = small_primes(2000);
    let p = *primes
        .iter()
        .find(|&&p| {
            if (&lc % BigInt::from(p)).is_zero() {
                return false;
            }
            let fp = reduce_mod(f, p);
            fp.len() == f.len() && mgcd(&fp, &mderiv(&fp, p), p).len() == 1
        })
        .expect("no suitable prime");
    let fp = mmonic(&reduce_mod(f, p), p);
    let modfactors = berlekamp(&fp, p);
    let r = modfactors.len();
    if r == 1 {
        return vec![f.to_vec()];
    }
    // bound for coefficients of lc * (any factor)
    let norm1: BigInt = f.iter().map(|c| c.abs()).sum();
    let bound = lc.abs() * (BigInt::one() << n) * norm1 * 2 + 1;
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    let mut steps = 1usize;
    while modulus <= bound {
        modulus *= &pb;
        steps += 1;
    }
    let lifted = hensel_lift(f, &modfactors, p, steps);

    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut current: Vec<BigInt> = f.to_vec();
    let mut out = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= remaining.len() {
        let idx: Vec<usize> = (0..remaining.len()).collect();
        for subset in combinations(&idx, size) {
            let lcur = current.last().unwrap().clone();
            let mut prod = vec![lcur.clone()];
            for &i in &subset {
                prod = int_mul_mod(&prod, &remaining[i], &modulus);
            }
            let cand: Vec<BigInt> = prod.iter().map(|c| symmetric(c, &modulus)).collect();
            let cand = to_primitive_int(&int_to_rat(&cand));
            let (q, rr) = divrem(&int_to_rat(&current), &int_to_rat(&cand));
            if rr.is_empty() {
                out.push(cand);
                current = to_primitive_int(&q);
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, v)| v)
                    .collect();
                continue 'outer;
            }
        }
        size += 1;
    }
    if current.len() > 1 {
        out.push(current);
    }
    out
}

fn int_mul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out.iter().map(|c| c.mod_floor(m)).collect()
}

/// Lifts monic factors mod p of `lc^{-1} f` to factors mod p^steps.
fn hensel_lift(f: &[BigInt], factors: &[ModPoly], p: u64, steps: usize) -> Vec<Vec<BigInt>> {
    let pb = BigInt::from(p);
    let modulus = pb.pow(steps as u32);
    let lc = f.last().unwrap();
    let lcinv = {
        // inverse mod p^steps by Newton iteration from the inverse mod p
        let mut inv = BigInt::from(minv(lc.mod_floor(&pb).to_u64().unwrap(), p));
        let mut m = pb.clone();
        while m < modulus {
            m = (&m * &m).min(modulus.clone());
            inv = (&inv * (BigInt::from(2) - lc * &inv)).mod_floor(&m);
        }
        inv.mod_floor(&modulus)
    };
    let target: Vec<BigInt> = f.iter().map(|c| (c * &lcinv).mod_floor(&modulus)).collect();
    let r = factors.len();
    // s_i = (U / u_i)^{-1} mod u_i
    let full = factors.iter().fold(vec![1u64], |acc, g| mmul(&acc, g, p));
    let bezout: Vec<ModPoly> = factors
        .iter()
        .map(|u| {
            let cof = mdivrem(&full, u, p).0;
            let (_, s, _) = mext_gcd(&mdivrem(&cof, u, p).1, u, p);
            s
        })
        .collect();
    let mut lifted: Vec<Vec<BigInt>> = factors
        .iter()
        .map(|g| g.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    let mut pk = pb.clone();
    for _ in 1..steps {
        let prod = lifted
            .iter()
            .fold(vec![BigInt::one()], |acc, g| int_mul_mod(&acc, g, &modulus));
        let n = target.len().max(prod.len());
        let diff: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = target.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&modulus)
            })
            .collect();
        let e: ModPoly = {
            let mut e: ModPoly = diff
                .iter()
                .map(|c| (c / &pk).mod_floor(&pb).to_u64().unwrap())
                .collect();
            mtrim(&mut e);
            e
        };
        if !e.is_empty() {
            for i in 0..r {
                let corr = mdivrem(&mmul(&bezout[i], &e, p), &factors[i], p).1;
                for (j, &c) in corr.iter().enumerate() {
                    lifted[i][j] = (&lifted[i][j] + &pk * BigInt::from(c)).mod_floor(&modulus);
                }
            }
        }
        pk *= &pb;
    }
    lifted
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

fn small_primes(limit: u64) -> Vec<u64> {
    (3..limit)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect()
}

/// Irreducible factorization over Q: returns the unit and monic irreducible
/// factors with multiplicities, sorted by degree then coefficients.
pub fn factor(p: &UPoly) -> (Rat, Vec<(UPoly, u32)>) {
    let mut p = p.clone();
    trim(&mut p);
    if p.is_empty() {
        return (Rat::zero(), vec![]);
    }
    let unit = p.last().unwrap().clone();
    let mut out = Vec::new();
    for (a, mult) in squarefree(&p) {
        let prim = to_primitive_int(&a);
        for fct in zassenhaus(&prim) {
            out.push((monic(&int_to_rat(&fct)), mult));
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    (unit, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn up(c: &[i64]) -> UPoly {
        c.iter().map(|&x| rat(x)).collect()
    }

    fn product(fs: &[(UPoly, u32)]) -> UPoly {
        let mut acc = vec![rat(1)];
        for (f, m) in fs {
            for _ in 0..*m {
                acc = mul(&acc, f);
            }
        }
        acc
    }

    #[test]
    fn factors_products_of_known_irreducibles() {
        // (x^2+1)(x-2)^2(2x+3)
        let p = mul(
            &mul(&up(&[1, 0, 1]), &mul(&up(&[-2, 1]), &up(&[-2, 1]))),
            &up(&[3, 2]),
        );
        let (u, fs) = factor(&p);
        assert_eq!(fs.len(), 3);
        assert_eq!(scale(&product(&fs), &u), p);
        assert!(fs.iter().any(|(f, m)| *f == up(&[1, 0, 1]) && *m == 1));
        assert!(fs.iter().any(|(f, m)| *f == up(&[-2, 1]) && *m == 2));
    }

    #[test]
    fn irreducible_stays_whole() {
        // x^4 + 1 is irreducible over Q but splits mod every prime
        let (_, fs) = factor(&up(&[1, 0, 0, 0, 1]));
        assert_eq!(fs, vec![(up(&[1, 0, 0, 0, 1]), 1)]);
        let (_, fs) = factor(&up(&[-2, 0, 1]));
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn cyclotomic_split() {
        // x^6 - 1 = (x-1)(x+1)(x^2+x+1)(x^2-x+1)
        let p = up(&[-1, 0, 0, 0, 0, 0, 1]);
        let (u, fs) = factor(&p);
        assert_eq!(fs.len(), 4);
        assert_eq!(scale(&product(&fs), &u), p);
    }

    #[test]
    fn ext_gcd_identity() {
        let a = up(&[1, 0, 1]);
        let b = up(&[-1, 1]);
        let (g, s, t) = ext_gcd(&a, &b);
        assert_eq!(g, up(&[1]));
        assert_eq!(add(&mul(&s, &a), &mul(&t, &b)), up(&[1]));
    }
}
