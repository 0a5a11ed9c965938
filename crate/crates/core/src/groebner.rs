//! Buchberger's algorithm for submodules of free modules over Q[x].
//!
//! Terms are ordered position-over-term (component 0 largest), then by
//! weighted degree, then reverse lexicographically. Ideals are the rank-one case.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Degree, Monomial, Poly, Rat};

fn revlex(a: &Monomial, b: &Monomial) -> Ordering {
    for (x, y) in a.exponents().iter().zip(b.exponents()).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Key {
    comp: usize,
    wdeg: Rat,
    mono: Monomial,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .comp
            .cmp(&self.comp)
            .then_with(|| self.wdeg.cmp(&other.wdeg))
            .then_with(|| revlex(&self.mono, &other.mono))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
struct Elem {
    terms: BTreeMap<Key, Rat>,
    sugar: Rat,
}

impl Elem {
    fn lead(&self) -> Option<(&Key, &Rat)> {
        self.terms.iter().next_back()
    }
}

/// Term order data shared by one computation.
#[derive(Clone, Debug)]
struct Ring {
    nvars: usize,
    weights: Vec<Rat>,
    shifts: Vec<Rat>,
}

impl Ring {
    fn key(&self, comp: usize, mono: Monomial) -> Key {
        Key {
            comp,
            wdeg: mono.weighted_degree(&self.weights) + &self.shifts[comp],
            mono,
        }
    }

    fn elem(&self, v: &[Poly]) -> Elem {
        let mut terms = BTreeMap::new();
        for (comp, p) in v.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.insert(self.key(comp, m.clone()), c.clone());
            }
        }
        let sugar = terms
            .keys()
            .map(|k| k.wdeg.clone())
            .max()
            .unwrap_or_else(Rat::zero);
        Elem { terms, sugar }
    }

    fn vector(&self, e: &Elem) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.nvars); self.shifts.len()];
        for (k, c) in &e.terms {
            out[k.comp].add_term(k.mono.clone(), c.clone());
        }
        out
    }

    /// `c * m * e` added to `acc`.
    fn add_scaled(&self, acc: &mut BTreeMap<Key, Rat>, e: &Elem, m: &Monomial, c: &Rat) {
        for (k, a) in &e.terms {
            let key = self.key(k.comp, k.mono.mul(m));
            let v = a * c;
            match acc.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += v;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(s) => {
                    s.insert(v);
                }
            }
        }
    }

    fn mono_deg(&self, m: &Monomial) -> Rat {
        m.weighted_degree(&self.weights)
    }

    /// Full reduction of `e` modulo `basis`.
    fn reduce(&self, e: &Elem, basis: &[Elem]) -> Elem {
        let mut rest = e.terms.clone();
        let mut done: BTreeMap<Key, Rat> = BTreeMap::new();
        let mut sugar = e.sugar.clone();
        while let Some((k, c)) = rest.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            let red = basis.iter().find_map(|b| {
                let (bk, bc) = b.lead()?;
                if bk.comp != k.comp {
                    return None;
                }
                k.mono.div(&bk.mono).map(|m| (b, m, bc.clone()))
            });
            match red {
                Some((b, m, bc)) => {
                    let s = &b.sugar + self.mono_deg(&m);
                    if s > sugar {
                        sugar = s;
                    }
                    self.add_scaled(&mut rest, b, &m, &(-(&c / &bc)));
                }
                None => {
                    rest.remove(&k);
                    done.insert(k, c);
                }
            }
        }
        Elem { terms: done, sugar }
    }
}

struct Pair {
    i: usize,
    j: usize,
    sugar: Rat,
    lcm: Key,
}

fn normalize(e: &mut Elem) {
    if let Some((_, lc)) = e.lead() {
        let inv = Rat::one() / lc;
        for v in e.terms.values_mut() {
            *v *= &inv;
        }
    }
}

/// Reduced monic Gröbner basis, sorted ascending by leading term.
fn buchberger(ring: &Ring, gens: Vec<Elem>) -> Vec<Elem> {
    let rank_one = ring.shifts.len() == 1;
    let mut basis: Vec<Elem> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut queue: Vec<Elem> = gens.into_iter().filter(|e| !e.terms.is_empty()).collect();
    queue.sort_by(|a, b| {
        b.sugar
            .cmp(&a.sugar)
            .then_with(|| b.lead().unwrap().0.cmp(a.lead().unwrap().0))
    });

    let insert = |basis: &mut Vec<Elem>, pairs: &mut Vec<Pair>, mut e: Elem| {
        normalize(&mut e);
        let (lk, _) = e.lead().unwrap();
        let lk = lk.clone();
        let j = basis.len();
        for (i, b) in basis.iter().enumerate() {
            let (bk, _) = b.lead().unwrap();
            if bk.comp != lk.comp {
                continue;
            }
            let l = bk.mono.lcm(&lk.mono);
            let si = &b.sugar + ring.mono_deg(&l.div(&bk.mono).unwrap());
            let sj = &e.sugar + ring.mono_deg(&l.div(&lk.mono).unwrap());
            if rank_one && bk.mono.gcd(&lk.mono).is_one() {
                continue;
            }
            pairs.push(Pair {
                i,
                j,
                sugar: si.max(sj),
                lcm: ring.key(lk.comp, l),
            });
        }
        basis.push(e);
    };

    loop {
        if let Some(g) = queue.pop() {
            let r = ring.reduce(&g, &basis);
            if !r.terms.is_empty() {
                insert(&mut basis, &mut pairs, r);
            }
            continue;
        }
        if pairs.is_empty() {
            break;
        }
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                pairs[a]
                    .sugar
                    .cmp(&pairs[b].sugar)
                    .then_with(|| pairs[a].lcm.cmp(&pairs[b].lcm))
                    .then_with(|| (pairs[a].i, pairs[a].j).cmp(&(pairs[b].i, pairs[b].j)))
            })
            .unwrap();
        let p = pairs.swap_remove(best);
        // chain criterion: some k with LM_k | lcm whose pairs with i and j are already gone
        let skip = basis.iter().enumerate().any(|(k, b)| {
            if k == p.i || k == p.j {
                return false;
            }
            let (bk, _) = b.lead().unwrap();
            bk.comp == p.lcm.comp
                && bk.mono.divides(&p.lcm.mono)
                && !pairs
                    .iter()
                    .any(|q| (q.i.min(q.j), q.i.max(q.j)) == (p.i.min(k), p.i.max(k)))
                && !pairs
                    .iter()
                    .any(|q| (q.i.min(q.j), q.i.max(q.j)) == (p.j.min(k), p.j.max(k)))
        });
        if skip {
            continue;
        }
        let (a, b) = (&basis[p.i], &basis[p.j]);
        let (ak, ac) = a.lead().unwrap();
        let (bk, bc) = b.lead().unwrap();
        let ma = p.lcm.mono.div(&ak.mono).unwrap();
        let mb = p.lcm.mono.div(&bk.mono).unwrap();
        let mut s = BTreeMap::new();
        ring.add_scaled(&mut s, a, &ma, &(Rat::one() / ac));
        ring.add_scaled(&mut s, b, &mb, &(-(Rat::one() / bc)));
        let spoly = Elem {
            terms: s,
            sugar: p.sugar.clone(),
        };
        let r = ring.reduce(&spoly, &basis);
        if !r.terms.is_empty() {
            insert(&mut basis, &mut pairs, r);
        }
    }
    interreduce(ring, basis)
}

fn interreduce(ring: &Ring, basis: Vec<Elem>) -> Vec<Elem> {
    // drop elements whose leading term is divisible by another's
    let leads: Vec<Key> = basis.iter().map(|e| e.lead().unwrap().0.clone()).collect();
    let mut keep: Vec<Elem> = Vec::new();
    for (i, e) in basis.iter().enumerate() {
        let li = &leads[i];
        let redundant = leads.iter().enumerate().any(|(j, lj)| {
            j != i
                && lj.comp == li.comp
                && lj.mono.divides(&li.mono)
                && (lj.mono != li.mono || j < i)
        });
        if !redundant {
            keep.push(e.clone());
        }
    }
    keep.sort_by(|a, b| a.lead().unwrap().0.cmp(b.lead().unwrap().0));
    let mut out: Vec<Elem> = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Elem> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, e)| e.clone())
            .collect();
        let mut r = ring.reduce(&keep[i], &others);
        normalize(&mut r);
        out.push(r);
    }
    out
}

/// An ideal of Q[x] with the weights defining the term order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal {
    generators: Vec<Poly>,
    weights: Vec<Rat>,
}

impl Ideal {
    /// Zero generators are dropped; an ideal needs at least one nonzero generator.
    pub fn new(generators: Vec<Poly>, weights: &[Rat]) -> Result<Self> {
        let n = weights.len();
        if let Some(p) = generators.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.nvars(),
            });
        }
        let generators: Vec<Poly> = generators.into_iter().filter(|p| !p.is_zero()).collect();
        if generators.is_empty() {
            return Err(Error::Precondition(
                "an ideal needs a nonzero generator".into(),
            ));
        }
        Ok(Ideal {
            generators,
            weights: weights.to_vec(),
        })
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    fn ring(&self) -> Ring {
        Ring {
            nvars: self.weights.len(),
            weights: self.weights.clone(),
            shifts: vec![Rat::zero()],
        }
    }
}

/// Reduced Gröbner basis, monic, sorted ascending by leading term.
pub fn groebner_basis(ideal: &Ideal) -> Vec<Poly> {
    let ring = ideal.ring();
    let gens = ideal
        .generators
        .iter()
        .map(|p| ring.elem(std::slice::from_ref(p)))
        .collect();
    buchberger(&ring, gens)
        .iter()
        .map(|e| ring.vector(e).remove(0))
        .collect()
}

/// Leading monomial of `p` in the weighted order.
pub fn leading_monomial(p: &Poly, weights: &[Rat]) -> Option<Monomial> {
    p.terms()
        .map(|(m, _)| (m.weighted_degree(weights), m))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| revlex(a.1, b.1)))
        .map(|(_, m)| m.clone())
}

/// Normal form of `p` modulo a Gröbner basis.
pub fn normal_form(p: &Poly, basis: &[Poly], weights: &[Rat]) -> Poly {
    let ring = Ring {
        nvars: weights.len(),
        weights: weights.to_vec(),
        shifts: vec![Rat::zero()],
    };
    let b: Vec<Elem> = basis
        .iter()
        .map(|g| ring.elem(std::slice::from_ref(g)))
        .collect();
    let r = ring.reduce(&ring.elem(std::slice::from_ref(p)), &b);
    ring.vector(&r).remove(0)
}

pub fn ideal_member(p: &Poly, ideal: &Ideal) -> bool {
    if p.is_zero() {
        return true;
    }
    normal_form(p, &groebner_basis(ideal), &ideal.weights).is_zero()
}

pub fn ideal_equal(a: &Ideal, b: &Ideal) -> bool {
    groebner_basis(a) == groebner_basis(b)
}

/// Whether every S-polynomial of `basis` reduces to zero.
pub fn is_groebner_basis(basis: &[Poly], weights: &[Rat]) -> bool {
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let (la, lb) = (
                leading_monomial(a, weights).unwrap(),
                leading_monomial(b, weights).unwrap(),
            );
            let l = la.lcm(&lb);
            let sa = a.mul_monomial(&l.div(&la).unwrap(), &(Rat::one() / a.coeff(&la)));
            let sb = b.mul_monomial(&l.div(&lb).unwrap(), &(Rat::one() / b.coeff(&lb)));
            if !normal_form(&(&sa - &sb), basis, weights).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Syzygies of a list of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct SyzygyModule {
    pub generators: Vec<Vec<Poly>>,
    pub target: Vec<Poly>,
}

impl SyzygyModule {
    /// Column shifts making each target entry's syzygy column graded.
    pub fn shifts(&self, weights: &[Rat]) -> Vec<Rat> {
        default_shifts(&self.target, weights)
    }
}

fn default_shifts(target: &[Poly], weights: &[Rat]) -> Vec<Rat> {
    target
        .iter()
        .map(|g| match g.weighted_degree(weights) {
            Ok(Degree::Finite(d)) => d,
            _ => Rat::zero(),
        })
        .collect()
}

/// Generators of `{v : sum v_k g_k = 0}`, from a Gröbner basis of the rows
/// `(g_k, e_k)` eliminating the first component.
pub fn syzygy_module(g: &[Poly], weights: &[Rat]) -> Result<SyzygyModule> {
    let n = weights.len();
    if g.is_empty() {
        return Err(Error::Precondition("syzygies of an empty list".into()));
    }
    if let Some(p) = g.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.nvars(),
        });
    }
    let m = g.len();
    let mut shifts = vec![Rat::zero()];
    shifts.extend(default_shifts(g, weights));
    let ring = Ring {
        nvars: n,
        weights: weights.to_vec(),
        shifts,
    };
    let rows: Vec<Elem> = (0..m)
        .map(|k| {
            let mut v = vec![Poly::zero(n); m + 1];
            v[0] = g[k].clone();
            v[k + 1] = Poly::one(n);
            ring.elem(&v)
        })
        .collect();
    let gb = buchberger(&ring, rows);
    let generators: Vec<Vec<Poly>> = gb
        .iter()
        .map(|e| ring.vector(e))
        .filter(|v| v[0].is_zero())
        .map(|mut v| {
            v.remove(0);
            v
        })
        .collect();
    let out = SyzygyModule {
        generators,
        target: g.to_vec(),
    };
    for v in &out.generators {
        let s = v
            .iter()
            .zip(g)
            .fold(Poly::zero(n), |acc, (a, b)| &acc + &(a * b));
        if !s.is_zero() {
            return Err(Error::Internal(
                "syzygy does not annihilate the target".into(),
            ));
        }
    }
    Ok(out)
}

/// Degree of a homogeneous vector under the given column shifts; `None` for
/// zero or inhomogeneous vectors.
pub fn vector_degree(v: &[Poly], weights: &[Rat], shifts: &[Rat]) -> Option<Rat> {
    let mut deg: Option<Rat> = None;
    for (p, s) in v.iter().zip(shifts) {
        if p.is_zero() {
            continue;
        }
        let Some(Degree::Finite(d)) = p.homogeneous_degree(weights) else {
            return None;
        };
        let d = d + s;
        match &deg {
            Some(e) if *e != d => return None,
            _ => deg = Some(d),
        }
    }
    deg
}

/// Homogeneous components of a vector, ascending by degree.
pub fn homogeneous_components(
    v: &[Poly],
    weights: &[Rat],
    shifts: &[Rat],
) -> Vec<(Rat, Vec<Poly>)> {
    let n = weights.len();
    let mut parts: BTreeMap<Rat, Vec<Poly>> = BTreeMap::new();
    for (k, (p, s)) in v.iter().zip(shifts).enumerate() {
        for (d, q) in p.homogeneous_parts(weights) {
            let slot = parts
                .entry(d + s)
                .or_insert_with(|| vec![Poly::zero(n); v.len()]);
            slot[k] = &slot[k] + &q;
        }
    }
    parts.into_iter().collect()
}

/// Gröbner basis of a submodule, for membership tests.
pub struct ModuleBasis {
    ring: Ring,
    basis: Vec<Elem>,
}

impl ModuleBasis {
    pub fn new(gens: &[Vec<Poly>], weights: &[Rat], shifts: &[Rat]) -> Self {
        let ring = Ring {
            nvars: weights.len(),
            weights: weights.to_vec(),
            shifts: shifts.to_vec(),
        };
        let elems = gens.iter().map(|v| ring.elem(v)).collect();
        let basis = buchberger(&ring, elems);
        ModuleBasis { ring, basis }
    }

    pub fn contains(&self, v: &[Poly]) -> bool {
        self.ring
            .reduce(&self.ring.elem(v), &self.basis)
            .terms
            .is_empty()
    }

    pub fn basis(&self) -> Vec<Vec<Poly>> {
        self.basis.iter().map(|e| self.ring.vector(e)).collect()
    }
}

/// Minimal homogeneous generators by graded Nakayama: after splitting into
/// homogeneous parts, visit by ascending degree and keep a vector only if it
/// is not in the submodule generated by those already kept.
pub fn minimal_graded_generators(
    module: &SyzygyModule,
    weights: &[Rat],
    shifts: &[Rat],
) -> Result<Vec<Vec<Poly>>> {
    if weights.iter().any(|w| *w <= Rat::zero()) {
        return Err(Error::InvalidWeights("weights must be positive".into()));
    }
    minimal_generators_of(&module.generators, weights, shifts)
}

pub fn minimal_generators_of(
    gens: &[Vec<Poly>],
    weights: &[Rat],
    shifts: &[Rat],
) -> Result<Vec<Vec<Poly>>> {
    let ring = Ring {
        nvars: weights.len(),
        weights: weights.to_vec(),
        shifts: shifts.to_vec(),
    };
    let mut pieces: Vec<(Rat, Key, Vec<Poly>)> = Vec::new();
    for v in gens {
        if v.len() != shifts.len() {
            return Err(Error::DimensionMismatch {
                expected: shifts.len(),
                found: v.len(),
            });
        }
        for (d, part) in homogeneous_components(v, weights, shifts) {
            let lead = ring.elem(&part).lead().map(|(k, _)| k.clone());
            if let Some(lead) = lead {
                pieces.push((d, lead, part));
            }
        }
    }
    pieces.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut kept: Vec<Vec<Poly>> = Vec::new();
    let mut basis: Vec<Elem> = Vec::new();
    for (_, _, v) in pieces {
        let e = ring.elem(&v);
        if ring.reduce(&e, &basis).terms.is_empty() {
            continue;
        }
        kept.push(v);
        let gens: Vec<Elem> = kept.iter().map(|k| ring.elem(k)).collect();
        basis = buchberger(&ring, gens);
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat};

    const V: [&str; 2] = ["x", "y"];

    fn p(s: &str) -> Poly {
        parse_poly(s, &V).unwrap()
    }

    fn ideal(gs: &[&str], w: &[i64]) -> Ideal {
        let w: Vec<Rat> = w.iter().map(|&x| rat(x)).collect();
        Ideal::new(gs.iter().map(|s| p(s)).collect(), &w).unwrap()
    }

    #[test]
    fn basis_examples() {
        assert_eq!(
            groebner_basis(&ideal(&["x", "y"], &[1, 1])),
            vec![p("y"), p("x")]
        );
        assert_eq!(
            groebner_basis(&ideal(&["-3x^2", "2y", "y^2 - x^3"], &[2, 3])),
            vec![p("y"), p("x^2")]
        );
        assert_eq!(groebner_basis(&ideal(&["x*y", "x"], &[1, 1])), vec![p("x")]);
    }

    #[test]
    fn membership_and_equality() {
        let i = ideal(&["x^2", "y"], &[2, 3]);
        assert!(ideal_member(&p("y^2 - x^3"), &i));
        assert!(!ideal_member(&p("x"), &i));
        assert!(ideal_member(&Poly::zero(2), &i));
        assert!(ideal_equal(
            &ideal(&["x", "y"], &[1, 1]),
            &ideal(&["y", "x"], &[1, 1])
        ));
        assert!(!ideal_equal(
            &ideal(&["x", "y"], &[1, 1]),
            &ideal(&["x^2", "y"], &[1, 1])
        ));
        assert!(ideal_equal(
            &ideal(&["x*y", "x"], &[1, 1]),
            &ideal(&["x"], &[1, 1])
        ));
    }

    #[test]
    fn syzygy_examples() {
        let w = [rat(1), rat(1)];
        let s = syzygy_module(&[p("x"), p("y")], &w).unwrap();
        let min = minimal_graded_generators(&s, &w, &s.shifts(&w)).unwrap();
        assert_eq!(min.len(), 1);
        assert_ne!(min[0][0].scale(&rat(-1)), min[0][1].scale(&rat(0)));
        assert_eq!(vector_degree(&min[0], &w, &s.shifts(&w)), Some(rat(2)));
        let s = syzygy_module(&[p("x")], &w).unwrap();
        assert!(s.generators.is_empty());
    }

    #[test]
    fn cusp_syzygies() {
        let w = [rat(2), rat(3)];
        let g = [p("-3x^2"), p("2y"), p("y^2 - x^3")];
        let s = syzygy_module(&g, &w).unwrap();
        let shifts = s.shifts(&w);
        let min = minimal_graded_generators(&s, &w, &shifts).unwrap();
        assert_eq!(min.len(), 2);
        let degs: Vec<Rat> = min
            .iter()
            .map(|v| vector_degree(v, &w, &shifts).unwrap() - rat(6))
            .collect();
        assert_eq!(degs, vec![rat(0), rat(1)]);
        let mb = ModuleBasis::new(&s.generators, &w, &shifts);
        assert!(mb.contains(&[p("2x"), p("3y"), rat_poly(-6)]));
        assert!(mb.contains(&[p("2y"), p("3x^2"), Poly::zero(2)]));
    }

    fn rat_poly(c: i64) -> Poly {
        Poly::constant(rat(c), 2)
    }
}
