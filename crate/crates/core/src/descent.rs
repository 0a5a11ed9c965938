//! The descent to a solvable lowest-weight action: equivariant splitting,
//! modification of the Euler derivation along an sl2 element, extraction of
//! a smooth component and the normal-crossing pipeline built on them.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor::{factor_irreducible, has_smooth_rational_point};
use crate::lie::{
    common_eigenvector, find_sl2_triple, generate_lie_algebra, killing_orthogonal, levi_subalgebra,
    restrict_to_mprime, split_annihilator, Eigen, LieAlgebra, LinearRep, Sl2Search, Sl2Triple,
};
use crate::linalg::{self, Q};
use crate::logder::{
    check_reduced, degree_audit, freeness_test, has_no_unit_coefficient, minors_vs_jacobian,
    suspension_split, Derivation, Freeness, SaitoMatrix, Suspension,
};
use crate::poly::{default_var_names, CoordinateMap, Degree, Monomial, Poly, Rat};
use crate::weights::{find_weight_system, WeightSystem};

fn strings(ps: &[Poly], vars: &[String]) -> Vec<String> {
    ps.iter().map(|p| p.to_string_with(vars)).collect()
}

fn rat_strings(rs: &[Rat]) -> Vec<String> {
    rs.iter().map(|r| r.to_string()).collect()
}

/// Monomials of weighted degree exactly `target` and total degree at least two.
fn decomposable_monomials(weights: &[Rat], target: &Rat) -> Vec<Monomial> {
    fn rec(weights: &[Rat], i: usize, left: &Rat, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            if left.is_zero() && cur.iter().sum::<u32>() >= 2 {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        let mut rest = left.clone();
        let mut e = 0u32;
        while !rest.is_negative() {
            cur[i] = e;
            rec(weights, i + 1, &rest, cur, out);
            rest -= &weights[i];
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(weights, 0, target, &mut vec![0; weights.len()], &mut out);
    out
}

/// Variables grouped by weight, ascending.
fn levels(weights: &[Rat]) -> BTreeMap<Rat, Vec<usize>> {
    let mut out: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, w) in weights.iter().enumerate() {
        out.entry(w.clone()).or_default().push(i);
    }
    out
}

/// Coefficient matrix of a derivation on the variables of one level:
/// entry `(a, b)` is the coefficient of `x_{level[a]}` in `δ(x_{level[b]})`.
fn level_matrix(d: &Derivation, level: &[usize]) -> Vec<Vec<Rat>> {
    level
        .iter()
        .map(|&a| level.iter().map(|&b| d.coeff(b).linear_coeff(a)).collect())
        .collect()
}

fn linear_form(coeffs: &[Rat], vars: &[usize], n: usize) -> Poly {
    let mut p = Poly::zero(n);
    for (c, &v) in coeffs.iter().zip(vars) {
        if !c.is_zero() {
            p.add_term(Monomial::var(v, n), c.clone());
        }
    }
    p
}

/// Section of `m_w -> m_w / (m^2)_w` commuting with the degree-zero
/// derivations `s`: new variables `x_i + q_i` with `q_i` in `(m^2)_w` for the
/// variables of weight `w`, in level order.
pub fn equivariant_splitting(s: &[Derivation], weights: &[Rat], w: &Rat) -> Result<Vec<Poly>> {
    let n = weights.len();
    let level: Vec<usize> = (0..n).filter(|&i| weights[i] == *w).collect();
    let vars: Vec<Poly> = level.iter().map(|&i| Poly::var(i, n)).collect();
    for (idx, d) in s.iter().enumerate() {
        match d.homogeneous_degree(weights) {
            Some(Degree::Finite(e)) if e.is_zero() => {}
            Some(Degree::MinusInfinity) => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "splitting derivation {idx} is not homogeneous of degree zero"
                )))
            }
        }
    }
    let basis = decomposable_monomials(weights, w);
    if basis.is_empty() || s.is_empty() {
        return Ok(vars);
    }
    let pos: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(b, m)| (m, b)).collect();
    let coords = |p: &Poly| -> Result<Vec<Rat>> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (m, c) in p.terms() {
            let b = pos.get(m).ok_or_else(|| {
                Error::Precondition(
                    "derivation does not preserve the square of the maximal ideal".into(),
                )
            })?;
            v[*b] = c.clone();
        }
        Ok(v)
    };
    let (k, nb) = (level.len(), basis.len());
    let unknowns = k * nb;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for d in s {
        let c = level_matrix(d, &level);
        let images: Vec<Vec<Rat>> = basis
            .iter()
            .map(|m| coords(&d.apply(&Poly::monomial(m.clone(), Rat::one()))?))
            .collect::<Result<_>>()?;
        for i in 0..k {
            let linear = linear_form(
                &(0..k).map(|j| c[j][i].clone()).collect::<Vec<_>>(),
                &level,
                n,
            );
            let nonlinear = coords(&(d.coeff(level[i]) - &linear))?;
            // d(q_i) - sum_j c[j][i] q_j = -nonlinear
            let mut block = vec![vec![Rat::zero(); unknowns]; nb];
            for (b, img) in images.iter().enumerate() {
                for (r, x) in img.iter().enumerate() {
                    block[r][i * nb + b] += x;
                }
            }
            for j in 0..k {
                if c[j][i].is_zero() {
                    continue;
                }
                for b in 0..nb {
                    block[b][j * nb + b] -= &c[j][i];
                }
            }
            rows.extend(block);
            rhs.extend(nonlinear.into_iter().map(|x| -x));
        }
    }
    let sol = linalg::solve(&Q, &rows, &rhs)
        .ok_or_else(|| Error::Infeasible("equivariant splitting".into()))?;
    Ok((0..k)
        .map(|i| {
            let mut p = vars[i].clone();
            for (b, m) in basis.iter().enumerate() {
                let c = &sol[i * nb + b];
                if !c.is_zero() {
                    p.add_term(m.clone(), c.clone());
                }
            }
            p
        })
        .collect())
}

/// Whether every `δ` in `s` maps each new variable to a linear combination of
/// the new variables of the same level, with the coefficients of its linear
/// part.
pub fn is_equivariant(
    s: &[Derivation],
    weights: &[Rat],
    level: &[usize],
    images: &[Poly],
) -> Result<bool> {
    let n = weights.len();
    for d in s {
        let c = level_matrix(d, level);
        for i in 0..level.len() {
            let lhs = d.apply(&images[i])?;
            let rhs =
                (0..level.len()).fold(Poly::zero(n), |acc, j| &acc + &images[j].scale(&c[j][i]));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `min(w_1, gap) / (2 (H + 1))` with `H` the largest absolute `h`-eigenvalue
/// and `gap` the least positive distance of a weight above `w_1`.
pub fn select_epsilon(w: &WeightSystem, h: &[Rat]) -> Result<Rat> {
    let w1 = w.min_weight().clone();
    let low = w.lowest_weight_vars();
    if !low.iter().any(|&i| h[i].is_negative()) {
        return Err(Error::Precondition(
            "h has no negative eigenvalue on the lowest-weight variables".into(),
        ));
    }
    let big = h.iter().map(|x| x.abs()).max().unwrap();
    let gap = w
        .weights()
        .iter()
        .map(|wi| wi - &w1)
        .filter(|g| g.is_positive())
        .min()
        .unwrap_or_else(|| w1.clone());
    let two = Rat::from_integer(2.into());
    Ok(w1.min(gap) / (two * (big + Rat::one())))
}

/// One modification of the Euler derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// The triple, in the coordinates before the step.
    pub triple: Sl2Triple<Derivation>,
    /// New variables in terms of the previous ones.
    pub change: CoordinateMap,
    pub h_eigenvalues: Vec<Rat>,
    pub epsilon: Rat,
    pub weights_before: WeightSystem,
    pub weights_after: WeightSystem,
    pub mprime_before: usize,
    pub mprime_after: usize,
}

impl StepRecord {
    pub fn to_json(&self, iteration: usize) -> Value {
        let vars = default_var_names(self.weights_before.nvars());
        json!({
            "iteration": iteration,
            "triple": {
                "h": self.triple.h.to_string_with(&vars),
                "e": self.triple.e.to_string_with(&vars),
                "f": self.triple.f.to_string_with(&vars),
            },
            "coordinate_change": strings(self.change.images(), &vars),
            "h_eigenvalues": rat_strings(&self.h_eigenvalues),
            "epsilon": self.epsilon.to_string(),
            "weights_before": self.weights_before,
            "weights_after": self.weights_after,
            "lowest_weight_dim_before": self.mprime_before,
            "lowest_weight_dim_after": self.mprime_after,
        })
    }
}

/// State of the descent: the divisor in current coordinates, the current
/// weights, the annihilator and its action on the lowest-weight variables.
#[derive(Clone, Debug)]
pub struct DescentState {
    pub f: Poly,
    pub weights: WeightSystem,
    /// Current variables in terms of the starting ones.
    pub forward: CoordinateMap,
    /// Starting variables in terms of the current ones.
    pub backward: CoordinateMap,
    pub annihilator: LieAlgebra,
    pub degree_zero: LieAlgebra,
    pub mprime: Vec<usize>,
    pub rep: LinearRep,
    pub history: Vec<StepRecord>,
}

impl DescentState {
    /// Start from a free divisor whose basis has non-positive degrees and no
    /// unit coefficients.
    pub fn new(f: &Poly, w: &WeightSystem) -> Result<Self> {
        let s = match freeness_test(f, w)? {
            Freeness::Free(s) => s,
            Freeness::NotFree { .. } => {
                return Err(Error::Precondition("divisor is not free".into()))
            }
        };
        Self::from_saito(f, &s)
    }

    pub fn from_saito(f: &Poly, s: &SaitoMatrix) -> Result<Self> {
        if let Some(e) = s.degrees.iter().find(|e| e.is_positive()) {
            return Err(Error::Precondition(format!(
                "basis has an element of positive degree {e}"
            )));
        }
        if !has_no_unit_coefficient(s) {
            return Err(Error::Precondition(
                "a basis element has a unit coefficient (suspended divisor)".into(),
            ));
        }
        let w = &s.weights;
        let d = generate_lie_algebra(&s.basis, w.weights(), None)?;
        let a = split_annihilator(&d, w.weights(), f)?;
        let n = f.nvars();
        Self::assemble(
            f.clone(),
            w.clone(),
            a.algebra,
            CoordinateMap::identity(n),
            CoordinateMap::identity(n),
            vec![],
        )
    }

    /// Start from explicit annihilating derivations, closed under brackets.
    pub fn from_annihilator(f: &Poly, w: &WeightSystem, gens: &[Derivation]) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if !g.apply(f)?.is_zero() {
                return Err(Error::NotLogarithmic { index: i });
            }
        }
        let a = generate_lie_algebra(gens, w.weights(), None)?;
        let n = f.nvars();
        Self::assemble(
            f.clone(),
            w.clone(),
            a,
            CoordinateMap::identity(n),
            CoordinateMap::identity(n),
            vec![],
        )
    }

    fn assemble(
        f: Poly,
        weights: WeightSystem,
        annihilator: LieAlgebra,
        forward: CoordinateMap,
        backward: CoordinateMap,
        history: Vec<StepRecord>,
    ) -> Result<Self> {
        if f.homogeneous_degree(weights.weights()) != Some(Degree::Finite(weights.degree().clone()))
        {
            return Err(Error::Internal(
                "Euler derivation no longer scales f by its degree".into(),
            ));
        }
        let degree_zero = annihilator.subalgebra(&annihilator.graded_part(&Rat::zero()))?;
        let mprime = weights.lowest_weight_vars();
        let rep = restrict_to_mprime(&degree_zero, &mprime)?;
        Ok(DescentState {
            f,
            weights,
            forward,
            backward,
            annihilator,
            degree_zero,
            mprime,
            rep,
            history,
        })
    }

    pub fn mprime_dim(&self) -> usize {
        self.mprime.len()
    }

    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    pub fn is_solvable(&self) -> Result<bool> {
        self.rep.is_solvable()
    }

    pub fn to_json(&self) -> Value {
        let vars = default_var_names(self.f.nvars());
        json!({
            "f": self.f.to_string_with(&vars),
            "weights": self.weights,
            "lowest_weight_variables": self.mprime.iter().map(|&i| vars[i].clone()).collect::<Vec<_>>(),
            "annihilator": self.annihilator.to_json(),
            "restricted_dimension": self.rep.image().map(|(a, _)| a.dim()).unwrap_or(0),
            "iterations": self.iterations(),
            "forward": strings(self.forward.images(), &vars),
        })
    }
}

/// An sl2-triple inside the degree-zero annihilator acting faithfully on the
/// lowest-weight variables.
fn lowest_weight_triple(state: &DescentState) -> Result<Sl2Triple<Derivation>> {
    let a0 = &state.degree_zero;
    let levi = levi_subalgebra(a0)?;
    let s = a0.subalgebra(&levi)?;
    let kernel = restrict_to_mprime(&s, &state.mprime)?.kernel();
    let faithful = killing_orthogonal(&s, &kernel);
    let t = s.subalgebra(&faithful)?;
    let triple = match find_sl2_triple(&t, false)? {
        Some(Sl2Search::Rational(t)) => t,
        Some(Sl2Search::Quadratic { .. }) => unreachable!("extension disabled"),
        None => {
            return Err(Error::Internal(
                "semisimple part acting on lowest weights is solvable".into(),
            ))
        }
    };
    let el = |v: &[Rat]| t.element(v).expect("derivation-backed");
    Ok(Sl2Triple {
        h: el(&triple.h),
        e: el(&triple.e),
        f: el(&triple.f),
    })
}

/// Per-level eigenbasis of a derivation acting linearly on each weight level;
/// identity on levels where it is already diagonal. Returns the new variables
/// in terms of the old ones and the eigenvalue of each new variable.
fn diagonalize_levels(h: &Derivation, weights: &[Rat]) -> Result<(CoordinateMap, Vec<Rat>)> {
    let n = weights.len();
    let mut images: Vec<Poly> = (0..n).map(|i| Poly::var(i, n)).collect();
    let mut eig = vec![Rat::zero(); n];
    for level in levels(weights).values() {
        let m = level_matrix(h, level);
        for (b, &slot) in level.iter().enumerate() {
            let col: Vec<Rat> = (0..level.len()).map(|a| m[a][b].clone()).collect();
            if *h.coeff(slot) != linear_form(&col, level, n) {
                return Err(Error::Internal(
                    "sl2 action is not linear after splitting".into(),
                ));
            }
        }
        let diagonal =
            (0..level.len()).all(|a| (0..level.len()).all(|b| a == b || m[a][b].is_zero()));
        if diagonal {
            for (a, &slot) in level.iter().enumerate() {
                eig[slot] = m[a][a].clone();
            }
            continue;
        }
        let (roots, obstructions) = Q.eigenvalues(&m);
        if !obstructions.is_empty() {
            return Err(Error::Internal("h has irrational eigenvalues".into()));
        }
        let mut vecs: Vec<(Rat, Vec<Rat>)> = Vec::new();
        for r in roots {
            let shifted: Vec<Vec<Rat>> = (0..level.len())
                .map(|a| {
                    (0..level.len())
                        .map(|b| {
                            if a == b {
                                &m[a][b] - &r
                            } else {
                                m[a][b].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            for v in linalg::span_basis(&Q, &linalg::nullspace(&Q, &shifted, level.len())) {
                vecs.push((r.clone(), v));
            }
        }
        if vecs.len() != level.len() {
            return Err(Error::Internal("h is not diagonalizable".into()));
        }
        for (a, (r, v)) in vecs.into_iter().enumerate() {
            images[level[a]] = linear_form(&v, level, n);
            eig[level[a]] = r;
        }
    }
    Ok((CoordinateMap::new_unchecked(images, n), eig))
}

/// Replace the Euler derivation by `χ + ε h` for an sl2-triple in the
/// degree-zero annihilator, after making the triple act linearly and `h`
/// diagonal. The lowest-weight space strictly shrinks.
pub fn chi_step(state: &DescentState) -> Result<DescentState> {
    if state.is_solvable()? {
        return Err(Error::Precondition(
            "restricted annihilator is already solvable".into(),
        ));
    }
    let n = state.f.nvars();
    let w = state.weights.weights();
    let triple = lowest_weight_triple(state)?;
    let s = [triple.h.clone(), triple.e.clone(), triple.f.clone()];

    // new variables on which the triple acts linearly
    let mut split: Vec<Poly> = (0..n).map(|i| Poly::var(i, n)).collect();
    for (wt, level) in levels(w) {
        let images = equivariant_splitting(&s, w, &wt)?;
        if !is_equivariant(&s, w, &level, &images)? {
            return Err(Error::Internal("splitting is not equivariant".into()));
        }
        for (slot, p) in level.iter().zip(images) {
            split[*slot] = p;
        }
    }
    let phi1 = CoordinateMap::new(split, w)?;
    let psi1 = phi1.inverse(w)?;
    let h1 = triple.h.transport(&psi1, &phi1)?;

    let (phi2, eig) = diagonalize_levels(&h1, w)?;
    let phi2 = CoordinateMap::new(phi2.images().to_vec(), w)?;
    let psi2 = phi2.inverse(w)?;
    let h2 = h1.transport(&psi2, &phi2)?;
    let expected: Vec<Poly> = (0..n).map(|i| Poly::var(i, n).scale(&eig[i])).collect();
    if h2.coeffs() != expected.as_slice() {
        return Err(Error::Internal(
            "h is not diagonal in the new coordinates".into(),
        ));
    }

    let phi = phi2.then(&phi1);
    let psi = psi1.then(&psi2);
    let f_new = psi.apply(&state.f)?;
    let epsilon = select_epsilon(&state.weights, &eig)?;
    let new_w: Vec<Rat> = w
        .iter()
        .zip(&eig)
        .map(|(wi, hi)| wi + &epsilon * hi)
        .collect();
    let new_ws = WeightSystem::new(new_w.clone(), state.weights.degree().clone())?;
    if f_new.homogeneous_degree(&new_w) != Some(Degree::Finite(state.weights.degree().clone())) {
        return Err(Error::Internal(
            "modified Euler derivation does not scale f by its degree".into(),
        ));
    }

    let mut parts = Vec::new();
    for d in state.annihilator.elements().unwrap() {
        for (_, p) in d.transport(&psi, &phi)?.homogeneous_parts(&new_w) {
            parts.push(p);
        }
    }
    let annihilator = generate_lie_algebra(&parts, &new_w, None)?;
    if annihilator.dim() != state.annihilator.dim() {
        return Err(Error::Internal(
            "annihilator changed dimension under regrading".into(),
        ));
    }
    let mut history = state.history.clone();
    let record = StepRecord {
        triple,
        change: phi.clone(),
        h_eigenvalues: eig,
        epsilon,
        weights_before: state.weights.clone(),
        weights_after: new_ws.clone(),
        mprime_before: state.mprime_dim(),
        mprime_after: new_ws.lowest_weight_vars().len(),
    };
    history.push(record);
    let next = DescentState::assemble(
        f_new,
        new_ws,
        annihilator,
        phi.then(&state.forward),
        state.backward.then(&psi),
        history,
    )?;
    if next.mprime_dim() >= state.mprime_dim() {
        return Err(Error::Internal(format!(
            "lowest-weight space did not shrink ({} -> {})",
            state.mprime_dim(),
            next.mprime_dim()
        )));
    }
    Ok(next)
}

/// Iterates `chi_step` until the restricted annihilator is solvable.
pub fn descend_to_solvable(state: DescentState) -> Result<DescentState> {
    let bound = state.mprime_dim().saturating_sub(1);
    let mut cur = state;
    let start = cur.iterations();
    while !cur.is_solvable()? {
        cur = chi_step(&cur)?;
        if cur.iterations() - start > bound {
            return Err(Error::Internal(
                "descent exceeded its iteration bound".into(),
            ));
        }
    }
    Ok(cur)
}

/// A linear factor of `f` found as a common eigenvector of the solvable
/// lowest-weight action.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothComponentCertificate {
    /// The factor in the current coordinates of the descent.
    pub form: Poly,
    /// The factor in the starting coordinates.
    pub form_original: Poly,
    /// Cofactor in the starting coordinates: `f = form_original * cofactor`.
    pub cofactor: Poly,
    pub vector: Vec<Rat>,
    pub eigenvalues: Vec<Rat>,
    /// Linear change making the factor a variable, at index `slot`.
    pub change: CoordinateMap,
    pub slot: usize,
}

impl SmoothComponentCertificate {
    pub fn to_json(&self) -> Value {
        let vars = default_var_names(self.form.nvars());
        json!({
            "form": self.form.to_string_with(&vars),
            "form_original": self.form_original.to_string_with(&vars),
            "cofactor": self.cofactor.to_string_with(&vars),
            "eigenvector": rat_strings(&self.vector),
            "eigenvalues": rat_strings(&self.eigenvalues),
            "variable": vars[self.slot].clone(),
        })
    }
}

pub fn smooth_component(state: &DescentState) -> Result<SmoothComponentCertificate> {
    if !state.is_solvable()? {
        return Err(Error::Precondition(
            "restricted annihilator is not solvable".into(),
        ));
    }
    let ev = common_eigenvector(&state.rep, false)?;
    let (v, lambdas) = ev.rational().expect("rational eigenvector");
    let n = state.f.nvars();
    let form = linear_form(v, &state.mprime, n);
    let cofactor_cur = state
        .f
        .exact_div(&form)?
        .ok_or_else(|| Error::Internal("common eigenvector does not divide f".into()))?;
    let p = v.iter().position(|c| !c.is_zero()).unwrap();
    let slot = state.mprime[p];
    let mut images: Vec<Poly> = (0..n).map(|i| Poly::var(i, n)).collect();
    images[slot] = form.clone();
    let change = CoordinateMap::new(images, state.weights.weights())?;
    let form_original = state.forward.apply(&form)?;
    let cofactor = state.forward.apply(&cofactor_cur)?;
    if state.forward.apply(&state.f)? != &form_original * &cofactor {
        return Err(Error::Internal("smooth component does not factor f".into()));
    }
    Ok(SmoothComponentCertificate {
        form,
        form_original,
        cofactor,
        vector: v.to_vec(),
        eigenvalues: lambdas.to_vec(),
        change,
        slot,
    })
}

/// Invariants of one irreducible component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub component: Poly,
    pub weights: WeightSystem,
    pub smooth: bool,
    pub free: bool,
    pub degrees: Option<Vec<Rat>>,
    pub minors_equal: Option<bool>,
    pub nonpositive: Option<bool>,
}

impl ComponentReport {
    pub fn to_json(&self, vars: &[String]) -> Value {
        json!({
            "component": self.component.to_string_with(vars),
            "weights": self.weights,
            "smooth": self.smooth,
            "free": self.free,
            "degrees": self.degrees.as_ref().map(|d| rat_strings(d)),
            "minors_equal_jacobian": self.minors_equal,
            "nonpositive_degrees": self.nonpositive,
        })
    }
}

/// Factor `f` and test each component with the weights of `f`.
pub fn component_descent(f: &Poly, w: &WeightSystem) -> Result<Vec<ComponentReport>> {
    check_reduced(f)?;
    let (_, factors) = factor_irreducible(f);
    factors
        .into_iter()
        .map(|(g, _)| {
            let gw = WeightSystem::for_poly(w.weights().to_vec(), &g)?;
            let smooth = !g.linear_part().is_zero();
            Ok(match freeness_test(&g, &gw)? {
                Freeness::Free(s) => {
                    let minors = minors_vs_jacobian(&s, &g)?;
                    let audit = degree_audit(&s, &g, &gw)?;
                    ComponentReport {
                        component: g,
                        weights: gw,
                        smooth,
                        free: true,
                        degrees: Some(s.degrees.clone()),
                        minors_equal: Some(minors.equal),
                        nonpositive: Some(audit.nonpositive),
                    }
                }
                Freeness::NotFree { .. } => ComponentReport {
                    component: g,
                    weights: gw,
                    smooth,
                    free: false,
                    degrees: None,
                    minors_equal: None,
                    nonpositive: None,
                },
            })
        })
        .collect()
}

/// Normal-crossing certificate: new coordinates in which `f` is a unit times
/// a product of distinct variables.
#[derive(Clone, Debug, PartialEq)]
pub struct NcCertificate {
    pub unit: Rat,
    pub components: Vec<Poly>,
    /// New variables in terms of the original ones.
    pub coordinates: CoordinateMap,
    /// Original variables in terms of the new ones.
    pub inverse: CoordinateMap,
    /// Indices of the new variables whose product is `f / unit`.
    pub positions: Vec<usize>,
    pub weights: WeightSystem,
}

impl NcCertificate {
    /// `unit * prod y_{positions}` in the new variables.
    pub fn normal_form(&self) -> Poly {
        let n = self.weights.nvars();
        self.positions
            .iter()
            .fold(Poly::constant(self.unit.clone(), n), |acc, &i| {
                &acc * &Poly::var(i, n)
            })
    }

    pub fn to_json(&self, vars: &[String]) -> Value {
        let new_vars: Vec<String> = (1..=vars.len()).map(|i| format!("y{i}")).collect();
        json!({
            "unit": self.unit.to_string(),
            "components": strings(&self.components, vars),
            "coordinates": strings(self.coordinates.images(), vars),
            "inverse": strings(self.inverse.images(), &new_vars),
            "normal_form": self.normal_form().to_string_with(&new_vars),
            "weights": self.weights,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Certified(NcCertificate),
    Refuted { stage: String, reason: String },
    Inconclusive { stage: String, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub verdict: Verdict,
    pub weights: WeightSystem,
    pub trace: Vec<Value>,
}

enum Outcome {
    Components(Rat, Vec<Poly>),
    Stop(Verdict),
}

fn refuted(stage: &str, reason: String) -> Outcome {
    Outcome::Stop(Verdict::Refuted {
        stage: stage.into(),
        reason,
    })
}

fn inconclusive(stage: &str, reason: String) -> Outcome {
    Outcome::Stop(Verdict::Inconclusive {
        stage: stage.into(),
        reason,
    })
}

/// Refutation or doubt when some basis degree is positive.
fn positive_degree_outcome(f: &Poly, degrees: &[Rat]) -> Outcome {
    let vars = default_var_names(f.nvars());
    let d = degrees.iter().max().unwrap();
    let (_, factors) = factor_irreducible(f);
    if factors.len() == 1 {
        return if has_smooth_rational_point(f) {
            refuted(
                "degree_audit",
                format!(
                    "basis element of degree {d} > 0 on an absolutely irreducible divisor: \
                     not normal crossing in codimension one"
                ),
            )
        } else {
            inconclusive(
                "degree_audit",
                format!(
                    "basis element of degree {d} > 0, but the divisor may split over an extension"
                ),
            )
        };
    }
    // elementary germ argument on the components
    for (g, _) in &factors {
        if g.linear_part().is_zero() && has_smooth_rational_point(g) {
            return refuted(
                "components",
                format!(
                    "component {} is singular at the origin",
                    g.to_string_with(&vars)
                ),
            );
        }
    }
    if factors.iter().all(|(g, _)| !g.linear_part().is_zero()) {
        let rows: Vec<Vec<Rat>> = factors
            .iter()
            .map(|(g, _)| (0..f.nvars()).map(|i| g.linear_coeff(i)).collect())
            .collect();
        if linalg::rank(&Q, &rows) < rows.len() {
            return refuted(
                "components",
                "linear parts of the components are dependent".into(),
            );
        }
    }
    inconclusive(
        "degree_audit",
        format!("basis element of degree {d} > 0 on a reducible divisor"),
    )
}

fn split_components(f: &Poly, w: &WeightSystem, trace: &mut Vec<Value>) -> Result<Outcome> {
    if f.is_constant() {
        return Ok(Outcome::Components(f.constant_term(), vec![]));
    }
    let n = f.nvars();
    let vars = default_var_names(n);
    let s = match freeness_test(f, w).map_err(|e| e.at_stage("freeness"))? {
        Freeness::Free(s) => s,
        Freeness::NotFree { generators } => {
            trace.push(
                json!({"stage": "freeness", "f": f.to_string_with(&vars), "free": false,
                              "generators": generators.len()}),
            );
            return Ok(refuted(
                "freeness",
                format!("{} is not free", f.to_string_with(&vars)),
            ));
        }
    };
    trace.push(
        json!({"stage": "freeness", "f": f.to_string_with(&vars), "free": true,
                      "degrees": rat_strings(&s.degrees)}),
    );
    let (f1, s1, lift) = match suspension_split(&s, f, w).map_err(|e| e.at_stage("suspension"))? {
        Suspension::NotSuspended => (f.clone(), s, None),
        Suspension::Split(sp) => {
            let reduced_vars: Vec<String> = sp.kept.iter().map(|&i| vars[i].clone()).collect();
            trace.push(json!({"stage": "suspension", "kept": reduced_vars,
                              "reduced": sp.f.to_string_with(&reduced_vars)}));
            let s1 =
                match freeness_test(&sp.f, &sp.weights).map_err(|e| e.at_stage("suspension"))? {
                    Freeness::Free(s1) => s1,
                    Freeness::NotFree { .. } => {
                        return Err(Error::Internal("suspension factor is not free".into()))
                    }
                };
            (sp.f.clone(), s1, Some((sp.kept, sp.chain)))
        }
    };
    let w1 = s1.weights.clone();
    let audit = degree_audit(&s1, &f1, &w1).map_err(|e| e.at_stage("degree_audit"))?;
    let minors = minors_vs_jacobian(&s1, &f1).map_err(|e| e.at_stage("minors"))?;
    trace.push(
        json!({"stage": "degree_audit", "degrees": rat_strings(&audit.degrees),
                      "nonpositive": audit.nonpositive, "formula_holds": audit.formula_holds,
                      "minors_equal_jacobian": minors.equal}),
    );
    if !audit.nonpositive {
        return Ok(positive_degree_outcome(&f1, &audit.degrees));
    }
    let state = DescentState::from_saito(&f1, &s1).map_err(|e| e.at_stage("descent"))?;
    let state = descend_to_solvable(state).map_err(|e| e.at_stage("descent"))?;
    for (i, r) in state.history.iter().enumerate() {
        trace.push(json!({"stage": "chi_step", "step": r.to_json(i)}));
    }
    let cert = smooth_component(&state).map_err(|e| e.at_stage("smooth_component"))?;
    let (form, cofactor) = match &lift {
        None => (cert.form_original.clone(), cert.cofactor.clone()),
        Some((kept, chain)) => (
            chain.apply(&cert.form_original.rename(kept, n))?,
            chain.apply(&cert.cofactor.rename(kept, n))?,
        ),
    };
    if &form * &cofactor != *f {
        return Err(Error::Internal(
            "component and cofactor do not multiply to f".into(),
        ));
    }
    trace.push(
        json!({"stage": "smooth_component", "component": form.to_string_with(&vars),
                      "cofactor": cofactor.to_string_with(&vars)}),
    );
    if cofactor.is_constant() {
        return Ok(Outcome::Components(cofactor.constant_term(), vec![form]));
    }
    let cw = match find_weight_system(&cofactor) {
        Some(cw) => cw,
        None => WeightSystem::for_poly(w.weights().to_vec(), &cofactor)?,
    };
    let same = {
        let scale = &cw.weights()[0] / &w.weights()[0];
        cw.weights()
            .iter()
            .zip(w.weights())
            .all(|(a, b)| *a == b * &scale)
    };
    trace.push(json!({"stage": "cofactor_weights", "weights": cw, "changed": !same}));
    Ok(match split_components(&cofactor, &cw, trace)? {
        Outcome::Components(u, mut cs) => {
            cs.insert(0, form);
            Outcome::Components(u, cs)
        }
        stop => stop,
    })
}

/// Coordinates extending the components, one weight level at a time.
fn assemble_certificate(
    f: &Poly,
    w: &WeightSystem,
    unit: Rat,
    components: Vec<Poly>,
) -> Result<Verdict> {
    let n = f.nvars();
    let weights = w.weights();
    let mut images: Vec<Option<Poly>> = vec![None; n];
    let mut positions = Vec::new();
    for (wt, level) in levels(weights) {
        let here: Vec<&Poly> = components
            .iter()
            .filter(|c| c.homogeneous_degree(weights) == Some(Degree::Finite(wt.clone())))
            .collect();
        let rows: Vec<Vec<Rat>> = here
            .iter()
            .map(|c| level.iter().map(|&i| c.linear_coeff(i)).collect())
            .collect();
        if linalg::rank(&Q, &rows) < rows.len() {
            return Ok(Verdict::Refuted {
                stage: "assembly".into(),
                reason: "component linear parts are dependent".into(),
            });
        }
        let mut slots = level.iter();
        for c in &here {
            let slot = *slots.next().unwrap();
            images[slot] = Some((*c).clone());
            positions.push(slot);
        }
        for e in linalg::complement(&Q, &rows, level.len()) {
            let slot = *slots.next().unwrap();
            images[slot] = Some(linear_form(&e, &level, n));
        }
    }
    let placed: usize = positions.len();
    if placed != components.len() {
        return Ok(Verdict::Refuted {
            stage: "assembly".into(),
            reason: "a component is not weighted homogeneous of a variable weight".into(),
        });
    }
    let coordinates =
        CoordinateMap::new(images.into_iter().map(|p| p.unwrap()).collect(), weights)?;
    let inverse = coordinates.inverse(weights)?;
    positions.sort_unstable();
    let cert = NcCertificate {
        unit,
        components,
        coordinates,
        inverse,
        positions,
        weights: w.clone(),
    };
    // re-substitution in both directions
    if cert.coordinates.apply(&cert.normal_form())? != *f
        || cert.inverse.apply(f)? != cert.normal_form()
    {
        return Err(Error::Internal("certificate fails re-substitution".into()));
    }
    Ok(Verdict::Certified(cert))
}

/// Certify or refute normal crossings for a reduced weighted homogeneous `f`.
pub fn certify_normal_crossing(f: &Poly, w: Option<&WeightSystem>) -> Result<Certification> {
    let w = match w {
        Some(w) => w.clone(),
        None => find_weight_system(f)
            .ok_or_else(|| Error::Precondition("no positive weights make f homogeneous".into()))
            .map_err(|e| e.at_stage("weights"))?,
    };
    if f.homogeneous_degree(w.weights()) != Some(Degree::Finite(w.degree().clone())) {
        return Err(Error::NotHomogeneous.at_stage("weights"));
    }
    check_reduced(f).map_err(|e| e.at_stage("reduced"))?;
    let mut trace = Vec::new();
    let verdict = match split_components(f, &w, &mut trace)? {
        Outcome::Components(u, cs) => {
            assemble_certificate(f, &w, u, cs).map_err(|e| e.at_stage("assembly"))?
        }
        Outcome::Stop(v) => v,
    };
    Ok(Certification {
        verdict,
        weights: w,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat, rat_frac};

    const V: [&str; 4] = ["x", "y", "z", "w"];

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, &V[..n]).unwrap()
    }

    fn der(cs: &[&str]) -> Derivation {
        Derivation::new(cs.iter().map(|c| p(c, cs.len())).collect())
    }

    fn ws(w: &[i64], d: i64) -> WeightSystem {
        WeightSystem::new(w.iter().map(|&x| rat(x)).collect(), rat(d)).unwrap()
    }

    fn sl2_on_xy(n: usize) -> Vec<Derivation> {
        let mut zero = vec!["0"; n];
        let mut e = zero.clone();
        e[1] = "x";
        let mut f = zero.clone();
        f[0] = "y";
        zero[0] = "x";
        zero[1] = "-y";
        vec![der(&e), der(&f), der(&zero)]
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(
            select_epsilon(&ws(&[1, 1], 2), &[rat(1), rat(-1)]).unwrap(),
            rat_frac(1, 4)
        );
        assert_eq!(
            select_epsilon(&ws(&[1, 1, 2], 2), &[rat(1), rat(-1), rat(0)]).unwrap(),
            rat_frac(1, 4)
        );
        assert!(select_epsilon(&ws(&[1, 1], 2), &[rat(0), rat(0)]).is_err());
    }

    #[test]
    fn splitting_lowest_level_is_identity() {
        let s = sl2_on_xy(3);
        let w = [rat(1), rat(1), rat(2)];
        let imgs = equivariant_splitting(&s, &w, &rat(1)).unwrap();
        assert_eq!(imgs, vec![p("x", 3), p("y", 3)]);
        assert_eq!(
            equivariant_splitting(&[], &w, &rat(2)).unwrap(),
            vec![p("z", 3)]
        );
    }

    #[test]
    fn splitting_corrects_upper_level() {
        // sl2 acting on x, y and on z through z -> z + x*y-type terms:
        // conjugate the standard action by z = z' - x*y
        let w = [rat(1), rat(1), rat(2)];
        let to_old = CoordinateMap::new(vec![p("x", 3), p("y", 3), p("z - x*y", 3)], &w).unwrap();
        let to_new = to_old.inverse(&w).unwrap();
        let s: Vec<Derivation> = sl2_on_xy(3)
            .iter()
            .map(|d| d.transport(&to_new, &to_old).unwrap())
            .collect();
        // the trivial z-slot is now nonlinear
        assert!(s.iter().any(|d| !d.coeff(2).is_zero()));
        let imgs = equivariant_splitting(&s, &w, &rat(2)).unwrap();
        assert!(is_equivariant(&s, &w, &[2], &imgs).unwrap());
        assert_eq!(imgs[0].linear_part(), p("z", 3));
    }

    #[test]
    fn chi_step_fixture_two_to_one() {
        let f = p("z", 3);
        let st = DescentState::from_annihilator(&f, &ws(&[1, 1, 2], 2), &sl2_on_xy(3)).unwrap();
        assert_eq!(st.mprime_dim(), 2);
        assert!(!st.is_solvable().unwrap());
        let next = chi_step(&st).unwrap();
        assert_eq!(next.mprime_dim(), 1);
        assert!(next.weights.weights().iter().all(|x| x.is_positive()));
        assert_eq!(next.history[0].epsilon, rat_frac(1, 4));
        assert!(next.is_solvable().unwrap());
        let done = descend_to_solvable(st).unwrap();
        assert_eq!(done.iterations(), 1);
    }

    #[test]
    fn chi_step_fixture_three_to_one() {
        let f = p("z", 3);
        let st = DescentState::from_annihilator(&f, &ws(&[1, 1, 1], 1), &sl2_on_xy(3)).unwrap();
        assert_eq!(st.mprime_dim(), 3);
        let next = chi_step(&st).unwrap();
        assert_eq!(next.mprime_dim(), 1);
        let mut w = next.weights.weights().to_vec();
        w.sort();
        assert_eq!(w, vec![rat_frac(3, 4), rat(1), rat_frac(5, 4)]);
    }

    #[test]
    fn solvable_start_refuses_step() {
        let f = p("x*y", 2);
        let st = DescentState::new(&f, &ws(&[1, 1], 2)).unwrap();
        assert!(st.is_solvable().unwrap());
        assert!(matches!(chi_step(&st), Err(Error::Precondition(_))));
        assert_eq!(descend_to_solvable(st).unwrap().iterations(), 0);
    }

    #[test]
    fn smooth_components_of_crossings() {
        let st = DescentState::new(&p("x*y", 2), &ws(&[1, 1], 2)).unwrap();
        let c = smooth_component(&st).unwrap();
        assert_eq!(c.form_original, p("x", 2));
        assert_eq!(c.cofactor, p("y", 2));

        let st = DescentState::new(&p("x*y*z", 3), &ws(&[1, 1, 1], 3)).unwrap();
        let c = smooth_component(&st).unwrap();
        assert_eq!(c.form_original, p("x", 3));
        assert_eq!(c.cofactor, p("y*z", 3));
    }

    #[test]
    fn component_reports() {
        let f = p("x*(y^2 - x^3)", 2);
        let reps = component_descent(&f, &ws(&[2, 3], 8)).unwrap();
        assert_eq!(reps.len(), 2);
        assert!(reps[0].smooth && reps[0].free);
        assert_eq!(reps[1].degrees, Some(vec![rat(0), rat(1)]));
        assert!(!reps[1].smooth);
    }

    #[test]
    fn certify_examples() {
        let c = certify_normal_crossing(&p("x*y", 2), None).unwrap();
        let Verdict::Certified(cert) = c.verdict else {
            panic!("expected certificate")
        };
        assert_eq!(cert.components, vec![p("x", 2), p("y", 2)]);

        let c = certify_normal_crossing(&p("y^2 - x^3", 2), None).unwrap();
        assert!(matches!(c.verdict, Verdict::Refuted { ref stage, .. } if stage == "degree_audit"));

        let f = p("x*(x + y)", 2);
        let c = certify_normal_crossing(&f, Some(&ws(&[1, 1], 2))).unwrap();
        let Verdict::Certified(cert) = c.verdict else {
            panic!("expected certificate")
        };
        assert_eq!(cert.coordinates.apply(&cert.normal_form()).unwrap(), f);
    }
}
