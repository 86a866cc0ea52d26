//! Canonical fiber points of moment polytopes.
//!
//! A polytope cut out by primitive inward facet normals,
//! `Delta = {d | <v_i, d> + c_i >= 0}`, has the potential
//! `W_Delta = sum t^(c_i) x^(v_i)` with `{Trop(W) >= 0} = Delta`. The
//! tropical critical point of `W_Delta` is a canonical point in the relative
//! interior of `Delta`; for Clifford-type torus fibers it comes with a
//! nondegeneracy certificate for the solved critical point.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lift::{check_nondegenerate, solve_critical_with, CritResult, NondegCertificate, SolveOptions};
use crate::puiseux::PuiseuxSeries;
use crate::ratgeom::{
    self, dot, lp_solve, rat_int, LinearProgram, LpStatus, Rat, RatVector,
};
use crate::tropical::{is_complete_exponents, trop_eval, LaurentPoly};

use super::gcd_all;

/// A polytope given by primitive inward facet normals and constants.
#[derive(Debug, Clone)]
pub struct DelzantInstance {
    /// Facets `(normal, constant)`: the halfspace is `<normal, d> + c >= 0`.
    pub facets: Vec<(Vec<i64>, Rat)>,
}

#[derive(Debug, Clone)]
pub struct DelzantReport {
    pub dim: usize,
    pub d_crit: RatVector,
    pub tau: Rat,
    /// Exact slack of each facet inequality at the critical point.
    pub facet_slacks: Vec<Rat>,
    /// Whether the polytope is full-dimensional.
    pub full_dimensional: bool,
    /// All slacks strictly positive (relative interior for full-dimensional
    /// polytopes).
    pub interior: bool,
    pub crit: CritResult,
    pub nondegeneracy: NondegCertificate,
    /// Caveat recorded on every report: primitivity of the normals is
    /// checked, the vertex smoothness condition is not.
    pub caveat: &'static str,
}

pub fn polytope_potential(inst: &DelzantInstance) -> Result<LaurentPoly> {
    let dim = inst.facets.first().map_or(0, |(n, _)| n.len());
    let terms = inst
        .facets
        .iter()
        .map(|(normal, c)| {
            let v: RatVector = normal.iter().map(|&x| rat_int(x)).collect();
            (PuiseuxSeries::monomial(c.clone(), 1.0), v)
        })
        .collect();
    LaurentPoly::new(dim, terms)
}

fn validate(inst: &DelzantInstance) -> Result<usize> {
    if inst.facets.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let dim = inst.facets[0].0.len();
    for (i, (normal, _)) in inst.facets.iter().enumerate() {
        if normal.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: normal.len() });
        }
        if gcd_all(normal) != 1 {
            return Err(Error::NonPrimitiveRay { index: i });
        }
    }
    Ok(dim)
}

/// Feasibility of the facet system, exact.
fn is_nonempty(inst: &DelzantInstance, dim: usize) -> bool {
    let mut lp = LinearProgram::minimize(dim, ratgeom::zeros(dim));
    for (normal, c) in &inst.facets {
        let row: RatVector = normal.iter().map(|&x| rat_int(x)).collect();
        lp.inequality_ge(row, -c.clone());
    }
    lp_solve(&lp).status == LpStatus::Optimal
}

/// Canonical interior point of a bounded nonempty facet-presented polytope.
pub fn delzant_analyze(inst: &DelzantInstance, opts: &SolveOptions) -> Result<DelzantReport> {
    let dim = validate(inst)?;
    if !is_nonempty(inst, dim) {
        return Err(Error::EmptyPolytope);
    }
    // Nonempty and bounded iff the normal hull is full-dimensional with zero
    // interior: the recession cone {d | <v_i, d> >= 0 for all i} is trivial
    // exactly then.
    let normals: Vec<RatVector> = inst
        .facets
        .iter()
        .map(|(n, _)| n.iter().map(|&x| rat_int(x)).collect())
        .collect();
    if !is_complete_exponents(dim, &normals) {
        return Err(Error::Unbounded);
    }

    let w = polytope_potential(inst)?;
    let crit = solve_critical_with(&w, opts)?;
    let d_crit = crit.d_crit.clone();
    let tau = trop_eval(&w, &d_crit);

    let facet_slacks: Vec<Rat> = inst
        .facets
        .iter()
        .map(|(normal, c)| {
            let v: RatVector = normal.iter().map(|&x| rat_int(x)).collect();
            dot(&v, &d_crit) + c
        })
        .collect();

    // Full-dimensionality: some point has all slacks strictly positive,
    // decided by the exact max-min-slack program; equivalently tau > 0 after
    // translating by the critical point. tau is the best min-slack value.
    let full_dimensional = tau.is_positive();
    let interior = facet_slacks.iter().all(|s| s.is_positive());
    if full_dimensional && !interior {
        return Err(Error::InvariantViolation(
            "critical point missed the interior of a full-dimensional polytope".into(),
        ));
    }

    let nondegeneracy = check_nondegenerate(&w, &crit, opts.nondeg_samples, opts.seed)?;
    Ok(DelzantReport {
        dim,
        d_crit,
        tau,
        facet_slacks,
        full_dimensional,
        interior,
        crit,
        nondegeneracy,
        caveat: "facet normals are checked for primitivity; the vertex smoothness condition is not verified",
    })
}

impl DelzantInstance {
    /// The standard simplex `{d_i >= 0, 1 - sum d_i >= 0}` in dimension `r`.
    pub fn standard_simplex(r: usize) -> Self {
        let mut facets = Vec::with_capacity(r + 1);
        for i in 0..r {
            let mut n = vec![0i64; r];
            n[i] = 1;
            facets.push((n, Rat::zero()));
        }
        facets.push((vec![-1i64; r], rat_int(1)));
        DelzantInstance { facets }
    }

    /// An axis-aligned box given by per-coordinate bounds `(lo, hi)`.
    pub fn product_of_intervals(bounds: &[(Rat, Rat)]) -> Self {
        let r = bounds.len();
        let mut facets = Vec::with_capacity(2 * r);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut n = vec![0i64; r];
            n[i] = 1;
            facets.push((n.clone(), -lo.clone()));
            n[i] = -1;
            facets.push((n, hi.clone()));
        }
        DelzantInstance { facets }
    }
}
