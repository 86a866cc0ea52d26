//! Tropicalization of a positive Laurent polynomial.
//!
//! Provides min-plus evaluation and maximization of `Trop(W)`, the polytope
//! `{d | Trop(W)(d) >= 0}`, the per-term level data `delta_i`, and exact
//! checkers for the tropical critical and critical coefficient conditions.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::puiseux::PuiseuxSeries;
use crate::ratgeom::{
    self, dot, lowest_point, lp_solve, rat_to_f64, LinearProgram, LpStatus, Rat, RatVector,
    Subspace,
};

/// A Laurent polynomial `W = sum gamma_i x^(v_i)` on an `r`-torus, with
/// positive series coefficients and pairwise distinct exponent vectors.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    dim: usize,
    terms: Vec<(PuiseuxSeries, RatVector)>,
    complete: bool,
}

impl LaurentPoly {
    /// Build a polynomial, merging terms with equal exponent vectors.
    ///
    /// Every coefficient must end up positive (nonzero series with positive
    /// leading coefficient). The completeness flag is computed here, never
    /// asserted: the Newton polytope must be full-dimensional with zero in
    /// its interior.
    pub fn new(dim: usize, terms: Vec<(PuiseuxSeries, RatVector)>) -> Result<Self> {
        let mut merged: Vec<(PuiseuxSeries, RatVector)> = Vec::with_capacity(terms.len());
        for (coeff, v) in terms {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            match merged.iter_mut().find(|(_, u)| *u == v) {
                Some((c, _)) => *c = c.add(&coeff),
                None => merged.push((coeff, v)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        for (c, _) in &merged {
            if !c.is_positive() {
                return Err(Error::NotPositive);
            }
        }
        let complete = is_complete_exponents(dim, &merged.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
        Ok(LaurentPoly { dim, terms: merged, complete })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(PuiseuxSeries, RatVector)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Valuations `c_i` of the coefficients (finite, since coefficients are
    /// positive and hence nonzero).
    pub fn valuations(&self) -> Vec<Rat> {
        self.terms
            .iter()
            .map(|(c, _)| c.val().finite().expect("positive coefficient has finite valuation").clone())
            .collect()
    }

    pub fn exponents(&self) -> Vec<RatVector> {
        self.terms.iter().map(|(_, v)| v.clone()).collect()
    }

    /// True when the Newton polytope is full-dimensional with zero interior.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Vertices `(c_i, v_i)` of the augmented Newton polytope.
    pub fn augmented_points(&self) -> Vec<(Rat, RatVector)> {
        self.valuations().into_iter().zip(self.exponents()).collect()
    }
}

/// Is zero a strict convex combination of the given vectors, and do they span
/// the whole space? Exact test via rank plus a max-min-weight LP.
pub fn is_complete_exponents(dim: usize, exponents: &[RatVector]) -> bool {
    if exponents.is_empty() {
        return false;
    }
    if ratgeom::rank(exponents, dim) != dim {
        return false;
    }
    zero_strictly_interior(exponents)
}

/// Max-min-weight test for `0 ∈ ConvexHull°({v_i})` relative to a subspace
/// constraint `sum r_i v_i ∈ span`. Returns the exact optimum `m*` and the
/// weights when feasible.
fn strict_combination_lp(
    vectors: &[RatVector],
    span: Option<&Subspace>,
) -> Option<(Rat, Vec<Rat>)> {
    let n = vectors.len();
    let dim = vectors[0].len();
    let span_dim = span.map_or(0, |s| s.dim());
    // Variables: r_1..r_n (free), m (free), s_1..s_span_dim (free).
    let nv = n + 1 + span_dim;
    let mut obj = ratgeom::zeros(nv);
    obj[n] = -Rat::one(); // maximize m
    let mut lp = LinearProgram::minimize(nv, obj);
    // sum r_i = 1
    let mut row = ratgeom::zeros(nv);
    for x in row.iter_mut().take(n) {
        *x = Rat::one();
    }
    lp.equality(row, Rat::one());
    // sum r_i v_i - sum s_j b_j = 0
    for coord in 0..dim {
        let mut row = ratgeom::zeros(nv);
        for (j, v) in vectors.iter().enumerate() {
            row[j] = v[coord].clone();
        }
        if let Some(s) = span {
            for (j, b) in s.basis().iter().enumerate() {
                row[n + 1 + j] = -b[coord].clone();
            }
        }
        lp.equality(row, Rat::zero());
    }
    // r_i - m >= 0
    for i in 0..n {
        let mut row = ratgeom::zeros(nv);
        row[i] = Rat::one();
        row[n] = -Rat::one();
        lp.inequality_ge(row, Rat::zero());
    }
    let res = lp_solve(&lp);
    if res.status != LpStatus::Optimal {
        return None;
    }
    let m = -res.optimum;
    let weights = res.witness[..n].to_vec();
    Some((m, weights))
}

fn zero_strictly_interior(vectors: &[RatVector]) -> bool {
    matches!(strict_combination_lp(vectors, None), Some((m, _)) if m.is_positive())
}

/// `Trop(W)(d) = min_i (c_i + <v_i, d>)`.
pub fn trop_eval(w: &LaurentPoly, d: &[Rat]) -> Rat {
    assert_eq!(d.len(), w.dim(), "dimension mismatch in trop_eval");
    w.augmented_points()
        .into_iter()
        .map(|(c, v)| c + dot(&v, d))
        .min()
        .expect("Laurent polynomial has at least one term")
}

/// Maximum of `Trop(W)`: the minimal height of the augmented Newton polytope
/// above the origin.
pub fn trop_max(w: &LaurentPoly) -> Result<Rat> {
    if !w.is_complete() {
        return Err(Error::NotComplete("the Newton polytope must be full-dimensional with zero in its interior"));
    }
    Ok(lowest_point(&w.augmented_points())?.tau)
}

/// Membership in the polytope `{d | Trop(W)(d) >= 0}` (may be empty).
pub fn polytope_membership(w: &LaurentPoly, d: &[Rat]) -> bool {
    !trop_eval(w, d).is_negative()
}

/// Per-term level data of `W` at a point `d`: the excesses `delta_i`, the
/// sorted distinct levels, and the nested span pair below/at each level.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub d: RatVector,
    /// `Trop(W)(d)`.
    pub tau_val: Rat,
    /// `delta_i(d) = c_i + <v_i, d> - Trop(W)(d)`, indexed like the terms.
    pub deltas: Vec<Rat>,
    /// Sorted distinct values of `deltas`; the first is always zero.
    pub levels: Vec<Rat>,
    /// `B_{<eps} = span{v_i | delta_i < eps}` per level.
    pub below: Vec<Subspace>,
    /// `B_{<=eps} = span{v_i | delta_i <= eps}` per level.
    pub at_or_below: Vec<Subspace>,
}

impl LevelData {
    pub fn active(&self, level: &Rat) -> Vec<usize> {
        self.deltas
            .iter()
            .enumerate()
            .filter(|(_, d)| *d == level)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn level_data(w: &LaurentPoly, d: &[Rat]) -> LevelData {
    assert_eq!(d.len(), w.dim(), "dimension mismatch in level_data");
    let tau_val = trop_eval(w, d);
    let deltas: Vec<Rat> = w
        .augmented_points()
        .into_iter()
        .map(|(c, v)| c + dot(&v, d) - &tau_val)
        .collect();
    let mut levels: Vec<Rat> = deltas.to_vec();
    levels.sort();
    levels.dedup();
    let exponents = w.exponents();
    let mut below = Vec::with_capacity(levels.len());
    let mut at_or_below = Vec::with_capacity(levels.len());
    for eps in &levels {
        let lt: Vec<RatVector> = exponents
            .iter()
            .zip(&deltas)
            .filter(|(_, del)| *del < eps)
            .map(|(v, _)| v.clone())
            .collect();
        let le: Vec<RatVector> = exponents
            .iter()
            .zip(&deltas)
            .filter(|(_, del)| *del <= eps)
            .map(|(v, _)| v.clone())
            .collect();
        below.push(Subspace::from_spanning(w.dim(), &lt));
        at_or_below.push(Subspace::from_spanning(w.dim(), &le));
    }
    LevelData { d: d.to_vec(), tau_val, deltas, levels, below, at_or_below }
}

/// Witness for one level of the tropical critical conditions.
#[derive(Debug, Clone)]
pub struct LevelCertificate {
    pub level: Rat,
    pub passed: bool,
    /// Exact optimum of the max-min-weight LP (absent when infeasible).
    pub min_weight: Option<Rat>,
    /// Strict convex weights on the active terms, by term index.
    pub weights: Vec<(usize, Rat)>,
}

/// Result of checking the tropical critical conditions at a point.
#[derive(Debug, Clone)]
pub struct TropicalCriticalCheck {
    pub passed: bool,
    pub levels: Vec<LevelCertificate>,
}

/// Check the tropical critical conditions for `W` at `d`: for every level
/// `eps`, the relative interior of the hull of the active exponents must meet
/// the span of the strictly lower ones. Strict positivity is decided by
/// maximizing the minimum weight; a level passes iff the exact optimum is
/// positive.
pub fn check_tropical_critical(w: &LaurentPoly, d: &[Rat]) -> TropicalCriticalCheck {
    let ld = level_data(w, d);
    let exponents = w.exponents();
    let mut certs = Vec::with_capacity(ld.levels.len());
    let mut all = true;
    for (k, eps) in ld.levels.iter().enumerate() {
        let active = ld.active(eps);
        let vectors: Vec<RatVector> = active.iter().map(|&i| exponents[i].clone()).collect();
        let span = &ld.below[k];
        let span_opt = if span.dim() == 0 { None } else { Some(span) };
        let cert = match strict_combination_lp(&vectors, span_opt) {
            Some((m, weights)) if m.is_positive() => LevelCertificate {
                level: eps.clone(),
                passed: true,
                min_weight: Some(m),
                weights: active.iter().cloned().zip(weights).collect(),
            },
            Some((m, _)) => LevelCertificate {
                level: eps.clone(),
                passed: false,
                min_weight: Some(m),
                weights: Vec::new(),
            },
            None => LevelCertificate {
                level: eps.clone(),
                passed: false,
                min_weight: None,
                weights: Vec::new(),
            },
        };
        all &= cert.passed;
        certs.push(cert);
    }
    TropicalCriticalCheck { passed: all, levels: certs }
}

/// Check the critical coefficient conditions for `W` at the real vector `d`,
/// given the tropical critical point: for each level, the weighted exponent
/// sum must lie in the span below the level, up to a floating projection
/// residual of `tol` scaled by the largest term magnitude.
pub fn check_coeff_conditions(w: &LaurentPoly, d_crit: &[Rat], d: &[f64], tol: f64) -> bool {
    let ld = level_data(w, d_crit);
    let exponents = w.exponents();
    let coeffs: Vec<f64> = w
        .terms()
        .iter()
        .map(|(c, _)| c.leading_coeff().expect("positive coefficient"))
        .collect();
    for (k, eps) in ld.levels.iter().enumerate() {
        let active = ld.active(eps);
        let dim = w.dim();
        let mut sum = vec![0.0; dim];
        let mut scale = 0.0f64;
        for &i in &active {
            let vi: Vec<f64> = exponents[i].iter().map(rat_to_f64).collect();
            let pairing: f64 = vi.iter().zip(d).map(|(a, b)| a * b).sum();
            let weight = coeffs[i] * pairing.exp();
            let norm: f64 = vi.iter().map(|x| x * x).sum::<f64>().sqrt();
            scale = scale.max(weight.abs() * norm);
            for (s, x) in sum.iter_mut().zip(&vi) {
                *s += weight * x;
            }
        }
        let basis = ld.below[k].orthonormal_basis_f64();
        let mut residual = sum.clone();
        for b in &basis {
            let c: f64 = residual.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in residual.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol * (1.0 + scale) {
            return false;
        }
    }
    true
}
