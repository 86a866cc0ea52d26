//! Torus-invariant divisors on complete toric varieties.
//!
//! A divisor `D = sum c_i D_i` over the rays `v_i` of a complete fan defines
//! the positive Laurent polynomial `W_D = sum t^(c_i) x^(v_i)`. Its tropical
//! critical point classifies the divisor: when it is a lattice point the
//! divisor class carries a distinguished representative whose own critical
//! point is the origin.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::puiseux::PuiseuxSeries;
use crate::ratgeom::{dot, rat_int, Rat, RatVector};
use crate::recursion::{canonical_point, StageRecord};
use crate::tropical::{trop_eval, LaurentPoly};

use super::gcd_all;

/// Rays of a complete fan with divisor coefficients.
#[derive(Debug, Clone)]
pub struct ToricInstance {
    /// Primitive integer ray generators, pairwise distinct.
    pub rays: Vec<Vec<i64>>,
    /// Divisor coefficients, one per ray.
    pub coeffs: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub struct ToricReport {
    pub dim: usize,
    pub d_crit: RatVector,
    pub tau: Rat,
    /// Whether all divisor coefficients are integers (a Weil divisor).
    pub integral_divisor: bool,
    /// For Weil divisors: is the critical point a lattice point?
    pub integrally_balanced: Option<bool>,
    /// The representative of the divisor class with critical point zero,
    /// present when the divisor is integrally balanced.
    pub distinguished: Option<Vec<Rat>>,
    /// Exact verification that the distinguished divisor's own critical
    /// point is the origin.
    pub distinguished_verified: Option<bool>,
    pub stages: Vec<StageRecord>,
}

/// Build `W_D` for the instance.
pub fn divisor_potential(inst: &ToricInstance) -> Result<LaurentPoly> {
    let dim = inst.rays.first().map_or(0, |r| r.len());
    let terms = inst
        .rays
        .iter()
        .zip(&inst.coeffs)
        .map(|(ray, c)| {
            let v: RatVector = ray.iter().map(|&x| rat_int(x)).collect();
            (PuiseuxSeries::monomial(c.clone(), 1.0), v)
        })
        .collect();
    LaurentPoly::new(dim, terms)
}

fn validate(inst: &ToricInstance) -> Result<()> {
    if inst.rays.is_empty() || inst.rays.len() != inst.coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: inst.rays.len(),
            got: inst.coeffs.len(),
        });
    }
    let dim = inst.rays[0].len();
    for (i, ray) in inst.rays.iter().enumerate() {
        if ray.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: ray.len() });
        }
        if gcd_all(ray) != 1 {
            return Err(Error::NonPrimitiveRay { index: i });
        }
        if inst.rays[..i].contains(ray) {
            return Err(Error::InvariantViolation(format!("duplicate ray at index {i}")));
        }
    }
    Ok(())
}

/// Analyze a torus-invariant divisor: critical point, balancedness, and the
/// distinguished representative of its class.
pub fn toric_analyze(inst: &ToricInstance) -> Result<ToricReport> {
    validate(inst)?;
    let w = divisor_potential(inst)?;
    if !w.is_complete() {
        return Err(Error::NotComplete("the ray hull must be full-dimensional with zero interior"));
    }
    let cp = canonical_point(&w)?;
    let tau = trop_eval(&w, &cp.d_crit);

    let integral_divisor = inst.coeffs.iter().all(|c| c.is_integer());
    let integrally_balanced =
        integral_divisor.then(|| cp.d_crit.iter().all(|x| x.is_integer()));

    let (distinguished, distinguished_verified) = if integrally_balanced == Some(true) {
        let shifted: Vec<Rat> = inst
            .rays
            .iter()
            .zip(&inst.coeffs)
            .map(|(ray, c)| {
                let v: RatVector = ray.iter().map(|&x| rat_int(x)).collect();
                c + dot(&v, &cp.d_crit)
            })
            .collect();
        let check_inst = ToricInstance { rays: inst.rays.clone(), coeffs: shifted.clone() };
        let check_w = divisor_potential(&check_inst)?;
        let verified = canonical_point(&check_w)?
            .d_crit
            .iter()
            .all(|x| x.is_zero());
        (Some(shifted), Some(verified))
    } else {
        (None, None)
    };

    Ok(ToricReport {
        dim: w.dim(),
        d_crit: cp.d_crit,
        tau,
        integral_divisor,
        integrally_balanced,
        distinguished,
        distinguished_verified,
        stages: cp.stages,
    })
}

impl ToricInstance {
    /// Anticanonical divisor on the given rays: every coefficient is one.
    pub fn anticanonical(rays: Vec<Vec<i64>>) -> Self {
        let coeffs = vec![Rat::one(); rays.len()];
        ToricInstance { rays, coeffs }
    }
}
