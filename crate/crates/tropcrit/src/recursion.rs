//! Recursive construction of the exact tropical critical point.
//!
//! The augmented Newton points `(c_i, v_i)` live in `Q^(1+r)`. Each stage
//! finds the lowest point of the reduced polytope above the origin in the
//! current quotient, takes the minimal face containing it, and enlarges the
//! accumulated hyperplane flag by the span of the translated face. The flag
//! is kept in original coordinates throughout, so the critical point falls
//! out of a single exact linear solve at the end.

use num_traits::One;

use crate::error::{Error, Result};
use crate::ratgeom::{
    self, lowest_point, minimal_face_support, solve_square, solve_vanishing_hyperplane, Rat,
    RatMatrix, RatVector, Subspace,
};
use crate::tropical::{check_tropical_critical, trop_eval, trop_max, LaurentPoly};

/// Data recorded at one stage of the recursion.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub index: usize,
    /// Minimal height of the reduced polytope above the origin at this stage.
    pub tau_bar: Rat,
    /// Term indices spanning the minimal face containing the lowest point.
    pub support: Vec<usize>,
    /// Basis of the face span, lifted to `Q^(1+r)`.
    pub span_vectors: Vec<RatVector>,
}

/// State of the recursion over a complete Newton datum.
#[derive(Debug, Clone)]
pub struct NewtonDatum {
    /// Ambient dimension `1 + r`.
    dim_v: usize,
    /// Augmented points `(c_i, v_i)`, fixed for the whole recursion.
    points: Vec<RatVector>,
    /// Accumulated flag in `Q^(1+r)`; grows to dimension `r`.
    flag: Subspace,
    stages: Vec<StageRecord>,
}

impl NewtonDatum {
    pub fn ambient_dim(&self) -> usize {
        self.dim_v
    }

    /// Dimension of the current quotient target `U_j`.
    pub fn u_dim(&self) -> usize {
        self.dim_v - 1 - self.flag.dim()
    }

    pub fn is_done(&self) -> bool {
        self.u_dim() == 0
    }

    pub fn flag(&self) -> &Subspace {
        &self.flag
    }

    pub fn stages(&self) -> &[StageRecord] {
        &self.stages
    }

    pub fn points(&self) -> &[RatVector] {
        &self.points
    }
}

/// Initial datum of a complete Laurent polynomial: points `(Val(gamma_i), v_i)`.
pub fn build_datum(w: &LaurentPoly) -> Result<NewtonDatum> {
    if !w.is_complete() {
        return Err(Error::NotComplete(
            "the Newton polytope must be full-dimensional with zero in its interior",
        ));
    }
    let dim_v = w.dim() + 1;
    let points = w
        .augmented_points()
        .into_iter()
        .map(|(c, v)| {
            let mut p = Vec::with_capacity(dim_v);
            p.push(c);
            p.extend(v);
            p
        })
        .collect();
    Ok(NewtonDatum { dim_v, points, flag: Subspace::zero(dim_v), stages: Vec::new() })
}

/// Coordinates adapted to one stage: quotient by the flag, with the image of
/// the vertical axis as first basis vector. A point maps to `(c', v')`, and
/// the reduced set is `{v' != 0}`.
struct StageCoords {
    /// Inverse-applied basis matrix (rows of the linear system).
    matrix: RatMatrix,
    flag: Subspace,
}

impl StageCoords {
    fn new(flag: &Subspace) -> Result<StageCoords> {
        let ambient = flag.ambient();
        let mut axis = ratgeom::zeros(ambient);
        axis[0] = Rat::one();
        let eta = flag.quotient_coords(&axis);
        if ratgeom::is_zero_vec(&eta) {
            return Err(Error::NotTransversal);
        }
        let m = ambient - flag.dim();
        // Complete eta to a basis of the quotient with standard vectors,
        // scanned in index order.
        let mut chosen: Vec<RatVector> = vec![eta];
        let mut span = Subspace::from_spanning(m, &chosen);
        for k in 0..m {
            if span.dim() == m {
                break;
            }
            let mut e = ratgeom::zeros(m);
            e[k] = Rat::one();
            if span.insert(&e) {
                chosen.push(e);
            }
        }
        debug_assert_eq!(chosen.len(), m);
        // Columns of the basis matrix are the chosen vectors; stage
        // coordinates solve M y = q.
        let matrix: RatMatrix = (0..m)
            .map(|row| chosen.iter().map(|c| c[row].clone()).collect())
            .collect();
        Ok(StageCoords { matrix, flag: flag.clone() })
    }

    /// `(c', v')` of a point in stage coordinates.
    fn split(&self, p: &[Rat]) -> Result<(Rat, RatVector)> {
        let q = self.flag.quotient_coords(p);
        let y = solve_square(&self.matrix, &q)
            .ok_or_else(|| Error::InvariantViolation("stage basis is singular".into()))?;
        let mut it = y.into_iter();
        let c = it.next().expect("stage coordinates are nonempty");
        Ok((c, it.collect()))
    }
}

/// One step of the recursion: drop points on the vertical line, find the
/// lowest point of the remainder, take the minimal face containing it, and
/// extend the flag by the span of the translated face.
pub fn recursion_step(datum: NewtonDatum) -> Result<NewtonDatum> {
    assert!(datum.u_dim() > 0, "recursion already finished");
    let coords = StageCoords::new(&datum.flag)?;

    let mut kept: Vec<usize> = Vec::new();
    let mut stage_points: Vec<(Rat, RatVector)> = Vec::new();
    for (i, p) in datum.points.iter().enumerate() {
        let (c, v) = coords.split(p)?;
        if !ratgeom::is_zero_vec(&v) {
            kept.push(i);
            stage_points.push((c, v));
        }
    }
    if kept.is_empty() {
        return Err(Error::InvariantViolation(
            "reduced point set is empty while the quotient is nontrivial".into(),
        ));
    }

    let low = lowest_point(&stage_points).map_err(|e| match e {
        Error::NoPointAboveZero => Error::InvariantViolation(
            "reduced polytope misses the vertical axis on complete input".into(),
        ),
        other => other,
    })?;
    let tau_bar = low.tau;
    if let Some(prev) = datum.stages.last() {
        if tau_bar <= prev.tau_bar {
            return Err(Error::InvariantViolation(format!(
                "stage heights must strictly increase: {} after {}",
                tau_bar, prev.tau_bar
            )));
        }
    }

    let concat: Vec<RatVector> = stage_points
        .iter()
        .map(|(c, v)| {
            let mut p = Vec::with_capacity(1 + v.len());
            p.push(c.clone());
            p.extend(v.iter().cloned());
            p
        })
        .collect();
    let mut target = ratgeom::zeros(concat[0].len());
    target[0] = tau_bar.clone();
    let face = minimal_face_support(&concat, &target).map_err(|e| {
        Error::InvariantViolation(format!("minimal face query failed at the lowest point: {e}"))
    })?;

    // Lift: the span of the face translate is generated by the original
    // points minus tau_bar times the vertical axis, modulo the current flag.
    let mut span_vectors = Vec::with_capacity(face.support.len());
    let mut support = Vec::with_capacity(face.support.len());
    for &rel in &face.support {
        let i = kept[rel];
        support.push(i);
        let mut vec = datum.points[i].clone();
        vec[0] -= &tau_bar;
        span_vectors.push(vec);
    }

    let before = datum.flag.dim();
    let flag = datum.flag.extended(&span_vectors);
    if flag.dim() == before {
        return Err(Error::InvariantViolation(
            "face span did not enlarge the flag".into(),
        ));
    }
    log::debug!(
        "stage {}: tau_bar = {}, support {:?}, flag dim {} -> {}",
        datum.stages.len() + 1,
        tau_bar,
        support,
        before,
        flag.dim()
    );

    let mut stages = datum.stages;
    stages.push(StageRecord {
        index: stages.len() + 1,
        tau_bar,
        support,
        span_vectors,
    });
    Ok(NewtonDatum { dim_v: datum.dim_v, points: datum.points, flag, stages })
}

/// The exact tropical critical point of a complete Laurent polynomial.
#[derive(Debug, Clone)]
pub struct CanonicalPoint {
    /// `d_crit` in `Q^r`.
    pub d_crit: RatVector,
    /// `(1, d_crit)`, the covector vanishing on the accumulated flag.
    pub tilde: RatVector,
    pub stages: Vec<StageRecord>,
}

/// Run the recursion to completion and read off the canonical point.
///
/// Postconditions are re-checked on the result: it satisfies the tropical
/// critical conditions and attains the maximum of `Trop(W)` exactly.
pub fn canonical_point(w: &LaurentPoly) -> Result<CanonicalPoint> {
    let mut datum = build_datum(w)?;
    let r = w.dim();
    let mut steps = 0usize;
    while !datum.is_done() {
        if steps >= r {
            return Err(Error::InvariantViolation(
                "recursion exceeded the ambient dimension bound".into(),
            ));
        }
        datum = recursion_step(datum)?;
        steps += 1;
    }
    let d_crit = solve_vanishing_hyperplane(datum.flag()).map_err(|e| {
        Error::InvariantViolation(format!("reading off the canonical point failed: {e}"))
    })?;

    let check = check_tropical_critical(w, &d_crit);
    if !check.passed {
        return Err(Error::InvariantViolation(
            "canonical point fails the tropical critical conditions".into(),
        ));
    }
    let tau = trop_max(w)?;
    if trop_eval(w, &d_crit) != tau {
        return Err(Error::InvariantViolation(
            "canonical point does not attain the tropical maximum".into(),
        ));
    }

    let mut tilde = Vec::with_capacity(r + 1);
    tilde.push(Rat::one());
    tilde.extend(d_crit.iter().cloned());
    Ok(CanonicalPoint { d_crit, tilde, stages: datum.stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::PuiseuxSeries;
    use crate::ratgeom::{rat, rat_int};

    fn rv(entries: &[i64]) -> RatVector {
        entries.iter().map(|&x| rat_int(x)).collect()
    }

    fn monomial_poly(dim: usize, terms: &[(i64, &[i64])]) -> LaurentPoly {
        LaurentPoly::new(
            dim,
            terms
                .iter()
                .map(|&(c, v)| (PuiseuxSeries::monomial(rat_int(c), 1.0), rv(v)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn build_datum_reads_valuations() {
        let w = monomial_poly(1, &[(0, &[1]), (1, &[-1])]);
        let datum = build_datum(&w).unwrap();
        assert_eq!(datum.points(), &[rv(&[0, 1]), rv(&[1, -1])]);

        let w = monomial_poly(1, &[(0, &[1]), (0, &[-1]), (1, &[2])]);
        let datum = build_datum(&w).unwrap();
        assert_eq!(datum.points(), &[rv(&[0, 1]), rv(&[0, -1]), rv(&[1, 2])]);

        let w = monomial_poly(2, &[(1, &[1, 0]), (1, &[0, 1]), (1, &[-1, -1])]);
        let datum = build_datum(&w).unwrap();
        assert_eq!(
            datum.points(),
            &[rv(&[1, 1, 0]), rv(&[1, 0, 1]), rv(&[1, -1, -1])]
        );
    }

    #[test]
    fn build_datum_rejects_incomplete() {
        let w = monomial_poly(1, &[(0, &[1]), (0, &[2])]);
        assert!(matches!(build_datum(&w), Err(Error::NotComplete(_))));
    }

    #[test]
    fn one_step_1d() {
        let w = monomial_poly(1, &[(0, &[1]), (1, &[-1])]);
        let datum = recursion_step(build_datum(&w).unwrap()).unwrap();
        assert!(datum.is_done());
        let stage = &datum.stages()[0];
        assert_eq!(stage.tau_bar, rat(1, 2));
        assert_eq!(stage.support, vec![0, 1]);
        assert!(datum.flag().contains(&vec![rat_int(1), rat_int(-2)]));
    }

    #[test]
    fn constant_term_dropped_at_stage_one() {
        // A constant term projects onto the vertical line and is ignored.
        let w = monomial_poly(1, &[(0, &[1]), (1, &[-1]), (0, &[0])]);
        let datum = recursion_step(build_datum(&w).unwrap()).unwrap();
        assert_eq!(datum.stages()[0].support, vec![0, 1]);
        assert_eq!(datum.stages()[0].tau_bar, rat(1, 2));
    }

    #[test]
    fn two_stage_example() {
        // W = x + t/x + ty + t/y.
        let w = monomial_poly(
            2,
            &[(0, &[1, 0]), (1, &[-1, 0]), (1, &[0, 1]), (1, &[0, -1])],
        );
        let datum = recursion_step(build_datum(&w).unwrap()).unwrap();
        assert_eq!(datum.stages()[0].tau_bar, rat(1, 2));
        assert!(datum.flag().contains(&rv(&[1, -2, 0])));
        assert_eq!(datum.u_dim(), 1);
        let datum = recursion_step(datum).unwrap();
        assert!(datum.is_done());
        assert_eq!(datum.stages()[1].tau_bar, rat_int(1));
        assert!(datum.stages()[0].tau_bar < datum.stages()[1].tau_bar);
    }

    #[test]
    fn segment_face_terminates_in_one_step() {
        // W = x + 1/x + tx^2: the lowest face is the segment at height 0.
        let w = monomial_poly(1, &[(0, &[1]), (0, &[-1]), (1, &[2])]);
        let datum = recursion_step(build_datum(&w).unwrap()).unwrap();
        assert!(datum.is_done());
        assert_eq!(datum.stages()[0].tau_bar, rat_int(0));
        assert_eq!(datum.stages()[0].support, vec![0, 1]);
        assert!(datum.flag().contains(&rv(&[0, 1])));
    }

    #[test]
    fn canonical_point_1d() {
        let w = monomial_poly(1, &[(0, &[1]), (1, &[-1])]);
        let cp = canonical_point(&w).unwrap();
        assert_eq!(cp.d_crit, vec![rat(1, 2)]);
        assert_eq!(cp.tilde, vec![rat_int(1), rat(1, 2)]);
    }

    #[test]
    fn canonical_point_2d_two_levels() {
        let w = monomial_poly(
            2,
            &[(0, &[1, 0]), (1, &[-1, 0]), (1, &[0, 1]), (1, &[0, -1])],
        );
        let cp = canonical_point(&w).unwrap();
        assert_eq!(cp.d_crit, vec![rat(1, 2), rat_int(0)]);
    }

    #[test]
    fn canonical_point_simplex_potential() {
        for r in 1..=4usize {
            let mut terms: Vec<(i64, Vec<i64>)> = Vec::new();
            for i in 0..r {
                let mut v = vec![0i64; r];
                v[i] = 1;
                terms.push((0, v));
            }
            terms.push((1, vec![-1; r]));
            let w = monomial_poly(
                r,
                &terms.iter().map(|(c, v)| (*c, v.as_slice())).collect::<Vec<_>>(),
            );
            let cp = canonical_point(&w).unwrap();
            let expect = rat(1, (r + 1) as i64);
            assert!(cp.d_crit.iter().all(|x| *x == expect), "r = {}", r);
        }
    }

    #[test]
    fn canonical_point_rejects_incomplete() {
        let w = monomial_poly(2, &[(0, &[1, 0]), (0, &[-1, 0]), (0, &[0, 1])]);
        assert!(matches!(canonical_point(&w), Err(Error::NotComplete(_))));
    }
}
