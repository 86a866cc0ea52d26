//! Exact rational linear algebra and linear programming.
//!
//! Everything in this module is computed over arbitrary-precision rationals;
//! there is no rounding anywhere. The linear program solver is a dense
//! two-phase simplex with Bland's anti-cycling rule, which is all the
//! polytopes arising from Newton data ever need.

mod simplex;

pub use simplex::{lp_solve, LinearProgram, LpResult, LpStatus};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the solver.
pub type Rat = num_rational::BigRational;
/// Dense vector of exact rationals.
pub type RatVector = Vec<Rat>;
/// Dense matrix of exact rationals (row major, rectangular).
pub type RatMatrix = Vec<RatVector>;

/// Short-hand for a small rational constant.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(num.into())
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("rational out of f64 range")
}

pub fn zeros(len: usize) -> RatVector {
    vec![Rat::zero(); len]
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Rat], s: &Rat) -> RatVector {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn to_f64_vec(a: &[Rat]) -> Vec<f64> {
    a.iter().map(rat_to_f64).collect()
}

/// A linear subspace of `Q^n`, stored as a reduced row echelon basis.
///
/// Pivot columns are chosen lexicographically, so the echelon basis, the
/// complement basis and all quotient coordinates are deterministic across
/// runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// Reduced row echelon basis; `pivots[i]` is the pivot column of row `i`.
    rows: RatMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The zero subspace of `Q^ambient`.
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Span of the given vectors.
    pub fn from_spanning(ambient: usize, vecs: &[RatVector]) -> Self {
        let mut sub = Subspace::zero(ambient);
        for v in vecs {
            sub.insert(v);
        }
        sub
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[RatVector] {
        &self.rows
    }

    /// Reduce `v` against the echelon basis, eliminating all pivot columns.
    pub fn reduce(&self, v: &[Rat]) -> RatVector {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Insert a vector into the span; returns true if the dimension grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        // Eliminate the new pivot column from existing rows, keeping RREF.
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.rows.insert(at, r);
        self.pivots.insert(at, p);
        true
    }

    /// Span of `self` together with `more`.
    pub fn extended(&self, more: &[RatVector]) -> Subspace {
        let mut sub = self.clone();
        for v in more {
            sub.insert(v);
        }
        sub
    }

    /// Columns indexing the lexicographic complement basis `{e_k}`.
    pub fn complement_cols(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Coordinates of the image of `v` in the quotient `Q^n / self`, written
    /// in the complement basis. Members of the subspace map to zero.
    pub fn quotient_coords(&self, v: &[Rat]) -> RatVector {
        let r = self.reduce(v);
        self.complement_cols().iter().map(|&c| r[c].clone()).collect()
    }

    /// The canonical representative of a quotient coordinate vector.
    pub fn lift(&self, coords: &[Rat]) -> RatVector {
        let cols = self.complement_cols();
        assert_eq!(coords.len(), cols.len(), "quotient coordinate length mismatch");
        let mut v = zeros(self.ambient);
        for (x, &c) in coords.iter().zip(&cols) {
            v[c] = x.clone();
        }
        v
    }

    /// Orthonormal basis of the subspace in floating point (Gram-Schmidt on
    /// the exact echelon basis).
    pub fn orthonormal_basis_f64(&self) -> Vec<Vec<f64>> {
        orthonormalize(self.rows.iter().map(|r| to_f64_vec(r)))
    }
}

/// Gram-Schmidt with drop of numerically dependent vectors.
pub fn orthonormalize(vecs: impl IntoIterator<Item = Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vecs {
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Quotient coordinates of each vector modulo `sub`.
///
/// Reducing, lifting and reducing again is the identity on coordinates.
pub fn quotient_reduce(vecs: &[RatVector], sub: &Subspace) -> Vec<RatVector> {
    vecs.iter().map(|v| sub.quotient_coords(v)).collect()
}

/// Result of a lowest-point query on an augmented point set.
#[derive(Debug, Clone)]
pub struct LowestPoint {
    /// Minimal height `tau`: the smallest `c` with `(c, 0)` in the hull.
    pub tau: Rat,
    /// Convex weights realizing `(tau, 0)`, indexed like the input points.
    pub weights: RatVector,
}

/// Minimal height above the origin of the hull of augmented points `(c, v)`.
///
/// Solves `min sum(r_i c_i)` subject to `sum(r_i v_i) = 0`, `sum(r_i) = 1`,
/// `r >= 0`. Infeasibility (the hull misses the vertical axis) is reported as
/// `NoPointAboveZero`; it cannot occur for complete input.
pub fn lowest_point(points: &[(Rat, RatVector)]) -> Result<LowestPoint> {
    assert!(!points.is_empty(), "lowest_point on empty point set");
    let n = points.len();
    let dim = points[0].1.len();
    let mut lp = LinearProgram::minimize(n, points.iter().map(|(c, _)| c.clone()).collect());
    for var in 0..n {
        lp.require_nonneg(var);
    }
    for coord in 0..dim {
        let row: RatVector = points.iter().map(|(_, v)| v[coord].clone()).collect();
        lp.equality(row, Rat::zero());
    }
    lp.equality(vec![Rat::one(); n], Rat::one());
    let res = lp_solve(&lp);
    match res.status {
        LpStatus::Optimal => Ok(LowestPoint { tau: res.optimum, weights: res.witness }),
        LpStatus::Infeasible => Err(Error::NoPointAboveZero),
        LpStatus::Unbounded => Err(Error::InvariantViolation(
            "lowest-point LP unbounded on a bounded simplex".into(),
        )),
    }
}

/// Support of the minimal face of `hull(points)` containing `target`.
#[derive(Debug, Clone)]
pub struct FaceSupport {
    /// Indices `i` admitting a convex combination of the points hitting the
    /// target with `r_i > 0`.
    pub support: Vec<usize>,
    /// A single convex combination hitting the target that is strictly
    /// positive exactly on the support.
    pub weights: RatVector,
}

/// Indices spanning the minimal face of the hull containing `target`.
///
/// One LP per index maximizes that index's weight among convex combinations
/// hitting the target; the support is the set of indices with positive
/// optimum, and the minimal face is the hull of those points.
pub fn minimal_face_support(points: &[RatVector], target: &[Rat]) -> Result<FaceSupport> {
    assert!(!points.is_empty(), "minimal_face_support on empty point set");
    let n = points.len();
    let dim = points[0].len();
    let base = |objective: RatVector| {
        let mut lp = LinearProgram::minimize(n, objective);
        for var in 0..n {
            lp.require_nonneg(var);
        }
        for coord in 0..dim {
            let row: RatVector = points.iter().map(|p| p[coord].clone()).collect();
            lp.equality(row, target[coord].clone());
        }
        lp.equality(vec![Rat::one(); n], Rat::one());
        lp
    };

    // Feasibility first: is the target in the hull at all?
    let feas = lp_solve(&base(zeros(n)));
    if feas.status != LpStatus::Optimal {
        return Err(Error::TargetNotInHull);
    }

    let mut support = Vec::new();
    let mut accum = zeros(n);
    let mut count = 0usize;
    for i in 0..n {
        let mut obj = zeros(n);
        obj[i] = -Rat::one(); // maximize r_i
        let res = lp_solve(&base(obj));
        if res.status != LpStatus::Optimal {
            return Err(Error::InvariantViolation("support LP lost feasibility".into()));
        }
        if res.witness[i].is_positive() {
            support.push(i);
        }
        accum = vec_add(&accum, &res.witness);
        count += 1;
    }
    // The average of the per-index optima is a strict combination on the
    // support and zero off it.
    let inv = Rat::from_integer((count as i64).into()).recip();
    let weights = vec_scale(&accum, &inv);
    Ok(FaceSupport { support, weights })
}

/// The unique `a` with `(1, a)` vanishing on a hyperplane flag in `Q^(1+r)`.
///
/// The flag must have dimension `r` and be transversal to the first
/// coordinate axis.
pub fn solve_vanishing_hyperplane(flag: &Subspace) -> Result<RatVector> {
    let ambient = flag.ambient();
    assert!(ambient >= 1, "ambient space must contain the distinguished axis");
    let r = ambient - 1;
    if flag.dim() != r {
        return Err(Error::WrongDimension { expected: r, got: flag.dim() });
    }
    // For each basis vector e = (e0, ebar): ebar . a = -e0.
    let rows: RatMatrix = flag.basis().iter().map(|e| e[1..].to_vec()).collect();
    let rhs: RatVector = flag.basis().iter().map(|e| -e[0].clone()).collect();
    solve_square(&rows, &rhs).ok_or(Error::NotTransversal)
}

/// Exact solve of a square system; `None` when singular.
pub fn solve_square(a: &RatMatrix, b: &RatVector) -> Option<RatVector> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let delta = &f * &m[col][j];
                    m[i][j] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Rank of a set of rational vectors.
pub fn rank(vecs: &[RatVector], ambient: usize) -> usize {
    Subspace::from_spanning(ambient, vecs).dim()
}
