//! Dense two-phase simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (smallest eligible index for both entering
//! and leaving variables), so the method terminates on every input. The
//! problem sizes produced by Newton data are tiny; a dense tableau is the
//! simplest thing that is obviously correct.

use num_traits::{One, Signed, Zero};

use super::{Rat, RatVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. When optimal, the witness reproduces the optimum on
/// re-evaluation and satisfies every constraint exactly.
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub optimum: Rat,
    /// Values of the original variables (empty unless optimal).
    pub witness: RatVector,
}

/// A linear program in the solver's natural form:
/// minimize `c . x` subject to equalities `a . x = b`, inequalities
/// `a . x >= b`, and per-variable sign restrictions.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: RatVector,
    equalities: Vec<(RatVector, Rat)>,
    inequalities: Vec<(RatVector, Rat)>,
    nonneg: Vec<bool>,
}

impl LinearProgram {
    /// Start a minimization of `objective`; all variables are free until
    /// marked nonnegative.
    pub fn minimize(num_vars: usize, objective: RatVector) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram {
            num_vars,
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            nonneg: vec![false; num_vars],
        }
    }

    pub fn require_nonneg(&mut self, var: usize) {
        self.nonneg[var] = true;
    }

    /// Add `row . x = rhs`.
    pub fn equality(&mut self, row: RatVector, rhs: Rat) {
        assert_eq!(row.len(), self.num_vars);
        self.equalities.push((row, rhs));
    }

    /// Add `row . x >= rhs`.
    pub fn inequality_ge(&mut self, row: RatVector, rhs: Rat) {
        assert_eq!(row.len(), self.num_vars);
        self.inequalities.push((row, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
}

/// Solve the program exactly.
pub fn lp_solve(lp: &LinearProgram) -> LpResult {
    // Column layout: one column per nonnegative variable, two (x+ , x-) per
    // free variable, then one slack per inequality.
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(lp.num_vars);
    let mut ncols = 0usize;
    for var in 0..lp.num_vars {
        if lp.nonneg[var] {
            col_of_var.push((ncols, None));
            ncols += 1;
        } else {
            col_of_var.push((ncols, Some(ncols + 1)));
            ncols += 2;
        }
    }
    let slack0 = ncols;
    ncols += lp.inequalities.len();

    let nrows = lp.equalities.len() + lp.inequalities.len();
    let mut a = vec![vec![Rat::zero(); ncols]; nrows];
    let mut b = vec![Rat::zero(); nrows];
    let mut c = vec![Rat::zero(); ncols];

    let spread = |row: &RatVector, dst: &mut Vec<Rat>| {
        for (var, coeff) in row.iter().enumerate() {
            let (pos, neg) = col_of_var[var];
            dst[pos] += coeff;
            if let Some(neg) = neg {
                dst[neg] -= coeff;
            }
        }
    };

    for (i, (row, rhs)) in lp.equalities.iter().enumerate() {
        spread(row, &mut a[i]);
        b[i] = rhs.clone();
    }
    for (k, (row, rhs)) in lp.inequalities.iter().enumerate() {
        let i = lp.equalities.len() + k;
        spread(row, &mut a[i]);
        a[i][slack0 + k] = -Rat::one();
        b[i] = rhs.clone();
    }
    spread(&lp.objective, &mut c);

    match simplex_standard(a, b, &c) {
        StdOutcome::Infeasible => LpResult {
            status: LpStatus::Infeasible,
            optimum: Rat::zero(),
            witness: Vec::new(),
        },
        StdOutcome::Unbounded => LpResult {
            status: LpStatus::Unbounded,
            optimum: Rat::zero(),
            witness: Vec::new(),
        },
        StdOutcome::Optimal { x, value } => {
            let witness: RatVector = col_of_var
                .iter()
                .map(|&(pos, neg)| match neg {
                    None => x[pos].clone(),
                    Some(neg) => &x[pos] - &x[neg],
                })
                .collect();
            LpResult { status: LpStatus::Optimal, optimum: value, witness }
        }
    }
}

enum StdOutcome {
    Optimal { x: RatVector, value: Rat },
    Infeasible,
    Unbounded,
}

/// min `c . x` s.t. `a x = b`, `x >= 0`, by two-phase simplex with Bland's
/// rule.
fn simplex_standard(mut a: Vec<RatVector>, mut b: RatVector, c: &[Rat]) -> StdOutcome {
    let m = a.len();
    let n = c.len();

    for i in 0..m {
        if b[i].is_negative() {
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
            b[i] = -b[i].clone();
        }
    }

    // Tableau columns: structural 0..n, artificial n..n+m, rhs last.
    let width = n + m + 1;
    let mut t: Vec<RatVector> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rat::zero(); width];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = Rat::one();
        row[width - 1] = b[i].clone();
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let phase1: Vec<Rat> = (0..n + m)
        .map(|j| if j >= n { Rat::one() } else { Rat::zero() })
        .collect();
    run_simplex(&mut t, &mut basis, &phase1, n + m);
    let p1_value = objective_value(&t, &basis, &phase1);
    if !p1_value.is_zero() {
        return StdOutcome::Infeasible;
    }

    // Drive any artificial still basic out of the basis; a row with no
    // structural pivot available is redundant and dropped.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
                i += 1;
            } else {
                t.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // Phase 2 over structural columns only.
    let mut phase2: Vec<Rat> = c.to_vec();
    phase2.extend(std::iter::repeat(Rat::zero()).take(m));
    if !run_simplex(&mut t, &mut basis, &phase2, n) {
        return StdOutcome::Unbounded;
    }

    let mut x = vec![Rat::zero(); n];
    let rhs = width - 1;
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][rhs].clone();
        }
    }
    let value = super::dot(c, &x);
    StdOutcome::Optimal { x, value }
}

fn objective_value(t: &[RatVector], basis: &[usize], cost: &[Rat]) -> Rat {
    let rhs = t.first().map_or(0, |row| row.len() - 1);
    let mut v = Rat::zero();
    for (i, &bi) in basis.iter().enumerate() {
        if !cost[bi].is_zero() {
            v += &cost[bi] * &t[i][rhs];
        }
    }
    v
}

/// Simplex iterations restricted to columns `0..active`. Returns false on
/// unboundedness.
fn run_simplex(t: &mut Vec<RatVector>, basis: &mut [usize], cost: &[Rat], active: usize) -> bool {
    loop {
        // Reduced cost of column j: c_j - cB . T[:, j]; entering variable is
        // the smallest index with a negative reduced cost (Bland).
        let mut entering = None;
        'cols: for j in 0..active {
            if basis.contains(&j) {
                continue;
            }
            let mut r = cost[j].clone();
            for (i, &bi) in basis.iter().enumerate() {
                if !cost[bi].is_zero() && !t[i][j].is_zero() {
                    r -= &cost[bi] * &t[i][j];
                }
            }
            if r.is_negative() {
                entering = Some(j);
                break 'cols;
            }
        }
        let Some(j) = entering else {
            return true;
        };

        // Ratio test; ties broken by smallest basic variable index (Bland).
        let rhs = t.first().map_or(0, |row| row.len() - 1);
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = &t[i][rhs] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            return false;
        };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [RatVector], basis: &mut [usize], row: usize, col: usize) {
    let inv = t[row][col].recip();
    for x in t[row].iter_mut() {
        *x *= &inv;
    }
    for i in 0..t.len() {
        if i != row && !t[i][col].is_zero() {
            let f = t[i][col].clone();
            for j in 0..t[i].len() {
                let delta = &f * &t[row][j];
                t[i][j] -= delta;
            }
        }
    }
    basis[row] = col;
}
