//! Leading coefficient and series lifting for the positive critical point.
//!
//! Once the exact tropical critical point is known, the critical point itself
//! is assembled in logarithmic coordinates `p = e^u t^d exp_T(w)`:
//!
//! * `u = d_coeff` solves a nested family of strictly convex minimizations,
//!   one per delta-level, each on the orthogonal complement of the spans
//!   below the level (damped Newton; the Hessian is positive definite);
//! * `w = w_crit` is built by a lifting recursion `p <- p exp_T(t^(nu-eps) u')`
//!   that pushes the valuation of the gradient past the requested order.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::puiseux::{ExtRat, PuiseuxSeries, TorusPoint};
use crate::ratgeom::{orthonormalize, rat_int, rat_to_f64, to_f64_vec, Rat, RatVector};
use crate::recursion::{canonical_point, CanonicalPoint, StageRecord};
use crate::tropical::{check_coeff_conditions, level_data, LaurentPoly, LevelData};

/// Tunable tolerances and limits for the solver.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Requested truncation order for `w_crit` (relative to `tau`).
    pub order: Rat,
    /// Floating membership/projection tolerance.
    pub tol: f64,
    /// Relative gradient norm at which the convex minimizations stop.
    pub newton_tol: f64,
    /// Iteration cap for each damped Newton run.
    pub max_iter: usize,
    /// Cap on lifting steps (a safety net; progress is otherwise monotone).
    pub max_lift_steps: usize,
    /// Coefficients below this threshold are treated as zero when reading
    /// residual valuations.
    pub cleanup: f64,
    /// Random directions sampled by the nondegeneracy check.
    pub nondeg_samples: usize,
    /// Seed for the sampled directions.
    pub seed: u64,
    /// Test hook: perturb each lifting representative by a valid alternative
    /// (an element of the orthocomplement at-or-below the level). The final
    /// series must not depend on it.
    pub rep_jitter: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            order: rat_int(3),
            tol: 1e-9,
            newton_tol: 1e-12,
            max_iter: 100,
            max_lift_steps: 10_000,
            cleanup: 1e-10,
            nondeg_samples: 10,
            seed: 0,
            rep_jitter: None,
        }
    }
}

impl SolveOptions {
    pub fn with_order(order: Rat) -> Self {
        SolveOptions { order, ..Default::default() }
    }
}

/// Gradient function of `W` at a torus point, one series per coordinate:
/// the `j`-th component is `sum_i gamma_i p^(v_i) v_ij`.
///
/// `p` is a critical point to order `N` iff every component has valuation at
/// least `tau + N`.
pub fn gradient(w: &LaurentPoly, p: &TorusPoint) -> Result<Vec<PuiseuxSeries>> {
    Ok(gradient_with_terms(w, p)?.0)
}

/// Gradient together with the per-term series `gamma_i p^(v_i)` it was
/// assembled from; the term values carry the true magnitude of the operands
/// behind each cancellation, which noise estimates need.
fn gradient_with_terms(
    w: &LaurentPoly,
    p: &TorusPoint,
) -> Result<(Vec<PuiseuxSeries>, Vec<PuiseuxSeries>)> {
    if p.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), got: p.dim() });
    }
    let r = w.dim();
    let mut values = Vec::with_capacity(w.num_terms());
    let mut out = vec![PuiseuxSeries::zero(); r];
    for (coeff, v) in w.terms() {
        let s = coeff.mul(&p.eval_character(v)?);
        for (j, vj) in v.iter().enumerate() {
            if !vj.is_zero() {
                out[j] = out[j].add(&s.scale(rat_to_f64(vj)));
            }
        }
        values.push(s);
    }
    Ok((out, values))
}

/// Orthonormal level bases derived from the level data at `d_crit`.
#[derive(Debug, Clone)]
struct LevelBases {
    levels: Vec<Rat>,
    /// Active term indices per level.
    active: Vec<Vec<usize>>,
    /// Orthonormal basis of `B_{<eps}` per level.
    lt: Vec<Vec<Vec<f64>>>,
    /// Orthonormal basis of `B_{<=eps}` per level.
    le: Vec<Vec<Vec<f64>>>,
    /// Orthonormal basis of the complement of `B_{<eps}` inside `B_{<=eps}`
    /// (the canonical home of level corrections).
    comp: Vec<Vec<Vec<f64>>>,
    /// Orthonormal basis of the orthocomplement of `B_{<=eps}` in the whole
    /// space (valid representative ambiguity of a correction).
    le_perp: Vec<Vec<Vec<f64>>>,
}

impl LevelBases {
    fn new(ld: &LevelData, dim: usize) -> Self {
        let mut active = Vec::new();
        let mut lt = Vec::new();
        let mut le = Vec::new();
        let mut comp = Vec::new();
        let mut le_perp = Vec::new();
        for (k, eps) in ld.levels.iter().enumerate() {
            active.push(ld.active(eps));
            let lt_vecs: Vec<Vec<f64>> =
                ld.below[k].basis().iter().map(|v| to_f64_vec(v)).collect();
            let le_vecs: Vec<Vec<f64>> =
                ld.at_or_below[k].basis().iter().map(|v| to_f64_vec(v)).collect();
            let lt_ortho = orthonormalize(lt_vecs.iter().cloned());
            let mut chain = lt_vecs.clone();
            chain.extend(le_vecs.iter().cloned());
            let both = orthonormalize(chain);
            comp.push(both[lt_ortho.len()..].to_vec());
            lt.push(lt_ortho);
            let le_ortho = orthonormalize(le_vecs.iter().cloned());
            let mut full = le_vecs.clone();
            for j in 0..dim {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                full.push(e);
            }
            let extended = orthonormalize(full);
            le_perp.push(extended[le_ortho.len()..].to_vec());
            le.push(le_ortho);
        }
        LevelBases { levels: ld.levels.clone(), active, lt, le, comp, le_perp }
    }
}

fn proj_residual_norm(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut res = v.to_vec();
    for b in basis {
        let c: f64 = res.iter().zip(b).map(|(x, y)| x * y).sum();
        for (x, y) in res.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    res.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solve a small dense symmetric positive definite system by Gaussian
/// elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Cholesky-based positive definiteness test.
fn is_positive_definite(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Minimize `f(y) = sum_i weight_i exp(<e_i, y>)` by damped Newton with
/// backtracking. The Hessian is positive definite whenever the exponents
/// span, so the full step is accepted near the optimum.
fn newton_minimize(
    weights: &[f64],
    exps: &[Vec<f64>],
    mut y: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let k = y.len();
    let eval = |y: &[f64]| -> (f64, Vec<f64>, Vec<Vec<f64>>) {
        let mut f = 0.0;
        let mut g = vec![0.0; k];
        let mut h = vec![vec![0.0; k]; k];
        for (wi, ei) in weights.iter().zip(exps) {
            let t = wi * ei.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().exp();
            f += t;
            for a in 0..k {
                g[a] += t * ei[a];
                for b in 0..=a {
                    h[a][b] += t * ei[a] * ei[b];
                }
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                h[a][b] = h[b][a];
            }
        }
        (f, g, h)
    };

    let mut best_grad = f64::INFINITY;
    for _ in 0..max_iter {
        let (f, g, h) = eval(&y);
        let gnorm = norm(&g);
        best_grad = best_grad.min(gnorm);
        if gnorm <= tol * f.max(1.0) {
            return Ok(y);
        }
        let step = solve_dense(h, g.iter().map(|x| -x).collect()).ok_or_else(|| {
            Error::InvariantViolation("singular Hessian in a strictly convex minimization".into())
        })?;
        if gnorm <= 1e-7 * f.max(1.0) {
            // Endgame: the objective decrease is below evaluation noise, so a
            // monotonicity test would wrongly reject the step; undamped
            // Newton is locally contracting here.
            for (a, b) in y.iter_mut().zip(&step) {
                *a += b;
            }
            continue;
        }
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = y.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            let (fc, _, _) = eval(&cand);
            if fc <= f || t < 1e-14 {
                y = cand;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::MaxIterExceeded { iterations: max_iter, grad_norm: best_grad })
}

/// The logarithmic leading coefficient `d_coeff` of the positive critical
/// point: for each level in increasing order, minimize the level's convex
/// energy on the quotient complement and translate.
pub fn solve_coeff(w: &LaurentPoly, cp: &CanonicalPoint, opts: &SolveOptions) -> Result<Vec<f64>> {
    solve_coeff_from(w, cp, opts, None)
}

/// As [`solve_coeff`], with optional random Newton starting points (used by
/// the uniqueness probe; `None` starts at the origin).
pub fn solve_coeff_from(
    w: &LaurentPoly,
    cp: &CanonicalPoint,
    opts: &SolveOptions,
    start_seed: Option<u64>,
) -> Result<Vec<f64>> {
    let ld = level_data(w, &cp.d_crit);
    let bases = LevelBases::new(&ld, w.dim());
    // The projected exponent polytope at each level must be full-dimensional
    // with zero in its interior; this is exactly the tropical critical
    // condition at the canonical point, already certified, but cheap to
    // re-assert on the exact data.
    let check = crate::tropical::check_tropical_critical(w, &cp.d_crit);
    if !check.passed {
        return Err(Error::InvariantViolation(
            "level polytope degenerate: tropical critical conditions fail at d_crit".into(),
        ));
    }
    let coeffs: Vec<f64> = w
        .terms()
        .iter()
        .map(|(c, _)| c.leading_coeff().expect("positive coefficient"))
        .collect();
    let exps_f64: Vec<Vec<f64>> = w.exponents().iter().map(|v| to_f64_vec(v)).collect();

    let mut rng = start_seed.map(ChaCha8Rng::seed_from_u64);
    let mut d = vec![0.0; w.dim()];
    for (k, _eps) in bases.levels.iter().enumerate() {
        let q = &bases.comp[k];
        if q.is_empty() {
            continue;
        }
        let active = &bases.active[k];
        let weights: Vec<f64> = active
            .iter()
            .map(|&i| {
                coeffs[i]
                    * exps_f64[i].iter().zip(&d).map(|(a, b)| a * b).sum::<f64>().exp()
            })
            .collect();
        let reduced: Vec<Vec<f64>> = active
            .iter()
            .map(|&i| q.iter().map(|b| b.iter().zip(&exps_f64[i]).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let y0: Vec<f64> = match &mut rng {
            Some(rng) => (0..q.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            None => vec![0.0; q.len()],
        };
        let y = newton_minimize(&weights, &reduced, y0, opts.newton_tol, opts.max_iter)?;
        for (l, b) in q.iter().enumerate() {
            for (dj, bj) in d.iter_mut().zip(b) {
                *dj += y[l] * bj;
            }
        }
    }
    if !check_coeff_conditions(w, &cp.d_crit, &d, opts.tol) {
        return Err(Error::InvariantViolation(
            "solved coefficient fails the critical coefficient conditions".into(),
        ));
    }
    Ok(d)
}

/// One recorded lifting step.
#[derive(Debug, Clone)]
pub struct LiftStepRecord {
    /// Residual valuation offset before the step.
    pub nu: Rat,
    /// Level whose form absorbed the leading residual.
    pub level: Rat,
    /// Correction direction applied at exponent `nu - level`.
    pub correction: Vec<f64>,
}

/// Mutable state of the lifting recursion.
#[derive(Debug, Clone)]
pub struct LiftState {
    tau: Rat,
    d_crit: RatVector,
    d_coeff: Vec<f64>,
    w: Vec<PuiseuxSeries>,
    bases: LevelBases,
    /// The largest delta-level; corrections at it reach this far below the
    /// current residual offset.
    eps_max: Rat,
    /// Relative-order horizon: corrections and certificates live below it.
    cap: ExtRat,
    /// Residual offset past which lifting stops: requested order plus the
    /// level spread.
    target: Rat,
    last: Option<(Rat, Rat, f64)>,
    pub log: Vec<LiftStepRecord>,
    opts: SolveOptions,
    rng: Option<ChaCha8Rng>,
}

/// Outcome of one lifting step.
#[derive(Debug, Clone)]
pub enum LiftOutcome {
    /// A correction was applied at the given residual offset and level.
    Lifted { nu: Rat, level: Rat },
    /// The gradient valuation cleared the target (or the knowledge horizon);
    /// carries the certified residual valuation.
    Converged { residual: ExtRat },
}

impl LiftState {
    fn new(
        w: &LaurentPoly,
        d_crit: &[Rat],
        d_coeff: &[f64],
        tau: Rat,
        opts: &SolveOptions,
    ) -> Self {
        let ld = level_data(w, d_crit);
        let bases = LevelBases::new(&ld, w.dim());
        // A series coefficient of w at exponent s is only final once the
        // gradient valuation has passed tau + s + (largest effective level):
        // later corrections can still reach down to s from any level that
        // admits corrections at all, i.e. whose quotient is nontrivial.
        // Driving the residual past the order plus that spread is what
        // certifies the series through the requested order.
        let eps_max = ld
            .levels
            .iter()
            .zip(&bases.comp)
            .filter(|(_, q)| !q.is_empty())
            .map(|(e, _)| e.clone())
            .last()
            .unwrap_or_else(Rat::zero);
        let stop_target = &opts.order + &eps_max;
        // Knowledge horizon: the input coefficient horizons bound how far the
        // gradient can ever be resolved; one extra unit beyond the target
        // lets the stopping rule observe a strict crossing.
        let achievable = w
            .terms()
            .iter()
            .zip(&ld.deltas)
            .map(|((c, _), delta)| {
                let rel = match c.trunc() {
                    ExtRat::Finite(t) => {
                        ExtRat::Finite(t - c.val().finite().expect("positive coefficient"))
                    }
                    ExtRat::Infinite => ExtRat::Infinite,
                };
                rel.plus(delta)
            })
            .fold(ExtRat::Infinite, ExtRat::min);
        let cap = ExtRat::Finite(&stop_target + rat_int(1)).min(achievable);
        LiftState {
            tau,
            d_crit: d_crit.to_vec(),
            d_coeff: d_coeff.to_vec(),
            w: vec![PuiseuxSeries::zero(); w.dim()],
            bases,
            eps_max,
            cap,
            target: stop_target,
            last: None,
            log: Vec::new(),
            opts: opts.clone(),
            rng: opts.rep_jitter.map(ChaCha8Rng::seed_from_u64),
        }
    }

    pub fn torus_point(&self) -> TorusPoint {
        TorusPoint::new(self.d_coeff.clone(), self.d_crit.clone(), self.w.clone())
            .expect("lift state is a valid torus point")
    }

    pub fn w(&self) -> &[PuiseuxSeries] {
        &self.w
    }

    /// Public constructor for driving the recursion step by step.
    pub fn new_public(
        w: &LaurentPoly,
        d_crit: &[Rat],
        d_coeff: &[f64],
        tau: Rat,
        opts: &SolveOptions,
    ) -> Self {
        Self::new(w, d_crit, d_coeff, tau, opts)
    }

    /// The coefficient vector, including any polish applied during lifting.
    pub fn d_coeff(&self) -> &[f64] {
        &self.d_coeff
    }
}

/// Drop coefficients that are noise relative to the data they were computed
/// from. Cancellation at an exponent involves operands at or below it, so
/// each term is compared against the configured threshold or a machine-noise
/// floor scaled by the largest operand coefficient seen at or below its
/// exponent, whichever is larger. A global scale would mask genuine
/// low-order residue whenever the series blows up near the horizon.
fn clean_prefix_local(
    components: Vec<PuiseuxSeries>,
    operands: &[PuiseuxSeries],
    cleanup: f64,
) -> Vec<PuiseuxSeries> {
    let mut ladder: Vec<(Rat, f64)> = operands
        .iter()
        .chain(components.iter())
        .flat_map(|s| s.terms().iter().map(|(e, c)| (e.clone(), c.abs())))
        .collect();
    ladder.sort_by(|a, b| a.0.cmp(&b.0));
    let mut run = 1.0f64;
    for entry in ladder.iter_mut() {
        run = run.max(entry.1);
        entry.1 = run;
    }
    let local_scale = |e: &Rat| -> f64 {
        match ladder.binary_search_by(|(le, _)| le.cmp(e)) {
            Ok(i) => ladder[i].1,
            Err(0) => 1.0,
            Err(i) => ladder[i - 1].1,
        }
    };
    components
        .into_iter()
        .map(|s| {
            let trunc = s.trunc().clone();
            let terms = s
                .terms()
                .iter()
                .filter(|(e, c)| c.abs() >= cleanup.max(1e-13 * local_scale(e)))
                .cloned()
                .collect();
            PuiseuxSeries::from_terms(terms, trunc)
        })
        .collect()
}

/// One step of the lifting recursion.
///
/// Computes the gradient, locates the minimal level whose at-or-below span
/// absorbs the leading coefficient vector, solves the level's positive
/// definite form for a correction, and multiplies the point by
/// `exp_T(t^(nu - eps) u')`. Fails with `StalledProgress` when neither the
/// residual offset grows nor the level shrinks.
pub fn lift_step(w: &LaurentPoly, state: &mut LiftState) -> Result<LiftOutcome> {
    let p = state.torus_point();
    let (raw, term_values) = gradient_with_terms(w, &p)?;
    let g = clean_prefix_local(raw, &term_values, state.opts.cleanup);

    let g_trunc = g
        .iter()
        .map(|s| s.trunc().clone())
        .fold(ExtRat::Infinite, ExtRat::min);
    let g_val = g.iter().map(|s| s.val()).fold(ExtRat::Infinite, ExtRat::min);

    // The leading coefficient vector is fully known only strictly below every
    // component's horizon; otherwise the horizon itself is the certificate.
    if g_val >= g_trunc {
        return Ok(LiftOutcome::Converged { residual: g_trunc });
    }
    let nu = match &g_val {
        ExtRat::Finite(v) => v - &state.tau,
        ExtRat::Infinite => unreachable!("finite valuation below a horizon"),
    };
    if nu > state.target {
        return Ok(LiftOutcome::Converged {
            residual: ExtRat::Finite(&state.tau + &nu),
        });
    }
    if nu.is_negative() {
        return Err(Error::InvariantViolation(
            "gradient valuation fell below the tropical maximum".into(),
        ));
    }

    let at = &state.tau + &nu;
    let lead: Vec<f64> = g.iter().map(|s| s.coeff_at(&at)).collect();
    let lead_norm = norm(&lead);
    if lead_norm == 0.0 {
        return Err(Error::InvariantViolation(
            "leading gradient coefficient vanished after cleanup".into(),
        ));
    }
    // Noise floor at this exponent, from the operands that formed it.
    let noise_floor = {
        let local = term_values
            .iter()
            .flat_map(|s| s.terms().iter())
            .filter(|(e, _)| *e <= at)
            .fold(1.0f64, |m, (_, c)| m.max(c.abs()));
        state.opts.cleanup.max(1e-13 * local)
    };

    // Minimal level whose at-or-below span contains the leading vector.
    let mut found = None;
    for (k, basis) in state.bases.le.iter().enumerate() {
        if proj_residual_norm(&lead, basis) <= state.opts.tol * (1.0 + lead_norm) {
            found = Some(k);
            break;
        }
    }
    let Some(h) = found else {
        return Err(Error::StalledProgress {
            at: format!("residual offset {} fits no level span", nu),
        });
    };
    let eps = state.bases.levels[h].clone();
    if eps > nu {
        return Err(Error::StalledProgress {
            at: format!("level {} overtook residual offset {}", eps, nu),
        });
    }
    // With an exact coefficient vector the absorbing level sits strictly
    // below the residual offset; floating error can leave residue exactly at
    // a level, in which case the correction carries exponent zero and
    // polishes the coefficient vector itself. Repeating a step at the same
    // offset and level is iterative refinement against an ill-conditioned
    // form: legitimate as long as the residue shrinks geometrically, since
    // the leading coefficient is re-evaluated exactly each round.
    let polish = eps == nu;
    if let Some((last_nu, last_eps, last_norm)) = &state.last {
        let progressed = nu > *last_nu
            || (nu == *last_nu && eps < *last_eps)
            || (nu == *last_nu && lead_norm <= 0.5 * last_norm);
        if !progressed {
            // A coefficient hovering at the noise floor cannot be refined
            // further in double precision; the valuation certificate down to
            // this exponent is still sound.
            if lead_norm <= 4.0 * noise_floor {
                return Ok(LiftOutcome::Converged {
                    residual: ExtRat::Finite(at),
                });
            }
            return Err(Error::StalledProgress {
                at: format!("offset {} level {}", nu, eps),
            });
        }
    }

    // Solve the level form for the correction: B_h y = -Q g_lead.
    let q = &state.bases.comp[h];
    if q.is_empty() {
        return Err(Error::InvariantViolation(
            "minimal absorbing level has a trivial quotient".into(),
        ));
    }
    let coeffs: Vec<f64> = w
        .terms()
        .iter()
        .map(|(c, _)| c.leading_coeff().expect("positive coefficient"))
        .collect();
    let exps_f64: Vec<Vec<f64>> = w.exponents().iter().map(|v| to_f64_vec(v)).collect();
    let k = q.len();
    let mut form = vec![vec![0.0; k]; k];
    for &i in &state.bases.active[h] {
        let a_i = coeffs[i]
            * exps_f64[i]
                .iter()
                .zip(&state.d_coeff)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                .exp();
        let qv: Vec<f64> = q
            .iter()
            .map(|b| b.iter().zip(&exps_f64[i]).map(|(x, y)| x * y).sum())
            .collect();
        for a in 0..k {
            for b in 0..k {
                form[a][b] += a_i * qv[a] * qv[b];
            }
        }
    }
    let rhs: Vec<f64> = q
        .iter()
        .map(|b| -b.iter().zip(&lead).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    let y = solve_dense(form, rhs).ok_or_else(|| {
        Error::InvariantViolation("level form is singular; it must be positive definite".into())
    })?;
    let mut correction = vec![0.0; w.dim()];
    for (l, b) in q.iter().enumerate() {
        for (c, bj) in correction.iter_mut().zip(b) {
            *c += y[l] * bj;
        }
    }
    // Large corrections leak into the below-level span through rounding in
    // the basis products; projecting the leak out keeps lower-level terms
    // untouched to second order.
    for b in &state.bases.lt[h] {
        let c: f64 = correction.iter().zip(b).map(|(x, ybj)| x * ybj).sum();
        for (x, ybj) in correction.iter_mut().zip(b) {
            *x -= c * ybj;
        }
    }
    if let Some(rng) = &mut state.rng {
        // A valid alternative representative differs by something orthogonal
        // to everything at or below the level.
        for b in &state.bases.le_perp[h] {
            let amp: f64 = rng.gen_range(-0.5..0.5);
            for (c, bj) in correction.iter_mut().zip(b) {
                *c += amp * bj;
            }
        }
    }

    if polish {
        for (u, cj) in state.d_coeff.iter_mut().zip(&correction) {
            *u += cj;
        }
    } else {
        let exponent = &nu - &eps;
        for (wj, cj) in state.w.iter_mut().zip(&correction) {
            if *cj != 0.0 {
                *wj = wj
                    .add(&PuiseuxSeries::monomial(exponent.clone(), *cj))
                    .with_trunc(state.cap.clone());
            } else {
                *wj = wj.with_trunc(state.cap.clone());
            }
        }
    }

    log::debug!(
        "lift step {}: nu = {}, level = {}, |lead| = {:.3e}{}",
        state.log.len() + 1,
        nu,
        eps,
        lead_norm,
        if polish { " (coefficient polish)" } else { "" }
    );
    state.last = Some((nu.clone(), eps.clone(), lead_norm));
    state.log.push(LiftStepRecord { nu: nu.clone(), level: eps.clone(), correction });
    Ok(LiftOutcome::Lifted { nu, level: eps })
}

/// Full solver output: the critical point in logarithmic coordinates plus
/// certificates and the recursion traces.
#[derive(Debug, Clone)]
pub struct CritResult {
    pub d_crit: RatVector,
    pub d_coeff: Vec<f64>,
    pub w_crit: Vec<PuiseuxSeries>,
    /// Maximum of `Trop(W)`, attained at `d_crit`.
    pub tau: Rat,
    /// Sorted distinct delta-levels at `d_crit`.
    pub levels: Vec<Rat>,
    /// Order (relative to `tau`) to which the result is certified.
    pub achieved_order: Rat,
    /// True when the input coefficient horizons forced a lower order than
    /// requested.
    pub clamped: bool,
    /// Valuation of the gradient at the reconstructed point; `Infinite`
    /// means the gradient vanishes identically.
    pub residual_valuation: ExtRat,
    /// Stage trace of the tropical recursion.
    pub stages: Vec<StageRecord>,
    /// Lifting trace.
    pub lift_log: Vec<LiftStepRecord>,
}

impl CritResult {
    /// Reconstruct `p_crit = e^(d_coeff) t^(d_crit) exp_T(w_crit)`.
    pub fn torus_point(&self) -> TorusPoint {
        TorusPoint::new(self.d_coeff.clone(), self.d_crit.clone(), self.w_crit.clone())
            .expect("critical point is a valid torus point")
    }
}

/// Solve for the positive critical point to the requested truncation order.
pub fn solve_critical(w: &LaurentPoly, order: Rat) -> Result<CritResult> {
    solve_critical_with(w, &SolveOptions::with_order(order))
}

pub fn solve_critical_with(w: &LaurentPoly, opts: &SolveOptions) -> Result<CritResult> {
    if !opts.order.is_positive() {
        return Err(Error::InvariantViolation("truncation order must be positive".into()));
    }
    let cp = canonical_point(w)?;
    let tau = crate::tropical::trop_eval(w, &cp.d_crit);
    let d_coeff = solve_coeff(w, &cp, opts)?;
    let mut state = LiftState::new(w, &cp.d_crit, &d_coeff, tau.clone(), opts);

    let mut residual = None;
    for _ in 0..opts.max_lift_steps {
        match lift_step(w, &mut state)? {
            LiftOutcome::Converged { residual: r } => {
                residual = Some(r);
                break;
            }
            LiftOutcome::Lifted { .. } => {}
        }
    }
    let residual = residual.ok_or_else(|| {
        Error::InvariantViolation("lifting did not settle within the step budget".into())
    })?;

    // The series is final at exponent s once the gradient valuation passed
    // tau + s + eps_max, so the certified order trails the residual by the
    // level spread.
    let achieved_order = match &residual {
        ExtRat::Infinite => opts.order.clone(),
        ExtRat::Finite(v) => {
            let certified = v - &tau - &state.eps_max;
            let floor = Rat::zero();
            opts.order.clone().min(certified.max(floor))
        }
    };
    let clamped = achieved_order < opts.order;
    let ld = level_data(w, &cp.d_crit);
    let d_coeff = state.d_coeff().to_vec();
    Ok(CritResult {
        d_crit: cp.d_crit.clone(),
        d_coeff,
        w_crit: state.w().to_vec(),
        tau,
        levels: ld.levels,
        achieved_order,
        clamped,
        residual_valuation: residual,
        stages: cp.stages,
        lift_log: state.log.clone(),
    })
}

/// Per-direction second-derivative positivity record.
#[derive(Debug, Clone)]
pub struct DirectionCheck {
    pub direction: Vec<i64>,
    /// Leading coefficient of the second derivative along the direction.
    pub leading: f64,
    pub positive: bool,
}

/// Nondegeneracy certificate for a solved critical point.
#[derive(Debug, Clone)]
pub struct NondegCertificate {
    pub passed: bool,
    pub directions: Vec<DirectionCheck>,
    /// Positive definiteness of the leading (level-zero) Hessian block.
    pub leading_block_pd: bool,
}

/// Check that the Hessian pairing `H_p(u, u) = sum_i gamma_i <v_i,u>^2 p^(v_i)`
/// is a positive series along every coordinate direction and `samples`
/// random nonzero integer directions, and that the level-zero block of the
/// Hessian form is numerically positive definite.
pub fn check_nondegenerate(
    w: &LaurentPoly,
    result: &CritResult,
    samples: usize,
    seed: u64,
) -> Result<NondegCertificate> {
    let p = result.torus_point();
    let r = w.dim();
    let character_values: Vec<PuiseuxSeries> = w
        .terms()
        .iter()
        .map(|(coeff, v)| Ok(coeff.mul(&p.eval_character(v)?)))
        .collect::<Result<_>>()?;

    let mut dirs: Vec<Vec<i64>> = (0..r)
        .map(|j| {
            let mut e = vec![0i64; r];
            e[j] = 1;
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < r + samples {
        let u: Vec<i64> = (0..r).map(|_| rng.gen_range(-3i64..=3)).collect();
        if u.iter().any(|&x| x != 0) {
            dirs.push(u);
        }
    }

    let exponents = w.exponents();
    let mut checks = Vec::with_capacity(dirs.len());
    let mut all = true;
    for u in dirs {
        let mut h = PuiseuxSeries::zero();
        for (s, v) in character_values.iter().zip(&exponents) {
            let pairing: f64 = v.iter().zip(&u).map(|(a, &b)| rat_to_f64(a) * b as f64).sum();
            if pairing != 0.0 {
                h = h.add(&s.scale(pairing * pairing));
            }
        }
        // Rounding in the series products can deposit noise terms below the
        // true leading exponent; clean at the noise floor before reading.
        let h = clean_prefix_local(vec![h], &character_values, 1e-10)
            .pop()
            .expect("one component");
        let leading = h.leading_coeff().unwrap_or(0.0);
        let positive = !h.is_zero() && leading > 0.0;
        all &= positive;
        checks.push(DirectionCheck { direction: u, leading, positive });
    }

    // Level-zero Hessian block in an orthonormal basis of the level-zero span.
    let ld = level_data(w, &result.d_crit);
    let active = ld.active(&ld.levels[0]);
    let span: Vec<Vec<f64>> = ld.at_or_below[0].basis().iter().map(|v| to_f64_vec(v)).collect();
    let q = orthonormalize(span);
    let k = q.len();
    let mut block = vec![vec![0.0; k]; k];
    let coeffs: Vec<f64> = w
        .terms()
        .iter()
        .map(|(c, _)| c.leading_coeff().expect("positive coefficient"))
        .collect();
    for &i in &active {
        let vi = to_f64_vec(&exponents[i]);
        let a_i = coeffs[i]
            * vi.iter().zip(&result.d_coeff).map(|(x, y)| x * y).sum::<f64>().exp();
        let qv: Vec<f64> = q
            .iter()
            .map(|b| b.iter().zip(&vi).map(|(x, y)| x * y).sum())
            .collect();
        for a in 0..k {
            for b in 0..k {
                block[a][b] += a_i * qv[a] * qv[b];
            }
        }
    }
    // A zero-dimensional block (only the constant term at level zero) is
    // vacuously positive definite.
    let leading_block_pd = is_positive_definite(&block);
    all &= leading_block_pd;

    Ok(NondegCertificate { passed: all, directions: checks, leading_block_pd })
}
