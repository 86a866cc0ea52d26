//! Property-based invariants for series arithmetic, the rational geometry
//! engine, and the solver pipeline.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropcrit::corpus;
use tropcrit::lift::{solve_coeff_from, solve_critical_with, SolveOptions};
use tropcrit::puiseux::{ExtRat, PuiseuxSeries, TorusPoint};
use tropcrit::ratgeom::{
    self, dot, lowest_point, minimal_face_support, quotient_reduce, rat, rat_int, Rat, RatVector,
    Subspace,
};
use tropcrit::recursion::canonical_point;
use tropcrit::tropical::{check_tropical_critical, level_data, trop_eval, trop_max, LaurentPoly};
use tropcrit::lift::gradient;

fn arb_rat(range: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Rat> {
    (range, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn arb_coeff() -> impl Strategy<Value = f64> {
    prop_oneof![0.1f64..3.0, (-3.0f64..=-0.1)]
}

fn arb_series(min_terms: usize) -> impl Strategy<Value = PuiseuxSeries> {
    (
        proptest::collection::vec((arb_rat(-12..=12), arb_coeff()), min_terms..6),
        proptest::option::of(arb_rat(6..=20)),
    )
        .prop_map(|(terms, trunc)| {
            PuiseuxSeries::from_terms(
                terms,
                trunc.map_or(ExtRat::Infinite, ExtRat::Finite),
            )
        })
}

fn arb_positive_series() -> impl Strategy<Value = PuiseuxSeries> {
    (
        arb_rat(-12..=12),
        0.1f64..3.0,
        proptest::collection::vec((arb_rat(1..=10), arb_coeff()), 0..4),
        arb_rat(11..=20),
    )
        .prop_map(|(e0, c0, tail, trunc)| {
            let mut terms = vec![(e0.clone(), c0)];
            for (gap, c) in tail {
                terms.push((&e0 + &gap, c));
            }
            PuiseuxSeries::from_terms(terms, ExtRat::Finite(&e0 + &trunc))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative(a in arb_series(1), b in arb_series(1)) {
        let prod = a.mul(&b);
        prop_assume!(!a.is_zero() && !b.is_zero());
        // Leading coefficients bounded away from zero cannot cancel.
        prop_assert_eq!(prod.val(), a.val().plus_ext(&b.val()));
        let (la, lb) = (a.leading_coeff().unwrap(), b.leading_coeff().unwrap());
        prop_assert!((prod.leading_coeff().unwrap() - la * lb).abs() < 1e-9);
    }

    #[test]
    fn valuation_ultrametric(a in arb_series(0), b in arb_series(0)) {
        let sum = a.add(&b);
        let bound = a.val().min(b.val());
        prop_assert!(sum.val() >= bound);
        if !a.is_zero() && !b.is_zero() && a.val() != b.val() {
            prop_assert_eq!(sum.val(), a.val().min(b.val()));
        }
    }

    #[test]
    fn positivity_closed_under_field_ops(a in arb_positive_series(), b in arb_positive_series()) {
        prop_assert!(a.add(&b).is_positive());
        prop_assert!(a.mul(&b).is_positive());
        let r = a.recip().unwrap();
        prop_assert!(r.is_positive());
        // recip is a genuine inverse up to the horizon; the attainable
        // accuracy scales with the magnitude of the intermediate terms.
        let check = a.mul(&r).sub(&PuiseuxSeries::one());
        let scale = 1.0 + a.max_abs_coeff() * r.max_abs_coeff();
        prop_assert!(check.cleaned(1e-9 * scale).is_zero(), "residue {}", check);
    }

    #[test]
    fn exp_log_roundtrip(
        base in arb_rat(1..=8),
        coeffs in proptest::collection::vec((1u32..=4, -1.5f64..1.5), 1..4),
        depth in 5u32..=8,
    ) {
        // Exponents on the lattice spanned by a random positive rational,
        // with the horizon a bounded multiple of the valuation so the power
        // expansions stay well conditioned.
        let terms: Vec<(Rat, f64)> = coeffs
            .into_iter()
            .map(|(k, c)| (&base * rat_int(k as i64), c))
            .collect();
        let trunc = &base * rat_int(depth as i64);
        let a = PuiseuxSeries::from_terms(terms, ExtRat::Finite(trunc));
        prop_assume!(!a.is_zero());
        let e = a.exp_series().unwrap();
        let back = e.log_series().unwrap();
        let diff = back.sub(&a);
        prop_assert!(
            diff.cleaned(1e-9 * (1.0 + e.max_abs_coeff())).is_zero(),
            "roundtrip residue {}", diff
        );
    }

    #[test]
    fn character_evaluation_is_multiplicative(
        d in proptest::collection::vec(arb_rat(-4..=4), 2),
        u in proptest::collection::vec(-1.0f64..1.0, 2),
        v1 in proptest::collection::vec(arb_rat(-3..=3), 2),
        v2 in proptest::collection::vec(arb_rat(-3..=3), 2),
    ) {
        let w = vec![
            PuiseuxSeries::monomial(rat(1, 2), 0.3).with_trunc(ExtRat::Finite(rat_int(4))),
            PuiseuxSeries::monomial(rat_int(1), -0.2).with_trunc(ExtRat::Finite(rat_int(4))),
        ];
        let p = TorusPoint::new(u, d, w).unwrap();
        let v12: RatVector = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
        let lhs = p.eval_character(&v12).unwrap();
        let rhs = p.eval_character(&v1).unwrap().mul(&p.eval_character(&v2).unwrap());
        let diff = lhs.sub(&rhs);
        let scale = 1.0 + lhs.max_abs_coeff().max(rhs.max_abs_coeff());
        prop_assert!(diff.cleaned(1e-8 * scale).is_zero(), "difference {}", diff);
    }

    #[test]
    fn trop_eval_is_concave(
        seed in 0u64..500,
        d1 in proptest::collection::vec(arb_rat(-5..=5), 2),
        d2 in proptest::collection::vec(arb_rat(-5..=5), 2),
        lam in (0i64..=8).prop_map(|n| rat(n, 8)),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = corpus::random_complete(&mut rng, 2, 6);
        let one_minus = rat_int(1) - &lam;
        let mid: RatVector = d1
            .iter()
            .zip(&d2)
            .map(|(a, b)| &lam * a + &one_minus * b)
            .collect();
        let lhs = trop_eval(&w, &mid);
        let rhs = &lam * trop_eval(&w, &d1) + &one_minus * trop_eval(&w, &d2);
        prop_assert!(lhs >= rhs);
    }
}

/// Brute-force lowest point by enumerating basic solutions: every vertex of
/// `{r >= 0, sum r = 1, sum r_i v_i = 0}` is supported on at most `dim + 1`
/// points, so trying all subsets and solving exactly finds the optimum.
fn lowest_point_by_enumeration(points: &[(Rat, RatVector)]) -> Option<Rat> {
    let n = points.len();
    let dim = points[0].1.len();
    let k = dim + 1;
    let mut best: Option<Rat> = None;
    let mut indices: Vec<usize> = Vec::new();
    fn subsets(
        n: usize,
        k: usize,
        start: usize,
        indices: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if !indices.is_empty() {
            f(indices);
        }
        if indices.len() == k {
            return;
        }
        for i in start..n {
            indices.push(i);
            subsets(n, k, i + 1, indices, f);
            indices.pop();
        }
    }
    subsets(n, k, 0, &mut indices, &mut |subset: &[usize]| {
        // Solve sum r_i v_i = 0, sum r_i = 1 on the subset exactly.
        let m = subset.len();
        let mut rows: Vec<RatVector> = Vec::with_capacity(dim + 1);
        for coord in 0..dim {
            rows.push(subset.iter().map(|&i| points[i].1[coord].clone()).collect());
        }
        rows.push(vec![rat_int(1); m]);
        let mut rhs = ratgeom::zeros(dim + 1);
        rhs[dim] = rat_int(1);
        // Least-structure exact solve: try all square subsystems when the
        // system is not square.
        let sol = solve_rectangular(&rows, &rhs, m);
        if let Some(r) = sol {
            if r.iter().all(|x| !x.is_negative()) {
                let height: Rat = subset
                    .iter()
                    .zip(&r)
                    .map(|(&i, ri)| &points[i].0 * ri)
                    .sum();
                if best.as_ref().map_or(true, |b| height < *b) {
                    best = Some(height);
                }
            }
        }
    });
    best
}

/// Solve an overdetermined exact system by Gaussian elimination, verifying
/// consistency; `None` when inconsistent or underdetermined.
fn solve_rectangular(rows: &[RatVector], rhs: &[Rat], unknowns: usize) -> Option<Vec<Rat>> {
    let mut aug: Vec<RatVector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..unknowns {
        let Some(p) = (rank..aug.len()).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].recip();
        for x in aug[rank].iter_mut() {
            *x *= &inv;
        }
        for i in 0..aug.len() {
            if i != rank && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..=unknowns {
                    let d = &f * &aug[rank][j];
                    aug[i][j] -= d;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == aug.len() {
            break;
        }
    }
    // Inconsistent?
    for row in &aug[rank..] {
        if row[..unknowns].iter().all(|x| x.is_zero()) && !row[unknowns].is_zero() {
            return None;
        }
    }
    if rank < unknowns {
        return None; // underdetermined: skip, a smaller subset will cover it
    }
    let mut sol = vec![Rat::zero(); unknowns];
    for (i, &c) in pivot_cols.iter().enumerate() {
        sol[c] = aug[i][unknowns].clone();
    }
    Some(sol)
}

#[test]
fn lowest_point_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 60 {
        let dim = rng.gen_range(1..=3usize);
        let n = rng.gen_range(2..=6usize);
        let points: Vec<(Rat, RatVector)> = (0..n)
            .map(|_| {
                (
                    rat(rng.gen_range(-6i64..=8), rng.gen_range(1i64..=3)),
                    (0..dim).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect(),
                )
            })
            .collect();
        let by_lp = lowest_point(&points);
        let by_enum = lowest_point_by_enumeration(&points);
        match (by_lp, by_enum) {
            (Ok(lp), Some(expect)) => {
                assert_eq!(lp.tau, expect, "points {:?}", points);
                // The witness is an exact certificate.
                let mut combo = ratgeom::zeros(dim);
                let mut total = Rat::zero();
                let mut height = Rat::zero();
                for ((c, v), r) in points.iter().zip(&lp.weights) {
                    assert!(!r.is_negative());
                    total += r;
                    height += c * r;
                    for (acc, x) in combo.iter_mut().zip(v) {
                        *acc += x * r;
                    }
                }
                assert_eq!(total, rat_int(1));
                assert_eq!(height, lp.tau);
                assert!(combo.iter().all(|x| x.is_zero()));
                checked += 1;
            }
            (Err(_), None) => {
                checked += 1;
            }
            (lp, en) => panic!(
                "solver and enumeration disagree on feasibility: {:?} vs {:?} for {:?}",
                lp.map(|l| l.tau),
                en,
                points
            ),
        }
    }
}

#[test]
fn face_support_certificates_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..40 {
        let dim = rng.gen_range(1..=3usize);
        let n = rng.gen_range(2..=6usize);
        let points: Vec<RatVector> = (0..n)
            .map(|_| (0..dim).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect())
            .collect();
        // A target guaranteed to be in the hull: a random convex combination.
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0i64..=3)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let target: RatVector = (0..dim)
            .map(|c| {
                let num: Rat = points
                    .iter()
                    .zip(&weights)
                    .map(|(p, &w)| &p[c] * rat_int(w))
                    .sum();
                num / rat_int(total)
            })
            .collect();
        let fs = minimal_face_support(&points, &target).unwrap();
        // Certificate: exact combination, strictly positive exactly on the support.
        let mut combo = ratgeom::zeros(dim);
        let mut total_w = Rat::zero();
        for (p, r) in points.iter().zip(&fs.weights) {
            assert!(!r.is_negative());
            total_w += r;
            for (acc, x) in combo.iter_mut().zip(p) {
                *acc += x * r;
            }
        }
        assert_eq!(total_w, rat_int(1));
        assert_eq!(combo, target);
        for (i, r) in fs.weights.iter().enumerate() {
            assert_eq!(fs.support.contains(&i), r.is_positive());
        }
    }
}

#[test]
fn quotient_reduce_is_idempotent_under_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..40 {
        let ambient = rng.gen_range(2..=5usize);
        let spanning: Vec<RatVector> = (0..rng.gen_range(1..ambient))
            .map(|_| (0..ambient).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect())
            .collect();
        let sub = Subspace::from_spanning(ambient, &spanning);
        let vecs: Vec<RatVector> = (0..3)
            .map(|_| (0..ambient).map(|_| rat_int(rng.gen_range(-5i64..=5))).collect())
            .collect();
        let coords = quotient_reduce(&vecs, &sub);
        let relifted: Vec<RatVector> = coords.iter().map(|c| sub.lift(c)).collect();
        assert_eq!(quotient_reduce(&relifted, &sub), coords);
        for m in sub.basis() {
            assert!(ratgeom::is_zero_vec(&sub.quotient_coords(m)));
        }
    }
}

#[test]
fn canonical_point_attains_maximum_and_uniqueness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let dim = rng.gen_range(1..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 7);
        let cp = canonical_point(&w).unwrap();
        assert_eq!(trop_eval(&w, &cp.d_crit), trop_max(&w).unwrap());
        assert!(check_tropical_critical(&w, &cp.d_crit).passed);
        // No other point satisfies the conditions.
        for _ in 0..5 {
            let offset: RatVector = (0..dim)
                .map(|_| rat(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)))
                .collect();
            if offset.iter().all(|x| x.is_zero()) {
                continue;
            }
            let other: RatVector = cp.d_crit.iter().zip(&offset).map(|(a, b)| a + b).collect();
            assert!(!check_tropical_critical(&w, &other).passed);
        }
    }
}

#[test]
fn recursion_trace_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..25 {
        let dim = rng.gen_range(1..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 7);
        let cp = canonical_point(&w).unwrap();
        assert!(cp.stages.len() <= dim);
        for pair in cp.stages.windows(2) {
            assert!(pair[0].tau_bar < pair[1].tau_bar, "stage heights must increase");
        }
        // The accumulated flag has full corank one and determines the point.
        let flag = Subspace::from_spanning(
            dim + 1,
            &cp.stages
                .iter()
                .flat_map(|s| s.span_vectors.iter().cloned())
                .collect::<Vec<_>>(),
        );
        assert_eq!(flag.dim(), dim);
        for v in flag.basis() {
            assert!(dot(v, &cp.tilde).is_zero());
        }
    }
}

#[test]
fn unimodular_change_of_basis_is_contragredient() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..15 {
        let dim = rng.gen_range(2..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let u = corpus::random_unimodular(&mut rng, dim);
        // Transform exponents by v -> U v.
        let transformed = LaurentPoly::new(
            dim,
            w.terms()
                .iter()
                .map(|(c, v)| {
                    let nv: RatVector = (0..dim)
                        .map(|i| {
                            (0..dim)
                                .map(|j| rat_int(u[i][j]) * &v[j])
                                .fold(Rat::zero(), |a, b| a + b)
                        })
                        .collect();
                    (c.clone(), nv)
                })
                .collect(),
        )
        .unwrap();
        let cp = canonical_point(&w).unwrap();
        let cp2 = canonical_point(&transformed).unwrap();
        // <U v, d'> = <v, U^T d'> must reproduce <v, d>: U^T d' = d.
        let back: RatVector = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|i| rat_int(u[i][j]) * &cp2.d_crit[i])
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect();
        assert_eq!(back, cp.d_crit);
    }
}

#[test]
fn shift_law_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..25 {
        let dim = rng.gen_range(1..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let shift: RatVector = (0..dim).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect();
        let shifted = LaurentPoly::new(
            dim,
            w.terms()
                .iter()
                .map(|(c, v)| (c.mul_monomial(&dot(v, &shift), 1.0), v.clone()))
                .collect(),
        )
        .unwrap();
        let d1 = canonical_point(&w).unwrap().d_crit;
        let d2 = canonical_point(&shifted).unwrap().d_crit;
        let expect: RatVector = d1.iter().zip(&shift).map(|(a, s)| a - s).collect();
        assert_eq!(d2, expect);
    }
}

#[test]
fn residual_soundness_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SolveOptions::with_order(rat_int(3));
    for _ in 0..15 {
        let dim = rng.gen_range(1..=2usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let res = solve_critical_with(&w, &opts).unwrap();
        let p = res.torus_point();
        let bound = &res.tau + &res.achieved_order;
        for g in gradient(&w, &p).unwrap() {
            let g = g.cleaned(1e-10);
            match g.val() {
                ExtRat::Infinite => {}
                ExtRat::Finite(v) => assert!(
                    v >= bound,
                    "gradient valuation {} below tau + order {}",
                    v,
                    bound
                ),
            }
        }
    }
}

#[test]
fn coefficient_solve_is_start_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = SolveOptions::default();
    for _ in 0..8 {
        let dim = rng.gen_range(1..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let cp = canonical_point(&w).unwrap();
        let reference = solve_coeff_from(&w, &cp, &opts, None).unwrap();
        for restart in 0..5u64 {
            let again = solve_coeff_from(&w, &cp, &opts, Some(1000 + restart)).unwrap();
            for (a, b) in reference.iter().zip(&again) {
                assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
            }
        }
    }
}

#[test]
fn lifting_is_representative_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..8u64 {
        let dim = rng.gen_range(1..=2usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let base = solve_critical_with(&w, &SolveOptions::with_order(rat_int(3))).unwrap();
        let mut jittered = SolveOptions::with_order(rat_int(3));
        jittered.rep_jitter = Some(500 + trial);
        let other = solve_critical_with(&w, &jittered).unwrap();
        assert_eq!(base.d_crit, other.d_crit);
        let horizon = ExtRat::Finite(base.achieved_order.clone().min(other.achieved_order.clone()));
        for (a, b) in base.w_crit.iter().zip(&other.w_crit) {
            let diff = a.sub(b);
            for (e, c) in diff.terms() {
                if ExtRat::Finite(e.clone()) < horizon {
                    assert!(
                        c.abs() < 1e-8,
                        "representative choice leaked into w at t^{}: {}",
                        e,
                        c
                    );
                }
            }
        }
    }
}

#[test]
fn level_forms_are_positive_definite() {
    // Every level form built from positive weights on spanning reduced
    // exponents must be positive definite.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let dim = rng.gen_range(1..=3usize);
        let w = corpus::random_complete(&mut rng, dim, 6);
        let cp = canonical_point(&w).unwrap();
        let opts = SolveOptions::default();
        let d_coeff = solve_coeff_from(&w, &cp, &opts, None).unwrap();
        let ld = level_data(&w, &cp.d_crit);
        for (k, eps) in ld.levels.iter().enumerate() {
            let lt: Vec<Vec<f64>> = ld.below[k]
                .basis()
                .iter()
                .map(|v| v.iter().map(ratgeom::rat_to_f64).collect())
                .collect();
            let le: Vec<Vec<f64>> = ld.at_or_below[k]
                .basis()
                .iter()
                .map(|v| v.iter().map(ratgeom::rat_to_f64).collect())
                .collect();
            let lt_ortho = ratgeom::orthonormalize(lt.iter().cloned());
            let mut chain = lt;
            chain.extend(le);
            let both = ratgeom::orthonormalize(chain);
            let comp = &both[lt_ortho.len()..];
            if comp.is_empty() {
                continue;
            }
            let active = ld.active(eps);
            let kdim = comp.len();
            let mut form = vec![vec![0.0; kdim]; kdim];
            for &i in &active {
                let (coeff, v) = &w.terms()[i];
                let vf: Vec<f64> = v.iter().map(ratgeom::rat_to_f64).collect();
                let weight = coeff.leading_coeff().unwrap()
                    * vf.iter().zip(&d_coeff).map(|(a, b)| a * b).sum::<f64>().exp();
                let qv: Vec<f64> = comp
                    .iter()
                    .map(|b| b.iter().zip(&vf).map(|(x, y)| x * y).sum())
                    .collect();
                for a in 0..kdim {
                    for bcol in 0..kdim {
                        form[a][bcol] += weight * qv[a] * qv[bcol];
                    }
                }
            }
            // Independent PD check: all leading principal minors positive.
            assert!(
                leading_minors_positive(&form),
                "level {} form is not positive definite",
                eps
            );
        }
    }
}

fn leading_minors_positive(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    for k in 1..=n {
        let mut m: Vec<Vec<f64>> = (0..k).map(|i| a[i][..k].to_vec()).collect();
        // LU determinant with partial pivoting.
        let mut det = 1.0f64;
        for col in 0..k {
            let piv = (col..k)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
                .unwrap();
            if m[piv][col].abs() < 1e-300 {
                return false;
            }
            if piv != col {
                m.swap(col, piv);
                det = -det;
            }
            det *= m[col][col];
            for i in col + 1..k {
                let f = m[i][col] / m[col][col];
                for j in col..k {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
        if det <= 0.0 {
            return false;
        }
    }
    true
}

#[test]
fn grid_search_respects_tropical_maximum() {
    // 1-d and 2-d instances with few terms: a fine rational grid never beats
    // the exact maximum, and when the maximizer is unique the grid argmax is
    // within one step of it.
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..12 {
        let dim = rng.gen_range(1..=2usize);
        let w = corpus::random_complete(&mut rng, dim, 5);
        let cp = canonical_point(&w).unwrap();
        let tau = trop_max(&w).unwrap();
        let step = rat(1, 10);
        let halfwidth = 20i64; // covers d_crit +/- 2
        let mut best: Option<(Rat, RatVector)> = None;
        let mut idx = vec![-halfwidth; dim];
        loop {
            let d: RatVector = idx
                .iter()
                .zip(&cp.d_crit)
                .map(|(&k, c)| c + &step * rat_int(k))
                .collect();
            let val = trop_eval(&w, &d);
            assert!(val <= tau, "grid beats the certified maximum");
            if best.as_ref().map_or(true, |(b, _)| val > *b) {
                best = Some((val, d));
            }
            // Advance the mixed-radix counter.
            let mut pos = 0;
            loop {
                if pos == dim {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] <= halfwidth {
                    break;
                }
                idx[pos] = -halfwidth;
                pos += 1;
            }
            if pos == dim {
                break;
            }
        }
        let (_, argmax) = best.unwrap();
        // Unique maximizer iff the level-zero exponents already pin down the
        // point; only then is proximity guaranteed.
        let ld = level_data(&w, &cp.d_crit);
        let active: Vec<RatVector> = ld
            .active(&ld.levels[0])
            .into_iter()
            .map(|i| w.terms()[i].1.clone())
            .collect();
        if tropcrit::tropical::is_complete_exponents(dim, &active) {
            for (a, c) in argmax.iter().zip(&cp.d_crit) {
                let dev = (a - c).abs();
                assert!(dev <= step, "grid argmax strayed {} from d_crit", dev);
            }
        }
    }
}
