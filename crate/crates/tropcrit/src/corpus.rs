//! Deterministic random instances for tests and the self-check battery.

use num_traits::Zero;
use rand::Rng;

use crate::puiseux::{ExtRat, PuiseuxSeries};
use crate::ratgeom::{rat, rat_int, Rat, RatVector};
use crate::tropical::LaurentPoly;

fn random_rat(rng: &mut impl Rng) -> Rat {
    rat(rng.gen_range(-6i64..=8), rng.gen_range(1i64..=3))
}

/// A polynomial coefficient `t^c (a_0 + a_1 t + ... + a_4 t^4)` with
/// `a_0 > 0`; exact (infinite horizon), so any solve order is achievable.
fn random_coeff(rng: &mut impl Rng, c: Rat) -> PuiseuxSeries {
    let mut terms = vec![(c.clone(), rng.gen_range(0.3..2.5))];
    for j in 1..=4 {
        if rng.gen_bool(0.6) {
            terms.push((&c + rat_int(j), rng.gen_range(-0.9..0.9)));
        }
    }
    PuiseuxSeries::from_terms(terms, ExtRat::Infinite)
}

/// A small random unimodular matrix: a product of integer shears and
/// coordinate swaps.
pub fn random_unimodular(rng: &mut impl Rng, r: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..3 {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r);
        if r > 1 {
            while j == i {
                j = rng.gen_range(0..r);
            }
            let f = rng.gen_range(-1i64..=1);
            for col in 0..r {
                m[i][col] += f * m[j][col];
            }
        }
        if rng.gen_bool(0.5) {
            m.swap(rng.gen_range(0..r), rng.gen_range(0..r));
        }
    }
    m
}

fn apply_matrix(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// A random complete instance: a unimodular image of the simplex frame keeps
/// zero strictly inside the exponent hull, plus a few extra random exponents
/// and mixed polynomial coefficients. Coefficient magnitudes and lattice
/// denominators are unconstrained; intended for the exact layers.
pub fn random_complete(rng: &mut impl Rng, dim: usize, max_terms: usize) -> LaurentPoly {
    let u = random_unimodular(rng, dim);
    let mut exponents: Vec<Vec<i64>> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0i64; dim];
        e[i] = 1;
        exponents.push(apply_matrix(&u, &e));
    }
    exponents.push(apply_matrix(&u, &vec![-1i64; dim]));
    while exponents.len() < max_terms && rng.gen_bool(0.7) {
        let e: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3i64..=3)).collect();
        if !exponents.contains(&e) {
            exponents.push(e);
        }
    }
    let terms = exponents
        .into_iter()
        .map(|e| {
            let v: RatVector = e.iter().map(|&x| rat_int(x)).collect();
            let c = random_rat(rng);
            (random_coeff(rng, c), v)
        })
        .collect();
    let w = LaurentPoly::new(dim, terms).expect("positive coefficients by construction");
    assert!(w.is_complete(), "simplex frame keeps the instance complete");
    w
}

/// A random complete instance in the floating solver's comfortable regime:
/// small exponents, halves-or-integers valuations, and gentle coefficient
/// tails. The series of a critical point can have geometrically growing
/// coefficients whose rate is governed by exponent spreads, valuation
/// denominators and coefficient ratios; this generator keeps that rate low
/// enough for double precision to certify residuals at fixed thresholds.
pub fn random_complete_solver(rng: &mut impl Rng, dim: usize, max_terms: usize) -> LaurentPoly {
    loop {
        let w = random_complete_solver_candidate(rng, dim, max_terms);
        // The coefficient growth rate of the critical series scales with the
        // number of correction cycles per unit exponent, i.e. with the
        // fineness of the level lattice at the tropical critical point. Keep
        // the corpus on coarse lattices so double precision certifies the
        // fixed residual thresholds; this is an exact structural property of
        // the instance, computed before any floating work.
        let cp = crate::recursion::canonical_point(&w).expect("corpus instances are complete");
        let ld = crate::tropical::level_data(&w, &cp.d_crit);
        use num_traits::ToPrimitive;
        let q = ld.levels.iter().fold(1i64, |acc, level| {
            num_integer::lcm(acc, level.denom().to_i64().unwrap_or(i64::MAX))
        });
        if q <= 3 {
            return w;
        }
    }
}

fn random_complete_solver_candidate(rng: &mut impl Rng, dim: usize, max_terms: usize) -> LaurentPoly {
    let mut exponents: Vec<Vec<i64>> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0i64; dim];
        e[i] = 1;
        exponents.push(e);
    }
    exponents.push(vec![-1i64; dim]);
    while exponents.len() < max_terms && rng.gen_bool(0.6) {
        let e: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1i64..=1)).collect();
        if !exponents.contains(&e) {
            exponents.push(e);
        }
    }
    let terms = exponents
        .into_iter()
        .map(|e| {
            let v: RatVector = e.iter().map(|&x| rat_int(x)).collect();
            let c = rat(rng.gen_range(0i64..=2), rng.gen_range(1i64..=2));
            let a0 = rng.gen_range(0.8..1.25);
            let mut coeff_terms = vec![(c.clone(), a0)];
            if rng.gen_bool(0.4) {
                coeff_terms.push((&c + rat_int(1), a0 * rng.gen_range(-0.25..0.25)));
            }
            (
                PuiseuxSeries::from_terms(coeff_terms, ExtRat::Infinite),
                v,
            )
        })
        .collect();
    let w = LaurentPoly::new(dim, terms).expect("positive coefficients by construction");
    assert!(w.is_complete(), "simplex frame keeps the instance complete");
    w
}

/// A random *positive* instance that is not complete: either all exponents
/// in a halfspace with zero on the boundary or outside, or a rank-deficient
/// exponent set.
pub fn random_noncomplete(rng: &mut impl Rng, dim: usize, max_terms: usize) -> LaurentPoly {
    let n = rng.gen_range(2..=max_terms.max(2));
    let rank_deficient = dim > 1 && rng.gen_bool(0.5);
    let mut exponents: Vec<Vec<i64>> = Vec::new();
    if rank_deficient {
        let base: Vec<i64> = (0..dim).map(|_| rng.gen_range(-2i64..=2)).collect();
        let base = if base.iter().all(|&x| x == 0) {
            let mut b = vec![0i64; dim];
            b[0] = 1;
            b
        } else {
            base
        };
        for k in 0..n {
            let e: Vec<i64> = base.iter().map(|&x| x * (k as i64 + 1 - n as i64 / 2)).collect();
            if !exponents.contains(&e) {
                exponents.push(e);
            }
        }
    } else {
        let mut attempts = 0;
        while exponents.len() < n && attempts < 200 {
            attempts += 1;
            let mut e: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3i64..=3)).collect();
            e[0] = rng.gen_range(0i64..=3);
            if !exponents.contains(&e) {
                exponents.push(e);
            }
        }
        if exponents.iter().all(|e| e[0] == 0) {
            exponents[0][0] = 1;
        }
        if exponents.len() < 2 {
            exponents.push(vec![0i64; dim]);
        }
    }
    let terms = exponents
        .into_iter()
        .map(|e| {
            let v: RatVector = e.iter().map(|&x| rat_int(x)).collect();
            let c = random_rat(rng);
            (random_coeff(rng, c), v)
        })
        .collect();
    let w = LaurentPoly::new(dim, terms).expect("positive coefficients by construction");
    assert!(!w.is_complete(), "constructed instance must fail completeness");
    w
}

/// A 1-d instance with integer exponents spanning zero and polynomial
/// coefficients, suitable for the undetermined-coefficients oracle.
pub fn random_one_dim(rng: &mut impl Rng, max_terms: usize) -> LaurentPoly {
    let mut exps = vec![rng.gen_range(1i64..=3), -rng.gen_range(1i64..=3)];
    while exps.len() < max_terms && rng.gen_bool(0.5) {
        let e = rng.gen_range(-3i64..=3);
        if e != 0 && !exps.contains(&e) {
            exps.push(e);
        }
    }
    let terms = exps
        .into_iter()
        .map(|e| {
            // Integer valuations keep the oracle lattice small.
            let c = rat_int(rng.gen_range(0i64..=3));
            (random_coeff(rng, c), vec![rat_int(e)])
        })
        .collect();
    LaurentPoly::new(1, terms).expect("positive coefficients by construction")
}

/// Instance pair for mutation tests: `W = P x + (A + B) Q / x + R(y)` stays
/// Laurent under `x -> (A + B)/x'`.
pub struct MutationFixture {
    pub w: LaurentPoly,
    pub mutation: crate::apps::Mutation,
}

pub fn random_mutation_fixture(rng: &mut impl Rng) -> MutationFixture {
    use crate::apps::{Mutation, MutationDirection};
    loop {
        let a_exp = rng.gen_range(0i64..=1);
        let b_exp = rng.gen_range(-1i64..=0);
        let a = (
            PuiseuxSeries::monomial(rat_int(rng.gen_range(0..=1)), rng.gen_range(0.5..1.5)),
            vec![Rat::zero(), rat_int(a_exp)],
        );
        let b = (
            PuiseuxSeries::monomial(rat_int(rng.gen_range(0..=1)), rng.gen_range(0.5..1.5)),
            vec![Rat::zero(), rat_int(b_exp)],
        );
        // P x, (A+B) Q / x, and a y-spread R.
        let p_y = rng.gen_range(-1i64..=1);
        let q_y = rng.gen_range(-1i64..=1);
        let binom = [
            (a.0.clone(), vec![rat_int(-1), &a.1[1] + rat_int(q_y)]),
            (b.0.clone(), vec![rat_int(-1), &b.1[1] + rat_int(q_y)]),
        ];
        let mut terms = vec![(
            PuiseuxSeries::monomial(rat_int(rng.gen_range(0..=1)), rng.gen_range(0.5..1.5)),
            vec![rat_int(1), rat_int(p_y)],
        )];
        let q_coeff = rng.gen_range(0.5..1.5);
        for (c, v) in binom {
            terms.push((c.scale(q_coeff), v));
        }
        let spread = rng.gen_range(2i64..=3);
        terms.push((
            PuiseuxSeries::monomial(rat_int(1), rng.gen_range(0.5..1.5)),
            vec![Rat::zero(), rat_int(spread)],
        ));
        terms.push((
            PuiseuxSeries::monomial(rat_int(1), rng.gen_range(0.5..1.5)),
            vec![Rat::zero(), rat_int(-spread)],
        ));
        let Ok(w) = LaurentPoly::new(2, terms) else { continue };
        if !w.is_complete() {
            continue;
        }
        return MutationFixture {
            w,
            mutation: Mutation { pivot: 0, a, b, direction: MutationDirection::Forward },
        };
    }
}
