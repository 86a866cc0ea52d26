//! Built-in worked examples and a fast invariant battery.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropcrit::apps::{check_mutation_invariance, delzant_analyze, toric_analyze, DelzantInstance, ToricInstance};
use tropcrit::corpus;
use tropcrit::lift::solve_critical_with;
use tropcrit::puiseux::{ExtRat, PuiseuxSeries};
use tropcrit::ratgeom::{dot, rat, rat_int, RatVector};
use tropcrit::tropical::check_tropical_critical;
use tropcrit::{canonical_point, trop_eval, trop_max, LaurentPoly, SolveOptions};

fn monomial_poly(dim: usize, terms: &[(i64, Vec<i64>)]) -> LaurentPoly {
    LaurentPoly::new(
        dim,
        terms
            .iter()
            .map(|(c, v)| {
                (
                    PuiseuxSeries::monomial(rat_int(*c), 1.0),
                    v.iter().map(|&x| rat_int(x)).collect(),
                )
            })
            .collect(),
    )
    .expect("valid built-in instance")
}

struct Battery {
    failures: usize,
}

impl Battery {
    fn check(&mut self, name: &str, ok: bool) {
        println!("selfcheck {}: {}", name, if ok { "pass" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

pub fn run(seed: u64) -> u8 {
    let mut b = Battery { failures: 0 };
    let opts = SolveOptions::with_order(rat_int(3));

    // Worked example: W = x + t/x has the exact monomial point t^(1/2).
    {
        let w = monomial_poly(1, &[(0, vec![1]), (1, vec![-1])]);
        match solve_critical_with(&w, &opts) {
            Ok(res) => {
                b.check("monomial point valuation", res.d_crit == vec![rat(1, 2)]);
                b.check("monomial point coefficient", res.d_coeff[0].abs() < 1e-12);
                b.check(
                    "monomial point residual",
                    res.residual_valuation == ExtRat::Infinite,
                );
            }
            Err(e) => {
                eprintln!("solve failed: {e}");
                b.check("monomial point solve", false);
            }
        }
    }

    // Worked example: W = x + 1/x + t x^2 expands to 1 - t + 5/2 t^2.
    {
        let w = monomial_poly(1, &[(0, vec![1]), (0, vec![-1]), (1, vec![2])]);
        match solve_critical_with(&w, &opts) {
            Ok(res) => {
                let p = res.torus_point();
                let s = p.eval_character(&[rat_int(1)]).expect("dimension");
                let ok = (s.coeff_at(&rat_int(0)) - 1.0).abs() < 1e-10
                    && (s.coeff_at(&rat_int(1)) + 1.0).abs() < 1e-10
                    && (s.coeff_at(&rat_int(2)) - 2.5).abs() < 1e-10;
                b.check("series expansion worked example", ok);
            }
            Err(e) => {
                eprintln!("solve failed: {e}");
                b.check("series expansion worked example", false);
            }
        }
    }

    // Worked example: decoupled pair solves exactly.
    {
        let w = monomial_poly(
            2,
            &[(0, vec![1, 0]), (1, vec![-1, 0]), (1, vec![0, 1]), (1, vec![0, -1])],
        );
        match solve_critical_with(&w, &opts) {
            Ok(res) => b.check(
                "decoupled pair",
                res.d_crit == vec![rat(1, 2), rat_int(0)]
                    && res.w_crit.iter().all(|s| s.is_zero()),
            ),
            Err(_) => b.check("decoupled pair", false),
        }
    }

    // Clifford-type fiber points of simplices.
    {
        let mut ok = true;
        for r in 1..=4usize {
            match delzant_analyze(&DelzantInstance::standard_simplex(r), &opts) {
                Ok(rep) => {
                    let expect = rat(1, (r + 1) as i64);
                    ok &= rep.d_crit.iter().all(|x| *x == expect) && rep.interior;
                }
                Err(_) => ok = false,
            }
        }
        b.check("simplex fiber points", ok);
    }

    // Anticanonical divisors are integrally balanced at the origin.
    {
        let inst = ToricInstance::anticanonical(vec![vec![1, 0], vec![0, 1], vec![-1, -1]]);
        match toric_analyze(&inst) {
            Ok(rep) => b.check(
                "anticanonical balance",
                rep.d_crit.iter().all(|x| x.is_zero()) && rep.integrally_balanced == Some(true),
            ),
            Err(_) => b.check("anticanonical balance", false),
        }
    }

    // Mutation invariance on a random fixture.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
        let fixture = corpus::random_mutation_fixture(&mut rng);
        let mut mopts = opts.clone();
        mopts.order = rat_int(2);
        match check_mutation_invariance(&fixture.w, &fixture.mutation, &mopts) {
            Ok(rep) => b.check(
                "mutation invariance",
                rep.trop_transport_ok && rep.series_ok && rep.completeness_match,
            ),
            Err(e) => {
                eprintln!("mutation invariance failed: {e}");
                b.check("mutation invariance", false);
            }
        }
    }

    // Random invariants: maximality, criticality, shift law, residuals.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ok_max = true;
        let mut ok_crit = true;
        let mut ok_shift = true;
        let mut ok_res = true;
        for _ in 0..10 {
            let dim = rng.gen_range(1..=3);
            let w = corpus::random_complete(&mut rng, dim, 6);
            let Ok(cp) = canonical_point(&w) else {
                ok_crit = false;
                continue;
            };
            ok_max &= trop_eval(&w, &cp.d_crit) == trop_max(&w).expect("complete");
            ok_crit &= check_tropical_critical(&w, &cp.d_crit).passed;

            let shift: RatVector = (0..dim).map(|_| rat_int(rng.gen_range(-3i64..=3))).collect();
            let shifted = LaurentPoly::new(
                dim,
                w.terms()
                    .iter()
                    .map(|(c, v)| (c.mul_monomial(&dot(v, &shift), 1.0), v.clone()))
                    .collect(),
            )
            .expect("shift keeps positivity");
            if let Ok(cp2) = canonical_point(&shifted) {
                let expect: RatVector =
                    cp.d_crit.iter().zip(&shift).map(|(a, s)| a - s).collect();
                ok_shift &= cp2.d_crit == expect;
            } else {
                ok_shift = false;
            }

            match solve_critical_with(&w, &opts) {
                Ok(res) => {
                    let bound = &res.tau + &res.achieved_order;
                    ok_res &= match &res.residual_valuation {
                        ExtRat::Infinite => true,
                        ExtRat::Finite(v) => *v >= bound,
                    };
                }
                Err(_) => ok_res = false,
            }
        }
        b.check("tropical maximality", ok_max);
        b.check("tropical criticality", ok_crit);
        b.check("shift law", ok_shift);
        b.check("residual valuations", ok_res);
    }

    // Incomplete input is always rejected.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
        let mut ok = true;
        for _ in 0..5 {
            let dim = rng.gen_range(1..=3);
            let w = corpus::random_noncomplete(&mut rng, dim, 5);
            ok &= matches!(
                solve_critical_with(&w, &opts),
                Err(tropcrit::Error::NotComplete(_))
            );
        }
        b.check("incomplete inputs rejected", ok);
    }

    if b.failures == 0 {
        println!("selfcheck: all checks passed");
        0
    } else {
        eprintln!("selfcheck: {} check(s) failed", b.failures);
        3
    }
}
