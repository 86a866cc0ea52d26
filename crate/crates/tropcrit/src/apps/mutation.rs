//! Cluster-type exchanges and invariance of the positive critical point.
//!
//! A mutation substitutes one coordinate by `x_k = (A + B) / x_k'` where `A`
//! and `B` are monomials in the remaining coordinates with positive series
//! coefficients. The pullback of a Laurent polynomial is certified Laurent by
//! exact multivariate division by the exchange binomial; positivity of all
//! resulting coefficients is checked, never assumed. Such maps restrict to
//! bijections of the positive points, so both potentials share one critical
//! point, transported coordinatewise; tropically the transport is the
//! min-plus evaluation of the exchange relation.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lift::{solve_critical_with, SolveOptions};
use crate::puiseux::{ExtRat, PuiseuxSeries};
use crate::ratgeom::{dot, rat_to_f64, Rat, RatVector};
use crate::tropical::LaurentPoly;

/// Bookkeeping direction of an exchange; the substitution map itself is an
/// involution, so both directions use the same formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationDirection {
    Forward,
    Inverse,
}

/// A single-pivot exchange `x_k -> (A + B) / x_k'`.
///
/// The two monomials must not involve the pivot coordinate. A degenerate
/// exchange with equal exponent vectors gives a monomial map; in particular
/// `A + B = 1` is the coordinate inversion `x_k -> 1 / x_k'`.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub pivot: usize,
    /// Monomial `A`: positive series coefficient and exponent vector.
    pub a: (PuiseuxSeries, RatVector),
    /// Monomial `B`.
    pub b: (PuiseuxSeries, RatVector),
    pub direction: MutationDirection,
}

impl Mutation {
    fn validate(&self, dim: usize) -> Result<()> {
        for (coeff, v) in [&self.a, &self.b] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if self.pivot >= dim {
                return Err(Error::DimensionMismatch { expected: dim, got: self.pivot });
            }
            if !v[self.pivot].is_zero() {
                return Err(Error::NotLaurent(
                    "exchange monomials must not involve the pivot coordinate".into(),
                ));
            }
            if !coeff.is_positive() {
                return Err(Error::NotPositive);
            }
        }
        Ok(())
    }
}

/// Laurent polynomial over the series coefficient field, keyed by exponent
/// vector in lexicographic order. Used for the exact division certificate.
#[derive(Debug, Clone, Default)]
struct CoeffPoly {
    terms: BTreeMap<RatVector, PuiseuxSeries>,
}

impl CoeffPoly {
    fn one(dim: usize) -> Self {
        let mut p = CoeffPoly::default();
        p.terms.insert(vec![Rat::zero(); dim], PuiseuxSeries::one());
        p
    }

    fn add_term(&mut self, exponent: RatVector, coeff: PuiseuxSeries) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exponent) {
            Some(c) => {
                *c = c.add(&coeff);
                if c.is_zero() {
                    self.terms.remove(&exponent);
                }
            }
            None => {
                self.terms.insert(exponent, coeff);
            }
        }
    }

    fn mul(&self, other: &CoeffPoly) -> CoeffPoly {
        let mut out = CoeffPoly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: RatVector = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        out
    }

    /// Drop terms whose coefficient series is negligible at the given scale.
    fn cleaned(&self, threshold: f64) -> CoeffPoly {
        let mut out = CoeffPoly::default();
        for (e, c) in &self.terms {
            let c = c.cleaned(threshold);
            if !c.is_zero() {
                out.terms.insert(e.clone(), c);
            }
        }
        out
    }

    fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.max_abs_coeff()))
    }

    fn bounding_box(&self) -> Option<(RatVector, RatVector)> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        let (mut lo, mut hi) = (first.clone(), first);
        for e in it {
            for ((l, h), x) in lo.iter_mut().zip(hi.iter_mut()).zip(e) {
                if x < l {
                    *l = x.clone();
                }
                if x > h {
                    *h = x.clone();
                }
            }
        }
        Some((lo, hi))
    }

    /// Exact division by `divisor`; the remainder must vanish identically (to
    /// the cleanup scale), otherwise the division is refused with the
    /// offending factor reported.
    fn divide_exact(&self, divisor: &CoeffPoly, threshold: f64) -> Result<CoeffPoly> {
        if divisor.terms.is_empty() {
            return Err(Error::NotLaurent("division by the zero binomial".into()));
        }
        let (lead_exp, lead_coeff) = divisor
            .terms
            .iter()
            .next_back()
            .map(|(e, c)| (e.clone(), c.clone()))
            .expect("nonempty divisor");
        let tail: Vec<(RatVector, PuiseuxSeries)> = divisor
            .terms
            .iter()
            .filter(|(e, _)| **e != lead_exp)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();

        // Exponents of an exact quotient are confined to the difference of
        // the bounding boxes; a candidate outside proves non-divisibility.
        let nbox = self.bounding_box();
        let dbox = divisor.bounding_box().expect("nonempty divisor");
        let mut rem = self.cleaned(threshold);
        let mut quot = CoeffPoly::default();
        let budget = 100_000usize;
        for _ in 0..budget {
            let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))
            else {
                return Ok(quot);
            };
            let (nlo, nhi) = nbox.as_ref().expect("remainder nonempty implies dividend nonempty");
            let q_exp: RatVector = e.iter().zip(&lead_exp).map(|(x, y)| x - y).collect();
            let inside = q_exp
                .iter()
                .zip(nlo.iter().zip(&dbox.0))
                .zip(nhi.iter().zip(&dbox.1))
                .all(|((q, (nl, dl)), (nh, dh))| *q >= nl - dl && *q <= nh - dh);
            if !inside {
                return Err(Error::NotLaurent(format!(
                    "denominator does not divide: remainder term at exponent ({})",
                    e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                )));
            }
            let q_coeff = divide_series(&c, &lead_coeff)?;
            // Remove the lead exactly, then subtract the quotient times the
            // divisor tail; only genuinely new terms appear.
            rem.terms.remove(&e);
            for (te, tc) in &tail {
                let ne: RatVector = q_exp.iter().zip(te).map(|(x, y)| x + y).collect();
                rem.add_term(ne, q_coeff.mul(tc).neg());
            }
            rem = rem.cleaned(threshold);
            quot.add_term(q_exp, q_coeff);
        }
        Err(Error::InvariantViolation("division exceeded its step budget".into()))
    }
}

/// Relative order at which series division truncates when an exactly known
/// multi-term coefficient must be inverted (the reciprocal has no finite
/// exact representation).
const DIVISION_HORIZON: i64 = 16;

/// Coefficient-field division, clamping exact multi-term denominators to the
/// division horizon.
fn divide_series(num: &PuiseuxSeries, den: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    let recip = match den.recip() {
        Ok(r) => r,
        Err(Error::InvariantViolation(_)) => {
            let val = den.val().finite().expect("positive denominator").clone();
            den.with_trunc(ExtRat::Finite(
                &val + crate::ratgeom::rat_int(DIVISION_HORIZON),
            ))
            .recip()?
        }
        Err(e) => {
            return Err(match e {
                Error::NonPositiveLeading => Error::NotLaurent(
                    "division by a coefficient with nonpositive leading term".into(),
                ),
                other => other,
            })
        }
    };
    Ok(num.mul(&recip))
}

/// Substitute `x_k = (A + B) / x_k'` into `W` and certify the result Laurent
/// and positive.
///
/// Every pivot exponent of `W` must be an integer. The numerator
/// `(A + B)^m W(phi(x'))` is expanded over the coefficient field and divided
/// exactly by `(A + B)^m`; a nonvanishing remainder reports the surviving
/// denominator factor. When both exchange monomials share one exponent
/// vector, their summed coefficient may need inverting as a series; that
/// expansion is truncated at the division horizon.
pub fn mutate_pullback(w: &LaurentPoly, mu: &Mutation) -> Result<LaurentPoly> {
    let dim = w.dim();
    mu.validate(dim)?;
    let k = mu.pivot;

    let pivot_exps: Vec<i64> = w
        .terms()
        .iter()
        .map(|(_, v)| {
            if v[k].is_integer() {
                Ok(rat_to_f64(&v[k]) as i64)
            } else {
                Err(Error::NotLaurent("pivot exponents must be integers".into()))
            }
        })
        .collect::<Result<_>>()?;
    let m = pivot_exps.iter().map(|&e| (-e).max(0)).max().unwrap_or(0) as usize;

    let mut binomial = CoeffPoly::default();
    binomial.add_term(mu.a.1.clone(), mu.a.0.clone());
    binomial.add_term(mu.b.1.clone(), mu.b.0.clone());
    if binomial.terms.is_empty() {
        return Err(Error::NotLaurent("exchange binomial vanished".into()));
    }

    // Powers of the binomial up to the largest needed exponent.
    let max_pow = pivot_exps
        .iter()
        .map(|&e| (e + m as i64).max(0) as usize)
        .max()
        .unwrap_or(0);
    let mut powers: Vec<CoeffPoly> = Vec::with_capacity(max_pow + 1);
    powers.push(CoeffPoly::one(dim));
    for j in 1..=max_pow {
        powers.push(powers[j - 1].mul(&binomial));
    }

    // Numerator: (A+B)^m W(phi(x')) expanded as a Laurent polynomial.
    let mut numerator = CoeffPoly::default();
    for ((coeff, v), &ek) in w.terms().iter().zip(&pivot_exps) {
        let mut base = v.clone();
        base[k] = -v[k].clone();
        let pow = &powers[(ek + m as i64) as usize];
        for (be, bc) in &pow.terms {
            let e: RatVector = base.iter().zip(be).map(|(x, y)| x + y).collect();
            numerator.add_term(e, coeff.mul(bc));
        }
    }

    let threshold = 1e-9 * (1.0 + numerator.max_abs_coeff());
    let mut result = numerator;
    for _ in 0..m {
        result = result.divide_exact(&binomial, threshold)?;
    }

    let terms: Vec<(PuiseuxSeries, RatVector)> = result
        .cleaned(threshold)
        .terms
        .into_iter()
        .map(|(e, c)| (c, e))
        .collect();
    if terms.is_empty() {
        return Err(Error::NotLaurent("pullback vanished identically".into()));
    }
    LaurentPoly::new(dim, terms)
}

/// Min-plus transport of a tropical point through the exchange: the pivot
/// coordinate maps to `min(Val(A) + <a, d>, Val(B) + <b, d>) - d_k`.
pub fn trop_transport(mu: &Mutation, d: &[Rat]) -> RatVector {
    let k = mu.pivot;
    let val = |s: &PuiseuxSeries| s.val().finite().expect("positive coefficient").clone();
    let branch_a = val(&mu.a.0) + dot(&mu.a.1, d);
    let branch_b = val(&mu.b.0) + dot(&mu.b.1, d);
    let mut out = d.to_vec();
    out[k] = branch_a.min(branch_b) - &d[k];
    out
}

/// Invariance report for one exchange.
#[derive(Debug, Clone)]
pub struct MutationReport {
    pub d_crit_source: RatVector,
    pub d_crit_pullback: RatVector,
    /// Exact equality of the transported tropical point with the source one.
    pub trop_transport_ok: bool,
    /// Completeness of the pullback matches completeness of the source.
    pub completeness_match: bool,
    /// Largest coefficient deviation between the transported series and the
    /// source critical point, over all coordinates and compared exponents.
    pub series_max_dev: f64,
    pub series_ok: bool,
    /// Order (relative to each coordinate's valuation) through which series
    /// were compared.
    pub compare_order: Rat,
    /// Scope note: only single-pivot exchanges and monomial maps are
    /// supported here.
    pub scope_note: &'static str,
}

fn series_deviation(a: &PuiseuxSeries, b: &PuiseuxSeries, horizon: &ExtRat) -> f64 {
    let mut dev = 0.0f64;
    let diff = a.sub(b);
    for (e, c) in diff.terms() {
        if &ExtRat::Finite(e.clone()) < horizon {
            dev = dev.max(c.abs());
        }
    }
    dev
}

/// Solve both potentials and verify that the exchange transports one
/// positive critical point onto the other, exactly at the tropical level and
/// to truncation order on series.
pub fn check_mutation_invariance(
    w: &LaurentPoly,
    mu: &Mutation,
    opts: &SolveOptions,
) -> Result<MutationReport> {
    let pullback = mutate_pullback(w, mu)?;
    let completeness_match = pullback.is_complete() == w.is_complete();

    let res_source = solve_critical_with(w, opts)?;
    let res_pull = solve_critical_with(&pullback, opts)?;

    let transported = trop_transport(mu, &res_pull.d_crit);
    let trop_transport_ok = transported == res_source.d_crit;

    // Transport the pullback's critical point coordinatewise and compare
    // against the source critical point.
    let p_source = res_source.torus_point();
    let p_pull = res_pull.torus_point();
    let dim = w.dim();
    let k = mu.pivot;
    let mut series_max_dev = 0.0f64;
    for j in 0..dim {
        let mut e = vec![Rat::zero(); dim];
        e[j] = Rat::from_integer(1.into());
        let source_series = p_source.eval_character(&e)?;
        let image_series = if j != k {
            p_pull.eval_character(&e)?
        } else {
            let a_val = mu.a.0.mul(&p_pull.eval_character(&mu.a.1)?);
            let b_val = mu.b.0.mul(&p_pull.eval_character(&mu.b.1)?);
            let pivot_inv = p_pull.eval_character(&e)?.recip()?;
            a_val.add(&b_val).mul(&pivot_inv)
        };
        // Compare through the coordinate's valuation plus the solve order.
        let horizon = source_series
            .val()
            .plus(&opts.order)
            .min(source_series.trunc().clone())
            .min(image_series.trunc().clone());
        series_max_dev =
            series_max_dev.max(series_deviation(&source_series, &image_series, &horizon));
    }

    Ok(MutationReport {
        d_crit_source: res_source.d_crit,
        d_crit_pullback: res_pull.d_crit,
        trop_transport_ok,
        completeness_match,
        series_max_dev,
        series_ok: series_max_dev <= 1e-8,
        compare_order: opts.order.clone(),
        scope_note: "exchange maps are restricted to single-pivot binomial substitutions and monomial maps",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
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

    /// W = x + ty + (1 + ty)/x + t/y with the exchange x -> (1 + ty)/x'.
    fn worked_example() -> (LaurentPoly, Mutation) {
        let one = PuiseuxSeries::monomial(rat_int(0), 1.0);
        let t = PuiseuxSeries::monomial(rat_int(1), 1.0);
        let w = LaurentPoly::new(
            2,
            vec![
                (one.clone(), rv(&[1, 0])),
                (t.clone(), rv(&[0, 1])),
                (one.clone(), rv(&[-1, 0])),
                (t.clone(), rv(&[-1, 1])),
                (t.clone(), rv(&[0, -1])),
            ],
        )
        .unwrap();
        let mu = Mutation {
            pivot: 0,
            a: (one, rv(&[0, 0])),
            b: (t, rv(&[0, 1])),
            direction: MutationDirection::Forward,
        };
        (w, mu)
    }

    #[test]
    fn pullback_worked_example() {
        let (w, mu) = worked_example();
        let pulled = mutate_pullback(&w, &mu).unwrap();
        // (1+ty)/x' + ty + x' + t/y.
        let expect = LaurentPoly::new(
            2,
            vec![
                (PuiseuxSeries::monomial(rat_int(0), 1.0), rv(&[-1, 0])),
                (PuiseuxSeries::monomial(rat_int(1), 1.0), rv(&[-1, 1])),
                (PuiseuxSeries::monomial(rat_int(1), 1.0), rv(&[0, 1])),
                (PuiseuxSeries::monomial(rat_int(0), 1.0), rv(&[1, 0])),
                (PuiseuxSeries::monomial(rat_int(1), 1.0), rv(&[0, -1])),
            ],
        )
        .unwrap();
        assert_eq!(pulled.num_terms(), expect.num_terms());
        for (c, v) in expect.terms() {
            let found = pulled.terms().iter().find(|(_, u)| u == v).unwrap();
            assert_eq!(found.0.val(), c.val());
            assert!((found.0.leading_coeff().unwrap() - 1.0).abs() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn monomial_mutation_negates_pivot() {
        // A + B = 1/2 + 1/2: the map is x -> 1/x'.
        let w = monomial_poly(2, &[(0, &[1, 0]), (0, &[-1, 1]), (1, &[0, -1]), (1, &[-1, 0])]);
        let mu = Mutation {
            pivot: 0,
            a: (PuiseuxSeries::monomial(rat_int(0), 0.5), rv(&[0, 0])),
            b: (PuiseuxSeries::monomial(rat_int(0), 0.5), rv(&[0, 0])),
            direction: MutationDirection::Forward,
        };
        let pulled = mutate_pullback(&w, &mu).unwrap();
        let mut exps: Vec<Vec<Rat>> = pulled.exponents();
        exps.sort();
        let mut want = vec![rv(&[-1, 0]), rv(&[1, 1]), rv(&[0, -1]), rv(&[1, 0])];
        want.sort();
        assert_eq!(exps, want);
    }

    #[test]
    fn non_laurent_pullback_detected() {
        // W = x + y + t/(xy) with y -> (1+x)/y': the factor 1+x survives.
        let w = monomial_poly(2, &[(0, &[1, 0]), (0, &[0, 1]), (1, &[-1, -1])]);
        let mu = Mutation {
            pivot: 1,
            a: (PuiseuxSeries::monomial(rat_int(0), 1.0), rv(&[0, 0])),
            b: (PuiseuxSeries::monomial(rat_int(0), 1.0), rv(&[1, 0])),
            direction: MutationDirection::Forward,
        };
        assert!(matches!(mutate_pullback(&w, &mu), Err(Error::NotLaurent(_))));
    }

    #[test]
    fn invariance_on_worked_example() {
        let (w, mu) = worked_example();
        let opts = SolveOptions::with_order(rat_int(2));
        let rep = check_mutation_invariance(&w, &mu, &opts).unwrap();
        assert!(rep.trop_transport_ok, "{:?} vs {:?}", rep.d_crit_source, rep.d_crit_pullback);
        assert!(rep.completeness_match);
        assert!(rep.series_ok, "max deviation {}", rep.series_max_dev);
    }

    #[test]
    fn trop_transport_monomial_flip() {
        let mu = Mutation {
            pivot: 0,
            a: (PuiseuxSeries::monomial(rat_int(0), 0.5), rv(&[0, 0])),
            b: (PuiseuxSeries::monomial(rat_int(0), 0.5), rv(&[0, 0])),
            direction: MutationDirection::Forward,
        };
        let d = vec![rat(1, 3), rat(2, 5)];
        let out = trop_transport(&mu, &d);
        assert_eq!(out, vec![rat(-1, 3), rat(2, 5)]);
    }
}
