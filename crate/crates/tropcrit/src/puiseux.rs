//! Truncated generalized Puiseux series and positive torus points.
//!
//! A series is a sorted list of `(exponent, coefficient)` terms together with
//! a truncation horizon: every term below the horizon is exact, nothing at or
//! above it is known. Exponents are exact rationals, coefficients are `f64`.
//! All operations propagate the tightest valid horizon and never fabricate
//! terms at or beyond it.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratgeom::{dot, rat_to_f64, Rat, RatVector};

/// Default threshold below which coefficients produced by floating
/// cancellation are dropped.
pub const DEFAULT_CLEANUP: f64 = 1e-12;

/// A rational extended by positive infinity; used for valuations and
/// truncation horizons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtRat {
    Finite(Rat),
    Infinite,
}

impl ExtRat {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(x) => Some(x),
            ExtRat::Infinite => None,
        }
    }

    pub fn min(self, other: ExtRat) -> ExtRat {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `self + x`, with infinity absorbing.
    pub fn plus(&self, x: &Rat) -> ExtRat {
        match self {
            ExtRat::Finite(a) => ExtRat::Finite(a + x),
            ExtRat::Infinite => ExtRat::Infinite,
        }
    }

    pub fn plus_ext(&self, x: &ExtRat) -> ExtRat {
        match (self, x) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinite,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(x) => write!(f, "{}", x),
            ExtRat::Infinite => write!(f, "inf"),
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(x: Rat) -> Self {
        ExtRat::Finite(x)
    }
}

/// Truncated generalized Puiseux series with rational exponents and real
/// coefficients. The zero series is the empty term list.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxSeries {
    /// Strictly increasing exponents, nonzero coefficients, all below `trunc`.
    terms: Vec<(Rat, f64)>,
    trunc: ExtRat,
}

impl PuiseuxSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        PuiseuxSeries { terms: Vec::new(), trunc: ExtRat::Infinite }
    }

    /// The exact constant series.
    pub fn constant(c: f64) -> Self {
        Self::monomial(Rat::zero(), c)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The exact monomial `c t^e`.
    pub fn monomial(exponent: Rat, c: f64) -> Self {
        let terms = if c == 0.0 { Vec::new() } else { vec![(exponent, c)] };
        PuiseuxSeries { terms, trunc: ExtRat::Infinite }
    }

    /// Build a series from arbitrary terms: sorts, merges equal exponents,
    /// drops negligible coefficients and everything at or above the horizon.
    pub fn from_terms(terms: Vec<(Rat, f64)>, trunc: ExtRat) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rat, f64)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => merged.push((e, c)),
            }
        }
        let mut s = PuiseuxSeries { terms: merged, trunc };
        s.normalize(DEFAULT_CLEANUP);
        s
    }

    fn normalize(&mut self, threshold: f64) {
        let trunc = self.trunc.clone();
        self.terms.retain(|(e, c)| {
            c.abs() >= threshold && ExtRat::Finite(e.clone()) < trunc
        });
    }

    /// Copy with coefficients below `threshold` removed.
    pub fn cleaned(&self, threshold: f64) -> Self {
        let mut s = self.clone();
        s.normalize(threshold);
        s
    }

    pub fn terms(&self) -> &[(Rat, f64)] {
        &self.terms
    }

    pub fn trunc(&self) -> &ExtRat {
        &self.trunc
    }

    /// True when no term is known; the series is zero to its horizon.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent of the lowest-order term; infinity for the zero series.
    pub fn val(&self) -> ExtRat {
        match self.terms.first() {
            Some((e, _)) => ExtRat::Finite(e.clone()),
            None => ExtRat::Infinite,
        }
    }

    /// Coefficient of the lowest-order term.
    pub fn leading_coeff(&self) -> Result<f64> {
        self.terms.first().map(|(_, c)| *c).ok_or(Error::CoeffOfZero)
    }

    /// True when the series is nonzero with positive leading coefficient.
    pub fn is_positive(&self) -> bool {
        matches!(self.terms.first(), Some((_, c)) if *c > 0.0)
    }

    /// Coefficient of `t^e` (zero if absent; only meaningful below `trunc`).
    pub fn coeff_at(&self, e: &Rat) -> f64 {
        match self.terms.binary_search_by(|(te, _)| te.cmp(e)) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0.0,
        }
    }

    /// Restrict the horizon to `min(trunc, cap)`, dropping terms at or above.
    pub fn with_trunc(&self, cap: ExtRat) -> Self {
        let trunc = self.trunc.clone().min(cap);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| ExtRat::Finite(e.clone()) < trunc)
            .cloned()
            .collect();
        PuiseuxSeries { terms, trunc }
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Termwise sum; the horizon is the tighter of the two. Terms with equal
    /// exponents and opposite coefficients cancel exactly.
    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        terms.extend(self.terms.iter().cloned());
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms, trunc)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply by the exact monomial `c t^e`.
    pub fn mul_monomial(&self, e: &Rat, c: f64) -> Self {
        if c == 0.0 {
            return PuiseuxSeries { terms: Vec::new(), trunc: self.trunc.plus(e) };
        }
        PuiseuxSeries {
            terms: self.terms.iter().map(|(te, tc)| (te + e, tc * c)).collect(),
            trunc: self.trunc.plus(e),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.mul_monomial(&Rat::zero(), c)
    }

    /// Cauchy product, truncated at
    /// `min(a.trunc + val(b), b.trunc + val(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self
            .trunc
            .plus_ext(&other.val())
            .min(other.trunc.plus_ext(&self.val()));
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                terms.push((ea + eb, ca * cb));
            }
        }
        Self::from_terms(terms, trunc)
    }

    /// Reciprocal of a series with positive leading coefficient, by geometric
    /// expansion up to the horizon implied by the input.
    pub fn recip(&self) -> Result<Self> {
        let lead = self.leading_coeff().map_err(|_| Error::NonPositiveLeading)?;
        if lead <= 0.0 {
            return Err(Error::NonPositiveLeading);
        }
        let v = self.terms[0].0.clone();
        // self = c t^v (1 + u), val(u) > 0; 1/self = t^-v / c * sum (-u)^k.
        let unit = self.mul_monomial(&-v.clone(), 1.0 / lead);
        let u = unit.sub(&PuiseuxSeries::one());
        if !u.is_zero() && !unit.trunc().is_finite() {
            return Err(Error::InvariantViolation(
                "reciprocal of an exact multi-term series has no finite representation; clamp the horizon first"
                    .into(),
            ));
        }
        // 1/(1+u) has the same horizon as the unit series. Powers are
        // clamped to that horizon so the expansion terminates once their
        // valuation passes it.
        let horizon = unit.trunc.clone();
        let mut acc = PuiseuxSeries::one().with_trunc(horizon.clone());
        let mut pow = PuiseuxSeries::one().with_trunc(horizon.clone());
        loop {
            pow = pow.mul(&u).neg().with_trunc(horizon.clone());
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc.mul_monomial(&-v, 1.0 / lead))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Exponential series of an argument with strictly positive valuation.
    pub fn exp_series(&self) -> Result<Self> {
        if self.is_zero() {
            // exp(0) = 1 exactly, but an unknown tail keeps its horizon.
            return Ok(PuiseuxSeries::one().with_trunc(self.trunc.clone()));
        }
        let v = self.val();
        match &v {
            ExtRat::Finite(x) if x.is_positive() => {}
            _ => return Err(Error::NonPositiveValuation),
        }
        if !self.trunc.is_finite() {
            return Err(Error::InvariantViolation(
                "exp of an exact nonzero series has no finite representation; clamp the horizon first"
                    .into(),
            ));
        }
        let horizon = self.trunc.clone();
        let mut acc = PuiseuxSeries::one().with_trunc(horizon.clone());
        let mut pow = PuiseuxSeries::one().with_trunc(horizon.clone());
        let mut k = 1.0;
        loop {
            pow = pow.mul(self).scale(1.0 / k).with_trunc(horizon.clone());
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
            k += 1.0;
        }
        Ok(acc)
    }

    /// Logarithm of a series with leading term exactly `1` at exponent `0`.
    /// Inverse of `exp_series` up to the truncation horizon.
    pub fn log_series(&self) -> Result<Self> {
        match self.terms.first() {
            Some((e, c)) if e.is_zero() && *c == 1.0 => {}
            _ => return Err(Error::NotUnitLeading),
        }
        let u = self.sub(&PuiseuxSeries::one());
        if u.is_zero() {
            return Ok(PuiseuxSeries::zero().with_trunc(self.trunc.clone()));
        }
        if !self.trunc.is_finite() {
            return Err(Error::InvariantViolation(
                "log of an exact non-unit series has no finite representation; clamp the horizon first"
                    .into(),
            ));
        }
        let horizon = self.trunc.clone();
        let mut acc = PuiseuxSeries::zero().with_trunc(horizon.clone());
        let mut pow = PuiseuxSeries::one().with_trunc(horizon.clone());
        let mut k = 1.0;
        let mut sign = 1.0;
        loop {
            pow = pow.mul(&u).with_trunc(horizon.clone());
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow.scale(sign / k));
            k += 1.0;
            sign = -sign;
        }
        Ok(acc)
    }

    /// Largest absolute coefficient (zero for the zero series).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, (_, c)| m.max(c.abs()))
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                if e.is_zero() {
                    write!(f, "{}", c)?;
                } else {
                    write!(f, "{}*t^({})", c, e)?;
                }
            }
        }
        match &self.trunc {
            ExtRat::Finite(t) => write!(f, " + O(t^({}))", t),
            ExtRat::Infinite => Ok(()),
        }
    }
}

/// A point of the positive torus in logarithmic coordinates: the factorization
/// `p = e^u t^d exp_T(w)` with `u` real, `d` rational and `w` a vector of
/// series of positive valuation.
#[derive(Debug, Clone)]
pub struct TorusPoint {
    log_coeff: Vec<f64>,
    valuation: RatVector,
    log_unit: Vec<PuiseuxSeries>,
}

impl TorusPoint {
    pub fn new(
        log_coeff: Vec<f64>,
        valuation: RatVector,
        log_unit: Vec<PuiseuxSeries>,
    ) -> Result<Self> {
        if log_coeff.len() != valuation.len() || log_coeff.len() != log_unit.len() {
            return Err(Error::DimensionMismatch {
                expected: log_coeff.len(),
                got: valuation.len().max(log_unit.len()),
            });
        }
        for w in &log_unit {
            match w.val() {
                ExtRat::Infinite => {}
                ExtRat::Finite(v) if v.is_positive() => {}
                _ => return Err(Error::NonPositiveValuation),
            }
        }
        Ok(TorusPoint { log_coeff, valuation, log_unit })
    }

    /// The monomial point `t^d`.
    pub fn monomial(valuation: RatVector) -> Self {
        let r = valuation.len();
        TorusPoint {
            log_coeff: vec![0.0; r],
            valuation,
            log_unit: vec![PuiseuxSeries::zero(); r],
        }
    }

    pub fn dim(&self) -> usize {
        self.valuation.len()
    }

    pub fn log_coeff(&self) -> &[f64] {
        &self.log_coeff
    }

    pub fn valuation(&self) -> &[Rat] {
        &self.valuation
    }

    pub fn log_unit(&self) -> &[PuiseuxSeries] {
        &self.log_unit
    }

    /// Evaluate the character `x^v` at this point:
    /// `e^(v.u) t^(v.d) exp(v.w)`. The result always has a positive leading
    /// coefficient.
    pub fn eval_character(&self, v: &[Rat]) -> Result<PuiseuxSeries> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let exponent = dot(v, &self.valuation);
        let coeff = (v
            .iter()
            .zip(&self.log_coeff)
            .map(|(vi, ui)| rat_to_f64(vi) * ui)
            .sum::<f64>())
        .exp();
        let mut arg = PuiseuxSeries::zero();
        for (vi, wi) in v.iter().zip(&self.log_unit) {
            if !vi.is_zero() {
                arg = arg.add(&wi.scale(rat_to_f64(vi)));
            } else {
                // A zero pairing still propagates the horizon of wi.
                arg = arg.with_trunc(wi.trunc().clone());
            }
        }
        let unit = arg.exp_series()?;
        Ok(unit.mul_monomial(&exponent, coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratgeom::{rat, rat_int};

    fn series(terms: &[(i64, i64, f64)], trunc: Option<(i64, i64)>) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(
            terms.iter().map(|&(n, d, c)| (rat(n, d), c)).collect(),
            match trunc {
                Some((n, d)) => ExtRat::Finite(rat(n, d)),
                None => ExtRat::Infinite,
            },
        )
    }

    fn assert_close(s: &PuiseuxSeries, expect: &[(Rat, f64)], tol: f64) {
        assert_eq!(s.terms().len(), expect.len(), "term count in {}", s);
        for ((e, c), (ee, ec)) in s.terms().iter().zip(expect) {
            assert_eq!(e, ee, "exponent in {}", s);
            assert!((c - ec).abs() <= tol, "coefficient {} vs {} in {}", c, ec, s);
        }
    }

    #[test]
    fn add_cancellation() {
        // (1 + t, trunc 2) + (-1 + t^2, trunc 3) = t + t^2 with trunc 2.
        let a = series(&[(0, 1, 1.0), (1, 1, 1.0)], Some((2, 1)));
        let b = series(&[(0, 1, -1.0), (2, 1, 1.0)], Some((3, 1)));
        let c = a.add(&b);
        assert_eq!(c.trunc(), &ExtRat::Finite(rat_int(2)));
        // The t^2 term sits at the horizon and is not known.
        assert_close(&c, &[(rat_int(1), 1.0)], 0.0);
    }

    #[test]
    fn add_identity() {
        let a = series(&[(1, 2, 3.0), (1, 1, 1.0)], None);
        assert_eq!(PuiseuxSeries::zero().add(&a), a);
    }

    #[test]
    fn add_merges_exponents() {
        let a = series(&[(1, 2, 1.0)], Some((1, 1)));
        let b = series(&[(1, 3, 1.0)], Some((1, 1)));
        let c = a.add(&b);
        assert_close(&c, &[(rat(1, 3), 1.0), (rat(1, 2), 1.0)], 0.0);
        assert_eq!(c.trunc(), &ExtRat::Finite(rat_int(1)));
    }

    #[test]
    fn mul_monomials() {
        let a = PuiseuxSeries::monomial(rat(1, 2), 1.0);
        assert_close(&a.mul(&a), &[(rat_int(1), 1.0)], 0.0);
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = series(&[(0, 1, 1.0), (1, 1, 1.0)], None);
        let b = series(&[(0, 1, 1.0), (1, 1, -1.0)], None);
        assert_close(&a.mul(&b), &[(rat_int(0), 1.0), (rat_int(2), -1.0)], 0.0);
    }

    #[test]
    fn mul_truncated() {
        let a = series(&[(0, 1, 1.0), (1, 3, 1.0)], Some((1, 1)));
        let b = series(&[(0, 1, 1.0), (1, 2, 1.0)], Some((1, 1)));
        let c = a.mul(&b);
        assert_eq!(c.trunc(), &ExtRat::Finite(rat_int(1)));
        assert_close(
            &c,
            &[
                (rat_int(0), 1.0),
                (rat(1, 3), 1.0),
                (rat(1, 2), 1.0),
                (rat(5, 6), 1.0),
            ],
            0.0,
        );
    }

    #[test]
    fn val_examples() {
        assert_eq!(
            series(&[(1, 2, 3.0), (1, 1, 1.0)], None).val(),
            ExtRat::Finite(rat(1, 2))
        );
        assert_eq!(PuiseuxSeries::zero().val(), ExtRat::Infinite);
        assert_eq!(
            series(&[(0, 1, 2.0), (1, 1, 1.0)], None).val(),
            ExtRat::Finite(rat_int(0))
        );
    }

    #[test]
    fn leading_coeff_examples() {
        assert_eq!(series(&[(1, 2, 3.0), (1, 1, 1.0)], None).leading_coeff().unwrap(), 3.0);
        // Coeff is defined for non-positive series too.
        assert_eq!(series(&[(0, 1, -2.0), (1, 1, 1.0)], None).leading_coeff().unwrap(), -2.0);
        assert_eq!(series(&[(-1, 1, 5.0)], None).leading_coeff().unwrap(), 5.0);
        assert!(matches!(
            PuiseuxSeries::zero().leading_coeff(),
            Err(Error::CoeffOfZero)
        ));
    }

    #[test]
    fn exp_of_zero() {
        let e = PuiseuxSeries::zero().exp_series().unwrap();
        assert_close(&e, &[(rat_int(0), 1.0)], 0.0);
    }

    #[test]
    fn exp_of_t() {
        let t = PuiseuxSeries::monomial(rat_int(1), 1.0).with_trunc(ExtRat::Finite(rat_int(3)));
        let e = t.exp_series().unwrap();
        assert_close(
            &e,
            &[(rat_int(0), 1.0), (rat_int(1), 1.0), (rat_int(2), 0.5)],
            1e-15,
        );
        assert_eq!(e.trunc(), &ExtRat::Finite(rat_int(3)));
    }

    #[test]
    fn exp_requires_positive_valuation() {
        let a = series(&[(0, 1, 1.0)], Some((2, 1)));
        assert!(matches!(a.exp_series(), Err(Error::NonPositiveValuation)));
    }

    #[test]
    fn log_requires_unit_leading() {
        let a = series(&[(0, 1, 2.0)], Some((2, 1)));
        assert!(matches!(a.log_series(), Err(Error::NotUnitLeading)));
    }

    #[test]
    fn log_exp_roundtrip() {
        let a = series(&[(1, 1, -1.0), (2, 1, 2.0)], Some((4, 1)));
        let back = a.exp_series().unwrap().log_series().unwrap();
        assert_close(&back, &[(rat_int(1), -1.0), (rat_int(2), 2.0)], 1e-12);
    }

    #[test]
    fn recip_geometric() {
        let a = series(&[(0, 1, 1.0), (1, 1, 1.0)], Some((3, 1)));
        let r = a.recip().unwrap();
        assert_close(
            &r,
            &[(rat_int(0), 1.0), (rat_int(1), -1.0), (rat_int(2), 1.0)],
            1e-15,
        );
        assert!(a.mul(&r).sub(&PuiseuxSeries::one()).cleaned(1e-12).is_zero());
    }

    #[test]
    fn eval_character_monomial() {
        let p = TorusPoint::monomial(vec![rat(1, 2)]);
        let s = p.eval_character(&[rat_int(2)]).unwrap();
        assert_close(&s, &[(rat_int(1), 1.0)], 0.0);
    }

    #[test]
    fn eval_character_coefficient() {
        let p = TorusPoint::new(vec![2.0f64.ln()], vec![rat_int(0)], vec![PuiseuxSeries::zero()])
            .unwrap();
        let s = p.eval_character(&[rat_int(1)]).unwrap();
        assert_close(&s, &[(rat_int(0), 2.0)], 1e-15);
    }

    #[test]
    fn eval_character_unit_part() {
        let w = PuiseuxSeries::monomial(rat_int(1), -1.0).with_trunc(ExtRat::Finite(rat_int(3)));
        let p = TorusPoint::new(vec![0.0], vec![rat_int(0)], vec![w]).unwrap();
        let s = p.eval_character(&[rat_int(3)]).unwrap();
        assert_close(
            &s,
            &[(rat_int(0), 1.0), (rat_int(1), -3.0), (rat_int(2), 4.5)],
            1e-12,
        );
    }

    #[test]
    fn torus_point_requires_positive_valuation() {
        let w = PuiseuxSeries::one();
        assert!(matches!(
            TorusPoint::new(vec![0.0], vec![rat_int(0)], vec![w]),
            Err(Error::NonPositiveValuation)
        ));
    }
}
