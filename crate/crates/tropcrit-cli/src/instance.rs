//! Instance file schema.
//!
//! Rationals are written as `"p/q"` strings or JSON integers; series are
//! `{"terms": [[exponent, coefficient], ...], "trunc": ...}` with an optional
//! horizon. Coefficients are accepted as JSON numbers or decimal strings and
//! always re-serialized as decimal strings with 17 significant digits, so a
//! report's echoed instance re-parses to an equal instance.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use tropcrit::apps::{DelzantInstance, Mutation, MutationDirection, ToricInstance};
use tropcrit::puiseux::ExtRat;
use tropcrit::ratgeom::rat_int;
use tropcrit::{LaurentPoly, PuiseuxSeries, Rat};

/// Exact rational literal: `"p/q"`, `"p"`, or a JSON integer.
#[derive(Debug, Clone, PartialEq)]
pub struct RatLit(pub Rat);

impl Serialize for RatLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RatLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| D::Error::custom("rational literals must be integers or \"p/q\" strings"))?;
                Ok(RatLit(rat_int(i)))
            }
            serde_json::Value::String(s) => s
                .trim()
                .parse::<Rat>()
                .map(RatLit)
                .map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}"))),
            other => Err(D::Error::custom(format!("bad rational literal: {other}"))),
        }
    }
}

/// Real coefficient literal; serialized with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct F64Lit(pub f64);

pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

impl Serialize for F64Lit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_f64(self.0))
    }
}

impl<'de> Deserialize<'de> for F64Lit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(F64Lit)
                .ok_or_else(|| D::Error::custom("bad coefficient number")),
            serde_json::Value::String(s) => s
                .trim()
                .parse::<f64>()
                .map(F64Lit)
                .map_err(|e| D::Error::custom(format!("bad coefficient {s:?}: {e}"))),
            other => Err(D::Error::custom(format!("bad coefficient literal: {other}"))),
        }
    }
}

/// Series literal: exponent/coefficient pairs plus an optional horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesLit {
    pub terms: Vec<(RatLit, F64Lit)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<RatLit>,
}

impl SeriesLit {
    pub fn to_series(&self) -> PuiseuxSeries {
        let trunc = match &self.trunc {
            Some(t) => ExtRat::Finite(t.0.clone()),
            None => ExtRat::Infinite,
        };
        PuiseuxSeries::from_terms(
            self.terms.iter().map(|(e, c)| (e.0.clone(), c.0)).collect(),
            trunc,
        )
    }

    pub fn from_series(s: &PuiseuxSeries) -> Self {
        SeriesLit {
            terms: s
                .terms()
                .iter()
                .map(|(e, c)| (RatLit(e.clone()), F64Lit(*c)))
                .collect(),
            trunc: match s.trunc() {
                ExtRat::Finite(t) => Some(RatLit(t.clone())),
                ExtRat::Infinite => None,
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<RatLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Points whose membership in `{Trop(W) >= 0}` the `trop` command reports.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub membership_queries: Vec<Vec<RatLit>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentPayload {
    pub dim: usize,
    /// `[series, exponent-vector]` pairs.
    pub terms: Vec<(SeriesLit, Vec<RatLit>)>,
}

impl LaurentPayload {
    pub fn to_poly(&self) -> tropcrit::Result<LaurentPoly> {
        LaurentPoly::new(
            self.dim,
            self.terms
                .iter()
                .map(|(s, v)| (s.to_series(), v.iter().map(|x| x.0.clone()).collect()))
                .collect(),
        )
    }

    pub fn from_poly(w: &LaurentPoly) -> Self {
        LaurentPayload {
            dim: w.dim(),
            terms: w
                .terms()
                .iter()
                .map(|(c, v)| {
                    (
                        SeriesLit::from_series(c),
                        v.iter().map(|x| RatLit(x.clone())).collect(),
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialLit {
    pub coeff: SeriesLit,
    pub exponent: Vec<RatLit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MutationPayload {
    pub pivot: usize,
    pub a: MonomialLit,
    pub b: MonomialLit,
    #[serde(default = "default_direction")]
    pub direction: String,
}

fn default_direction() -> String {
    "forward".into()
}

impl MutationPayload {
    pub fn to_mutation(&self) -> Result<Mutation, String> {
        let direction = match self.direction.as_str() {
            "forward" => MutationDirection::Forward,
            "inverse" => MutationDirection::Inverse,
            other => return Err(format!("bad mutation direction {other:?}")),
        };
        Ok(Mutation {
            pivot: self.pivot,
            a: (
                self.a.coeff.to_series(),
                self.a.exponent.iter().map(|x| x.0.clone()).collect(),
            ),
            b: (
                self.b.coeff.to_series(),
                self.b.exponent.iter().map(|x| x.0.clone()).collect(),
            ),
            direction,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetLit {
    pub normal: Vec<i64>,
    pub constant: RatLit,
}

/// One instance file; `kind` selects the payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Laurent {
        #[serde(flatten)]
        payload: LaurentPayload,
        #[serde(default)]
        options: Options,
    },
    Toric {
        rays: Vec<Vec<i64>>,
        coeffs: Vec<RatLit>,
        #[serde(default)]
        options: Options,
    },
    Delzant {
        facets: Vec<FacetLit>,
        #[serde(default)]
        options: Options,
    },
    Mutation {
        w: LaurentPayload,
        mutation: MutationPayload,
        #[serde(default)]
        options: Options,
    },
}

impl InstanceFile {
    pub fn options(&self) -> &Options {
        match self {
            InstanceFile::Laurent { options, .. }
            | InstanceFile::Toric { options, .. }
            | InstanceFile::Delzant { options, .. }
            | InstanceFile::Mutation { options, .. } => options,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Laurent { .. } => "laurent",
            InstanceFile::Toric { .. } => "toric",
            InstanceFile::Delzant { .. } => "delzant",
            InstanceFile::Mutation { .. } => "mutation",
        }
    }

    pub fn to_toric(&self) -> Option<ToricInstance> {
        match self {
            InstanceFile::Toric { rays, coeffs, .. } => Some(ToricInstance {
                rays: rays.clone(),
                coeffs: coeffs.iter().map(|c| c.0.clone()).collect(),
            }),
            _ => None,
        }
    }

    pub fn to_delzant(&self) -> Option<DelzantInstance> {
        match self {
            InstanceFile::Delzant { facets, .. } => Some(DelzantInstance {
                facets: facets
                    .iter()
                    .map(|f| (f.normal.clone(), f.constant.0.clone()))
                    .collect(),
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literal_roundtrip() {
        let lit: RatLit = serde_json::from_str("\"1/2\"").unwrap();
        assert_eq!(lit.0, Rat::new(1.into(), 2.into()));
        let lit: RatLit = serde_json::from_str("-3").unwrap();
        assert_eq!(lit.0, rat_int(-3));
        assert_eq!(serde_json::to_string(&lit).unwrap(), "\"-3\"");
    }

    #[test]
    fn coefficient_literal_17_digits() {
        let lit = F64Lit(1.0 / 3.0);
        let s = serde_json::to_string(&lit).unwrap();
        let back: F64Lit = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, lit.0);
    }

    #[test]
    fn laurent_instance_parses() {
        let text = r#"{
            "kind": "laurent",
            "dim": 1,
            "terms": [
                [{"terms": [["0", 1.0]]}, ["1"]],
                [{"terms": [["1", 1.0]]}, ["-1"]]
            ],
            "options": {"order": "3"}
        }"#;
        let inst: InstanceFile = serde_json::from_str(text).unwrap();
        match &inst {
            InstanceFile::Laurent { payload, options } => {
                let w = payload.to_poly().unwrap();
                assert_eq!(w.dim(), 1);
                assert_eq!(w.num_terms(), 2);
                assert_eq!(options.order.as_ref().unwrap().0, rat_int(3));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn echo_reparses_equal() {
        let text = r#"{
            "kind": "laurent",
            "dim": 1,
            "terms": [[{"terms": [["1/2", 0.3333333333333333]], "trunc": "2"}, ["1"]],
                      [{"terms": [["0", 1.0]]}, ["-1"]]]
        }"#;
        let inst: InstanceFile = serde_json::from_str(text).unwrap();
        let echoed = serde_json::to_string(&inst).unwrap();
        let again: InstanceFile = serde_json::from_str(&echoed).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), echoed);
    }
}
