//! Report structures: a machine-readable JSON document plus a plain-text
//! summary. Exact quantities (exponents, valuations, stage data) are always
//! rational strings; floating quantities are decimal strings with 17
//! significant digits, so identical inputs produce byte-identical reports.

use serde::Serialize;

use tropcrit::apps::{DelzantReport, MutationReport, ToricReport};
use tropcrit::lift::NondegCertificate;
use tropcrit::puiseux::ExtRat;
use tropcrit::recursion::StageRecord;
use tropcrit::{CritResult, LaurentPoly, Rat};

use crate::instance::{format_f64, InstanceFile, SeriesLit};

fn rat_str(x: &Rat) -> String {
    x.to_string()
}

fn ext_str(x: &ExtRat) -> String {
    x.to_string()
}

fn vec_rat(xs: &[Rat]) -> Vec<String> {
    xs.iter().map(rat_str).collect()
}

fn vec_f64(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|x| format_f64(*x)).collect()
}

#[derive(Debug, Serialize)]
pub struct StageOut {
    pub index: usize,
    pub tau_bar: String,
    pub support: Vec<usize>,
    pub span_vectors: Vec<Vec<String>>,
}

impl StageOut {
    pub fn new(s: &StageRecord) -> Self {
        StageOut {
            index: s.index,
            tau_bar: rat_str(&s.tau_bar),
            support: s.support.clone(),
            span_vectors: s.span_vectors.iter().map(|v| vec_rat(v)).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TropicalSection {
    pub tau: String,
    pub d_crit: Vec<String>,
    pub levels: Vec<String>,
    pub stages: Vec<StageOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<MembershipAnswer>>,
}

#[derive(Debug, Serialize)]
pub struct MembershipAnswer {
    pub point: Vec<String>,
    pub value: String,
    pub member: bool,
}

#[derive(Debug, Serialize)]
pub struct CoefficientSection {
    pub d_coeff: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SeriesSection {
    pub w_crit: Vec<SeriesLit>,
    /// Per-coordinate series of the critical point itself.
    pub coordinates: Vec<SeriesLit>,
    pub achieved_order: String,
    pub clamped: bool,
}

#[derive(Debug, Serialize)]
pub struct NondegOut {
    pub passed: bool,
    pub leading_block_pd: bool,
    pub directions: Vec<DirectionOut>,
}

#[derive(Debug, Serialize)]
pub struct DirectionOut {
    pub direction: Vec<i64>,
    pub leading: String,
    pub positive: bool,
}

impl NondegOut {
    pub fn new(c: &NondegCertificate) -> Self {
        NondegOut {
            passed: c.passed,
            leading_block_pd: c.leading_block_pd,
            directions: c
                .directions
                .iter()
                .map(|d| DirectionOut {
                    direction: d.direction.clone(),
                    leading: format_f64(d.leading),
                    positive: d.positive,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CertificatesSection {
    pub residual_valuation: String,
    /// Only leading-order nondegeneracy is checked; the report does not
    /// verify any stronger nondegeneracy notion.
    pub unverified: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trop_max_equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tropical_critical: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff_conditions: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_meets_order: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nondegenerate: Option<NondegOut>,
}

#[derive(Debug, Serialize)]
pub struct ToricSection {
    pub d_crit: Vec<String>,
    pub tau: String,
    pub integral_divisor: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrally_balanced: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguished: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguished_verified: Option<bool>,
    pub stages: Vec<StageOut>,
}

#[derive(Debug, Serialize)]
pub struct DelzantSection {
    pub d_crit: Vec<String>,
    pub tau: String,
    pub facet_slacks: Vec<String>,
    pub full_dimensional: bool,
    pub interior: bool,
    pub caveat: String,
}

#[derive(Debug, Serialize)]
pub struct MutationSection {
    pub d_crit_source: Vec<String>,
    pub d_crit_pullback: Vec<String>,
    pub trop_transport_ok: bool,
    pub completeness_match: bool,
    pub series_max_dev: String,
    pub series_ok: bool,
    pub compare_order: String,
    pub pullback: crate::instance::LaurentPayload,
    pub scope_note: String,
}

/// Top-level report document.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub instance: InstanceFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tropical: Option<TropicalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<CoefficientSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<CertificatesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toric: Option<ToricSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delzant: Option<DelzantSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<MutationSection>,
}

impl Report {
    pub fn new(command: &str, seed: u64, instance: InstanceFile) -> Self {
        Report {
            command: command.into(),
            seed,
            instance,
            tropical: None,
            coefficient: None,
            series: None,
            certificates: None,
            toric: None,
            delzant: None,
            mutation: None,
        }
    }

    pub fn fill_crit(&mut self, w: &LaurentPoly, res: &CritResult) {
        self.tropical = Some(TropicalSection {
            tau: rat_str(&res.tau),
            d_crit: vec_rat(&res.d_crit),
            levels: vec_rat(&res.levels),
            stages: res.stages.iter().map(StageOut::new).collect(),
            membership: None,
        });
        self.coefficient = Some(CoefficientSection { d_coeff: vec_f64(&res.d_coeff) });
        let p = res.torus_point();
        let coordinates = (0..w.dim())
            .map(|j| {
                let mut e = vec![Rat::from_integer(0.into()); w.dim()];
                e[j] = Rat::from_integer(1.into());
                SeriesLit::from_series(&p.eval_character(&e).expect("basis character"))
            })
            .collect();
        self.series = Some(SeriesSection {
            w_crit: res.w_crit.iter().map(SeriesLit::from_series).collect(),
            coordinates,
            achieved_order: rat_str(&res.achieved_order),
            clamped: res.clamped,
        });
        self.certificates = Some(CertificatesSection {
            residual_valuation: ext_str(&res.residual_valuation),
            unverified: vec![
                "stronger nondegeneracy beyond positive leading Hessian coefficients",
            ],
            trop_max_equal: None,
            tropical_critical: None,
            coeff_conditions: None,
            residual_meets_order: None,
            nondegenerate: None,
        });
    }

    pub fn fill_toric(&mut self, rep: &ToricReport) {
        self.toric = Some(ToricSection {
            d_crit: vec_rat(&rep.d_crit),
            tau: rat_str(&rep.tau),
            integral_divisor: rep.integral_divisor,
            integrally_balanced: rep.integrally_balanced,
            distinguished: rep.distinguished.as_ref().map(|d| vec_rat(d)),
            distinguished_verified: rep.distinguished_verified,
            stages: rep.stages.iter().map(StageOut::new).collect(),
        });
    }

    pub fn fill_delzant(&mut self, w: &LaurentPoly, rep: &DelzantReport) {
        self.delzant = Some(DelzantSection {
            d_crit: vec_rat(&rep.d_crit),
            tau: rat_str(&rep.tau),
            facet_slacks: vec_rat(&rep.facet_slacks),
            full_dimensional: rep.full_dimensional,
            interior: rep.interior,
            caveat: rep.caveat.into(),
        });
        self.fill_crit(w, &rep.crit);
        if let Some(c) = &mut self.certificates {
            c.nondegenerate = Some(NondegOut::new(&rep.nondegeneracy));
        }
    }

    pub fn fill_mutation(&mut self, rep: &MutationReport, pullback: &LaurentPoly) {
        self.mutation = Some(MutationSection {
            d_crit_source: vec_rat(&rep.d_crit_source),
            d_crit_pullback: vec_rat(&rep.d_crit_pullback),
            trop_transport_ok: rep.trop_transport_ok,
            completeness_match: rep.completeness_match,
            series_max_dev: format_f64(rep.series_max_dev),
            series_ok: rep.series_ok,
            compare_order: rat_str(&rep.compare_order),
            pullback: crate::instance::LaurentPayload::from_poly(pullback),
            scope_note: rep.scope_note.into(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: String| {
            out.push_str(&line);
            out.push('\n');
        };
        push(&mut out, format!("command: {}", self.command));
        if let Some(t) = &self.tropical {
            push(&mut out, format!("tau: {}", t.tau));
            push(&mut out, format!("d_crit: ({})", t.d_crit.join(", ")));
            push(&mut out, format!("levels: {}", t.levels.join(", ")));
            if let Some(ms) = &t.membership {
                for m in ms {
                    push(
                        &mut out,
                        format!(
                            "membership ({}): trop = {} -> {}",
                            m.point.join(", "),
                            m.value,
                            m.member
                        ),
                    );
                }
            }
        }
        if let Some(c) = &self.coefficient {
            push(&mut out, format!("d_coeff: ({})", c.d_coeff.join(", ")));
        }
        if let Some(s) = &self.series {
            for (j, w) in s.w_crit.iter().enumerate() {
                let body = w
                    .terms
                    .iter()
                    .map(|(e, c)| format!("{} t^({})", c.0, e.0))
                    .collect::<Vec<_>>()
                    .join(" + ");
                push(&mut out, format!("w_crit[{}]: {}", j, if body.is_empty() { "0".into() } else { body }));
            }
            push(
                &mut out,
                format!("achieved order: {}{}", s.achieved_order, if s.clamped { " (clamped)" } else { "" }),
            );
        }
        if let Some(c) = &self.certificates {
            push(&mut out, format!("residual valuation: {}", c.residual_valuation));
            if let Some(b) = c.trop_max_equal {
                push(&mut out, format!("certify trop max equality: {}", ok(b)));
            }
            if let Some(b) = c.tropical_critical {
                push(&mut out, format!("certify tropical critical conditions: {}", ok(b)));
            }
            if let Some(b) = c.coeff_conditions {
                push(&mut out, format!("certify coefficient conditions: {}", ok(b)));
            }
            if let Some(b) = c.residual_meets_order {
                push(&mut out, format!("certify residual valuation >= tau + order: {}", ok(b)));
            }
            if let Some(n) = &c.nondegenerate {
                push(&mut out, format!("certify nondegeneracy: {}", ok(n.passed)));
            }
        }
        if let Some(t) = &self.toric {
            push(&mut out, format!("d_crit: ({})", t.d_crit.join(", ")));
            push(&mut out, format!("tau: {}", t.tau));
            match t.integrally_balanced {
                Some(b) => push(&mut out, format!("integrally balanced: {}", b)),
                None => push(&mut out, "integrally balanced: n/a (non-integral divisor)".into()),
            }
            if let Some(d) = &t.distinguished {
                push(&mut out, format!("distinguished divisor: ({})", d.join(", ")));
            }
        }
        if let Some(d) = &self.delzant {
            push(&mut out, format!("polytope point: ({})", d.d_crit.join(", ")));
            push(&mut out, format!("facet slacks: {}", d.facet_slacks.join(", ")));
            push(&mut out, format!("interior: {}", d.interior));
            push(&mut out, format!("caveat: {}", d.caveat));
        }
        if let Some(m) = &self.mutation {
            push(&mut out, format!("d_crit source: ({})", m.d_crit_source.join(", ")));
            push(&mut out, format!("d_crit pullback: ({})", m.d_crit_pullback.join(", ")));
            push(&mut out, format!("tropical transport exact: {}", ok(m.trop_transport_ok)));
            push(
                &mut out,
                format!("series transport deviation: {} -> {}", m.series_max_dev, ok(m.series_ok)),
            );
        }
        out
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}
