//! The JSON and text reports emitted by the command-line tool.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::gcr::{CheckDetail, Method, RegionCheck, SampleOutcome, Tolerances, Verdict};
use crate::manifold::AtlasReport;
use crate::sampling::Region;

pub const SCHEMA_VERSION: u32 = 1;

/// Printed with every report: the reading of the axial form used throughout.
pub const AXIAL_FORM_READING: &str = "f(q) = f1(q) e1 + f0(q) (q2 e2 + q3 e3 + q4 e4); \
the imaginary sum runs over i = 2..4, so the real part is f1 alone (a sum from i = 1 would \
add q1 f0 to it and make q itself fail the first Cauchy-Riemann equation)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<String>,
    pub point: [f64; 4],
    pub verdict: Verdict,
    pub method: Method,
    pub detail: Option<CheckDetail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PointRecord {
    fn from_outcome(s: &SampleOutcome, transition: Option<String>) -> Self {
        PointRecord {
            index: s.index,
            transition,
            point: s.check.point,
            verdict: s.check.verdict,
            method: s.check.method,
            detail: s.check.detail,
            error: s.error.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_checked: usize,
    pub n_regular: usize,
    pub n_not: usize,
    pub n_indeterminate: usize,
    /// Candidate points drawn by the sampler.
    pub n_drawn: usize,
    /// Candidates discarded before checking (outside the domain or inside the real-axis tube).
    pub n_excluded: usize,
    pub method: Method,
    pub tolerance: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub subject: String,
    pub axial_form_reading: String,
    pub records: Vec<PointRecord>,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

struct Tally {
    regular: usize,
    not: usize,
    indeterminate: usize,
}

fn tally(records: &[PointRecord]) -> Tally {
    let count = |v| records.iter().filter(|r| r.verdict == v).count();
    Tally {
        regular: count(Verdict::Regular),
        not: count(Verdict::NotRegular),
        indeterminate: count(Verdict::Indeterminate),
    }
}

impl CheckReport {
    pub fn for_region(
        subject: &str,
        check: &RegionCheck,
        region: Region,
        seed: u64,
        method: Method,
        tol: Tolerances,
    ) -> Self {
        let records: Vec<_> = check
            .samples
            .iter()
            .map(|s| PointRecord::from_outcome(s, None))
            .collect();
        let t = tally(&records);
        let mut warnings = Vec::new();
        if t.indeterminate > 0 {
            warnings.push(format!(
                "{} point(s) within rho < {:e} of the real axis were not judged",
                t.indeterminate, tol.eps_rho
            ));
        }
        CheckReport {
            schema: SCHEMA_VERSION,
            subject: subject.to_string(),
            axial_form_reading: AXIAL_FORM_READING.to_string(),
            summary: Summary {
                n_checked: records.len(),
                n_regular: t.regular,
                n_not: t.not,
                n_indeterminate: t.indeterminate,
                n_drawn: check.draws,
                n_excluded: check.draws - records.len(),
                method,
                tolerance: match method {
                    Method::Jet => tol.jet,
                    Method::FiniteDifference => tol.fd,
                },
                tolerances: tol,
                seed,
                region: Some(region),
            },
            records,
            warnings,
        }
    }

    pub fn for_atlas(report: &AtlasReport, seed: u64, tol: Tolerances) -> Self {
        let mut records = Vec::new();
        let (mut drawn, mut excluded) = (0, 0);
        let mut warnings = report.warnings.clone();
        for t in &report.transitions {
            let label = t.label();
            records.extend(
                t.samples
                    .iter()
                    .map(|s| PointRecord::from_outcome(s, Some(label.clone()))),
            );
            drawn += t.draws;
            excluded += t.excluded;
            if t.excluded > 0 {
                warnings.push(format!(
                    "{label}: excluded {} of {} draws ({:.3e}) inside the real-axis tube",
                    t.excluded,
                    t.draws,
                    t.excluded_fraction()
                ));
            }
        }
        let t = tally(&records);
        CheckReport {
            schema: SCHEMA_VERSION,
            subject: format!(
                "atlas {} ({} chart(s), {} transition(s))",
                report.atlas,
                report.n_charts,
                report.transitions.len()
            ),
            axial_form_reading: AXIAL_FORM_READING.to_string(),
            summary: Summary {
                n_checked: records.len(),
                n_regular: t.regular,
                n_not: t.not,
                n_indeterminate: t.indeterminate,
                n_drawn: drawn,
                n_excluded: excluded,
                method: Method::FiniteDifference,
                tolerance: tol.fd,
                tolerances: tol,
                seed,
                region: None,
            },
            records,
            warnings,
        }
    }

    /// True when no judged point failed.
    pub fn passed(&self) -> bool {
        self.summary.n_not == 0
    }

    /// The summary counts agree with the records.
    pub fn is_consistent(&self) -> bool {
        let t = tally(&self.records);
        self.summary.n_checked == self.records.len()
            && self.summary.n_regular == t.regular
            && self.summary.n_not == t.not
            && self.summary.n_indeterminate == t.indeterminate
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "subject: {}", self.subject);
        let _ = writeln!(out, "axial form: {}", self.axial_form_reading);
        let method = match s.method {
            Method::Jet => "jet",
            Method::FiniteDifference => "finite-difference",
        };
        let _ = writeln!(
            out,
            "method: {method}, tolerance {:e}, seed {}",
            s.tolerance, s.seed
        );
        if let Some(r) = &s.region {
            let _ = writeln!(out, "region: {}", format_region(r));
        }
        let _ = writeln!(
            out,
            "checked {}: {} regular, {} not regular, {} indeterminate ({} of {} draws excluded)",
            s.n_checked, s.n_regular, s.n_not, s.n_indeterminate, s.n_excluded, s.n_drawn
        );
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for r in self
            .records
            .iter()
            .filter(|r| r.verdict == Verdict::NotRegular)
            .take(10)
        {
            let at = r
                .transition
                .as_deref()
                .map(|t| format!(" [{t}]"))
                .unwrap_or_default();
            let why = match (&r.error, &r.detail) {
                (Some(e), _) => e.clone(),
                (None, Some(d)) => format!(
                    "max residual {:.3e}, structural {:.3e}, fueter left {} right {} expected {}",
                    d.residual_max,
                    d.structural_residual,
                    d.fueter_left,
                    d.fueter_right,
                    d.expected_fueter
                ),
                (None, None) => "no measurement".into(),
            };
            let _ = writeln!(
                out,
                "  not regular at #{}{at} {:?}: {why}",
                r.index, r.point
            );
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn format_region(r: &Region) -> String {
    (0..4)
        .map(|k| format!("q{}={}:{}", k + 1, r.lo[k], r.hi[k]))
        .collect::<Vec<_>>()
        .join(",")
}
