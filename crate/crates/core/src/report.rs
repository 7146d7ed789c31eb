//! Check records and their CSV serialization.

use std::fmt::Write as _;

use crate::monocalc::ExtReal;

/// Relative slack granted to exact inequalities for rounding error.
pub const PASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `lhs ≤ rhs`
    Le,
    /// `lhs ≥ rhs`
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Hypotheses not met; recorded but not evaluated.
    Vacuous,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "true",
            Status::Fail => "false",
            Status::Vacuous => "vacuous",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub instance: String,
    pub state: String,
    pub check: String,
    pub param: String,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    /// `rhs − lhs` for `≤` checks, `lhs − rhs` for `≥` checks.
    pub margin: f64,
    pub status: Status,
    /// Whether a failure contradicts a proven inequality (as opposed to an
    /// informational comparison whose hypotheses may legitimately fail).
    pub backed: bool,
    /// Which density and minorant fed the check.
    pub provenance: String,
}

impl CheckRecord {
    pub fn compare(check: impl Into<String>, lhs: ExtReal, rel: Relation, rhs: ExtReal) -> Self {
        let (lo, hi) = match rel {
            Relation::Le => (lhs, rhs),
            Relation::Ge => (rhs, lhs),
        };
        let margin = hi.to_f64() - lo.to_f64();
        let status = match (lo, hi) {
            (_, ExtReal::PosInf) => Status::Pass,
            (ExtReal::PosInf, ExtReal::Finite(_)) => Status::Fail,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                let scale = a.abs().max(b.abs());
                if b - a >= -PASS_TOLERANCE * scale {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
        };
        CheckRecord {
            instance: String::new(),
            state: String::new(),
            check: check.into(),
            param: String::new(),
            lhs,
            rhs,
            margin: if margin.is_nan() { 0.0 } else { margin },
            status,
            backed: true,
            provenance: String::new(),
        }
    }

    pub fn le(check: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::compare(check, ExtReal::Finite(lhs), Relation::Le, ExtReal::Finite(rhs))
    }

    pub fn ge(check: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::compare(check, ExtReal::Finite(lhs), Relation::Ge, ExtReal::Finite(rhs))
    }

    pub fn vacuous(check: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = Self::le(check, 0.0, 0.0);
        r.status = Status::Vacuous;
        r.provenance = reason.into();
        r
    }

    pub fn with_param(mut self, param: impl Into<String>) -> Self {
        self.param = param.into();
        self
    }

    pub fn informational(mut self) -> Self {
        self.backed = false;
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn at(mut self, instance: &str, state: &str) -> Self {
        self.instance = instance.to_string();
        self.state = state.to_string();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Aggregated check records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertificationReport {
    pub records: Vec<CheckRecord>,
    pub seed: u64,
}

impl CertificationReport {
    pub fn new(seed: u64) -> Self {
        CertificationReport { records: Vec::new(), seed }
    }

    /// True when some proven inequality failed.
    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.backed && r.status == Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.backed && r.status == Status::Fail)
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
    }

    /// Stable sort by `(instance, state, check)`.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| (&a.instance, &a.state, &a.check).cmp(&(&b.instance, &b.state, &b.check)));
    }

    /// Columns `instance,state,check,param,lhs,rhs,margin,pass,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,state,check,param,lhs,rhs,margin,pass,seed\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                csv_field(&r.instance),
                csv_field(&r.state),
                csv_field(&r.check),
                csv_field(&r.param),
                r.lhs,
                r.rhs,
                r.margin,
                r.status.as_str(),
                self.seed
            );
        }
        out
    }
}

/// Columns `check,lhs,rhs,margin,pass`.
pub fn records_to_csv(records: &[CheckRecord]) -> String {
    let mut out = String::from("check,lhs,rhs,margin,pass\n");
    for r in records {
        let name = if r.param.is_empty() { r.check.clone() } else { format!("{}[{}]", r.check, r.param) };
        let _ = writeln!(out, "{},{},{},{},{}", csv_field(&name), r.lhs, r.rhs, r.margin, r.status.as_str());
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
