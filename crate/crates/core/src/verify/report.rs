use serde::Serialize;

use crate::exactcalc::{Coeff, Exponent};
use crate::statespace::{PbwModule, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSpan {
    pub var: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualTerm {
    pub exps: Vec<String>,
    pub label: String,
    pub scalar: String,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub window: Vec<WindowSpan>,
    pub residuals: Vec<ResidualTerm>,
    /// Number of coefficients compared.
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Stored residual terms per report.
pub const MAX_RESIDUALS: usize = 64;

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            status: Status::Pass,
            window: Vec::new(),
            residuals: Vec::new(),
            checked: 0,
            notes: Vec::new(),
        }
    }

    pub fn with_window(mut self, var: &str, lo: &Exponent, hi: &Exponent) -> Self {
        self.window.push(WindowSpan { var: var.into(), lo: lo.to_string(), hi: hi.to_string() });
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Records a residual vector at the given exponents.
    pub fn record<C: Coeff>(&mut self, exps: &[Exponent], v: &Vector<C>, module: &PbwModule<C>) {
        self.checked += 1;
        if v.is_zero() {
            return;
        }
        self.status = Status::Fail;
        let mut terms: Vec<(String, String)> = v.iter().map(|(id, c)| (module.label(id), c.to_string())).collect();
        terms.sort();
        for (label, scalar) in terms {
            if self.residuals.len() >= MAX_RESIDUALS {
                return;
            }
            self.residuals.push(ResidualTerm { exps: exps.iter().map(|e| e.to_string()).collect(), label, scalar });
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.status = Status::Fail;
        self.notes.push(why.into());
    }

    /// Marks the report inconclusive when the window is narrower than
    /// `min_width` or nothing was compared.
    pub fn finish(mut self, width: &Exponent, min_width: &Exponent) -> Self {
        if (width < min_width || self.checked == 0) && self.status == Status::Pass {
            self.status = Status::Inconclusive;
            self.notes.push(format!("window width {} below the required {}", width, min_width));
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
