//! Pass/fail records shared by the numerical checks.

use serde::Serialize;

/// One inequality `lhs ≤ rhs` checked at many points, summarized at the
/// worst one. `slack` is the relative margin `(rhs - lhs) / |rhs|` there;
/// it is negative when the inequality is violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub worst_point: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Relative margin with a guard for vanishing right-hand sides.
pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    let d = rhs - lhs;
    let scale = rhs.abs().max(lhs.abs());
    if scale == 0.0 {
        0.0
    } else if rhs.abs() > 0.0 {
        d / rhs.abs()
    } else {
        d / scale
    }
}

impl CheckReport {
    /// Check `lhs_i ≤ rhs_i` at every point, allowing `-allowed` relative slack.
    pub fn from_samples<I>(check: &str, samples: I, allowed: f64) -> Self
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let mut worst: Option<(f64, f64, f64, f64)> = None;
        for (x, lhs, rhs) in samples {
            let m = if lhs.is_nan() || rhs.is_nan() {
                f64::NEG_INFINITY
            } else {
                relative_margin(lhs, rhs)
            };
            if worst.map_or(true, |w| m < w.3) {
                worst = Some((x, lhs, rhs, m));
            }
        }
        match worst {
            Some((x, lhs, rhs, m)) => CheckReport {
                check: check.to_string(),
                passed: m >= -allowed,
                lhs,
                rhs,
                slack: m,
                worst_point: x,
                note: None,
            },
            None => Self::skipped(check, "no sample points"),
        }
    }

    /// A check that was not applicable; counts as passed.
    pub fn skipped(check: &str, why: &str) -> Self {
        CheckReport {
            check: check.to_string(),
            passed: true,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            worst_point: f64::NAN,
            note: Some(format!("skipped: {why}")),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
