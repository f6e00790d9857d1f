use std::fmt;

/// Outcome of one checked inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// the inequality holds for trivial reasons (e.g. a bound of at least 1
    /// on a measure)
    Vacuous,
    /// a hypothesis gating the inequality was not met; nothing is asserted
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "FAIL"),
            CheckStatus::Vacuous => write!(f, "vacuous"),
            CheckStatus::Skipped => write!(f, "skipped"),
        }
    }
}

/// One inequality with both sides evaluated.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub status: CheckStatus,
    pub note: Option<String>,
}

impl Check {
    /// lhs <= rhs, asserted.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check {
            name: name.into(),
            lhs,
            rhs,
            status: if lhs <= rhs {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    /// lhs >= rhs, asserted.
    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check {
            name: name.into(),
            lhs,
            rhs,
            status: if lhs >= rhs {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    pub fn bool(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            lhs: if ok { 1.0 } else { 0.0 },
            rhs: 1.0,
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            status: CheckStatus::Skipped,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }

    /// Mark a passing measure bound as vacuous when its right side already
    /// exceeds the trivial ceiling.
    pub fn vacuous_above(mut self, ceiling: f64) -> Check {
        if self.status == CheckStatus::Pass && self.rhs >= ceiling {
            self.status = CheckStatus::Vacuous;
        }
        self
    }

    pub fn ok(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} status={} lhs={} rhs={}",
            self.name, self.status, self.lhs, self.rhs
        )?;
        if let Some(note) = &self.note {
            write!(f, " note=\"{note}\"")?;
        }
        Ok(())
    }
}

/// A list of checks plus free-form flags raised along the way.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub flags: Vec<String>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.flags.extend(other.flags);
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for flag in &self.flags {
            out.push_str(&format!("flag {flag}\n"));
        }
        for check in &self.checks {
            out.push_str(&format!("check {check}\n"));
        }
        out
    }
}
