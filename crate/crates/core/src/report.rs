//! Law reports: named pass/fail entries with counterexample witnesses.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A counterexample: the element indices involved and a readable rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub rendering: String,
}

impl Witness {
    pub fn new(indices: impl Into<Vec<usize>>, rendering: impl Into<String>) -> Self {
        Witness { indices: indices.into(), rendering: rendering.into() }
    }

    pub fn text(rendering: impl Into<String>) -> Self {
        Witness { indices: Vec::new(), rendering: rendering.into() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            write!(f, "{}", self.rendering)
        } else {
            write!(f, "{} at {:?}", self.rendering, self.indices)
        }
    }
}

/// Outcome of checking one law over a family of cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law: String,
    pub holds: bool,
    /// Number of cases examined before stopping.
    pub cases: u64,
    pub witness: Option<Witness>,
}

impl LawCheck {
    pub fn pass(law: impl Into<String>, cases: u64) -> Self {
        LawCheck { law: law.into(), holds: true, cases, witness: None }
    }

    pub fn fail(law: impl Into<String>, cases: u64, witness: Witness) -> Self {
        LawCheck { law: law.into(), holds: false, cases, witness: Some(witness) }
    }

    pub fn from_bool(law: impl Into<String>, holds: bool, witness: impl FnOnce() -> Witness) -> Self {
        if holds {
            LawCheck::pass(law, 1)
        } else {
            LawCheck::fail(law, 1, witness())
        }
    }

    /// Checks `holds` on every case, stopping at the first counterexample.
    pub fn over<T>(
        law: impl Into<String>,
        cases: impl IntoIterator<Item = T>,
        mut holds: impl FnMut(&T) -> bool,
        render: impl FnOnce(&T) -> Witness,
    ) -> Self {
        let mut seen = 0u64;
        for case in cases {
            seen += 1;
            if !holds(&case) {
                return LawCheck::fail(law, seen, render(&case));
            }
        }
        LawCheck::pass(law, seen)
    }

    pub fn renamed(mut self, law: impl Into<String>) -> Self {
        self.law = law.into();
        self
    }
}

impl fmt::Display for LawCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} ({} cases)", self.law, self.cases)?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

/// An ordered list of law checks about one subject.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub subject: String,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new(subject: impl Into<String>) -> Self {
        LawReport { subject: subject.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: LawCheck) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn extend(&mut self, other: LawReport) -> &mut Self {
        self.checks.extend(other.checks);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.failures().next()
    }

    pub fn get(&self, law: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }

    /// Whether the named law is present and holds.
    pub fn holds(&self, law: &str) -> bool {
        self.get(law).is_some_and(|c| c.holds)
    }

    pub fn witness(&self) -> Option<Witness> {
        self.first_failure().and_then(|c| c.witness.clone())
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {}", self.subject)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}
