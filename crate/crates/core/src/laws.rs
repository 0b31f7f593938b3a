//! Law reports shared by the monad, design-problem and parametrized-cell suites.

use std::fmt;

use serde::Serialize;

/// One law evaluated on a batch of instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub instances: usize,
    pub passed: bool,
    /// First failing instance, rendered.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn new(suite: impl Into<String>) -> LawReport {
        LawReport {
            suite: suite.into(),
            outcomes: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, law: &str) -> Option<&LawOutcome> {
        self.outcomes.iter().find(|o| o.law == law)
    }

    /// Starts a law; record instances on the returned tracker.
    pub fn law(&mut self, name: &str) -> &mut LawOutcome {
        self.outcomes.push(LawOutcome {
            law: name.to_string(),
            instances: 0,
            passed: true,
            witness: None,
        });
        self.outcomes.last_mut().expect("just pushed")
    }
}

impl LawOutcome {
    /// Records one instance; keeps the first witness on failure.
    pub fn record(&mut self, holds: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !holds && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            write!(
                f,
                "{:<6} {}/{} ({} instances)",
                if o.passed { "PASS" } else { "FAIL" },
                self.suite,
                o.law,
                o.instances
            )?;
            if let Some(w) = &o.witness {
                write!(f, "  witness: {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
