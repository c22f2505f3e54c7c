//! Shared vocabulary for the budgeted searches and certificate verifiers.

use std::fmt;

/// Default node budget used by the CLI.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Result of a budgeted exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<T> {
    /// A witness was found.
    Found(T),
    /// The whole search space was exhausted without finding a witness.
    Refuted,
    /// The node budget ran out before the search could decide.
    BudgetExceeded,
}

impl<T> Outcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Outcome::Refuted)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::Refuted => Outcome::Refuted,
            Outcome::BudgetExceeded => Outcome::BudgetExceeded,
        }
    }
}

/// Marker error raised when a [`Budget`] runs dry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted;

/// Counts search-tree nodes against a fixed limit.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    /// Charges one node.
    pub fn spend(&mut self) -> Result<(), Exhausted> {
        if self.used >= self.limit {
            return Err(Exhausted);
        }
        self.used += 1;
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Answer of a certificate verifier.
///
/// `index` is 1-based and points at the first offending item of the
/// certificate (facet position, collapse step, saturation edge). A value one
/// past the end refers to a check made after the last item, such as
/// comparing the final complex against the declared target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { index: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }

    pub(crate) fn reject(index: usize, reason: impl Into<String>) -> Self {
        Verdict::Rejected {
            index,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => write!(f, "accepted"),
            Verdict::Rejected { index, reason } => write!(f, "rejected at {index}: {reason}"),
        }
    }
}
