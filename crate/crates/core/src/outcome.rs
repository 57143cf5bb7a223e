use serde::Serialize;

/// Which feasibility condition rejected an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibilityReason {
    /// Recursion denominator for a user other than the strongest was not positive.
    UserCondition,
    /// `γ_K - φ 2^Q` was not positive.
    LastUserCondition,
    /// Some `γ_k <= φ`: no positive confidential rate is possible.
    PositiveRateCondition,
    /// A TDMA slot cannot meet its rate at any power.
    TdmaSlotCondition,
}

/// Typed infeasibility: the failing users (0-based decoding positions) and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfeasibleVerdict {
    pub failing_users: Vec<usize>,
    pub reason: InfeasibilityReason,
}

impl InfeasibleVerdict {
    pub(crate) fn new(failing_users: Vec<usize>, reason: InfeasibilityReason) -> Self {
        debug_assert!(!failing_users.is_empty());
        Self { failing_users, reason }
    }
}

/// Result of a solver: a solution or an infeasibility verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcome<S> {
    Feasible(S),
    Infeasible(InfeasibleVerdict),
}

impl<S> SolveOutcome<S> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    pub fn feasible(self) -> Option<S> {
        match self {
            SolveOutcome::Feasible(s) => Some(s),
            SolveOutcome::Infeasible(_) => None,
        }
    }

    pub fn as_feasible(&self) -> Option<&S> {
        match self {
            SolveOutcome::Feasible(s) => Some(s),
            SolveOutcome::Infeasible(_) => None,
        }
    }

    pub fn verdict(&self) -> Option<&InfeasibleVerdict> {
        match self {
            SolveOutcome::Feasible(_) => None,
            SolveOutcome::Infeasible(v) => Some(v),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(S) -> U) -> SolveOutcome<U> {
        match self {
            SolveOutcome::Feasible(s) => SolveOutcome::Feasible(f(s)),
            SolveOutcome::Infeasible(v) => SolveOutcome::Infeasible(v),
        }
    }
}
