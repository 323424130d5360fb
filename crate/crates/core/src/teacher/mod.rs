//! Demonstration synthesis and teaching sessions.

mod bounds;
mod costs;
mod demo;
pub mod ip;
pub mod lp;
mod oracle;
pub(crate) mod residual;
mod session;
mod setcover;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semantics::MalformedDemonstration;

pub use bounds::{
    teachability_checks, theorem1_lower_bound, ImplicationCheck, LengthCheck, TeachabilityReport,
};
pub use costs::{cost_metrics, teaching_complexity, worst_case_costs, Complexity, WorstCase};
pub use demo::{
    compute_demonstration, esmt_step, randomized_step, shortest_demonstration, DemoCache,
    DemoChoice, DemoRequest,
};
pub use ip::{build_ip, inject_constraints, solve_ip, IpError, IpInstance, IpSolution, SolveError};
pub use oracle::{BoundaryOracle, Oracle};
pub use session::{
    esmt_teach, positive_only_teach, randomized_greedy_teach, teach, tlip_teach, Method,
    StepRecord, TeachSetup, TeachingTranscript,
};
pub use setcover::{enumerate_pool, optimal_teach_setcover, SetCoverError, SetCoverSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    /// Number of demonstrations: maximize eliminations per demonstration.
    AN,
    /// Summed lengths: maximize eliminations per time step.
    AL,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            node_limit: 200_000_000,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeacherConfig {
    pub objective: Objective,
    pub adaptive: bool,
    /// False when an oracle supplies intermediate targets.
    pub myopic: bool,
    pub positive_only: bool,
    pub max_len: usize,
    pub budget: Budget,
    /// Safety cap on the number of demonstrations; defaults to `10 |Phi|`.
    pub max_iterations: Option<usize>,
}

impl TeacherConfig {
    pub fn new(objective: Objective, max_len: usize) -> Self {
        TeacherConfig {
            objective,
            adaptive: true,
            myopic: true,
            positive_only: false,
            max_len,
            budget: Budget::default(),
            max_iterations: None,
        }
    }

    pub fn adaptive(mut self, on: bool) -> Self {
        self.adaptive = on;
        self
    }

    pub fn positive_only(mut self, on: bool) -> Self {
        self.positive_only = on;
        self
    }

    pub fn myopic(mut self, on: bool) -> Self {
        self.myopic = on;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TeachError {
    #[error("the initial hypothesis is already the target")]
    InitialIsTarget,
    #[error("nothing left to teach: the preferred set holds only the target")]
    NothingToTeach,
    #[error("no demonstration of length <= {max_len} eliminates any of the {remaining} preferred hypotheses")]
    NoProgress { remaining: usize, max_len: usize },
    #[error("iteration cap of {cap} demonstrations reached")]
    IterationCap { cap: usize },
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Malformed(#[from] MalformedDemonstration),
    #[error("teacher invariant violated: {0}")]
    Invariant(String),
    #[error("oracle requires {0}")]
    Oracle(String),
}
