//! Pure-strategy (epsilon-)Nash equilibrium solvers for structured games.
//!
//! Two routes: best-response dynamics (iterated per-agent minimization with
//! an epsilon acceptance rule on continuous spaces) and direct minimization
//! of the assembled potential function. Both return an [`NEResult`] carrying
//! a certificate of the equilibrium condition.

mod brd;
mod optimize;
mod potential_opt;

pub use brd::{best_response, best_response_dynamics};
pub use optimize::global_minimize;
pub use potential_opt::{check_nash, potential_optimization};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::StrategyProfile;

/// Default epsilon for continuous games, below the cost resolution induced
/// by the 0.5 s action discretization.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Budget and seed for the multi-start global optimizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Multi-start count.
    pub restarts: usize,
    pub population: usize,
    pub generations: usize,
    /// Differential weight applied to population difference vectors.
    pub mutation_scale: f64,
    pub seed: u64,
    /// Cap on exhaustive joint enumeration for finite spaces.
    pub enumeration_cap: u128,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            population: 24,
            generations: 40,
            mutation_scale: 0.6,
            seed: 0,
            enumeration_cap: 1_000_000,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid_argument("optimizer needs at least one restart"));
        }
        if self.population < 4 {
            return Err(Error::invalid_argument("population must be at least 4"));
        }
        if self.generations == 0 {
            return Err(Error::invalid_argument("need at least one generation"));
        }
        if !(self.mutation_scale.is_finite() && self.mutation_scale > 0.0) {
            return Err(Error::invalid_argument("mutation scale must be positive"));
        }
        Ok(())
    }
}

/// Configuration for best-response dynamics. Agents are always swept in
/// fixed index order.
#[derive(Debug, Clone)]
pub struct BRConfig {
    pub max_sweeps: usize,
    /// Acceptance threshold: a best response replaces the current strategy
    /// only if it improves by more than this. Zero for finite games; must be
    /// positive on continuous spaces.
    pub epsilon: f64,
    /// Budget for each agent's inner minimization (and for the sampled
    /// certificate on continuous spaces).
    pub inner: OptimizerConfig,
}

impl BRConfig {
    /// Exact best responses on finite menus.
    pub fn finite() -> Self {
        Self { max_sweeps: 50, epsilon: 0.0, inner: OptimizerConfig::default() }
    }

    /// Epsilon-update rule with a 3-start inner optimizer.
    pub fn continuous(seed: u64) -> Self {
        Self {
            max_sweeps: 50,
            epsilon: DEFAULT_EPSILON,
            inner: OptimizerConfig { restarts: 3, seed, ..OptimizerConfig::default() },
        }
    }

    pub fn validate(&self, continuous_spaces: bool) -> Result<()> {
        if self.max_sweeps == 0 {
            return Err(Error::invalid_argument("need at least one sweep"));
        }
        if self.epsilon < 0.0 {
            return Err(Error::invalid_argument("epsilon must be nonnegative"));
        }
        if continuous_spaces && self.epsilon == 0.0 {
            return Err(Error::invalid_argument(
                "continuous spaces require a positive epsilon",
            ));
        }
        self.inner.validate()
    }
}

/// How a certificate was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMethod {
    /// Every alternative enumerated; only valid on finite spaces.
    Exhaustive,
    /// Per-agent multi-start search against the fixed others; heuristic.
    SampledMultistart,
}

/// Best alternative found for one agent at the certified profile.
#[derive(Debug, Clone)]
pub struct AgentDeviation {
    pub agent: usize,
    pub best_alternative: Vec<f64>,
    /// Current cost minus the best alternative's cost; positive means the
    /// agent could improve by deviating.
    pub improvement: f64,
}

/// Per-agent evidence that no unilateral deviation improves by more than
/// epsilon.
#[derive(Debug, Clone)]
pub struct NECertificate {
    pub method: CertificateMethod,
    pub epsilon: f64,
    pub passed: bool,
    pub deviations: Vec<AgentDeviation>,
}

impl NECertificate {
    /// The deviation with the largest improvement, if any agent has one.
    pub fn worst(&self) -> Option<&AgentDeviation> {
        self.deviations
            .iter()
            .max_by(|a, b| a.improvement.total_cmp(&b.improvement))
    }

    /// First agent whose improvement exceeds epsilon.
    pub fn failing_agent(&self) -> Option<usize> {
        self.deviations
            .iter()
            .find(|d| d.improvement > self.epsilon)
            .map(|d| d.agent)
    }
}

/// Outcome of a solver run.
#[derive(Debug, Clone)]
pub struct NEResult {
    pub profile: StrategyProfile,
    /// True only when the solver reached its fixed point or optimum and the
    /// certificate passes at the configured epsilon.
    pub converged: bool,
    pub sweeps_used: usize,
    pub potential_value: Option<f64>,
    pub certificate: NECertificate,
    /// Wall-clock solve time in seconds.
    pub wall_time: f64,
    /// Potential value after each accepted update (best-response dynamics)
    /// or the single final value (potential optimization).
    pub potential_trace: Vec<f64>,
}
