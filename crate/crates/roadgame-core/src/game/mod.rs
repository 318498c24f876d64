//! Receding-horizon multi-player games with structured costs.
//!
//! A game's per-agent cumulative cost is a weighted sum of *self* terms
//! (functions of the agent's own strategy only) and *pairwise* terms shared
//! with one other agent. That structure is what guarantees an exact
//! potential function; see [`potential`].

pub(crate) mod potential;

pub use potential::{
    assemble_potential, verify_continuous_potential, verify_finite_potential,
    ContinuousPotentialReport, FinitePotentialReport, PotentialFunction, SymmetryCheck,
    ENUMERATION_CAP, EXACT_IDENTITY_TOL,
};

use std::sync::Arc;

use crate::error::{Error, Result};

/// Evaluator for a self term: maps the owner's strategy to a cost.
pub type SelfEval = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Evaluator for a pairwise term: maps two agents' strategies to a cost.
/// Argument order is fixed per term (see [`CostTerm::PairCost`]).
pub type PairEval = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Per-agent finite strategy menus. Each candidate strategy is a flat
/// parameter vector; under the constant-action simplification it is the
/// single action repeated over the horizon.
#[derive(Clone)]
pub struct FiniteStrategySpace {
    candidates: Vec<Vec<Vec<f64>>>,
}

impl FiniteStrategySpace {
    pub fn new(candidates: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid_argument("no agents in strategy space"));
        }
        for (agent, menu) in candidates.iter().enumerate() {
            if menu.is_empty() {
                return Err(Error::invalid_argument(format!(
                    "agent {agent} has an empty strategy menu"
                )));
            }
            let dim = menu[0].len();
            if dim == 0 {
                return Err(Error::invalid_argument(format!(
                    "agent {agent} has zero-dimensional strategies"
                )));
            }
            for cand in menu {
                if cand.len() != dim {
                    return Err(Error::invalid_argument(format!(
                        "agent {agent} has strategies of mixed dimension"
                    )));
                }
            }
            for a in 0..menu.len() {
                for b in a + 1..menu.len() {
                    if menu[a] == menu[b] {
                        return Err(Error::invalid_argument(format!(
                            "agent {agent} has duplicate strategies at {a} and {b}"
                        )));
                    }
                }
            }
        }
        Ok(Self { candidates })
    }

    pub fn n_agents(&self) -> usize {
        self.candidates.len()
    }

    pub fn count(&self, agent: usize) -> usize {
        self.candidates[agent].len()
    }

    pub fn candidate(&self, agent: usize, index: usize) -> &[f64] {
        &self.candidates[agent][index]
    }

    pub fn candidates(&self, agent: usize) -> &[Vec<f64>] {
        &self.candidates[agent]
    }

    pub fn dim(&self, agent: usize) -> usize {
        self.candidates[agent][0].len()
    }

    /// Number of joint strategy profiles.
    pub fn total_profiles(&self) -> u128 {
        self.candidates.iter().map(|m| m.len() as u128).product()
    }

    pub fn profile_from_indices(&self, indices: &[usize], planned_at: f64) -> StrategyProfile {
        let strategies = indices
            .iter()
            .enumerate()
            .map(|(agent, &idx)| self.candidates[agent][idx].clone())
            .collect();
        StrategyProfile::new(strategies, planned_at)
    }
}

/// Per-agent axis-aligned boxes of strategy parameters.
#[derive(Clone, Debug)]
pub struct ContinuousStrategySpace {
    lower: Vec<Vec<f64>>,
    upper: Vec<Vec<f64>>,
}

impl ContinuousStrategySpace {
    pub fn new(lower: Vec<Vec<f64>>, upper: Vec<Vec<f64>>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid_argument("empty or mismatched bound lists"));
        }
        for (agent, (lo, hi)) in lower.iter().zip(upper.iter()).enumerate() {
            if lo.is_empty() || lo.len() != hi.len() {
                return Err(Error::invalid_argument(format!(
                    "agent {agent} has empty or mismatched bounds"
                )));
            }
            for (a, b) in lo.iter().zip(hi.iter()) {
                if !(a.is_finite() && b.is_finite() && a <= b) {
                    return Err(Error::invalid_argument(format!(
                        "agent {agent} bounds must be finite with lower <= upper"
                    )));
                }
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn n_agents(&self) -> usize {
        self.lower.len()
    }

    pub fn dim(&self, agent: usize) -> usize {
        self.lower[agent].len()
    }

    pub fn bounds(&self, agent: usize) -> (&[f64], &[f64]) {
        (&self.lower[agent], &self.upper[agent])
    }
}

/// Strategy spaces of a game; every agent's space has the same kind.
#[derive(Clone)]
pub enum StrategySpaces {
    Finite(FiniteStrategySpace),
    Continuous(ContinuousStrategySpace),
}

impl StrategySpaces {
    pub fn n_agents(&self) -> usize {
        match self {
            StrategySpaces::Finite(s) => s.n_agents(),
            StrategySpaces::Continuous(s) => s.n_agents(),
        }
    }

    pub fn dim(&self, agent: usize) -> usize {
        match self {
            StrategySpaces::Finite(s) => s.dim(agent),
            StrategySpaces::Continuous(s) => s.dim(agent),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, StrategySpaces::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteStrategySpace> {
        match self {
            StrategySpaces::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousStrategySpace> {
        match self {
            StrategySpaces::Continuous(s) => Some(s),
            _ => None,
        }
    }
}

/// One strategy per agent, plus the decision time it was planned at.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile {
    strategies: Vec<Vec<f64>>,
    planned_at: f64,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Vec<f64>>, planned_at: f64) -> Self {
        Self { strategies, planned_at }
    }

    pub fn n_agents(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy(&self, agent: usize) -> &[f64] {
        &self.strategies[agent]
    }

    pub fn set_strategy(&mut self, agent: usize, strategy: Vec<f64>) {
        self.strategies[agent] = strategy;
    }

    /// Overwrites one strategy in place, reusing the existing allocation.
    pub fn copy_strategy_into(&mut self, agent: usize, strategy: &[f64]) {
        self.strategies[agent].clear();
        self.strategies[agent].extend_from_slice(strategy);
    }

    pub fn strategies(&self) -> &[Vec<f64>] {
        &self.strategies
    }

    pub fn planned_at(&self) -> f64 {
        self.planned_at
    }
}

/// One term of an agent's cumulative cost.
///
/// The weight houses both the global self/pair weights of the potential
/// template and any per-term tuning parameter.
#[derive(Clone)]
pub enum CostTerm {
    /// Depends only on the owner's strategy.
    SelfCost { weight: f64, eval: Arc<SelfEval> },
    /// Shared with `partner`. The evaluator's argument order is fixed at
    /// construction: `owner_first` says whether the owner's strategy is the
    /// first argument. Symmetric installation puts the same evaluator (same
    /// allocation) in both agents' lists with opposite flags, so both agents
    /// are charged the identical value at any joint profile.
    PairCost {
        partner: usize,
        weight: f64,
        eval: Arc<PairEval>,
        owner_first: bool,
    },
}

impl CostTerm {
    fn weight(&self) -> f64 {
        match self {
            CostTerm::SelfCost { weight, .. } => *weight,
            CostTerm::PairCost { weight, .. } => *weight,
        }
    }
}

/// A receding-horizon multi-player game with structured costs.
///
/// Immutable after construction; evaluation is pure, so a game can be shared
/// freely across threads.
pub struct StructuredGame {
    spaces: StrategySpaces,
    terms: Vec<Vec<CostTerm>>,
    global_state: Vec<f64>,
    horizon: usize,
    dt: f64,
}

impl StructuredGame {
    /// Raw constructor from per-agent term lists. Performs structural checks
    /// only; cross-list pairwise consistency is checked by
    /// [`assemble_potential`]'s symmetry sampling.
    pub fn from_agent_terms(
        spaces: StrategySpaces,
        terms: Vec<Vec<CostTerm>>,
        global_state: Vec<f64>,
        horizon: usize,
        dt: f64,
    ) -> Result<Self> {
        let n = spaces.n_agents();
        if n == 0 {
            return Err(Error::invalid_argument("game needs at least one agent"));
        }
        if terms.len() != n {
            return Err(Error::invalid_argument(format!(
                "expected {n} term lists, got {}",
                terms.len()
            )));
        }
        for (agent, list) in terms.iter().enumerate() {
            for term in list {
                if !term.weight().is_finite() {
                    return Err(Error::invalid_argument(format!(
                        "agent {agent} has a term with non-finite weight"
                    )));
                }
                if let CostTerm::PairCost { partner, .. } = term {
                    if *partner >= n || *partner == agent {
                        return Err(Error::invalid_argument(format!(
                            "agent {agent} has a pairwise term with invalid partner {partner}"
                        )));
                    }
                }
            }
        }
        Ok(Self { spaces, terms, global_state, horizon, dt })
    }

    pub fn builder(spaces: StrategySpaces, horizon: usize, dt: f64) -> GameBuilder {
        GameBuilder::new(spaces, horizon, dt)
    }

    pub fn n_agents(&self) -> usize {
        self.spaces.n_agents()
    }

    pub fn spaces(&self) -> &StrategySpaces {
        &self.spaces
    }

    pub fn terms(&self, agent: usize) -> &[CostTerm] {
        &self.terms[agent]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Snapshot of the global state the cost evaluators were built from.
    pub fn global_state(&self) -> &[f64] {
        &self.global_state
    }

    /// Checks that a profile matches the game's agent count and per-agent
    /// strategy dimensions.
    pub fn validate_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.n_agents() != self.n_agents() {
            return Err(Error::invalid_argument(format!(
                "profile has {} strategies for a {}-agent game",
                profile.n_agents(),
                self.n_agents()
            )));
        }
        for agent in 0..self.n_agents() {
            let got = profile.strategy(agent).len();
            let want = self.spaces.dim(agent);
            if got != want {
                return Err(Error::invalid_argument(format!(
                    "agent {agent} strategy has dimension {got}, space has {want}"
                )));
            }
        }
        Ok(())
    }

    /// Cumulative cost of one agent at a joint profile.
    pub fn evaluate_cost(&self, agent: usize, profile: &StrategyProfile) -> Result<f64> {
        if agent >= self.n_agents() {
            return Err(Error::invalid_argument(format!("agent {agent} out of range")));
        }
        self.validate_profile(profile)?;
        Ok(self.cost_unchecked(agent, profile))
    }

    /// Cost evaluation without profile validation, for solver inner loops.
    pub(crate) fn cost_unchecked(&self, agent: usize, profile: &StrategyProfile) -> f64 {
        let own = profile.strategy(agent);
        let mut total = 0.0;
        for term in &self.terms[agent] {
            total += match term {
                CostTerm::SelfCost { weight, eval } => weight * eval(own),
                CostTerm::PairCost { partner, weight, eval, owner_first } => {
                    let other = profile.strategy(*partner);
                    let value = if *owner_first { eval(own, other) } else { eval(other, own) };
                    weight * value
                }
            };
        }
        total
    }

    /// Weighted self terms only, without any pairwise contribution.
    pub(crate) fn pair_free_cost(&self, agent: usize, profile: &StrategyProfile) -> f64 {
        let own = profile.strategy(agent);
        self.terms[agent]
            .iter()
            .filter_map(|term| match term {
                CostTerm::SelfCost { weight, eval } => Some(weight * eval(own)),
                CostTerm::PairCost { .. } => None,
            })
            .sum()
    }

    /// Sum of the weighted pairwise terms agent `owner` holds against
    /// `partner`, evaluated at the given strategies.
    pub(crate) fn pair_value(
        &self,
        owner: usize,
        partner: usize,
        own: &[f64],
        other: &[f64],
    ) -> f64 {
        let mut total = 0.0;
        for term in &self.terms[owner] {
            if let CostTerm::PairCost { partner: p, weight, eval, owner_first } = term {
                if *p == partner {
                    let value = if *owner_first { eval(own, other) } else { eval(other, own) };
                    total += weight * value;
                }
            }
        }
        total
    }
}

/// Builder that installs symmetric pairwise terms into both agents' lists.
pub struct GameBuilder {
    spaces: StrategySpaces,
    terms: Vec<Vec<CostTerm>>,
    global_state: Vec<f64>,
    horizon: usize,
    dt: f64,
}

impl GameBuilder {
    pub fn new(spaces: StrategySpaces, horizon: usize, dt: f64) -> Self {
        let n = spaces.n_agents();
        Self { spaces, terms: vec![Vec::new(); n], global_state: Vec::new(), horizon, dt }
    }

    pub fn global_state(mut self, state: Vec<f64>) -> Self {
        self.global_state = state;
        self
    }

    pub fn self_cost<F>(mut self, agent: usize, weight: f64, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.terms[agent].push(CostTerm::SelfCost { weight, eval: Arc::new(eval) });
        self
    }

    /// Installs one shared evaluator for the unordered pair `{i, j}`. The
    /// evaluator is always called as `eval(u_i, u_j)`; both agents are
    /// charged the same weighted value.
    pub fn symmetric_pair_cost<F>(mut self, i: usize, j: usize, weight: f64, eval: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        let eval: Arc<PairEval> = Arc::new(eval);
        self.terms[i].push(CostTerm::PairCost {
            partner: j,
            weight,
            eval: Arc::clone(&eval),
            owner_first: true,
        });
        self.terms[j].push(CostTerm::PairCost { partner: i, weight, eval, owner_first: false });
        self
    }

    pub fn build(self) -> Result<StructuredGame> {
        StructuredGame::from_agent_terms(
            self.spaces,
            self.terms,
            self.global_state,
            self.horizon,
            self.dt,
        )
    }
}
