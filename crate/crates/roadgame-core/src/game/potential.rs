//! Potential-function assembly and verification.
//!
//! For structured costs `V_i = sum(self terms) + sum(pair terms)` with each
//! pairwise term charged equally to both agents, the function
//! `F = sum_i self_i + sum_{i, j<i} pair_ij` (each pair counted once) is an
//! exact potential: every unilateral deviation changes `V_i` and `F` by the
//! same amount. The verifiers below check that identity exhaustively on
//! finite spaces and via finite-difference gradients on continuous ones.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{
    CostTerm, PairEval, SelfEval, StrategyProfile, StrategySpaces, StructuredGame,
};

/// Default tolerance for exact (algebraic) identities in double precision.
pub const EXACT_IDENTITY_TOL: f64 = 1e-9;

/// Default cap on exhaustive joint-profile enumeration.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Options for the sampled pairwise-symmetry check run at assembly time.
#[derive(Debug, Clone)]
pub struct SymmetryCheck {
    /// Random strategy pairs sampled per agent pair.
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// On finite spaces, check every candidate pair instead of sampling.
    pub exhaustive: bool,
}

impl Default for SymmetryCheck {
    fn default() -> Self {
        Self { samples: 64, tolerance: EXACT_IDENTITY_TOL, seed: 0x5eed, exhaustive: false }
    }
}

/// The assembled potential: self parts plus once-counted pairwise parts.
pub struct PotentialFunction {
    n_agents: usize,
    self_parts: Vec<(usize, f64, Arc<SelfEval>)>,
    /// (owner, partner, weight, eval, owner_first) with partner < owner.
    pair_parts: Vec<(usize, usize, f64, Arc<PairEval>, bool)>,
}

impl std::fmt::Debug for PotentialFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialFunction")
            .field("n_agents", &self.n_agents)
            .field("self_parts", &self.self_parts.len())
            .field("pair_parts", &self.pair_parts.len())
            .finish()
    }
}


impl PotentialFunction {
    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Deterministic evaluation at a joint profile.
    pub fn value(&self, profile: &StrategyProfile) -> f64 {
        let mut total = 0.0;
        for (agent, weight, eval) in &self.self_parts {
            total += weight * eval(profile.strategy(*agent));
        }
        for (owner, partner, weight, eval, owner_first) in &self.pair_parts {
            let own = profile.strategy(*owner);
            let other = profile.strategy(*partner);
            let value = if *owner_first { eval(own, other) } else { eval(other, own) };
            total += weight * value;
        }
        total
    }

    /// Returns this potential with an extra self component bolted on.
    /// Useful for probing the verifiers with a known non-potential.
    pub fn with_additional_self_term<F>(mut self, agent: usize, weight: f64, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.self_parts.push((agent, weight, Arc::new(eval)));
        self
    }
}

/// Builds the potential for a structured game after checking that every
/// pairwise interaction is charged consistently to both its agents.
///
/// Fails with a construction-rejected error naming the offending pair if the
/// sampled (or exhaustive) cross-check finds a disagreement beyond tolerance.
pub fn assemble_potential(game: &StructuredGame, check: &SymmetryCheck) -> Result<PotentialFunction> {
    check_pairwise_symmetry(game, check)?;

    let n = game.n_agents();
    let mut self_parts = Vec::new();
    let mut pair_parts = Vec::new();
    for agent in 0..n {
        for term in game.terms(agent) {
            match term {
                CostTerm::SelfCost { weight, eval } => {
                    self_parts.push((agent, *weight, Arc::clone(eval)));
                }
                CostTerm::PairCost { partner, weight, eval, owner_first } => {
                    // count each pair once, from the higher-indexed owner
                    if *partner < agent {
                        pair_parts.push((agent, *partner, *weight, Arc::clone(eval), *owner_first));
                    }
                }
            }
        }
    }
    Ok(PotentialFunction { n_agents: n, self_parts, pair_parts })
}

/// Samples strategies for one agent, uniform over the menu or the box.
fn sample_strategy(spaces: &StrategySpaces, agent: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match spaces {
        StrategySpaces::Finite(s) => {
            let idx = rng.gen_range(0..s.count(agent));
            s.candidate(agent, idx).to_vec()
        }
        StrategySpaces::Continuous(s) => {
            let (lo, hi) = s.bounds(agent);
            lo.iter().zip(hi.iter()).map(|(&a, &b)| rng.gen_range(a..=b)).collect()
        }
    }
}

fn check_pairwise_symmetry(game: &StructuredGame, check: &SymmetryCheck) -> Result<()> {
    let n = game.n_agents();
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    for i in 0..n {
        for j in i + 1..n {
            let has_pair = game.terms(i).iter().any(|t| matches!(t, CostTerm::PairCost { partner, .. } if *partner == j))
                || game.terms(j).iter().any(|t| matches!(t, CostTerm::PairCost { partner, .. } if *partner == i));
            if !has_pair {
                continue;
            }
            let mut worst = 0.0f64;
            let mut check_at = |ui: &[f64], uj: &[f64]| {
                let from_i = game.pair_value(i, j, ui, uj);
                let from_j = game.pair_value(j, i, uj, ui);
                worst = worst.max((from_i - from_j).abs());
            };
            match (check.exhaustive, game.spaces().as_finite()) {
                (true, Some(space)) => {
                    for a in 0..space.count(i) {
                        for b in 0..space.count(j) {
                            check_at(space.candidate(i, a), space.candidate(j, b));
                        }
                    }
                }
                _ => {
                    for _ in 0..check.samples {
                        let ui = sample_strategy(game.spaces(), i, &mut rng);
                        let uj = sample_strategy(game.spaces(), j, &mut rng);
                        check_at(&ui, &uj);
                    }
                }
            }
            if !(worst <= check.tolerance) {
                return Err(Error::construction_rejected(format!(
                    "pairwise cost between agents {i} and {j} is asymmetric \
                     (worst disagreement {worst:.3e} beyond {:.1e})",
                    check.tolerance
                )));
            }
        }
    }
    Ok(())
}

/// Result of the exhaustive finite deviation check.
#[derive(Debug, Clone)]
pub struct FinitePotentialReport {
    pub holds: bool,
    /// Largest |delta V_i - delta F| over all unilateral deviations.
    pub worst_violation: f64,
    pub tolerance: f64,
    /// Joint profiles enumerated.
    pub profiles_checked: u128,
}

/// Tabulated values of one agent-indexed function over finite menus, for
/// fast repeated evaluation during enumeration.
pub(crate) struct Tabulated {
    /// per agent: summed self values per candidate
    self_vals: Vec<Vec<f64>>,
    /// per (owner, partner): matrix over (owner candidate, partner candidate)
    pair_vals: Vec<((usize, usize), Vec<Vec<f64>>)>,
}

impl Tabulated {
    pub(crate) fn of_game(game: &StructuredGame) -> Self {
        let space = game.spaces().as_finite().expect("finite space");
        let n = game.n_agents();
        let mut self_vals = vec![Vec::new(); n];
        let mut pair_vals = Vec::new();
        for agent in 0..n {
            let mut totals = vec![0.0; space.count(agent)];
            for term in game.terms(agent) {
                match term {
                    CostTerm::SelfCost { weight, eval } => {
                        for (c, total) in totals.iter_mut().enumerate() {
                            *total += weight * eval(space.candidate(agent, c));
                        }
                    }
                    CostTerm::PairCost { partner, weight, eval, owner_first } => {
                        let mut matrix = vec![vec![0.0; space.count(*partner)]; space.count(agent)];
                        for (a, row) in matrix.iter_mut().enumerate() {
                            let own = space.candidate(agent, a);
                            for (b, cell) in row.iter_mut().enumerate() {
                                let other = space.candidate(*partner, b);
                                let v =
                                    if *owner_first { eval(own, other) } else { eval(other, own) };
                                *cell = weight * v;
                            }
                        }
                        pair_vals.push(((agent, *partner), matrix));
                    }
                }
            }
            self_vals[agent] = totals;
        }
        Self { self_vals, pair_vals }
    }

    pub(crate) fn of_potential(f: &PotentialFunction, game: &StructuredGame) -> Self {
        let space = game.spaces().as_finite().expect("finite space");
        let n = f.n_agents();
        let mut self_vals: Vec<Vec<f64>> =
            (0..n).map(|agent| vec![0.0; space.count(agent)]).collect();
        for (agent, weight, eval) in &f.self_parts {
            for c in 0..space.count(*agent) {
                self_vals[*agent][c] += weight * eval(space.candidate(*agent, c));
            }
        }
        let mut pair_vals = Vec::new();
        for (owner, partner, weight, eval, owner_first) in &f.pair_parts {
            let mut matrix = vec![vec![0.0; space.count(*partner)]; space.count(*owner)];
            for (a, row) in matrix.iter_mut().enumerate() {
                let own = space.candidate(*owner, a);
                for (b, cell) in row.iter_mut().enumerate() {
                    let other = space.candidate(*partner, b);
                    let v = if *owner_first { eval(own, other) } else { eval(other, own) };
                    *cell = weight * v;
                }
            }
            pair_vals.push(((*owner, *partner), matrix));
        }
        Self { self_vals, pair_vals }
    }

    /// Full value at a joint candidate assignment.
    pub(crate) fn full_value(&self, assignment: &[usize]) -> f64 {
        let mut total = 0.0;
        for (agent, vals) in self.self_vals.iter().enumerate() {
            if !vals.is_empty() {
                total += vals[assignment[agent]];
            }
        }
        for ((owner, partner), matrix) in &self.pair_vals {
            total += matrix[assignment[*owner]][assignment[*partner]];
        }
        total
    }

    /// Agent's own cost: self values plus the pair terms the agent owns.
    /// Used for the game side, where each agent's list carries its own copy
    /// of every pairwise interaction.
    pub(crate) fn owned_value(&self, agent: usize, c: usize, assignment: &[usize]) -> f64 {
        let mut total = self.self_vals[agent].get(c).copied().unwrap_or(0.0);
        for ((owner, partner), matrix) in &self.pair_vals {
            if *owner == agent {
                total += matrix[c][assignment[*partner]];
            }
        }
        total
    }

    /// All parts involving `agent`, whether stored owner- or partner-side.
    /// Used for the potential, whose pair parts are stored once each.
    pub(crate) fn touching_value(&self, agent: usize, c: usize, assignment: &[usize]) -> f64 {
        let mut total = self.self_vals[agent].get(c).copied().unwrap_or(0.0);
        for ((owner, partner), matrix) in &self.pair_vals {
            if *owner == agent {
                total += matrix[c][assignment[*partner]];
            } else if *partner == agent {
                total += matrix[assignment[*owner]][c];
            }
        }
        total
    }
}

/// Exhaustively checks the exact deviation identity on a finite game.
///
/// For every agent, every opponent assignment, and every own-strategy pair,
/// `V_i(u_i, u_-i) - V_i(u_i', u_-i)` must equal the same difference of `F`.
/// Equivalently `V_i - F` must be constant in `u_i` for fixed  `u_-i`; the
/// reported violation is the largest spread of that difference.
pub fn verify_finite_potential(
    game: &StructuredGame,
    f: &PotentialFunction,
    cap: u128,
    tolerance: f64,
) -> Result<FinitePotentialReport> {
    let space = game
        .spaces()
        .as_finite()
        .ok_or_else(|| Error::invalid_argument("finite verification needs finite spaces"))?;
    let total = space.total_profiles();
    if total > cap {
        return Err(Error::EnumerationCapExceeded { count: total, cap });
    }

    let game_tab = Tabulated::of_game(game);
    let f_tab = Tabulated::of_potential(f, game);
    let n = game.n_agents();
    let mut worst = 0.0f64;

    for agent in 0..n {
        // odometer over the other agents' candidates
        let mut assignment = vec![0usize; n];
        loop {
            let mut min_d = f64::INFINITY;
            let mut max_d = f64::NEG_INFINITY;
            for c in 0..space.count(agent) {
                let v = game_tab.owned_value(agent, c, &assignment);
                let fv = f_tab.touching_value(agent, c, &assignment);
                let d = v - fv;
                min_d = min_d.min(d);
                max_d = max_d.max(d);
            }
            worst = worst.max(max_d - min_d);

            // advance the odometer, skipping `agent`
            let mut pos = 0;
            loop {
                if pos == agent {
                    pos += 1;
                    if pos >= n {
                        break;
                    }
                }
                if pos >= n {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < space.count(pos) {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos >= n {
                break;
            }
        }
    }

    Ok(FinitePotentialReport {
        holds: worst <= tolerance,
        worst_violation: worst,
        tolerance,
        profiles_checked: total,
    })
}

/// Result of the sampled continuous gradient check.
#[derive(Debug, Clone)]
pub struct ContinuousPotentialReport {
    /// Largest relative disagreement between the central-difference gradients
    /// of `V_i` and `F` along any own-strategy component.
    pub max_rel_grad_error: f64,
    pub samples_evaluated: usize,
    pub samples_skipped: usize,
}

/// Compares central-difference gradients of each agent's cost and of the
/// potential at random interior profiles of a continuous game.
///
/// Samples where any evaluation is non-finite are skipped and counted; it is
/// an error if every sample is skipped.
pub fn verify_continuous_potential(
    game: &StructuredGame,
    f: &PotentialFunction,
    samples: usize,
    h: f64,
    seed: u64,
) -> Result<ContinuousPotentialReport> {
    let space = game
        .spaces()
        .as_continuous()
        .ok_or_else(|| Error::invalid_argument("gradient verification needs continuous spaces"))?;
    if h <= 0.0 {
        return Err(Error::invalid_argument("finite-difference step must be positive"));
    }
    if samples == 0 {
        return Err(Error::invalid_argument("need at least one sample"));
    }
    let n = game.n_agents();
    for agent in 0..n {
        let (lo, hi) = space.bounds(agent);
        for (a, b) in lo.iter().zip(hi.iter()) {
            if b - a <= 2.0 * h {
                return Err(Error::invalid_argument(
                    "box too narrow for interior central differences",
                ));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    'outer: for _ in 0..samples {
        let strategies: Vec<Vec<f64>> = (0..n)
            .map(|agent| {
                let (lo, hi) = space.bounds(agent);
                lo.iter()
                    .zip(hi.iter())
                    .map(|(&a, &b)| rng.gen_range((a + h)..=(b - h)))
                    .collect()
            })
            .collect();
        let mut profile = StrategyProfile::new(strategies, 0.0);

        let mut sample_err = 0.0f64;
        for agent in 0..n {
            for k in 0..space.dim(agent) {
                let base = profile.strategy(agent)[k];

                let mut bumped = profile.strategy(agent).to_vec();
                bumped[k] = base + h;
                profile.set_strategy(agent, bumped);
                let v_plus = game.cost_unchecked(agent, &profile);
                let f_plus = f.value(&profile);

                let mut bumped = profile.strategy(agent).to_vec();
                bumped[k] = base - h;
                profile.set_strategy(agent, bumped);
                let v_minus = game.cost_unchecked(agent, &profile);
                let f_minus = f.value(&profile);

                let mut restored = profile.strategy(agent).to_vec();
                restored[k] = base;
                profile.set_strategy(agent, restored);

                if !(v_plus.is_finite() && v_minus.is_finite() && f_plus.is_finite() && f_minus.is_finite())
                {
                    skipped += 1;
                    continue 'outer;
                }
                let dv = (v_plus - v_minus) / (2.0 * h);
                let df = (f_plus - f_minus) / (2.0 * h);
                sample_err = sample_err.max((dv - df).abs() / dv.abs().max(1.0));
            }
        }
        evaluated += 1;
        max_err = max_err.max(sample_err);
    }

    if evaluated == 0 {
        return Err(Error::diagnostic(
            "all gradient samples hit non-finite evaluations",
        ));
    }
    Ok(ContinuousPotentialReport {
        max_rel_grad_error: max_err,
        samples_evaluated: evaluated,
        samples_skipped: skipped,
    })
}
