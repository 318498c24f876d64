//! Potential-function optimization and Nash certification.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::potential::Tabulated;
use crate::game::{
    assemble_potential, FiniteStrategySpace, StrategyProfile, StrategySpaces, StructuredGame,
    SymmetryCheck,
};
use crate::seeding::{derive_seed, derive_seed2};
use crate::solve::optimize::global_minimize;
use crate::solve::{AgentDeviation, CertificateMethod, NECertificate, NEResult, OptimizerConfig};

/// Solves the game by minimizing its potential over the joint space.
///
/// Finite spaces are enumerated exhaustively when the joint count fits the
/// configured cap, otherwise searched by multi-start coordinate descent on
/// the tabulated potential. Continuous spaces use the multi-start global
/// optimizer over the concatenated box. The exact minimizer of the potential
/// is a pure-strategy NE; the returned certificate records the evidence.
pub fn potential_optimization(
    game: &StructuredGame,
    config: &OptimizerConfig,
) -> Result<NEResult> {
    let start = Instant::now();
    config.validate()?;
    let potential = assemble_potential(game, &SymmetryCheck::default())?;

    let (profile, value) = match game.spaces() {
        StrategySpaces::Finite(space) => {
            let tab = Tabulated::of_potential(&potential, game);
            let assignment = if space.total_profiles() <= config.enumeration_cap {
                exhaustive_joint_argmin(space, &tab)
            } else {
                descent_joint_argmin(space, &tab, config)
            };
            let profile = space.profile_from_indices(&assignment, 0.0);
            let value = tab.full_value(&assignment);
            (profile, value)
        }
        StrategySpaces::Continuous(space) => {
            let n = game.n_agents();
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for agent in 0..n {
                let (lo, hi) = space.bounds(agent);
                lower.extend_from_slice(lo);
                upper.extend_from_slice(hi);
            }
            let objective = |joint: &[f64]| {
                let profile = split_joint(game, joint);
                potential.value(&profile)
            };
            let (point, value) = global_minimize(&objective, &lower, &upper, config)?;
            (split_joint(game, &point), value)
        }
    };

    let (method, epsilon) = match game.spaces() {
        StrategySpaces::Finite(_) => (CertificateMethod::Exhaustive, 0.0),
        StrategySpaces::Continuous(_) => {
            (CertificateMethod::SampledMultistart, crate::solve::DEFAULT_EPSILON)
        }
    };
    let certificate = check_nash(game, &profile, epsilon, method, config)?;
    let converged = certificate.passed;

    Ok(NEResult {
        profile,
        converged,
        sweeps_used: 0,
        potential_value: Some(value),
        certificate,
        wall_time: start.elapsed().as_secs_f64(),
        potential_trace: vec![value],
    })
}

fn split_joint(game: &StructuredGame, joint: &[f64]) -> StrategyProfile {
    let mut strategies = Vec::with_capacity(game.n_agents());
    let mut offset = 0;
    for agent in 0..game.n_agents() {
        let dim = game.spaces().dim(agent);
        strategies.push(joint[offset..offset + dim].to_vec());
        offset += dim;
    }
    StrategyProfile::new(strategies, 0.0)
}

/// Scans every joint assignment; first-found minimum wins, which is the
/// lexicographically lowest index vector among ties.
fn exhaustive_joint_argmin(space: &FiniteStrategySpace, tab: &Tabulated) -> Vec<usize> {
    let n = space.n_agents();
    let mut assignment = vec![0usize; n];
    let mut best = assignment.clone();
    let mut best_val = tab.full_value(&assignment);
    loop {
        let mut pos = 0;
        while pos < n {
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
        let value = tab.full_value(&assignment);
        if value < best_val {
            best_val = value;
            best = assignment.clone();
        }
    }
    best
}

/// Multi-start coordinate descent on the tabulated potential for joint
/// spaces too large to enumerate. Each sweep sets one agent's candidate to
/// the argmin of the parts touching it; sweeps repeat to a fixed point,
/// which exists because every replacement strictly decreases the potential.
fn descent_joint_argmin(
    space: &FiniteStrategySpace,
    tab: &Tabulated,
    config: &OptimizerConfig,
) -> Vec<usize> {
    let n = space.n_agents();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..config.restarts {
        let mut assignment: Vec<usize> = if restart == 0 {
            vec![0; n]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, restart as u64));
            (0..n).map(|agent| rng.gen_range(0..space.count(agent))).collect()
        };
        loop {
            let mut changed = false;
            for agent in 0..n {
                let current = tab.touching_value(agent, assignment[agent], &assignment);
                let mut best_c = assignment[agent];
                let mut best_v = current;
                for c in 0..space.count(agent) {
                    let v = tab.touching_value(agent, c, &assignment);
                    // ties resolve to the lowest candidate index, even against
                    // the incumbent, so fixed points are canonical and do not
                    // depend on the descent's path
                    if v < best_v || (v == best_v && c < best_c) {
                        best_v = v;
                        best_c = c;
                    }
                }
                if best_c != assignment[agent] {
                    assignment[agent] = best_c;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let value = tab.full_value(&assignment);
        if best.as_ref().map_or(true, |(_, bv)| value < *bv) {
            best = Some((assignment, value));
        }
    }
    best.expect("at least one restart").0
}

/// Certifies whether `profile` is an (epsilon-)Nash equilibrium.
///
/// `Exhaustive` enumerates every alternative per agent (finite spaces only);
/// `SampledMultistart` runs the inner global optimizer per agent against the
/// fixed others and reports the best improvement found, which makes the
/// certificate heuristic on continuous spaces.
pub fn check_nash(
    game: &StructuredGame,
    profile: &StrategyProfile,
    epsilon: f64,
    method: CertificateMethod,
    config: &OptimizerConfig,
) -> Result<NECertificate> {
    game.validate_profile(profile)?;
    if epsilon < 0.0 {
        return Err(Error::invalid_argument("epsilon must be nonnegative"));
    }
    let mut deviations = Vec::with_capacity(game.n_agents());
    match (method, game.spaces()) {
        (CertificateMethod::Exhaustive, StrategySpaces::Finite(space)) => {
            let mut scratch = profile.clone();
            for agent in 0..game.n_agents() {
                let current = game.cost_unchecked(agent, profile);
                let mut best_idx = 0usize;
                let mut best_val = f64::INFINITY;
                for idx in 0..space.count(agent) {
                    scratch.copy_strategy_into(agent, space.candidate(agent, idx));
                    let value = game.cost_unchecked(agent, &scratch);
                    if value < best_val {
                        best_val = value;
                        best_idx = idx;
                    }
                }
                scratch.copy_strategy_into(agent, profile.strategy(agent));
                deviations.push(AgentDeviation {
                    agent,
                    best_alternative: space.candidate(agent, best_idx).to_vec(),
                    improvement: current - best_val,
                });
            }
        }
        (CertificateMethod::Exhaustive, StrategySpaces::Continuous(_)) => {
            return Err(Error::invalid_argument(
                "exhaustive certification requires finite strategy spaces",
            ));
        }
        (CertificateMethod::SampledMultistart, spaces) => {
            let continuous = spaces
                .as_continuous()
                .ok_or_else(|| Error::invalid_argument("sampled certification needs a box"))?;
            for agent in 0..game.n_agents() {
                let current = game.cost_unchecked(agent, profile);
                let (lower, upper) = continuous.bounds(agent);
                let scratch = std::cell::RefCell::new(profile.clone());
                let objective = |candidate: &[f64]| {
                    let mut p = scratch.borrow_mut();
                    p.copy_strategy_into(agent, candidate);
                    game.cost_unchecked(agent, &p)
                };
                let inner = OptimizerConfig {
                    seed: derive_seed2(config.seed, 0x6e5e, agent as u64),
                    ..config.clone()
                };
                let (point, found) = global_minimize(&objective, lower, upper, &inner)?;
                deviations.push(AgentDeviation {
                    agent,
                    best_alternative: point,
                    improvement: current - found,
                });
            }
        }
    }
    let passed = deviations.iter().all(|d| d.improvement <= epsilon);
    Ok(NECertificate { method, epsilon, passed, deviations })
}
