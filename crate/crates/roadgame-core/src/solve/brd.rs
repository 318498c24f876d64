//! Best-response dynamics.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::game::{assemble_potential, StrategyProfile, StructuredGame, SymmetryCheck};
use crate::seeding::derive_seed2;
use crate::solve::optimize::global_minimize;
use crate::solve::potential_opt::check_nash;
use crate::solve::{BRConfig, CertificateMethod, NEResult, OptimizerConfig};

/// Exact (finite) or search-based (continuous) best response of one agent to
/// the others' strategies in `profile`.
///
/// Finite menus are minimized by enumeration with ties broken toward the
/// lowest candidate index; continuous boxes use the multi-start optimizer.
pub fn best_response(
    game: &StructuredGame,
    agent: usize,
    profile: &StrategyProfile,
    config: &OptimizerConfig,
) -> Result<Vec<f64>> {
    if agent >= game.n_agents() {
        return Err(Error::invalid_argument(format!("agent {agent} out of range")));
    }
    game.validate_profile(profile)?;
    match game.spaces() {
        crate::game::StrategySpaces::Finite(space) => {
            let mut scratch = profile.clone();
            let mut best_idx = 0usize;
            let mut best_val = f64::INFINITY;
            for idx in 0..space.count(agent) {
                scratch.set_strategy(agent, space.candidate(agent, idx).to_vec());
                let value = game.cost_unchecked(agent, &scratch);
                if value < best_val {
                    best_val = value;
                    best_idx = idx;
                }
            }
            Ok(space.candidate(agent, best_idx).to_vec())
        }
        crate::game::StrategySpaces::Continuous(space) => {
            let (lower, upper) = space.bounds(agent);
            let scratch = std::cell::RefCell::new(profile.clone());
            let objective = |candidate: &[f64]| {
                let mut p = scratch.borrow_mut();
                p.copy_strategy_into(agent, candidate);
                game.cost_unchecked(agent, &p)
            };
            let (point, _) = global_minimize(&objective, lower, upper, config)?;
            Ok(point)
        }
    }
}

/// Iterated best responses in fixed agent order until a full sweep makes no
/// accepted replacement, then certified.
///
/// An agent's strategy is replaced only when the best response improves its
/// cost by more than the configured epsilon, so the potential strictly
/// decreases by more than epsilon along every accepted update.
pub fn best_response_dynamics(
    game: &StructuredGame,
    initial: &StrategyProfile,
    config: &BRConfig,
) -> Result<NEResult> {
    let start = Instant::now();
    let continuous = !game.spaces().is_finite();
    config.validate(continuous)?;
    game.validate_profile(initial)?;

    let potential = assemble_potential(game, &SymmetryCheck::default())?;
    let mut profile = initial.clone();
    let mut potential_trace = vec![potential.value(&profile)];
    let mut sweeps_used = 0;
    let mut fixed_point = false;

    for sweep in 0..config.max_sweeps {
        sweeps_used = sweep + 1;
        let mut replaced = false;
        for agent in 0..game.n_agents() {
            let inner = OptimizerConfig {
                seed: derive_seed2(config.inner.seed, sweep as u64, agent as u64),
                ..config.inner.clone()
            };
            let candidate = best_response(game, agent, &profile, &inner)?;
            let current_cost = game.cost_unchecked(agent, &profile);
            let mut trial = profile.clone();
            trial.set_strategy(agent, candidate);
            let trial_cost = game.cost_unchecked(agent, &trial);
            if current_cost - trial_cost > config.epsilon {
                profile = trial;
                let value = potential.value(&profile);
                debug_assert!(
                    value < potential_trace.last().unwrap() - config.epsilon + 1e-9,
                    "potential failed to decrease on an accepted update"
                );
                potential_trace.push(value);
                replaced = true;
            }
        }
        if !replaced {
            fixed_point = true;
            break;
        }
    }

    let method = if continuous {
        CertificateMethod::SampledMultistart
    } else {
        CertificateMethod::Exhaustive
    };
    let certificate = check_nash(game, &profile, config.epsilon, method, &config.inner)?;
    let converged = fixed_point && certificate.passed;
    let potential_value = Some(*potential_trace.last().unwrap());

    Ok(NEResult {
        profile,
        converged,
        sweeps_used,
        potential_value,
        certificate,
        wall_time: start.elapsed().as_secs_f64(),
        potential_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{
        ContinuousStrategySpace, FiniteStrategySpace, StrategySpaces, StructuredGame,
    };
    use approx::assert_abs_diff_eq;

    fn index_space(counts: &[usize]) -> StrategySpaces {
        let menus = counts
            .iter()
            .map(|&c| (0..c).map(|k| vec![k as f64]).collect())
            .collect();
        StrategySpaces::Finite(FiniteStrategySpace::new(menus).unwrap())
    }

    /// Constant-acceleration speed-tracking cost over an 8-step horizon,
    /// starting from 22 m/s with desired speed 27 m/s.
    fn tracking_game(accels: &[f64]) -> StructuredGame {
        let menus = vec![accels.iter().map(|&a| vec![a]).collect()];
        let space = StrategySpaces::Finite(FiniteStrategySpace::new(menus).unwrap());
        StructuredGame::builder(space, 8, 0.5)
            .self_cost(0, 1.0, |u| {
                (0..8)
                    .map(|k| {
                        let v = (22.0 + u[0] * 0.5 * k as f64).max(0.0);
                        ((v - 27.0) / 27.0).powi(2)
                    })
                    .sum()
            })
            .build()
            .unwrap()
    }

    #[test]
    fn tracking_best_response_matches_enumeration_oracle() {
        let accels = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let game = tracking_game(&accels);

        // independent oracle: evaluate each rolled-out cost directly
        let cost_of = |a: f64| -> f64 {
            (0..8)
                .map(|k| {
                    let v: f64 = (22.0 + a * 0.5 * k as f64).max(0.0);
                    ((v - 27.0) / 27.0).powi(2)
                })
                .sum()
        };
        let oracle = accels
            .iter()
            .copied()
            .min_by(|a, b| cost_of(*a).total_cmp(&cost_of(*b)))
            .unwrap();
        // closing 5 m/s within the window without overshooting favors +2,
        // not the largest acceleration
        assert_eq!(oracle, 2.0);

        let profile = StrategyProfile::new(vec![vec![0.0]], 0.0);
        let br = best_response(&game, 0, &profile, &OptimizerConfig::default()).unwrap();
        assert_eq!(br, vec![oracle]);
    }

    #[test]
    fn single_candidate_returned() {
        let game = tracking_game(&[1.0]);
        let profile = StrategyProfile::new(vec![vec![1.0]], 0.0);
        let br = best_response(&game, 0, &profile, &OptimizerConfig::default()).unwrap();
        assert_eq!(br, vec![1.0]);
    }

    #[test]
    fn tie_breaks_to_lowest_index() {
        // symmetric two-candidate tie: cost is the same for both entries
        let space = index_space(&[2]);
        let game = StructuredGame::builder(space, 1, 0.5)
            .self_cost(0, 1.0, |_| 7.0)
            .build()
            .unwrap();
        let profile = StrategyProfile::new(vec![vec![1.0]], 0.0);
        let br = best_response(&game, 0, &profile, &OptimizerConfig::default()).unwrap();
        assert_eq!(br, vec![0.0]);
    }

    #[test]
    fn identical_interest_2x2_converges_to_unique_minimum_from_any_start() {
        // table [[0,1],[2,3]] has its unique NE at (0,0)
        let table = [[0.0, 1.0], [2.0, 3.0]];
        let space = index_space(&[2, 2]);
        let game = StructuredGame::builder(space, 1, 0.5)
            .symmetric_pair_cost(0, 1, 1.0, move |a, b| table[a[0] as usize][b[0] as usize])
            .build()
            .unwrap();
        for s0 in 0..2 {
            for s1 in 0..2 {
                let initial =
                    StrategyProfile::new(vec![vec![s0 as f64], vec![s1 as f64]], 0.0);
                let result = best_response_dynamics(&game, &initial, &BRConfig::finite()).unwrap();
                assert!(result.converged);
                assert_eq!(result.profile.strategy(0), &[0.0]);
                assert_eq!(result.profile.strategy(1), &[0.0]);
                assert!(result.certificate.passed);
                // accepted updates never increase the potential
                for pair in result.potential_trace.windows(2) {
                    assert!(pair[1] < pair[0]);
                }
            }
        }
    }

    #[test]
    fn single_agent_brd_equals_best_response() {
        let game = tracking_game(&[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        let initial = StrategyProfile::new(vec![vec![0.0]], 0.0);
        let result = best_response_dynamics(&game, &initial, &BRConfig::finite()).unwrap();
        let br = best_response(&game, 0, &initial, &OptimizerConfig::default()).unwrap();
        assert!(result.converged);
        assert_eq!(result.profile.strategy(0), br.as_slice());
    }

    #[test]
    fn continuous_coupled_quadratic_reaches_epsilon_ne() {
        let space = StrategySpaces::Continuous(
            ContinuousStrategySpace::new(vec![vec![-3.0]; 3], vec![vec![3.0]; 3]).unwrap(),
        );
        let mut builder = StructuredGame::builder(space, 1, 0.5);
        for agent in 0..3 {
            let target = [-1.0, 0.5, 2.0][agent];
            builder = builder.self_cost(agent, 1.0, move |u| (u[0] - target).powi(2));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                builder = builder.symmetric_pair_cost(i, j, 0.4, |a, b| (a[0] - b[0]).powi(2));
            }
        }
        let game = builder.build().unwrap();
        let initial = StrategyProfile::new(vec![vec![0.0]; 3], 0.0);
        let result =
            best_response_dynamics(&game, &initial, &BRConfig::continuous(17)).unwrap();
        assert!(result.converged, "certificate: {:?}", result.certificate);
        assert_eq!(result.certificate.method, CertificateMethod::SampledMultistart);
        // strictly convex costs: the unique NE solves the first-order system
        // 2(u_i - t_i) + 0.8 (3 u_i - S) = 0 with S = sum_j u_j, giving
        // S = sum_i t_i and u_i = (2 t_i + 0.8 S) / 4.4
        let targets = [-1.0, 0.5, 2.0];
        let total: f64 = targets.iter().sum();
        for agent in 0..3 {
            let expected = (2.0 * targets[agent] + 0.8 * total) / 4.4;
            let got = result.profile.strategy(agent)[0];
            assert_abs_diff_eq!(got, expected, epsilon = 0.05);
        }
    }

    #[test]
    fn brd_is_deterministic() {
        let space = StrategySpaces::Continuous(
            ContinuousStrategySpace::new(vec![vec![-3.0]; 2], vec![vec![3.0]; 2]).unwrap(),
        );
        let game = StructuredGame::builder(space, 1, 0.5)
            .self_cost(0, 1.0, |u| (u[0] - 0.7).powi(2))
            .self_cost(1, 1.0, |u| (u[0] + 1.2).powi(2))
            .symmetric_pair_cost(0, 1, 0.3, |a, b| (a[0] * b[0]).sin())
            .build()
            .unwrap();
        let initial = StrategyProfile::new(vec![vec![0.0]; 2], 0.0);
        let a = best_response_dynamics(&game, &initial, &BRConfig::continuous(5)).unwrap();
        let b = best_response_dynamics(&game, &initial, &BRConfig::continuous(5)).unwrap();
        for agent in 0..2 {
            for (x, y) in a.profile.strategy(agent).iter().zip(b.profile.strategy(agent)) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
