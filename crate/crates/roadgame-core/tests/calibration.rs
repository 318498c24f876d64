//! Temporary calibration probes; run with --ignored.

use roadgame_core::costs::GameKind;
use roadgame_core::sim::*;
use roadgame_core::vehicle::RoadGeometry;

fn lane_of(y: f64) -> usize {
    RoadGeometry::straight(3, 5.0).lane_at(y)
}

#[test]
#[ignore]
fn probe_scenario1() {
    let config = lane_change_scenario1(1);
    let trace = run_episode(&config).unwrap();
    for r in &trace.steps {
        let e = &r.states[0];
        println!(
            "t={:4.1} x={:7.2} y={:6.2} v={:5.2} lane={} strat={:?} pot={:8.3} solve={:6.1}ms",
            r.step as f64 * 0.5,
            e.x,
            e.y,
            e.v,
            lane_of(e.y),
            r.ego_strategy,
            r.potential.unwrap_or(f64::NAN),
            r.solve_time * 1e3
        );
    }
    let f = &trace.final_states[0];
    println!(
        "final y={:.2} v={:.3} lane={} collided={}",
        f.y,
        f.v,
        lane_of(f.y),
        trace.ego_collided()
    );
    let mut lanes: Vec<usize> = trace.steps.iter().map(|r| lane_of(r.states[0].y)).collect();
    lanes.push(lane_of(trace.final_states[0].y));
    lanes.dedup();
    println!("lane sequence: {lanes:?}");
}

#[test]
#[ignore]
fn probe_scenario3() {
    let config = lane_change_scenario3(1);
    let trace = run_episode(&config).unwrap();
    for r in &trace.steps {
        let e = &r.states[0];
        let v2 = &r.states[1];
        println!(
            "t={:4.1} ego(x={:7.2} y={:6.2} v={:5.2} lane={}) v2.x={:7.2} strat={:?}",
            r.step as f64 * 0.5,
            e.x,
            e.y,
            e.v,
            lane_of(e.y),
            v2.x,
            r.ego_strategy
        );
    }
    let mut lanes: Vec<usize> = trace.steps.iter().map(|r| lane_of(r.states[0].y)).collect();
    lanes.push(lane_of(trace.final_states[0].y));
    lanes.dedup();
    println!("lane sequence: {lanes:?} collided={}", trace.ego_collided());
}

#[test]
#[ignore]
fn probe_intersection_constant_speed() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let mut collisions = 0;
    let mut speed_sum = 0.0;
    let mut worst_solve: f64 = 0.0;
    let mut avg_solve = 0.0;
    let mut n_solve = 0usize;
    let n_eps = 30;
    for ep in 0..n_eps {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + ep);
        let mut gaps = [0.0; 5];
        gaps[0] = rng.gen_range(40.0..80.0);
        for g in gaps.iter_mut().skip(1) {
            *g = rng.gen_range(20.0..80.0);
        }
        let mut speeds = [0.0; 5];
        for s in speeds.iter_mut() {
            *s = rng.gen_range(4.0..6.0);
        }
        let config = intersection_config(
            GameKind::Continuous,
            EgoSolver::PotentialOptimization,
            SurroundingPolicy::ConstantSpeed,
            &gaps,
            &speeds,
            2000 + ep,
        );
        match run_episode(&config) {
            Ok(trace) => {
                let ego_hits = trace.events().filter(|e| e.involves(0)).count();
                if ego_hits > 0 {
                    collisions += 1;
                    println!("ep {ep}: EGO COLLISION gaps={gaps:?} speeds={speeds:?}");
                }
                let avg_v: f64 = trace.steps.iter().map(|r| r.states[0].v).sum::<f64>()
                    / trace.steps.len() as f64;
                speed_sum += avg_v;
                for r in &trace.steps {
                    avg_solve += r.solve_time;
                    n_solve += 1;
                    worst_solve = worst_solve.max(r.solve_time);
                }
            }
            Err(e) => println!("ep {ep}: ABORT {e}"),
        }
    }
    println!(
        "collisions {}/{}  avg ego speed {:.3}  avg solve {:.1} ms  worst solve {:.1} ms",
        collisions,
        n_eps,
        speed_sum / n_eps as f64,
        avg_solve / n_solve as f64 * 1e3,
        worst_solve * 1e3
    );
}

#[test]
#[ignore]
fn probe_scenario1_landscape() {
    use roadgame_core::costs::{build_lane_change_game, lane_change_actions, CostParams, LaneChoice};
    use roadgame_core::game::{assemble_potential, SymmetryCheck};
    use roadgame_core::solve::{potential_optimization, OptimizerConfig};
    use roadgame_core::vehicle::{VehicleGeometry, VehicleState};

    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    let states = vec![
        VehicleState::new(54.0, 2.56, 27.0, 0.014, 0.004), // ego mid-dither at t=2
        VehicleState::new(74.0, lane(0), 22.0, 0.0, 0.0),
        VehicleState::new(13.0, lane(1), 29.0, 0.0, 0.0),
        VehicleState::new(72.0, lane(2), 26.0, 0.0, 0.0),
        VehicleState::new(18.0, lane(0), 24.0, 0.0, 0.0),
    ];
    let speeds = vec![27.0, 22.0, 29.0, 26.0, 24.0];
    let game = build_lane_change_game(
        &states, &speeds, &road, &VehicleGeometry::default(), &CostParams::default(), 8, 0.5,
    )
    .unwrap();
    let f = assemble_potential(&game, &SymmetryCheck::default()).unwrap();
    let space = game.spaces().as_finite().unwrap();
    let menu = lane_change_actions();

    let idx_of = |accel: f64, lane: LaneChoice| {
        menu.iter().position(|a| a.accel == accel && a.lane == lane).unwrap()
    };
    let keep0 = idx_of(0.0, LaneChoice::Keep);
    let left0 = idx_of(0.0, LaneChoice::Left);
    let keep_m1 = idx_of(-1.0, LaneChoice::Keep);

    for (label, ego_idx) in [("all keep0", keep0), ("ego left0", left0), ("ego keep-1", keep_m1)] {
        let profile = space.profile_from_indices(&[ego_idx, keep0, keep0, keep0, keep0], 0.0);
        println!(
            "{label}: F = {:.6}  V_ego = {:.6}",
            f.value(&profile),
            game.evaluate_cost(0, &profile).unwrap()
        );
    }

    let result = potential_optimization(&game, &OptimizerConfig { seed: 11, ..Default::default() }).unwrap();
    println!("optimizer F = {:.6}", result.potential_value.unwrap());
    for agent in 0..5 {
        println!("  agent {agent}: {:?}", result.profile.strategy(agent));
    }
}

#[test]
#[ignore]
fn probe_descent_ties() {
    use roadgame_core::costs::{build_lane_change_game, CostParams};
    use roadgame_core::seeding::derive_seed2;
    use roadgame_core::solve::{potential_optimization, OptimizerConfig};
    use roadgame_core::vehicle::{VehicleGeometry, VehicleState};

    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    // state after one keep-everything step of scenario 1
    let states = vec![
        VehicleState::new(13.5, lane(0), 27.0, 0.0, 0.0),
        VehicleState::new(51.5, lane(0), 23.0, 0.0, 0.0),
        VehicleState::new(-30.5, lane(1), 29.0, 0.0, 0.0),
        VehicleState::new(33.0, lane(2), 26.0, 0.0, 0.0),
        VehicleState::new(-18.0, lane(0), 24.0, 0.0, 0.0),
    ];
    let speeds = vec![27.0, 23.0, 29.0, 26.0, 24.0];
    let game = build_lane_change_game(
        &states, &speeds, &road, &VehicleGeometry::default(), &CostParams::default(), 8, 0.5,
    )
    .unwrap();
    for step in 0..4u64 {
        let seed = derive_seed2(1, 1, step);
        let result =
            potential_optimization(&game, &OptimizerConfig { seed, ..Default::default() }).unwrap();
        let strategies: Vec<Vec<f64>> =
            (0..5).map(|a| result.profile.strategy(a).to_vec()).collect();
        println!(
            "seed {seed:>20}: F={:.9} profile={:?}",
            result.potential_value.unwrap(),
            strategies
        );
    }
}

#[test]
#[ignore]
fn probe_keep_vs_left_values() {
    use roadgame_core::costs::{build_lane_change_game, lane_change_actions, CostParams, LaneChoice};
    use roadgame_core::game::{assemble_potential, SymmetryCheck};
    use roadgame_core::vehicle::{VehicleGeometry, VehicleState};

    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    let states = vec![
        VehicleState::new(13.5, lane(0), 27.0, 0.0, 0.0),
        VehicleState::new(51.5, lane(0), 23.0, 0.0, 0.0),
        VehicleState::new(-30.5, lane(1), 29.0, 0.0, 0.0),
        VehicleState::new(33.0, lane(2), 26.0, 0.0, 0.0),
        VehicleState::new(-18.0, lane(0), 24.0, 0.0, 0.0),
    ];
    let speeds = vec![27.0, 23.0, 29.0, 26.0, 24.0];
    let game = build_lane_change_game(
        &states, &speeds, &road, &VehicleGeometry::default(), &CostParams::default(), 8, 0.5,
    )
    .unwrap();
    let f = assemble_potential(&game, &SymmetryCheck::default()).unwrap();
    let space = game.spaces().as_finite().unwrap();
    let menu = lane_change_actions();
    let keep0 = menu.iter().position(|a| a.accel == 0.0 && a.lane == LaneChoice::Keep).unwrap();
    println!("keep0 index = {keep0}");
    for (idx, action) in menu.iter().enumerate() {
        let profile = space.profile_from_indices(&[idx, keep0, keep0, keep0, keep0], 0.0);
        let v = game.evaluate_cost(0, &profile).unwrap();
        let fv = f.value(&profile);
        if v < 0.2 {
            println!("ego cand {idx:2} {action:?}: V_ego = {v:.3e}  F = {fv:.3e}");
        }
    }
}

#[test]
#[ignore]
fn probe_descent_vs_exhaustive() {
    use roadgame_core::costs::{build_lane_change_game, CostParams};
    use roadgame_core::solve::{potential_optimization, OptimizerConfig};
    use roadgame_core::vehicle::{VehicleGeometry, VehicleState};

    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    let states = vec![
        VehicleState::new(13.5, lane(0), 27.0, 0.0, 0.0),
        VehicleState::new(51.5, lane(0), 23.0, 0.0, 0.0),
        VehicleState::new(-30.5, lane(1), 29.0, 0.0, 0.0),
        VehicleState::new(33.0, lane(2), 26.0, 0.0, 0.0),
        VehicleState::new(-18.0, lane(0), 24.0, 0.0, 0.0),
    ];
    let speeds = vec![27.0, 23.0, 29.0, 26.0, 24.0];
    let game = build_lane_change_game(
        &states, &speeds, &road, &VehicleGeometry::default(), &CostParams::default(), 8, 0.5,
    )
    .unwrap();

    let single = OptimizerConfig { restarts: 1, seed: 7, ..Default::default() };
    let r1 = potential_optimization(&game, &single).unwrap();
    println!("restarts=1 (descent from all-zeros): ego = {:?}", r1.profile.strategy(0));

    let exhaustive = OptimizerConfig { enumeration_cap: 10_000_000, seed: 7, ..Default::default() };
    let r2 = potential_optimization(&game, &exhaustive).unwrap();
    println!("exhaustive:                          ego = {:?}", r2.profile.strategy(0));
}

#[test]
#[ignore]
fn probe_failing_episode() {
    let gaps = [48.83613515742816, 49.44059865887418, 39.77572107775066, 70.98376450187973, 74.47062143204566];
    let speeds = [5.288264278424667, 4.777009905860365, 4.443334026406115, 4.346153007500553, 5.47111098750452];
    let config = intersection_config(
        GameKind::Continuous,
        EgoSolver::PotentialOptimization,
        SurroundingPolicy::ConstantSpeed,
        &gaps,
        &speeds,
        2009,
    );
    let trace = run_episode(&config).unwrap();
    for r in &trace.steps {
        let ego = &r.states[0];
        let others: Vec<String> = (1..5)
            .map(|i| {
                let s = &r.states[i];
                format!("v{}({:6.1},{:6.1} v{:4.2})", i + 1, s.x, s.y, s.v)
            })
            .collect();
        println!(
            "t={:4.1} ego({:6.1},{:6.1} v={:4.2} a={:+5.2}) {} pot={:9.4}",
            r.step as f64 * 0.5, ego.x, ego.y, ego.v, r.actions[0].accel,
            others.join(" "), r.potential.unwrap_or(f64::NAN),
        );
        for e in &r.events {
            println!("  EVENT pair={:?} rel={:.2} at {:?}", e.pair, e.relative_speed, e.positions);
        }
    }
}

#[test]
#[ignore]
fn probe_theta2_sweep() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use roadgame_core::costs::CostParams;

    for theta2 in [5.0, 10.0, 25.0, 50.0] {
        let mut collisions = 0;
        let mut speed_sum = 0.0;
        let mut valid = 0;
        let n_eps = 30;
        for ep in 0..n_eps {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + ep);
            let mut config;
            let mut attempts = 0;
            loop {
                let mut gaps = [0.0; 5];
                gaps[0] = rng.gen_range(40.0..80.0);
                for g in gaps.iter_mut().skip(1) {
                    *g = rng.gen_range(20.0..80.0);
                }
                let mut speeds = [0.0; 5];
                for s in speeds.iter_mut() {
                    *s = rng.gen_range(4.0..6.0);
                }
                config = intersection_config(
                    GameKind::Continuous,
                    EgoSolver::PotentialOptimization,
                    SurroundingPolicy::ConstantSpeed,
                    &gaps,
                    &speeds,
                    2000 + ep,
                );
                config.params = CostParams { theta2, ..config.params };
                if config.validate().is_ok() {
                    break;
                }
                attempts += 1;
                assert!(attempts < 100);
            }
            let trace = run_episode(&config).unwrap();
            valid += 1;
            if trace.events().any(|e| e.involves(0)) {
                collisions += 1;
            }
            let avg_v: f64 = trace.steps.iter().map(|r| r.states[0].v).sum::<f64>()
                / trace.steps.len() as f64;
            speed_sum += avg_v;
        }
        println!(
            "theta2={theta2:5.0}: ego collisions {collisions}/{valid}  avg ego speed {:.3}",
            speed_sum / valid as f64
        );
    }
}
