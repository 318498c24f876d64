//! Deterministic global minimization over an axis-aligned box.
//!
//! Multi-start differential evolution with a bounded coordinate polish.
//! Everything is driven by the config seed: identical configs give
//! bit-identical results. Restarts are reduced by (value, restart index), so
//! evaluating them in any order cannot change the answer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seeding::derive_seed;
use crate::solve::OptimizerConfig;

const CROSSOVER_RATE: f64 = 0.9;
/// Coordinate-polish bracket radii as fractions of each box span.
const POLISH_RADII: [f64; 3] = [0.1, 0.01, 0.001];
const GOLDEN_STEPS: usize = 28;

/// Minimizes `objective` over the box `[lower, upper]`.
///
/// Returns the best point found and its value; the point always lies inside
/// the box. Fails if the objective is non-finite at every probe.
pub fn global_minimize(
    objective: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, f64)> {
    config.validate()?;
    if lower.is_empty() || lower.len() != upper.len() {
        return Err(Error::invalid_argument("empty or mismatched bounds"));
    }
    for (lo, hi) in lower.iter().zip(upper.iter()) {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid_argument("bounds must be finite with lower <= upper"));
        }
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut saw_finite = false;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, restart as u64));
        if let Some((point, value)) = evolve(objective, lower, upper, config, &mut rng) {
            saw_finite = true;
            let polished = polish(objective, lower, upper, point, value);
            if best.as_ref().map_or(true, |(_, bv)| polished.1 < *bv) {
                best = Some(polished);
            }
        }
    }
    match best {
        Some(found) => Ok(found),
        None => {
            debug_assert!(!saw_finite);
            Err(Error::diagnostic("objective was non-finite at every probe"))
        }
    }
}

/// One differential-evolution run; returns the best finite member, if any.
fn evolve(
    objective: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<f64>, f64)> {
    let dim = lower.len();
    let pop_size = config.population.max(4);
    let fitness = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut population: Vec<Vec<f64>> = (0..pop_size)
        .map(|_| {
            (0..dim)
                .map(|d| rng.gen_range(lower[d]..=upper[d]))
                .collect()
        })
        .collect();
    let mut values: Vec<f64> = population.iter().map(|x| fitness(x)).collect();

    for _ in 0..config.generations {
        for i in 0..pop_size {
            let mut pick = || loop {
                let k = rng.gen_range(0..pop_size);
                if k != i {
                    return k;
                }
            };
            let (a, b, c) = (pick(), pick(), pick());
            let forced = rng.gen_range(0..dim);
            let mut trial = population[i].clone();
            for d in 0..dim {
                if d == forced || rng.gen::<f64>() < CROSSOVER_RATE {
                    let v = population[a][d]
                        + config.mutation_scale * (population[b][d] - population[c][d]);
                    trial[d] = v.clamp(lower[d], upper[d]);
                }
            }
            let tv = fitness(&trial);
            if tv < values[i] {
                population[i] = trial;
                values[i] = tv;
            }
        }
    }

    let mut best_idx = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_finite() && best_idx.map_or(true, |b: usize| *v < values[b]) {
            best_idx = Some(i);
        }
    }
    best_idx.map(|i| (population[i].clone(), values[i]))
}

/// Golden-section refinement along each coordinate at shrinking radii.
fn polish(
    objective: &dyn Fn(&[f64]) -> f64,
    lower: &[f64],
    upper: &[f64],
    mut point: Vec<f64>,
    mut value: f64,
) -> (Vec<f64>, f64) {
    let inv_phi = 0.618_033_988_749_894_8;
    for radius_frac in POLISH_RADII {
        for d in 0..point.len() {
            let span = upper[d] - lower[d];
            if span == 0.0 {
                continue;
            }
            let radius = span * radius_frac;
            let mut a = (point[d] - radius).max(lower[d]);
            let mut b = (point[d] + radius).min(upper[d]);
            let eval_at = |coord: f64, point: &mut Vec<f64>| {
                let old = point[d];
                point[d] = coord;
                let v = objective(point);
                point[d] = old;
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            };
            let mut c = b - inv_phi * (b - a);
            let mut e = a + inv_phi * (b - a);
            let mut fc = eval_at(c, &mut point);
            let mut fe = eval_at(e, &mut point);
            for _ in 0..GOLDEN_STEPS {
                if fc <= fe {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - inv_phi * (b - a);
                    fc = eval_at(c, &mut point);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + inv_phi * (b - a);
                    fe = eval_at(e, &mut point);
                }
            }
            let (cand, cand_val) = if fc <= fe { (c, fc) } else { (e, fe) };
            if cand_val < value {
                point[d] = cand;
                value = cand_val;
            }
        }
    }
    (point, value)
}
