//! Monte-Carlo utility estimation: apply a joint move profile, roll the
//! game forward under the anchor, and score the result.
//!
//! The score is the sum-of-squares share `C_i² / Σ_j C_j²` of final
//! supply-center counts, except that a power at or above the win threshold
//! takes the whole pot (1 for the winner, 0 for the rest). Rollouts sample
//! every power's moves and retreats from the anchor; winter builds fill a
//! random selection of open home centers and owed disbands are left to the
//! adjudicator's deterministic default. With horizon 0 no sampling happens
//! at all: pending retreats settle as disbands and the post-adjudication
//! counts are scored directly.

use std::collections::BTreeMap;

use entente_engine::legal::{build_allowance, legal_adjustments};
use entente_engine::map::MapSpec;
use entente_engine::phase::step;
use entente_engine::{EngineError, GameState, JointAction, Order, Power};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anchor::AnchorPolicy;
use crate::error::SolverError;
use crate::seeds::mix;

/// The outcome of [`estimate_utility`]: one value per power.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityEstimate {
    /// Mean score per power, in map power order; sums to 1.
    pub values: Vec<f64>,
    /// Rollouts actually played; 1 when the outcome is deterministic.
    pub rollouts_used: u32,
    /// Whether every rollout played the full horizon without a win.
    pub horizon_reached: bool,
}

/// Sum-of-squares scores `C_i² / Σ_j C_j²` from supply-center counts.
///
/// Errors when every count is zero.
pub fn sos_score(counts: &[usize]) -> Result<Vec<f64>, SolverError> {
    let total: u64 = counts.iter().map(|&c| (c * c) as u64).sum();
    if total == 0 {
        return Err(SolverError::AllZeroCounts);
    }
    Ok(counts.iter().map(|&c| ((c * c) as u64) as f64 / total as f64).collect())
}

/// Applies `joints` to a movement-phase state, rolls `horizon` further
/// movement phases with all powers playing from `anchor`, and returns the
/// mean score over `rollouts` independent rollouts.
///
/// A win ends a rollout immediately with the winner scoring 1. The result
/// is a pure function of the arguments: rollout `i` draws from a stream
/// seeded by `mix(seed, i)` and the mean is accumulated in a fixed order.
pub fn estimate_utility(
    map: &MapSpec,
    state: &GameState,
    joints: &BTreeMap<Power, JointAction>,
    anchor: &AnchorPolicy,
    rollouts: u32,
    horizon: u32,
    seed: u64,
) -> Result<UtilityEstimate, SolverError> {
    if !state.phase.is_move() {
        return Err(EngineError::WrongPhase { expected: "movement", found: state.phase.name() }
            .into());
    }
    let lists: BTreeMap<Power, Vec<Order>> =
        joints.iter().map(|(&p, j)| (p, j.orders().to_vec())).collect();
    let after = step(map, state, &lists)?;

    if horizon == 0 {
        // Deterministic: unordered retreats disband, and winter cannot
        // change center ownership, so counts are already final.
        let mut settled = after;
        while settled.phase.is_retreat() {
            settled = step(map, &settled, &BTreeMap::new())?;
        }
        let (values, horizon_reached) = score(map, &settled)?;
        return Ok(UtilityEstimate { values, rollouts_used: 1, horizon_reached });
    }

    let rollouts = rollouts.max(1);
    let mut sums = vec![0.0; map.power_count()];
    let mut all_reached = true;
    for i in 0..rollouts {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, u64::from(i)));
        let (values, reached) = rollout(map, after.clone(), anchor, horizon, &mut rng)?;
        for (acc, v) in sums.iter_mut().zip(&values) {
            *acc += v;
        }
        all_reached &= reached;
    }
    for v in &mut sums {
        *v /= f64::from(rollouts);
    }
    Ok(UtilityEstimate { values: sums, rollouts_used: rollouts, horizon_reached: all_reached })
}

/// Plays one rollout from a freshly adjudicated state to its value vector.
/// Returns the values and whether the full horizon was played.
fn rollout(
    map: &MapSpec,
    start: GameState,
    anchor: &AnchorPolicy,
    horizon: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, bool), SolverError> {
    let mut state = settle_to_move(map, start, anchor, rng)?;
    for _ in 0..horizon {
        if state.winner(map).is_some() {
            break;
        }
        let mut orders = BTreeMap::new();
        for power in map.all_powers() {
            orders.insert(power, anchor.sample_moves(map, &state, power, rng)?);
        }
        state = step(map, &state, &orders)?;
        state = settle_to_move(map, state, anchor, rng)?;
    }
    score(map, &state)
}

/// Advances through any retreat and winter phases until a movement phase:
/// retreats are sampled from the anchor, builds fill a random selection of
/// open home centers, owed disbands fall to the adjudicator's default.
/// A movement-phase input is returned unchanged.
pub fn settle_to_move<R: Rng>(
    map: &MapSpec,
    mut state: GameState,
    anchor: &AnchorPolicy,
    rng: &mut R,
) -> Result<GameState, SolverError> {
    while !state.phase.is_move() {
        let mut orders = BTreeMap::new();
        for power in map.all_powers() {
            let list = if state.phase.is_retreat() {
                anchor.sample_retreats(map, &state, power, rng)?
            } else {
                winter_orders(map, &state, power, rng)?
            };
            orders.insert(power, list);
        }
        state = step(map, &state, &orders)?;
    }
    Ok(state)
}

/// Build orders for a rollout winter: shuffle the legal build sites and
/// take up to the allowance, at most one per province. Powers owing
/// disbands submit nothing.
fn winter_orders<R: Rng>(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    rng: &mut R,
) -> Result<Vec<Order>, SolverError> {
    let allowance = build_allowance(map, state, power);
    if allowance <= 0 {
        return Ok(Vec::new());
    }
    let mut sites: Vec<Order> = legal_adjustments(map, state, power)?
        .into_iter()
        .filter(|o| matches!(o, Order::Build { .. }))
        .collect();
    sites.shuffle(rng);
    let mut taken = Vec::new();
    let mut used = Vec::new();
    for order in sites {
        if taken.len() == allowance as usize {
            break;
        }
        let base = map.base(order.actor().expect("builds have a site").province);
        if !used.contains(&base) {
            used.push(base);
            taken.push(order);
        }
    }
    Ok(taken)
}

/// Scores a settled state: the winner takes 1 if there is one, otherwise
/// sum-of-squares shares. The flag is false when a winner ended the game.
fn score(map: &MapSpec, state: &GameState) -> Result<(Vec<f64>, bool), SolverError> {
    match state.winner(map) {
        Some(winner) => {
            let mut values = vec![0.0; map.power_count()];
            values[winner.0 as usize] = 1.0;
            Ok((values, false))
        }
        None => Ok((sos_score(&state.center_counts(map))?, true)),
    }
}
