//! Candidate joint actions for one power: the action space search runs on.
//!
//! Each unit keeps its `max_per_unit` most probable orders under the anchor
//! (ties broken by the order's short text). When the product of the kept
//! lists is small the candidate set is simply exhaustive; otherwise the
//! anchor's own argmax joint is kept and the rest are sampled unit by unit
//! from the kept lists, with an ε-uniform exploration mix. The result is
//! duplicate-free, canonically sorted, and a pure function of the seed.

use std::collections::BTreeSet;

use entente_engine::grammar::{render_order, Dialect};
use entente_engine::legal::legal_orders;
use entente_engine::map::MapSpec;
use entente_engine::{GameState, JointAction, Order, Power};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anchor::AnchorPolicy;
use crate::error::SolverError;
use crate::math::sample_index;
use crate::search::SearchConfig;
use crate::seeds::mix;

/// Stream label separating candidate sampling from other consumers of the
/// run seed.
const CANDIDATE_STREAM: u64 = 0x63616e_64696461;

/// Per-unit order menus for `power` in a movement phase: each unit keeps
/// its `config.max_per_unit` most probable orders under the anchor (ties
/// broken by short text), with probabilities renormalized over the kept
/// list, best first. Units appear in canonical province order. This is the
/// truncation that both candidate generation and prompt emission run on.
pub fn unit_menus(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    anchor: &AnchorPolicy,
    config: &SearchConfig,
) -> Result<Vec<Vec<(Order, f64)>>, SolverError> {
    let menus = legal_orders(map, state, power)?;
    let per_unit = config.max_per_unit.max(1);
    let mut tops: Vec<Vec<(Order, f64)>> = Vec::new();
    for menu in menus.values() {
        let probs = anchor.unit_distribution(map, state, power, menu);
        let mut ranked: Vec<(Order, f64)> = menu.iter().copied().zip(probs).collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1).expect("anchor probabilities are finite").then_with(|| {
                render_order(map, &a.0, Dialect::Short)
                    .cmp(&render_order(map, &b.0, Dialect::Short))
            })
        });
        ranked.truncate(per_unit);
        let z: f64 = ranked.iter().map(|r| r.1).sum();
        for r in &mut ranked {
            r.1 /= z;
        }
        tops.push(ranked);
    }
    Ok(tops)
}

/// Enumerates or samples up to `config.n_candidates` legal joint actions
/// for `power`, ranked and drawn by `anchor`. A power with no units gets
/// the single empty joint action.
pub fn generate_candidates(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    anchor: &AnchorPolicy,
    config: &SearchConfig,
) -> Result<Vec<JointAction>, SolverError> {
    let tops = unit_menus(map, state, power, anchor, config)?;
    if tops.is_empty() {
        return Ok(vec![JointAction::new(power, Vec::new())?]);
    }
    let target = config.n_candidates.max(1);

    let product = tops.iter().map(Vec::len).fold(1usize, usize::saturating_mul);
    let mut chosen: BTreeSet<Vec<Order>> = BTreeSet::new();
    if product <= target {
        for_each_combo(&tops, |combo| {
            chosen.insert(combo);
            true
        });
    } else {
        chosen.insert(tops.iter().map(|t| t[0].0).collect());
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix(mix(config.seed, CANDIDATE_STREAM), u64::from(power.0)));
        let mut attempts = 0;
        while chosen.len() < target && attempts < 100 * target {
            attempts += 1;
            let mut combo = Vec::with_capacity(tops.len());
            for top in &tops {
                let idx = if rng.gen::<f64>() < config.nash_explore {
                    rng.gen_range(0..top.len())
                } else {
                    let probs: Vec<f64> = top.iter().map(|r| r.1).collect();
                    sample_index(&probs, &mut rng)
                };
                combo.push(top[idx].0);
            }
            chosen.insert(combo);
        }
        // Pathologically skewed anchors can starve sampling; top up from
        // the plain product enumeration.
        if chosen.len() < target {
            for_each_combo(&tops, |combo| {
                chosen.insert(combo);
                chosen.len() < target
            });
        }
    }

    chosen
        .into_iter()
        .map(|orders| JointAction::new(power, orders).map_err(SolverError::from))
        .collect()
}

/// Calls `f` for each element of the cartesian product of the kept order
/// lists, in lexicographic rank order, until `f` returns false.
fn for_each_combo(tops: &[Vec<(Order, f64)>], mut f: impl FnMut(Vec<Order>) -> bool) {
    let mut idx = vec![0usize; tops.len()];
    loop {
        let combo: Vec<Order> = idx.iter().zip(tops).map(|(&i, t)| t[i].0).collect();
        if !f(combo) {
            return;
        }
        let mut d = tops.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < tops[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}
