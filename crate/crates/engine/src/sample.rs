//! Seeded random states and order profiles for stress tests.
//!
//! The generators draw from the full legal envelope: any terrain-compatible
//! unit placement and any legal order. Profiles can be thinned to a move
//! cap so the exhaustive reference resolver stays affordable.

use std::collections::BTreeMap;

use rand::prelude::*;

use crate::legal::legal_orders;
use crate::map::{MapSpec, Power, UnitKind};
use crate::order::{JointAction, Order};
use crate::state::{GameState, Phase, Unit};

/// Places a unit on roughly `density` of the base provinces, with a uniform
/// power and a kind the terrain admits (fleets go to a random named coast
/// where the province has them). Supply-center ownership stays at the map's
/// opening assignment.
pub fn random_state<R: Rng>(map: &MapSpec, density: f64, rng: &mut R) -> GameState {
    let mut units: Vec<Unit> = Vec::new();
    for p in map.all_nodes() {
        let spec = map.province(p);
        if spec.coast_of.is_some() || !rng.gen_bool(density) {
            continue;
        }
        let mut placements = Vec::new();
        if map.can_occupy(UnitKind::Army, p) {
            placements.push((UnitKind::Army, p));
        }
        if map.can_occupy(UnitKind::Fleet, p) {
            placements.push((UnitKind::Fleet, p));
        } else if !spec.coasts.is_empty() {
            let coast = spec.coasts[rng.gen_range(0..spec.coasts.len())];
            placements.push((UnitKind::Fleet, coast));
        }
        let &(kind, location) = placements.choose(rng).expect("every province admits a kind");
        let power = Power(rng.gen_range(0..map.power_count()) as u8);
        units.push(Unit { power, kind, location });
    }
    units.sort_by_key(|u| u.location);
    let state = GameState {
        year: 1902,
        phase: Phase::SpringMove,
        units,
        sc_owner: GameState::initial(map).sc_owner,
        dislodged: Vec::new(),
        last_orders: BTreeMap::new(),
    };
    debug_assert!(state.validate(map).is_ok());
    state
}

/// Samples one legal order per unit, then demotes random moves to holds
/// until at most `move_cap` moves remain.
pub fn random_profile<R: Rng>(
    map: &MapSpec,
    state: &GameState,
    move_cap: usize,
    rng: &mut R,
) -> BTreeMap<Power, JointAction> {
    let mut picked: Vec<(Power, Order)> = Vec::new();
    for power in map.all_powers() {
        for (_, options) in legal_orders(map, state, power).expect("movement phase") {
            let order = options[rng.gen_range(0..options.len())];
            picked.push((power, order));
        }
    }
    let mut movers: Vec<usize> =
        (0..picked.len()).filter(|&i| matches!(picked[i].1, Order::Move { .. })).collect();
    movers.shuffle(rng);
    while movers.len() > move_cap {
        let i = movers.pop().expect("list is non-empty");
        if let Order::Move { unit, .. } = picked[i].1 {
            picked[i].1 = Order::Hold { unit };
        }
    }
    let mut grouped: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
    for (power, order) in picked {
        grouped.entry(power).or_default().push(order);
    }
    grouped
        .into_iter()
        .map(|(p, orders)| (p, JointAction::new(p, orders).expect("orders are one per unit")))
        .collect()
}
