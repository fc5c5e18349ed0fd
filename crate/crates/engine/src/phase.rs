//! Retreat and winter adjudication, center ownership, and the phase driver.
//!
//! Retreats: each dislodged unit retreats to one of its open options or
//! disbands; two or more retreats into the same province disband them all;
//! a missing order disbands silently, an illegal one is coerced to disband.
//!
//! Winter: a power over its center count disbands; submitted disbands apply
//! first in canonical order, and any remainder falls on the unit farthest
//! (by the kind-agnostic province graph) from the power's nearest owned home
//! center, farthest first, ties to the lowest province index. A power under
//! its count builds in vacant owned home centers, up to its allowance, and
//! may waive. Center ownership updates once per year, after the fall
//! retreat: an occupied center passes to its occupant, an empty one keeps
//! its owner.
//!
//! [`step`] runs one phase with generic per-power order lists and skips
//! retreat phases with nothing to retreat.

use std::collections::{BTreeMap, HashSet};

use crate::error::EngineError;
use crate::legal::{build_allowance, validate_order, Verdict};
use crate::map::{MapSpec, Power, Province};
use crate::order::{JointAction, Order, UnitRef};
use crate::resolve::{adjudicate_moves, Coercion, Resolution};
use crate::state::{GameState, Phase, Unit};

/// Applies the yearly ownership rule to every supply center.
pub fn update_ownership(map: &MapSpec, state: &mut GameState) {
    for p in map.supply_centers() {
        if let Some(u) = state.unit_at(map, p) {
            let power = u.power;
            state.sc_owner.insert(p, Some(power));
        }
    }
}

/// Advances a retreat-phase state whose dislodgements are fully settled.
fn leave_retreat_phase(map: &MapSpec, state: &mut GameState) {
    debug_assert!(state.dislodged.is_empty());
    match state.phase {
        Phase::SpringRetreat => state.phase = Phase::FallMove,
        Phase::FallRetreat => {
            update_ownership(map, state);
            state.phase = Phase::WinterAdjust;
        }
        _ => unreachable!("not a retreat phase"),
    }
}

/// Adjudicates a retreat phase.
pub fn adjudicate_retreats(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, Vec<Order>>,
) -> Result<Resolution, EngineError> {
    if !state.phase.is_retreat() {
        return Err(EngineError::WrongPhase { expected: "retreat", found: state.phase.name() });
    }
    let mut coercions = Vec::new();
    // Destination node per dislodged unit (None disbands), plus the record
    // of what each power effectively ordered.
    let mut dest: Vec<Option<Province>> = vec![None; state.dislodged.len()];
    let mut effective: Vec<Order> = state
        .dislodged
        .iter()
        .map(|d| Order::Disband { unit: UnitRef { kind: d.unit.kind, province: d.unit.location } })
        .collect();
    for (&power, list) in orders {
        for order in list {
            match validate_order(map, state, power, order) {
                Verdict::Legal => {
                    let unit = order.actor().expect("retreat orders have an actor");
                    let idx = state
                        .dislodged
                        .iter()
                        .position(|d| d.unit.location == unit.province)
                        .expect("legal retreat actor is dislodged");
                    if let Order::Retreat { dest: d, .. } = *order {
                        dest[idx] = Some(d);
                    }
                    effective[idx] = *order;
                }
                Verdict::Illegal(reason) => {
                    coercions.push(Coercion { power, submitted: *order, reason });
                }
            }
        }
    }

    // Retreats colliding at a base province all disband.
    let collided: Vec<bool> = (0..dest.len())
        .map(|i| {
            dest[i].is_some_and(|di| {
                (0..dest.len())
                    .any(|j| j != i && dest[j].is_some_and(|dj| map.base(dj) == map.base(di)))
            })
        })
        .collect();
    for (slot, &hit) in dest.iter_mut().zip(&collided) {
        if hit {
            *slot = None;
        }
    }

    let mut succeeded = BTreeMap::new();
    let mut new_state = state.clone();
    new_state.dislodged.clear();
    for (i, d) in state.dislodged.iter().enumerate() {
        let outcome = match (dest[i], &effective[i]) {
            (Some(node), _) => {
                new_state.units.push(Unit { location: node, ..d.unit });
                true
            }
            // A submitted disband achieves its effect; a collision does not.
            (None, Order::Disband { .. }) => true,
            (None, _) => false,
        };
        succeeded.insert(d.unit.location, outcome);
    }
    new_state.units.sort_by_key(|u| u.location);
    let mut last: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
    for (d, order) in state.dislodged.iter().zip(&effective) {
        last.entry(d.unit.power).or_default().push(*order);
    }
    new_state.last_orders = last;
    leave_retreat_phase(map, &mut new_state);

    Ok(Resolution { succeeded, dislodgements: Vec::new(), new_state, coercions })
}

/// The unit a power must disband by default: farthest from its nearest
/// owned home center on the union province graph, ties to the lowest
/// province index. Unreachable units count as infinitely far.
fn default_disband(map: &MapSpec, state: &GameState, power: Power) -> Option<Province> {
    let homes: HashSet<Province> = map
        .supply_centers()
        .filter(|&p| {
            map.province(p).home_of == Some(power) && state.sc_owner.get(&p) == Some(&Some(power))
        })
        .collect();
    state
        .units_of(power)
        .map(|u| {
            let dist = map.union_distance(map.base(u.location), &homes).unwrap_or(usize::MAX);
            (dist, u.location)
        })
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, loc)| loc)
}

/// Adjudicates a winter adjustment phase.
pub fn adjudicate_builds(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, Vec<Order>>,
) -> Result<Resolution, EngineError> {
    if state.phase != Phase::WinterAdjust {
        return Err(EngineError::WrongPhase { expected: "winter", found: state.phase.name() });
    }
    let mut coercions = Vec::new();
    let mut succeeded = BTreeMap::new();
    let mut new_state = state.clone();
    let mut last: BTreeMap<Power, Vec<Order>> = BTreeMap::new();

    for power in map.all_powers() {
        let allowance = build_allowance(map, state, power);
        let submitted = orders.get(&power).map(Vec::as_slice).unwrap_or(&[]);
        let mut effective = Vec::new();

        // Validate against the starting state; cross-order interactions
        // (duplicate sites, exceeded allowance) are handled below.
        let mut legal: Vec<Order> = Vec::new();
        for order in submitted {
            match validate_order(map, state, power, order) {
                Verdict::Legal => legal.push(*order),
                Verdict::Illegal(reason) => {
                    coercions.push(Coercion { power, submitted: *order, reason })
                }
            }
        }
        legal.sort_by_key(Order::canonical_key);

        if allowance < 0 {
            let mut owed = (-allowance) as usize;
            let mut removed: HashSet<Province> = HashSet::new();
            for order in legal {
                let Order::Disband { unit } = order else { unreachable!("validated winter order") };
                if owed == 0 {
                    coercions.push(Coercion {
                        power,
                        submitted: order,
                        reason: "more disbands than owed".to_string(),
                    });
                    continue;
                }
                if removed.insert(unit.province) {
                    owed -= 1;
                    succeeded.insert(unit.province, true);
                    effective.push(order);
                }
            }
            while owed > 0 {
                let probe = GameState {
                    units: new_state
                        .units
                        .iter()
                        .filter(|u| !removed.contains(&u.location))
                        .copied()
                        .collect(),
                    ..new_state.clone()
                };
                let loc = default_disband(map, &probe, power)
                    .expect("a power owing disbands has units");
                removed.insert(loc);
                owed -= 1;
                let unit = probe
                    .unit_at(map, map.base(loc))
                    .expect("default disband targets a unit");
                effective.push(Order::Disband {
                    unit: UnitRef { kind: unit.kind, province: unit.location },
                });
            }
            new_state.units.retain(|u| !removed.contains(&u.location));
        } else if allowance > 0 {
            let mut left = allowance as usize;
            let mut built: Vec<Province> = Vec::new();
            for order in legal {
                match order {
                    Order::Build { unit } => {
                        if left == 0 {
                            coercions.push(Coercion {
                                power,
                                submitted: order,
                                reason: "more builds than the allowance".to_string(),
                            });
                            continue;
                        }
                        if built.iter().any(|&b| map.base(b) == map.base(unit.province)) {
                            coercions.push(Coercion {
                                power,
                                submitted: order,
                                reason: "duplicate build site".to_string(),
                            });
                            continue;
                        }
                        left -= 1;
                        built.push(unit.province);
                        succeeded.insert(unit.province, true);
                        effective.push(order);
                        new_state.units.push(Unit {
                            power,
                            kind: unit.kind,
                            location: unit.province,
                        });
                    }
                    Order::Waive => effective.push(order),
                    _ => unreachable!("validated winter order"),
                }
            }
            // Unused allowance waives silently.
            for _ in 0..left {
                if !effective.contains(&Order::Waive) {
                    effective.push(Order::Waive);
                }
            }
        }

        if !effective.is_empty() {
            effective.sort_by_key(Order::canonical_key);
            effective.dedup();
            last.insert(power, effective);
        }
    }

    new_state.units.sort_by_key(|u| u.location);
    new_state.last_orders = last;
    new_state.year += 1;
    new_state.phase = Phase::SpringMove;

    Ok(Resolution { succeeded, dislodgements: Vec::new(), new_state, coercions })
}

/// Runs one phase from generic per-power order lists and returns the next
/// state. Movement orders are grouped into joint actions; a retreat phase
/// with nothing dislodged is skipped without consuming orders.
pub fn step(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, Vec<Order>>,
) -> Result<GameState, EngineError> {
    match state.phase {
        Phase::SpringMove | Phase::FallMove => {
            let mut joints = BTreeMap::new();
            for (&power, list) in orders {
                joints.insert(power, JointAction::new(power, list.clone())?);
            }
            let mut next = adjudicate_moves(map, state, &joints)?.new_state;
            if next.dislodged.is_empty() {
                leave_retreat_phase(map, &mut next);
            }
            Ok(next)
        }
        Phase::SpringRetreat | Phase::FallRetreat => {
            Ok(adjudicate_retreats(map, state, orders)?.new_state)
        }
        Phase::WinterAdjust => Ok(adjudicate_builds(map, state, orders)?.new_state),
    }
}
