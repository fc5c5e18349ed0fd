//! Legal order enumeration and validation.
//!
//! Movement phases admit, per unit: hold, every adjacent kind-legal move,
//! support-hold for every other unit the supporter could reach, and
//! support-move for every adjacent move another unit could make into a
//! province the supporter could reach (never into the supporter's own
//! province). Retreat phases admit disband plus the precomputed retreat
//! options. Winter admits disbands when over the center count, and builds
//! in vacant owned home centers plus waive when under it.
//!
//! Lists are sorted by their short order text and deduplicated, so every
//! enumeration is canonical and stable across runs.

use std::collections::BTreeMap;

use crate::error::EngineError;
use crate::grammar::{render_order, Dialect};
use crate::map::{MapSpec, Power, Province, Terrain, UnitKind};
use crate::order::{Order, UnitRef};
use crate::state::{GameState, Phase, Unit};

/// Outcome of checking a single submitted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Legal,
    Illegal(String),
}

impl Verdict {
    pub fn is_legal(&self) -> bool {
        matches!(self, Verdict::Legal)
    }
}

fn sort_canonical(map: &MapSpec, orders: &mut Vec<Order>) {
    orders.sort_by_key(|o| render_order(map, o, Dialect::Short));
    orders.dedup();
}

/// All legal orders for one unit in a movement phase.
pub fn unit_move_orders(map: &MapSpec, state: &GameState, unit: &Unit) -> Vec<Order> {
    let me = UnitRef { kind: unit.kind, province: unit.location };
    let my_base = map.base(unit.location);
    let mut out = vec![Order::Hold { unit: me }];
    for &dest in map.adjacent(unit.location, unit.kind) {
        out.push(Order::Move { unit: me, dest });
    }
    for other in &state.units {
        let other_base = map.base(other.location);
        if other_base == my_base {
            continue;
        }
        if map.can_reach(unit.kind, unit.location, other_base) {
            out.push(Order::SupportHold { unit: me, target_kind: other.kind, target: other_base });
        }
        for &dest in map.adjacent(other.location, other.kind) {
            let dest_base = map.base(dest);
            if dest_base == my_base || dest_base == other_base {
                continue;
            }
            if map.can_reach(unit.kind, unit.location, dest_base) {
                out.push(Order::SupportMove {
                    unit: me,
                    moving_kind: other.kind,
                    origin: other_base,
                    dest: dest_base,
                });
            }
        }
    }
    sort_canonical(map, &mut out);
    out
}

/// Legal orders for every unit of `power` in a movement phase, keyed by the
/// node the unit occupies.
pub fn legal_orders(
    map: &MapSpec,
    state: &GameState,
    power: Power,
) -> Result<BTreeMap<Province, Vec<Order>>, EngineError> {
    if !state.phase.is_move() {
        return Err(EngineError::WrongPhase { expected: "movement", found: state.phase.name() });
    }
    let mut out = BTreeMap::new();
    for unit in state.units_of(power) {
        out.insert(unit.location, unit_move_orders(map, state, &unit));
    }
    Ok(out)
}

/// Legal orders for every dislodged unit of `power` in a retreat phase.
pub fn legal_retreats(
    map: &MapSpec,
    state: &GameState,
    power: Power,
) -> Result<BTreeMap<Province, Vec<Order>>, EngineError> {
    if !state.phase.is_retreat() {
        return Err(EngineError::WrongPhase { expected: "retreat", found: state.phase.name() });
    }
    let mut out = BTreeMap::new();
    for d in &state.dislodged {
        if d.unit.power != power {
            continue;
        }
        let me = UnitRef { kind: d.unit.kind, province: d.unit.location };
        let mut orders = vec![Order::Disband { unit: me }];
        for &dest in &d.retreat_options {
            orders.push(Order::Retreat { unit: me, dest });
        }
        sort_canonical(map, &mut orders);
        out.insert(d.unit.location, orders);
    }
    Ok(out)
}

/// Number of builds `power` may place this winter (negative means disbands
/// owed).
pub fn build_allowance(map: &MapSpec, state: &GameState, power: Power) -> i32 {
    let centers = state.center_counts(map)[power.0 as usize] as i32;
    let units = state.units_of(power).count() as i32;
    centers - units
}

/// Legal winter orders for `power`: disbands when over the center count,
/// builds in vacant owned home centers plus waive when under it, and
/// nothing when even.
pub fn legal_adjustments(
    map: &MapSpec,
    state: &GameState,
    power: Power,
) -> Result<Vec<Order>, EngineError> {
    if state.phase != Phase::WinterAdjust {
        return Err(EngineError::WrongPhase { expected: "winter", found: state.phase.name() });
    }
    let allowance = build_allowance(map, state, power);
    let mut out = Vec::new();
    if allowance < 0 {
        for unit in state.units_of(power) {
            out.push(Order::Disband { unit: UnitRef { kind: unit.kind, province: unit.location } });
        }
    } else if allowance > 0 {
        for site in build_sites(map, state, power) {
            out.push(Order::Build { unit: site });
        }
        out.push(Order::Waive);
    }
    sort_canonical(map, &mut out);
    Ok(out)
}

/// Buildable (kind, node) pairs: vacant home centers still owned by the
/// power. Fleets build on the named coasts of split-coast homes.
fn build_sites(map: &MapSpec, state: &GameState, power: Power) -> Vec<UnitRef> {
    let mut out = Vec::new();
    for p in map.supply_centers() {
        let spec = map.province(p);
        if spec.home_of != Some(power)
            || state.sc_owner.get(&p) != Some(&Some(power))
            || state.unit_at(map, p).is_some()
        {
            continue;
        }
        if spec.terrain != Terrain::Water {
            out.push(UnitRef { kind: UnitKind::Army, province: p });
        }
        if spec.coasts.is_empty() {
            if map.can_occupy(UnitKind::Fleet, p) {
                out.push(UnitRef { kind: UnitKind::Fleet, province: p });
            }
        } else {
            for &c in &spec.coasts {
                out.push(UnitRef { kind: UnitKind::Fleet, province: c });
            }
        }
    }
    out
}

/// Checks one submitted order against the current phase and board.
pub fn validate_order(map: &MapSpec, state: &GameState, power: Power, order: &Order) -> Verdict {
    match state.phase {
        Phase::SpringMove | Phase::FallMove => validate_move_order(map, state, power, order),
        Phase::SpringRetreat | Phase::FallRetreat => validate_retreat_order(map, state, power, order),
        Phase::WinterAdjust => validate_winter_order(map, state, power, order),
    }
}

fn own_unit_at(map: &MapSpec, state: &GameState, power: Power, unit: &UnitRef) -> Option<Unit> {
    state
        .unit_at(map, unit.province)
        .filter(|u| u.power == power && u.kind == unit.kind && u.location == unit.province)
}

fn validate_move_order(map: &MapSpec, state: &GameState, power: Power, order: &Order) -> Verdict {
    let unit = match order {
        Order::Hold { unit }
        | Order::Move { unit, .. }
        | Order::SupportHold { unit, .. }
        | Order::SupportMove { unit, .. } => unit,
        _ => return Verdict::Illegal("order kind not valid in a movement phase".to_string()),
    };
    let Some(u) = own_unit_at(map, state, power, unit) else {
        return Verdict::Illegal(format!(
            "no {} of this power in {}",
            unit.kind.noun(),
            map.province(unit.province).id
        ));
    };
    if unit_move_orders(map, state, &u).contains(order) {
        Verdict::Legal
    } else {
        Verdict::Illegal("not in the unit's legal order list".to_string())
    }
}

fn validate_retreat_order(map: &MapSpec, state: &GameState, power: Power, order: &Order) -> Verdict {
    let unit = match order {
        Order::Retreat { unit, .. } | Order::Disband { unit } => unit,
        _ => return Verdict::Illegal("order kind not valid in a retreat phase".to_string()),
    };
    let Some(d) = state
        .dislodged
        .iter()
        .find(|d| d.unit.power == power && d.unit.kind == unit.kind && d.unit.location == unit.province)
    else {
        return Verdict::Illegal(format!(
            "no dislodged {} of this power in {}",
            unit.kind.noun(),
            map.province(unit.province).id
        ));
    };
    match order {
        Order::Disband { .. } => Verdict::Legal,
        Order::Retreat { dest, .. } if d.retreat_options.contains(dest) => Verdict::Legal,
        _ => Verdict::Illegal("destination is not an open retreat option".to_string()),
    }
}

fn validate_winter_order(map: &MapSpec, state: &GameState, power: Power, order: &Order) -> Verdict {
    let allowance = build_allowance(map, state, power);
    match order {
        Order::Waive => {
            if allowance > 0 {
                Verdict::Legal
            } else {
                Verdict::Illegal("waive requires a positive build allowance".to_string())
            }
        }
        Order::Disband { unit } => {
            if allowance >= 0 {
                return Verdict::Illegal("no disbands owed".to_string());
            }
            if own_unit_at(map, state, power, unit).is_some() {
                Verdict::Legal
            } else {
                Verdict::Illegal(format!(
                    "no {} of this power in {}",
                    unit.kind.noun(),
                    map.province(unit.province).id
                ))
            }
        }
        Order::Build { unit } => {
            if allowance <= 0 {
                return Verdict::Illegal("no builds available".to_string());
            }
            if build_sites(map, state, power).contains(unit) {
                Verdict::Legal
            } else {
                Verdict::Illegal("not a vacant owned home center for that unit kind".to_string())
            }
        }
        _ => Verdict::Illegal("order kind not valid in winter".to_string()),
    }
}
