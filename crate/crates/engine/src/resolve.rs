//! Movement-phase adjudication.
//!
//! Simultaneous moves resolve by strength comparison:
//!
//! 1. a move's strength is 1 plus its uncut matching supports; a stationary
//!    unit defends with 1 plus its uncut hold supports;
//! 2. a support is cut when any move targets the supporter's province from
//!    anywhere except the province the support is directed into; cuts do not
//!    depend on whether the cutting move succeeds;
//! 3. a move enters its destination only if its strength strictly exceeds
//!    every competing move into the same destination and the resistance of
//!    a unit that stays there; a head-to-head pair compares the attacker's
//!    strength against the defender's full move strength;
//! 4. equal top strengths bounce every contender;
//! 5. no move dislodges a unit of its own power, and supports contributed
//!    by the defender's power never count toward dislodging that defender;
//!    a failed mover defends its province with strength 1;
//! 6. a dislodged unit may retreat to an adjacent kind-legal province that
//!    is vacant after the turn, is not the dislodger's origin, and was not
//!    left vacant by a bounce between two or more moves.
//!
//! With no convoys, support cuts are a pure function of the submitted moves,
//! so the only inter-move dependency is vacating: a move into an occupied
//! province may need the occupant's own move resolved first. Those
//! dependencies are monotone, so the resolver iterates move statuses to a
//! fixed point; whatever remains undecided is exactly the set of closed
//! rotation cycles (any outside contender would have forced a decision via
//! the bounce rule), and rotations resolve as all-succeed.
//!
//! Illegal or unmatched submissions never abort adjudication: the offending
//! order is replaced by a hold and reported as a [`Coercion`].

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::EngineError;
use crate::legal::{validate_order, Verdict};
use crate::map::{MapSpec, Power, Province};
use crate::order::{JointAction, Order, UnitRef};
use crate::state::{Dislodged, GameState, Unit};

pub mod exhaustive;

/// A submitted order that was replaced by the phase default, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coercion {
    pub power: Power,
    pub submitted: Order,
    pub reason: String,
}

/// Outcome of adjudicating one phase.
#[derive(Debug, Clone)]
pub struct Resolution {
    /// Per ordered unit, keyed by the node it occupied: whether its order
    /// achieved its effect. Moves succeed by entering; supports succeed when
    /// uncut and applied to a matching act; everything else succeeds by
    /// surviving in place. Build sites appear under the build node.
    pub succeeded: BTreeMap<Province, bool>,
    /// Units dislodged this phase, with the base province their dislodger
    /// came from. Empty outside movement phases.
    pub dislodgements: Vec<(Unit, Province)>,
    pub new_state: GameState,
    pub coercions: Vec<Coercion>,
}

/// What a unit effectively does after coercion, at base-province granularity
/// for support targets and node granularity for move destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Act {
    Stay,
    Move { dest: Province },
    SupportHold { target: Province },
    SupportMove { origin: Province, dest: Province },
}

pub(crate) struct Intake {
    /// Effective act per unit, indexed like `state.units`.
    pub acts: Vec<Act>,
    /// Effective order per unit (the submitted one, or a hold).
    pub effective: Vec<Order>,
    pub coercions: Vec<Coercion>,
}

/// Validates submissions and maps them onto units; shared by the production
/// resolver and the exhaustive reference resolver so that both adjudicate
/// the same effective acts.
pub(crate) fn intake(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, JointAction>,
) -> Result<Intake, EngineError> {
    if !state.phase.is_move() {
        return Err(EngineError::WrongPhase { expected: "movement", found: state.phase.name() });
    }
    let mut acts = vec![Act::Stay; state.units.len()];
    let mut effective: Vec<Order> = state
        .units
        .iter()
        .map(|u| Order::Hold { unit: UnitRef { kind: u.kind, province: u.location } })
        .collect();
    let mut coercions = Vec::new();
    for (&power, joint) in orders {
        if usize::from(power.0) >= map.power_count() {
            return Err(EngineError::UnknownPower(format!("power #{}", power.0)));
        }
        for order in joint.orders() {
            match validate_order(map, state, power, order) {
                Verdict::Legal => {
                    let unit = order.actor().expect("legal movement orders have an actor");
                    let idx = state
                        .units
                        .iter()
                        .position(|u| u.location == unit.province)
                        .expect("legal order actor occupies the board");
                    acts[idx] = match *order {
                        Order::Move { dest, .. } => Act::Move { dest },
                        Order::SupportHold { target, .. } => Act::SupportHold { target },
                        Order::SupportMove { origin, dest, .. } => Act::SupportMove { origin, dest },
                        _ => Act::Stay,
                    };
                    effective[idx] = *order;
                }
                Verdict::Illegal(reason) => {
                    coercions.push(Coercion { power, submitted: *order, reason });
                }
            }
        }
    }
    Ok(Intake { acts, effective, coercions })
}

/// Groups the effective orders by power, in canonical order, for the record
/// of what each power did this phase.
pub(crate) fn effective_by_power(state: &GameState, effective: &[Order]) -> BTreeMap<Power, Vec<Order>> {
    let mut out: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
    for (unit, order) in state.units.iter().zip(effective) {
        out.entry(unit.power).or_default().push(*order);
    }
    out
}

struct MoveRec {
    unit: usize,
    origin_base: Province,
    dest_node: Province,
    dest_base: Province,
}

/// Adjudicates a movement phase. The returned state is in the following
/// retreat phase even when nothing was dislodged; [`crate::phase::step`]
/// skips empty retreat phases.
pub fn adjudicate_moves(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, JointAction>,
) -> Result<Resolution, EngineError> {
    let intake = intake(map, state, orders)?;
    Ok(resolve_acts(map, state, intake))
}

fn resolve_acts(map: &MapSpec, state: &GameState, intake: Intake) -> Resolution {
    let units = &state.units;
    let mut moves = Vec::new();
    let mut move_of: HashMap<usize, usize> = HashMap::new();
    for (i, act) in intake.acts.iter().enumerate() {
        if let Act::Move { dest } = *act {
            move_of.insert(i, moves.len());
            moves.push(MoveRec {
                unit: i,
                origin_base: map.base(units[i].location),
                dest_node: dest,
                dest_base: map.base(dest),
            });
        }
    }
    let occupant: HashMap<Province, usize> =
        units.iter().enumerate().map(|(i, u)| (map.base(u.location), i)).collect();

    let is_cut = |j: usize, target: Province| -> bool {
        let jb = map.base(units[j].location);
        moves.iter().any(|mv| mv.dest_base == jb && mv.origin_base != target)
    };

    // Uncut supports, attached to the move or base they assist.
    let mut sup_move: Vec<Vec<usize>> = moves.iter().map(|_| Vec::new()).collect();
    let mut sup_hold: HashMap<Province, Vec<usize>> = HashMap::new();
    for (j, act) in intake.acts.iter().enumerate() {
        match *act {
            Act::SupportMove { origin, dest } if !is_cut(j, dest) => {
                if let Some(mi) =
                    moves.iter().position(|mv| mv.origin_base == origin && mv.dest_base == dest)
                {
                    sup_move[mi].push(j);
                }
            }
            Act::SupportHold { target } if !is_cut(j, target) => {
                sup_hold.entry(target).or_default().push(j);
            }
            _ => {}
        }
    }

    let prevent: Vec<u32> = sup_move.iter().map(|s| 1 + s.len() as u32).collect();
    let attack_vs = |m: usize, defender: Power| -> u32 {
        1 + sup_move[m].iter().filter(|&&j| units[j].power != defender).count() as u32
    };
    let resistance = |o: usize| -> u32 {
        if move_of.contains_key(&o) {
            1
        } else {
            let b = map.base(units[o].location);
            1 + sup_hold.get(&b).map_or(0, |v| v.len() as u32)
        }
    };

    let eval = |m: usize, status: &[Option<bool>]| -> Option<bool> {
        let mv = &moves[m];
        for (k, other) in moves.iter().enumerate() {
            if k != m && other.dest_base == mv.dest_base && prevent[m] <= prevent[k] {
                return Some(false);
            }
        }
        let Some(&o) = occupant.get(&mv.dest_base) else {
            return Some(true);
        };
        let attacker = units[mv.unit].power;
        let defender = units[o].power;
        if let Some(&om) = move_of.get(&o) {
            if moves[om].dest_base == mv.origin_base {
                return Some(attacker != defender && attack_vs(m, defender) > prevent[om]);
            }
            match status[om] {
                Some(true) => Some(true),
                Some(false) => Some(attacker != defender && attack_vs(m, defender) > 1),
                None => None,
            }
        } else {
            Some(attacker != defender && attack_vs(m, defender) > resistance(o))
        }
    };

    let mut status: Vec<Option<bool>> = vec![None; moves.len()];
    loop {
        let mut changed = false;
        for m in 0..moves.len() {
            if status[m].is_none() {
                if let Some(v) = eval(m, &status) {
                    status[m] = Some(v);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Whatever survives the fixed point is a closed rotation; it succeeds.
    let ok: Vec<bool> = status.into_iter().map(|s| s.unwrap_or(true)).collect();

    let successful_into: HashMap<Province, usize> = moves
        .iter()
        .enumerate()
        .filter(|&(m, _)| ok[m])
        .map(|(m, mv)| (mv.dest_base, m))
        .collect();
    let mut inbound: HashMap<Province, u32> = HashMap::new();
    for mv in &moves {
        *inbound.entry(mv.dest_base).or_insert(0) += 1;
    }
    let standoff = |b: Province| -> bool {
        inbound.get(&b).copied().unwrap_or(0) >= 2 && !successful_into.contains_key(&b)
    };

    let mut new_units = Vec::new();
    let mut dislodgements = Vec::new();
    for (i, u) in units.iter().enumerate() {
        if let Some(&mi) = move_of.get(&i) {
            if ok[mi] {
                new_units.push(Unit { location: moves[mi].dest_node, ..*u });
                continue;
            }
        }
        match successful_into.get(&map.base(u.location)) {
            Some(&am) => dislodgements.push((*u, moves[am].origin_base)),
            None => new_units.push(*u),
        }
    }
    new_units.sort_by_key(|u| u.location);
    let post_bases: HashSet<Province> = new_units.iter().map(|u| map.base(u.location)).collect();

    let dislodged = dislodgements
        .iter()
        .map(|&(u, origin)| {
            let retreat_options = map
                .adjacent(u.location, u.kind)
                .iter()
                .copied()
                .filter(|&d| {
                    let db = map.base(d);
                    !post_bases.contains(&db) && db != origin && !standoff(db)
                })
                .collect();
            Dislodged { unit: u, attacker_origin: origin, retreat_options }
        })
        .collect();

    let mut succeeded = BTreeMap::new();
    let dislodged_units: HashSet<Province> = dislodgements.iter().map(|&(u, _)| u.location).collect();
    for (i, u) in units.iter().enumerate() {
        let outcome = match intake.acts[i] {
            Act::Move { .. } => ok[move_of[&i]],
            Act::Stay => !dislodged_units.contains(&u.location),
            Act::SupportMove { .. } => sup_move.iter().any(|v| v.contains(&i)),
            Act::SupportHold { target } => {
                sup_hold.get(&target).is_some_and(|v| v.contains(&i))
                    && occupant.get(&target).is_some_and(|o| !move_of.contains_key(o))
            }
        };
        succeeded.insert(u.location, outcome);
    }

    let new_state = GameState {
        year: state.year,
        phase: state.phase.retreat_phase().expect("movement phase precedes a retreat phase"),
        units: new_units,
        sc_owner: state.sc_owner.clone(),
        dislodged,
        last_orders: effective_by_power(state, &intake.effective),
    };

    Resolution { succeeded, dislodgements, new_state, coercions: intake.coercions }
}
