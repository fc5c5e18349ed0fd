//! Exhaustive reference resolver.
//!
//! Enumerates every success/failure assignment over the submitted moves,
//! keeps the assignments that are self-consistent under the strength rules,
//! and adjudicates with the unique maximal one (rotation cycles are the only
//! source of multiple consistent assignments, and the maximal assignment
//! turns them all on). This is a deliberately naive, independent
//! transcription of the rules, used to cross-check the fixed-point resolver;
//! it costs `2^moves` and is only meant for small boards.
//!
//! Input coercion is shared with the production resolver so both adjudicate
//! identical effective acts; everything downstream is recomputed here.

use std::collections::BTreeMap;

use crate::error::EngineError;
use crate::map::{MapSpec, Power, Province};
use crate::order::JointAction;
use crate::state::{Dislodged, GameState, Unit};

use super::{effective_by_power, intake, Act, Resolution};

const MAX_MOVES: usize = 20;

struct Board<'a> {
    map: &'a MapSpec,
    units: &'a [Unit],
    acts: &'a [Act],
    /// (unit index, origin base, dest node, dest base) per move order.
    moves: Vec<(usize, Province, Province, Province)>,
}

impl Board<'_> {
    fn base(&self, p: Province) -> Province {
        self.map.base(p)
    }

    fn occupant(&self, base: Province) -> Option<usize> {
        self.units.iter().position(|u| self.base(u.location) == base)
    }

    fn move_index_of_unit(&self, unit: usize) -> Option<usize> {
        self.moves.iter().position(|&(i, ..)| i == unit)
    }

    /// A support standing in `province` and directed into `target` is cut by
    /// any move into `province` from a province other than `target`.
    fn support_cut(&self, supporter: usize, target: Province) -> bool {
        let at = self.base(self.units[supporter].location);
        self.moves.iter().any(|&(_, origin, _, dest)| dest == at && origin != target)
    }

    /// Uncut supporters of move `m`, optionally excluding a defender's power.
    fn move_supporters(&self, m: usize, exclude: Option<Power>) -> u32 {
        let (_, origin, _, dest) = self.moves[m];
        self.acts
            .iter()
            .enumerate()
            .filter(|&(j, act)| {
                *act == Act::SupportMove { origin, dest }
                    && !self.support_cut(j, dest)
                    && exclude != Some(self.units[j].power)
            })
            .count() as u32
    }

    fn move_strength(&self, m: usize) -> u32 {
        1 + self.move_supporters(m, None)
    }

    fn attack_strength(&self, m: usize, defender: Power) -> u32 {
        1 + self.move_supporters(m, Some(defender))
    }

    /// Resistance of the unit standing in `base` once it is known to stay:
    /// 1 for a failed mover, otherwise 1 plus uncut hold supports.
    fn stay_strength(&self, o: usize) -> u32 {
        if self.move_index_of_unit(o).is_some() {
            return 1;
        }
        let b = self.base(self.units[o].location);
        1 + self
            .acts
            .iter()
            .enumerate()
            .filter(|&(j, act)| *act == Act::SupportHold { target: b } && !self.support_cut(j, b))
            .count() as u32
    }

    /// Whether move `m` enters its destination, taking every other move's
    /// outcome from `mask`.
    fn succeeds_under(&self, m: usize, mask: u32) -> bool {
        let (unit, origin_base, _, dest_base) = self.moves[m];
        for (k, &(_, _, _, other_dest)) in self.moves.iter().enumerate() {
            if k != m && other_dest == dest_base && self.move_strength(m) <= self.move_strength(k) {
                return false;
            }
        }
        let Some(o) = self.occupant(dest_base) else {
            return true;
        };
        let attacker = self.units[unit].power;
        let defender = self.units[o].power;
        match self.move_index_of_unit(o) {
            Some(om) if self.moves[om].3 == origin_base => {
                attacker != defender && self.attack_strength(m, defender) > self.move_strength(om)
            }
            Some(om) if mask & (1 << om) != 0 => true,
            Some(_) => attacker != defender && self.attack_strength(m, defender) > 1,
            None => attacker != defender && self.attack_strength(m, defender) > self.stay_strength(o),
        }
    }

    fn consistent(&self, mask: u32) -> bool {
        (0..self.moves.len()).all(|m| self.succeeds_under(m, mask) == (mask & (1 << m) != 0))
    }
}

/// Adjudicates a movement phase by full enumeration. Panics if more than
/// [`MAX_MOVES`] moves were submitted or if the maximal consistent
/// assignment is not unique.
pub fn adjudicate_moves_exhaustive(
    map: &MapSpec,
    state: &GameState,
    orders: &BTreeMap<Power, JointAction>,
) -> Result<Resolution, EngineError> {
    let intake = intake(map, state, orders)?;
    let moves: Vec<(usize, Province, Province, Province)> = intake
        .acts
        .iter()
        .enumerate()
        .filter_map(|(i, act)| match *act {
            Act::Move { dest } => {
                Some((i, map.base(state.units[i].location), dest, map.base(dest)))
            }
            _ => None,
        })
        .collect();
    assert!(
        moves.len() <= MAX_MOVES,
        "exhaustive resolver handles at most {MAX_MOVES} moves, got {}",
        moves.len()
    );
    let board = Board { map, units: &state.units, acts: &intake.acts, moves };

    let mut best: Option<u32> = None;
    let mut best_ties = 0u32;
    for mask in 0..(1u32 << board.moves.len()) {
        if board.consistent(mask) {
            match best {
                Some(b) if mask.count_ones() < b.count_ones() => {}
                Some(b) if mask.count_ones() == b.count_ones() => best_ties += 1,
                _ => {
                    best = Some(mask);
                    best_ties = 1;
                }
            }
        }
    }
    let mask = best.expect("at least one consistent assignment exists");
    assert_eq!(best_ties, 1, "maximal consistent assignment must be unique");

    // Outcome assembly, transcribed separately from the production resolver.
    let mut new_units = Vec::new();
    let mut dislodgements = Vec::new();
    for (i, u) in state.units.iter().enumerate() {
        if let Some(m) = board.move_index_of_unit(i) {
            if mask & (1 << m) != 0 {
                new_units.push(Unit { location: board.moves[m].2, ..*u });
                continue;
            }
        }
        let ub = map.base(u.location);
        let attacker = board
            .moves
            .iter()
            .enumerate()
            .find(|&(m, &(_, _, _, dest))| dest == ub && mask & (1 << m) != 0);
        match attacker {
            Some((_, &(_, origin, _, _))) => dislodgements.push((*u, origin)),
            None => new_units.push(*u),
        }
    }
    new_units.sort_by_key(|u| u.location);

    let vacated_by_standoff = |b: Province| -> bool {
        let inbound: Vec<usize> = (0..board.moves.len()).filter(|&m| board.moves[m].3 == b).collect();
        inbound.len() >= 2 && inbound.iter().all(|&m| mask & (1 << m) == 0)
    };
    let open_for = |origin: Province, d: Province| -> bool {
        let db = map.base(d);
        db != origin
            && !new_units.iter().any(|n| map.base(n.location) == db)
            && !vacated_by_standoff(db)
    };
    let dislodged: Vec<Dislodged> = dislodgements
        .iter()
        .map(|&(u, origin)| Dislodged {
            unit: u,
            attacker_origin: origin,
            retreat_options: map
                .adjacent(u.location, u.kind)
                .iter()
                .copied()
                .filter(|&d| open_for(origin, d))
                .collect(),
        })
        .collect();

    let mut succeeded = BTreeMap::new();
    for (i, u) in state.units.iter().enumerate() {
        let outcome = match intake.acts[i] {
            Act::Move { .. } => {
                let m = board.move_index_of_unit(i).expect("mover has a move record");
                mask & (1 << m) != 0
            }
            Act::Stay => !dislodgements.iter().any(|&(d, _)| d.location == u.location),
            Act::SupportMove { origin, dest } => {
                !board.support_cut(i, dest)
                    && board
                        .moves
                        .iter()
                        .any(|&(_, mo, _, md)| mo == origin && md == dest)
            }
            Act::SupportHold { target } => {
                !board.support_cut(i, target)
                    && board
                        .occupant(target)
                        .is_some_and(|o| board.move_index_of_unit(o).is_none())
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

    Ok(Resolution { succeeded, dislodgements, new_state, coercions: intake.coercions })
}
