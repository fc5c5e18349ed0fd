//! Orders and per-power joint actions.

use crate::error::EngineError;
use crate::map::{Power, Province, UnitKind};

/// The unit an order is issued to (or, for builds, the unit to be created).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRef {
    pub kind: UnitKind,
    pub province: Province,
}

/// A single order. Support orders name the supported unit's kind so that
/// they render and re-parse without consulting the board.
///
/// Move destinations and actor locations are graph nodes (a fleet moving to
/// a province with named coasts names the coast). Support targets and
/// origins are base provinces: support is given to a province, not a coast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Hold {
        unit: UnitRef,
    },
    Move {
        unit: UnitRef,
        dest: Province,
    },
    SupportHold {
        unit: UnitRef,
        target_kind: UnitKind,
        target: Province,
    },
    SupportMove {
        unit: UnitRef,
        moving_kind: UnitKind,
        origin: Province,
        dest: Province,
    },
    Retreat {
        unit: UnitRef,
        dest: Province,
    },
    Disband {
        unit: UnitRef,
    },
    Build {
        unit: UnitRef,
    },
    Waive,
}

impl Order {
    /// The acting unit; `None` for waived builds.
    pub fn actor(&self) -> Option<UnitRef> {
        match *self {
            Order::Hold { unit }
            | Order::Move { unit, .. }
            | Order::SupportHold { unit, .. }
            | Order::SupportMove { unit, .. }
            | Order::Retreat { unit, .. }
            | Order::Disband { unit }
            | Order::Build { unit } => Some(unit),
            Order::Waive => None,
        }
    }

    /// Sort key for the canonical order of a joint action: actor province
    /// first (waives last), then a stable tiebreak over the fields.
    pub fn canonical_key(&self) -> (u16, Order) {
        let p = self.actor().map(|u| u.province.0).unwrap_or(u16::MAX);
        (p, *self)
    }
}

/// One power's complete order set for a phase, in canonical order
/// (ascending actor province; at most one order per unit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAction {
    pub power: Power,
    orders: Vec<Order>,
}

impl JointAction {
    pub fn new(power: Power, mut orders: Vec<Order>) -> Result<Self, EngineError> {
        orders.sort_by_key(|o| o.canonical_key());
        for pair in orders.windows(2) {
            if let (Some(a), Some(b)) = (pair[0].actor(), pair[1].actor()) {
                if a.province == b.province {
                    return Err(EngineError::StateInvariant(format!(
                        "two orders for the unit in province index {}",
                        a.province.0
                    )));
                }
            }
        }
        Ok(JointAction { power, orders })
    }

    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}
