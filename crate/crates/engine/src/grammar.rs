//! Rendering and parsing of orders in two text dialects.
//!
//! The short dialect is the conventional abbreviated notation:
//! `A PAR H`, `F MAO - POR`, `A BUL S F ION - GRE`, `F BLA S A BUL`,
//! `A PAR R BUR`, `A PAR D`, `A PAR B`, `WAIVE`.
//!
//! The verbose dialect is the prose form used in prompt text:
//! `army in Paris holds`, `fleet in Mid Atlantic Ocean moves to Portugal`,
//! `army in Bulgaria supports fleet in Ionian Sea move to Greece`,
//! `fleet in Black Sea supports army in Bulgaria`, `builds fleet in Brest`,
//! `waives`. Fleets on named coasts read `fleet in Spain's North Coast`.
//!
//! A formal grammar for both dialects is in `docs/order-grammar.md`.
//! `parse_order` resolves the actor against the board and canonicalizes its
//! location to the occupied graph node; `parse_order_loose` skips the board
//! check (used when replaying recorded orders whose units have moved on).

use crate::error::EngineError;
use crate::map::{MapSpec, Province, UnitKind};
use crate::order::{Order, UnitRef};
use crate::state::GameState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Short,
    Verbose,
}

/// Long display name of a node; coast nodes read `Parent's Coast Name`.
pub fn long_name(map: &MapSpec, p: Province) -> String {
    let spec = map.province(p);
    match spec.coast_of {
        Some(parent) => format!("{}'s {}", map.province(parent).long_name, spec.long_name),
        None => spec.long_name.clone(),
    }
}

pub fn render_order(map: &MapSpec, order: &Order, dialect: Dialect) -> String {
    match dialect {
        Dialect::Short => render_short(map, order),
        Dialect::Verbose => render_verbose(map, order),
    }
}

fn render_short(map: &MapSpec, order: &Order) -> String {
    let id = |p: Province| map.province(p).id.as_str();
    match *order {
        Order::Hold { unit } => format!("{} {} H", unit.kind.letter(), id(unit.province)),
        Order::Move { unit, dest } => {
            format!("{} {} - {}", unit.kind.letter(), id(unit.province), id(dest))
        }
        Order::SupportHold { unit, target_kind, target } => format!(
            "{} {} S {} {}",
            unit.kind.letter(),
            id(unit.province),
            target_kind.letter(),
            id(target)
        ),
        Order::SupportMove { unit, moving_kind, origin, dest } => format!(
            "{} {} S {} {} - {}",
            unit.kind.letter(),
            id(unit.province),
            moving_kind.letter(),
            id(origin),
            id(dest)
        ),
        Order::Retreat { unit, dest } => {
            format!("{} {} R {}", unit.kind.letter(), id(unit.province), id(dest))
        }
        Order::Disband { unit } => format!("{} {} D", unit.kind.letter(), id(unit.province)),
        Order::Build { unit } => format!("{} {} B", unit.kind.letter(), id(unit.province)),
        Order::Waive => "WAIVE".to_string(),
    }
}

fn render_verbose(map: &MapSpec, order: &Order) -> String {
    match order.actor() {
        Some(unit) if !matches!(order, Order::Build { .. }) => format!(
            "{} in {} {}",
            unit.kind.noun(),
            long_name(map, unit.province),
            render_continuation(map, order)
        ),
        _ => render_continuation(map, order),
    }
}

/// The verbose form without the actor phrase: `moves to Greece`, `holds`,
/// `supports army in Bulgaria move to Greece`. Builds and waives have no
/// actor phrase, so their continuation is the full verbose order.
pub fn render_continuation(map: &MapSpec, order: &Order) -> String {
    match *order {
        Order::Hold { .. } => "holds".to_string(),
        Order::Move { dest, .. } => format!("moves to {}", long_name(map, dest)),
        Order::SupportHold { target_kind, target, .. } => {
            format!("supports {} in {}", target_kind.noun(), long_name(map, target))
        }
        Order::SupportMove { moving_kind, origin, dest, .. } => format!(
            "supports {} in {} move to {}",
            moving_kind.noun(),
            long_name(map, origin),
            long_name(map, dest)
        ),
        Order::Retreat { dest, .. } => format!("retreats to {}", long_name(map, dest)),
        Order::Disband { .. } => "disbands".to_string(),
        Order::Build { unit } => {
            format!("builds {} in {}", unit.kind.noun(), long_name(map, unit.province))
        }
        Order::Waive => "waives".to_string(),
    }
}

/// Parses an order and resolves its actor against the board: the named
/// province must hold a unit of the named kind, or — in a retreat phase — a
/// dislodged unit of that kind (for builds, the site only needs to exist).
/// The actor location is canonicalized to the node the unit occupies, so
/// `F SPA ...` matches a fleet standing on `SPA/NC`.
pub fn parse_order(
    map: &MapSpec,
    state: &GameState,
    text: &str,
    dialect: Dialect,
) -> Result<Order, EngineError> {
    let order = parse_order_loose(map, text, dialect)?;
    match order {
        Order::Waive | Order::Build { .. } => Ok(order),
        _ => {
            let unit = order.actor().unwrap();
            let base = map.base(unit.province);
            let found = state
                .unit_at(map, unit.province)
                .filter(|u| u.kind == unit.kind)
                .or_else(|| {
                    state
                        .dislodged
                        .iter()
                        .map(|d| d.unit)
                        .find(|u| map.base(u.location) == base && u.kind == unit.kind)
                })
                .ok_or(EngineError::NoSuchUnit {
                    kind: unit.kind.noun(),
                    province: map.province(unit.province).id.clone(),
                })?;
            Ok(replace_actor(order, UnitRef { kind: found.kind, province: found.location }))
        }
    }
}

/// Parses an order without checking the board for the actor.
pub fn parse_order_loose(map: &MapSpec, text: &str, dialect: Dialect) -> Result<Order, EngineError> {
    match dialect {
        Dialect::Short => parse_short(map, text),
        Dialect::Verbose => parse_verbose(map, text),
    }
}

fn replace_actor(order: Order, unit: UnitRef) -> Order {
    match order {
        Order::Hold { .. } => Order::Hold { unit },
        Order::Move { dest, .. } => Order::Move { unit, dest },
        Order::SupportHold { target_kind, target, .. } => {
            Order::SupportHold { unit, target_kind, target }
        }
        Order::SupportMove { moving_kind, origin, dest, .. } => {
            Order::SupportMove { unit, moving_kind, origin, dest }
        }
        Order::Retreat { dest, .. } => Order::Retreat { unit, dest },
        Order::Disband { .. } => Order::Disband { unit },
        Order::Build { .. } | Order::Waive => order,
    }
}

fn bad(text: &str, why: &str) -> EngineError {
    EngineError::OrderSyntax(format!("`{text}`: {why}"))
}

fn parse_short(map: &MapSpec, text: &str) -> Result<Order, EngineError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.as_slice() == ["WAIVE"] {
        return Ok(Order::Waive);
    }
    if toks.len() < 3 {
        return Err(bad(text, "expected `KIND PROVINCE VERB ...` or `WAIVE`"));
    }
    let kind = UnitKind::from_letter(toks[0]).ok_or_else(|| bad(text, "unit kind must be A or F"))?;
    let province = map.by_id(toks[1])?;
    let unit = UnitRef { kind, province };
    match (toks[2], toks.len()) {
        ("H", 3) => Ok(Order::Hold { unit }),
        ("D", 3) => Ok(Order::Disband { unit }),
        ("B", 3) => Ok(Order::Build { unit }),
        ("-", 4) => Ok(Order::Move { unit, dest: map.by_id(toks[3])? }),
        ("R", 4) => Ok(Order::Retreat { unit, dest: map.by_id(toks[3])? }),
        ("S", 5) => {
            let target_kind =
                UnitKind::from_letter(toks[3]).ok_or_else(|| bad(text, "supported kind must be A or F"))?;
            let target = map.base(map.by_id(toks[4])?);
            Ok(Order::SupportHold { unit, target_kind, target })
        }
        ("S", 7) if toks[5] == "-" => {
            let moving_kind =
                UnitKind::from_letter(toks[3]).ok_or_else(|| bad(text, "supported kind must be A or F"))?;
            let origin = map.base(map.by_id(toks[4])?);
            let dest = map.base(map.by_id(toks[6])?);
            Ok(Order::SupportMove { unit, moving_kind, origin, dest })
        }
        _ => Err(bad(text, "unrecognized verb or argument count")),
    }
}

/// Resolves a verbose place name. Bare names match base provinces only;
/// named coasts use the possessive form `Spain's North Coast`.
fn province_by_long(map: &MapSpec, name: &str) -> Result<Province, EngineError> {
    for p in map.all_nodes() {
        let spec = map.province(p);
        if spec.coast_of.is_none() && spec.long_name == name {
            return Ok(p);
        }
    }
    if let Some((parent_name, coast_name)) = name.split_once("'s ") {
        for p in map.all_nodes() {
            let spec = map.province(p);
            if spec.coast_of.is_none() && spec.long_name == parent_name {
                for &c in &spec.coasts {
                    if map.province(c).long_name == coast_name {
                        return Ok(c);
                    }
                }
            }
        }
    }
    Err(EngineError::UnknownProvince(name.to_string()))
}

fn parse_kind_in(map: &MapSpec, text: &str, rest: &str) -> Result<(UnitKind, &'static str), EngineError> {
    let _ = map;
    if rest.starts_with("army in ") {
        Ok((UnitKind::Army, "army in "))
    } else if rest.starts_with("fleet in ") {
        Ok((UnitKind::Fleet, "fleet in "))
    } else {
        Err(bad(text, "expected `army in ...` or `fleet in ...`"))
    }
}

fn parse_verbose(map: &MapSpec, text: &str) -> Result<Order, EngineError> {
    let trimmed = text.trim();
    if trimmed == "waives" {
        return Ok(Order::Waive);
    }
    if let Some(rest) = trimmed.strip_prefix("builds ") {
        let (kind, prefix) = parse_kind_in(map, text, rest)?;
        let site = province_by_long(map, &rest[prefix.len()..])?;
        return Ok(Order::Build { unit: UnitRef { kind, province: site } });
    }

    let (kind, prefix) = parse_kind_in(map, text, trimmed)?;
    let rest = &trimmed[prefix.len()..];

    // The actor's place name runs until the first verb keyword.
    const VERBS: [&str; 5] = [" holds", " moves to ", " supports ", " retreats to ", " disbands"];
    let (pos, verb) = VERBS
        .iter()
        .filter_map(|v| rest.find(v).map(|i| (i, *v)))
        .min()
        .ok_or_else(|| bad(text, "no verb found"))?;
    let place = &rest[..pos];
    let province = province_by_long(map, place)?;
    let unit = UnitRef { kind, province };
    let tail = &rest[pos + verb.len()..];

    match verb {
        " holds" if tail.is_empty() => Ok(Order::Hold { unit }),
        " disbands" if tail.is_empty() => Ok(Order::Disband { unit }),
        " moves to " => Ok(Order::Move { unit, dest: province_by_long(map, tail)? }),
        " retreats to " => Ok(Order::Retreat { unit, dest: province_by_long(map, tail)? }),
        " supports " => {
            let (target_kind, tprefix) = parse_kind_in(map, text, tail)?;
            let tail = &tail[tprefix.len()..];
            match tail.split_once(" move to ") {
                Some((origin_name, dest_name)) => Ok(Order::SupportMove {
                    unit,
                    moving_kind: target_kind,
                    origin: map.base(province_by_long(map, origin_name)?),
                    dest: map.base(province_by_long(map, dest_name)?),
                }),
                None => Ok(Order::SupportHold {
                    unit,
                    target_kind,
                    target: map.base(province_by_long(map, tail)?),
                }),
            }
        }
        _ => Err(bad(text, "trailing text after order")),
    }
}
