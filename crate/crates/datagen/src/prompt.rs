//! Text prompts describing a position and one unit's order choice.
//!
//! A movement-phase position renders as a fixed-layout description: the
//! time heading, each power's armies, fleets and unit-less centers, the
//! unoccupied areas grouped by supply-center status, and the previous
//! movement round's orders. Default attributes are left out everywhere: an
//! area only carries a parenthesized note when it is inland or open water,
//! has named coasts, or is an owned supply center. The per-unit task prompt
//! then lists the orders already chosen and the unit's candidate orders,
//! and ends mid-sentence so that an order continuation such as `moves to
//! Greece` completes it.

use std::fmt::Write;

use entente_engine::grammar::{long_name, render_continuation, render_order, Dialect};
use entente_engine::map::ProvinceSpec;
use entente_engine::{
    EngineError, GameState, MapSpec, Order, Power, Province, Terrain, UnitKind, UnitRef,
};

use crate::error::DatagenError;

/// Fixed instruction text every record opens with. The reader's power is
/// identified by the board state's `Your Power Unit` section, so this text
/// is the same for every record, placeholder included.
pub const SYSTEM_PROMPT: &str = "You are an expert in the no-press Diplomacy game environment. As one of seven powers, your task is to use your army and fleet to control the supply centers on the board. You are playing [Your Power] and observing [Game Time and Phase], [Board State], and [Last Moves] below. In the [Board State], each power will sequentially display the locations of its army and fleet. Remember, unless specified otherwise, we will omit the default attributes for areas, which include the coast, neither supply center nor home center, no troops dislodged, and not occupied by anyone.";

/// Sentence opening that separates the task prompt's fixed text from the
/// trailing unit phrase; everything after its last occurrence names the
/// unit whose continuation the assistant supplies.
pub const TASK_TAIL: &str = ". The best order from candidate orders is that ";

/// How ownership reads inside an area's parenthesized attributes.
#[derive(Clone, Copy)]
enum OwnerStyle {
    /// Spelled in full: `France's supply center`, or `supply center` when
    /// neutral.
    Full,
    /// Shortened to the possessive because the surrounding list heading
    /// already says "supply center"; neutral owners are left out.
    Short,
    /// Never mentioned.
    Omit,
}

/// A power's name as prompt text: first letter upper, rest lower.
fn display_power(map: &MapSpec, power: Power) -> String {
    let name = map.power_name(power);
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + &chars.as_str().to_lowercase(),
        None => String::new(),
    }
}

/// The coast-list attribute for a base province, e.g. `including North and
/// South Coast`. Coast names drop their trailing ` Coast` and join with
/// ` and `.
fn coast_attr(map: &MapSpec, spec: &ProvinceSpec) -> String {
    let adjectives: Vec<&str> = spec
        .coasts
        .iter()
        .map(|&c| {
            let name = map.province(c).long_name.as_str();
            name.strip_suffix(" Coast").unwrap_or(name)
        })
        .collect();
    format!("including {} Coast", adjectives.join(" and "))
}

/// The parenthesized attribute note for an area, or `""` when every
/// attribute is at its default. Coast nodes inherit the base province's
/// terrain and ownership but never restate the coast list.
fn area_attrs(map: &MapSpec, state: &GameState, node: Province, style: OwnerStyle) -> String {
    let base = map.base(node);
    let spec = map.province(base);
    let mut attrs: Vec<String> = Vec::new();
    match spec.terrain {
        Terrain::Land => attrs.push("land".to_owned()),
        Terrain::Water => attrs.push("water".to_owned()),
        Terrain::Coast => {}
    }
    if node == base && !spec.coasts.is_empty() {
        attrs.push(coast_attr(map, spec));
    }
    if spec.is_supply_center {
        let owner = state.sc_owner.get(&base).copied().flatten();
        match (style, owner) {
            (OwnerStyle::Full, Some(p)) => {
                attrs.push(format!("{}'s supply center", display_power(map, p)));
            }
            (OwnerStyle::Full, None) => attrs.push("supply center".to_owned()),
            (OwnerStyle::Short, Some(p)) => attrs.push(format!("{}'s", display_power(map, p))),
            (OwnerStyle::Short, None) | (OwnerStyle::Omit, _) => {}
        }
    }
    if attrs.is_empty() {
        String::new()
    } else {
        format!(" ({})", attrs.join(", "))
    }
}

/// One list entry: the area's long name plus its attribute note.
fn area_entry(map: &MapSpec, state: &GameState, node: Province, style: OwnerStyle) -> String {
    format!("{}{}", long_name(map, node), area_attrs(map, state, node, style))
}

/// Joins list entries with `, `; an empty list reads `None`.
fn join_or_none(entries: &[String]) -> String {
    if entries.is_empty() {
        "None".to_owned()
    } else {
        entries.join(", ")
    }
}

/// Appends a section header followed by a blank line.
fn push_header(out: &mut String, header: &str) {
    out.push_str(header);
    out.push_str("\n\n");
}

/// Appends a labeled one-line list followed by a blank line.
fn push_block(out: &mut String, label: &str, content: &str) {
    let _ = write!(out, "{label}\n{content}\n\n");
}

/// Appends one power's three unit blocks: armies, fleets, and owned supply
/// centers without a unit of any power on them.
fn push_power_units(out: &mut String, map: &MapSpec, state: &GameState, power: Power) {
    let display = display_power(map, power);
    for (kind, label) in [(UnitKind::Army, "army"), (UnitKind::Fleet, "fleet")] {
        let mut entries: Vec<(String, String)> = state
            .units_of(power)
            .filter(|u| u.kind == kind)
            .map(|u| {
                (
                    long_name(map, u.location),
                    area_entry(map, state, u.location, OwnerStyle::Full),
                )
            })
            .collect();
        entries.sort();
        let texts: Vec<String> = entries.into_iter().map(|(_, e)| e).collect();
        push_block(out, &format!("{display}'s {label}:"), &join_or_none(&texts));
    }
    let mut centers: Vec<String> = map
        .supply_centers()
        .filter(|&sc| {
            state.sc_owner.get(&sc).copied().flatten() == Some(power)
                && state.unit_at(map, sc).is_none()
        })
        .map(|sc| long_name(map, sc))
        .collect();
    centers.sort();
    push_block(
        out,
        &format!("{display}'s center without units:"),
        &join_or_none(&centers),
    );
}

/// Appends one power's previous-round orders as a single line, armies
/// before fleets and each kind ordered by location name; a power that
/// submitted nothing reads `None`.
fn push_power_orders(out: &mut String, map: &MapSpec, state: &GameState, power: Power) {
    let orders = state.last_orders.get(&power).cloned().unwrap_or_default();
    let mut keyed: Vec<((u8, String), String)> = orders
        .iter()
        .map(|o| {
            let key = match o.actor() {
                Some(actor) => {
                    let kind = match actor.kind {
                        UnitKind::Army => 0,
                        UnitKind::Fleet => 1,
                    };
                    (kind, long_name(map, actor.province))
                }
                None => (2, String::new()),
            };
            (key, render_order(map, o, Dialect::Verbose))
        })
        .collect();
    keyed.sort();
    let texts: Vec<String> = keyed.into_iter().map(|(_, t)| t).collect();
    push_block(
        out,
        &format!("{}:", display_power(map, power)),
        &join_or_none(&texts),
    );
}

/// Renders the full board description a power reads before choosing orders.
///
/// The position must be in a movement phase. Output is deterministic: every
/// list is ordered by area long name (armies before fleets where both
/// appear), all seven powers are always listed, and empty lists read
/// `None`. The text ends at the last order line with no trailing newline.
pub fn encode_state_text(
    map: &MapSpec,
    state: &GameState,
    power: Power,
) -> Result<String, DatagenError> {
    if !state.phase.is_move() {
        return Err(EngineError::WrongPhase {
            expected: "movement",
            found: state.phase.name(),
        }
        .into());
    }

    let mut out = String::new();
    push_header(&mut out, "[Game Time and Phase]:");
    push_header(&mut out, &state.phase_heading());

    push_header(&mut out, "[Board State]:");
    push_header(&mut out, "Your Power Unit:");
    push_power_units(&mut out, map, state, power);
    push_header(&mut out, "Other Power Unit:");
    for other in map.all_powers().filter(|&p| p != power) {
        push_power_units(&mut out, map, state, other);
    }

    push_header(&mut out, "Areas Without Unit:");
    let mut unoccupied_sc: Vec<(String, String)> = Vec::new();
    let mut occupied_sc: Vec<(String, String)> = Vec::new();
    let mut non_sc: Vec<(String, String)> = Vec::new();
    for p in map.all_nodes() {
        let spec = map.province(p);
        if spec.coast_of.is_some() || state.unit_at(map, p).is_some() {
            continue;
        }
        let name = long_name(map, p);
        if !spec.is_supply_center {
            non_sc.push((name, area_entry(map, state, p, OwnerStyle::Omit)));
        } else if state.sc_owner.get(&p).copied().flatten().is_some() {
            occupied_sc.push((name, area_entry(map, state, p, OwnerStyle::Short)));
        } else {
            unoccupied_sc.push((name, area_entry(map, state, p, OwnerStyle::Omit)));
        }
    }
    for list in [&mut unoccupied_sc, &mut occupied_sc, &mut non_sc] {
        list.sort();
    }
    let texts = |list: Vec<(String, String)>| -> Vec<String> {
        list.into_iter().map(|(_, e)| e).collect()
    };
    push_block(
        &mut out,
        "unoccupied supply center:",
        &join_or_none(&texts(unoccupied_sc)),
    );
    push_block(
        &mut out,
        "occupied supply center:",
        &join_or_none(&texts(occupied_sc)),
    );
    push_block(&mut out, "not supply center:", &join_or_none(&texts(non_sc)));

    push_header(&mut out, "[Last Move]:");
    if state.last_orders.is_empty() {
        push_header(&mut out, "Your Power Order:");
        out.push_str("None\n\n");
        push_header(&mut out, "Other Power Order:");
        out.push_str("None\n\n");
    } else {
        push_header(&mut out, "Your Power Order:");
        push_power_orders(&mut out, map, state, power);
        push_header(&mut out, "Other Power Order:");
        for other in map.all_powers().filter(|&p| p != power) {
            push_power_orders(&mut out, map, state, other);
        }
    }

    Ok(out.trim_end().to_owned())
}

/// The phrase a task prompt ends with, e.g. `fleet in Ionian Sea`.
pub fn unit_phrase(map: &MapSpec, unit: UnitRef) -> String {
    format!("{} in {}", unit.kind.noun(), long_name(map, unit.province))
}

/// Builds the per-unit decision prompt appended after the board text.
///
/// `prev_orders` are the full order sentences already chosen this round, in
/// the order they were chosen; `candidates` are the unit's allowed orders,
/// listed as continuations sorted by text. The returned prompt ends with
/// the unit phrase and no punctuation, so appending a space and an order
/// continuation yields a complete order sentence.
///
/// # Panics
///
/// Panics if `candidates` is empty: a decision prompt with nothing to
/// choose from is a caller bug.
pub fn build_task_prompt(
    map: &MapSpec,
    prev_orders: &[String],
    unit: UnitRef,
    candidates: &[Order],
) -> String {
    assert!(
        !candidates.is_empty(),
        "a task prompt needs at least one candidate order"
    );
    let phrase = unit_phrase(map, unit);
    let mut continuations: Vec<String> = candidates
        .iter()
        .map(|o| render_continuation(map, o))
        .collect();
    continuations.sort();
    format!(
        "In this round, the orders you have previously generated are [{}]. \
         The candidate orders for {} are [{}]{}{}",
        prev_orders.join(", "),
        phrase,
        continuations.join(", "),
        TASK_TAIL,
        phrase
    )
}

/// Joins the board description and the task prompt into the user message.
pub fn build_user_prompt(state_text: &str, task_text: &str) -> String {
    format!("{state_text}\n\n{task_text}")
}
