//! A small text format for movement adjudication cases.
//!
//! Each case names a bundled map fixture, sets up units, submits orders and
//! lists expectations. Lines are keyword-led; `#` starts a comment:
//!
//! ```text
//! case bounce-in-burgundy
//! map standard
//! phase 1901 spring_move
//! unit FRANCE A PAR
//! unit GERMANY A MUN
//! order FRANCE A PAR - BUR
//! order GERMANY A MUN - BUR
//! fails FRANCE A PAR - BUR
//! fails GERMANY A MUN - BUR
//! after vacant BUR
//! ```
//!
//! Expectations: `succeeds`/`fails` check the ordering unit's outcome;
//! `dislodged K PROV from PROV` checks the dislodgement list; `retreats
//! PROV: A B` (or `-`) checks a dislodged unit's open options; `after unit
//! POWER K PROV` and `after vacant PROV` check the post-state; `coercions N`
//! counts coerced orders.
//!
//! [`run_case`] adjudicates with both the production and the exhaustive
//! resolver, requires them to agree, and then checks the expectations,
//! returning a list of human-readable failures (empty means pass).

use std::collections::BTreeMap;

use crate::error::EngineError;
use crate::fixtures;
use crate::grammar::{parse_order, parse_order_loose, render_order, Dialect};
use crate::map::{MapSpec, Power, Province, UnitKind};
use crate::order::{JointAction, Order};
use crate::resolve::{adjudicate_moves, exhaustive::adjudicate_moves_exhaustive, Resolution};
use crate::state::{GameState, Phase, Unit};

#[derive(Debug, Clone)]
pub enum Expectation {
    Outcome { power: Power, order: Order, want: bool },
    Dislodged { kind: UnitKind, province: Province, from: Province },
    Retreats { province: Province, options: Vec<Province> },
    AfterUnit { power: Power, kind: UnitKind, province: Province },
    AfterVacant { province: Province },
    Coercions { count: usize },
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub map: MapSpec,
    pub state: GameState,
    pub orders: BTreeMap<Power, Vec<Order>>,
    pub expect: Vec<Expectation>,
}

fn err(line: usize, msg: impl Into<String>) -> EngineError {
    EngineError::CaseSyntax { line, msg: msg.into() }
}

struct Builder {
    name: String,
    started_at: usize,
    map: Option<MapSpec>,
    year: u16,
    phase: Phase,
    units: Vec<Unit>,
    orders: Vec<(Power, Order)>,
    expect_raw: Vec<(usize, String)>,
}

impl Builder {
    fn new(name: String, line: usize) -> Self {
        Builder {
            name,
            started_at: line,
            map: None,
            year: 0,
            phase: Phase::SpringMove,
            units: Vec::new(),
            orders: Vec::new(),
            expect_raw: Vec::new(),
        }
    }

    fn finish(self) -> Result<Case, EngineError> {
        let map = self.map.ok_or_else(|| err(self.started_at, "case has no `map` line"))?;
        if self.year == 0 {
            return Err(err(self.started_at, "case has no `phase` line"));
        }
        let mut units = self.units;
        units.sort_by_key(|u| u.location);
        let state = GameState {
            year: self.year,
            phase: self.phase,
            units,
            sc_owner: GameState::initial(&map).sc_owner,
            dislodged: Vec::new(),
            last_orders: BTreeMap::new(),
        };
        state.validate(&map)?;
        let mut orders: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
        for (power, order) in self.orders {
            orders.entry(power).or_default().push(order);
        }
        // Expectations may reference coast-resident units by base id, so
        // they resolve against the finished state.
        let mut expect = Vec::new();
        for (line, text) in self.expect_raw {
            expect.push(parse_expectation(&map, &state, line, &text)?);
        }
        Ok(Case { name: self.name, map, state, orders, expect })
    }
}

fn parse_expectation(
    map: &MapSpec,
    state: &GameState,
    line: usize,
    text: &str,
) -> Result<Expectation, EngineError> {
    let (keyword, rest) = text.split_once(' ').ok_or_else(|| err(line, "missing arguments"))?;
    let rest = rest.trim();
    match keyword {
        "succeeds" | "fails" => {
            let (power_name, order_text) =
                rest.split_once(' ').ok_or_else(|| err(line, "expected `POWER ORDER`"))?;
            let power = map.power_by_name(power_name)?;
            let order = parse_order(map, state, order_text, Dialect::Short)?;
            Ok(Expectation::Outcome { power, order, want: keyword == "succeeds" })
        }
        "dislodged" => {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [kind, province, "from", from] = toks.as_slice() else {
                return Err(err(line, "expected `dislodged K PROV from PROV`"));
            };
            Ok(Expectation::Dislodged {
                kind: UnitKind::from_letter(kind)
                    .ok_or_else(|| err(line, "unit kind must be A or F"))?,
                province: map.by_id(province)?,
                from: map.by_id(from)?,
            })
        }
        "retreats" => {
            let (province, options) =
                rest.split_once(':').ok_or_else(|| err(line, "expected `retreats PROV: ...`"))?;
            let mut parsed = Vec::new();
            for tok in options.split_whitespace() {
                if tok != "-" {
                    parsed.push(map.by_id(tok)?);
                }
            }
            parsed.sort();
            Ok(Expectation::Retreats { province: map.by_id(province.trim())?, options: parsed })
        }
        "after" => {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match toks.as_slice() {
                ["unit", power, kind, province] => Ok(Expectation::AfterUnit {
                    power: map.power_by_name(power)?,
                    kind: UnitKind::from_letter(kind)
                        .ok_or_else(|| err(line, "unit kind must be A or F"))?,
                    province: map.by_id(province)?,
                }),
                ["vacant", province] => {
                    Ok(Expectation::AfterVacant { province: map.by_id(province)? })
                }
                _ => Err(err(line, "expected `after unit POWER K PROV` or `after vacant PROV`")),
            }
        }
        "coercions" => {
            let count = rest
                .parse()
                .map_err(|_| err(line, "expected `coercions N` with a number"))?;
            Ok(Expectation::Coercions { count })
        }
        _ => Err(err(line, format!("unknown expectation `{keyword}`"))),
    }
}

/// Parses every case in a file.
pub fn parse_cases(text: &str) -> Result<Vec<Case>, EngineError> {
    let mut cases = Vec::new();
    let mut building: Option<Builder> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(' ').unwrap_or((line, ""));
        let rest = rest.trim();
        if keyword == "case" {
            if let Some(b) = building.take() {
                cases.push(b.finish()?);
            }
            if rest.is_empty() {
                return Err(err(line_no, "case needs a name"));
            }
            building = Some(Builder::new(rest.to_string(), line_no));
            continue;
        }
        let b = building
            .as_mut()
            .ok_or_else(|| err(line_no, "content before the first `case` line"))?;
        match keyword {
            "map" => b.map = Some(fixtures::by_name(rest)?),
            "phase" => {
                let (year, phase) =
                    rest.split_once(' ').ok_or_else(|| err(line_no, "expected `phase YEAR NAME`"))?;
                b.year = year.parse().map_err(|_| err(line_no, "bad year"))?;
                b.phase = Phase::parse(phase.trim())
                    .ok_or_else(|| err(line_no, format!("unknown phase `{phase}`")))?;
                if !b.phase.is_move() {
                    return Err(err(line_no, "cases cover movement phases only"));
                }
            }
            "unit" => {
                let map = b.map.as_ref().ok_or_else(|| err(line_no, "`map` must come first"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let [power, kind, province] = toks.as_slice() else {
                    return Err(err(line_no, "expected `unit POWER K PROV`"));
                };
                b.units.push(Unit {
                    power: map.power_by_name(power)?,
                    kind: UnitKind::from_letter(kind)
                        .ok_or_else(|| err(line_no, "unit kind must be A or F"))?,
                    location: map.by_id(province)?,
                });
            }
            "order" => {
                let map = b.map.as_ref().ok_or_else(|| err(line_no, "`map` must come first"))?;
                let (power, order_text) =
                    rest.split_once(' ').ok_or_else(|| err(line_no, "expected `order POWER ...`"))?;
                let power = map.power_by_name(power)?;
                // Loose parse: cases may submit deliberately illegal orders.
                let order = parse_order_loose(map, order_text.trim(), Dialect::Short)?;
                b.orders.push((power, order));
            }
            "succeeds" | "fails" | "dislodged" | "retreats" | "after" | "coercions" => {
                b.expect_raw.push((line_no, line.to_string()));
            }
            _ => return Err(err(line_no, format!("unknown keyword `{keyword}`"))),
        }
    }
    if let Some(b) = building.take() {
        cases.push(b.finish()?);
    }
    Ok(cases)
}

/// Compares two adjudications of the same phase and reports any divergence;
/// an empty vector means they agree on outcomes, dislodgements, the next
/// state, and coercions.
pub fn resolutions_agree(map: &MapSpec, a: &Resolution, b: &Resolution) -> Vec<String> {
    let mut out = Vec::new();
    if a.succeeded != b.succeeded {
        out.push("resolvers disagree on order outcomes".to_string());
    }
    if a.dislodgements != b.dislodgements {
        out.push("resolvers disagree on dislodgements".to_string());
    }
    if a.new_state.serialize(map) != b.new_state.serialize(map) {
        out.push("resolvers disagree on the next state".to_string());
    }
    if a.coercions != b.coercions {
        out.push("resolvers disagree on coercions".to_string());
    }
    out
}

/// Adjudicates a case with both resolvers and checks its expectations.
/// Returns human-readable failure descriptions; an empty list is a pass.
pub fn run_case(case: &Case) -> Result<Vec<String>, EngineError> {
    let map = &case.map;
    let mut joints = BTreeMap::new();
    for (&power, list) in &case.orders {
        joints.insert(power, JointAction::new(power, list.clone())?);
    }
    let res = adjudicate_moves(map, &case.state, &joints)?;
    let reference = adjudicate_moves_exhaustive(map, &case.state, &joints)?;

    let mut failures = resolutions_agree(map, &res, &reference);
    for e in &case.expect {
        match e {
            Expectation::Outcome { order, want, .. } => {
                let actor = order.actor().expect("outcome expectations name a unit");
                match res.succeeded.get(&actor.province) {
                    Some(got) if got == want => {}
                    Some(got) => failures.push(format!(
                        "`{}`: expected {}, got {}",
                        render_order(map, order, Dialect::Short),
                        verdict(*want),
                        verdict(*got),
                    )),
                    None => failures.push(format!(
                        "`{}`: no outcome recorded",
                        render_order(map, order, Dialect::Short)
                    )),
                }
            }
            Expectation::Dislodged { kind, province, from } => {
                let hit = res.dislodgements.iter().any(|(u, origin)| {
                    u.kind == *kind && u.location == *province && origin == from
                });
                if !hit {
                    failures.push(format!(
                        "expected {} in {} dislodged from {}",
                        kind.noun(),
                        map.province(*province).id,
                        map.province(*from).id
                    ));
                }
            }
            Expectation::Retreats { province, options } => {
                match res.new_state.dislodged.iter().find(|d| d.unit.location == *province) {
                    Some(d) if &d.retreat_options == options => {}
                    Some(d) => failures.push(format!(
                        "retreat options for {}: expected [{}], got [{}]",
                        map.province(*province).id,
                        ids(map, options),
                        ids(map, &d.retreat_options),
                    )),
                    None => failures.push(format!(
                        "no dislodged unit in {}",
                        map.province(*province).id
                    )),
                }
            }
            Expectation::AfterUnit { power, kind, province } => {
                let hit = res.new_state.units.iter().any(|u| {
                    u.power == *power && u.kind == *kind && u.location == *province
                });
                if !hit {
                    failures.push(format!(
                        "expected {} {} in {} afterwards",
                        map.power_name(*power),
                        kind.noun(),
                        map.province(*province).id
                    ));
                }
            }
            Expectation::AfterVacant { province } => {
                if let Some(u) = res.new_state.unit_at(map, map.base(*province)) {
                    failures.push(format!(
                        "expected {} vacant, found {} {}",
                        map.province(*province).id,
                        map.power_name(u.power),
                        u.kind.noun()
                    ));
                }
            }
            Expectation::Coercions { count } => {
                if res.coercions.len() != *count {
                    failures.push(format!(
                        "expected {count} coercions, got {}: {:?}",
                        res.coercions.len(),
                        res.coercions.iter().map(|c| c.reason.clone()).collect::<Vec<_>>()
                    ));
                }
            }
        }
    }
    Ok(failures)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "success"
    } else {
        "failure"
    }
}

fn ids(map: &MapSpec, provinces: &[Province]) -> String {
    provinces.iter().map(|&p| map.province(p).id.clone()).collect::<Vec<_>>().join(" ")
}
