//! Game state: units on the board, supply-center ownership, phase
//! bookkeeping, dislodgements awaiting retreat, and the previous round's
//! orders.
//!
//! States serialize to a canonical line-based text form (documented in
//! `docs/state-format.md`). The serialization is deterministic — units,
//! centers and orders appear in canonical province order — so equal states
//! produce identical bytes, and the 64-bit FNV-1a hash of those bytes is a
//! stable state fingerprint.

use std::collections::BTreeMap;

use crate::error::EngineError;
use crate::map::{MapSpec, Power, Province, Terrain, UnitKind};
use crate::order::Order;

/// Year of the opening turn on every bundled map.
pub const START_YEAR: u16 = 1901;

/// The five-step turn cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    SpringMove,
    SpringRetreat,
    FallMove,
    FallRetreat,
    WinterAdjust,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::SpringMove => "spring_move",
            Phase::SpringRetreat => "spring_retreat",
            Phase::FallMove => "fall_move",
            Phase::FallRetreat => "fall_retreat",
            Phase::WinterAdjust => "winter_adjust",
        }
    }

    pub fn parse(text: &str) -> Option<Phase> {
        match text {
            "spring_move" => Some(Phase::SpringMove),
            "spring_retreat" => Some(Phase::SpringRetreat),
            "fall_move" => Some(Phase::FallMove),
            "fall_retreat" => Some(Phase::FallRetreat),
            "winter_adjust" => Some(Phase::WinterAdjust),
            _ => None,
        }
    }

    pub fn is_move(self) -> bool {
        matches!(self, Phase::SpringMove | Phase::FallMove)
    }

    pub fn is_retreat(self) -> bool {
        matches!(self, Phase::SpringRetreat | Phase::FallRetreat)
    }

    /// The retreat phase following a move phase.
    pub fn retreat_phase(self) -> Option<Phase> {
        match self {
            Phase::SpringMove => Some(Phase::SpringRetreat),
            Phase::FallMove => Some(Phase::FallRetreat),
            _ => None,
        }
    }

    /// Season label used in prompt text.
    pub fn season(self) -> &'static str {
        match self {
            Phase::SpringMove | Phase::SpringRetreat => "Spring",
            Phase::FallMove | Phase::FallRetreat => "Fall",
            Phase::WinterAdjust => "Winter",
        }
    }
}

/// A unit on the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unit {
    pub power: Power,
    pub kind: UnitKind,
    pub location: Province,
}

/// A dislodged unit awaiting a retreat order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dislodged {
    pub unit: Unit,
    /// Base province the successful attack came from.
    pub attacker_origin: Province,
    /// Graph nodes the unit may legally retreat to, in canonical order.
    pub retreat_options: Vec<Province>,
}

/// Full game state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub year: u16,
    pub phase: Phase,
    /// Units, kept sorted by location (unique per base province).
    pub units: Vec<Unit>,
    /// Owner per supply center (base provinces only); `None` is neutral.
    pub sc_owner: BTreeMap<Province, Option<Power>>,
    /// Non-empty only during retreat phases.
    pub dislodged: Vec<Dislodged>,
    /// Orders from the most recent move phase, per power.
    pub last_orders: BTreeMap<Power, Vec<Order>>,
}

impl GameState {
    /// The opening position of a map.
    pub fn initial(map: &MapSpec) -> GameState {
        let mut units: Vec<Unit> = map
            .start_units
            .iter()
            .map(|s| Unit {
                power: s.power,
                kind: s.kind,
                location: s.location,
            })
            .collect();
        units.sort_by_key(|u| u.location);
        let sc_owner = map.start_sc_owner.iter().copied().collect();
        GameState {
            year: START_YEAR,
            phase: Phase::SpringMove,
            units,
            sc_owner,
            dislodged: Vec::new(),
            last_orders: BTreeMap::new(),
        }
    }

    /// The non-dislodged unit occupying the family of `base`, if any.
    pub fn unit_at(&self, map: &MapSpec, base: Province) -> Option<Unit> {
        let base = map.base(base);
        self.units
            .iter()
            .copied()
            .find(|u| map.base(u.location) == base)
    }

    pub fn units_of(&self, power: Power) -> impl Iterator<Item = Unit> + '_ {
        self.units.iter().copied().filter(move |u| u.power == power)
    }

    /// Supply centers held per power, indexed by power.
    pub fn center_counts(&self, map: &MapSpec) -> Vec<usize> {
        let mut counts = vec![0usize; map.power_count()];
        for owner in self.sc_owner.values().flatten() {
            counts[owner.0 as usize] += 1;
        }
        counts
    }

    /// The power at or above the win threshold, if any.
    pub fn winner(&self, map: &MapSpec) -> Option<Power> {
        let threshold = map.win_threshold();
        self.center_counts(map)
            .iter()
            .position(|&c| c >= threshold)
            .map(|i| Power(i as u8))
    }

    /// Checks the structural invariants of the state against its map.
    pub fn validate(&self, map: &MapSpec) -> Result<(), EngineError> {
        let fail = |msg: String| Err(EngineError::StateInvariant(msg));
        let mut seen = std::collections::HashSet::new();
        for unit in &self.units {
            if !map.can_occupy(unit.kind, unit.location) {
                return fail(format!(
                    "{} cannot stand in {}",
                    unit.kind.noun(),
                    map.province(unit.location).id
                ));
            }
            if !seen.insert(map.base(unit.location)) {
                return fail(format!(
                    "two units share province {}",
                    map.province(map.base(unit.location)).id
                ));
            }
        }
        let centers: Vec<Province> = map.supply_centers().collect();
        if self.sc_owner.len() != centers.len()
            || centers.iter().any(|p| !self.sc_owner.contains_key(p))
        {
            return fail("sc_owner does not cover exactly the supply centers".to_string());
        }
        if !self.dislodged.is_empty() && !self.phase.is_retreat() {
            return fail(format!("dislodged units outside a retreat phase ({})", self.phase.name()));
        }
        for d in &self.dislodged {
            if !map.can_occupy(d.unit.kind, d.unit.location) {
                return fail(format!(
                    "dislodged {} cannot have stood in {}",
                    d.unit.kind.noun(),
                    map.province(d.unit.location).id
                ));
            }
        }
        Ok(())
    }

    /// Canonical text serialization (see `docs/state-format.md`).
    pub fn serialize(&self, map: &MapSpec) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        out.push_str("entente-state v1\n");
        writeln!(out, "year {}", self.year).unwrap();
        writeln!(out, "phase {}", self.phase.name()).unwrap();
        for u in &self.units {
            writeln!(
                out,
                "unit {} {} {}",
                map.power_name(u.power),
                u.kind.letter(),
                map.province(u.location).id
            )
            .unwrap();
        }
        for (p, owner) in &self.sc_owner {
            writeln!(
                out,
                "sc {} {}",
                map.province(*p).id,
                owner.map(|o| map.power_name(o)).unwrap_or("-")
            )
            .unwrap();
        }
        for d in &self.dislodged {
            let options = if d.retreat_options.is_empty() {
                "-".to_string()
            } else {
                d.retreat_options
                    .iter()
                    .map(|p| map.province(*p).id.as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            writeln!(
                out,
                "dislodged {} {} {} from {} allowed {}",
                map.power_name(d.unit.power),
                d.unit.kind.letter(),
                map.province(d.unit.location).id,
                map.province(d.attacker_origin).id,
                options
            )
            .unwrap();
        }
        for (power, orders) in &self.last_orders {
            for order in orders {
                writeln!(
                    out,
                    "lastorder {} {}",
                    map.power_name(*power),
                    crate::grammar::render_order(map, order, crate::grammar::Dialect::Short)
                )
                .unwrap();
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parses the canonical text form produced by [`GameState::serialize`].
    pub fn parse(map: &MapSpec, text: &str) -> Result<GameState, EngineError> {
        let syntax = |line: usize, msg: String| EngineError::StateSyntax { line, msg };
        let mut year = None;
        let mut phase = None;
        let mut units = Vec::new();
        let mut sc_owner = BTreeMap::new();
        let mut dislodged = Vec::new();
        let mut last_orders: BTreeMap<Power, Vec<String>> = BTreeMap::new();
        let mut saw_header = false;
        let mut saw_end = false;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "entente-state v1" {
                    return Err(syntax(lineno, "expected `entente-state v1` header".to_string()));
                }
                saw_header = true;
                continue;
            }
            if saw_end {
                return Err(syntax(lineno, "content after `end`".to_string()));
            }
            let (keyword, rest) = line.split_once(' ').unwrap_or((line, ""));
            match keyword {
                "year" => {
                    year = Some(
                        rest.trim()
                            .parse::<u16>()
                            .map_err(|_| syntax(lineno, format!("bad year `{rest}`")))?,
                    )
                }
                "phase" => {
                    phase = Some(
                        Phase::parse(rest.trim())
                            .ok_or_else(|| syntax(lineno, format!("bad phase `{rest}`")))?,
                    )
                }
                "unit" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 3 {
                        return Err(syntax(lineno, "unit needs `POWER KIND PROVINCE`".to_string()));
                    }
                    units.push(Unit {
                        power: map.power_by_name(toks[0])?,
                        kind: UnitKind::from_letter(toks[1])
                            .ok_or_else(|| syntax(lineno, format!("bad unit kind `{}`", toks[1])))?,
                        location: map.by_id(toks[2])?,
                    });
                }
                "sc" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(syntax(lineno, "sc needs `PROVINCE OWNER`".to_string()));
                    }
                    let p = map.by_id(toks[0])?;
                    let owner = if toks[1] == "-" {
                        None
                    } else {
                        Some(map.power_by_name(toks[1])?)
                    };
                    sc_owner.insert(p, owner);
                }
                "dislodged" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 7 || toks[3] != "from" || toks[5] != "allowed" {
                        return Err(syntax(
                            lineno,
                            "dislodged needs `POWER KIND PROVINCE from PROVINCE allowed P,..|-`".to_string(),
                        ));
                    }
                    let retreat_options = if toks[6] == "-" {
                        Vec::new()
                    } else {
                        toks[6]
                            .split(',')
                            .map(|t| map.by_id(t))
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    dislodged.push(Dislodged {
                        unit: Unit {
                            power: map.power_by_name(toks[0])?,
                            kind: UnitKind::from_letter(toks[1])
                                .ok_or_else(|| syntax(lineno, format!("bad unit kind `{}`", toks[1])))?,
                            location: map.by_id(toks[2])?,
                        },
                        attacker_origin: map.by_id(toks[4])?,
                        retreat_options,
                    });
                }
                "lastorder" => {
                    let (power, order_text) = rest
                        .split_once(' ')
                        .ok_or_else(|| syntax(lineno, "lastorder needs `POWER ORDER`".to_string()))?;
                    last_orders
                        .entry(map.power_by_name(power)?)
                        .or_default()
                        .push(order_text.trim().to_string());
                }
                "end" => saw_end = true,
                other => return Err(syntax(lineno, format!("unknown keyword `{other}`"))),
            }
        }
        if !saw_end {
            return Err(syntax(text.lines().count(), "missing `end`".to_string()));
        }

        units.sort_by_key(|u| u.location);
        dislodged.sort_by_key(|d| d.unit.location);
        let mut state = GameState {
            year: year.ok_or_else(|| syntax(0, "missing `year`".to_string()))?,
            phase: phase.ok_or_else(|| syntax(0, "missing `phase`".to_string()))?,
            units,
            sc_owner,
            dislodged,
            last_orders: BTreeMap::new(),
        };
        // Past orders are parsed against the reconstructed board, since their
        // actors are the units that issued them, which may since have moved;
        // they are kept as given, without legality checks.
        let mut parsed: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
        for (power, orders) in &last_orders {
            let list: Result<Vec<Order>, EngineError> = orders
                .iter()
                .map(|t| crate::grammar::parse_order_loose(map, t, crate::grammar::Dialect::Short))
                .collect();
            parsed.insert(*power, list?);
        }
        state.last_orders = parsed;
        state.validate(map)?;
        Ok(state)
    }

    /// 64-bit FNV-1a hash of the canonical serialization.
    pub fn state_hash(&self, map: &MapSpec) -> u64 {
        fnv1a(self.serialize(map).as_bytes())
    }

    /// Season/phase heading used in prompt text, e.g. `1905 Spring: Diplomacy`.
    pub fn phase_heading(&self) -> String {
        let stage = match self.phase {
            Phase::SpringMove | Phase::FallMove => "Diplomacy",
            Phase::SpringRetreat | Phase::FallRetreat => "Retreats",
            Phase::WinterAdjust => "Adjustments",
        };
        format!("{} {}: {}", self.year, self.phase.season(), stage)
    }
}

/// FNV-1a, 64-bit: the documented state fingerprint.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// True when a province's terrain admits an army (used by builds).
pub fn army_terrain(t: Terrain) -> bool {
    matches!(t, Terrain::Land | Terrain::Coast)
}
