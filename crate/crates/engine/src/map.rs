//! Board topology: provinces, adjacency, powers and the starting setup.
//!
//! A map is a graph with two edge relations, one per unit kind. Armies move
//! along the army relation over land and coastal provinces; fleets move along
//! the fleet relation over water and coastal provinces. A province with
//! multiple named coasts (a north and a south coast, say) is modelled as
//! extra fleet-only *coast nodes* that share the parent province's supply
//! center and occupancy: an army stands on the parent, a fleet stands on one
//! of the coast nodes, and at most one unit may occupy the family at a time.
//!
//! Maps are loaded from a plain-text format with `[powers]`, `[provinces]`,
//! `[army-adjacency]`, `[fleet-adjacency]`, `[starts]` and `[centers]`
//! sections; the grammar is documented in `docs/map-format.md`. The loader
//! distinguishes syntax errors (annotated with a line number) from invariant
//! violations (which name the offending province or edge).

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::EngineError;

/// The two unit kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnitKind {
    Army,
    Fleet,
}

impl UnitKind {
    pub fn letter(self) -> char {
        match self {
            UnitKind::Army => 'A',
            UnitKind::Fleet => 'F',
        }
    }

    pub fn noun(self) -> &'static str {
        match self {
            UnitKind::Army => "army",
            UnitKind::Fleet => "fleet",
        }
    }

    pub fn from_letter(c: &str) -> Option<UnitKind> {
        match c {
            "A" => Some(UnitKind::Army),
            "F" => Some(UnitKind::Fleet),
            _ => None,
        }
    }
}

/// Terrain classes. `Coast` provinces admit both unit kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terrain {
    Land,
    Water,
    Coast,
}

impl Terrain {
    pub fn name(self) -> &'static str {
        match self {
            Terrain::Land => "land",
            Terrain::Water => "water",
            Terrain::Coast => "coast",
        }
    }
}

/// Index of a power in [`MapSpec::powers`] (powers are sorted by name).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Power(pub u8);

/// Index of a province node in [`MapSpec::provinces`].
///
/// Provinces are sorted by id token at load time, so the index order *is*
/// the canonical lexicographic order used for deterministic iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Province(pub u16);

/// One node of the board graph: a province or a named coast of one.
#[derive(Debug, Clone)]
pub struct ProvinceSpec {
    /// Short unique token, e.g. `PAR` or `SPA/NC` for a named coast.
    pub id: String,
    /// Display name, e.g. `Paris` or `North Coast`.
    pub long_name: String,
    pub terrain: Terrain,
    pub is_supply_center: bool,
    /// Power whose home center this is, if any.
    pub home_of: Option<Power>,
    /// Parent province when this node is a named coast.
    pub coast_of: Option<Province>,
    /// Coast nodes of this province, when it has named coasts.
    pub coasts: Vec<Province>,
    pub army_adjacent: Vec<Province>,
    pub fleet_adjacent: Vec<Province>,
}

/// A starting unit from the `[starts]` section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StartUnit {
    pub power: Power,
    pub kind: UnitKind,
    pub location: Province,
}

/// A parsed and validated map.
#[derive(Debug, Clone)]
pub struct MapSpec {
    /// Power names, sorted.
    pub powers: Vec<String>,
    /// All graph nodes, sorted by id token.
    pub provinces: Vec<ProvinceSpec>,
    pub start_units: Vec<StartUnit>,
    /// Initial owner per supply center (base provinces only); `None` is neutral.
    pub start_sc_owner: Vec<(Province, Option<Power>)>,
    by_id: HashMap<String, Province>,
}

impl MapSpec {
    /// Parses and validates a map document.
    pub fn parse(text: &str) -> Result<MapSpec, EngineError> {
        loader::parse(text)
    }

    pub fn province(&self, p: Province) -> &ProvinceSpec {
        &self.provinces[p.0 as usize]
    }

    pub fn by_id(&self, token: &str) -> Result<Province, EngineError> {
        self.by_id
            .get(token)
            .copied()
            .ok_or_else(|| EngineError::UnknownProvince(token.to_string()))
    }

    pub fn power_by_name(&self, name: &str) -> Result<Power, EngineError> {
        self.powers
            .iter()
            .position(|n| n == name)
            .map(|i| Power(i as u8))
            .ok_or_else(|| EngineError::UnknownPower(name.to_string()))
    }

    pub fn power_name(&self, p: Power) -> &str {
        &self.powers[p.0 as usize]
    }

    pub fn power_count(&self) -> usize {
        self.powers.len()
    }

    pub fn all_powers(&self) -> impl Iterator<Item = Power> {
        (0..self.powers.len()).map(|i| Power(i as u8))
    }

    pub fn all_nodes(&self) -> impl Iterator<Item = Province> {
        (0..self.provinces.len()).map(|i| Province(i as u16))
    }

    /// The province family root: a coast node resolves to its parent.
    pub fn base(&self, p: Province) -> Province {
        self.province(p).coast_of.unwrap_or(p)
    }

    /// Number of provinces proper (coast nodes are not counted).
    pub fn base_province_count(&self) -> usize {
        self.provinces.iter().filter(|s| s.coast_of.is_none()).count()
    }

    /// Supply-center base provinces, in canonical order.
    pub fn supply_centers(&self) -> impl Iterator<Item = Province> + '_ {
        self.all_nodes().filter(|&p| self.province(p).is_supply_center)
    }

    pub fn supply_center_count(&self) -> usize {
        self.supply_centers().count()
    }

    /// Centers needed for a solo win: strictly more than half.
    pub fn win_threshold(&self) -> usize {
        self.supply_center_count() / 2 + 1
    }

    pub fn adjacent(&self, p: Province, kind: UnitKind) -> &[Province] {
        match kind {
            UnitKind::Army => &self.province(p).army_adjacent,
            UnitKind::Fleet => &self.province(p).fleet_adjacent,
        }
    }

    /// Whether a unit of `kind` may stand on node `p`.
    ///
    /// Armies stand on land or coastal base provinces; fleets stand on water,
    /// on coast nodes, or on coastal provinces without named coasts.
    pub fn can_occupy(&self, kind: UnitKind, p: Province) -> bool {
        let spec = self.province(p);
        match kind {
            UnitKind::Army => {
                spec.coast_of.is_none() && matches!(spec.terrain, Terrain::Land | Terrain::Coast)
            }
            UnitKind::Fleet => match spec.terrain {
                Terrain::Water => true,
                Terrain::Coast => spec.coasts.is_empty(),
                Terrain::Land => false,
            },
        }
    }

    /// Whether a unit of `kind` standing on `from` could move into the
    /// province family of `to_base` (any coast). This is the reachability
    /// test used for support legality, where no coast is named.
    pub fn can_reach(&self, kind: UnitKind, from: Province, to_base: Province) -> bool {
        self.adjacent(from, kind)
            .iter()
            .any(|&n| self.base(n) == to_base)
    }

    /// Breadth-first distance from `from_base` to the nearest of `targets`
    /// (base provinces), walking the union of army and fleet adjacency.
    /// Returns `None` when unreachable.
    pub fn union_distance(&self, from_base: Province, targets: &HashSet<Province>) -> Option<usize> {
        if targets.contains(&from_base) {
            return Some(0);
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(from_base);
        queue.push_back((from_base, 0usize));
        while let Some((at, d)) = queue.pop_front() {
            for next in self.union_neighbors(at) {
                if targets.contains(&next) {
                    return Some(d + 1);
                }
                if seen.insert(next) {
                    queue.push_back((next, d + 1));
                }
            }
        }
        None
    }

    /// Breadth-first distance over a single kind's adjacency, from node
    /// `from` to the nearest node whose base is in `targets`.
    pub fn kind_distance(
        &self,
        kind: UnitKind,
        from: Province,
        targets: &HashSet<Province>,
    ) -> Option<usize> {
        if targets.contains(&self.base(from)) {
            return Some(0);
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(from);
        queue.push_back((from, 0usize));
        while let Some((at, d)) = queue.pop_front() {
            for &next in self.adjacent(at, kind) {
                if targets.contains(&self.base(next)) {
                    return Some(d + 1);
                }
                if seen.insert(next) {
                    queue.push_back((next, d + 1));
                }
            }
        }
        None
    }

    /// Base provinces adjacent to any node of `base`'s family, by any kind.
    fn union_neighbors(&self, base: Province) -> Vec<Province> {
        let mut family = vec![base];
        family.extend(self.province(base).coasts.iter().copied());
        let mut out = Vec::new();
        for node in family {
            let spec = self.province(node);
            for &n in spec.army_adjacent.iter().chain(spec.fleet_adjacent.iter()) {
                let b = self.base(n);
                if b != base && !out.contains(&b) {
                    out.push(b);
                }
            }
        }
        out
    }
}

mod loader {
    use super::*;

    #[derive(Default)]
    struct RawProvince {
        id: String,
        long_name: String,
        terrain: Option<Terrain>,
        sc: bool,
        home_of: Option<String>,
        coast_of: Option<String>,
        line: usize,
    }

    #[derive(Default)]
    struct RawMap {
        powers: Vec<(String, usize)>,
        provinces: Vec<RawProvince>,
        army_edges: Vec<(String, String, usize)>,
        fleet_edges: Vec<(String, String, usize)>,
        starts: Vec<(String, String, String, usize)>, // power, kind letter, province
        centers: Vec<(String, String, usize)>,        // owner-or-neutral, province
    }

    fn syntax(line: usize, msg: impl Into<String>) -> EngineError {
        EngineError::MapSyntax { line, msg: msg.into() }
    }

    fn invariant(msg: impl Into<String>) -> EngineError {
        EngineError::MapInvariant(msg.into())
    }

    pub(super) fn parse(text: &str) -> Result<MapSpec, EngineError> {
        let raw = scan(text)?;
        build(raw)
    }

    fn scan(text: &str) -> Result<RawMap, EngineError> {
        let mut raw = RawMap::default();
        let mut section: Option<String> = None;
        for (idx, full_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match full_line.find('#') {
                Some(pos) => &full_line[..pos],
                None => full_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(lineno, "unterminated section header"))?;
                section = Some(name.trim().to_string());
                continue;
            }
            match section.as_deref() {
                Some("powers") => {
                    for tok in line.split_whitespace() {
                        raw.powers.push((tok.to_string(), lineno));
                    }
                }
                Some("provinces") => raw.provinces.push(scan_province(line, lineno)?),
                Some("army-adjacency") => scan_adjacency(line, lineno, &mut raw.army_edges)?,
                Some("fleet-adjacency") => scan_adjacency(line, lineno, &mut raw.fleet_edges)?,
                Some("starts") => scan_starts(line, lineno, &mut raw.starts)?,
                Some("centers") => scan_centers(line, lineno, &mut raw.centers)?,
                Some(other) => return Err(syntax(lineno, format!("unknown section `{other}`"))),
                None => return Err(syntax(lineno, "content before any section header")),
            }
        }
        Ok(raw)
    }

    fn scan_province(line: &str, lineno: usize) -> Result<RawProvince, EngineError> {
        let fields: Vec<&str> = line.split(';').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(syntax(lineno, "province needs `ID ; Long Name ; terrain [; flags]`"));
        }
        let id = fields[0].to_string();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(syntax(lineno, format!("bad province id `{id}`")));
        }
        let long_name = fields[1].to_string();
        if long_name.is_empty() {
            return Err(syntax(lineno, "empty province name"));
        }
        let terrain = match fields[2] {
            "land" => Terrain::Land,
            "water" => Terrain::Water,
            "coast" => Terrain::Coast,
            other => return Err(syntax(lineno, format!("unknown terrain `{other}`"))),
        };
        let mut prov = RawProvince {
            id,
            long_name,
            terrain: Some(terrain),
            line: lineno,
            ..RawProvince::default()
        };
        for field in &fields[3..] {
            if field.is_empty() {
                continue;
            }
            for flag in field.split_whitespace() {
                if flag == "sc" {
                    prov.sc = true;
                } else if let Some(power) = flag.strip_prefix("home=") {
                    prov.home_of = Some(power.to_string());
                } else if let Some(parent) = flag.strip_prefix("coast-of=") {
                    prov.coast_of = Some(parent.to_string());
                } else {
                    return Err(syntax(lineno, format!("unknown province flag `{flag}`")));
                }
            }
        }
        Ok(prov)
    }

    fn scan_adjacency(
        line: &str,
        lineno: usize,
        edges: &mut Vec<(String, String, usize)>,
    ) -> Result<(), EngineError> {
        let (head, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(lineno, "adjacency needs `ID: neighbors...`"))?;
        let head = head.trim().to_string();
        let mut any = false;
        for tok in rest.split_whitespace() {
            edges.push((head.clone(), tok.to_string(), lineno));
            any = true;
        }
        if !any {
            return Err(syntax(lineno, format!("no neighbors listed for `{head}`")));
        }
        Ok(())
    }

    fn scan_starts(
        line: &str,
        lineno: usize,
        starts: &mut Vec<(String, String, String, usize)>,
    ) -> Result<(), EngineError> {
        let (power, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(lineno, "starts need `Power: A PROV, F PROV, ...`"))?;
        for item in rest.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let mut toks = item.split_whitespace();
            let kind = toks.next().unwrap_or_default().to_string();
            let prov = toks
                .next()
                .ok_or_else(|| syntax(lineno, format!("bad start unit `{item}`")))?
                .to_string();
            if toks.next().is_some() {
                return Err(syntax(lineno, format!("bad start unit `{item}`")));
            }
            starts.push((power.trim().to_string(), kind, prov, lineno));
        }
        Ok(())
    }

    fn scan_centers(
        line: &str,
        lineno: usize,
        centers: &mut Vec<(String, String, usize)>,
    ) -> Result<(), EngineError> {
        let (owner, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(lineno, "centers need `Power: PROV ...` or `neutral: PROV ...`"))?;
        for tok in rest.split_whitespace() {
            centers.push((owner.trim().to_string(), tok.to_string(), lineno));
        }
        Ok(())
    }

    fn build(raw: RawMap) -> Result<MapSpec, EngineError> {
        // Powers: sorted, unique, `neutral` reserved.
        let mut powers: Vec<String> = Vec::new();
        for (name, line) in &raw.powers {
            if name == "neutral" {
                return Err(syntax(*line, "`neutral` is reserved and cannot be a power"));
            }
            if powers.contains(name) {
                return Err(syntax(*line, format!("duplicate power `{name}`")));
            }
            powers.push(name.clone());
        }
        powers.sort();
        if powers.is_empty() {
            return Err(invariant("map declares no powers".to_string()));
        }

        // Provinces: sorted by id so index order is the canonical order.
        let mut raws = raw.provinces;
        raws.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = HashMap::new();
        for (i, p) in raws.iter().enumerate() {
            if by_id.insert(p.id.clone(), Province(i as u16)).is_some() {
                return Err(syntax(p.line, format!("duplicate province id `{}`", p.id)));
            }
        }
        if raws.is_empty() {
            return Err(invariant("map declares no provinces".to_string()));
        }

        let power_index = |name: &str| -> Result<Power, EngineError> {
            powers
                .iter()
                .position(|n| n == name)
                .map(|i| Power(i as u8))
                .ok_or_else(|| EngineError::UnknownPower(name.to_string()))
        };
        let province_index = |token: &str| -> Result<Province, EngineError> {
            by_id
                .get(token)
                .copied()
                .ok_or_else(|| EngineError::UnknownProvince(token.to_string()))
        };

        let mut provinces: Vec<ProvinceSpec> = Vec::with_capacity(raws.len());
        for p in &raws {
            let home_of = p.home_of.as_deref().map(power_index).transpose()?;
            let coast_of = p.coast_of.as_deref().map(province_index).transpose()?;
            provinces.push(ProvinceSpec {
                id: p.id.clone(),
                long_name: p.long_name.clone(),
                terrain: p.terrain.unwrap(),
                is_supply_center: p.sc,
                home_of,
                coast_of,
                coasts: Vec::new(),
                army_adjacent: Vec::new(),
                fleet_adjacent: Vec::new(),
            });
        }

        // Coast-node structure.
        for i in 0..provinces.len() {
            let spec = &provinces[i];
            let id = spec.id.clone();
            if let Some(parent) = spec.coast_of {
                if spec.is_supply_center || spec.home_of.is_some() {
                    return Err(invariant(format!(
                        "coast node {id} must not carry supply-center flags; put them on the parent"
                    )));
                }
                if spec.terrain != Terrain::Coast {
                    return Err(invariant(format!("coast node {id} must have coast terrain")));
                }
                let parent_spec = &provinces[parent.0 as usize];
                if parent_spec.coast_of.is_some() {
                    return Err(invariant(format!(
                        "coast node {id} points at {}, which is itself a coast node",
                        parent_spec.id
                    )));
                }
                if parent_spec.terrain != Terrain::Coast {
                    return Err(invariant(format!(
                        "coast node {id} of non-coastal province {}",
                        parent_spec.id
                    )));
                }
                provinces[parent.0 as usize].coasts.push(Province(i as u16));
            }
        }

        // Adjacency. Edges are directed in the file; symmetry is validated.
        let insert_edge = |provinces: &mut Vec<ProvinceSpec>,
                           kind: UnitKind,
                           from: &str,
                           to: &str,
                           line: usize|
         -> Result<(), EngineError> {
            let f = province_index(from).map_err(|_| {
                syntax(line, format!("adjacency references unknown province `{from}`"))
            })?;
            let t = province_index(to).map_err(|_| {
                syntax(line, format!("adjacency references unknown province `{to}`"))
            })?;
            if f == t {
                return Err(invariant(format!("self-adjacency at {from}")));
            }
            for (end, tok) in [(f, from), (t, to)] {
                let spec = &provinces[end.0 as usize];
                match kind {
                    UnitKind::Army => {
                        if spec.terrain == Terrain::Water {
                            return Err(invariant(format!(
                                "army adjacency {from} {to} touches water province {tok}"
                            )));
                        }
                        if spec.coast_of.is_some() {
                            return Err(invariant(format!(
                                "army adjacency {from} {to} touches coast node {tok}"
                            )));
                        }
                    }
                    UnitKind::Fleet => {
                        if spec.terrain == Terrain::Land {
                            return Err(invariant(format!(
                                "fleet adjacency {from} {to} touches landlocked province {tok}"
                            )));
                        }
                        if !spec.coasts.is_empty() {
                            return Err(invariant(format!(
                                "fleet adjacency {from} {to} touches {tok}, which has named coasts; use its coast nodes"
                            )));
                        }
                    }
                }
            }
            let list = match kind {
                UnitKind::Army => &mut provinces[f.0 as usize].army_adjacent,
                UnitKind::Fleet => &mut provinces[f.0 as usize].fleet_adjacent,
            };
            if list.contains(&t) {
                return Err(syntax(line, format!("duplicate edge {from} {to}")));
            }
            list.push(t);
            Ok(())
        };

        for (from, to, line) in &raw.army_edges {
            insert_edge(&mut provinces, UnitKind::Army, from, to, *line)?;
        }
        for (from, to, line) in &raw.fleet_edges {
            insert_edge(&mut provinces, UnitKind::Fleet, from, to, *line)?;
        }
        for spec in &mut provinces {
            spec.army_adjacent.sort();
            spec.fleet_adjacent.sort();
            spec.coasts.sort();
        }

        // Symmetry per kind.
        for (i, spec) in provinces.iter().enumerate() {
            let here = Province(i as u16);
            for (kind, list) in [
                (UnitKind::Army, &spec.army_adjacent),
                (UnitKind::Fleet, &spec.fleet_adjacent),
            ] {
                for &n in list {
                    let back = match kind {
                        UnitKind::Army => &provinces[n.0 as usize].army_adjacent,
                        UnitKind::Fleet => &provinces[n.0 as usize].fleet_adjacent,
                    };
                    if !back.contains(&here) {
                        return Err(invariant(format!(
                            "{} adjacency {} {} lacks the reverse edge",
                            kind.noun(),
                            spec.id,
                            provinces[n.0 as usize].id
                        )));
                    }
                }
            }
        }

        // Supply-center flags.
        for spec in &provinces {
            if spec.is_supply_center && spec.terrain == Terrain::Water {
                return Err(invariant(format!("water province {} cannot be a supply center", spec.id)));
            }
            if spec.home_of.is_some() && !spec.is_supply_center {
                return Err(invariant(format!(
                    "home center {} is not flagged as a supply center",
                    spec.id
                )));
            }
        }

        let mut map = MapSpec {
            powers,
            provinces,
            start_units: Vec::new(),
            start_sc_owner: Vec::new(),
            by_id,
        };

        // Starting units.
        let mut occupied: HashSet<Province> = HashSet::new();
        for (power, kind, prov, line) in &raw.starts {
            let power = map.power_by_name(power).map_err(|_| {
                syntax(*line, format!("start unit for unknown power `{power}`"))
            })?;
            let kind = UnitKind::from_letter(kind)
                .ok_or_else(|| syntax(*line, format!("bad unit kind `{kind}`")))?;
            let location = map
                .by_id(prov)
                .map_err(|_| syntax(*line, format!("start unit in unknown province `{prov}`")))?;
            if !map.can_occupy(kind, location) {
                return Err(invariant(format!(
                    "start {} cannot stand in {prov}",
                    kind.noun()
                )));
            }
            if !occupied.insert(map.base(location)) {
                return Err(invariant(format!("two start units share province {prov}")));
            }
            map.start_units.push(StartUnit { power, kind, location });
        }
        map.start_units.sort_by_key(|u| u.location);

        // Initial center ownership; unlisted centers are neutral.
        let mut owner: HashMap<Province, Option<Power>> = HashMap::new();
        for (owner_name, prov, line) in &raw.centers {
            let p = map
                .by_id(prov)
                .map_err(|_| syntax(*line, format!("center entry for unknown province `{prov}`")))?;
            let spec = map.province(p);
            if !spec.is_supply_center {
                return Err(invariant(format!("{prov} is not a supply center")));
            }
            if spec.coast_of.is_some() {
                return Err(invariant(format!("center ownership must use the base province, not {prov}")));
            }
            let value = if owner_name == "neutral" {
                None
            } else {
                Some(map.power_by_name(owner_name).map_err(|_| {
                    syntax(*line, format!("center owned by unknown power `{owner_name}`"))
                })?)
            };
            if owner.insert(p, value).is_some() {
                return Err(invariant(format!("center {prov} assigned twice")));
            }
        }
        for p in map.supply_centers().collect::<Vec<_>>() {
            let value = owner.get(&p).copied().unwrap_or(None);
            map.start_sc_owner.push((p, value));
        }
        map.start_sc_owner.sort_by_key(|(p, _)| *p);

        Ok(map)
    }
}
