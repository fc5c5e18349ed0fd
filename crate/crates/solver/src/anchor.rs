//! Anchor policies: fixed per-unit order distributions that search is
//! regularized toward.
//!
//! Three kinds are provided. [`AnchorPolicy::Uniform`] spreads mass evenly
//! over a unit's legal orders. [`AnchorPolicy::Heuristic`] scores orders with
//! a small hand-written rubric (grab centers, approach centers, back up your
//! own attacks) and takes a softmax. [`AnchorPolicy::Table`] replays
//! per-state probabilities loaded from a text file, for plugging in an
//! externally learned policy.
//!
//! Every distribution is floored: each candidate receives at least
//! [`ANCHOR_FLOOR`] probability, so log-probabilities stay finite and the
//! worst-case surprisal `max log(1/τ)` is a concrete number.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use entente_engine::grammar::{render_order, Dialect};
use entente_engine::legal::{legal_orders, legal_retreats};
use entente_engine::map::MapSpec;
use entente_engine::{GameState, JointAction, Order, Power, Province, UnitKind};
use rand::Rng;

use crate::error::SolverError;
use crate::math::{normalize, sample_index, softmax};

/// Minimum probability any candidate order receives from an anchor.
pub const ANCHOR_FLOOR: f64 = 1e-3;

/// Scoring weights for the heuristic anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicWeights {
    /// Moving onto a supply center the acting power does not own.
    pub capture: f64,
    /// Moving strictly closer to the nearest such center.
    pub approach: f64,
    /// Supporting a move by a unit of the same power.
    pub assist: f64,
}

impl Default for HeuristicWeights {
    fn default() -> Self {
        HeuristicWeights { capture: 2.0, approach: 1.0, assist: 0.5 }
    }
}

/// A fixed reference policy over each unit's legal orders.
#[derive(Debug, Clone)]
pub enum AnchorPolicy {
    /// Every legal order equally likely.
    Uniform,
    /// Softmax over rubric scores; see [`HeuristicWeights`].
    Heuristic(HeuristicWeights),
    /// Probabilities looked up from a [`TableAnchor`]; units with no table
    /// entries fall back to uniform.
    Table(TableAnchor),
}

impl AnchorPolicy {
    /// The heuristic anchor with default weights.
    pub fn heuristic() -> AnchorPolicy {
        AnchorPolicy::Heuristic(HeuristicWeights::default())
    }

    /// Probability of each order in `menu` for one unit of `power`.
    ///
    /// The result sums to 1 and every entry is at least [`ANCHOR_FLOOR`]
    /// (the floor shrinks only for menus so large a flat floor would be
    /// infeasible).
    pub fn unit_distribution(
        &self,
        map: &MapSpec,
        state: &GameState,
        power: Power,
        menu: &[Order],
    ) -> Vec<f64> {
        assert!(!menu.is_empty(), "anchor queried with an empty menu");
        let n = menu.len();
        let raw = match self {
            AnchorPolicy::Uniform => return vec![1.0 / n as f64; n],
            AnchorPolicy::Heuristic(weights) => {
                let scores: Vec<f64> =
                    menu.iter().map(|o| heuristic_score(map, state, power, o, weights)).collect();
                softmax(&scores)
            }
            AnchorPolicy::Table(table) => {
                let mut raw: Vec<f64> =
                    menu.iter().map(|o| table.lookup(map, state, power, o)).collect();
                let z: f64 = raw.iter().sum();
                if z <= 0.0 {
                    return vec![1.0 / n as f64; n];
                }
                normalize(&mut raw);
                raw
            }
        };
        floor_mix(raw)
    }

    /// Log-probability of a full movement joint action under this anchor,
    /// taken as the sum of per-unit log-probabilities over each unit's full
    /// legal menu.
    ///
    /// Errors if `joint` does not contain exactly one legal order per unit
    /// of `power`.
    pub fn joint_logprob(
        &self,
        map: &MapSpec,
        state: &GameState,
        power: Power,
        joint: &JointAction,
    ) -> Result<f64, SolverError> {
        let menus = legal_orders(map, state, power)?;
        if joint.len() != menus.len() {
            return Err(SolverError::IllegalJoint(format!(
                "{} orders for {} units",
                joint.len(),
                menus.len()
            )));
        }
        let by_base: BTreeMap<Province, &Vec<Order>> =
            menus.iter().map(|(&node, menu)| (map.base(node), menu)).collect();
        let mut total = 0.0;
        for order in joint.orders() {
            let actor = order.actor().ok_or_else(|| {
                SolverError::IllegalJoint(render_order(map, order, Dialect::Short))
            })?;
            let menu = by_base
                .get(&map.base(actor.province))
                .ok_or_else(|| SolverError::IllegalJoint(render_order(map, order, Dialect::Short)))?;
            let idx = menu
                .iter()
                .position(|o| o == order)
                .ok_or_else(|| SolverError::IllegalJoint(render_order(map, order, Dialect::Short)))?;
            let p = self.unit_distribution(map, state, power, menu)[idx];
            if p <= 0.0 {
                return Err(SolverError::ZeroAnchorProbability);
            }
            total += p.ln();
        }
        Ok(total)
    }

    /// Samples one order per unit of `power` in a movement phase, in
    /// canonical unit order.
    pub fn sample_moves<R: Rng>(
        &self,
        map: &MapSpec,
        state: &GameState,
        power: Power,
        rng: &mut R,
    ) -> Result<Vec<Order>, SolverError> {
        let menus = legal_orders(map, state, power)?;
        Ok(self.sample_from_menus(map, state, power, &menus, rng))
    }

    /// Samples one order per dislodged unit of `power` in a retreat phase.
    pub fn sample_retreats<R: Rng>(
        &self,
        map: &MapSpec,
        state: &GameState,
        power: Power,
        rng: &mut R,
    ) -> Result<Vec<Order>, SolverError> {
        let menus = legal_retreats(map, state, power)?;
        Ok(self.sample_from_menus(map, state, power, &menus, rng))
    }

    fn sample_from_menus<R: Rng>(
        &self,
        map: &MapSpec,
        state: &GameState,
        power: Power,
        menus: &BTreeMap<Province, Vec<Order>>,
        rng: &mut R,
    ) -> Vec<Order> {
        menus
            .values()
            .map(|menu| {
                let probs = self.unit_distribution(map, state, power, menu);
                menu[sample_index(&probs, rng)]
            })
            .collect()
    }
}

/// Mixes a flat floor into a distribution: `p_i = ε + (1 − nε)·raw_i`.
fn floor_mix(mut raw: Vec<f64>) -> Vec<f64> {
    let n = raw.len() as f64;
    let eps = ANCHOR_FLOOR.min(0.5 / n);
    let scale = 1.0 - n * eps;
    for p in &mut raw {
        *p = eps + scale * *p;
    }
    raw
}

/// Rubric score of one order; anything outside the rubric scores 0, so
/// retreat and winter menus come out uniform.
fn heuristic_score(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    order: &Order,
    weights: &HeuristicWeights,
) -> f64 {
    match *order {
        Order::Move { unit, dest } => {
            let targets: HashSet<Province> = map
                .supply_centers()
                .filter(|p| state.sc_owner.get(p) != Some(&Some(power)))
                .collect();
            let mut score = 0.0;
            if targets.contains(&map.base(dest)) {
                score += weights.capture;
            }
            let before = distance_or_max(map, unit.kind, unit.province, &targets);
            let after = distance_or_max(map, unit.kind, dest, &targets);
            if after < before {
                score += weights.approach;
            }
            score
        }
        Order::SupportMove { origin, .. } => match state.unit_at(map, origin) {
            Some(u) if u.power == power => weights.assist,
            _ => 0.0,
        },
        _ => 0.0,
    }
}

fn distance_or_max(
    map: &MapSpec,
    kind: UnitKind,
    from: Province,
    targets: &HashSet<Province>,
) -> usize {
    map.kind_distance(kind, from, targets).unwrap_or(usize::MAX)
}

/// File-backed anchor probabilities.
///
/// The file is line-delimited; each record has five tab-separated fields:
///
/// ```text
/// <state hash, hex> <power name> <unit node id> <order, short dialect> <probability>
/// ```
///
/// The state hash is [`GameState::state_hash`] of the queried state. Blank
/// lines and lines starting with `#` are skipped. Probabilities are weights:
/// a unit's entries are normalized when queried, orders without entries get
/// weight 0, and a unit with no entries at all (or all zero) falls back to
/// uniform.
#[derive(Debug, Clone, Default)]
pub struct TableAnchor {
    entries: HashMap<String, f64>,
}

impl TableAnchor {
    /// Parses the table file format from a string.
    pub fn parse(text: &str) -> Result<TableAnchor, SolverError> {
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(SolverError::TableSyntax {
                    line: line_no,
                    msg: format!("expected 5 tab-separated fields, found {}", fields.len()),
                });
            }
            if u64::from_str_radix(fields[0], 16).is_err() {
                return Err(SolverError::TableSyntax {
                    line: line_no,
                    msg: format!("`{}` is not a hex state hash", fields[0]),
                });
            }
            let prob: f64 = fields[4].parse().map_err(|_| SolverError::TableSyntax {
                line: line_no,
                msg: format!("`{}` is not a number", fields[4]),
            })?;
            if !prob.is_finite() || prob < 0.0 {
                return Err(SolverError::TableSyntax {
                    line: line_no,
                    msg: "probability must be finite and non-negative".to_string(),
                });
            }
            let key = fields[..4].join("\t");
            if entries.insert(key, prob).is_some() {
                return Err(SolverError::TableSyntax {
                    line: line_no,
                    msg: "duplicate entry for this state, unit and order".to_string(),
                });
            }
        }
        Ok(TableAnchor { entries })
    }

    /// Reads and parses a table file.
    pub fn load(path: &std::path::Path) -> Result<TableAnchor, SolverError> {
        let text = std::fs::read_to_string(path).map_err(|source| SolverError::TableRead {
            path: path.display().to_string(),
            source,
        })?;
        TableAnchor::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&self, map: &MapSpec, state: &GameState, power: Power, order: &Order) -> f64 {
        let key = entry_key(map, state, power, order);
        self.entries.get(&key).copied().unwrap_or(0.0)
    }
}

/// The lookup key for one order: the first four fields of a table line.
fn entry_key(map: &MapSpec, state: &GameState, power: Power, order: &Order) -> String {
    let node = match order.actor() {
        Some(unit) => map.province(unit.province).id.clone(),
        None => "-".to_string(),
    };
    format!(
        "{:016x}\t{}\t{}\t{}",
        state.state_hash(map),
        map.power_name(power),
        node,
        render_order(map, order, Dialect::Short)
    )
}

/// Formats a table line for `order` with the given weight, matching what
/// [`TableAnchor::parse`] reads back.
pub fn table_line(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    order: &Order,
    prob: f64,
) -> String {
    format!("{}\t{}", entry_key(map, state, power, order), prob)
}

impl fmt::Display for HeuristicWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "capture {} / approach {} / assist {}",
            self.capture, self.approach, self.assist
        )
    }
}
