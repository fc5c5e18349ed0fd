//! Anchor-regularized equilibrium search (piKL-Hedge) over candidate joint
//! actions.
//!
//! Each searched power keeps a candidate list, a running-mean utility per
//! candidate, and a policy. Every iteration each power samples one joint
//! action per opponent — searched opponents from their current policies
//! with an ε-uniform exploration mix, everyone else straight from the
//! anchor — scores each own candidate against that profile with
//! [`estimate_utility`], folds the scores into the running means, and
//! resets its policy to `softmax(mean_q + β·log τ)`. Utility estimates are
//! cached by the full joint profile, whose hash also seeds the rollouts, so
//! a run is a pure function of the configuration seed.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use entente_engine::grammar::{render_order, Dialect};
use entente_engine::map::MapSpec;
use entente_engine::state::fnv1a;
use entente_engine::{GameState, JointAction, Power};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anchor::AnchorPolicy;
use crate::candidates::generate_candidates;
use crate::error::SolverError;
use crate::math::{sample_index, softmax};
use crate::seeds::mix;

/// Stream label separating the iteration sampler from other consumers of
/// the run seed.
const SEARCH_STREAM: u64 = 0x7365617263685f68;

/// Tunables for one search run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Hedge iterations T.
    pub iterations: u32,
    /// Candidate joint actions kept per power.
    pub n_candidates: usize,
    /// Orders kept per unit when building candidates.
    pub max_per_unit: usize,
    /// Anchor attraction β; 0 ignores the anchor, larger values pull the
    /// final policy toward it.
    pub beta: f64,
    /// ε-uniform exploration share used when sampling candidate lists and
    /// opponents.
    pub nash_explore: f64,
    /// Rollouts per utility estimate.
    pub rollouts: u32,
    /// Movement phases each rollout plays beyond the evaluated one.
    pub horizon: u32,
    /// Root seed; every random stream in the run derives from it.
    pub seed: u64,
    /// Record a per-iteration trace in the result.
    pub record_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            iterations: 256,
            n_candidates: 50,
            max_per_unit: 6,
            beta: 0.1,
            nash_explore: 0.1,
            rollouts: 16,
            horizon: 4,
            seed: 0,
            record_trace: false,
        }
    }
}

/// `softmax(q + β·log τ)` over candidates, computed with max-subtraction.
pub fn policy_from_q(q_values: &[f64], anchor_logprobs: &[f64], beta: f64) -> Vec<f64> {
    assert_eq!(q_values.len(), anchor_logprobs.len(), "one log-probability per q value");
    let shifted: Vec<f64> =
        q_values.iter().zip(anchor_logprobs).map(|(q, lp)| q + beta * lp).collect();
    softmax(&shifted)
}

/// One power's slice of a finished search.
#[derive(Debug, Clone)]
pub struct PowerSearch {
    pub power: Power,
    /// Duplicate-free candidate joint actions in canonical order.
    pub candidates: Vec<JointAction>,
    /// Final policy over `candidates`; sums to 1.
    pub policy: Vec<f64>,
    /// Running-mean utility per candidate after the last iteration.
    pub mean_q: Vec<f64>,
    /// Anchor log-probability per candidate.
    pub anchor_logprob: Vec<f64>,
    /// `mean_q + β·anchor_logprob`: the regularized value each candidate
    /// is ranked by, and the scalar exported per selected action.
    pub joint_q_with_anchor: Vec<f64>,
}

impl PowerSearch {
    /// Samples a candidate from the final policy.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> &JointAction {
        &self.candidates[sample_index(&self.policy, rng)]
    }

    /// The most probable candidate (first on ties).
    pub fn argmax(&self) -> &JointAction {
        let mut best = 0;
        for (i, &p) in self.policy.iter().enumerate() {
            if p > self.policy[best] {
                best = i;
            }
        }
        &self.candidates[best]
    }
}

/// One trace record: a candidate's running mean and policy probability at
/// the end of an iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: u32,
    pub power: Power,
    pub candidate: usize,
    pub mean_q: f64,
    pub prob: f64,
}

/// Result of [`run_pikl`]: per-power policies plus an optional trace.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Searched powers in map order.
    pub powers: Vec<PowerSearch>,
    /// Per-iteration records; empty unless the config asked for a trace.
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    pub fn for_power(&self, power: Power) -> Option<&PowerSearch> {
        self.powers.iter().find(|s| s.power == power)
    }

    /// Tab-separated trace lines: iteration, power, candidate index,
    /// running mean, policy probability.
    pub fn trace_lines(&self, map: &MapSpec) -> Vec<String> {
        self.trace
            .iter()
            .map(|e| {
                format!(
                    "{}\t{}\t{}\t{}\t{}",
                    e.iteration,
                    map.power_name(e.power),
                    e.candidate,
                    e.mean_q,
                    e.prob
                )
            })
            .collect()
    }
}

/// Runs the iterative search for `powers` on a movement-phase state.
///
/// Powers outside `powers` are modeled as anchor players: their joint
/// action is sampled fresh from the anchor every iteration. Identical
/// inputs produce bit-identical results.
pub fn run_pikl(
    map: &MapSpec,
    state: &GameState,
    config: &SearchConfig,
    anchor: &AnchorPolicy,
    powers: &[Power],
) -> Result<SearchResult, SolverError> {
    assert!(config.iterations >= 1, "search needs at least one iteration");
    let searched: BTreeSet<u8> = powers.iter().map(|p| p.0).collect();
    let mut slots = Vec::new();
    for power in map.all_powers().filter(|p| searched.contains(&p.0)) {
        let candidates = generate_candidates(map, state, power, anchor, config)?;
        let anchor_logprob: Vec<f64> = candidates
            .iter()
            .map(|c| anchor.joint_logprob(map, state, power, c))
            .collect::<Result<_, _>>()?;
        let n = candidates.len();
        slots.push(PowerSearch {
            power,
            candidates,
            policy: vec![1.0 / n as f64; n],
            mean_q: vec![0.0; n],
            anchor_logprob,
            joint_q_with_anchor: vec![0.0; n],
        });
    }
    let bystanders: Vec<Power> = map.all_powers().filter(|p| !searched.contains(&p.0)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, SEARCH_STREAM));
    let mut cache: HashMap<String, Vec<f64>> = HashMap::new();
    let mut trace = Vec::new();

    for t in 1..=config.iterations {
        for si in 0..slots.len() {
            let mut profile: BTreeMap<Power, JointAction> = BTreeMap::new();
            for (sj, other) in slots.iter().enumerate() {
                if sj == si {
                    continue;
                }
                let idx = if rng.gen::<f64>() < config.nash_explore {
                    rng.gen_range(0..other.candidates.len())
                } else {
                    sample_index(&other.policy, &mut rng)
                };
                profile.insert(other.power, other.candidates[idx].clone());
            }
            for &power in &bystanders {
                let orders = anchor.sample_moves(map, state, power, &mut rng)?;
                profile.insert(power, JointAction::new(power, orders)?);
            }
            let own = slots[si].power;
            for ci in 0..slots[si].candidates.len() {
                profile.insert(own, slots[si].candidates[ci].clone());
                let key = profile_key(map, &profile);
                let values = match cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let estimate =
                            estimate_for_profile(map, state, &profile, &key, anchor, config)?;
                        cache.insert(key, estimate.clone());
                        estimate
                    }
                };
                let q = &mut slots[si].mean_q[ci];
                *q += (values[own.0 as usize] - *q) / f64::from(t);
            }
            profile.remove(&own);
        }
        for slot in &mut slots {
            slot.policy = policy_from_q(&slot.mean_q, &slot.anchor_logprob, config.beta);
        }
        if config.record_trace {
            for slot in &slots {
                for ci in 0..slot.candidates.len() {
                    trace.push(TraceEntry {
                        iteration: t,
                        power: slot.power,
                        candidate: ci,
                        mean_q: slot.mean_q[ci],
                        prob: slot.policy[ci],
                    });
                }
            }
        }
    }

    for slot in &mut slots {
        slot.joint_q_with_anchor = slot
            .mean_q
            .iter()
            .zip(&slot.anchor_logprob)
            .map(|(q, lp)| q + config.beta * lp)
            .collect();
    }
    Ok(SearchResult { powers: slots, trace })
}

/// Scores one full profile; the rollout seed is derived from the profile
/// itself so cache hits and misses cannot change results.
fn estimate_for_profile(
    map: &MapSpec,
    state: &GameState,
    profile: &BTreeMap<Power, JointAction>,
    key: &str,
    anchor: &AnchorPolicy,
    config: &SearchConfig,
) -> Result<Vec<f64>, SolverError> {
    let seed = mix(config.seed, fnv1a(key.as_bytes()));
    let estimate = crate::utility::estimate_utility(
        map,
        state,
        profile,
        anchor,
        config.rollouts,
        config.horizon,
        seed,
    )?;
    Ok(estimate.values)
}

/// Canonical text form of a joint profile, used as the cache key and the
/// rollout seed material.
fn profile_key(map: &MapSpec, profile: &BTreeMap<Power, JointAction>) -> String {
    let mut parts = Vec::new();
    for (&power, joint) in profile {
        let orders: Vec<String> =
            joint.orders().iter().map(|o| render_order(map, o, Dialect::Short)).collect();
        parts.push(format!("{}:{}", map.power_name(power), orders.join(";")));
    }
    parts.join("|")
}
