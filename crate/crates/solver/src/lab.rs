//! Abstract two-player zero-sum games with factored action tuples.
//!
//! This is the controlled setting where the solver's convergence claim is
//! checkable exactly: both players run anchor-regularized Hedge with a
//! decaying step, every per-iteration policy is built through the
//! unit-by-unit factorization (and checked against the joint softmax), and
//! the average policies' exploitability is compared with the
//! `β·max log(1/τ)` guarantee by exhaustive best response.
//!
//! Shaping: player `i` feeds Hedge the utility `u_i + β_i·log τ_i(own
//! action)`. Own-action shaping does not move the game's best responses
//! against a fixed opponent beyond the `β_i·δ_i` allowance, which is what
//! makes the exploitability bound hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SolverError;
use crate::factor::JointQTable;
use crate::math::sample_index;

/// A finite zero-sum game; each player's actions are tuples from a product
/// of small alphabets.
#[derive(Debug, Clone)]
pub struct MatrixGame {
    sizes1: Vec<usize>,
    sizes2: Vec<usize>,
    /// Player-1 payoff, row-major over (player-1 tuple, player-2 tuple);
    /// player 2 receives the negation.
    payoff1: Vec<f64>,
    anchor1: Vec<f64>,
    anchor2: Vec<f64>,
}

impl MatrixGame {
    pub fn new(
        sizes1: Vec<usize>,
        sizes2: Vec<usize>,
        payoff1: Vec<f64>,
        anchor1: Vec<f64>,
        anchor2: Vec<f64>,
    ) -> Result<MatrixGame, SolverError> {
        let n1: usize = sizes1.iter().product();
        let n2: usize = sizes2.iter().product();
        if sizes1.is_empty() || sizes2.is_empty() || n1 == 0 || n2 == 0 {
            return Err(SolverError::Shape("both players need non-empty alphabets".to_string()));
        }
        if payoff1.len() != n1 * n2 {
            return Err(SolverError::Shape(format!(
                "payoff needs {} entries, got {}",
                n1 * n2,
                payoff1.len()
            )));
        }
        for (anchor, n) in [(&anchor1, n1), (&anchor2, n2)] {
            if anchor.len() != n {
                return Err(SolverError::Shape(format!(
                    "anchor needs {} entries, got {}",
                    n,
                    anchor.len()
                )));
            }
            if anchor.iter().any(|&p| !p.is_finite() || p <= 0.0) {
                return Err(SolverError::ZeroAnchorProbability);
            }
            let z: f64 = anchor.iter().sum();
            if (z - 1.0).abs() > 1e-6 {
                return Err(SolverError::Shape(format!("anchor sums to {z}, not 1")));
            }
        }
        Ok(MatrixGame { sizes1, sizes2, payoff1, anchor1, anchor2 })
    }

    /// Rock-paper-scissors with uniform anchors: the standard symmetric
    /// sanity case whose equilibrium is uniform.
    pub fn rock_paper_scissors() -> MatrixGame {
        let u = vec![1.0 / 3.0; 3];
        MatrixGame::new(
            vec![3],
            vec![3],
            vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0],
            u.clone(),
            u,
        )
        .expect("fixed game is well-formed")
    }

    /// Matching pennies with uniform anchors: player 1 wants to match.
    pub fn matching_pennies() -> MatrixGame {
        let u = vec![0.5; 2];
        MatrixGame::new(vec![2], vec![2], vec![1.0, -1.0, -1.0, 1.0], u.clone(), u)
            .expect("fixed game is well-formed")
    }

    pub fn n1(&self) -> usize {
        self.sizes1.iter().product()
    }

    pub fn n2(&self) -> usize {
        self.sizes2.iter().product()
    }

    pub fn sizes(&self, player: usize) -> &[usize] {
        if player == 0 {
            &self.sizes1
        } else {
            &self.sizes2
        }
    }

    pub fn anchor(&self, player: usize) -> &[f64] {
        if player == 0 {
            &self.anchor1
        } else {
            &self.anchor2
        }
    }

    /// Player-1 payoff for a pure profile.
    pub fn payoff1(&self, i: usize, j: usize) -> f64 {
        self.payoff1[i * self.n2() + j]
    }

    /// Player-1 expected payoff under mixed policies.
    pub fn value1(&self, pi1: &[f64], pi2: &[f64]) -> f64 {
        let mut v = 0.0;
        for (i, &p) in pi1.iter().enumerate() {
            for (j, &q) in pi2.iter().enumerate() {
                v += p * q * self.payoff1(i, j);
            }
        }
        v
    }
}

/// Worst-case anchor surprisal `max log(1/τ)`; the scale of the
/// approximation allowance the anchor term buys.
pub fn delta_bound(anchor: &[f64]) -> Result<f64, SolverError> {
    let mut min = f64::INFINITY;
    for &p in anchor {
        if !p.is_finite() || p <= 0.0 {
            return Err(SolverError::ZeroAnchorProbability);
        }
        min = min.min(p);
    }
    Ok(-min.ln())
}

/// How much each player gains by best-responding to the other's policy:
/// `(max_i u1(i, π2) − u1(π1, π2), max_j u2(π1, j) − u2(π1, π2))`. Both are
/// non-negative; (0, 0) exactly at an equilibrium.
pub fn exploitability(game: &MatrixGame, pi1: &[f64], pi2: &[f64]) -> (f64, f64) {
    let value = game.value1(pi1, pi2);
    let mut best1 = f64::NEG_INFINITY;
    for i in 0..game.n1() {
        let u: f64 = pi2.iter().enumerate().map(|(j, &q)| q * game.payoff1(i, j)).sum();
        best1 = best1.max(u);
    }
    let mut best2 = f64::NEG_INFINITY;
    for j in 0..game.n2() {
        let u: f64 = pi1.iter().enumerate().map(|(i, &p)| -p * game.payoff1(i, j)).sum();
        best2 = best2.max(u);
    }
    (best1 - value, best2 - (-value))
}

/// How per-iteration utilities are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// Exact expectation against the opponent's current policy; the run is
    /// deterministic and the seed is unused.
    ExactExpectation,
    /// One pure opponent sample per iteration, as the full-scale search
    /// does.
    Sampled,
}

/// Exploitability of both running average policies after an iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub exploit1: f64,
    pub exploit2: f64,
}

/// Result of [`run_factored_pikl`].
#[derive(Debug, Clone)]
pub struct LabResult {
    /// Average policy over all iterations, per player.
    pub average1: Vec<f64>,
    pub average2: Vec<f64>,
    /// Exploitability of the running averages after every iteration.
    pub trace: Vec<TracePoint>,
    /// Largest per-iteration gap between the factored policy actually
    /// played and the joint softmax it must equal.
    pub max_factor_gap: f64,
}

impl LabResult {
    /// Tab-separated lines: iteration, exploitability of each average.
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace
            .iter()
            .map(|p| format!("{}\t{}\t{}", p.iteration, p.exploit1, p.exploit2))
            .collect()
    }
}

/// Step-size tuning constant for the decaying Hedge schedule.
const ETA_SCALE: f64 = 2.0;

/// Runs both players' anchor-regularized Hedge for `iterations` rounds and
/// returns the average policies with an exploitability trace.
///
/// Each player's policy at round t is the unit-by-unit factorization of
/// `softmax(η_t·Σ_{s<t} w_s)` with `w_s = u_s + β·log τ` and
/// `η_t ∝ 1/√t`; the factored and joint forms are compared every round and
/// the largest gap is reported.
pub fn run_factored_pikl(
    game: &MatrixGame,
    betas: (f64, f64),
    iterations: usize,
    seed: u64,
    mode: UpdateMode,
) -> Result<LabResult, SolverError> {
    assert!(iterations >= 1, "at least one iteration");
    let n = [game.n1(), game.n2()];
    let beta = [betas.0, betas.1];
    let log_tau: [Vec<f64>; 2] =
        [game.anchor1.iter().map(|p| p.ln()).collect(), game.anchor2.iter().map(|p| p.ln()).collect()];
    // Shaped-utility range per player, for the step-size scale.
    let payoff_span = {
        let max = game.payoff1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = game.payoff1.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    };
    let span: Vec<f64> = (0..2)
        .map(|p| {
            let lt_max = log_tau[p].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lt_min = log_tau[p].iter().copied().fold(f64::INFINITY, f64::min);
            (payoff_span + beta[p] * (lt_max - lt_min)).max(1e-9)
        })
        .collect();

    let mut cum_u = [vec![0.0; n[0]], vec![0.0; n[1]]];
    let mut avg = [vec![0.0; n[0]], vec![0.0; n[1]]];
    let mut trace = Vec::with_capacity(iterations);
    let mut max_gap = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for t in 1..=iterations {
        // Policies from everything observed before round t.
        let mut policies = Vec::with_capacity(2);
        for p in 0..2 {
            let eta = ETA_SCALE * ((n[p] as f64).ln().max(1e-9) / t as f64).sqrt() / span[p];
            let q_eff: Vec<f64> = cum_u[p].iter().map(|u| eta * u).collect();
            let beta_eff = eta * (t - 1) as f64 * beta[p];
            let table =
                JointQTable::new(beta_eff, game.sizes(p).to_vec(), q_eff, log_tau[p].clone())?;
            let factored = table.factored_policy()?;
            max_gap = max_gap.max(table.factored_joint_gap()?);
            policies.push(factored);
        }

        // Utilities for round t, exact or sampled.
        let (u1, u2): (Vec<f64>, Vec<f64>) = match mode {
            UpdateMode::ExactExpectation => (
                (0..n[0])
                    .map(|i| {
                        policies[1].iter().enumerate().map(|(j, &q)| q * game.payoff1(i, j)).sum()
                    })
                    .collect(),
                (0..n[1])
                    .map(|j| {
                        policies[0].iter().enumerate().map(|(i, &p)| -p * game.payoff1(i, j)).sum()
                    })
                    .collect(),
            ),
            UpdateMode::Sampled => {
                let j = sample_index(&policies[1], &mut rng);
                let i = sample_index(&policies[0], &mut rng);
                (
                    (0..n[0]).map(|k| game.payoff1(k, j)).collect(),
                    (0..n[1]).map(|k| -game.payoff1(i, k)).collect(),
                )
            }
        };
        // The anchor's β·log τ share of each shaped utility is carried by
        // the table's beta term (scaled by the number of rounds seen), so
        // only the raw utilities accumulate here.
        for (k, u) in u1.iter().enumerate() {
            cum_u[0][k] += u;
        }
        for (k, u) in u2.iter().enumerate() {
            cum_u[1][k] += u;
        }

        // Fold round t's policies into the running averages and score them.
        for p in 0..2 {
            for (a, &pi) in avg[p].iter_mut().zip(&policies[p]) {
                *a += (pi - *a) / t as f64;
            }
        }
        let (e1, e2) = exploitability(game, &avg[0], &avg[1]);
        trace.push(TracePoint { iteration: t, exploit1: e1, exploit2: e2 });
    }

    let [average1, average2] = avg;
    Ok(LabResult { average1, average2, trace, max_factor_gap: max_gap })
}

/// Deterministically builds a random zero-sum game with factored tuples
/// (joint alphabet at most 9 per player), payoffs in [−1, 1], and uniform
/// or skewed anchors. Distinct seeds give distinct games.
pub fn random_game(seed: u64, skewed_anchors: bool) -> MatrixGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: [&[usize]; 6] = [&[2], &[5], &[9], &[2, 2], &[2, 3], &[3, 3]];
    let sizes1 = shapes[rng.gen_range(0..shapes.len())].to_vec();
    let sizes2 = shapes[rng.gen_range(0..shapes.len())].to_vec();
    let n1: usize = sizes1.iter().product();
    let n2: usize = sizes2.iter().product();
    let payoff1: Vec<f64> = (0..n1 * n2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut anchor = |n: usize| -> Vec<f64> {
        if skewed_anchors {
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0f64).exp()).collect();
            let z: f64 = w.iter().sum();
            for p in &mut w {
                *p /= z;
            }
            w
        } else {
            vec![1.0 / n as f64; n]
        }
    };
    let anchor1 = anchor(n1);
    let anchor2 = anchor(n2);
    MatrixGame::new(sizes1, sizes2, payoff1, anchor1, anchor2)
        .expect("generated game is well-formed")
}
