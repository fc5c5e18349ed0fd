//! End-to-end behavior of the iterative search on the two-army board,
//! whose single fall round is a known 2x2 matrix game: convergence to the
//! mixed equilibrium, near-unexploitable averages, faithful opponent
//! modeling, and bit-level reproducibility.

use std::collections::BTreeMap;

use anyhow::Result;
use entente_engine::grammar::{render_order, Dialect};
use entente_engine::legal::legal_orders;
use entente_engine::{fixtures, GameState, MapSpec, Phase, Power};
use entente_solver::math::total_variation;
use entente_solver::{
    run_pikl, table_line, AnchorPolicy, SearchConfig, SearchResult, TableAnchor,
};

/// Payoff to ALPHA of the fall round, rows/cols = (move east, move west).
/// A bounce preserves ALPHA's 2:1 center lead (score 4/5); splitting the
/// centers levels the board (score 1/2). BETA takes the complement.
const MATRIX: [[f64; 2]; 2] = [[0.8, 0.5], [0.5, 0.8]];

fn pennies_fall(map: &MapSpec) -> GameState {
    let mut state = GameState::initial(map);
    state.phase = Phase::FallMove;
    let cce = map.by_id("CCE").unwrap();
    let alpha = map.power_by_name("ALPHA").unwrap();
    state.sc_owner.insert(cce, Some(alpha));
    state.validate(map).unwrap();
    state
}

/// The matrix-game search configuration: two candidates per side and a
/// deterministic horizon-zero payoff, so only the dynamics are in play.
fn matrix_config(seed: u64) -> SearchConfig {
    SearchConfig {
        iterations: 256,
        max_per_unit: 2,
        rollouts: 1,
        horizon: 0,
        seed,
        ..SearchConfig::default()
    }
}

fn exploitability(pi_alpha: &[f64], pi_beta: &[f64]) -> (f64, f64) {
    let value: f64 = (0..2)
        .map(|i| (0..2).map(|j| pi_alpha[i] * MATRIX[i][j] * pi_beta[j]).sum::<f64>())
        .sum();
    let best_alpha = (0..2)
        .map(|i| (0..2).map(|j| MATRIX[i][j] * pi_beta[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let best_beta = (0..2)
        .map(|j| (0..2).map(|i| pi_alpha[i] * (1.0 - MATRIX[i][j])).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    (best_alpha - value, best_beta - (1.0 - value))
}

#[test]
fn search_mixes_toward_the_uniform_equilibrium() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let powers: Vec<Power> = map.all_powers().collect();
    for seed in 0..3 {
        let result = run_pikl(&map, &state, &matrix_config(seed), &AnchorPolicy::Uniform, &powers)?;
        for side in &result.powers {
            assert_eq!(side.candidates.len(), 2);
            let sum: f64 = side.policy.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            let tv = total_variation(&side.policy, &[0.5, 0.5]);
            assert!(
                tv <= 0.05,
                "seed {seed}, {}: policy {:?} strays {tv:.4} from uniform",
                map.power_name(side.power),
                side.policy
            );
        }
    }
    Ok(())
}

#[test]
fn iteration_averaged_policies_are_nearly_unexploitable() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let powers: Vec<Power> = map.all_powers().collect();
    let config = SearchConfig { record_trace: true, ..matrix_config(0) };
    let result = run_pikl(&map, &state, &config, &AnchorPolicy::Uniform, &powers)?;

    // 256 iterations × two powers × two candidates.
    assert_eq!(result.trace.len(), 256 * 4);
    let lines = result.trace_lines(&map);
    assert_eq!(lines.len(), result.trace.len());
    assert!(lines[0].starts_with("1\tALPHA\t0\t"), "{}", lines[0]);

    let mut sums: BTreeMap<(u8, usize), f64> = BTreeMap::new();
    for entry in &result.trace {
        assert!((0.0..=1.0).contains(&entry.prob));
        *sums.entry((entry.power.0, entry.candidate)).or_insert(0.0) += entry.prob;
    }
    let avg = |power: u8| -> Vec<f64> {
        (0..2).map(|c| sums[&(power, c)] / 256.0).collect()
    };
    let (e_alpha, e_beta) = exploitability(&avg(0), &avg(1));

    // The anchor restricted to the two kept candidates is uniform, so the
    // regularization can cost at most β·ln 2 on top of vanishing regret.
    let bound = 0.1 * std::f64::consts::LN_2 + 0.05;
    assert!(e_alpha <= bound && e_beta <= bound, "exploitability ({e_alpha:.4}, {e_beta:.4})");
    Ok(())
}

#[test]
fn runs_are_bit_reproducible_and_seed_sensitive() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let powers: Vec<Power> = map.all_powers().collect();
    let once = run_pikl(&map, &state, &matrix_config(5), &AnchorPolicy::Uniform, &powers)?;
    let twice = run_pikl(&map, &state, &matrix_config(5), &AnchorPolicy::Uniform, &powers)?;
    for (a, b) in once.powers.iter().zip(&twice.powers) {
        assert_eq!(a.candidates, b.candidates);
        assert_eq!(a.policy, b.policy);
        assert_eq!(a.mean_q, b.mean_q);
        assert_eq!(a.joint_q_with_anchor, b.joint_q_with_anchor);
    }
    let other = run_pikl(&map, &state, &matrix_config(6), &AnchorPolicy::Uniform, &powers)?;
    assert_ne!(
        once.powers[0].mean_q, other.powers[0].mean_q,
        "different seeds should sample different opponent sequences"
    );
    Ok(())
}

#[test]
fn regularized_values_combine_mean_q_and_anchor() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let powers: Vec<Power> = map.all_powers().collect();
    let config = matrix_config(1);
    let result = run_pikl(&map, &state, &config, &AnchorPolicy::Uniform, &powers)?;
    for side in &result.powers {
        // ALPHA's army has six legal orders, BETA's five (it cannot reach
        // Rearguard), so each kept candidate carries τ = 1/menu.
        let menu_len = if side.power == map.power_by_name("ALPHA")? { 6.0 } else { 5.0 };
        for ((&q, &lp), &combined) in
            side.mean_q.iter().zip(&side.anchor_logprob).zip(&side.joint_q_with_anchor)
        {
            assert_eq!(combined, q + config.beta * lp);
            assert!((lp - (1.0f64 / menu_len).ln()).abs() <= 1e-12);
        }
    }
    Ok(())
}

#[test]
fn a_single_candidate_power_gets_a_certain_policy() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let alpha = map.power_by_name("ALPHA")?;
    let beta = map.power_by_name("BETA")?;
    let config = SearchConfig { max_per_unit: 1, iterations: 8, ..matrix_config(0) };
    let result = run_pikl(&map, &state, &config, &AnchorPolicy::Uniform, &[alpha])?;
    assert!(result.for_power(beta).is_none(), "unsearched powers have no slice");
    let side = result.for_power(alpha).unwrap();
    assert_eq!(side.policy, vec![1.0]);
    assert_eq!(side.argmax(), &side.candidates[0]);
    assert!(result.trace.is_empty());
    Ok(())
}

#[test]
fn unsearched_powers_really_play_the_anchor() -> Result<()> {
    // Anchor BETA onto the eastern capture via a table. ALPHA's best reply
    // is to bounce it there (payoff 0.8) rather than trade centers (0.5);
    // a searcher that modeled BETA as uniform would value both replies at
    // 0.65 and this assertion would fail.
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let alpha = map.power_by_name("ALPHA")?;
    let beta = map.power_by_name("BETA")?;
    let menus = legal_orders(&map, &state, beta)?;
    let mut lines = Vec::new();
    for order in &menus[&map.by_id("BBB")?] {
        let weight = if render_order(&map, order, Dialect::Short) == "A BBB - CCE" {
            1.0
        } else {
            0.0
        };
        lines.push(table_line(&map, &state, beta, order, weight));
    }
    let anchor = AnchorPolicy::Table(TableAnchor::parse(&lines.join("\n"))?);

    let config = SearchConfig { iterations: 128, ..matrix_config(0) };
    let result = run_pikl(&map, &state, &config, &anchor, &[alpha])?;
    let side = result.for_power(alpha).unwrap();
    let east = position_of(&map, &result, alpha, "A AAA - CCE");
    let west = position_of(&map, &result, alpha, "A AAA - CCW");
    assert!(
        side.mean_q[east] >= 0.75 && side.mean_q[east] <= 0.85,
        "bounce value {:.3} should track 0.8",
        side.mean_q[east]
    );
    assert!(
        side.mean_q[west] >= 0.45 && side.mean_q[west] <= 0.55,
        "trade value {:.3} should track 0.5",
        side.mean_q[west]
    );
    assert!(side.policy[east] > side.policy[west]);
    Ok(())
}

fn position_of(map: &MapSpec, result: &SearchResult, power: Power, text: &str) -> usize {
    let side = result.for_power(power).unwrap();
    side.candidates
        .iter()
        .position(|j| {
            j.orders().iter().any(|o| render_order(map, o, Dialect::Short) == text)
        })
        .unwrap_or_else(|| panic!("no candidate contains `{text}`"))
}
