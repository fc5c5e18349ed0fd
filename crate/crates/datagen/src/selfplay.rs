//! Seeded self-play: every power searches, sampled orders become records.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entente_engine::phase::step;
use entente_engine::{GameState, MapSpec, Order, Power};
use entente_solver::seeds::mix;
use entente_solver::{run_pikl, settle_to_move, unit_menus, AnchorPolicy, SearchConfig};

use crate::emit::{emit_transitions, DatasetWriter, EmitConfig, EmitTag};
use crate::error::DatagenError;

/// Stream label separating order sampling from the search's own use of the
/// phase seed.
const PLAY_STREAM: u64 = 0x73656c66706c6179;

/// Tunables for a self-play run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfplayConfig {
    /// Games to play.
    pub games: u32,
    /// Years each game may run before it is called a draw.
    pub max_years: u16,
    /// Search settings; the seed here is the run's base seed, from which
    /// each game and phase derives its own.
    pub search: SearchConfig,
    /// Writer settings.
    pub emit: EmitConfig,
}

impl Default for SelfplayConfig {
    fn default() -> Self {
        SelfplayConfig {
            games: 1,
            max_years: 10,
            search: SearchConfig::default(),
            emit: EmitConfig::default(),
        }
    }
}

/// What a self-play run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    /// Games played.
    pub games: u32,
    /// Movement phases searched across all games.
    pub phases: u32,
    /// Records written.
    pub transitions: usize,
    /// Mean `|value|` over the written records.
    pub mean_abs_q: f64,
}

/// Plays `config.games` games with every power running the regularized
/// search, sampling each power's joint action from its final policy, and
/// writes one record per unit decision to `sink`. Games end at a solo win
/// or after `config.max_years` years. The whole run is a pure function of
/// the map, anchor and config: the same inputs write byte-identical files.
pub fn selfplay_generate<W: Write>(
    map: &MapSpec,
    anchor: &AnchorPolicy,
    config: &SelfplayConfig,
    sink: W,
) -> Result<DatasetSummary, DatagenError> {
    let mut writer = DatasetWriter::new(sink, config.emit.clone());
    let all_powers: Vec<Power> = map.all_powers().collect();
    let mut phases = 0u32;
    let mut abs_q_sum = 0.0f64;

    for game in 0..config.games {
        let game_id = format!("g{game}");
        let game_seed = mix(config.search.seed, u64::from(game));
        let mut state = GameState::initial(map);
        let final_year = state.year + config.max_years;
        let mut phase_counter = 0u64;

        while state.winner(map).is_none() && state.year < final_year {
            let phase_seed = mix(game_seed, phase_counter);
            phase_counter += 1;
            let search_config = SearchConfig {
                seed: phase_seed,
                ..config.search.clone()
            };
            let result = run_pikl(map, &state, &search_config, anchor, &all_powers)?;
            let mut rng = ChaCha8Rng::seed_from_u64(mix(phase_seed, PLAY_STREAM));

            let mut orders: BTreeMap<Power, Vec<Order>> = BTreeMap::new();
            for side in &result.powers {
                let selected = side.sample(&mut rng).clone();
                let menus = unit_menus(map, &state, side.power, anchor, &search_config)?;
                let tag = EmitTag {
                    game: &game_id,
                    seed: phase_seed,
                };
                let written =
                    emit_transitions(map, &state, side, &menus, &selected, tag, &mut writer)?;
                if written > 0 {
                    let index = side
                        .candidates
                        .iter()
                        .position(|c| *c == selected)
                        .expect("sampled action is a candidate");
                    abs_q_sum += side.joint_q_with_anchor[index].abs() * written as f64;
                }
                orders.insert(side.power, selected.orders().to_vec());
            }
            phases += 1;

            state = step(map, &state, &orders)?;
            state = settle_to_move(map, state, anchor, &mut rng)?;
        }
    }

    let transitions = writer.finish()?;
    Ok(DatasetSummary {
        games: config.games,
        phases,
        transitions,
        mean_abs_q: if transitions == 0 {
            0.0
        } else {
            abs_q_sum / transitions as f64
        },
    })
}
