//! Cross-checks the fixed-point resolver against the exhaustive reference
//! resolver on randomized positions and order profiles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entente_engine::cases::resolutions_agree;
use entente_engine::fixtures;
use entente_engine::resolve::{adjudicate_moves, exhaustive::adjudicate_moves_exhaustive};
use entente_engine::sample::{random_profile, random_state};
use entente_engine::{GameState, MapSpec};

/// Enumeration in the reference resolver costs `2^moves`; random profiles
/// are thinned to this many moves to keep the cross-check fast.
const MOVE_CAP: usize = 12;

fn check_profiles(map: &MapSpec, state: &GameState, profiles: usize, rng: &mut ChaCha8Rng) {
    for round in 0..profiles {
        let joints = random_profile(map, state, MOVE_CAP, rng);
        let fast = adjudicate_moves(map, state, &joints).expect("movement adjudication");
        let full = adjudicate_moves_exhaustive(map, state, &joints).expect("movement adjudication");
        let diffs = resolutions_agree(map, &fast, &full);
        assert!(
            diffs.is_empty(),
            "resolvers diverged on round {round}:\n  {}\nstate:\n{}\norders: {:?}",
            diffs.join("\n  "),
            state.serialize(map),
            joints,
        );
    }
}

#[test]
fn resolvers_agree_on_opening_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for name in fixtures::names() {
        let map = fixtures::by_name(name).expect("fixture parses");
        let state = GameState::initial(&map);
        check_profiles(&map, &state, 40, &mut rng);
    }
}

#[test]
fn resolvers_agree_on_random_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let map = fixtures::by_name("standard").expect("fixture parses");
    for _ in 0..30 {
        let state = random_state(&map, 0.30, &mut rng);
        check_profiles(&map, &state, 8, &mut rng);
    }
}

#[test]
fn crowded_random_positions_stay_in_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let map = fixtures::by_name("standard").expect("fixture parses");
    for _ in 0..10 {
        let state = random_state(&map, 0.55, &mut rng);
        check_profiles(&map, &state, 5, &mut rng);
    }
}
