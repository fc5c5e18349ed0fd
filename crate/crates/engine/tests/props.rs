//! Property tests: text roundtrips, menu/validator agreement, canonical
//! ordering, and validity preservation under random play.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom as _;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use entente_engine::cases::resolutions_agree;
use entente_engine::grammar::{parse_order, render_order, Dialect};
use entente_engine::legal::{legal_adjustments, legal_orders, legal_retreats, validate_order};
use entente_engine::phase::step;
use entente_engine::resolve::adjudicate_moves;
use entente_engine::sample::{random_profile, random_state};
use entente_engine::{fixtures, GameState, JointAction, MapSpec, Order, Phase, Power};

fn standard() -> MapSpec {
    fixtures::by_name("standard").expect("fixture parses")
}

proptest! {
    #[test]
    fn random_states_roundtrip_through_text(seed: u64, density in 0.05f64..0.6) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&map, density, &mut rng);
        prop_assert!(state.validate(&map).is_ok());
        let text = state.serialize(&map);
        let parsed = GameState::parse(&map, &text).expect("serialized state parses");
        prop_assert_eq!(&parsed, &state);
        prop_assert_eq!(parsed.state_hash(&map), state.state_hash(&map));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legal_orders_roundtrip_in_both_dialects(seed: u64) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&map, 0.3, &mut rng);
        for power in map.all_powers() {
            for (_, menu) in legal_orders(&map, &state, power).expect("movement phase") {
                for order in menu {
                    for dialect in [Dialect::Short, Dialect::Verbose] {
                        let text = render_order(&map, &order, dialect);
                        let back = parse_order(&map, &state, &text, dialect)
                            .unwrap_or_else(|e| panic!("text `{text}` failed to parse: {e}"));
                        prop_assert_eq!(back, order, "text `{}`", text);
                    }
                }
            }
        }
    }

    #[test]
    fn menu_orders_pass_validation(seed: u64) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&map, 0.3, &mut rng);
        for power in map.all_powers() {
            for (_, menu) in legal_orders(&map, &state, power).expect("movement phase") {
                for order in &menu {
                    prop_assert!(validate_order(&map, &state, power, order).is_legal());
                }
                // The same orders are rejected for every other power.
                for other in map.all_powers().filter(|&o| o != power) {
                    prop_assert!(!validate_order(&map, &state, other, &menu[0]).is_legal());
                }
            }
        }
    }

    #[test]
    fn joint_actions_sort_any_permutation_the_same(seed: u64) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&map, 0.3, &mut rng);
        for (power, joint) in random_profile(&map, &state, 12, &mut rng) {
            let mut shuffled = joint.orders().to_vec();
            shuffled.shuffle(&mut rng);
            let rebuilt = JointAction::new(power, shuffled).expect("same orders");
            prop_assert_eq!(rebuilt, joint);
        }
    }

    #[test]
    fn adjudication_is_deterministic(seed: u64) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(&map, 0.35, &mut rng);
        let joints = random_profile(&map, &state, 12, &mut rng);
        let a = adjudicate_moves(&map, &state, &joints).expect("adjudicates");
        let b = adjudicate_moves(&map, &state, &joints).expect("adjudicates");
        prop_assert_eq!(resolutions_agree(&map, &a, &b), Vec::<String>::new());
    }

    #[test]
    fn random_play_preserves_state_validity(seed: u64) {
        let map = standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = random_state(&map, 0.3, &mut rng);
        for _ in 0..6 {
            let orders: BTreeMap<Power, Vec<Order>> = match state.phase {
                Phase::SpringMove | Phase::FallMove => random_profile(&map, &state, 12, &mut rng)
                    .into_iter()
                    .map(|(p, j)| (p, j.orders().to_vec()))
                    .collect(),
                Phase::SpringRetreat | Phase::FallRetreat => map
                    .all_powers()
                    .map(|p| {
                        let menu = legal_retreats(&map, &state, p).expect("retreat phase");
                        let picks = menu
                            .values()
                            .map(|options| options[rng.gen_range(0..options.len())])
                            .collect();
                        (p, picks)
                    })
                    .collect(),
                Phase::WinterAdjust => map
                    .all_powers()
                    .map(|p| {
                        let menu = legal_adjustments(&map, &state, p).expect("winter phase");
                        let picks = match menu.choose(&mut rng) {
                            Some(&order) if rng.gen_bool(0.7) => vec![order],
                            _ => Vec::new(),
                        };
                        (p, picks)
                    })
                    .collect(),
            };
            state = step(&map, &state, &orders).expect("step succeeds");
            prop_assert!(state.validate(&map).is_ok(), "state:\n{}", state.serialize(&map));
        }
    }
}
