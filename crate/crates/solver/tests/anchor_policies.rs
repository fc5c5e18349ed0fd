//! Anchor behavior: uniform and heuristic distributions, the probability
//! floor, joint log-probabilities, and the file-backed table format.

use std::collections::BTreeMap;

use anyhow::Result;
use entente_engine::grammar::{parse_order, render_order, Dialect};
use entente_engine::legal::legal_orders;
use entente_engine::map::UnitKind;
use entente_engine::state::Unit;
use entente_engine::{fixtures, GameState, JointAction, MapSpec, Order, Phase, Power};
use entente_solver::{table_line, AnchorPolicy, SolverError, TableAnchor, ANCHOR_FLOOR};
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

/// The two-army board one fall round before it reduces to a 2x2 matrix
/// game: Eastcenter already belongs to ALPHA, so only Westcenter and the
/// enemy home look like gains to ALPHA while BETA covets both contested
/// centers equally.
fn pennies_fall(map: &MapSpec) -> GameState {
    let mut state = GameState::initial(map);
    state.phase = Phase::FallMove;
    let cce = map.by_id("CCE").unwrap();
    let alpha = map.power_by_name("ALPHA").unwrap();
    state.sc_owner.insert(cce, Some(alpha));
    state.validate(map).unwrap();
    state
}

fn menu_for(
    map: &MapSpec,
    state: &GameState,
    power: Power,
    node: &str,
) -> (Vec<Order>, Vec<String>) {
    let menus = legal_orders(map, state, power).unwrap();
    let menu = menus[&map.by_id(node).unwrap()].clone();
    let texts = menu.iter().map(|o| render_order(map, o, Dialect::Short)).collect();
    (menu, texts)
}

#[test]
fn uniform_anchor_is_exactly_flat() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    let state = GameState::initial(&map);
    for power in map.all_powers() {
        for (_, menu) in legal_orders(&map, &state, power)? {
            let probs = AnchorPolicy::Uniform.unit_distribution(&map, &state, power, &menu);
            let flat = 1.0 / menu.len() as f64;
            assert!(probs.iter().all(|&p| p == flat), "menu of {}: {probs:?}", menu.len());
        }
    }
    Ok(())
}

#[test]
fn every_anchor_yields_a_floored_distribution() -> Result<()> {
    let table = TableAnchor::parse("")?;
    let anchors =
        [AnchorPolicy::Uniform, AnchorPolicy::heuristic(), AnchorPolicy::Table(table)];
    for name in ["standard", "ring7", "pennies"] {
        let map = fixtures::by_name(name)?;
        let state = GameState::initial(&map);
        for power in map.all_powers() {
            for (_, menu) in legal_orders(&map, &state, power)? {
                let floor = ANCHOR_FLOOR.min(0.5 / menu.len() as f64);
                for anchor in &anchors {
                    let probs = anchor.unit_distribution(&map, &state, power, &menu);
                    let sum: f64 = probs.iter().sum();
                    assert!((sum - 1.0).abs() <= 1e-9, "{name}: sums to {sum}");
                    let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
                    assert!(min >= floor - 1e-15, "{name}: min {min} under floor {floor}");
                }
            }
        }
    }
    Ok(())
}

#[test]
fn heuristic_prefers_captures_and_knows_what_it_owns() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let alpha = map.power_by_name("ALPHA")?;
    let beta = map.power_by_name("BETA")?;

    // ALPHA's only unowned reachable center is Westcenter: its capture plus
    // the approach bonus scores 3, everything else 0, and a 6-way softmax
    // of (3, 0, ..., 0) with the floor mixed in gives the values below.
    let (menu, texts) = menu_for(&map, &state, alpha, "AAA");
    assert_eq!(texts.len(), 6);
    let probs = AnchorPolicy::heuristic().unit_distribution(&map, &state, alpha, &menu);
    let best = texts.iter().position(|t| t == "A AAA - CCW").unwrap();
    assert!((probs[best] - 0.7968778702956121).abs() <= 1e-12, "{probs:?}");
    for (i, p) in probs.iter().enumerate() {
        if i != best {
            assert!((p - 0.04062442594087759).abs() <= 1e-12, "{texts:?} {probs:?}");
        }
    }

    // BETA owns neither contested center, so both captures tie at the top.
    let (menu, texts) = menu_for(&map, &state, beta, "BBB");
    assert_eq!(texts.len(), 5);
    let probs = AnchorPolicy::heuristic().unit_distribution(&map, &state, beta, &menu);
    let east = texts.iter().position(|t| t == "A BBB - CCE").unwrap();
    let west = texts.iter().position(|t| t == "A BBB - CCW").unwrap();
    assert_eq!(probs[east], probs[west]);
    assert!((probs[east] - 0.46392824009170874).abs() <= 1e-12, "{probs:?}");
    Ok(())
}

#[test]
fn heuristic_backs_own_attacks_but_not_foreign_ones() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    let france = map.power_by_name("FRANCE")?;
    let germany = map.power_by_name("GERMANY")?;
    let state_with = |bur_owner: Power| -> GameState {
        let mut units = vec![
            Unit { power: france, kind: UnitKind::Army, location: map.by_id("PAR").unwrap() },
            Unit { power: bur_owner, kind: UnitKind::Army, location: map.by_id("BUR").unwrap() },
        ];
        units.sort_by_key(|u| u.location);
        GameState {
            year: 1902,
            phase: Phase::SpringMove,
            units,
            sc_owner: GameState::initial(&map).sc_owner,
            dislodged: Vec::new(),
            last_orders: BTreeMap::new(),
        }
    };

    let prob_of = |state: &GameState, text: &str| -> (f64, f64) {
        let (menu, texts) = menu_for(&map, state, france, "PAR");
        let probs = AnchorPolicy::heuristic().unit_distribution(&map, state, france, &menu);
        let target = texts.iter().position(|t| t == text).unwrap();
        let hold = texts.iter().position(|t| t == "A PAR H").unwrap();
        (probs[target], probs[hold])
    };

    let own = state_with(france);
    let (support, hold) = prob_of(&own, "A PAR S A BUR - PIC");
    assert!(support > hold, "supporting one's own attack should beat holding");

    let foreign = state_with(germany);
    let (support_foreign, hold_foreign) = prob_of(&foreign, "A PAR S A BUR - PIC");
    assert_eq!(support_foreign, hold_foreign, "foreign attacks earn no bonus");
    assert!(support > support_foreign);
    Ok(())
}

#[test]
fn joint_logprob_sums_per_unit_menu_logs() -> Result<()> {
    // Two disconnected clusters give one power menus of exactly 3 and 4
    // orders, so the uniform joint log-probability is ln(1/12).
    let map = MapSpec::parse(
        "[powers]\n\
         ALPHA\n\
         [provinces]\n\
         PPP ; Post ; land ; sc home=ALPHA\n\
         XAA ; Xa ; land\n\
         XBB ; Xb ; land\n\
         YYY ; Yard ; land ; sc home=ALPHA\n\
         QAA ; Qa ; land\n\
         QBB ; Qb ; land\n\
         QCC ; Qc ; land\n\
         [army-adjacency]\n\
         PPP: XAA XBB\n\
         XAA: PPP\n\
         XBB: PPP\n\
         YYY: QAA QBB QCC\n\
         QAA: YYY\n\
         QBB: YYY\n\
         QCC: YYY\n\
         [starts]\n\
         ALPHA: A PPP, A YYY\n\
         [centers]\n\
         ALPHA: PPP YYY\n",
    )?;
    let state = GameState::initial(&map);
    let alpha = map.power_by_name("ALPHA")?;
    let menus = legal_orders(&map, &state, alpha)?;
    let sizes: Vec<usize> = menus.values().map(Vec::len).collect();
    assert_eq!(sizes, vec![3, 4]);

    let holds = JointAction::new(
        alpha,
        vec![
            parse_order(&map, &state, "A PPP H", Dialect::Short)?,
            parse_order(&map, &state, "A YYY H", Dialect::Short)?,
        ],
    )?;
    let lp = AnchorPolicy::Uniform.joint_logprob(&map, &state, alpha, &holds)?;
    assert!((lp - (-2.4849066497880004)).abs() <= 1e-12, "lp = {lp}");

    // Every legal joint has the same uniform log-probability.
    let moves = JointAction::new(
        alpha,
        vec![
            parse_order(&map, &state, "A PPP - XBB", Dialect::Short)?,
            parse_order(&map, &state, "A YYY - QCC", Dialect::Short)?,
        ],
    )?;
    let lp2 = AnchorPolicy::Uniform.joint_logprob(&map, &state, alpha, &moves)?;
    assert_eq!(lp, lp2);

    // Order count must match the unit count, and each order must appear in
    // the acting unit's menu.
    let empty = JointAction::new(alpha, Vec::new())?;
    assert!(matches!(
        AnchorPolicy::Uniform.joint_logprob(&map, &state, alpha, &empty),
        Err(SolverError::IllegalJoint(_))
    ));
    Ok(())
}

#[test]
fn joint_logprob_rejects_orders_from_other_boards() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let alpha = map.power_by_name("ALPHA")?;
    // BETA's hold is a perfectly legal order, just not one of ALPHA's.
    let foreign =
        JointAction::new(alpha, vec![parse_order(&map, &state, "A BBB H", Dialect::Short)?])?;
    match AnchorPolicy::Uniform.joint_logprob(&map, &state, alpha, &foreign) {
        Err(SolverError::IllegalJoint(msg)) => assert!(msg.contains("A BBB H"), "{msg}"),
        other => panic!("expected an illegal-joint error, got {other:?}"),
    }
    Ok(())
}

#[test]
fn table_anchor_roundtrips_written_lines() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let alpha = map.power_by_name("ALPHA")?;
    let (menu, texts) = menu_for(&map, &state, alpha, "AAA");

    // Weight Eastcenter 3:1 over holding; the other four orders get zero
    // weight, which the floor turns back into exactly ANCHOR_FLOOR.
    let east = texts.iter().position(|t| t == "A AAA - CCE").unwrap();
    let hold = texts.iter().position(|t| t == "A AAA H").unwrap();
    let file = format!(
        "# weights for one state\n\n{}\n{}\n",
        table_line(&map, &state, alpha, &menu[east], 3.0),
        table_line(&map, &state, alpha, &menu[hold], 1.0),
    );
    let table = TableAnchor::parse(&file)?;
    assert_eq!(table.len(), 2);

    let anchor = AnchorPolicy::Table(table);
    let probs = anchor.unit_distribution(&map, &state, alpha, &menu);
    let scale = 1.0 - menu.len() as f64 * ANCHOR_FLOOR;
    assert!((probs[east] - (ANCHOR_FLOOR + scale * 0.75)).abs() <= 1e-12, "{probs:?}");
    assert!((probs[hold] - (ANCHOR_FLOOR + scale * 0.25)).abs() <= 1e-12, "{probs:?}");
    for (i, &p) in probs.iter().enumerate() {
        if i != east && i != hold {
            assert_eq!(p, ANCHOR_FLOOR, "unlisted orders sit exactly on the floor");
        }
    }

    // A state the table has never seen falls back to uniform.
    let fresh = GameState::initial(&map);
    let menus = legal_orders(&map, &fresh, alpha)?;
    let spring_menu = &menus[&map.by_id("AAA").unwrap()];
    let fallback = anchor.unit_distribution(&map, &fresh, alpha, spring_menu);
    let flat = 1.0 / spring_menu.len() as f64;
    assert!(fallback.iter().all(|&p| p == flat), "{fallback:?}");
    Ok(())
}

#[test]
fn table_parser_rejects_malformed_lines() {
    let bad = [
        ("0011\tALPHA\tAAA\tA AAA H", "expected 5"),            // four fields
        ("zz11\tALPHA\tAAA\tA AAA H\t0.5", "hex"),               // bad hash
        ("0011\tALPHA\tAAA\tA AAA H\tabc", "not a number"),      // bad weight
        ("0011\tALPHA\tAAA\tA AAA H\t-0.25", "non-negative"),    // negative
        ("0011\tALPHA\tAAA\tA AAA H\tnan", "finite"),            // NaN
        ("0011\tALPHA\tAAA\tA AAA H\tinf", "finite"),            // infinite
    ];
    for (text, needle) in bad {
        match TableAnchor::parse(text) {
            Err(SolverError::TableSyntax { line, msg }) => {
                assert_eq!(line, 1, "{text}");
                assert!(msg.contains(needle), "`{text}` gave `{msg}`");
            }
            other => panic!("`{text}` should fail to parse, got {other:?}"),
        }
    }

    let dup = "0011\tALPHA\tAAA\tA AAA H\t0.5\n0011\tALPHA\tAAA\tA AAA H\t0.7";
    match TableAnchor::parse(dup) {
        Err(SolverError::TableSyntax { line, msg }) => {
            assert_eq!(line, 2);
            assert!(msg.contains("duplicate"), "{msg}");
        }
        other => panic!("duplicates should fail, got {other:?}"),
    }

    // Comments and blank lines are fine; reported line numbers skip them.
    let with_comments = "# header\n\n0011\tALPHA\tAAA\tA AAA H\t0.5\nbroken";
    match TableAnchor::parse(with_comments) {
        Err(SolverError::TableSyntax { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn table_load_reports_the_missing_path() {
    let err = TableAnchor::load(std::path::Path::new("/no/such/anchor.table")).unwrap_err();
    match &err {
        SolverError::TableRead { path, .. } => assert!(path.contains("no/such")),
        other => panic!("expected a read error, got {other:?}"),
    }
    assert!(err.to_string().contains("/no/such/anchor.table"), "{err}");
}

#[test]
fn sampling_follows_the_distribution_and_the_seed() -> Result<()> {
    let map = fixtures::by_name("pennies")?;
    let state = pennies_fall(&map);
    let beta = map.power_by_name("BETA")?;
    let anchor = AnchorPolicy::heuristic();

    // Two identically seeded streams sample identical order lists.
    let mut a = ChaCha8Rng::seed_from_u64(99);
    let mut b = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        assert_eq!(
            anchor.sample_moves(&map, &state, beta, &mut a)?,
            anchor.sample_moves(&map, &state, beta, &mut b)?
        );
    }

    // Empirical frequencies match the distribution: the two captures carry
    // about 0.464 each, so in 4000 draws non-capture orders are rare.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut captures = 0;
    let draws = 4000;
    for _ in 0..draws {
        let orders = anchor.sample_moves(&map, &state, beta, &mut rng)?;
        assert_eq!(orders.len(), 1);
        if matches!(orders[0], Order::Move { .. }) {
            captures += 1;
        }
    }
    let freq = f64::from(captures) / f64::from(draws);
    // Mean 2 * 0.46392824, 3σ ≈ 0.012.
    assert!((freq - 0.9279).abs() <= 0.02, "capture frequency {freq}");
    Ok(())
}
