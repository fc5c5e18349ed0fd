//! Order text round-trips in both dialects, plus legal-order enumeration:
//! every enumerated order re-parses to itself and validates as legal.

use std::collections::BTreeMap;

use anyhow::Result;
use entente_engine::fixtures;
use entente_engine::grammar::{
    parse_order, parse_order_loose, render_continuation, render_order, Dialect,
};
use entente_engine::legal::{legal_orders, validate_order, Verdict};
use entente_engine::map::{MapSpec, UnitKind};
use entente_engine::order::Order;
use entente_engine::state::{GameState, Phase, Unit};

/// A mid-game position with fleets around every split-coast province.
fn coastal_state(map: &MapSpec) -> GameState {
    let unit = |power: &str, kind: UnitKind, prov: &str| Unit {
        power: map.power_by_name(power).unwrap(),
        kind,
        location: map.by_id(prov).unwrap(),
    };
    let mut units = vec![
        unit("FRANCE", UnitKind::Fleet, "MAO"),
        unit("FRANCE", UnitKind::Army, "GAS"),
        unit("FRANCE", UnitKind::Fleet, "MAR"),
        unit("RUSSIA", UnitKind::Fleet, "STP/SC"),
        unit("RUSSIA", UnitKind::Army, "MOS"),
        unit("TURKEY", UnitKind::Fleet, "BLA"),
        unit("TURKEY", UnitKind::Army, "CON"),
        unit("ITALY", UnitKind::Fleet, "GRE"),
        unit("ENGLAND", UnitKind::Fleet, "BAR"),
        unit("GERMANY", UnitKind::Army, "RUH"),
    ];
    units.sort_by_key(|u| u.location);
    GameState {
        year: 1905,
        phase: Phase::FallMove,
        units,
        sc_owner: GameState::initial(map).sc_owner,
        dislodged: Vec::new(),
        last_orders: BTreeMap::new(),
    }
}

#[test]
fn legal_orders_roundtrip_in_both_dialects() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    for state in [GameState::initial(&map), coastal_state(&map)] {
        let mut total = 0;
        for power in map.all_powers() {
            for (_, orders) in legal_orders(&map, &state, power)? {
                for order in orders {
                    total += 1;
                    for dialect in [Dialect::Short, Dialect::Verbose] {
                        let text = render_order(&map, &order, dialect);
                        let back = parse_order(&map, &state, &text, dialect)
                            .map_err(|e| anyhow::anyhow!("`{text}`: {e}"))?;
                        assert_eq!(back, order, "dialect {dialect:?}, text `{text}`");
                    }
                    assert!(validate_order(&map, &state, order_power(&map, &state, &order), &order)
                        .is_legal());
                }
            }
        }
        assert!(total > 80, "expected a rich order set, got {total}");
    }
    Ok(())
}

fn order_power(
    map: &MapSpec,
    state: &GameState,
    order: &Order,
) -> entente_engine::map::Power {
    let actor = order.actor().unwrap();
    state.unit_at(map, actor.province).unwrap().power
}

#[test]
fn coast_possessives_render_and_parse() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    let state = coastal_state(&map);

    let text = "F MAO - SPA/NC";
    let order = parse_order(&map, &state, text, Dialect::Short)?;
    assert_eq!(render_order(&map, &order, Dialect::Short), text);
    assert_eq!(
        render_order(&map, &order, Dialect::Verbose),
        "fleet in Mid Atlantic Ocean moves to Spain's North Coast"
    );
    assert_eq!(render_continuation(&map, &order), "moves to Spain's North Coast");

    // The actor may be written at base granularity; it canonicalizes to the
    // node the unit stands on.
    let order = parse_order(&map, &state, "F STP - BOT", Dialect::Short)?;
    assert_eq!(render_order(&map, &order, Dialect::Short), "F STP/SC - BOT");
    let verbose = "fleet in St. Petersburg's South Coast moves to Bothnia";
    assert_eq!(render_order(&map, &order, Dialect::Verbose), verbose);
    assert_eq!(parse_order(&map, &state, verbose, Dialect::Verbose)?, order);

    // Support targets stay at base granularity in both dialects.
    let support = parse_order(&map, &state, "A MOS S F STP/SC", Dialect::Short)?;
    assert_eq!(render_order(&map, &support, Dialect::Short), "A MOS S F STP");
    assert_eq!(
        render_order(&map, &support, Dialect::Verbose),
        "army in Moscow supports fleet in St. Petersburg"
    );
    Ok(())
}

#[test]
fn verbose_forms_for_every_order_kind() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    let pairs = [
        ("A PAR H", "army in Paris holds"),
        ("F MAO - POR", "fleet in Mid Atlantic Ocean moves to Portugal"),
        ("A BUL S F ION - GRE", "army in Bulgaria supports fleet in Ionian Sea move to Greece"),
        ("F BLA S A BUL", "fleet in Black Sea supports army in Bulgaria"),
        ("A PAR R BUR", "army in Paris retreats to Burgundy"),
        ("A PAR D", "army in Paris disbands"),
        ("A PAR B", "builds army in Paris"),
        ("WAIVE", "waives"),
    ];
    for (short, verbose) in pairs {
        let order = parse_order_loose(&map, short, Dialect::Short)?;
        assert_eq!(render_order(&map, &order, Dialect::Verbose), verbose);
        assert_eq!(parse_order_loose(&map, verbose, Dialect::Verbose)?, order);
        assert_eq!(render_order(&map, &order, Dialect::Short), short);
    }
    Ok(())
}

#[test]
fn rejects_bad_order_text() {
    let map = fixtures::by_name("standard").unwrap();
    let state = GameState::initial(&map);
    for text in [
        "",
        "A PAR",
        "A PAR X",
        "G PAR H",
        "A XXX H",
        "A PAR - PAR BUR",
        "A PAR S",
        "A PAR S A",
    ] {
        assert!(parse_order_loose(&map, text, Dialect::Short).is_err(), "`{text}`");
    }
    for text in ["paris holds", "army in Paris", "army in Paris flies to Burgundy"] {
        assert!(parse_order_loose(&map, text, Dialect::Verbose).is_err(), "`{text}`");
    }
    // Actor must exist for the strict parser.
    assert!(parse_order(&map, &state, "A BUR H", Dialect::Short).is_err());
    assert!(parse_order(&map, &state, "F PAR H", Dialect::Short).is_err());
}

#[test]
fn validation_rejects_foreign_and_unreachable_orders() -> Result<()> {
    let map = fixtures::by_name("standard")?;
    let state = GameState::initial(&map);
    let france = map.power_by_name("FRANCE")?;
    let germany = map.power_by_name("GERMANY")?;

    let own_move = parse_order(&map, &state, "A PAR - BUR", Dialect::Short)?;
    assert!(validate_order(&map, &state, france, &own_move).is_legal());
    assert!(matches!(validate_order(&map, &state, germany, &own_move), Verdict::Illegal(_)));

    let too_far = parse_order(&map, &state, "A PAR - MAR", Dialect::Short)?;
    assert!(matches!(validate_order(&map, &state, france, &too_far), Verdict::Illegal(_)));

    // Supporting a move into the supporter's own province is not legal.
    let self_support = parse_order_loose(&map, "A PAR S A MAR - PAR", Dialect::Short)?;
    assert!(matches!(validate_order(&map, &state, france, &self_support), Verdict::Illegal(_)));

    // Wrong-phase orders.
    let build = parse_order_loose(&map, "A PAR B", Dialect::Short)?;
    assert!(matches!(validate_order(&map, &state, france, &build), Verdict::Illegal(_)));
    Ok(())
}
