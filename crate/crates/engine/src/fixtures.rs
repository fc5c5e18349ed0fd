//! Bundled map fixtures.
//!
//! `standard` is the full seven-power board. The small boards exist for
//! tests and quick experiments: `mini3` and `duo5` are two-power sandboxes,
//! `ring7` is a symmetric seven-power ring, and `pennies` is a two-power
//! board whose single contested round reduces to a 2x2 matrix game.

use crate::error::EngineError;
use crate::map::MapSpec;

pub const STANDARD: &str = include_str!("../fixtures/standard.map");
pub const MINI3: &str = include_str!("../fixtures/mini3.map");
pub const DUO5: &str = include_str!("../fixtures/duo5.map");
pub const RING7: &str = include_str!("../fixtures/ring7.map");
pub const PENNIES: &str = include_str!("../fixtures/pennies.map");

pub fn names() -> &'static [&'static str] {
    &["standard", "mini3", "duo5", "ring7", "pennies"]
}

/// Parses a bundled map by name.
pub fn by_name(name: &str) -> Result<MapSpec, EngineError> {
    let text = match name {
        "standard" => STANDARD,
        "mini3" => MINI3,
        "duo5" => DUO5,
        "ring7" => RING7,
        "pennies" => PENNIES,
        _ => return Err(EngineError::UnknownMap(name.to_string())),
    };
    MapSpec::parse(text)
}
