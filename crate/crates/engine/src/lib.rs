//! Board model, order grammar and adjudication for a no-press Diplomacy
//! variant without convoys.
//!
//! The crate is layered bottom-up:
//!
//! - [`map`]: provinces, named coasts, adjacency and the map file format;
//! - [`order`] and [`grammar`]: order values and their two text dialects;
//! - [`state`]: positions, ownership and the season cycle, with a canonical
//!   text serialization;
//! - [`legal`]: legal-order enumeration and validation;
//! - [`resolve`] and [`phase`]: movement, retreat and winter adjudication,
//!   plus a generic one-phase driver;
//! - [`cases`]: a text format for adjudication test cases, run against both
//!   the production resolver and an exhaustive reference resolver;
//! - [`fixtures`]: bundled maps, from the full board to tiny test boards;
//! - [`sample`]: seeded random states and profiles for stress tests.

pub mod cases;
pub mod error;
pub mod fixtures;
pub mod grammar;
pub mod legal;
pub mod map;
pub mod order;
pub mod phase;
pub mod resolve;
pub mod sample;
pub mod state;

pub use error::EngineError;
pub use map::{MapSpec, Power, Province, Terrain, UnitKind};
pub use order::{JointAction, Order, UnitRef};
pub use resolve::{Coercion, Resolution};
pub use state::{Dislodged, GameState, Phase, Unit, START_YEAR};
