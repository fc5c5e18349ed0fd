//! Turning searched positions into weighted training text.
//!
//! Each movement-phase decision becomes one line of JSON: a fixed system
//! prompt, a board description plus per-unit task prompt, the chosen
//! order's continuation, and the joint action's regularized value with
//! `exp(value)` as its sampling weight.
//!
//! - [`prompt`]: the system text, the board-state layout and the task
//!   template;
//! - [`record`]: the line schema, with reals kept as 17-digit strings;
//! - [`emit`]: budget-checked writing, one record per unit of a chosen
//!   joint action;
//! - [`selfplay`]: seeded games where every power searches and every
//!   sampled decision is recorded.

pub mod emit;
pub mod error;
pub mod prompt;
pub mod record;
pub mod selfplay;

pub use emit::{emit_transitions, DatasetWriter, EmitConfig, EmitTag};
pub use error::DatagenError;
pub use prompt::{
    build_task_prompt, build_user_prompt, encode_state_text, unit_phrase, SYSTEM_PROMPT, TASK_TAIL,
};
pub use record::{real_text, DatasetRecord, PromptBundle, RecordMeta, UnitTransition};
pub use selfplay::{selfplay_generate, DatasetSummary, SelfplayConfig};
