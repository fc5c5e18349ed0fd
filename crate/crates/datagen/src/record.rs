//! The dataset's line format: one JSON object per unit decision.
//!
//! Records keep their numeric fields as strings rendered with 17
//! significant digits, enough to reparse the exact floating-point value, so
//! files diff cleanly and survive JSON round-trips bit-for-bit. Key order
//! is fixed by field order here and never changes.

use serde::{Deserialize, Serialize};

use crate::error::DatagenError;
use crate::prompt::{build_user_prompt, SYSTEM_PROMPT, TASK_TAIL};

/// Provenance fields carried by every record; enough to re-sort or
/// de-duplicate a shuffled file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordMeta {
    /// Caller-chosen game identifier, e.g. `g0`.
    pub game: String,
    /// Game year the decision was taken in.
    pub year: u16,
    /// Phase name, e.g. `spring_move`.
    pub phase: String,
    /// Deciding power's map name, e.g. `TURKEY`.
    pub power: String,
    /// 1-based position of the unit in the prompt's decision order.
    pub unit: usize,
    /// Seed of the search run that produced the value.
    pub seed: u64,
}

/// One serialized training example. Field order is the on-disk key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    /// The fixed instruction text.
    pub system: String,
    /// Board description plus task prompt.
    pub user: String,
    /// The order continuation completing the task prompt.
    pub assistant: String,
    /// The unit's regularized value, 17 significant digits.
    pub value: String,
    /// `exp(value)` unless the file was weight-normalized, 17 significant
    /// digits.
    pub weight: String,
    /// Provenance.
    pub meta: RecordMeta,
}

/// Renders a real with 17 significant digits; parsing the text recovers the
/// exact `f64`.
pub fn real_text(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a record's numeric field back to `f64`.
fn parse_real(field: &'static str, text: &str) -> Result<f64, DatagenError> {
    text.parse::<f64>()
        .map_err(|e| DatagenError::Schema(format!("{field} field {text:?}: {e}")))
}

impl DatasetRecord {
    /// The record as one JSON line, no trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record fields serialize")
    }

    /// Parses one JSON line; unknown or missing keys are schema errors.
    pub fn parse_line(line: &str) -> Result<DatasetRecord, DatagenError> {
        serde_json::from_str(line).map_err(|e| DatagenError::Schema(e.to_string()))
    }

    /// The value field as a number.
    pub fn value_number(&self) -> Result<f64, DatagenError> {
        parse_real("value", &self.value)
    }

    /// The weight field as a number.
    pub fn weight_number(&self) -> Result<f64, DatagenError> {
        parse_real("weight", &self.weight)
    }
}

/// The message view of one record: what a trainer feeds in, plus the value
/// string stored alongside the roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    /// The fixed instruction text; always starts `You are an expert`.
    pub system: String,
    /// Board description plus task prompt.
    pub user: String,
    /// The order continuation, e.g. `moves to Greece`.
    pub assistant: String,
    /// The unit's regularized value, 17 significant digits.
    pub value: String,
}

/// One unit decision awaiting serialization: the texts, the chosen order in
/// full sentence form, and its regularized value.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTransition {
    /// Board description the decision was taken from.
    pub state_text: String,
    /// Per-unit decision prompt; ends with the unit phrase.
    pub task_text: String,
    /// The chosen order as a full sentence, e.g. `fleet in Ionian Sea moves
    /// to Greece`; parses standalone.
    pub ground_truth_text: String,
    /// Regularized value of the joint action this decision belongs to.
    pub q_value: f64,
    /// Always `exp(q_value)`.
    pub weight: f64,
    /// Provenance.
    pub meta: RecordMeta,
}

impl UnitTransition {
    /// Builds a transition, deriving the weight from the value.
    pub fn new(
        state_text: String,
        task_text: String,
        ground_truth_text: String,
        q_value: f64,
        meta: RecordMeta,
    ) -> Result<UnitTransition, DatagenError> {
        if !q_value.is_finite() {
            return Err(DatagenError::NonFiniteValue(q_value));
        }
        Ok(UnitTransition {
            state_text,
            task_text,
            ground_truth_text,
            q_value,
            weight: q_value.exp(),
            meta,
        })
    }

    /// The unit phrase the task prompt ends with, e.g. `fleet in Ionian
    /// Sea`.
    pub fn unit_phrase(&self) -> &str {
        match self.task_text.rfind(TASK_TAIL) {
            Some(i) => &self.task_text[i + TASK_TAIL.len()..],
            None => "",
        }
    }

    /// The assistant completion: the ground truth with the unit phrase
    /// stripped, e.g. `moves to Greece`.
    pub fn completion(&self) -> &str {
        self.ground_truth_text
            .strip_prefix(self.unit_phrase())
            .map(str::trim_start)
            .unwrap_or(&self.ground_truth_text)
    }

    /// The transition's message view.
    pub fn bundle(&self) -> PromptBundle {
        PromptBundle {
            system: SYSTEM_PROMPT.to_owned(),
            user: build_user_prompt(&self.state_text, &self.task_text),
            assistant: self.completion().to_owned(),
            value: real_text(self.q_value),
        }
    }

    /// The transition as an on-disk record.
    pub fn to_record(&self) -> DatasetRecord {
        let bundle = self.bundle();
        DatasetRecord {
            system: bundle.system,
            user: bundle.user,
            assistant: bundle.assistant,
            value: bundle.value,
            weight: real_text(self.weight),
            meta: self.meta.clone(),
        }
    }
}
