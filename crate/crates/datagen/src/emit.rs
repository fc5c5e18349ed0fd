//! Budget-checked record writing, one JSON line per unit decision.

use std::io::Write;

use entente_engine::grammar::{long_name, render_order, Dialect};
use entente_engine::{GameState, JointAction, MapSpec, Order, UnitKind};
use entente_solver::PowerSearch;

use crate::error::DatagenError;
use crate::prompt::{build_task_prompt, encode_state_text, unit_phrase};
use crate::record::{real_text, DatasetRecord, RecordMeta, UnitTransition};

/// Knobs for the dataset writer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    /// Longest sequence a record may occupy, in tokens.
    pub max_seq_tokens: usize,
    /// Characters budgeted per token. Records are measured in characters
    /// and this ratio converts the token limit; 4 is a conservative figure
    /// for English prose under common subword vocabularies.
    pub chars_per_token: usize,
    /// When set, buffer the whole file and divide every weight by the mean
    /// weight before writing. Weights then sum to the record count but no
    /// longer equal `exp(value)`. Off by default.
    pub normalize_weights: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig {
            max_seq_tokens: 2048,
            chars_per_token: 4,
            normalize_weights: false,
        }
    }
}

impl EmitConfig {
    /// The per-record character budget.
    pub fn char_budget(&self) -> usize {
        self.max_seq_tokens * self.chars_per_token
    }
}

/// Sole owner of a dataset sink. Writes are serialized through this struct;
/// with weight normalization off (the default) records stream straight
/// through, otherwise they are buffered until [`DatasetWriter::finish`].
#[derive(Debug)]
pub struct DatasetWriter<W: Write> {
    sink: W,
    config: EmitConfig,
    buffered: Vec<DatasetRecord>,
    written: usize,
}

impl<W: Write> DatasetWriter<W> {
    /// Wraps a sink.
    pub fn new(sink: W, config: EmitConfig) -> DatasetWriter<W> {
        DatasetWriter {
            sink,
            config,
            buffered: Vec::new(),
            written: 0,
        }
    }

    /// Accepts one record, enforcing the sequence budget over the system,
    /// user, assistant and value texts.
    pub fn push(&mut self, record: DatasetRecord) -> Result<(), DatagenError> {
        let chars = record.system.chars().count()
            + record.user.chars().count()
            + record.assistant.chars().count()
            + record.value.chars().count();
        let budget = self.config.char_budget();
        if chars > budget {
            return Err(DatagenError::PromptBudget { chars, budget });
        }
        if self.config.normalize_weights {
            self.buffered.push(record);
        } else {
            writeln!(self.sink, "{}", record.to_line())?;
        }
        self.written += 1;
        Ok(())
    }

    /// Flushes the sink and returns how many records were written. With
    /// normalization on, this is where the buffered records land on disk.
    pub fn finish(mut self) -> Result<usize, DatagenError> {
        if !self.buffered.is_empty() {
            let mut weights = Vec::with_capacity(self.buffered.len());
            for record in &self.buffered {
                weights.push(record.weight_number()?);
            }
            let mean = weights.iter().sum::<f64>() / weights.len() as f64;
            for (record, w) in self.buffered.iter_mut().zip(weights) {
                record.weight = real_text(w / mean);
            }
            for record in &self.buffered {
                writeln!(self.sink, "{}", record.to_line())?;
            }
        }
        self.sink.flush()?;
        Ok(self.written)
    }
}

/// Provenance stamped on every record of one emission call.
#[derive(Debug, Clone, Copy)]
pub struct EmitTag<'a> {
    /// Game identifier, e.g. `g0`.
    pub game: &'a str,
    /// Seed of the search run that produced the values.
    pub seed: u64,
}

/// Decision order of a power's units: armies before fleets, each kind by
/// its location's long name. This is also the order the `unit` meta field
/// counts in.
fn chain_permutation(map: &MapSpec, joint: &JointAction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..joint.len()).collect();
    order.sort_by_key(|&i| {
        let actor = joint.orders()[i]
            .actor()
            .expect("movement orders name their unit");
        let kind = match actor.kind {
            UnitKind::Army => 0u8,
            UnitKind::Fleet => 1,
        };
        (kind, long_name(map, actor.province))
    });
    order
}

/// Writes one record per unit of `selected`, the joint action chosen from
/// `search`'s candidates, and returns how many records were written.
///
/// Units are visited armies-first by location name. Each record's prompt
/// carries the orders already fixed for earlier units and the unit's own
/// candidate menu (`menus`, indexed like the joint action's canonical order
/// as produced by per-unit truncation); its value is the selected
/// candidate's regularized joint value, the same scalar for every unit of
/// the action. The tag's game id and seed pass straight into the record
/// meta.
pub fn emit_transitions<W: Write>(
    map: &MapSpec,
    state: &GameState,
    search: &PowerSearch,
    menus: &[Vec<(Order, f64)>],
    selected: &JointAction,
    tag: EmitTag<'_>,
    writer: &mut DatasetWriter<W>,
) -> Result<usize, DatagenError> {
    if selected.power != search.power {
        return Err(DatagenError::MenuMismatch(format!(
            "selected action belongs to {} but the search ran for {}",
            map.power_name(selected.power),
            map.power_name(search.power),
        )));
    }
    let index = search
        .candidates
        .iter()
        .position(|c| c == selected)
        .ok_or(DatagenError::SelectedNotCandidate)?;
    let q_value = search.joint_q_with_anchor[index];
    if selected.is_empty() {
        return Ok(0);
    }
    if menus.len() != selected.len() {
        return Err(DatagenError::MenuMismatch(format!(
            "{} menus for {} units",
            menus.len(),
            selected.len()
        )));
    }
    for (order, menu) in selected.orders().iter().zip(menus) {
        let actor = order.actor().expect("movement orders name their unit");
        let in_menu = menu.iter().any(|(o, _)| *o == *order);
        if !in_menu {
            return Err(DatagenError::MenuMismatch(format!(
                "selected order for {} is outside its menu",
                long_name(map, actor.province)
            )));
        }
    }

    let state_text = encode_state_text(map, state, search.power)?;
    let chain = chain_permutation(map, selected);
    let mut prev: Vec<String> = Vec::new();
    for (d, &i) in chain.iter().enumerate() {
        let order = &selected.orders()[i];
        let actor = order.actor().expect("movement orders name their unit");
        let candidates: Vec<Order> = menus[i].iter().map(|&(o, _)| o).collect();
        let task_text = build_task_prompt(map, &prev, actor, &candidates);
        let ground_truth = render_order(map, order, Dialect::Verbose);
        debug_assert!(ground_truth.starts_with(&unit_phrase(map, actor)));
        let meta = RecordMeta {
            game: tag.game.to_owned(),
            year: state.year,
            phase: state.phase.name().to_owned(),
            power: map.power_name(search.power).to_owned(),
            unit: d + 1,
            seed: tag.seed,
        };
        let transition =
            UnitTransition::new(state_text.clone(), task_text, ground_truth, q_value, meta)?;
        writer.push(transition.to_record())?;
        prev.push(render_order(map, order, Dialect::Verbose));
    }
    Ok(chain.len())
}
