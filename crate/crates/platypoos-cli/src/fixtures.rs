//! File formats: tree-table fixtures and the raw sample log.

use crate::CliError;
use platypoos::env::TableTree;
use platypoos::seq::ActionSeq;
use platypoos::trace::SampleLog;
use std::fmt::Write as _;

/// Serialize a depth-ordered `(sequence, mean reward)` table.
///
/// Two tab-separated meta lines (`k`, `depth`) followed by one
/// `sequence<TAB>mean` line per node; rewards keep full round-trip
/// precision.
pub fn tree_table_to_string(k: usize, depth: u32, entries: &[(ActionSeq, f64)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "k\t{k}");
    let _ = writeln!(out, "depth\t{depth}");
    for (seq, mean) in entries {
        let _ = writeln!(out, "{seq}\t{mean:?}");
    }
    out
}

/// Parse a serialized tree table back into an explicit-table environment.
pub fn load_tree_table(text: &str) -> Result<TableTree, CliError> {
    let mut lines = text.lines().enumerate();
    let mut k: Option<usize> = None;
    let mut entries = Vec::new();
    let meta = |line: usize, name: &str, value: &str| -> Result<u64, CliError> {
        value.parse().map_err(|_| {
            CliError::Config(format!("tree table line {line}: bad {name} value `{value}`"))
        })
    };
    for (i, raw) in &mut lines {
        let line = i + 1;
        let raw = raw.trim_end();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let Some((field, value)) = raw.split_once('\t') else {
            return Err(CliError::Config(format!(
                "tree table line {line}: expected tab-separated fields"
            )));
        };
        match field {
            "k" => k = Some(meta(line, "k", value)? as usize),
            "depth" => {
                let _ = meta(line, "depth", value)?;
            }
            seq => {
                let seq: ActionSeq = seq.parse().map_err(|_| {
                    CliError::Config(format!("tree table line {line}: bad sequence `{seq}`"))
                })?;
                let mean: f64 = value.parse().map_err(|_| {
                    CliError::Config(format!("tree table line {line}: bad reward `{value}`"))
                })?;
                entries.push((seq, mean));
            }
        }
    }
    let k = k.ok_or_else(|| CliError::Config("tree table: missing `k` line".into()))?;
    Ok(TableTree::from_entries(k, entries))
}

/// One line per generative call: `state_seq<TAB>action<TAB>reward<TAB>index`.
pub fn sample_log_to_string(log: &SampleLog) -> String {
    let mut out = String::from("state_seq\taction\treward\tstream_index\n");
    for rec in log.records() {
        let _ = writeln!(
            out,
            "{}\t{}\t{:?}\t{}",
            rec.state_seq, rec.action, rec.reward, rec.stream_index
        );
    }
    out
}
