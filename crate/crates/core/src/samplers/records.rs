use std::io::{BufRead, Write};

use super::NodeRecord;
use crate::error::{Error, Result};
use crate::graph::Group;

const HEADER: &str = "# node_id\tdegree\ttrue_label\tnoisy_label\tstep_index";

/// Writes one tab-separated line per record; a missing noisy label is `NA`.
pub fn write_records<W: Write>(records: &[NodeRecord], mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for (step, r) in records.iter().enumerate() {
        let noisy = r.noisy_label.map_or_else(|| "NA".to_string(), |g| g.to_string());
        writeln!(out, "{}\t{}\t{}\t{}\t{}", r.node, r.degree, r.true_label, noisy, step)?;
    }
    Ok(())
}

/// Inverse of [`write_records`]. Step indices must run `0, 1, 2, ...`.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<NodeRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split('\t').collect();
        let [node, degree, truth, noisy, step] = fields[..] else {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        };
        let number = |s: &str| s.parse::<usize>().map_err(|_| err(format!("invalid integer {s:?}")));
        if number(step)? != records.len() {
            return Err(err(format!("step index {step} out of sequence")));
        }
        let group = |s: &str| s.parse::<Group>().map_err(|_| err(format!("invalid group {s:?}")));
        records.push(NodeRecord {
            node: number(node)?,
            degree: number(degree)?,
            true_label: group(truth)?,
            noisy_label: if noisy == "NA" { None } else { Some(group(noisy)?) },
        });
    }
    Ok(records)
}
