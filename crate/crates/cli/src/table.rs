//! Side-by-side iteration tables from run CSVs, one column group per file.

use crate::run::CSV_HEADER;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    Schema { file: String, msg: String },
    Io { file: String, msg: String },
}

impl std::fmt::Display for TableError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableError::Schema { file, msg } => write!(f, "{file}: schema mismatch: {msg}"),
            TableError::Io { file, msg } => write!(f, "{file}: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Group {
    label: String,
    cycles: Vec<String>,
    /// `t -> (N, cycle -> cell)`.
    rows: BTreeMap<u32, (usize, BTreeMap<String, String>)>,
}

fn parse_group(label: &str, text: &str) -> Result<Group, TableError> {
    let schema = |msg: String| TableError::Schema {
        file: label.to_string(),
        msg,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut g = Group {
        label: label.to_string(),
        ..Default::default()
    };
    let Some(header) = lines.next() else {
        return Ok(g);
    };
    if header.trim() != CSV_HEADER {
        return Err(schema(format!("header {header:?}")));
    }
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 {
            return Err(schema(format!("row {} has {} fields", i + 1, f.len())));
        }
        let t: u32 = f[0]
            .parse()
            .map_err(|_| schema(format!("row {}: bad t", i + 1)))?;
        let n: usize = f[1]
            .parse()
            .map_err(|_| schema(format!("row {}: bad N", i + 1)))?;
        let it: usize = f[3]
            .parse()
            .map_err(|_| schema(format!("row {}: bad iterations", i + 1)))?;
        f[4].parse::<f64>()
            .map_err(|_| schema(format!("row {}: bad final_residual", i + 1)))?;
        if !matches!(f[2], "tgm" | "vcycle")
            || !matches!(f[5], "ok" | "max_iterations" | "diverged")
        {
            return Err(schema(format!("row {}: bad cycle or flag", i + 1)));
        }
        if !g.cycles.iter().any(|c| c == f[2]) {
            g.cycles.push(f[2].to_string());
        }
        let cell = if f[5] == "ok" {
            it.to_string()
        } else {
            format!("{it}*")
        };
        g.rows
            .entry(t)
            .or_insert_with(|| (n, BTreeMap::new()))
            .1
            .insert(f[2].to_string(), cell);
    }
    g.cycles.sort_by_key(|c| c != "tgm");
    Ok(g)
}

/// Builds the table from `(label, csv text)` pairs. `Ok(None)` means no
/// file had any data rows.
pub fn format_table(inputs: &[(String, String)]) -> Result<Option<String>, TableError> {
    let groups: Vec<Group> = inputs
        .iter()
        .map(|(l, t)| parse_group(l, t))
        .collect::<Result<_, _>>()?;
    let groups: Vec<Group> = groups.into_iter().filter(|g| !g.rows.is_empty()).collect();
    if groups.is_empty() {
        return Ok(None);
    }
    let ts: std::collections::BTreeSet<u32> =
        groups.iter().flat_map(|g| g.rows.keys().copied()).collect();
    const W: usize = 8;
    let mut head1 = format!("{:>4}", "");
    let mut head2 = format!("{:>4}", "t");
    for g in &groups {
        let width = W * (1 + g.cycles.len());
        head1.push_str(&format!("  {:^width$}", g.label));
        head2.push_str(&format!("  {:>W$}", "N"));
        for c in &g.cycles {
            head2.push_str(&format!("{:>W$}", if c == "tgm" { "TGM" } else { "V" }));
        }
    }
    let mut out = format!("{}\n{}\n", head1.trim_end(), head2);
    for t in ts {
        let mut line = format!("{t:>4}");
        for g in &groups {
            match g.rows.get(&t) {
                Some((n, cells)) => {
                    line.push_str(&format!("  {n:>W$}"));
                    for c in &g.cycles {
                        line.push_str(&format!(
                            "{:>W$}",
                            cells.get(c).map(String::as_str).unwrap_or("-")
                        ));
                    }
                }
                None => line.push_str(&format!("  {:>w$}", "-", w = W * (1 + g.cycles.len()))),
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(Some(out))
}

pub fn read_inputs(paths: &[impl AsRef<Path>]) -> Result<Vec<(String, String)>, TableError> {
    paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let text = std::fs::read_to_string(p).map_err(|e| TableError::Io {
                file: p.display().to_string(),
                msg: e.to_string(),
            })?;
            Ok((label, text))
        })
        .collect()
}
