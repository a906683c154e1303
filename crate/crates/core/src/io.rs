//! File formats: labeled CSV matrices, bipartite edgelists, backbone
//! exports (CSV, signed edgelist, DOT) and null-model result persistence.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extract::{Backbone, Fwer, Provenance};
use crate::graph::{BipartiteGraph, Projection};
use crate::matrix::SquareMatrix;
use crate::metrics::Partition;
use crate::null_model::{ModelSummary, NullModelResult};

/// Serialization formats for backbones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackboneFormat {
    /// Labeled square matrix of -1/0/1 cells, mirroring the input layout.
    #[default]
    MatrixCsv,
    /// One `label_i,label_j,sign` row per nonzero upper-triangle cell.
    SignedEdgelist,
    /// Undirected DOT graph for external rendering.
    Dot,
}

impl fmt::Display for BackboneFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackboneFormat::MatrixCsv => "matrix-csv",
            BackboneFormat::SignedEdgelist => "signed-edgelist",
            BackboneFormat::Dot => "dot",
        })
    }
}

impl FromStr for BackboneFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-csv" | "matrix" => Ok(BackboneFormat::MatrixCsv),
            "signed-edgelist" | "edgelist" => Ok(BackboneFormat::SignedEdgelist),
            "dot" => Ok(BackboneFormat::Dot),
            other => Err(Error::InvalidInput(format!(
                "unknown output format {other:?}; expected matrix-csv, signed-edgelist or dot"
            ))),
        }
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

// std::io errors do not carry the file name; these keep it in the message
fn with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn open_file(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| with_path(path, e))
}

fn create_file(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| with_path(path, e))
}

/// A labeled matrix CSV: header `,<col>...`, then one `<row>,<cells>...`
/// record per row.
fn read_labeled_matrix<T>(
    path: &Path,
    describe: &str,
    parse_cell: impl Fn(&str) -> Option<T>,
) -> Result<(Vec<String>, Vec<String>, Vec<Vec<T>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(open_file(path)?));
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(parse_error(path, 1, "empty file")),
    };
    if header.len() < 2 {
        return Err(parse_error(path, 1, "header must name at least one column"));
    }
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for (idx, record) in records.enumerate() {
        let record = record?;
        let line = idx + 2;
        if record.len() != header.len() {
            return Err(parse_error(
                path,
                line,
                format!(
                    "row has {} fields but the header has {}",
                    record.len(),
                    header.len()
                ),
            ));
        }
        row_labels.push(record[0].to_string());
        let mut cells = Vec::with_capacity(col_labels.len());
        for (j, cell) in record.iter().skip(1).enumerate() {
            match parse_cell(cell) {
                Some(v) => cells.push(v),
                None => {
                    return Err(parse_error(
                        path,
                        line,
                        format!(
                            "cell {cell:?} in column {:?} is not {describe}",
                            col_labels[j]
                        ),
                    ))
                }
            }
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 1, "no data rows"));
    }
    Ok((row_labels, col_labels, rows))
}

fn write_labeled_matrix<T: fmt::Display>(
    path: &Path,
    row_labels: &[String],
    col_labels: &[String],
    cell: impl Fn(usize, usize) -> T,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(create_file(path)?));
    let mut header = vec![String::new()];
    header.extend(col_labels.iter().cloned());
    writer.write_record(&header)?;
    for (i, label) in row_labels.iter().enumerate() {
        let mut record = vec![label.clone()];
        record.extend((0..col_labels.len()).map(|j| cell(i, j).to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Read a biadjacency matrix CSV: first row holds column labels, first
/// column holds row labels, every cell is 0 or 1.
pub fn read_biadjacency_csv(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let path = path.as_ref();
    let (row_labels, col_labels, rows) = read_labeled_matrix(path, "0 or 1", |cell| match cell {
        "0" => Some(0u8),
        "1" => Some(1u8),
        _ => None,
    })?;
    BipartiteGraph::from_rows(row_labels, col_labels, &rows)
}

pub fn write_biadjacency_csv(b: &BipartiteGraph, path: impl AsRef<Path>) -> Result<()> {
    write_labeled_matrix(path.as_ref(), b.row_labels(), b.col_labels(), |i, j| {
        b.entry(i, j) as u8
    })
}

/// Read a two-column `agent,artifact` edgelist. Labels appear in
/// first-appearance order; duplicate rows collapse to a single edge with a
/// warning.
pub fn read_edgelist(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(open_file(path)?));
    let mut row_labels: Vec<String> = Vec::new();
    let mut col_labels: Vec<String> = Vec::new();
    let mut row_index = std::collections::HashMap::new();
    let mut col_index = std::collections::HashMap::new();
    let mut edges = std::collections::HashSet::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 1;
        if record.len() != 2 {
            return Err(parse_error(
                path,
                line,
                format!("expected 2 fields (agent, artifact), found {}", record.len()),
            ));
        }
        let i = *row_index.entry(record[0].to_string()).or_insert_with(|| {
            row_labels.push(record[0].to_string());
            row_labels.len() - 1
        });
        let j = *col_index.entry(record[1].to_string()).or_insert_with(|| {
            col_labels.push(record[1].to_string());
            col_labels.len() - 1
        });
        if !edges.insert((i, j)) {
            log::warn!("{}: line {line}: duplicate edge ({}, {})", path.display(), &record[0], &record[1]);
        }
    }
    if edges.is_empty() {
        return Err(parse_error(path, 1, "empty edgelist"));
    }
    let mut rows = vec![vec![0u8; col_labels.len()]; row_labels.len()];
    for (i, j) in edges {
        rows[i][j] = 1;
    }
    BipartiteGraph::from_rows(row_labels, col_labels, &rows)
}

/// Write a weighted projection as a labeled matrix CSV.
pub fn write_projection_csv(g: &Projection, path: impl AsRef<Path>) -> Result<()> {
    let labels = g.row_labels().to_vec();
    write_labeled_matrix(path.as_ref(), &labels, &labels, |i, j| g.weight(i, j))
}

fn dot_escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Write a backbone in the chosen format.
pub fn write_backbone(b: &Backbone, path: impl AsRef<Path>, format: BackboneFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        BackboneFormat::MatrixCsv => {
            let labels = b.row_labels().to_vec();
            write_labeled_matrix(path, &labels, &labels, |i, j| b.entry(i, j))
        }
        BackboneFormat::SignedEdgelist => {
            let mut writer = csv::Writer::from_writer(BufWriter::new(create_file(path)?));
            for (i, j, v) in b.edges() {
                writer.write_record([
                    b.row_labels()[i].as_str(),
                    b.row_labels()[j].as_str(),
                    if v > 0 { "1" } else { "-1" },
                ])?;
            }
            writer.flush()?;
            Ok(())
        }
        BackboneFormat::Dot => {
            let mut out = BufWriter::new(create_file(path)?);
            writeln!(out, "graph backbone {{")?;
            for label in b.row_labels() {
                writeln!(out, "  \"{}\";", dot_escape(label))?;
            }
            for (i, j, v) in b.edges() {
                let style = if v > 0 { "" } else { " [style=dashed]" };
                writeln!(
                    out,
                    "  \"{}\" -- \"{}\"{style};",
                    dot_escape(&b.row_labels()[i]),
                    dot_escape(&b.row_labels()[j])
                )?;
            }
            writeln!(out, "}}")?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Read a backbone matrix CSV (as written by [`write_backbone`] with
/// [`BackboneFormat::MatrixCsv`]). Provenance is not stored in the CSV, so
/// the result carries a generic one; signedness is inferred from the cells.
pub fn read_backbone_csv(path: impl AsRef<Path>) -> Result<Backbone> {
    let path = path.as_ref();
    let (row_labels, col_labels, rows) = read_labeled_matrix(path, "-1, 0 or 1", |cell| {
        match cell {
            "-1" => Some(-1i8),
            "0" => Some(0i8),
            "1" => Some(1i8),
            _ => None,
        }
    })?;
    if row_labels != col_labels {
        return Err(parse_error(
            path,
            1,
            "backbone matrix must have identical row and column labels",
        ));
    }
    let m = row_labels.len();
    let entries = SquareMatrix::from_vec(m, rows.into_iter().flatten().collect());
    let signed = entries.data().iter().any(|&v| v < 0);
    Backbone::from_entries(
        row_labels,
        entries,
        Provenance {
            model_name: "imported".into(),
            alpha: None,
            signed,
            fwer: Fwer::None,
        },
    )
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut os = prefix.as_os_str().to_os_string();
    os.push(suffix);
    PathBuf::from(os)
}

/// File paths used by [`write_null_result`] for a given prefix:
/// `(positive, negative, summary)`.
pub fn null_result_paths(prefix: impl AsRef<Path>) -> (PathBuf, PathBuf, PathBuf) {
    let prefix = prefix.as_ref();
    (
        with_suffix(prefix, ".positive.csv"),
        with_suffix(prefix, ".negative.csv"),
        with_suffix(prefix, ".summary.json"),
    )
}

/// Persist a null-model result as `<prefix>.positive.csv`,
/// `<prefix>.negative.csv` and `<prefix>.summary.json`.
pub fn write_null_result(r: &NullModelResult, prefix: impl AsRef<Path>) -> Result<()> {
    let (pos_path, neg_path, summary_path) = null_result_paths(prefix);
    let labels = r.row_labels().to_vec();
    write_labeled_matrix(&pos_path, &labels, &labels, |i, j| r.positive().get(i, j))?;
    write_labeled_matrix(&neg_path, &labels, &labels, |i, j| r.negative().get(i, j))?;
    write_summary_json(r.summary(), summary_path)
}

/// Load a null-model result persisted by [`write_null_result`].
pub fn read_null_result(prefix: impl AsRef<Path>) -> Result<NullModelResult> {
    let (pos_path, neg_path, summary_path) = null_result_paths(prefix);
    let parse = |cell: &str| cell.parse::<f64>().ok();
    let (row_labels, col_labels, pos_rows) =
        read_labeled_matrix(&pos_path, "a probability", parse)?;
    if row_labels != col_labels {
        return Err(parse_error(
            &pos_path,
            1,
            "probability matrix must have identical row and column labels",
        ));
    }
    let (neg_row_labels, _, neg_rows) = read_labeled_matrix(&neg_path, "a probability", parse)?;
    if neg_row_labels != row_labels {
        return Err(parse_error(
            &neg_path,
            1,
            "negative matrix labels do not match the positive matrix",
        ));
    }
    let m = row_labels.len();
    let positive = SquareMatrix::from_vec(m, pos_rows.into_iter().flatten().collect());
    let negative = SquareMatrix::from_vec(m, neg_rows.into_iter().flatten().collect());
    let summary = read_summary_json(summary_path)?;
    NullModelResult::new(row_labels, positive, negative, summary)
}

pub fn write_summary_json(summary: &ModelSummary, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(create_file(path.as_ref())?);
    serde_json::to_writer_pretty(&mut out, summary)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_summary_json(path: impl AsRef<Path>) -> Result<ModelSummary> {
    let file = BufReader::new(open_file(path.as_ref())?);
    Ok(serde_json::from_reader(file)?)
}

/// Write per-trial dyad weights as a one-column CSV.
pub fn write_dyad_values(values: &[u32], path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(create_file(path.as_ref())?);
    writeln!(out, "dyad_value")?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a two-column `label,community` partition CSV.
pub fn read_partition_csv(path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(open_file(path)?));
    let mut pairs = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(parse_error(
                path,
                idx + 1,
                format!("expected 2 fields (label, community), found {}", record.len()),
            ));
        }
        pairs.push((record[0].to_string(), record[1].to_string()));
    }
    Partition::from_pairs(pairs)
}
