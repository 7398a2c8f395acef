//! Pair files, benchmark metadata, result artifacts, and CSV matrices.
//!
//! Pair files are whitespace-separated numeric columns without a header.
//! Benchmark metadata follows the cause-effect-pairs convention: one row
//! per pair with `id cause_first cause_last effect_first effect_last weight`
//! (1-based column ranges). Numeric output uses 17 significant digits so
//! written values parse back bit-identically.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluation::{BenchmarkResult, RankingMode};
use crate::pair::{Direction, LabeledPair, Pair};

/// Lossless text form of a float (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output format for result artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Read selected 1-based columns of a whitespace-separated numeric table.
fn load_columns(path: &Path, wanted: &[usize]) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out: Vec<Vec<f64>> = wanted.iter().map(|_| Vec::new()).collect();
    let mut rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        for (slot, col) in wanted.iter().enumerate() {
            let token = tokens.get(col - 1).ok_or_else(|| {
                parse_err(
                    path,
                    lineno + 1,
                    format!("expected at least {} columns, found {}", col, tokens.len()),
                )
            })?;
            let value: f64 = token.parse().map_err(|_| {
                parse_err(path, lineno + 1, format!("not a number: {token:?}"))
            })?;
            if !value.is_finite() {
                return Err(parse_err(path, lineno + 1, "non-finite value"));
            }
            out[slot].push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(parse_err(path, 1, "empty file"));
    }
    Ok(out)
}

/// Load the first two columns of a pair file.
pub fn load_pair(path: &Path) -> Result<Pair> {
    load_pair_columns(path, 1, 2)
}

/// Load two specific 1-based columns of a pair file.
pub fn load_pair_columns(path: &Path, col_x: usize, col_y: usize) -> Result<Pair> {
    let mut cols = load_columns(path, &[col_x, col_y])?;
    let y = cols.pop().unwrap();
    let x = cols.pop().unwrap();
    Pair::new(x, y)
}

/// Write a pair as two whitespace-separated columns.
pub fn write_pair(path: &Path, pair: &Pair) -> Result<()> {
    let mut text = String::with_capacity(pair.len() * 48);
    for (a, b) in pair.x.iter().zip(&pair.y) {
        let _ = writeln!(text, "{} {}", format_float(*a), format_float(*b));
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// One row of a benchmark metadata file.
#[derive(Debug, Clone)]
pub struct MetaRow {
    pub id: String,
    pub cause_first: usize,
    pub cause_last: usize,
    pub effect_first: usize,
    pub effect_last: usize,
    pub weight: f64,
}

/// Parse a metadata file. Rows with extra columns are accepted and counted
/// as warnings.
pub fn load_pairmeta(path: &Path) -> Result<(Vec<MetaRow>, usize)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    let mut warnings = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 6 {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("expected 6 fields, found {}", tokens.len()),
            ));
        }
        if tokens.len() > 6 {
            warnings += 1;
        }
        let col = |k: usize| -> Result<usize> {
            tokens[k]
                .parse::<usize>()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad column index {:?}", tokens[k])))
        };
        let weight: f64 = tokens[5]
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad weight {:?}", tokens[5])))?;
        if !(weight > 0.0) {
            return Err(parse_err(path, lineno + 1, "weight must be positive"));
        }
        rows.push(MetaRow {
            id: tokens[0].to_string(),
            cause_first: col(1)?,
            cause_last: col(2)?,
            effect_first: col(3)?,
            effect_last: col(4)?,
            weight,
        });
    }
    Ok((rows, warnings))
}

fn pair_file_name(id: &str) -> String {
    if id.starts_with("pair") {
        format!("{id}.txt")
    } else {
        format!("pair{id}.txt")
    }
}

/// A benchmark loaded from disk.
#[derive(Debug, Clone)]
pub struct LoadedBenchmark {
    pub pairs: Vec<LabeledPair>,
    /// Pairs skipped because cause or effect spans more than one column.
    pub skipped_multivariate: usize,
    /// Metadata rows with extra trailing fields.
    pub meta_warnings: usize,
}

/// Load a metadata-described benchmark directory, keeping only pairs with
/// univariate cause and effect.
pub fn load_tuebingen(dir: &Path, meta_path: &Path) -> Result<LoadedBenchmark> {
    let (rows, meta_warnings) = load_pairmeta(meta_path)?;
    let mut pairs = Vec::new();
    let mut skipped = 0usize;
    for row in rows {
        if row.cause_first != row.cause_last || row.effect_first != row.effect_last {
            skipped += 1;
            continue;
        }
        let (cause, effect) = (row.cause_first, row.effect_first);
        if cause == effect {
            return Err(Error::PairLoad {
                id: row.id,
                message: "cause and effect reference the same column".into(),
            });
        }
        // Keep the file's own column order; the label records which side
        // is the cause.
        let (col_x, col_y) = (cause.min(effect), cause.max(effect));
        let truth = if cause < effect {
            Direction::XToY
        } else {
            Direction::YToX
        };
        let path = dir.join(pair_file_name(&row.id));
        let pair = load_pair_columns(&path, col_x, col_y).map_err(|e| Error::PairLoad {
            id: row.id.clone(),
            message: e.to_string(),
        })?;
        pairs.push(LabeledPair {
            id: row.id,
            pair,
            truth,
            weight: row.weight,
        });
    }
    Ok(LoadedBenchmark {
        pairs,
        skipped_multivariate: skipped,
        meta_warnings,
    })
}

/// Write a generated benchmark as pair files plus a pairmeta.txt.
pub fn write_benchmark(dir: &Path, pairs: &[LabeledPair]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut meta = String::new();
    for lp in pairs {
        let file = dir.join(pair_file_name(&lp.id));
        write_pair(&file, &lp.pair)?;
        let (c, e) = match lp.truth {
            Direction::YToX => (2, 1),
            _ => (1, 2),
        };
        let _ = writeln!(
            meta,
            "{} {c} {c} {e} {e} {}",
            lp.id.trim_start_matches("pair"),
            format_float(lp.weight)
        );
    }
    let meta_path = dir.join("pairmeta.txt");
    fs::write(&meta_path, meta).map_err(|e| io_err(&meta_path, e))
}

#[derive(Serialize)]
struct Summary<'a> {
    accuracy: f64,
    roc_auc: Option<f64>,
    pr_auc: Option<f64>,
    roc_auc_confidence: Option<f64>,
    pr_auc_confidence: Option<f64>,
    roc_auc_raw: Option<f64>,
    pr_auc_raw: Option<f64>,
    wall_time: f64,
    n_pairs: usize,
    failures: usize,
    ranking_mode: &'a RankingMode,
}

/// JSON summary of a benchmark run.
pub fn results_json(result: &BenchmarkResult) -> String {
    let summary = Summary {
        accuracy: result.accuracy,
        roc_auc: result.roc_auc,
        pr_auc: result.pr_auc,
        roc_auc_confidence: result.roc_auc_confidence,
        pr_auc_confidence: result.pr_auc_confidence,
        roc_auc_raw: result.roc_auc_raw,
        pr_auc_raw: result.pr_auc_raw,
        wall_time: result.wall_time_secs,
        n_pairs: result.n_pairs(),
        failures: result.failures.len(),
        ranking_mode: &result.ranking_mode,
    };
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

/// Per-pair CSV: one row per scored pair.
pub fn results_csv(result: &BenchmarkResult) -> String {
    let mut out = String::from("id,score,confidence,decision,truth,weight,correct\n");
    for r in &result.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.id,
            format_float(r.score),
            format_float(r.confidence),
            r.decision,
            r.truth,
            format_float(r.weight),
            r.correct
        );
    }
    out
}

/// Write benchmark results in the requested format.
pub fn write_results(result: &BenchmarkResult, path: &Path, format: ResultFormat) -> Result<()> {
    let text = match format {
        ResultFormat::Csv => results_csv(result),
        ResultFormat::Json => results_json(result),
    };
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

/// A numeric matrix with named columns (comma-separated, one header row).
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl DataMatrix {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.columns[k].as_slice())
    }
}

/// Load a CSV data matrix with a header row naming the columns.
pub fn load_data_matrix(path: &Path) -> Result<DataMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if names.is_empty() || names.iter().any(|n| n.is_empty()) {
        return Err(parse_err(path, 1, "bad header"));
    }
    let mut columns: Vec<Vec<f64>> = names.iter().map(|_| Vec::new()).collect();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').collect();
        if tokens.len() != names.len() {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("expected {} fields, found {}", names.len(), tokens.len()),
            ));
        }
        for (k, token) in tokens.iter().enumerate() {
            let v: f64 = token.trim().parse().map_err(|_| {
                parse_err(path, lineno + 1, format!("not a number: {token:?}"))
            })?;
            columns[k].push(v);
        }
    }
    if columns[0].is_empty() {
        return Err(parse_err(path, 2, "no data rows"));
    }
    Ok(DataMatrix { names, columns })
}

/// Convenience: dir/pairmeta.txt.
pub fn default_meta_path(dir: &Path) -> PathBuf {
    dir.join("pairmeta.txt")
}
