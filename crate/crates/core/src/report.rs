//! Summary tables (plain text and LaTeX) and per-experiment plot data.
//!
//! Everything here is a pure function of its inputs; number formatting never
//! depends on locale.
//!
//! Files written under the output directory:
//!
//! * `<ID>.csv`: test-line data for the visualisation seed, header
//!   `x,truth,vekua_pred,siren_pred` (plus `noisy_sample` for experiment C),
//!   values in `%.16e`. A skipped SIREN run is written as `NaN`.
//! * `runs.csv`: one line per `(experiment, method, seed)` run.
//! * `summary.txt`, `summary.tex`: the aggregated tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{
    ExperimentId, ExperimentResult, Method, RunOutcome, SummaryRow, TestLine,
};

pub const SUMMARY_TXT: &str = "summary.txt";
pub const SUMMARY_TEX: &str = "summary.tex";
pub const RUNS_CSV: &str = "runs.csv";

const RULE_WIDTH: usize = 80;
const HEADERS: [&str; 4] = ["Experiment", "Method", "Time (s)", "MSE"];

/// One formatted table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    /// Empty on continuation rows of the same experiment.
    pub experiment: String,
    pub method: String,
    pub time: String,
    pub mse: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub rows: Vec<ReportRow>,
    pub rendered_text: String,
    pub rendered_latex: String,
}

impl ReportDocument {
    pub fn new(summary: &[SummaryRow]) -> Self {
        Self {
            rows: format_rows(summary),
            rendered_text: render_text_table(summary),
            rendered_latex: render_latex_table(summary),
        }
    }
}

/// C-style `%.2e`: two mantissa decimals, signed exponent of at least two digits.
pub fn sci2(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}").to_lowercase();
    }
    let s = format!("{v:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent in LowerExp output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn pm(a: &str, b: &str) -> String {
    format!("{a} ± {b}")
}

pub fn format_rows(summary: &[SummaryRow]) -> Vec<ReportRow> {
    let mut previous: Option<ExperimentId> = None;
    summary
        .iter()
        .map(|row| {
            let experiment = if previous == Some(row.id) {
                String::new()
            } else {
                row.id.name().to_string()
            };
            previous = Some(row.id);
            ReportRow {
                experiment,
                method: row.method.label().to_string(),
                time: pm(
                    &format!("{:.4}", row.time_mean),
                    &format!("{:.4}", row.time_std),
                ),
                mse: pm(&sci2(row.mse_mean), &sci2(row.mse_std)),
            }
        })
        .collect()
}

fn seed_count(summary: &[SummaryRow]) -> usize {
    summary.iter().map(|r| r.runs).max().unwrap_or(0)
}

/// Fixed-width table, columns left-aligned and separated by two spaces.
pub fn render_text_table(summary: &[SummaryRow]) -> String {
    let rows = format_rows(summary);
    let cells: Vec<[&str; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.experiment.as_str(),
                r.method.as_str(),
                r.time.as_str(),
                r.mse.as_str(),
            ]
        })
        .collect();
    let mut widths = HEADERS.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |fields: [&str; 4]| -> String {
        let mut s = String::new();
        for (i, (f, w)) in fields.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(f);
            if i < 3 {
                s.extend(std::iter::repeat_n(' ', w - f.chars().count()));
            }
        }
        s.trim_end().to_string()
    };

    let n = seed_count(summary);
    let rule = "=".repeat(RULE_WIDTH);
    let mut out = String::new();
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(
        out,
        "BENCHMARK RESULTS (Mean ± Std over {n} Seed{})",
        if n == 1 { "" } else { "s" }
    );
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{}", line(HEADERS));
    for row in cells {
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(out, "{rule}");
    out
}

/// Rewrites `"m.mme±XX ± m.mme±XX"` as LaTeX math:
/// `e` becomes ` \times 10^{`, `±` becomes `} \pm `, a closing brace is
/// appended, then `+00}` collapses to `0}` and `{-0` to `{-`.
pub fn latex_sci(mse: &str) -> String {
    let s = mse.replace('e', r" \times 10^{").replace('±', r"} \pm ") + "}";
    s.replace("+00}", "0}").replace("{-0", "{-")
}

pub fn render_latex_table(summary: &[SummaryRow]) -> String {
    let rows = format_rows(summary);
    let mut out = String::new();
    out.push_str("\\begin{table}[h]\n\\centering\n\\begin{tabular}{lccc}\n\\toprule\n");
    out.push_str("Experiment & Method & Time (s) & MSE \\\\\n\\midrule\n");
    for (i, (row, src)) in rows.iter().zip(summary).enumerate() {
        let time = row.time.replace('±', "$\\pm$");
        let _ = writeln!(
            out,
            "{} & {} & {} & ${}$ \\\\",
            row.experiment,
            row.method,
            time,
            latex_sci(&row.mse)
        );
        let group_ends = summary.get(i + 1).is_none_or(|next| next.id != src.id);
        if group_ends {
            out.push_str("\\midrule\n");
        }
    }
    out.push_str("\\bottomrule\n\\end{tabular}\n");
    out.push_str(
        "\\caption{Vekua layer and SIREN baseline: wall time and test MSE, mean $\\pm$ population std over seeds.}\n",
    );
    out.push_str("\\label{tab:results}\n\\end{table}\n");
    out
}

/// Columnar plot data for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub x: Vec<f64>,
    pub truth: Vec<f64>,
    pub vekua_pred: Vec<f64>,
    pub siren_pred: Vec<f64>,
    pub noisy_sample: Option<Vec<f64>>,
}

impl PlotTable {
    pub fn from_outcome(outcome: &RunOutcome) -> Self {
        let TestLine {
            x,
            truth,
            prediction,
        } = outcome.vekua.test_line.clone();
        let siren_pred = match &outcome.siren {
            Some(s) => s.test_line.prediction.clone(),
            None => vec![f64::NAN; x.len()],
        };
        Self {
            x,
            truth,
            vekua_pred: prediction,
            siren_pred,
            noisy_sample: outcome.noisy_sample.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,truth,vekua_pred,siren_pred");
        if self.noisy_sample.is_some() {
            out.push_str(",noisy_sample");
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.x[i], self.truth[i], self.vekua_pred[i], self.siren_pred[i]
            );
            if let Some(noisy) = &self.noisy_sample {
                let _ = write!(out, ",{:.16e}", noisy[i]);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, h)| h.trim()).unwrap_or_default();
        let has_noisy = match header {
            "x,truth,vekua_pred,siren_pred" => false,
            "x,truth,vekua_pred,siren_pred,noisy_sample" => true,
            other => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("unexpected plot header '{other}'"),
                })
            }
        };
        let width = if has_noisy { 5 } else { 4 };
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); width];
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != width {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {width} fields, found {}", fields.len()),
                });
            }
            for (col, f) in cols.iter_mut().zip(fields) {
                col.push(f.trim().parse().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("'{f}': {e}"),
                })?);
            }
        }
        let noisy_sample = if has_noisy { cols.pop() } else { None };
        let siren_pred = cols.pop().unwrap_or_default();
        let vekua_pred = cols.pop().unwrap_or_default();
        let truth = cols.pop().unwrap_or_default();
        let x = cols.pop().unwrap_or_default();
        Ok(Self {
            x,
            truth,
            vekua_pred,
            siren_pred,
            noisy_sample,
        })
    }
}

pub fn plot_file_name(id: ExperimentId) -> String {
    format!("{}.csv", id.letter())
}

/// Writes `<ID>.csv` for every outcome whose seed is `viz_seed`.
pub fn export_plot_data(
    outcomes: &[RunOutcome],
    viz_seed: u32,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for outcome in outcomes.iter().filter(|o| o.vekua.seed == viz_seed) {
        let path = dir.join(plot_file_name(outcome.vekua.id));
        fs::write(&path, PlotTable::from_outcome(outcome).to_csv())?;
        written.push(path);
    }
    Ok(written)
}

/// Per-run records, one line per `(experiment, method, seed)`.
pub fn runs_to_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("experiment,method,seed,mse,wall_seconds\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e}",
            r.id.letter(),
            r.method.label(),
            r.seed,
            r.mse,
            r.wall_seconds
        );
    }
    out
}

/// Parses [`runs_to_csv`] output. Test-line data is not stored there, so the
/// returned results carry empty test lines.
pub fn runs_from_csv(text: &str) -> Result<Vec<ExperimentResult>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", f.len())));
        }
        let method = match f[1] {
            "Vekua" => Method::Vekua,
            "SIREN" => Method::Siren,
            other => return Err(err(format!("unknown method '{other}'"))),
        };
        out.push(ExperimentResult {
            id: f[0].parse().map_err(|e: Error| err(e.to_string()))?,
            method,
            seed: f[2].parse().map_err(|e| err(format!("seed: {e}")))?,
            mse: f[3].parse().map_err(|e| err(format!("mse: {e}")))?,
            wall_seconds: f[4]
                .parse()
                .map_err(|e| err(format!("wall_seconds: {e}")))?,
            test_line: TestLine {
                x: vec![],
                truth: vec![],
                prediction: vec![],
            },
        });
    }
    Ok(out)
}

/// Writes `summary.txt` and `summary.tex`.
pub fn write_summary(summary: &[SummaryRow], dir: &Path) -> Result<ReportDocument> {
    fs::create_dir_all(dir)?;
    let doc = ReportDocument::new(summary);
    fs::write(dir.join(SUMMARY_TXT), &doc.rendered_text)?;
    fs::write(dir.join(SUMMARY_TEX), &doc.rendered_latex)?;
    Ok(doc)
}
