//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a run failed numerically, `2` usage or
//! output-directory errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::experiments::{
    aggregate, run_suite, ExperimentConfig, ExperimentId, SuiteResults, DEFAULT_SEEDS,
    DEFAULT_VIZ_SEED,
};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vekua",
    version,
    about = "Trefftz-basis fitting benchmark against a SIREN baseline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run experiments, print the summary table, write runs.csv and plot CSVs.
    Run(RunArgs),
    /// Re-render summary.txt / summary.tex from a previous run's runs.csv.
    Report(OutArgs),
    /// Run only the visualisation seed and write the per-experiment plot CSVs.
    Export(RunArgs),
    /// Full benchmark: run, then write summary.txt, summary.tex and plot CSVs.
    All(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "VEKUA_OUT_DIR", default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiments to run: A, B, C, D, a comma list, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_experiments)]
    pub experiment: ExperimentSelection,

    /// Seeds, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SEEDS)]
    pub seeds: Vec<u32>,

    /// Fit only the Vekua model.
    #[arg(long)]
    pub skip_siren: bool,

    /// Truncation cutoff override: `VALUE` for every experiment or `ID=VALUE`.
    /// May be repeated.
    #[arg(long, value_parser = parse_rcond)]
    pub rcond: Vec<RcondOverride>,

    /// Seed whose test-line data is exported for plotting.
    #[arg(long)]
    pub viz_seed: Option<u32>,

    /// Also save every fitted Vekua model under `<out>/models/`.
    #[arg(long)]
    pub save_models: bool,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSelection(pub Vec<ExperimentId>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcondOverride {
    pub id: Option<ExperimentId>,
    pub rcond: f64,
}

fn parse_experiments(s: &str) -> Result<ExperimentSelection, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(ExperimentSelection(ExperimentId::ALL.to_vec()));
    }
    let mut ids = Vec::new();
    for part in s.split(',') {
        let id: ExperimentId = part.parse().map_err(|e: crate::Error| e.to_string())?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.sort();
    Ok(ExperimentSelection(ids))
}

fn parse_rcond(s: &str) -> Result<RcondOverride, String> {
    let (id, value) = match s.split_once('=') {
        Some((id, v)) => (
            Some(id.parse().map_err(|e: crate::Error| e.to_string())?),
            v,
        ),
        None => (None, s),
    };
    let rcond: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("invalid rcond '{value}': {e}"))?;
    if !(rcond.is_finite() && (0.0..1.0).contains(&rcond)) {
        return Err(format!("rcond must lie in [0, 1), got {rcond}"));
    }
    Ok(RcondOverride { id, rcond })
}

impl RunArgs {
    /// Experiment configurations after applying flag overrides.
    pub fn configs(&self) -> Vec<ExperimentConfig> {
        self.experiment
            .0
            .iter()
            .map(|&id| {
                let mut c = ExperimentConfig::default_for(id);
                c.seeds = self.seeds.clone();
                // later flags win; an ID-specific value beats a global one
                for o in self.rcond.iter().filter(|o| o.id.is_none()) {
                    c.rcond = o.rcond;
                }
                for o in self.rcond.iter().filter(|o| o.id == Some(id)) {
                    c.rcond = o.rcond;
                }
                c
            })
            .collect()
    }

    /// The visualisation seed, or a usage error if it conflicts with `--seeds`.
    pub fn resolve_viz_seed(&self) -> Result<u32, String> {
        match self.viz_seed {
            Some(v) if self.seeds.contains(&v) => Ok(v),
            Some(v) => Err(format!(
                "--viz-seed {v} is not among --seeds {:?}",
                self.seeds
            )),
            None if self.seeds.contains(&DEFAULT_VIZ_SEED) => Ok(DEFAULT_VIZ_SEED),
            None => self
                .seeds
                .first()
                .copied()
                .ok_or_else(|| "at least one seed is required".to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn output_error(dir: &Path, e: impl std::fmt::Display) -> CliError {
    usage(format!(
        "cannot write to output directory '{}': {e}",
        dir.display()
    ))
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Run(args) => run_like(args, out, false, false),
        Command::All(args) => run_like(args, out, true, false),
        Command::Export(args) => run_like(args, out, false, true),
        Command::Report(args) => report_from_runs(&args.out, out),
    }
}

fn run_like(
    args: &RunArgs,
    out: &mut dyn Write,
    write_summary: bool,
    viz_only: bool,
) -> Result<i32, CliError> {
    if args.seeds.is_empty() {
        return Err(usage("at least one seed is required"));
    }
    let viz_seed = args.resolve_viz_seed().map_err(usage)?;
    let dir = &args.out.out;
    prepare_out_dir(dir)?;

    let mut configs = args.configs();
    if viz_only {
        for c in &mut configs {
            c.seeds = vec![viz_seed];
        }
    }
    let suite = run_suite(&configs, !args.skip_siren);
    let results = suite.results();
    let summary = aggregate(&results);

    let _ = write!(out, "{}", report::render_text_table(&summary));
    if write_summary {
        let doc = report::write_summary(&summary, dir).map_err(|e| output_error(dir, e))?;
        let _ = write!(out, "\n{}", doc.rendered_latex);
    }
    if !viz_only {
        fs::write(dir.join(report::RUNS_CSV), report::runs_to_csv(&results))
            .map_err(|e| output_error(dir, e))?;
    }
    let written = report::export_plot_data(&suite.outcomes, viz_seed, dir)
        .map_err(|e| output_error(dir, e))?;
    for path in written {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    if args.save_models {
        save_models(&suite, dir)?;
    }

    if suite.failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        let list: Vec<String> = suite
            .failures
            .iter()
            .map(|f| format!("experiment {} seed {}: {}", f.id, f.seed, f.message))
            .collect();
        Err(CliError {
            code: EXIT_FAILURE,
            message: format!("{} run(s) failed:\n  {}", list.len(), list.join("\n  ")),
        })
    }
}

fn save_models(suite: &SuiteResults, dir: &Path) -> Result<(), CliError> {
    let models = dir.join("models");
    fs::create_dir_all(&models).map_err(|e| output_error(&models, e))?;
    for o in &suite.outcomes {
        let path = models.join(format!("{}-{}.model", o.vekua.id, o.vekua.seed));
        fs::write(&path, o.vekua_model.to_text()).map_err(|e| output_error(&models, e))?;
    }
    Ok(())
}

fn report_from_runs(dir: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let path = dir.join(report::RUNS_CSV);
    let text = fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read '{}': {e}", path.display())))?;
    let results =
        report::runs_from_csv(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let summary = aggregate(&results);
    let doc = report::write_summary(&summary, dir).map_err(|e| output_error(dir, e))?;
    let _ = write!(out, "{}\n{}", doc.rendered_text, doc.rendered_latex);
    Ok(EXIT_OK)
}
