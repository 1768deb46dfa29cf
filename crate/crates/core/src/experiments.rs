//! The four benchmark tasks and the seed loop around them.
//!
//! | id | target                          | basis               | train                      | test                    |
//! |----|---------------------------------|---------------------|----------------------------|-------------------------|
//! | A  | `J_0(20 r)`                     | Helmholtz k=20, N=5 | 200 on the unit circle     | 100 on y=0, x∈[-.9,.9]  |
//! | B  | `x² − y²`                       | Laplace N=2         | edges y=1 and x=1 (100+100)| edges y=-1 and x=-1     |
//! | C  | `J_0(15 r)` + N(0, 0.2²) noise  | Helmholtz k=15, N=8 | 300 on the unit circle     | 100 on y=0              |
//! | D  | 30 random Bessel modes, k=10    | Helmholtz k=10, N=15| 500 on the unit circle     | 200 on y=0              |
//!
//! Circle samples use `θ = linspace(0, 2π, n)`, so the first and last points
//! coincide. All randomness comes from [`LegacyRng`] seeded with the run seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basis::{cartesian_to_polar, BasisSpec, SamplePoints};
use crate::error::{Error, Result};
use crate::model::{self, mse, FittedModel};
use crate::rng::LegacyRng;
use crate::siren::{siren_train, SirenConfig, SirenNetwork};
use crate::special;
use crate::tsvd::TruncationPolicy;

pub const DEFAULT_SEEDS: [u32; 3] = [42, 43, 44];
pub const DEFAULT_VIZ_SEED: u32 = 42;
/// Experiment B plots only the leading points of the first hidden edge.
pub const B_PLOT_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentId {
    A,
    B,
    C,
    D,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [Self::A, Self::B, Self::C, Self::D];

    /// Table label, e.g. `"A: Helmholtz"`.
    pub fn name(self) -> &'static str {
        match self {
            Self::A => "A: Helmholtz",
            Self::B => "B: Holography",
            Self::C => "C: Robustness",
            Self::D => "D: Chaos",
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            _ => Err(Error::Config(format!(
                "unknown experiment id '{s}' (expected A, B, C or D)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Vekua,
    Siren,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Vekua => "Vekua",
            Method::Siren => "SIREN",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub seeds: Vec<u32>,
    /// `None` selects the Laplace basis.
    pub wavenumber: Option<f64>,
    pub n_harmonics: usize,
    /// Training points (per edge for experiment B).
    pub n_train: usize,
    /// Test points (per edge for experiment B).
    pub n_test: usize,
    pub noise_sigma: f64,
    pub rcond: f64,
    pub siren_steps: usize,
    /// Number of random modes in the chaotic target (experiment D only).
    pub n_modes: usize,
}

impl ExperimentConfig {
    pub fn default_for(id: ExperimentId) -> Self {
        let base = Self {
            id,
            seeds: DEFAULT_SEEDS.to_vec(),
            wavenumber: None,
            n_harmonics: 1,
            n_train: 0,
            n_test: 100,
            noise_sigma: 0.0,
            rcond: 1e-14,
            siren_steps: 3000,
            n_modes: 0,
        };
        match id {
            ExperimentId::A => Self {
                wavenumber: Some(20.0),
                n_harmonics: 5,
                n_train: 200,
                ..base
            },
            ExperimentId::B => Self {
                n_harmonics: 2,
                n_train: 100,
                ..base
            },
            ExperimentId::C => Self {
                wavenumber: Some(15.0),
                n_harmonics: 8,
                n_train: 300,
                noise_sigma: 0.2,
                rcond: 1e-2,
                ..base
            },
            ExperimentId::D => Self {
                wavenumber: Some(10.0),
                n_harmonics: 15,
                n_train: 500,
                n_test: 200,
                siren_steps: 4000,
                n_modes: 30,
                ..base
            },
        }
    }

    pub fn basis_spec(&self) -> Result<BasisSpec> {
        match self.wavenumber {
            Some(k) => BasisSpec::helmholtz(self.n_harmonics, k),
            None => BasisSpec::laplace(self.n_harmonics),
        }
    }

    pub fn policy(&self) -> Result<TruncationPolicy> {
        TruncationPolicy::new(self.rcond)
    }

    pub fn validate(&self) -> Result<()> {
        self.basis_spec()?;
        self.policy()?;
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise sigma must be finite and >= 0".into()));
        }
        let needs_k = matches!(self.id, ExperimentId::A | ExperimentId::C | ExperimentId::D);
        if needs_k != self.wavenumber.is_some() {
            return Err(Error::Config(format!(
                "experiment {} {} a wavenumber",
                self.id,
                if needs_k { "requires" } else { "takes no" }
            )));
        }
        Ok(())
    }
}

/// Values along the plotted test line.
#[derive(Debug, Clone, PartialEq)]
pub struct TestLine {
    pub x: Vec<f64>,
    pub truth: Vec<f64>,
    pub prediction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub id: ExperimentId,
    pub method: Method,
    pub seed: u32,
    pub mse: f64,
    pub wall_seconds: f64,
    pub test_line: TestLine,
}

/// Everything one `(experiment, seed)` run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub vekua: ExperimentResult,
    pub vekua_model: FittedModel,
    pub siren: Option<ExperimentResult>,
    /// Noisy samples of the truth along the test line (experiment C only).
    pub noisy_sample: Option<Vec<f64>>,
}

/// Training and test data for one run.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: SamplePoints,
    pub train_values: Vec<f64>,
    pub test: SamplePoints,
    pub test_values: Vec<f64>,
    /// How many leading test points make up the plotted line.
    pub plot_len: usize,
    pub noisy_sample: Option<Vec<f64>>,
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
            v[n - 1] = stop;
            v
        }
    }
}

/// `n` points `(cos θ, sin θ)` with `θ = linspace(0, 2π, n)`.
pub fn unit_circle(n: usize) -> SamplePoints {
    let theta = linspace(0.0, 2.0 * PI, n);
    let (x, y) = theta.iter().map(|t| (t.cos(), t.sin())).unzip();
    SamplePoints::new(x, y).expect("non-empty circle")
}

/// `n` points on the chord `y = 0`, `x ∈ [-0.9, 0.9]`.
pub fn interior_chord(n: usize) -> SamplePoints {
    SamplePoints::new(linspace(-0.9, 0.9, n), vec![0.0; n]).expect("non-empty chord")
}

/// `J_0(k r)` at every point.
pub fn target_helmholtz_monopole(k: f64, pts: &SamplePoints) -> Result<Vec<f64>> {
    pts.iter()
        .map(|(x, y)| special::bessel_j(0, k * x.hypot(y)))
        .collect()
}

/// `x² − y²` at every point.
pub fn target_saddle(pts: &SamplePoints) -> Vec<f64> {
    pts.iter().map(|(x, y)| x * x - y * y).collect()
}

/// `u(r, θ) = Σ_n c_n J_n(k r) cos(nθ + φ_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaoticField {
    pub wavenumber: f64,
    pub coefficients: Vec<f64>,
    pub phases: Vec<f64>,
}

impl ChaoticField {
    /// Draws `n_modes` standard-normal coefficients, then `n_modes` phases
    /// uniform on `[0, 2π)`, from one stream seeded with `seed`.
    pub fn from_seed(wavenumber: f64, seed: u32, n_modes: usize) -> Self {
        let mut rng = LegacyRng::new(seed);
        let coefficients = rng.standard_normal_vec(n_modes);
        let phases = rng
            .uniform_vec(n_modes)
            .into_iter()
            .map(|p| p * 2.0 * PI)
            .collect();
        Self {
            wavenumber,
            coefficients,
            phases,
        }
    }

    pub fn evaluate(&self, pts: &SamplePoints) -> Result<Vec<f64>> {
        let n_modes = self.coefficients.len();
        if self.phases.len() != n_modes {
            return Err(Error::Dimension {
                what: "chaotic field phases",
                expected: n_modes,
                got: self.phases.len(),
            });
        }
        if n_modes == 0 {
            return Ok(vec![0.0; pts.len()]);
        }
        let mut radial = vec![0.0; n_modes];
        pts.iter()
            .map(|(x, y)| {
                let (r, theta) = cartesian_to_polar(x, y)?;
                let arg = self.wavenumber * r;
                if !(arg.is_finite() && arg >= 0.0) {
                    return Err(Error::Domain(format!("invalid Bessel argument {arg}")));
                }
                special::fill_sequence(arg, &mut radial);
                let u = radial
                    .iter()
                    .zip(&self.coefficients)
                    .zip(&self.phases)
                    .enumerate()
                    .map(|(n, ((j, c), phase))| c * j * (n as f64 * theta + phase).cos())
                    .sum();
                Ok(u)
            })
            .collect()
    }
}

/// The chaotic target for `seed` with the default 30 modes.
pub fn target_chaotic(k: f64, seed: u32, pts: &SamplePoints) -> Result<Vec<f64>> {
    ChaoticField::from_seed(k, seed, 30).evaluate(pts)
}

/// `u + σ z` with `z` i.i.d. standard normal from a stream seeded by `seed`.
pub fn add_noise(u: &[f64], sigma: f64, seed: u32) -> Vec<f64> {
    add_noise_from(u, sigma, &mut LegacyRng::new(seed))
}

pub fn add_noise_from(u: &[f64], sigma: f64, rng: &mut LegacyRng) -> Vec<f64> {
    u.iter()
        .map(|&v| v + rng.standard_normal() * sigma)
        .collect()
}

/// Builds the train/test data for `config` and `seed`.
pub fn build_dataset(config: &ExperimentConfig, seed: u32) -> Result<Dataset> {
    config.validate()?;
    let k = config.wavenumber.unwrap_or(0.0);
    match config.id {
        ExperimentId::A => {
            let train = unit_circle(config.n_train);
            let test = interior_chord(config.n_test);
            Ok(Dataset {
                train_values: target_helmholtz_monopole(k, &train)?,
                test_values: target_helmholtz_monopole(k, &test)?,
                plot_len: test.len(),
                train,
                test,
                noisy_sample: None,
            })
        }
        ExperimentId::B => {
            let line = linspace(-1.0, 1.0, config.n_train);
            let ones = vec![1.0; config.n_train];
            let top = SamplePoints::new(line.clone(), ones.clone())?;
            let right = SamplePoints::new(ones, line)?;
            let train = top.concat(&right);

            let line = linspace(-1.0, 1.0, config.n_test);
            let neg = vec![-1.0; config.n_test];
            let bottom = SamplePoints::new(line.clone(), neg.clone())?;
            let left = SamplePoints::new(neg, line)?;
            let test = bottom.concat(&left);
            Ok(Dataset {
                train_values: target_saddle(&train),
                test_values: target_saddle(&test),
                plot_len: config.n_test.min(B_PLOT_POINTS),
                train,
                test,
                noisy_sample: None,
            })
        }
        ExperimentId::C => {
            let train = unit_circle(config.n_train);
            let test = interior_chord(config.n_test);
            let clean = target_helmholtz_monopole(k, &train)?;
            let mut rng = LegacyRng::new(seed);
            let train_values = add_noise_from(&clean, config.noise_sigma, &mut rng);
            let test_values = target_helmholtz_monopole(k, &test)?;
            let noisy_sample = Some(add_noise_from(&test_values, config.noise_sigma, &mut rng));
            Ok(Dataset {
                train_values,
                plot_len: test.len(),
                test_values,
                train,
                test,
                noisy_sample,
            })
        }
        ExperimentId::D => {
            let field = ChaoticField::from_seed(k, seed, config.n_modes);
            let train = unit_circle(config.n_train);
            let test = interior_chord(config.n_test);
            Ok(Dataset {
                train_values: field.evaluate(&train)?,
                test_values: field.evaluate(&test)?,
                plot_len: test.len(),
                train,
                test,
                noisy_sample: None,
            })
        }
    }
}

fn test_line(data: &Dataset, prediction: &[f64]) -> TestLine {
    let n = data.plot_len;
    TestLine {
        x: data.test.x()[..n].to_vec(),
        truth: data.test_values[..n].to_vec(),
        prediction: prediction[..n].to_vec(),
    }
}

/// Fits the Vekua model for one run.
pub fn run_vekua(
    config: &ExperimentConfig,
    seed: u32,
    data: &Dataset,
) -> Result<(ExperimentResult, FittedModel)> {
    let model = model::fit(
        &config.basis_spec()?,
        &data.train,
        &data.train_values,
        config.policy()?,
    )?;
    let pred = model.predict(&data.test)?;
    let pred = pred.as_slice().expect("contiguous prediction");
    let result = ExperimentResult {
        id: config.id,
        method: Method::Vekua,
        seed,
        mse: mse(pred, &data.test_values),
        wall_seconds: model.fit_seconds(),
        test_line: test_line(data, pred),
    };
    Ok((result, model))
}

/// Trains the SIREN baseline for one run.
pub fn run_siren(config: &ExperimentConfig, seed: u32, data: &Dataset) -> Result<ExperimentResult> {
    let siren_config = SirenConfig {
        steps: config.siren_steps,
        seed,
        ..SirenConfig::default()
    };
    let net = SirenNetwork::init(&siren_config)?;
    let (net, seconds) = siren_train(net, &siren_config, &data.train, &data.train_values)?;
    let pred = net.predict(&data.test);
    let pred = pred.as_slice().expect("contiguous prediction");
    Ok(ExperimentResult {
        id: config.id,
        method: Method::Siren,
        seed,
        mse: mse(pred, &data.test_values),
        wall_seconds: seconds,
        test_line: test_line(data, pred),
    })
}

/// Runs both methods (SIREN only when `include_siren`) for one seed.
pub fn run_experiment(
    config: &ExperimentConfig,
    seed: u32,
    include_siren: bool,
) -> Result<RunOutcome> {
    let data = build_dataset(config, seed)?;
    let (vekua, vekua_model) = run_vekua(config, seed, &data)?;
    let siren = if include_siren {
        Some(run_siren(config, seed, &data)?)
    } else {
        None
    };
    Ok(RunOutcome {
        vekua,
        vekua_model,
        siren,
        noisy_sample: data.noisy_sample,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub id: ExperimentId,
    pub seed: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResults {
    /// Sorted by experiment id, then seed.
    pub outcomes: Vec<RunOutcome>,
    pub failures: Vec<RunFailure>,
}

impl SuiteResults {
    /// All per-method results in table order.
    pub fn results(&self) -> Vec<ExperimentResult> {
        let mut out = Vec::new();
        for o in &self.outcomes {
            out.push(o.vekua.clone());
            if let Some(s) = &o.siren {
                out.push(s.clone());
            }
        }
        out
    }

    pub fn outcome(&self, id: ExperimentId, seed: u32) -> Option<&RunOutcome> {
        self.outcomes
            .iter()
            .find(|o| o.vekua.id == id && o.vekua.seed == seed)
    }
}

/// Runs every `(config, seed)` pair in parallel. A failing run is recorded
/// and does not stop the others.
pub fn run_suite(configs: &[ExperimentConfig], include_siren: bool) -> SuiteResults {
    let jobs: Vec<(&ExperimentConfig, u32)> = configs
        .iter()
        .flat_map(|c| c.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let mut done: Vec<(ExperimentId, u32, Result<RunOutcome>)> = jobs
        .par_iter()
        .map(|&(config, seed)| (config.id, seed, run_experiment(config, seed, include_siren)))
        .collect();
    done.sort_by_key(|(id, seed, _)| (*id, *seed));

    let mut suite = SuiteResults::default();
    for (id, seed, res) in done {
        match res {
            Ok(o) => suite.outcomes.push(o),
            Err(e) => suite.failures.push(RunFailure {
                id,
                seed,
                message: e.to_string(),
            }),
        }
    }
    suite
}

/// Mean and population standard deviation of time and MSE for one
/// `(experiment, method)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub id: ExperimentId,
    pub method: Method,
    pub runs: usize,
    pub time_mean: f64,
    pub time_std: f64,
    pub mse_mean: f64,
    pub mse_std: f64,
}

/// `(mean, population std)`; `(0, 0)` for an empty slice.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups results by experiment and method, Vekua before SIREN.
pub fn aggregate(results: &[ExperimentResult]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for id in ExperimentId::ALL {
        for method in [Method::Vekua, Method::Siren] {
            let group: Vec<&ExperimentResult> = results
                .iter()
                .filter(|r| r.id == id && r.method == method)
                .collect();
            if group.is_empty() {
                continue;
            }
            let times: Vec<f64> = group.iter().map(|r| r.wall_seconds).collect();
            let mses: Vec<f64> = group.iter().map(|r| r.mse).collect();
            let (time_mean, time_std) = mean_std(&times);
            let (mse_mean, mse_std) = mean_std(&mses);
            rows.push(SummaryRow {
                id,
                method,
                runs: group.len(),
                time_mean,
                time_std,
                mse_mean,
                mse_std,
            });
        }
    }
    rows
}
