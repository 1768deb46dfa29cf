//! The fitted Trefftz expansion: fit coefficients from scattered samples by a
//! truncated-SVD projection, then evaluate the field anywhere.
//!
//! Coefficients refer to the column-normalised basis `φ_j / scale_j`, with
//! the scales frozen from the training points.
//!
//! # Model file format
//!
//! Plain UTF-8 text, one `key = value` pair per line after a version header.
//! Blank lines and lines starting with `#` are ignored. Arrays are
//! comma-separated and every number is written with 17 significant digits so
//! that a saved model reloads bit-for-bit.
//!
//! ```text
//! vekua-model 1
//! mode = helmholtz
//! n_harmonics = 2
//! wavenumber = 2.0000000000000000e1
//! scales = 3.1e-1, ...
//! weights = 1.2e0, ...
//! ```
//!
//! `wavenumber` is present exactly when `mode = helmholtz`. `scales` and
//! `weights` both hold `2 * n_harmonics + 1` values.

use std::fmt::Write as _;
use std::time::Instant;

use ndarray::{Array1, Axis};

use crate::basis::{self, BasisSpec, SamplePoints};
use crate::error::{Error, Result};
use crate::tsvd::{self, TruncationPolicy};

pub const MODEL_FORMAT_HEADER: &str = "vekua-model 1";

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    spec: BasisSpec,
    column_scales: Array1<f64>,
    weights: Array1<f64>,
    effective_rank: usize,
    fit_seconds: f64,
}

impl FittedModel {
    /// Reassembles a model from stored parts.
    pub fn from_parts(spec: BasisSpec, column_scales: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let b = spec.size();
        for (what, len) in [
            ("column scales", column_scales.len()),
            ("weights", weights.len()),
        ] {
            if len != b {
                return Err(Error::Dimension {
                    what,
                    expected: b,
                    got: len,
                });
            }
        }
        if column_scales.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::Domain(
                "column scales must be finite and positive".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("weights must be finite".into()));
        }
        Ok(Self {
            spec,
            column_scales: Array1::from(column_scales),
            weights: Array1::from(weights),
            effective_rank: b,
            fit_seconds: 0.0,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn column_scales(&self) -> &Array1<f64> {
        &self.column_scales
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    /// Retained singular values at fit time. Reloaded models report the full
    /// basis size.
    pub fn effective_rank(&self) -> usize {
        self.effective_rank
    }

    /// Wall-clock seconds spent assembling the basis and solving.
    pub fn fit_seconds(&self) -> f64 {
        self.fit_seconds
    }

    /// `(Φ(pts) / scales) · w`.
    pub fn predict(&self, pts: &SamplePoints) -> Result<Array1<f64>> {
        let raw = basis::basis_values(&self.spec, pts)?;
        let scaled_w = &self.weights / &self.column_scales;
        Ok(raw.dot(&scaled_w))
    }

    /// Serialises to the model file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_FORMAT_HEADER}");
        let _ = writeln!(out, "mode = {}", self.spec.mode_name());
        let _ = writeln!(out, "n_harmonics = {}", self.spec.n_harmonics());
        if let Some(k) = self.spec.wavenumber() {
            let _ = writeln!(out, "wavenumber = {}", fmt_f64(k));
        }
        let _ = writeln!(out, "scales = {}", join(&self.column_scales));
        let _ = writeln!(out, "weights = {}", join(&self.weights));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, MODEL_FORMAT_HEADER)) => {}
            Some((line, other)) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected header '{MODEL_FORMAT_HEADER}', found '{other}'"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    msg: "empty model file".into(),
                })
            }
        }

        let mut mode = None;
        let mut n_harmonics = None;
        let mut wavenumber = None;
        let mut scales = None;
        let mut weights = None;
        for (line, content) in lines {
            let parse_err = |msg: String| Error::Parse { line, msg };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected 'key = value', found '{content}'")))?;
            let value = value.trim();
            match key.trim() {
                "mode" => mode = Some(value.to_string()),
                "n_harmonics" => {
                    n_harmonics = Some(
                        value
                            .parse::<usize>()
                            .map_err(|e| parse_err(format!("n_harmonics: {e}")))?,
                    )
                }
                "wavenumber" => {
                    wavenumber = Some(
                        value
                            .parse::<f64>()
                            .map_err(|e| parse_err(format!("wavenumber: {e}")))?,
                    )
                }
                "scales" => scales = Some(parse_list(value).map_err(parse_err)?),
                "weights" => weights = Some(parse_list(value).map_err(parse_err)?),
                other => return Err(parse_err(format!("unknown key '{other}'"))),
            }
        }
        let missing = |key: &str| Error::Parse {
            line: 0,
            msg: format!("missing key '{key}'"),
        };
        let mode = mode.ok_or_else(|| missing("mode"))?;
        let n = n_harmonics.ok_or_else(|| missing("n_harmonics"))?;
        let spec = BasisSpec::from_parts(&mode, n, wavenumber)?;
        Self::from_parts(
            spec,
            scales.ok_or_else(|| missing("scales"))?,
            weights.ok_or_else(|| missing("weights"))?,
        )
    }
}

/// Fits the expansion to samples `u` observed at `pts`.
pub fn fit(
    spec: &BasisSpec,
    pts: &SamplePoints,
    u: &[f64],
    policy: TruncationPolicy,
) -> Result<FittedModel> {
    if pts.is_empty() || u.is_empty() {
        return Err(Error::EmptyData);
    }
    if u.len() != pts.len() {
        return Err(Error::Dimension {
            what: "observation count",
            expected: pts.len(),
            got: u.len(),
        });
    }
    let rhs = Array1::from(u.to_vec());

    let start = Instant::now();
    let features = basis::evaluate_basis(spec, pts)?;
    let normalized = features.normalized();
    let solution = tsvd::tsvd_lstsq(&normalized, &rhs, policy)?;
    let fit_seconds = start.elapsed().as_secs_f64();

    Ok(FittedModel {
        spec: *spec,
        column_scales: features.column_scales,
        weights: solution.weights,
        effective_rank: solution.effective_rank,
        fit_seconds,
    })
}

/// Mean squared error between two equal-length series.
pub fn mse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "mse of unequal-length series");
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Training-set MSE of arbitrary normalised-basis weights; used to probe the
/// optimality of a fit.
pub fn training_mse(
    model: &FittedModel,
    weights: &Array1<f64>,
    pts: &SamplePoints,
    u: &[f64],
) -> Result<f64> {
    let raw = basis::basis_values(model.spec(), pts)?;
    let normalized = raw / model.column_scales.view().insert_axis(Axis(0));
    let pred = normalized.dot(weights);
    Ok(mse(pred.as_slice().expect("contiguous"), u))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: &Array1<f64>) -> String {
    values
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("'{}': {e}", s.trim()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(1e-14).unwrap()
    }

    fn scattered(n: usize) -> SamplePoints {
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = i as f64 * 0.9 + 0.3;
                (
                    0.8 * t.cos() * (1.0 - 0.03 * i as f64),
                    0.7 * (1.7 * t).sin(),
                )
            })
            .collect();
        SamplePoints::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn saddle_is_reproduced_exactly() {
        let spec = BasisSpec::laplace(2).unwrap();
        let pts = scattered(8);
        let u: Vec<f64> = pts.iter().map(|(x, y)| x * x - y * y).collect();
        let model = fit(&spec, &pts, &u, policy()).unwrap();
        let probe =
            SamplePoints::from_pairs(&[(0.1, 0.2), (-0.5, 0.3), (0.0, 0.0), (0.4, -0.6)]).unwrap();
        let pred = model.predict(&probe).unwrap();
        for ((x, y), p) in probe.iter().zip(pred.iter()) {
            assert!((p - (x * x - y * y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_field() {
        let spec = BasisSpec::laplace(1).unwrap();
        let pts = scattered(12);
        let c = -3.25;
        let u = vec![c; pts.len()];
        let model = fit(&spec, &pts, &u, policy()).unwrap();
        // only the constant column carries weight
        assert!((model.weights()[0] / model.column_scales()[0] - c).abs() < 1e-14);
        for p in model.predict(&pts).unwrap() {
            assert!((p - c).abs() <= 1e-14);
        }
    }

    #[test]
    fn helmholtz_prediction_at_origin_uses_only_j0() {
        let spec = BasisSpec::helmholtz(4, 7.0).unwrap();
        let pts = scattered(40);
        let u: Vec<f64> = pts.iter().map(|(x, y)| (x - 0.3 * y).sin()).collect();
        let model = fit(&spec, &pts, &u, policy()).unwrap();
        let origin = SamplePoints::new(vec![0.0], vec![0.0]).unwrap();
        let p = model.predict(&origin).unwrap()[0];
        assert_eq!(p, model.weights()[0] / model.column_scales()[0]);
    }

    #[test]
    fn fit_errors() {
        let spec = BasisSpec::laplace(2).unwrap();
        let pts = scattered(5);
        assert!(matches!(
            fit(&spec, &pts, &[1.0, 2.0], policy()),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            fit(&spec, &pts, &[], policy()),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let spec = BasisSpec::helmholtz(3, 20.0).unwrap();
        let pts = scattered(30);
        let u: Vec<f64> = pts.iter().map(|(x, y)| (3.0 * x).cos() * y).collect();
        let model = fit(&spec, &pts, &u, policy()).unwrap();
        let text = model.to_text();
        assert!(text.starts_with(MODEL_FORMAT_HEADER));
        let back = FittedModel::from_text(&text).unwrap();
        assert_eq!(back.spec(), model.spec());
        assert_eq!(back.weights(), model.weights());
        assert_eq!(back.column_scales(), model.column_scales());
        assert_eq!(back.predict(&pts).unwrap(), model.predict(&pts).unwrap());
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(
            FittedModel::from_text(""),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            FittedModel::from_text("vekua-model 2\nmode = laplace"),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "vekua-model 1\nmode = laplace\nn_harmonics = 1\nwavenumber = 3\nscales = 1,1,1\nweights = 0,0,0\n";
        assert!(matches!(
            FittedModel::from_text(text),
            Err(Error::Config(_))
        ));
        let text =
            "vekua-model 1\nmode = laplace\nn_harmonics = 1\nscales = 1,1\nweights = 0,0,0\n";
        assert!(matches!(
            FittedModel::from_text(text),
            Err(Error::Dimension { .. })
        ));
        let text =
            "vekua-model 1\nmode = laplace\nn_harmonics = 1\nscales = 1,x,1\nweights = 0,0,0\n";
        assert!(matches!(
            FittedModel::from_text(text),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
