//! Trefftz bases on the plane and the feature matrix built from them.
//!
//! Every basis function solves the governing PDE exactly:
//!
//! * Laplace (`Δu = 0`): `1, r^n cos(nθ), r^n sin(nθ)`
//! * Helmholtz (`Δu + k²u = 0`): `J_0(kr), J_n(kr) cos(nθ), J_n(kr) sin(nθ)`
//!
//! Columns are laid out as `[φ_0, φ_1^c, φ_1^s, φ_2^c, φ_2^s, ...]`. Fitted
//! coefficients index into this order, so it must not change.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::special;

/// Added to every column RMS so that scales are strictly positive.
pub const SCALE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisMode {
    Laplace,
    Helmholtz { wavenumber: f64 },
}

/// Basis family plus maximum harmonic order `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    mode: BasisMode,
    n_harmonics: usize,
}

impl BasisSpec {
    pub fn laplace(n_harmonics: usize) -> Result<Self> {
        Self::new(BasisMode::Laplace, n_harmonics)
    }

    pub fn helmholtz(n_harmonics: usize, wavenumber: f64) -> Result<Self> {
        Self::new(BasisMode::Helmholtz { wavenumber }, n_harmonics)
    }

    pub fn new(mode: BasisMode, n_harmonics: usize) -> Result<Self> {
        if n_harmonics == 0 {
            return Err(Error::Config("n_harmonics must be positive".into()));
        }
        if let BasisMode::Helmholtz { wavenumber } = mode {
            if !(wavenumber.is_finite() && wavenumber > 0.0) {
                return Err(Error::Config(format!(
                    "Helmholtz wavenumber must be finite and > 0, got {wavenumber}"
                )));
            }
        }
        Ok(Self { mode, n_harmonics })
    }

    /// Builds a spec from a mode name and an optional wavenumber, the shape in
    /// which they arrive from flags and model files.
    pub fn from_parts(mode: &str, n_harmonics: usize, wavenumber: Option<f64>) -> Result<Self> {
        match (mode, wavenumber) {
            ("laplace", None) => Self::laplace(n_harmonics),
            ("laplace", Some(k)) => Err(Error::Config(format!(
                "Laplace basis takes no wavenumber (got k = {k})"
            ))),
            ("helmholtz", Some(k)) => Self::helmholtz(n_harmonics, k),
            ("helmholtz", None) => Err(Error::Config(
                "Helmholtz basis requires a wavenumber".into(),
            )),
            (other, _) => Err(Error::Config(format!("unknown basis mode '{other}'"))),
        }
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            BasisMode::Laplace => "laplace",
            BasisMode::Helmholtz { .. } => "helmholtz",
        }
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn wavenumber(&self) -> Option<f64> {
        match self.mode {
            BasisMode::Laplace => None,
            BasisMode::Helmholtz { wavenumber } => Some(wavenumber),
        }
    }

    /// Number of basis functions, `2N + 1`.
    pub fn size(&self) -> usize {
        2 * self.n_harmonics + 1
    }
}

/// Cartesian sample locations.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoints {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SamplePoints {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension {
                what: "sample y coordinates",
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::EmptyData);
        }
        Ok(Self { x, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// Concatenates two point sets, `self` first.
    pub fn concat(&self, other: &SamplePoints) -> SamplePoints {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        x.extend_from_slice(&other.x);
        y.extend_from_slice(&other.y);
        SamplePoints { x, y }
    }
}

/// Raw basis evaluations (one row per sample point) and per-column RMS scales.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Array2<f64>,
    pub column_scales: Array1<f64>,
}

impl FeatureMatrix {
    /// Columns divided by their stored scales.
    pub fn normalized(&self) -> Array2<f64> {
        normalize_columns(&self.values, &self.column_scales)
    }
}

pub fn normalize_columns(values: &Array2<f64>, scales: &Array1<f64>) -> Array2<f64> {
    values / &scales.view().insert_axis(Axis(0))
}

/// `sqrt(mean(column²)) + SCALE_FLOOR` for every column.
pub fn column_scales(values: &Array2<f64>) -> Array1<f64> {
    let rows = values.nrows().max(1) as f64;
    values
        .columns()
        .into_iter()
        .map(|col| (col.iter().map(|v| v * v).sum::<f64>() / rows).sqrt() + SCALE_FLOOR)
        .collect()
}

/// `(r, θ)` with `θ = atan2(y, x) ∈ (-π, π]`; the origin maps to `(0, 0)`.
pub fn cartesian_to_polar(x: f64, y: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("non-finite sample point ({x}, {y})")));
    }
    let r = x.hypot(y);
    // atan2(-0.0, -1) is -π; fold signed zeros so the range stays (-π, π].
    let theta = (y + 0.0).atan2(x + 0.0);
    Ok((r, theta))
}

/// Evaluates the basis at every sample point and computes column scales.
pub fn evaluate_basis(spec: &BasisSpec, pts: &SamplePoints) -> Result<FeatureMatrix> {
    let values = basis_values(spec, pts)?;
    let column_scales = column_scales(&values);
    Ok(FeatureMatrix {
        values,
        column_scales,
    })
}

/// The raw `M × (2N+1)` basis matrix without scales.
pub fn basis_values(spec: &BasisSpec, pts: &SamplePoints) -> Result<Array2<f64>> {
    let n = spec.n_harmonics;
    let mut values = Array2::zeros((pts.len(), spec.size()));
    let mut radial = vec![0.0; n + 1];
    for (mut row, (x, y)) in values.rows_mut().into_iter().zip(pts.iter()) {
        let (r, theta) = cartesian_to_polar(x, y)?;
        match spec.mode {
            BasisMode::Laplace => {
                radial[0] = 1.0;
                for i in 1..=n {
                    radial[i] = radial[i - 1] * r;
                }
            }
            BasisMode::Helmholtz { wavenumber } => {
                special::fill_sequence(wavenumber * r, &mut radial);
            }
        }
        row[0] = radial[0];
        for i in 1..=n {
            let (s, c) = (i as f64 * theta).sin_cos();
            row[2 * i - 1] = radial[i] * c;
            row[2 * i] = radial[i] * s;
        }
    }
    Ok(values)
}
