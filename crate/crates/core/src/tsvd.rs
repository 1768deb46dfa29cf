//! Least squares through a truncated singular value decomposition.
//!
//! The SVD is computed with one-sided (Hestenes) Jacobi rotations, which
//! orthogonalise the columns of `A` directly and deliver singular values with
//! high relative accuracy. The solve then applies
//! `w = V Σ_τ⁻¹ Uᵀ b`, where only singular values with `σ_j > rcond · σ_max`
//! are inverted and the rest are dropped.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Relative spectral cutoff: `σ_j` is kept iff `σ_j > rcond · σ_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    rcond: f64,
}

impl TruncationPolicy {
    pub fn new(rcond: f64) -> Result<Self> {
        if !(rcond.is_finite() && (0.0..1.0).contains(&rcond)) {
            return Err(Error::Config(format!(
                "rcond must lie in [0, 1), got {rcond}"
            )));
        }
        Ok(Self { rcond })
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Number of leading singular values (sorted descending) that survive.
    pub fn retained(&self, singular_values: &[f64]) -> usize {
        let Some(&largest) = singular_values.first() else {
            return 0;
        };
        let cutoff = self.rcond * largest;
        singular_values
            .iter()
            .take_while(|&&s| s > cutoff && s > 0.0)
            .count()
    }
}

/// Thin SVD `A = U diag(s) Vᵀ` with `r = min(M, B)` singular triplets,
/// sorted so that `s` is non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `M × r`
    pub u: Array2<f64>,
    pub singular_values: Array1<f64>,
    /// `B × r`
    pub v: Array2<f64>,
    pub sweeps: usize,
}

impl Svd {
    /// Truncated pseudo-inverse applied to `b`, keeping the first `rank` triplets.
    pub fn solve(&self, b: ArrayView1<f64>, rank: usize) -> Array1<f64> {
        let mut w = Array1::zeros(self.v.nrows());
        for j in 0..rank {
            let coef = self.u.column(j).dot(&b) / self.singular_values[j];
            w.scaled_add(coef, &self.v.column(j));
        }
        w
    }
}

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub weights: Array1<f64>,
    pub effective_rank: usize,
    pub singular_values: Array1<f64>,
}

/// Minimum-norm solution of the truncated problem `min ‖Aw − b‖₂`.
pub fn tsvd_lstsq(
    a: &Array2<f64>,
    b: &Array1<f64>,
    policy: TruncationPolicy,
) -> Result<LstsqSolution> {
    if b.len() != a.nrows() {
        return Err(Error::Dimension {
            what: "right-hand side length",
            expected: a.nrows(),
            got: b.len(),
        });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "right-hand side has non-finite entries".into(),
        ));
    }
    let svd = svd(a)?;
    let effective_rank = policy.retained(svd.singular_values.as_slice().unwrap_or(&[]));
    let weights = svd.solve(b.view(), effective_rank);
    Ok(LstsqSolution {
        weights,
        effective_rank,
        singular_values: svd.singular_values,
    })
}

/// Thin SVD of an arbitrary `M × B` matrix.
pub fn svd(a: &Array2<f64>) -> Result<Svd> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::EmptyData);
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    if m >= n {
        let cols: Vec<Vec<f64>> = a.columns().into_iter().map(|c| c.to_vec()).collect();
        let (left, s, right, sweeps) = one_sided_jacobi(cols, m)?;
        Ok(Svd {
            u: left,
            singular_values: s,
            v: right,
            sweeps,
        })
    } else {
        // Aᵀ = U' Σ V'ᵀ  =>  A = V' Σ U'ᵀ
        let cols: Vec<Vec<f64>> = a.rows().into_iter().map(|r| r.to_vec()).collect();
        let (left, s, right, sweeps) = one_sided_jacobi(cols, n)?;
        Ok(Svd {
            u: right,
            singular_values: s,
            v: left,
            sweeps,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (p, q) = (*x, *y);
        *x = c * p - s * q;
        *y = s * p + c * q;
    }
}

/// `(U: len × k, s: k, V: k × k, sweeps)`.
type JacobiFactors = (Array2<f64>, Array1<f64>, Array2<f64>, usize);

/// Orthogonalises the `k` columns (each of length `len >= k`) in place.
/// Returns the factors sorted by descending `s`.
fn one_sided_jacobi(mut cols: Vec<Vec<f64>>, len: usize) -> Result<JacobiFactors> {
    let k = cols.len();
    let mut vcols: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = (len as f64).sqrt() * f64::EPSILON;

    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1.0f64.hypot(zeta));
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = vcols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Array2::zeros((len, k));
    let mut v = Array2::zeros((k, k));
    let mut s = Array1::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s[dst] = sigma;
        if sigma > 0.0 {
            for (i, val) in cols[src].iter().enumerate() {
                u[[i, dst]] = val / sigma;
            }
        }
        for (i, val) in vcols[src].iter().enumerate() {
            v[[i, dst]] = *val;
        }
    }
    Ok((u, s, v, sweeps))
}
