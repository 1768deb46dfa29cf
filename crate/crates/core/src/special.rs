//! Bessel functions of the first kind, `J_n(x)`, for integer `n >= 0` and
//! real `x >= 0`.
//!
//! Two regimes:
//!
//! * `x <= 2`: the ascending series
//!   `J_n(x) = sum_m (-1)^m (x/2)^(2m+n) / (m! (m+n)!)`. The ratio of
//!   successive terms is at most `(x/2)^2 <= 1`, so there is no cancellation.
//! * `x > 2`: Miller's backward recurrence
//!   `J_{k-1} = (2k/x) J_k - J_{k+1}` started from an order well above
//!   `max(n, x)`, normalised with `J_0 + 2 * sum_m J_{2m} = 1`. Downward
//!   recurrence is stable for the minimal solution, so every order comes out
//!   with small relative error, and the normalisation sum has terms bounded by
//!   one, so values near zeros of `J_n` carry only a few ulp of absolute error.
//!
//! The starting order depends on `max(n, x)` only through a coarse bucket, so
//! the scalar routine and the sequence routine run the identical recurrence
//! for all orders up to about 60 and return bitwise-equal values.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 2.0;
const MIN_START_ORDER: usize = 128;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_n(x)`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let n = check_order(n)?;
    check_argument(x)?;
    if x <= SERIES_LIMIT {
        return Ok(series(n, x));
    }
    let mut out = vec![0.0; n + 1];
    miller(x, &mut out);
    Ok(out[n])
}

/// `[J_0(x), J_1(x), ..., J_{n_max}(x)]` from a single recurrence pass.
pub fn bessel_j_sequence(n_max: i32, x: f64) -> Result<Vec<f64>> {
    let n_max = check_order(n_max)?;
    check_argument(x)?;
    let mut out = vec![0.0; n_max + 1];
    fill_sequence(x, &mut out);
    Ok(out)
}

/// Fills `out[i] = J_i(x)` for `i < out.len()`. The caller guarantees
/// `x` is finite and non-negative.
pub(crate) fn fill_sequence(x: f64, out: &mut [f64]) {
    debug_assert!(x.is_finite() && x >= 0.0);
    if out.is_empty() {
        return;
    }
    if x <= SERIES_LIMIT {
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = series(n, x);
        }
    } else {
        miller(x, out);
    }
}

fn check_order(n: i32) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::Domain(format!("Bessel order must be >= 0, got {n}")))
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 1usize;
    loop {
        term *= q / (m * (m + n)) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        m += 1;
    }
    sum
}

/// Even starting order for the backward recurrence.
fn start_order(n_eff: usize) -> usize {
    let margin = (40.0 * n_eff as f64).sqrt().ceil() as usize;
    let base = n_eff + margin + 20;
    let bucketed = base.div_ceil(64) * 64;
    bucketed.max(MIN_START_ORDER)
}

fn miller(x: f64, out: &mut [f64]) {
    let n_max = out.len() - 1;
    let n_eff = n_max.max(x.ceil() as usize);
    let start = start_order(n_eff);
    let two_over_x = 2.0 / x;

    // J_{start+1} = 0, J_start = 1 (arbitrary scale).
    let mut above = 0.0f64;
    let mut current = 1.0f64;
    let mut norm = 0.0f64;
    for slot in out.iter_mut() {
        *slot = 0.0;
    }
    if start <= n_max {
        out[start] = current;
    }

    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order <= n_max {
            out[order] = current;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    norm += current;

    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
}
