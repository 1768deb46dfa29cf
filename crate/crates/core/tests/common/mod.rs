//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numerical kernels: each oracle is a
//! deliberately simple (and slow) method whose correctness is easy to audit.

#![allow(dead_code)]

use ndarray::{Array1, Array2};

/// Double-double number: `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        self.mul(Dd::from(b))
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = ((self.hi - p) - e + self.lo) / b;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }
}

/// J_n(x) by direct power-series summation in double-double arithmetic,
/// continued until the terms no longer change the sum.
pub fn bessel_series_dd(n: u32, x: f64) -> Dd {
    let half = x / 2.0; // exact
    let mut term = Dd::from(1.0);
    for j in 1..=n {
        term = term.mul_f64(half).div_f64(j as f64);
    }
    if x == 0.0 {
        return if n == 0 { Dd::from(1.0) } else { Dd::ZERO };
    }
    let q = Dd::from(half).mul_f64(half).neg();
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term = term.mul(q).div_f64(m as f64).div_f64((m + n) as f64);
        sum = sum.add(term);
        // terms decrease monotonically once m exceeds x/2
        if (m as f64) > half && term.abs().hi <= 1e-40 * sum.abs().hi.max(1e-300) {
            break;
        }
        if term.hi == 0.0 {
            break;
        }
    }
    sum
}

pub fn bessel_oracle(n: u32, x: f64) -> f64 {
    bessel_series_dd(n, x).to_f64()
}

/// First positive zero of J0, by bisection on the series oracle.
pub fn first_zero_j0() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    assert!(bessel_oracle(0, lo) > 0.0 && bessel_oracle(0, hi) < 0.0);
    while hi - lo > 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_oracle(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if bessel_oracle(0, lo).abs() <= bessel_oracle(0, hi).abs() {
        lo
    } else {
        hi
    }
}

/// `AᵀA` and `Aᵀb` accumulated in double-double, then rounded.
pub fn normal_equations(a: &Array2<f64>, b: &Array1<f64>) -> (Array2<f64>, Array1<f64>) {
    let (m, n) = a.dim();
    let mut ata = Array2::zeros((n, n));
    let mut atb = Array1::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = Dd::ZERO;
            for r in 0..m {
                s = s.add(Dd::from(a[[r, i]]).mul_f64(a[[r, j]]));
            }
            ata[[i, j]] = s.to_f64();
            ata[[j, i]] = s.to_f64();
        }
        let mut s = Dd::ZERO;
        for r in 0..m {
            s = s.add(Dd::from(a[[r, i]]).mul_f64(b[r]));
        }
        atb[i] = s.to_f64();
    }
    (ata, atb)
}

/// Solves `S x = rhs` for symmetric positive-definite `S` by Cholesky.
pub fn cholesky_solve(s: &Array2<f64>, rhs: &Array1<f64>) -> Array1<f64> {
    let n = rhs.len();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = s[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        assert!(d > 0.0, "matrix not positive definite");
        l[[j, j]] = d.sqrt();
        for i in j + 1..n {
            let mut acc = s[[i, j]];
            for k in 0..j {
                acc -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = acc / l[[j, j]];
        }
    }
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut acc = rhs[i];
        for k in 0..i {
            acc -= l[[i, k]] * y[k];
        }
        y[i] = acc / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in i + 1..n {
            acc -= l[[k, i]] * x[k];
        }
        x[i] = acc / l[[i, i]];
    }
    x
}

/// Least-squares solution via Cholesky factorisation of the normal equations.
pub fn normal_equations_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let (ata, atb) = normal_equations(a, b);
    cholesky_solve(&ata, &atb)
}

/// Minimum-norm solution of an underdetermined full-row-rank system,
/// `Aᵀ (A Aᵀ)⁻¹ b`.
pub fn min_norm_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let at = a.t().to_owned();
    let (aat, _) = normal_equations(&at, &Array1::zeros(at.nrows()));
    at.dot(&cholesky_solve(&aat, b))
}

/// Matrix with orthonormal columns spanning the columns of `a` (Gram–Schmidt,
/// applied twice for stability).
pub fn orthonormal_columns(a: &Array2<f64>) -> Array2<f64> {
    let mut q = a.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let d = q.column(k).dot(&q.column(j));
                let qk = q.column(k).to_owned();
                q.column_mut(j).scaled_add(-d, &qk);
            }
        }
        let nrm = q.column(j).dot(&q.column(j)).sqrt();
        q.column_mut(j).mapv_inplace(|v| v / nrm);
    }
    q
}

/// Eigenvalues of a symmetric matrix by the classical cyclic Jacobi method,
/// sorted descending.
pub fn symmetric_eigenvalues(s: &Array2<f64>) -> Vec<f64> {
    let n = s.nrows();
    let mut a = s.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        let diag: f64 = (0..n).map(|i| a[[i, i]] * a[[i, i]]).sum();
        if off <= 1e-34 * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - sn * akq;
                    a[[k, q]] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - sn * aqk;
                    a[[q, k]] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[[i, i]]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Singular values of `a` as square roots of the eigenvalues of `AᵀA`.
pub fn singular_values_oracle(a: &Array2<f64>) -> Vec<f64> {
    let (ata, _) = normal_equations(a, &Array1::zeros(a.nrows()));
    symmetric_eigenvalues(&ata)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// Five-point finite-difference Laplacian of `f` at `(x, y)`.
pub fn fd_laplacian(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
}

/// Small deterministic generator for test inputs (SplitMix64).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn matrix(&mut self, m: usize, n: usize) -> Array2<f64> {
        Array2::from_shape_fn((m, n), |_| self.normal())
    }

    pub fn vector(&mut self, n: usize) -> Array1<f64> {
        Array1::from_shape_fn(n, |_| self.normal())
    }

    /// Point uniformly distributed in the disk of radius `r`.
    pub fn disk_point(&mut self, r: f64) -> (f64, f64) {
        let rho = r * self.unit().sqrt();
        let t = self.uniform(0.0, std::f64::consts::TAU);
        (rho * t.cos(), rho * t.sin())
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}

/// Sanity checks for the oracles themselves.
pub fn self_check() {
    // Dd arithmetic: (1 + 2^-60) - 1 survives
    let tiny = 2f64.powi(-60);
    let v = Dd::from(1.0).add(Dd::from(tiny)).sub(Dd::from(1.0));
    assert_eq!(v.to_f64(), tiny);
    // 1/3 * 3 == 1 to double-double accuracy
    let third = Dd::from(1.0).div_f64(3.0);
    assert!((third.mul_f64(3.0).sub(Dd::from(1.0))).to_f64().abs() < 1e-30);
}
