//! Seedable random source shared by every stochastic part of the benchmark.
//!
//! The stream is MT19937 seeded with `init_genrand`, and floats/normals are
//! derived exactly the way NumPy's legacy `RandomState` derives them:
//!
//! * uniform doubles take two 32-bit draws, `a = next >> 5`, `b = next >> 6`,
//!   and return `(a * 2^26 + b) / 2^53`, a value in `[0, 1)`;
//! * standard normals use the Marsaglia polar method on pairs of uniform
//!   doubles mapped to `(-1, 1)`, caching the second variate of each pair.
//!
//! With that derivation, `LegacyRng::new(seed).standard_normal_vec(n)` yields
//! the same numbers as `np.random.seed(seed); np.random.randn(n)`.

use rand_mt::Mt;

/// MT19937 with NumPy-legacy float and Gaussian derivations.
#[derive(Clone)]
pub struct LegacyRng {
    mt: Mt,
    cached_gauss: Option<f64>,
}

impl LegacyRng {
    pub fn new(seed: u32) -> Self {
        Self {
            mt: Mt::new(seed),
            cached_gauss: None,
        }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.mt.next_u32()
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        let a = (self.next_u32() >> 5) as f64;
        let b = (self.next_u32() >> 6) as f64;
        (a * 67_108_864.0 + b) / 9_007_199_254_740_992.0
    }

    /// Uniform double in `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(g) = self.cached_gauss.take() {
            return g;
        }
        let (x1, x2, r2) = loop {
            let x1 = 2.0 * self.next_f64() - 1.0;
            let x2 = 2.0 * self.next_f64() - 1.0;
            let r2 = x1 * x1 + x2 * x2;
            if r2 < 1.0 && r2 != 0.0 {
                break (x1, x2, r2);
            }
        };
        let f = (-2.0 * r2.ln() / r2).sqrt();
        self.cached_gauss = Some(f * x1);
        f * x2
    }

    pub fn standard_normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.standard_normal()).collect()
    }

    pub fn uniform_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_f64()).collect()
    }
}
