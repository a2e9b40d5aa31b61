use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Stream of the generator feeding the design matrix.
const STREAM_A: u64 = 0;
/// Stream feeding the noise, so `A` does not depend on the SNR.
const STREAM_NOISE: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AmplitudeSign {
    #[default]
    AllPositive,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub snr_db: f64,
    pub seed: u64,
    #[serde(default)]
    pub amplitude_sign: AmplitudeSign,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.m < 1 || self.n < 1 {
            problems.push("m and n must be at least 1".to_string());
        }
        if self.k > self.n {
            problems.push(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if !(0.0..1.0).contains(&self.rho) {
            problems.push(format!("rho = {} is outside [0, 1)", self.rho));
        }
        if self.snr_db.is_nan() {
            problems.push("snr_db is NaN".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(problems))
        }
    }

    /// Indices `round(j·n/k)`, `j = 0..k`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.k)
            .map(|j| (j as f64 * self.n as f64 / self.k as f64).round() as usize)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub x_true: Vec<f64>,
    pub spec: SyntheticSpec,
}

/// Draws `A` with i.i.d. `N(0, Σ)` rows, `Σᵢⱼ = ρ^|i−j|`, and
/// `y = A x† + e` at the requested signal-to-noise ratio.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);

    let mut rng_a = ChaCha20Rng::seed_from_u64(spec.seed);
    rng_a.set_stream(STREAM_A);
    let mut rng_e = ChaCha20Rng::seed_from_u64(spec.seed);
    rng_e.set_stream(STREAM_NOISE);

    // Row-wise product with the Cholesky factor of the AR(1) covariance,
    // which reduces to a first-order recursion.
    let c = (1.0 - spec.rho * spec.rho).sqrt();
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        let mut prev = 0.0;
        for j in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng_a);
            let v = if j == 0 { z } else { spec.rho * prev + c * z };
            a.set(i, j, v);
            prev = v;
        }
    }

    let mut x_true = vec![0.0; n];
    for (j, idx) in spec.support().into_iter().enumerate() {
        x_true[idx] = match spec.amplitude_sign {
            AmplitudeSign::AllPositive => 1.0,
            AmplitudeSign::Alternating if j % 2 == 1 => -1.0,
            AmplitudeSign::Alternating => 1.0,
        };
    }
    let signal = a.mul_vec(&x_true);
    let power: f64 = signal.iter().map(|v| v * v).sum();
    let sigma = (power / (m as f64 * 10f64.powf(spec.snr_db / 10.0))).sqrt();
    let y = signal
        .iter()
        .map(|s| {
            let z: f64 = StandardNormal.sample(&mut rng_e);
            s + sigma * z
        })
        .collect();
    Ok(SyntheticInstance {
        a,
        y,
        x_true,
        spec: *spec,
    })
}
