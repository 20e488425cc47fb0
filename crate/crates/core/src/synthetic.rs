// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded synthetic series used as bench datasets and test fixtures.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::series::TimeSeries;

/// AR(1) process `x[t] = phi * x[t-1] + e[t]`, `e ~ N(0, noise_std²)`,
/// started from its stationary distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ar1Config {
    pub n: usize,
    pub phi: f64,
    #[serde(default = "one")]
    pub noise_std: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub seed: u64,
}

/// `offset + slope·t + amplitude·sin(2πt/period) + noise`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineTrendConfig {
    pub n: usize,
    pub period: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub slope: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(ImputeError::EmptySeries)
    } else {
        Ok(())
    }
}

fn normal(std: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, std).map_err(|e| ImputeError::InvalidInput(format!("noise_std {std}: {e}")))
}

pub fn ar1(cfg: &Ar1Config) -> Result<TimeSeries> {
    check_n(cfg.n)?;
    if !(cfg.phi.abs() < 1.0) {
        return Err(ImputeError::InvalidInput(format!(
            "AR(1) phi must satisfy |phi| < 1, got {}",
            cfg.phi
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = normal(cfg.noise_std)?;
    let stationary = normal(cfg.noise_std / (1.0 - cfg.phi * cfg.phi).sqrt())?;
    let mut x = stationary.sample(&mut rng);
    let mut values = Vec::with_capacity(cfg.n);
    values.push(cfg.offset + x);
    for _ in 1..cfg.n {
        x = cfg.phi * x + noise.sample(&mut rng);
        values.push(cfg.offset + x);
    }
    TimeSeries::new(values)
}

pub fn sine_trend(cfg: &SineTrendConfig) -> Result<TimeSeries> {
    check_n(cfg.n)?;
    if !(cfg.period > 0.0) {
        return Err(ImputeError::InvalidInput("period must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = normal(cfg.noise_std)?;
    let values = (0..cfg.n)
        .map(|t| {
            let t = t as f64;
            cfg.offset
                + cfg.slope * t
                + cfg.amplitude * (2.0 * PI * t / cfg.period).sin()
                + noise.sample(&mut rng)
        })
        .collect();
    TimeSeries::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_is_seeded_and_autocorrelated() {
        let cfg = Ar1Config {
            n: 5000,
            phi: 0.8,
            noise_std: 1.0,
            offset: 0.0,
            seed: 11,
        };
        let a = ar1(&cfg).unwrap();
        assert_eq!(a, ar1(&cfg).unwrap());
        let rho = crate::metrics::lag1_autocorrelation(a.values()).unwrap();
        assert!((rho - 0.8).abs() < 0.05, "{rho}");
        assert!(ar1(&Ar1Config { phi: 1.0, ..cfg }).is_err());
    }

    #[test]
    fn noiseless_sine() {
        let s = sine_trend(&SineTrendConfig {
            n: 9,
            period: 4.0,
            amplitude: 2.0,
            slope: 0.0,
            offset: 1.0,
            noise_std: 0.0,
            seed: 0,
        })
        .unwrap();
        assert!((s.values()[1] - 3.0).abs() < 1e-12);
        assert!((s.values()[3] + 1.0).abs() < 1e-12);
    }
}
