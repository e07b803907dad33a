//! The compact-perturbation kernel
//! `K(eta, w) = phi'(w) / (phi(eta) - phi(w)) - 1 / (eta - w)`
//! and a regression of `log|K|` against `log|eta - w|` over near-diagonal pairs.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mobius::MobiusMap;
use crate::error::{Error, Result};

/// A conformal map with an analytic derivative.
pub trait AnalyticMap {
    fn value(&self, z: C64) -> C64;
    fn derivative(&self, z: C64) -> C64;
}

impl AnalyticMap for MobiusMap {
    fn value(&self, z: C64) -> C64 {
        self.apply(z)
    }

    fn derivative(&self, z: C64) -> C64 {
        MobiusMap::derivative(self, z)
    }
}

/// `z -> (z - center)^exponent` with the principal branch.
#[derive(Clone, Copy, Debug)]
pub struct PowerMap {
    pub center: C64,
    pub exponent: f64,
}

impl AnalyticMap for PowerMap {
    fn value(&self, z: C64) -> C64 {
        (z - self.center).powf(self.exponent)
    }

    fn derivative(&self, z: C64) -> C64 {
        self.exponent * (z - self.center).powf(self.exponent - 1.0)
    }
}

pub fn perturbation_kernel(phi: &dyn AnalyticMap, eta: C64, w: C64) -> Result<C64> {
    if eta == w {
        return Err(Error::Domain("the kernel is undefined on the diagonal".into()));
    }
    let dphi = phi.derivative(w);
    if dphi.norm() == 0.0 {
        return Err(Error::Domain("phi' vanishes at w".into()));
    }
    Ok(dphi / (phi.value(eta) - phi.value(w)) - 1.0 / (eta - w))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Least-squares slope of `log|K|` on `log|eta - w|`; `None` when `K` vanishes on every sample.
    pub exponent: Option<f64>,
    pub intercept: f64,
    pub max_abs: f64,
    pub samples: usize,
}

/// Samples `samples` pairs with base points `w = center + radius * u` (`|u| <= 1`) and
/// separations log-uniform in `[1e-5, 1e-1]`, then fits the power law.
pub fn fit_singularity_exponent(
    phi: &dyn AnalyticMap,
    center: C64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ExponentFit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    let mut max_abs: f64 = 0.0;
    for _ in 0..samples {
        let r = radius * rng.random::<f64>().sqrt();
        let w = center + C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        let dist = 10f64.powf(rng.random_range(-5.0..-1.0));
        let eta = w + C64::from_polar(dist, rng.random_range(0.0..std::f64::consts::TAU));
        let k = perturbation_kernel(phi, eta, w)?.norm();
        max_abs = max_abs.max(k);
        xs.push(dist.ln());
        ys.push(k.ln());
    }
    if max_abs <= 1e-14 {
        return Ok(ExponentFit {
            exponent: None,
            intercept: f64::NEG_INFINITY,
            max_abs,
            samples,
        });
    }
    let n = samples as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(ExponentFit {
        exponent: Some(slope),
        intercept: my - slope * mx,
        max_abs,
        samples,
    })
}
