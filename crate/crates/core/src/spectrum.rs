//! The spectrum record shared by both pipelines, with JSON and CSV output.

use serde::{Deserialize, Serialize};

use crate::geometry::DomainKind;

/// Version tag written at the top of every JSON document.
pub const SCHEMA: &str = "np-spectra/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Nystrom,
    Bergman,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Nystrom => "nystrom",
            Method::Bergman => "bergman",
        })
    }
}

/// Discretization knobs recorded alongside a result.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_order: Option<usize>,
}

/// One histogram bin `[lo, hi)` of eigenvalue counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub schema: String,
    pub method: Method,
    pub n_nodes: usize,
    /// All computed eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Largest `|lambda|` with the constant-density eigenvalue excluded.
    pub spectral_radius: f64,
    /// Largest distance from `-lambda` to the spectrum, over `lambda` above the noise floor.
    pub pairing_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plemelj_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymmetry_residual: Option<f64>,
    /// Position in `eigenvalues` of the deflated constant-density eigenvalue.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_index: Option<usize>,
    pub histogram: Vec<Bin>,
    pub resolution: Resolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Description of the domain the spectrum belongs to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainKind>,
    pub warnings: Vec<String>,
}

impl SpectrumResult {
    /// Builds a result from raw eigenvalues; `constant` is the index (in `raw`) of an
    /// eigenvalue to leave out of the radius and pairing statistics.
    pub fn from_eigenvalues(
        method: Method,
        n_nodes: usize,
        raw: &[f64],
        constant: Option<usize>,
        noise_floor: f64,
    ) -> SpectrumResult {
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
        let constant_index = constant.map(|c| order.iter().position(|&k| k == c).unwrap());
        let kept: Vec<f64> = eigenvalues
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != constant_index)
            .map(|(_, v)| *v)
            .collect();
        let spectral_radius = kept.iter().map(|v| v.abs()).fold(0.0, f64::max);
        SpectrumResult {
            schema: SCHEMA.to_string(),
            method,
            n_nodes,
            pairing_residual: pairing_residual(&kept, noise_floor),
            histogram: histogram(&kept, 40),
            eigenvalues,
            spectral_radius,
            plemelj_residual: None,
            asymmetry_residual: None,
            constant_index,
            resolution: Resolution::default(),
            seed: None,
            domain: None,
            warnings: Vec::new(),
        }
    }

    /// Eigenvalues with the constant-density one removed, still descending.
    pub fn mean_zero_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != self.constant_index)
            .map(|(_, v)| *v)
            .collect()
    }

    /// The `k` largest values of `|lambda|` in the mean-zero sector.
    pub fn top_abs(&self, k: usize) -> Vec<f64> {
        let mut a: Vec<f64> = self.mean_zero_eigenvalues().iter().map(|v| v.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        a.truncate(k);
        a
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum results always serialize")
    }

    /// One eigenvalue per row, with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue,constant_sector\n");
        for (k, v) in self.eigenvalues.iter().enumerate() {
            s.push_str(&format!("{k},{v:.17e},{}\n", Some(k) == self.constant_index));
        }
        s
    }
}

/// `max_lambda dist(-lambda, spectrum)` over `|lambda| > noise_floor`.
pub fn pairing_residual(values: &[f64], noise_floor: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nearest = |x: f64| -> f64 {
        let k = sorted.partition_point(|v| *v < x);
        let mut best = f64::INFINITY;
        if k < sorted.len() {
            best = best.min((sorted[k] - x).abs());
        }
        if k > 0 {
            best = best.min((sorted[k - 1] - x).abs());
        }
        best
    };
    values
        .iter()
        .filter(|v| v.abs() > noise_floor)
        .map(|v| nearest(-v))
        .fold(0.0, f64::max)
}

/// Equal-width bins over `[-1, 1]`; values outside are clamped into the end bins.
pub fn histogram(values: &[f64], bins: usize) -> Vec<Bin> {
    let width = 2.0 / bins as f64;
    let mut out: Vec<Bin> = (0..bins)
        .map(|k| Bin {
            lo: -1.0 + k as f64 * width,
            hi: -1.0 + (k + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for v in values {
        let k = (((v + 1.0) / width).floor().max(0.0) as usize).min(bins - 1);
        out[k].count += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_and_constant_exclusion() {
        let r = SpectrumResult::from_eigenvalues(Method::Nystrom, 4, &[0.2, 1.0, -0.2, 0.0], Some(1), 1e-12);
        assert_eq!(r.eigenvalues, vec![1.0, 0.2, 0.0, -0.2]);
        assert_eq!(r.constant_index, Some(0));
        assert_eq!(r.spectral_radius, 0.2);
        assert_eq!(r.pairing_residual, 0.0);
    }

    #[test]
    fn pairing_detects_missing_partner() {
        assert!((pairing_residual(&[0.5, -0.4, 0.0], 1e-9) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn json_carries_schema() {
        let r = SpectrumResult::from_eigenvalues(Method::Bergman, 0, &[0.0], None, 0.0);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["method"], "bergman");
    }

    #[test]
    fn histogram_counts_everything() {
        let h = histogram(&[-1.0, -0.99, 0.0, 0.5, 1.0, 1.2], 10);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 6);
        assert_eq!(h[9].count, 2);
    }
}
