//! End-to-end runs: domain to spectrum through either discretization, and the
//! cross-pipeline comparison.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{BoundaryMesh, DomainSpec, MeshRule, MAX_NODES_DEFAULT};
use crate::layerpot::{symmetrized_spectrum, OperatorMatrices, SymmetrizedSpectrum};
use crate::spectrum::SpectrumResult;

pub use crate::beurling::{bergman_spectrum, BergmanConfig, BergmanRun};

/// Resolution of the Nyström pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NystromConfig {
    pub panels: usize,
    /// `None` picks 8 levels for domains with corners and 0 for smooth ones.
    pub grading: Option<usize>,
    pub quad_order: usize,
    pub rule: MeshRule,
    pub max_nodes: usize,
}

impl Default for NystromConfig {
    fn default() -> Self {
        NystromConfig {
            panels: 8,
            grading: None,
            quad_order: 16,
            rule: MeshRule::Auto,
            max_nodes: MAX_NODES_DEFAULT,
        }
    }
}

impl NystromConfig {
    pub fn new(panels: usize, grading: usize, quad_order: usize) -> Self {
        NystromConfig {
            panels,
            grading: Some(grading),
            quad_order,
            ..Self::default()
        }
    }

    pub fn grading_for(&self, d: &DomainSpec) -> usize {
        self.grading.unwrap_or(if d.is_smooth() { 0 } else { 8 })
    }
}

#[derive(Clone, Debug)]
pub struct NystromRun {
    /// The rescaled domain the operators were built on.
    pub domain: DomainSpec,
    pub mesh: BoundaryMesh,
    pub ops: OperatorMatrices,
    pub spectrum: SymmetrizedSpectrum,
}

impl NystromRun {
    pub fn result(&self) -> &SpectrumResult {
        &self.spectrum.result
    }
}

/// Rescales `d`, meshes it, assembles `K` and `S` and solves the symmetrized
/// eigenproblem with the constant sector deflated.
pub fn nystrom_spectrum(d: &DomainSpec, cfg: &NystromConfig) -> Result<NystromRun> {
    let domain = d.rescale_to_normal();
    let mesh = BoundaryMesh::build(
        &domain,
        cfg.panels,
        cfg.grading_for(&domain),
        cfg.quad_order,
        cfg.rule,
        cfg.max_nodes,
    )?;
    let ops = OperatorMatrices::assemble(&mesh)?;
    let mut spectrum = symmetrized_spectrum(&ops, true)?;
    spectrum.result.domain = Some(d.kind.clone());
    if ops.s_asymmetry > 1e-3 {
        spectrum.result.warnings.push(format!(
            "single-layer symmetrization moved W S by {:.3e} relative",
            ops.s_asymmetry
        ));
    }
    Ok(NystromRun {
        domain,
        mesh,
        ops,
        spectrum,
    })
}

/// One row of the cross-pipeline table: the `rank`-th largest `|lambda|` of each.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DeviationRow {
    pub rank: usize,
    pub nystrom: f64,
    pub bergman: f64,
    pub deviation: f64,
}

/// Compares the top `k` values of `|lambda|` of two spectra (the Bergman values
/// come in `+-sigma` pairs, so each singular value is taken once).
pub fn deviation_table(nystrom: &SpectrumResult, bergman: &SpectrumResult, k: usize) -> Vec<DeviationRow> {
    let a = nystrom.top_abs(k);
    let mut b: Vec<f64> = bergman.eigenvalues.iter().filter(|v| **v >= 0.0).copied().collect();
    b.sort_by(|x, y| y.total_cmp(x));
    let mut paired: Vec<f64> = Vec::with_capacity(2 * b.len());
    for s in b {
        paired.push(s);
        paired.push(s);
    }
    // Nyström magnitudes also come in pairs, one from each sign
    (0..k.min(a.len()).min(paired.len()))
        .map(|r| DeviationRow {
            rank: r + 1,
            nystrom: a[r],
            bergman: paired[r],
            deviation: (a[r] - paired[r]).abs(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_from_str;

    #[test]
    fn ellipse_pipelines_agree() {
        let d = preset_from_str("ellipse:2,1").unwrap();
        let n = nystrom_spectrum(&d, &NystromConfig::new(32, 0, 16)).unwrap();
        let b = bergman_spectrum(&d, &BergmanConfig::with_degree(20)).unwrap();
        let table = deviation_table(n.result(), &b.spectrum, 6);
        assert_eq!(table.len(), 6);
        for row in table {
            assert!(row.deviation < 1e-6, "{row:?}");
        }
    }

    #[test]
    fn default_grading_depends_on_corners() {
        let cfg = NystromConfig::default();
        assert_eq!(cfg.grading_for(&preset_from_str("disk").unwrap()), 0);
        assert_eq!(cfg.grading_for(&preset_from_str("square").unwrap()), 8);
    }
}
