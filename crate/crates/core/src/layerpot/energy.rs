//! Energy quotient and equilibrium density.

use nalgebra::{DMatrix, DVector};

use super::{OperatorMatrices, SymmetrizedSpectrum};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PoincareQuotient {
    /// `<K* g, S g>_W / <g, S g>_W`.
    pub quotient: f64,
    /// `<(g - K* g) / 2, S g>_W`, the Dirichlet energy of `S g` inside.
    pub interior_energy: f64,
    /// `<(g + K* g) / 2, S g>_W`, the Dirichlet energy of `S g` outside.
    pub exterior_energy: f64,
}

/// Energy quotient of the density `g` (expected discretely mean-zero, see
/// [`mean_zero_projection`]).
pub fn poincare_quotient(ops: &OperatorMatrices, g: &DVector<f64>) -> Result<PoincareQuotient> {
    let w = DVector::from_column_slice(&ops.weights);
    let sg = &ops.s * g;
    let kg = ops.k_adjoint() * g;
    let pair = |a: &DVector<f64>, b: &DVector<f64>| a.component_mul(&w).dot(b);
    let denom = pair(g, &sg);
    if !(denom > 0.0) {
        return Err(Error::Numerical(format!(
            "<g, S g> = {denom:.3e} is not positive; the domain needs rescaling"
        )));
    }
    let num = pair(&kg, &sg);
    Ok(PoincareQuotient {
        quotient: num / denom,
        interior_energy: 0.5 * (denom - num),
        exterior_energy: 0.5 * (denom + num),
    })
}

/// Removes the component along the equilibrium density in the `S`-weighted inner
/// product, so the quotient of the result is bounded by the mean-zero spectrum.
/// Without a deflated eigenvector the plain `W`-weighted mean is removed instead.
pub fn mean_zero_projection(spec: &SymmetrizedSpectrum, weights: &[f64], g: &DVector<f64>) -> DVector<f64> {
    match spec.constant_column {
        Some(c) => {
            let v0 = spec.eigenvectors.column(c).into_owned();
            let coef = (spec.chol_l.transpose() * g).dot(&v0);
            g - spec.density(c) * coef
        }
        None => {
            let total: f64 = weights.iter().sum();
            let mean = g.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / total;
            g.add_scalar(-mean)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Equilibrium {
    /// Solution of `(I - K*) g = 0` with `sum w g^2 = 1` and positive mean.
    pub density: DVector<f64>,
    /// Smallest and second-smallest singular values of `I - K*`.
    pub sigma_min: f64,
    pub sigma_next: f64,
    /// Mean of `S g` over the nodes, if `S` was supplied.
    pub potential_mean: Option<f64>,
    /// Standard deviation of `S g` divided by its mean.
    pub potential_relative_spread: Option<f64>,
    pub warnings: Vec<String>,
}

/// Equilibrium density from the smallest right singular vector of `I - K*`,
/// found by inverse iteration on `(I - K*)^T (I - K*)`.
pub fn equilibrium_density(
    k: &DMatrix<f64>,
    weights: &[f64],
    s: Option<&DMatrix<f64>>,
) -> Result<Equilibrium> {
    let n = k.nrows();
    let kstar = super::discrete_adjoint(k, weights);
    let b = DMatrix::<f64>::identity(n, n) - kstar;
    let shift = 1e-13 * b.norm() / (n as f64).sqrt();
    let shifted = &b + DMatrix::<f64>::identity(n, n) * shift;
    let lu = shifted.clone().lu();
    let lu_t = shifted.transpose().lu();
    let apply_inv = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let y = lu_t
            .solve(x)
            .ok_or_else(|| Error::Numerical("I - K* could not be factored".into()))?;
        lu.solve(&y)
            .ok_or_else(|| Error::Numerical("I - K* could not be factored".into()))
    };
    let iterate = |deflate: Option<&DVector<f64>>| -> Result<(DVector<f64>, f64)> {
        let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0);
        let project = |x: &mut DVector<f64>| {
            if let Some(d) = deflate {
                let c = x.dot(d);
                x.axpy(-c, d, 1.0);
            }
        };
        project(&mut x);
        x.normalize_mut();
        for _ in 0..40 {
            let mut y = apply_inv(&x)?;
            project(&mut y);
            y.normalize_mut();
            let change = (&y - &x).norm().min((&y + &x).norm());
            x = y;
            if change < 1e-14 {
                break;
            }
        }
        let sigma = (&b * &x).norm();
        Ok((x, sigma))
    };
    let (x1, sigma_min) = iterate(None)?;
    let (_, sigma_next) = iterate(Some(&x1))?;
    let mut warnings = Vec::new();
    if sigma_next < 10.0 * sigma_min {
        warnings.push(format!(
            "smallest singular value {sigma_min:.3e} is not isolated (next {sigma_next:.3e})"
        ));
    }
    let wnorm = x1.iter().zip(weights).map(|(g, w)| w * g * g).sum::<f64>().sqrt();
    let mean: f64 = x1.iter().zip(weights).map(|(g, w)| w * g).sum();
    let density = x1 * (mean.signum() / wnorm);
    let (potential_mean, potential_relative_spread) = match s {
        Some(s) => {
            let u = s * &density;
            let m = u.mean();
            let var = u.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
            (Some(m), Some(var.sqrt() / m.abs()))
        }
        None => (None, None),
    };
    Ok(Equilibrium {
        density,
        sigma_min,
        sigma_next,
        potential_mean,
        potential_relative_spread,
        warnings,
    })
}
