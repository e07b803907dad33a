//! Schwarz-Christoffel-type maps of the unit disk onto convex domains with one
//! vertex at infinity:
//!
//! `psi'(w) = (w - p_N)^{-(1 + theta_N / pi)} * prod_{j < N} (w - p_j)^{theta_j / pi - 1}`,
//! `psi(0) = 0`.
//!
//! Every power is taken as `(w - p)^alpha = (-p)^alpha (1 - w / p)^alpha` with the
//! principal logarithm, so each branch cut runs radially outward from its
//! prevertex and the derivative is continuous on the open disk. The angle at
//! infinity `theta_N` is counted as a positive angle.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SCMapSpec {
    /// Unit-modulus prevertices in counter-clockwise order; the last one is sent to infinity.
    pub prevertices: Vec<C64>,
    /// Interior angles; the last entry is the angle at infinity.
    pub angles: Vec<f64>,
}

impl SCMapSpec {
    pub fn new(prevertices: Vec<C64>, angles: Vec<f64>) -> Result<Self> {
        let n = prevertices.len();
        if n == 0 || angles.len() != n {
            return Err(Error::Input(format!(
                "need matching nonempty prevertex and angle lists (got {} and {})",
                n,
                angles.len()
            )));
        }
        for (j, p) in prevertices.iter().enumerate() {
            if (p.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Input(format!("prevertex {j} is not on the unit circle")));
            }
        }
        for (j, t) in angles.iter().enumerate() {
            if !(*t > 0.0 && *t < PI) {
                return Err(Error::Input(format!("angle {j} = {t} is outside (0, pi)")));
            }
        }
        // counter-clockwise order: the argument increments around the circle sum to one turn
        if n > 1 {
            let mut turn = 0.0;
            for j in 0..n {
                let mut step = (prevertices[(j + 1) % n] / prevertices[j]).arg();
                if step <= 0.0 {
                    step += 2.0 * PI;
                }
                if !(1e-12..=2.0 * PI - 1e-12).contains(&step) {
                    return Err(Error::Input(format!("prevertices {j} and {} coincide", (j + 1) % n)));
                }
                turn += step;
            }
            if (turn - 2.0 * PI).abs() > 1e-9 {
                return Err(Error::Input("prevertices are not in counter-clockwise order".into()));
            }
        }
        Ok(SCMapSpec { prevertices, angles })
    }

    pub fn len(&self) -> usize {
        self.prevertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prevertices.is_empty()
    }

    /// `theta_j / pi - 1` for the finite vertices and `-(1 + theta_N / pi)` at infinity.
    pub fn exponents(&self) -> Vec<f64> {
        let n = self.len();
        self.angles
            .iter()
            .enumerate()
            .map(|(j, t)| if j + 1 == n { -(1.0 + t / PI) } else { t / PI - 1.0 })
            .collect()
    }

    /// Left side of the angle condition `sum_{j<N} (pi - theta_j) + pi + theta_N <= 2 pi`.
    pub fn angle_sum(&self) -> f64 {
        let n = self.len();
        self.angles[..n - 1].iter().map(|t| PI - t).sum::<f64>() + PI + self.angles[n - 1]
    }

    pub fn satisfies_angle_condition(&self) -> bool {
        self.angle_sum() <= 2.0 * PI + 1e-12
    }

    /// `prod (-p_j)^{alpha_j}`, the unimodular value of `psi'(0)`.
    pub fn phase_at_origin(&self) -> C64 {
        self.prevertices
            .iter()
            .zip(self.exponents())
            .map(|(p, a)| (-p).powf(a))
            .product()
    }

    /// Reflection of `psi(0) = 0` across the supporting line of the image at the
    /// boundary point halfway along the widest gap between prevertices. By
    /// convexity it lies outside the closed image, so `z -> 1 / (z - z0)` maps the
    /// image onto a bounded domain.
    pub fn exterior_point(&self, tol: f64) -> Result<C64> {
        let n = self.len();
        let mut best = (0.0, 0.0);
        for j in 0..n {
            let a = self.prevertices[j].arg();
            let mut gap = (self.prevertices[(j + 1) % n] / self.prevertices[j]).arg();
            if gap <= 0.0 {
                gap += 2.0 * PI;
            }
            if gap > best.0 {
                best = (gap, a + 0.5 * gap);
            }
        }
        let w = C64::from_polar(1.0 - 1e-12, best.1);
        let b = sc_map(self, w, tol)?;
        let t = C64::new(0.0, 1.0) * w * sc_derivative(self, w)?;
        let u = t / t.norm();
        Ok(b + u * u * (C64::new(0.0, 0.0) - b).conj())
    }
}

/// `psi'(w)`.
pub fn sc_derivative(spec: &SCMapSpec, w: C64) -> Result<C64> {
    if w.norm() >= 1.0 + 1e-15 {
        return Err(Error::Domain(format!("|w| = {} is outside the unit disk", w.norm())));
    }
    let mut v = C64::new(1.0, 0.0);
    for (p, a) in spec.prevertices.iter().zip(spec.exponents()) {
        let q = C64::new(1.0, 0.0) - w / p;
        if q.norm() < 1e-15 {
            return Err(Error::Domain("w coincides with a prevertex".into()));
        }
        v *= (-p).powf(a) * (a * q.ln()).exp();
    }
    Ok(v)
}

/// `psi(w)` by adaptive Gauss integration of `psi'` along the segment from 0 to `w`.
pub fn sc_map(spec: &SCMapSpec, w: C64, tol: f64) -> Result<C64> {
    sc_map_path(spec, &[C64::new(0.0, 0.0), w], tol)
}

/// Integral of `psi'` along the polyline through `points`, starting from `psi(points[0])`
/// taken as zero when `points[0] = 0`.
pub fn sc_map_path(spec: &SCMapSpec, points: &[C64], tol: f64) -> Result<C64> {
    let rule = GaussRule::new(16);
    let mut total = C64::new(0.0, 0.0);
    for seg in points.windows(2) {
        total += integrate_segment(spec, seg[0], seg[1], tol, &rule)?;
    }
    Ok(total)
}

const MAX_DEPTH: usize = 60;

fn integrate_segment(spec: &SCMapSpec, a: C64, b: C64, tol: f64, rule: &GaussRule) -> Result<C64> {
    let f = |s: f64| -> Result<C64> { Ok(sc_derivative(spec, a + (b - a) * s)? * (b - a)) };
    let gauss = |lo: f64, hi: f64| -> Result<C64> {
        let h = 0.5 * (hi - lo);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += f(0.5 * (lo + hi) + h * x)? * (w * h);
        }
        Ok(s)
    };
    // explicit stack keeps the summation order fixed
    let mut total = C64::new(0.0, 0.0);
    let mut stack = vec![(0.0f64, 1.0f64, gauss(0.0, 1.0)?, 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss(lo, mid)?;
        let right = gauss(mid, hi)?;
        let refined = left + right;
        if (refined - whole).norm() <= tol * (hi - lo).max(1e-3) * (1.0 + refined.norm()) {
            total += refined;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Accuracy(format!(
                "sc_map did not reach tolerance {tol:e} near s = {mid}"
            )));
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// Image of the circle `|w| = radius` sampled at `n` equally spaced angles,
/// accumulated arc by arc from `psi(radius)`.
pub fn trace_boundary(spec: &SCMapSpec, radius: f64, n: usize, tol: f64) -> Result<Vec<C64>> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain("trace radius must lie in (0, 1)".into()));
    }
    let rule = GaussRule::new(16);
    let mut out = Vec::with_capacity(n + 1);
    let mut z = sc_map(spec, C64::new(radius, 0.0), tol)?;
    out.push(z);
    for k in 0..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        let b = 2.0 * PI * (k + 1) as f64 / n as f64;
        let m = 4;
        let pts: Vec<C64> = (0..=m)
            .map(|i| C64::from_polar(radius, a + (b - a) * i as f64 / m as f64))
            .collect();
        for seg in pts.windows(2) {
            z += integrate_segment(spec, seg[0], seg[1], tol, &rule)?;
        }
        out.push(z);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub holds: bool,
    pub min_value: f64,
    pub argmin: C64,
    /// `1 - (sum of coefficients) / 2`, the lower bound from `Re(w / (w - p)) < 1/2` on the disk.
    pub analytic_bound: f64,
    pub angle_condition: bool,
}

/// Minimum of `Re(1 + w psi''(w) / psi'(w))` over `grid_size` points on each of the
/// circles `|w| = 1 - 2^-k`, `k = 1..=24`.
pub fn convexity_certificate(spec: &SCMapSpec, grid_size: usize) -> Result<ConvexityCertificate> {
    if grid_size < 64 {
        return Err(Error::Input("grid_size must be at least 64".into()));
    }
    let n = spec.len();
    let coeffs: Vec<f64> = spec
        .angles
        .iter()
        .enumerate()
        .map(|(j, t)| if j + 1 == n { 1.0 + t / PI } else { 1.0 - t / PI })
        .collect();
    let value = |w: C64| -> f64 {
        let s: f64 = spec
            .prevertices
            .iter()
            .zip(&coeffs)
            .map(|(p, c)| c * (w / (w - p)).re)
            .sum();
        1.0 - s
    };
    let mut min_value = f64::INFINITY;
    let mut argmin = C64::new(0.0, 0.0);
    for k in 1..=24 {
        let r = 1.0 - 0.5f64.powi(k);
        for i in 0..grid_size {
            // offset by half a step so no sample sits on a prevertex ray exactly
            let w = C64::from_polar(r, 2.0 * PI * (i as f64 + 0.5) / grid_size as f64);
            let v = value(w);
            if v < min_value {
                min_value = v;
                argmin = w;
            }
        }
    }
    Ok(ConvexityCertificate {
        holds: min_value > 0.0,
        min_value,
        argmin,
        analytic_bound: 1.0 - 0.5 * coeffs.iter().sum::<f64>(),
        angle_condition: spec.satisfies_angle_condition(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn right_angle_pair() -> SCMapSpec {
        SCMapSpec::new(
            vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
            vec![PI / 2.0, PI / 2.0],
        )
        .unwrap()
    }

    #[test]
    fn derivative_at_origin_is_unimodular() {
        let s = SCMapSpec::new(
            vec![C64::from_polar(1.0, 0.3), C64::from_polar(1.0, 2.0), C64::from_polar(1.0, 4.0)],
            vec![PI / 3.0, 0.7 * PI, 0.4 * PI],
        )
        .unwrap();
        let d = sc_derivative(&s, C64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!((d - s.phase_at_origin()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn decay_at_the_infinite_vertex() {
        let s = right_angle_pair();
        let p = s.prevertices[1];
        let e = s.exponents()[1];
        let r1 = sc_derivative(&s, p * (1.0 - 1e-3)).unwrap().norm();
        let r2 = sc_derivative(&s, p * (1.0 - 1e-4)).unwrap().norm();
        assert_abs_diff_eq!((r2 / r1).log10(), -e, epsilon = 1e-3);
    }

    #[test]
    fn origin_maps_to_origin() {
        let s = right_angle_pair();
        assert_eq!(sc_map(&s, C64::new(0.0, 0.0), 1e-12).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn path_independence() {
        let s = SCMapSpec::new(
            vec![C64::from_polar(1.0, 0.0), C64::from_polar(1.0, 2.5)],
            vec![0.4 * PI, 0.3 * PI],
        )
        .unwrap();
        for w in [C64::new(0.5, 0.6), C64::from_polar(0.999, 0.05), C64::new(-0.7, -0.2)] {
            let radial = sc_map(&s, w, 1e-13).unwrap();
            let leg = C64::new(0.0, 0.6 * w.im.signum());
            let two = sc_map_path(&s, &[C64::new(0.0, 0.0), leg, w], 1e-13).unwrap();
            assert!((radial - two).norm() <= 1e-9 * (1.0 + radial.norm()));
        }
    }

    /// The traced image turns by the exterior angle while passing a finite prevertex.
    #[test]
    fn trace_turns_by_exterior_angle() {
        let s = SCMapSpec::new(
            vec![C64::from_polar(1.0, 0.0), C64::from_polar(1.0, PI)],
            vec![PI / 3.0, PI / 3.0],
        )
        .unwrap();
        let r = 1.0 - 1e-7;
        let tangent = |phi: f64| {
            let w = C64::from_polar(r, phi);
            C64::new(0.0, 1.0) * w * sc_derivative(&s, w).unwrap()
        };
        let delta = 1e-3;
        let turn = (tangent(delta) / tangent(-delta)).arg();
        assert_abs_diff_eq!(turn, PI - PI / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn single_factor_certificate_matches_half_plane_bound() {
        let theta = 0.4 * PI;
        let s = SCMapSpec::new(vec![C64::new(1.0, 0.0)], vec![theta]).unwrap();
        let c = convexity_certificate(&s, 256).unwrap();
        assert!(c.holds);
        assert_abs_diff_eq!(c.min_value, 1.0 - (1.0 + theta / PI) / 2.0, epsilon = 1e-6);
        assert!(c.min_value >= c.analytic_bound - 1e-12);
    }

    #[test]
    fn boundary_case_right_angles_holds() {
        let s = right_angle_pair();
        assert_abs_diff_eq!(s.angle_sum(), 2.0 * PI, epsilon = 1e-14);
        let c = convexity_certificate(&s, 256).unwrap();
        assert!(c.holds, "min {}", c.min_value);
    }

    #[test]
    fn violating_set_fails() {
        let s = SCMapSpec::new(
            (0..5).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / 5.0)).collect(),
            vec![PI / 4.0; 5],
        )
        .unwrap();
        assert!(!s.satisfies_angle_condition());
        let c = convexity_certificate(&s, 256).unwrap();
        assert!(!c.holds);
        assert!(c.min_value < 0.0);
    }

    #[test]
    fn exterior_point_is_outside_traced_image() {
        let s = right_angle_pair();
        let z0 = s.exterior_point(1e-12).unwrap();
        let pts = trace_boundary(&s, 0.99, 400, 1e-10).unwrap();
        // winding number of the (nearly closed, large) trace about z0 is zero
        let mut wind = 0.0;
        for w in pts.windows(2) {
            wind += ((w[1] - z0) / (w[0] - z0)).arg();
        }
        assert!((wind / (2.0 * PI)).abs() < 0.25);
        let mut wind0 = 0.0;
        for w in pts.windows(2) {
            wind0 += (w[1] / w[0]).arg();
        }
        assert_abs_diff_eq!(wind0 / (2.0 * PI), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(SCMapSpec::new(vec![C64::new(1.0, 0.0)], vec![PI]).is_err());
        assert!(SCMapSpec::new(vec![C64::new(0.5, 0.0)], vec![1.0]).is_err());
        assert!(SCMapSpec::new(
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![1.0, 1.0]
        )
        .is_err());
    }
}
