//! Angle bounds on the spectral radius and their comparison with computed spectra.
//!
//! * Kühnau: `|sigma| >= max_j |1 - theta_j / pi|` for every curvilinear polygon.
//! * Krushkal: the largest Fredholm eigenvalue of a convex unbounded domain of the
//!   Schwarz-Christoffel class is `1 - theta_min / pi`, the angle at infinity included.
//! * Essential spectrum: if `sum_{j<N} (pi - theta_j) + pi + theta_N <= 2 pi` for
//!   some cyclic relabelling, then `|sigma_ess| <= max_j (1 - theta_j / pi)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::spectrum::SpectrumResult;

pub const BOUND_TOL_DEFAULT: f64 = 0.02;

/// Slack in the angle-sum inequality, so that exact equality cases survive rounding.
const CONDITION_SLACK: f64 = 1e-12;

fn check_angles(angles: &[f64], hi: f64, what: &str) -> Result<()> {
    for (j, t) in angles.iter().enumerate() {
        if !(*t > 0.0 && *t < hi) || !t.is_finite() {
            return Err(Error::Input(format!("{what}: angle {j} = {t} is outside (0, {hi:.6})")));
        }
    }
    Ok(())
}

pub fn kuhnau_lower_bound(angles: &[f64]) -> Result<f64> {
    check_angles(angles, 2.0 * PI, "Kühnau bound")?;
    Ok(angles.iter().map(|t| (1.0 - t / PI).abs()).fold(0.0, f64::max))
}

pub fn krushkal_value(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::Input("Krushkal value needs at least one angle".into()));
    }
    check_angles(angles, PI, "Krushkal value (convex domain)")?;
    let min = angles.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(1.0 - min / PI)
}

/// Outcome of the angle condition for the essential-spectrum bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssCheck {
    pub holds: bool,
    /// `max_j (1 - theta_j / pi)` when the condition holds.
    pub upper: Option<f64>,
    /// Index of the vertex playing the role of `a_N` in the first certifying relabelling.
    pub permutation: Option<usize>,
    pub reason: Option<String>,
}

/// Left side minus right side of the angle inequality with vertex `n` last.
pub fn essbound_slack(angles: &[f64], n: usize) -> f64 {
    let rest: f64 = angles
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != n)
        .map(|(_, t)| PI - t)
        .sum();
    2.0 * PI - (rest + PI + angles[n])
}

pub fn essbound_check(angles: &[f64]) -> Result<EssCheck> {
    if angles.is_empty() {
        return Err(Error::Input("essential-spectrum bound needs at least one vertex".into()));
    }
    check_angles(angles, 2.0 * PI, "essential-spectrum bound")?;
    if let Some(j) = angles.iter().position(|t| *t >= PI) {
        return Ok(EssCheck {
            holds: false,
            upper: None,
            permutation: None,
            reason: Some(format!("reflex or flat vertex {j} (angle {:.6})", angles[j])),
        });
    }
    match (0..angles.len()).find(|&n| essbound_slack(angles, n) >= -CONDITION_SLACK) {
        Some(n) => Ok(EssCheck {
            holds: true,
            upper: Some(kuhnau_lower_bound(angles)?),
            permutation: Some(n),
            reason: None,
        }),
        None => {
            let best = (0..angles.len())
                .map(|n| essbound_slack(angles, n))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(EssCheck {
                holds: false,
                upper: None,
                permutation: None,
                reason: Some(format!("angle sum exceeds 2 pi by {:.6} for every relabelling", -best)),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// False when the bound does not apply to this domain.
    pub applicable: bool,
    pub passed: bool,
    /// Positive when the check passes with room to spare.
    pub margin: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema: String,
    pub angles: Vec<f64>,
    pub kuhnau_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub krushkal_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essbound_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essbound_permutation: Option<usize>,
    pub condition_satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed_radius: Option<f64>,
    pub tolerance: f64,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bound reports always serialize")
    }
}

/// Eigenvalues allowed above the essential bound before a plateau is declared.
pub fn plateau_limit(n: usize) -> usize {
    4.max(n / 100)
}

/// Number of mean-zero eigenvalues with `|lambda| > level`.
pub fn count_above(result: &SpectrumResult, level: f64) -> usize {
    result.mean_zero_eigenvalues().iter().filter(|v| v.abs() > level).count()
}

/// Bound values for `d` and verdicts against the supplied spectra (the largest
/// radius among them is used).
pub fn validate_domain(d: &DomainSpec, results: &[&SpectrumResult], tol: f64) -> Result<BoundReport> {
    if results.is_empty() {
        return Err(Error::Input("bounds need at least one computed spectrum".into()));
    }
    if results.len() > 2 {
        return Err(Error::Input("at most two spectra (one per method) can be validated".into()));
    }
    if results.len() == 2 && results[0].method == results[1].method {
        return Err(Error::Input("two spectra from the same method".into()));
    }
    for r in results {
        if let Some(k) = &r.domain {
            if *k != d.kind {
                return Err(Error::Input(format!(
                    "{} spectrum was computed for a different domain",
                    r.method
                )));
            }
        }
    }
    let angles = d.interior_angles();
    let kuhnau_lower = kuhnau_lower_bound(&angles)?;
    let ess = if angles.is_empty() { None } else { Some(essbound_check(&angles)?) };
    let radius = results.iter().map(|r| r.spectral_radius).fold(0.0, f64::max);

    let mut verdicts = vec![Verdict {
        name: "kuhnau".into(),
        applicable: true,
        passed: radius >= kuhnau_lower - tol,
        margin: radius - kuhnau_lower,
        note: format!("radius {radius:.6} against lower bound {kuhnau_lower:.6} (tolerance {tol})"),
    }];
    let condition_satisfied = ess.as_ref().is_some_and(|e| e.holds);
    match ess.as_ref() {
        Some(EssCheck { holds: true, upper: Some(upper), .. }) => {
            // plateau test on the spectrum with the most eigenvalues
            let r = results.iter().max_by_key(|r| r.eigenvalues.len()).expect("nonempty");
            let level = upper + tol;
            let limit = plateau_limit(r.eigenvalues.len());
            let mut mags: Vec<f64> = r.mean_zero_eigenvalues().iter().map(|v| v.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let count = mags.iter().filter(|v| **v > level).count();
            let margin = level - mags.get(limit).copied().unwrap_or(0.0);
            verdicts.push(Verdict {
                name: "essbound-consistency".into(),
                applicable: true,
                passed: count <= limit,
                margin,
                note: format!(
                    "{count} eigenvalues above {level:.6} (allowed {limit}); consistency with the essential bound, not a proof"
                ),
            });
        }
        other => verdicts.push(Verdict {
            name: "essbound-consistency".into(),
            applicable: false,
            passed: true,
            margin: 0.0,
            note: match other {
                None => "smooth boundary: no essential-spectrum bound".into(),
                Some(e) => format!("angle condition fails: {}", e.reason.clone().unwrap_or_default()),
            },
        }),
    }
    Ok(BoundReport {
        schema: crate::spectrum::SCHEMA.to_string(),
        angles,
        kuhnau_lower,
        krushkal_value: None,
        essbound_upper: ess.as_ref().and_then(|e| e.upper),
        essbound_permutation: ess.as_ref().and_then(|e| e.permutation),
        condition_satisfied,
        computed_radius: Some(radius),
        tolerance: tol,
        verdicts,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_from_str;
    use crate::spectrum::Method;

    #[test]
    fn kuhnau_values() {
        assert_eq!(kuhnau_lower_bound(&[PI / 2.0; 4]).unwrap(), 0.5);
        assert!((kuhnau_lower_bound(&[2.0 * PI / 3.0; 6]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(kuhnau_lower_bound(&[PI]).unwrap(), 0.0);
        assert_eq!(kuhnau_lower_bound(&[]).unwrap(), 0.0);
        assert!((kuhnau_lower_bound(&[PI / 2.0, 1.5 * PI]).unwrap() - 0.5).abs() < 1e-15);
        assert!(kuhnau_lower_bound(&[0.0]).is_err());
    }

    #[test]
    fn krushkal_values() {
        assert!((krushkal_value(&[PI / 3.0, PI / 3.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((krushkal_value(&[PI / 2.0, 0.9 * PI]).unwrap() - 0.5).abs() < 1e-15);
        assert!(krushkal_value(&[PI - 1e-9]).unwrap() < 1e-9);
        assert!(krushkal_value(&[PI]).is_err());
    }

    #[test]
    fn square_fails_condition() {
        let e = essbound_check(&[PI / 2.0; 4]).unwrap();
        assert!(!e.holds);
        assert!(e.upper.is_none());
        // 3 pi/2 + pi + pi/2 = 3 pi
        assert!((essbound_slack(&[PI / 2.0; 4], 3) + PI).abs() < 1e-14);
    }

    #[test]
    fn lens_condition_picks_smaller_angle_last() {
        let angles = [PI / 4.0, PI / 5.0];
        let e = essbound_check(&angles).unwrap();
        assert!(e.holds);
        assert_eq!(e.permutation, Some(1));
        assert!((e.upper.unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(e.upper.unwrap(), kuhnau_lower_bound(&angles).unwrap());
    }

    #[test]
    fn single_vertex_always_holds() {
        let e = essbound_check(&[PI / 3.0]).unwrap();
        assert!(e.holds);
        assert!((e.upper.unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reflex_vertex_reason() {
        let e = essbound_check(&[PI / 2.0, 1.5 * PI, PI / 2.0]).unwrap();
        assert!(!e.holds);
        assert!(e.reason.unwrap().contains("reflex or flat vertex"));
    }

    fn fake(radius: f64, method: Method) -> SpectrumResult {
        SpectrumResult::from_eigenvalues(method, 3, &[radius, 0.0, -radius], None, 0.0)
    }

    #[test]
    fn square_report() {
        let d = preset_from_str("square:1").unwrap();
        let r = fake(0.497, Method::Nystrom);
        let rep = validate_domain(&d, &[&r], BOUND_TOL_DEFAULT).unwrap();
        assert_eq!(rep.kuhnau_lower, 0.5);
        assert!(rep.essbound_upper.is_none());
        assert!(rep.passed());
        assert!(!rep.verdicts[1].applicable);
        let low = fake(0.4, Method::Nystrom);
        assert!(!validate_domain(&d, &[&low], BOUND_TOL_DEFAULT).unwrap().passed());
    }

    #[test]
    fn disk_report_is_vacuous() {
        let d = preset_from_str("disk").unwrap();
        let r = fake(0.0, Method::Nystrom);
        let rep = validate_domain(&d, &[&r], BOUND_TOL_DEFAULT).unwrap();
        assert_eq!(rep.kuhnau_lower, 0.0);
        assert!(rep.passed());
    }

    #[test]
    fn mismatched_results_rejected() {
        let d = preset_from_str("square").unwrap();
        let mut r = fake(0.5, Method::Nystrom);
        r.domain = Some(preset_from_str("disk").unwrap().kind);
        assert!(validate_domain(&d, &[&r], 0.02).is_err());
        let a = fake(0.5, Method::Bergman);
        let b = fake(0.5, Method::Bergman);
        assert!(validate_domain(&d, &[&a, &b], 0.02).is_err());
    }

    #[test]
    fn plateau_counts() {
        let d = preset_from_str("lens:pi/4,pi/5").unwrap();
        let mut vals = vec![0.95; 10];
        vals.extend(vec![0.1; 90]);
        let r = SpectrumResult::from_eigenvalues(Method::Nystrom, 100, &vals, None, 0.0);
        let rep = validate_domain(&d, &[&r], 0.02).unwrap();
        assert!(rep.condition_satisfied);
        assert!(!rep.verdicts[1].passed);
    }
}
