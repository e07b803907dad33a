//! Parametrized boundary pieces. Every piece is parametrized over `t in [0, 1]`
//! and reports position plus first and second parameter derivatives.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::conformal::MobiusMap;

/// Position and parameter derivatives of a curve at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub z: C64,
    pub dz: C64,
    pub d2z: C64,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.dz.norm()
    }

    pub fn unit_tangent(&self) -> C64 {
        self.dz / self.dz.norm()
    }

    /// Outward normal for a counter-clockwise boundary.
    pub fn outward_normal(&self) -> C64 {
        let t = self.unit_tangent();
        C64::new(t.im, -t.re)
    }

    /// Signed curvature, positive where the curve turns left.
    pub fn curvature(&self) -> f64 {
        (self.dz.conj() * self.d2z).im / self.dz.norm().powi(3)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Piece {
    Line { a: C64, b: C64 },
    /// `z(t) = center + (a - center) e^{i sweep t}`; positive sweep is counter-clockwise.
    Arc { a: C64, center: C64, sweep: f64 },
    /// Closed ellipse traversed counter-clockwise starting on its major axis.
    Ellipse { center: C64, a: f64, b: f64, rotation: f64 },
    /// The base piece traversed backwards.
    Reversed { base: Box<Piece> },
    /// The image of the base piece under a fractional linear map.
    Mapped { base: Box<Piece>, map: MobiusMap },
}

impl Piece {
    /// Circular arc from `a` to `b` with bulge `tan(sweep / 4)`; zero bulge gives a segment.
    pub fn from_bulge(a: C64, b: C64, bulge: f64) -> Piece {
        if bulge == 0.0 {
            return Piece::Line { a, b };
        }
        let sweep = 4.0 * bulge.atan();
        let mid = 0.5 * (a + b);
        let center = mid + C64::new(0.0, 1.0) * (b - a) * 0.5 / (0.5 * sweep).tan();
        Piece::Arc { a, center, sweep }
    }

    /// Circular arc from `a` to `b` leaving `a` along the direction `tangent`.
    pub fn arc_with_start_tangent(a: C64, b: C64, tangent: C64) -> Piece {
        let chord = b - a;
        // sweep is twice the angle from the tangent to the chord
        let half = (chord / tangent).arg();
        let sweep = 2.0 * half;
        if sweep.abs() < 1e-14 {
            Piece::Line { a, b }
        } else {
            Piece::from_bulge(a, b, (sweep / 4.0).tan())
        }
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        match self {
            Piece::Line { a, b } => CurvePoint {
                z: a + (b - a) * t,
                dz: b - a,
                d2z: C64::new(0.0, 0.0),
            },
            Piece::Arc { a, center, sweep } => {
                let r = (a - center) * C64::from_polar(1.0, sweep * t);
                let i = C64::new(0.0, 1.0);
                CurvePoint {
                    z: center + r,
                    dz: i * sweep * r,
                    d2z: -sweep * sweep * r,
                }
            }
            Piece::Ellipse {
                center,
                a,
                b,
                rotation,
            } => {
                let rot = C64::from_polar(1.0, *rotation);
                let w = 2.0 * PI;
                let (s, c) = (w * t).sin_cos();
                CurvePoint {
                    z: center + rot * C64::new(a * c, b * s),
                    dz: rot * C64::new(-a * w * s, b * w * c),
                    d2z: rot * C64::new(-a * w * w * c, -b * w * w * s),
                }
            }
            Piece::Reversed { base } => {
                let p = base.eval(1.0 - t);
                CurvePoint {
                    z: p.z,
                    dz: -p.dz,
                    d2z: p.d2z,
                }
            }
            Piece::Mapped { base, map } => {
                let p = base.eval(t);
                let d1 = map.derivative(p.z);
                let d2 = map.second_derivative(p.z);
                CurvePoint {
                    z: map.apply(p.z),
                    dz: d1 * p.dz,
                    d2z: d2 * p.dz * p.dz + d1 * p.d2z,
                }
            }
        }
    }

    pub fn start(&self) -> C64 {
        match self {
            Piece::Line { a, .. } | Piece::Arc { a, .. } => *a,
            _ => self.eval(0.0).z,
        }
    }

    pub fn end(&self) -> C64 {
        match self {
            Piece::Line { b, .. } => *b,
            _ => self.eval(1.0).z,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Piece::Ellipse { .. } => true,
            Piece::Reversed { base } | Piece::Mapped { base, .. } => base.is_closed(),
            _ => false,
        }
    }

    /// `tan(sweep / 4)` for arcs, zero for segments, `None` otherwise.
    pub fn bulge(&self) -> Option<f64> {
        match self {
            Piece::Line { .. } => Some(0.0),
            Piece::Arc { sweep, .. } => Some((sweep / 4.0).tan()),
            _ => None,
        }
    }

    pub fn reversed(&self) -> Piece {
        match self {
            Piece::Line { a, b } => Piece::Line { a: *b, b: *a },
            Piece::Arc { center, sweep, .. } => Piece::Arc {
                a: self.end(),
                center: *center,
                sweep: -sweep,
            },
            Piece::Reversed { base } => (**base).clone(),
            other => Piece::Reversed {
                base: Box::new(other.clone()),
            },
        }
    }

    /// Image under `map`. Segments and arcs stay segments and arcs; ellipses stay
    /// ellipses under similarities; everything else is wrapped lazily.
    pub fn transform(&self, map: &MobiusMap) -> Piece {
        match self {
            Piece::Line { .. } | Piece::Arc { .. } => circle_image(self, map),
            Piece::Ellipse {
                center,
                a,
                b,
                rotation,
            } if map.is_affine() => {
                let s = map.a / map.d;
                let shift = map.b / map.d;
                Piece::Ellipse {
                    center: s * center + shift,
                    a: a * s.norm(),
                    b: b * s.norm(),
                    rotation: rotation + s.arg(),
                }
            }
            Piece::Reversed { base } => Piece::Reversed {
                base: Box::new(base.transform(map)),
            },
            Piece::Mapped { base, map: inner } => Piece::Mapped {
                base: base.clone(),
                map: map.compose(inner),
            },
            other => Piece::Mapped {
                base: Box::new(other.clone()),
                map: *map,
            },
        }
    }

    /// Arclength by composite Gauss quadrature.
    pub fn length(&self) -> f64 {
        match self {
            Piece::Line { a, b } => (b - a).norm(),
            Piece::Arc { a, center, sweep } => (a - center).norm() * sweep.abs(),
            _ => {
                let rule = crate::quadrature::GaussRule::new(24);
                let m = 64;
                let mut s = 0.0;
                for k in 0..m {
                    let (t0, t1) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
                    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                        let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                        s += w * 0.5 * (t1 - t0) * self.eval(t).speed();
                    }
                }
                s
            }
        }
    }

    pub fn sample(&self, n: usize) -> Vec<C64> {
        (0..=n).map(|k| self.eval(k as f64 / n as f64).z).collect()
    }
}

/// Exact image of a segment or arc: a segment or arc through the mapped points.
fn circle_image(piece: &Piece, map: &MobiusMap) -> Piece {
    const SAMPLES: usize = 16;
    let pts: Vec<C64> = (0..=SAMPLES)
        .map(|k| map.apply(piece.eval(k as f64 / SAMPLES as f64).z))
        .collect();
    let a = pts[0];
    let b = pts[SAMPLES];
    let m = pts[SAMPLES / 2];
    let scale = (b - a).norm().max((m - a).norm());
    let cross = ((m - a).conj() * (b - a)).im;
    if cross.abs() <= 1e-13 * scale * scale {
        return Piece::Line { a, b };
    }
    let center = circumcenter(a, m, b);
    let mut sweep = 0.0;
    for w in pts.windows(2) {
        sweep += ((w[1] - center) / (w[0] - center)).arg();
    }
    Piece::Arc { a, center, sweep }
}

pub(crate) fn circumcenter(a: C64, b: C64, c: C64) -> C64 {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let bb = b.norm_sqr();
    let cc = c.norm_sqr();
    a + C64::new((c.im * bb - b.im * cc) / d, (b.re * cc - c.re * bb) / d)
}
