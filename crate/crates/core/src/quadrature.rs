//! One-dimensional quadrature building blocks: Gauss-Legendre rules,
//! barycentric Lagrange interpolation on their nodes, and product weights
//! for `log|x - x0|` against polynomials on the reference interval.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric weights for interpolation through `nodes`.
    pub bary: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Newton from the Tricomi-type initial guess, nodes ascending.
            let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let bary = (0..n)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - nodes[k] * nodes[k]) * weights[k]).sqrt()
            })
            .collect();
        GaussRule { nodes, weights, bary }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of the Lagrange basis polynomials through the nodes at `x`.
    pub fn lagrange_at(&self, x: f64, out: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(out.len(), n);
        for k in 0..n {
            if x == self.nodes[k] {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[k] = 1.0;
                return;
            }
        }
        let mut denom = 0.0;
        for k in 0..n {
            let t = self.bary[k] / (x - self.nodes[k]);
            out[k] = t;
            denom += t;
        }
        for v in out.iter_mut() {
            *v /= denom;
        }
    }

    /// Product weights `omega` with `sum_k omega_k p(x_k) = int_{-1}^{1} log|x - x0| p(x) dx`,
    /// exact for polynomials `p` of degree below the rule order; `x0` must lie in `(-1, 1)`.
    pub fn log_weights(&self, x0: f64) -> Vec<f64> {
        let n = self.len();
        let moments = log_legendre_moments(n, x0);
        (0..n)
            .map(|k| {
                let p = legendre_values(n, self.nodes[k]);
                let s: f64 = (0..n)
                    .map(|m| (2 * m + 1) as f64 * 0.5 * p[m] * moments[m])
                    .sum();
                self.weights[k] * s
            })
            .collect()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `[P_0(x), ..., P_{n-1}(x)]`.
pub fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let (mut p0, mut p1) = (1.0, x);
    for k in 0..n {
        match k {
            0 => out.push(1.0),
            1 => out.push(x),
            _ => {
                let kf = (k - 1) as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
                out.push(p2);
            }
        }
    }
    out
}

/// `I_m = int_{-1}^{1} log|x - x0| P_m(x) dx` for `m < n`, `x0` in `(-1, 1)`.
///
/// Uses `I_m = 2 (Q_{m+1}(x0) - Q_{m-1}(x0)) / (2m + 1)` with the Legendre
/// functions of the second kind on the cut, whose forward recurrence is stable there.
pub fn log_legendre_moments(n: usize, x0: f64) -> Vec<f64> {
    assert!(x0 > -1.0 && x0 < 1.0, "log moments need an interior point");
    let mut q = Vec::with_capacity(n + 1);
    q.push(0.5 * ((1.0 + x0) / (1.0 - x0)).ln());
    q.push(x0 * q[0] - 1.0);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x0 * q[k] - kf * q[k - 1]) / (kf + 1.0);
        q.push(next);
    }
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        if m == 0 {
            let a = 1.0 + x0;
            let b = 1.0 - x0;
            out.push(a * a.ln() + b * b.ln() - 2.0);
        } else {
            out.push(2.0 * (q[m + 1] - q[m - 1]) / (2 * m + 1) as f64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        for n in [2, 5, 16, 33, 64] {
            let r = GaussRule::new(n);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                assert_abs_diff_eq!(got, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lagrange_reproduces_polynomial() {
        let r = GaussRule::new(12);
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(3) + 0.5;
        let mut l = vec![0.0; 12];
        for &x in &[-0.99, -0.3, 0.0, 0.41, 1.0] {
            r.lagrange_at(x, &mut l);
            let v: f64 = l.iter().zip(&r.nodes).map(|(li, xi)| li * f(*xi)).sum();
            assert_abs_diff_eq!(v, f(x), epsilon = 1e-12);
        }
    }

    /// Brute-force oracle: split at the singularity and grade dyadically toward it.
    fn log_oracle(f: impl Fn(f64) -> f64, x0: f64) -> f64 {
        let g = GaussRule::new(20);
        let mut total = 0.0;
        for (a, b) in [(x0, -1.0), (x0, 1.0)] {
            // integrate from the singular end a toward b
            let mut lo = 0.0;
            let len = (b - a).abs();
            let mut hi = 1.0;
            let mut pieces = vec![];
            for _ in 0..60 {
                lo = hi * 0.5;
                pieces.push((lo, hi));
                hi = lo;
            }
            let _ = lo;
            for (s0, s1) in pieces {
                for (x, w) in g.nodes.iter().zip(&g.weights) {
                    let s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * x;
                    let t = a + (b - a) * s;
                    total += w * 0.5 * (s1 - s0) * len * (len * s).ln() * f(t);
                }
            }
        }
        total
    }

    #[test]
    fn log_weights_match_graded_oracle() {
        let r = GaussRule::new(16);
        let f = |x: f64| 1.0 + x - 2.0 * x * x + 0.3 * x.powi(9) - x.powi(15);
        for &x0 in &[-0.9, -0.2, 0.0, 0.37, r.nodes[3], r.nodes[15]] {
            let w = r.log_weights(x0);
            let got: f64 = w.iter().zip(&r.nodes).map(|(wk, xk)| wk * f(*xk)).sum();
            let want = log_oracle(f, x0);
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }
}
