//! Monotone cubic Hermite curves in (ln t, ln value) coordinates.

use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant y(x) with node slopes; linear
/// extrapolation in (x, y) beyond the nodes, i.e. power-law tails.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogCurve {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl LogLogCurve {
    /// Slopes default to the shape-preserving (PCHIP) estimate.
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: Option<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::invalid("curve needs at least two nodes of matching length"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("curve abscissae must be strictly increasing"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("curve nodes must be finite"));
        }
        let d = match d {
            Some(d) => {
                if d.len() != x.len() || d.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("curve slopes must be finite and match nodes"));
                }
                d
            }
            None => pchip_slopes(&x, &y),
        };
        Ok(Self { x, y, d })
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }
    pub fn ys(&self) -> &[f64] {
        &self.y
    }
    pub fn slopes(&self) -> &[f64] {
        &self.d
    }
    pub fn len(&self) -> usize {
        self.x.len()
    }
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }
    pub fn y_range(&self) -> (f64, f64) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    fn cell(&self, xq: f64) -> usize {
        let k = self.x.partition_point(|v| *v <= xq);
        k.clamp(1, self.x.len() - 1) - 1
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.y[0] + self.d[0] * (xq - self.x[0]);
        }
        if xq >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (xq - self.x[n - 1]);
        }
        let i = self.cell(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.d[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
            + (t3 - t2) * h * self.d[i + 1]
    }

    pub fn slope(&self, xq: f64) -> f64 {
        let n = self.x.len();
        if xq <= self.x[0] {
            return self.d[0];
        }
        if xq >= self.x[n - 1] {
            return self.d[n - 1];
        }
        let i = self.cell(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) * (self.y[i] - self.y[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.d[i]
            + (3.0 * t2 - 2.0 * t) * self.d[i + 1]
    }

    /// Smallest x with eval(x) ≥ yq for a nondecreasing curve, by bisection on the
    /// bracketing cell; extrapolates linearly outside the node range.
    pub fn inverse(&self, yq: f64) -> f64 {
        let n = self.x.len();
        if yq <= self.y[0] {
            if self.d[0] > 0.0 {
                return self.x[0] + (yq - self.y[0]) / self.d[0];
            }
            return self.x[0];
        }
        if yq > self.y[n - 1] {
            if self.d[n - 1] > 0.0 {
                return self.x[n - 1] + (yq - self.y[n - 1]) / self.d[n - 1];
            }
            return f64::INFINITY;
        }
        let k = self.y.partition_point(|v| *v < yq).clamp(1, n - 1);
        let (mut lo, mut hi) = (self.x[k - 1], self.x[k]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) >= yq {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Resample on a uniform x grid with at most `max_nodes` nodes and spacing ≤ `dx`.
    pub fn resample(&self, dx: f64, max_nodes: usize) -> Self {
        let (a, b) = self.x_range();
        let mut m = ((b - a) / dx).ceil() as usize + 1;
        m = m.clamp(2, max_nodes.max(2));
        let xs: Vec<f64> = (0..m)
            .map(|i| a + (b - a) * i as f64 / (m - 1) as f64)
            .collect();
        let ys = xs.iter().map(|x| self.eval(*x)).collect();
        let ds = xs.iter().map(|x| self.slope(*x)).collect();
        Self {
            x: xs,
            y: ys,
            d: ds,
        }
    }
}

/// Fritsch–Carlson style monotone slopes (weighted harmonic mean).
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![del[0], del[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if del[k - 1] * del[k] <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > (3.0 * d0).abs() {
        3.0 * d0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubic_with_exact_slopes() {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
        let f = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x + 1.0;
        let df = |x: f64| 0.9 * x * x - 2.0 * x + 2.0;
        let c = LogLogCurve::new(
            x.clone(),
            x.iter().map(|v| f(*v)).collect(),
            Some(x.iter().map(|v| df(*v)).collect()),
        )
        .unwrap();
        for q in [0.1, 1.23, 2.9, 3.4] {
            assert!((c.eval(q) - f(q)).abs() < 1e-12);
            assert!((c.slope(q) - df(q)).abs() < 1e-11);
        }
    }

    #[test]
    fn linear_extrapolation_outside_nodes() {
        let c = LogLogCurve::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 4.0], None).unwrap();
        assert!((c.eval(3.0) - 6.0).abs() < 1e-14);
        assert!((c.eval(-1.0) + 2.0).abs() < 1e-14);
        assert!((c.inverse(5.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_nodes() {
        assert!(LogLogCurve::new(vec![0.0, 0.0], vec![1.0, 2.0], None).is_err());
    }
}
