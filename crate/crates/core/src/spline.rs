// SPDX-License-Identifier: MIT OR Apache-2.0

//! Interpolating cubic spline with not-a-knot end conditions.
//!
//! The third derivative is continuous across the second and the penultimate
//! knot, so four or more points drawn from one cubic polynomial reproduce that
//! polynomial everywhere, including outside the knot range. Evaluation beyond
//! the first or last knot continues the outermost cubic piece.

use crate::error::{ImputeError, Result};

/// Minimum knot count for the not-a-knot conditions to be independent.
pub const MIN_SPLINE_POINTS: usize = 4;

#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Fits the spline through `(x[i], y[i])`; `x` must be strictly increasing.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(ImputeError::LengthMismatch {
                left: n,
                right: y.len(),
            });
        }
        if n < MIN_SPLINE_POINTS {
            return Err(ImputeError::SplineTooFewPoints {
                order: 3,
                needed: MIN_SPLINE_POINTS,
                found: n,
            });
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ImputeError::InvalidInput(
                "spline knots must be strictly increasing".into(),
            ));
        }

        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Interior equations i = 1..n-2:
        //   h[i-1] m[i-1] + 2 (h[i-1] + h[i]) m[i] + h[i] m[i+1] = 6 (slope[i] - slope[i-1])
        // with m[0] and m[n-1] eliminated through the not-a-knot conditions
        //   m[0]   = ((h0 + h1) m[1] - h0 m[2]) / h1
        //   m[n-1] = ((hb + ha) m[n-2] - hb m[n-3]) / ha   (ha = h[n-3], hb = h[n-2])
        let size = n - 2;
        let mut sub = vec![0.0; size];
        let mut diag = vec![0.0; size];
        let mut sup = vec![0.0; size];
        let mut rhs = vec![0.0; size];
        for r in 0..size {
            let i = r + 1;
            sub[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        let ha = h[n - 3];
        let hb = h[n - 2];
        sup[0] -= h0 * h0 / h1;
        diag[size - 1] += hb * (ha + hb) / ha;
        sub[size - 1] -= hb * hb / ha;

        let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let mut m = Vec::with_capacity(n);
        m.push(((h0 + h1) * inner[0] - h0 * inner[1]) / h1);
        m.extend_from_slice(&inner);
        m.push(((ha + hb) * inner[size - 1] - hb * inner[size - 2]) / ha);

        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn eval(&self, at: f64) -> f64 {
        let n = self.x.len();
        // piece index: last knot <= at, clamped to the outermost pieces
        let piece = match self.x.partition_point(|&k| k <= at) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let (x0, x1) = (self.x[piece], self.x[piece + 1]);
        let (y0, y1) = (self.y[piece], self.y[piece + 1]);
        let (m0, m1) = (self.m[piece], self.m[piece + 1]);
        let h = x1 - x0;
        let a = x1 - at;
        let b = at - x0;
        m0 * a * a * a / (6.0 * h)
            + m1 * b * b * b / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }
}

/// Thomas algorithm. `sub[0]` and `sup[last]` are ignored.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(ImputeError::Invariant("singular spline system".into()));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return Err(ImputeError::Invariant("singular spline system".into()));
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(x: f64) -> f64 {
        0.5 * x * x * x - 2.0 * x * x + 3.0 * x - 7.0
    }

    #[test]
    fn reproduces_a_cubic_inside_and_outside() {
        for xs in [
            vec![0.0, 1.0, 2.0, 3.0],
            vec![0.0, 1.0, 3.0, 4.0, 7.0, 8.0, 9.0, 12.0],
            vec![2.0, 5.0, 6.0, 10.0, 11.0],
        ] {
            let ys: Vec<f64> = xs.iter().map(|&x| cubic(x)).collect();
            let s = CubicSpline::fit(&xs, &ys).unwrap();
            for t in [-2.0, 0.5, 1.5, 2.5, 4.5, 9.5, 13.0] {
                let expect = cubic(t);
                assert!(
                    (s.eval(t) - expect).abs() <= 1e-9 * expect.abs().max(1.0),
                    "at {t}: {} vs {expect}",
                    s.eval(t)
                );
            }
        }
    }

    #[test]
    fn passes_through_knots() {
        let xs = [0.0, 1.0, 2.0, 4.0, 5.0, 9.0];
        let ys = [1.0, -3.0, 2.0, 8.0, 0.5, 4.0];
        let s = CubicSpline::fit(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert!((s.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            CubicSpline::fit(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(ImputeError::SplineTooFewPoints { found: 3, .. })
        ));
    }
}
