use serde::{Deserialize, Serialize};

/// `c1 · r + c2`, fitted to dominate a set of observations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearEnvelope {
    pub c1: f64,
    pub c2: f64,
}

impl LinearEnvelope {
    /// Least-squares slope (clamped at zero), then the smallest intercept
    /// for which every observation lies on or below the line.
    ///
    /// With fewer than two distinct abscissae the slope is zero.
    pub fn fit(points: &[(f64, f64)]) -> Self {
        if points.is_empty() {
            return LinearEnvelope { c1: 0.0, c2: 0.0 };
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let c1 = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
        let c2 = points
            .iter()
            .map(|&(x, y)| y - c1 * x)
            .fold(f64::NEG_INFINITY, f64::max);
        LinearEnvelope { c1, c2 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.c1 * r + self.c2
    }

    pub fn dominates(&self, points: &[(f64, f64)]) -> bool {
        points.iter().all(|&(x, y)| y <= self.eval(x) + 1e-9 * (1.0 + y.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_dominates() {
        let pts = [(1.0, 3.0), (2.0, 4.0), (3.0, 7.0), (4.0, 8.0)];
        let e = LinearEnvelope::fit(&pts);
        assert!(e.c1 > 0.0);
        assert!(e.dominates(&pts));
        assert!(pts.iter().any(|&(x, y)| (e.eval(x) - y).abs() < 1e-12));
    }

    #[test]
    fn single_point() {
        let e = LinearEnvelope::fit(&[(0.0, 5.0)]);
        assert_eq!((e.c1, e.c2), (0.0, 5.0));
    }

    #[test]
    fn decreasing_data_gets_flat_line() {
        let e = LinearEnvelope::fit(&[(1.0, 5.0), (2.0, 1.0)]);
        assert_eq!((e.c1, e.c2), (0.0, 5.0));
    }
}
