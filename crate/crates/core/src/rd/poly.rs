use serde::Serialize;

/// Polynomial with nonnegative real coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialBound {
    pub coeffs: Vec<f64>,
}

impl PolynomialBound {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = PolynomialBound { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c1 · r + c0`.
    pub fn linear(c1: f64, c0: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// `r ↦ self(r + s)`, expanded.
    pub fn shift(&self, s: f64) -> Self {
        let step = Self::linear(1.0, s);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, c| acc.mul(&step).add(&Self::constant(*c)))
    }
}

/// `P(r) = 1 + Σ_i P_i(r + 2κ)²`.
pub fn assemble_p(bounds: &[PolynomialBound], kappa: usize) -> PolynomialBound {
    bounds.iter().fold(PolynomialBound::constant(1.0), |acc, b| {
        let s = b.shift(2.0 * kappa as f64);
        acc.add(&s.mul(&s))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembled_values() {
        let p = assemble_p(&[PolynomialBound::linear(1.0, 1.0)], 1);
        assert_eq!(p.eval(2.0), 26.0);
        assert_eq!(p.coeffs, vec![10.0, 6.0, 1.0]);
        let q = assemble_p(&[PolynomialBound::constant(1.0), PolynomialBound::constant(1.0)], 4);
        assert_eq!(q.coeffs, vec![3.0]);
        assert_eq!(assemble_p(&[], 2).coeffs, vec![1.0]);
    }

    #[test]
    fn shift_matches_eval() {
        let p = PolynomialBound::new(vec![1.0, 2.0, 0.5, 3.0]);
        let s = p.shift(1.5);
        for r in [0.0, 1.0, 2.5, 7.0] {
            assert!((s.eval(r) - p.eval(r + 1.5)).abs() < 1e-9);
        }
    }
}
