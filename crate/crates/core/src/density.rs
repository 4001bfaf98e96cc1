//! Shared reading-density machinery.
//!
//! Both the stochastic and the amplitude model produce reading densities whose
//! one-dimensional marginals reduce to signed mixtures of equal-width normal
//! densities (cross terms between shifted Gaussians are again Gaussians, at the
//! midpoint, damped by the overlap factor). [`Marginal1D`] carries that reduced
//! form and gives exact values, CDFs and moments; the [`ReadingDensity`] trait
//! is the common surface the exporters and samplers consume.

use crate::error::Result;
use crate::pointer::Slot;
use statrs::function::erf;

/// A one-dimensional reading marginal: `sum_i coeff_i * N(f; center_i, sigma)`.
///
/// Coefficients may be negative (interference terms) but sum to one for a
/// normalized density.
#[derive(Debug, Clone)]
pub struct Marginal1D {
    components: Vec<(f64, f64)>,
    sigma: f64,
}

impl Marginal1D {
    pub fn new(components: Vec<(f64, f64)>, sigma: f64) -> Self {
        Marginal1D { components, sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(|(c, _)| c).sum()
    }

    pub fn value(&self, f: f64) -> f64 {
        let norm = 1.0 / (self.sigma * (2.0 * std::f64::consts::PI).sqrt());
        self.components
            .iter()
            .map(|&(c, m)| {
                let u = (f - m) / self.sigma;
                c * norm * (-0.5 * u * u).exp()
            })
            .sum()
    }

    pub fn cdf(&self, f: f64) -> f64 {
        self.components
            .iter()
            .map(|&(c, m)| {
                let u = (f - m) / (self.sigma * std::f64::consts::SQRT_2);
                c * 0.5 * (1.0 + erf::erf(u))
            })
            .sum()
    }

    /// First moment; exact for a normalized mixture.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|&(c, m)| c * m).sum()
    }

    /// Probability of a reading in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf(lo)
    }
}

/// Common read-only surface of classical and quantum reading densities.
pub trait ReadingDensity {
    /// Finite-width slots carrying continuous readings, in slot order.
    fn continuous_slots(&self) -> &[Slot];
    /// Widths parallel to [`continuous_slots`](Self::continuous_slots).
    fn continuous_widths(&self) -> &[f64];
    /// Accurate slots carrying exact integer readings, in slot order.
    fn accurate_slots(&self) -> &[Slot];
    /// Distinct accurate-reading vectors with positive mass, sorted.
    fn discrete_outcomes(&self) -> Vec<Vec<u8>>;
    /// Probability of an accurate-reading vector.
    fn discrete_mass(&self, discrete: &[u8]) -> f64;
    /// Joint value: continuous density at `continuous`, times the probability
    /// of the accurate readings `discrete`.
    fn value_given(&self, continuous: &[f64], discrete: &[u8]) -> f64;
    /// Density of the continuous readings, accurate readings summed out.
    fn value(&self, continuous: &[f64]) -> f64 {
        self.discrete_outcomes()
            .iter()
            .map(|d| self.value_given(continuous, d))
            .sum()
    }
    /// Smallest and largest term shift on a continuous slot.
    fn shift_range(&self, slot: Slot) -> Result<(f64, f64)>;
    /// Exact one-dimensional marginal on a continuous slot.
    fn marginal_1d(&self, slot: Slot) -> Result<Marginal1D>;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn marginal_value_cdf_and_mean_agree_with_quadrature() {
        let m = Marginal1D::new(vec![(0.7, 0.0), (0.3, 1.0)], 0.8);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
        let mass = quad::integrate(&|f| m.value(f), -12.0, 13.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-10);
        let mean = quad::integrate(&|f| f * m.value(f), -12.0, 13.0, 1e-12);
        assert!((mean - m.mean()).abs() < 1e-10);
        let cdf = quad::integrate(&|f| m.value(f), -12.0, 0.4, 1e-12);
        assert!((cdf - m.cdf(0.4)).abs() < 1e-10);
    }

    #[test]
    fn signed_components_stay_consistent() {
        // interference-like mixture: positive total mass, locally reduced density
        let m = Marginal1D::new(vec![(0.8, 0.0), (0.8, 1.0), (-0.6, 0.5)], 1.0);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
        let mass = quad::integrate(&|f| m.value(f), -15.0, 16.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((m.cdf(100.0) - 1.0).abs() < 1e-12);
    }
}
