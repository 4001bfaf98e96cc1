//! Single-Gaussian approximation of two-Gaussian superpositions.
//!
//! A superposition `A exp(-(f-a)^2/w^2) + B exp(-(f-b)^2/w^2)` with width large
//! compared to `|b - a|` converges pointwise to a single Gaussian whose center
//! `z = (aA + bB)/(A + B)` can leave `[a, b]` when the coefficients have
//! opposite signs; the narrow regime instead shows separate extrema, and the
//! two regimes are joined by a cusp (for equal coefficients, a pitchfork
//! bifurcation of the extrema). This module carries the closed-form shifts and
//! error laws, a derivative-sign extrema scanner over the `(ratio, width)`
//! plane, and the tail bound limiting which-way attribution of a single
//! reading.

use crate::density::Marginal1D;
use crate::error::{Error, Result};
use num_complex::Complex64;
use statrs::function::erf;

const COEFF_SUM_TOL: f64 = 1e-14;

/// Window scanned for extrema; wide enough to contain the anomalous shifts
/// (-1 and 2) with margin.
pub const SCAN_WINDOW: (f64, f64) = (-5.0, 6.0);
/// Grid step of the sign-change scan, before bisection refinement.
pub const SCAN_STEP: f64 = 1e-3;
/// Bisection tolerance on extremum locations.
pub const LOCATION_TOL: f64 = 1e-10;

/// `A exp(-(f-a)^2/w^2) + B exp(-(f-b)^2/w^2)` with real coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSuperposition {
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub center_a: f64,
    pub center_b: f64,
    pub width: f64,
}

impl RealSuperposition {
    pub fn new(coeff_a: f64, coeff_b: f64, center_a: f64, center_b: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "superposition width must be positive, got {width}"
            )));
        }
        Ok(RealSuperposition {
            coeff_a,
            coeff_b,
            center_a,
            center_b,
            width,
        })
    }

    pub fn value(&self, f: f64) -> f64 {
        let w2 = self.width * self.width;
        self.coeff_a * (-(f - self.center_a).powi(2) / w2).exp()
            + self.coeff_b * (-(f - self.center_b).powi(2) / w2).exp()
    }

    fn derivative(&self, f: f64) -> f64 {
        let w2 = self.width * self.width;
        -2.0 / w2
            * (self.coeff_a * (f - self.center_a) * (-(f - self.center_a).powi(2) / w2).exp()
                + self.coeff_b * (f - self.center_b) * (-(f - self.center_b).powi(2) / w2).exp())
    }

    fn coeff_sum(&self) -> Result<f64> {
        let sum = self.coeff_a + self.coeff_b;
        let scale = self.coeff_a.abs().max(self.coeff_b.abs());
        if sum.abs() <= COEFF_SUM_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroCoefficientSum);
        }
        Ok(sum)
    }

    /// Center of the broad-width single-Gaussian limit:
    /// `(a A + b B)/(A + B)`. Lies outside `[a, b]` when the coefficients
    /// have opposite signs and the opposing one dominates.
    pub fn limit_shift(&self) -> Result<f64> {
        let sum = self.coeff_sum()?;
        Ok((self.center_a * self.coeff_a + self.center_b * self.coeff_b) / sum)
    }

    /// The approximating single Gaussian `(A+B) exp(-(f-z)^2/w^2)`.
    pub fn approx_value(&self, f: f64) -> Result<f64> {
        let sum = self.coeff_sum()?;
        let z = self.limit_shift()?;
        Ok(sum * (-(f - z).powi(2) / (self.width * self.width)).exp())
    }

    /// Leading-order relative error of the single-Gaussian approximation at
    /// `f`: `(b-a)^2 (2 x^2 - 1)/w^2 * |A B/(A+B)^2|` with `x = f/w`.
    pub fn relative_error(&self, f: f64) -> Result<f64> {
        let sum = self.coeff_sum()?;
        if self.value(f) == 0.0 {
            return Err(Error::VanishingSuperposition(f));
        }
        let x = f / self.width;
        let spread = (self.center_b - self.center_a).powi(2);
        Ok(spread * (2.0 * x * x - 1.0) / (self.width * self.width)
            * (self.coeff_a * self.coeff_b / (sum * sum)).abs())
    }

    /// Width-independent gap between the second moments of the superposition
    /// and of its single-Gaussian limit: `A B (a-b)^2 / (A+B)^2`.
    pub fn second_moment_gap(&self) -> Result<f64> {
        let sum = self.coeff_sum()?;
        Ok(self.coeff_a * self.coeff_b * (self.center_a - self.center_b).powi(2) / (sum * sum))
    }
}

/// `|A exp(-(f-a)^2/w^2) + B exp(-(f-b)^2/w^2)|^2` with complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSuperposition {
    pub coeff_a: Complex64,
    pub coeff_b: Complex64,
    pub center_a: f64,
    pub center_b: f64,
    pub width: f64,
}

impl ComplexSuperposition {
    pub fn new(
        coeff_a: Complex64,
        coeff_b: Complex64,
        center_a: f64,
        center_b: f64,
        width: f64,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "superposition width must be positive, got {width}"
            )));
        }
        Ok(ComplexSuperposition {
            coeff_a,
            coeff_b,
            center_a,
            center_b,
            width,
        })
    }

    /// Squared magnitude of the coherent sum.
    pub fn value(&self, f: f64) -> f64 {
        let w2 = self.width * self.width;
        let sum = self.coeff_a * (-(f - self.center_a).powi(2) / w2).exp()
            + self.coeff_b * (-(f - self.center_b).powi(2) / w2).exp();
        sum.norm_sqr()
    }

    fn coeff_sum(&self) -> Result<Complex64> {
        let sum = self.coeff_a + self.coeff_b;
        let scale = self.coeff_a.norm().max(self.coeff_b.norm());
        if sum.norm() <= COEFF_SUM_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroCoefficientSum);
        }
        Ok(sum)
    }

    /// Complex limit shift `(a A + b B)/(A + B)`; the observable peak
    /// displacement is its real part.
    pub fn limit_shift(&self) -> Result<Complex64> {
        let sum = self.coeff_sum()?;
        Ok((self.coeff_a * self.center_a + self.coeff_b * self.center_b) / sum)
    }

    /// Real part of [`limit_shift`](Self::limit_shift): the broad-width peak
    /// location of the squared magnitude.
    pub fn limit_shift_real(&self) -> Result<f64> {
        Ok(self.limit_shift()?.re)
    }

    /// Broad-width approximation `|A+B|^2 exp(-2 (f - Re z)^2 / w^2)`.
    pub fn approx_value(&self, f: f64) -> Result<f64> {
        let sum = self.coeff_sum()?;
        let z = self.limit_shift()?.re;
        Ok(sum.norm_sqr() * (-2.0 * (f - z).powi(2) / (self.width * self.width)).exp())
    }
}

/// Free-function form of [`RealSuperposition::limit_shift`].
pub fn limit_shift_real(s: &RealSuperposition) -> Result<f64> {
    s.limit_shift()
}

/// Free-function form of [`ComplexSuperposition::limit_shift_real`].
pub fn limit_shift_complex(s: &ComplexSuperposition) -> Result<f64> {
    s.limit_shift_real()
}

/// Component-wise limit shift of a two-dimensional superposition:
/// `z_i = Re[(a_i A + b_i B)/(A + B)]`. Real coefficients are the special
/// case of zero imaginary parts.
pub fn limit_shift_2d(
    coeff_a: Complex64,
    coeff_b: Complex64,
    centers_a: [f64; 2],
    centers_b: [f64; 2],
) -> Result<[f64; 2]> {
    let sum = coeff_a + coeff_b;
    let scale = coeff_a.norm().max(coeff_b.norm());
    if sum.norm() <= COEFF_SUM_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroCoefficientSum);
    }
    Ok([
        ((coeff_a * centers_a[0] + coeff_b * centers_b[0]) / sum).re,
        ((coeff_a * centers_a[1] + coeff_b * centers_b[1]) / sum).re,
    ])
}

/// Kind of a stationary point of the superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

impl ExtremumKind {
    pub fn label(self) -> &'static str {
        match self {
            ExtremumKind::Maximum => "max",
            ExtremumKind::Minimum => "min",
        }
    }
}

/// A located extremum of the scanned superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub location: f64,
    pub kind: ExtremumKind,
}

/// All extrema of `exp(-f^2/w^2) + ratio * exp(-(f-1)^2/w^2)` inside
/// [`SCAN_WINDOW`], located by derivative sign changes on a [`SCAN_STEP`] grid
/// and refined by bisection to [`LOCATION_TOL`].
pub fn scan_extrema(ratio: f64, width: f64) -> Result<Vec<Extremum>> {
    let s = RealSuperposition::new(1.0, ratio, 0.0, 1.0, width)?;
    let (lo, hi) = SCAN_WINDOW;
    let steps = ((hi - lo) / SCAN_STEP).round() as usize;
    let mut out = Vec::new();
    let mut prev_f = lo;
    let mut prev_d = s.derivative(lo);
    for n in 1..=steps {
        let f = lo + (hi - lo) * n as f64 / steps as f64;
        let d = s.derivative(f);
        if prev_d != 0.0 && d != 0.0 && prev_d.signum() != d.signum() {
            let location = bisect_derivative(&s, prev_f, f, prev_d);
            let kind = if prev_d > 0.0 {
                ExtremumKind::Maximum
            } else {
                ExtremumKind::Minimum
            };
            out.push(Extremum { location, kind });
        }
        prev_f = f;
        prev_d = d;
    }
    Ok(out)
}

fn bisect_derivative(s: &RealSuperposition, mut lo: f64, mut hi: f64, d_lo: f64) -> f64 {
    let sign_lo = d_lo.signum();
    while hi - lo > LOCATION_TOL {
        let mid = 0.5 * (lo + hi);
        let d = s.derivative(mid);
        if d == 0.0 {
            return mid;
        }
        if d.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Width at which the three extrema of the positive-ratio superposition
/// coalesce into one, located by bisection on the extremum count to 1e-6.
pub fn critical_width(ratio: f64) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "critical width requires a positive ratio, got {ratio}"
        )));
    }
    let (mut lo, mut hi) = (1e-3, 10.0);
    let multimodal = |w: f64| -> Result<bool> { Ok(scan_extrema(ratio, w)?.len() > 1) };
    if !multimodal(lo)? || multimodal(hi)? {
        return Err(Error::NoTransition {
            ratio,
            lo,
            hi,
        });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if multimodal(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of a bifurcation diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub ratio: f64,
    pub width: f64,
    pub location: f64,
    pub kind: ExtremumKind,
}

/// Extrema of the superposition over a grid of `(ratio, width)` columns,
/// ready for CSV export.
#[derive(Debug, Clone)]
pub struct ExtremaDiagram {
    points: Vec<DiagramPoint>,
}

impl ExtremaDiagram {
    pub fn scan(ratios: &[f64], widths: &[f64]) -> Result<Self> {
        let mut points = Vec::new();
        for &ratio in ratios {
            for &width in widths {
                for e in scan_extrema(ratio, width)? {
                    points.push(DiagramPoint {
                        ratio,
                        width,
                        location: e.location,
                        kind: e.kind,
                    });
                }
            }
        }
        Ok(ExtremaDiagram { points })
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    /// Bracket around the extremum-count transition of one ratio column, if
    /// the scanned widths straddle it.
    pub fn transition_bracket(&self, ratio: f64) -> Option<(f64, f64)> {
        let mut columns: Vec<(f64, usize)> = Vec::new();
        for p in self.points.iter().filter(|p| p.ratio == ratio) {
            match columns.last_mut() {
                Some((w, n)) if *w == p.width => *n += 1,
                _ => columns.push((p.width, 1)),
            }
        }
        columns.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        columns
            .windows(2)
            .find(|w| w[0].1 > 1 && w[1].1 == 1)
            .map(|w| (w[0].0, w[1].0))
    }
}

/// Threshold reading and tail bound for attributing a reading to one of two
/// equal Gaussian components separated by `separation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributionBound {
    /// Reading above which the nearer component dominates by at least `1/epsilon`.
    pub threshold: f64,
    /// Upper bound on the probability of such a reading.
    pub bound: f64,
}

/// For the symmetric two-component reading density with component separation
/// `separation` and width `width`, returns the threshold
/// `w^2 |ln eps|/(2 c) + c/2` and the tail bound `erfc((f_eps - c)/w)/2` on the
/// probability of a reading beyond it. The bound vanishes rapidly once the
/// width exceeds the separation: attributable readings stop occurring.
pub fn attribution_bound(width: f64, separation: f64, epsilon: f64) -> Result<AttributionBound> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "width must be positive, got {width}"
        )));
    }
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "separation must be positive, got {separation}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let threshold = width * width * epsilon.ln().abs() / (2.0 * separation) + 0.5 * separation;
    let bound = 0.5 * erf::erfc((threshold - separation) / width);
    Ok(AttributionBound { threshold, bound })
}

/// The symmetric two-component reading density behind [`attribution_bound`],
/// as an exact mixture (components at 0 and `separation`, weight 1/2 each).
pub fn attribution_density(width: f64, separation: f64) -> Result<Marginal1D> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "width must be positive, got {width}"
        )));
    }
    Ok(Marginal1D::new(
        vec![(0.5, 0.0), (0.5, separation)],
        crate::classical::gaussian_sigma(width),
    ))
}
