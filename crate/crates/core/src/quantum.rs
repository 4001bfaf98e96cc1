//! Two-level system monitored by von Neumann Gaussian pointers.
//!
//! The qubit runs from a fixed input state through two branch states to a fixed
//! post-selected output state; each route carries a complex amplitude built
//! from three leg matrices (the middle leg is diagonal, so the branch index is
//! conserved). A pointer coupled impulsively to an occupancy projector is
//! translated by one unit on the projected branch and left untouched otherwise,
//! so the joint reading density is a squared coherent sum of Gaussian products.
//! Interference between the branches survives exactly to the extent that the
//! shifted and unshifted pointer states overlap: a weakly coupled pointer and
//! an inaccurate one are the same thing (rescaling the reading by the width
//! turns one description into the other), so only the width knob is exposed.
//!
//! Pointer wave functions follow the unit-square-integral convention
//! `int G^2 df = 1`, i.e. `G(f) = (2/(pi w^2))^(1/4) exp(-f^2/w^2)`.

use crate::classical::{ClassicalPath, GaussianMixtureDensity, MixtureTerm, RecoveredPathProbs};
use crate::density::{Marginal1D, ReadingDensity};
use crate::error::{Error, Result, MIN_SELECTION_PROBABILITY};
use crate::pointer::{PointerConfig, PointerSet, PointerWidth, Slot};
use num_complex::Complex64;

const UNITARITY_TOL: f64 = 1e-12;

/// Pointer wave function of width `w`, centered at zero.
pub fn amplitude_gaussian(x: f64, width: f64) -> f64 {
    let w2 = width * width;
    (2.0 / (std::f64::consts::PI * w2)).powf(0.25) * (-(x * x) / w2).exp()
}

/// Standard deviation of the squared wave function: `width / 2`.
pub fn reading_sigma(width: f64) -> f64 {
    0.5 * width
}

/// Overlap between a pointer's shifted and unshifted states,
/// `exp(-1/(2 width^2))`; exactly 0 when accurate, exactly 1 when decoupled.
pub fn pointer_overlap(width: PointerWidth) -> f64 {
    width.overlap()
}

/// Complex leg amplitudes of the monitored qubit.
///
/// `leg1[i][j]` is the amplitude from input state `i` to branch `j`, `leg3[k][l]`
/// from branch `k` to output `l`; both legs are unitary. The middle leg is
/// diagonal (`leg2_diag[j]`, modulus at most one) with structural zeros off the
/// diagonal, so a route must keep its branch index.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeModel {
    leg1: [[Complex64; 2]; 2],
    leg2_diag: [Complex64; 2],
    leg3: [[Complex64; 2]; 2],
}

fn check_unitary(name: &str, m: &[[Complex64; 2]; 2]) -> Result<()> {
    let dot = |a: &[Complex64; 2], b: &[Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let d00 = dot(&m[0], &m[0]).re - 1.0;
    let d11 = dot(&m[1], &m[1]).re - 1.0;
    let d01 = dot(&m[0], &m[1]);
    if d00.abs() > UNITARITY_TOL || d11.abs() > UNITARITY_TOL || d01.norm() > UNITARITY_TOL {
        return Err(Error::InvalidModel(format!(
            "{name} is not unitary within {UNITARITY_TOL:e}"
        )));
    }
    Ok(())
}

impl AmplitudeModel {
    pub fn new(
        leg1: [[Complex64; 2]; 2],
        leg2_diag: [Complex64; 2],
        leg3: [[Complex64; 2]; 2],
    ) -> Result<Self> {
        check_unitary("leg1", &leg1)?;
        check_unitary("leg3", &leg3)?;
        for (j, a) in leg2_diag.iter().enumerate() {
            if a.norm() > 1.0 + UNITARITY_TOL {
                return Err(Error::InvalidModel(format!(
                    "leg2_diag[{j}] has modulus {} > 1",
                    a.norm()
                )));
            }
        }
        Ok(AmplitudeModel {
            leg1,
            leg2_diag,
            leg3,
        })
    }

    /// Real rotation legs with angles `theta1`, `theta3` and an identity middle
    /// leg; a convenient family of exactly unitary models.
    pub fn from_rotations(theta1: f64, theta3: f64) -> Self {
        let rot = |t: f64| {
            let (s, c) = t.sin_cos();
            [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ]
        };
        AmplitudeModel {
            leg1: rot(theta1),
            leg2_diag: [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            leg3: rot(theta3),
        }
    }

    pub fn leg1(&self) -> [[Complex64; 2]; 2] {
        self.leg1
    }

    pub fn leg2_diag(&self) -> [Complex64; 2] {
        self.leg2_diag
    }

    pub fn leg3(&self) -> [[Complex64; 2]; 2] {
        self.leg3
    }

    /// Amplitude of one route; zero when the branch index is not conserved.
    pub fn path_amplitude(&self, path: ClassicalPath) -> Complex64 {
        if !path.is_connected() {
            return Complex64::ZERO;
        }
        self.leg1[path.input as usize][path.early as usize]
            * self.leg2_diag[path.early as usize]
            * self.leg3[path.late as usize][path.output as usize]
    }

    /// The two post-selected route amplitudes (input 0, output 1).
    pub fn postselected_amplitudes(&self) -> PathAmplitudes {
        PathAmplitudes {
            zero: self.path_amplitude(ClassicalPath::new(0, 0, 0, 1).unwrap()),
            one: self.path_amplitude(ClassicalPath::new(0, 1, 1, 1).unwrap()),
        }
    }

    /// Relative route amplitude of branch 1; its real part is the asymptotic
    /// mean shift of a broad branch-1 pointer.
    pub fn weak_value(&self) -> Result<WeakValue> {
        self.postselected_amplitudes().weak_value()
    }

    /// Closed-form mean reading of the branch-1 pointer, other pointers
    /// decoupled. Exact for every width regime.
    pub fn mean_reading(&self, width: PointerWidth) -> Result<f64> {
        self.postselected_amplitudes().mean_reading(width)
    }

    /// Probability of the exact readings `(mid, output)` when the branch and
    /// output pointers are accurate (input fixed to 0).
    pub fn which_path_probability(&self, mid: u8, output: u8) -> Result<f64> {
        if mid > 1 || output > 1 {
            return Err(Error::InvalidArgument(format!(
                "readings must be 0 or 1, got ({mid}, {output})"
            )));
        }
        Ok(self
            .path_amplitude(ClassicalPath::new(0, mid, mid, output).unwrap())
            .norm_sqr())
    }

    /// Route probabilities inferred from the weak-value shift and the
    /// undisturbed post-selection probability; flagged invalid when either
    /// falls outside `[0, 1]`.
    pub fn anomalous_path_prob(&self) -> Result<RecoveredPathProbs> {
        self.postselected_amplitudes().anomalous_path_prob()
    }
}

/// The pair of post-selected route amplitudes.
///
/// Reading densities and weak values depend on the model only through this
/// pair (up to a common scale and phase), so it can also be constructed
/// directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAmplitudes {
    /// Amplitude of the branch-0 route.
    pub zero: Complex64,
    /// Amplitude of the branch-1 route.
    pub one: Complex64,
}

impl PathAmplitudes {
    pub fn new(zero: Complex64, one: Complex64) -> Self {
        PathAmplitudes { zero, one }
    }

    fn sum(&self) -> Complex64 {
        self.zero + self.one
    }

    pub fn weak_value(&self) -> Result<WeakValue> {
        let sum = self.sum();
        let scale = self.zero.norm().max(self.one.norm());
        if sum.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroAmplitudeSum);
        }
        Ok(WeakValue {
            value: self.one / sum,
        })
    }

    /// Normalization of the post-selected reading density for given overlaps
    /// of the three middle pointers; equals the probability of reaching the
    /// post-selected state with the pointers in place.
    pub fn norm_with_overlaps(&self, j2: f64, j3: f64, j5: f64) -> f64 {
        self.zero.norm_sqr()
            + self.one.norm_sqr()
            + 2.0 * j2 * j3 * j5 * (self.zero.conj() * self.one).re
    }

    /// Mean reading of the branch-1 pointer, other pointers decoupled:
    /// `(|A1|^2 + J |A0||A1| cos) / (|A0|^2 + |A1|^2 + 2 J |A0||A1| cos)`.
    pub fn mean_reading(&self, width: PointerWidth) -> Result<f64> {
        let j2 = width.overlap();
        let cross = (self.zero.conj() * self.one).re;
        let denom = self.zero.norm_sqr() + self.one.norm_sqr() + 2.0 * j2 * cross;
        if denom < MIN_SELECTION_PROBABILITY {
            return Err(Error::ZeroNormSelection(denom));
        }
        Ok((self.one.norm_sqr() + j2 * cross) / denom)
    }

    pub fn anomalous_path_prob(&self) -> Result<RecoveredPathProbs> {
        let z = self.weak_value()?.value.re;
        let w1 = self.sum().norm_sqr().min(1.0);
        crate::classical::recover_path_probs(z, w1)
    }
}

/// A relative route amplitude `A_1 / (A_0 + A_1)`.
///
/// The full complex ratio is retained; the observable pointer shift is its
/// real part. The two branch ratios sum to one exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue {
    pub value: Complex64,
}

impl WeakValue {
    /// Complementary ratio `A_0 / (A_0 + A_1) = 1 - value`.
    pub fn complement(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.value
    }

    /// Real shifts of the branch-1 and branch-0 pointers in the broad limit.
    pub fn shift_pair(&self) -> (f64, f64) {
        (self.value.re, 1.0 - self.value.re)
    }
}

/// One coherent component: a complex coefficient on a product of per-slot
/// pointer wave functions displaced by `shifts`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTerm {
    pub coeff: Complex64,
    pub shifts: Vec<f64>,
    pub discrete: Vec<u8>,
}

/// Squared coherent sum of Gaussian products over the active readings.
///
/// Terms with identical accurate readings interfere; terms whose accurate
/// readings differ add incoherently (the exact readings distinguish them).
#[derive(Debug, Clone)]
pub struct CoherentGaussianDensity {
    terms: Vec<CoherentTerm>,
    continuous_slots: Vec<Slot>,
    widths: Vec<f64>,
    accurate_slots: Vec<Slot>,
    norm: f64,
}

impl CoherentGaussianDensity {
    fn assemble(
        mut terms: Vec<CoherentTerm>,
        continuous_slots: Vec<Slot>,
        widths: Vec<f64>,
        accurate_slots: Vec<Slot>,
    ) -> Result<Self> {
        terms.retain(|t| t.coeff.norm_sqr() > 0.0);
        terms.sort_by(|a, b| {
            a.discrete
                .cmp(&b.discrete)
                .then_with(|| a.shifts.partial_cmp(&b.shifts).unwrap())
        });
        let mut density = CoherentGaussianDensity {
            terms,
            continuous_slots,
            widths,
            accurate_slots,
            norm: 1.0,
        };
        let norm = density.unnormalized_mass(None);
        if norm < MIN_SELECTION_PROBABILITY {
            return Err(Error::ZeroNormSelection(norm));
        }
        density.norm = norm;
        Ok(density)
    }

    /// Sum of pairwise overlap products, optionally restricted to one
    /// accurate-reading group. With `None` this is the density normalization.
    fn unnormalized_mass(&self, group: Option<&[u8]>) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            if group.is_some_and(|g| t.discrete != g) {
                continue;
            }
            for u in &self.terms {
                if u.discrete != t.discrete {
                    continue;
                }
                let mut overlap = (t.coeff * u.coeff.conj()).re;
                for ((st, su), w) in t.shifts.iter().zip(&u.shifts).zip(&self.widths) {
                    let d = st - su;
                    overlap *= (-d * d / (2.0 * w * w)).exp();
                }
                total += overlap;
            }
        }
        total
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    /// Normalization of the squared coherent sum; for a post-selected density
    /// this is the probability of the selection succeeding.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn width_of(&self, slot: Slot) -> Result<f64> {
        self.continuous_slots
            .iter()
            .position(|&s| s == slot)
            .map(|i| self.widths[i])
            .ok_or(Error::UnknownSlot(slot))
    }

    /// Condition on an exact reading of an accurate slot.
    pub fn condition_on(&self, slot: Slot, outcome: u8) -> Result<CoherentGaussianDensity> {
        let i = self
            .accurate_slots
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::UnknownSlot(slot))?;
        let terms = self
            .terms
            .iter()
            .filter(|t| t.discrete[i] == outcome)
            .map(|t| {
                let mut discrete = t.discrete.clone();
                discrete.remove(i);
                CoherentTerm {
                    coeff: t.coeff,
                    shifts: t.shifts.clone(),
                    discrete,
                }
            })
            .collect();
        let mut accurate = self.accurate_slots.clone();
        accurate.remove(i);
        CoherentGaussianDensity::assemble(
            terms,
            self.continuous_slots.clone(),
            self.widths.clone(),
            accurate,
        )
    }

    /// Reinterpret a fully decohered density (at most one term per
    /// accurate-reading group) as a classical mixture over the same readings.
    ///
    /// Classical widths are the quantum ones divided by sqrt(2), which makes
    /// the reading distributions identical function-for-function across the
    /// two normalization conventions.
    pub fn as_incoherent_mixture(&self) -> Result<GaussianMixtureDensity> {
        for t in &self.terms {
            for u in &self.terms {
                if !std::ptr::eq(t, u) && t.discrete == u.discrete {
                    return Err(Error::CoherentCrossTerms);
                }
            }
        }
        let terms: Vec<MixtureTerm> = self
            .terms
            .iter()
            .map(|t| MixtureTerm {
                weight: t.coeff.norm_sqr() / self.norm,
                shifts: t.shifts.clone(),
                discrete: t.discrete.clone(),
            })
            .collect();
        let widths = self
            .widths
            .iter()
            .map(|w| w * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        GaussianMixtureDensity::from_parts(
            terms,
            self.continuous_slots.clone(),
            widths,
            self.accurate_slots.clone(),
            self.norm,
        )
    }
}

impl ReadingDensity for CoherentGaussianDensity {
    fn continuous_slots(&self) -> &[Slot] {
        &self.continuous_slots
    }

    fn continuous_widths(&self) -> &[f64] {
        &self.widths
    }

    fn accurate_slots(&self) -> &[Slot] {
        &self.accurate_slots
    }

    fn discrete_outcomes(&self) -> Vec<Vec<u8>> {
        let mut outs: Vec<Vec<u8>> = self.terms.iter().map(|t| t.discrete.clone()).collect();
        outs.sort();
        outs.dedup();
        outs
    }

    fn discrete_mass(&self, discrete: &[u8]) -> f64 {
        self.unnormalized_mass(Some(discrete)) / self.norm
    }

    fn value_given(&self, continuous: &[f64], discrete: &[u8]) -> f64 {
        assert_eq!(continuous.len(), self.continuous_slots.len());
        assert_eq!(discrete.len(), self.accurate_slots.len());
        let sum: Complex64 = self
            .terms
            .iter()
            .filter(|t| t.discrete == discrete)
            .map(|t| {
                t.coeff
                    * t.shifts
                        .iter()
                        .zip(&self.widths)
                        .zip(continuous)
                        .map(|((s, w), f)| amplitude_gaussian(f - s, *w))
                        .product::<f64>()
            })
            .sum();
        sum.norm_sqr() / self.norm
    }

    fn shift_range(&self, slot: Slot) -> Result<(f64, f64)> {
        let i = self
            .continuous_slots
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::UnknownSlot(slot))?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            lo = lo.min(t.shifts[i]);
            hi = hi.max(t.shifts[i]);
        }
        Ok((lo, hi))
    }

    fn marginal_1d(&self, slot: Slot) -> Result<Marginal1D> {
        let i = self
            .continuous_slots
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::UnknownSlot(slot))?;
        let mut components = Vec::new();
        for t in &self.terms {
            for u in &self.terms {
                if u.discrete != t.discrete {
                    continue;
                }
                // every slot contributes its pair overlap; the kept slot's own
                // pair additionally collapses to a midpoint Gaussian
                let mut coeff = (t.coeff * u.coeff.conj()).re / self.norm;
                for ((st, su), w) in t.shifts.iter().zip(&u.shifts).zip(&self.widths) {
                    let d = st - su;
                    coeff *= (-d * d / (2.0 * w * w)).exp();
                }
                components.push((coeff, 0.5 * (t.shifts[i] + u.shifts[i])));
            }
        }
        Ok(Marginal1D::new(components, reading_sigma(self.widths[i])))
    }
}

/// Reading density of the middle pointers (slots 2, 3, 5) for the
/// pre-/post-selected qubit. Input and output pointers are the fixed accurate
/// selections and may not be given finite widths.
pub fn postselected_density(
    model: &AmplitudeModel,
    pointers: &PointerSet,
) -> Result<CoherentGaussianDensity> {
    postselected_density_from_amplitudes(model.postselected_amplitudes(), pointers)
}

/// Same as [`postselected_density`], for a directly supplied amplitude pair.
pub fn postselected_density_from_amplitudes(
    amplitudes: PathAmplitudes,
    pointers: &PointerSet,
) -> Result<CoherentGaussianDensity> {
    for slot in [Slot::Input, Slot::Output] {
        if pointers.width_of(slot).is_finite() {
            return Err(Error::InvalidPointer(format!(
                "slot {slot} is a fixed selection and must stay accurate"
            )));
        }
    }
    let mut continuous_slots = Vec::new();
    let mut widths = Vec::new();
    let mut accurate_slots = Vec::new();
    for slot in [Slot::PathOne, Slot::Control, Slot::PathZero] {
        match pointers.width_of(slot) {
            PointerWidth::Finite(w) => {
                continuous_slots.push(slot);
                widths.push(w);
            }
            PointerWidth::Accurate => accurate_slots.push(slot),
            PointerWidth::Decoupled => {}
        }
    }
    accurate_slots.sort();
    let mut terms = Vec::new();
    for (branch, coeff) in [(0u8, amplitudes.zero), (1u8, amplitudes.one)] {
        let path = ClassicalPath::new(0, branch, branch, 1).unwrap();
        terms.push(CoherentTerm {
            coeff,
            shifts: continuous_slots
                .iter()
                .map(|s| s.displacement(path) as f64)
                .collect(),
            discrete: accurate_slots.iter().map(|s| s.displacement(path)).collect(),
        });
    }
    CoherentGaussianDensity::assemble(terms, continuous_slots, widths, accurate_slots)
}

/// Coherent density of the two branch pointers at a common width, the control
/// pointer decoupled.
pub fn two_pointer_density(model: &AmplitudeModel, width: f64) -> Result<CoherentGaussianDensity> {
    two_pointer_density_from_amplitudes(model.postselected_amplitudes(), width)
}

/// Same as [`two_pointer_density`], for a directly supplied amplitude pair.
pub fn two_pointer_density_from_amplitudes(
    amplitudes: PathAmplitudes,
    width: f64,
) -> Result<CoherentGaussianDensity> {
    let pointers = PointerSet::new(vec![
        PointerConfig::finite(Slot::PathOne, width)?,
        PointerConfig::finite(Slot::PathZero, width)?,
    ])?;
    postselected_density_from_amplitudes(amplitudes, &pointers)
}

/// Two finite branch pointers plus an accurate control pointer.
///
/// The accurate pointer destroys the interference: the result is an incoherent
/// two-component mixture whose control readings are exact, and its marginal
/// over the control reading is the classical two-pointer density with route
/// probabilities `|A_j|^2` — not the coherent density the branch pointers show
/// when the control pointer is absent.
pub fn control_pointer_density(
    model: &AmplitudeModel,
    width: f64,
) -> Result<CoherentGaussianDensity> {
    control_pointer_density_from_amplitudes(model.postselected_amplitudes(), width)
}

/// Same as [`control_pointer_density`], for a directly supplied amplitude pair.
pub fn control_pointer_density_from_amplitudes(
    amplitudes: PathAmplitudes,
    width: f64,
) -> Result<CoherentGaussianDensity> {
    let pointers = PointerSet::new(vec![
        PointerConfig::finite(Slot::PathOne, width)?,
        PointerConfig::accurate(Slot::Control),
        PointerConfig::finite(Slot::PathZero, width)?,
    ])?;
    postselected_density_from_amplitudes(amplitudes, &pointers)
}

/// Free-function form of [`AmplitudeModel::path_amplitude`].
pub fn path_amplitude(model: &AmplitudeModel, path: ClassicalPath) -> Complex64 {
    model.path_amplitude(path)
}

/// Free-function form of [`AmplitudeModel::weak_value`].
pub fn weak_value(model: &AmplitudeModel) -> Result<WeakValue> {
    model.weak_value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::TransitionModel;
    use crate::quad;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Rotation legs giving post-selected amplitudes (1/sqrt(10), -2/sqrt(10)),
    /// the ratio A0 = -A1/2 regime with weak-value shifts (2, -1).
    fn anomalous_model() -> AmplitudeModel {
        AmplitudeModel::from_rotations(
            std::f64::consts::FRAC_PI_4,
            (-0.5f64).atan(),
        )
    }

    /// Positive real amplitudes: theta1, theta3 in (-pi/2, 0).
    fn positive_model() -> AmplitudeModel {
        AmplitudeModel::from_rotations(-0.7, -0.9)
    }

    fn identity_legs() -> AmplitudeModel {
        AmplitudeModel::new(
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            [c(1.0, 0.0), c(1.0, 0.0)],
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_unitary_legs() {
        let bad = [[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let good = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(AmplitudeModel::new(bad, [c(1.0, 0.0); 2], good).is_err());
        assert!(AmplitudeModel::new(good, [c(1.2, 0.0), c(1.0, 0.0)], good).is_err());
    }

    #[test]
    fn branch_change_has_zero_amplitude() {
        let m = anomalous_model();
        let p = ClassicalPath::new(0, 0, 1, 1).unwrap();
        assert_eq!(m.path_amplitude(p), Complex64::ZERO);
    }

    #[test]
    fn identity_legs_give_unit_amplitude() {
        let m = identity_legs();
        let p = ClassicalPath::new(0, 0, 0, 0).unwrap();
        assert_eq!(m.path_amplitude(p), c(1.0, 0.0));
    }

    #[test]
    fn anomalous_model_amplitudes_by_direct_product() {
        let m = anomalous_model();
        let amps = m.postselected_amplitudes();
        // oracle: multiply the leg entries by hand
        let l1 = m.leg1();
        let l3 = m.leg3();
        let a0 = l1[0][0] * l3[0][1];
        let a1 = l1[0][1] * l3[1][1];
        assert_relative_eq!(amps.zero.re, a0.re, epsilon = 1e-15);
        assert_relative_eq!(amps.one.re, a1.re, epsilon = 1e-15);
        assert_relative_eq!(amps.zero.re, 1.0 / 10.0f64.sqrt(), epsilon = 1e-13);
        assert_relative_eq!(amps.one.re, -2.0 / 10.0f64.sqrt(), epsilon = 1e-13);
        // the defining ratio
        assert_relative_eq!((amps.zero / amps.one).re, -0.5, epsilon = 1e-13);
    }

    #[test]
    fn overlap_matches_quadrature() {
        let j = pointer_overlap(PointerWidth::Finite(1.0));
        let numeric = quad::integrate(
            &|f| amplitude_gaussian(f, 1.0) * amplitude_gaussian(f - 1.0, 1.0),
            -12.0,
            13.0,
            1e-13,
        );
        assert!((j - numeric).abs() < 1e-10);
        assert_eq!(pointer_overlap(PointerWidth::Decoupled), 1.0);
        assert_eq!(pointer_overlap(PointerWidth::Accurate), 0.0);
    }

    #[test]
    fn norm_endpoints() {
        let amps = anomalous_model().postselected_amplitudes();
        let incoherent = amps.zero.norm_sqr() + amps.one.norm_sqr();
        let coherent = (amps.zero + amps.one).norm_sqr();
        assert_relative_eq!(incoherent, 0.5, epsilon = 1e-13);
        assert_relative_eq!(coherent, 0.1, epsilon = 1e-13);

        // decoupled: norm is the coherent endpoint
        let d = postselected_density_from_amplitudes(amps, &PointerSet::default());
        // with every pointer decoupled the density has no variables but a norm
        let d = d.unwrap();
        assert_relative_eq!(d.norm(), coherent, epsilon = 1e-13);

        // accurate branch pointer: discrete readings with renormalized masses
        let pointers =
            PointerSet::new(vec![PointerConfig::accurate(Slot::PathOne)]).unwrap();
        let d = postselected_density_from_amplitudes(amps, &pointers).unwrap();
        assert_relative_eq!(d.norm(), incoherent, epsilon = 1e-13);
        assert_relative_eq!(d.discrete_mass(&[0]), 0.2, epsilon = 1e-13);
        assert_relative_eq!(d.discrete_mass(&[1]), 0.8, epsilon = 1e-13);
    }

    #[test]
    fn norm_matches_quadrature() {
        let m = positive_model();
        let pointers = PointerSet::new(vec![
            PointerConfig::finite(Slot::PathOne, 1.3).unwrap(),
            PointerConfig::finite(Slot::Control, 0.9).unwrap(),
            PointerConfig::finite(Slot::PathZero, 2.1).unwrap(),
        ])
        .unwrap();
        let d = postselected_density(&m, &pointers).unwrap();
        let amps = m.postselected_amplitudes();
        let expected = amps.norm_with_overlaps(
            PointerWidth::Finite(1.3).overlap(),
            PointerWidth::Finite(0.9).overlap(),
            PointerWidth::Finite(2.1).overlap(),
        );
        assert_relative_eq!(d.norm(), expected, epsilon = 1e-13);

        // quadrature of the unnormalized 3-D density
        let windows = [(-11.0, 12.0), (-8.0, 9.0), (-17.0, 18.0)];
        let mass = quad::integrate_nd(&|p| d.value(p), &windows, 1e-10);
        assert!((mass - 1.0).abs() < 1e-9, "normalized mass {mass}");
    }

    #[test]
    fn weak_value_examples() {
        let wv = anomalous_model().weak_value().unwrap();
        let (z2, z5) = wv.shift_pair();
        assert_relative_eq!(z2, 2.0, epsilon = 1e-12);
        assert_relative_eq!(z5, -1.0, epsilon = 1e-12);

        let wv = PathAmplitudes::new(c(0.6, 0.0), c(0.0, 0.0)).weak_value();
        assert_relative_eq!(wv.unwrap().value.re, 0.0, epsilon = 1e-15);

        let wv = PathAmplitudes::new(c(0.3, 0.2), c(0.3, 0.2)).weak_value().unwrap();
        assert_relative_eq!(wv.value.re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(wv.value.im, 0.0, epsilon = 1e-14);

        let degenerate = PathAmplitudes::new(c(0.5, 0.1), c(-0.5, -0.1)).weak_value();
        assert!(matches!(degenerate, Err(Error::ZeroAmplitudeSum)));
    }

    #[test]
    fn shift_pair_sums_to_one() {
        for (t1, t3) in [(0.3, 1.1), (-0.8, 0.4), (2.0, -2.5), (0.77, 0.77)] {
            let m = AmplitudeModel::from_rotations(t1, t3);
            if let Ok(wv) = m.weak_value() {
                let (z2, z5) = wv.shift_pair();
                assert!((z2 + z5 - 1.0).abs() < 1e-12);
                let pair_sum = wv.value + wv.complement();
                assert!((pair_sum.re - 1.0).abs() < 1e-12 && pair_sum.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_reading_limits_and_quadrature() {
        let amps = anomalous_model().postselected_amplitudes();
        // decoupled limit: the weak-value shift, here the anomalous 2
        assert_relative_eq!(
            amps.mean_reading(PointerWidth::Decoupled).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        // accurate limit: plain renormalized route probability 4/5
        assert_relative_eq!(
            amps.mean_reading(PointerWidth::Accurate).unwrap(),
            0.8,
            epsilon = 1e-12
        );
        // interior widths match the quadrature of f * rho(f)
        for width in [0.5, 2.0, 10.0] {
            let pointers =
                PointerSet::new(vec![PointerConfig::finite(Slot::PathOne, width).unwrap()])
                    .unwrap();
            let d = postselected_density_from_amplitudes(amps, &pointers).unwrap();
            let window = 1.0 + 8.0 * width;
            let numeric = quad::integrate(&|f| f * d.value(&[f]), -window, window, 1e-13);
            let closed = amps.mean_reading(PointerWidth::Finite(width)).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-9,
                "width {width}: closed {closed} vs quadrature {numeric}"
            );
        }
    }

    #[test]
    fn mean_reading_interpolates_monotonically() {
        let amps = positive_model().postselected_amplitudes();
        let accurate = amps.mean_reading(PointerWidth::Accurate).unwrap();
        let broad = amps.mean_reading(PointerWidth::Decoupled).unwrap();
        let mut previous = accurate;
        for width in [0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
            let z = amps.mean_reading(PointerWidth::Finite(width)).unwrap();
            assert!(
                (z - previous) * (broad - accurate) >= -1e-12,
                "width {width} broke monotone interpolation"
            );
            previous = z;
        }
        assert!((previous - broad).abs() < 1e-4);
    }

    #[test]
    fn two_pointer_density_shapes() {
        // single surviving route: exact Gaussian product at (1, 0)
        let amps = PathAmplitudes::new(c(0.0, 0.0), c(0.7, 0.0));
        let d = two_pointer_density_from_amplitudes(amps, 2.0).unwrap();
        assert_eq!(d.terms().len(), 1);
        let expected = |f2: f64, f5: f64| {
            amplitude_gaussian(f2 - 1.0, 2.0).powi(2) * amplitude_gaussian(f5, 2.0).powi(2)
        };
        for (f2, f5) in [(0.0, 0.0), (1.0, 0.0), (1.5, -0.4), (-2.0, 3.0)] {
            assert_relative_eq!(d.value(&[f2, f5]), expected(f2, f5), epsilon = 1e-13);
        }

        // anomalous regime: the density near (2, -1) dominates the route centers
        let d = two_pointer_density(&anomalous_model(), 10.0).unwrap();
        let at_shift = d.value(&[2.0, -1.0]);
        assert!(at_shift > d.value(&[1.0, 0.0]));
        assert!(at_shift > d.value(&[0.0, 1.0]));
    }

    #[test]
    fn control_pointer_destroys_interference() {
        let m = anomalous_model();
        let d = control_pointer_density(&m, 10.0).unwrap();
        assert_eq!(d.accurate_slots(), &[Slot::Control]);
        assert_relative_eq!(d.discrete_mass(&[0]), 0.2, epsilon = 1e-13);
        assert_relative_eq!(d.discrete_mass(&[1]), 0.8, epsilon = 1e-13);

        // conditioning on the control reading 1 leaves one Gaussian product at (1, 0)
        let cond = d.condition_on(Slot::Control, 1).unwrap();
        assert_eq!(cond.terms().len(), 1);
        assert_eq!(cond.terms()[0].shifts, vec![1.0, 0.0]);

        // the control marginal is the classical two-pointer density with
        // route probabilities |A_j|^2 = (0.1, 0.4)
        // (classical width = quantum / sqrt(2))
        let mixture = d.as_incoherent_mixture().unwrap();
        let classical = TransitionModel::new(
            [1.0, 0.0],
            [[0.5, 0.5], [0.5, 0.5]],
            [[0.8, 0.2], [0.2, 0.8]],
        )
        .unwrap();
        assert_eq!(classical.two_way_route_probs(), (0.1, 0.4));
        let classical_density = crate::classical::control_pointer_density(
            &classical,
            10.0 * std::f64::consts::FRAC_1_SQRT_2,
            10.0 * std::f64::consts::FRAC_1_SQRT_2,
        )
        .unwrap();
        for (f2, f5) in [(0.0, 1.0), (1.0, 0.0), (0.5, 0.5), (2.0, -1.0), (-3.0, 4.0)] {
            for outcome in [[0u8], [1u8]] {
                let q = mixture.value_given(&[f2, f5], &outcome);
                let c = classical_density.value_given(&[f2, f5], &outcome);
                assert!(
                    (q - c).abs() < 1e-12,
                    "({f2}, {f5}, {outcome:?}): quantum {q} vs classical {c}"
                );
            }
        }
    }

    #[test]
    fn incoherent_conversion_requires_decoherence() {
        let d = two_pointer_density(&anomalous_model(), 10.0).unwrap();
        assert!(matches!(
            d.as_incoherent_mixture(),
            Err(Error::CoherentCrossTerms)
        ));
    }

    #[test]
    fn which_path_examples() {
        let m = anomalous_model();
        let amps = m.postselected_amplitudes();
        assert_relative_eq!(
            m.which_path_probability(1, 1).unwrap(),
            amps.one.norm_sqr(),
            epsilon = 1e-14
        );

        // a leg-2 block makes branch 0 unreachable
        let blocked = AmplitudeModel::new(
            m.leg1(),
            [c(0.0, 0.0), c(1.0, 0.0)],
            m.leg3(),
        )
        .unwrap();
        assert_eq!(blocked.which_path_probability(0, 1).unwrap(), 0.0);

        // unitary legs with unimodular middle leg: outcome probabilities sum to 1
        let mut total = 0.0;
        for mid in 0..2u8 {
            for output in 0..2u8 {
                total += m.which_path_probability(mid, output).unwrap();
            }
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn anomalous_path_probabilities() {
        let r = anomalous_model().anomalous_path_prob().unwrap();
        assert_relative_eq!(r.p1, 0.2, epsilon = 1e-12);
        assert_relative_eq!(r.p0, -0.1, epsilon = 1e-12);
        assert!(!r.valid);

        let r = positive_model().anomalous_path_prob().unwrap();
        assert!(r.valid);

        let r = PathAmplitudes::new(c(0.4, 0.0), c(0.0, 0.0))
            .anomalous_path_prob()
            .unwrap();
        assert_relative_eq!(r.p1, 0.0, epsilon = 1e-15);
        assert!(r.valid);
    }

    #[test]
    fn densities_are_invariant_under_global_phase() {
        let m = anomalous_model();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = AmplitudeModel::new(
            [
                [m.leg1()[0][0] * phase, m.leg1()[0][1] * phase],
                [m.leg1()[1][0] * phase, m.leg1()[1][1] * phase],
            ],
            m.leg2_diag(),
            m.leg3(),
        )
        .unwrap();
        let a = two_pointer_density(&m, 3.0).unwrap();
        let b = two_pointer_density(&rotated, 3.0).unwrap();
        assert_relative_eq!(a.norm(), b.norm(), epsilon = 1e-13);
        for (f2, f5) in [(0.0, 1.0), (1.3, -0.2), (0.5, 0.5)] {
            assert_relative_eq!(a.value(&[f2, f5]), b.value(&[f2, f5]), epsilon = 1e-13);
        }
        let (za, _) = m.weak_value().unwrap().shift_pair();
        let (zb, _) = rotated.weak_value().unwrap().shift_pair();
        assert_relative_eq!(za, zb, epsilon = 1e-13);
    }

    #[test]
    fn marginal_matches_quadrature() {
        let d = two_pointer_density(&anomalous_model(), 4.0).unwrap();
        let marg = d.marginal_1d(Slot::PathOne).unwrap();
        for f2 in [-3.0, 0.0, 0.5, 1.0, 2.0, 5.5] {
            let numeric = quad::integrate(&|f5| d.value(&[f2, f5]), -35.0, 36.0, 1e-13);
            assert!(
                (marg.value(f2) - numeric).abs() < 1e-10,
                "f2 = {f2}: marginal {} vs quadrature {numeric}",
                marg.value(f2)
            );
        }
        assert!((marg.total_mass() - 1.0).abs() < 1e-12);
    }
}
