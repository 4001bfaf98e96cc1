//! Stochastic two-state network monitored by inaccurate pointers.
//!
//! A system enters one of two states with weights `w`, hops `input -> early ->
//! late -> output` through four time slices (the middle leg is frozen to the
//! identity, so `early == late` on every travelled route), and is watched by up
//! to five Gaussian pointers. Conditioning on exact input/output readings
//! (pre-/post-selection) leaves a weighted Gaussian-product mixture over the
//! remaining readings; the closed forms here are exact for every width,
//! including the accurate (delta-reading) and decoupled limits.
//!
//! Pointer reading distributions follow the unit-integral convention
//! `int G df = 1`, i.e. `G(f) = (pi w^2)^(-1/2) exp(-f^2/w^2)`.

use crate::density::{Marginal1D, ReadingDensity};
use crate::error::{Error, Result, MIN_SELECTION_PROBABILITY};
use crate::pointer::{PointerConfig, PointerSet, PointerWidth, Slot, ALL_SLOTS};

const ROW_SUM_TOL: f64 = 1e-12;

/// Reading density of one classical pointer of width `w`, centered at zero.
pub fn gaussian_value(x: f64, width: f64) -> f64 {
    let w2 = width * width;
    (std::f64::consts::PI * w2).sqrt().recip() * (-(x * x) / w2).exp()
}

/// Standard deviation of the classical reading distribution: `width / sqrt(2)`.
pub fn gaussian_sigma(width: f64) -> f64 {
    width / std::f64::consts::SQRT_2
}

/// One of the sixteen index combinations `(input, early, late, output)`;
/// only the eight with `early == late` can be travelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassicalPath {
    pub input: u8,
    pub early: u8,
    pub late: u8,
    pub output: u8,
}

impl ClassicalPath {
    pub fn new(input: u8, early: u8, late: u8, output: u8) -> Result<Self> {
        for (name, v) in [
            ("input", input),
            ("early", early),
            ("late", late),
            ("output", output),
        ] {
            if v > 1 {
                return Err(Error::InvalidArgument(format!(
                    "path index `{name}` must be 0 or 1, got {v}"
                )));
            }
        }
        Ok(ClassicalPath {
            input,
            early,
            late,
            output,
        })
    }

    /// The middle leg is the identity, so only connected paths are travelled.
    pub fn is_connected(&self) -> bool {
        self.early == self.late
    }

    /// All sixteen index combinations.
    pub fn all() -> impl Iterator<Item = ClassicalPath> {
        (0u8..16).map(|n| ClassicalPath {
            input: n & 1,
            early: (n >> 1) & 1,
            late: (n >> 2) & 1,
            output: (n >> 3) & 1,
        })
    }

    /// The eight travellable routes (`early == late`).
    pub fn connected() -> impl Iterator<Item = ClassicalPath> {
        Self::all().filter(ClassicalPath::is_connected)
    }
}

/// Input weights plus the two free transition legs of the network.
///
/// `leg1[i][j]` is the probability of hopping from input state `i` to state
/// `j`, `leg3[k][l]` from state `k` to output `l`; each row sums to one. The
/// middle leg is fixed to the identity and not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    input_weights: [f64; 2],
    leg1: [[f64; 2]; 2],
    leg3: [[f64; 2]; 2],
}

fn check_row_stochastic(name: &str, m: &[[f64; 2]; 2]) -> Result<()> {
    for (r, row) in m.iter().enumerate() {
        for &p in row {
            if !(0.0..=1.0 + ROW_SUM_TOL).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "{name}[{r}] entry {p} outside [0, 1]"
                )));
            }
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidModel(format!(
                "{name} row {r} sums to {s}, expected 1"
            )));
        }
    }
    Ok(())
}

impl TransitionModel {
    pub fn new(input_weights: [f64; 2], leg1: [[f64; 2]; 2], leg3: [[f64; 2]; 2]) -> Result<Self> {
        for &w in &input_weights {
            if !(0.0..=1.0 + ROW_SUM_TOL).contains(&w) || !w.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "input weight {w} outside [0, 1]"
                )));
            }
        }
        let s = input_weights[0] + input_weights[1];
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidModel(format!(
                "input weights sum to {s}, expected 1"
            )));
        }
        check_row_stochastic("leg1", &leg1)?;
        check_row_stochastic("leg3", &leg3)?;
        Ok(TransitionModel {
            input_weights,
            leg1,
            leg3,
        })
    }

    pub fn input_weights(&self) -> [f64; 2] {
        self.input_weights
    }

    pub fn leg1(&self) -> [[f64; 2]; 2] {
        self.leg1
    }

    pub fn leg3(&self) -> [[f64; 2]; 2] {
        self.leg3
    }

    /// Probability of one route, input weight excluded:
    /// `p(output <- late) * [early == late] * p(early <- input)`.
    pub fn path_probability(&self, path: ClassicalPath) -> f64 {
        if !path.is_connected() {
            return 0.0;
        }
        self.leg1[path.input as usize][path.early as usize]
            * self.leg3[path.late as usize][path.output as usize]
    }

    /// The two route probabilities of the pre-/post-selected two-way problem:
    /// `(P_0, P_1)` with `P_j` the probability of `input 0 -> j -> j -> output 1`.
    pub fn two_way_route_probs(&self) -> (f64, f64) {
        (
            self.leg1[0][0] * self.leg3[0][1],
            self.leg1[0][1] * self.leg3[1][1],
        )
    }
}

/// Free-function form of [`TransitionModel::path_probability`].
pub fn path_probability(model: &TransitionModel, path: ClassicalPath) -> f64 {
    model.path_probability(path)
}

/// One mixture component: a product of per-slot Gaussians displaced by
/// `shifts`, with exact integer readings on the accurate slots.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureTerm {
    pub weight: f64,
    pub shifts: Vec<f64>,
    pub discrete: Vec<u8>,
}

/// Weighted Gaussian-product mixture over the active pointer readings.
#[derive(Debug, Clone)]
pub struct GaussianMixtureDensity {
    terms: Vec<MixtureTerm>,
    continuous_slots: Vec<Slot>,
    widths: Vec<f64>,
    accurate_slots: Vec<Slot>,
    acceptance_probability: f64,
}

impl GaussianMixtureDensity {
    fn assemble(
        mut terms: Vec<MixtureTerm>,
        continuous_slots: Vec<Slot>,
        widths: Vec<f64>,
        accurate_slots: Vec<Slot>,
        acceptance_probability: f64,
    ) -> Result<Self> {
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if total < MIN_SELECTION_PROBABILITY {
            return Err(Error::ZeroNormSelection(total));
        }
        for t in &mut terms {
            t.weight /= total;
        }
        terms.retain(|t| t.weight > 0.0);
        // canonical order, merging exact duplicates (shifts are small integers)
        terms.sort_by(|a, b| {
            a.discrete
                .cmp(&b.discrete)
                .then_with(|| a.shifts.partial_cmp(&b.shifts).unwrap())
        });
        let mut merged: Vec<MixtureTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.shifts == t.shifts && last.discrete == t.discrete => {
                    last.weight += t.weight;
                }
                _ => merged.push(t),
            }
        }
        Ok(GaussianMixtureDensity {
            terms: merged,
            continuous_slots,
            widths,
            accurate_slots,
            acceptance_probability,
        })
    }

    /// Build a mixture from explicit parts, normalizing the weights.
    ///
    /// Used when a decohered coherent density is reinterpreted classically.
    pub(crate) fn from_parts(
        terms: Vec<MixtureTerm>,
        continuous_slots: Vec<Slot>,
        widths: Vec<f64>,
        accurate_slots: Vec<Slot>,
        acceptance_probability: f64,
    ) -> Result<Self> {
        Self::assemble(
            terms,
            continuous_slots,
            widths,
            accurate_slots,
            acceptance_probability,
        )
    }

    pub fn terms(&self) -> &[MixtureTerm] {
        &self.terms
    }

    /// Probability that a raw trial passes all selection filters.
    pub fn acceptance_probability(&self) -> f64 {
        self.acceptance_probability
    }

    pub fn width_of(&self, slot: Slot) -> Result<f64> {
        self.continuous_slots
            .iter()
            .position(|&s| s == slot)
            .map(|i| self.widths[i])
            .ok_or(Error::UnknownSlot(slot))
    }

    /// Integrate out every reading except `keep`.
    pub fn marginal(&self, keep: Slot) -> Result<GaussianMixtureDensity> {
        if let Some(i) = self.continuous_slots.iter().position(|&s| s == keep) {
            let terms = self
                .terms
                .iter()
                .map(|t| MixtureTerm {
                    weight: t.weight,
                    shifts: vec![t.shifts[i]],
                    discrete: vec![],
                })
                .collect();
            GaussianMixtureDensity::assemble(
                terms,
                vec![keep],
                vec![self.widths[i]],
                vec![],
                self.acceptance_probability,
            )
        } else if let Some(i) = self.accurate_slots.iter().position(|&s| s == keep) {
            let terms = self
                .terms
                .iter()
                .map(|t| MixtureTerm {
                    weight: t.weight,
                    shifts: vec![],
                    discrete: vec![t.discrete[i]],
                })
                .collect();
            GaussianMixtureDensity::assemble(
                terms,
                vec![],
                vec![],
                vec![keep],
                self.acceptance_probability,
            )
        } else {
            Err(Error::UnknownSlot(keep))
        }
    }

    /// Closed-form first moment of one reading.
    pub fn mean_reading(&self, slot: Slot) -> Result<f64> {
        if let Some(i) = self.continuous_slots.iter().position(|&s| s == slot) {
            Ok(self.terms.iter().map(|t| t.weight * t.shifts[i]).sum())
        } else if let Some(i) = self.accurate_slots.iter().position(|&s| s == slot) {
            Ok(self
                .terms
                .iter()
                .map(|t| t.weight * t.discrete[i] as f64)
                .sum())
        } else {
            Err(Error::UnknownSlot(slot))
        }
    }

    /// Condition on an exact reading of an accurate slot; the slot leaves the
    /// density and the acceptance probability picks up the outcome mass.
    pub fn condition_on(&self, slot: Slot, outcome: u8) -> Result<GaussianMixtureDensity> {
        let i = self
            .accurate_slots
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::UnknownSlot(slot))?;
        let mass: f64 = self
            .terms
            .iter()
            .filter(|t| t.discrete[i] == outcome)
            .map(|t| t.weight)
            .sum();
        let terms = self
            .terms
            .iter()
            .filter(|t| t.discrete[i] == outcome)
            .map(|t| {
                let mut discrete = t.discrete.clone();
                discrete.remove(i);
                MixtureTerm {
                    weight: t.weight,
                    shifts: t.shifts.clone(),
                    discrete,
                }
            })
            .collect();
        let mut accurate = self.accurate_slots.clone();
        accurate.remove(i);
        GaussianMixtureDensity::assemble(
            terms,
            self.continuous_slots.clone(),
            self.widths.clone(),
            accurate,
            self.acceptance_probability * mass,
        )
    }
}

impl ReadingDensity for GaussianMixtureDensity {
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
        self.terms
            .iter()
            .filter(|t| t.discrete == discrete)
            .map(|t| t.weight)
            .sum()
    }

    fn value_given(&self, continuous: &[f64], discrete: &[u8]) -> f64 {
        assert_eq!(continuous.len(), self.continuous_slots.len());
        assert_eq!(discrete.len(), self.accurate_slots.len());
        self.terms
            .iter()
            .filter(|t| t.discrete == discrete)
            .map(|t| {
                t.weight
                    * t.shifts
                        .iter()
                        .zip(&self.widths)
                        .zip(continuous)
                        .map(|((s, w), f)| gaussian_value(f - s, *w))
                        .product::<f64>()
            })
            .sum()
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
        let components = self
            .terms
            .iter()
            .map(|t| (t.weight, t.shifts[i]))
            .collect();
        Ok(Marginal1D::new(components, gaussian_sigma(self.widths[i])))
    }
}

fn check_selection_outcome(name: &str, outcome: Option<u8>) -> Result<()> {
    if let Some(v) = outcome {
        if v > 1 {
            return Err(Error::InvalidArgument(format!(
                "{name} outcome must be 0 or 1, got {v}"
            )));
        }
    }
    Ok(())
}

fn check_selection_pointer(
    name: &str,
    slot: Slot,
    selected: bool,
    pointers: &PointerSet,
) -> Result<()> {
    if selected && pointers.width_of(slot).is_finite() {
        return Err(Error::InvalidPointer(format!(
            "{name} requires an accurate pointer on slot {slot}, found a finite width"
        )));
    }
    Ok(())
}

/// Joint reading density of the configured pointers, optionally conditioned on
/// an exact input reading (`preselect`) and an exact output reading
/// (`postselect`). Conditioned slots leave the density; the returned mixture is
/// normalized, with the selection probability available separately.
pub fn joint_density(
    model: &TransitionModel,
    pointers: &PointerSet,
    preselect: Option<u8>,
    postselect: Option<u8>,
) -> Result<GaussianMixtureDensity> {
    check_selection_outcome("preselect", preselect)?;
    check_selection_outcome("postselect", postselect)?;
    check_selection_pointer("preselection", Slot::Input, preselect.is_some(), pointers)?;
    check_selection_pointer("postselection", Slot::Output, postselect.is_some(), pointers)?;

    let mut continuous_slots = Vec::new();
    let mut widths = Vec::new();
    let mut accurate_slots = Vec::new();
    for slot in ALL_SLOTS {
        let conditioned = (slot == Slot::Input && preselect.is_some())
            || (slot == Slot::Output && postselect.is_some());
        if conditioned {
            continue;
        }
        match pointers.width_of(slot) {
            PointerWidth::Finite(w) => {
                continuous_slots.push(slot);
                widths.push(w);
            }
            PointerWidth::Accurate => accurate_slots.push(slot),
            PointerWidth::Decoupled => {}
        }
    }

    let w = model.input_weights();
    let mut terms = Vec::new();
    let mut total = 0.0;
    for path in ClassicalPath::connected() {
        if preselect.is_some_and(|i| i != path.input) {
            continue;
        }
        if postselect.is_some_and(|l| l != path.output) {
            continue;
        }
        let weight = w[path.input as usize] * model.path_probability(path);
        total += weight;
        if weight == 0.0 {
            continue;
        }
        terms.push(MixtureTerm {
            weight,
            shifts: continuous_slots
                .iter()
                .map(|s| s.displacement(path) as f64)
                .collect(),
            discrete: accurate_slots.iter().map(|s| s.displacement(path)).collect(),
        });
    }
    if total < MIN_SELECTION_PROBABILITY {
        return Err(Error::ZeroNormSelection(total));
    }
    GaussianMixtureDensity::assemble(terms, continuous_slots, widths, accurate_slots, total)
}

/// Free-function form of [`GaussianMixtureDensity::marginal`].
pub fn marginal_density(
    density: &GaussianMixtureDensity,
    keep: Slot,
) -> Result<GaussianMixtureDensity> {
    density.marginal(keep)
}

/// Free-function form of [`GaussianMixtureDensity::mean_reading`].
pub fn mean_reading(density: &GaussianMixtureDensity, slot: Slot) -> Result<f64> {
    density.mean_reading(slot)
}

/// Large-width displacement centers of the two branch pointers:
/// `(P1/(P0+P1), P0/(P0+P1))`.
pub fn two_pointer_limit_shifts(p0: f64, p1: f64) -> Result<(f64, f64)> {
    if !(p0 >= 0.0 && p1 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "route probabilities must be nonnegative, got ({p0}, {p1})"
        )));
    }
    let total = p0 + p1;
    if total < MIN_SELECTION_PROBABILITY {
        return Err(Error::ZeroNormSelection(total));
    }
    Ok((p1 / total, p0 / total))
}

/// Pre-/post-selected density of the two branch pointers (slots 2 and 5) at a
/// common width, the third slot decoupled.
pub fn two_pointer_density(model: &TransitionModel, width: f64) -> Result<GaussianMixtureDensity> {
    let pointers = PointerSet::new(vec![
        PointerConfig::finite(Slot::PathOne, width)?,
        PointerConfig::finite(Slot::PathZero, width)?,
    ])?;
    joint_density(model, &pointers, Some(0), Some(1))
}

/// Two finite branch pointers plus an accurate control pointer at the third
/// time slice. Readings of the control slot are exact integers; integrating it
/// out recovers [`two_pointer_density`] unchanged.
pub fn control_pointer_density(
    model: &TransitionModel,
    width_path_one: f64,
    width_path_zero: f64,
) -> Result<GaussianMixtureDensity> {
    let pointers = PointerSet::new(vec![
        PointerConfig::finite(Slot::PathOne, width_path_one)?,
        PointerConfig::accurate(Slot::Control),
        PointerConfig::finite(Slot::PathZero, width_path_zero)?,
    ])?;
    joint_density(model, &pointers, Some(0), Some(1))
}

/// One-dimensional reading density of the branch-1 pointer in the two-way
/// problem (other pointers decoupled). An accurate width yields point masses.
pub fn two_way_reading_density(
    model: &TransitionModel,
    width: PointerWidth,
) -> Result<GaussianMixtureDensity> {
    let pointers = PointerSet::new(vec![PointerConfig::new(Slot::PathOne, width)?])?;
    joint_density(model, &pointers, Some(0), Some(1))
}

/// Route probabilities inferred from a mean shift and a selection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredPathProbs {
    pub p0: f64,
    pub p1: f64,
    /// True when both recovered values lie in `[0, 1]`.
    pub valid: bool,
}

/// Recover unperturbed route probabilities from the mean shift `z` and the
/// selection probability `w1`: `P1 = z*w1`, `P0 = (1-z)*w1`. Out-of-range
/// results are returned with `valid == false` rather than as errors.
pub fn recover_path_probs(z: f64, w1: f64) -> Result<RecoveredPathProbs> {
    if !(0.0..=1.0).contains(&w1) || !w1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "selection probability must lie in [0, 1], got {w1}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mean shift must be finite, got {z}"
        )));
    }
    let p1 = z * w1;
    let p0 = (1.0 - z) * w1;
    let valid = (0.0..=1.0).contains(&p0) && (0.0..=1.0).contains(&p1);
    Ok(RecoveredPathProbs { p0, p1, valid })
}
