//! Trial sampling and empirical validation.
//!
//! Classical trials draw a route through the network and add Gaussian pointer
//! noise; quantum trials are drawn from the coherent reading density by
//! rejection sampling (quantum theory supplies the density, not a trajectory
//! mechanism, so quantum records carry no ground-truth route). Every trial gets
//! its own deterministic RNG stream derived from `(seed, trial index)`, so
//! serial and parallel executions produce bit-identical trials.

use crate::classical::{ClassicalPath, TransitionModel};
use crate::density::ReadingDensity;
use crate::error::{Error, Result};
use crate::pointer::{PointerSet, PointerWidth, Slot, ALL_SLOTS};
use crate::quantum::CoherentGaussianDensity;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use std::collections::BTreeMap;

/// A recorded pointer reading: continuous for finite widths, an exact integer
/// for accurate pointers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Reading {
    Continuous(f64),
    Discrete(u8),
}

impl Reading {
    pub fn as_f64(self) -> f64 {
        match self {
            Reading::Continuous(f) => f,
            Reading::Discrete(d) => d as f64,
        }
    }
}

/// One experimental trial: the readings of every coupled pointer, whether the
/// trial passed the selection filters, and (classical trials only) the route
/// actually taken — ground truth for tests, hidden from estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub readings: BTreeMap<Slot, Reading>,
    pub selected: bool,
    pub path: Option<ClassicalPath>,
}

impl TrialRecord {
    pub fn reading(&self, slot: Slot) -> Option<f64> {
        self.readings.get(&slot).map(|r| r.as_f64())
    }
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

fn draw_binary(rng: &mut ChaCha8Rng, p_one: f64) -> u8 {
    if rng.random::<f64>() < p_one {
        1
    } else {
        0
    }
}

/// Sample `n` classical trials. Each trial draws an input state, a route, and
/// the pointer noise; selection filters compare the exact input/output states
/// against `preselect`/`postselect` and set the `selected` flag (no trials are
/// discarded). Pointers on selection slots must not have finite widths.
pub fn sample_classical(
    model: &TransitionModel,
    pointers: &PointerSet,
    preselect: Option<u8>,
    postselect: Option<u8>,
    n: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if n == 0 {
        return Err(Error::InvalidArgument("trial count must be >= 1".into()));
    }
    if preselect.is_some() && pointers.width_of(Slot::Input).is_finite() {
        return Err(Error::InvalidPointer(
            "preselection requires an accurate input pointer".into(),
        ));
    }
    if postselect.is_some() && pointers.width_of(Slot::Output).is_finite() {
        return Err(Error::InvalidPointer(
            "postselection requires an accurate output pointer".into(),
        ));
    }
    let w = model.input_weights();
    let leg1 = model.leg1();
    let leg3 = model.leg3();
    let mut out = Vec::with_capacity(n);
    for index in 0..n {
        let mut rng = trial_rng(seed, index as u64);
        let input = draw_binary(&mut rng, w[1]);
        let early = draw_binary(&mut rng, leg1[input as usize][1]);
        let late = early;
        let output = draw_binary(&mut rng, leg3[late as usize][1]);
        let path = ClassicalPath::new(input, early, late, output).unwrap();

        let mut readings = BTreeMap::new();
        for slot in ALL_SLOTS {
            let displacement = slot.displacement(path);
            match pointers.width_of(slot) {
                PointerWidth::Accurate => {
                    readings.insert(slot, Reading::Discrete(displacement));
                }
                PointerWidth::Finite(width) => {
                    let noise = Normal::new(0.0, crate::classical::gaussian_sigma(width))
                        .unwrap()
                        .sample(&mut rng);
                    readings.insert(slot, Reading::Continuous(noise + displacement as f64));
                }
                PointerWidth::Decoupled => {}
            }
        }
        let selected = preselect.is_none_or(|i| i == input)
            && postselect.is_none_or(|l| l == output);
        out.push(TrialRecord {
            readings,
            selected,
            path: Some(path),
        });
    }
    Ok(out)
}

/// Rejection-sampler statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RejectionStats {
    pub trials: usize,
    pub proposals: u64,
}

impl RejectionStats {
    /// Fraction of proposals accepted.
    pub fn acceptance(&self) -> f64 {
        self.trials as f64 / self.proposals as f64
    }
}

/// Sample `n` trials from a coherent reading density.
///
/// The accurate readings are drawn from their exact masses; the continuous
/// readings by rejection with envelope `K * sum_t |c_t|^2 prod G^2` over the
/// `K` terms sharing the accurate readings (valid term by term since
/// `|sum x|^2 <= K sum |x|^2`). The density is already conditioned on the
/// selections, so every record is `selected`; the selection probability itself
/// is the density's `norm` and is never silently folded in.
pub fn sample_quantum(
    density: &CoherentGaussianDensity,
    n: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    sample_quantum_with_stats(density, n, seed).map(|(trials, _)| trials)
}

/// [`sample_quantum`] plus rejection statistics.
pub fn sample_quantum_with_stats(
    density: &CoherentGaussianDensity,
    n: usize,
    seed: u64,
) -> Result<(Vec<TrialRecord>, RejectionStats)> {
    if n == 0 {
        return Err(Error::InvalidArgument("trial count must be >= 1".into()));
    }
    let outcomes = density.discrete_outcomes();
    let masses: Vec<f64> = outcomes.iter().map(|d| density.discrete_mass(d)).collect();
    let continuous = density.continuous_slots().to_vec();
    let widths = density.continuous_widths().to_vec();
    let accurate = density.accurate_slots().to_vec();

    // per-group term data: (coeff, shifts), |c|^2 cumulative for proposals
    struct Group {
        terms: Vec<(num_complex::Complex64, Vec<f64>)>,
        weight_sum: f64,
    }
    let groups: Vec<Group> = outcomes
        .iter()
        .map(|d| {
            let terms: Vec<_> = density
                .terms()
                .iter()
                .filter(|t| &t.discrete == d)
                .map(|t| (t.coeff, t.shifts.clone()))
                .collect();
            let weight_sum = terms.iter().map(|(c, _)| c.norm_sqr()).sum();
            Group { terms, weight_sum }
        })
        .collect();

    let mut out = Vec::with_capacity(n);
    let mut proposals: u64 = 0;
    for index in 0..n {
        let mut rng = trial_rng(seed, index as u64);

        // accurate readings first
        let mut u = rng.random::<f64>() * masses.iter().sum::<f64>();
        let mut group_index = outcomes.len() - 1;
        for (g, &mass) in masses.iter().enumerate() {
            if u < mass {
                group_index = g;
                break;
            }
            u -= mass;
        }
        let group = &groups[group_index];
        let envelope_factor = group.terms.len() as f64;

        // continuous readings by rejection within the chosen group
        let point: Vec<f64> = loop {
            proposals += 1;
            // proposal: term by squared coefficient, then its Gaussian product
            let mut pick = rng.random::<f64>() * group.weight_sum;
            let mut term = &group.terms[group.terms.len() - 1];
            for t in &group.terms {
                if pick < t.0.norm_sqr() {
                    term = t;
                    break;
                }
                pick -= t.0.norm_sqr();
            }
            let candidate: Vec<f64> = term
                .1
                .iter()
                .zip(&widths)
                .map(|(shift, width)| {
                    Normal::new(*shift, crate::quantum::reading_sigma(*width))
                        .unwrap()
                        .sample(&mut rng)
                })
                .collect();

            let mut coherent = num_complex::Complex64::ZERO;
            let mut envelope = 0.0;
            for (coeff, shifts) in &group.terms {
                let product: f64 = shifts
                    .iter()
                    .zip(&widths)
                    .zip(&candidate)
                    .map(|((s, w), f)| crate::quantum::amplitude_gaussian(f - s, *w))
                    .product();
                coherent += coeff * product;
                envelope += coeff.norm_sqr() * product * product;
            }
            let target = coherent.norm_sqr();
            let envelope = envelope_factor * envelope;
            if target > envelope * (1.0 + 1e-9) {
                return Err(Error::EnvelopeViolation { target, envelope });
            }
            if envelope > 0.0 && rng.random::<f64>() * envelope < target {
                break candidate;
            }
        };

        let mut readings = BTreeMap::new();
        for (slot, value) in continuous.iter().zip(&point) {
            readings.insert(*slot, Reading::Continuous(*value));
        }
        for (slot, value) in accurate.iter().zip(&outcomes[group_index]) {
            readings.insert(*slot, Reading::Discrete(*value));
        }
        out.push(TrialRecord {
            readings,
            selected: true,
            path: None,
        });
    }
    Ok((
        out,
        RejectionStats {
            trials: n,
            proposals,
        },
    ))
}

/// Mean and population variance of one slot's readings over selected trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Binning request for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSpec {
    pub slot: Slot,
    pub start: f64,
    pub stop: f64,
    pub bins: usize,
}

/// Normalized histogram of one slot's selected readings; masses sum to one
/// over the readings that fall inside the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub slot: Slot,
    pub start: f64,
    pub stop: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.stop - self.start) / self.masses.len() as f64
    }
}

/// Deterministic summary of a trial list.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub n_trials: usize,
    pub n_selected: usize,
    pub acceptance_rate: f64,
    pub slot_stats: BTreeMap<Slot, SlotStats>,
    pub histograms: Vec<Histogram>,
}

/// Summarize trials: acceptance rate over all trials, per-slot means and
/// variances over the selected ones, histograms on the requested grids.
pub fn summarize(trials: &[TrialRecord], grids: &[HistogramSpec]) -> Result<SampleSummary> {
    if trials.is_empty() {
        return Err(Error::EmptySample);
    }
    for g in grids {
        if g.bins == 0 || !(g.start < g.stop) {
            return Err(Error::InvalidArgument(format!(
                "bad histogram grid for slot {}: [{}, {}) with {} bins",
                g.slot, g.start, g.stop, g.bins
            )));
        }
    }
    let n_selected = trials.iter().filter(|t| t.selected).count();
    let mut slot_stats = BTreeMap::new();
    for slot in ALL_SLOTS {
        let values: Vec<f64> = trials
            .iter()
            .filter(|t| t.selected)
            .filter_map(|t| t.reading(slot))
            .collect();
        if values.is_empty() {
            continue;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        slot_stats.insert(
            slot,
            SlotStats {
                count,
                mean,
                variance,
            },
        );
    }
    let mut histograms = Vec::new();
    for g in grids {
        let mut counts = vec![0u64; g.bins];
        let mut total = 0u64;
        let width = (g.stop - g.start) / g.bins as f64;
        for t in trials.iter().filter(|t| t.selected) {
            if let Some(v) = t.reading(g.slot) {
                if v >= g.start && v < g.stop {
                    let bin = ((v - g.start) / width) as usize;
                    counts[bin.min(g.bins - 1)] += 1;
                    total += 1;
                }
            }
        }
        let masses = counts
            .iter()
            .map(|&c| if total > 0 { c as f64 / total as f64 } else { 0.0 })
            .collect();
        histograms.push(Histogram {
            slot: g.slot,
            start: g.start,
            stop: g.stop,
            masses,
        });
    }
    Ok(SampleSummary {
        n_trials: trials.len(),
        n_selected,
        acceptance_rate: n_selected as f64 / trials.len() as f64,
        slot_stats,
        histograms,
    })
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic of `samples` against the
/// CDF `cdf`. Samples are sorted internally.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
    }
    Ok(d)
}

/// Asymptotic two-sided critical value of the one-sample KS statistic at
/// significance `alpha`: `sqrt(-ln(alpha/2)/2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical;
    use crate::pointer::PointerConfig;
    use crate::quantum;
    use approx::assert_relative_eq;

    fn skewed_model() -> TransitionModel {
        TransitionModel::new(
            [1.0, 0.0],
            [[0.5, 0.5], [0.5, 0.5]],
            [[0.8, 0.2], [0.2, 0.8]],
        )
        .unwrap()
    }

    fn all_accurate() -> PointerSet {
        PointerSet::new(ALL_SLOTS.map(PointerConfig::accurate).to_vec()).unwrap()
    }

    #[test]
    fn single_trial_and_determinism() {
        let m = skewed_model();
        let pointers =
            PointerSet::new(vec![PointerConfig::finite(Slot::PathOne, 2.0).unwrap()]).unwrap();
        let one = sample_classical(&m, &pointers, None, None, 1, 7).unwrap();
        assert_eq!(one.len(), 1);

        let a = sample_classical(&m, &pointers, None, None, 64, 7).unwrap();
        let b = sample_classical(&m, &pointers, None, None, 64, 7).unwrap();
        assert_eq!(a, b);
        // per-trial streams: a shorter run is a prefix of a longer one
        let c = sample_classical(&m, &pointers, None, None, 32, 7).unwrap();
        assert_eq!(&a[..32], &c[..]);
        // and a different seed changes the stream
        let d = sample_classical(&m, &pointers, None, None, 64, 8).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn accurate_pointers_reproduce_route_probabilities() {
        let m = TransitionModel::new(
            [0.3, 0.7],
            [[0.25, 0.75], [0.6, 0.4]],
            [[0.9, 0.1], [0.35, 0.65]],
        )
        .unwrap();
        let n = 100_000;
        let trials = sample_classical(&m, &all_accurate(), None, None, n, 11).unwrap();
        let mut counts = std::collections::HashMap::new();
        for t in &trials {
            *counts.entry(t.path.unwrap()).or_insert(0u64) += 1;
        }
        // Pearson chi^2 over the eight connected routes; 1% critical value for
        // 7 degrees of freedom is 18.475
        let mut chi2 = 0.0;
        for path in ClassicalPath::connected() {
            let p = m.input_weights()[path.input as usize] * m.path_probability(path);
            let expected = p * n as f64;
            let observed = *counts.get(&path).unwrap_or(&0) as f64;
            chi2 += (observed - expected).powi(2) / expected;
        }
        assert!(chi2 < 18.475, "chi^2 = {chi2}");
        // readings of accurate pointers are the exact displacements
        let t = &trials[0];
        let path = t.path.unwrap();
        for slot in ALL_SLOTS {
            assert_eq!(t.reading(slot).unwrap(), slot.displacement(path) as f64);
        }
    }

    #[test]
    fn selection_flags_and_acceptance() {
        let m = skewed_model();
        let pointers = PointerSet::new(vec![
            PointerConfig::accurate(Slot::Input),
            PointerConfig::finite(Slot::PathOne, 10.0).unwrap(),
            PointerConfig::accurate(Slot::Output),
        ])
        .unwrap();
        let n = 50_000;
        let trials = sample_classical(&m, &pointers, Some(0), Some(1), n, 3).unwrap();
        assert_eq!(trials.len(), n);
        let summary = summarize(&trials, &[]).unwrap();
        // acceptance -> P0 + P1 = 0.5 (input weight 1 on state 0)
        let (p0, p1) = m.two_way_route_probs();
        let expected = p0 + p1;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(
            (summary.acceptance_rate - expected).abs() < 4.0 * sigma,
            "acceptance {} vs {expected}",
            summary.acceptance_rate
        );
        // selected-trial mean of the branch-1 reading -> z = 0.8
        let stats = summary.slot_stats[&Slot::PathOne];
        let z = 0.8;
        let read_sigma = (classical::gaussian_sigma(10.0).powi(2) + z * (1.0 - z)).sqrt();
        assert!(
            (stats.mean - z).abs() < 4.0 * read_sigma / (stats.count as f64).sqrt(),
            "mean {} vs {z}",
            stats.mean
        );
    }

    #[test]
    fn selection_requires_accurate_pointers() {
        let m = skewed_model();
        let pointers =
            PointerSet::new(vec![PointerConfig::finite(Slot::Input, 1.0).unwrap()]).unwrap();
        assert!(sample_classical(&m, &pointers, Some(0), None, 10, 0).is_err());
    }

    #[test]
    fn quantum_single_term_sampling_is_rejection_free() {
        let amps = quantum::PathAmplitudes::new(
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(0.6, 0.0),
        );
        let d = quantum::two_pointer_density_from_amplitudes(amps, 2.0).unwrap();
        let (trials, stats) = sample_quantum_with_stats(&d, 5_000, 5).unwrap();
        assert_eq!(stats.proposals, 5_000);
        assert_eq!(trials.len(), 5_000);
        // readings concentrate on the surviving route's shifts (1, 0)
        let summary = summarize(&trials, &[]).unwrap();
        let m2 = summary.slot_stats[&Slot::PathOne];
        let m5 = summary.slot_stats[&Slot::PathZero];
        let sigma = quantum::reading_sigma(2.0);
        assert!((m2.mean - 1.0).abs() < 4.0 * sigma / (5_000f64).sqrt());
        assert!((m5.mean - 0.0).abs() < 4.0 * sigma / (5_000f64).sqrt());
    }

    #[test]
    fn quantum_mean_matches_closed_form() {
        let m = quantum::AmplitudeModel::from_rotations(-0.7, -0.9);
        let width = 3.0;
        let pointers =
            PointerSet::new(vec![PointerConfig::finite(Slot::PathOne, width).unwrap()]).unwrap();
        let d = quantum::postselected_density(&m, &pointers).unwrap();
        let n = 40_000;
        let trials = sample_quantum(&d, n, 21).unwrap();
        let summary = summarize(&trials, &[]).unwrap();
        let closed = m
            .postselected_amplitudes()
            .mean_reading(PointerWidth::Finite(width))
            .unwrap();
        let stats = summary.slot_stats[&Slot::PathOne];
        let sigma = (quantum::reading_sigma(width).powi(2) + 0.25).sqrt();
        assert!(
            (stats.mean - closed).abs() < 4.0 * sigma / (n as f64).sqrt(),
            "empirical {} vs closed {closed}",
            stats.mean
        );
    }

    #[test]
    fn quantum_control_readings_have_route_masses() {
        let m = quantum::AmplitudeModel::from_rotations(
            std::f64::consts::FRAC_PI_4,
            (-0.5f64).atan(),
        );
        let d = quantum::control_pointer_density(&m, 10.0).unwrap();
        let n = 50_000;
        let trials = sample_quantum(&d, n, 13).unwrap();
        let ones = trials
            .iter()
            .filter(|t| t.reading(Slot::Control) == Some(1.0))
            .count();
        let p = 0.8;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (ones as f64 / n as f64 - p).abs() < 4.0 * sigma,
            "control-read-1 fraction {}",
            ones as f64 / n as f64
        );
    }

    #[test]
    fn ks_statistic_detects_fit_and_misfit() {
        let m = skewed_model();
        let width = 1.5;
        let d = classical::two_way_reading_density(&m, PointerWidth::Finite(width)).unwrap();
        let marg = d.marginal_1d(Slot::PathOne).unwrap();
        let pointers = PointerSet::new(vec![
            PointerConfig::accurate(Slot::Input),
            PointerConfig::finite(Slot::PathOne, width).unwrap(),
            PointerConfig::accurate(Slot::Output),
        ])
        .unwrap();
        let trials = sample_classical(&m, &pointers, Some(0), Some(1), 30_000, 17).unwrap();
        let readings: Vec<f64> = trials
            .iter()
            .filter(|t| t.selected)
            .filter_map(|t| t.reading(Slot::PathOne))
            .collect();
        let n = readings.len();
        let stat = ks_statistic(&readings, |f| marg.cdf(f)).unwrap();
        assert!(
            stat < ks_critical_value(n, 0.01),
            "KS {stat} vs critical {}",
            ks_critical_value(n, 0.01)
        );
        // a shifted CDF must be rejected
        let bad = ks_statistic(&readings, |f| marg.cdf(f - 0.25)).unwrap();
        assert!(bad > ks_critical_value(n, 0.01));
    }

    #[test]
    fn summary_edge_cases() {
        assert!(matches!(summarize(&[], &[]), Err(Error::EmptySample)));

        // identical trials: zero variance
        let mut readings = BTreeMap::new();
        readings.insert(Slot::PathOne, Reading::Continuous(0.37));
        let t = TrialRecord {
            readings,
            selected: true,
            path: None,
        };
        let trials = vec![t.clone(), t.clone(), t];
        let s = summarize(&trials, &[]).unwrap();
        assert_eq!(s.slot_stats[&Slot::PathOne].variance, 0.0);
        assert_eq!(s.slot_stats[&Slot::PathOne].mean, 0.37);

        // means of concatenated halves match the whole
        let m = skewed_model();
        let pointers =
            PointerSet::new(vec![PointerConfig::finite(Slot::PathOne, 2.0).unwrap()]).unwrap();
        let all = sample_classical(&m, &pointers, None, None, 2_000, 9).unwrap();
        let s_all = summarize(&all, &[]).unwrap();
        let s_a = summarize(&all[..1_000], &[]).unwrap();
        let s_b = summarize(&all[1_000..], &[]).unwrap();
        let combined = 0.5 * (s_a.slot_stats[&Slot::PathOne].mean + s_b.slot_stats[&Slot::PathOne].mean);
        assert_relative_eq!(
            combined,
            s_all.slot_stats[&Slot::PathOne].mean,
            epsilon = 1e-12
        );
    }

    #[test]
    fn histograms_normalize() {
        let m = skewed_model();
        let pointers =
            PointerSet::new(vec![PointerConfig::finite(Slot::PathOne, 1.0).unwrap()]).unwrap();
        let trials = sample_classical(&m, &pointers, None, None, 4_000, 23).unwrap();
        let spec = HistogramSpec {
            slot: Slot::PathOne,
            start: -4.0,
            stop: 5.0,
            bins: 30,
        };
        let s = summarize(&trials, &[spec]).unwrap();
        let total: f64 = s.histograms[0].masses.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }
}
