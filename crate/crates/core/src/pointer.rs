//! Pointer slots and accuracy regimes.
//!
//! Five pointer positions monitor the network: slot 1 reads the input state,
//! slots 2 and 5 watch the two branches at the second time slice (slot 5 records
//! the complemented indicator), slot 3 is the mid-evolution control, and slot 4
//! reads the output state. A pointer's accuracy is set by the spread of its
//! initial position; the exact limits (zero spread, infinite spread) are
//! represented explicitly rather than as extreme floats.

use crate::classical::ClassicalPath;
use crate::error::{Error, Result};
use std::fmt;

/// One of the five pointer positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Input occupancy at the first time slice (f1).
    Input,
    /// Branch-1 occupancy at the second time slice (f2).
    PathOne,
    /// Occupancy at the third time slice (f3).
    Control,
    /// Output occupancy at the last time slice (f4).
    Output,
    /// Branch-0 occupancy at the second time slice, complemented (f5).
    PathZero,
}

pub const ALL_SLOTS: [Slot; 5] = [
    Slot::Input,
    Slot::PathOne,
    Slot::Control,
    Slot::Output,
    Slot::PathZero,
];

impl Slot {
    pub fn index(self) -> u8 {
        match self {
            Slot::Input => 1,
            Slot::PathOne => 2,
            Slot::Control => 3,
            Slot::Output => 4,
            Slot::PathZero => 5,
        }
    }

    pub fn from_index(n: u8) -> Result<Slot> {
        match n {
            1 => Ok(Slot::Input),
            2 => Ok(Slot::PathOne),
            3 => Ok(Slot::Control),
            4 => Ok(Slot::Output),
            5 => Ok(Slot::PathZero),
            _ => Err(Error::InvalidPointer(format!(
                "slot index {n} out of range 1..=5"
            ))),
        }
    }

    /// Unit displacement this pointer picks up along `path`.
    ///
    /// Slot 5 monitors branch 0, so its reading shifts by `1 - j`.
    pub fn displacement(self, path: ClassicalPath) -> u8 {
        match self {
            Slot::Input => path.input,
            Slot::PathOne => path.early,
            Slot::Control => path.late,
            Slot::Output => path.output,
            Slot::PathZero => 1 - path.early,
        }
    }

    /// Column label used in CSV exports.
    pub fn label(self) -> &'static str {
        match self {
            Slot::Input => "f1",
            Slot::PathOne => "f2",
            Slot::Control => "f3",
            Slot::Output => "f4",
            Slot::PathZero => "f5",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl serde::Serialize for Slot {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.index())
    }
}

impl<'de> serde::Deserialize<'de> for Slot {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let n = u8::deserialize(deserializer)?;
        Slot::from_index(n).map_err(serde::de::Error::custom)
    }
}

/// Accuracy regime of one pointer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointerWidth {
    /// Zero initial spread: the reading is the exact displacement.
    Accurate,
    /// Gaussian initial spread of the given (positive, finite) width.
    Finite(f64),
    /// Infinite spread: the pointer is removed from the experiment.
    Decoupled,
}

impl PointerWidth {
    pub fn validate(self) -> Result<Self> {
        if let PointerWidth::Finite(w) = self {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidPointer(format!(
                    "finite pointer width must be positive and finite, got {w}"
                )));
            }
        }
        Ok(self)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, PointerWidth::Finite(_))
    }

    /// Overlap between the shifted and unshifted pointer states,
    /// `exp(-1/(2 width^2))`: 0 for an accurate pointer, 1 for a decoupled one.
    pub fn overlap(self) -> f64 {
        match self {
            PointerWidth::Accurate => 0.0,
            PointerWidth::Finite(w) => (-1.0 / (2.0 * w * w)).exp(),
            PointerWidth::Decoupled => 1.0,
        }
    }
}

/// One pointer: which slot it occupies and how accurate it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerConfig {
    pub slot: Slot,
    pub width: PointerWidth,
}

impl PointerConfig {
    pub fn new(slot: Slot, width: PointerWidth) -> Result<Self> {
        Ok(PointerConfig {
            slot,
            width: width.validate()?,
        })
    }

    pub fn accurate(slot: Slot) -> Self {
        PointerConfig {
            slot,
            width: PointerWidth::Accurate,
        }
    }

    pub fn finite(slot: Slot, width: f64) -> Result<Self> {
        Self::new(slot, PointerWidth::Finite(width))
    }
}

/// A validated set of pointers, at most one per slot.
///
/// Slots without an entry are decoupled.
#[derive(Debug, Clone, Default)]
pub struct PointerSet {
    configs: Vec<PointerConfig>,
}

impl PointerSet {
    pub fn new(configs: Vec<PointerConfig>) -> Result<Self> {
        for c in &configs {
            c.width.validate()?;
        }
        for (n, c) in configs.iter().enumerate() {
            if configs[..n].iter().any(|p| p.slot == c.slot) {
                return Err(Error::InvalidPointer(format!(
                    "slot {} configured more than once",
                    c.slot
                )));
            }
        }
        Ok(PointerSet { configs })
    }

    pub fn width_of(&self, slot: Slot) -> PointerWidth {
        self.configs
            .iter()
            .find(|c| c.slot == slot)
            .map(|c| c.width)
            .unwrap_or(PointerWidth::Decoupled)
    }

    pub fn configs(&self) -> &[PointerConfig] {
        &self.configs
    }

    /// Finite-width slots in slot order, with their widths.
    pub fn finite_slots(&self) -> Vec<(Slot, f64)> {
        let mut out: Vec<(Slot, f64)> = self
            .configs
            .iter()
            .filter_map(|c| match c.width {
                PointerWidth::Finite(w) => Some((c.slot, w)),
                _ => None,
            })
            .collect();
        out.sort_by_key(|(s, _)| *s);
        out
    }

    /// Accurate slots in slot order.
    pub fn accurate_slots(&self) -> Vec<Slot> {
        let mut out: Vec<Slot> = self
            .configs
            .iter()
            .filter(|c| c.width == PointerWidth::Accurate)
            .map(|c| c.slot)
            .collect();
        out.sort();
        out
    }
}
