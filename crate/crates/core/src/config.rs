//! JSON configuration schemas.
//!
//! A model document carries either a classical or a quantum network (exactly
//! one), its pointers, and optional selection, sweep, sampling and output
//! requests. Pointer widths are numbers or the sentinel strings `"accurate"`
//! and `"decoupled"`.

use crate::classical::TransitionModel;
use crate::error::{Error, Result};
use crate::pointer::{PointerConfig, PointerSet, PointerWidth, Slot};
use crate::quantum::AmplitudeModel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Top-level experiment document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Pointers may live here or inside the model object; this level wins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointers: Option<Vec<PointerSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config does not match schema: {e}")))
    }

    pub fn pointer_set(&self) -> Result<PointerSet> {
        let specs = self
            .pointers
            .as_ref()
            .or_else(|| match &self.model {
                ModelConfig::Classical(c) => c.pointers.as_ref(),
                ModelConfig::Quantum(q) => q.pointers.as_ref(),
            })
            .cloned()
            .unwrap_or_default();
        let configs = specs
            .iter()
            .map(PointerSpec::to_config)
            .collect::<Result<Vec<_>>>()?;
        PointerSet::new(configs)
    }
}

/// Exactly one of the two model kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Classical(ClassicalConfig),
    Quantum(QuantumConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    pub w: [f64; 2],
    pub leg1: [[f64; 2]; 2],
    pub leg3: [[f64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointers: Option<Vec<PointerSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preselect: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselect: Option<u8>,
}

impl ClassicalConfig {
    pub fn to_model(&self) -> Result<TransitionModel> {
        TransitionModel::new(self.w, self.leg1, self.leg3)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    pub leg1: [[ComplexSpec; 2]; 2],
    pub leg2_diag: [ComplexSpec; 2],
    pub leg3: [[ComplexSpec; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointers: Option<Vec<PointerSpec>>,
}

impl QuantumConfig {
    pub fn to_model(&self) -> Result<AmplitudeModel> {
        let conv = |m: &[[ComplexSpec; 2]; 2]| {
            [
                [m[0][0].into(), m[0][1].into()],
                [m[1][0].into(), m[1][1].into()],
            ]
        };
        AmplitudeModel::new(
            conv(&self.leg1),
            [self.leg2_diag[0].into(), self.leg2_diag[1].into()],
            conv(&self.leg3),
        )
    }
}

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexSpec {
    fn from(c: Complex64) -> Self {
        ComplexSpec { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerSpec {
    pub slot: u8,
    pub width: WidthSpec,
}

impl PointerSpec {
    pub fn to_config(&self) -> Result<PointerConfig> {
        PointerConfig::new(Slot::from_index(self.slot)?, self.width.to_width()?)
    }
}

/// `number | "accurate" | "decoupled"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WidthSpec {
    Number(f64),
    Keyword(String),
}

impl WidthSpec {
    pub fn to_width(&self) -> Result<PointerWidth> {
        match self {
            WidthSpec::Number(w) => PointerWidth::Finite(*w).validate(),
            WidthSpec::Keyword(k) => match k.as_str() {
                "accurate" => Ok(PointerWidth::Accurate),
                "decoupled" => Ok(PointerWidth::Decoupled),
                other => Err(Error::InvalidPointer(format!(
                    "unknown width keyword {other:?}; expected \"accurate\" or \"decoupled\""
                ))),
            },
        }
    }

    pub fn from_width(w: PointerWidth) -> Self {
        match w {
            PointerWidth::Finite(v) => WidthSpec::Number(v),
            PointerWidth::Accurate => WidthSpec::Keyword("accurate".into()),
            PointerWidth::Decoupled => WidthSpec::Keyword("decoupled".into()),
        }
    }
}

/// Width sweep over one slot.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Only `"width"` is recognized.
    pub parameter: String,
    pub slot: u8,
    pub values: Vec<WidthSpec>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(Slot, Vec<PointerWidth>)> {
        if self.parameter != "width" {
            return Err(Error::InvalidArgument(format!(
                "unsupported sweep parameter {:?}; only \"width\" exists",
                self.parameter
            )));
        }
        let slot = Slot::from_index(self.slot)?;
        let widths = self
            .values
            .iter()
            .map(WidthSpec::to_width)
            .collect::<Result<Vec<_>>>()?;
        if widths.is_empty() {
            return Err(Error::InvalidArgument("sweep has no values".into()));
        }
        Ok((slot, widths))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}
