//! JSON run configuration: schema, parsing, and conversion to a validated
//! [`SweepSpec`](crate::dynamics::SweepSpec).
//!
//! Example:
//!
//! ```json
//! {
//!   "comment": "damped Bell pair",
//!   "axis": "time",
//!   "initial_state": { "type": "pure", "alpha": 0.7071067811865476,
//!                      "beta": 0.7071067811865476 },
//!   "channel": { "kind": "amplitude_damping", "regime": "non_markovian",
//!                "gamma": 1.0, "line_width": 0.1 },
//!   "t_max": 40.0,
//!   "n_points": 2000
//! }
//! ```
//!
//! Complex amplitudes are either a plain number (real) or a `[re, im]` pair.
//! Unknown fields anywhere are rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::channels::{ChannelFamily, ChannelKind, ChannelParams, DpPrefactor, NoiseSides, Regime};
use crate::dynamics::{InitialState, MeasureSelection, SweepAxis, SweepSpec};
use crate::error::{QcorrError, Result};
use crate::measures::{QslGenerator, SteeringMode, Thresholds};
use crate::states::{BellState, PureStateSpec, WernerSpec};

/// A complex number in JSON: `0.5` or `[0.5, -0.25]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexField {
    Real(f64),
    Pair(f64, f64),
}

impl From<ComplexField> for Complex64 {
    fn from(c: ComplexField) -> Self {
        match c {
            ComplexField::Real(re) => Complex64::new(re, 0.0),
            ComplexField::Pair(re, im) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateConfig {
    /// `alpha |00> + beta |11>`.
    Pure { alpha: ComplexField, beta: ComplexField },
    /// `p |bell><bell| + (1 - p) I/4`.
    Werner { p: f64, bell: BellState },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub regime: Regime,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub line_width: Option<f64>,
    #[serde(default)]
    pub switching_rate: Option<f64>,
    #[serde(default)]
    pub gamma_axes: Option<[f64; 3]>,
    #[serde(default)]
    pub line_width_axes: Option<[f64; 3]>,
    #[serde(default)]
    pub dp_prefactor: DpPrefactor,
}

impl ChannelConfig {
    pub fn build(&self) -> Result<ChannelFamily> {
        let params = ChannelParams {
            gamma: self.gamma,
            line_width: self.line_width,
            switching_rate: self.switching_rate,
            gamma_axes: self.gamma_axes,
            line_width_axes: self.line_width_axes,
            dp_prefactor: self.dp_prefactor,
        };
        ChannelFamily::new(self.kind, self.regime, &params)
    }
}

/// Top-level run configuration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Free-form note; ignored by the program.
    #[serde(default)]
    pub comment: Option<String>,
    #[serde(default)]
    pub axis: SweepAxis,
    pub initial_state: InitialStateConfig,
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    /// End of the time grid; required for (and exclusive to) the time axis.
    #[serde(default)]
    pub t_max: Option<f64>,
    /// End of the mixing-weight grid for the `werner_p` axis; defaults to 1.
    #[serde(default)]
    pub p_max: Option<f64>,
    pub n_points: usize,
    #[serde(default)]
    pub noise_sides: NoiseSides,
    /// Output columns; defaults to every measure the axis supports.
    #[serde(default)]
    pub measures: Option<Vec<String>>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub steering_mode: SteeringMode,
    #[serde(default)]
    pub qsl_generator: QslGenerator,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QcorrError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
            .map_err(|e| QcorrError::Config(format!("{}: {e}", path.display())))
    }

    /// Validates the cross-field constraints and produces a runnable spec.
    pub fn to_spec(&self) -> Result<SweepSpec> {
        let initial = match self.initial_state {
            InitialStateConfig::Pure { alpha, beta } => InitialState::Pure(PureStateSpec {
                alpha: alpha.into(),
                beta: beta.into(),
            }),
            InitialStateConfig::Werner { p, bell } => {
                InitialState::Werner(WernerSpec { p, bell })
            }
        };
        let channel = self.channel.as_ref().map(ChannelConfig::build).transpose()?;
        let x_max = match self.axis {
            SweepAxis::Time => {
                if self.p_max.is_some() {
                    return Err(QcorrError::Config(
                        "p_max only applies to the werner_p axis".into(),
                    ));
                }
                self.t_max
                    .ok_or_else(|| QcorrError::Config("a time sweep needs t_max".into()))?
            }
            SweepAxis::WernerP => {
                if self.t_max.is_some() {
                    return Err(QcorrError::Config(
                        "t_max only applies to the time axis".into(),
                    ));
                }
                self.p_max.unwrap_or(1.0)
            }
        };
        let measures = match &self.measures {
            Some(names) => MeasureSelection::from_names(names)?,
            None => match self.axis {
                SweepAxis::Time => MeasureSelection::default(),
                SweepAxis::WernerP => MeasureSelection::without_qsl(),
            },
        };
        let spec = SweepSpec {
            axis: self.axis,
            initial,
            channel,
            x_max,
            n_points: self.n_points,
            sides: self.noise_sides,
            measures,
            thresholds: self.thresholds,
            steering_mode: self.steering_mode,
            qsl_generator: self.qsl_generator,
        };
        spec.validate()?;
        Ok(spec)
    }
}
