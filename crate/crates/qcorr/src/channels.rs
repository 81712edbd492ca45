//! Single-qubit noise families in time-dependent Kraus form, with closed-form
//! memory kernels and their analytic time derivatives.
//!
//! Four families are implemented, each in a Markovian and a non-Markovian
//! regime: amplitude damping, phase damping, depolarizing, and random
//! telegraph noise. A family produces a `KrausSet` at any time `t >= 0`;
//! the set acts on one or both qubits of a two-qubit state via
//! [`apply_one_sided`] / [`apply_two_sided`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcorrError, Result};
use crate::linalg::{pauli, ComplexMatrix};
use crate::states::DensityMatrix;

/// Largest allowed `||sum E^dag E - I||_F` for a Kraus set.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Depolarizing weights in `[DP_WEIGHT_FLOOR, 0)` are treated as rounding
/// noise and clamped to zero; anything lower is a complete-positivity error.
pub const DP_WEIGHT_FLOOR: f64 = -1e-9;
/// Width of the window around a vanishing oscillation frequency in which the
/// degenerate (critically damped) closed form is used instead.
const FREQ_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
    RandomTelegraph,
}

impl ChannelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "AD",
            ChannelKind::PhaseDamping => "PD",
            ChannelKind::Depolarizing => "DP",
            ChannelKind::RandomTelegraph => "RTN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Markovian,
    NonMarkovian,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Markovian => "Markovian",
            Regime::NonMarkovian => "non-Markovian",
        }
    }
}

/// How the per-axis depolarizing envelopes are damped in the non-Markovian
/// regime: each axis by its own line width, or all axes by one shared width.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpPrefactor {
    #[default]
    PerAxis,
    Global,
}

/// Raw channel parameters; which fields are required depends on the kind and
/// regime, and is enforced by [`ChannelFamily::new`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ChannelParams {
    /// Coupling rate (AD, PD, RTN).
    pub gamma: Option<f64>,
    /// Reservoir line width (AD-NM, PD-NM) or shared depolarizing width.
    pub line_width: Option<f64>,
    /// Telegraph switching rate (RTN).
    pub switching_rate: Option<f64>,
    /// Per-axis depolarizing coupling rates.
    pub gamma_axes: Option<[f64; 3]>,
    /// Per-axis depolarizing line widths (non-Markovian, per-axis mode).
    pub line_width_axes: Option<[f64; 3]>,
    /// Depolarizing damping mode.
    pub dp_prefactor: DpPrefactor,
}

/// Scalar kernel for AD/PD/RTN, or the three per-axis depolarizing envelopes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelValue {
    Scalar(f64),
    PerAxis([f64; 3]),
}

impl KernelValue {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            KernelValue::Scalar(v) => Some(*v),
            KernelValue::PerAxis(_) => None,
        }
    }

    pub fn as_axes(&self) -> Option<[f64; 3]> {
        match self {
            KernelValue::Scalar(_) => None,
            KernelValue::PerAxis(v) => Some(*v),
        }
    }
}

/// Validated internal parameters for one (kind, regime) pair.
#[derive(Clone, Copy, Debug)]
enum FamilyParams {
    AdMarkov { gamma: f64 },
    AdNonMarkov { gamma: f64, line_width: f64 },
    PdMarkov { gamma: f64 },
    PdNonMarkov { gamma: f64, line_width: f64 },
    DpMarkov { gamma_axes: [f64; 3], line_width: f64 },
    DpNonMarkov { gamma_axes: [f64; 3], line_widths: [f64; 3] },
    Rtn { gamma: f64, switching_rate: f64 },
}

/// One noise family at fixed parameters; the main entry point of this module.
#[derive(Clone, Copy, Debug)]
pub struct ChannelFamily {
    kind: ChannelKind,
    regime: Regime,
    params: FamilyParams,
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| QcorrError::InvalidArgument(format!("missing channel parameter `{name}`")))
}

fn require_positive(name: &str, v: Option<f64>) -> Result<f64> {
    let v = require(name, v)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(QcorrError::InvalidArgument(format!(
            "channel parameter `{name}` must be positive and finite, got {v}"
        )))
    }
}

fn require_axes(name: &str, v: Option<[f64; 3]>, strictly_positive: bool) -> Result<[f64; 3]> {
    let v = v.ok_or_else(|| {
        QcorrError::InvalidArgument(format!("missing channel parameter `{name}`"))
    })?;
    for (k, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 || (strictly_positive && x == 0.0) {
            return Err(QcorrError::InvalidArgument(format!(
                "channel parameter `{name}[{k}]` must be {} and finite, got {x}",
                if strictly_positive { "positive" } else { "non-negative" }
            )));
        }
    }
    Ok(v)
}

impl ChannelFamily {
    pub fn new(kind: ChannelKind, regime: Regime, params: &ChannelParams) -> Result<Self> {
        let fp = match (kind, regime) {
            (ChannelKind::AmplitudeDamping, Regime::Markovian) => FamilyParams::AdMarkov {
                gamma: require_positive("gamma", params.gamma)?,
            },
            (ChannelKind::AmplitudeDamping, Regime::NonMarkovian) => {
                let gamma = require_positive("gamma", params.gamma)?;
                let line_width = require_positive("line_width", params.line_width)?;
                // Underdamped oscillatory solution needs 2*gamma > line_width.
                if 2.0 * gamma * line_width - line_width * line_width <= 0.0 {
                    return Err(QcorrError::InvalidArgument(format!(
                        "non-Markovian amplitude damping requires line_width < 2*gamma \
                         (got gamma = {gamma}, line_width = {line_width})"
                    )));
                }
                FamilyParams::AdNonMarkov { gamma, line_width }
            }
            (ChannelKind::PhaseDamping, Regime::Markovian) => FamilyParams::PdMarkov {
                gamma: require_positive("gamma", params.gamma)?,
            },
            (ChannelKind::PhaseDamping, Regime::NonMarkovian) => FamilyParams::PdNonMarkov {
                gamma: require_positive("gamma", params.gamma)?,
                line_width: require_positive("line_width", params.line_width)?,
            },
            (ChannelKind::Depolarizing, Regime::Markovian) => FamilyParams::DpMarkov {
                gamma_axes: require_axes("gamma_axes", params.gamma_axes, false)?,
                line_width: require_positive("line_width", params.line_width)?,
            },
            (ChannelKind::Depolarizing, Regime::NonMarkovian) => {
                let gamma_axes = require_axes("gamma_axes", params.gamma_axes, false)?;
                let line_widths = match params.dp_prefactor {
                    DpPrefactor::PerAxis => {
                        require_axes("line_width_axes", params.line_width_axes, true)?
                    }
                    DpPrefactor::Global => {
                        let w = require_positive("line_width", params.line_width)?;
                        [w, w, w]
                    }
                };
                FamilyParams::DpNonMarkov { gamma_axes, line_widths }
            }
            (ChannelKind::RandomTelegraph, regime) => {
                let gamma = require_positive("gamma", params.gamma)?;
                let a = require_positive("switching_rate", params.switching_rate)?;
                // The regime is a property of the parameters; the declared
                // regime must agree with them.
                let ratio = a / gamma;
                match regime {
                    Regime::Markovian if ratio >= 0.5 => {
                        return Err(QcorrError::InvalidArgument(format!(
                            "Markovian telegraph noise requires switching_rate < gamma/2 \
                             (got ratio {ratio})"
                        )));
                    }
                    Regime::NonMarkovian if ratio <= 0.5 => {
                        return Err(QcorrError::InvalidArgument(format!(
                            "non-Markovian telegraph noise requires switching_rate > gamma/2 \
                             (got ratio {ratio})"
                        )));
                    }
                    _ => {}
                }
                FamilyParams::Rtn { gamma, switching_rate: a }
            }
        };
        Ok(Self { kind, regime, params: fp })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    fn check_time(t: f64) -> Result<()> {
        if t.is_finite() && t >= 0.0 {
            Ok(())
        } else {
            Err(QcorrError::InvalidArgument(format!(
                "time must be finite and non-negative, got {t}"
            )))
        }
    }

    /// Memory kernel at time `t`: the damping amplitude `p(t)` for AD/PD, the
    /// dephasing envelope for RTN, or the three axis envelopes for DP. All
    /// start at 1 at `t = 0`.
    pub fn memory_kernel(&self, t: f64) -> Result<KernelValue> {
        Self::check_time(t)?;
        Ok(match self.params {
            FamilyParams::AdMarkov { gamma } => KernelValue::Scalar((-gamma * t).exp()),
            FamilyParams::AdNonMarkov { gamma, line_width } => {
                KernelValue::Scalar(ad_nm_kernel(t, gamma, line_width).0)
            }
            FamilyParams::PdMarkov { gamma } => KernelValue::Scalar((-0.5 * gamma * t).exp()),
            FamilyParams::PdNonMarkov { gamma, line_width } => {
                KernelValue::Scalar(pd_nm_kernel(t, gamma, line_width).0)
            }
            FamilyParams::DpMarkov { gamma_axes, line_width } => KernelValue::PerAxis(
                std::array::from_fn(|i| dp_m_envelope(t, i, &gamma_axes, line_width).0),
            ),
            FamilyParams::DpNonMarkov { gamma_axes, line_widths } => KernelValue::PerAxis(
                std::array::from_fn(|i| dp_nm_envelope(t, i, &gamma_axes, &line_widths).0),
            ),
            FamilyParams::Rtn { gamma, switching_rate } => {
                KernelValue::Scalar(rtn_kernel(t, gamma, switching_rate).0)
            }
        })
    }

    /// Analytic time derivative of [`memory_kernel`].
    pub fn memory_kernel_derivative(&self, t: f64) -> Result<KernelValue> {
        Self::check_time(t)?;
        Ok(match self.params {
            FamilyParams::AdMarkov { gamma } => {
                KernelValue::Scalar(-gamma * (-gamma * t).exp())
            }
            FamilyParams::AdNonMarkov { gamma, line_width } => {
                KernelValue::Scalar(ad_nm_kernel(t, gamma, line_width).1)
            }
            FamilyParams::PdMarkov { gamma } => {
                KernelValue::Scalar(-0.5 * gamma * (-0.5 * gamma * t).exp())
            }
            FamilyParams::PdNonMarkov { gamma, line_width } => {
                KernelValue::Scalar(pd_nm_kernel(t, gamma, line_width).1)
            }
            FamilyParams::DpMarkov { gamma_axes, line_width } => KernelValue::PerAxis(
                std::array::from_fn(|i| dp_m_envelope(t, i, &gamma_axes, line_width).1),
            ),
            FamilyParams::DpNonMarkov { gamma_axes, line_widths } => KernelValue::PerAxis(
                std::array::from_fn(|i| dp_nm_envelope(t, i, &gamma_axes, &line_widths).1),
            ),
            FamilyParams::Rtn { gamma, switching_rate } => {
                KernelValue::Scalar(rtn_kernel(t, gamma, switching_rate).1)
            }
        })
    }

    /// Single-qubit Kraus operators at time `t`.
    pub fn kraus_at(&self, t: f64) -> Result<KrausSet> {
        Self::check_time(t)?;
        let ops = match self.params {
            FamilyParams::AdMarkov { .. } | FamilyParams::AdNonMarkov { .. } => {
                let p = self.memory_kernel(t)?.as_scalar().expect("scalar kernel");
                kraus_amplitude_damping(p)?
            }
            FamilyParams::PdMarkov { .. } | FamilyParams::PdNonMarkov { .. } => {
                let p = self.memory_kernel(t)?.as_scalar().expect("scalar kernel");
                kraus_phase_damping(p)?
            }
            FamilyParams::DpMarkov { .. } | FamilyParams::DpNonMarkov { .. } => {
                let om = self.memory_kernel(t)?.as_axes().expect("axis kernel");
                kraus_depolarizing(&dp_weights(&om)?)
            }
            FamilyParams::Rtn { .. } => {
                let lam = self.memory_kernel(t)?.as_scalar().expect("scalar kernel");
                kraus_telegraph(lam)?
            }
        };
        KrausSet::new(ops, t)
    }

    /// Analytic time derivatives of the operators returned by [`kraus_at`],
    /// in matching order. Fails with a derivative-singularity error exactly
    /// at square-root branch points (in practice only at `t = 0`, where every
    /// family has a vanishing radicand).
    pub fn kraus_derivative_at(&self, t: f64) -> Result<Vec<ComplexMatrix>> {
        Self::check_time(t)?;
        let singular = |what: &str| QcorrError::DerivativeSingularity {
            time: t,
            what: what.into(),
        };
        match self.params {
            FamilyParams::AdMarkov { .. } | FamilyParams::AdNonMarkov { .. } => {
                let p = self.memory_kernel(t)?.as_scalar().expect("scalar");
                let dp = self.memory_kernel_derivative(t)?.as_scalar().expect("scalar");
                if p == 0.0 {
                    return Err(singular("sqrt(p) branch point"));
                }
                if 1.0 - p == 0.0 {
                    return Err(singular("sqrt(1 - p) branch point"));
                }
                let d0 = diag2(0.0.into(), (dp / (2.0 * p.sqrt())).into());
                let mut d1 = ComplexMatrix::zeros(2)?;
                d1.set(0, 1, (-dp / (2.0 * (1.0 - p).sqrt())).into());
                Ok(vec![d0, d1])
            }
            FamilyParams::PdMarkov { .. } | FamilyParams::PdNonMarkov { .. } => {
                let p = self.memory_kernel(t)?.as_scalar().expect("scalar");
                let dp = self.memory_kernel_derivative(t)?.as_scalar().expect("scalar");
                if 1.0 - p * p == 0.0 {
                    return Err(singular("sqrt(1 - p^2) branch point"));
                }
                let d0 = diag2(0.0.into(), dp.into());
                let d1 = diag2(0.0.into(), (-p * dp / (1.0 - p * p).sqrt()).into());
                Ok(vec![d0, d1])
            }
            FamilyParams::DpMarkov { .. } | FamilyParams::DpNonMarkov { .. } => {
                let om = self.memory_kernel(t)?.as_axes().expect("axes");
                let dom = self.memory_kernel_derivative(t)?.as_axes().expect("axes");
                let w = dp_weights(&om)?;
                let dw = [
                    0.25 * (dom[0] - dom[1] - dom[2]),
                    0.25 * (-dom[0] + dom[1] - dom[2]),
                    0.25 * (-dom[0] - dom[1] + dom[2]),
                    0.25 * (dom[0] + dom[1] + dom[2]),
                ];
                let mut out = Vec::with_capacity(4);
                // Same order as kraus_depolarizing: identity term first.
                for (weight, dweight, op) in [
                    (w[3], dw[3], ComplexMatrix::identity(2)?),
                    (w[0], dw[0], pauli(1)),
                    (w[1], dw[1], pauli(2)),
                    (w[2], dw[2], pauli(3)),
                ] {
                    if weight == 0.0 {
                        return Err(singular("sqrt(P) branch point"));
                    }
                    out.push(op.scale((dweight / (2.0 * weight.sqrt())).into()));
                }
                Ok(out)
            }
            FamilyParams::Rtn { .. } => {
                let lam = self.memory_kernel(t)?.as_scalar().expect("scalar");
                let dlam = self.memory_kernel_derivative(t)?.as_scalar().expect("scalar");
                let plus = 0.5 * (1.0 + lam);
                let minus = 0.5 * (1.0 - lam);
                if plus == 0.0 || minus == 0.0 {
                    return Err(singular("sqrt((1 +/- lambda)/2) branch point"));
                }
                let d0 = ComplexMatrix::identity(2)?.scale((dlam / (4.0 * plus.sqrt())).into());
                let d1 = pauli(3).scale((-dlam / (4.0 * minus.sqrt())).into());
                Ok(vec![d0, d1])
            }
        }
    }
}

fn diag2(a: Complex64, b: Complex64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2).expect("static 2x2");
    m.set(0, 0, a);
    m.set(1, 1, b);
    m
}

/// Damping amplitude and its derivative for non-Markovian amplitude damping:
/// underdamped decay with frequency `d = sqrt(2*gamma*lw - lw^2)`.
fn ad_nm_kernel(t: f64, gamma: f64, lw: f64) -> (f64, f64) {
    let d = (2.0 * gamma * lw - lw * lw).sqrt();
    let half = 0.5 * d * t;
    let g = half.cos() + (lw / d) * half.sin();
    let env = (-lw * t).exp();
    let p = env * g * g;
    let dp = -env * (d + lw * lw / d) * g * half.sin();
    (p, dp)
}

/// Dephasing amplitude and derivative for non-Markovian phase damping.
fn pd_nm_kernel(t: f64, gamma: f64, lw: f64) -> (f64, f64) {
    let p = (-0.5 * gamma * (t + ((-lw * t).exp() - 1.0) / lw)).exp();
    let dp = -0.5 * gamma * (1.0 - (-lw * t).exp()) * p;
    (p, dp)
}

/// Telegraph-noise dephasing envelope and derivative. Oscillatory for
/// `switching_rate > gamma/2`, monotone otherwise, with the critically
/// damped closed form in a narrow window around the boundary.
fn rtn_kernel(t: f64, gamma: f64, switching_rate: f64) -> (f64, f64) {
    let nu = 2.0 * switching_rate / gamma;
    let disc = nu * nu - 1.0;
    let env = (-gamma * t).exp();
    if disc.abs() < FREQ_EPS {
        let lam = env * (1.0 + gamma * t);
        let dlam = -gamma * gamma * t * env;
        (lam, dlam)
    } else if disc > 0.0 {
        let om = disc.sqrt();
        let phase = om * gamma * t;
        let lam = env * (phase.cos() + phase.sin() / om);
        let dlam = -gamma * (om + 1.0 / om) * env * phase.sin();
        (lam, dlam)
    } else {
        let chi = (-disc).sqrt();
        let phase = chi * gamma * t;
        let lam = env * (phase.cosh() + phase.sinh() / chi);
        let dlam = -gamma * (1.0 / chi - chi) * env * phase.sinh();
        (lam, dlam)
    }
}

/// Non-Markovian depolarizing envelope for one axis. The frequency on axis
/// `i` is driven by the coupling rates of the other two axes.
fn dp_nm_envelope(t: f64, axis: usize, gamma_axes: &[f64; 3], line_widths: &[f64; 3]) -> (f64, f64) {
    let j = (axis + 1) % 3;
    let k = (axis + 2) % 3;
    let lw = line_widths[axis];
    let gj = gamma_axes[j] / line_widths[j];
    let gk = gamma_axes[k] / line_widths[k];
    let disc = 16.0 * (gj * gj + gk * gk) - 1.0;
    let env = (-0.5 * lw * t).exp();
    if disc.abs() < FREQ_EPS {
        let om = env * (1.0 + 0.5 * lw * t);
        let dom = -0.25 * lw * lw * t * env;
        (om, dom)
    } else if disc > 0.0 {
        let d = disc.sqrt();
        let phase = 0.5 * lw * d * t;
        let om = env * (phase.cos() + phase.sin() / d);
        let dom = -0.5 * lw * (d + 1.0 / d) * env * phase.sin();
        (om, dom)
    } else {
        let chi = (-disc).sqrt();
        let phase = 0.5 * lw * chi * t;
        let om = env * (phase.cosh() + phase.sinh() / chi);
        let dom = -0.5 * lw * (1.0 / chi - chi) * env * phase.sinh();
        (om, dom)
    }
}

/// Markovian depolarizing envelope: pure exponential with the rate on axis
/// `i` set by the other two couplings and the shared line width.
fn dp_m_envelope(t: f64, axis: usize, gamma_axes: &[f64; 3], line_width: f64) -> (f64, f64) {
    let j = (axis + 1) % 3;
    let k = (axis + 2) % 3;
    let rate = 4.0 * (gamma_axes[j] * gamma_axes[j] + gamma_axes[k] * gamma_axes[k]) / line_width;
    let om = (-0.5 * rate * t).exp();
    (om, -0.5 * rate * om)
}

/// Pauli-mixture weights `[P1, P2, P3, P4]` from the three axis envelopes;
/// `P4` multiplies the identity. Tiny negative weights from rounding are
/// clamped to zero, genuine negativity is a complete-positivity violation.
pub(crate) fn dp_weights(omega: &[f64; 3]) -> Result<[f64; 4]> {
    let raw = [
        0.25 * (1.0 + omega[0] - omega[1] - omega[2]),
        0.25 * (1.0 - omega[0] + omega[1] - omega[2]),
        0.25 * (1.0 - omega[0] - omega[1] + omega[2]),
        0.25 * (1.0 + omega[0] + omega[1] + omega[2]),
    ];
    let mut out = [0.0; 4];
    for (i, &w) in raw.iter().enumerate() {
        if w < DP_WEIGHT_FLOOR {
            return Err(QcorrError::CompletePositivityViolation(format!(
                "depolarizing weight P{} = {w:.6e} is negative",
                i + 1
            )));
        }
        out[i] = w.max(0.0);
    }
    Ok(out)
}

fn kraus_amplitude_damping(p: f64) -> Result<Vec<ComplexMatrix>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QcorrError::NumericalFailure(format!(
            "amplitude-damping kernel left [0, 1]: {p}"
        )));
    }
    let e0 = diag2(1.0.into(), p.sqrt().into());
    let mut e1 = ComplexMatrix::zeros(2)?;
    e1.set(0, 1, (1.0 - p).sqrt().into());
    Ok(vec![e0, e1])
}

fn kraus_phase_damping(p: f64) -> Result<Vec<ComplexMatrix>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QcorrError::NumericalFailure(format!(
            "phase-damping kernel left [0, 1]: {p}"
        )));
    }
    let e0 = diag2(1.0.into(), p.into());
    // The |1><1| weight must be sqrt(1 - p^2), not sqrt(1 - p), for
    // E0^dag E0 + E1^dag E1 = I to hold.
    let e1 = diag2(ZERO, (1.0 - p * p).sqrt().into());
    Ok(vec![e0, e1])
}

/// Deliberately wrong phase-damping set with a `sqrt(1 - p)` second operator;
/// kept for the validation command, which demonstrates that this variant
/// fails the completeness invariant for every `p` strictly between 0 and 1.
pub fn kraus_phase_damping_sqrt_variant(p: f64) -> Result<Vec<ComplexMatrix>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QcorrError::InvalidArgument(format!(
            "kernel value must lie in [0, 1], got {p}"
        )));
    }
    let e0 = diag2(1.0.into(), p.into());
    let e1 = diag2(ZERO, (1.0 - p).sqrt().into());
    Ok(vec![e0, e1])
}

fn kraus_depolarizing(weights: &[f64; 4]) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::identity(2).expect("static").scale(weights[3].sqrt().into()),
        pauli(1).scale(weights[0].sqrt().into()),
        pauli(2).scale(weights[1].sqrt().into()),
        pauli(3).scale(weights[2].sqrt().into()),
    ]
}

fn kraus_telegraph(lam: f64) -> Result<Vec<ComplexMatrix>> {
    if !(-1.0..=1.0).contains(&lam) {
        return Err(QcorrError::NumericalFailure(format!(
            "telegraph envelope left [-1, 1]: {lam}"
        )));
    }
    let e0 = ComplexMatrix::identity(2)?.scale((0.5 * (1.0 + lam)).sqrt().into());
    let e1 = pauli(3).scale((0.5 * (1.0 - lam)).sqrt().into());
    Ok(vec![e0, e1])
}

/// A set of single-qubit Kraus operators at a fixed time, validated to be
/// complete: `||sum_i E_i^dag E_i - I||_F <= COMPLETENESS_TOL`.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
    time: f64,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>, time: f64) -> Result<Self> {
        if operators.is_empty() {
            return Err(QcorrError::InvalidArgument("empty Kraus set".into()));
        }
        let defect = completeness_defect(&operators)?;
        if defect > COMPLETENESS_TOL {
            return Err(QcorrError::CompletePositivityViolation(format!(
                "Kraus completeness defect {defect:.6e} at t = {time}"
            )));
        }
        Ok(Self { operators, time })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

/// `||sum_i E_i^dag E_i - I||_F` for a list of 2x2 operators.
pub fn completeness_defect(operators: &[ComplexMatrix]) -> Result<f64> {
    let mut acc = ComplexMatrix::zeros(2)?;
    for e in operators {
        if e.dim() != 2 {
            return Err(QcorrError::InvalidArgument(
                "Kraus operators must be 2x2".into(),
            ));
        }
        acc = acc.add(&e.adjoint().mul(e)?)?;
    }
    Ok(acc.sub(&ComplexMatrix::identity(2)?)?.hs_norm())
}

/// Which qubits the noise acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSides {
    /// Only qubit A: `rho -> sum_i (E_i (x) I) rho (E_i (x) I)^dag`.
    #[default]
    First,
    /// Both qubits independently:
    /// `rho -> sum_ij (E_i (x) E_j) rho (E_i (x) E_j)^dag`.
    Both,
}

/// Applies the channel to qubit A only.
pub fn apply_one_sided(kraus: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let id2 = ComplexMatrix::identity(2)?;
    let mut acc = ComplexMatrix::zeros(4)?;
    for e in kraus.operators() {
        let k = ComplexMatrix::kron(e, &id2)?;
        acc = acc.add(&k.mul(rho.matrix())?.mul(&k.adjoint())?)?;
    }
    DensityMatrix::new(acc)
}

/// Applies the channel to both qubits independently.
pub fn apply_two_sided(kraus: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut acc = ComplexMatrix::zeros(4)?;
    for ei in kraus.operators() {
        for ej in kraus.operators() {
            let k = ComplexMatrix::kron(ei, ej)?;
            acc = acc.add(&k.mul(rho.matrix())?.mul(&k.adjoint())?)?;
        }
    }
    DensityMatrix::new(acc)
}

/// Dispatches on [`NoiseSides`].
pub fn apply(kraus: &KrausSet, rho: &DensityMatrix, sides: NoiseSides) -> Result<DensityMatrix> {
    match sides {
        NoiseSides::First => apply_one_sided(kraus, rho),
        NoiseSides::Both => apply_two_sided(kraus, rho),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_werner, BellState, WernerSpec};

    fn family(kind: ChannelKind, regime: Regime) -> ChannelFamily {
        // One representative parameter point per (kind, regime).
        let params = match kind {
            ChannelKind::AmplitudeDamping | ChannelKind::PhaseDamping => ChannelParams {
                gamma: Some(1.0),
                line_width: (regime == Regime::NonMarkovian).then_some(0.1),
                ..Default::default()
            },
            ChannelKind::Depolarizing => match regime {
                Regime::Markovian => ChannelParams {
                    gamma_axes: Some([0.2, 0.2, 0.2]),
                    line_width: Some(1.0),
                    ..Default::default()
                },
                Regime::NonMarkovian => ChannelParams {
                    gamma_axes: Some([0.2, 0.2, 5.0]),
                    line_width_axes: Some([1.0, 1.0, 1.0]),
                    ..Default::default()
                },
            },
            ChannelKind::RandomTelegraph => ChannelParams {
                gamma: Some(1.0),
                switching_rate: Some(match regime {
                    Regime::Markovian => 0.25,
                    Regime::NonMarkovian => 40.0,
                }),
                ..Default::default()
            },
        };
        ChannelFamily::new(kind, regime, &params).unwrap()
    }

    fn all_families() -> Vec<ChannelFamily> {
        let mut out = Vec::new();
        for kind in [
            ChannelKind::AmplitudeDamping,
            ChannelKind::PhaseDamping,
            ChannelKind::Depolarizing,
            ChannelKind::RandomTelegraph,
        ] {
            for regime in [Regime::Markovian, Regime::NonMarkovian] {
                out.push(family(kind, regime));
            }
        }
        out
    }

    #[test]
    fn kernel_reference_values() {
        // Frozen values from an independent desk calculation.
        let ad_nm = family(ChannelKind::AmplitudeDamping, Regime::NonMarkovian);
        let p = ad_nm.memory_kernel(1.0).unwrap().as_scalar().unwrap();
        assert!((p - 0.9524058826526706).abs() < 1e-15);
        let dp = ad_nm.memory_kernel_derivative(1.0).unwrap().as_scalar().unwrap();
        assert!((dp - (-0.0920985272900634)).abs() < 1e-15);

        let pd_nm = family(ChannelKind::PhaseDamping, Regime::NonMarkovian);
        let p = pd_nm.memory_kernel(1.0).unwrap().as_scalar().unwrap();
        assert!((p - 0.9761030733742065).abs() < 1e-15);

        let rtn_nm = family(ChannelKind::RandomTelegraph, Regime::NonMarkovian);
        let l = rtn_nm.memory_kernel(0.5).unwrap().as_scalar().unwrap();
        assert!((l - (-0.39743866878996115)).abs() < 1e-14);

        let rtn_m = family(ChannelKind::RandomTelegraph, Regime::Markovian);
        let l = rtn_m.memory_kernel(1.0).unwrap().as_scalar().unwrap();
        assert!((l - 0.9302947940980407).abs() < 1e-15);

        let dp_nm = family(ChannelKind::Depolarizing, Regime::NonMarkovian);
        let om = dp_nm.memory_kernel(0.5).unwrap().as_axes().unwrap();
        assert!((om[0] - 0.18185293255011734).abs() < 1e-14);
        assert!((om[1] - 0.18185293255011734).abs() < 1e-14);
        assert!((om[2] - 0.966129025127769).abs() < 1e-14);

        let dp_m = family(ChannelKind::Depolarizing, Regime::Markovian);
        let om = dp_m.memory_kernel(0.5).unwrap().as_axes().unwrap();
        for v in om {
            assert!((v - 0.9231163463866358).abs() < 1e-15);
        }
    }

    #[test]
    fn kernels_start_at_one_with_flat_nonmarkovian_onset() {
        for fam in all_families() {
            match fam.memory_kernel(0.0).unwrap() {
                KernelValue::Scalar(v) => assert_eq!(v, 1.0),
                KernelValue::PerAxis(v) => assert_eq!(v, [1.0; 3]),
            }
        }
        // Every non-Markovian kernel has zero slope at t = 0; so does the
        // sub-Markovian telegraph envelope.
        for fam in all_families() {
            let flat = fam.regime() == Regime::NonMarkovian
                || fam.kind() == ChannelKind::RandomTelegraph;
            if !flat {
                continue;
            }
            match fam.memory_kernel_derivative(0.0).unwrap() {
                KernelValue::Scalar(v) => assert_eq!(v, 0.0),
                KernelValue::PerAxis(v) => assert_eq!(v, [0.0; 3]),
            }
        }
    }

    #[test]
    fn kraus_is_identity_map_at_time_zero() {
        let w = make_werner(&WernerSpec { p: 0.7, bell: BellState::PsiMinus }).unwrap();
        for fam in all_families() {
            let k = fam.kraus_at(0.0).unwrap();
            let out = apply_one_sided(&k, &w).unwrap();
            assert!(out.matrix().sub(w.matrix()).unwrap().hs_norm() < 1e-14);
            let out2 = apply_two_sided(&k, &w).unwrap();
            assert!(out2.matrix().sub(w.matrix()).unwrap().hs_norm() < 1e-14);
        }
    }

    #[test]
    fn completeness_holds_along_each_trajectory() {
        for fam in all_families() {
            for k in 0..200 {
                let t = 10.0 * (k as f64) / 199.0;
                let set = fam.kraus_at(t).unwrap();
                assert!(
                    completeness_defect(set.operators()).unwrap() <= COMPLETENESS_TOL,
                    "completeness failed for {:?}/{:?} at t = {t}",
                    fam.kind(),
                    fam.regime()
                );
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for fam in all_families() {
            for &t in &[0.3, 1.1, 2.7, 6.5] {
                let anal = fam.kraus_derivative_at(t).unwrap();
                let plus = fam.kraus_at(t + h).unwrap();
                let minus = fam.kraus_at(t - h).unwrap();
                for (idx, da) in anal.iter().enumerate() {
                    let fd = plus.operators()[idx]
                        .sub(&minus.operators()[idx])
                        .unwrap()
                        .scale((1.0 / (2.0 * h)).into());
                    let diff = da.sub(&fd).unwrap().hs_norm();
                    let scale = da.hs_norm().max(fd.hs_norm());
                    assert!(
                        diff <= 1e-6 * scale.max(1.0),
                        "derivative mismatch {diff:.3e} for {:?}/{:?} op {idx} at t = {t}",
                        fam.kind(),
                        fam.regime()
                    );
                }
            }
        }
    }

    #[test]
    fn derivative_is_singular_exactly_at_time_zero() {
        for fam in all_families() {
            assert!(matches!(
                fam.kraus_derivative_at(0.0),
                Err(QcorrError::DerivativeSingularity { .. })
            ));
            // Away from t = 0 it exists. (For flat-onset depolarizing noise
            // the weights stay pinned at floating-point zero slightly longer,
            // so "away" must clear the rounding plateau.)
            assert!(fam.kraus_derivative_at(1e-6).is_ok());
        }
    }

    #[test]
    fn parameter_validation() {
        // Missing gamma.
        assert!(ChannelFamily::new(
            ChannelKind::AmplitudeDamping,
            Regime::Markovian,
            &ChannelParams::default()
        )
        .is_err());
        // Overdamped non-Markovian amplitude damping is rejected.
        assert!(ChannelFamily::new(
            ChannelKind::AmplitudeDamping,
            Regime::NonMarkovian,
            &ChannelParams { gamma: Some(1.0), line_width: Some(2.0), ..Default::default() }
        )
        .is_err());
        // Telegraph regime must match the parameter ratio, strictly.
        for (rate, regime, ok) in [
            (0.25, Regime::Markovian, true),
            (0.25, Regime::NonMarkovian, false),
            (40.0, Regime::NonMarkovian, true),
            (40.0, Regime::Markovian, false),
            (0.5, Regime::Markovian, false),
            (0.5, Regime::NonMarkovian, false),
        ] {
            let r = ChannelFamily::new(
                ChannelKind::RandomTelegraph,
                regime,
                &ChannelParams {
                    gamma: Some(1.0),
                    switching_rate: Some(rate),
                    ..Default::default()
                },
            );
            assert_eq!(r.is_ok(), ok, "rate {rate} regime {regime:?}");
        }
        // Negative time.
        let fam = family(ChannelKind::PhaseDamping, Regime::Markovian);
        assert!(fam.kraus_at(-1.0).is_err());
    }

    #[test]
    fn depolarizing_weight_floor() {
        // A tiny negative weight is clamped: P2 = (1 - o1 + o2 - o3)/4 < 0.
        let w = dp_weights(&[1.0, 1.0 - 2e-10, 1.0]).unwrap();
        assert_eq!(w[1], 0.0);
        assert!(w[0] > 0.0 && w[2] > 0.0);
        // ...but genuine negativity is a complete-positivity violation.
        let err = dp_weights(&[-0.9, 0.6, 0.6]).unwrap_err();
        assert!(matches!(err, QcorrError::CompletePositivityViolation(_)));
    }

    #[test]
    fn corrupted_phase_damping_variant_fails_completeness() {
        for p in [0.1, 0.5, 0.9] {
            let ops = kraus_phase_damping_sqrt_variant(p).unwrap();
            let defect = completeness_defect(&ops).unwrap();
            assert!(defect > 1e-2, "defect {defect} at p = {p}");
            assert!(KrausSet::new(ops, 0.0).is_err());
        }
        // The endpoints are the only places the variant is complete.
        for p in [0.0, 1.0] {
            let ops = kraus_phase_damping_sqrt_variant(p).unwrap();
            assert!(completeness_defect(&ops).unwrap() < 1e-15);
        }
    }

    #[test]
    fn markovian_damping_reaches_ground_state() {
        let fam = family(ChannelKind::AmplitudeDamping, Regime::Markovian);
        let k = fam.kraus_at(60.0).unwrap();
        let rho = apply_one_sided(&k, &BellState::PhiPlus.projector()).unwrap();
        // Qubit A relaxes to |0>: the |1x><1x| block empties out.
        let tail = rho.matrix().get(2, 2).re + rho.matrix().get(3, 3).re;
        assert!(tail < 1e-20);
    }

    #[test]
    fn telegraph_envelope_decays_monotonically_in_markovian_regime() {
        let fam = family(ChannelKind::RandomTelegraph, Regime::Markovian);
        let mut prev = 1.0;
        for k in 1..=300 {
            let t = 30.0 * (k as f64) / 300.0;
            let lam = fam.memory_kernel(t).unwrap().as_scalar().unwrap();
            assert!(lam > 0.0 && lam < prev);
            prev = lam;
        }
    }
}
