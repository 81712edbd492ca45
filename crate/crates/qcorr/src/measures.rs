//! Correlation measures of a two-qubit state and the quantum-speed-limit
//! time of its noisy evolution.
//!
//! All measures derive from the 3x3 correlation matrix `T` of the state's
//! Bloch form. With `u1 >= u2 >= u3` the singular values of `T`:
//!
//! * `N = u1 + u2 + u3` and teleportation fidelity `F = (1 + N/3) / 2`;
//!   the channel beats classical teleportation iff `N > 1`.
//! * Bell-CHSH strength `B = 2 sqrt(u1^2 + u2^2)`, classical bound 2.
//! * Steering with k measurement settings: `S_k = max(0, (L_k - 1)/(sqrt(k) - 1))`
//!   where `L2 = sqrt(c1^2 + c2^2)` and `L3 = sqrt(c1^2 + c2^2 + c3^2)`;
//!   the coefficients `c_i` are the singular values by default, or the
//!   eigenvalue magnitudes of a symmetric `T` in eigenvalue mode.
//! * Concurrence `C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`,
//!   `l_i` the descending eigenvalues of `rho rho~` with the spin-flipped
//!   state `rho~ = (sy (x) sy) rho* (sy (x) sy)`, computed through the
//!   Hermitian product `sqrt(rho) rho~ sqrt(rho)`.
//!
//! These strengths form a strict one-way ladder: beating the fidelity bound
//! implies a Bell violation, which is equivalent to two-setting steerability,
//! which implies three-setting steerability, which implies a useful channel
//! (`N > 1`), which implies entanglement (`C > 0`).

use serde::{Deserialize, Serialize};

use crate::channels::{apply, ChannelFamily, NoiseSides};
use crate::error::{QcorrError, Result};
use crate::linalg::{pauli, sym3_eigenvalues, ComplexMatrix};
use crate::states::{pauli_decompose, DensityMatrix};

/// Below this, the QSL denominator counts as degenerate and `tau` is 0.
pub const QSL_DENOMINATOR_FLOOR: f64 = 1e-15;
/// Largest `||T - T^t||_F` accepted by the eigenvalue steering mode.
pub const T_SYMMETRY_TOL: f64 = 1e-10;
/// Forward step factor for the finite-difference fallback at derivative
/// singularities.
const QSL_FD_STEP: f64 = 1e-7;
/// Eigenvalues of the concurrence quartic below `floor * largest` are
/// rounding residue of exact zeros; the square root would amplify them from
/// ~1e-17 to ~3e-9, so they are zeroed first. Genuine spectra of interest
/// never have a 1e-14 dynamic range.
const CONC_EIG_RELATIVE_FLOOR: f64 = 1e-14;

/// Decision levels for threshold-crossing detection. The defaults are the
/// physically meaningful bounds; they can be overridden per run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Fidelity above which no local-hidden-variable model exists.
    pub f_lhv: f64,
    /// Classical bound of the Bell-CHSH combination.
    pub bell_classical: f64,
    /// `N` level above which teleportation beats the classical channel.
    pub n_useful: f64,
    /// Zero level for the unclipped steering strengths.
    pub steering_zero: f64,
    /// Zero level for the unclipped concurrence.
    pub concurrence_zero: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            f_lhv: 0.87,
            bell_classical: 2.0,
            n_useful: 1.0,
            steering_zero: 0.0,
            concurrence_zero: 0.0,
        }
    }
}

/// How the steering coefficients `c_i` are extracted from `T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringMode {
    /// Singular values of `T`; defined for every state.
    #[default]
    SingularValues,
    /// Eigenvalue magnitudes of `T`; requires `T` symmetric.
    Eigenvalues,
}

/// Which instantaneous generator feeds the QSL denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QslGenerator {
    /// `sum_a || K_a rho_0 Kdot_a^dag ||_F`, one term per Kraus operator.
    #[default]
    PerOperator,
    /// `|| sum_a (Kdot_a rho_t K_a^dag + K_a rho_t Kdot_a^dag) ||_F`.
    Symmetrized,
}

/// Every correlation measure of one state, clipped and unclipped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureSample {
    pub fidelity: f64,
    pub n_value: f64,
    pub bell: f64,
    /// `L2`, the two-setting steering strength before shifting and clipping.
    pub lambda2: f64,
    /// `L3`, the three-setting equivalent.
    pub lambda3: f64,
    pub s2: f64,
    pub s3: f64,
    /// `sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)`, before clipping at zero.
    pub concurrence_raw: f64,
    pub concurrence: f64,
}

/// Singular values of a 3x3 correlation matrix, descending.
pub fn correlation_singular_values(t: &[[f64; 3]; 3]) -> Result<[f64; 3]> {
    // Eigenvalues of T^t T are the squared singular values.
    let mut gram = [[0.0; 3]; 3];
    for row in t {
        for i in 0..3 {
            for j in 0..3 {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let eig = sym3_eigenvalues(&gram)?;
    Ok([eig[0].max(0.0).sqrt(), eig[1].max(0.0).sqrt(), eig[2].max(0.0).sqrt()])
}

/// Eigenvalue magnitudes of a symmetric 3x3 correlation matrix, descending.
/// Fails if `T` is not symmetric to within `T_SYMMETRY_TOL`.
pub fn correlation_eigen_magnitudes(t: &[[f64; 3]; 3]) -> Result<[f64; 3]> {
    let mut defect = 0.0f64;
    for (i, row) in t.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let d = v - t[j][i];
            defect += d * d;
        }
    }
    if defect.sqrt() > T_SYMMETRY_TOL {
        return Err(QcorrError::InvalidArgument(format!(
            "eigenvalue steering mode requires a symmetric correlation matrix \
             (asymmetry {:.3e})",
            defect.sqrt()
        )));
    }
    let eig = sym3_eigenvalues(t)?;
    let mut mags = [eig[0].abs(), eig[1].abs(), eig[2].abs()];
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(mags)
}

fn steering_strengths(c: &[f64; 3]) -> (f64, f64, f64, f64) {
    let l2 = (c[0] * c[0] + c[1] * c[1]).sqrt();
    let l3 = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let s2_raw = (l2 - 1.0) / (std::f64::consts::SQRT_2 - 1.0);
    let s3_raw = (l3 - 1.0) / (3.0f64.sqrt() - 1.0);
    (l2, l3, s2_raw, s3_raw)
}

/// Unclipped concurrence together with the clipped value.
pub fn concurrence_pair(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let yy = ComplexMatrix::kron(&pauli(2), &pauli(2))?;
    let flipped = yy.mul(&rho.matrix().conjugate())?.mul(&yy)?;
    let root = rho.matrix().psd_sqrt()?;
    // sqrt(rho) rho~ sqrt(rho) is Hermitian PSD with the same spectrum as
    // rho rho~, so the quartic eigenproblem stays in Hermitian territory.
    let inner = root.mul(&flipped)?.mul(&root)?;
    let eig = inner.hermitian_eig()?;
    let floor = eig.eigenvalues[0].max(0.0) * CONC_EIG_RELATIVE_FLOOR;
    let s: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .collect();
    let raw = s[0] - s[1] - s[2] - s[3];
    Ok((raw, raw.max(0.0)))
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence_pair(rho)?.1)
}

/// Computes every measure of one state with a single Bloch decomposition.
pub fn evaluate_state(rho: &DensityMatrix, mode: SteeringMode) -> Result<MeasureSample> {
    let d = pauli_decompose(rho)?;
    let u = correlation_singular_values(&d.t)?;
    let c = match mode {
        SteeringMode::SingularValues => u,
        SteeringMode::Eigenvalues => correlation_eigen_magnitudes(&d.t)?,
    };
    let n_value = u[0] + u[1] + u[2];
    let fidelity = 0.5 * (1.0 + n_value / 3.0);
    let bell = 2.0 * (u[0] * u[0] + u[1] * u[1]).sqrt();
    let (lambda2, lambda3, s2_raw, s3_raw) = steering_strengths(&c);
    let (concurrence_raw, concurrence) = concurrence_pair(rho)?;
    Ok(MeasureSample {
        fidelity,
        n_value,
        bell,
        lambda2,
        lambda3,
        s2: s2_raw.max(0.0),
        s3: s3_raw.max(0.0),
        concurrence_raw,
        concurrence,
    })
}

/// A quantum-speed-limit evaluation. `degenerate` marks points where the
/// instantaneous generator vanished (below `QSL_DENOMINATOR_FLOOR`) and
/// `tau` was defined as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QslSample {
    pub tau: f64,
    pub degenerate: bool,
}

fn kraus_derivatives_or_fallback(family: &ChannelFamily, t: f64) -> Result<Vec<ComplexMatrix>> {
    match family.kraus_derivative_at(t) {
        Ok(d) => Ok(d),
        Err(QcorrError::DerivativeSingularity { .. }) => {
            // One-sided forward difference across the branch point.
            let h = QSL_FD_STEP * t.max(1.0);
            let base = family.kraus_at(t)?;
            let ahead = family.kraus_at(t + h)?;
            base.operators()
                .iter()
                .zip(ahead.operators())
                .map(|(b, a)| Ok(a.sub(b)?.scale((1.0 / h).into())))
                .collect()
        }
        Err(e) => Err(e),
    }
}

/// Lifts single-qubit Kraus operators (and their derivatives) to the
/// two-qubit space according to which sides the noise acts on.
fn lift_kraus(
    ops: &[ComplexMatrix],
    derivs: &[ComplexMatrix],
    sides: NoiseSides,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let id2 = ComplexMatrix::identity(2)?;
    let mut out = Vec::new();
    match sides {
        NoiseSides::First => {
            for (e, de) in ops.iter().zip(derivs) {
                out.push((ComplexMatrix::kron(e, &id2)?, ComplexMatrix::kron(de, &id2)?));
            }
        }
        NoiseSides::Both => {
            for (ei, dei) in ops.iter().zip(derivs) {
                for (ej, dej) in ops.iter().zip(derivs) {
                    let k = ComplexMatrix::kron(ei, ej)?;
                    let dk = ComplexMatrix::kron(dei, ej)?.add(&ComplexMatrix::kron(ei, dej)?)?;
                    out.push((k, dk));
                }
            }
        }
    }
    Ok(out)
}

/// Quantum-speed-limit time of the evolution from `rho0` to time `t` under
/// `family`, from the instantaneous generator at `t`:
///
/// `tau = (2 theta^2 / pi^2) * sqrt(tr rho0^2) / D`,
/// `theta = arccos(tr(rho0 rho_t) / tr(rho0^2))`, with `D` the denominator
/// selected by `generator`. At `t = 0`, and wherever `D` underflows the
/// floor, the result is zero and flagged degenerate.
pub fn qsl_time(
    family: &ChannelFamily,
    rho0: &DensityMatrix,
    t: f64,
    sides: NoiseSides,
    generator: QslGenerator,
) -> Result<QslSample> {
    if t == 0.0 {
        return Ok(QslSample { tau: 0.0, degenerate: true });
    }
    let kraus = family.kraus_at(t)?;
    let derivs = kraus_derivatives_or_fallback(family, t)?;
    let rho_t = apply(&kraus, rho0, sides)?;
    let purity0 = rho0.purity();
    let ratio = (rho0.overlap(&rho_t) / purity0).clamp(-1.0, 1.0);
    let theta = ratio.acos();
    let lifted = lift_kraus(kraus.operators(), &derivs, sides)?;
    let denominator = match generator {
        QslGenerator::PerOperator => {
            let mut acc = 0.0;
            for (k, dk) in &lifted {
                acc += k.mul(rho0.matrix())?.mul(&dk.adjoint())?.hs_norm();
            }
            acc
        }
        QslGenerator::Symmetrized => {
            let mut acc = ComplexMatrix::zeros(4)?;
            for (k, dk) in &lifted {
                acc = acc.add(&dk.mul(rho_t.matrix())?.mul(&k.adjoint())?)?;
                acc = acc.add(&k.mul(rho_t.matrix())?.mul(&dk.adjoint())?)?;
            }
            acc.hs_norm()
        }
    };
    if denominator < QSL_DENOMINATOR_FLOOR {
        return Ok(QslSample { tau: 0.0, degenerate: true });
    }
    let tau = (2.0 * theta * theta / (std::f64::consts::PI * std::f64::consts::PI))
        * purity0.sqrt()
        / denominator;
    Ok(QslSample { tau, degenerate: false })
}
