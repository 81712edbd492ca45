//! Two-qubit density matrices, the standard entangled initial states, and the
//! Pauli (Bloch) decomposition used by every correlation measure.
//!
//! Basis ordering is |00>, |01>, |10>, |11> with the first label belonging to
//! qubit A, so a single-qubit operator `E` acts on qubit A as `kron(E, I)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcorrError, Result};
use crate::linalg::{pauli, ComplexMatrix};

/// Largest allowed `|tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Largest allowed Hermiticity defect.
pub const HERM_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as rounding noise.
pub const EIG_FLOOR: f64 = -1e-10;
/// Largest imaginary part tolerated in a Bloch coefficient.
pub const BLOCH_IMAG_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A validated 4x4 two-qubit density matrix: Hermitian, unit trace, and
/// positive semidefinite within the tolerances above.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a 4x4 matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(QcorrError::NotAState(format!(
                "density matrix must be 4x4, got {0}x{0}",
                matrix.dim()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QcorrError::NotAState(format!(
                "trace must be 1, got {} + {}i",
                tr.re, tr.im
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERM_TOL {
            return Err(QcorrError::NotAState(format!(
                "not Hermitian (defect {defect:.3e})"
            )));
        }
        let sym = matrix.symmetrized();
        let eig = sym.hermitian_eig()?;
        if let Some(&min) = eig
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < EIG_FLOOR {
                return Err(QcorrError::NotAState(format!(
                    "negative eigenvalue {min:.6e}"
                )));
            }
        }
        Ok(Self { matrix: sym })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(rho^2)`, 1 for pure states and 1/4 for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).expect("same dim").trace().re
    }

    /// `Re tr(rho sigma)`, the Hilbert-Schmidt overlap of two states.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.matrix.mul(&other.matrix).expect("same dim").trace().re
    }
}

/// The four maximally entangled Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    /// (|00> + |11>) / sqrt(2)
    PhiPlus,
    /// (|00> - |11>) / sqrt(2)
    PhiMinus,
    /// (|01> + |10>) / sqrt(2)
    PsiPlus,
    /// (|01> - |10>) / sqrt(2)
    PsiMinus,
}

impl BellState {
    /// Amplitudes in the |00>, |01>, |10>, |11> basis.
    pub fn amplitudes(&self) -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellState::PhiPlus => [h, ZERO, ZERO, h],
            BellState::PhiMinus => [h, ZERO, ZERO, -h],
            BellState::PsiPlus => [ZERO, h, h, ZERO],
            BellState::PsiMinus => [ZERO, h, -h, ZERO],
        }
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = self.amplitudes();
        let m = ComplexMatrix::from_fn(4, |i, j| v[i] * v[j].conj()).expect("static 4x4");
        DensityMatrix::new(m).expect("Bell projector is a state")
    }
}

/// A two-qubit pure state `alpha |00> + beta |11>`.
#[derive(Clone, Copy, Debug)]
pub struct PureStateSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
}

/// Builds the projector onto `alpha |00> + beta |11>`; the amplitudes must be
/// normalized to within 1e-12.
pub fn make_pure(spec: &PureStateSpec) -> Result<DensityMatrix> {
    let norm = spec.alpha.norm_sqr() + spec.beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(QcorrError::InvalidArgument(format!(
            "|alpha|^2 + |beta|^2 must be 1, got {norm}"
        )));
    }
    let v = [spec.alpha, ZERO, ZERO, spec.beta];
    let m = ComplexMatrix::from_fn(4, |i, j| v[i] * v[j].conj())?;
    DensityMatrix::new(m)
}

/// A Werner state `p |bell><bell| + (1 - p) I/4`.
#[derive(Clone, Copy, Debug)]
pub struct WernerSpec {
    pub p: f64,
    pub bell: BellState,
}

pub fn make_werner(spec: &WernerSpec) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(QcorrError::InvalidArgument(format!(
            "Werner mixing parameter must lie in [0, 1], got {}",
            spec.p
        )));
    }
    let proj = spec.bell.projector();
    let mixed = ComplexMatrix::identity(4)?.scale(Complex64::new(0.25 * (1.0 - spec.p), 0.0));
    let m = proj
        .matrix()
        .scale(Complex64::new(spec.p, 0.0))
        .add(&mixed)?;
    DensityMatrix::new(m)
}

/// Bloch-form coefficients of a two-qubit state:
/// `rho = (I (x) I + sum_i r_i s_i (x) I + sum_i s_i I (x) s_i
///        + sum_ij t_ij s_i (x) s_j) / 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliDecomposition {
    /// Local Bloch vector of qubit A.
    pub r: [f64; 3],
    /// Local Bloch vector of qubit B.
    pub s: [f64; 3],
    /// 3x3 correlation matrix, `t[i][j] = tr((s_i (x) s_j) rho)`.
    pub t: [[f64; 3]; 3],
}

fn real_coefficient(value: Complex64) -> Result<f64> {
    if value.im.abs() > BLOCH_IMAG_TOL {
        return Err(QcorrError::NumericalFailure(format!(
            "Bloch coefficient has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Extracts `r`, `s` and the correlation matrix from a state.
pub fn pauli_decompose(rho: &DensityMatrix) -> Result<PauliDecomposition> {
    let id2 = ComplexMatrix::identity(2)?;
    let m = rho.matrix();
    let mut out = PauliDecomposition {
        r: [0.0; 3],
        s: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        let si = pauli(i + 1);
        out.r[i] = real_coefficient(ComplexMatrix::kron(&si, &id2)?.mul(m)?.trace())?;
        out.s[i] = real_coefficient(ComplexMatrix::kron(&id2, &si)?.mul(m)?.trace())?;
        for j in 0..3 {
            let sj = pauli(j + 1);
            out.t[i][j] = real_coefficient(ComplexMatrix::kron(&si, &sj)?.mul(m)?.trace())?;
        }
    }
    Ok(out)
}

/// Rebuilds a state from Bloch coefficients; fails with a not-a-state error
/// if the coefficients are not physical.
pub fn pauli_reconstruct(d: &PauliDecomposition) -> Result<DensityMatrix> {
    let id2 = ComplexMatrix::identity(2)?;
    let mut acc = ComplexMatrix::identity(4)?;
    for i in 0..3 {
        let si = pauli(i + 1);
        acc = acc.add(&ComplexMatrix::kron(&si, &id2)?.scale(Complex64::new(d.r[i], 0.0)))?;
        acc = acc.add(&ComplexMatrix::kron(&id2, &si)?.scale(Complex64::new(d.s[i], 0.0)))?;
        for j in 0..3 {
            let sj = pauli(j + 1);
            acc = acc.add(&ComplexMatrix::kron(&si, &sj)?.scale(Complex64::new(d.t[i][j], 0.0)))?;
        }
    }
    DensityMatrix::new(acc.scale(Complex64::new(0.25, 0.0)))
}
