//! Dense complex matrices of the two sizes this crate needs (2x2 single-qubit
//! operators and 4x4 two-qubit operators), plus the Hermitian eigensolver the
//! rest of the crate is built on.

use num_complex::Complex64;

use crate::error::{QcorrError, Result};

/// Absolute off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
/// Maximum number of full Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest Hermiticity defect `||M - M^dag||_F` accepted by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted (and clamped to zero) by `psd_sqrt`.
pub const PSD_EIG_FLOOR: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major, restricted to dimensions 2 and 4.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(QcorrError::InvalidArgument(format!(
            "matrix dimension must be 2 or 4, got {dim}"
        )))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: vec![ZERO; dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        Ok(m)
    }

    /// Builds a matrix from a row-major slice of `dim * dim` entries.
    pub fn from_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(QcorrError::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QcorrError::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { dim, data: entries.to_vec() })
    }

    /// Builds a matrix by evaluating `f(row, col)` at every index pair.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_slice(dim, &data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugate of every entry (no transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self { dim: n, data: vec![ZERO; n * n] };
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||M - M^dag||_F`, zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = self.get(i, j) - self.get(j, i).conj();
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M^dag) / 2`.
    pub fn symmetrized(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.set(i, j, v);
            }
        }
        out
    }

    /// Kronecker product of two single-qubit operators; the result acts on
    /// the two-qubit space with `out[2i+k][2j+l] = a[i][j] * b[k][l]`.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(QcorrError::InvalidArgument(format!(
                "kron expects two 2x2 factors, got {}x{} and {}x{}",
                a.dim, a.dim, b.dim, b.dim
            )));
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.set(2 * i + k, 2 * j + l, a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix. Input is symmetrized first;
    /// a Hermiticity defect above `HERMITICITY_TOL` is rejected.
    pub fn hermitian_eig(&self) -> Result<HermitianEigen> {
        let defect = self.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(QcorrError::InvalidArgument(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let sym = self.symmetrized();
        let n = self.dim;
        let mut a = sym.data.clone();
        let mut v = Self::identity(n)?.data;
        jacobi_hermitian(n, &mut a, &mut v)?;
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
        order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = Self::zeros(n)?;
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors.set(row, col, v[row * n + src]);
            }
        }
        Ok(HermitianEigen { eigenvalues, vectors })
    }

    /// Principal square root of a positive semidefinite Hermitian matrix.
    /// Eigenvalues in `[PSD_EIG_FLOOR, 0)` are clamped to zero; anything
    /// below the floor is an error.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let eig = self.hermitian_eig()?;
        let n = self.dim;
        let mut roots = Vec::with_capacity(n);
        for &lam in &eig.eigenvalues {
            if lam < PSD_EIG_FLOOR {
                return Err(QcorrError::NotPsd(format!(
                    "eigenvalue {lam:.6e} below floor {PSD_EIG_FLOOR:.1e}"
                )));
            }
            roots.push(lam.max(0.0).sqrt());
        }
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &r) in roots.iter().enumerate() {
                    acc += eig.vectors.get(i, k) * r * eig.vectors.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(QcorrError::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )))
        }
    }
}

/// Eigenvalues in descending order; column `k` of `vectors` is the
/// eigenvector for `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Cyclic complex Jacobi diagonalization on a raw row-major buffer. Works for
/// any small `n`, which lets the 3x3 correlation-matrix solve reuse it without
/// widening the public matrix type. `a` is overwritten with the (near)
/// diagonal matrix and `v` accumulates the unitary: `A = V D V^dag`.
fn jacobi_hermitian(n: usize, a: &mut [Complex64], v: &mut [Complex64]) -> Result<()> {
    let off = |a: &[Complex64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(a) <= JACOBI_OFF_TOL {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let phase = apq / abs;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Annihilates entry (p, q) of U^dag A U for the plane
                // rotation U[p][p] = c, U[p][q] = -s*phase,
                // U[q][p] = s*conj(phase), U[q][q] = c.
                let theta = (app - aqq) / (2.0 * abs);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s;
                // A <- A U (columns p, q).
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * sp.conj();
                    a[k * n + q] = akq * c - akp * sp;
                }
                // A <- U^dag A (rows p, q).
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * sp;
                    a[q * n + k] = aqk * c - apk * sp.conj();
                }
                // V <- V U.
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * sp.conj();
                    v[k * n + q] = vkq * c - vkp * sp;
                }
                // Rounding may leave a stray imaginary part on the diagonal.
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
            }
        }
    }
    if off(a) <= JACOBI_OFF_TOL {
        Ok(())
    } else {
        Err(QcorrError::NumericalFailure(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps \
             (residual {:.3e})",
            off(a)
        )))
    }
}

/// Eigenvalues of a real symmetric 3x3 matrix, descending. The input is
/// symmetrized first.
pub fn sym3_eigenvalues(m: &[[f64; 3]; 3]) -> Result<[f64; 3]> {
    let mut a = [ZERO; 9];
    for i in 0..3 {
        for j in 0..3 {
            a[i * 3 + j] = Complex64::new(0.5 * (m[i][j] + m[j][i]), 0.0);
        }
    }
    let mut v = [ZERO; 9];
    for i in 0..3 {
        v[i * 3 + i] = ONE;
    }
    jacobi_hermitian(3, &mut a, &mut v)?;
    let mut eig = [a[0].re, a[4].re, a[8].re];
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eig)
}

/// Single-qubit Pauli matrix; `axis` is 1, 2 or 3 for x, y, z.
pub fn pauli(axis: usize) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i, i, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("pauli axis must be 1, 2 or 3"),
    };
    ComplexMatrix::from_slice(2, &entries).expect("static 2x2")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    #[test]
    fn rejects_unsupported_dimensions() {
        assert!(ComplexMatrix::zeros(3).is_err());
        assert!(ComplexMatrix::zeros(1).is_err());
        assert!(ComplexMatrix::identity(5).is_err());
        assert!(ComplexMatrix::from_slice(2, &[ONE; 3]).is_err());
    }

    #[test]
    fn rejects_nonfinite_entries() {
        let mut e = vec![ZERO; 4];
        e[0] = c(f64::NAN, 0.0);
        assert!(ComplexMatrix::from_slice(2, &e).is_err());
    }

    #[test]
    fn multiply_and_trace() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        // x * y = i z
        let xy = x.mul(&y).unwrap();
        let iz = z.scale(c(0.0, 1.0));
        assert!(xy.sub(&iz).unwrap().hs_norm() < 1e-15);
        assert!(x.mul(&x).unwrap().sub(&ComplexMatrix::identity(2).unwrap()).unwrap().hs_norm() < 1e-15);
        assert_eq!(x.trace(), ZERO);
        assert_eq!(ComplexMatrix::identity(4).unwrap().trace(), r(4.0));
    }

    #[test]
    fn kron_index_convention() {
        let a = ComplexMatrix::from_fn(2, |i, j| r((10 * i + j) as f64)).unwrap();
        let b = ComplexMatrix::from_fn(2, |i, j| r((100 * i + 7 * j) as f64 + 1.0)).unwrap();
        let k = ComplexMatrix::kron(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for kk in 0..2 {
                    for l in 0..2 {
                        assert_eq!(k.get(2 * i + kk, 2 * j + l), a.get(i, j) * b.get(kk, l));
                    }
                }
            }
        }
        // kron only accepts 2x2 factors.
        assert!(ComplexMatrix::kron(&k, &a).is_err());
    }

    #[test]
    fn adjoint_and_defect() {
        let m = ComplexMatrix::from_slice(2, &[r(1.0), c(2.0, 3.0), c(2.0, -3.0), r(4.0)]).unwrap();
        assert_eq!(m.hermiticity_defect(), 0.0);
        let n = ComplexMatrix::from_slice(2, &[r(1.0), c(2.0, 3.0), c(2.0, 3.0), r(4.0)]).unwrap();
        assert!(n.hermiticity_defect() > 1.0);
        assert!(n.adjoint().adjoint().sub(&n).unwrap().hs_norm() == 0.0);
    }

    #[test]
    fn eig_pauli_spectra() {
        for axis in 1..=3 {
            let eig = pauli(axis).hermitian_eig().unwrap();
            assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
            assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_reconstructs_matrix() {
        // A fixed dense Hermitian 4x4 with irrational entries.
        let mut h = ComplexMatrix::zeros(4).unwrap();
        let mut seed: f64 = 0.37;
        for i in 0..4 {
            for j in i..4 {
                seed = (seed * 97.31 + 0.113).fract();
                let re = seed - 0.5;
                seed = (seed * 57.17 + 0.719).fract();
                let im = if i == j { 0.0 } else { seed - 0.5 };
                h.set(i, j, c(re, im));
                h.set(j, i, c(re, -im));
            }
        }
        let eig = h.hermitian_eig().unwrap();
        // Rebuild V D V^dag and compare.
        let mut rec = ComplexMatrix::zeros(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += eig.vectors.get(i, k)
                        * eig.eigenvalues[k]
                        * eig.vectors.get(j, k).conj();
                }
                rec.set(i, j, acc);
            }
        }
        assert!(rec.sub(&h).unwrap().hs_norm() < 1e-12);
        // Columns are orthonormal.
        let v = &eig.vectors;
        let gram = v.adjoint().mul(v).unwrap();
        assert!(gram.sub(&ComplexMatrix::identity(4).unwrap()).unwrap().hs_norm() < 1e-12);
        // Descending order.
        for k in 0..3 {
            assert!(eig.eigenvalues[k] >= eig.eigenvalues[k + 1]);
        }
    }

    #[test]
    fn eig_rejects_nonhermitian() {
        let m = ComplexMatrix::from_slice(2, &[r(0.0), r(1.0), r(0.0), r(0.0)]).unwrap();
        assert!(matches!(m.hermitian_eig(), Err(QcorrError::InvalidArgument(_))));
    }

    #[test]
    fn eig_complex_offdiagonal() {
        // [[2, i], [-i, 2]] has spectrum {3, 1}.
        let m = ComplexMatrix::from_slice(2, &[r(2.0), c(0.0, 1.0), c(0.0, -1.0), r(2.0)]).unwrap();
        let e = m.hermitian_eig().unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        // M = B B^dag is PSD by construction.
        let b = ComplexMatrix::from_slice(
            2,
            &[c(0.3, 0.1), c(-0.4, 0.7), c(0.2, -0.5), c(0.9, 0.2)],
        )
        .unwrap();
        let m = b.mul(&b.adjoint()).unwrap();
        let s = m.psd_sqrt().unwrap();
        assert!(s.mul(&s).unwrap().sub(&m).unwrap().hs_norm() < 1e-12);
        assert!(s.hermiticity_defect() < 1e-13);
        // The root is itself PSD.
        let e = s.hermitian_eig().unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l >= -1e-13));
    }

    #[test]
    fn psd_sqrt_clamps_tiny_negative_and_rejects_real_negative() {
        let tiny = ComplexMatrix::from_slice(2, &[r(1.0), ZERO, ZERO, r(-5e-11)]).unwrap();
        let s = tiny.psd_sqrt().unwrap();
        assert!((s.get(0, 0).re - 1.0).abs() < 1e-14);
        assert_eq!(s.get(1, 1), ZERO);

        let bad = ComplexMatrix::from_slice(2, &[r(1.0), ZERO, ZERO, r(-1e-3)]).unwrap();
        assert!(matches!(bad.psd_sqrt(), Err(QcorrError::NotPsd(_))));
    }

    #[test]
    fn sym3_known_spectrum() {
        // diag(5, 2, -1) rotated is still {5, 2, -1}; start with plain diag.
        let m = [[5.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let e = sym3_eigenvalues(&m).unwrap();
        assert_eq!(e, [5.0, 2.0, -1.0]);
        // A coupled one: [[2,1,0],[1,2,0],[0,0,7]] -> {7, 3, 1}.
        let m2 = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 7.0]];
        let e2 = sym3_eigenvalues(&m2).unwrap();
        assert!((e2[0] - 7.0).abs() < 1e-13);
        assert!((e2[1] - 3.0).abs() < 1e-13);
        assert!((e2[2] - 1.0).abs() < 1e-13);
    }
}
