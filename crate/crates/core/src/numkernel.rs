//! Dense complex linear algebra used by every other module.
//!
//! Matrices are thin wrappers around [`faer::Mat`]. Exponentials of `i·c·H`
//! for Hermitian `H` go through the spectral decomposition `H = V Λ V†`, so a
//! factor exponential is exact up to eigensolver accuracy for any complex `c`.

use std::ops::{Add, Mul, Sub};

use faer::{ColRef, Mat, MatRef, Side};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ABS_TOL: f64 = 1e-12;
const HERMITIAN_REL_TOL: f64 = 1e-12;
/// Upper bound on the number of entries a Kronecker product may allocate.
pub const MAX_KRON_ENTRIES: u128 = 1 << 28;

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: Mat<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Mat::identity(dim, dim),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: Mat::from_fn(rows, cols, f),
        }
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::InvalidArgument(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_mat(inner: Mat<C64>) -> Self {
        Self { inner }
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.inner.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint().to_owned(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose().to_owned(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| c * self.get(i, j))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows().min(self.cols())).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.inner.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max(self.inner[(i, j)].norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.cols()).all(|j| (0..self.rows()).all(|i| self.inner[(i, j)].is_finite()))
    }

    /// `max_jk |M[j][k] − conj(M[k][j])|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.rows();
        let mut r = 0.0f64;
        for j in 0..n {
            for k in j..n {
                r = r.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        r
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "matrix-vector shape mismatch");
        let out = self.inner.as_ref() * ColRef::from_slice(v);
        out.iter().copied().collect()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// A matrix validated to be Hermitian within `1e-12·max|H|`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("Hermitian matrix entries".into()));
        }
        let tolerance = (HERMITIAN_REL_TOL * m.max_abs()).max(ABS_TOL);
        let residual = m.hermiticity_residual();
        if residual > tolerance {
            return Err(Error::NotHermitian {
                residual,
                tolerance,
            });
        }
        Ok(Self { inner: m })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("diagonal entries".into()));
        }
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Ok(Self {
            inner: ComplexMatrix::from_diagonal(&d),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(C64::new(s, 0.0)),
        }
    }

    pub fn try_add(&self, other: &HermitianMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch {
                left: self.inner.shape(),
                right: other.inner.shape(),
            });
        }
        Ok(Self {
            inner: &self.inner + &other.inner,
        })
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        let dim = self.dim();
        let evd = self
            .inner
            .as_mat()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::EigenSolver { dim })?;
        let values: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
        Ok(HermitianEigen {
            values,
            vectors: evd.U().to_owned(),
        })
    }
}

/// Spectral decomposition `H = V Λ V†` of a Hermitian matrix, reusable for
/// many exponentials `exp(i·c·H)`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: Mat<C64>,
}

impl HermitianEigen {
    /// Eigenvalues in nondecreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn phases(&self, c: C64) -> Vec<C64> {
        let ic = C64::new(0.0, 1.0) * c;
        self.values.iter().map(|&l| (ic * l).exp()).collect()
    }

    /// `V·diag(exp(i·c·λ))·V†`.
    pub fn exp_i(&self, c: C64) -> ComplexMatrix {
        let ph = self.phases(c);
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, j| self.vectors[(i, j)] * ph[j]);
        ComplexMatrix::from_mat(&scaled * self.vectors.adjoint())
    }

    /// In-place `v ← exp(i·c·H)·v`.
    pub fn apply_exp_i(&self, c: C64, v: &mut [C64]) {
        let ph = self.phases(c);
        let mut w = self.vectors.adjoint() * ColRef::from_slice(v);
        for (wi, p) in w.iter_mut().zip(&ph) {
            *wi *= p;
        }
        let out = &self.vectors * &w;
        for (vi, o) in v.iter_mut().zip(out.iter()) {
            *vi = *o;
        }
    }

    /// In-place `m ← exp(i·c·H)·m`.
    pub fn apply_exp_i_to_matrix(&self, c: C64, m: &mut Mat<C64>) {
        let ph = self.phases(c);
        let mut w = self.vectors.adjoint() * &*m;
        for j in 0..w.ncols() {
            for (i, p) in ph.iter().enumerate() {
                w[(i, j)] *= p;
            }
        }
        *m = &self.vectors * &w;
    }
}

/// `exp(i·c·H)` via the spectral decomposition of `H`.
pub fn expm_i(h: &HermitianMatrix, c: C64) -> Result<ComplexMatrix> {
    if !c.is_finite() {
        return Err(Error::NonFinite("exponent coefficient".into()));
    }
    Ok(h.eigen()?.exp_i(c))
}

/// All eigenvalues of a general complex matrix, unordered.
pub fn eigenvalues_general(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eigenvalue input".into()));
    }
    let dim = m.rows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    m.as_mat()
        .eigenvalues()
        .map_err(|_| Error::EigenSolver { dim })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() as u128 * b.rows() as u128;
    let cols = a.cols() as u128 * b.cols() as u128;
    let entries = rows * cols;
    if entries > MAX_KRON_ENTRIES {
        return Err(Error::DimensionTooLarge {
            requested: entries,
            limit: MAX_KRON_ENTRIES,
        });
    }
    let (br, bc) = b.shape();
    Ok(ComplexMatrix::from_fn(rows as usize, cols as usize, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    }))
}

pub fn frob_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok((a - b).frob_norm())
}

/// Complex state vector with a cached 2-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    norm: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state dimension must be >= 1".into()));
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        let norm = l2_norm(&amplitudes);
        Ok(Self { amplitudes, norm })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / self.norm;
        Self::new(self.amplitudes.iter().map(|z| z * inv).collect())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit-norm state with independent standard-normal real and imaginary parts,
/// drawn from a ChaCha20 stream seeded by `seed`.
pub fn random_state(dim: usize, seed: u64) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidArgument("state dimension must be >= 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    StateVector::new(amps)?.normalized()
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Hermitian matrix with unit-variance Gaussian entries, for tests.
    pub fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let g = |rng: &mut ChaCha20Rng| -> f64 { StandardNormal.sample(rng) };
        let raw: Vec<C64> = (0..dim * dim).map(|_| C64::new(g(&mut rng), g(&mut rng))).collect();
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
            0.5 * (raw[i * dim + j] + raw[j * dim + i].conj())
        });
        HermitianMatrix::new(m).unwrap()
    }

    pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let g = |rng: &mut ChaCha20Rng| -> f64 { StandardNormal.sample(rng) };
        let raw: Vec<C64> = (0..rows * cols).map(|_| C64::new(g(&mut rng), g(&mut rng))).collect();
        ComplexMatrix::from_row_major(rows, cols, &raw).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_z() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        for dim in [1, 3, 7] {
            let u = expm_i(&HermitianMatrix::zeros(dim), c(1.0, 0.0)).unwrap();
            assert!(frob_distance(&u, &ComplexMatrix::identity(dim)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn expm_sigma_z_at_pi() {
        let u = expm_i(&sigma_z(), c(std::f64::consts::PI, 0.0)).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0), c(-1.0, 0.0)]);
        assert!(frob_distance(&u, &expected).unwrap() < 1e-14);
    }

    #[test]
    fn expm_complex_coefficient_inverse() {
        let h = random_hermitian(8, 3);
        let k = c(0.3, 0.1);
        let prod = &expm_i(&h, k).unwrap() * &expm_i(&h, -k).unwrap();
        assert!(frob_distance(&prod, &ComplexMatrix::identity(8)).unwrap() < 1e-10);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let ev = eigenvalues_general(&ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, 3.0)])).unwrap();
        assert_eq!(ev.len(), 2);
        for target in [c(2.0, 0.0), c(0.0, 3.0)] {
            assert!(ev.iter().any(|z| (z - target).norm() < 1e-12));
        }
    }

    #[test]
    fn eigenvalues_of_unitary_are_unimodular() {
        let u = expm_i(&random_hermitian(4, 11), c(0.7, 0.0)).unwrap();
        for z in eigenvalues_general(&u).unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let m = random_matrix(6, 6, 5);
        let sum: C64 = eigenvalues_general(&m).unwrap().into_iter().sum();
        assert!((sum - m.trace()).norm() < 1e-9);
    }

    #[test]
    fn eigenvalues_reject_non_square() {
        assert!(matches!(
            eigenvalues_general(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn kron_basics() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let z = sigma_z().into_matrix();
        let zz = kron(&z, &z).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn kron_mixed_product() {
        let (a, b, cc, d) = (
            random_matrix(2, 2, 1),
            random_matrix(2, 2, 2),
            random_matrix(2, 2, 3),
            random_matrix(2, 2, 4),
        );
        let lhs = &kron(&a, &b).unwrap() * &kron(&cc, &d).unwrap();
        let rhs = kron(&(&a * &cc), &(&b * &d)).unwrap();
        assert!(frob_distance(&lhs, &rhs).unwrap() < 1e-12);
    }

    #[test]
    fn kron_rejects_oversized() {
        let big = ComplexMatrix::zeros(1 << 8, 1);
        let err = kron(&big, &ComplexMatrix::zeros(1 << 12, 1 << 10)).unwrap_err();
        assert!(matches!(err, Error::DimensionTooLarge { .. }));
    }

    #[test]
    fn random_state_normalized_and_deterministic() {
        let s = random_state(4, 7).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert_eq!(s, random_state(4, 7).unwrap());
        assert_ne!(s, random_state(4, 8).unwrap());
        assert!(random_state(0, 1).is_err());
    }

    #[test]
    fn random_state_mean_weight() {
        // Law of large numbers: each amplitude carries 1/dim of the weight on
        // average, so any fixed half of the indices holds about half of it.
        let dim = 1024;
        let pooled: f64 = (0..20)
            .map(|seed| {
                let s = random_state(dim, seed).unwrap();
                s.amplitudes()[..dim / 2].iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            / 20.0;
        assert!((pooled / (dim / 2) as f64 * dim as f64 - 1.0).abs() < 0.05);
    }

    #[test]
    fn frob_distance_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(frob_distance(&i2, &i2).unwrap(), 0.0);
        let d = frob_distance(&i2, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let (a, b) = (random_matrix(3, 4, 9), random_matrix(3, 4, 10));
        let direct: f64 = a
            .to_row_major()
            .iter()
            .zip(b.to_row_major())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!((frob_distance(&a, &b).unwrap() - direct).abs() < 1e-12);
        assert!(frob_distance(&a, &ComplexMatrix::zeros(4, 3)).is_err());
    }

    #[test]
    fn state_rejects_nan_and_zero_norm() {
        assert!(StateVector::new(vec![c(f64::NAN, 0.0)]).is_err());
        let z = StateVector::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert!(matches!(z.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn eigen_apply_matches_dense() {
        let h = random_hermitian(9, 21);
        let e = h.eigen().unwrap();
        let k = c(0.4, -0.2);
        let psi = random_state(9, 1).unwrap();
        let mut v = psi.amplitudes().to_vec();
        e.apply_exp_i(k, &mut v);
        let dense = e.exp_i(k).mul_vec(psi.amplitudes());
        let err: f64 = v.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn expm_group_property(dim in 1usize..=32, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, ai in -0.3f64..0.3) {
            let h = random_hermitian(dim, seed);
            let e = h.eigen().unwrap();
            let prod = &e.exp_i(c(a, ai)) * &e.exp_i(c(b, 0.0));
            let direct = e.exp_i(c(a + b, ai));
            prop_assert!(frob_distance(&prod, &direct).unwrap() < 1e-10 * dim as f64);
        }

        #[test]
        fn expm_real_is_unitary(dim in 1usize..=32, seed in any::<u64>(), t in -3.0f64..3.0) {
            let u = expm_i(&random_hermitian(dim, seed), c(t, 0.0)).unwrap();
            let g = &u.adjoint() * &u;
            prop_assert!(frob_distance(&g, &ComplexMatrix::identity(dim)).unwrap() <= 1e-10 * dim as f64);
        }

        #[test]
        fn expm_spectrum_matches_phases(dim in 1usize..=12, seed in any::<u64>(), t in -2.0f64..2.0) {
            let h = random_hermitian(dim, seed);
            let lambdas = h.eigen().unwrap().values().to_vec();
            let mut got = eigenvalues_general(&expm_i(&h, c(t, 0.0)).unwrap()).unwrap();
            for l in lambdas {
                let target = (c(0.0, t) * l).exp();
                let (idx, dist) = got
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (i, (z - target).norm()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .unwrap();
                prop_assert!(dist < 1e-9);
                got.swap_remove(idx);
            }
        }
    }
}
