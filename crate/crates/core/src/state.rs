//! Multimode Gaussian states of the transverse field.
//!
//! A state is stored as its mean amplitudes `<a_i>` and the symmetrized
//! covariance `V` of the interleaved quadratures `(X_1, Y_1, ..., X_n, Y_n)`
//! with `X = a + a^dag`, `Y = i (a^dag - a)`. Vacuum has `V = I`, and
//! `<dR_k dR_l> = V_kl + i Omega_kl`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, complete_orthonormal, dominant_left_singular_vectors, hermitian_min_eigenvalue,
    quadrature_rotation, singular_values, symplectic_form, unitarity_deviation, CMatrix, CVector,
    RMatrix,
};
use crate::modes::{ModeBasis, SampledMode, ORTHONORMALIZED_TOL};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PHYSICALITY_TOL: f64 = 1e-8;
pub const UNITARITY_TOL: f64 = 1e-8;
/// Relative singular-value cutoff used by [`GaussianState::degree`].
pub const RANK_TOL: f64 = 1e-8;

/// Single-mode squeezer: quadrature variances `e^{-2r}` along `angle` and
/// `e^{+2r}` along `angle + pi/2`. `angle = 0` squeezes `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezerSpec {
    #[serde(rename = "mode")]
    pub mode_index: usize,
    pub r: f64,
    #[serde(default)]
    pub angle: f64,
}

impl SqueezerSpec {
    pub fn new(mode_index: usize, r: f64, angle: f64) -> Self {
        Self {
            mode_index,
            r,
            angle,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || !self.angle.is_finite() {
            return Err(Error::InvalidParameter {
                name: "squeezer",
                reason: format!("non-finite r or angle on mode {}", self.mode_index),
            });
        }
        Ok(())
    }

    /// `R(angle) diag(a, b) R(angle)^T`.
    fn rotated_diag(&self, a: f64, b: f64) -> [[f64; 2]; 2] {
        let (s, co) = self.angle.sin_cos();
        let off = (a - b) * co * s;
        [[a * co * co + b * s * s, off], [off, a * s * s + b * co * co]]
    }

    /// Covariance block of the squeezed vacuum.
    pub fn covariance_block(&self) -> [[f64; 2]; 2] {
        self.rotated_diag((-2.0 * self.r).exp(), (2.0 * self.r).exp())
    }

    fn symplectic(&self) -> [[f64; 2]; 2] {
        self.rotated_diag((-self.r).exp(), self.r.exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: CVector,
    cov: RMatrix,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty bound `V + i Omega >= 0`.
    pub fn new(mean: CVector, cov: RMatrix) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: cov.nrows().max(cov.ncols()),
                context: "covariance size",
            });
        }
        if mean.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
            || cov.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: "non-finite mean or covariance entry".into(),
            });
        }
        let scale = cov.amax().max(1.0);
        let asymmetry = (&cov - cov.transpose()).amax();
        if asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let state = Self { mean, cov };
        let min_eigenvalue = state.uncertainty_min_eigenvalue();
        if min_eigenvalue < -PHYSICALITY_TOL * scale {
            return Err(Error::Unphysical { min_eigenvalue });
        }
        Ok(state)
    }

    pub fn vacuum(dim: usize) -> Self {
        Self {
            mean: CVector::zeros(dim),
            cov: RMatrix::identity(2 * dim, 2 * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &CVector {
        &self.mean
    }

    pub fn cov(&self) -> &RMatrix {
        &self.cov
    }

    /// Total mean photon number `sum |<a_i>|^2`.
    pub fn n0(&self) -> f64 {
        self.mean.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Smallest eigenvalue of `V + i Omega`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let omega = symplectic_form(n);
        let h = CMatrix::from_fn(2 * n, 2 * n, |i, j| c(self.cov[(i, j)], omega[(i, j)]));
        hermitian_min_eigenvalue(h)
    }

    /// Variance of `X_i`.
    pub fn x_variance(&self, i: usize) -> f64 {
        self.cov[(2 * i, 2 * i)]
    }

    /// `<dX_i dX_j>` (symmetrized).
    pub fn x_covariance(&self, i: usize, j: usize) -> f64 {
        self.cov[(2 * i, 2 * j)]
    }

    /// Same mean, covariance replaced by `cov`.
    pub fn with_cov(&self, cov: RMatrix) -> Result<Self> {
        Self::new(self.mean.clone(), cov)
    }

    pub fn with_mean(&self, mean: CVector) -> Result<Self> {
        Self::new(mean, self.cov.clone())
    }

    /// Appends `extra` vacuum modes.
    pub fn extend_with_vacuum(&self, extra: usize) -> Self {
        let n = self.dim();
        let m = n + extra;
        let mut mean = CVector::zeros(m);
        mean.rows_mut(0, n).copy_from(&self.mean);
        let mut cov = RMatrix::identity(2 * m, 2 * m);
        cov.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&self.cov);
        Self { mean, cov }
    }

    /// Squeezes the fluctuations of one mode (`V -> S V S^T`); the mean
    /// amplitude is left untouched, i.e. displacement acts after squeezing.
    pub fn apply_squeezer(&self, sq: &SqueezerSpec) -> Result<Self> {
        sq.validate()?;
        let n = self.dim();
        if sq.mode_index >= n {
            return Err(Error::IndexOutOfRange {
                index: sq.mode_index,
                dim: n,
            });
        }
        let block = sq.symplectic();
        let mut s = RMatrix::identity(2 * n, 2 * n);
        let k = 2 * sq.mode_index;
        for a in 0..2 {
            for b in 0..2 {
                s[(k + a, k + b)] = block[a][b];
            }
        }
        let cov = &s * &self.cov * s.transpose();
        Self::new(self.mean.clone(), symmetrize(cov))
    }

    /// Passive mode mixing `a -> U a`; the new mode functions are
    /// `w_i = sum_k conj(U_ik) u_k`.
    pub fn basis_change(&self, u: &CMatrix) -> Result<Self> {
        let n = self.dim();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.nrows().max(u.ncols()),
                context: "basis change matrix",
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let o = quadrature_rotation(u);
        let cov = symmetrize(&o * &self.cov * o.transpose());
        Self::new(u * &self.mean, cov)
    }

    /// `N_ij = <da_i^dag da_j>`.
    pub fn normal_correlations(&self) -> CMatrix {
        let n = self.dim();
        let v = &self.cov;
        CMatrix::from_fn(n, n, |i, j| {
            let xx = v[(2 * i, 2 * j)];
            let yy = v[(2 * i + 1, 2 * j + 1)];
            let xy = v[(2 * i, 2 * j + 1)];
            let yx = v[(2 * i + 1, 2 * j)];
            let delta = if i == j { 2.0 } else { 0.0 };
            c(0.25 * (xx + yy - delta), 0.25 * (xy - yx))
        })
    }

    /// `M_ij = <da_i da_j>`.
    pub fn anomalous_correlations(&self) -> CMatrix {
        let n = self.dim();
        let v = &self.cov;
        CMatrix::from_fn(n, n, |i, j| {
            let xx = v[(2 * i, 2 * j)];
            let yy = v[(2 * i + 1, 2 * j + 1)];
            let xy = v[(2 * i, 2 * j + 1)];
            let yx = v[(2 * i + 1, 2 * j)];
            c(0.25 * (xx - yy), 0.25 * (xy + yx))
        })
    }

    /// Columns spanning the non-vacuum subspace: the mean direction, then
    /// `A - I = N^T` with `A_ij = <da_i da_j^dag>`, then `B = M`.
    fn support_columns(&self) -> CMatrix {
        let n = self.dim();
        let mut s = CMatrix::zeros(n, 2 * n + 1);
        let norm = self.n0().sqrt();
        if norm > 0.0 {
            s.set_column(0, &(&self.mean / c(norm, 0.0)));
        }
        let nt = self.normal_correlations().transpose();
        let m = self.anomalous_correlations();
        s.view_mut((0, 1), (n, n)).copy_from(&nt);
        s.view_mut((0, n + 1), (n, n)).copy_from(&m);
        s
    }

    fn rank_threshold(singular: &[f64], tol: f64) -> f64 {
        tol * singular.first().copied().unwrap_or(0.0).max(1.0)
    }

    /// Minimum number of non-vacuum modes over all passive bases: the rank
    /// of the support columns.
    pub fn degree(&self, tol: f64) -> usize {
        let s = singular_values(&self.support_columns());
        let threshold = Self::rank_threshold(&s, tol);
        s.iter().filter(|&&x| x > threshold).count()
    }

    pub fn is_single_mode(&self, tol: f64) -> bool {
        self.degree(tol) <= 1
    }

    /// Indices of modes that carry a mean, a non-vacuum 2x2 block, or any
    /// correlation with another mode.
    pub fn non_vacuum_modes(&self, tol: f64) -> Vec<usize> {
        let n = self.dim();
        let scale = self.cov.amax().max(1.0);
        let mean_scale = self.n0().sqrt().max(1.0);
        (0..n)
            .filter(|&i| {
                if self.mean[i].norm() > tol * mean_scale {
                    return true;
                }
                (0..2 * n).any(|col| {
                    (0..2).any(|a| {
                        let row = 2 * i + a;
                        let target = if row == col { 1.0 } else { 0.0 };
                        (self.cov[(row, col)] - target).abs() > tol * scale
                    })
                })
            })
            .collect()
    }

    /// Unitary taking this state to an eigenbasis: row 0 is the mean
    /// direction, the following rows span the rest of the non-vacuum
    /// subspace, the remainder completes the space.
    pub fn eigenbasis_transform(&self, tol: f64) -> Result<CMatrix> {
        let n = self.dim();
        let n0 = self.n0();
        if n0 <= 0.0 {
            return Err(Error::ZeroMeanField);
        }
        let e0 = &self.mean / c(n0.sqrt(), 0.0);
        let support = self.support_columns();
        let threshold = Self::rank_threshold(&singular_values(&support), tol);
        let projector = CMatrix::identity(n, n) - &e0 * e0.adjoint();
        let rest = projector * support.columns(1, 2 * n).into_owned();
        let mut vectors = vec![e0];
        vectors.extend(dominant_left_singular_vectors(&rest, threshold));
        let vectors = complete_orthonormal(vectors, n);
        Ok(CMatrix::from_fn(n, n, |i, k| vectors[i][k].conj()))
    }
}

pub(crate) fn symmetrize(m: RMatrix) -> RMatrix {
    (&m + m.transpose()) * 0.5
}

/// Vacuum plus coherent amplitudes and per-mode squeezers.
pub fn make_state(
    dim: usize,
    coherent: &[(usize, Complex64)],
    squeezers: &[SqueezerSpec],
) -> Result<GaussianState> {
    let mut mean = CVector::zeros(dim);
    let mut seen = vec![false; dim];
    for &(index, amp) in coherent {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        if seen[index] {
            return Err(Error::InvalidParameter {
                name: "coherent",
                reason: format!("duplicate amplitude for mode {index}"),
            });
        }
        seen[index] = true;
        mean[index] = amp;
    }
    let mut cov = RMatrix::identity(2 * dim, 2 * dim);
    let mut squeezed = vec![false; dim];
    for sq in squeezers {
        sq.validate()?;
        if sq.mode_index >= dim {
            return Err(Error::IndexOutOfRange {
                index: sq.mode_index,
                dim,
            });
        }
        if squeezed[sq.mode_index] {
            return Err(Error::DuplicateSqueezer(sq.mode_index));
        }
        squeezed[sq.mode_index] = true;
        let block = sq.covariance_block();
        let k = 2 * sq.mode_index;
        for a in 0..2 {
            for b in 0..2 {
                cov[(k + a, k + b)] = block[a][b];
            }
        }
    }
    GaussianState::new(mean, cov)
}

/// Mean-field mode `v0 = sum_i <a_i> u_i / sqrt(N0)` and `N0`.
pub fn mean_field_mode(state: &GaussianState, basis: &ModeBasis) -> Result<(SampledMode, f64)> {
    check_dims(state, basis)?;
    let n0 = state.n0();
    if n0 <= 0.0 {
        return Err(Error::ZeroMeanField);
    }
    let coeffs: Vec<Complex64> = state.mean().iter().map(|z| z / n0.sqrt()).collect();
    let v0 = basis.synthesize(&coeffs)?.normalize()?;
    Ok((v0, n0))
}

/// Rewrites the state in an eigenbasis whose first mode is `v0`.
pub fn eigenbasis(state: &GaussianState, basis: &ModeBasis) -> Result<(ModeBasis, GaussianState)> {
    eigenbasis_with_tol(state, basis, RANK_TOL)
}

pub fn eigenbasis_with_tol(
    state: &GaussianState,
    basis: &ModeBasis,
    tol: f64,
) -> Result<(ModeBasis, GaussianState)> {
    check_dims(state, basis)?;
    let u = state.eigenbasis_transform(tol)?;
    let new_state = state.basis_change(&u)?;
    let new_basis = transform_basis(basis, &u)?;
    Ok((new_basis, new_state))
}

/// Mode functions `w_i = sum_k conj(U_ik) u_k` matching `state.basis_change(U)`.
pub fn transform_basis(basis: &ModeBasis, u: &CMatrix) -> Result<ModeBasis> {
    let n = basis.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.nrows(),
            context: "basis transform",
        });
    }
    let modes = (0..n)
        .map(|i| {
            let coeffs: Vec<Complex64> = (0..n).map(|k| u[(i, k)].conj()).collect();
            basis.synthesize(&coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    ModeBasis::new(modes, basis.ortho_tol().max(ORTHONORMALIZED_TOL))
}

pub(crate) fn check_dims(state: &GaussianState, basis: &ModeBasis) -> Result<()> {
    if state.dim() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: state.dim(),
            context: "state dimension vs basis size",
        });
    }
    Ok(())
}

/// Serialized form of a state:
/// `{dim, mean: [[re, im], ...], squeezers: [{mode, r, angle}, ...], cov?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub dim: usize,
    #[serde(default)]
    pub mean: Vec<[f64; 2]>,
    #[serde(default)]
    pub squeezers: Vec<SqueezerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov: Option<Vec<Vec<f64>>>,
}

impl StateDocument {
    pub fn from_state(state: &GaussianState) -> Self {
        let n = state.dim();
        Self {
            dim: n,
            mean: state.mean().iter().map(|z| [z.re, z.im]).collect(),
            squeezers: Vec::new(),
            cov: Some(
                (0..2 * n)
                    .map(|i| (0..2 * n).map(|j| state.cov()[(i, j)]).collect())
                    .collect(),
            ),
        }
    }

    /// Builds and validates the state. A `cov` override replaces the vacuum
    /// covariance and cannot be combined with squeezers.
    pub fn to_state(&self) -> Result<GaussianState> {
        if self.mean.len() > self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.mean.len(),
                context: "mean length",
            });
        }
        let coherent: Vec<(usize, Complex64)> = self
            .mean
            .iter()
            .enumerate()
            .map(|(i, z)| (i, c(z[0], z[1])))
            .collect();
        match &self.cov {
            None => make_state(self.dim, &coherent, &self.squeezers),
            Some(rows) => {
                if !self.squeezers.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "cov",
                        reason: "covariance override cannot be combined with squeezers".into(),
                    });
                }
                let m = 2 * self.dim;
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: rows.len(),
                        context: "covariance override rows",
                    });
                }
                let cov = RMatrix::from_fn(m, m, |i, j| rows[i][j]);
                let base = make_state(self.dim, &coherent, &[])?;
                base.with_cov(cov)
            }
        }
    }
}

/// Convenience for tests and callers that work with plain slices.
pub fn cvector(values: &[Complex64]) -> CVector {
    DVector::from_column_slice(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vacuum_by_default() {
        let s = make_state(3, &[], &[]).unwrap();
        assert_eq!(s.n0(), 0.0);
        assert_eq!(s.cov(), &RMatrix::identity(6, 6));
    }

    #[test]
    fn coherent_photon_number() {
        let s = make_state(1, &[(0, c(100.0, 0.0))], &[]).unwrap();
        assert_eq!(s.n0(), 10000.0);
    }

    #[test]
    fn squeezed_block_values() {
        let s = make_state(2, &[], &[SqueezerSpec::new(1, 1.0, 0.0)]).unwrap();
        assert!((s.cov()[(2, 2)] - 0.135_335_283_236_612_7).abs() < 1e-12);
        assert!((s.cov()[(3, 3)] - 7.389_056_098_930_65).abs() < 1e-12);
        assert!(s.cov()[(2, 3)].abs() < 1e-15);
    }

    #[test]
    fn rotated_squeezer_is_pure() {
        let s = make_state(1, &[], &[SqueezerSpec::new(0, 0.8, 0.6)]).unwrap();
        let det = s.cov()[(0, 0)] * s.cov()[(1, 1)] - s.cov()[(0, 1)] * s.cov()[(1, 0)];
        assert!((det - 1.0).abs() < 1e-10);
        assert!(s.uncertainty_min_eigenvalue().abs() < 1e-9);
    }

    #[test]
    fn duplicate_squeezer_rejected() {
        let sq = [SqueezerSpec::new(0, 0.1, 0.0), SqueezerSpec::new(0, 0.2, 0.0)];
        assert_eq!(make_state(2, &[], &sq), Err(Error::DuplicateSqueezer(0)));
    }

    #[test]
    fn unphysical_covariance_rejected() {
        let mut cov = RMatrix::identity(2, 2);
        cov[(0, 0)] = 0.5;
        assert!(matches!(
            GaussianState::new(CVector::zeros(1), cov),
            Err(Error::Unphysical { .. })
        ));
    }

    #[test]
    fn correlations_of_squeezed_vacuum() {
        // <a^dag a> = sinh^2 r, <a a> = -sinh r cosh r for X squeezing
        let r: f64 = 0.7;
        let s = make_state(1, &[], &[SqueezerSpec::new(0, r, 0.0)]).unwrap();
        let n = s.normal_correlations()[(0, 0)];
        let m = s.anomalous_correlations()[(0, 0)];
        assert!((n.re - r.sinh().powi(2)).abs() < 1e-12 && n.im.abs() < 1e-15);
        assert!((m.re + r.sinh() * r.cosh()).abs() < 1e-12);
    }

    #[test]
    fn fifty_fifty_mixing_of_squeezed_mode() {
        let r: f64 = 0.9;
        let s = make_state(2, &[], &[SqueezerSpec::new(0, r, 0.0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let t = s.basis_change(&u).unwrap();
        let expected = ((-2.0 * r).exp() + 1.0) / 2.0;
        assert!((t.x_variance(0) - expected).abs() < 1e-12);
        assert!((t.x_variance(1) - expected).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected_with_deviation() {
        let s = GaussianState::vacuum(2);
        let u = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        match s.basis_change(&u) {
            Err(Error::NotUnitary { deviation }) => assert!(deviation > 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vacuum_is_passive_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(4, &mut rng);
        let t = GaussianState::vacuum(4).basis_change(&u).unwrap();
        assert!((t.cov() - RMatrix::identity(8, 8)).amax() < 1e-12);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(GaussianState::vacuum(3).degree(RANK_TOL), 0);
        let coh = make_state(
            5,
            &[(0, c(1.0, 2.0)), (2, c(-3.0, 0.5)), (4, c(0.0, 1.0))],
            &[],
        )
        .unwrap();
        assert_eq!(coh.degree(RANK_TOL), 1);
        assert!(coh.is_single_mode(RANK_TOL));
        let multi = make_state(
            4,
            &[(0, c(10.0, 0.0))],
            &[SqueezerSpec::new(1, 0.5, 0.0), SqueezerSpec::new(2, 0.3, 1.0)],
        )
        .unwrap();
        assert_eq!(multi.degree(RANK_TOL), 3);
        assert!(!multi.is_single_mode(RANK_TOL));
    }

    #[test]
    fn squeezing_a_coherent_mode_keeps_degree_one() {
        let s = make_state(3, &[(1, c(4.0, 0.0))], &[SqueezerSpec::new(1, 0.5, 0.2)]).unwrap();
        assert_eq!(s.degree(RANK_TOL), 1);
    }

    #[test]
    fn eigenbasis_of_coherent_state() {
        let s = make_state(2, &[(0, c(3.0, 0.0)), (1, c(4.0, 0.0))], &[]).unwrap();
        let u = s.eigenbasis_transform(RANK_TOL).unwrap();
        let t = s.basis_change(&u).unwrap();
        assert!((t.mean()[0] - c(5.0, 0.0)).norm() < 1e-12);
        assert!(t.mean()[1].norm() < 1e-12);
        assert!((t.cov() - RMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn eigenbasis_keeps_squeezed_vacuum_mode() {
        let s = make_state(3, &[(0, c(2.0, 0.0))], &[SqueezerSpec::new(1, 0.5, 0.0)]).unwrap();
        let u = s.eigenbasis_transform(RANK_TOL).unwrap();
        let t = s.basis_change(&u).unwrap();
        assert_eq!(t.non_vacuum_modes(1e-8), vec![0, 1]);
        // mode 1 is non-vacuum yet carries no mean field
        assert!(t.mean()[1].norm() < 1e-12);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((u[(1, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_mean_has_no_eigenbasis() {
        assert_eq!(
            GaussianState::vacuum(2).eigenbasis_transform(RANK_TOL),
            Err(Error::ZeroMeanField)
        );
    }

    #[test]
    fn document_round_trip() {
        let s = make_state(2, &[(0, c(3.0, -1.0))], &[SqueezerSpec::new(1, 0.4, 0.3)]).unwrap();
        let doc = StateDocument::from_state(&s);
        let text = serde_json::to_string(&doc).unwrap();
        let back: StateDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_state().unwrap(), s);
    }

    #[test]
    fn document_rejects_unphysical_override_and_unknown_keys() {
        let bad = r#"{"dim": 1, "mean": [[1, 0]], "cov": [[0.5, 0], [0, 0.5]]}"#;
        let doc: StateDocument = serde_json::from_str(bad).unwrap();
        assert!(matches!(doc.to_state(), Err(Error::Unphysical { .. })));
        let unknown = r#"{"dim": 1, "means": []}"#;
        assert!(serde_json::from_str::<StateDocument>(unknown).is_err());
    }
}
