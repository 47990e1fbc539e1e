//! Covariance matrices and Gaussian state constructors.
//!
//! Conventions used throughout the crate:
//!
//! * Quadratures are ordered as `(x1, p1, x2, p2, ...)` and normalized so
//!   that the vacuum covariance matrix is the identity (`x = a + a^dag`,
//!   `[x, p] = 2i`).
//! * The symplectic form is the block-diagonal `Omega = diag(w, w, ...)`
//!   with `w = [[0, 1], [-1, 0]]`.
//! * A matrix is a physical covariance matrix iff `Gamma + i*Omega >= 0`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};

/// Tolerance used when checking symmetry of a candidate covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues of `Gamma + i*Omega` above this (slightly negative) floor are
/// accepted as physical; the slack absorbs rounding in eigensolves.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// The standard symplectic form on `n` modes in `xpxp` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    mat: DMatrix<f64>,
}

impl SymplecticForm {
    /// Builds `Omega` for `n` modes (a `2n x 2n` matrix).
    pub fn new(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        let mut mat = DMatrix::zeros(dim, dim);
        for m in 0..n_modes {
            mat[(2 * m, 2 * m + 1)] = 1.0;
            mat[(2 * m + 1, 2 * m)] = -1.0;
        }
        SymplecticForm { mat }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn n_modes(&self) -> usize {
        self.mat.nrows() / 2
    }
}

/// A real symmetric covariance matrix in `xpxp` ordering.
///
/// Construction enforces shape and symmetry but *not* physicality; callers
/// that need the uncertainty relation should run [`validate_physical`].
/// Keeping unphysical matrices representable matters for error modelling,
/// where a perturbed matrix may leave the physical set and we still want to
/// talk about it.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    mat: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps a matrix after checking that it is square with even dimension
    /// and symmetric to within [`SYMMETRY_TOL`]. The stored matrix is
    /// symmetrized (`(M + M^T)/2`) so downstream eigensolves see an exactly
    /// symmetric input.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::MalformedMatrix(format!(
                "covariance matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 || mat.nrows() % 2 != 0 {
            return Err(Error::MalformedMatrix(format!(
                "covariance matrix needs an even, nonzero dimension, got {}",
                mat.nrows()
            )));
        }
        let mut worst = 0.0f64;
        for i in 0..mat.nrows() {
            for j in (i + 1)..mat.ncols() {
                worst = worst.max((mat[(i, j)] - mat[(j, i)]).abs());
            }
        }
        if worst > SYMMETRY_TOL {
            return Err(Error::MalformedMatrix(format!(
                "covariance matrix must be symmetric; max |M - M^T| entry is {worst:.3e}"
            )));
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(CovarianceMatrix { mat: sym })
    }

    /// Same as [`CovarianceMatrix::new`] but with a caller-chosen symmetry
    /// tolerance, for inputs that went through lossy serialization.
    pub fn new_with_tol(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        let mut relaxed = mat;
        let n = relaxed.nrows();
        if n == relaxed.ncols() {
            let sym = (&relaxed + relaxed.transpose()) * 0.5;
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    worst = worst.max((relaxed[(i, j)] - relaxed[(j, i)]).abs());
                }
            }
            if worst <= tol {
                relaxed = sym;
            }
        }
        CovarianceMatrix::new(relaxed)
    }

    /// The vacuum state on `n` modes (identity matrix in our normalization).
    pub fn vacuum(n_modes: usize) -> Self {
        CovarianceMatrix {
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.mat.nrows() / 2
    }

    /// Splits a two-mode matrix into its `2x2` blocks.
    pub fn blocks(&self) -> Result<TwoModeBlocks> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "block decomposition needs a two-mode (4x4) matrix, got {}x{}",
                self.dim(),
                self.dim()
            )));
        }
        let g = &self.mat;
        let take = |r: usize, c: usize| {
            Matrix2::new(g[(r, c)], g[(r, c + 1)], g[(r + 1, c)], g[(r + 1, c + 1)])
        };
        Ok(TwoModeBlocks {
            alpha: take(0, 0),
            beta: take(2, 2),
            gamma: take(0, 2),
        })
    }
}

/// The `2x2` blocks of a two-mode covariance matrix
/// `[[alpha, gamma], [gamma^T, beta]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBlocks {
    pub alpha: Matrix2<f64>,
    pub beta: Matrix2<f64>,
    pub gamma: Matrix2<f64>,
}

impl TwoModeBlocks {
    /// Reassembles the full `4x4` covariance matrix.
    pub fn assemble(&self) -> CovarianceMatrix {
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.alpha[(i, j)];
                m[(i + 2, j + 2)] = self.beta[(i, j)];
                m[(i, j + 2)] = self.gamma[(i, j)];
                m[(j + 2, i)] = self.gamma[(i, j)];
            }
        }
        // alpha/beta of a valid state are symmetric; symmetrize defensively
        // so rounding in callers cannot trip the constructor.
        let sym = (&m + m.transpose()) * 0.5;
        CovarianceMatrix::new(sym).expect("assembled block matrix is symmetric by construction")
    }
}

/// Symplectic eigenvalues of a state, sorted ascending. Physical states have
/// every entry `>= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSpectrum {
    pub nus: Vec<f64>,
}

impl ThermalSpectrum {
    pub fn min(&self) -> f64 {
        self.nus.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Outcome of the physicality check `Gamma + i*Omega >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physicality {
    Physical,
    /// The matrix violates the uncertainty relation; `min_eigenvalue` is the
    /// most negative eigenvalue of `Gamma + i*Omega`.
    Unphysical { min_eigenvalue: f64 },
}

impl Physicality {
    pub fn is_physical(&self) -> bool {
        matches!(self, Physicality::Physical)
    }
}

/// Checks the bona fide condition `Gamma + i*Omega >= 0`.
///
/// Rather than calling a complex eigensolver, we use the real symmetric
/// embedding `[[Gamma, -Omega], [Omega, Gamma]]`, whose spectrum is that of
/// the Hermitian matrix `Gamma + i*Omega` with every eigenvalue doubled.
/// Eigenvalues down to `-PHYSICALITY_TOL` are accepted.
pub fn validate_physical(cm: &CovarianceMatrix) -> Physicality {
    let dim = cm.dim();
    let omega = SymplecticForm::new(cm.n_modes());
    let mut emb = DMatrix::zeros(2 * dim, 2 * dim);
    emb.view_mut((0, 0), (dim, dim)).copy_from(cm.matrix());
    emb.view_mut((dim, dim), (dim, dim)).copy_from(cm.matrix());
    emb.view_mut((0, dim), (dim, dim))
        .copy_from(&(-omega.matrix()));
    emb.view_mut((dim, 0), (dim, dim)).copy_from(omega.matrix());
    let eigs = emb.symmetric_eigenvalues();
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= -PHYSICALITY_TOL {
        Physicality::Physical
    } else {
        Physicality::Unphysical {
            min_eigenvalue: min,
        }
    }
}

/// Purity `mu = 1 / sqrt(det Gamma)` of a Gaussian state.
pub fn purity(cm: &CovarianceMatrix) -> Result<f64> {
    let det = cm.matrix().determinant();
    if det <= 0.0 {
        return Err(Error::UnphysicalInput(format!(
            "purity needs det(Gamma) > 0, got {det:.3e}"
        )));
    }
    Ok(1.0 / det.sqrt())
}

/// Product of thermal modes: `Gamma = diag(nu_1, nu_1, nu_2, nu_2, ...)`.
pub fn thermal_state(nus: &[f64]) -> Result<CovarianceMatrix> {
    if nus.is_empty() {
        return Err(Error::DomainError(
            "thermal state needs at least one mode".into(),
        ));
    }
    for &nu in nus {
        // Same slack as the physicality test, so symplectic eigenvalues that
        // land a rounding error below 1 (pure states) are still accepted.
        if nu < 1.0 - PHYSICALITY_TOL {
            return Err(Error::UnphysicalInput(format!(
                "thermal occupation parameter must satisfy nu >= 1, got {nu}"
            )));
        }
    }
    let dim = 2 * nus.len();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, &nu) in nus.iter().enumerate() {
        let nu = nu.max(1.0);
        m[(2 * i, 2 * i)] = nu;
        m[(2 * i + 1, 2 * i + 1)] = nu;
    }
    Ok(CovarianceMatrix { mat: m })
}

/// Photon-number distribution of a single thermal mode with symplectic
/// eigenvalue `nu`: `p_k = [2/(nu+1)] * [(nu-1)/(nu+1)]^k`, for
/// `k = 0..=k_max`.
pub fn thermal_fock_distribution(nu: f64, k_max: usize) -> Result<Vec<f64>> {
    if nu < 1.0 {
        return Err(Error::UnphysicalInput(format!(
            "thermal occupation parameter must satisfy nu >= 1, got {nu}"
        )));
    }
    let base = 2.0 / (nu + 1.0);
    let ratio = (nu - 1.0) / (nu + 1.0);
    let mut p = Vec::with_capacity(k_max + 1);
    let mut term = base;
    for _ in 0..=k_max {
        p.push(term);
        term *= ratio;
    }
    Ok(p)
}

/// Two-mode squeezed thermal state with thermal inputs `nu_minus <= nu_plus`
/// and squeezing parameter `r`:
///
/// ```text
/// alpha = a*I,  beta = b*I,  gamma = diag(c, -c)
/// a = nu_minus*cosh(r)^2 + nu_plus*sinh(r)^2
/// b = nu_minus*sinh(r)^2 + nu_plus*cosh(r)^2
/// c = (nu_minus + nu_plus)/2 * sinh(2r)
/// ```
pub fn squeezed_thermal_state(nu_minus: f64, nu_plus: f64, r: f64) -> Result<CovarianceMatrix> {
    if nu_minus < 1.0 || nu_plus < 1.0 {
        return Err(Error::UnphysicalInput(format!(
            "squeezed thermal state needs thermal inputs >= 1, got ({nu_minus}, {nu_plus})"
        )));
    }
    if nu_minus > nu_plus {
        return Err(Error::DomainError(format!(
            "expected nu_minus <= nu_plus, got ({nu_minus}, {nu_plus})"
        )));
    }
    let (ch, sh) = (r.cosh(), r.sinh());
    let a = nu_minus * ch * ch + nu_plus * sh * sh;
    let b = nu_minus * sh * sh + nu_plus * ch * ch;
    let c = 0.5 * (nu_minus + nu_plus) * (2.0 * r).sinh();
    let blocks = TwoModeBlocks {
        alpha: Matrix2::new(a, 0.0, 0.0, a),
        beta: Matrix2::new(b, 0.0, 0.0, b),
        gamma: Matrix2::new(c, 0.0, 0.0, -c),
    };
    Ok(blocks.assemble())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-12;

    #[test]
    fn vacuum_is_physical_and_pure() {
        let vac = CovarianceMatrix::vacuum(2);
        assert!(validate_physical(&vac).is_physical());
        assert_relative_eq!(purity(&vac).unwrap(), 1.0, epsilon = TOL);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 0.5;
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::MalformedMatrix(_))
        ));
    }

    #[test]
    fn rejects_odd_dimension() {
        let m = DMatrix::identity(3, 3);
        assert!(CovarianceMatrix::new(m).is_err());
    }

    #[test]
    fn squeezed_vacuum_on_one_quadrature_is_unphysical_below_heisenberg() {
        // diag(0.5, 0.5) violates x*p >= 1 jointly with the conjugate mode.
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.5]));
        let cm = CovarianceMatrix::new(m).unwrap();
        match validate_physical(&cm) {
            Physicality::Unphysical { min_eigenvalue } => {
                assert_relative_eq!(min_eigenvalue, -0.5, epsilon = TOL);
            }
            Physicality::Physical => panic!("expected unphysical verdict"),
        }
    }

    #[test]
    fn squeezed_quadrature_pair_is_physical() {
        // diag(1/s, s) saturates the uncertainty relation for any s > 0.
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.25, 4.0]));
        let cm = CovarianceMatrix::new(m).unwrap();
        assert!(validate_physical(&cm).is_physical());
    }

    #[test]
    fn thermal_state_matches_definition() {
        let cm = thermal_state(&[1.0, 3.0]).unwrap();
        assert_eq!(cm.dim(), 4);
        assert_relative_eq!(cm.matrix()[(2, 2)], 3.0, epsilon = TOL);
        assert!(validate_physical(&cm).is_physical());
        // purity of nu=3 single mode thermal is 1/3; two modes: 1/(1*3) = 1/3.
        assert_relative_eq!(purity(&cm).unwrap(), 1.0 / 3.0, epsilon = TOL);
    }

    #[test]
    fn thermal_state_rejects_sub_vacuum_occupation() {
        assert!(matches!(
            thermal_state(&[0.9]),
            Err(Error::UnphysicalInput(_))
        ));
    }

    #[test]
    fn fock_distribution_normalizes_and_matches_geometric_form() {
        // nu = 3 gives mean photon number (nu-1)/2 = 1, p_k = (1/2)^(k+1).
        let p = thermal_fock_distribution(3.0, 50).unwrap();
        assert_relative_eq!(p[0], 0.5, epsilon = TOL);
        assert_relative_eq!(p[1], 0.25, epsilon = TOL);
        assert_relative_eq!(p[2], 0.125, epsilon = TOL);
        let total: f64 = p.iter().sum();
        assert!((1.0 - total).abs() < 1e-12);
        // vacuum input: all weight on k = 0.
        let pv = thermal_fock_distribution(1.0, 5).unwrap();
        assert_relative_eq!(pv[0], 1.0, epsilon = TOL);
        assert_relative_eq!(pv[1], 0.0, epsilon = TOL);
    }

    #[test]
    fn squeezed_thermal_reproduces_two_mode_squeezed_vacuum() {
        // nu = nu' = 1, r = 0.5: diagonal entries cosh(1), off-diagonal sinh(1).
        let cm = squeezed_thermal_state(1.0, 1.0, 0.5).unwrap();
        let g = cm.matrix();
        assert_relative_eq!(g[(0, 0)], 1.0f64.cosh(), epsilon = TOL);
        assert_relative_eq!(g[(1, 1)], 1.0f64.cosh(), epsilon = TOL);
        assert_relative_eq!(g[(0, 2)], 1.0f64.sinh(), epsilon = TOL);
        assert_relative_eq!(g[(1, 3)], -(1.0f64.sinh()), epsilon = TOL);
        assert!(validate_physical(&cm).is_physical());
        // pure state: det = 1.
        assert_relative_eq!(purity(&cm).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn squeezed_thermal_purity_matches_input_product() {
        // det Gamma = (nu_minus * nu_plus)^2 independent of r.
        let cm = squeezed_thermal_state(1.2, 2.5, 0.8).unwrap();
        assert_relative_eq!(purity(&cm).unwrap(), 1.0 / (1.2 * 2.5), epsilon = 1e-10);
    }

    #[test]
    fn blocks_round_trip() {
        let cm = squeezed_thermal_state(1.1, 1.9, 0.3).unwrap();
        let blocks = cm.blocks().unwrap();
        let back = blocks.assemble();
        assert_relative_eq!(
            (back.matrix() - cm.matrix()).norm(),
            0.0,
            epsilon = TOL
        );
    }
}
