//! Symplectic transformations and the decompositions built on them.
//!
//! Transformations act on covariance matrices by congruence,
//! `Gamma -> S^T Gamma S`, i.e. `S` transforms the quadrature *variables*
//! as `X -> S^T X`. Composition follows the same reading: "first `A`, then
//! `B`" is the matrix product `A * B`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::state::{validate_physical, CovarianceMatrix, SymplecticForm, ThermalSpectrum};

/// Entrywise tolerance on the defect `S^T Omega S - Omega` accepted by
/// [`SymplecticTransform::new`].
pub const SYMPLECTIC_DEFECT_TOL: f64 = 1e-10;

/// Tolerance on `|det S - 1|` accepted by [`SymplecticTransform::new`].
pub const UNIMODULAR_TOL: f64 = 1e-8;

/// A linear symplectic transformation on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    mat: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Wraps an untrusted matrix, verifying `S^T Omega S = Omega` (entrywise
    /// to [`SYMPLECTIC_DEFECT_TOL`]) and `det S = 1` (to [`UNIMODULAR_TOL`]).
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 || mat.nrows() % 2 != 0 {
            return Err(Error::MalformedMatrix(format!(
                "symplectic transform must be square with even dimension, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let omega = SymplecticForm::new(mat.nrows() / 2);
        let defect = mat.transpose() * omega.matrix() * &mat - omega.matrix();
        let worst = defect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > SYMPLECTIC_DEFECT_TOL {
            return Err(Error::MalformedMatrix(format!(
                "matrix is not symplectic; max |S^T Omega S - Omega| entry is {worst:.3e}"
            )));
        }
        let det = mat.determinant();
        if (det - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::MalformedMatrix(format!(
                "symplectic transform must have det = 1, got {det}"
            )));
        }
        Ok(SymplecticTransform { mat })
    }

    /// Internal constructor for matrices that are symplectic by construction.
    /// Skips the defect check so that, e.g., strongly squeezed transforms are
    /// not rejected over harmless floating-point noise.
    pub(crate) fn from_trusted(mat: DMatrix<f64>) -> Self {
        SymplecticTransform { mat }
    }

    pub fn identity(n_modes: usize) -> Self {
        SymplecticTransform {
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn n_modes(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Composition "apply `self` first, then `next`".
    pub fn then(&self, next: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose transforms on {} and {} modes",
                self.n_modes(),
                next.n_modes()
            )));
        }
        Ok(SymplecticTransform {
            mat: &self.mat * &next.mat,
        })
    }

    /// The symplectic inverse `S^{-1} = -Omega S^T Omega`, cheaper and more
    /// accurate than a general matrix inversion.
    pub fn inverse(&self) -> SymplecticTransform {
        let omega = SymplecticForm::new(self.n_modes());
        let inv = -(omega.matrix() * self.mat.transpose() * omega.matrix());
        SymplecticTransform { mat: inv }
    }
}

/// Two-mode squeezing transform with strength `r` and phase `phi`.
///
/// With `c = cosh r`, `s = sinh r`, `h = cos 2phi`, `k = sin 2phi`:
///
/// ```text
/// | c-hs   0    ks    0  |
/// |  0    c+hs   0   -ks |
/// |  ks    0    c+hs  0  |
/// |  0    -ks    0   c-hs|
/// ```
///
/// At `phi = pi/4` this is the usual two-mode squeezer whose congruence on
/// the vacuum produces the two-mode squeezed vacuum with `cosh 2r` variances.
pub fn two_mode_squeezer(r: f64, phi: f64) -> SymplecticTransform {
    let c = r.cosh();
    let s = r.sinh();
    let h = (2.0 * phi).cos();
    let k = (2.0 * phi).sin();
    let mat = DMatrix::from_row_slice(
        4,
        4,
        &[
            c - h * s,
            0.0,
            k * s,
            0.0,
            0.0,
            c + h * s,
            0.0,
            -k * s,
            k * s,
            0.0,
            c + h * s,
            0.0,
            0.0,
            -k * s,
            0.0,
            c - h * s,
        ],
    );
    SymplecticTransform::from_trusted(mat)
}

/// Single-mode squeezer `diag(e^r, e^-r)`.
pub fn single_mode_squeezer(r: f64) -> SymplecticTransform {
    let mat = DMatrix::from_row_slice(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]);
    SymplecticTransform::from_trusted(mat)
}

/// Beam splitter mixing two modes by angle `theta` (`theta = pi/4` is
/// balanced):
///
/// ```text
/// |  cos(theta) I2   -sin(theta) I2 |
/// |  sin(theta) I2    cos(theta) I2 |
/// ```
pub fn beam_splitter(theta: f64) -> SymplecticTransform {
    let c = theta.cos();
    let s = theta.sin();
    let mut mat = DMatrix::zeros(4, 4);
    for i in 0..2 {
        mat[(i, i)] = c;
        mat[(i + 2, i + 2)] = c;
        mat[(i, i + 2)] = -s;
        mat[(i + 2, i)] = s;
    }
    SymplecticTransform::from_trusted(mat)
}

/// Single-mode phase rotation by `theta`. At `theta = pi/2` the quadratures
/// map as `(x, p) -> (-p, x)`.
pub fn phase_shift(theta: f64) -> SymplecticTransform {
    let c = theta.cos();
    let s = theta.sin();
    let mat = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    SymplecticTransform::from_trusted(mat)
}

/// Acts on a state by congruence: `Gamma -> S^T Gamma S`.
pub fn apply(s: &SymplecticTransform, cm: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if s.dim() != cm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "transform on {} modes cannot act on a {}-mode state",
            s.n_modes(),
            cm.n_modes()
        )));
    }
    let out = s.matrix().transpose() * cm.matrix() * s.matrix();
    // The congruence of a symmetric matrix is symmetric; symmetrize away
    // rounding noise before re-wrapping.
    let sym = (&out + out.transpose()) * 0.5;
    CovarianceMatrix::new(sym)
}

/// Places a transform on selected modes of a larger register, acting as the
/// identity elsewhere.
pub fn embed(
    s: &SymplecticTransform,
    modes: &[usize],
    n_total: usize,
) -> Result<SymplecticTransform> {
    if modes.len() != s.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "transform acts on {} modes but {} target indices were given",
            s.n_modes(),
            modes.len()
        )));
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_total {
            return Err(Error::DomainError(format!(
                "mode index {m} out of range for {n_total} modes"
            )));
        }
        if modes[..i].contains(&m) {
            return Err(Error::DomainError(format!("repeated mode index {m}")));
        }
    }
    let mut mat = DMatrix::identity(2 * n_total, 2 * n_total);
    for (p, &mp) in modes.iter().enumerate() {
        for (q, &mq) in modes.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    mat[(2 * mp + a, 2 * mq + b)] = s.matrix()[(2 * p + a, 2 * q + b)];
                }
            }
        }
    }
    Ok(SymplecticTransform::from_trusted(mat))
}

/// Tolerance for matching the `+i nu` / `-i nu` eigenvalue pairs of
/// `Omega Gamma`.
const PAIRING_TOL: f64 = 1e-7;

/// Symplectic eigenvalues of a state, ascending.
///
/// Computed from the eigenvalues of `Omega Gamma`, which come in `+-i nu`
/// pairs for positive-definite input. The imaginary parts are sorted by
/// magnitude and consumed pairwise; a pair whose members disagree beyond
/// `1e-7` signals a numerically ill-conditioned input.
pub fn symplectic_spectrum(cm: &CovarianceMatrix) -> Result<ThermalSpectrum> {
    let omega = SymplecticForm::new(cm.n_modes());
    let prod = omega.matrix() * cm.matrix();
    let eig = prod.complex_eigenvalues();
    let mut ims: Vec<f64> = eig.iter().map(|z| z.im.abs()).collect();
    ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut nus = Vec::with_capacity(cm.n_modes());
    for pair in ims.chunks(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo > PAIRING_TOL * hi.max(1.0) {
            return Err(Error::NumericalDegeneracy(format!(
                "eigenvalues of Omega*Gamma do not pair into +-i nu: |{lo:.12}| vs |{hi:.12}|"
            )));
        }
        nus.push(0.5 * (lo + hi));
    }
    Ok(ThermalSpectrum { nus })
}

/// Two-mode symplectic eigenvalues from the local invariants alone:
/// `2 nu^2 = Delta -+ sqrt(Delta^2 - 4 det Gamma)` with
/// `Delta = det alpha + det beta + 2 det gamma`.
///
/// Exposed separately from [`symplectic_spectrum`] so the two routes can be
/// cross-checked against each other.
pub fn symplectic_spectrum_closed_form(cm: &CovarianceMatrix) -> Result<ThermalSpectrum> {
    let blocks = cm.blocks()?;
    let delta =
        blocks.alpha.determinant() + blocks.beta.determinant() + 2.0 * blocks.gamma.determinant();
    let det = cm.matrix().determinant();
    let mut disc = delta * delta - 4.0 * det;
    if disc < 0.0 {
        if disc < -1e-9 {
            return Err(Error::InconsistentInvariants(format!(
                "Delta^2 - 4 det Gamma = {disc:.3e} < 0; invariants do not describe a state"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let lo = (0.5 * (delta - root)).max(0.0).sqrt();
    let hi = (0.5 * (delta + root)).max(0.0).sqrt();
    Ok(ThermalSpectrum { nus: vec![lo, hi] })
}

/// Williamson normal form: finds symplectic `S` and a thermal spectrum `nu`
/// (ascending) with `S^T diag(nu_1, nu_1, ..., nu_n, nu_n) S = Gamma`.
///
/// The construction goes through `L = Gamma^{1/2}`: the antisymmetric matrix
/// `M = L Omega L` has eigenvalue pairs `+-i nu`, and an orthogonal basis
/// bringing `M` to its canonical form `(+) nu_i w` yields
/// `S = D^{-1/2} Q^T L`. This route stays stable for states close to the
/// physicality boundary.
pub fn williamson(cm: &CovarianceMatrix) -> Result<(SymplecticTransform, ThermalSpectrum)> {
    let dim = cm.dim();
    let n = cm.n_modes();

    // L = Gamma^{1/2} via the symmetric eigendecomposition.
    let eig = nalgebra::SymmetricEigen::new(cm.matrix().clone());
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig <= 0.0 {
        return Err(Error::UnphysicalInput(format!(
            "Williamson reduction needs Gamma > 0; smallest eigenvalue is {min_eig:.3e}"
        )));
    }
    let sqrt_vals = nalgebra::DVector::from_iterator(dim, eig.eigenvalues.iter().map(|v| v.sqrt()));
    let l = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();

    let omega = SymplecticForm::new(n);
    let m = &l * omega.matrix() * &l;

    // -M^2 = M M^T is symmetric positive definite with doubly degenerate
    // eigenvalues nu^2; each 2-dim eigenspace holds one canonical pair.
    let h = &m * m.transpose();
    let heig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| heig.eigenvalues[i].partial_cmp(&heig.eigenvalues[j]).unwrap());

    let mut q = DMatrix::zeros(dim, dim);
    let mut nus = Vec::with_capacity(n);
    let mut accepted = 0usize;
    for &idx in &order {
        if accepted == n {
            break;
        }
        // Project the candidate off everything already accepted; within an
        // eigenspace this discards the partner of a vector we already used.
        let mut u = heig.eigenvectors.column(idx).clone_owned();
        for k in 0..2 * accepted {
            let col = q.column(k);
            let overlap = col.dot(&u);
            u -= col * overlap;
        }
        let norm = u.norm();
        if norm < 0.5 {
            continue;
        }
        u /= norm;
        let nu_sq = heig.eigenvalues[idx];
        if nu_sq <= 0.0 {
            return Err(Error::NumericalDegeneracy(format!(
                "squared symplectic eigenvalue came out non-positive ({nu_sq:.3e})"
            )));
        }
        let nu = nu_sq.sqrt();
        let v = (&m * &u) / nu;
        q.column_mut(2 * accepted).copy_from(&v);
        q.column_mut(2 * accepted + 1).copy_from(&u);
        nus.push(nu);
        accepted += 1;
    }
    if accepted != n {
        return Err(Error::NumericalDegeneracy(
            "failed to assemble a full canonical basis for the Williamson form".into(),
        ));
    }

    // S = D^{-1/2} Q^T L with D = diag(nu_1, nu_1, ...).
    let mut d_inv_sqrt = DMatrix::zeros(dim, dim);
    for (i, &nu) in nus.iter().enumerate() {
        d_inv_sqrt[(2 * i, 2 * i)] = 1.0 / nu.sqrt();
        d_inv_sqrt[(2 * i + 1, 2 * i + 1)] = 1.0 / nu.sqrt();
    }
    let s = d_inv_sqrt * q.transpose() * &l;
    Ok((
        SymplecticTransform::from_trusted(s),
        ThermalSpectrum { nus },
    ))
}

/// Partial transposition of a two-mode state with respect to one mode,
/// realized as a sign flip of that mode's `p` quadrature:
/// `Gamma -> T Gamma T`.
pub fn partial_transpose(cm: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    if cm.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "partial transposition is implemented for two modes, got {}",
            cm.n_modes()
        )));
    }
    if mode > 1 {
        return Err(Error::DomainError(format!(
            "mode index {mode} out of range for a two-mode state"
        )));
    }
    let flip = 2 * mode + 1;
    let mut mat = cm.matrix().clone();
    for i in 0..4 {
        mat[(flip, i)] = -mat[(flip, i)];
        mat[(i, flip)] = -mat[(i, flip)];
    }
    CovarianceMatrix::new(mat)
}

/// A two-mode state reduced by local symplectics to
/// `alpha = a I`, `beta = b I`, `gamma = diag(c_plus, c_minus)`.
///
/// `local_transform` is the explicit `S_1 (+) S_2` achieving the reduction
/// via [`apply`]. Sign convention: `c_plus >= |c_minus|`, `c_plus >= 0`, and
/// `sign(c_plus * c_minus) = sign(det gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub local_transform: SymplecticTransform,
}

impl StandardForm {
    /// The reduced covariance matrix assembled from the four scalars.
    pub fn matrix(&self) -> CovarianceMatrix {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = self.a;
        m[(1, 1)] = self.a;
        m[(2, 2)] = self.b;
        m[(3, 3)] = self.b;
        m[(0, 2)] = self.c_plus;
        m[(2, 0)] = self.c_plus;
        m[(1, 3)] = self.c_minus;
        m[(3, 1)] = self.c_minus;
        CovarianceMatrix::new(m).expect("standard-form matrix is symmetric by construction")
    }
}

/// Symmetric square root of a 2x2 symmetric positive-definite matrix, by the
/// closed form `sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))`.
fn sqrt_spd2(a: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let det = a.determinant();
    if det <= 0.0 || a[(0, 0)] <= 0.0 {
        return Err(Error::UnphysicalInput(format!(
            "block is not positive definite (det = {det:.3e})"
        )));
    }
    let s = det.sqrt();
    let t = (a.trace() + 2.0 * s).sqrt();
    Ok((a + Matrix2::identity() * s) / t)
}

/// Signed 2x2 SVD with both factors in SO(2): returns `(r1, r2, d1, d2)`
/// such that `r1^T g r2 = diag(d1, d2)` with `d1 >= |d2|` and
/// `sign(d1 * d2) = sign(det g)`.
fn rotations_diagonalizing(g: &Matrix2<f64>) -> (Matrix2<f64>, Matrix2<f64>, f64, f64) {
    let svd = g.svd(true, true);
    let mut u = svd.u.unwrap();
    let mut v = svd.v_t.unwrap().transpose();
    let mut s1 = svd.singular_values[0];
    let mut s2 = svd.singular_values[1];
    if s1 < s2 {
        std::mem::swap(&mut s1, &mut s2);
        u *= Matrix2::new(0.0, 1.0, 1.0, 0.0);
        v *= Matrix2::new(0.0, 1.0, 1.0, 0.0);
    }
    // Push any reflections into the sign of the second diagonal entry so
    // both rotation factors are proper.
    if u.determinant() < 0.0 {
        u.set_column(1, &(-u.column(1)));
        s2 = -s2;
    }
    if v.determinant() < 0.0 {
        v.set_column(1, &(-v.column(1)));
        s2 = -s2;
    }
    (u, v, s1, s2)
}

/// Reduces a physical two-mode state to its standard form.
///
/// The scalars are read off from the explicitly constructed local transform
/// (per-mode whitening of `alpha` and `beta`, then counter-rotations
/// diagonalizing the cross block) and cross-checked against the values
/// implied by the four local symplectic invariants; a disagreement beyond
/// rounding is reported as inconsistent invariants.
pub fn standard_form(cm: &CovarianceMatrix) -> Result<StandardForm> {
    let blocks = cm.blocks()?;
    if let crate::state::Physicality::Unphysical { min_eigenvalue } = validate_physical(cm) {
        return Err(Error::UnphysicalInput(format!(
            "standard form needs a physical state; min eig(Gamma + i Omega) = {min_eigenvalue:.3e}"
        )));
    }

    let det_alpha = blocks.alpha.determinant();
    let det_beta = blocks.beta.determinant();
    let det_gamma = blocks.gamma.determinant();
    let det_full = cm.matrix().determinant();
    let a = det_alpha.sqrt();
    let b = det_beta.sqrt();

    // Whitening maps with unit determinant: N_i^T alpha N_i = a I.
    let n1 = sqrt_spd2(&blocks.alpha)?
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("mode-1 block not invertible".into()))?
        * a.sqrt();
    let n2 = sqrt_spd2(&blocks.beta)?
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("mode-2 block not invertible".into()))?
        * b.sqrt();

    let g_white = n1 * blocks.gamma * n2;
    let (r1, r2, c_plus, c_minus) = rotations_diagonalizing(&g_white);

    // Independent route via the invariants: c+^2 and c-^2 are the roots of
    // t^2 - s t + p^2 with s = (a^2 b^2 + det(gamma)^2 - det Gamma)/(ab).
    let s = (det_alpha * det_beta + det_gamma * det_gamma - det_full) / (a * b);
    let p = det_gamma;
    let mut disc = s * s - 4.0 * p * p;
    if disc < 0.0 {
        if disc < -1e-9 {
            return Err(Error::InconsistentInvariants(format!(
                "invariants give negative discriminant {disc:.3e} for the cross-block scalars"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let c_plus_inv = (0.5 * (s + root)).max(0.0).sqrt();
    let c_minus_inv = (0.5 * (s - root)).max(0.0).sqrt() * if p < 0.0 { -1.0 } else { 1.0 };
    let scale = 1.0 + c_plus.abs();
    if (c_plus - c_plus_inv).abs() > 1e-6 * scale || (c_minus - c_minus_inv).abs() > 1e-6 * scale {
        return Err(Error::InconsistentInvariants(format!(
            "cross-block scalars from the local transform ({c_plus:.9}, {c_minus:.9}) disagree \
             with the invariant route ({c_plus_inv:.9}, {c_minus_inv:.9})"
        )));
    }

    // S_l = (N_1 R_1) (+) (N_2 R_2); N_i symmetric, so the congruence through
    // N_i R_i takes alpha -> a I and gamma -> R_1^T (N_1 gamma N_2) R_2.
    let m1 = n1 * r1;
    let m2 = n2 * r2;
    let mut local = DMatrix::identity(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            local[(i, j)] = m1[(i, j)];
            local[(i + 2, j + 2)] = m2[(i, j)];
        }
    }
    Ok(StandardForm {
        a,
        b,
        c_plus,
        c_minus,
        local_transform: SymplecticTransform::from_trusted(local),
    })
}
