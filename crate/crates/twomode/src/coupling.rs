//! The mode-coupling family: two equally squeezed modes whose squeezed
//! quadratures are misaligned by a tilt angle `theta` before they interfere
//! on a balanced beam splitter.
//!
//! `theta = 0` is the ideal case (squeezed quadratures orthogonal in phase
//! space, maximal entanglement between the beam-splitter outputs); growing
//! `|theta|` degrades the entanglement without ever making the state mixed.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::state::{CovarianceMatrix, TwoModeBlocks};

/// Parameters of the coupled-state family.
///
/// `a >= 1` is the anti-squeezed quadrature variance of each single mode
/// (the squeezed variance is `1/a`; in dB the squeezing is `-10 log10 a`).
/// `theta` is the tilt of one squeezed quadrature away from orthogonality,
/// in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledStateParams {
    pub a: f64,
    pub theta: f64,
}

fn check_squeezing(a: f64) -> Result<()> {
    if a < 1.0 || a.is_nan() {
        return Err(Error::DomainError(format!(
            "squeezing parameter must satisfy a >= 1 (got {a}); reparameterize a < 1 as 1/a"
        )));
    }
    Ok(())
}

/// Covariance matrix in the basis of the two squeezed ("+/-45 degree")
/// modes: the first mode is squeezed along `p`, the second along a direction
/// tilted by `theta` from `x`, and the intermodal block is exactly zero.
pub fn coupled_cm_squeezed_basis(p: &CoupledStateParams) -> Result<CovarianceMatrix> {
    check_squeezing(p.a)?;
    let a = p.a;
    let (sin, cos) = p.theta.sin_cos();
    let b = cos * cos / a + a * sin * sin;
    let b_prime = a * cos * cos + sin * sin / a;
    let c = (a - 1.0 / a) * sin * cos;
    let blocks = TwoModeBlocks {
        alpha: Matrix2::new(a, 0.0, 0.0, 1.0 / a),
        beta: Matrix2::new(b, c, c, b_prime),
        gamma: Matrix2::zeros(),
    };
    Ok(blocks.assemble())
}

/// Covariance matrix of the entangled modes after the balanced beam
/// splitter, written directly from the closed forms
///
/// ```text
/// | n1  k'  k   k' |        n1 = (cos^2 t + a^2 (sin^2 t + 1)) / 2a
/// | k'  n2  k' -k  |        n2 = (a^2 cos^2 t + sin^2 t + 1) / 2a
/// | k   k'  n1  k' |        k  = ((1 - a^2) / 2a) cos^2 t
/// | k' -k   k'  n2 |        k' = ((a^2 - 1) / 2a) sin t cos t
/// ```
///
/// and equal (to rounding) to
/// `apply(beam_splitter(pi/4), coupled_cm_squeezed_basis(p))`.
pub fn coupled_cm_entangled_basis(p: &CoupledStateParams) -> Result<CovarianceMatrix> {
    check_squeezing(p.a)?;
    let a = p.a;
    let (sin, cos) = p.theta.sin_cos();
    let (s2, c2) = (sin * sin, cos * cos);
    let n1 = (c2 + a * a * (s2 + 1.0)) / (2.0 * a);
    let n2 = (a * a * c2 + s2 + 1.0) / (2.0 * a);
    let k = (1.0 - a * a) / (2.0 * a) * c2;
    let kp = (a * a - 1.0) / (2.0 * a) * sin * cos;
    let mat = DMatrix::from_row_slice(
        4,
        4,
        &[
            n1, kp, k, kp, //
            kp, n2, kp, -k, //
            k, kp, n1, kp, //
            kp, -k, kp, n2,
        ],
    );
    CovarianceMatrix::new(mat)
}

/// Squared smallest symplectic eigenvalue of the partial transpose of the
/// entangled-basis state, in closed form:
///
/// ```text
/// nu~^2 = (1/4a^2) { 2(a^4+1) cos^2 t + 4a^2 sin^2 t
///         - sqrt(2) (a^2-1) sqrt[cos^2 t (a^4 + 6a^2 + (a^2-1)^2 cos 2t + 1)] }
/// ```
///
/// Pi-periodic and even in `theta`; minimized at `theta = 0 mod pi` where it
/// equals `1/a^2`.
pub fn nu_tilde_sq_analytic(p: &CoupledStateParams) -> Result<f64> {
    check_squeezing(p.a)?;
    let a2 = p.a * p.a;
    let a4 = a2 * a2;
    let (sin, cos) = p.theta.sin_cos();
    let (s2, c2) = (sin * sin, cos * cos);
    let mut radicand = c2 * (a4 + 6.0 * a2 + (a2 - 1.0) * (a2 - 1.0) * (2.0 * p.theta).cos() + 1.0);
    if radicand < 0.0 {
        if radicand < -1e-12 {
            return Err(Error::NumericalDegeneracy(format!(
                "closed-form radicand came out negative ({radicand:.3e}) for a = {}, theta = {}",
                p.a, p.theta
            )));
        }
        radicand = 0.0;
    }
    let value = (2.0 * (a4 + 1.0) * c2 + 4.0 * a2 * s2
        - std::f64::consts::SQRT_2 * (a2 - 1.0) * radicand.sqrt())
        / (4.0 * a2);
    Ok(value)
}

/// One grid point of the entanglement surface over `(a, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub a: f64,
    pub theta: f64,
    /// Logarithmic negativity between the entangled modes, in bits.
    pub log_negativity: f64,
}

/// Tabulates `E_N(a, theta) = max[0, -1/2 log2 nu~^2]` on the product grid,
/// rows ordered `a`-major then `theta`.
pub fn sweep_logneg_surface(a_grid: &[f64], theta_grid: &[f64]) -> Result<Vec<SurfacePoint>> {
    let mut out = Vec::with_capacity(a_grid.len() * theta_grid.len());
    for &a in a_grid {
        for &theta in theta_grid {
            let nu_sq = nu_tilde_sq_analytic(&CoupledStateParams { a, theta })?;
            let logneg = (-0.5 * nu_sq.log2()).max(0.0);
            out.push(SurfacePoint {
                a,
                theta,
                log_negativity: logneg,
            });
        }
    }
    Ok(out)
}

/// Which of the two squeezed-basis modes to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoupledMode {
    Plus,
    Minus,
}

/// Principal axes of a single mode's noise ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEllipse {
    pub major_axis_variance: f64,
    pub minor_axis_variance: f64,
    /// Direction of the minor (most squeezed) axis, in `[0, pi)`; 0 when the
    /// ellipse is a circle.
    pub orientation_angle: f64,
}

/// Noise ellipse of one squeezed-basis mode: eigen-decomposition of its 2x2
/// block. The `Plus` mode is independent of the tilt; the `Minus` mode's
/// squeezed axis rotates with `theta` and its minimum variance degrades.
pub fn noise_ellipse(p: &CoupledStateParams, mode: CoupledMode) -> Result<NoiseEllipse> {
    let cm = coupled_cm_squeezed_basis(p)?;
    let blocks = cm.blocks()?;
    let block = match mode {
        CoupledMode::Plus => blocks.alpha,
        CoupledMode::Minus => blocks.beta,
    };
    let eig = nalgebra::SymmetricEigen::new(block);
    let (lo_idx, hi_idx) = if eig.eigenvalues[0] <= eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let minor = eig.eigenvalues[lo_idx];
    let major = eig.eigenvalues[hi_idx];
    let orientation = if major - minor < 1e-12 {
        0.0
    } else {
        let v = eig.eigenvectors.column(lo_idx);
        let mut angle = v[1].atan2(v[0]);
        if angle < 0.0 {
            angle += std::f64::consts::PI;
        }
        if angle >= std::f64::consts::PI {
            angle -= std::f64::consts::PI;
        }
        angle
    };
    Ok(NoiseEllipse {
        major_axis_variance: major,
        minor_axis_variance: minor,
        orientation_angle: orientation,
    })
}
