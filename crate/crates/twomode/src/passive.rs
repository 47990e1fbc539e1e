//! Entanglement optimization under passive (energy-preserving)
//! transformations, and the three-waveplate realization of the optimal
//! correction for co-propagating polarization modes.
//!
//! Passive transformations are the orthogonal symplectics: beam splitters,
//! phase shifts and their compositions. They preserve `tr Gamma` (photon
//! number), and the best smallest partial-transpose eigenvalue they can
//! reach from a given state is `nu~^2 = lambda_1 lambda_2`, the product of
//! the two smallest ordinary eigenvalues of `Gamma`.

use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::simplex;
use crate::state::{validate_physical, CovarianceMatrix, Physicality};
use crate::symplectic::SymplecticTransform;

use std::f64::consts::{FRAC_PI_2, PI};

/// Best smallest partial-transpose symplectic eigenvalue reachable by
/// passive transformations: `sqrt(lambda_1 lambda_2)` over the two smallest
/// ordinary eigenvalues of `Gamma`.
pub fn passive_bound(cm: &CovarianceMatrix) -> Result<f64> {
    if cm.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "passive bound is defined for two modes, got {}",
            cm.n_modes()
        )));
    }
    if let Physicality::Unphysical { min_eigenvalue } = validate_physical(cm) {
        return Err(Error::UnphysicalInput(format!(
            "passive bound needs a physical state; min eig(Gamma + i Omega) = {min_eigenvalue:.3e}"
        )));
    }
    let mut eigs: Vec<f64> = cm.matrix().symmetric_eigenvalues().iter().cloned().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((eigs[0] * eigs[1]).max(0.0).sqrt())
}

/// Angles parameterizing a two-mode passive transform as
/// "phase on mode 1, then beam splitter, then a phase on each output".
/// Four angles cover the whole passive group's action on covariance
/// matrices (a second input phase would be redundant: a common input phase
/// commutes with the beam splitter). All angles are radians; the action is
/// pi-periodic in each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveParams {
    pub phase_in: f64,
    pub beam_splitter_angle: f64,
    pub phase_out_1: f64,
    pub phase_out_2: f64,
}

impl PassiveParams {
    pub const IDENTITY: PassiveParams = PassiveParams {
        phase_in: 0.0,
        beam_splitter_angle: 0.0,
        phase_out_1: 0.0,
        phase_out_2: 0.0,
    };
}

/// Builds the transform described by [`PassiveParams`]. Closed form of
/// `embed(phase_shift(psi), [0]) . beam_splitter(theta) .
/// (phase_shift(phi1) (+) phase_shift(phi2))`.
pub fn passive_transform(p: &PassiveParams) -> SymplecticTransform {
    let rot = |angle: f64, scale: f64| -> Matrix2<f64> {
        let (s, c) = angle.sin_cos();
        Matrix2::new(c, s, -s, c) * scale
    };
    let (sin_bs, cos_bs) = p.beam_splitter_angle.sin_cos();
    let b00 = rot(p.phase_in + p.phase_out_1, cos_bs);
    let b01 = rot(p.phase_in + p.phase_out_2, -sin_bs);
    let b10 = rot(p.phase_out_1, sin_bs);
    let b11 = rot(p.phase_out_2, cos_bs);
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = b00[(i, j)];
            m[(i, j + 2)] = b01[(i, j)];
            m[(i + 2, j)] = b10[(i, j)];
            m[(i + 2, j + 2)] = b11[(i, j)];
        }
    }
    SymplecticTransform::from_trusted(m)
}

/// Result of a passive optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveCorrection {
    /// The correcting transform (orthogonal symplectic; preserves `tr Gamma`).
    pub transform: SymplecticTransform,
    pub parameters: PassiveParams,
    pub achieved_nu_tilde: f64,
    pub bound_nu_tilde: f64,
    /// True when the bound was attained within `1e-5`. For measured,
    /// rounded covariance matrices the bound may be unattainable; the best
    /// transform found is still returned.
    pub converged: bool,
}

/// `nu~_-` of `S^T Gamma S` straight from the invariants; hot path of the
/// optimizer, so it skips the wrapper types.
fn nu_minus_after(gamma: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let g = s.transpose() * gamma * s;
    let det_alpha = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let det_beta = g[(2, 2)] * g[(3, 3)] - g[(2, 3)] * g[(3, 2)];
    let det_gamma = g[(0, 2)] * g[(1, 3)] - g[(0, 3)] * g[(1, 2)];
    let delta = det_alpha + det_beta - 2.0 * det_gamma;
    let disc = (delta * delta - 4.0 * g.determinant()).max(0.0);
    (0.5 * (delta - disc.sqrt())).max(0.0).sqrt()
}

const GRID_STEPS: usize = 16;
const BOUND_ATTAINMENT_TOL: f64 = 1e-5;

/// Searches the passive group for the transform minimizing `nu~_-` of the
/// transformed state.
///
/// Deterministic: a 16-step-per-angle grid over the pi-periodic parameter
/// space seeds a Nelder-Mead refinement (step tolerance `1e-8`, at most 500
/// iterations). States already at the bound are returned with the identity
/// transform. Non-attainment of the bound is reported via
/// [`PassiveCorrection::converged`], not as an error.
pub fn optimize_passive(cm: &CovarianceMatrix) -> Result<PassiveCorrection> {
    let bound = passive_bound(cm)?;
    let gamma = cm.matrix();

    let identity = DMatrix::identity(4, 4);
    let current = nu_minus_after(gamma, &identity);
    if current <= bound + 1e-6 {
        return Ok(PassiveCorrection {
            transform: SymplecticTransform::identity(2),
            parameters: PassiveParams::IDENTITY,
            achieved_nu_tilde: current,
            bound_nu_tilde: bound,
            converged: true,
        });
    }

    let objective = |x: &[f64]| -> f64 {
        let p = PassiveParams {
            phase_in: x[0],
            beam_splitter_angle: x[1],
            phase_out_1: x[2],
            phase_out_2: x[3],
        };
        nu_minus_after(gamma, passive_transform(&p).matrix())
    };

    let step = PI / GRID_STEPS as f64;
    let mut best_x = [0.0f64; 4];
    let mut best_val = f64::INFINITY;
    for i0 in 0..GRID_STEPS {
        for i1 in 0..GRID_STEPS {
            for i2 in 0..GRID_STEPS {
                for i3 in 0..GRID_STEPS {
                    let x = [
                        i0 as f64 * step,
                        i1 as f64 * step,
                        i2 as f64 * step,
                        i3 as f64 * step,
                    ];
                    let v = objective(&x);
                    if v < best_val {
                        best_val = v;
                        best_x = x;
                    }
                }
            }
        }
    }

    let refined = simplex::minimize(&objective, &best_x, 0.5 * step, 1e-8, 500);
    let (x, achieved) = if refined.value < best_val {
        (refined.x, refined.value)
    } else {
        (best_x.to_vec(), best_val)
    };

    let parameters = PassiveParams {
        phase_in: x[0].rem_euclid(PI),
        beam_splitter_angle: x[1].rem_euclid(PI),
        phase_out_1: x[2].rem_euclid(PI),
        phase_out_2: x[3].rem_euclid(PI),
    };
    Ok(PassiveCorrection {
        transform: passive_transform(&parameters),
        parameters,
        achieved_nu_tilde: achieved,
        bound_nu_tilde: bound,
        converged: achieved <= bound + BOUND_ATTAINMENT_TOL,
    })
}

// ---------------------------------------------------------------------------
// Waveplates
// ---------------------------------------------------------------------------

type JonesMatrix = Matrix2<Complex<f64>>;

fn complex_rotation(rho: f64) -> JonesMatrix {
    let (s, c) = rho.sin_cos();
    Matrix2::new(
        Complex::new(c, 0.0),
        Complex::new(-s, 0.0),
        Complex::new(s, 0.0),
        Complex::new(c, 0.0),
    )
}

/// Jones matrix of a linear retarder with fast axis at `rho` and retardation
/// `delta` applied to the slow axis: `R(rho) diag(1, e^{i delta}) R(-rho)`.
fn retarder(rho: f64, delta: f64) -> JonesMatrix {
    let d = Matrix2::new(
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::from_polar(1.0, delta),
    );
    complex_rotation(rho) * d * complex_rotation(-rho)
}

fn quarter_wave(rho: f64) -> JonesMatrix {
    retarder(rho, FRAC_PI_2)
}

fn half_wave(rho: f64) -> JonesMatrix {
    retarder(rho, PI)
}

/// Phase-space image of a mode-mixing unitary `U` (the map `a_j -> sum_k
/// U_jk a_k`): an orthogonal symplectic transform acting by congruence.
fn unitary_to_symplectic(u: &JonesMatrix) -> SymplecticTransform {
    let mut m = DMatrix::zeros(4, 4);
    for j in 0..2 {
        for k in 0..2 {
            let z = u[(j, k)];
            m[(2 * j, 2 * k)] = z.re;
            m[(2 * j, 2 * k + 1)] = -z.im;
            m[(2 * j + 1, 2 * k)] = z.im;
            m[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    SymplecticTransform::from_trusted(m.transpose())
}

/// Inverse of [`unitary_to_symplectic`]; fails on transforms that are not
/// passive (not of the mode-mixing block structure, or not orthogonal).
fn symplectic_to_unitary(s: &SymplecticTransform) -> Result<JonesMatrix> {
    if s.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "waveplate decomposition covers two modes, got {}",
            s.n_modes()
        )));
    }
    const TOL: f64 = 1e-8;
    let m = s.matrix().transpose();
    let mut u = JonesMatrix::zeros();
    for j in 0..2 {
        for k in 0..2 {
            let re = m[(2 * j, 2 * k)];
            let im = m[(2 * j + 1, 2 * k)];
            if (m[(2 * j + 1, 2 * k + 1)] - re).abs() > TOL
                || (m[(2 * j, 2 * k + 1)] + im).abs() > TOL
            {
                return Err(Error::DomainError(
                    "transform is not passive: it mixes quadratures outside the \
                     mode-mixing block structure (squeezing present?)"
                        .into(),
                ));
            }
            u[(j, k)] = Complex::new(re, im);
        }
    }
    let defect = u.adjoint() * u - JonesMatrix::identity();
    if defect.iter().any(|z| z.norm() > TOL) {
        return Err(Error::DomainError(
            "transform is not passive: recovered mode map is not unitary".into(),
        ));
    }
    Ok(u)
}

/// Orientations of a quarter-half-quarter waveplate stack realizing a
/// passive transform on two co-propagating polarization modes.
///
/// The light traverses `q1`, then `h`, then `q2` (angles in radians,
/// fast-axis orientation, each pi-periodic). Three plates realize the
/// unit-determinant part of the mode map exactly; `common_phase` is the
/// leftover phase common to both modes, which no plate combination of this
/// form produces. It is irrelevant to entanglement and to any measurement
/// without an external phase reference, but is reported so the full
/// transform can be reconstructed exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSequence {
    pub q1_angle: f64,
    pub h_angle: f64,
    pub q2_angle: f64,
    /// Residual common phase (radians) to apply to both modes after the
    /// plates; see the type-level docs.
    pub common_phase: f64,
}

impl WaveplateSequence {
    /// Net Jones matrix of the three plates alone (no common phase).
    fn plates_unitary(&self) -> JonesMatrix {
        quarter_wave(self.q2_angle) * half_wave(self.h_angle) * quarter_wave(self.q1_angle)
    }

    /// Phase-space action of the plates *including* the common phase; this
    /// reproduces the decomposed transform's congruence action exactly.
    pub fn composed_transform(&self) -> SymplecticTransform {
        let u = self.plates_unitary() * Complex::from_polar(1.0, self.common_phase);
        unitary_to_symplectic(&u)
    }

    /// Phase-space action of the three physical plates only.
    pub fn plates_transform(&self) -> SymplecticTransform {
        unitary_to_symplectic(&self.plates_unitary())
    }
}

/// Squared Frobenius distance between unitaries, minimized over the
/// physically irrelevant overall sign.
fn jones_distance_sq(a: &JonesMatrix, b: &JonesMatrix) -> f64 {
    let direct: f64 = (a - b).iter().map(|z| z.norm_sqr()).sum();
    let flipped: f64 = (a + b).iter().map(|z| z.norm_sqr()).sum();
    direct.min(flipped)
}

/// Tolerance (squared Frobenius) for declaring the plate search successful;
/// corresponds to a unitary error around `1e-10`, comfortably inside the
/// `1e-8` congruence accuracy promised by [`WaveplateSequence`].
const PLATE_FIT_TOL: f64 = 1e-20;

/// Decomposes a passive two-mode transform into a quarter-half-quarter
/// waveplate stack plus a common phase.
///
/// The unit-determinant part of the mode map is fitted by a deterministic
/// multi-start simplex search over the three plate angles (the stack
/// parameterizes exactly the unit-determinant unitaries, so a solution
/// always exists); non-passive input is rejected.
pub fn waveplate_decomposition(target: &SymplecticTransform) -> Result<WaveplateSequence> {
    let u = symplectic_to_unitary(target)?;
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let common_phase = det.arg() / 2.0;
    let v = u * Complex::from_polar(1.0, -common_phase);

    let objective = |x: &[f64]| -> f64 {
        let net = quarter_wave(x[2]) * half_wave(x[1]) * quarter_wave(x[0]);
        jones_distance_sq(&net, &v)
    };

    // Coarse seeding over the pi-periodic angle cube, then refine from the
    // most promising corners.
    let mut seeds: Vec<(f64, [f64; 3])> = Vec::with_capacity(64);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let x = [
                    i as f64 * PI / 4.0,
                    j as f64 * PI / 4.0,
                    k as f64 * PI / 4.0,
                ];
                seeds.push((objective(&x), x));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, seed) in seeds.iter().take(10) {
        let r = simplex::minimize(&objective, seed, 0.3, 1e-12, 800);
        if best.as_ref().map_or(true, |(v, _)| r.value < *v) {
            best = Some((r.value, r.x));
        }
        if best.as_ref().unwrap().0 < PLATE_FIT_TOL {
            break;
        }
    }
    let (value, x) = best.expect("at least one seed is always refined");
    if value > PLATE_FIT_TOL {
        return Err(Error::NumericalDegeneracy(format!(
            "plate-angle search stalled at residual {value:.3e}"
        )));
    }
    Ok(WaveplateSequence {
        q1_angle: x[0].rem_euclid(PI),
        h_angle: x[1].rem_euclid(PI),
        q2_angle: x[2].rem_euclid(PI),
        common_phase,
    })
}
