//! Measurement-error modelling and a homodyne-detection simulator.
//!
//! Two questions from the lab side: how does an entanglement estimate react
//! to systematic errors on individual covariance-matrix entries, and can a
//! full measurement pipeline (quadrature sampling, variance scans, CM
//! estimation) recover the entanglement of a known state? Both live here.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::{validate_physical, CovarianceMatrix, Physicality};
use crate::symplectic::{apply, beam_splitter, embed, phase_shift};

use std::f64::consts::FRAC_PI_4;

/// Which 2x2 region of the two-mode CM an error model targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbedBlock {
    /// Both single-mode blocks (`alpha` and `beta`).
    DiagonalBlocks,
    /// The intermodal block (`gamma`).
    OffDiagonalBlock,
}

/// Which entries inside the targeted block(s) receive the error.
///
/// "Standard-form entries" are the positions that survive in the reduced
/// form `alpha = a I`, `beta = b I`, `gamma = diag(c+, c-)`: the diagonals
/// of each block. The complement is the entries that vanish there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntrySet {
    All,
    StandardFormEntries,
    NonStandardFormEntries,
}

/// Sign of the additive error applied to every targeted entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationSign {
    Plus,
    Minus,
}

/// An additive, coherent error model: `delta` (shot-noise units) added with
/// one common sign to every entry of the resolved index set, mirrored
/// symmetrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub block: PerturbedBlock,
    pub entry_set: EntrySet,
    pub sign: PerturbationSign,
    pub delta: f64,
}

impl PerturbationSpec {
    /// Spec with the default `+delta` sign.
    pub fn new(block: PerturbedBlock, entry_set: EntrySet, delta: f64) -> Self {
        PerturbationSpec {
            block,
            entry_set,
            sign: PerturbationSign::Plus,
            delta,
        }
    }

    /// Upper-triangle representatives of the targeted entries; the mirror
    /// images are implied.
    pub fn index_set(&self) -> &'static [(usize, usize)] {
        use EntrySet::*;
        use PerturbedBlock::*;
        match (self.block, self.entry_set) {
            (DiagonalBlocks, All) => &[(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (2, 3)],
            (DiagonalBlocks, StandardFormEntries) => &[(0, 0), (1, 1), (2, 2), (3, 3)],
            (DiagonalBlocks, NonStandardFormEntries) => &[(0, 1), (2, 3)],
            (OffDiagonalBlock, All) => &[(0, 2), (0, 3), (1, 2), (1, 3)],
            (OffDiagonalBlock, StandardFormEntries) => &[(0, 2), (1, 3)],
            (OffDiagonalBlock, NonStandardFormEntries) => &[(0, 3), (1, 2)],
        }
    }
}

/// Applies the error model. The result may violate the uncertainty
/// relation; that is data, not an error, so the physicality verdict is
/// returned alongside the perturbed matrix.
pub fn perturb(
    cm: &CovarianceMatrix,
    spec: &PerturbationSpec,
) -> Result<(CovarianceMatrix, Physicality)> {
    if cm.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "perturbation model covers two modes, got {}",
            cm.n_modes()
        )));
    }
    let signed = match spec.sign {
        PerturbationSign::Plus => spec.delta,
        PerturbationSign::Minus => -spec.delta,
    };
    let mut mat = cm.matrix().clone();
    for &(r, c) in spec.index_set() {
        mat[(r, c)] += signed;
        if r != c {
            mat[(c, r)] += signed;
        }
    }
    let perturbed = CovarianceMatrix::new(mat)?;
    let verdict = validate_physical(&perturbed);
    Ok((perturbed, verdict))
}

/// One row of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub spec: PerturbationSpec,
    pub delta: f64,
    pub physical: bool,
    /// Logarithmic negativity of the perturbed state (entangled-mode basis);
    /// absent when the perturbed matrix is unphysical.
    pub log_negativity: Option<f64>,
    /// `|E_N(delta) - E_N(0)|`; absent when unphysical.
    pub delta_log_negativity: Option<f64>,
}

/// Sweeps each error model over a grid of error magnitudes.
///
/// The baseline is given in the squeezed-mode basis; entanglement is always
/// evaluated between the beam-splitter outputs, i.e. on
/// `apply(beam_splitter(pi/4), perturbed)`. Rows are ordered spec-major,
/// then by the grid order of `delta`.
pub fn sensitivity_sweep(
    baseline: &CovarianceMatrix,
    specs: &[PerturbationSpec],
    delta_grid: &[f64],
) -> Result<Vec<SensitivityPoint>> {
    let bs = beam_splitter(FRAC_PI_4);
    let reference = crate::entanglement::log_negativity(&apply(&bs, baseline)?)?;
    let mut rows = Vec::with_capacity(specs.len() * delta_grid.len());
    for spec in specs {
        for &delta in delta_grid {
            let step = PerturbationSpec { delta, ..*spec };
            let (perturbed, verdict) = perturb(baseline, &step)?;
            let physical = verdict.is_physical();
            let (logneg, dlogneg) = if physical {
                let e = crate::entanglement::log_negativity(&apply(&bs, &perturbed)?)?;
                (Some(e), Some((e - reference).abs()))
            } else {
                (None, None)
            };
            rows.push(SensitivityPoint {
                spec: step,
                delta,
                physical,
                log_negativity: logneg,
                delta_log_negativity: dlogneg,
            });
        }
    }
    Ok(rows)
}

/// Draws `count` zero-mean Gaussian quadrature samples (rows) with
/// covariance `Gamma`, via the Cholesky factor `Gamma = L L^T` applied to
/// unit normals from a ChaCha8 stream seeded with `seed`. Bit-identical
/// across runs for a fixed seed and build.
pub fn sample_state(cm: &CovarianceMatrix, count: usize, seed: u64) -> Result<DMatrix<f64>> {
    if count == 0 {
        return Err(Error::DomainError("sample count must be at least 1".into()));
    }
    if let Physicality::Unphysical { min_eigenvalue } = validate_physical(cm) {
        return Err(Error::UnphysicalInput(format!(
            "sampling needs a physical state; min eig(Gamma + i Omega) = {min_eigenvalue:.3e}"
        )));
    }
    let chol = nalgebra::Cholesky::new(cm.matrix().clone()).ok_or_else(|| {
        Error::UnphysicalInput("covariance matrix is not positive definite".into())
    })?;
    let l = chol.l();
    let dim = cm.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DMatrix::zeros(count, dim);
    let mut z = DVector::zeros(dim);
    for row in 0..count {
        for k in 0..dim {
            z[k] = rng.sample(StandardNormal);
        }
        let x = &l * &z;
        for k in 0..dim {
            out[(row, k)] = x[k];
        }
    }
    Ok(out)
}

/// A local-oscillator phase scan of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureTrace {
    pub phases: Vec<f64>,
    /// Estimated variance of `x cos(phase) + p sin(phase)`, shot-noise units.
    pub variances: Vec<f64>,
    /// `10 log10(variance)`: 0 dB is vacuum noise.
    pub variances_db: Vec<f64>,
}

/// Analytic variance of the rotated quadrature of one mode.
pub fn homodyne_variance(cm: &CovarianceMatrix, mode: usize, phase: f64) -> Result<f64> {
    if mode >= cm.n_modes() {
        return Err(Error::DomainError(format!(
            "mode index {mode} out of range for {} modes",
            cm.n_modes()
        )));
    }
    let (s, c) = phase.sin_cos();
    let g = cm.matrix();
    let (i, j) = (2 * mode, 2 * mode + 1);
    Ok(c * c * g[(i, i)] + 2.0 * s * c * g[(i, j)] + s * s * g[(j, j)])
}

/// Simulates a homodyne phase scan: at each grid phase, draws
/// `samples_per_phase` fresh samples (seed derived as `seed XOR phase
/// index`, so grid points are independently reproducible) and estimates the
/// variance of the rotated quadrature with the unbiased sample estimator.
pub fn homodyne_scan(
    cm: &CovarianceMatrix,
    mode: usize,
    phase_grid: &[f64],
    samples_per_phase: usize,
    seed: u64,
) -> Result<QuadratureTrace> {
    if mode >= cm.n_modes() {
        return Err(Error::DomainError(format!(
            "mode index {mode} out of range for {} modes",
            cm.n_modes()
        )));
    }
    if samples_per_phase < 2 {
        return Err(Error::DegenerateSamples(
            "variance estimation needs at least 2 samples per phase".into(),
        ));
    }
    let mut variances = Vec::with_capacity(phase_grid.len());
    for (idx, &phase) in phase_grid.iter().enumerate() {
        let samples = sample_state(cm, samples_per_phase, seed ^ idx as u64)?;
        let (s, c) = phase.sin_cos();
        let mut mean = 0.0;
        let mut sq = 0.0;
        for row in 0..samples_per_phase {
            let q = c * samples[(row, 2 * mode)] + s * samples[(row, 2 * mode + 1)];
            mean += q;
            sq += q * q;
        }
        mean /= samples_per_phase as f64;
        let var = (sq - samples_per_phase as f64 * mean * mean) / (samples_per_phase as f64 - 1.0);
        variances.push(var);
    }
    let variances_db = variances.iter().map(|v| 10.0 * v.log10()).collect();
    Ok(QuadratureTrace {
        phases: phase_grid.to_vec(),
        variances,
        variances_db,
    })
}

/// Relabels the second mode's quadratures `(x2, p2) -> (-p2, x2)`; the sign
/// convention of a quarter phase rotation, so the result is again a valid
/// state and the relabeling is an involution on covariance matrices.
pub fn quadrature_relabel(cm: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if cm.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "quadrature relabeling is defined for two modes, got {}",
            cm.n_modes()
        )));
    }
    let quarter = embed(&phase_shift(std::f64::consts::FRAC_PI_2), &[1], 2)?;
    apply(&quarter, cm)
}

/// Unbiased sample covariance of quadrature samples (rows = draws).
///
/// With `zero_offdiag_offblock` set, the off-diagonal entries of the
/// intermodal block are forced to zero — the standing policy for measurement
/// schemes that cannot access those cross-correlations reliably. The
/// estimate is returned even when unphysical (e.g. degenerate input data);
/// validate before using it as a state.
pub fn estimate_cm(samples: &DMatrix<f64>, zero_offdiag_offblock: bool) -> Result<CovarianceMatrix> {
    let count = samples.nrows();
    let dim = samples.ncols();
    if count < 2 {
        return Err(Error::DegenerateSamples(format!(
            "covariance estimation needs at least 2 samples, got {count}"
        )));
    }
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::MalformedMatrix(format!(
            "samples must have an even, nonzero number of quadrature columns, got {dim}"
        )));
    }
    let mut means = vec![0.0f64; dim];
    for row in 0..count {
        for k in 0..dim {
            means[k] += samples[(row, k)];
        }
    }
    for m in means.iter_mut() {
        *m /= count as f64;
    }
    let mut cov = DMatrix::zeros(dim, dim);
    for row in 0..count {
        for i in 0..dim {
            let di = samples[(row, i)] - means[i];
            for j in i..dim {
                cov[(i, j)] += di * (samples[(row, j)] - means[j]);
            }
        }
    }
    cov /= count as f64 - 1.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            cov[(j, i)] = cov[(i, j)];
        }
    }
    if zero_offdiag_offblock && dim == 4 {
        cov[(0, 3)] = 0.0;
        cov[(3, 0)] = 0.0;
        cov[(1, 2)] = 0.0;
        cov[(2, 1)] = 0.0;
    }
    CovarianceMatrix::new(cov)
}
