//! Entanglement qualification and quantification for two-mode states.
//!
//! Everything here reduces to the smallest symplectic eigenvalue
//! `nu_tilde_minus` of the partially transposed state: the state is
//! separable iff `nu_tilde_minus >= 1`, and the negativity family as well as
//! the (symmetric-state) entanglement of formation are monotone functions
//! of it. Logarithms are base 2 throughout, so entanglement comes out in
//! bits; a natural-log variant is deliberately not provided.

use crate::error::{Error, Result};
use crate::state::{purity, validate_physical, CovarianceMatrix, Physicality};
use crate::symplectic::StandardForm;

/// Two single-mode purities are considered equal — and the state symmetric —
/// when the standard-form `a` and `b` agree within this tolerance
/// (shot-noise units).
pub const SYMMETRY_TOL: f64 = 1e-6;

/// Separability verdicts treat `nu_tilde_minus >= 1 - 1e-9` as separable so
/// that states sitting numerically on the boundary do not flip sign.
pub const SEPARABILITY_TOL: f64 = 1e-9;

/// Symplectic eigenvalues `(nu_minus, nu_plus)` of the partial transpose,
/// from the local invariants:
///
/// ```text
/// 2 nu^2 = Delta~ -+ sqrt(Delta~^2 - 4 det Gamma),
/// Delta~ = det alpha + det beta - 2 det gamma
/// ```
pub fn nu_tilde(cm: &CovarianceMatrix) -> Result<(f64, f64)> {
    let blocks = cm.blocks()?;
    let delta = blocks.alpha.determinant() + blocks.beta.determinant()
        - 2.0 * blocks.gamma.determinant();
    let det = cm.matrix().determinant();
    let mut disc = delta * delta - 4.0 * det;
    if disc < 0.0 {
        if disc < -1e-9 {
            return Err(Error::InconsistentInvariants(format!(
                "partial-transpose invariants give Delta~^2 - 4 det Gamma = {disc:.3e} < 0"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let minus = (0.5 * (delta - root)).max(0.0).sqrt();
    let plus = (0.5 * (delta + root)).max(0.0).sqrt();
    Ok((minus, plus))
}

/// Shortcut for symmetric states in standard form:
/// `nu_tilde_minus = sqrt((a - |c_plus|)(a - |c_minus|))`.
pub fn nu_tilde_symmetric(sf: &StandardForm) -> Result<f64> {
    if (sf.a - sf.b).abs() > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            a: sf.a,
            b: sf.b,
            tol: SYMMETRY_TOL,
        });
    }
    let prod = (sf.a - sf.c_plus.abs()) * (sf.a - sf.c_minus.abs());
    Ok(prod.max(0.0).sqrt())
}

/// Positive-partial-transpose separability test: `true` iff
/// `nu_tilde_minus >= 1` (within [`SEPARABILITY_TOL`]).
pub fn ppt_separable(cm: &CovarianceMatrix) -> Result<bool> {
    let (minus, _) = nu_tilde(cm)?;
    Ok(minus >= 1.0 - SEPARABILITY_TOL)
}

/// Logarithmic negativity `max[0, -log2 nu_tilde_minus]` in bits.
pub fn log_negativity(cm: &CovarianceMatrix) -> Result<f64> {
    let (minus, _) = nu_tilde(cm)?;
    Ok((-minus.log2()).max(0.0))
}

/// Negativity `max[0, (1 - nu_tilde_minus) / (2 nu_tilde_minus)]`.
pub fn negativity(cm: &CovarianceMatrix) -> Result<f64> {
    let (minus, _) = nu_tilde(cm)?;
    Ok(((1.0 - minus) / (2.0 * minus)).max(0.0))
}

/// `t * log2(t)` with the continuous-extension convention `0 * log 0 = 0`.
fn xlog2x(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.log2()
    }
}

/// The binary-entropy-like function appearing in the symmetric-state
/// entanglement of formation:
///
/// ```text
/// h(x) = ((1+x)^2 / 4x) log2((1+x)^2 / 4x) - ((1-x)^2 / 4x) log2((1-x)^2 / 4x)
/// ```
///
/// with `h(1) = 0` by continuity.
fn formation_entropy(x: f64) -> f64 {
    let plus = (1.0 + x) * (1.0 + x) / (4.0 * x);
    let minus = (1.0 - x) * (1.0 - x) / (4.0 * x);
    xlog2x(plus) - xlog2x(minus)
}

/// Entanglement of formation of a *symmetric* two-mode Gaussian state,
/// `E_F = h(nu_tilde_minus)` for entangled states and exactly 0 otherwise.
///
/// The closed form is only proven for states with equal single-mode
/// purities; asymmetric input is refused rather than extrapolated.
pub fn entanglement_of_formation(cm: &CovarianceMatrix) -> Result<f64> {
    let blocks = cm.blocks()?;
    let a = blocks.alpha.determinant().max(0.0).sqrt();
    let b = blocks.beta.determinant().max(0.0).sqrt();
    if (a - b).abs() > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            a,
            b,
            tol: SYMMETRY_TOL,
        });
    }
    let (minus, _) = nu_tilde(cm)?;
    if minus >= 1.0 {
        return Ok(0.0);
    }
    Ok(formation_entropy(minus))
}

/// Bundle of the entanglement quantities of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub nu_tilde_minus: f64,
    pub negativity: f64,
    /// In bits (base-2).
    pub log_negativity: f64,
    /// Present only for symmetric states; the closed form does not cover the
    /// asymmetric case.
    pub eof: Option<f64>,
    pub purity: f64,
    pub separable: bool,
    /// `|a - b| <= 1e-6` on the standard-form scalars.
    pub symmetric: bool,
}

/// Computes the full [`EntanglementReport`] of a physical two-mode state.
pub fn analyze(cm: &CovarianceMatrix) -> Result<EntanglementReport> {
    if let Physicality::Unphysical { min_eigenvalue } = validate_physical(cm) {
        return Err(Error::UnphysicalInput(format!(
            "entanglement analysis needs a physical state; min eig(Gamma + i Omega) = \
             {min_eigenvalue:.3e}"
        )));
    }
    let blocks = cm.blocks()?;
    let a = blocks.alpha.determinant().max(0.0).sqrt();
    let b = blocks.beta.determinant().max(0.0).sqrt();
    let symmetric = (a - b).abs() <= SYMMETRY_TOL;
    let (minus, _) = nu_tilde(cm)?;
    let eof = if symmetric {
        Some(entanglement_of_formation(cm)?)
    } else {
        None
    };
    Ok(EntanglementReport {
        nu_tilde_minus: minus,
        negativity: ((1.0 - minus) / (2.0 * minus)).max(0.0),
        log_negativity: (-minus.log2()).max(0.0),
        eof,
        purity: purity(cm)?,
        separable: minus >= 1.0 - SEPARABILITY_TOL,
        symmetric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{squeezed_thermal_state, thermal_state, CovarianceMatrix};
    use crate::symplectic::{apply, beam_splitter, embed, phase_shift, standard_form};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn squeezed_pair() -> CovarianceMatrix {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.33, 7.94, 7.94, 0.33]));
        CovarianceMatrix::new(m).unwrap()
    }

    fn rotated_pair() -> CovarianceMatrix {
        apply(&beam_splitter(std::f64::consts::FRAC_PI_4), &squeezed_pair()).unwrap()
    }

    #[test]
    fn vacuum_is_separable_with_zero_measures() {
        let vac = CovarianceMatrix::vacuum(2);
        let (minus, plus) = nu_tilde(&vac).unwrap();
        assert_relative_eq!(minus, 1.0, epsilon = 1e-12);
        assert_relative_eq!(plus, 1.0, epsilon = 1e-12);
        let report = analyze(&vac).unwrap();
        assert!(report.separable);
        assert_eq!(report.negativity, 0.0);
        assert_eq!(report.log_negativity, 0.0);
        assert_eq!(report.eof, Some(0.0));
    }

    #[test]
    fn rotated_squeezed_pair_measures() {
        let cm = rotated_pair();
        let (minus, _) = nu_tilde(&cm).unwrap();
        assert_relative_eq!(minus, 0.33, epsilon = 1e-9);
        assert_relative_eq!(
            log_negativity(&cm).unwrap(),
            1.5994620704162816,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            negativity(&cm).unwrap(),
            (1.0 - 0.33) / (2.0 * 0.33),
            epsilon = 1e-9
        );
        assert!(!ppt_separable(&cm).unwrap());
    }

    #[test]
    fn rotated_squeezed_pair_report() {
        let report = analyze(&rotated_pair()).unwrap();
        assert!(report.symmetric);
        assert!(!report.separable);
        assert_relative_eq!(report.nu_tilde_minus, 0.33, epsilon = 1e-9);
        assert_relative_eq!(report.purity, 1.0 / (0.33f64 * 7.94), epsilon = 1e-9);
        assert_relative_eq!(
            report.eof.unwrap(),
            1.0951158462631252,
            epsilon = 1e-10
        );
    }

    #[test]
    fn two_mode_squeezed_vacuum_nu_tilde() {
        let r = 0.5;
        let cm = squeezed_thermal_state(1.0, 1.0, r).unwrap();
        let (minus, _) = nu_tilde(&cm).unwrap();
        assert_relative_eq!(minus, (-2.0 * r).exp(), epsilon = 1e-9);
    }

    #[test]
    fn symmetric_shortcut_agrees_with_invariant_route() {
        let cm = rotated_pair();
        let sf = standard_form(&cm).unwrap();
        let shortcut = nu_tilde_symmetric(&sf).unwrap();
        let (minus, _) = nu_tilde(&cm).unwrap();
        assert_relative_eq!(shortcut, minus, epsilon = 1e-8);
    }

    #[test]
    fn symmetric_shortcut_refuses_asymmetric_states() {
        let cm = squeezed_thermal_state(1.2, 2.5, 0.8).unwrap();
        let sf = standard_form(&cm).unwrap();
        assert!(matches!(
            nu_tilde_symmetric(&sf),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            entanglement_of_formation(&cm),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn thermal_product_is_separable() {
        let cm = thermal_state(&[2.0, 3.0]).unwrap();
        assert!(ppt_separable(&cm).unwrap());
        assert_eq!(log_negativity(&cm).unwrap(), 0.0);
    }

    #[test]
    fn formation_vanishes_exactly_at_and_above_the_boundary() {
        // Symmetric squeezed thermal state with nu_tilde = nu e^{-2r} > 1.
        let cm = squeezed_thermal_state(2.0, 2.0, 0.1).unwrap();
        let (minus, _) = nu_tilde(&cm).unwrap();
        assert!(minus > 1.0);
        assert_eq!(entanglement_of_formation(&cm).unwrap(), 0.0);
        assert_eq!(log_negativity(&cm).unwrap(), 0.0);
        assert_eq!(negativity(&cm).unwrap(), 0.0);
    }

    #[test]
    fn formation_decreases_with_nu_tilde() {
        // Pure symmetric states with nu_tilde = e^{-2r}: pick r for targets.
        let ef = |x: f64| {
            let r = -0.5 * x.ln();
            let cm = squeezed_thermal_state(1.0, 1.0, r).unwrap();
            entanglement_of_formation(&cm).unwrap()
        };
        let (e1, e2, e5) = (ef(0.1), ef(0.2), ef(0.5));
        assert!(e1 > e2 && e2 > e5 && e5 > 0.0);
    }

    #[test]
    fn entangled_states_have_negative_cross_determinant() {
        for cm in [
            rotated_pair(),
            squeezed_thermal_state(1.0, 1.0, 0.7).unwrap(),
            squeezed_thermal_state(1.1, 1.3, 1.0).unwrap(),
        ] {
            if !ppt_separable(&cm).unwrap() {
                assert!(cm.blocks().unwrap().gamma.determinant() < 0.0);
            }
        }
    }

    #[test]
    fn measures_invariant_under_local_rotations() {
        let cm = rotated_pair();
        let local = embed(&phase_shift(0.9), &[0], 2)
            .unwrap()
            .then(&embed(&phase_shift(-0.4), &[1], 2).unwrap())
            .unwrap();
        let moved = apply(&local, &cm).unwrap();
        assert_relative_eq!(
            log_negativity(&moved).unwrap(),
            log_negativity(&cm).unwrap(),
            epsilon = 1e-10
        );
        assert_relative_eq!(
            entanglement_of_formation(&moved).unwrap(),
            entanglement_of_formation(&cm).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn analyze_rejects_unphysical_input() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5, 1.0, 1.0]));
        let cm = CovarianceMatrix::new(m).unwrap();
        assert!(matches!(analyze(&cm), Err(Error::UnphysicalInput(_))));
    }
}
