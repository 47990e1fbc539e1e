//! Randomized invariant checks across the crate. Counts here are kept
//! moderate so the suite stays quick; the heavy 1e4-trial runs live in the
//! acceptance tests.

mod common;

use common::{random_passive, random_state, random_symplectic, rng};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

use twomode::coupling::{coupled_cm_entangled_basis, nu_tilde_sq_analytic, CoupledStateParams};
use twomode::entanglement::{
    analyze, entanglement_of_formation, log_negativity, negativity, nu_tilde, ppt_separable,
};
use twomode::io::{format_cm, parse_cm};
use twomode::metrology::{homodyne_variance, quadrature_relabel};
use twomode::passive::waveplate_decomposition;
use twomode::state::{
    purity, squeezed_thermal_state, thermal_state, validate_physical, CovarianceMatrix,
    Physicality,
};
use twomode::symplectic::{
    apply, embed, partial_transpose, phase_shift, single_mode_squeezer, standard_form,
    symplectic_spectrum, symplectic_spectrum_closed_form, two_mode_squeezer, williamson,
    SymplecticTransform,
};

/// Local (single-mode x single-mode) symplectic, for invariance checks.
fn random_local(rng: &mut StdRng) -> SymplecticTransform {
    let one_mode = |rng: &mut StdRng| {
        phase_shift(rng.gen_range(0.0..std::f64::consts::PI))
            .then(&single_mode_squeezer(rng.gen_range(-1.0..1.0)))
            .unwrap()
            .then(&phase_shift(rng.gen_range(0.0..std::f64::consts::PI)))
            .unwrap()
    };
    let s1 = one_mode(rng);
    let s2 = one_mode(rng);
    embed(&s1, &[0], 2)
        .unwrap()
        .then(&embed(&s2, &[1], 2).unwrap())
        .unwrap()
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn spectrum_is_a_congruence_invariant() {
    let mut r = rng(11);
    for _ in 0..400 {
        let cm = random_state(&mut r);
        let s = random_symplectic(&mut r);
        let before = symplectic_spectrum(&cm).unwrap();
        let after = symplectic_spectrum(&apply(&s, &cm).unwrap()).unwrap();
        for (x, y) in before.nus.iter().zip(&after.nus) {
            assert!(
                (x - y).abs() <= 1e-8 * x.max(1.0),
                "spectrum moved under congruence: {x} vs {y}"
            );
        }
    }
}

#[test]
fn spectrum_closed_form_matches_eigen_route() {
    let mut r = rng(12);
    for _ in 0..400 {
        let cm = random_state(&mut r);
        let eig = symplectic_spectrum(&cm).unwrap();
        let closed = symplectic_spectrum_closed_form(&cm).unwrap();
        for (x, y) in eig.nus.iter().zip(&closed.nus) {
            assert!((x - y).abs() <= 1e-8 * x.max(1.0));
        }
    }
}

#[test]
fn passive_transforms_preserve_trace_and_physicality() {
    let mut r = rng(13);
    for _ in 0..400 {
        let cm = random_state(&mut r);
        let p = random_passive(&mut r);
        let out = apply(&p, &cm).unwrap();
        let dt = (out.matrix().trace() - cm.matrix().trace()).abs();
        assert!(
            dt <= 1e-10 * cm.matrix().trace(),
            "passive transform changed the trace by {dt}"
        );
        assert!(validate_physical(&out).is_physical());
    }
}

#[test]
fn composition_and_inverse_stay_symplectic() {
    // The constructor re-validates, so surviving `new` is the assertion.
    let mut r = rng(14);
    for _ in 0..200 {
        let s = random_symplectic(&mut r);
        let t = random_symplectic(&mut r);
        let c = s.then(&t).unwrap();
        SymplecticTransform::new(c.matrix().clone()).unwrap();
        let inv = s.inverse();
        SymplecticTransform::new(inv.matrix().clone()).unwrap();
        let prod = inv.then(&s).unwrap();
        assert!(max_abs_diff(prod.matrix(), &DMatrix::identity(4, 4)) < 1e-10);
    }
}

#[test]
fn partial_transpose_is_an_involution() {
    let mut r = rng(15);
    for _ in 0..400 {
        let cm = random_state(&mut r);
        for mode in 0..2 {
            let back = partial_transpose(&partial_transpose(&cm, mode).unwrap(), mode).unwrap();
            assert_eq!(back.matrix(), cm.matrix());
        }
    }
}

#[test]
fn nu_tilde_closed_form_matches_transposed_spectrum() {
    let mut r = rng(16);
    for _ in 0..400 {
        let cm = random_state(&mut r);
        let (minus, plus) = nu_tilde(&cm).unwrap();
        let spec = symplectic_spectrum(&partial_transpose(&cm, 1).unwrap()).unwrap();
        assert!((minus - spec.nus[0]).abs() <= 1e-8 * minus.max(1.0));
        assert!((plus - spec.nus[1]).abs() <= 1e-8 * plus.max(1.0));
    }
}

#[test]
fn ppt_verdict_matches_determinant_inequality() {
    // Separability is equivalent to det(alpha) + det(beta) - 2 det(gamma)
    // <= 1 + det(Gamma); skip draws too close to the boundary for the two
    // formulations to be compared at fixed tolerance.
    let mut r = rng(17);
    let mut compared = 0usize;
    for _ in 0..600 {
        let cm = random_state(&mut r);
        let (minus, _) = nu_tilde(&cm).unwrap();
        if (minus - 1.0).abs() < 1e-6 {
            continue;
        }
        let b = cm.blocks().unwrap();
        let delta_pt = b.alpha.determinant() + b.beta.determinant() - 2.0 * b.gamma.determinant();
        let rhs = 1.0 + cm.matrix().determinant();
        assert_eq!(
            ppt_separable(&cm).unwrap(),
            delta_pt <= rhs,
            "PPT verdict disagrees with the invariant inequality at nu = {minus}"
        );
        compared += 1;
    }
    assert!(compared > 500, "boundary guard rejected too many draws");
}

#[test]
fn entangled_states_have_negative_cross_determinant() {
    let mut r = rng(18);
    let mut entangled = 0usize;
    for _ in 0..600 {
        let cm = random_state(&mut r);
        let report = analyze(&cm).unwrap();
        if !report.separable {
            entangled += 1;
            let det_gamma = cm.blocks().unwrap().gamma.determinant();
            assert!(
                det_gamma < 0.0,
                "entangled state with det gamma = {det_gamma}"
            );
        }
    }
    assert!(entangled > 50, "sampler produced too few entangled states");
}

#[test]
fn measures_are_invariant_under_local_symplectics() {
    let mut r = rng(19);
    for _ in 0..200 {
        // Symmetric base state (equal normal-mode temperatures) so the
        // formation measure is defined; local transforms keep the block
        // determinants, hence the symmetry.
        let nu = r.gen_range(1.0..2.5);
        let base = apply(
            &random_local(&mut r),
            &squeezed_thermal_state(nu, nu, r.gen_range(-1.0..1.0)).unwrap(),
        )
        .unwrap();
        let moved = apply(&random_local(&mut r), &base).unwrap();
        let en0 = log_negativity(&base).unwrap();
        let en1 = log_negativity(&moved).unwrap();
        assert!((en0 - en1).abs() <= 1e-8 * en0.max(1.0));
        let n0 = negativity(&base).unwrap();
        let n1 = negativity(&moved).unwrap();
        assert!((n0 - n1).abs() <= 1e-8 * n0.max(1.0));
        let f0 = entanglement_of_formation(&base).unwrap();
        let f1 = entanglement_of_formation(&moved).unwrap();
        assert!((f0 - f1).abs() <= 1e-8 * f0.max(1.0));
        // The three quantifiers agree on whether there is anything to
        // quantify.
        assert_eq!(en0 > 0.0, n0 > 0.0);
        assert_eq!(en0 > 0.0, f0 > 0.0);
    }
}

#[test]
fn log_negativity_decreases_as_nu_tilde_grows() {
    // Pure two-mode squeezed states sweep nu from 1 downward as the
    // squeezing grows; the measure must sweep upward. The phi = pi/4
    // orientation is the one that couples the modes (phi = 0 squeezes the
    // two modes separately).
    let mut last = -1.0;
    for i in 1..40 {
        let r = 0.05 * i as f64;
        let cm = apply(
            &two_mode_squeezer(r, std::f64::consts::FRAC_PI_4),
            &CovarianceMatrix::vacuum(2),
        )
        .unwrap();
        let en = log_negativity(&cm).unwrap();
        assert!(en > last, "measure failed to grow with squeezing");
        last = en;
    }
}

#[test]
fn standard_form_preserves_the_four_local_invariants() {
    let mut r = rng(20);
    for _ in 0..300 {
        let cm = random_state(&mut r);
        let b = cm.blocks().unwrap();
        let sf = standard_form(&cm).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
        assert!(rel(sf.a * sf.a, b.alpha.determinant()) <= 1e-8);
        assert!(rel(sf.b * sf.b, b.beta.determinant()) <= 1e-8);
        assert!(rel(sf.c_plus * sf.c_minus, b.gamma.determinant()) <= 1e-8);
        let det_reduced = (sf.a * sf.b - sf.c_plus * sf.c_plus)
            * (sf.a * sf.b - sf.c_minus * sf.c_minus);
        assert!(rel(det_reduced, cm.matrix().determinant()) <= 1e-8);
        // The stored local transform actually performs the reduction.
        let reduced = apply(&sf.local_transform, &cm).unwrap();
        assert!(max_abs_diff(reduced.matrix(), sf.matrix().matrix()) <= 1e-8);
    }
}

#[test]
fn williamson_reconstructs_the_input() {
    let mut r = rng(21);
    for _ in 0..300 {
        let cm = random_state(&mut r);
        let (s, nus) = williamson(&cm).unwrap();
        for nu in &nus.nus {
            assert!(*nu >= 1.0 - 1e-9, "unphysical normal-mode temperature");
        }
        let d = thermal_state(&nus.nus).unwrap();
        let rebuilt = apply(&s, &d).unwrap();
        let scale = cm.matrix().amax().max(1.0);
        assert!(
            max_abs_diff(rebuilt.matrix(), cm.matrix()) <= 1e-8 * scale,
            "round trip error above budget"
        );
    }
}

#[test]
fn coupled_family_nu_is_pi_periodic_and_even_in_theta() {
    let mut r = rng(22);
    for _ in 0..300 {
        let a = r.gen_range(1.0..12.0);
        let theta = r.gen_range(-6.0..6.0);
        let f = |theta: f64| {
            nu_tilde_sq_analytic(&CoupledStateParams { a, theta }).unwrap()
        };
        let base = f(theta);
        assert!((f(theta + std::f64::consts::PI) - base).abs() <= 1e-9 * base.max(1.0));
        assert!((f(-theta) - base).abs() <= 1e-9 * base.max(1.0));
    }
}

#[test]
fn coupled_family_is_pure_and_physical_everywhere() {
    let mut r = rng(23);
    for _ in 0..200 {
        let p = CoupledStateParams {
            a: r.gen_range(1.0..12.0),
            theta: r.gen_range(-6.0..6.0),
        };
        let cm = coupled_cm_entangled_basis(&p).unwrap();
        assert!(validate_physical(&cm).is_physical());
        assert!((purity(&cm).unwrap() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn waveplate_fit_reproduces_passive_action_on_states() {
    let mut r = rng(24);
    for _ in 0..25 {
        let target = random_passive(&mut r);
        let seq = waveplate_decomposition(&target).unwrap();
        let fitted = seq.composed_transform();
        // The fit is judged by what it does to states, which is blind to
        // the dropped common phase.
        for _ in 0..4 {
            let cm = random_state(&mut r);
            let want = apply(&target, &cm).unwrap();
            let got = apply(&fitted, &cm).unwrap();
            assert!(
                max_abs_diff(want.matrix(), got.matrix())
                    <= 1e-8 * want.matrix().amax().max(1.0),
                "plate sequence acts differently from its target"
            );
        }
    }
}

#[test]
fn quadrature_relabel_preserves_entanglement() {
    let mut r = rng(25);
    for _ in 0..200 {
        let cm = random_state(&mut r);
        let swapped = quadrature_relabel(&cm).unwrap();
        let a = log_negativity(&cm).unwrap();
        let b = log_negativity(&swapped).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.max(1.0));
    }
}

#[test]
fn homodyne_variance_is_positive_and_pi_periodic() {
    let mut r = rng(26);
    for _ in 0..100 {
        let cm = random_state(&mut r);
        for mode in 0..2 {
            for i in 0..16 {
                let phase = i as f64 * std::f64::consts::PI / 8.0;
                let v = homodyne_variance(&cm, mode, phase).unwrap();
                assert!(v > 0.0);
                let w = homodyne_variance(&cm, mode, phase + std::f64::consts::PI).unwrap();
                assert!((v - w).abs() <= 1e-10 * v);
            }
        }
    }
}

#[test]
fn perturbations_report_unphysical_rather_than_failing() {
    use twomode::metrology::{perturb, EntrySet, PerturbationSpec, PerturbedBlock};
    let base = twomode::presets::squeezed_pair();
    for i in 0..60 {
        let delta = 0.01 * i as f64;
        let spec = PerturbationSpec::new(PerturbedBlock::DiagonalBlocks, EntrySet::All, delta);
        let (cm, phys) = perturb(&base, &spec).unwrap();
        // Whatever the verdict, the perturbed matrix itself is well formed
        // and the flag agrees with a fresh physicality check.
        assert_eq!(
            phys.is_physical(),
            matches!(validate_physical(&cm), Physicality::Physical)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cm_text_round_trips(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let cm = random_state(&mut r);
        let text = format_cm(&cm, &["round trip".into()]);
        let loaded = parse_cm(&text).unwrap();
        prop_assert!(!loaded.asymmetry_exceeds_threshold());
        prop_assert_eq!(loaded.cm.matrix(), cm.matrix());
    }

    #[test]
    fn coupled_state_is_physical_for_any_tilt(a in 1.0f64..20.0, theta in -10.0f64..10.0) {
        let p = CoupledStateParams { a, theta };
        let cm = coupled_cm_entangled_basis(&p).unwrap();
        prop_assert!(validate_physical(&cm).is_physical());
        let analytic = nu_tilde_sq_analytic(&p).unwrap();
        let (minus, _) = nu_tilde(&cm).unwrap();
        prop_assert!((minus * minus - analytic).abs() <= 1e-9 * analytic.max(1.0));
    }
}
