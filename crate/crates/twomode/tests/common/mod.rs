//! Random-state and random-transform generators shared by the integration
//! test targets.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use twomode::passive::{passive_transform, PassiveParams};
use twomode::state::{thermal_state, CovarianceMatrix};
use twomode::symplectic::{apply, embed, single_mode_squeezer, SymplecticTransform};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_passive(rng: &mut StdRng) -> SymplecticTransform {
    passive_transform(&PassiveParams {
        phase_in: rng.gen_range(0.0..std::f64::consts::PI),
        beam_splitter_angle: rng.gen_range(0.0..std::f64::consts::PI),
        phase_out_1: rng.gen_range(0.0..std::f64::consts::PI),
        phase_out_2: rng.gen_range(0.0..std::f64::consts::PI),
    })
}

/// Generic two-mode symplectic: passive, then independent single-mode
/// squeezers, then another passive. Every symplectic factors this way, so
/// sampling the pieces samples the whole group.
pub fn random_symplectic(rng: &mut StdRng) -> SymplecticTransform {
    let k1 = random_passive(rng);
    let k2 = random_passive(rng);
    let sq = embed(&single_mode_squeezer(rng.gen_range(-1.2..1.2)), &[0], 2)
        .unwrap()
        .then(&embed(&single_mode_squeezer(rng.gen_range(-1.2..1.2)), &[1], 2).unwrap())
        .unwrap();
    k1.then(&sq).unwrap().then(&k2).unwrap()
}

/// Random physical state: a thermal pair pushed through a random symplectic.
pub fn random_state(rng: &mut StdRng) -> CovarianceMatrix {
    let nus = [rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0)];
    let thermal = thermal_state(&nus).unwrap();
    apply(&random_symplectic(rng), &thermal).unwrap()
}
