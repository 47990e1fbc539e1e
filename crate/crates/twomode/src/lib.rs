//! Covariance-matrix toolkit for two-mode Gaussian states of light.
//!
//! The crate covers the full workflow around beam-splitter-generated
//! entanglement:
//!
//! * covariance matrices, physicality, thermal/squeezed state constructors
//!   ([`state`]);
//! * symplectic transformations, the symplectic spectrum, Williamson and
//!   standard-form reductions, partial transposition ([`symplectic`]);
//! * entanglement tests and measures: PPT, negativities, entanglement of
//!   formation ([`entanglement`]);
//! * a model family for squeezed modes with a tilted squeezing ellipse
//!   ([`coupling`]);
//! * entanglement optimization over passive transforms, with a
//!   quarter-half-quarter waveplate realization ([`passive`]);
//! * error-sensitivity sweeps and a homodyne measurement simulator
//!   ([`metrology`]).
//!
//! # Conventions
//!
//! Quadratures are ordered `(x1, p1, x2, p2)` and normalized to vacuum
//! variance 1 (`x = a + a^dag`), so physicality reads
//! `Gamma + i Omega >= 0` with `Omega = diag([[0,1],[-1,0]], ...)`.
//! Transforms act by congruence `Gamma -> S^T Gamma S`, entanglement is
//! measured in bits (base-2 logarithms), and noise levels in dB are
//! `10 log10` of shot-noise-normalized variances.

pub mod coupling;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod metrology;
pub mod passive;
pub mod presets;
pub mod state;
pub mod symplectic;

mod simplex;

pub use error::{Error, Result};

pub use state::{
    purity, squeezed_thermal_state, thermal_fock_distribution, thermal_state, validate_physical,
    CovarianceMatrix, Physicality, SymplecticForm, ThermalSpectrum, TwoModeBlocks,
};

pub use symplectic::{
    apply, beam_splitter, embed, partial_transpose, phase_shift, single_mode_squeezer,
    standard_form, symplectic_spectrum, two_mode_squeezer, williamson, StandardForm,
    SymplecticTransform,
};

pub use entanglement::{
    analyze, entanglement_of_formation, log_negativity, negativity, nu_tilde, ppt_separable,
    EntanglementReport,
};

pub use passive::{optimize_passive, passive_bound, waveplate_decomposition, PassiveCorrection,
    WaveplateSequence};
