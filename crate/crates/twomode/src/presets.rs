//! Ready-made covariance matrices used in tests, benchmarks and the CLI
//! docs. Both are stated in the basis of the +-45 degree (squeezed) modes;
//! apply a balanced beam splitter to move to the entangled-mode basis.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::state::{CovarianceMatrix, TwoModeBlocks};

/// A clean squeezed-mode pair: both modes squeezed to 0.33 shot-noise units
/// (anti-squeezing 7.94) on orthogonal quadratures, no cross-correlations.
/// Mixing on a balanced beam splitter yields about 1.6 bits of logarithmic
/// negativity.
pub fn squeezed_pair() -> CovarianceMatrix {
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.33, 7.94, 7.94, 0.33]));
    CovarianceMatrix::new(m).expect("diagonal matrix is a valid covariance matrix")
}

/// The same source degraded by mode coupling: the second mode's squeezing
/// ellipse is tilted, so its block is no longer diagonal. Values as measured
/// (rounded to two decimals), which leaves the state slightly off pure.
pub fn tilted_pair() -> CovarianceMatrix {
    let blocks = TwoModeBlocks {
        alpha: Matrix2::new(0.4, 0.0, 0.0, 12.59),
        beta: Matrix2::new(9.54, -5.28, -5.28, 3.45),
        gamma: Matrix2::zeros(),
    };
    blocks.assemble()
}
