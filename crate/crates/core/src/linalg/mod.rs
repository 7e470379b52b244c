//! Matrix-level oracles for the closed-form bounds: exact covariance
//! builders, the determinant form of the deviation bound, tridiagonal
//! determinant recursions and continuant identities, the closed-form
//! eigenvalues of the perturbed inverse, and the spectral log-factor.
//!
//! Everything here is deliberately brute force. The point of this module
//! is to give the closed forms in [`crate::bounds`] something independent
//! to be checked against, so the implementations favor directness over
//! speed: dense factorizations, explicit recursions, entrywise residuals.
//!
//! Precision policy: dense determinants of the unstable covariance cancel
//! catastrophically in f64 (the matrix holds entries near `|a0|^{2N}` while
//! its pivots stay O(1)), so the factorization layer runs on 256-bit
//! floats. The tridiagonal-inverse residual only needs ~1e-8 and runs on
//! double-double arithmetic, which is allocation-free and much faster.

mod covariance;
mod determinants;
mod hp;
mod spectral;
mod tridiag;

pub use covariance::{build_covariance, inverse_identity_residual, CovKind, CovarianceMatrix};
pub use determinants::{det_quotient_monotonicity_check, exact_det_bound, toeplitz_logdets};
pub use spectral::{perturbed_tridiag_eigenvalues, szego_log_factor};
pub use tridiag::{
    continuant_closed_form, continuant_identity_lhs, tridiag_det_sequence, TridiagonalSpec,
};
