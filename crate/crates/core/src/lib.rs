//! Nonequispaced fast Fourier transform.
//!
//! Evaluates `f̂_j = Σ_n f_n e^{-2πi n·k_j}` (direct) and
//! `y_n = Σ_j f̂_j e^{+2πi n·k_j}` (adjoint) for `n ∈ [-N/2, N/2)^D` and
//! arbitrary nodes `k_j` on the torus, using a Kaiser-Bessel window on an
//! oversampled grid.
//!
//! ```
//! use nfft::{NfftPlan, PlanOptions};
//! use num_complex::Complex64;
//!
//! let nodes = [0.1, -0.25, 0.4];
//! let mut plan = NfftPlan::new(&nodes, &[16], 6, 2.0, PlanOptions::default()).unwrap();
//! let f = vec![Complex64::new(1.0, 0.0); 16];
//! let fhat = plan.direct(&f).unwrap();
//! assert_eq!(fhat.len(), 3);
//! ```

pub mod deconvolve;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod oracle;
pub mod plan;
pub mod precompute;
pub mod resample;
pub mod window;

pub use error::{NfftError, Result};
pub use fft::FftEffort;
pub use geometry::{NodeSet, TransformGeometry};
pub use oracle::{ndft_adjoint, ndft_direct, relative_error, ErrorReport, TransformKind};
pub use plan::{nfft_oneshot_adjoint, nfft_oneshot_direct, NfftPlan, PlanOptions, StageTimings};
pub use precompute::{linear_table_size, PrecomputeKind};
pub use window::KaiserBesselWindow;

pub use num_complex::Complex64;
