//! Forward model shared by every solver: centered FFT, `E = M F S`, and
//! calibration-based coil sensitivity estimation.

mod csm;
mod encoding;
mod fft;

pub use csm::{estimate_csm, estimate_csm_masked, CsmEstimate, CSM_SUPPORT_THRESHOLD};
pub use encoding::EncodingOperator;
pub use fft::{fft2c, ifft2c, Fft2c};
