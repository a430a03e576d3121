//! Clean-up of raw prediction masks.
//!
//! [`remove_noise`] drops small blobs that are not close to a confident
//! detection; [`expand_partial`] grows partially detected characters to the
//! full character found by local thresholding of the page.

mod expand;
mod noise;
mod threshold;

pub use expand::{expand_partial, ExpandParams};
pub use noise::{remove_noise, NoiseParams};
pub use threshold::{adaptive_threshold, gaussian_kernel, gaussian_sigma};
