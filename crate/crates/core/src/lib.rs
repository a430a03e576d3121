//! Evaluation and tooling for pixel-level text segmentation in comics.

pub mod error;
pub mod io;
pub mod loss;
pub mod mask;
pub mod matching;
pub mod metrics;
pub mod postprocess;
pub mod synth;

pub use error::{Error, Result};
pub use mask::{BinaryMask, ClassMask, LabelMap, ProbMap, TextClass};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/masks.md")]
    mod masks {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/postprocess.md")]
    mod postprocess {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/losses.md")]
    mod losses {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
