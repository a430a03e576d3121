//! Synthetic text overlays with exact pixel masks.

pub mod font;
pub mod fontgen;
pub mod rects;
pub mod textify;
pub mod wrap;

pub use font::{supports_char, CodepointPool, FontAsset, FontMeasurer, GlyphChecker};
pub use rects::{generate_rects, Rect};
pub use textify::{textify, Orientation, StyleDecision, TextifyConfig, TextifyOutput};
pub use wrap::{text_wrap_exact, text_wrap_fast, CharWidths, CountingMeasurer, TextMeasurer};
