//! Training-free temporal token fusion for video visual-token grids.
//!
//! Consecutive video frames repeat most of their content. This crate picks an
//! anchor frame, matches every token of the other frames against a small
//! window of anchor tokens around the same spatial position, and drops the
//! tokens whose best match clears a cosine threshold. Surviving tokens keep
//! their original `(frame, row, column)` coordinates so a downstream language
//! model sees consistent rotary positions.
//!
//! ```
//! use ttf_core::{compress, AnchorStrategy, FusionConfig, GridShape, TokenGrid};
//!
//! // Two identical 2x2 frames with 3 channels.
//! let frame = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
//! let shape = GridShape::new(1, 2, 2, 2, 3)?;
//! let grid = TokenGrid::new(shape, frame.repeat(2))?;
//!
//! let config = FusionConfig::new(0.9, 1, AnchorStrategy::First)?;
//! let fused = compress(&grid, &config)?;
//! assert_eq!(fused.kept_len(), 4);
//! assert_eq!(fused.rho(), 0.5);
//! # Ok::<(), ttf_core::Error>(())
//! ```
//!
//! The guide under `book/` walks through each stage; its snippets are
//! compiled as doctests of this crate.

pub mod cost;
pub mod engine;
mod error;
pub mod format;
pub mod model;
pub mod oracle;
pub mod synth;

pub use cost::{estimate_cost, CostReport, Scheme};
pub use engine::{
    compress, compress_detailed, decode_plan, decode_position, gate, match_local, project_offset,
    select_anchor, OffsetEnumeration,
};
pub use error::{Error, Result};
pub use model::{
    flat_index, validate_grid, AnchorStrategy, DecodePlan, FusionConfig, FusionResult, GridShape,
    MatchResult, Offset, PositionTriple, TokenGrid,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/token-grids.md")]
    mod token_grids {}
    #[doc = include_str!("../../../book/src/anchor-selection.md")]
    mod anchor_selection {}
    #[doc = include_str!("../../../book/src/window-matching.md")]
    mod window_matching {}
    #[doc = include_str!("../../../book/src/gating.md")]
    mod gating {}
    #[doc = include_str!("../../../book/src/positions.md")]
    mod positions {}
    #[doc = include_str!("../../../book/src/cost-model.md")]
    mod cost_model {}
    #[doc = include_str!("../../../book/src/synthetic-clips.md")]
    mod synthetic_clips {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
}
