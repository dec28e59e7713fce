//! Shared data model: token grids, fusion knobs and result containers.

mod config;
mod grid;
mod result;

pub use config::{AnchorStrategy, FusionConfig, ParseAnchorError};
pub use grid::{flat_index, validate_grid, GridShape, PositionTriple, TokenGrid};
pub(crate) use result::anchor_then_sources;
pub use result::{
    reduction_ratio, DecodePlan, FusionInvariantError, FusionResult, MatchInvariantError,
    MatchResult, Offset,
};
