//! Matching cost model: local window search against global matrix matching.
//!
//! Counting convention: a `C`-dimensional cosine with precomputed norms costs
//! `2C` flops (multiply and add counted separately). Every token's norm is
//! computed once at `2C` flops. Figures are per batch element.

use serde::{Deserialize, Serialize};

use crate::model::GridShape;

/// Tag stored in every [`CostReport`].
pub const CONVENTION: &str =
    "2C flops per cosine with precomputed norms; +2C per token for norms; per batch element";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    LocalWindow { radius: usize },
    GlobalMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub scheme: Scheme,
    /// Source-to-anchor token comparisons, before any border deduplication.
    pub comparisons: u64,
    /// Total estimated flops, `comparisons·2C + normalization_flops`.
    pub flops: u64,
    /// Norm precomputation, `F·N·2C`.
    pub normalization_flops: u64,
    pub convention: String,
}

impl CostReport {
    /// Flops spent on comparisons alone.
    pub fn matching_flops(&self) -> u64 {
        self.flops - self.normalization_flops
    }
}

pub fn estimate_cost(shape: &GridShape, scheme: Scheme) -> CostReport {
    let f = shape.frames as u64;
    let n = shape.tokens_per_frame() as u64;
    let c = shape.channels as u64;
    let per_source_token = match scheme {
        Scheme::LocalWindow { radius } => (2 * radius as u64 + 1).pow(2),
        Scheme::GlobalMatrix => n,
    };
    let comparisons = f.saturating_sub(1) * n * per_source_token;
    let normalization_flops = f * n * 2 * c;
    CostReport {
        scheme,
        comparisons,
        flops: comparisons * 2 * c + normalization_flops,
        normalization_flops,
        convention: CONVENTION.to_owned(),
    }
}
