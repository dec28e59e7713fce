use super::anchor::select_anchor;
use super::matching::match_local;
use crate::error::Result;
use crate::model::{anchor_then_sources, FusionConfig, FusionResult, MatchResult, TokenGrid};

/// Retention mask `[F][N]`.
///
/// Anchor rows are always kept. A source position is kept when any batch
/// element's best similarity is `<= threshold`; it is fused only when every
/// element clears the threshold.
pub fn gate(matches: &MatchResult, threshold: f32) -> Vec<bool> {
    let shape = matches.shape();
    let n = shape.tokens_per_frame();
    let t = threshold as f64;
    let mut keep = vec![true; shape.tokens_per_clip()];
    for (k, i) in matches.source_positions() {
        keep[k * n + i] = matches.sims_at(k, i).iter().any(|&s| s <= t);
    }
    keep
}

/// Runs anchor selection, local matching and gating, then gathers the kept
/// tokens and their original position triples.
pub fn compress(grid: &TokenGrid, config: &FusionConfig) -> Result<FusionResult> {
    compress_detailed(grid, config).map(|(result, _)| result)
}

/// [`compress`], also returning the underlying [`MatchResult`].
pub fn compress_detailed(
    grid: &TokenGrid,
    config: &FusionConfig,
) -> Result<(FusionResult, MatchResult)> {
    let shape = *grid.shape();
    config.check_for_frames(shape.frames)?;
    let anchor = select_anchor(grid, config.anchor)?;
    let matches = match_local(grid, anchor, config.radius)?;
    let keep = gate(&matches, config.threshold);
    let positions = anchor_then_sources(&shape, anchor, &keep);

    let w = shape.width;
    let mut tokens = Vec::with_capacity(shape.batch * positions.len() * shape.channels);
    for b in 0..shape.batch {
        for p in &positions {
            let i = p.y as usize * w + p.x as usize;
            tokens.extend_from_slice(grid.token(b, p.k as usize, i));
        }
    }

    let result = FusionResult {
        shape,
        anchor,
        keep,
        dst: matches.dst_map().to_vec(),
        positions,
        tokens,
    };
    Ok((result, matches))
}
