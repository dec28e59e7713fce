use serde::{Deserialize, Serialize};

use super::grid::{GridShape, PositionTriple};

/// A spatial displacement `(dy, dx)` from a source position to an anchor position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Offset {
    pub dy: i32,
    pub dx: i32,
}

impl Offset {
    pub const ZERO: Offset = Offset { dy: 0, dx: 0 };

    pub const fn new(dy: i32, dx: i32) -> Self {
        Self { dy, dx }
    }

    /// Chebyshev length `max(|dy|, |dx|)`.
    pub fn ring(&self) -> u32 {
        self.dy.unsigned_abs().max(self.dx.unsigned_abs())
    }
}

/// Per-position best anchor match.
///
/// Similarities are indexed `(b, k, i)`; `dst` and offsets are shared across the
/// batch. Anchor-frame entries hold similarity `1.0`, offset zero and `dst = i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    shape: GridShape,
    anchor: usize,
    // [F][N][B]
    sims: Vec<f64>,
    dst: Vec<u32>,
    offsets: Vec<Offset>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent match result: {0}")]
pub struct MatchInvariantError(pub String);

impl MatchResult {
    /// Assembles a result from raw arrays. `sims` is laid out `[F][N][B]`.
    pub fn from_parts(
        shape: GridShape,
        anchor: usize,
        sims: Vec<f64>,
        dst: Vec<u32>,
        offsets: Vec<Offset>,
    ) -> Result<Self, MatchInvariantError> {
        let fnn = shape.tokens_per_clip();
        let n = shape.tokens_per_frame();
        if anchor >= shape.frames {
            return Err(MatchInvariantError(format!("anchor {anchor} out of range")));
        }
        if sims.len() != fnn * shape.batch || dst.len() != fnn || offsets.len() != fnn {
            return Err(MatchInvariantError(
                "array lengths do not match shape".into(),
            ));
        }
        if let Some(j) = dst.iter().position(|&d| d as usize >= n) {
            return Err(MatchInvariantError(format!(
                "dst[{j}] outside the anchor frame"
            )));
        }
        if let Some(j) = sims.iter().position(|s| !(-1.0..=1.0).contains(s)) {
            return Err(MatchInvariantError(format!(
                "similarity {} out of [-1, 1]",
                sims[j]
            )));
        }
        Ok(Self {
            shape,
            anchor,
            sims,
            dst,
            offsets,
        })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// `ŝ` for batch element `b` at source position `(k, i)`.
    #[inline]
    pub fn best_sim(&self, b: usize, k: usize, i: usize) -> f64 {
        self.sims[(k * self.shape.tokens_per_frame() + i) * self.shape.batch + b]
    }

    /// All batch similarities at `(k, i)`.
    #[inline]
    pub fn sims_at(&self, k: usize, i: usize) -> &[f64] {
        let b = self.shape.batch;
        let start = (k * self.shape.tokens_per_frame() + i) * b;
        &self.sims[start..start + b]
    }

    #[inline]
    pub fn dst(&self, k: usize, i: usize) -> usize {
        self.dst[k * self.shape.tokens_per_frame() + i] as usize
    }

    #[inline]
    pub fn best_offset(&self, k: usize, i: usize) -> Offset {
        self.offsets[k * self.shape.tokens_per_frame() + i]
    }

    /// Flat `[F][N]` dst map.
    pub fn dst_map(&self) -> &[u32] {
        &self.dst
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    /// Raw similarities laid out `[F][N][B]`.
    pub fn raw_sims(&self) -> &[f64] {
        &self.sims
    }

    /// Source positions `(k, i)` with `k != anchor`, ascending.
    pub fn source_positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.shape.tokens_per_frame();
        (0..self.shape.frames)
            .filter(move |&k| k != self.anchor)
            .flat_map(move |k| (0..n).map(move |i| (k, i)))
    }
}

/// Output of [`compress`](crate::engine::compress).
#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    pub(crate) shape: GridShape,
    pub(crate) anchor: usize,
    pub(crate) keep: Vec<bool>,
    pub(crate) dst: Vec<u32>,
    pub(crate) positions: Vec<PositionTriple>,
    pub(crate) tokens: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent fusion result: {0}")]
pub struct FusionInvariantError(pub String);

impl FusionResult {
    /// Rebuilds a result from its serialized parts, checking every invariant
    /// a result produced by the engine satisfies.
    pub fn from_parts(
        shape: GridShape,
        anchor: usize,
        keep: Vec<bool>,
        dst: Vec<u32>,
        positions: Vec<PositionTriple>,
        tokens: Vec<f32>,
    ) -> Result<Self, FusionInvariantError> {
        let err = |m: String| Err(FusionInvariantError(m));
        let n = shape.tokens_per_frame();
        let fnn = shape.tokens_per_clip();
        if anchor >= shape.frames {
            return err(format!("anchor {anchor} >= F={}", shape.frames));
        }
        if keep.len() != fnn || dst.len() != fnn {
            return err("keep mask or dst map length differs from F*N".into());
        }
        if let Some(j) = dst.iter().position(|&d| d as usize >= n) {
            return err(format!("dst entry {j} outside the anchor frame"));
        }
        if (0..n).any(|i| !keep[anchor * n + i]) {
            return err("anchor frame positions must all be kept".into());
        }
        if (0..n).any(|i| dst[anchor * n + i] as usize != i) {
            return err("anchor frame dst must be the identity".into());
        }
        let kept = keep.iter().filter(|&&m| m).count();
        if positions.len() != kept {
            return err(format!(
                "{} positions for {kept} kept tokens",
                positions.len()
            ));
        }
        if tokens.len() != shape.batch * kept * shape.channels {
            return err("token payload length differs from B*(N+P)*C".into());
        }
        let expected = anchor_then_sources(&shape, anchor, &keep);
        if positions.iter().ne(expected.iter()) {
            return err("position triples do not follow anchor-then-source order".into());
        }
        if tokens.iter().any(|v| !v.is_finite()) {
            return err("non-finite token value".into());
        }
        Ok(Self {
            shape,
            anchor,
            keep,
            dst,
            positions,
            tokens,
        })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Retention mask `[F][N]`.
    pub fn keep_mask(&self) -> &[bool] {
        &self.keep
    }

    pub fn is_kept(&self, k: usize, i: usize) -> bool {
        self.keep[k * self.shape.tokens_per_frame() + i]
    }

    /// Anchor flat index each position maps to, `[F][N]`.
    pub fn dst_map(&self) -> &[u32] {
        &self.dst
    }

    pub fn positions(&self) -> &[PositionTriple] {
        &self.positions
    }

    /// Compressed tokens `[B][N+P][C]`.
    pub fn tokens(&self) -> &[f32] {
        &self.tokens
    }

    /// Compressed token row `j` of batch element `b`.
    pub fn token(&self, b: usize, j: usize) -> &[f32] {
        let c = self.shape.channels;
        let start = (b * self.kept_len() + j) * c;
        &self.tokens[start..start + c]
    }

    /// Number of preserved source tokens `P`.
    pub fn preserved(&self) -> usize {
        self.positions.len() - self.shape.tokens_per_frame()
    }

    /// Compressed visual length `N + P`.
    pub fn kept_len(&self) -> usize {
        self.positions.len()
    }

    /// Source positions replaced by their anchor match.
    pub fn fused_count(&self) -> usize {
        self.shape.tokens_per_clip() - self.kept_len()
    }

    /// Reduction ratio `1 - (N + P) / (F * N)`.
    pub fn rho(&self) -> f64 {
        reduction_ratio(&self.shape, self.preserved())
    }
}

/// `1 - (N + P) / (F * N)`.
pub fn reduction_ratio(shape: &GridShape, preserved: usize) -> f64 {
    let total = shape.tokens_per_clip() as f64;
    1.0 - (shape.tokens_per_frame() + preserved) as f64 / total
}

/// Anchor triples in row-major order followed by kept source triples in
/// ascending `(k, i)` order.
pub(crate) fn anchor_then_sources(
    shape: &GridShape,
    anchor: usize,
    keep: &[bool],
) -> Vec<PositionTriple> {
    let n = shape.tokens_per_frame();
    let w = shape.width;
    let mut out = Vec::with_capacity(keep.iter().filter(|&&m| m).count());
    out.extend((0..n).map(|i| PositionTriple::new(anchor, i / w, i % w)));
    for k in (0..shape.frames).filter(|&k| k != anchor) {
        for i in 0..n {
            if keep[k * n + i] {
                out.push(PositionTriple::new(k, i / w, i % w));
            }
        }
    }
    out
}

/// Sequence bookkeeping for a prefill over the compressed visual tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodePlan {
    /// Text tokens in the prefill `T`.
    pub text_tokens: usize,
    /// Compressed visual length `L' = N + P`.
    pub visual_len: usize,
    /// Prefill length `L_pre = L' + T`.
    pub prefill_len: usize,
}
