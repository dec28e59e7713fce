//! The fusion pipeline: anchor selection, clipped local-window matching,
//! threshold gating, compression with position gathering, and decode offsets.

mod anchor;
mod compress;
mod decode;
mod matching;
mod similarity;
mod window;

pub use anchor::select_anchor;
pub use compress::{compress, compress_detailed, gate};
pub use decode::{decode_plan, decode_position, decode_positions, plan_for};
pub use matching::match_local;
pub use similarity::cosine;
pub use window::{
    effective_offset, project_offset, window_candidates, Candidate, OffsetEnumeration,
};

use crate::model::MatchResult;

/// Number of equal-width bins over `[-1, 1]` in [`similarity_histogram`].
pub const HISTOGRAM_BINS: usize = 32;

/// Histogram of best-match similarities over every source position and batch
/// element. The top bin is closed at `1.0`.
pub fn similarity_histogram(matches: &MatchResult) -> [u64; HISTOGRAM_BINS] {
    let mut bins = [0u64; HISTOGRAM_BINS];
    for (k, i) in matches.source_positions() {
        for &s in matches.sims_at(k, i) {
            let idx = ((s + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor() as usize;
            bins[idx.min(HISTOGRAM_BINS - 1)] += 1;
        }
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GridShape, Offset};

    #[test]
    fn histogram_bins_edges() {
        let shape = GridShape::new(1, 2, 1, 4, 1).unwrap();
        let m = MatchResult::from_parts(
            shape,
            0,
            vec![1.0, 1.0, 1.0, 1.0, -1.0, 0.0, 0.999, 1.0],
            vec![0, 1, 2, 3, 0, 1, 2, 3],
            vec![Offset::ZERO; 8],
        )
        .unwrap();
        let h = similarity_histogram(&m);
        assert_eq!(h.iter().sum::<u64>(), 4);
        assert_eq!(h[0], 1);
        assert_eq!(h[16], 1);
        assert_eq!(h[31], 2);
    }
}
