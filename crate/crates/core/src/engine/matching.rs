use rayon::prelude::*;

use super::similarity::{cosine_from_parts, dot, squared_norms};
use super::window::{effective_offset, project_offset, OffsetEnumeration};
use crate::error::{Error, Result};
use crate::model::{MatchResult, Offset, TokenGrid};

/// Matches every source token against the clipped `(2r+1)^2` window of anchor
/// tokens around its own position.
///
/// Offsets are scanned in [`OffsetEnumeration`] order. Offsets that clip onto
/// an anchor index already reached are skipped, so each anchor token competes
/// once. The winner maximises the batch-mean cosine; the earliest candidate
/// wins ties. The reported offset is the displacement to the winning anchor
/// token.
///
/// Work is spread over the rayon pool per source position. Every output slot
/// depends only on its own inputs, so the result is schedule-independent.
pub fn match_local(grid: &TokenGrid, anchor: usize, radius: usize) -> Result<MatchResult> {
    let shape = *grid.shape();
    if anchor >= shape.frames {
        return Err(Error::InvalidAnchor {
            anchor,
            frames: shape.frames,
        });
    }
    let (bsz, f, n, c) = (
        shape.batch,
        shape.frames,
        shape.tokens_per_frame(),
        shape.channels,
    );
    let norms = squared_norms(grid);
    let enumeration = OffsetEnumeration::new(radius);
    let data = grid.data();
    let token = |b: usize, k: usize, i: usize| {
        let start = ((b * f + k) * n + i) * c;
        &data[start..start + c]
    };
    let norm = |b: usize, k: usize, i: usize| norms[(b * f + k) * n + i];

    let mut sims = vec![0.0f64; f * n * bsz];
    let mut dst = vec![0u32; f * n];
    let mut offsets = vec![Offset::ZERO; f * n];

    sims.par_chunks_mut(bsz)
        .zip(dst.par_iter_mut())
        .zip(offsets.par_iter_mut())
        .enumerate()
        .for_each_init(
            || Scratch::new(n, bsz),
            |scratch, (pos, ((out_sims, out_dst), out_offset))| {
                let (k, i) = (pos / n, pos % n);
                if k == anchor {
                    out_sims.fill(1.0);
                    *out_dst = i as u32;
                    *out_offset = Offset::ZERO;
                    return;
                }
                let stamp = scratch.next_stamp();
                let mut best_mean = f64::NEG_INFINITY;
                let mut best_j = i;
                for &offset in &enumeration {
                    let j = project_offset(i, offset, &shape);
                    if scratch.seen[j] == stamp {
                        continue;
                    }
                    scratch.seen[j] = stamp;

                    let mut sum = 0.0;
                    for b in 0..bsz {
                        let s = cosine_from_parts(
                            dot(token(b, k, i), token(b, anchor, j)),
                            norm(b, k, i),
                            norm(b, anchor, j),
                        );
                        scratch.current[b] = s;
                        sum += s;
                    }
                    let mean = sum / bsz as f64;
                    if mean > best_mean {
                        best_mean = mean;
                        best_j = j;
                        out_sims.copy_from_slice(&scratch.current);
                    }
                }
                *out_dst = best_j as u32;
                *out_offset = effective_offset(i, best_j, &shape);
            },
        );

    Ok(MatchResult::from_parts(shape, anchor, sims, dst, offsets)
        .expect("matcher output satisfies MatchResult invariants"))
}

struct Scratch {
    seen: Vec<u32>,
    stamp: u32,
    current: Vec<f64>,
}

impl Scratch {
    fn new(n: usize, batch: usize) -> Self {
        Self {
            seen: vec![0; n],
            stamp: 0,
            current: vec![0.0; batch],
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.stamp = 1;
        }
        self.stamp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GridShape;

    fn static_clip(f: usize, h: usize, w: usize, c: usize) -> TokenGrid {
        let n = h * w;
        let frame: Vec<f32> = (0..n * c)
            .map(|v| ((v * 37 % 11) as f32) - 5.0 + v as f32 * 0.01)
            .collect();
        TokenGrid::new(GridShape::new(1, f, h, w, c).unwrap(), frame.repeat(f)).unwrap()
    }

    #[test]
    fn static_clip_matches_in_place() {
        let g = static_clip(3, 4, 5, 6);
        let m = match_local(&g, 1, 1).unwrap();
        for k in 0..3 {
            for i in 0..20 {
                assert_eq!(m.dst(k, i), i);
                assert_eq!(m.best_offset(k, i), Offset::ZERO);
                assert_eq!(m.best_sim(0, k, i), 1.0);
            }
        }
    }

    #[test]
    fn radius_zero_maps_to_self() {
        let g = TokenGrid::new(
            GridShape::new(2, 2, 2, 3, 2).unwrap(),
            (0..48).map(|v| ((v * 7919) % 13) as f32 - 6.0).collect(),
        )
        .unwrap();
        let m = match_local(&g, 0, 0).unwrap();
        for i in 0..6 {
            assert_eq!(m.dst(1, i), i);
        }
    }

    #[test]
    fn rejects_bad_anchor() {
        let g = static_clip(2, 2, 2, 2);
        assert!(matches!(
            match_local(&g, 2, 1),
            Err(Error::InvalidAnchor {
                anchor: 2,
                frames: 2
            })
        ));
    }

    #[test]
    fn zero_token_never_scores_above_zero() {
        let mut data = vec![1.0f32; 2 * 4 * 2];
        data[8..10].fill(0.0); // frame 1, token 0
        let g = TokenGrid::new(GridShape::new(1, 2, 2, 2, 2).unwrap(), data).unwrap();
        let m = match_local(&g, 0, 1).unwrap();
        assert_eq!(m.best_sim(0, 1, 0), 0.0);
        assert_eq!(m.dst(1, 0), 0);
    }

    #[test]
    fn batch_mean_decides_shared_offset() {
        // Source token at index 0 of a 1x2 grid. Element 0 prefers anchor 1
        // strongly, element 1 prefers anchor 0 weakly; the mean picks anchor 1.
        let data = vec![
            // b0 anchor: [1,0], [0,1]; b0 source: [0,1], [1,1]
            1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0,
            // b1 anchor: [1,0], [1,1]; b1 source: [1,0.2], [1,1]
            1.0, 0.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0,
        ];
        let g = TokenGrid::new(GridShape::new(2, 2, 1, 2, 2).unwrap(), data).unwrap();
        let m = match_local(&g, 0, 1).unwrap();
        assert_eq!(m.dst(1, 0), 1);
        assert_eq!(m.best_offset(1, 0), Offset::new(0, 1));
        assert_eq!(m.best_sim(0, 1, 0), 1.0);
        let expected_b1 = 1.2 / (2.0f64.sqrt() * (1.0f64 + 0.2f32 as f64 * 0.2f32 as f64).sqrt());
        assert!((m.best_sim(1, 1, 0) - expected_b1).abs() < 1e-7);
    }
}
