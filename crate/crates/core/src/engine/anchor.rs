use super::similarity::cosine_f64;
use crate::error::{Error, Result};
use crate::model::{AnchorStrategy, TokenGrid};

/// Picks the anchor frame.
///
/// `Auto` scores frame `k` by the cosine between its spatially averaged token
/// and the clip-wide mean token, averaged over the batch, and returns the
/// highest-scoring frame (smallest index on ties). Runs in `O(F·N·C)`.
pub fn select_anchor(grid: &TokenGrid, strategy: AnchorStrategy) -> Result<usize> {
    let shape = grid.shape();
    if let Some(anchor) = strategy.fixed_index(shape.frames) {
        if anchor >= shape.frames {
            return Err(Error::InvalidAnchor {
                anchor,
                frames: shape.frames,
            });
        }
        return Ok(anchor);
    }

    let (f, n, c) = (shape.frames, shape.tokens_per_frame(), shape.channels);
    let mut scores = vec![0.0f64; f];
    for b in 0..shape.batch {
        let frame_means: Vec<Vec<f64>> = (0..f)
            .map(|k| {
                let mut mean = vec![0.0f64; c];
                for token in grid.frame(b, k).chunks_exact(c) {
                    for (m, &v) in mean.iter_mut().zip(token) {
                        *m += v as f64;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= n as f64);
                mean
            })
            .collect();
        let mut global = vec![0.0f64; c];
        for mean in &frame_means {
            for (g, &m) in global.iter_mut().zip(mean) {
                *g += m;
            }
        }
        global.iter_mut().for_each(|g| *g /= f as f64);

        for (k, mean) in frame_means.iter().enumerate() {
            let cos = cosine_f64(mean, &global).ok_or_else(|| Error::ZeroNormFrameMean {
                what: if global.iter().all(|&g| g == 0.0) {
                    format!("the whole clip (batch element {b})")
                } else {
                    format!("frame {k} (batch element {b})")
                },
            })?;
            scores[k] += cos;
        }
    }

    let mut best = 0;
    for k in 1..f {
        if scores[k] > scores[best] {
            best = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GridShape;

    fn grid(f: usize, h: usize, w: usize, c: usize, data: Vec<f32>) -> TokenGrid {
        TokenGrid::new(GridShape::new(1, f, h, w, c).unwrap(), data).unwrap()
    }

    #[test]
    fn fixed_strategies() {
        let g = grid(4, 1, 1, 1, vec![1.0; 4]);
        assert_eq!(select_anchor(&g, AnchorStrategy::First).unwrap(), 0);
        assert_eq!(select_anchor(&g, AnchorStrategy::Last).unwrap(), 3);
        assert_eq!(select_anchor(&g, AnchorStrategy::Explicit(2)).unwrap(), 2);
        assert!(matches!(
            select_anchor(&g, AnchorStrategy::Explicit(4)),
            Err(Error::InvalidAnchor {
                anchor: 4,
                frames: 4
            })
        ));
    }

    #[test]
    fn identical_frames_pick_first() {
        let frame = [0.2f32, -0.4, 1.0, 0.3, 0.9, 0.1];
        let data = frame.repeat(3);
        let g = grid(3, 1, 3, 2, data);
        assert_eq!(select_anchor(&g, AnchorStrategy::Auto).unwrap(), 0);
    }

    #[test]
    fn auto_picks_frame_aligned_with_clip_mean() {
        // Frame means (1,0), (0,1), (2,2): the clip mean lies on the diagonal.
        let g = grid(3, 1, 1, 2, vec![1.0, 0.0, 0.0, 1.0, 2.0, 2.0]);
        assert_eq!(select_anchor(&g, AnchorStrategy::Auto).unwrap(), 2);
    }

    #[test]
    fn zero_clip_mean_is_an_error() {
        let g = grid(2, 1, 1, 2, vec![1.0, 0.0, -1.0, 0.0]);
        assert!(matches!(
            select_anchor(&g, AnchorStrategy::Auto),
            Err(Error::ZeroNormFrameMean { .. })
        ));
    }

    #[test]
    fn zero_frame_mean_is_an_error() {
        let g = grid(2, 1, 2, 1, vec![1.0, -1.0, 1.0, 1.0]);
        assert!(matches!(
            select_anchor(&g, AnchorStrategy::Auto),
            Err(Error::ZeroNormFrameMean { .. })
        ));
    }
}
