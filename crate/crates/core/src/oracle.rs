//! Brute-force reference matchers.
//!
//! These are plain nested loops that share nothing with [`crate::engine`]
//! except the data model. They exist to check the engine, not to be fast.

use crate::error::{Error, Result};
use crate::model::{MatchResult, Offset, TokenGrid};

#[allow(clippy::needless_range_loop)]
fn pair_cosine(grid: &TokenGrid, b: usize, k: usize, i: usize, a: usize, j: usize) -> f64 {
    let u = grid.token(b, k, i);
    let v = grid.token(b, a, j);
    let mut dot = 0.0f64;
    let mut nu = 0.0f64;
    let mut nv = 0.0f64;
    for c in 0..u.len() {
        dot += u[c] as f64 * v[c] as f64;
    }
    for c in 0..u.len() {
        nu += u[c] as f64 * u[c] as f64;
    }
    for c in 0..v.len() {
        nv += v[c] as f64 * v[c] as f64;
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        (dot / (nu * nv).sqrt()).clamp(-1.0, 1.0)
    }
}

fn batch_sims(grid: &TokenGrid, k: usize, i: usize, a: usize, j: usize) -> (f64, Vec<f64>) {
    let sims: Vec<f64> = (0..grid.shape().batch)
        .map(|b| pair_cosine(grid, b, k, i, a, j))
        .collect();
    let mut sum = 0.0;
    for s in &sims {
        sum += s;
    }
    (sum / sims.len() as f64, sims)
}

fn check_anchor(grid: &TokenGrid, anchor: usize) -> Result<()> {
    let frames = grid.shape().frames;
    if anchor >= frames {
        return Err(Error::InvalidAnchor { anchor, frames });
    }
    Ok(())
}

fn assemble(
    grid: &TokenGrid,
    anchor: usize,
    mut best: impl FnMut(usize, usize) -> (usize, Vec<f64>),
) -> MatchResult {
    let shape = *grid.shape();
    let (h, w) = (shape.height, shape.width);
    let mut sims = Vec::new();
    let mut dst = Vec::new();
    let mut offsets = Vec::new();
    for k in 0..shape.frames {
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let (j, s) = if k == anchor {
                    (i, vec![1.0; shape.batch])
                } else {
                    best(k, i)
                };
                sims.extend(s);
                dst.push(j as u32);
                offsets.push(Offset::new(
                    (j / w) as i32 - y as i32,
                    (j % w) as i32 - x as i32,
                ));
            }
        }
    }
    MatchResult::from_parts(shape, anchor, sims, dst, offsets)
        .expect("oracle output satisfies MatchResult invariants")
}

/// Reference windowed matcher: rings of growing Chebyshev radius, row-major
/// inside each ring, first visit of each clipped anchor index only, strict
/// improvement required to replace the incumbent.
pub fn brute_force_window(grid: &TokenGrid, anchor: usize, radius: usize) -> Result<MatchResult> {
    check_anchor(grid, anchor)?;
    let shape = *grid.shape();
    let (h, w) = (shape.height as i64, shape.width as i64);
    let r = radius as i64;
    Ok(assemble(grid, anchor, |k, i| {
        let y = (i / shape.width) as i64;
        let x = (i % shape.width) as i64;
        let mut visited: Vec<usize> = Vec::new();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for ring in 0..=r {
            for dy in -r..=r {
                for dx in -r..=r {
                    if dy.abs().max(dx.abs()) != ring {
                        continue;
                    }
                    let ty = (y + dy).max(0).min(h - 1);
                    let tx = (x + dx).max(0).min(w - 1);
                    let j = (ty * w + tx) as usize;
                    if visited.contains(&j) {
                        continue;
                    }
                    visited.push(j);
                    let (mean, sims) = batch_sims(grid, k, i, anchor, j);
                    let better = match &best {
                        None => true,
                        Some((m, _, _)) => mean > *m,
                    };
                    if better {
                        best = Some((mean, j, sims));
                    }
                }
            }
        }
        let (_, j, sims) = best.expect("window is never empty");
        (j, sims)
    }))
}

/// Reference global matcher: every source token against all `N` anchor tokens,
/// smallest anchor index on ties.
pub fn brute_force_global(grid: &TokenGrid, anchor: usize) -> Result<MatchResult> {
    check_anchor(grid, anchor)?;
    let n = grid.shape().tokens_per_frame();
    Ok(assemble(grid, anchor, |k, i| {
        let (mut best_mean, mut best_sims) = batch_sims(grid, k, i, anchor, 0);
        let mut best_j = 0;
        for j in 1..n {
            let (mean, sims) = batch_sims(grid, k, i, anchor, j);
            if mean > best_mean {
                best_mean = mean;
                best_j = j;
                best_sims = sims;
            }
        }
        (best_j, best_sims)
    }))
}

/// Outcome of comparing an engine [`MatchResult`] against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Source positions compared (`(F-1)·N`).
    pub positions: usize,
    /// Positions whose dst or offset differ and are not explained by a tie.
    pub index_mismatches: usize,
    /// Positions whose dst differs but whose similarities agree within the
    /// tie tolerance. Always zero when ties are not allowed.
    pub tie_mismatches: usize,
    /// First position counted in `index_mismatches`.
    pub first_mismatch: Option<(usize, usize)>,
    /// Largest per-element `|Δŝ|` over source positions.
    pub max_sim_delta: f64,
}

impl Comparison {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.index_mismatches == 0 && self.max_sim_delta <= tolerance
    }
}

/// Compares source positions of two match results over the same grid.
///
/// With `tie_tolerance = Some(tol)`, a dst disagreement whose similarities
/// agree within `tol` for every batch element is counted as a tie rather
/// than a mismatch.
///
/// Panics if the two results describe different grids or anchors.
pub fn compare(
    engine: &MatchResult,
    reference: &MatchResult,
    tie_tolerance: Option<f64>,
) -> Comparison {
    assert_eq!(engine.shape(), reference.shape(), "shape mismatch");
    assert_eq!(engine.anchor(), reference.anchor(), "anchor mismatch");
    let mut out = Comparison {
        positions: 0,
        index_mismatches: 0,
        tie_mismatches: 0,
        first_mismatch: None,
        max_sim_delta: 0.0,
    };
    for (k, i) in engine.source_positions() {
        out.positions += 1;
        let delta = engine
            .sims_at(k, i)
            .iter()
            .zip(reference.sims_at(k, i))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        out.max_sim_delta = out.max_sim_delta.max(delta);
        let same_index = engine.dst(k, i) == reference.dst(k, i)
            && engine.best_offset(k, i) == reference.best_offset(k, i);
        if same_index {
            continue;
        }
        match tie_tolerance {
            Some(tol) if delta <= tol => out.tie_mismatches += 1,
            _ => {
                out.index_mismatches += 1;
                out.first_mismatch.get_or_insert((k, i));
            }
        }
    }
    out
}
