//! Synthetic token videos with known redundancy.
//!
//! Frame 0 is a grid of random unit tokens that are pairwise nearly
//! orthogonal (`|cos| < 0.3`). Frame `k` shows that grid displaced by the
//! cumulative motion `D_k`. Cells uncovered by the motion are filled with
//! new tokens when `fresh_content` is set and with the nearest edge token
//! otherwise. Ground truth is stated against frame 0, so it describes a
//! `First`-anchored compression.
//!
//! Random numbers come from PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`) seeded as
//! `Pcg64::new(seed as u128, PCG_STREAM)`. A uniform draw is
//! `(next_u64 >> 11) · 2^-53`; a normal-like draw is the sum of 12 uniforms
//! minus 6. Only IEEE add, multiply, divide and sqrt are used, so output is
//! bit-identical on every platform.

use rand_core::RngCore;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GridShape, Offset, PositionTriple, TokenGrid};

/// Stream selector passed to `Pcg64::new`.
pub const PCG_STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

/// Upper bound on pairwise `|cos|` between distinct generated contents.
pub const SEPARATION: f64 = 0.3;

const RELAX_ITERS: usize = 2_000;
const STEP: f64 = 0.1;
// Margin below SEPARATION for rounding to f32.
const TARGET: f64 = 0.299;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    Static,
    /// Constant displacement `(dy, dx)` per frame step.
    Shift {
        dy: i32,
        dx: i32,
    },
    /// Each step moves by an independent uniform integer in `[-max_step, max_step]` per axis.
    RandomWalk {
        max_step: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub shape: GridShape,
    pub motion: Motion,
    pub fresh_content: bool,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Enforce the `|cos| < 0.3` separation. When off,
    /// tokens are plain random unit vectors.
    pub separated: bool,
}

impl SynthSpec {
    pub fn new(shape: GridShape, motion: Motion, seed: u64) -> Self {
        Self {
            shape,
            motion,
            fresh_content: false,
            noise_sigma: 0.0,
            seed,
            separated: true,
        }
    }

    fn check(&self) -> Result<()> {
        self.shape.check()?;
        let limit = self.shape.height.min(self.shape.width) as i64 - 1;
        let bad = match self.motion {
            Motion::Static => false,
            Motion::Shift { dy, dx } => (dy as i64).abs() > limit || (dx as i64).abs() > limit,
            Motion::RandomWalk { max_step } => max_step as i64 > limit,
        };
        if bad {
            return Err(Error::InfeasibleSpec(format!(
                "per-step motion exceeds min(H, W) - 1 = {limit}"
            )));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InfeasibleSpec(format!(
                "noise sigma {} must be finite and non-negative",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// What the generator knows about each position relative to frame 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub schema: u32,
    pub reference_frame: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    /// Cumulative displacement of each frame's content.
    pub displacements: Vec<Offset>,
    /// Every position of frames `1..F`, ascending `(k, y, x)`.
    pub positions: Vec<TruthEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub k: usize,
    pub y: usize,
    pub x: usize,
    /// Content also appears in frame 0.
    pub fusable: bool,
    /// Displacement to that frame-0 position, when fusable.
    pub offset: Option<Offset>,
}

impl GroundTruth {
    pub fn entry(&self, k: usize, i: usize) -> &TruthEntry {
        assert!(k >= 1 && k < self.frames);
        let n = self.height * self.width;
        &self.positions[(k - 1) * n + i]
    }

    pub fn non_fusable(&self) -> Vec<PositionTriple> {
        self.positions
            .iter()
            .filter(|e| !e.fusable)
            .map(|e| PositionTriple::new(e.k, e.y, e.x))
            .collect()
    }

    /// Largest Chebyshev length of any fusable offset; a matching radius at
    /// least this large can reach every fusable token's source.
    pub fn max_offset(&self) -> usize {
        self.positions
            .iter()
            .filter_map(|e| e.offset)
            .map(|o| o.ring() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthClip {
    pub grid: TokenGrid,
    pub truth: GroundTruth,
}

struct Sampler(Pcg64);

impl Sampler {
    fn new(seed: u64) -> Self {
        Self(Pcg64::new(seed as u128, PCG_STREAM))
    }

    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        let mut sum = 0.0;
        for _ in 0..12 {
            sum += self.uniform();
        }
        sum - 6.0
    }

    /// Uniform integer in `[-m, m]`.
    fn step(&mut self, m: u32) -> i32 {
        let span = 2 * m as u64 + 1;
        (self.0.next_u64() % span) as i32 - m as i32
    }

    fn unit_vector(&mut self, c: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..c).map(|_| self.normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// `n` unit vectors with pairwise `|cos|` below [`SEPARATION`].
    ///
    /// Starts from random directions and relaxes them with a repulsion step
    /// `v_i -= η Σ_j g_ij (|g_ij| / g_max)^14 v_j`, which concentrates on
    /// the closest pairs.
    fn separated_set(&mut self, n: usize, c: usize, enforce: bool) -> Result<Vec<Vec<f64>>> {
        let mut set: Vec<Vec<f64>> = (0..n).map(|_| self.unit_vector(c)).collect();
        if !enforce || n < 2 {
            return Ok(set);
        }
        let mut gram = vec![0.0f64; n * n];
        for _ in 0..RELAX_ITERS {
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..i {
                    let g = dot(&set[i], &set[j]);
                    gram[i * n + j] = g;
                    gram[j * n + i] = g;
                    worst = worst.max(g.abs());
                }
            }
            if worst < TARGET {
                return Ok(set);
            }
            let next: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut v = set[i].clone();
                    for j in (0..n).filter(|&j| j != i) {
                        let g = gram[i * n + j];
                        let w = STEP * g * focus(g.abs() / worst);
                        for (a, &b) in v.iter_mut().zip(&set[j]) {
                            *a -= w * b;
                        }
                    }
                    normalize(v)
                })
                .collect();
            set = next;
        }
        Err(Error::InfeasibleSpec(format!(
            "could not place {n} tokens with pairwise |cos| < {SEPARATION} in {c} channels"
        )))
    }
}

/// `s^14` by repeated squaring.
#[inline]
fn focus(s: f64) -> f64 {
    let s2 = s * s;
    let s4 = s2 * s2;
    let s8 = s4 * s4;
    s8 * s4 * s2
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let norm = dot(&v, &v).sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds a clip and its ground truth. Deterministic in `spec`.
pub fn generate(spec: &SynthSpec) -> Result<SynthClip> {
    spec.check()?;
    let shape = spec.shape;
    let (f, h, w, c) = (shape.frames, shape.height, shape.width, shape.channels);
    let n = h * w;
    let mut rng = Sampler::new(spec.seed);

    let mut displacements = vec![Offset::ZERO; f];
    for k in 1..f {
        let prev = displacements[k - 1];
        displacements[k] = match spec.motion {
            Motion::Static => Offset::ZERO,
            Motion::Shift { dy, dx } => Offset::new(prev.dy + dy, prev.dx + dx),
            Motion::RandomWalk { max_step } => {
                let dy = rng.step(max_step);
                let dx = rng.step(max_step);
                Offset::new(prev.dy + dy, prev.dx + dx)
            }
        };
    }

    // Where each (k, i) takes its content from: Some(frame-0 index) or fresh.
    let mut origin: Vec<Option<usize>> = Vec::with_capacity(f * n);
    for d in &displacements {
        for y in 0..h {
            for x in 0..w {
                let sy = y as i64 - d.dy as i64;
                let sx = x as i64 - d.dx as i64;
                let inside = (0..h as i64).contains(&sy) && (0..w as i64).contains(&sx);
                origin.push(if inside || !spec.fresh_content {
                    let cy = sy.clamp(0, h as i64 - 1) as usize;
                    let cx = sx.clamp(0, w as i64 - 1) as usize;
                    Some(cy * w + cx)
                } else {
                    None
                });
            }
        }
    }

    // Fresh tokens get their own slots after the N frame-0 tokens, and the
    // whole set is separated together.
    let mut next_fresh = n;
    let slots: Vec<usize> = origin
        .iter()
        .map(|o| {
            o.unwrap_or_else(|| {
                next_fresh += 1;
                next_fresh - 1
            })
        })
        .collect();

    let mut data = Vec::with_capacity(shape.len());
    for _ in 0..shape.batch {
        let tokens = rng.separated_set(next_fresh, c, spec.separated)?;
        let mut frames: Vec<f64> = Vec::with_capacity(f * n * c);
        for &s in &slots {
            frames.extend_from_slice(&tokens[s]);
        }
        if spec.noise_sigma > 0.0 {
            for v in frames.iter_mut() {
                *v += spec.noise_sigma * rng.normal();
            }
        }
        data.extend(frames.into_iter().map(|v| v as f32));
    }
    let grid = TokenGrid::new(shape, data)?;

    let mut positions = Vec::with_capacity((f - 1) * n);
    for k in 1..f {
        for i in 0..n {
            let (y, x) = (i / w, i % w);
            let entry = match origin[k * n + i] {
                Some(j) => TruthEntry {
                    k,
                    y,
                    x,
                    fusable: true,
                    offset: Some(Offset::new(
                        (j / w) as i32 - y as i32,
                        (j % w) as i32 - x as i32,
                    )),
                },
                None => TruthEntry {
                    k,
                    y,
                    x,
                    fusable: false,
                    offset: None,
                },
            };
            positions.push(entry);
        }
    }

    Ok(SynthClip {
        grid,
        truth: GroundTruth {
            schema: 1,
            reference_frame: 0,
            frames: f,
            height: h,
            width: w,
            displacements,
            positions,
        },
    })
}
