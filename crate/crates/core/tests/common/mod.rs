#![allow(dead_code)]

use rand_core::RngCore;
use rand_pcg::Pcg64;
use ttf_core::synth::{generate, Motion, SynthSpec};
use ttf_core::{AnchorStrategy, Error, GridShape, TokenGrid};

pub struct Rng(Pcg64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(Pcg64::new(seed as u128, 0x5851_f42d_4c95_7f2d))
    }

    pub fn next(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next() % (hi - lo + 1) as u64) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.next() & 1 == 1
    }
}

/// One randomized case for the matcher checks.
pub struct Case {
    pub grid: TokenGrid,
    pub strategy: AnchorStrategy,
    pub radius: usize,
    pub label: String,
}

/// A synthetic clip with B in {1,2}, F in 1..=8, H,W in 2..=8, C in 4..=32,
/// r in {0,1,2}, cycling through all anchor strategies.
pub fn random_case(rng: &mut Rng, index: usize) -> Case {
    let b = rng.range(1, 2);
    let f = rng.range(1, 8);
    let h = rng.range(2, 8);
    let w = rng.range(2, 8);
    let c = rng.range(4, 32);
    let radius = rng.range(0, 2);
    let strategy = match index % 4 {
        0 => AnchorStrategy::First,
        1 => AnchorStrategy::Last,
        2 => AnchorStrategy::Explicit(rng.range(0, f - 1)),
        _ => AnchorStrategy::Auto,
    };
    let motion = match rng.range(0, 2) {
        0 => Motion::Static,
        1 => Motion::Shift {
            dy: rng.range(0, 2) as i32 - 1,
            dx: rng.range(0, 2) as i32 - 1,
        },
        _ => Motion::RandomWalk {
            max_step: rng.range(1, 2).min(h.min(w) - 1) as u32,
        },
    };
    let shape = GridShape::new(b, f, h, w, c).unwrap();
    let mut spec = SynthSpec::new(shape, motion, rng.next());
    spec.fresh_content = rng.coin();
    spec.noise_sigma = [0.0, 0.01, 0.2][rng.range(0, 2)];
    spec.separated = h * w * 2 <= c;
    let clip = match generate(&spec) {
        Err(Error::InfeasibleSpec(_)) => {
            spec.separated = false;
            generate(&spec).unwrap()
        }
        other => other.unwrap(),
    };
    Case {
        label: format!(
            "B={b} F={f} H={h} W={w} C={c} r={radius} {strategy} {motion:?} seed={}",
            spec.seed
        ),
        grid: clip.grid,
        strategy,
        radius,
    }
}

/// Unit-free random grid with values in [-1, 1).
pub fn random_grid(rng: &mut Rng, shape: GridShape) -> TokenGrid {
    let data = (0..shape.len())
        .map(|_| (rng.next() >> 40) as f32 / (1u64 << 23) as f32 - 1.0)
        .collect();
    TokenGrid::new(shape, data).unwrap()
}
