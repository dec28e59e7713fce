use serde::{Deserialize, Serialize};

use crate::cost::{estimate_cost, CostReport, Scheme};
use crate::engine::{decode_plan, similarity_histogram, HISTOGRAM_BINS};
use crate::model::{FusionConfig, FusionResult, MatchResult};

pub const STATS_SCHEMA: u32 = 1;

/// Run summary written next to a TTKZ file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub schema: u32,
    pub anchor: usize,
    pub strategy: String,
    pub threshold: f32,
    pub radius: usize,
    #[serde(rename = "B")]
    pub batch: usize,
    #[serde(rename = "F")]
    pub frames: usize,
    #[serde(rename = "N")]
    pub tokens_per_frame: usize,
    #[serde(rename = "P")]
    pub preserved: usize,
    pub rho: f64,
    /// Counts of `ŝ` over source positions and batch elements, 32 equal bins on `[-1, 1]`.
    pub sim_histogram: Vec<u64>,
    pub cost: CostReport,
    pub decode: DecodeBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeBlock {
    #[serde(rename = "T")]
    pub text_tokens: usize,
    #[serde(rename = "L_prime")]
    pub visual_len: usize,
    #[serde(rename = "L_pre")]
    pub prefill_len: usize,
}

impl StatsJson {
    pub fn new(
        result: &FusionResult,
        matches: &MatchResult,
        config: &FusionConfig,
        text_tokens: usize,
    ) -> Self {
        let shape = result.shape();
        let plan = decode_plan(result, text_tokens);
        let histogram = similarity_histogram(matches);
        debug_assert_eq!(histogram.len(), HISTOGRAM_BINS);
        Self {
            schema: STATS_SCHEMA,
            anchor: result.anchor(),
            strategy: config.anchor.to_string(),
            threshold: config.threshold,
            radius: config.radius,
            batch: shape.batch,
            frames: shape.frames,
            tokens_per_frame: shape.tokens_per_frame(),
            preserved: result.preserved(),
            rho: result.rho(),
            sim_histogram: histogram.to_vec(),
            cost: estimate_cost(
                shape,
                Scheme::LocalWindow {
                    radius: config.radius,
                },
            ),
            decode: DecodeBlock {
                text_tokens: plan.text_tokens,
                visual_len: plan.visual_len,
                prefill_len: plan.prefill_len,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnchorStrategy, GridShape, TokenGrid};

    #[test]
    fn keys_and_counts() {
        let shape = GridShape::new(2, 3, 2, 2, 3).unwrap();
        let data: Vec<f32> = (0..shape.len()).map(|v| (v as f32 * 0.37).sin()).collect();
        let grid = TokenGrid::new(shape, data).unwrap();
        let cfg = FusionConfig::new(0.6, 1, AnchorStrategy::First).unwrap();
        let (result, matches) = crate::compress_detailed(&grid, &cfg).unwrap();
        let stats = StatsJson::new(&result, &matches, &cfg, 10);

        let v: serde_json::Value = serde_json::from_str(&stats.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["strategy"], "first");
        assert_eq!(v["threshold"].as_f64().unwrap(), 0.6);
        assert_eq!(v["sim_histogram"].as_array().unwrap().len(), 32);
        let total: u64 = stats.sim_histogram.iter().sum();
        assert_eq!(total, 2 * 4 * 2);
        let n = 4.0;
        let expected_rho = 1.0 - (n + stats.preserved as f64) / (3.0 * n);
        assert!((v["rho"].as_f64().unwrap() - expected_rho).abs() < 1e-9);
        assert_eq!(v["decode"]["L_pre"], 4 + stats.preserved as u64 + 10);
        assert_eq!(v["decode"]["L_prime"], 4 + stats.preserved as u64);
        assert_eq!(v["cost"]["scheme"]["kind"], "local_window");

        let back: StatsJson = serde_json::from_value(v).unwrap();
        assert_eq!(back, stats);
    }
}
