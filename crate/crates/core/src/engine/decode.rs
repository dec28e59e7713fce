use crate::model::{DecodePlan, FusionResult};

/// Prefill bookkeeping: `L' = N + P` visual tokens followed by `text_tokens`.
pub fn decode_plan(result: &FusionResult, text_tokens: usize) -> DecodePlan {
    plan_for(result.kept_len(), text_tokens)
}

/// [`decode_plan`] from raw counts.
pub fn plan_for(visual_len: usize, text_tokens: usize) -> DecodePlan {
    DecodePlan {
        text_tokens,
        visual_len,
        prefill_len: visual_len + text_tokens,
    }
}

/// Position id and attention-mask length for decode step `step`.
///
/// Positions continue from the compressed prefill length, not the nominal
/// `F·N + T`, so they stay aligned with what the KV cache actually holds.
pub fn decode_position(plan: &DecodePlan, step: usize) -> (usize, usize) {
    let position = plan.prefill_len + step;
    (position, position + 1)
}

/// Position ids for the first `steps` generated tokens.
pub fn decode_positions(visual_len: usize, text_tokens: usize, steps: usize) -> Vec<usize> {
    let plan = plan_for(visual_len, text_tokens);
    (0..steps).map(|l| decode_position(&plan, l).0).collect()
}
