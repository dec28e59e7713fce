use crate::model::TokenGrid;

/// Sequential f64 dot product.
#[inline]
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        acc += x as f64 * y as f64;
    }
    acc
}

/// Cosine from a dot product and two squared norms. A zero-norm operand yields 0.
///
/// `sqrt(n2a * n2b)` rather than `sqrt(n2a) * sqrt(n2b)` keeps `cos(x, x)`
/// exactly 1.
#[inline]
pub(crate) fn cosine_from_parts(dot: f64, n2a: f64, n2b: f64) -> f64 {
    if n2a == 0.0 || n2b == 0.0 {
        return 0.0;
    }
    (dot / (n2a * n2b).sqrt()).clamp(-1.0, 1.0)
}

/// Cosine similarity of two f32 vectors accumulated in f64.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    cosine_from_parts(dot(a, b), dot(a, a), dot(b, b))
}

/// Squared norm of every token, laid out `[B][F][N]`.
pub(crate) fn squared_norms(grid: &TokenGrid) -> Vec<f64> {
    grid.data()
        .chunks_exact(grid.shape().channels)
        .map(|t| dot(t, t))
        .collect()
}

/// Cosine for f64 vectors; zero norm yields `None`.
pub(crate) fn cosine_f64(a: &[f64], b: &[f64]) -> Option<f64> {
    let mut d = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        d += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((d / (na * nb).sqrt()).clamp(-1.0, 1.0))
}
