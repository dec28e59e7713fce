use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of a batched token video `[B, F, H, W, C]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    pub batch: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl GridShape {
    /// Builds a shape, rejecting any zero dimension.
    pub fn new(
        batch: usize,
        frames: usize,
        height: usize,
        width: usize,
        channels: usize,
    ) -> Result<Self> {
        let shape = Self {
            batch,
            frames,
            height,
            width,
            channels,
        };
        shape.check()?;
        Ok(shape)
    }

    pub(crate) fn check(&self) -> Result<()> {
        for (field, value) in [
            ("B", self.batch),
            ("F", self.frames),
            ("H", self.height),
            ("W", self.width),
            ("C", self.channels),
        ] {
            if value == 0 {
                return Err(Error::ZeroDimension { field });
            }
        }
        Ok(())
    }

    /// Spatial tokens per frame, `H * W`.
    #[inline]
    pub fn tokens_per_frame(&self) -> usize {
        self.height * self.width
    }

    /// Total number of visual tokens per batch element, `F * N`.
    #[inline]
    pub fn tokens_per_clip(&self) -> usize {
        self.frames * self.tokens_per_frame()
    }

    /// Number of scalars in a dense grid of this shape.
    #[inline]
    pub fn len(&self) -> usize {
        self.batch * self.tokens_per_clip() * self.channels
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat spatial index `y * W + x`.
    pub fn flat_index(&self, y: usize, x: usize) -> Result<usize> {
        if y >= self.height || x >= self.width {
            return Err(Error::OutOfRange {
                y,
                x,
                h: self.height,
                w: self.width,
            });
        }
        Ok(y * self.width + x)
    }

    /// Inverse of [`flat_index`](Self::flat_index). Panics if `i >= N`.
    #[inline]
    pub fn coords(&self, i: usize) -> (usize, usize) {
        assert!(i < self.tokens_per_frame(), "flat index {i} out of range");
        (i / self.width, i % self.width)
    }
}

/// Free-function form of [`GridShape::flat_index`].
pub fn flat_index(y: usize, x: usize, shape: &GridShape) -> Result<usize> {
    shape.flat_index(y, x)
}

/// Dense, validated visual tokens laid out row-major as `[B][F][H][W][C]`.
///
/// Every value is finite. Construction goes through [`TokenGrid::new`], so a
/// `TokenGrid` in hand is always shape-consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenGrid {
    shape: GridShape,
    data: Vec<f32>,
}

impl TokenGrid {
    pub fn new(shape: GridShape, data: Vec<f32>) -> Result<Self> {
        validate_grid(shape, data)
    }

    #[inline]
    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    /// Channel vector of token `i` in frame `k` of batch element `b`.
    #[inline]
    pub fn token(&self, b: usize, k: usize, i: usize) -> &[f32] {
        let s = &self.shape;
        let start = ((b * s.frames + k) * s.tokens_per_frame() + i) * s.channels;
        &self.data[start..start + s.channels]
    }

    /// All `N * C` values of frame `k` in batch element `b`.
    #[inline]
    pub fn frame(&self, b: usize, k: usize) -> &[f32] {
        let s = &self.shape;
        let len = s.tokens_per_frame() * s.channels;
        let start = (b * s.frames + k) * len;
        &self.data[start..start + len]
    }
}

/// Checks that `data` matches `shape` and holds only finite values.
pub fn validate_grid(shape: GridShape, data: Vec<f32>) -> Result<TokenGrid> {
    shape.check()?;
    if data.len() != shape.len() {
        return Err(Error::ShapeMismatch {
            expected: shape.len(),
            actual: data.len(),
        });
    }
    if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(idx));
    }
    Ok(TokenGrid { shape, data })
}

/// `(frame, row, column)` coordinates a token carries into the language model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PositionTriple {
    pub k: u32,
    pub y: u32,
    pub x: u32,
}

impl PositionTriple {
    pub fn new(k: usize, y: usize, x: usize) -> Self {
        Self {
            k: k as u32,
            y: y as u32,
            x: x as u32,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(b: usize, f: usize, h: usize, w: usize, c: usize) -> GridShape {
        GridShape::new(b, f, h, w, c).unwrap()
    }

    #[test]
    fn accepts_consistent_grid() {
        let s = shape(1, 2, 2, 2, 3);
        let grid = TokenGrid::new(s, (0..24).map(|v| v as f32).collect()).unwrap();
        assert_eq!(grid.shape().tokens_per_frame(), 4);
        assert_eq!(grid.token(0, 1, 2), &[18.0, 19.0, 20.0]);
    }

    #[test]
    fn rejects_short_payload() {
        let s = shape(1, 2, 2, 2, 3);
        let err = TokenGrid::new(s, vec![0.0; 23]).unwrap_err();
        assert_eq!(
            err,
            Error::ShapeMismatch {
                expected: 24,
                actual: 23
            }
        );
    }

    #[test]
    fn reports_first_non_finite_index() {
        let s = shape(1, 2, 2, 2, 3);
        let mut data = vec![0.5; 24];
        data[7] = f32::NAN;
        data[9] = f32::INFINITY;
        assert_eq!(
            TokenGrid::new(s, data).unwrap_err(),
            Error::NonFiniteValue(7)
        );
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert_eq!(
            GridShape::new(1, 0, 2, 2, 1).unwrap_err(),
            Error::ZeroDimension { field: "F" }
        );
    }

    #[test]
    fn flat_index_examples() {
        let s = shape(1, 1, 4, 4, 1);
        assert_eq!(flat_index(1, 1, &s).unwrap(), 5);
        assert_eq!(flat_index(0, 0, &s).unwrap(), 0);
        assert_eq!(flat_index(3, 2, &s).unwrap(), 14);
        assert!(matches!(
            flat_index(4, 0, &s),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            flat_index(0, 4, &s),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn flat_index_inverse_exhaustive() {
        for h in 1..=16 {
            for w in 1..=16 {
                let s = shape(1, 1, h, w, 1);
                let mut seen = vec![false; h * w];
                for y in 0..h {
                    for x in 0..w {
                        let i = s.flat_index(y, x).unwrap();
                        assert_eq!(s.coords(i), (y, x));
                        assert!(!seen[i]);
                        seen[i] = true;
                    }
                }
                assert!(seen.into_iter().all(|v| v));
            }
        }
    }
}
