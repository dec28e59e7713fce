use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the fully retained reference frame is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorStrategy {
    First,
    Last,
    Explicit(usize),
    /// Frame whose mean token is most cosine-similar to the clip's mean token.
    #[default]
    Auto,
}

impl AnchorStrategy {
    /// Anchor index for strategies that do not need the token values.
    pub fn fixed_index(&self, frames: usize) -> Option<usize> {
        match *self {
            AnchorStrategy::First => Some(0),
            AnchorStrategy::Last => Some(frames - 1),
            AnchorStrategy::Explicit(j) => Some(j),
            AnchorStrategy::Auto => None,
        }
    }
}

impl fmt::Display for AnchorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnchorStrategy::First => f.write_str("first"),
            AnchorStrategy::Last => f.write_str("last"),
            AnchorStrategy::Explicit(j) => write!(f, "{j}"),
            AnchorStrategy::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseAnchorError(String);

impl fmt::Display for ParseAnchorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid anchor `{}`: expected auto, first, last or a frame index",
            self.0
        )
    }
}

impl std::error::Error for ParseAnchorError {}

impl FromStr for AnchorStrategy {
    type Err = ParseAnchorError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(AnchorStrategy::Auto),
            "first" => Ok(AnchorStrategy::First),
            "last" => Ok(AnchorStrategy::Last),
            other => other
                .parse::<usize>()
                .map(AnchorStrategy::Explicit)
                .map_err(|_| ParseAnchorError(s.to_owned())),
        }
    }
}

/// Every knob of the fusion pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Source tokens whose best match is `<= threshold` are preserved.
    pub threshold: f32,
    /// Search radius `r`; each source token sees a `(2r+1)^2` window.
    pub radius: usize,
    pub anchor: AnchorStrategy,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            threshold: 0.8,
            radius: 1,
            anchor: AnchorStrategy::Auto,
        }
    }
}

impl FusionConfig {
    pub fn new(threshold: f32, radius: usize, anchor: AnchorStrategy) -> Result<Self> {
        let config = Self {
            threshold,
            radius,
            anchor,
        };
        config.check()?;
        Ok(config)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !self.threshold.is_finite() || !(-1.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidThreshold(self.threshold));
        }
        Ok(())
    }

    /// Validates the explicit anchor (if any) against a frame count.
    pub fn check_for_frames(&self, frames: usize) -> Result<()> {
        self.check()?;
        if let AnchorStrategy::Explicit(anchor) = self.anchor {
            if anchor >= frames {
                return Err(Error::InvalidAnchor { anchor, frames });
            }
        }
        Ok(())
    }
}
