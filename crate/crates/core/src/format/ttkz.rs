use super::{byte_len, f32s_from_le, u32s_from_le, FormatError, Reader, FORMAT_VERSION};
use crate::model::{FusionConfig, FusionResult, GridShape, PositionTriple};

pub const TTKZ_MAGIC: &[u8; 4] = b"TTKZ";
pub const TTKZ_HEADER_LEN: usize = 42;

/// A compressed clip together with the knobs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TtkzFile {
    pub result: FusionResult,
    pub threshold: f32,
    pub radius: u32,
}

impl TtkzFile {
    pub fn new(result: FusionResult, config: &FusionConfig) -> Self {
        Self {
            result,
            threshold: config.threshold,
            radius: config.radius as u32,
        }
    }
}

pub fn encode_ttkz(file: &TtkzFile) -> Vec<u8> {
    let r = &file.result;
    let s = r.shape();
    let fnn = s.tokens_per_clip();
    let mut out = Vec::with_capacity(
        TTKZ_HEADER_LEN + 12 * r.kept_len() + 4 * fnn + fnn.div_ceil(8) + 4 * r.tokens().len(),
    );
    out.extend_from_slice(TTKZ_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for d in [
        s.batch,
        s.frames,
        s.height,
        s.width,
        s.channels,
        r.anchor(),
        r.preserved(),
    ] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(&file.threshold.to_le_bytes());
    out.extend_from_slice(&file.radius.to_le_bytes());
    for p in r.positions() {
        for v in [p.k, p.y, p.x] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for d in r.dst_map() {
        out.extend_from_slice(&d.to_le_bytes());
    }
    let mut bits = vec![0u8; fnn.div_ceil(8)];
    for (j, &m) in r.keep_mask().iter().enumerate() {
        if m {
            bits[j / 8] |= 1 << (j % 8);
        }
    }
    out.extend_from_slice(&bits);
    for v in r.tokens() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_ttkz(bytes: &[u8]) -> Result<TtkzFile, FormatError> {
    let mut r = Reader::new(bytes);
    r.magic(TTKZ_MAGIC)?;
    r.version()?;
    let shape = GridShape {
        batch: r.dim("B")?,
        frames: r.dim("F")?,
        height: r.dim("H")?,
        width: r.dim("W")?,
        channels: r.dim("C")?,
    };
    let anchor = r.u32("anchor")? as usize;
    if anchor >= shape.frames {
        return Err(FormatError::BadField {
            field: "anchor",
            reason: format!("{anchor} is not below F = {}", shape.frames),
        });
    }
    let n = byte_len(&[shape.height, shape.width], 1, "H")? as usize;
    let fnn = byte_len(&[shape.frames, n], 1, "F")? as usize;
    let preserved = r.u32("P")? as usize;
    if preserved > fnn - n {
        return Err(FormatError::BadField {
            field: "P",
            reason: format!("{preserved} exceeds (F-1)*N = {}", fnn - n),
        });
    }
    let threshold = r.f32("threshold")?;
    if !threshold.is_finite() || !(-1.0..=1.0).contains(&threshold) {
        return Err(FormatError::BadField {
            field: "threshold",
            reason: format!("{threshold} is outside [-1, 1]"),
        });
    }
    let radius = r.u32("radius")?;
    let kept = n + preserved;

    let pos_len = byte_len(&[kept], 12, "positions")?;
    let positions: Vec<PositionTriple> = u32s_from_le(r.section(pos_len, "positions")?)
        .chunks_exact(3)
        .map(|t| PositionTriple {
            k: t[0],
            y: t[1],
            x: t[2],
        })
        .collect();
    let dst = u32s_from_le(r.section(byte_len(&[fnn], 4, "dst")?, "dst")?);
    let bits = r.section(fnn.div_ceil(8) as u64, "keep")?;
    let keep: Vec<bool> = (0..fnn).map(|j| bits[j / 8] >> (j % 8) & 1 == 1).collect();
    if fnn % 8 != 0 && bits[fnn / 8] >> (fnn % 8) != 0 {
        return Err(FormatError::BadField {
            field: "keep",
            reason: "padding bits must be zero".into(),
        });
    }
    let token_len = byte_len(&[shape.batch, kept, shape.channels], 4, "tokens")?;
    let tokens = f32s_from_le(r.section(token_len, "tokens")?);
    r.finish("tokens", token_len)?;

    let result = FusionResult::from_parts(shape, anchor, keep, dst, positions, tokens)?;
    Ok(TtkzFile {
        result,
        threshold,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnchorStrategy, TokenGrid};

    fn sample(t: f32) -> TtkzFile {
        let shape = GridShape::new(2, 3, 2, 3, 2).unwrap();
        let data: Vec<f32> = (0..shape.len())
            .map(|v| ((v * 13 % 7) as f32 - 3.0) * 0.25)
            .collect();
        let grid = TokenGrid::new(shape, data).unwrap();
        let cfg = FusionConfig::new(t, 1, AnchorStrategy::Last).unwrap();
        TtkzFile::new(crate::compress(&grid, &cfg).unwrap(), &cfg)
    }

    #[test]
    fn header_layout() {
        let f = sample(0.5);
        let bytes = encode_ttkz(&f);
        assert_eq!(&bytes[..4], b"TTKZ");
        assert_eq!(&bytes[4..6], &1u16.to_le_bytes());
        assert_eq!(&bytes[26..30], &2u32.to_le_bytes());
        assert_eq!(&bytes[30..34], &(f.result.preserved() as u32).to_le_bytes());
        assert_eq!(&bytes[34..38], &0.5f32.to_le_bytes());
        assert_eq!(&bytes[38..42], &1u32.to_le_bytes());
        let kept = f.result.kept_len();
        assert_eq!(bytes.len(), 42 + 12 * kept + 4 * 18 + 3 + 4 * 2 * kept * 2);
    }

    #[test]
    fn round_trip_exact() {
        for t in [-1.0, 0.0, 0.3, 1.0] {
            let f = sample(t);
            let bytes = encode_ttkz(&f);
            let back = decode_ttkz(&bytes).unwrap();
            assert_eq!(back, f);
            assert_eq!(encode_ttkz(&back), bytes);
        }
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode_ttkz(&sample(1.0));

        let mut bad = bytes.clone();
        bad[26..30].copy_from_slice(&3u32.to_le_bytes());
        assert!(decode_ttkz(&bad)
            .unwrap_err()
            .to_string()
            .contains("anchor"));

        let mut bad = bytes.clone();
        bad[34..38].copy_from_slice(&2.0f32.to_le_bytes());
        assert!(decode_ttkz(&bad)
            .unwrap_err()
            .to_string()
            .contains("threshold"));

        // Flip a padding bit in the keep mask (18 bits -> byte 2, bit 2 onward).
        let kept = 18;
        let keep_start = 42 + 12 * kept + 4 * 18;
        let mut bad = bytes.clone();
        bad[keep_start + 2] |= 0x80;
        assert!(decode_ttkz(&bad).unwrap_err().to_string().contains("keep"));

        // Drop a kept source token: mask no longer matches positions.
        let mut bad = bytes.clone();
        bad[keep_start] &= !1;
        assert!(matches!(decode_ttkz(&bad), Err(FormatError::Result(_))));

        assert!(decode_ttkz(&bytes[..bytes.len() - 4])
            .unwrap_err()
            .to_string()
            .contains("tokens"));
    }
}
