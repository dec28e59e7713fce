use super::{byte_len, f32s_from_le, FormatError, Reader, FORMAT_VERSION};
use crate::model::{GridShape, TokenGrid};

pub const TTOK_MAGIC: &[u8; 4] = b"TTOK";
pub const TTOK_HEADER_LEN: usize = 28;

pub fn encode_ttok(grid: &TokenGrid) -> Vec<u8> {
    let s = grid.shape();
    let mut out = Vec::with_capacity(TTOK_HEADER_LEN + 4 * grid.data().len());
    out.extend_from_slice(TTOK_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    for d in [s.batch, s.frames, s.height, s.width, s.channels] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in grid.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_ttok(bytes: &[u8]) -> Result<TokenGrid, FormatError> {
    let mut r = Reader::new(bytes);
    r.magic(TTOK_MAGIC)?;
    r.version()?;
    let flags = r.u16("flags")?;
    if flags != 0 {
        return Err(FormatError::BadField {
            field: "flags",
            reason: format!("must be 0, found {flags:#06x}"),
        });
    }
    let shape = GridShape {
        batch: r.dim("B")?,
        frames: r.dim("F")?,
        height: r.dim("H")?,
        width: r.dim("W")?,
        channels: r.dim("C")?,
    };
    let len = byte_len(
        &[
            shape.batch,
            shape.frames,
            shape.height,
            shape.width,
            shape.channels,
        ],
        4,
        "payload",
    )?;
    let payload = r.section(len, "payload")?;
    r.finish("payload", len)?;
    Ok(TokenGrid::new(shape, f32s_from_le(payload))?)
}
