use crate::model::{GridShape, Offset};

/// The candidate offsets `{-r..=r}^2`, ordered by increasing ring radius and
/// row-major within each ring. `(0, 0)` is always first, so it wins exact ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetEnumeration {
    radius: usize,
    offsets: Vec<Offset>,
}

impl OffsetEnumeration {
    pub fn new(radius: usize) -> Self {
        let side = 2 * radius + 1;
        let mut offsets = Vec::with_capacity(side * side);
        offsets.push(Offset::ZERO);
        for ring in 1..=radius as i32 {
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dy.abs() == ring || dx.abs() == ring {
                        offsets.push(Offset::new(dy, dx));
                    }
                }
            }
        }
        Self { radius, offsets }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn as_slice(&self) -> &[Offset] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Offset> {
        self.offsets.iter()
    }
}

impl<'a> IntoIterator for &'a OffsetEnumeration {
    type Item = &'a Offset;
    type IntoIter = std::slice::Iter<'a, Offset>;

    fn into_iter(self) -> Self::IntoIter {
        self.offsets.iter()
    }
}

#[inline]
fn clip(v: i64, hi: usize) -> usize {
    v.clamp(0, hi as i64 - 1) as usize
}

/// Anchor flat index reached from source index `i` by `offset`, with each
/// coordinate clipped onto the grid. Total over every offset.
#[inline]
pub fn project_offset(i: usize, offset: Offset, shape: &GridShape) -> usize {
    let w = shape.width;
    let (y, x) = (i / w, i % w);
    let ty = clip(y as i64 + offset.dy as i64, shape.height);
    let tx = clip(x as i64 + offset.dx as i64, w);
    ty * w + tx
}

/// One surviving window candidate after duplicate masking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    /// Earliest-enumerated offset that reaches `anchor_index`.
    pub offset: Offset,
    pub anchor_index: usize,
}

/// Window candidates for source index `i`, keeping only the earliest offset
/// for every distinct clipped anchor index. Order follows the enumeration.
pub fn window_candidates(
    i: usize,
    enumeration: &OffsetEnumeration,
    shape: &GridShape,
) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::with_capacity(enumeration.len());
    for &offset in enumeration {
        let anchor_index = project_offset(i, offset, shape);
        if out.iter().all(|c| c.anchor_index != anchor_index) {
            out.push(Candidate {
                offset,
                anchor_index,
            });
        }
    }
    out
}

/// Displacement from source index `i` to anchor index `j`. Among all offsets
/// that clip onto `j` this is the one with the smallest components.
#[inline]
pub fn effective_offset(i: usize, j: usize, shape: &GridShape) -> Offset {
    let w = shape.width;
    Offset::new(
        (j / w) as i32 - (i / w) as i32,
        (j % w) as i32 - (i % w) as i32,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn shape(h: usize, w: usize) -> GridShape {
        GridShape::new(1, 1, h, w, 1).unwrap()
    }

    #[test]
    fn enumeration_covers_square_once() {
        for r in 0..6 {
            let e = OffsetEnumeration::new(r);
            assert_eq!(e.len(), (2 * r + 1).pow(2));
            assert_eq!(e.as_slice()[0], Offset::ZERO);
            let unique: HashSet<_> = e.iter().collect();
            assert_eq!(unique.len(), e.len());
            assert!(e.iter().all(|o| o.ring() as usize <= r));
            assert!(e.as_slice().windows(2).all(|p| p[0].ring() <= p[1].ring()));
        }
    }

    #[test]
    fn ring_one_is_row_major() {
        let e = OffsetEnumeration::new(1);
        let got: Vec<_> = e.iter().map(|o| (o.dy, o.dx)).collect();
        assert_eq!(
            got,
            vec![
                (0, 0),
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1)
            ]
        );
    }

    #[test]
    fn projection_examples() {
        let s = shape(4, 4);
        assert_eq!(project_offset(5, Offset::new(0, 0), &s), 5);
        assert_eq!(project_offset(0, Offset::new(-1, -1), &s), 0);
        assert_eq!(project_offset(3, Offset::new(1, 1), &s), 7);
    }

    #[test]
    fn corner_edge_interior_counts() {
        let s = shape(4, 4);
        let e = OffsetEnumeration::new(1);
        assert_eq!(window_candidates(0, &e, &s).len(), 4);
        assert_eq!(window_candidates(1, &e, &s).len(), 6);
        assert_eq!(window_candidates(5, &e, &s).len(), 9);
    }

    #[test]
    fn masking_keeps_earliest_offset() {
        let s = shape(4, 4);
        let e = OffsetEnumeration::new(1);
        let cands = window_candidates(0, &e, &s);
        // (0,0) first; then (-1,1) is the earliest offset reaching index 1.
        assert_eq!(cands[0].offset, Offset::ZERO);
        let to_one = cands.iter().find(|c| c.anchor_index == 1).unwrap();
        assert_eq!(to_one.offset, Offset::new(-1, 1));
    }
}
