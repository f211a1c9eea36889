//! Pixel-space boxes and the overlap measures used throughout the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Fraction of the inner box that must be covered for [`contains`] to hold.
pub const CONTAINMENT_RATIO: f64 = 0.95;

/// Axis-aligned box in screenshot pixels, origin top-left, half-open on the
/// right/bottom edges. Serialized as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct BBox {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl From<[u32; 4]> for BBox {
    fn from([x1, y1, x2, y2]: [u32; 4]) -> Self {
        BBox { x1, y1, x2, y2 }
    }
}

impl From<BBox> for [u32; 4] {
    fn from(b: BBox) -> Self {
        [b.x1, b.y1, b.x2, b.y2]
    }
}

impl BBox {
    /// Builds a box, rejecting empty or inverted extents.
    pub fn new(x1: u32, y1: u32, x2: u32, y2: u32) -> Result<Self, GeometryError> {
        let b = BBox { x1, y1, x2, y2 };
        if b.is_valid() {
            Ok(b)
        } else {
            Err(GeometryError::Degenerate(b))
        }
    }

    /// Box of the given size anchored at `(x, y)`.
    pub fn from_xywh(x: u32, y: u32, w: u32, h: u32) -> Self {
        BBox { x1: x, y1: y, x2: x + w, y2: y + h }
    }

    pub fn is_valid(&self) -> bool {
        self.x1 < self.x2 && self.y1 < self.y2
    }

    pub fn width(&self) -> u32 {
        self.x2.saturating_sub(self.x1)
    }

    pub fn height(&self) -> u32 {
        self.y2.saturating_sub(self.y1)
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (f64::from(self.x1) + f64::from(self.x2)) / 2.0,
            (f64::from(self.y1) + f64::from(self.y2)) / 2.0,
        )
    }

    /// Overlap area with `other`; zero when disjoint or touching.
    pub fn intersection_area(&self, other: &BBox) -> u64 {
        let w = self.x2.min(other.x2).saturating_sub(self.x1.max(other.x1));
        let h = self.y2.min(other.y2).saturating_sub(self.y1.max(other.y1));
        u64::from(w) * u64::from(h)
    }

    /// True when the box fits inside a `width` x `height` raster.
    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.is_valid() && self.x2 <= width && self.y2 <= height
    }

    /// Clips to the raster; the result may be degenerate if the box lies outside.
    pub fn clip(&self, width: u32, height: u32) -> BBox {
        BBox {
            x1: self.x1.min(width),
            y1: self.y1.min(height),
            x2: self.x2.min(width),
            y2: self.y2.min(height),
        }
    }

    /// Ordering used wherever the pipeline needs a deterministic reading order.
    pub fn reading_key(&self) -> (u32, u32, u32, u32) {
        (self.y1, self.x1, self.y2, self.x2)
    }
}

/// Intersection over union. Degenerate inputs yield 0.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return 0.0;
    }
    inter as f64 / union as f64
}

/// True when at least 95% of `inner` lies within `outer`.
pub fn contains(outer: &BBox, inner: &BBox) -> bool {
    let area = inner.area();
    if area == 0 {
        return false;
    }
    inner.intersection_area(outer) as f64 >= CONTAINMENT_RATIO * area as f64
}

/// Minimal box enclosing every input box.
pub fn union_box(boxes: &[BBox]) -> Result<BBox, GeometryError> {
    let (first, rest) = boxes.split_first().ok_or(GeometryError::EmptyUnion)?;
    Ok(rest.iter().fold(*first, |acc, b| BBox {
        x1: acc.x1.min(b.x1),
        y1: acc.y1.min(b.y1),
        x2: acc.x2.max(b.x2),
        y2: acc.y2.max(b.y2),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x1: u32, y1: u32, x2: u32, y2: u32) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&b(0, 0, 10, 10), &b(0, 0, 10, 10)), 1.0);
        assert_eq!(iou(&b(0, 0, 10, 10), &b(20, 20, 30, 30)), 0.0);
        // intersection 50, union 150
        assert!((iou(&b(0, 0, 10, 10), &b(5, 0, 15, 10)) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iou_degenerate_is_zero() {
        let z = BBox { x1: 3, y1: 3, x2: 3, y2: 3 };
        assert_eq!(iou(&z, &z), 0.0);
        assert_eq!(iou(&z, &b(0, 0, 10, 10)), 0.0);
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&b(0, 0, 100, 100), &b(10, 10, 20, 20)));
        assert!(contains(&b(0, 0, 10, 10), &b(0, 0, 10, 10)));
        // intersection 4 < 0.95 * 100
        assert!(!contains(&b(0, 0, 10, 10), &b(8, 8, 18, 18)));
    }

    #[test]
    fn contains_tolerates_small_overhang() {
        // one row of 101 hangs outside
        assert!(contains(&b(0, 0, 100, 100), &b(0, 0, 100, 101)));
        assert!(contains(&b(0, 0, 100, 100), &b(98, 0, 100, 10)));
        assert!(!contains(&b(0, 0, 100, 100), &b(95, 0, 105, 10)));
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_box(&[b(0, 0, 10, 10)]).unwrap(), b(0, 0, 10, 10));
        assert_eq!(union_box(&[b(0, 0, 10, 10), b(5, 5, 20, 20)]).unwrap(), b(0, 0, 20, 20));
        assert_eq!(union_box(&[b(0, 0, 1, 1), b(9, 9, 10, 10)]).unwrap(), b(0, 0, 10, 10));
        assert!(matches!(union_box(&[]), Err(GeometryError::EmptyUnion)));
    }

    #[test]
    fn new_rejects_inverted() {
        assert!(BBox::new(5, 0, 5, 10).is_err());
        assert!(BBox::new(0, 7, 10, 2).is_err());
    }

    #[test]
    fn serde_as_array() {
        let json = serde_json::to_string(&b(1, 2, 3, 4)).unwrap();
        assert_eq!(json, "[1,2,3,4]");
        let back: BBox = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b(1, 2, 3, 4));
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0u32..200, 0u32..200, 1u32..120, 1u32..120)
            .prop_map(|(x, y, w, h)| BBox::from_xywh(x, y, w, h))
    }

    proptest! {
        #[test]
        fn iou_is_symmetric_and_bounded(a in arb_box(), c in arb_box()) {
            let v = iou(&a, &c);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, iou(&c, &a));
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn nested_iou_is_area_ratio(outer in arb_box(), fx in 0.0f64..1.0, fy in 0.0f64..1.0, fw in 0.0f64..1.0, fh in 0.0f64..1.0) {
            let w = ((f64::from(outer.width()) * fw) as u32).max(1);
            let h = ((f64::from(outer.height()) * fh) as u32).max(1);
            let x = outer.x1 + ((f64::from(outer.width() - w)) * fx) as u32;
            let y = outer.y1 + ((f64::from(outer.height() - h)) * fy) as u32;
            let inner = BBox::from_xywh(x, y, w, h);
            prop_assert!(contains(&outer, &inner));
            let expected = inner.area() as f64 / outer.area() as f64;
            prop_assert!((iou(&outer, &inner) - expected).abs() < 1e-12);
        }

        #[test]
        fn union_is_order_independent_and_idempotent(mut boxes in prop::collection::vec(arb_box(), 1..8)) {
            let u = union_box(&boxes).unwrap();
            prop_assert_eq!(union_box(&[u]).unwrap(), u);
            boxes.reverse();
            prop_assert_eq!(union_box(&boxes).unwrap(), u);
            for bx in &boxes {
                prop_assert!(contains(&u, bx));
            }
        }
    }
}
