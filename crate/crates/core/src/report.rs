//! Findings reports and the red-box overlay.

use std::fmt::Write as _;

use image::{Rgb, RgbImage};

use crate::checker::Finding;
use crate::geometry::BBox;
use crate::schema::{EvidenceRecord, FindingRecord, FindingsReport};

pub fn findings_report(image: &str, findings: &[Finding]) -> FindingsReport {
    FindingsReport {
        image: image.to_string(),
        findings: findings
            .iter()
            .map(|f| FindingRecord {
                dp_type: f.dp_type,
                strategy: f.strategy(),
                tier: f.tier,
                container: f.container,
                evidence: f.evidence.iter().map(|e| EvidenceRecord { element: e.element, role: e.role.clone() }).collect(),
                explanation: f.explanation.clone(),
            })
            .collect(),
    }
}

const RED: Rgb<u8> = Rgb([230, 20, 20]);
const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const STROKE: u32 = 3;
/// Digit glyph scale: each font cell becomes a DIGIT_SCALE-pixel square.
const DIGIT_SCALE: u32 = 3;

/// 3x5 bitmaps for 0-9, one row per entry, most significant bit leftmost.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn fill(img: &mut RgbImage, x1: u32, y1: u32, x2: u32, y2: u32, c: Rgb<u8>) {
    let (w, h) = img.dimensions();
    for y in y1.min(h)..y2.min(h) {
        for x in x1.min(w)..x2.min(w) {
            img.put_pixel(x, y, c);
        }
    }
}

fn outline(img: &mut RgbImage, b: &BBox) {
    let s = STROKE.min(b.width() / 2).min(b.height() / 2).max(1);
    fill(img, b.x1, b.y1, b.x2, b.y1 + s, RED);
    fill(img, b.x1, b.y2.saturating_sub(s), b.x2, b.y2, RED);
    fill(img, b.x1, b.y1, b.x1 + s, b.y2, RED);
    fill(img, b.x2.saturating_sub(s), b.y1, b.x2, b.y2, RED);
}

/// Draws `n` in white on a red tag whose top-left corner is at (x, y).
fn label(img: &mut RgbImage, x: u32, y: u32, n: usize) {
    let digits: Vec<usize> = n.to_string().bytes().map(|b| usize::from(b - b'0')).collect();
    let cell = DIGIT_SCALE;
    let tag_w = digits.len() as u32 * 4 * cell + cell;
    fill(img, x, y, x + tag_w, y + 7 * cell, RED);
    for (i, d) in digits.iter().enumerate() {
        let ox = x + cell + i as u32 * 4 * cell;
        for (row, bits) in DIGITS[*d].iter().enumerate() {
            for col in 0..3u32 {
                if bits & (0b100 >> col) != 0 {
                    let px = ox + col * cell;
                    let py = y + cell + row as u32 * cell;
                    fill(img, px, py, px + cell, py + cell, WHITE);
                }
            }
        }
    }
}

/// Copy of `image` with every finding's container boxed in red and tagged
/// with its 1-based index.
pub fn render_overlay(image: &RgbImage, findings: &[Finding]) -> RgbImage {
    let mut out = image.clone();
    for (i, f) in findings.iter().enumerate() {
        outline(&mut out, &f.container);
        label(&mut out, f.container.x1, f.container.y1, i + 1);
    }
    out
}

/// Text legend matching the overlay's index tags.
pub fn legend(findings: &[Finding]) -> String {
    let mut s = String::new();
    for (i, f) in findings.iter().enumerate() {
        let c = f.container;
        let _ = writeln!(s, "{} [{}] {} ({}) {}", i + 1, [c.x1, c.y1, c.x2, c.y2].map(|v| v.to_string()).join(","), f.dp_type, f.tier, f.explanation);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{DpType, Evidence, Tier};

    fn finding(b: BBox) -> Finding {
        Finding {
            dp_type: DpType::IiSmallClose,
            tier: Tier::Certain,
            container: b,
            evidence: vec![Evidence { element: 0, role: "icon:close".into() }],
            explanation: "Close button is too small to hit comfortably.".into(),
        }
    }

    #[test]
    fn overlay_boxes_container_in_red() {
        let img = RgbImage::from_pixel(100, 100, Rgb([250, 250, 250]));
        let f = finding(BBox::new(20, 30, 80, 90).unwrap());
        let out = render_overlay(&img, &[f]);
        assert_eq!(*out.get_pixel(79, 60), RED);
        assert_eq!(*out.get_pixel(50, 89), RED);
        assert_eq!(*out.get_pixel(50, 60), Rgb([250, 250, 250]));
        assert_eq!(*out.get_pixel(5, 5), Rgb([250, 250, 250]));
        // the "1" glyph has a lit cell in its middle column
        assert_eq!(*out.get_pixel(20 + 3 + 3 + 1, 30 + 3 + 1), WHITE);
    }

    #[test]
    fn overlay_clips_at_image_edge() {
        let img = RgbImage::new(40, 40);
        let out = render_overlay(&img, &[finding(BBox::new(30, 30, 40, 40).unwrap())]);
        assert_eq!(out.dimensions(), (40, 40));
    }

    #[test]
    fn legend_lists_findings_in_order() {
        let l = legend(&[finding(BBox::new(1, 2, 3, 4).unwrap())]);
        assert_eq!(l, "1 [1,2,3,4] II-SMALL-CLOSE (certain) Close button is too small to hit comfortably.\n");
    }
}
