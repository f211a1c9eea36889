//! Merges OCR text lines into detected elements.

use crate::extract::TextLine;
use crate::geometry::{contains, iou, union_box};
use crate::model::{ElementOrigin, ElementType, UIElement};

/// Default IoU for a line to be assigned to an element.
pub const MATCH_THRESHOLD: f64 = 0.5;

/// Fused elements plus, for each input line, the index of the output
/// element that absorbed it.
#[derive(Debug, Clone)]
pub struct Fusion {
    pub elements: Vec<UIElement>,
    pub line_owner: Vec<usize>,
}

/// See [`fuse`]; returns only the elements.
pub fn merge_text_lines(elements: Vec<UIElement>, lines: &[TextLine], match_threshold: f64) -> Vec<UIElement> {
    fuse(elements, lines, match_threshold).elements
}

/// Assigns lines to elements, smallest element first. A line goes to the
/// first element it overlaps at IoU >= `match_threshold` or that contains
/// it; an element may take several lines. Leftover lines become TextViews.
/// Textual elements with matched lines take the union of the line boxes.
pub fn fuse(mut elements: Vec<UIElement>, lines: &[TextLine], match_threshold: f64) -> Fusion {
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by_key(|&i| (elements[i].bbox.area(), elements[i].bbox.y1, elements[i].bbox.x1, i));

    let mut owner: Vec<Option<usize>> = vec![None; lines.len()];
    for &ei in &order {
        let ebox = elements[ei].bbox;
        let mut taken: Vec<usize> = Vec::new();
        for (li, line) in lines.iter().enumerate() {
            if owner[li].is_none() && (iou(&ebox, &line.bbox) >= match_threshold || contains(&ebox, &line.bbox)) {
                owner[li] = Some(ei);
                taken.push(li);
            }
        }
        if taken.is_empty() {
            continue;
        }
        taken.sort_by_key(|&li| (lines[li].bbox.y1, lines[li].bbox.x1, li));
        let text = taken.iter().map(|&li| lines[li].text.trim()).collect::<Vec<_>>().join(" ");
        let el = &mut elements[ei];
        el.text = Some(text);
        if el.etype.is_textual() {
            let boxes: Vec<_> = taken.iter().map(|&li| lines[li].bbox).collect();
            el.bbox = union_box(&boxes).expect("at least one matched line");
        }
    }

    let mut line_owner = Vec::with_capacity(lines.len());
    for (li, line) in lines.iter().enumerate() {
        match owner[li] {
            Some(ei) => line_owner.push(ei),
            None => {
                elements.push(
                    UIElement::new(line.bbox, ElementType::TextView)
                        .with_text(line.text.trim())
                        .with_origin(ElementOrigin::Ocr),
                );
                line_owner.push(elements.len() - 1);
            }
        }
    }
    Fusion { elements, line_owner }
}
