//! Pixel-level property extraction: ad-icon template matching and
//! background/foreground colors.

pub mod color;
pub mod template;

use image::imageops;

pub use color::{annotate_colors, contrast, extract_colors, ColorPair};
pub use template::{match_templates, ncc_map, Template, TemplateMatch, NCC_THRESHOLD, SCALES};

use crate::extract::Warning;
use crate::model::{ElementOrigin, ElementType, Screen, UIElement};

/// Runs template matching on the screen raster and appends every match as
/// an ImageView carrying the template's icon class.
pub fn annotate_templates(screen: &mut Screen, templates: &[Template], scales: &[f64], ncc_threshold: f64) -> Vec<Warning> {
    let Some(img) = screen.image.as_ref() else {
        return Vec::new();
    };
    let gray = imageops::grayscale(img);
    let (found, warnings) = match_templates(&gray, templates, scales, ncc_threshold);
    for m in found {
        screen.push(
            UIElement::new(m.bbox, ElementType::ImageView)
                .with_icon(m.icon)
                .with_confidence(m.score.clamp(0.0, 1.0))
                .with_origin(ElementOrigin::Template),
        );
    }
    warnings
}
