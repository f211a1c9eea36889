//! Extractor interfaces and detection post-processing.
//!
//! The neural models (element detector, OCR, icon and status classifiers)
//! sit behind the four traits below. [`annotation`] provides implementations
//! backed by sidecar files so the engine runs without any model runtime.

pub mod annotation;

use std::cmp::Ordering;

use image::RgbImage;

use crate::error::ExtractError;
use crate::geometry::{iou, BBox};
use crate::model::{ElementId, ElementType, IconClass, Screen, WidgetStatus};

pub use annotation::AnnotationSuite;

/// Default IoU above which same-type detections are duplicates.
pub const NMS_IOU: f64 = 0.5;
/// Default minimum detector confidence.
pub const NMS_CONFIDENCE: f64 = 0.65;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub etype: ElementType,
    pub confidence: f64,
    /// Label text, for detectors that also read it.
    pub text: Option<String>,
}

/// Raw element-detector output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorOutput {
    pub detections: Vec<Detection>,
}

impl DetectorOutput {
    pub fn push(&mut self, bbox: BBox, etype: ElementType, confidence: f64) {
        self.detections.push(Detection { bbox, etype, confidence, text: None });
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

/// One OCR line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextLine {
    pub bbox: BBox,
    pub text: String,
}

/// Crop handed to the per-element classifiers.
#[derive(Debug, Clone, Copy)]
pub struct CropRequest<'a> {
    pub element: ElementId,
    pub bbox: BBox,
    pub etype: ElementType,
    /// Full screenshot; implementations crop `bbox` out of it.
    pub image: Option<&'a RgbImage>,
}

pub trait ElementDetector: Send + Sync {
    fn detect(&self, image: Option<&RgbImage>) -> Result<DetectorOutput, ExtractError>;
}

pub trait TextRecognizer: Send + Sync {
    fn recognize(&self, image: Option<&RgbImage>) -> Result<Vec<TextLine>, ExtractError>;
}

pub trait IconClassifier: Send + Sync {
    /// `Ok(None)` means the classifier abstains.
    fn classify(&self, crop: &CropRequest<'_>) -> Result<Option<IconClass>, ExtractError>;
}

pub trait StatusClassifier: Send + Sync {
    fn classify(&self, crop: &CropRequest<'_>) -> Result<WidgetStatus, ExtractError>;
}

/// The four extractor slots used by the pipeline.
pub struct ExtractorSuite {
    pub element_detector: Box<dyn ElementDetector>,
    pub text_recognizer: Box<dyn TextRecognizer>,
    pub icon_classifier: Box<dyn IconClassifier>,
    pub status_classifier: Box<dyn StatusClassifier>,
}

impl ExtractorSuite {
    /// Every slot served by the same sidecar annotations.
    pub fn from_annotations(suite: AnnotationSuite) -> Self {
        let shared = std::sync::Arc::new(suite);
        ExtractorSuite {
            element_detector: Box::new(shared.clone()),
            text_recognizer: Box::new(shared.clone()),
            icon_classifier: Box::new(shared.clone()),
            status_classifier: Box::new(shared),
        }
    }
}

/// Non-fatal issue recorded while extracting properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub stage: &'static str,
    pub message: String,
}

fn confidence_order(a: &Detection, b: &Detection) -> Ordering {
    b.confidence
        .partial_cmp(&a.confidence)
        .unwrap_or(Ordering::Equal)
        .then(a.bbox.area().cmp(&b.bbox.area()))
        .then(a.bbox.cmp(&b.bbox))
}

/// Greedy per-type non-maximum suppression.
///
/// Drops detections below `conf_threshold`; among same-type detections
/// overlapping at IoU >= `iou_threshold` only the most confident survives
/// (ties: smaller area, then box order). Survivors keep their input order.
pub fn non_max_suppression(dets: &DetectorOutput, iou_threshold: f64, conf_threshold: f64) -> DetectorOutput {
    let mut order: Vec<usize> = (0..dets.detections.len())
        .filter(|&i| dets.detections[i].confidence >= conf_threshold)
        .collect();
    order.sort_by(|&a, &b| confidence_order(&dets.detections[a], &dets.detections[b]));

    let mut keep = vec![false; dets.detections.len()];
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let d = &dets.detections[i];
        let suppressed = kept.iter().any(|&k| {
            let other = &dets.detections[k];
            other.etype == d.etype && iou(&other.bbox, &d.bbox) >= iou_threshold
        });
        if !suppressed {
            keep[i] = true;
            kept.push(i);
        }
    }
    DetectorOutput {
        detections: dets
            .detections
            .iter()
            .zip(keep)
            .filter_map(|(d, k)| k.then(|| d.clone()))
            .collect(),
    }
}

fn crop_request<'a>(screen: &'a Screen, id: ElementId) -> Result<CropRequest<'a>, Warning> {
    let e = &screen.elements[id];
    let (w, h) = match &screen.image {
        Some(img) => img.dimensions(),
        None => (screen.width, screen.height),
    };
    if !e.bbox.fits_within(w, h) {
        return Err(Warning {
            stage: "crop",
            message: format!("element #{id} box {:?} lies outside the {w}x{h} image; skipped", <[u32; 4]>::from(e.bbox)),
        });
    }
    Ok(CropRequest { element: id, bbox: e.bbox, etype: e.etype, image: screen.image.as_ref() })
}

/// Sets `icon` on every ImageView/ImageButton from the classifier;
/// abstentions become [`IconClass::Other`].
pub fn classify_icons(screen: &mut Screen, classifier: &dyn IconClassifier) -> Result<Vec<Warning>, ExtractError> {
    let mut warnings = Vec::new();
    for id in 0..screen.elements.len() {
        if !screen.elements[id].etype.is_image() || screen.elements[id].origin == crate::model::ElementOrigin::Template {
            continue;
        }
        let req = match crop_request(screen, id) {
            Ok(r) => r,
            Err(w) => {
                warnings.push(Warning { stage: "icon", ..w });
                continue;
            }
        };
        let class = classifier.classify(&req)?.unwrap_or(IconClass::Other);
        if class.is_template_only() {
            return Err(ExtractError::Backend(format!("icon classifier returned template-only class `{class}`")));
        }
        screen.elements[id].icon = Some(class);
    }
    Ok(warnings)
}

/// Sets `status` on Checkbox/Switch/ToggleButton elements; every other
/// element becomes `not_applicable`.
pub fn classify_status(screen: &mut Screen, classifier: &dyn StatusClassifier) -> Result<Vec<Warning>, ExtractError> {
    let mut warnings = Vec::new();
    for id in 0..screen.elements.len() {
        if !screen.elements[id].etype.has_status() {
            screen.elements[id].status = WidgetStatus::NotApplicable;
            continue;
        }
        let req = match crop_request(screen, id) {
            Ok(r) => r,
            Err(w) => {
                warnings.push(Warning { stage: "status", ..w });
                continue;
            }
        };
        screen.elements[id].status = match classifier.classify(&req)? {
            WidgetStatus::NotApplicable => WidgetStatus::Unknown,
            s => s,
        };
    }
    Ok(warnings)
}
