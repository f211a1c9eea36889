//! Extractors that replay sidecar annotations instead of running models.

use std::sync::Arc;

use image::RgbImage;

use super::{
    CropRequest, Detection, DetectorOutput, ElementDetector, IconClassifier, StatusClassifier, TextLine,
    TextRecognizer,
};
use crate::error::ExtractError;
use crate::geometry::{iou, BBox};
use crate::model::{IconClass, WidgetStatus};
use crate::schema::{ElementRecord, ElementSidecar, OcrSidecar};

/// Minimum IoU for a crop to be matched to an annotation record when the
/// boxes are not identical.
const LOOKUP_IOU: f64 = 0.9;

/// Stateless, shareable extractor suite backed by sidecar files.
#[derive(Debug, Clone, Default)]
pub struct AnnotationSuite {
    pub elements: Option<ElementSidecar>,
    pub ocr: Option<OcrSidecar>,
}

impl AnnotationSuite {
    pub fn new(elements: ElementSidecar, ocr: OcrSidecar) -> Self {
        AnnotationSuite { elements: Some(elements), ocr: Some(ocr) }
    }

    fn records(&self, slot: &'static str) -> Result<&[ElementRecord], ExtractError> {
        self.elements
            .as_ref()
            .map(|s| s.elements.as_slice())
            .ok_or(ExtractError::MissingSidecar(slot))
    }

    fn lookup<'a>(records: &'a [ElementRecord], bbox: &BBox, accept: impl Fn(&ElementRecord) -> bool) -> Option<&'a ElementRecord> {
        if let Some(r) = records.iter().find(|r| r.bbox == *bbox && accept(r)) {
            return Some(r);
        }
        records
            .iter()
            .filter(|r| accept(r))
            .map(|r| (iou(&r.bbox, bbox), r))
            .filter(|(v, _)| *v >= LOOKUP_IOU)
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, r)| r)
    }
}

impl ElementDetector for AnnotationSuite {
    fn detect(&self, _image: Option<&RgbImage>) -> Result<DetectorOutput, ExtractError> {
        let detections = self
            .records("element_detector")?
            .iter()
            .map(|r| Detection {
                bbox: r.bbox,
                etype: r.etype,
                confidence: r.confidence.unwrap_or(1.0),
                text: r.text.clone().filter(|t| !t.trim().is_empty()),
            })
            .collect();
        Ok(DetectorOutput { detections })
    }
}

impl TextRecognizer for AnnotationSuite {
    fn recognize(&self, _image: Option<&RgbImage>) -> Result<Vec<TextLine>, ExtractError> {
        let ocr = self.ocr.as_ref().ok_or(ExtractError::MissingSidecar("text_recognizer"))?;
        Ok(ocr.lines.iter().map(|l| TextLine { bbox: l.bbox, text: l.text.clone() }).collect())
    }
}

impl IconClassifier for AnnotationSuite {
    fn classify(&self, crop: &CropRequest<'_>) -> Result<Option<IconClass>, ExtractError> {
        let records = self.records("icon_classifier")?;
        let rec = Self::lookup(records, &crop.bbox, |r| r.etype.is_image())
            .ok_or(ExtractError::MissingAnnotation { element: crop.element, bbox: crop.bbox })?;
        Ok(rec.icon)
    }
}

impl StatusClassifier for AnnotationSuite {
    fn classify(&self, crop: &CropRequest<'_>) -> Result<WidgetStatus, ExtractError> {
        let records = self.records("status_classifier")?;
        Ok(Self::lookup(records, &crop.bbox, |r| r.etype.has_status())
            .and_then(|r| r.status)
            .unwrap_or(WidgetStatus::Unknown))
    }
}

impl<T: ElementDetector + ?Sized> ElementDetector for Arc<T> {
    fn detect(&self, image: Option<&RgbImage>) -> Result<DetectorOutput, ExtractError> {
        (**self).detect(image)
    }
}

impl<T: TextRecognizer + ?Sized> TextRecognizer for Arc<T> {
    fn recognize(&self, image: Option<&RgbImage>) -> Result<Vec<TextLine>, ExtractError> {
        (**self).recognize(image)
    }
}

impl<T: IconClassifier + ?Sized> IconClassifier for Arc<T> {
    fn classify(&self, crop: &CropRequest<'_>) -> Result<Option<IconClass>, ExtractError> {
        (**self).classify(crop)
    }
}

impl<T: StatusClassifier + ?Sized> StatusClassifier for Arc<T> {
    fn classify(&self, crop: &CropRequest<'_>) -> Result<WidgetStatus, ExtractError> {
        (**self).classify(crop)
    }
}
