//! End-to-end analysis of one screenshot.

use std::path::{Path, PathBuf};

use image::RgbImage;

use crate::checker::{check_screen, CheckOutcome, RuleSet};
use crate::config::Config;
use crate::error::{Error, SchemaError};
use crate::extract::{classify_icons, classify_status, non_max_suppression, AnnotationSuite, ExtractorSuite, Warning};
use crate::fusion::merge_text_lines;
use crate::grouping::group_elements;
use crate::model::{Screen, Stage, StageSet, UIElement};
use crate::schema::{read_text, ElementSidecar, FindingsReport, OcrSidecar};
use crate::visual::{annotate_colors, annotate_templates, Template};

/// Configured engine: immutable after construction and shareable across
/// worker threads.
#[derive(Debug, Clone)]
pub struct Engine {
    pub config: Config,
    pub rules: RuleSet,
    pub templates: Vec<Template>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub screen: Screen,
    pub outcome: CheckOutcome,
    pub warnings: Vec<Warning>,
}

impl Analysis {
    pub fn report(&self) -> FindingsReport {
        crate::report::findings_report(&self.screen.name, &self.outcome.findings)
    }
}

/// Sidecar locations for an image: `<stem>.elements.json` and
/// `<stem>.ocr.json` next to it unless given explicitly.
pub fn sidecar_paths(image: &Path, elements: Option<&Path>, ocr: Option<&Path>) -> (PathBuf, PathBuf) {
    let dir = image.parent().unwrap_or(Path::new(""));
    let stem = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    (
        elements.map(Path::to_path_buf).unwrap_or_else(|| dir.join(format!("{stem}.elements.json"))),
        ocr.map(Path::to_path_buf).unwrap_or_else(|| dir.join(format!("{stem}.ocr.json"))),
    )
}

impl Engine {
    pub fn new(config: Config) -> Result<Engine, Error> {
        config.validate()?;
        let rules = match &config.rules {
            Some(p) => RuleSet::load(p)?,
            None => RuleSet::builtin(),
        };
        let templates = match &config.template_dir {
            Some(d) => Template::load_dir(d)?,
            None => Template::bundled(),
        };
        Ok(Engine { config, rules, templates })
    }

    pub fn stages(&self) -> StageSet {
        self.config.stages()
    }

    /// Runs every extraction stage enabled in `stages`.
    pub fn extract(&self, mut screen: Screen, suite: &ExtractorSuite, stages: StageSet) -> Result<(Screen, Vec<Warning>), Error> {
        let c = &self.config;
        let mut warnings = Vec::new();
        let image = screen.image.as_ref();
        let raw = suite.element_detector.detect(image)?;
        let kept = non_max_suppression(&raw, c.nms_iou, c.nms_confidence);
        let lines = suite.text_recognizer.recognize(image)?;
        let elements: Vec<UIElement> = kept
            .detections
            .into_iter()
            .map(|d| {
                let mut e = UIElement::new(d.bbox, d.etype).with_confidence(d.confidence);
                e.text = d.text;
                e
            })
            .collect();
        screen.elements = merge_text_lines(elements, &lines, c.fusion_match);
        if stages.contains(Stage::IconSemantic) {
            warnings.extend(classify_icons(&mut screen, suite.icon_classifier.as_ref())?);
        }
        if stages.contains(Stage::TemplateMatching) {
            warnings.extend(annotate_templates(&mut screen, &self.templates, &c.scales, c.ncc_threshold));
        }
        if stages.contains(Stage::StatusRecognition) {
            warnings.extend(classify_status(&mut screen, suite.status_classifier.as_ref())?);
        }
        if stages.contains(Stage::ColorGrouping) {
            annotate_colors(&mut screen);
            group_elements(&mut screen, &c.grouping);
        }
        Ok((screen, warnings))
    }

    /// Extraction followed by the rule check, both under `stages`.
    pub fn analyze_screen(&self, screen: Screen, suite: &ExtractorSuite, stages: StageSet) -> Result<Analysis, Error> {
        let (screen, warnings) = self.extract(screen, suite, stages)?;
        let outcome = check_screen(&screen, &self.rules, stages);
        for a in &outcome.abstentions {
            log::info!("{}: {a}", screen.name);
        }
        for w in &warnings {
            log::warn!("{}: [{}] {}", screen.name, w.stage, w.message);
        }
        Ok(Analysis { screen, outcome, warnings })
    }

    /// Loads an image plus its annotation sidecars and analyzes it with the
    /// configured stages.
    pub fn analyze_path(&self, image: &Path, elements: Option<&Path>, ocr: Option<&Path>) -> Result<Analysis, Error> {
        let (screen, suite) = load_annotated(image, elements, ocr)?;
        self.analyze_screen(screen, &ExtractorSuite::from_annotations(suite), self.stages())
    }
}

pub fn load_image(path: &Path) -> Result<RgbImage, Error> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    Ok(image::open(path).map_err(|source| Error::Image { path: path.to_path_buf(), source })?.to_rgb8())
}

/// Reads a screenshot and its sidecars, checking they describe the same
/// raster.
pub fn load_annotated(image: &Path, elements: Option<&Path>, ocr: Option<&Path>) -> Result<(Screen, AnnotationSuite), Error> {
    let raster = load_image(image)?;
    let (ep, op) = sidecar_paths(image, elements, ocr);
    let efile = ep.display().to_string();
    let el = ElementSidecar::parse(&efile, &read_text(&ep)?)?;
    let (w, h) = raster.dimensions();
    if (el.width, el.height) != (w, h) {
        return Err(SchemaError {
            file: efile,
            record: "width".into(),
            message: format!("sidecar describes {}x{} but the image is {w}x{h}", el.width, el.height),
            location: None,
        }
        .into());
    }
    let oc = OcrSidecar::parse(&op.display().to_string(), &read_text(&op)?, w, h)?;
    let name = image.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok((Screen::with_image(name, raster), AnnotationSuite::new(el, oc)))
}
