//! JSON file formats: element and OCR sidecars, ground truth, findings reports.
//!
//! All readers go through [`parse_json`], which reports the JSON path of the
//! offending record together with line/column when the syntax is broken.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::checker::{DpType, Strategy, Tier};
use crate::error::{Error, SchemaError};
use crate::geometry::BBox;
use crate::model::{ElementType, IconClass, WidgetStatus};

/// Output of an element detector for one screenshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementSidecar {
    pub image: String,
    pub width: u32,
    pub height: u32,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub bbox: BBox,
    #[serde(rename = "type")]
    pub etype: ElementType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icon: Option<IconClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<WidgetStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

/// Output of a text recognizer for one screenshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrSidecar {
    pub lines: Vec<LineRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub bbox: BBox,
    pub text: String,
}

/// Annotated dark-pattern instances of one screenshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub image: String,
    pub instances: Vec<GroundTruthRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub dp_type: DpType,
    pub container: BBox,
    #[serde(default)]
    pub elements: Vec<GroundTruthElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthElement {
    pub bbox: BBox,
    #[serde(rename = "type")]
    pub etype: ElementType,
}

/// Findings emitted by `analyze`. Field order is the canonical output order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingsReport {
    pub image: String,
    pub findings: Vec<FindingRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub dp_type: DpType,
    pub strategy: Strategy,
    pub tier: Tier,
    pub container: BBox,
    pub evidence: Vec<EvidenceRecord>,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub element: usize,
    pub role: String,
}

impl FindingsReport {
    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Deserializes `text`, naming the failing record on error.
pub fn parse_json<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, SchemaError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: Result<T, _> = serde_path_to_error::deserialize(&mut de);
    let value = parsed.map_err(|e| {
        let record = e.path().to_string();
        let inner = e.into_inner();
        SchemaError {
            file: file.to_string(),
            record: if record == "." { "<root>".into() } else { record },
            message: strip_position(&inner.to_string()),
            location: Some((inner.line(), inner.column())),
        }
    })?;
    de.end().map_err(|e| SchemaError {
        file: file.to_string(),
        record: "<root>".into(),
        message: strip_position(&e.to_string()),
        location: Some((e.line(), e.column())),
    })?;
    Ok(value)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn violation(file: &str, record: String, message: impl Into<String>) -> SchemaError {
    SchemaError { file: file.to_string(), record, message: message.into(), location: None }
}

fn check_box(file: &str, record: String, b: &BBox, width: u32, height: u32) -> Result<(), SchemaError> {
    if !b.is_valid() {
        return Err(violation(file, record, format!("degenerate box {:?}", <[u32; 4]>::from(*b))));
    }
    if !b.fits_within(width, height) {
        return Err(violation(
            file,
            record,
            format!("box {:?} exceeds the {width}x{height} screen", <[u32; 4]>::from(*b)),
        ));
    }
    Ok(())
}

impl ElementSidecar {
    pub fn parse(file: &str, text: &str) -> Result<Self, SchemaError> {
        let s: ElementSidecar = parse_json(file, text)?;
        s.validate(file)?;
        Ok(s)
    }

    /// Checks the invariants serde cannot express.
    pub fn validate(&self, file: &str) -> Result<(), SchemaError> {
        if self.width == 0 || self.height == 0 {
            return Err(violation(file, "width".into(), "screen dimensions must be positive"));
        }
        for (i, e) in self.elements.iter().enumerate() {
            check_box(file, format!("elements[{i}].bbox"), &e.bbox, self.width, self.height)?;
            if let Some(c) = e.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(violation(file, format!("elements[{i}].confidence"), format!("{c} outside [0, 1]")));
                }
            }
            if let Some(icon) = e.icon {
                if icon.is_template_only() {
                    return Err(violation(
                        file,
                        format!("elements[{i}].icon"),
                        format!("`{icon}` is produced by template matching only"),
                    ));
                }
                if !e.etype.is_image() {
                    return Err(violation(file, format!("elements[{i}].icon"), format!("icons apply to image elements, not {}", e.etype)));
                }
            }
            if let Some(st) = e.status {
                if st != WidgetStatus::NotApplicable && !e.etype.has_status() {
                    return Err(violation(file, format!("elements[{i}].status"), format!("{} has no checked state", e.etype)));
                }
            }
        }
        Ok(())
    }
}

impl OcrSidecar {
    pub fn parse(file: &str, text: &str, width: u32, height: u32) -> Result<Self, SchemaError> {
        let s: OcrSidecar = parse_json(file, text)?;
        for (i, l) in s.lines.iter().enumerate() {
            check_box(file, format!("lines[{i}].bbox"), &l.bbox, width, height)?;
            if l.text.trim().is_empty() {
                return Err(violation(file, format!("lines[{i}].text"), "text line is empty"));
            }
        }
        Ok(s)
    }
}

impl GroundTruthFile {
    pub fn parse(file: &str, text: &str) -> Result<Self, SchemaError> {
        let g: GroundTruthFile = parse_json(file, text)?;
        for (i, inst) in g.instances.iter().enumerate() {
            if !inst.container.is_valid() {
                return Err(violation(file, format!("instances[{i}].container"), "degenerate container"));
            }
        }
        Ok(g)
    }
}

impl FindingsReport {
    pub fn parse(file: &str, text: &str) -> Result<Self, SchemaError> {
        let r: FindingsReport = parse_json(file, text)?;
        for (i, f) in r.findings.iter().enumerate() {
            if f.evidence.is_empty() {
                return Err(violation(file, format!("findings[{i}].evidence"), "evidence must not be empty"));
            }
            if f.strategy != f.dp_type.strategy() {
                return Err(violation(file, format!("findings[{i}].strategy"), format!("{} belongs to {}", f.dp_type, f.dp_type.strategy())));
            }
        }
        Ok(r)
    }
}

/// Reads a file to a string, mapping a missing path to [`Error::MissingInput`].
pub fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingInput(path.to_path_buf())
        } else {
            Error::Io { path: path.to_path_buf(), source }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIDECAR: &str = r#"{
  "image": "a.png", "width": 100, "height": 200,
  "elements": [
    {"bbox": [0, 0, 50, 20], "type": "Button", "text": "OK"},
    {"bbox": [10, 30, 30, 50], "type": "ImageView", "icon": "star", "confidence": 0.9},
    {"bbox": [60, 30, 80, 50], "type": "CheckBox", "status": "checked"}
  ]
}"#;

    #[test]
    fn parses_element_sidecar() {
        let s = ElementSidecar::parse("a.json", SIDECAR).unwrap();
        assert_eq!(s.elements.len(), 3);
        assert_eq!(s.elements[1].icon, Some(IconClass::Star));
        assert_eq!(s.elements[2].etype, ElementType::Checkbox);
    }

    #[test]
    fn truncated_file_names_record_and_line() {
        let cut = &SIDECAR[..SIDECAR.find("\"ImageView\"").unwrap() + 5];
        let err = ElementSidecar::parse("a.json", cut).unwrap_err();
        assert!(err.record.starts_with("elements[1]"), "{}", err.record);
        assert_eq!(err.location.unwrap().0, 5);
    }

    #[test]
    fn bad_field_names_path() {
        let bad = SIDECAR.replace("\"star\"", "\"starr\"");
        let err = ElementSidecar::parse("a.json", &bad).unwrap_err();
        assert_eq!(err.record, "elements[1].icon");
        assert!(err.to_string().contains("starr"));
    }

    #[test]
    fn rejects_out_of_screen_box() {
        let bad = SIDECAR.replace("[60, 30, 80, 50]", "[60, 30, 180, 50]");
        let err = ElementSidecar::parse("a.json", &bad).unwrap_err();
        assert_eq!(err.record, "elements[2].bbox");
    }

    #[test]
    fn rejects_template_icon_and_misplaced_status() {
        let bad = SIDECAR.replace("\"star\"", "\"ad_close\"");
        assert_eq!(ElementSidecar::parse("a.json", &bad).unwrap_err().record, "elements[1].icon");
        let bad = SIDECAR.replace("\"text\": \"OK\"", "\"status\": \"checked\"");
        assert_eq!(ElementSidecar::parse("a.json", &bad).unwrap_err().record, "elements[0].status");
    }

    #[test]
    fn ocr_rejects_empty_text() {
        let err = OcrSidecar::parse("o.json", r#"{"lines":[{"bbox":[0,0,5,5],"text":"  "}]}"#, 10, 10).unwrap_err();
        assert_eq!(err.record, "lines[0].text");
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(parse_json::<OcrSidecar>("o.json", r#"{"lines":[]} x"#).is_err());
    }
}
