//! Engine configuration file (TOML).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{ConfigError, Error};
use crate::extract::{NMS_CONFIDENCE, NMS_IOU};
use crate::fusion::MATCH_THRESHOLD;
use crate::grouping::GroupingParams;
use crate::model::{Stage, StageSet};
use crate::schema::read_text;
use crate::visual::{NCC_THRESHOLD, SCALES};

/// Every key with its default value. Relative paths resolve against the
/// directory of the config file.
pub const DOCUMENTED_DEFAULTS: &str = r#"# Detections below this confidence are dropped before suppression.
nms_confidence = 0.65
# Same-type detections overlapping at this IoU are duplicates.
nms_iou = 0.5
# IoU at which an OCR line is assigned to an element (containment also counts).
fusion_match = 0.5
# Minimum normalized cross-correlation for a template match.
ncc_threshold = 0.8
# Template sizes searched, relative to the template's own size.
scales = [0.75, 1.0, 1.25, 1.5]
# Directory of <icon_class>.png patches replacing the bundled templates.
# template_dir = "templates"
# Rules file applied on top of the built-in rules.
# rules = "rules.toml"
# Stages to skip: "icon", "template", "status", "color_grouping".
disable = []
# Container IoU for a finding to match a ground-truth instance.
eval_iou = 0.5

[grouping]
# DBSCAN neighborhood radius over the weighted feature distance.
alpha = 0.18
# Minimum neighborhood size, the element itself included.
beta = 2

[grouping.weights]
type = 0.4
size = 0.25
position = 0.25
text = 0.1
"#;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub nms_confidence: f64,
    pub nms_iou: f64,
    pub fusion_match: f64,
    pub ncc_threshold: f64,
    pub scales: Vec<f64>,
    pub template_dir: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub disable: Vec<Stage>,
    pub eval_iou: f64,
    pub grouping: GroupingParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            nms_confidence: NMS_CONFIDENCE,
            nms_iou: NMS_IOU,
            fusion_match: MATCH_THRESHOLD,
            ncc_threshold: NCC_THRESHOLD,
            scales: SCALES.to_vec(),
            template_dir: None,
            rules: None,
            disable: Vec::new(),
            eval_iou: crate::evaluation::EVAL_IOU,
            grouping: GroupingParams::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let c: Config = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, Error> {
        let mut c = Self::parse(&read_text(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut c.template_dir, &mut c.rules].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = [
            ("nms_confidence", self.nms_confidence),
            ("nms_iou", self.nms_iou),
            ("fusion_match", self.fusion_match),
            ("ncc_threshold", self.ncc_threshold),
            ("eval_iou", self.eval_iou),
        ];
        for (field, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid { field, message: format!("{v} outside [0, 1]") });
            }
        }
        if self.scales.is_empty() || self.scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(ConfigError::Invalid { field: "scales", message: "need at least one positive scale".into() });
        }
        self.grouping.validate()
    }

    /// Stages left enabled.
    pub fn stages(&self) -> StageSet {
        self.disable.iter().fold(StageSet::all(), |s, d| s.without(*d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_defaults_equal_builtin_defaults() {
        assert_eq!(Config::parse(DOCUMENTED_DEFAULTS).unwrap(), Config::default());
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn disable_list_masks_stages() {
        let c = Config::parse(r#"disable = ["template", "color_grouping"]"#).unwrap();
        let s = c.stages();
        assert!(s.contains(Stage::IconSemantic));
        assert!(!s.contains(Stage::TemplateMatching));
        assert!(!s.contains(Stage::ColorGrouping));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::parse("nms_iou = 1.5").is_err());
        assert!(Config::parse("scales = []").is_err());
        assert!(Config::parse("disable = [\"ocr\"]").is_err());
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("[grouping]\nbeta = 1").is_err());
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("engine.toml");
        std::fs::write(&path, "rules = \"r.toml\"\n").unwrap();
        let c = Config::load(&path).unwrap();
        assert_eq!(c.rules.unwrap(), dir.path().join("r.toml"));
    }
}
