//! Rule registry: text patterns, thresholds and per-type settings, loaded
//! from TOML. The built-in registry is compiled into the crate.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use super::taxonomy::DpType;
use crate::error::{Error, RuleError};
use crate::schema::read_text;

const DEFAULT_RULES: &str = include_str!("../../rules/default_rules.toml");

/// A compiled, case-insensitive text pattern.
#[derive(Debug, Clone)]
pub struct TextPattern {
    /// `<dp_type>/<slot>/<index>`, or `ad_indicator/<index>`.
    pub id: String,
    pub dp_type: Option<DpType>,
    pub source: String,
    regex: Regex,
}

impl TextPattern {
    pub fn new(id: impl Into<String>, dp_type: Option<DpType>, source: &str) -> Result<Self, RuleError> {
        let id = id.into();
        let regex = RegexBuilder::new(source)
            .case_insensitive(true)
            .build()
            .map_err(|e| RuleError::BadPattern { id: id.clone(), source: e })?;
        Ok(TextPattern { id, dp_type, source: source.to_string(), regex })
    }

    /// First match in `text`, if any.
    pub fn find<'t>(&self, text: &'t str) -> Option<&'t str> {
        self.regex.find(text).map(|m| m.as_str())
    }
}

/// Case-insensitive match verdict.
pub fn match_text(pattern: &TextPattern, text: &str) -> bool {
    pattern.find(text).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub popup_min_area: f64,
    pub popup_max_area: f64,
    pub popup_margin: f64,
    pub adjacency: f64,
    pub small_close: f64,
    pub saliency: f64,
    pub sibling_size: f64,
    pub dedup_iou: f64,
}

impl Thresholds {
    fn validate(&self) -> Result<(), RuleError> {
        let unit = [
            ("popup_min_area", self.popup_min_area),
            ("popup_max_area", self.popup_max_area),
            ("popup_margin", self.popup_margin),
            ("small_close", self.small_close),
            ("sibling_size", self.sibling_size),
            ("dedup_iou", self.dedup_iou),
        ];
        for (name, value) in unit {
            if !(0.0..=1.0).contains(&value) {
                return Err(RuleError::Threshold { name, value });
            }
        }
        if self.popup_min_area > self.popup_max_area {
            return Err(RuleError::Threshold { name: "popup_min_area", value: self.popup_min_area });
        }
        for (name, value) in [("adjacency", self.adjacency), ("saliency", self.saliency)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(RuleError::Threshold { name, value });
            }
        }
        Ok(())
    }
}

/// Declarative settings of one dark-pattern rule.
#[derive(Debug, Clone)]
pub struct RuleSpec {
    pub dp_type: DpType,
    pub enabled: bool,
    /// Explanation template; `{text}` expands to the quoted text of the
    /// first text evidence.
    pub explanation: String,
    pub patterns: BTreeMap<&'static str, Vec<TextPattern>>,
}

impl RuleSpec {
    pub fn slot(&self, name: &str) -> &[TextPattern] {
        self.patterns.get(name).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub thresholds: Thresholds,
    pub ad_indicator: Vec<TextPattern>,
    /// One entry per [`DpType`], in [`DpType::ALL`] order.
    pub rules: Vec<RuleSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    thresholds: Option<toml::Table>,
    ad_indicator: Option<RawIndicator>,
    #[serde(default)]
    rules: Vec<RawRule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndicator {
    patterns: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    dp_type: String,
    enabled: Option<bool>,
    explanation: Option<String>,
    patterns: Option<BTreeMap<String, Vec<String>>>,
}

fn compile_slot(dp: DpType, slot: &'static str, sources: &[String]) -> Result<Vec<TextPattern>, RuleError> {
    sources
        .iter()
        .enumerate()
        .map(|(i, s)| TextPattern::new(format!("{dp}/{slot}/{i}"), Some(dp), s))
        .collect()
}

fn compile_indicator(sources: &[String]) -> Result<Vec<TextPattern>, RuleError> {
    sources.iter().enumerate().map(|(i, s)| TextPattern::new(format!("ad_indicator/{i}"), None, s)).collect()
}

impl RuleSet {
    /// The built-in registry.
    pub fn builtin() -> RuleSet {
        Self::parse_complete(DEFAULT_RULES).expect("built-in rules are valid")
    }

    /// Parses a self-contained rules file that defines every type.
    fn parse_complete(text: &str) -> Result<RuleSet, RuleError> {
        let raw: RawFile = toml::from_str(text)?;
        let thresholds: Thresholds = raw
            .thresholds
            .ok_or(RuleError::MissingSlot { dp_type: "<file>".into(), slot: "thresholds" })?
            .try_into()?;
        thresholds.validate()?;
        let ad_indicator = compile_indicator(
            &raw.ad_indicator.ok_or(RuleError::MissingSlot { dp_type: "<file>".into(), slot: "ad_indicator" })?.patterns,
        )?;
        let mut rules: Vec<Option<RuleSpec>> = vec![None; DpType::ALL.len()];
        for r in raw.rules {
            let dp: DpType = r.dp_type.parse().map_err(|_| RuleError::UnknownType(r.dp_type.clone()))?;
            let idx = DpType::ALL.iter().position(|d| *d == dp).unwrap();
            if rules[idx].is_some() {
                return Err(RuleError::Duplicate(r.dp_type));
            }
            let patterns = Self::compile_patterns(dp, r.patterns.unwrap_or_default(), true)?;
            rules[idx] = Some(RuleSpec {
                dp_type: dp,
                enabled: r.enabled.unwrap_or(true),
                explanation: r.explanation.unwrap_or_else(|| dp.to_string()),
                patterns,
            });
        }
        let rules = rules
            .into_iter()
            .zip(DpType::ALL)
            .map(|(r, dp)| r.ok_or(RuleError::MissingSlot { dp_type: dp.to_string(), slot: "rule" }))
            .collect::<Result<_, _>>()?;
        Ok(RuleSet { thresholds, ad_indicator, rules })
    }

    fn compile_patterns(
        dp: DpType,
        raw: BTreeMap<String, Vec<String>>,
        require_all: bool,
    ) -> Result<BTreeMap<&'static str, Vec<TextPattern>>, RuleError> {
        let slots = dp.pattern_slots();
        let mut out = BTreeMap::new();
        for (name, sources) in raw {
            let slot = slots
                .iter()
                .copied()
                .find(|s| *s == name)
                .ok_or_else(|| RuleError::UnexpectedSlot { dp_type: dp.to_string(), slot: name.clone() })?;
            out.insert(slot, compile_slot(dp, slot, &sources)?);
        }
        if require_all {
            if let Some(missing) = slots.iter().find(|s| !out.contains_key(*s)) {
                return Err(RuleError::MissingSlot { dp_type: dp.to_string(), slot: missing });
            }
        }
        Ok(out)
    }

    /// Applies a user rules file on top of this registry. Thresholds
    /// override key by key; a rule entry overrides only the fields and
    /// pattern slots it names.
    pub fn apply_overrides(&mut self, text: &str) -> Result<(), RuleError> {
        let raw: RawFile = toml::from_str(text)?;
        if let Some(t) = raw.thresholds {
            let mut merged = toml::Table::try_from(self.thresholds).expect("thresholds serialize");
            for (k, v) in t {
                merged.insert(k, v);
            }
            let thresholds: Thresholds = merged.try_into()?;
            thresholds.validate()?;
            self.thresholds = thresholds;
        }
        if let Some(ind) = raw.ad_indicator {
            self.ad_indicator = compile_indicator(&ind.patterns)?;
        }
        let mut seen = HashSet::new();
        for r in raw.rules {
            let dp: DpType = r.dp_type.parse().map_err(|_| RuleError::UnknownType(r.dp_type.clone()))?;
            if !seen.insert(dp) {
                return Err(RuleError::Duplicate(r.dp_type));
            }
            let patterns = Self::compile_patterns(dp, r.patterns.unwrap_or_default(), false)?;
            let rule = self.rule_mut(dp);
            if let Some(e) = r.enabled {
                rule.enabled = e;
            }
            if let Some(x) = r.explanation {
                rule.explanation = x;
            }
            rule.patterns.extend(patterns);
        }
        Ok(())
    }

    /// Built-in registry with the overrides in `path` applied.
    pub fn load(path: &Path) -> Result<RuleSet, Error> {
        let text = read_text(path)?;
        let mut rules = Self::builtin();
        rules.apply_overrides(&text)?;
        Ok(rules)
    }

    pub fn rule(&self, dp: DpType) -> &RuleSpec {
        &self.rules[DpType::ALL.iter().position(|d| *d == dp).unwrap()]
    }

    pub fn rule_mut(&mut self, dp: DpType) -> &mut RuleSpec {
        &mut self.rules[DpType::ALL.iter().position(|d| *d == dp).unwrap()]
    }

    pub fn set_all_enabled(&mut self, enabled: bool) {
        for r in &mut self.rules {
            r.enabled = enabled;
        }
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hits(dp: DpType, slot: &str, text: &str) -> bool {
        RuleSet::builtin().rule(dp).slot(slot).iter().any(|p| match_text(p, text))
    }

    #[test]
    fn builtin_registry_loads() {
        let r = RuleSet::builtin();
        assert_eq!(r.rules.len(), 16);
        assert!(r.rules.iter().all(|x| x.enabled));
        assert_eq!(r.thresholds.small_close, 0.035);
        assert_eq!(r.thresholds.popup_margin, 0.04);
    }

    #[test]
    fn example_texts_match() {
        assert!(hits(DpType::FaPayAvoidAds, "text", "Remove ads for $1.99"));
        assert!(hits(DpType::NgRate, "text", "If you enjoy our app, please rate us!"));
        assert!(!hits(DpType::FaPayAvoidAds, "text", "Advanced radar display"));
        assert!(hits(DpType::FaWatchAd, "text", "Watch an ad to unlock this level"));
        assert!(hits(DpType::IiPreselectionChecked, "text", "I agree to the Terms of Service"));
        assert!(hits(DpType::IiFalseHierarchy, "dismissive", "No thanks"));
        assert!(hits(DpType::IiFalseHierarchy, "dismissive", "Not now"));
        assert!(!hits(DpType::IiFalseHierarchy, "dismissive", "No ads forever"));
        assert!(hits(DpType::SnForcedContinuity, "trial", "7 days free, then $84.00/year"));
        assert!(hits(DpType::SnForcedContinuity, "charge", "7 days free, then $84.00/year"));
        assert!(hits(DpType::ObIntermediateCurrency, "virtual", "500 Gems"));
        assert!(hits(DpType::ObIntermediateCurrency, "real", "$4.99"));
    }

    #[test]
    fn ad_indicator_is_anchored() {
        let r = RuleSet::builtin();
        let ind = |t: &str| r.ad_indicator.iter().any(|p| match_text(p, t));
        assert!(ind("AD"));
        assert!(ind("Ads by Google"));
        assert!(ind("Sponsored"));
        assert!(!ind("Add to cart"));
        assert!(!ind("Skip ad in 5s"));
        assert!(!ind("Remove Ads"));
    }

    #[test]
    fn overrides_merge_field_by_field() {
        let mut r = RuleSet::builtin();
        r.apply_overrides(
            r#"
            [thresholds]
            saliency = 80.0
            [[rules]]
            dp_type = "NG-UPGRADE"
            enabled = false
            [[rules]]
            dp_type = "FA-WATCH-AD"
            [rules.patterns]
            text = ['\bview\b.{0,20}\bads?\b']
            "#,
        )
        .unwrap();
        assert_eq!(r.thresholds.saliency, 80.0);
        assert_eq!(r.thresholds.adjacency, 1.5);
        assert!(!r.rule(DpType::NgUpgrade).enabled);
        assert!(r.rule(DpType::FaWatchAd).slot("text").iter().any(|p| match_text(p, "view ads")));
        assert!(!r.rule(DpType::FaWatchAd).slot("text").iter().any(|p| match_text(p, "watch an ad")));
        assert!(r.rule(DpType::FaWatchAd).explanation.contains("watching"));
    }

    #[test]
    fn bad_rules_files_are_rejected() {
        let mut r = RuleSet::builtin();
        assert!(matches!(r.apply_overrides("[[rules]]\ndp_type = \"NG-NOPE\""), Err(RuleError::UnknownType(_))));
        assert!(matches!(
            r.apply_overrides("[[rules]]\ndp_type = \"NG-RATE\"\n[rules.patterns]\ntext = ['(']"),
            Err(RuleError::BadPattern { .. })
        ));
        assert!(matches!(
            r.apply_overrides("[[rules]]\ndp_type = \"NG-RATE\"\n[rules.patterns]\nstars = ['x']"),
            Err(RuleError::UnexpectedSlot { .. })
        ));
        assert!(matches!(r.apply_overrides("[thresholds]\nsmall_close = 2.0"), Err(RuleError::Threshold { .. })));
        assert!(matches!(r.apply_overrides("[thresholds]\nbogus = 1.0"), Err(RuleError::Parse(_))));
        assert!(matches!(r.apply_overrides("rules = 3"), Err(RuleError::Parse(_))));
    }
}
