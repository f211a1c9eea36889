//! Knowledge-driven checker: evaluates the dark-pattern rules against a
//! fully annotated screen and emits evidence-carrying findings.

pub mod rules;
pub mod taxonomy;
mod triggers;
pub mod view;

use std::collections::BTreeMap;

pub use rules::{match_text, RuleSet, RuleSpec, TextPattern, Thresholds};
pub use taxonomy::{DpType, Strategy, Tier};
pub use view::View;

use crate::geometry::{iou, union_box, BBox};
use crate::model::{ElementId, Screen, Stage, StageSet};

/// One element cited by a finding, with the property that fired.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Evidence {
    pub element: ElementId,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub dp_type: DpType,
    pub tier: Tier,
    /// Union of the evidence boxes, clipped to the screen.
    pub container: BBox,
    pub evidence: Vec<Evidence>,
    pub explanation: String,
}

impl Finding {
    pub fn strategy(&self) -> Strategy {
        self.dp_type.strategy()
    }

    fn sort_key(&self) -> (Strategy, DpType, u32, u32, u32, u32) {
        let c = self.container;
        (self.strategy(), self.dp_type, c.y1, c.x1, c.y2, c.x2)
    }
}

/// A rule that did not run because a stage it needs was disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Abstention {
    pub dp_type: DpType,
    pub missing: Stage,
}

impl std::fmt::Display for Abstention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "abstained({}, {})", self.dp_type, self.missing)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckOutcome {
    pub findings: Vec<Finding>,
    pub abstentions: Vec<Abstention>,
}

/// Builds a finding from its evidence; `None` when there is none.
pub(crate) fn finding(screen: &Screen, rule: &RuleSpec, evidence: Vec<Evidence>) -> Option<Finding> {
    let boxes: Vec<BBox> = evidence.iter().map(|e| screen.elements[e.element].bbox).collect();
    let container = union_box(&boxes).ok()?.clip(screen.width, screen.height);
    let quoted = evidence
        .iter()
        .find_map(|e| screen.elements[e.element].text())
        .map(|t| format!("\"{}\"", t.trim()))
        .unwrap_or_default();
    let explanation = rule.explanation.replace("{text}", &quoted).trim().to_string();
    Some(Finding { dp_type: rule.dp_type, tier: rule.dp_type.tier(), container, evidence, explanation })
}

fn missing_stage(dp: DpType, stages: StageSet) -> Option<Stage> {
    if dp == DpType::IiSmallClose {
        // either icon source suffices
        if !stages.contains(Stage::IconSemantic) && !stages.contains(Stage::TemplateMatching) {
            return Some(Stage::IconSemantic);
        }
        return None;
    }
    dp.required_stages().iter().copied().find(|s| !stages.contains(*s))
}

/// Runs one rule. Returns the abstention instead when a stage the rule
/// needs is disabled.
pub fn evaluate_rule(rule: &RuleSpec, rules: &RuleSet, screen: &Screen, stages: StageSet) -> Result<Vec<Finding>, Abstention> {
    if let Some(missing) = missing_stage(rule.dp_type, stages) {
        return Err(Abstention { dp_type: rule.dp_type, missing });
    }
    let view = View::new(screen, stages);
    Ok(triggers::evaluate(rule, rules, &view))
}

/// Runs every enabled rule, merges same-type findings whose containers
/// overlap at IoU >= `dedup_iou`, and sorts by (strategy, type, y1, x1).
pub fn check_screen(screen: &Screen, rules: &RuleSet, stages: StageSet) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    let mut raw = Vec::new();
    for rule in rules.rules.iter().filter(|r| r.enabled) {
        match evaluate_rule(rule, rules, screen, stages) {
            Ok(f) => raw.extend(f),
            Err(a) => out.abstentions.push(a),
        }
    }
    raw.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.evidence.cmp(&b.evidence)));
    out.findings = dedup(screen, raw, rules.thresholds.dedup_iou);
    out
}

fn dedup(screen: &Screen, mut findings: Vec<Finding>, threshold: f64) -> Vec<Finding> {
    loop {
        let mut merged = false;
        let mut kept: Vec<Finding> = Vec::new();
        for f in findings {
            match kept.iter_mut().find(|k| k.dp_type == f.dp_type && iou(&k.container, &f.container) >= threshold) {
                Some(k) => {
                    let mut by_elem: BTreeMap<ElementId, String> = k.evidence.drain(..).map(|e| (e.element, e.role)).collect();
                    for e in f.evidence {
                        by_elem.entry(e.element).or_insert(e.role);
                    }
                    k.evidence = by_elem.into_iter().map(|(element, role)| Evidence { element, role }).collect();
                    let boxes: Vec<BBox> = k.evidence.iter().map(|e| screen.elements[e.element].bbox).collect();
                    k.container = union_box(&boxes).expect("evidence is non-empty").clip(screen.width, screen.height);
                    merged = true;
                }
                None => kept.push(f),
            }
        }
        kept.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.evidence.cmp(&b.evidence)));
        findings = kept;
        if !merged {
            return findings;
        }
    }
}
