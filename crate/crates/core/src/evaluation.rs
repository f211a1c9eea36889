//! Matching findings against ground truth and the detection metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::checker::{check_screen, DpType, Finding, RuleSet, Strategy};
use crate::geometry::{iou, BBox};
use crate::model::{Screen, Stage, StageSet};
use crate::schema::{FindingRecord, GroundTruthRecord};

/// Default container IoU for a true positive.
pub const EVAL_IOU: f64 = 0.5;

/// A typed region, either predicted or annotated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub dp_type: DpType,
    pub container: BBox,
}

impl From<&Finding> for Instance {
    fn from(f: &Finding) -> Self {
        Instance { dp_type: f.dp_type, container: f.container }
    }
}

impl From<&FindingRecord> for Instance {
    fn from(f: &FindingRecord) -> Self {
        Instance { dp_type: f.dp_type, container: f.container }
    }
}

impl From<&GroundTruthRecord> for Instance {
    fn from(g: &GroundTruthRecord) -> Self {
        Instance { dp_type: g.dp_type, container: g.container }
    }
}

/// Detection tallies for one type or strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub n_gt: u64,
    pub n_det: u64,
    pub tp: u64,
}

impl Tally {
    pub fn fp(&self) -> u64 {
        self.n_det - self.tp
    }

    pub fn fn_(&self) -> u64 {
        self.n_gt - self.tp
    }

    pub fn is_empty(&self) -> bool {
        self.n_gt == 0 && self.n_det == 0
    }

    pub fn prf(&self) -> Prf {
        Prf::from_counts(self.tp, self.fp(), self.fn_())
    }
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Tally) {
        self.n_gt += o.n_gt;
        self.n_det += o.n_det;
        self.tp += o.tp;
    }
}

/// Per-type tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub per_type: BTreeMap<DpType, Tally>,
}

impl EvalCounts {
    pub fn merge(&mut self, other: &EvalCounts) {
        for (k, v) in &other.per_type {
            *self.per_type.entry(*k).or_default() += *v;
        }
    }

    pub fn total(&self) -> Tally {
        let mut t = Tally::default();
        for v in self.per_type.values() {
            t += *v;
        }
        t
    }

    pub fn per_strategy(&self) -> BTreeMap<Strategy, Tally> {
        let mut out: BTreeMap<Strategy, Tally> = BTreeMap::new();
        for (k, v) in &self.per_type {
            *out.entry(k.strategy()).or_default() += *v;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

impl Prf {
    /// P, R and F1 with 0/0 taken as 0.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Prf {
        let (tp, fp, fn_) = (tp as f64, fp as f64, fn_ as f64);
        Self::from_pr(ratio(tp, tp + fp), ratio(tp, tp + fn_))
    }

    pub fn from_pr(precision: f64, recall: f64) -> Prf {
        Prf { precision, recall, f1: ratio(2.0 * precision * recall, precision + recall) }
    }

    fn mean(items: &[Prf]) -> Prf {
        let n = items.len() as f64;
        if items.is_empty() {
            return Prf::default();
        }
        Prf {
            precision: items.iter().map(|p| p.precision).sum::<f64>() / n,
            recall: items.iter().map(|p| p.recall).sum::<f64>() / n,
            f1: items.iter().map(|p| p.f1).sum::<f64>() / n,
        }
    }
}

fn canonical(a: &Instance) -> (Strategy, DpType, u32, u32, u32, u32) {
    let c = a.container;
    (a.dp_type.strategy(), a.dp_type, c.y1, c.x1, c.y2, c.x2)
}

/// Greedy one-to-one matching. Findings are taken in canonical order; each
/// claims the unmatched ground truth of its type with the highest container
/// IoU, provided it reaches `iou_threshold`.
pub fn match_findings(findings: &[Instance], gts: &[Instance], iou_threshold: f64) -> EvalCounts {
    let mut counts = EvalCounts::default();
    for g in gts {
        counts.per_type.entry(g.dp_type).or_default().n_gt += 1;
    }
    let mut order: Vec<&Instance> = findings.iter().collect();
    order.sort_by_key(|f| canonical(f));
    let mut used = vec![false; gts.len()];
    for f in order {
        let t = counts.per_type.entry(f.dp_type).or_default();
        t.n_det += 1;
        let best = gts
            .iter()
            .enumerate()
            .filter(|(i, g)| !used[*i] && g.dp_type == f.dp_type)
            .map(|(i, g)| (i, iou(&g.container, &f.container)))
            .filter(|(_, v)| *v >= iou_threshold)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        if let Some((i, _)) = best {
            used[i] = true;
            t.tp += 1;
        }
    }
    counts
}

/// Outcome for one screenshot in the binary benign/malicious task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScreenOutcome {
    /// Ground truth has at least one instance.
    pub malicious: bool,
    /// The checker reported at least one finding.
    pub flagged: bool,
}

/// Fraction of screens whose flagged state equals their ground truth.
pub fn binary_accuracy(outcomes: &[ScreenOutcome]) -> f64 {
    let correct = outcomes.iter().filter(|o| o.malicious == o.flagged).count();
    ratio(correct as f64, outcomes.len() as f64)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    pub per_type: BTreeMap<DpType, Tally>,
    pub per_strategy: BTreeMap<Strategy, Tally>,
    /// Unweighted mean of the per-strategy P/R/F1 over strategies with data.
    pub macro_avg: Prf,
    /// P/R/F1 of the global counts.
    pub micro_avg: Prf,
    pub binary_accuracy: Option<f64>,
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn prf_json(p: &Prf) -> Value {
    json!({"precision": round4(p.precision), "recall": round4(p.recall), "f1": round4(p.f1)})
}

fn tally_json(t: &Tally) -> Value {
    let p = t.prf();
    json!({
        "n_gt": t.n_gt, "n_det": t.n_det, "tp": t.tp, "fp": t.fp(), "fn": t.fn_(),
        "precision": round4(p.precision), "recall": round4(p.recall), "f1": round4(p.f1),
    })
}

impl MetricsReport {
    pub fn from_counts(counts: &EvalCounts) -> Self {
        let mut r = Self::from_strategy_tallies(&counts.per_strategy());
        r.per_type = counts.per_type.clone();
        r
    }

    /// Aggregates from strategy-level tallies alone.
    pub fn from_strategy_tallies(per_strategy: &BTreeMap<Strategy, Tally>) -> Self {
        let present: Vec<Prf> = per_strategy.values().filter(|t| !t.is_empty()).map(Tally::prf).collect();
        let mut total = Tally::default();
        for t in per_strategy.values() {
            total += *t;
        }
        MetricsReport {
            per_type: BTreeMap::new(),
            per_strategy: per_strategy.clone(),
            macro_avg: Prf::mean(&present),
            micro_avg: total.prf(),
            binary_accuracy: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let types: serde_json::Map<String, Value> =
            self.per_type.iter().map(|(k, v)| (k.to_string(), tally_json(v))).collect();
        let strategies: serde_json::Map<String, Value> =
            self.per_strategy.iter().map(|(k, v)| (k.to_string(), tally_json(v))).collect();
        let mut v = json!({
            "per_type": types,
            "per_strategy": strategies,
            "macro": prf_json(&self.macro_avg),
            "micro": prf_json(&self.micro_avg),
        });
        if let Some(a) = self.binary_accuracy {
            v["binary_accuracy"] = json!(round4(a));
        }
        v
    }

    /// Plain-text table: types, then strategies, then the averages.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<30} {:>6} {:>6} {:>9} {:>7} {:>7}", "type", "gt", "det", "precision", "recall", "f1");
        let row = |s: &mut String, name: &str, t: &Tally| {
            let p = t.prf();
            let _ = writeln!(s, "{name:<30} {:>6} {:>6} {:>9.4} {:>7.4} {:>7.4}", t.n_gt, t.n_det, p.precision, p.recall, p.f1);
        };
        for (k, t) in &self.per_type {
            row(&mut s, k.as_str(), t);
        }
        for (k, t) in &self.per_strategy {
            row(&mut s, k.as_str(), t);
        }
        for (name, p) in [("macro average", &self.macro_avg), ("micro average", &self.micro_avg)] {
            let _ = writeln!(s, "{name:<30} {:>6} {:>6} {:>9.4} {:>7.4} {:>7.4}", "", "", p.precision, p.recall, p.f1);
        }
        if let Some(a) = self.binary_accuracy {
            let _ = writeln!(s, "binary accuracy {a:.4}");
        }
        s
    }
}

/// The cumulative configurations of the ablation study, in order.
pub fn ablation_configs() -> Vec<(&'static str, StageSet)> {
    let base = StageSet::empty();
    let icon = base.with(Stage::IconSemantic);
    let template = icon.with(Stage::TemplateMatching);
    let status = template.with(Stage::StatusRecognition);
    let all = status.with(Stage::ColorGrouping);
    vec![
        ("Base Model (Text-only)", base),
        ("+ Icon Semantic", icon),
        ("+ Template Matching", template),
        ("+ Status Recognition", status),
        ("+ Color&Grouping", all),
    ]
}

/// Checks every screen under `stages` and scores against its ground truth.
pub fn evaluate_screens(
    screens: &[Screen],
    gts: &[Vec<GroundTruthRecord>],
    rules: &RuleSet,
    stages: StageSet,
    iou_threshold: f64,
) -> MetricsReport {
    use rayon::prelude::*;
    assert_eq!(screens.len(), gts.len(), "one ground-truth list per screen");
    let per_screen: Vec<(EvalCounts, ScreenOutcome)> = screens
        .par_iter()
        .zip(gts.par_iter())
        .map(|(s, g)| {
            let found = check_screen(s, rules, stages).findings;
            let pred: Vec<Instance> = found.iter().map(Instance::from).collect();
            let gt: Vec<Instance> = g.iter().map(Instance::from).collect();
            let outcome = ScreenOutcome { malicious: !gt.is_empty(), flagged: !pred.is_empty() };
            (match_findings(&pred, &gt, iou_threshold), outcome)
        })
        .collect();
    let mut counts = EvalCounts::default();
    for (c, _) in &per_screen {
        counts.merge(c);
    }
    let outcomes: Vec<ScreenOutcome> = per_screen.iter().map(|p| p.1).collect();
    let mut report = MetricsReport::from_counts(&counts);
    report.binary_accuracy = Some(binary_accuracy(&outcomes));
    report
}

/// One report per ablation configuration, from text-only to all stages.
/// Screens must carry every property layer; disabled layers are masked at
/// check time.
pub fn run_ablation(
    screens: &[Screen],
    gts: &[Vec<GroundTruthRecord>],
    rules: &RuleSet,
    iou_threshold: f64,
) -> Vec<(&'static str, MetricsReport)> {
    ablation_configs()
        .into_iter()
        .map(|(name, stages)| (name, evaluate_screens(screens, gts, rules, stages, iou_threshold)))
        .collect()
}
