//! Per-type trigger logic.

use super::rules::{RuleSet, RuleSpec, TextPattern, Thresholds};
use super::taxonomy::DpType;
use super::view::View;
use super::{finding, Evidence, Finding};
use crate::geometry::{contains, iou, BBox};
use crate::model::{ElementId, IconClass, Rgb, WidgetStatus};
use crate::visual::contrast;

pub(super) fn evaluate(rule: &RuleSpec, rules: &RuleSet, v: &View<'_>) -> Vec<Finding> {
    use DpType::*;
    let th = &rules.thresholds;
    let evidence_sets: Vec<Vec<Evidence>> = match rule.dp_type {
        NgPopupAd => popup_ad(rules, v),
        NgRate => rate(rule, v),
        NgUpgrade | FaSocialPyramid | FaGamification | FaWatchAd | FaPayAvoidAds => text_only(rule, v),
        ObIntermediateCurrency => intermediate_currency(rule, v),
        SnForcedContinuity => forced_continuity(rule, v),
        IiPreselectionChecked => preselection_checked(rule, th, v),
        IiPreselectionNoCheckbox => no_checkbox(rule, v),
        IiFalseHierarchy => false_hierarchy(rule, th, v),
        IiDisguisedAd => disguised_ad(rules, v),
        IiSmallClose => small_close(th, v),
        FaPrivacyZuckering => privacy_zuckering(rule, th, v),
        FaCountdownAd => countdown_ad(rule, rules, v),
    };
    evidence_sets.into_iter().filter_map(|ev| finding(v.screen, rule, ev)).collect()
}

fn role(slot: &str, span: &str) -> String {
    format!("{slot}:{}", span.trim())
}

/// Elements whose text matches any pattern, with the slot-tagged role.
fn text_hits(v: &View<'_>, slot: &str, patterns: &[TextPattern]) -> Vec<(ElementId, String)> {
    v.ids()
        .filter_map(|id| {
            let text = v.text(id)?;
            patterns.iter().find_map(|p| p.find(text)).map(|span| (id, role(slot, span)))
        })
        .collect()
}

fn center_distance(a: &BBox, b: &BBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

/// Candidate closest to `from` by center distance; ties go to the lower id.
fn nearest(v: &View<'_>, from: ElementId, candidates: impl IntoIterator<Item = ElementId>) -> Option<ElementId> {
    let b = v.bbox(from);
    candidates
        .into_iter()
        .map(|c| (center_distance(&b, &v.bbox(c)), c))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, c)| c)
}

/// A widget belongs to a text element when it sits on the same row
/// (centers within `reach` text heights vertically) or is stacked right
/// above/below it (centers within `reach` heights horizontally and the
/// vertical gap within `reach` heights).
fn adjacent(th: &Thresholds, text: &BBox, widget: &BBox) -> bool {
    let reach = th.adjacency * f64::from(text.height());
    let (tx, ty) = text.center();
    let (wx, wy) = widget.center();
    if (ty - wy).abs() <= reach {
        return true;
    }
    let gap = f64::from(widget.y1.saturating_sub(text.y2).max(text.y1.saturating_sub(widget.y2)));
    (tx - wx).abs() <= reach && gap <= reach
}

fn adjacent_widget(th: &Thresholds, v: &View<'_>, text: ElementId) -> Option<ElementId> {
    let tb = v.bbox(text);
    let widgets: Vec<ElementId> =
        v.ids().filter(|&w| w != text && v.element(w).etype.has_status() && adjacent(th, &tb, &v.bbox(w))).collect();
    nearest(v, text, widgets)
}

/// Ad indicators: badge text first (reading order), then template icons.
fn indicators(rules: &RuleSet, v: &View<'_>) -> (Vec<(ElementId, String)>, Vec<(ElementId, String)>) {
    let text = text_hits(v, "ad-text", &rules.ad_indicator);
    let icons = v
        .ids()
        .filter_map(|id| v.icon(id).filter(|i| i.is_template_only()).map(|i| (id, format!("template:{i}"))))
        .filter(|(id, _)| !text.iter().any(|(t, _)| t == id))
        .collect();
    (text, icons)
}

/// Smallest dialog-like element enclosing `id`.
fn popup_container(th: &Thresholds, v: &View<'_>, id: ElementId) -> Option<ElementId> {
    let inner = v.bbox(id);
    let (w, area) = (f64::from(v.screen.width), v.screen.area() as f64);
    v.ids()
        .filter(|&c| c != id)
        .filter(|&c| {
            let b = v.bbox(c);
            let frac = b.area() as f64 / area;
            contains(&b, &inner)
                && b.area() > inner.area()
                && (th.popup_min_area..=th.popup_max_area).contains(&frac)
                && f64::from(b.x1) >= th.popup_margin * w
                && f64::from(v.screen.width.saturating_sub(b.x2)) >= th.popup_margin * w
        })
        .min_by_key(|&c| (v.bbox(c).area(), c))
}

fn popup_ad(rules: &RuleSet, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let (text, icons) = indicators(rules, v);
    text.into_iter()
        .chain(icons)
        .filter_map(|(id, r)| {
            let c = popup_container(&rules.thresholds, v, id)?;
            Some(vec![Evidence { element: id, role: r }, Evidence { element: c, role: "region:popup".into() }])
        })
        .collect()
}

fn rate(rule: &RuleSpec, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let stars: Vec<ElementId> = v.ids().filter(|&i| v.icon(i) == Some(IconClass::Star)).collect();
    text_hits(v, "text", rule.slot("text"))
        .into_iter()
        .filter_map(|(t, r)| {
            let s = nearest(v, t, stars.iter().copied())?;
            let (_, sy) = v.bbox(s).center();
            let half = f64::from(v.bbox(s).height()) / 2.0;
            let mut ev = vec![Evidence { element: t, role: r }];
            ev.extend(
                stars
                    .iter()
                    .filter(|&&o| (v.bbox(o).center().1 - sy).abs() <= half)
                    .map(|&o| Evidence { element: o, role: "icon:star".into() }),
            );
            Some(ev)
        })
        .collect()
}

fn text_only(rule: &RuleSpec, v: &View<'_>) -> Vec<Vec<Evidence>> {
    text_hits(v, "text", rule.slot("text")).into_iter().map(|(element, role)| vec![Evidence { element, role }]).collect()
}

fn intermediate_currency(rule: &RuleSpec, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let virt = text_hits(v, "virtual", rule.slot("virtual"));
    let real = text_hits(v, "real", rule.slot("real"));
    let distinct = virt.iter().any(|(a, _)| real.iter().any(|(b, _)| a != b));
    if !distinct {
        return Vec::new();
    }
    let mut ev: Vec<Evidence> = virt.into_iter().map(|(element, role)| Evidence { element, role }).collect();
    for (element, role) in real {
        if !ev.iter().any(|e| e.element == element) {
            ev.push(Evidence { element, role });
        }
    }
    ev.sort();
    vec![ev]
}

fn forced_continuity(rule: &RuleSpec, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let charges = text_hits(v, "charge", rule.slot("charge"));
    text_hits(v, "trial", rule.slot("trial"))
        .into_iter()
        .filter_map(|(t, r)| {
            if charges.iter().any(|(c, _)| *c == t) {
                return Some(vec![Evidence { element: t, role: r }]);
            }
            let c = nearest(v, t, charges.iter().map(|(c, _)| *c))?;
            let cr = charges.iter().find(|(x, _)| *x == c).unwrap().1.clone();
            Some(vec![Evidence { element: t, role: r }, Evidence { element: c, role: cr }])
        })
        .collect()
}

fn preselection_checked(rule: &RuleSpec, th: &Thresholds, v: &View<'_>) -> Vec<Vec<Evidence>> {
    text_hits(v, "text", rule.slot("text"))
        .into_iter()
        .filter_map(|(t, r)| {
            let w = adjacent_widget(th, v, t)?;
            (v.status(w) == WidgetStatus::Checked)
                .then(|| vec![Evidence { element: t, role: r }, Evidence { element: w, role: "status:checked".into() }])
        })
        .collect()
}

fn no_checkbox(rule: &RuleSpec, v: &View<'_>) -> Vec<Vec<Evidence>> {
    if v.ids().any(|i| v.element(i).etype.has_status()) {
        return Vec::new();
    }
    text_only(rule, v)
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0[0], c.0[1], c.0[2])
}

fn false_hierarchy(rule: &RuleSpec, th: &Thresholds, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let dismissive = rule.slot("dismissive");
    let mut out = Vec::new();
    for (g, members) in v.groups().iter().enumerate() {
        let with_text: Vec<ElementId> = members.iter().copied().filter(|&m| v.visible(m) && v.text(m).is_some()).collect();
        let dismiss: Vec<(ElementId, &str)> = with_text
            .iter()
            .filter_map(|&m| dismissive.iter().find_map(|p| p.find(v.text(m).unwrap())).map(|s| (m, s)))
            .collect();
        let accept: Vec<ElementId> = with_text.iter().copied().filter(|m| !dismiss.iter().any(|(d, _)| d == m)).collect();
        for (d, span) in dismiss {
            let Some(a) = nearest(v, d, accept.iter().copied()) else { continue };
            let (Some((bg_a, _)), Some((bg_d, _))) = (v.colors(a), v.colors(d)) else { continue };
            let reference = surrounding_background(v, a, d).unwrap_or(bg_d);
            let (sal_a, sal_d) = (contrast(bg_a, reference), contrast(bg_d, reference));
            if contrast(bg_a, bg_d) > th.saliency && sal_a > sal_d {
                out.push(vec![
                    Evidence { element: d, role: format!("{};group:{g}", role("dismissive", span)) },
                    Evidence { element: a, role: format!("color:{}>{};group:{g}", hex(bg_a), hex(bg_d)) },
                ]);
            }
        }
    }
    out
}

/// Background the two buttons are drawn on: the smallest element enclosing
/// both, else the screen background.
fn surrounding_background(v: &View<'_>, a: ElementId, d: ElementId) -> Option<Rgb> {
    let (ba, bd) = (v.bbox(a), v.bbox(d));
    v.ids()
        .filter(|&c| c != a && c != d)
        .filter(|&c| {
            let b = v.bbox(c);
            contains(&b, &ba) && contains(&b, &bd) && v.colors(c).is_some()
        })
        .min_by_key(|&c| (v.bbox(c).area(), c))
        .and_then(|c| v.colors(c).map(|p| p.0))
        .or_else(|| v.background())
}

fn similar_size(tol: f64, a: &BBox, b: &BBox) -> bool {
    let close = |x: u32, y: u32| (f64::from(x) - f64::from(y)).abs() <= tol * f64::from(x);
    close(a.width(), b.width()) && close(a.height(), b.height())
}

fn disguised_ad(rules: &RuleSet, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let th = &rules.thresholds;
    let (text, icons) = indicators(rules, v);
    let screen_area = v.screen.area() as f64;
    let mut out = Vec::new();
    for (i, r) in text.into_iter().chain(icons) {
        if popup_container(th, v, i).is_some() {
            continue;
        }
        let ib = v.bbox(i);
        let Some(block) = v
            .ids()
            .filter(|&c| c != i)
            .filter(|&c| {
                let b = v.bbox(c);
                contains(&b, &ib) && b.area() > ib.area() && (b.area() as f64) < th.popup_max_area * screen_area
            })
            .min_by_key(|&c| (v.bbox(c).area(), c))
        else {
            continue;
        };
        let bb = v.bbox(block);
        let siblings = || {
            v.ids().filter(move |&s| {
                s != block && s != i && v.element(s).etype == v.element(block).etype && iou(&bb, &v.bbox(s)) == 0.0
            })
        };
        let by_size = nearest(v, block, siblings().filter(|&s| similar_size(th.sibling_size, &bb, &v.bbox(s))));
        let block_role = match by_size {
            Some(s) => format!("block:similar-to=#{s}"),
            None => {
                let Some(g) = v.group_of(block) else { continue };
                let Some(s) = nearest(v, block, siblings().filter(|&s| v.group_of(s) == Some(g))) else { continue };
                format!("block:group={g},similar-to=#{s}")
            }
        };
        out.push(vec![Evidence { element: i, role: r }, Evidence { element: block, role: block_role }]);
    }
    out
}

fn small_close(th: &Thresholds, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let limit = th.small_close * f64::from(v.screen.width);
    v.ids()
        .filter_map(|id| {
            let icon = v.icon(id)?;
            let b = v.bbox(id);
            let small = f64::from(b.width()) < limit && f64::from(b.height()) < limit;
            let role = match icon {
                IconClass::Close => "icon:close",
                IconClass::AdClose => "template:ad_close",
                _ => return None,
            };
            small.then(|| vec![Evidence { element: id, role: role.into() }])
        })
        .collect()
}

fn privacy_zuckering(rule: &RuleSpec, th: &Thresholds, v: &View<'_>) -> Vec<Vec<Evidence>> {
    text_hits(v, "text", rule.slot("text"))
        .into_iter()
        .map(|(t, r)| {
            let mut ev = vec![Evidence { element: t, role: r }];
            if let Some(w) = adjacent_widget(th, v, t).filter(|&w| v.status(w) == WidgetStatus::Checked) {
                ev.push(Evidence { element: w, role: "status:checked".into() });
            }
            ev
        })
        .collect()
}

fn countdown_ad(rule: &RuleSpec, rules: &RuleSet, v: &View<'_>) -> Vec<Vec<Evidence>> {
    let (text, icons) = indicators(rules, v);
    text_hits(v, "text", rule.slot("text"))
        .into_iter()
        .filter_map(|(c, r)| {
            let mut ev = vec![Evidence { element: c, role: r }];
            if let Some((_, ir)) = text.iter().find(|(t, _)| *t == c) {
                ev[0].role = format!("{};{ir}", ev[0].role);
                return Some(ev);
            }
            // badge text is preferred so that hiding template icons never
            // changes which indicator is cited
            let pick = nearest(v, c, text.iter().map(|(t, _)| *t)).or_else(|| nearest(v, c, icons.iter().map(|(t, _)| *t)))?;
            let ir = text.iter().chain(icons.iter()).find(|(t, _)| *t == pick).unwrap().1.clone();
            ev.push(Evidence { element: pick, role: ir });
            Some(ev)
        })
        .collect()
}
