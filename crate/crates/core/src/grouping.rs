//! Groups related text and button elements with DBSCAN over a composite
//! feature distance (type, size, position, text).

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::model::{ElementId, Screen, UIElement};

/// Weights of the four distance terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    #[serde(rename = "type")]
    pub etype: f64,
    pub size: f64,
    pub position: f64,
    pub text: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroupingParams {
    /// Neighborhood radius (eps).
    pub alpha: f64,
    /// Minimum neighborhood size, the point itself included (minPts).
    pub beta: usize,
    pub weights: Weights,
}

impl Default for GroupingParams {
    fn default() -> Self {
        GroupingParams {
            alpha: 0.18,
            beta: 2,
            weights: Weights { etype: 0.4, size: 0.25, position: 0.25, text: 0.1 },
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        GroupingParams::default().weights
    }
}

impl GroupingParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |field, message: String| Err(ConfigError::Invalid { field, message });
        if !(self.alpha > 0.0) {
            return bad("grouping.alpha", format!("must be positive, got {}", self.alpha));
        }
        if self.beta < 2 {
            return bad("grouping.beta", format!("must be at least 2, got {}", self.beta));
        }
        let w = self.weights;
        let all = [w.etype, w.size, w.position, w.text];
        if all.iter().any(|v| !(*v >= 0.0)) {
            return bad("grouping.weights", "weights must be non-negative".into());
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return bad("grouping.weights", format!("weights must sum to 1, got {sum}"));
        }
        Ok(())
    }
}

fn text_distance(a: Option<&str>, b: Option<&str>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(_), None) | (None, Some(_)) => 0.5,
        (Some(a), Some(b)) => {
            let (a, b) = (a.to_lowercase(), b.to_lowercase());
            let longest = a.chars().count().max(b.chars().count());
            if longest == 0 {
                0.0
            } else {
                strsim::levenshtein(&a, &b) as f64 / longest as f64
            }
        }
    }
}

/// Weighted feature distance between two elements on a `frame` =
/// (width, height) screen.
pub fn pairwise_distance(a: &UIElement, b: &UIElement, params: &GroupingParams, frame: (u32, u32)) -> f64 {
    let (w, h) = (f64::from(frame.0), f64::from(frame.1));
    let type_d = if a.etype == b.etype { 0.0 } else { 1.0 };
    let dw = (f64::from(a.bbox.width()) - f64::from(b.bbox.width())).abs();
    let dh = (f64::from(a.bbox.height()) - f64::from(b.bbox.height())).abs();
    let size_d = (dw + dh) / (w + h);
    let (ax, ay) = a.bbox.center();
    let (bx, by) = b.bbox.center();
    let pos_d = (ax - bx).hypot(ay - by) / w.hypot(h);
    let text_d = text_distance(a.text(), b.text());
    let k = &params.weights;
    k.etype * type_d + k.size * size_d + k.position * pos_d + k.text * text_d
}

/// DBSCAN result; ids index the input slice.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Clustering {
    /// Clusters in discovery order, members ascending.
    pub groups: Vec<Vec<usize>>,
    pub outliers: Vec<usize>,
}

/// DBSCAN with eps = `alpha` (inclusive) and minPts = `beta`.
///
/// Points are visited in reading order of their boxes; a border point
/// reachable from several clusters joins the first one discovered.
pub fn dbscan(candidates: &[UIElement], params: &GroupingParams, frame: (u32, u32)) -> Clustering {
    let n = candidates.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].bbox.reading_key(), i));

    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            order
                .iter()
                .copied()
                .filter(|&j| pairwise_distance(&candidates[i], &candidates[j], params, frame) <= params.alpha)
                .collect()
        })
        .collect();

    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &p in &order {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        if neighbors[p].len() < params.beta {
            continue;
        }
        let c = groups.len();
        groups.push(Vec::new());
        label[p] = Some(c);
        let mut queue: Vec<usize> = neighbors[p].clone();
        let mut head = 0;
        while head < queue.len() {
            let q = queue[head];
            head += 1;
            if label[q].is_none() {
                label[q] = Some(c);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            if neighbors[q].len() >= params.beta {
                queue.extend_from_slice(&neighbors[q]);
            }
        }
    }
    let mut outliers = Vec::new();
    for (i, l) in label.iter().enumerate() {
        match l {
            Some(c) => groups[*c].push(i),
            None => outliers.push(i),
        }
    }
    Clustering { groups, outliers }
}

/// Clusters the screen's TextView/Button/ImageButton elements, setting
/// `group_id` on members and filling `screen.groups`.
pub fn group_elements(screen: &mut Screen, params: &GroupingParams) {
    let ids: Vec<ElementId> = (0..screen.elements.len())
        .filter(|&i| screen.elements[i].etype.is_grouping_candidate())
        .collect();
    let candidates: Vec<UIElement> = ids.iter().map(|&i| screen.elements[i].clone()).collect();
    let clustering = dbscan(&candidates, params, (screen.width, screen.height));
    for e in &mut screen.elements {
        e.group_id = None;
    }
    screen.groups = clustering
        .groups
        .iter()
        .enumerate()
        .map(|(g, members)| {
            members
                .iter()
                .map(|&m| {
                    screen.elements[ids[m]].group_id = Some(g);
                    ids[m]
                })
                .collect()
        })
        .collect();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use crate::model::ElementType;
    use proptest::prelude::*;

    const FRAME: (u32, u32) = (360, 640);

    fn button(x: u32, y: u32, w: u32, h: u32, text: &str) -> UIElement {
        UIElement::new(BBox::from_xywh(x, y, w, h), ElementType::Button).with_text(text)
    }

    #[test]
    fn identical_elements_have_zero_distance() {
        let a = button(10, 10, 80, 40, "OK");
        assert_eq!(pairwise_distance(&a, &a, &GroupingParams::default(), FRAME), 0.0);
    }

    #[test]
    fn distance_is_position_term_for_shifted_twins() {
        let p = GroupingParams::default();
        let diag = 360f64.hypot(640.0);
        let dx = 0.1 * diag;
        // integer boxes: pick a shift whose center distance is exact
        let shift = dx.round() as u32;
        let a = button(10, 100, 80, 40, "OK");
        let b = button(10 + shift, 100, 80, 40, "OK");
        let want = p.weights.position * f64::from(shift) / diag;
        assert!((pairwise_distance(&a, &b, &p, FRAME) - want).abs() < 1e-12);
        assert!((want - p.weights.position * 0.1).abs() < 0.001);
    }

    #[test]
    fn type_mismatch_costs_type_weight() {
        let p = GroupingParams::default();
        let a = button(10, 10, 40, 40, "x");
        let mut b = a.clone();
        b.etype = ElementType::Checkbox;
        assert!((pairwise_distance(&a, &b, &p, FRAME) - p.weights.etype).abs() < 1e-12);
    }

    #[test]
    fn text_terms() {
        assert_eq!(text_distance(None, None), 0.0);
        assert_eq!(text_distance(Some("a"), None), 0.5);
        assert_eq!(text_distance(Some("OK"), Some("ok")), 0.0);
        assert!((text_distance(Some("kitten"), Some("sitting")) - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn dialog_buttons_group_and_loner_is_outlier() {
        let els = vec![
            button(40, 400, 120, 44, "Install"),
            button(200, 400, 120, 44, "No thanks"),
            UIElement::new(BBox::from_xywh(10, 10, 300, 30), ElementType::TextView).with_text("Welcome back to the app"),
        ];
        let c = dbscan(&els, &GroupingParams::default(), FRAME);
        assert_eq!(c.groups, vec![vec![0, 1]]);
        assert_eq!(c.outliers, vec![2]);
    }

    #[test]
    fn single_element_is_an_outlier() {
        let c = dbscan(&[button(0, 0, 10, 10, "x")], &GroupingParams::default(), FRAME);
        assert!(c.groups.is_empty());
        assert_eq!(c.outliers, vec![0]);
    }

    #[test]
    fn params_validation() {
        assert!(GroupingParams::default().validate().is_ok());
        let mut p = GroupingParams::default();
        p.beta = 1;
        assert!(p.validate().is_err());
        p = GroupingParams::default();
        p.weights.text = 0.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn group_elements_skips_non_candidates() {
        let mut s = Screen::new("s", 360, 640);
        s.push(button(40, 400, 120, 44, "Yes"));
        s.push(UIElement::new(BBox::from_xywh(40, 460, 120, 44), ElementType::Checkbox));
        s.push(button(200, 400, 120, 44, "No"));
        group_elements(&mut s, &GroupingParams::default());
        assert_eq!(s.groups, vec![vec![0, 2]]);
        assert_eq!(s.elements[1].group_id, None);
        assert_eq!(s.elements[2].group_id, Some(0));
    }

    fn arb_element() -> impl Strategy<Value = UIElement> {
        (0u32..300, 0u32..600, 10u32..60, 10u32..40, 0usize..3, prop::option::of("[a-c]{1,4}")).prop_map(
            |(x, y, w, h, t, text)| {
                let etype = [ElementType::Button, ElementType::TextView, ElementType::ImageButton][t];
                let mut e = UIElement::new(BBox::from_xywh(x, y, w, h), etype);
                e.text = text;
                e
            },
        )
    }

    proptest! {
        #[test]
        fn distance_symmetric(a in arb_element(), b in arb_element()) {
            let p = GroupingParams::default();
            prop_assert_eq!(pairwise_distance(&a, &b, &p, FRAME), pairwise_distance(&b, &a, &p, FRAME));
            prop_assert!(pairwise_distance(&a, &b, &p, FRAME) >= 0.0);
        }

        #[test]
        fn partition_covers_candidates(els in prop::collection::vec(arb_element(), 0..30)) {
            let c = dbscan(&els, &GroupingParams::default(), FRAME);
            let mut all: Vec<usize> = c.groups.iter().flatten().copied().chain(c.outliers.iter().copied()).collect();
            all.sort();
            prop_assert_eq!(all, (0..els.len()).collect::<Vec<_>>());
        }

        #[test]
        fn membership_ignores_input_order(
            els in prop::collection::vec(arb_element(), 0..30),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut keys: Vec<_> = els.iter().map(|e| e.bbox.reading_key()).collect();
            keys.sort();
            keys.dedup();
            prop_assume!(keys.len() == els.len());
            let p = GroupingParams::default();
            let mut perm: Vec<usize> = (0..els.len()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let shuffled: Vec<UIElement> = perm.iter().map(|&i| els[i].clone()).collect();
            let canon = |groups: Vec<Vec<usize>>| {
                let mut g: Vec<Vec<usize>> = groups.into_iter().map(|mut v| { v.sort(); v }).collect();
                g.sort();
                g
            };
            let a = canon(dbscan(&els, &p, FRAME).groups);
            let b = canon(dbscan(&shuffled, &p, FRAME).groups.into_iter().map(|g| g.into_iter().map(|i| perm[i]).collect()).collect());
            prop_assert_eq!(a, b);
        }
    }
}
