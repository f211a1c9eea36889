//! Read-only view of a screen with disabled stages masked out.

use crate::geometry::BBox;
use crate::model::{ElementId, ElementOrigin, IconClass, Rgb, Screen, Stage, StageSet, UIElement, WidgetStatus};

pub struct View<'a> {
    pub screen: &'a Screen,
    pub stages: StageSet,
}

impl<'a> View<'a> {
    pub fn new(screen: &'a Screen, stages: StageSet) -> Self {
        View { screen, stages }
    }

    pub fn element(&self, id: ElementId) -> &'a UIElement {
        &self.screen.elements[id]
    }

    /// Template detections do not exist when template matching is off.
    pub fn visible(&self, id: ElementId) -> bool {
        self.screen.elements[id].origin != ElementOrigin::Template || self.stages.contains(Stage::TemplateMatching)
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.screen.elements.len()).filter(move |&i| self.visible(i))
    }

    pub fn text(&self, id: ElementId) -> Option<&'a str> {
        self.element(id).text()
    }

    pub fn icon(&self, id: ElementId) -> Option<IconClass> {
        let e = self.element(id);
        let stage = if e.origin == ElementOrigin::Template { Stage::TemplateMatching } else { Stage::IconSemantic };
        if self.stages.contains(stage) {
            e.icon
        } else {
            None
        }
    }

    pub fn status(&self, id: ElementId) -> WidgetStatus {
        let e = self.element(id);
        if !e.etype.has_status() {
            WidgetStatus::NotApplicable
        } else if self.stages.contains(Stage::StatusRecognition) {
            e.status
        } else {
            WidgetStatus::Unknown
        }
    }

    pub fn colors(&self, id: ElementId) -> Option<(Rgb, Rgb)> {
        let e = self.element(id);
        if !self.stages.contains(Stage::ColorGrouping) {
            return None;
        }
        Some((e.bg_color?, e.fg_color?))
    }

    pub fn background(&self) -> Option<Rgb> {
        self.screen.background.filter(|_| self.stages.contains(Stage::ColorGrouping))
    }

    pub fn groups(&self) -> &'a [Vec<ElementId>] {
        if self.stages.contains(Stage::ColorGrouping) {
            &self.screen.groups
        } else {
            &[]
        }
    }

    pub fn group_of(&self, id: ElementId) -> Option<usize> {
        self.element(id).group_id.filter(|_| self.stages.contains(Stage::ColorGrouping))
    }

    pub fn bbox(&self, id: ElementId) -> BBox {
        self.element(id).bbox
    }
}
