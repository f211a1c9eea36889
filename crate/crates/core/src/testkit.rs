//! Synthetic annotated screens for tests.
//!
//! A [`FixtureBuilder`] paints flat-colored widgets onto a raster and records
//! the matching element/OCR sidecars and the expected findings. [`corpus`]
//! is the hand-built rule corpus: at least two screens per dark-pattern type
//! plus benign screens.

use std::io;
use std::path::{Path, PathBuf};

use image::{Rgb as Px, RgbImage};

use crate::checker::DpType;
use crate::extract::{AnnotationSuite, ExtractorSuite};
use crate::geometry::{union_box, BBox};
use crate::model::{ElementType, IconClass, Screen, WidgetStatus};
use crate::schema::{ElementRecord, ElementSidecar, GroundTruthFile, GroundTruthRecord, LineRecord, OcrSidecar};
use crate::visual::Template;

pub const WIDTH: u32 = 360;
pub const HEIGHT: u32 = 640;

pub const SCREEN: Px<u8> = Px([245, 245, 245]);
pub const CARD: Px<u8> = Px([255, 255, 255]);
pub const INK: Px<u8> = Px([40, 40, 40]);
pub const MUTED: Px<u8> = Px([120, 120, 120]);
pub const ACCENT: Px<u8> = Px([30, 120, 230]);
pub const GREEN: Px<u8> = Px([40, 170, 80]);
pub const NEUTRAL: Px<u8> = Px([225, 225, 225]);
pub const SOFT: Px<u8> = Px([235, 235, 235]);
pub const DIM: Px<u8> = Px([20, 20, 20]);

/// Shorthand for a box given by corners; panics on an inverted box.
pub fn bx(x1: u32, y1: u32, x2: u32, y2: u32) -> BBox {
    BBox::new(x1, y1, x2, y2).expect("valid fixture box")
}

pub fn union(boxes: &[BBox]) -> BBox {
    union_box(boxes).expect("non-empty union")
}

/// One synthetic screenshot with its sidecars and expected findings.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub image: RgbImage,
    pub elements: ElementSidecar,
    pub ocr: OcrSidecar,
    pub truth: Vec<GroundTruthRecord>,
}

impl Fixture {
    pub fn image_name(&self) -> String {
        format!("{}.png", self.name)
    }

    pub fn is_benign(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn screen(&self) -> Screen {
        Screen::with_image(self.image_name(), self.image.clone())
    }

    pub fn suite(&self) -> ExtractorSuite {
        ExtractorSuite::from_annotations(AnnotationSuite::new(self.elements.clone(), self.ocr.clone()))
    }

    pub fn ground_truth(&self) -> GroundTruthFile {
        GroundTruthFile { image: self.image_name(), instances: self.truth.clone() }
    }

    /// Writes `<name>.png` with its two sidecars into `dir`; returns the
    /// image path.
    pub fn write_inputs(&self, dir: &Path) -> io::Result<PathBuf> {
        let png = dir.join(self.image_name());
        self.image.save(&png).map_err(io::Error::other)?;
        std::fs::write(dir.join(format!("{}.elements.json", self.name)), pretty(&self.elements))?;
        std::fs::write(dir.join(format!("{}.ocr.json", self.name)), pretty(&self.ocr))?;
        Ok(png)
    }

    /// Writes the ground truth as `<name>.json` into `dir`.
    pub fn write_truth(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(format!("{}.json", self.name));
        std::fs::write(&path, pretty(&self.ground_truth()))?;
        Ok(path)
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixture serializes")
}

pub struct FixtureBuilder {
    name: String,
    image: RgbImage,
    elements: Vec<ElementRecord>,
    lines: Vec<LineRecord>,
    truth: Vec<GroundTruthRecord>,
    templates: Vec<Template>,
}

fn paint(img: &mut RgbImage, b: &BBox, c: Px<u8>) {
    for y in b.y1..b.y2.min(img.height()) {
        for x in b.x1..b.x2.min(img.width()) {
            img.put_pixel(x, y, c);
        }
    }
}

/// Stand-in for rendered glyphs: a bar covering the middle of the box.
fn text_bar(b: &BBox) -> BBox {
    let (w, h) = (b.width(), b.height());
    let (dx, dy) = ((w * 3 / 20).max(1), (h * 7 / 20).max(1));
    BBox::new(b.x1 + dx, b.y1 + dy, b.x2 - dx, b.y2 - dy).unwrap_or(*b)
}

impl FixtureBuilder {
    pub fn new(name: &str) -> Self {
        Self::sized(name, WIDTH, HEIGHT)
    }

    pub fn sized(name: &str, width: u32, height: u32) -> Self {
        FixtureBuilder {
            name: name.to_string(),
            image: RgbImage::from_pixel(width, height, SCREEN),
            elements: Vec::new(),
            lines: Vec::new(),
            truth: Vec::new(),
            templates: Template::bundled(),
        }
    }

    fn record(&mut self, bbox: BBox, etype: ElementType) -> &mut ElementRecord {
        self.elements.push(ElementRecord { bbox, etype, text: None, icon: None, status: None, confidence: Some(0.9) });
        self.elements.last_mut().unwrap()
    }

    /// A flat, text-free element such as a card or dialog surface.
    pub fn panel(&mut self, b: BBox, etype: ElementType, fill: Px<u8>) -> BBox {
        paint(&mut self.image, &b, fill);
        self.record(b, etype);
        b
    }

    /// A text-bearing element; the recognizer reports `text` over the whole
    /// box.
    pub fn label(&mut self, b: BBox, etype: ElementType, text: &str, bg: Px<u8>, fg: Px<u8>) -> BBox {
        paint(&mut self.image, &b, bg);
        paint(&mut self.image, &text_bar(&b), fg);
        self.record(b, etype);
        self.lines.push(LineRecord { bbox: b, text: text.to_string() });
        b
    }

    pub fn text(&mut self, b: BBox, text: &str) -> BBox {
        let bg = *self.image.get_pixel(b.x1, b.y1);
        self.label(b, ElementType::TextView, text, bg, INK)
    }

    pub fn button(&mut self, b: BBox, text: &str, bg: Px<u8>, fg: Px<u8>) -> BBox {
        self.label(b, ElementType::Button, text, bg, fg)
    }

    /// An icon the icon classifier labels `icon`.
    pub fn icon(&mut self, b: BBox, etype: ElementType, icon: IconClass, fill: Px<u8>) -> BBox {
        paint(&mut self.image, &b, fill);
        self.record(b, etype).icon = Some(icon);
        b
    }

    /// A two-state widget; checked ones get a filled center.
    pub fn toggle(&mut self, b: BBox, etype: ElementType, status: WidgetStatus) -> BBox {
        paint(&mut self.image, &b, MUTED);
        let inner = bx(b.x1 + 2, b.y1 + 2, b.x2 - 2, b.y2 - 2);
        paint(&mut self.image, &inner, CARD);
        if status == WidgetStatus::Checked {
            paint(&mut self.image, &bx(b.x1 + 4, b.y1 + 4, b.x2 - 4, b.y2 - 4), ACCENT);
        }
        self.record(b, etype).status = Some(status);
        b
    }

    /// Pastes a bundled template at `scale` without annotating it; only the
    /// template matcher can find it.
    pub fn paste(&mut self, icon: IconClass, x: u32, y: u32, scale: f64) -> BBox {
        let t = self.templates.iter().find(|t| t.name == icon).expect("bundled template");
        let patch = t.at_scale(scale);
        for (px, py, p) in patch.enumerate_pixels() {
            self.image.put_pixel(x + px, y + py, Px([p.0[0]; 3]));
        }
        BBox::from_xywh(x, y, patch.width(), patch.height())
    }

    pub fn expect(&mut self, dp_type: DpType, container: BBox) -> &mut Self {
        self.truth.push(GroundTruthRecord { dp_type, container, elements: Vec::new() });
        self
    }

    pub fn build(self) -> Fixture {
        let (width, height) = self.image.dimensions();
        Fixture {
            elements: ElementSidecar {
                image: format!("{}.png", self.name),
                width,
                height,
                elements: self.elements,
            },
            ocr: OcrSidecar { lines: self.lines },
            truth: self.truth,
            image: self.image,
            name: self.name,
        }
    }
}

use ElementType::{Checkbox, ImageButton, ImageView, Switch, TextView, VideoView};

/// A centered dialog surface.
fn dialog(f: &mut FixtureBuilder, b: BBox) -> BBox {
    f.panel(b, ImageView, CARD)
}

fn install_dialog_ad() -> Fixture {
    let mut f = FixtureBuilder::new("install_dialog_ad");
    f.text(bx(16, 20, 200, 44), "Puzzle Quest");
    let d = dialog(&mut f, bx(30, 150, 330, 500));
    f.text(bx(44, 162, 70, 178), "Ad");
    f.panel(bx(60, 200, 300, 380), ImageView, SOFT);
    f.text(bx(60, 390, 300, 414), "Install Candy Kingdom");
    let install = f.button(bx(60, 430, 170, 470), "Install", GREEN, CARD);
    let no = f.button(bx(190, 430, 300, 470), "No thanks", CARD, MUTED);
    f.expect(DpType::NgPopupAd, d).expect(DpType::IiFalseHierarchy, union(&[install, no]));
    f.build()
}

fn popup_ad_sponsored() -> Fixture {
    let mut f = FixtureBuilder::new("popup_ad_sponsored");
    let d = dialog(&mut f, bx(20, 120, 340, 520));
    f.text(bx(32, 130, 110, 148), "Sponsored");
    f.icon(bx(306, 128, 330, 152), ImageButton, IconClass::Close, NEUTRAL);
    f.panel(bx(40, 160, 320, 340), ImageView, SOFT);
    f.button(bx(40, 430, 320, 480), "Get the game", ACCENT, CARD);
    f.expect(DpType::NgPopupAd, d);
    f.build()
}

fn popup_ad_template_only() -> Fixture {
    let mut f = FixtureBuilder::new("popup_ad_template_only");
    let d = dialog(&mut f, bx(30, 180, 330, 460));
    f.paste(IconClass::AdChoicesTriangle, 304, 190, 1.0);
    f.panel(bx(50, 214, 310, 360), ImageView, SOFT);
    f.button(bx(50, 400, 310, 440), "Open", ACCENT, CARD);
    f.expect(DpType::NgPopupAd, d);
    f.build()
}

fn rate_dialog() -> Fixture {
    let mut f = FixtureBuilder::new("rate_dialog");
    dialog(&mut f, bx(30, 200, 330, 440));
    let t = f.text(bx(50, 220, 310, 250), "Enjoying the app? Rate us!");
    let stars: Vec<BBox> =
        (0..5).map(|i| f.icon(bx(80 + i * 42, 280, 104 + i * 42, 304), ImageView, IconClass::Star, Px([250, 190, 20]))).collect();
    f.button(bx(50, 380, 170, 420), "Later", NEUTRAL, INK);
    f.button(bx(190, 380, 310, 420), "Rate", NEUTRAL, INK);
    let mut all = stars;
    all.push(t);
    f.expect(DpType::NgRate, union(&all));
    f.build()
}

fn rate_banner() -> Fixture {
    let mut f = FixtureBuilder::new("rate_banner");
    f.panel(bx(0, 500, 360, 640), ImageView, CARD);
    let t = f.text(bx(20, 516, 340, 540), "Love this app? Leave us a review");
    let mut all = vec![t];
    for i in 0..5 {
        all.push(f.icon(bx(90 + i * 36, 560, 114 + i * 36, 584), ImageView, IconClass::Star, Px([250, 190, 20])));
    }
    f.text(bx(20, 40, 340, 64), "Today");
    f.expect(DpType::NgRate, union(&all));
    f.build()
}

fn upgrade_dialog() -> Fixture {
    let mut f = FixtureBuilder::new("upgrade_dialog");
    dialog(&mut f, bx(30, 180, 330, 460));
    let t = f.text(bx(50, 200, 310, 230), "Upgrade to Premium");
    f.text(bx(50, 240, 310, 264), "Faster downloads and more");
    let up = f.button(bx(50, 400, 160, 440), "Upgrade", ACCENT, CARD);
    let later = f.button(bx(180, 400, 290, 440), "Maybe later", SOFT, MUTED);
    f.expect(DpType::NgUpgrade, t).expect(DpType::IiFalseHierarchy, union(&[up, later]));
    f.build()
}

fn upgrade_banner() -> Fixture {
    let mut f = FixtureBuilder::new("upgrade_banner");
    f.text(bx(16, 20, 200, 44), "Library");
    let t = f.text(bx(20, 560, 340, 590), "Go Premium and unlock all features");
    f.expect(DpType::NgUpgrade, t);
    f.build()
}

fn currency_store() -> Fixture {
    let mut f = FixtureBuilder::new("currency_store");
    f.text(bx(16, 20, 200, 44), "Store");
    let a = f.text(bx(20, 100, 180, 124), "500 Gems");
    let b = f.button(bx(240, 96, 340, 128), "$4.99", ACCENT, CARD);
    let c = f.text(bx(20, 160, 180, 184), "1200 Gems");
    let d = f.button(bx(240, 156, 340, 188), "$9.99", ACCENT, CARD);
    f.expect(DpType::ObIntermediateCurrency, union(&[a, b, c, d]));
    f.build()
}

fn currency_coins() -> Fixture {
    let mut f = FixtureBuilder::new("currency_coins");
    let a = f.text(bx(20, 300, 200, 324), "Buy 100 coins");
    let b = f.button(bx(230, 296, 340, 328), "€1.99", GREEN, CARD);
    f.expect(DpType::ObIntermediateCurrency, union(&[a, b]));
    f.build()
}

fn trial_two_lines() -> Fixture {
    let mut f = FixtureBuilder::new("trial_two_lines");
    let a = f.text(bx(20, 400, 340, 430), "Start your 7-day free trial");
    let b = f.text(bx(20, 436, 340, 456), "then $9.99/month");
    f.button(bx(20, 560, 340, 600), "Continue", ACCENT, CARD);
    f.expect(DpType::SnForcedContinuity, union(&[a, b]));
    f.build()
}

fn trial_one_line() -> Fixture {
    let mut f = FixtureBuilder::new("trial_one_line");
    let a = f.text(bx(20, 480, 340, 504), "Try it free for 3 days, auto-renews at $4.99 per week");
    f.expect(DpType::SnForcedContinuity, a);
    f.build()
}

fn preselected_checkbox() -> Fixture {
    let mut f = FixtureBuilder::new("preselected_checkbox");
    f.label(bx(20, 200, 340, 236), ElementType::EditText, "Email", CARD, MUTED);
    let cb = f.toggle(bx(20, 262, 44, 286), Checkbox, WidgetStatus::Checked);
    let t = f.text(bx(52, 264, 340, 284), "I agree to the Terms and Privacy Policy");
    f.button(bx(20, 320, 340, 360), "Create account", ACCENT, CARD);
    f.expect(DpType::IiPreselectionChecked, union(&[cb, t]));
    f.build()
}

fn preselected_switch() -> Fixture {
    let mut f = FixtureBuilder::new("preselected_switch");
    f.text(bx(16, 20, 200, 44), "Account");
    let t = f.text(bx(20, 120, 260, 144), "Keep me updated with newsletters");
    let sw = f.toggle(bx(300, 120, 340, 144), Switch, WidgetStatus::Checked);
    f.text(bx(20, 180, 260, 204), "Dark mode");
    f.toggle(bx(300, 180, 340, 204), Switch, WidgetStatus::Unchecked);
    f.expect(DpType::IiPreselectionChecked, union(&[t, sw]));
    f.build()
}

fn implicit_terms_signup() -> Fixture {
    let mut f = FixtureBuilder::new("implicit_terms_signup");
    f.label(bx(20, 200, 340, 236), ElementType::EditText, "Email", CARD, MUTED);
    f.button(bx(20, 260, 340, 300), "Sign up", ACCENT, CARD);
    let t = f.text(bx(20, 316, 340, 336), "By signing up you agree to our Terms of Service");
    f.expect(DpType::IiPreselectionNoCheckbox, t);
    f.build()
}

fn implicit_terms_continue() -> Fixture {
    let mut f = FixtureBuilder::new("implicit_terms_continue");
    f.button(bx(20, 540, 340, 580), "Continue", GREEN, CARD);
    let t = f.text(bx(20, 592, 340, 612), "By continuing, you accept our privacy policy");
    f.expect(DpType::IiPreselectionNoCheckbox, t);
    f.build()
}

fn location_sheet() -> Fixture {
    let mut f = FixtureBuilder::new("location_sheet");
    f.text(bx(16, 20, 200, 44), "Stores");
    f.panel(bx(0, 400, 360, 640), ImageView, CARD);
    f.text(bx(20, 420, 340, 444), "Enable location to see nearby stores");
    let yes = f.button(bx(40, 560, 170, 600), "Enable", ACCENT, CARD);
    let no = f.button(bx(190, 560, 320, 600), "Not now", CARD, MUTED);
    f.expect(DpType::IiFalseHierarchy, union(&[yes, no]));
    f.build()
}

/// Three full-width cards of which the middle one is an ad.
fn feed_cards(name: &str, badge: bool) -> Fixture {
    let mut f = FixtureBuilder::new(name);
    f.text(bx(16, 20, 200, 44), "For you");
    let titles = ["Ten quiet beaches", "Summer recipes", "City walks"];
    let mut ad = None;
    for (i, title) in titles.iter().enumerate() {
        let y = 80 + i as u32 * 170;
        let card = f.panel(bx(0, y, 360, y + 160), ImageView, CARD);
        f.text(bx(16, y + 120, 300, y + 144), title);
        if i == 1 {
            if badge {
                f.text(bx(16, y + 10, 96, y + 28), "Sponsored");
            } else {
                f.paste(IconClass::AdChoicesTriangle, 330, y + 10, 1.0);
            }
            ad = Some(card);
        }
    }
    f.expect(DpType::IiDisguisedAd, ad.unwrap());
    f.build()
}

fn product_grid_ad() -> Fixture {
    let mut f = FixtureBuilder::new("product_grid_ad");
    f.text(bx(16, 20, 200, 44), "Shoes");
    let names = ["Runner", "Trail", "Court", "Classic"];
    let mut ad = None;
    for (i, n) in names.iter().enumerate() {
        let (x, y) = (5 + (i as u32 % 2) * 180, 100 + (i as u32 / 2) * 210);
        let tile = f.panel(bx(x, y, x + 170, y + 200), ImageView, CARD);
        f.text(bx(x + 10, y + 160, x + 120, y + 184), n);
        if i == 3 {
            f.text(bx(x + 10, y + 10, x + 36, y + 26), "Ad");
            ad = Some(tile);
        }
    }
    f.expect(DpType::IiDisguisedAd, ad.unwrap());
    f.build()
}

fn interstitial_small_close() -> Fixture {
    let mut f = FixtureBuilder::new("interstitial_small_close");
    f.panel(bx(0, 0, 360, 640), ImageView, Px([70, 90, 160]));
    let c = f.icon(bx(340, 10, 350, 20), ImageButton, IconClass::Close, CARD);
    f.expect(DpType::IiSmallClose, c);
    f.build()
}

fn template_small_close() -> Fixture {
    let mut f = FixtureBuilder::new("template_small_close");
    f.text(bx(16, 60, 200, 84), "Weather");
    let c = f.paste(IconClass::AdClose, 330, 16, 0.75);
    f.expect(DpType::IiSmallClose, c);
    f.build()
}

fn single_text(name: &str, dp: DpType, b: BBox, text: &str) -> Fixture {
    let mut f = FixtureBuilder::new(name);
    f.text(bx(16, 20, 200, 44), "Home");
    let t = f.text(b, text);
    f.expect(dp, t);
    f.build()
}

fn privacy_switch() -> Fixture {
    let mut f = FixtureBuilder::new("privacy_switch");
    f.text(bx(16, 20, 200, 44), "Privacy");
    let t = f.text(bx(20, 120, 280, 144), "Share usage data to improve the app");
    let sw = f.toggle(bx(300, 120, 340, 144), Switch, WidgetStatus::Checked);
    f.expect(DpType::FaPrivacyZuckering, union(&[t, sw]));
    f.build()
}

fn video_countdown() -> Fixture {
    let mut f = FixtureBuilder::new("video_countdown");
    f.panel(bx(0, 0, 360, 640), VideoView, DIM);
    let a = f.label(bx(10, 10, 40, 26), TextView, "Ad", DIM, CARD);
    let s = f.label(bx(250, 10, 350, 34), TextView, "Skip ad in 5", DIM, CARD);
    f.expect(DpType::FaCountdownAd, union(&[a, s]));
    f.build()
}

fn reward_countdown_template() -> Fixture {
    let mut f = FixtureBuilder::new("reward_countdown_template");
    f.panel(bx(0, 0, 360, 640), VideoView, DIM);
    let icon = f.paste(IconClass::AdChoicesTriangle, 334, 10, 1.0);
    let s = f.label(bx(200, 40, 350, 64), TextView, "Reward in 15", DIM, CARD);
    f.expect(DpType::FaCountdownAd, union(&[icon, s]));
    f.build()
}

fn remove_ads_rows() -> Fixture {
    let mut f = FixtureBuilder::new("remove_ads_rows");
    f.text(bx(16, 20, 200, 44), "Settings");
    let a = f.text(bx(20, 100, 280, 124), "Remove Ads");
    f.text(bx(20, 160, 280, 184), "Dark mode");
    f.toggle(bx(300, 160, 340, 184), Switch, WidgetStatus::Checked);
    f.text(bx(20, 220, 280, 244), "Language");
    let b = f.text(bx(20, 300, 280, 324), "Remove Ads forever");
    f.expect(DpType::FaPayAvoidAds, a).expect(DpType::FaPayAvoidAds, b);
    f.build()
}

fn ad_free_offer() -> Fixture {
    let mut f = FixtureBuilder::new("ad_free_offer");
    f.text(bx(16, 20, 200, 44), "Music");
    let t = f.text(bx(20, 560, 340, 584), "Go ad-free for $1.99");
    f.expect(DpType::FaPayAvoidAds, t);
    f.build()
}

fn benign_settings() -> Fixture {
    let mut f = FixtureBuilder::new("benign_settings");
    f.text(bx(16, 20, 200, 44), "Settings");
    f.text(bx(20, 100, 260, 124), "Dark mode");
    f.toggle(bx(300, 100, 340, 124), Switch, WidgetStatus::Checked);
    f.text(bx(20, 160, 260, 184), "Language");
    f.text(bx(20, 220, 260, 244), "About");
    f.text(bx(20, 280, 260, 304), "Advanced settings");
    f.build()
}

fn benign_login() -> Fixture {
    let mut f = FixtureBuilder::new("benign_login");
    f.label(bx(20, 200, 340, 236), ElementType::EditText, "Email", CARD, MUTED);
    f.label(bx(20, 250, 340, 286), ElementType::EditText, "Password", CARD, MUTED);
    f.button(bx(20, 310, 340, 350), "Log in", ACCENT, CARD);
    f.build()
}

fn benign_unchecked_newsletter() -> Fixture {
    let mut f = FixtureBuilder::new("benign_unchecked_newsletter");
    f.label(bx(20, 200, 340, 236), ElementType::EditText, "Email", CARD, MUTED);
    f.toggle(bx(20, 262, 44, 286), Checkbox, WidgetStatus::Unchecked);
    f.text(bx(52, 264, 340, 284), "Send me promotional emails");
    f.button(bx(20, 320, 340, 360), "Create account", ACCENT, CARD);
    f.build()
}

fn benign_feed() -> Fixture {
    let mut f = FixtureBuilder::new("benign_feed");
    f.text(bx(16, 20, 200, 44), "News");
    for (i, title) in ["Local elections", "Rain expected", "Market update"].iter().enumerate() {
        let y = 80 + i as u32 * 170;
        f.panel(bx(0, y, 360, y + 160), ImageView, CARD);
        f.text(bx(16, y + 120, 300, y + 144), title);
    }
    f.build()
}

fn benign_confirm_dialog() -> Fixture {
    let mut f = FixtureBuilder::new("benign_confirm_dialog");
    dialog(&mut f, bx(30, 220, 330, 420));
    f.text(bx(50, 240, 310, 264), "Delete this photo?");
    f.button(bx(50, 360, 160, 400), "Cancel", NEUTRAL, INK);
    f.button(bx(180, 360, 290, 400), "Delete", NEUTRAL, INK);
    f.build()
}

fn benign_player() -> Fixture {
    let mut f = FixtureBuilder::new("benign_player");
    f.icon(bx(16, 16, 40, 40), ImageButton, IconClass::Close, NEUTRAL);
    f.panel(bx(30, 80, 330, 380), ImageView, Px([180, 120, 90]));
    f.text(bx(30, 400, 330, 424), "Morning Light");
    f.label(bx(30, 440, 80, 456), TextView, "1:24", SCREEN, MUTED);
    let icons = [IconClass::SkipPrevious, IconClass::Play, IconClass::SkipNext];
    for (i, icon) in icons.iter().enumerate() {
        let x = 90 + i as u32 * 70;
        f.icon(bx(x, 500, x + 40, 540), ImageButton, *icon, INK);
    }
    f.build()
}

fn benign_chat() -> Fixture {
    let mut f = FixtureBuilder::new("benign_chat");
    f.text(bx(16, 20, 200, 44), "Messages");
    for (i, who) in ["Ana", "Ben", "Chris", "Dana"].iter().enumerate() {
        let y = 80 + i as u32 * 64;
        f.icon(bx(16, y, 56, y + 40), ImageView, IconClass::Avatar, ACCENT);
        f.text(bx(72, y + 8, 300, y + 32), who);
    }
    f.build()
}

fn benign_product() -> Fixture {
    let mut f = FixtureBuilder::new("benign_product");
    f.panel(bx(0, 0, 360, 300), ImageView, Px([200, 210, 220]));
    f.text(bx(20, 320, 340, 344), "Canvas backpack");
    f.text(bx(20, 356, 140, 380), "$19.99");
    f.button(bx(20, 560, 340, 600), "Add to cart", ACCENT, CARD);
    f.build()
}

fn benign_video() -> Fixture {
    let mut f = FixtureBuilder::new("benign_video");
    f.panel(bx(0, 0, 360, 220), VideoView, DIM);
    f.label(bx(300, 190, 350, 210), TextView, "12:30", DIM, CARD);
    f.text(bx(16, 240, 340, 264), "Hiking the ridge trail");
    f.build()
}

fn benign_large_close() -> Fixture {
    let mut f = FixtureBuilder::new("benign_large_close");
    f.panel(bx(0, 60, 360, 560), ImageView, Px([90, 140, 90]));
    f.paste(IconClass::AdClose, 330, 16, 1.25);
    f.text(bx(16, 580, 340, 604), "Photo 3 of 12");
    f.build()
}

fn benign_onboarding() -> Fixture {
    let mut f = FixtureBuilder::new("benign_onboarding");
    f.panel(bx(40, 100, 320, 380), ImageView, Px([250, 220, 160]));
    f.text(bx(20, 400, 340, 424), "Track your runs");
    f.button(bx(40, 560, 170, 600), "Skip", NEUTRAL, INK);
    f.button(bx(190, 560, 320, 600), "Next", NEUTRAL, INK);
    f.build()
}

/// The rule corpus, in a fixed order.
pub fn corpus() -> Vec<Fixture> {
    use DpType::*;
    vec![
        install_dialog_ad(),
        popup_ad_sponsored(),
        popup_ad_template_only(),
        rate_dialog(),
        rate_banner(),
        upgrade_dialog(),
        upgrade_banner(),
        currency_store(),
        currency_coins(),
        trial_two_lines(),
        trial_one_line(),
        preselected_checkbox(),
        preselected_switch(),
        implicit_terms_signup(),
        implicit_terms_continue(),
        location_sheet(),
        feed_cards("feed_sponsored_card", true),
        feed_cards("feed_adchoices_card", false),
        product_grid_ad(),
        interstitial_small_close(),
        template_small_close(),
        single_text("invite_friends", FaSocialPyramid, bx(20, 300, 340, 324), "Invite your friends, get rewards"),
        single_text("refer_friend", FaSocialPyramid, bx(20, 300, 340, 324), "Refer a friend and earn $5 for each referral"),
        privacy_switch(),
        single_text("personalized_ads", FaPrivacyZuckering, bx(20, 500, 340, 524), "Allow personalized ads"),
        single_text("daily_bonus", FaGamification, bx(20, 200, 340, 230), "Claim your daily bonus!"),
        single_text("login_streak", FaGamification, bx(20, 200, 340, 230), "Keep your login streak going"),
        video_countdown(),
        reward_countdown_template(),
        single_text("watch_ad_level", FaWatchAd, bx(20, 400, 340, 424), "Watch an ad to unlock this level"),
        single_text("watch_ad_coins", FaWatchAd, bx(20, 400, 340, 424), "Watch a short video ad for 50 free coins"),
        remove_ads_rows(),
        ad_free_offer(),
        benign_settings(),
        benign_login(),
        benign_unchecked_newsletter(),
        benign_feed(),
        benign_confirm_dialog(),
        benign_player(),
        benign_chat(),
        benign_product(),
        benign_video(),
        benign_large_close(),
        benign_onboarding(),
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    corpus().into_iter().find(|f| f.name == name)
}
