//! UI domain model: element classes, icon vocabulary, widget status, and the
//! [`Screen`] that every pipeline stage reads and annotates.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

macro_rules! string_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => $text:literal $(| $alias:literal)*),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    _ => Err(format!("unknown {} `{}`", stringify!($name), s)),
                }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::serde::Serialize for $name {
            fn serialize<S: ::serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> ::serde::Deserialize<'de> for $name {
            fn deserialize<D: ::serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = <String as ::serde::Deserialize>::deserialize(d)?;
                s.parse().map_err(::serde::de::Error::custom)
            }
        }
    };
}

pub(crate) use string_enum;

string_enum! {
    /// Android widget classes recognised by the element detector, plus the
    /// OCR-only `TextLine` and a catch-all.
    pub enum ElementType {
        Button => "Button",
        ImageView => "ImageView",
        ImageButton => "ImageButton",
        TextView => "TextView",
        Checkbox => "Checkbox" | "CheckBox",
        Switch => "Switch",
        ToggleButton => "ToggleButton",
        EditText => "EditText",
        RadioButton => "RadioButton",
        Spinner => "Spinner",
        SeekBar => "SeekBar",
        ProgressBar => "ProgressBar",
        RatingBar => "RatingBar",
        VideoView => "VideoView",
        WebView => "WebView",
        TextLine => "TextLine",
        Unknown => "Unknown",
    }
}

impl ElementType {
    /// Types whose box is replaced by the union of matched OCR lines.
    pub fn is_textual(&self) -> bool {
        matches!(self, ElementType::TextView | ElementType::Button | ElementType::EditText)
    }

    /// Types the status classifier applies to.
    pub fn has_status(&self) -> bool {
        matches!(self, ElementType::Checkbox | ElementType::Switch | ElementType::ToggleButton)
    }

    /// Types the icon classifier applies to.
    pub fn is_image(&self) -> bool {
        matches!(self, ElementType::ImageView | ElementType::ImageButton)
    }

    /// Types considered when grouping related elements.
    pub fn is_grouping_candidate(&self) -> bool {
        matches!(self, ElementType::TextView | ElementType::Button | ElementType::ImageButton)
    }
}

string_enum! {
    /// Icon vocabulary of the icon classifier (81 named classes and `other`)
    /// plus the two ad icons that only the template matcher produces.
    pub enum IconClass {
        Add => "add",
        Alarm => "alarm",
        ArrowBackward => "arrow_backward",
        ArrowDownward => "arrow_downward",
        ArrowForward => "arrow_forward",
        ArrowUpward => "arrow_upward",
        Attach => "attach",
        Avatar => "avatar",
        Battery => "battery",
        Bluetooth => "bluetooth",
        Bookmark => "bookmark",
        Building => "building",
        Calendar => "calendar",
        Call => "call",
        Camera => "camera",
        Cart => "cart",
        Chat => "chat",
        Check => "check",
        Close => "close",
        Cloud => "cloud",
        Compass => "compass",
        Copy => "copy",
        CreditCard => "credit_card",
        Crop => "crop",
        Delete => "delete",
        Dollar => "dollar",
        Download => "download",
        Edit => "edit",
        Emoji => "emoji",
        ExpandLess => "expand_less",
        ExpandMore => "expand_more",
        Facebook => "facebook",
        FastForward => "fast_forward",
        Favorite => "favorite",
        Filter => "filter",
        Flag => "flag",
        Flash => "flash",
        Folder => "folder",
        Gift => "gift",
        Globe => "globe",
        Google => "google",
        Grid => "grid",
        Headphones => "headphones",
        Help => "help",
        History => "history",
        Home => "home",
        Info => "info",
        Label => "label",
        Launch => "launch",
        Link => "link",
        List => "list",
        Location => "location",
        Lock => "lock",
        Mail => "mail",
        Menu => "menu",
        Microphone => "microphone",
        Minus => "minus",
        Moon => "moon",
        More => "more",
        Music => "music",
        Notifications => "notifications",
        Pause => "pause",
        Person => "person",
        Photo => "photo",
        Play => "play",
        Power => "power",
        Refresh => "refresh",
        Repeat => "repeat",
        Rewind => "rewind",
        Search => "search",
        Send => "send",
        Settings => "settings",
        Share => "share",
        Shuffle => "shuffle",
        SkipNext => "skip_next",
        SkipPrevious => "skip_previous",
        Star => "star",
        ThumbsUp => "thumbs_up",
        Trophy => "trophy",
        Twitter => "twitter",
        Videocam => "videocam",
        Other => "other",
        AdChoicesTriangle => "ad_choices_triangle",
        AdClose => "ad_close",
    }
}

impl IconClass {
    /// Classes that only the template matcher may emit.
    pub fn is_template_only(&self) -> bool {
        matches!(self, IconClass::AdChoicesTriangle | IconClass::AdClose)
    }
}

string_enum! {
    /// Checked state of a two-state widget.
    pub enum WidgetStatus {
        Checked => "checked",
        Unchecked => "unchecked",
        NotApplicable => "not_applicable",
        Unknown => "unknown",
    }
}

/// 8-bit RGB triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u8; 3]", into = "[u8; 3]")]
pub struct Rgb(pub [u8; 3]);

impl From<[u8; 3]> for Rgb {
    fn from(c: [u8; 3]) -> Self {
        Rgb(c)
    }
}

impl From<Rgb> for [u8; 3] {
    fn from(c: Rgb) -> Self {
        c.0
    }
}

/// Which stage created an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementOrigin {
    Detector,
    Ocr,
    Template,
}

/// Index of an element within [`Screen::elements`].
pub type ElementId = usize;

/// One UI element with every extracted property layer.
#[derive(Debug, Clone, PartialEq)]
pub struct UIElement {
    pub bbox: BBox,
    pub etype: ElementType,
    pub text: Option<String>,
    pub confidence: f64,
    pub icon: Option<IconClass>,
    pub status: WidgetStatus,
    pub bg_color: Option<Rgb>,
    pub fg_color: Option<Rgb>,
    pub group_id: Option<usize>,
    pub origin: ElementOrigin,
}

impl UIElement {
    pub fn new(bbox: BBox, etype: ElementType) -> Self {
        UIElement {
            bbox,
            etype,
            text: None,
            confidence: 1.0,
            icon: None,
            status: if etype.has_status() {
                WidgetStatus::Unknown
            } else {
                WidgetStatus::NotApplicable
            },
            bg_color: None,
            fg_color: None,
            group_id: None,
            origin: ElementOrigin::Detector,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn with_icon(mut self, icon: IconClass) -> Self {
        self.icon = Some(icon);
        self
    }

    pub fn with_status(mut self, status: WidgetStatus) -> Self {
        self.status = status;
        self
    }

    pub fn with_colors(mut self, bg: Rgb, fg: Rgb) -> Self {
        self.bg_color = Some(bg);
        self.fg_color = Some(fg);
        self
    }

    pub fn with_origin(mut self, origin: ElementOrigin) -> Self {
        self.origin = origin;
        self
    }

    /// Text if present and non-blank.
    pub fn text(&self) -> Option<&str> {
        self.text.as_deref().filter(|t| !t.trim().is_empty())
    }
}

string_enum! {
    /// Optional extraction stages, in the order the ablation study adds them.
    /// Element detection and text extraction always run.
    pub enum Stage {
        IconSemantic => "icon",
        TemplateMatching => "template",
        StatusRecognition => "status",
        ColorGrouping => "color_grouping",
    }
}

/// Set of enabled optional stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StageSet(u8);

impl StageSet {
    pub const fn empty() -> Self {
        StageSet(0)
    }

    pub fn all() -> Self {
        Stage::ALL.iter().fold(Self::empty(), |s, st| s.with(*st))
    }

    fn bit(stage: Stage) -> u8 {
        1 << (stage as u8)
    }

    pub fn with(self, stage: Stage) -> Self {
        StageSet(self.0 | Self::bit(stage))
    }

    pub fn without(self, stage: Stage) -> Self {
        StageSet(self.0 & !Self::bit(stage))
    }

    pub fn contains(&self, stage: Stage) -> bool {
        self.0 & Self::bit(stage) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Stage> + '_ {
        Stage::ALL.iter().copied().filter(|s| self.contains(*s))
    }
}

impl Default for StageSet {
    fn default() -> Self {
        Self::all()
    }
}

/// A screenshot together with its elements and derived layers.
#[derive(Debug, Clone)]
pub struct Screen {
    /// Screenshot name as written to reports.
    pub name: String,
    /// Raster, when available. Property-only screens (e.g. built from
    /// sidecars alone) carry `None` and skip the pixel stages.
    pub image: Option<RgbImage>,
    pub width: u32,
    pub height: u32,
    pub elements: Vec<UIElement>,
    /// Each group lists element ids; groups are disjoint.
    pub groups: Vec<Vec<ElementId>>,
    /// Dominant color of the whole screenshot.
    pub background: Option<Rgb>,
}

impl Screen {
    pub fn new(name: impl Into<String>, width: u32, height: u32) -> Self {
        Screen {
            name: name.into(),
            image: None,
            width,
            height,
            elements: Vec::new(),
            groups: Vec::new(),
            background: None,
        }
    }

    pub fn with_image(name: impl Into<String>, image: RgbImage) -> Self {
        let (width, height) = image.dimensions();
        let mut s = Screen::new(name, width, height);
        s.image = Some(image);
        s
    }

    pub fn bounds(&self) -> BBox {
        BBox { x1: 0, y1: 0, x2: self.width, y2: self.height }
    }

    pub fn area(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }

    pub fn diagonal(&self) -> f64 {
        f64::from(self.width).hypot(f64::from(self.height))
    }

    pub fn push(&mut self, element: UIElement) -> ElementId {
        self.elements.push(element);
        self.elements.len() - 1
    }
}
