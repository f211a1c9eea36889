//! Dark-pattern types detectable from a single screen.

use crate::model::{string_enum, Stage};

string_enum! {
    /// Top-level strategy, in report order.
    pub enum Strategy {
        Nagging => "NG",
        Obstruction => "OB",
        Sneaking => "SN",
        InterfaceInterference => "II",
        ForcedAction => "FA",
    }
}

string_enum! {
    pub enum Tier {
        Certain => "certain",
        Warning => "warning",
    }
}

string_enum! {
    /// Stable type identifiers, in report order within each strategy.
    pub enum DpType {
        NgPopupAd => "NG-POPUP-AD",
        NgRate => "NG-RATE",
        NgUpgrade => "NG-UPGRADE",
        ObIntermediateCurrency => "OB-INTERMEDIATE-CURRENCY",
        SnForcedContinuity => "SN-FORCED-CONTINUITY",
        IiPreselectionChecked => "II-PRESELECTION-CHECKED",
        IiPreselectionNoCheckbox => "II-PRESELECTION-NO-CHECKBOX",
        IiFalseHierarchy => "II-FALSE-HIERARCHY",
        IiDisguisedAd => "II-DISGUISED-AD",
        IiSmallClose => "II-SMALL-CLOSE",
        FaSocialPyramid => "FA-SOCIAL-PYRAMID",
        FaPrivacyZuckering => "FA-PRIVACY-ZUCKERING",
        FaGamification => "FA-GAMIFICATION",
        FaCountdownAd => "FA-COUNTDOWN-AD",
        FaWatchAd => "FA-WATCH-AD",
        FaPayAvoidAds => "FA-PAY-AVOID-ADS",
    }
}

impl DpType {
    pub fn strategy(&self) -> Strategy {
        match self.as_str().split('-').next() {
            Some("NG") => Strategy::Nagging,
            Some("OB") => Strategy::Obstruction,
            Some("SN") => Strategy::Sneaking,
            Some("II") => Strategy::InterfaceInterference,
            _ => Strategy::ForcedAction,
        }
    }

    /// Context-dependent types that a single screen can only hint at are
    /// reported as warnings.
    pub fn tier(&self) -> Tier {
        use DpType::*;
        match self {
            NgPopupAd | NgRate | NgUpgrade | IiPreselectionChecked | FaPrivacyZuckering | FaCountdownAd => Tier::Warning,
            _ => Tier::Certain,
        }
    }

    /// Stages whose output the rule cannot do without. When any of them is
    /// disabled the rule abstains.
    pub fn required_stages(&self) -> &'static [Stage] {
        use DpType::*;
        match self {
            NgRate => &[Stage::IconSemantic],
            IiPreselectionChecked => &[Stage::StatusRecognition],
            IiFalseHierarchy => &[Stage::ColorGrouping],
            _ => &[],
        }
    }

    /// Pattern slots the rule reads from the rules file.
    pub fn pattern_slots(&self) -> &'static [&'static str] {
        use DpType::*;
        match self {
            NgPopupAd | IiDisguisedAd | IiSmallClose => &[],
            ObIntermediateCurrency => &["virtual", "real"],
            SnForcedContinuity => &["trial", "charge"],
            IiFalseHierarchy => &["dismissive"],
            _ => &["text"],
        }
    }
}
