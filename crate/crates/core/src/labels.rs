//! Closed annotation label sets shared by the corpus, edge construction and
//! the classification tasks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Joy,
    Angry,
    Sad,
    Surprising,
    #[default]
    Other,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 5] = [Self::Joy, Self::Angry, Self::Sad, Self::Surprising, Self::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Joy => "joy",
            Self::Angry => "angry",
            Self::Sad => "sad",
            Self::Surprising => "surprising",
            Self::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IntentLabel {
    Ask,
    Advise,
    Describe,
    Opinion,
    Console,
    #[default]
    Other,
}

impl IntentLabel {
    pub const ALL: [IntentLabel; 6] =
        [Self::Ask, Self::Advise, Self::Describe, Self::Opinion, Self::Console, Self::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ask => "ask",
            Self::Advise => "advise",
            Self::Describe => "describe",
            Self::Opinion => "opinion",
            Self::Console => "console",
            Self::Other => "other",
        }
    }

    /// Labels allowed on an `emotion_intent` edge: everything except `other`.
    pub fn is_edge_label(self) -> bool {
        self != Self::Other
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub value: String,
}

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown {} label `{}`", self.kind, self.value)
    }
}

impl std::error::Error for UnknownLabel {}

macro_rules! label_impls {
    ($ty:ty, $kind:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownLabel;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let s = s.trim();
                Self::ALL
                    .iter()
                    .copied()
                    .find(|l| l.as_str().eq_ignore_ascii_case(s))
                    .ok_or_else(|| UnknownLabel { kind: $kind, value: s.to_string() })
            }
        }
    };
}

label_impls!(EmotionLabel, "emotion");
label_impls!(IntentLabel, "intent");
