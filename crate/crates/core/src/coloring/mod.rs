//! Two-colorings of pairs of an ordinal that are constant on node classes,
//! up to finitely many overridden pairs.

mod clique;
mod decide;
mod structure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ordinal::{ClassSize, Components, NodeClassId, Ordinal, OrdinalError};

pub use decide::{
    blue_closed_omega, check_certificate, check_omega_squared_levels, decide_blue_closed_3,
    decide_red_closed_omega_plus_n, verify_certificate, CertificateKind, CopyCertificate, OmegaSquaredOutcome,
};
pub use structure::{
    extract_canonical_table, induced_coloring, restrict_to_component, skeleton_extract, CanonicalTable,
    HomogeneityViolation, NormalTable, NormalViolation, SkeletonMap,
};

/// Pair color: red is 0, blue is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Color {
    #[default]
    Red,
    Blue,
}

impl Color {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Color::Red),
            1 => Some(Color::Blue),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Blue => "blue",
        })
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        Color::from_u8(v).ok_or_else(|| serde::de::Error::custom(format!("color must be 0 or 1, got {v}")))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("a pair needs two distinct points, got {0} twice")]
    SamePoint(Ordinal),
    #[error("{id} is not a node class of {gamma}")]
    InvalidClass { gamma: Ordinal, id: NodeClassId },
    #[error("cross color needs two distinct classes, got {0} twice")]
    SameClass(NodeClassId),
    #[error("duplicate entry for {0}")]
    Duplicate(String),
    #[error("coloring is not normal: {0}")]
    NotNormal(String),
    #[error("coloring is not omega-homogeneous: {0}")]
    NotOmegaHomogeneous(String),
    #[error("expected a coloring of {expected}, got {got}")]
    WrongGamma { expected: Ordinal, got: Ordinal },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("the case analysis admits neither alternative: {0}")]
    LemmaContradicted(String),
    #[error("invalid coloring file: {0}")]
    Json(String),
}

/// A coloring of `[gamma]^2` by class: `within` colors pairs in one class,
/// `cross` pairs in distinct classes, and `overrides` replace single pairs.
///
/// Unset `within` and `cross` entries are red.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientColoring {
    components: Components,
    within: BTreeMap<NodeClassId, Color>,
    cross: BTreeMap<(NodeClassId, NodeClassId), Color>,
    overrides: BTreeMap<(Ordinal, Ordinal), Color>,
}

fn ordered<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl QuotientColoring {
    /// The all-red coloring of `gamma`.
    pub fn new(gamma: Ordinal) -> Self {
        Self {
            components: Components::new(&gamma),
            within: BTreeMap::new(),
            cross: BTreeMap::new(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn gamma(&self) -> &Ordinal {
        self.components.gamma()
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    fn check_class(&self, id: NodeClassId) -> Result<(), ColoringError> {
        if self.components.is_valid(id) {
            Ok(())
        } else {
            Err(ColoringError::InvalidClass { gamma: self.gamma().clone(), id })
        }
    }

    fn check_point(&self, a: &Ordinal) -> Result<(), ColoringError> {
        if a < self.gamma() {
            Ok(())
        } else {
            Err(OrdinalError::OutOfRange { alpha: a.clone(), gamma: self.gamma().clone() }.into())
        }
    }

    pub fn set_within(&mut self, id: NodeClassId, color: Color) -> Result<(), ColoringError> {
        self.check_class(id)?;
        // Red entries are left implicit so that equality is semantic.
        match color {
            Color::Red => self.within.remove(&id),
            Color::Blue => self.within.insert(id, color),
        };
        Ok(())
    }

    pub fn set_cross(&mut self, a: NodeClassId, b: NodeClassId, color: Color) -> Result<(), ColoringError> {
        self.check_class(a)?;
        self.check_class(b)?;
        if a == b {
            return Err(ColoringError::SameClass(a));
        }
        match color {
            Color::Red => self.cross.remove(&ordered(a, b)),
            Color::Blue => self.cross.insert(ordered(a, b), color),
        };
        Ok(())
    }

    /// Sets the color of one pair, replacing any earlier override of it.
    pub fn set_override(&mut self, a: Ordinal, b: Ordinal, color: Color) -> Result<(), ColoringError> {
        self.check_point(&a)?;
        self.check_point(&b)?;
        if a == b {
            return Err(ColoringError::SamePoint(a));
        }
        self.overrides.insert(ordered(a, b), color);
        Ok(())
    }

    pub fn within(&self, id: NodeClassId) -> Color {
        self.within.get(&id).copied().unwrap_or_default()
    }

    pub fn cross(&self, a: NodeClassId, b: NodeClassId) -> Color {
        self.cross.get(&ordered(a, b)).copied().unwrap_or_default()
    }

    /// Color of a pair of non-overridden points from classes `a` and `b`.
    pub fn base(&self, a: NodeClassId, b: NodeClassId) -> Color {
        if a == b {
            self.within(a)
        } else {
            self.cross(a, b)
        }
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&Ordinal, &Ordinal, Color)> + '_ {
        self.overrides.iter().map(|((a, b), &c)| (a, b, c))
    }

    pub fn override_of(&self, a: &Ordinal, b: &Ordinal) -> Option<Color> {
        self.overrides.get(&ordered(a.clone(), b.clone())).copied()
    }

    /// Every point that appears in some override.
    pub fn override_points(&self) -> BTreeSet<Ordinal> {
        self.overrides.keys().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn classify(&self, a: &Ordinal) -> Result<NodeClassId, ColoringError> {
        Ok(self.components.classify(a)?)
    }

    pub fn class_ids(&self) -> Vec<NodeClassId> {
        self.components.class_ids().collect()
    }

    pub fn class_size(&self, id: NodeClassId) -> ClassSize {
        self.components.class_size(id).expect("class id from this coloring")
    }

    pub fn color_of(&self, a: &Ordinal, b: &Ordinal) -> Result<Color, ColoringError> {
        if a == b {
            return Err(ColoringError::SamePoint(a.clone()));
        }
        let (ca, cb) = (self.classify(a)?, self.classify(b)?);
        Ok(self.override_of(a, b).unwrap_or_else(|| self.base(ca, cb)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ColoringFile::from(self)).expect("coloring serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, ColoringError> {
        let file: ColoringFile =
            serde_json::from_value(value.clone()).map_err(|e| ColoringError::Json(e.to_string()))?;
        file.try_into()
    }

    pub fn from_json_str(text: &str) -> Result<Self, ColoringError> {
        let file: ColoringFile = serde_json::from_str(text).map_err(|e| ColoringError::Json(e.to_string()))?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct WithinEntry {
    class: NodeClassId,
    color: Color,
}

#[derive(Serialize, Deserialize)]
struct CrossEntry {
    a: NodeClassId,
    b: NodeClassId,
    color: Color,
}

#[derive(Serialize, Deserialize)]
struct OverrideEntry {
    a: Ordinal,
    b: Ordinal,
    color: Color,
}

/// On-disk form. Only blue class entries are written since red is the default.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColoringFile {
    gamma: Ordinal,
    #[serde(default)]
    within: Vec<WithinEntry>,
    #[serde(default)]
    cross: Vec<CrossEntry>,
    #[serde(default)]
    overrides: Vec<OverrideEntry>,
}

impl From<&QuotientColoring> for ColoringFile {
    fn from(c: &QuotientColoring) -> Self {
        Self {
            gamma: c.gamma().clone(),
            within: c
                .within
                .iter()
                .map(|(&class, &color)| WithinEntry { class, color })
                .collect(),
            cross: c
                .cross
                .iter()
                .map(|(&(a, b), &color)| CrossEntry { a, b, color })
                .collect(),
            overrides: c
                .overrides
                .iter()
                .map(|((a, b), &color)| OverrideEntry { a: a.clone(), b: b.clone(), color })
                .collect(),
        }
    }
}

impl TryFrom<ColoringFile> for QuotientColoring {
    type Error = ColoringError;

    fn try_from(file: ColoringFile) -> Result<Self, Self::Error> {
        let mut c = QuotientColoring::new(file.gamma);
        let mut seen_within = BTreeSet::new();
        let mut seen_cross = BTreeSet::new();
        for w in file.within {
            if !seen_within.insert(w.class) {
                return Err(ColoringError::Duplicate(format!("within {}", w.class)));
            }
            c.set_within(w.class, w.color)?;
        }
        for x in file.cross {
            if !seen_cross.insert(ordered(x.a, x.b)) {
                return Err(ColoringError::Duplicate(format!("cross {} {}", x.a, x.b)));
            }
            c.set_cross(x.a, x.b, x.color)?;
        }
        for o in file.overrides {
            if c.override_of(&o.a, &o.b).is_some() {
                return Err(ColoringError::Duplicate(format!("override {{{}, {}}}", o.a, o.b)));
            }
            c.set_override(o.a, o.b, o.color)?;
        }
        Ok(c)
    }
}
