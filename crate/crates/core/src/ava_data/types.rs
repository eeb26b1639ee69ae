use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

/// Interned video identifier. Cheap to clone; parsers share one allocation
/// per distinct id.
pub type VideoId = Arc<str>;

/// Positive integer identifier of an action class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One entry of an action vocabulary, e.g. `11,sit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionClass {
    id: ActionId,
    name: String,
}

impl ActionClass {
    pub fn new(id: u32, name: impl Into<String>) -> Result<Self, ClassError> {
        let name = name.into();
        if id == 0 {
            return Err(ClassError::ZeroId);
        }
        if name.is_empty() {
            return Err(ClassError::EmptyName(id));
        }
        if name.contains([',', '\n', '\r']) {
            return Err(ClassError::ForbiddenCharacter(name));
        }
        Ok(Self {
            id: ActionId(id),
            name,
        })
    }

    pub fn id(&self) -> ActionId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("action id must be at least 1")]
    ZeroId,
    #[error("action {0} has an empty name")]
    EmptyName(u32),
    #[error("action name {0:?} contains a comma or line break")]
    ForbiddenCharacter(String),
    #[error("duplicate action id {0}")]
    DuplicateId(ActionId),
    #[error("duplicate action name {0:?}")]
    DuplicateName(String),
}

/// Ordered set of action classes with unique ids and names.
///
/// Iteration is always in ascending id order, whatever order the classes
/// were supplied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionVocabulary {
    classes: Vec<ActionClass>,
    by_id: HashMap<ActionId, usize>,
}

impl ActionVocabulary {
    pub fn new(classes: impl IntoIterator<Item = ActionClass>) -> Result<Self, ClassError> {
        let mut classes: Vec<ActionClass> = classes.into_iter().collect();
        classes.sort_by_key(|c| c.id);
        for pair in classes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ClassError::DuplicateId(pair[0].id));
            }
        }
        let mut names = std::collections::HashSet::with_capacity(classes.len());
        for c in &classes {
            if !names.insert(c.name.as_str()) {
                return Err(ClassError::DuplicateName(c.name.clone()));
            }
        }
        let by_id = classes.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        Ok(Self { classes, by_id })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, id: ActionId) -> bool {
        self.by_id.contains_key(&id)
    }

    pub fn get(&self, id: ActionId) -> Option<&ActionClass> {
        self.by_id.get(&id).map(|&i| &self.classes[i])
    }

    pub fn name(&self, id: ActionId) -> Option<&str> {
        self.get(id).map(ActionClass::name)
    }

    pub fn by_name(&self, name: &str) -> Option<&ActionClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ActionClass> {
        self.classes.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.classes.iter().map(|c| c.id)
    }
}

impl<'a> IntoIterator for &'a ActionVocabulary {
    type Item = &'a ActionClass;
    type IntoIter = std::slice::Iter<'a, ActionClass>;

    fn into_iter(self) -> Self::IntoIter {
        self.classes.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("coordinate outside [0, 1]")]
    OutOfRange,
    #[error("box has no area (x2 <= x1 or y2 <= y1)")]
    Degenerate,
}

/// Axis-aligned box in normalized image coordinates.
///
/// `(x1, y1)` is the top-left corner and `(x2, y2)` the bottom-right one.
/// Construction guarantees `0 <= x1 < x2 <= 1` and `0 <= y1 < y2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    x1: T,
    y1: T,
    x2: T,
    y2: T,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(x1: T, y1: T, x2: T, y2: T) -> Result<Self, BoxError> {
        if ![x1, y1, x2, y2].iter().all(|c| c.is_unit_interval()) {
            return Err(BoxError::OutOfRange);
        }
        if x2 <= x1 || y2 <= y1 {
            return Err(BoxError::Degenerate);
        }
        Ok(Self { x1, y1, x2, y2 })
    }

    #[inline]
    pub fn x1(&self) -> T {
        self.x1
    }

    #[inline]
    pub fn y1(&self) -> T {
        self.y1
    }

    #[inline]
    pub fn x2(&self) -> T {
        self.x2
    }

    #[inline]
    pub fn y2(&self) -> T {
        self.y2
    }

    #[inline]
    pub fn width(&self) -> T {
        self.x2 - self.x1
    }

    #[inline]
    pub fn height(&self) -> T {
        self.y2 - self.y1
    }

    #[inline]
    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [T; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    /// Lexicographic comparison on `(x1, y1, x2, y2)`.
    pub fn order(&self, other: &Self) -> std::cmp::Ordering {
        self.corners()
            .iter()
            .zip(other.corners().iter())
            .map(|(a, b)| a.order(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// One annotated person box carrying one action label at one keyframe.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthRecord<T = f64> {
    pub video_id: VideoId,
    pub timestamp_s: u32,
    pub bbox: BoundingBox<T>,
    pub action_id: ActionId,
    pub person_id: u32,
}

/// One scored candidate produced by the model for one action at one keyframe.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord<T = f64> {
    pub video_id: VideoId,
    pub timestamp_s: u32,
    pub bbox: BoundingBox<T>,
    pub action_id: ActionId,
    pub score: T,
    /// Raw model answer, kept for auditing. Never empty when present.
    pub answer_text: Option<Arc<str>>,
}
