use std::cmp::Ordering;
use std::fmt;
use std::num::NonZeroI32;

use serde::{Deserialize, Serialize};

/// A half-edge identifier. The sign flip is the base-level involution.
///
/// Darts are ordered canonically by `(|id|, sign)` with the positive dart
/// first, which is also the order of their dense storage index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Dart(NonZeroI32);

impl Dart {
    pub fn new(id: i32) -> Option<Dart> {
        NonZeroI32::new(id).map(Dart)
    }

    /// Panics on zero.
    pub fn from_id(id: i32) -> Dart {
        Dart::new(id).expect("dart id must be nonzero")
    }

    #[inline]
    pub fn id(self) -> i32 {
        self.0.get()
    }

    /// The base-level involution: `-d`.
    #[inline]
    pub fn alpha0(self) -> Dart {
        Dart(-self.0)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0.get() > 0
    }

    /// Dense storage slot: `2(|id|-1)` for positive darts, `+1` for negative.
    #[inline]
    pub fn index(self) -> usize {
        let id = self.0.get();
        2 * (id.unsigned_abs() as usize - 1) + usize::from(id < 0)
    }

    #[inline]
    pub fn from_index(index: usize) -> Dart {
        let magnitude = (index / 2 + 1) as i32;
        Dart::from_id(if index.is_multiple_of(2) { magnitude } else { -magnitude })
    }
}

impl Ord for Dart {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for Dart {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl TryFrom<i32> for Dart {
    type Error = String;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        Dart::new(value).ok_or_else(|| "dart id 0 is not allowed".to_string())
    }
}

impl From<Dart> for i32 {
    fn from(d: Dart) -> i32 {
        d.id()
    }
}
