//! Extended integers `ℤ ∪ {−∞, +∞}` and per-vertex value vectors.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::arena::VertexId;

/// Largest magnitude a finite value may take before arithmetic reports overflow.
pub const FINITE_LIMIT: i64 = 1 << 62;

/// An element of `ℤ ∪ {−∞, +∞}`.
///
/// The derived order places `NegInf` below every finite value and `PosInf`
/// above, which is the order of the value lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    NegInf,
    Finite(i64),
    PosInf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueError {
    /// `(+∞) + (−∞)` has no meaning in this lattice.
    Indeterminate,
    /// A finite result left `[−2^62, 2^62]`.
    Overflow,
}

impl fmt::Display for ValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueError::Indeterminate => f.write_str("sum of +inf and -inf is undefined"),
            ValueError::Overflow => f.write_str("finite value outside +-2^62"),
        }
    }
}

impl ExtValue {
    pub const ZERO: ExtValue = ExtValue::Finite(0);

    /// Builds a finite value, checking the magnitude limit.
    pub fn finite(x: i64) -> Result<ExtValue, ValueError> {
        if (-FINITE_LIMIT..=FINITE_LIMIT).contains(&x) {
            Ok(ExtValue::Finite(x))
        } else {
            Err(ValueError::Overflow)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn as_finite(self) -> Option<i64> {
        match self {
            ExtValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn checked_add(self, other: ExtValue) -> Result<ExtValue, ValueError> {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => {
                a.checked_add(b).ok_or(ValueError::Overflow).and_then(ExtValue::finite)
            }
            (ExtValue::PosInf, ExtValue::NegInf) | (ExtValue::NegInf, ExtValue::PosInf) => {
                Err(ValueError::Indeterminate)
            }
            (ExtValue::PosInf, _) | (_, ExtValue::PosInf) => Ok(ExtValue::PosInf),
            (ExtValue::NegInf, _) | (_, ExtValue::NegInf) => Ok(ExtValue::NegInf),
        }
    }

    /// `weight + self`; never indeterminate because weights are finite.
    #[inline]
    pub fn add_weight(self, weight: i64) -> Result<ExtValue, ValueError> {
        match self {
            ExtValue::Finite(a) => a.checked_add(weight).ok_or(ValueError::Overflow).and_then(ExtValue::finite),
            inf => Ok(inf),
        }
    }
}

impl From<i64> for ExtValue {
    fn from(x: i64) -> Self {
        ExtValue::Finite(x)
    }
}

impl PartialEq<i64> for ExtValue {
    fn eq(&self, other: &i64) -> bool {
        *self == ExtValue::Finite(*other)
    }
}

impl PartialOrd<i64> for ExtValue {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&ExtValue::Finite(*other)))
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => f.write_str("-inf"),
            ExtValue::Finite(x) => write!(f, "{x}"),
            ExtValue::PosInf => f.write_str("+inf"),
        }
    }
}

/// One value per vertex, indexed by [`VertexId`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueVector(Vec<ExtValue>);

impl ValueVector {
    pub fn filled(len: usize, value: ExtValue) -> Self {
        ValueVector(alloc::vec![value; len])
    }

    pub fn from_vec(values: Vec<ExtValue>) -> Self {
        ValueVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[ExtValue] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [ExtValue] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<ExtValue> {
        self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ExtValue> {
        self.0.iter()
    }

    /// Pointwise `self ⊑ other`.
    pub fn le(&self, other: &ValueVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Index<VertexId> for ValueVector {
    type Output = ExtValue;
    fn index(&self, v: VertexId) -> &ExtValue {
        &self.0[v.index()]
    }
}

impl IndexMut<VertexId> for ValueVector {
    fn index_mut(&mut self, v: VertexId) -> &mut ExtValue {
        &mut self.0[v.index()]
    }
}

impl Index<usize> for ValueVector {
    type Output = ExtValue;
    fn index(&self, i: usize) -> &ExtValue {
        &self.0[i]
    }
}

impl IndexMut<usize> for ValueVector {
    fn index_mut(&mut self, i: usize) -> &mut ExtValue {
        &mut self.0[i]
    }
}

impl<'a> IntoIterator for &'a ValueVector {
    type Item = &'a ExtValue;
    type IntoIter = core::slice::Iter<'a, ExtValue>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
