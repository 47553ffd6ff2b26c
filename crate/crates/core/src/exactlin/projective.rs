use crate::scalar::Field;

use super::{LinAlgError, Matrix};

/// Scales a homogeneous vector so its first nonzero coordinate is 1.
/// Returns `false` (leaving the input untouched) for the zero vector.
pub fn normalize_homogeneous<T: Field>(v: &mut [T]) -> bool {
    let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() else {
        return false;
    };
    for x in v.iter_mut() {
        *x = x.clone() / lead.clone();
    }
    true
}

/// A point `(a : b)` of the projective line, stored with its first nonzero
/// coordinate equal to 1, so equality of points is equality of fields.
///
/// The affine coordinate is `a / b`: `(0 : 1)` is 0, `(1 : 1)` is 1 and
/// `(1 : 0)` is the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveLinePoint<T> {
    a: T,
    b: T,
}

impl<T: Field> ProjectiveLinePoint<T> {
    pub fn new(a: T, b: T) -> Result<Self, LinAlgError> {
        let mut v = [a, b];
        if !normalize_homogeneous(&mut v) {
            return Err(LinAlgError::ZeroPoint);
        }
        let [a, b] = v;
        Ok(Self { a, b })
    }

    pub fn from_slice(v: &[T]) -> Result<Self, LinAlgError> {
        match v {
            [a, b] => Self::new(a.clone(), b.clone()),
            _ => Err(LinAlgError::Length { expected: 2, got: v.len() }),
        }
    }

    /// Point spanned by column `j` of a matrix with two rows.
    pub fn from_column(m: &Matrix<T>, j: usize) -> Result<Self, LinAlgError> {
        Self::from_slice(&m.column(j))
    }

    /// Point with affine coordinate `z`, i.e. `(z : 1)`.
    pub fn affine(z: T) -> Self {
        Self::new(z, T::one()).expect("(z : 1) is never zero")
    }

    pub fn infinity() -> Self {
        Self { a: T::one(), b: T::zero() }
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn coords(&self) -> [T; 2] {
        [self.a.clone(), self.b.clone()]
    }

    /// `a/b`, or `None` at infinity.
    pub fn affine_value(&self) -> Option<T> {
        if self.b.is_zero() {
            None
        } else {
            Some(self.a.clone() / self.b.clone())
        }
    }

    /// `det [p q]` of the homogeneous representatives.
    pub fn det(&self, other: &Self) -> T {
        self.a.clone() * other.b.clone() - other.a.clone() * self.b.clone()
    }

    /// Renormalizes an already-normalized point; a no-op kept for symmetry
    /// with raw pairs.
    pub fn normalized(&self) -> Self {
        Self::new(self.a.clone(), self.b.clone()).expect("stored points are nonzero")
    }
}

/// True iff `p` and `q` are the same point of the projective line. Stored
/// points are normalized, so this is equality of coordinates.
pub fn columns_proportional<T: Field>(p: &ProjectiveLinePoint<T>, q: &ProjectiveLinePoint<T>) -> bool {
    p == q
}
