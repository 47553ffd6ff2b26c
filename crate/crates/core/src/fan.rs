//! Smooth complete fans in the plane and their Cox-ring combinatorics.
//!
//! A fan is stored as its rays in counterclockwise cyclic order; the maximal
//! cone `k` is spanned by rays `k` and `k + 1 (mod m)`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("a fan needs at least 3 rays, got {0}")]
    TooFewRays(usize),
    #[error("ray {index} = {ray} is not primitive")]
    NotPrimitive { index: usize, ray: RayVector },
    #[error("rays {first} and {second} span a cone of determinant {det}, expected +1")]
    NotSmooth { first: usize, second: usize, det: i64 },
    #[error("rays wind {0} times around the origin, expected exactly once")]
    NotComplete(i64),
    #[error("cone index {index} out of range for a fan with {rays} rays")]
    ConeIndex { index: usize, rays: usize },
    #[error("ray {0} is not the sum of its neighbours and cannot be blown down")]
    NotExceptional(usize),
    #[error("unknown fan `{0}`, expected p2, hirzebruch:a or file:<path>")]
    UnknownSpec(String),
}

/// Primitive lattice vector spanning a ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct RayVector {
    pub x: i64,
    pub y: i64,
}

impl RayVector {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y) == 1
    }

    pub fn det(&self, other: &RayVector) -> i64 {
        self.x * other.y - self.y * other.x
    }

    fn dot(&self, other: &RayVector) -> i64 {
        self.x * other.x + self.y * other.y
    }
}

impl std::ops::Add for RayVector {
    type Output = RayVector;

    fn add(self, rhs: RayVector) -> RayVector {
        RayVector::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl From<[i64; 2]> for RayVector {
    fn from([x, y]: [i64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<RayVector> for [i64; 2] {
    fn from(r: RayVector) -> Self {
        [r.x, r.y]
    }
}

impl fmt::Display for RayVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A character `m` of the torus, i.e. an element of the dual lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Character {
    pub m1: i64,
    pub m2: i64,
}

impl Character {
    pub const fn new(m1: i64, m2: i64) -> Self {
        Self { m1, m2 }
    }
}

impl From<[i64; 2]> for Character {
    fn from([m1, m2]: [i64; 2]) -> Self {
        Self { m1, m2 }
    }
}

impl From<Character> for [i64; 2] {
    fn from(c: Character) -> Self {
        [c.m1, c.m2]
    }
}

/// `<m, n(ρ)>`.
pub fn pairing(m: Character, r: RayVector) -> i64 {
    m.m1 * r.x + m.m2 * r.y
}

/// Exponent vector of a monomial in the Cox ring, one entry per ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ray indices with a positive exponent.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i).collect()
    }

    /// Monomial product.
    pub fn plus(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Whether `x^self` divides some power of `x^other`.
    pub fn divides_power_of(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == 0 || b > 0)
    }
}

fn winding_crosses(u: &RayVector, w: &RayVector) -> bool {
    // Does the counterclockwise arc (u, w] pass through the direction (1, 0)?
    let d = RayVector::new(1, 0);
    u.det(&d) > 0 && (d.det(w) > 0 || (d.det(w) == 0 && d.dot(w) > 0))
}

/// Checks the smooth-complete fan invariants on a raw ray list.
pub fn validate_rays(rays: &[RayVector]) -> Result<(), FanError> {
    let m = rays.len();
    if m < 3 {
        return Err(FanError::TooFewRays(m));
    }
    if let Some(index) = rays.iter().position(|r| !r.is_primitive()) {
        return Err(FanError::NotPrimitive { index, ray: rays[index] });
    }
    for k in 0..m {
        let det = rays[k].det(&rays[(k + 1) % m]);
        if det != 1 {
            return Err(FanError::NotSmooth { first: k, second: (k + 1) % m, det });
        }
    }
    // Every step is a counterclockwise turn of less than half a circle, so the
    // number of crossings of a fixed direction is the winding number.
    let winding = (0..m).filter(|&k| winding_crosses(&rays[k], &rays[(k + 1) % m])).count() as i64;
    if winding != 1 {
        return Err(FanError::NotComplete(winding));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FanJson", into = "FanJson")]
pub struct Fan {
    rays: Vec<RayVector>,
}

#[derive(Serialize, Deserialize)]
struct FanJson {
    rays: Vec<RayVector>,
}

impl TryFrom<FanJson> for Fan {
    type Error = FanError;

    fn try_from(j: FanJson) -> Result<Self, FanError> {
        Fan::new(j.rays)
    }
}

impl From<Fan> for FanJson {
    fn from(f: Fan) -> Self {
        FanJson { rays: f.rays }
    }
}

impl Fan {
    pub fn new(rays: Vec<RayVector>) -> Result<Self, FanError> {
        validate_rays(&rays)?;
        Ok(Self { rays })
    }

    /// The fan of the projective plane.
    pub fn projective_plane() -> Self {
        Self::new(vec![RayVector::new(1, 0), RayVector::new(0, 1), RayVector::new(-1, -1)]).expect("standard fan")
    }

    /// The fan of the Hirzebruch surface `F_a`.
    pub fn hirzebruch(a: u32) -> Self {
        Self::new(vec![RayVector::new(1, 0), RayVector::new(0, 1), RayVector::new(-1, a as i64), RayVector::new(0, -1)])
            .expect("standard fan")
    }

    /// Parses `p2`, `hirzebruch:a` (alias `f:a`), optionally followed by
    /// `+blowup:k1,k2,..`. File-based fans are handled by the caller.
    pub fn from_spec(spec: &str) -> Result<Self, FanError> {
        let unknown = || FanError::UnknownSpec(spec.to_string());
        let (base, blowups) = match spec.split_once('+') {
            Some((b, rest)) => (b, Some(rest)),
            None => (spec, None),
        };
        let mut fan = match base.trim() {
            "p2" | "P2" => Self::projective_plane(),
            other => {
                let (name, a) = other.split_once(':').ok_or_else(unknown)?;
                if !matches!(name, "hirzebruch" | "f" | "F") {
                    return Err(unknown());
                }
                Self::hirzebruch(a.trim().parse().map_err(|_| unknown())?)
            }
        };
        if let Some(rest) = blowups {
            let list = rest.strip_prefix("blowup:").ok_or_else(unknown)?;
            for k in list.split(',') {
                fan = fan.blow_up(k.trim().parse().map_err(|_| unknown())?)?;
            }
        }
        Ok(fan)
    }

    pub fn validate(&self) -> Result<(), FanError> {
        validate_rays(&self.rays)
    }

    pub fn rays(&self) -> &[RayVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> RayVector {
        self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// Maximal cones equal rays in number for a complete surface fan.
    pub fn num_cones(&self) -> usize {
        self.rays.len()
    }

    /// Ray indices `(k, k + 1 mod m)` of the maximal cone `k`.
    pub fn cone_rays(&self, k: usize) -> (usize, usize) {
        (k, (k + 1) % self.rays.len())
    }

    pub fn check_cone(&self, k: usize) -> Result<(), FanError> {
        if k < self.num_cones() {
            Ok(())
        } else {
            Err(FanError::ConeIndex { index: k, rays: self.num_rays() })
        }
    }

    /// Whether rays `i` and `j` span a maximal cone.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let m = self.rays.len();
        i != j && ((i + 1) % m == j || (j + 1) % m == i)
    }

    /// Inserts `n(ρ_k) + n(ρ_{k+1})` between rays `k` and `k + 1`.
    pub fn blow_up(&self, k: usize) -> Result<Self, FanError> {
        self.check_cone(k)?;
        let (a, b) = self.cone_rays(k);
        let mut rays = self.rays.clone();
        rays.insert(k + 1, self.rays[a] + self.rays[b]);
        Self::new(rays)
    }

    /// Removes ray `i` if it is the sum of its two neighbours.
    pub fn blow_down(&self, i: usize) -> Result<Self, FanError> {
        let m = self.rays.len();
        if i >= m {
            return Err(FanError::ConeIndex { index: i, rays: m });
        }
        if self.rays[(i + m - 1) % m] + self.rays[(i + 1) % m] != self.rays[i] {
            return Err(FanError::NotExceptional(i));
        }
        let mut rays = self.rays.clone();
        rays.remove(i);
        Self::new(rays)
    }

    /// Generators `x^σ̂` of the irrelevant ideal, one per maximal cone: the
    /// product of all variables whose ray is not in the cone.
    pub fn irrelevant_generators(&self) -> Vec<ExponentVector> {
        (0..self.num_cones())
            .map(|k| {
                let (a, b) = self.cone_rays(k);
                ExponentVector((0..self.num_rays()).map(|i| u32::from(i != a && i != b)).collect())
            })
            .collect()
    }

    /// Solves `<m, n(ρ_k)> = a`, `<m, n(ρ_{k+1})> = b`. Adjacent rays form a
    /// lattice basis, so the solution is integral.
    pub fn character_from_pairings(&self, k: usize, a: i64, b: i64) -> Character {
        let (i, j) = self.cone_rays(k);
        let (u, v) = (self.rays[i], self.rays[j]);
        Character::new(a * v.y - b * u.y, b * u.x - a * v.x)
    }
}
