//! GIT stability of point configurations and Grassmannian points, and its
//! translation to equivariant sheaves of rank two.

use serde::Serialize;
use thiserror::Error;

mod config;
mod grass;
mod moduli;
mod sheaves;

pub use config::{config_stability, PointConfig};
pub use grass::{dual_presentation, grass_stability, GrassMode};
pub use moduli::{coincidence_pairs, locally_free_splits, moduli_coordinate_s4, semistable_classes, ModuliPointS4, SemistableClasses};
pub use sheaves::{p_equivalent, p_stability, part_lines, PSubject, Subject};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GitError {
    #[error("point {0} is zero")]
    ZeroPoint(usize),
    #[error("point {index} has {got} coordinates, expected {expected}")]
    Dimension { index: usize, expected: usize, got: usize },
    #[error("a configuration needs at least one point in dimension at least 1")]
    Empty,
    #[error("matrix has rank {rank}, expected full column rank {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("the partition does not refine the coarse partition")]
    RefinementMismatch,
    #[error("the sheaf is not semistable with respect to the partition")]
    NotSemistable,
    #[error("jumps or partitions differ")]
    ShapeMismatch,
    #[error("the number of parts must be even, got {0}")]
    OddS(usize),
    #[error("at least four parts are required, got {0}")]
    TooFewParts(usize),
    #[error("expected four points on the projective line")]
    NotFourPoints,
    #[error("three or more points coincide")]
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    ProperlySemistable,
    Unstable,
}

impl StabilityStatus {
    pub fn is_semistable(self) -> bool {
        self != StabilityStatus::Unstable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StabilityStatus::Stable => "stable",
            StabilityStatus::ProperlySemistable => "properly_semistable",
            StabilityStatus::Unstable => "unstable",
        }
    }
}

/// A verdict with the index set spanning a violating (or, failing that, an
/// equality) subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    pub witness: Option<Vec<usize>>,
}

impl StabilityVerdict {
    pub fn stable() -> Self {
        Self { status: StabilityStatus::Stable, witness: None }
    }
}

/// Tracks the first strict violation and the first equality while
/// enumerating candidate subspaces.
#[derive(Default)]
pub(crate) struct VerdictBuilder {
    violation: Option<Vec<usize>>,
    equality: Option<Vec<usize>>,
}

impl VerdictBuilder {
    /// Records the comparison of `lhs` against `rhs`; returns true once a
    /// violation is known.
    pub(crate) fn record(&mut self, lhs: usize, rhs: usize, witness: impl FnOnce() -> Vec<usize>) -> bool {
        if lhs > rhs {
            self.violation = Some(witness());
            return true;
        }
        if lhs == rhs && self.equality.is_none() {
            self.equality = Some(witness());
        }
        false
    }

    pub(crate) fn finish(self) -> StabilityVerdict {
        match (self.violation, self.equality) {
            (Some(w), _) => StabilityVerdict { status: StabilityStatus::Unstable, witness: Some(w) },
            (None, Some(w)) => StabilityVerdict { status: StabilityStatus::ProperlySemistable, witness: Some(w) },
            (None, None) => StabilityVerdict::stable(),
        }
    }
}

pub(crate) fn mask_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}
