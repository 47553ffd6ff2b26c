use serde::Serialize;

use super::{config_stability, mask_indices, GitError, PointConfig, StabilityStatus};
use crate::bundle::Partition;
use crate::exactlin::columns_proportional;
use crate::fan::Fan;
use crate::LinePoint;

/// The coordinate `g · p_4` of a semistable four-point configuration, where
/// `g` sends `p_1, p_2, p_3` to `0, 1, ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliPointS4 {
    pub point: LinePoint,
    /// For properly semistable inputs, the coinciding pairs (0-based).
    pub boundary: Option<[[usize; 2]; 2]>,
}

/// Evaluates `(p_4 − p_1)(p_2 − p_3) / ((p_4 − p_3)(p_2 − p_1))` on
/// homogeneous coordinates.
pub fn moduli_coordinate_s4(c: &PointConfig) -> Result<ModuliPointS4, GitError> {
    let p = c.line_points().filter(|p| p.len() == 4).ok_or(GitError::NotFourPoints)?;
    let verdict = config_stability(c);
    if verdict.status == StabilityStatus::Unstable {
        return Err(GitError::Unstable);
    }
    let d = |i: usize, j: usize| p[i].det(&p[j]);
    let point = LinePoint::new(d(3, 0) * d(1, 2), d(3, 2) * d(1, 0)).expect("semistable");
    let boundary = verdict.witness.map(|w| {
        let rest: Vec<usize> = (0..4).filter(|i| !w.contains(i)).collect();
        [[w[0], w[1]], [rest[0], rest[1]]]
    });
    Ok(ModuliPointS4 { point, boundary })
}

/// Unordered balanced splits of `s` parts; each representative contains 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemistableClasses {
    pub count: usize,
    pub representatives: Vec<Vec<usize>>,
}

pub fn semistable_classes(s: usize) -> Result<SemistableClasses, GitError> {
    if s % 2 == 1 {
        return Err(GitError::OddS(s));
    }
    if s < 4 {
        return Err(GitError::TooFewParts(s));
    }
    assert!(s < 64, "at most 63 parts");
    let representatives: Vec<Vec<usize>> =
        (0u64..1 << s).filter(|mask| mask & 1 == 1 && mask.count_ones() as usize * 2 == s).map(|mask| mask_indices(mask, s)).collect();
    Ok(SemistableClasses { count: representatives.len(), representatives })
}

/// The balanced splits whose direct sum is locally free: no two fan-adjacent
/// rays lie in different parts on the same side.
pub fn locally_free_splits(fan: &Fan, partition: &Partition) -> Result<Vec<Vec<usize>>, GitError> {
    let classes = semistable_classes(partition.len())?;
    let rays = partition.support();
    Ok(classes
        .representatives
        .into_iter()
        .filter(|psi| {
            let side = |r: usize| psi.contains(&partition.part_of(r).expect("supported"));
            rays.iter().all(|&u| {
                rays.iter().all(|&w| !(u < w && fan.adjacent(u, w) && partition.part_of(u) != partition.part_of(w) && side(u) == side(w)))
            })
        })
        .collect())
}

/// Pairs `i < j` of proportional lines.
pub fn coincidence_pairs(lines: &[LinePoint]) -> Vec<(usize, usize)> {
    let n = lines.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| columns_proportional(&lines[i], &lines[j])).collect()
}
