//! Filtration data of equivariant rank-2 bundles.
//!
//! Each ray carries a full filtration of the two-dimensional generic fiber,
//! normalized to the shape `(-jump, 0, line)`: the filtration is zero below
//! `-jump`, equals `line` on `[-jump, 0)` and is everything from 0 on. When
//! `jump == 0` the dimension jumps straight from 0 to 2 and there is no line.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::exactlin::columns_proportional;
use crate::fan::{pairing, Character, Fan};
use crate::LinePoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("expected one filtration per ray ({expected}), got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ray {0}: a line must be given exactly when the jump is positive")]
    LineMismatch(usize),
    #[error("triple ({i1}, {i2}) is invalid: need i1 <= i2 with a line iff i1 < i2")]
    BadTriple { i1: i64, i2: i64 },
    #[error("partition part {0} is empty")]
    EmptyPart(usize),
    #[error("ray {0} appears in more than one part")]
    Overlap(usize),
    #[error("partition covers {found:?}, expected the positive-jump rays {expected:?}")]
    WrongSupport { expected: Vec<usize>, found: Vec<usize> },
    #[error("ray index {0} out of range")]
    RayIndex(usize),
}

/// One raw filtration `(i1, i2, line)` before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationTriple {
    i1: i64,
    i2: i64,
    line: Option<LinePoint>,
}

impl FiltrationTriple {
    pub fn new(i1: i64, i2: i64, line: Option<LinePoint>) -> Result<Self, BundleError> {
        if i1 > i2 || (i1 < i2) != line.is_some() {
            return Err(BundleError::BadTriple { i1, i2 });
        }
        Ok(Self { i1, i2, line })
    }

    pub fn i1(&self) -> i64 {
        self.i1
    }

    pub fn i2(&self) -> i64 {
        self.i2
    }

    pub fn line(&self) -> Option<&LinePoint> {
        self.line.as_ref()
    }
}

/// Normalized filtration on one ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RayFiltration {
    pub jump: u32,
    pub line: Option<LinePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleData {
    fan: Fan,
    filtrations: Vec<RayFiltration>,
}

impl BundleData {
    pub fn new(fan: Fan, filtrations: Vec<RayFiltration>) -> Result<Self, BundleError> {
        if filtrations.len() != fan.num_rays() {
            return Err(BundleError::LengthMismatch { expected: fan.num_rays(), got: filtrations.len() });
        }
        if let Some(bad) = filtrations.iter().position(|f| (f.jump > 0) != f.line.is_some()) {
            return Err(BundleError::LineMismatch(bad));
        }
        Ok(Self { fan, filtrations })
    }

    /// Shorthand: jumps and lines, with the line ignored where the jump is 0.
    pub fn from_jumps_and_lines(fan: Fan, jumps: &[u32], lines: &[Option<LinePoint>]) -> Result<Self, BundleError> {
        if jumps.len() != lines.len() {
            return Err(BundleError::LengthMismatch { expected: jumps.len(), got: lines.len() });
        }
        let filtrations =
            jumps.iter().zip(lines).map(|(&jump, line)| RayFiltration { jump, line: if jump > 0 { line.clone() } else { None } }).collect();
        Self::new(fan, filtrations)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn filtrations(&self) -> &[RayFiltration] {
        &self.filtrations
    }

    pub fn jump(&self, ray: usize) -> u32 {
        self.filtrations[ray].jump
    }

    pub fn jumps(&self) -> Vec<u32> {
        self.filtrations.iter().map(|f| f.jump).collect()
    }

    pub fn line(&self, ray: usize) -> Option<&LinePoint> {
        self.filtrations[ray].line.as_ref()
    }

    /// Π: the rays with a positive jump, in fan order.
    pub fn support(&self) -> Vec<usize> {
        support_of(&self.jumps())
    }

    pub fn max_jump(&self) -> u32 {
        self.filtrations.iter().map(|f| f.jump).max().unwrap_or(0)
    }

    /// The raw triples obtained by undoing a twist `n_ρ`:
    /// `(-jump - n_ρ, -n_ρ, line)`.
    pub fn untwist(&self, twist: &[i64]) -> Vec<FiltrationTriple> {
        self.filtrations
            .iter()
            .zip(twist)
            .map(|(f, &n)| FiltrationTriple { i1: -(f.jump as i64) - n, i2: -n, line: f.line.clone() })
            .collect()
    }
}

pub(crate) fn support_of(jumps: &[u32]) -> Vec<usize> {
    jumps.iter().enumerate().filter(|(_, &j)| j > 0).map(|(i, _)| i).collect()
}

/// Twists raw triples to the normalized form `(-jump, 0, line)`.
///
/// Returns the normalized data and the applied twist `n_ρ = -i2`.
pub fn normalize_twist(fan: &Fan, raw: &[FiltrationTriple]) -> Result<(BundleData, Vec<i64>), BundleError> {
    if raw.len() != fan.num_rays() {
        return Err(BundleError::LengthMismatch { expected: fan.num_rays(), got: raw.len() });
    }
    let mut filtrations = Vec::with_capacity(raw.len());
    let mut twist = Vec::with_capacity(raw.len());
    for t in raw {
        filtrations.push(RayFiltration {
            jump: u32::try_from(t.i2 - t.i1).map_err(|_| BundleError::BadTriple { i1: t.i1, i2: t.i2 })?,
            line: t.line.clone(),
        });
        twist.push(-t.i2);
    }
    Ok((BundleData::new(fan.clone(), filtrations)?, twist))
}

/// Dimension of `E^ρ(i)`.
pub fn filtration_dim(b: &BundleData, ray: usize, i: i64) -> u8 {
    level_dim(b.jump(ray), i)
}

pub(crate) fn level_dim(jump: u32, i: i64) -> u8 {
    if i >= 0 {
        2
    } else if i >= -(jump as i64) {
        1
    } else {
        0
    }
}

/// Dimension of `E^σ_m`, the intersection of the two ray filtrations of the
/// cone `k` at levels `<m, n(ρ)>`.
pub fn sigma_family_dim(b: &BundleData, k: usize, m: Character) -> u8 {
    let (r0, r1) = b.fan.cone_rays(k);
    let a = pairing(m, b.fan.ray(r0));
    let c = pairing(m, b.fan.ray(r1));
    sigma_dim_at(b, k, a, c)
}

/// Same as [`sigma_family_dim`] but indexed by the two pairing values.
pub fn sigma_dim_at(b: &BundleData, k: usize, a: i64, c: i64) -> u8 {
    let (r0, r1) = b.fan.cone_rays(k);
    let d0 = filtration_dim(b, r0, a);
    let d1 = filtration_dim(b, r1, c);
    match (d0, d1) {
        (1, 1) => {
            let same = columns_proportional(b.line(r0).expect("jump > 0"), b.line(r1).expect("jump > 0"));
            u8::from(same)
        }
        _ => d0.min(d1),
    }
}

/// A partition of a set Π of ray indices. Each part is stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
    interval: bool,
}

impl Partition {
    /// Builds a partition of `support` (Π, in fan order) and computes whether
    /// every part is a circular interval of Π.
    pub fn new(parts: Vec<Vec<usize>>, support: &[usize]) -> Result<Self, BundleError> {
        let mut seen = BTreeSet::new();
        let mut parts = parts;
        for (i, p) in parts.iter_mut().enumerate() {
            if p.is_empty() {
                return Err(BundleError::EmptyPart(i));
            }
            p.sort_unstable();
            for &r in p.iter() {
                if !seen.insert(r) {
                    return Err(BundleError::Overlap(r));
                }
            }
        }
        let mut expected: Vec<usize> = support.to_vec();
        expected.sort_unstable();
        let found: Vec<usize> = seen.into_iter().collect();
        if found != expected {
            return Err(BundleError::WrongSupport { expected, found });
        }
        let interval = parts.iter().all(|p| is_circular_interval(p, &expected));
        Ok(Self { parts, interval })
    }

    /// The partition of Π into singletons.
    pub fn fine(support: &[usize]) -> Self {
        Self::new(support.iter().map(|&r| vec![r]).collect(), support).expect("singletons partition their union")
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &[usize] {
        &self.parts[i]
    }

    /// Number of parts `s`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_interval(&self) -> bool {
        self.interval
    }

    /// The union Π, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.parts.iter().flatten().copied().collect();
        s.sort_unstable();
        s
    }

    pub fn part_of(&self, ray: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&ray))
    }

    /// Same parts, ignoring their order.
    pub fn same_parts(&self, other: &Partition) -> bool {
        let a: BTreeSet<&Vec<usize>> = self.parts.iter().collect();
        let b: BTreeSet<&Vec<usize>> = other.parts.iter().collect();
        a == b
    }
}

/// Whether `part` occupies consecutive positions of the circularly ordered `support`.
fn is_circular_interval(part: &[usize], support: &[usize]) -> bool {
    let n = support.len();
    let inside: Vec<bool> = support.iter().map(|r| part.contains(r)).collect();
    if inside.iter().all(|&x| x) {
        return true;
    }
    // An interval has exactly one position where membership switches on.
    (0..n).filter(|&i| inside[i] && !inside[(i + n - 1) % n]).count() == 1
}

/// A refinement relation between two partitions of the same Π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    projection: Vec<usize>,
    section: Option<Vec<usize>>,
}

impl Refinement {
    /// `projection[i]` is the coarse part containing fine part `i`.
    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn section(&self) -> Option<&[usize]> {
        self.section.as_deref()
    }

    /// Attaches a section; `None` if `section` is not one.
    pub fn with_section(mut self, section: Vec<usize>) -> Option<Self> {
        let coarse_len = self.coarse_len();
        let ok =
            section.len() == coarse_len && section.iter().enumerate().all(|(j, &i)| i < self.projection.len() && self.projection[i] == j);
        if !ok {
            return None;
        }
        self.section = Some(section);
        Some(self)
    }

    /// For each coarse part, the fine part with the smallest ray index.
    pub fn default_section(&self, fine: &Partition) -> Vec<usize> {
        (0..self.coarse_len())
            .map(|j| {
                (0..self.projection.len())
                    .filter(|&i| self.projection[i] == j)
                    .min_by_key(|&i| fine.part(i)[0])
                    .expect("projection is surjective")
            })
            .collect()
    }

    /// Every section of the projection, in lexicographic order.
    pub fn all_sections(&self) -> Vec<Vec<usize>> {
        let fibers: Vec<Vec<usize>> =
            (0..self.coarse_len()).map(|j| (0..self.projection.len()).filter(|&i| self.projection[i] == j).collect()).collect();
        let mut out = vec![Vec::new()];
        for fiber in &fibers {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    fiber.iter().map(move |&i| {
                        let mut p = prefix.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn coarse_len(&self) -> usize {
        self.projection.iter().max().map_or(0, |m| m + 1)
    }
}

/// The projection `fine → coarse` if every fine part lies inside a coarse part.
pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Option<Refinement> {
    if fine.support() != coarse.support() {
        return None;
    }
    let projection = fine
        .parts()
        .iter()
        .map(|p| {
            let j = coarse.part_of(p[0])?;
            p.iter().all(|r| coarse.part(j).contains(r)).then_some(j)
        })
        .collect::<Option<Vec<usize>>>()?;
    Some(Refinement { projection, section: None })
}

/// Maximal circular runs of Π carrying equal lines.
///
/// Parts are listed starting with the run whose first ray has the smallest
/// index; a single run covering Π is one part.
pub fn coarse_partition(b: &BundleData) -> Partition {
    let support = b.support();
    coarse_partition_of_lines(&support, |r| b.line(r).expect("positive jump carries a line"))
}

pub(crate) fn coarse_partition_of_lines<'a>(support: &[usize], line: impl Fn(usize) -> &'a LinePoint) -> Partition {
    let n = support.len();
    let starts: Vec<usize> = (0..n).filter(|&i| line(support[i]) != line(support[(i + n - 1) % n])).collect();
    let parts: Vec<Vec<usize>> = if starts.is_empty() {
        if n == 0 {
            Vec::new()
        } else {
            vec![support.to_vec()]
        }
    } else {
        starts
            .iter()
            .enumerate()
            .map(|(k, &start)| {
                let end = starts[(k + 1) % starts.len()];
                let len = (end + n - start - 1) % n + 1;
                (0..len).map(|d| support[(start + d) % n]).collect()
            })
            .collect()
    };
    Partition::new(parts, support).expect("runs partition the support")
}

/// Divisor coefficient vectors of the two line-bundle summands when the
/// coarse partition has at most two parts; `None` otherwise.
pub fn split_summands(b: &BundleData) -> Option<(Vec<i64>, Vec<i64>)> {
    let p = coarse_partition(b);
    if p.len() > 2 {
        return None;
    }
    let n = b.fan().num_rays();
    let mut first = vec![0i64; n];
    let mut second = vec![0i64; n];
    for (i, part) in p.parts().iter().enumerate() {
        let target = if i == 0 { &mut first } else { &mut second };
        for &r in part {
            target[r] = b.jump(r) as i64;
        }
    }
    Some((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn pt(a: i64, b: i64) -> LinePoint {
        LinePoint::new(int(a), int(b)).unwrap()
    }

    fn p2_bundle(jumps: &[u32], lines: &[(i64, i64)]) -> BundleData {
        let lines: Vec<_> = lines.iter().map(|&(a, b)| Some(pt(a, b))).collect();
        BundleData::from_jumps_and_lines(Fan::projective_plane(), jumps, &lines).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let fan = Fan::projective_plane();
        let l = pt(1, 0);
        let raw = vec![
            FiltrationTriple::new(3, 5, Some(l.clone())).unwrap(),
            FiltrationTriple::new(0, 0, None).unwrap(),
            FiltrationTriple::new(-1, 0, Some(l.clone())).unwrap(),
        ];
        let (b, twist) = normalize_twist(&fan, &raw).unwrap();
        assert_eq!(b.jumps(), vec![2, 0, 1]);
        assert_eq!(twist, vec![-5, 0, 0]);
        assert_eq!(b.line(0), Some(&l));
        assert_eq!(b.line(1), None);
        assert_eq!(b.untwist(&twist), raw);
    }

    #[test]
    fn triple_validation() {
        assert!(FiltrationTriple::new(2, 1, None).is_err());
        assert!(FiltrationTriple::new(0, 0, Some(pt(1, 0))).is_err());
        assert!(FiltrationTriple::new(0, 1, None).is_err());
        let lines = [Some(pt(1, 0)), None, None];
        let f = vec![
            RayFiltration { jump: 0, line: lines[0].clone() },
            RayFiltration { jump: 0, line: None },
            RayFiltration { jump: 0, line: None },
        ];
        assert_eq!(BundleData::new(Fan::projective_plane(), f), Err(BundleError::LineMismatch(0)));
    }

    #[test]
    fn filtration_levels() {
        let b = p2_bundle(&[2, 0, 1], &[(1, 0), (1, 0), (0, 1)]);
        assert_eq!(filtration_dim(&b, 0, -3), 0);
        assert_eq!(filtration_dim(&b, 0, -1), 1);
        assert_eq!(filtration_dim(&b, 0, 0), 2);
        assert_eq!(filtration_dim(&b, 1, -1), 0);
        assert_eq!(filtration_dim(&b, 1, 0), 2);
    }

    #[test]
    fn sigma_family_examples() {
        let b = p2_bundle(&[1, 1, 1], &[(1, 0), (0, 1), (1, 1)]);
        assert_eq!(sigma_family_dim(&b, 0, Character::new(-1, -1)), 0);
        assert_eq!(sigma_family_dim(&b, 0, Character::new(0, 0)), 2);
        assert_eq!(sigma_family_dim(&b, 0, Character::new(-1, 0)), 1);
        let same = p2_bundle(&[1, 1, 1], &[(1, 0), (1, 0), (1, 1)]);
        assert_eq!(sigma_family_dim(&same, 0, Character::new(-1, -1)), 1);
    }

    #[test]
    fn coarse_partition_examples() {
        let (a, bb) = ((1, 0), (0, 1));
        let p = coarse_partition(&p2_bundle(&[1, 1, 1], &[a, a, bb]));
        assert_eq!(p.parts(), &[vec![0, 1], vec![2]]);
        assert!(p.is_interval());

        let p = coarse_partition(&p2_bundle(&[1, 1, 1], &[a, bb, (1, 1)]));
        assert_eq!(p.len(), 3);

        // Wrap-around merge of rays 2 and 0; the run starting at ray 1 is listed first.
        let p = coarse_partition(&p2_bundle(&[1, 1, 1], &[a, bb, a]));
        assert_eq!(p.parts(), &[vec![1], vec![0, 2]]);

        // Equal lines separated only by a zero-jump ray still merge.
        let p = coarse_partition(&p2_bundle(&[1, 0, 1], &[a, bb, a]));
        assert_eq!(p.parts(), &[vec![0, 2]]);

        assert!(coarse_partition(&p2_bundle(&[0, 0, 0], &[a, a, a])).is_empty());
    }

    #[test]
    fn refinement_examples() {
        let support = [0, 1, 2];
        let fine = Partition::fine(&support);
        let mid = Partition::new(vec![vec![0], vec![1, 2]], &support).unwrap();
        let other = Partition::new(vec![vec![0, 1], vec![2]], &support).unwrap();
        let whole = Partition::new(vec![vec![0, 1, 2]], &support).unwrap();
        assert!(is_refinement(&fine, &mid).is_some());
        assert!(is_refinement(&mid, &whole).is_some());
        assert!(is_refinement(&mid, &other).is_none());
        let r = is_refinement(&fine, &other).unwrap();
        assert_eq!(r.projection(), &[0, 0, 1]);
        assert_eq!(r.default_section(&fine), vec![0, 2]);
        assert_eq!(r.all_sections(), vec![vec![0, 2], vec![1, 2]]);
        assert!(r.clone().with_section(vec![2, 2]).is_none());
        assert!(r.with_section(vec![1, 2]).is_some());
    }

    #[test]
    fn partition_validation() {
        assert_eq!(Partition::new(vec![vec![0], vec![]], &[0]), Err(BundleError::EmptyPart(1)));
        assert_eq!(Partition::new(vec![vec![0], vec![0, 1]], &[0, 1]), Err(BundleError::Overlap(0)));
        assert!(matches!(Partition::new(vec![vec![0]], &[0, 1]), Err(BundleError::WrongSupport { .. })));
        let crossing = Partition::new(vec![vec![0, 2], vec![1, 3]], &[0, 1, 2, 3]).unwrap();
        assert!(!crossing.is_interval());
        let wrap = Partition::new(vec![vec![3, 0], vec![1, 2]], &[0, 1, 2, 3]).unwrap();
        assert!(wrap.is_interval());
    }

    #[test]
    fn splitting_examples() {
        let (a, bb) = ((1, 0), (0, 1));
        let (d1, d2) = split_summands(&p2_bundle(&[1, 1, 2], &[a, a, bb])).unwrap();
        assert_eq!((d1, d2), (vec![1, 1, 0], vec![0, 0, 2]));
        assert!(split_summands(&p2_bundle(&[1, 1, 1], &[a, bb, (1, 1)])).is_none());
        assert_eq!(split_summands(&p2_bundle(&[0, 0, 0], &[a, a, a])), Some((vec![0, 0, 0], vec![0, 0, 0])));
    }
}
