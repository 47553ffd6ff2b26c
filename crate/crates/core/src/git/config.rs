use super::{mask_indices, GitError, StabilityVerdict, VerdictBuilder};
use crate::exactlin::normalize_homogeneous;
use crate::{LinePoint, Mat, Rational};

/// `n` points of `P^{m-1}`, stored as normalized homogeneous `m`-vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    m: usize,
    points: Vec<Vec<Rational>>,
}

impl PointConfig {
    pub fn new(m: usize, points: Vec<Vec<Rational>>) -> Result<Self, GitError> {
        if m == 0 || points.is_empty() {
            return Err(GitError::Empty);
        }
        let mut normalized = Vec::with_capacity(points.len());
        for (index, mut p) in points.into_iter().enumerate() {
            if p.len() != m {
                return Err(GitError::Dimension { index, expected: m, got: p.len() });
            }
            if !normalize_homogeneous(&mut p) {
                return Err(GitError::ZeroPoint(index));
            }
            normalized.push(p);
        }
        Ok(Self { m, points: normalized })
    }

    pub fn from_line_points(points: &[LinePoint]) -> Self {
        Self { m: 2, points: points.iter().map(|p| p.coords().to_vec()).collect() }
    }

    /// The rows of `a` as points of `P^{cols-1}`.
    pub fn from_rows(a: &Mat) -> Result<Self, GitError> {
        Self::new(a.ncols(), a.to_rows())
    }

    pub fn ambient(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[Rational] {
        &self.points[i]
    }

    /// Points on the projective line, if `m = 2`.
    pub fn line_points(&self) -> Option<Vec<LinePoint>> {
        (self.m == 2).then(|| self.points.iter().map(|p| LinePoint::from_slice(p).expect("nonzero")).collect())
    }

    pub fn transform(&self, g: &Mat) -> Result<Self, GitError> {
        let pts = self
            .points
            .iter()
            .map(|p| {
                let col = Mat::from_columns(self.m, std::slice::from_ref(p)).expect("shape");
                g.mul(&col).column(0)
            })
            .collect();
        Self::new(g.nrows(), pts)
    }

    fn span_rank(&self, idx: &[usize]) -> usize {
        Mat::from_rows(&idx.iter().map(|&i| self.points[i].clone()).collect::<Vec<_>>()).expect("rectangular").rank()
    }
}

/// Mumford's criterion for the diagonal `GL_m` action: stable iff
/// `#{i : p_i ∈ L} · m < n · dim L` for every proper subspace `L`,
/// semistable iff `≤`. Only spans of subsets of the points are tested.
pub fn config_stability(c: &PointConfig) -> StabilityVerdict {
    if c.ambient() == 2 {
        line_stability(c)
    } else {
        subset_stability(c)
    }
}

/// On the projective line the proper subspaces spanned by points are the
/// points themselves, visited in order of first occurrence.
fn line_stability(c: &PointConfig) -> StabilityVerdict {
    let n = c.len();
    let mut builder = VerdictBuilder::default();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let group: Vec<usize> = (i..n).filter(|&j| c.points[j] == c.points[i]).collect();
        for &j in &group {
            done[j] = true;
        }
        if builder.record(group.len() * 2, n, || group.clone()) {
            break;
        }
    }
    builder.finish()
}

pub(crate) fn subset_stability(c: &PointConfig) -> StabilityVerdict {
    let n = c.len();
    let m = c.ambient();
    assert!(n < 64, "configurations are limited to 63 points");
    let mut seen = std::collections::HashSet::new();
    let mut builder = VerdictBuilder::default();
    for mask in 1u64..(1 << n) {
        let subset = mask_indices(mask, n);
        let dim = c.span_rank(&subset);
        if dim == m {
            continue;
        }
        let closure: Vec<usize> = (0..n)
            .filter(|i| {
                subset.contains(i) || {
                    let mut with = subset.clone();
                    with.push(*i);
                    c.span_rank(&with) == dim
                }
            })
            .collect();
        if !seen.insert(closure.clone()) {
            continue;
        }
        if builder.record(closure.len() * m, n * dim, || closure.clone()) {
            break;
        }
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::StabilityStatus;
    use crate::scalar::int;

    fn line(pts: &[(i64, i64)]) -> PointConfig {
        PointConfig::new(2, pts.iter().map(|&(a, b)| vec![int(a), int(b)]).collect()).unwrap()
    }

    #[test]
    fn line_examples() {
        assert_eq!(config_stability(&line(&[(0, 1), (1, 1), (1, 0), (5, 1)])), StabilityVerdict::stable());
        let v = config_stability(&line(&[(1, 2), (2, 4), (3, 1), (6, 2)]));
        assert_eq!(v.status, StabilityStatus::ProperlySemistable);
        assert_eq!(v.witness, Some(vec![0, 1]));
        let v = config_stability(&line(&[(1, 2), (1, 2), (1, 2), (3, 1)]));
        assert_eq!(v.status, StabilityStatus::Unstable);
        assert_eq!(v.witness, Some(vec![0, 1, 2]));
        assert_eq!(config_stability(&line(&[(1, 0), (0, 1), (1, 1)])).status, StabilityStatus::Stable);
        assert_eq!(config_stability(&line(&[(1, 0)])).status, StabilityStatus::Unstable);
    }

    #[test]
    fn plane_examples() {
        let pts = |v: &[[i64; 3]]| PointConfig::new(3, v.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()).unwrap();
        // Six points with three on a line: 3·3 < 6·2 still holds.
        let c = pts(&[[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [1, 0, 1], [2, 3, 7]]);
        assert_eq!(config_stability(&c).status, StabilityStatus::Stable);
        // Four on a line: 4·3 = 6·2.
        let c = pts(&[[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 0], [0, 0, 1], [2, 3, 7]]);
        assert_eq!(config_stability(&c).status, StabilityStatus::ProperlySemistable);
        // A double point among four: 2·3 > 4·1.
        let c = pts(&[[1, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let v = config_stability(&c);
        assert_eq!(v.status, StabilityStatus::Unstable);
        assert_eq!(v.witness, Some(vec![0, 1]));
    }

    #[test]
    fn line_shortcut_matches_subsets() {
        let pool = [(1, 0), (0, 1), (1, 1), (2, 1)];
        for n in 1..=5u32 {
            for code in 0..4usize.pow(n) {
                let pts: Vec<_> = (0..n).map(|i| pool[code / 4usize.pow(i) % 4]).collect();
                let c = line(&pts);
                assert_eq!(config_stability(&c), subset_stability(&c), "{pts:?}");
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PointConfig::new(2, vec![vec![int(0), int(0)]]), Err(GitError::ZeroPoint(0)));
        assert!(matches!(PointConfig::new(2, vec![vec![int(1)]]), Err(GitError::Dimension { .. })));
        assert_eq!(PointConfig::new(2, vec![]), Err(GitError::Empty));
    }
}
