use std::borrow::Cow;

use super::{config_stability, GitError, PointConfig, StabilityStatus, StabilityVerdict};
use crate::bundle::{coarse_partition, is_refinement, BundleData, Partition};
use crate::exactlin::columns_proportional;
use crate::sheaf::{bidual, SheafPresentation};
use crate::{LinePoint, Rational};

/// A bundle, or a torsion-free sheaf through its presentation.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Bundle(&'a BundleData),
    Presentation(&'a SheafPresentation),
}

impl<'a> Subject<'a> {
    fn hull(&self) -> Cow<'a, BundleData> {
        match *self {
            Subject::Bundle(b) => Cow::Borrowed(b),
            Subject::Presentation(p) => Cow::Owned(bidual(p)),
        }
    }
}

/// A subject together with the partition it is measured against.
#[derive(Clone, Copy, Debug)]
pub struct PSubject<'a> {
    pub subject: Subject<'a>,
    pub partition: &'a Partition,
}

/// The line carried by each part of `partition`, which must refine the
/// coarse partition of the (bidual) bundle.
pub fn part_lines(subject: Subject<'_>, partition: &Partition) -> Result<(Vec<u32>, Vec<LinePoint>), GitError> {
    let hull = subject.hull();
    let coarse = coarse_partition(&hull);
    if partition.is_empty() || is_refinement(partition, &coarse).is_none() {
        return Err(GitError::RefinementMismatch);
    }
    let lines = partition.parts().iter().map(|part| hull.line(part[0]).expect("supported ray").clone()).collect();
    Ok((hull.jumps(), lines))
}

/// Stability of the part lines as points of the projective line; the
/// witness lists part indices.
pub fn p_stability(subject: Subject<'_>, partition: &Partition) -> Result<StabilityVerdict, GitError> {
    let (_, lines) = part_lines(subject, partition)?;
    Ok(config_stability(&PointConfig::from_line_points(&lines)))
}

/// Equivalence of two semistable subjects sharing jumps and partition.
pub fn p_equivalent(x: PSubject<'_>, y: PSubject<'_>) -> Result<bool, GitError> {
    if !x.partition.same_parts(y.partition) {
        return Err(GitError::ShapeMismatch);
    }
    let (jx, lx) = part_lines(x.subject, x.partition)?;
    let (jy, ly) = part_lines(y.subject, y.partition)?;
    if jx != jy {
        return Err(GitError::ShapeMismatch);
    }
    let vx = config_stability(&PointConfig::from_line_points(&lx));
    let vy = config_stability(&PointConfig::from_line_points(&ly));
    if !vx.status.is_semistable() || !vy.status.is_semistable() {
        return Err(GitError::NotSemistable);
    }
    Ok(match (vx.status, vy.status) {
        (StabilityStatus::Stable, StabilityStatus::Stable) => projectively_equivalent(&lx, &ly),
        (StabilityStatus::ProperlySemistable, StabilityStatus::ProperlySemistable) => half_class(&lx) == half_class(&ly),
        _ => false,
    })
}

/// The half-size set of coinciding indices, normalized to contain index 0.
fn half_class(lines: &[LinePoint]) -> Vec<usize> {
    let s = lines.len();
    let psi = (0..s)
        .map(|i| (0..s).filter(|&j| columns_proportional(&lines[i], &lines[j])).collect::<Vec<_>>())
        .find(|group| 2 * group.len() == s)
        .expect("properly semistable");
    if psi.contains(&0) {
        psi
    } else {
        (0..s).filter(|i| !psi.contains(i)).collect()
    }
}

/// Cross-ratio `(p_4 − p_1)(p_2 − p_3) : (p_4 − p_3)(p_2 − p_1)` in
/// homogeneous form.
fn cross_ratio(p1: &LinePoint, p2: &LinePoint, p3: &LinePoint, p4: &LinePoint) -> [Rational; 2] {
    [p4.det(p1) * p2.det(p3), p4.det(p3) * p2.det(p1)]
}

/// The unique `g ∈ PGL_2` matching three pairwise distinct base columns
/// sends every further column `x_l` to the point with the same cross-ratio
/// against the base, so `g · x_l = y_l` iff the cross-ratios agree.
fn projectively_equivalent(x: &[LinePoint], y: &[LinePoint]) -> bool {
    let distinct = |v: &[LinePoint], i: usize, j: usize| !columns_proportional(&v[i], &v[j]);
    let s = x.len();
    let triple = (0..s).find_map(|i| {
        (i + 1..s).find_map(|j| {
            if !distinct(x, i, j) {
                return None;
            }
            (j + 1..s).find(|&k| distinct(x, i, k) && distinct(x, j, k)).map(|k| (i, j, k))
        })
    });
    let Some((i, j, k)) = triple else {
        return false;
    };
    if !(distinct(y, i, j) && distinct(y, i, k) && distinct(y, j, k)) {
        return false;
    }
    (0..s).filter(|l| ![i, j, k].contains(l)).all(|l| {
        let [a, b] = cross_ratio(&x[i], &x[j], &x[k], &x[l]);
        let [c, d] = cross_ratio(&y[i], &y[j], &y[k], &y[l]);
        a * d == b * c
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;
    use crate::scalar::int;

    fn pt(a: i64, b: i64) -> LinePoint {
        LinePoint::new(int(a), int(b)).unwrap()
    }

    fn bundle(fan: Fan, jumps: &[u32], lines: &[(i64, i64)]) -> BundleData {
        let lines: Vec<_> = lines.iter().map(|&(a, b)| Some(pt(a, b))).collect();
        BundleData::from_jumps_and_lines(fan, jumps, &lines).unwrap()
    }

    fn fine(n: usize) -> Partition {
        Partition::fine(&(0..n).collect::<Vec<_>>())
    }

    #[test]
    fn stability_examples() {
        let b = bundle(Fan::projective_plane(), &[1, 1, 1], &[(1, 0), (0, 1), (1, 1)]);
        assert_eq!(p_stability(Subject::Bundle(&b), &fine(3)).unwrap().status, StabilityStatus::Stable);

        let f0 = Fan::hirzebruch(0);
        let b = bundle(f0.clone(), &[1, 1, 1, 1], &[(1, 0), (1, 0), (0, 1), (0, 1)]);
        let v = p_stability(Subject::Bundle(&b), &fine(4)).unwrap();
        assert_eq!(v.status, StabilityStatus::ProperlySemistable);
        assert_eq!(v.witness, Some(vec![0, 1]));

        let b = bundle(f0, &[1, 1, 1, 1], &[(1, 0), (1, 0), (1, 0), (0, 1)]);
        assert_eq!(p_stability(Subject::Bundle(&b), &fine(4)).unwrap().status, StabilityStatus::Unstable);
        let wrong = Partition::new(vec![vec![0, 3], vec![1, 2]], &[0, 1, 2, 3]).unwrap();
        assert_eq!(p_stability(Subject::Bundle(&b), &wrong), Err(GitError::RefinementMismatch));
    }

    #[test]
    fn equivalence_examples() {
        let p2 = Fan::projective_plane();
        let part = fine(3);
        let x = bundle(p2.clone(), &[1, 2, 1], &[(1, 0), (0, 1), (1, 1)]);
        let y = bundle(p2.clone(), &[1, 2, 1], &[(3, 7), (2, 5), (1, 9)]);
        let px = PSubject { subject: Subject::Bundle(&x), partition: &part };
        let py = PSubject { subject: Subject::Bundle(&y), partition: &part };
        assert_eq!(p_equivalent(px, py), Ok(true));
        let z = bundle(p2, &[1, 1, 1], &[(3, 7), (2, 5), (1, 9)]);
        let pz = PSubject { subject: Subject::Bundle(&z), partition: &part };
        assert_eq!(p_equivalent(px, pz), Err(GitError::ShapeMismatch));

        let f0 = Fan::hirzebruch(0);
        let part = fine(4);
        let eq = |a: &BundleData, b: &BundleData| {
            p_equivalent(
                PSubject { subject: Subject::Bundle(a), partition: &part },
                PSubject { subject: Subject::Bundle(b), partition: &part },
            )
        };
        let j = [1, 1, 1, 1];
        let a = bundle(f0.clone(), &j, &[(1, 0), (1, 0), (0, 1), (0, 1)]);
        let b = bundle(f0.clone(), &j, &[(2, 1), (2, 1), (5, 3), (5, 3)]);
        let c = bundle(f0.clone(), &j, &[(2, 1), (5, 3), (5, 3), (2, 1)]);
        assert_eq!(eq(&a, &b), Ok(true));
        assert_eq!(eq(&a, &c), Ok(false));
        // Cross-ratios 2 and 3.
        let s2 = bundle(f0.clone(), &j, &[(0, 1), (1, 1), (1, 0), (2, 1)]);
        let s3 = bundle(f0.clone(), &j, &[(0, 1), (1, 1), (1, 0), (3, 1)]);
        assert_eq!(eq(&s2, &s3), Ok(false));
        assert_eq!(eq(&s2, &s2), Ok(true));
        assert_eq!(eq(&s2, &a), Ok(false));
        let bad = bundle(f0, &j, &[(0, 1), (0, 1), (0, 1), (3, 1)]);
        assert_eq!(eq(&s2, &bad), Err(GitError::NotSemistable));
    }
}
