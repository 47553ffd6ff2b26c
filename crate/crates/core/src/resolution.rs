//! Euler-type monomial resolutions `0 → O^{s-2} → ⊕ O(D_i) → E → 0` and
//! local freeness of their cokernels.
//!
//! Row `i` of the monomial matrix is `α_i · x^{Π̂_i}` with the fixed monomial
//! `x^{Π̂_i} = ∏_{ρ ∈ Π_i} x_ρ^{i^ρ}`, so a matrix is determined by its
//! coefficient matrix `A'` together with the jumps and the partition.

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::bundle::{coarse_partition, BundleData, BundleError, Partition, RayFiltration};
use crate::exactlin::{LinAlgError, Matrix};
use crate::fan::{ExponentVector, Fan};
use crate::scalar::Rational;
use crate::{Divisor, LinePoint, Mat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("the coarse partition has {0} <= 2 parts, so the bundle splits")]
    Splits(usize),
    #[error("row {0}: exponent vector is not supported exactly on its part")]
    BadSupport(usize),
    #[error("coefficient matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("coefficient matrix is {rows}x{cols}, expected {s}x{}", s.saturating_sub(2))]
    Shape { rows: usize, cols: usize, s: usize },
    #[error("a monomial matrix needs at least 2 parts, got {0}")]
    TooFewParts(usize),
    #[error("column {0} of the cokernel map is zero")]
    ZeroColumn(usize),
    #[error("the matrix is defined over {matrix} rays but the fan has {fan}")]
    FanMismatch { matrix: usize, fan: usize },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Monomial matrix `A = (α_ij · x^{Π̂_i})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    coeffs: Mat,
    row_exponents: Vec<ExponentVector>,
    partition: Partition,
    degrees: Vec<Divisor>,
}

impl MonomialMatrix {
    /// Builds and validates the matrix with rows indexed by `partition`.
    pub fn new(jumps: &[u32], partition: Partition, coeffs: Mat) -> Result<Self, ResolutionError> {
        let row_exponents: Vec<ExponentVector> = partition
            .parts()
            .iter()
            .map(|part| {
                let mut e = ExponentVector::zero(jumps.len());
                for &r in part {
                    e.0[r] = jumps[r];
                }
                e
            })
            .collect();
        let degrees = row_exponents.iter().map(|e| e.0.iter().map(|&x| x as i64).collect()).collect();
        let mm = Self { coeffs, row_exponents, partition, degrees };
        validate_monomial_matrix(&mm)?;
        Ok(mm)
    }

    /// Assembles a matrix without checking it; see [`validate_monomial_matrix`].
    pub fn from_raw_parts(coeffs: Mat, row_exponents: Vec<ExponentVector>, partition: Partition, degrees: Vec<Divisor>) -> Self {
        Self { coeffs, row_exponents, partition, degrees }
    }

    /// The matrix whose coefficient part is the canonical kernel of `cokernel_map`.
    pub fn from_cokernel_map(jumps: &[u32], partition: Partition, cokernel_map: &Mat) -> Result<Self, ResolutionError> {
        Self::new(jumps, partition, cokernel_map.kernel_basis())
    }

    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }

    pub fn row_exponents(&self) -> &[ExponentVector] {
        &self.row_exponents
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn degrees(&self) -> &[Divisor] {
        &self.degrees
    }

    /// Number of summands `s` of the middle term.
    pub fn num_parts(&self) -> usize {
        self.partition.len()
    }

    pub fn num_rays(&self) -> usize {
        self.row_exponents.first().map_or(0, ExponentVector::len)
    }

    /// Jumps `i^ρ` recovered from the row exponents.
    pub fn jumps(&self) -> Vec<u32> {
        let mut j = vec![0; self.num_rays()];
        for e in &self.row_exponents {
            for (acc, &x) in j.iter_mut().zip(&e.0) {
                *acc += x;
            }
        }
        j
    }

    /// Canonical cokernel map `Ǎ⁰` (a `2 × s` matrix with `Ǎ⁰ · A' = 0`).
    pub fn cokernel_map(&self) -> Mat {
        self.coeffs.transpose().kernel_basis().transpose()
    }

    /// Same matrix with `A'` replaced (row exponents and partition kept).
    pub fn with_coeffs(&self, coeffs: Mat) -> Result<Self, ResolutionError> {
        let mm = Self { coeffs, ..self.clone() };
        validate_monomial_matrix(&mm)?;
        Ok(mm)
    }
}

/// Checks shape, exponent supports and full coefficient rank.
pub fn validate_monomial_matrix(mm: &MonomialMatrix) -> Result<(), ResolutionError> {
    let s = mm.partition.len();
    if s < 2 {
        return Err(ResolutionError::TooFewParts(s));
    }
    if mm.coeffs.nrows() != s || mm.coeffs.ncols() != s - 2 || mm.row_exponents.len() != s || mm.degrees.len() != s {
        return Err(ResolutionError::Shape { rows: mm.coeffs.nrows(), cols: mm.coeffs.ncols(), s });
    }
    let n = mm.num_rays();
    for (i, (e, part)) in mm.row_exponents.iter().zip(mm.partition.parts()).enumerate() {
        let degree_matches = mm.degrees[i].len() == n && mm.degrees[i].iter().zip(&e.0).all(|(&d, &x)| d == x as i64);
        if e.len() != n || e.support() != *part || !degree_matches {
            return Err(ResolutionError::BadSupport(i));
        }
    }
    let rank = mm.coeffs.rank();
    if rank != s - 2 {
        return Err(ResolutionError::RankDeficient { rank, expected: s - 2 });
    }
    Ok(())
}

/// The resolution `0 → O^{s-2} → ⊕_i O(Σ_{ρ∈Π_i} i^ρ D_ρ) → E → 0` together
/// with the induced map `Ǎ⁰ : k^s → E⁰` on generic fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialResolution {
    matrix: MonomialMatrix,
    cokernel_map: Mat,
}

impl MonomialResolution {
    /// Builds the resolution whose cokernel map is `cokernel_map` (any 2×s
    /// matrix of rank 2 without zero columns).
    pub fn from_cokernel_map(jumps: &[u32], partition: Partition, cokernel_map: Mat) -> Result<Self, ResolutionError> {
        if cokernel_map.nrows() != 2 || cokernel_map.rank() != 2 {
            return Err(ResolutionError::RankDeficient { rank: cokernel_map.rank(), expected: 2 });
        }
        if let Some(j) = (0..cokernel_map.ncols()).find(|&j| cokernel_map.column(j).iter().all(Zero::is_zero)) {
            return Err(ResolutionError::ZeroColumn(j));
        }
        let matrix = MonomialMatrix::from_cokernel_map(jumps, partition, &cokernel_map)?;
        Ok(Self { matrix, cokernel_map })
    }

    pub fn matrix(&self) -> &MonomialMatrix {
        &self.matrix
    }

    pub fn cokernel_map(&self) -> &Mat {
        &self.cokernel_map
    }

    pub fn source_rank(&self) -> usize {
        self.matrix.num_parts() - 2
    }

    /// `0 → O^{s-2} → O(D) ⊕ … → E → 0` with each summand's divisor spelled out.
    pub fn display_sequence(&self) -> String {
        let mut out = format!("0 → O^{} → ", self.source_rank());
        let summands: Vec<String> = self
            .matrix
            .degrees()
            .iter()
            .map(|d| {
                let terms: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(r, &c)| if c == 1 { format!("D{r}") } else { format!("{c}·D{r}") })
                    .collect();
                format!("O({})", terms.join(" + "))
            })
            .collect();
        let _ = write!(out, "{} → E → 0", summands.join(" ⊕ "));
        out
    }
}

/// The generalized Euler sequence of a bundle whose coarse partition has
/// `s > 2` parts. The cokernel map has the normalized part lines as columns.
pub fn build_resolution(b: &BundleData) -> Result<MonomialResolution, ResolutionError> {
    let partition = coarse_partition(b);
    let s = partition.len();
    if s <= 2 {
        return Err(ResolutionError::Splits(s));
    }
    let columns: Vec<Vec<Rational>> =
        partition.parts().iter().map(|p| b.line(p[0]).expect("positive jump carries a line").coords().to_vec()).collect();
    let cokernel_map = Matrix::from_columns(2, &columns)?;
    MonomialResolution::from_cokernel_map(&b.jumps(), partition, cokernel_map)
}

/// Lines `⟨column i⟩` on the rays of part `i`, with the matrix's jumps.
pub(crate) fn filtrations_from_columns(fan: &Fan, matrix: &MonomialMatrix, cokernel_map: &Mat) -> Result<BundleData, ResolutionError> {
    if matrix.num_rays() != fan.num_rays() {
        return Err(ResolutionError::FanMismatch { matrix: matrix.num_rays(), fan: fan.num_rays() });
    }
    let jumps = matrix.jumps();
    let mut filtrations: Vec<RayFiltration> = jumps.iter().map(|&jump| RayFiltration { jump, line: None }).collect();
    for (i, part) in matrix.partition().parts().iter().enumerate() {
        let line = LinePoint::from_column(cokernel_map, i).map_err(|_| ResolutionError::ZeroColumn(i))?;
        for &r in part {
            filtrations[r].line = Some(line.clone());
        }
    }
    Ok(BundleData::new(fan.clone(), filtrations)?)
}

/// Filtration data of the cokernel read off the columns of `Ǎ⁰`.
pub fn cokernel_filtrations(r: &MonomialResolution, fan: &Fan) -> Result<BundleData, ResolutionError> {
    filtrations_from_columns(fan, &r.matrix, &r.cokernel_map)
}

/// Three independent local-freeness verdicts for the cokernel of a monomial matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFreenessReport {
    /// All cyclically adjacent minors `det A'^{i,i+1}` (including `(s,1)`)
    /// are nonzero. `None` when the criterion does not apply: parts must be
    /// circular intervals meeting their neighbours along maximal cones.
    pub cyclic_minors: Option<bool>,
    /// Part index pairs whose complementary minor vanishes.
    pub failing_minors: Vec<(usize, usize)>,
    /// Some power of the irrelevant ideal lies in the Fitting ideal.
    pub fitting: bool,
    /// Cones whose generator `x^σ̂` has no power in the Fitting ideal.
    pub failing_fitting_cones: Vec<usize>,
    /// `A` has rank `s - 2` at every torus fixed point.
    pub fixed_point_ranks: bool,
    /// `(cone, rank)` for every fixed point where the rank drops.
    pub rank_deficient_cones: Vec<(usize, usize)>,
}

impl LocalFreenessReport {
    pub fn locally_free(&self) -> bool {
        self.fixed_point_ranks
    }

    /// Whether every applicable criterion gives the same verdict.
    pub fn consistent(&self) -> bool {
        self.fitting == self.fixed_point_ranks && self.cyclic_minors.is_none_or(|c| c == self.fixed_point_ranks)
    }
}

/// Parts in the circular order of Π, when every part is a circular interval
/// whose last ray is fan-adjacent to the first ray of the next part.
fn adjacent_part_cycle(mm: &MonomialMatrix, fan: &Fan) -> Option<Vec<usize>> {
    let p = mm.partition();
    if !p.is_interval() {
        return None;
    }
    let support = p.support();
    let n = support.len();
    let pos = |r: usize| support.iter().position(|&x| x == r).expect("ray in support");
    // (first, last) ray of each part along the circular order of Π.
    let mut runs: Vec<(usize, usize, usize)> = p
        .parts()
        .iter()
        .enumerate()
        .map(|(i, part)| {
            if part.len() == n {
                return (i, support[0], support[n - 1]);
            }
            let first = *part.iter().find(|&&r| !part.contains(&support[(pos(r) + n - 1) % n])).expect("interval has a start");
            let last = *part.iter().find(|&&r| !part.contains(&support[(pos(r) + 1) % n])).expect("interval has an end");
            (i, first, last)
        })
        .collect();
    runs.sort_by_key(|&(_, first, _)| pos(first));
    let s = runs.len();
    let joined = (0..s).all(|k| {
        let (_, _, last) = runs[k];
        let (_, next_first, _) = runs[(k + 1) % s];
        (last + 1) % fan.num_rays() == next_first
    });
    joined.then(|| runs.into_iter().map(|(i, _, _)| i).collect())
}

fn index_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).filter(move |mask| mask.count_ones() as usize == k).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Decides whether the cokernel of `mm` is locally free, three ways.
pub fn check_local_freeness(mm: &MonomialMatrix, fan: &Fan) -> Result<LocalFreenessReport, ResolutionError> {
    if mm.num_rays() != fan.num_rays() {
        return Err(ResolutionError::FanMismatch { matrix: mm.num_rays(), fan: fan.num_rays() });
    }
    let s = mm.num_parts();
    let a = mm.coeffs();
    let minor_nonzero = |deleted: &[usize]| {
        let rows: Vec<usize> = (0..s).filter(|i| !deleted.contains(i)).collect();
        !a.select_rows(&rows).determinant().is_zero()
    };

    // Cyclic adjacent minors.
    let (cyclic_minors, failing_minors) = match adjacent_part_cycle(mm, fan) {
        Some(cycle) => {
            let failing: Vec<(usize, usize)> =
                (0..s).map(|k| (cycle[k], cycle[(k + 1) % s])).filter(|&(i, j)| !minor_nonzero(&[i, j])).collect();
            (Some(failing.is_empty()), failing)
        }
        None => (None, Vec::new()),
    };

    // Fitting ideal: generated by x^{Π̂_I} over (s-2)-subsets I with a nonzero minor.
    let generators: Vec<ExponentVector> = index_subsets(s, s - 2)
        .filter(|rows| !a.select_rows(rows).determinant().is_zero())
        .map(|rows| rows.iter().fold(ExponentVector::zero(fan.num_rays()), |acc, &i| acc.plus(&mm.row_exponents()[i])))
        .collect();
    let failing_fitting_cones: Vec<usize> = fan
        .irrelevant_generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| !generators.iter().any(|f| f.divides_power_of(g)))
        .map(|(k, _)| k)
        .collect();

    // Rank at each fixed point: rows whose monomial does not vanish there.
    let rank_deficient_cones: Vec<(usize, usize)> = (0..fan.num_cones())
        .filter_map(|k| {
            let (r0, r1) = fan.cone_rays(k);
            let rows: Vec<usize> = (0..s)
                .filter(|&i| {
                    let part = mm.partition().part(i);
                    !part.contains(&r0) && !part.contains(&r1)
                })
                .collect();
            let rank = a.select_rows(&rows).rank();
            (rank < s - 2).then_some((k, rank))
        })
        .collect();

    Ok(LocalFreenessReport {
        cyclic_minors,
        failing_minors,
        fitting: failing_fitting_cones.is_empty(),
        failing_fitting_cones,
        fixed_point_ranks: rank_deficient_cones.is_empty(),
        rank_deficient_cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn pt(a: i64, b: i64) -> LinePoint {
        LinePoint::new(int(a), int(b)).unwrap()
    }

    fn cok(cols: &[(i64, i64)]) -> Mat {
        Matrix::from_columns(2, &cols.iter().map(|&(a, b)| vec![int(a), int(b)]).collect::<Vec<_>>()).unwrap()
    }

    fn f0_generic() -> BundleData {
        let lines = [pt(1, 0), pt(1, 1), pt(0, 1), pt(1, 2)].map(Some);
        BundleData::from_jumps_and_lines(Fan::hirzebruch(0), &[1, 1, 1, 1], &lines).unwrap()
    }

    #[test]
    fn f0_generic_resolution() {
        let r = build_resolution(&f0_generic()).unwrap();
        assert_eq!(r.cokernel_map(), &cok(&[(1, 0), (1, 1), (0, 1), (1, 2)]));
        let expected =
            Matrix::from_rows(&[vec![int(1), int(0)], vec![int(0), int(1)], vec![int(2), int(1)], vec![int(-1), int(-1)]]).unwrap();
        assert_eq!(r.matrix().coeffs(), &expected);
        assert!(r.cokernel_map().mul(r.matrix().coeffs()).is_zero());
        for (i, e) in r.matrix().row_exponents().iter().enumerate() {
            assert_eq!(e.support(), vec![i]);
        }
        let report = check_local_freeness(r.matrix(), &Fan::hirzebruch(0)).unwrap();
        assert_eq!(report.cyclic_minors, Some(true));
        assert!(report.fitting && report.fixed_point_ranks);
        assert_eq!(cokernel_filtrations(&r, &Fan::hirzebruch(0)).unwrap(), f0_generic());
    }

    #[test]
    fn p2_generic_shape() {
        let lines = [pt(1, 0), pt(0, 1), pt(1, 1)].map(Some);
        let b = BundleData::from_jumps_and_lines(Fan::projective_plane(), &[1, 2, 3], &lines).unwrap();
        let r = build_resolution(&b).unwrap();
        assert_eq!((r.matrix().coeffs().nrows(), r.matrix().coeffs().ncols()), (3, 1));
        assert_eq!(r.matrix().degrees(), &[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 3]]);
        assert_eq!(r.display_sequence(), "0 → O^1 → O(D0) ⊕ O(2·D1) ⊕ O(3·D2) → E → 0");
    }

    #[test]
    fn splitting_bundles_are_refused() {
        let lines = [pt(1, 0), pt(1, 0), pt(0, 1)].map(Some);
        let b = BundleData::from_jumps_and_lines(Fan::projective_plane(), &[1, 1, 1], &lines).unwrap();
        assert_eq!(build_resolution(&b), Err(ResolutionError::Splits(2)));
    }

    #[test]
    fn adjacent_coincidence_fails_everywhere() {
        let fan = Fan::hirzebruch(0);
        let mm = MonomialMatrix::from_cokernel_map(&[1, 1, 1, 1], Partition::fine(&[0, 1, 2, 3]), &cok(&[(1, 0), (1, 0), (0, 1), (1, 1)]))
            .unwrap();
        let rep = check_local_freeness(&mm, &fan).unwrap();
        assert_eq!(rep.cyclic_minors, Some(false));
        assert_eq!(rep.failing_minors, vec![(0, 1)]);
        assert!(!rep.fitting);
        assert_eq!(rep.failing_fitting_cones, vec![0]);
        assert_eq!(rep.rank_deficient_cones, vec![(0, 1)]);
        assert!(rep.consistent());
    }

    #[test]
    fn opposite_coincidence_is_locally_free() {
        let fan = Fan::hirzebruch(0);
        let mm = MonomialMatrix::from_cokernel_map(&[1, 1, 1, 1], Partition::fine(&[0, 1, 2, 3]), &cok(&[(1, 0), (0, 1), (1, 0), (1, 1)]))
            .unwrap();
        let rep = check_local_freeness(&mm, &fan).unwrap();
        assert_eq!(rep.cyclic_minors, Some(true));
        assert!(rep.fitting && rep.fixed_point_ranks);
    }

    #[test]
    fn cyclic_minors_need_adjacent_parts() {
        // Ray 1 has jump 0, so parts {0} and {2} are neighbours in Π but share
        // no cone; their equal columns do not obstruct local freeness.
        let fan = Fan::hirzebruch(0);
        let part = Partition::new(vec![vec![0], vec![2], vec![3]], &[0, 2, 3]).unwrap();
        let mm = MonomialMatrix::from_cokernel_map(&[1, 0, 1, 1], part, &cok(&[(1, 0), (1, 0), (0, 1)])).unwrap();
        let rep = check_local_freeness(&mm, &fan).unwrap();
        assert_eq!(rep.cyclic_minors, None);
        assert!(rep.fitting && rep.fixed_point_ranks);
    }

    #[test]
    fn validation_errors() {
        let part = Partition::fine(&[0, 1, 2, 3]);
        let good = MonomialMatrix::from_cokernel_map(&[1, 1, 1, 1], part.clone(), &cok(&[(1, 0), (1, 1), (0, 1), (1, 2)])).unwrap();
        assert!(validate_monomial_matrix(&good).is_ok());

        let mut exps = good.row_exponents().to_vec();
        exps[2].0[1] = 1;
        let bad = MonomialMatrix::from_raw_parts(good.coeffs().clone(), exps, part.clone(), good.degrees().to_vec());
        assert_eq!(validate_monomial_matrix(&bad), Err(ResolutionError::BadSupport(2)));

        let proportional =
            Matrix::from_rows(&[vec![int(1), int(2)], vec![int(1), int(2)], vec![int(0), int(0)], vec![int(3), int(6)]]).unwrap();
        assert_eq!(good.with_coeffs(proportional), Err(ResolutionError::RankDeficient { rank: 1, expected: 2 }));

        let wrong_shape = Matrix::from_rows(&[vec![int(1)], vec![int(1)], vec![int(0)], vec![int(3)]]).unwrap();
        assert!(matches!(good.with_coeffs(wrong_shape), Err(ResolutionError::Shape { .. })));
    }
}
