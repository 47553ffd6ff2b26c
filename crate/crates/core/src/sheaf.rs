//! Torsion-free sheaves presented by arbitrary monomial matrices.
//!
//! A presentation `0 → O^{s'-2} → ⊕ O(D_i) → E' → 0` over any partition of
//! Π has a reflexive hull `E''` given by the columns of its cokernel map;
//! `E''/E'` is a skyscraper sheaf on torus fixed points. The chart oracle
//! computes `Γ(U_σ, E')` degree by degree so every such statement can be
//! checked by counting.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::bundle::{coarse_partition, is_refinement, sigma_dim_at, support_of, BundleData, BundleError, Partition, Refinement};
use crate::exactlin::columns_proportional;
use crate::fan::{Character, Fan};
use crate::resolution::{filtrations_from_columns, MonomialMatrix, MonomialResolution, ResolutionError};
use crate::{Divisor, LinePoint, Mat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("column {0} of the cokernel map is zero; the presented sheaf has torsion")]
    ZeroColumn(usize),
    #[error("the cokernel map must be 2x{expected} of rank 2")]
    BadCokernelMap { expected: usize },
    #[error("jumps cover {jumps} rays but the fan has {fan}")]
    FanMismatch { jumps: usize, fan: usize },
    #[error("the presentation partition does not refine the coarse partition of its bidual")]
    NotRefinement,
    #[error("the given map is not a section of the refinement projection")]
    BadSection,
    #[error("column index {index} out of range for {s} parts")]
    ColumnIndex { index: usize, s: usize },
    #[error("radius must be at least 1")]
    Radius,
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// `E' = E'(I, 𝒫', B)`: jumps, an arbitrary partition of Π and a monomial
/// matrix over it, together with a cokernel map `B̌⁰`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafPresentation {
    fan: Fan,
    matrix: MonomialMatrix,
    cokernel_map: Mat,
}

impl SheafPresentation {
    /// Presentation with coefficient matrix `coeffs`; the cokernel map is the canonical one.
    pub fn new(fan: Fan, jumps: &[u32], partition: Partition, coeffs: Mat) -> Result<Self, SheafError> {
        check_support(&fan, jumps, &partition)?;
        let matrix = MonomialMatrix::new(jumps, partition, coeffs)?;
        let cokernel_map = matrix.cokernel_map();
        Self::assemble(fan, matrix, cokernel_map)
    }

    /// Presentation whose cokernel map is the given `2 × s'` matrix; the
    /// coefficient matrix is its canonical kernel.
    pub fn from_cokernel_map(fan: Fan, jumps: &[u32], partition: Partition, cokernel_map: Mat) -> Result<Self, SheafError> {
        check_support(&fan, jumps, &partition)?;
        if cokernel_map.nrows() != 2 || cokernel_map.ncols() != partition.len() || cokernel_map.rank() != 2 {
            return Err(SheafError::BadCokernelMap { expected: partition.len() });
        }
        let matrix = MonomialMatrix::from_cokernel_map(jumps, partition, &cokernel_map)?;
        Self::assemble(fan, matrix, cokernel_map)
    }

    /// The presentation given by a resolution of a bundle.
    pub fn from_resolution(fan: Fan, r: &MonomialResolution) -> Result<Self, SheafError> {
        check_support(&fan, &r.matrix().jumps(), r.matrix().partition())?;
        Self::assemble(fan, r.matrix().clone(), r.cokernel_map().clone())
    }

    fn assemble(fan: Fan, matrix: MonomialMatrix, cokernel_map: Mat) -> Result<Self, SheafError> {
        if let Some(j) = (0..cokernel_map.ncols()).find(|&j| cokernel_map.column(j).iter().all(Zero::is_zero)) {
            return Err(SheafError::ZeroColumn(j));
        }
        Ok(Self { fan, matrix, cokernel_map })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn matrix(&self) -> &MonomialMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> &Partition {
        self.matrix.partition()
    }

    pub fn cokernel_map(&self) -> &Mat {
        &self.cokernel_map
    }

    pub fn jumps(&self) -> Vec<u32> {
        self.matrix.jumps()
    }

    /// Line spanned by column `i` of the cokernel map.
    pub fn column_line(&self, i: usize) -> LinePoint {
        LinePoint::from_column(&self.cokernel_map, i).expect("columns are nonzero")
    }

    pub fn default_radius(&self) -> i64 {
        self.jumps().into_iter().max().unwrap_or(0) as i64 + 2
    }

    /// Projection of the presentation partition onto the bidual's coarse partition.
    pub fn refinement_to_bidual(&self) -> Result<(Partition, Refinement), SheafError> {
        let coarse = coarse_partition(&bidual(self));
        let r = is_refinement(self.partition(), &coarse).ok_or(SheafError::NotRefinement)?;
        Ok((coarse, r))
    }
}

fn check_support(fan: &Fan, jumps: &[u32], partition: &Partition) -> Result<(), SheafError> {
    if jumps.len() != fan.num_rays() {
        return Err(SheafError::FanMismatch { jumps: jumps.len(), fan: fan.num_rays() });
    }
    let expected = support_of(jumps);
    let found = partition.support();
    if expected != found {
        return Err(BundleError::WrongSupport { expected, found }.into());
    }
    Ok(())
}

/// Degreewise dimensions of `Γ(U_σ, E')` on one chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDimGrid {
    pub cone: usize,
    pub radius: i64,
    /// Keyed by the pairings `(<m, n(ρ_k)>, <m, n(ρ_{k+1})>)`, which determine `m`.
    pub dims: BTreeMap<(i64, i64), u32>,
    pub characters: BTreeMap<(i64, i64), Character>,
}

impl GradedDimGrid {
    pub fn dim_at(&self, a: i64, b: i64) -> Option<u32> {
        self.dims.get(&(a, b)).copied()
    }
}

/// Chart dimensions for the cokernel of any monomial matrix.
///
/// In degree `m` the source `O^{s-2}` contributes `k^{s-2}` iff both pairings
/// are nonnegative, and summand `i` contributes `k` iff
/// `<m, n(ρ)> >= -(exponent of ρ in row i)` for both rays of the cone; the
/// map between them is `A'` restricted to the contributing rows.
pub fn chart_dims_of_matrix(fan: &Fan, mm: &MonomialMatrix, k: usize, radius: i64) -> GradedDimGrid {
    let (r0, r1) = fan.cone_rays(k);
    let s = mm.num_parts();
    let exps = mm.row_exponents();
    let mut rank_cache: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut dims = BTreeMap::new();
    let mut characters = BTreeMap::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            let eligible: Vec<usize> = (0..s).filter(|&i| a >= -(exps[i].0[r0] as i64) && b >= -(exps[i].0[r1] as i64)).collect();
            let image = if a >= 0 && b >= 0 {
                *rank_cache.entry(eligible.clone()).or_insert_with(|| mm.coeffs().select_rows(&eligible).rank())
            } else {
                0
            };
            dims.insert((a, b), (eligible.len() - image) as u32);
            characters.insert((a, b), fan.character_from_pairings(k, a, b));
        }
    }
    GradedDimGrid { cone: k, radius, dims, characters }
}

/// Dimensions of `Γ(U_σ_k, E')_m` over the box `|<m, n(ρ)>| <= radius`.
pub fn chart_graded_dims(p: &SheafPresentation, k: usize, radius: i64) -> Result<GradedDimGrid, SheafError> {
    if radius < 1 {
        return Err(SheafError::Radius);
    }
    p.fan.check_cone(k).map_err(|_| SheafError::ColumnIndex { index: k, s: p.fan.num_cones() })?;
    Ok(chart_dims_of_matrix(&p.fan, &p.matrix, k, radius))
}

/// Filtration data of the reflexive hull `E''`: on `ρ ∈ Π'_i` the line
/// spanned by the `i`-th column of the cokernel map.
pub fn bidual(p: &SheafPresentation) -> BundleData {
    filtrations_from_columns(&p.fan, &p.matrix, &p.cokernel_map).expect("validated presentation")
}

/// Support and oracle lengths of the skyscraper sheaf `E''/E'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkyscraperReport {
    /// Cones `σ` whose fixed point supports the cokernel, ascending.
    pub support: Vec<usize>,
    /// Graded length of `Γ(U_σ, E''/E')` for every maximal cone.
    pub lengths: BTreeMap<usize, u64>,
}

/// Cones whose two rays lie in different parts of the presentation but in
/// the same coarse part of the bidual.
pub fn delta2_cones(p: &SheafPresentation) -> Vec<usize> {
    let coarse = coarse_partition(&bidual(p));
    let fine = p.partition();
    (0..p.fan.num_cones())
        .filter(|&k| {
            let (r0, r1) = p.fan.cone_rays(k);
            match (fine.part_of(r0), fine.part_of(r1)) {
                (Some(i), Some(j)) => i != j && coarse.part_of(r0) == coarse.part_of(r1),
                _ => false,
            }
        })
        .collect()
}

/// `Σ_m (dim E''_σ,m − dim E'_σ,m)` over the box, cone by cone.
pub fn oracle_lengths(p: &SheafPresentation, radius: i64) -> BTreeMap<usize, u64> {
    let hull = bidual(p);
    (0..p.fan.num_cones())
        .into_par_iter()
        .map(|k| {
            let grid = chart_dims_of_matrix(&p.fan, &p.matrix, k, radius);
            (k, gap_sum(&hull, &grid))
        })
        .collect()
}

fn gap_sum(hull: &BundleData, grid: &GradedDimGrid) -> u64 {
    grid.dims
        .iter()
        .map(|(&(a, b), &d)| {
            let full = sigma_dim_at(hull, grid.cone, a, b) as i64;
            assert!(full >= d as i64, "E' must inject into its bidual");
            (full - d as i64) as u64
        })
        .sum()
}

/// Support from the combinatorial cone condition, lengths from the oracle.
pub fn skyscraper_support(p: &SheafPresentation) -> SkyscraperReport {
    skyscraper_support_with_radius(p, p.default_radius())
}

pub fn skyscraper_support_with_radius(p: &SheafPresentation, radius: i64) -> SkyscraperReport {
    SkyscraperReport { support: delta2_cones(p), lengths: oracle_lengths(p, radius) }
}

/// The coarse resolution of `E''` whose cokernel map takes column `t(j)` of
/// the presentation for coarse part `j`.
pub fn coarsen_presentation(p: &SheafPresentation, section: &[usize]) -> Result<MonomialResolution, SheafError> {
    let (coarse, refinement) = p.refinement_to_bidual()?;
    let refinement = refinement.with_section(section.to_vec()).ok_or(SheafError::BadSection)?;
    let picked = refinement.section().expect("section attached");
    let cokernel = p.cokernel_map.select_columns(picked);
    Ok(MonomialResolution::from_cokernel_map(&p.jumps(), coarse, cokernel)?)
}

/// [`coarsen_presentation`] with the section picking, in each coarse part,
/// the fine part containing the smallest ray index.
pub fn coarsen_presentation_default(p: &SheafPresentation) -> Result<MonomialResolution, SheafError> {
    let (_, refinement) = p.refinement_to_bidual()?;
    let section = refinement.default_section(p.partition());
    coarsen_presentation(p, &section)
}

/// Skyscraper lengths computed against the chart dimensions of a coarsened
/// resolution instead of the bidual filtrations.
pub fn lengths_via_coarsening(p: &SheafPresentation, section: &[usize], radius: i64) -> Result<BTreeMap<usize, u64>, SheafError> {
    let coarse = coarsen_presentation(p, section)?;
    Ok((0..p.fan.num_cones())
        .map(|k| {
            let top = chart_dims_of_matrix(&p.fan, coarse.matrix(), k, radius);
            let bottom = chart_dims_of_matrix(&p.fan, &p.matrix, k, radius);
            let gap = top.dims.iter().map(|(key, &d)| (d - bottom.dims[key]) as u64).sum();
            (k, gap)
        })
        .collect())
}

/// The extension `0 → E_1 → E' → E_2 → 0` cut out by one column line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSplit {
    /// Parts whose column spans the same line as the chosen column.
    pub first_parts: Vec<usize>,
    pub second_parts: Vec<usize>,
    /// Divisor of `E_1''`.
    pub first_divisor: Divisor,
    /// Divisor of `E_2''`.
    pub second_divisor: Divisor,
}

pub fn extension_split(p: &SheafPresentation, column: usize) -> Result<ExtensionSplit, SheafError> {
    let s = p.partition().len();
    if column >= s {
        return Err(SheafError::ColumnIndex { index: column, s });
    }
    let pivot = p.column_line(column);
    let (first_parts, second_parts): (Vec<usize>, Vec<usize>) = (0..s).partition(|&i| columns_proportional(&p.column_line(i), &pivot));
    let jumps = p.jumps();
    let divisor = |parts: &[usize]| {
        let mut d = vec![0i64; jumps.len()];
        for &i in parts {
            for &r in p.partition().part(i) {
                d[r] = jumps[r] as i64;
            }
        }
        d
    };
    Ok(ExtensionSplit { first_divisor: divisor(&first_parts), second_divisor: divisor(&second_parts), first_parts, second_parts })
}
