use serde::{Deserialize, Serialize};

use super::{mask_indices, GitError, StabilityVerdict, VerdictBuilder};
use crate::scalar::int;
use crate::Mat;

/// Which group acts on `k^n` when testing the column span of an `n × m` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrassMode {
    /// The diagonal torus; the destabilizing subspaces are coordinate subspaces.
    Torus,
    /// All of `GL_n`.
    FullGl,
}

fn require_full_rank(a: &Mat) -> Result<(), GitError> {
    let rank = a.rank();
    if rank != a.ncols() || a.ncols() == 0 {
        return Err(GitError::RankDeficient { rank, expected: a.ncols() });
    }
    Ok(())
}

fn coordinate_basis(n: usize, subset: &[usize]) -> Mat {
    Mat::from_fn(n, subset.len(), |i, j| if subset[j] == i { int(1) } else { int(0) })
}

/// Tests `dim(A ∩ L) · n < m · dim L` for the column span `A` of `a`.
///
/// In torus mode `L` runs over proper coordinate subspaces and the witness is
/// the coordinate subset. In full `GL_n` mode the candidates are the spans of
/// column subsets of `a` and the coordinate subspaces; the witness lists
/// column indices, or coordinate indices offset by `m`.
pub fn grass_stability(a: &Mat, mode: GrassMode) -> Result<StabilityVerdict, GitError> {
    require_full_rank(a)?;
    let n = a.nrows();
    let m = a.ncols();
    assert!(n < 64, "at most 63 coordinates");
    let mut builder = VerdictBuilder::default();
    let test = |builder: &mut VerdictBuilder, l: &Mat, witness: &dyn Fn() -> Vec<usize>| {
        let dim_l = l.rank();
        if dim_l == 0 || dim_l == n {
            return false;
        }
        let meet = m + dim_l - a.hstack(l).rank();
        builder.record(meet * n, m * dim_l, witness)
    };
    if mode == GrassMode::FullGl {
        for mask in 1u64..(1 << m) {
            let cols = mask_indices(mask, m);
            if test(&mut builder, &a.select_columns(&cols), &|| cols.clone()) {
                return Ok(builder.finish());
            }
        }
    }
    let offset = if mode == GrassMode::FullGl { m } else { 0 };
    for mask in 1u64..(1 << n) - 1 {
        let subset = mask_indices(mask, n);
        let witness = || subset.iter().map(|i| i + offset).collect();
        if test(&mut builder, &coordinate_basis(n, &subset), &witness) {
            break;
        }
    }
    Ok(builder.finish())
}

/// The canonical `(n − m) × n` matrix `Ǎ` with `Ǎ · a = 0` whose rows span the
/// annihilator of the column span of `a`.
pub fn dual_presentation(a: &Mat) -> Result<Mat, GitError> {
    require_full_rank(a)?;
    Ok(a.transpose().kernel_basis().transpose())
}
