//! Seeded random test data: small-integer homogeneous pairs, bundles,
//! monomial matrices, presentations and point configurations of a requested
//! stability type.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{coarse_partition, BundleData, Partition};
use crate::fan::Fan;
use crate::resolution::MonomialMatrix;
use crate::scalar::int;
use crate::sheaf::SheafPresentation;
use crate::{LinePoint, Mat, Rational};

/// Target stability type for generated configurations on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigShape {
    Stable,
    ProperlySemistable,
    Unstable,
}

const COORD: i64 = 4;
const MAX_TRIES: usize = 10_000;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn small_int(&mut self, bound: i64) -> i64 {
        self.rng.gen_range(-bound..=bound)
    }

    pub fn nonzero_scalar(&mut self) -> Rational {
        loop {
            let p = self.small_int(COORD);
            if p != 0 {
                return Rational::new(p.into(), self.rng.gen_range(1..=COORD).into());
            }
        }
    }

    pub fn line(&mut self) -> LinePoint {
        loop {
            let (a, b) = (self.small_int(COORD), self.small_int(COORD));
            if let Ok(p) = LinePoint::new(int(a), int(b)) {
                return p;
            }
        }
    }

    /// `k` pairwise distinct lines.
    pub fn distinct_lines(&mut self, k: usize) -> Vec<LinePoint> {
        let mut out: Vec<LinePoint> = Vec::with_capacity(k);
        while out.len() < k {
            let p = self.line();
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Lines on which the multiplicity pattern realizes `shape`, or `None`
    /// when no configuration of `s` points has that type.
    pub fn lines_with_shape(&mut self, s: usize, shape: ConfigShape) -> Option<Vec<LinePoint>> {
        let pattern: Vec<usize> = match shape {
            ConfigShape::Stable if s >= 3 => {
                let mut mults = Vec::new();
                let mut left = s;
                while left > 0 {
                    let cap = ((s - 1) / 2).min(left).max(1);
                    let k = self.rng.gen_range(1..=cap);
                    mults.push(k);
                    left -= k;
                }
                mults
            }
            ConfigShape::ProperlySemistable if s >= 2 && s.is_multiple_of(2) => {
                let mut mults = vec![s / 2];
                let mut left = s / 2;
                while left > 0 {
                    let k = self.rng.gen_range(1..=left);
                    mults.push(k);
                    left -= k;
                }
                mults
            }
            ConfigShape::Unstable if s >= 1 => {
                let big = self.rng.gen_range(s / 2 + 1..=s);
                let mut mults = vec![big];
                mults.extend(std::iter::repeat_n(1, s - big));
                mults
            }
            _ => return None,
        };
        let pool = self.distinct_lines(pattern.len());
        let mut lines: Vec<LinePoint> = pattern.iter().zip(&pool).flat_map(|(&k, p)| std::iter::repeat_n(p.clone(), k)).collect();
        lines.shuffle(&mut self.rng);
        Some(lines)
    }

    fn jumps(&mut self, n: usize, max_jump: u32) -> Vec<u32> {
        (0..n).map(|_| self.rng.gen_range(0..=max_jump)).collect()
    }

    /// Jumps in `0..=max_jump`, lines drawn from a pool of at most four lines
    /// so that coincidences are common.
    pub fn bundle(&mut self, fan: &Fan, max_jump: u32) -> BundleData {
        let n = fan.num_rays();
        let jumps = self.jumps(n, max_jump);
        let pool_size = self.rng.gen_range(1..=4);
        let pool = self.distinct_lines(pool_size);
        let lines: Vec<_> = (0..n).map(|_| Some(pool.choose(&mut self.rng).expect("nonempty").clone())).collect();
        BundleData::from_jumps_and_lines(fan.clone(), &jumps, &lines).expect("consistent data")
    }

    /// A bundle whose coarse partition has at least three parts.
    pub fn resolvable_bundle(&mut self, fan: &Fan, max_jump: u32) -> BundleData {
        assert!(max_jump > 0 && fan.num_rays() >= 3);
        for _ in 0..MAX_TRIES {
            let b = self.bundle(fan, max_jump);
            if coarse_partition(&b).len() >= 3 {
                return b;
            }
        }
        unreachable!("resolvable bundles are dense")
    }

    /// A stable bundle with the given jumps on `Π` and pairwise distinct lines.
    pub fn distinct_line_bundle(&mut self, fan: &Fan, jumps: &[u32]) -> BundleData {
        let lines: Vec<_> = self.distinct_lines(jumps.len()).into_iter().map(Some).collect();
        BundleData::from_jumps_and_lines(fan.clone(), jumps, &lines).expect("consistent data")
    }

    /// A bundle whose lines take at most two values, in at most two circular runs.
    pub fn split_bundle(&mut self, fan: &Fan, max_jump: u32) -> BundleData {
        let n = fan.num_rays();
        let jumps = self.jumps(n, max_jump);
        let [p, q]: [LinePoint; 2] = self.distinct_lines(2).try_into().expect("two lines");
        let start = self.rng.gen_range(0..n);
        let len = self.rng.gen_range(0..=n);
        let lines: Vec<_> = (0..n)
            .map(|r| {
                let offset = (r + n - start) % n;
                Some(if offset < len { p.clone() } else { q.clone() })
            })
            .collect();
        BundleData::from_jumps_and_lines(fan.clone(), &jumps, &lines).expect("consistent data")
    }

    /// A monomial matrix over a partition of `Π` into circular intervals
    /// that meet consecutively along cones. Zero jumps occur only strictly
    /// inside parts. Half of the draws take cokernel columns from a small
    /// pool of lines, the rest draw sparse coefficients directly.
    pub fn interval_matrix(&mut self, fan: &Fan, max_jump: u32) -> MonomialMatrix {
        let n = fan.num_rays();
        assert!(n >= 3 && max_jump > 0);
        for _ in 0..MAX_TRIES {
            let s = self.rng.gen_range(3..=n);
            let mut cuts: Vec<usize> = (0..n).collect();
            cuts.shuffle(&mut self.rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(s).collect();
            cuts.sort_unstable();
            let arcs: Vec<Vec<usize>> = (0..s)
                .map(|i| {
                    let (a, b) = (cuts[i], if i + 1 < s { cuts[i + 1] } else { cuts[0] + n });
                    (a..b).map(|r| r % n).collect()
                })
                .collect();
            let mut jumps = vec![0u32; n];
            for arc in &arcs {
                for (t, &r) in arc.iter().enumerate() {
                    let interior = t > 0 && t + 1 < arc.len();
                    jumps[r] = if interior && self.rng.gen_bool(0.3) { 0 } else { self.rng.gen_range(1..=max_jump) };
                }
            }
            let parts: Vec<Vec<usize>> = arcs.iter().map(|arc| arc.iter().copied().filter(|&r| jumps[r] > 0).collect()).collect();
            let support: Vec<usize> = (0..n).filter(|&r| jumps[r] > 0).collect();
            let partition = Partition::new(parts, &support).expect("arcs partition the support");
            let built = if self.rng.gen_bool(0.5) {
                let pool_size = self.rng.gen_range(2..=s.min(4));
                let pool = self.distinct_lines(pool_size);
                let cols: Vec<Vec<Rational>> = (0..s)
                    .map(|_| {
                        let p = pool.choose(&mut self.rng).expect("nonempty").clone();
                        let c = self.nonzero_scalar();
                        p.coords().into_iter().map(|x| x * c.clone()).collect()
                    })
                    .collect();
                let cok = Mat::from_columns(2, &cols).expect("2 x s");
                if cok.rank() < 2 {
                    continue;
                }
                MonomialMatrix::from_cokernel_map(&jumps, partition, &cok)
            } else {
                let coeffs = Mat::from_fn(s, s - 2, |_, _| if self.rng.gen_bool(0.4) { int(0) } else { int(self.small_int(2)) });
                MonomialMatrix::new(&jumps, partition, coeffs)
            };
            if let Ok(mm) = built {
                return mm;
            }
        }
        unreachable!("valid interval matrices are dense")
    }

    /// A presentation over a strict refinement of the coarse partition of a
    /// random bundle; fine parts need not be intervals. The column of each
    /// fine part is a random multiple of its coarse line.
    pub fn refined_presentation(&mut self, fan: &Fan, max_jump: u32) -> SheafPresentation {
        for _ in 0..MAX_TRIES {
            let b = self.bundle(fan, max_jump);
            let coarse = coarse_partition(&b);
            if coarse.len() < 2 || coarse.parts().iter().all(|p| p.len() < 2) {
                continue;
            }
            let mut fine = Vec::new();
            for part in coarse.parts() {
                let k = self.rng.gen_range(1..=part.len());
                let mut blocks = vec![Vec::new(); k];
                let mut rays = part.clone();
                rays.shuffle(&mut self.rng);
                for (t, &r) in rays.iter().enumerate() {
                    let slot = if t < k { t } else { self.rng.gen_range(0..k) };
                    blocks[slot].push(r);
                }
                fine.extend(blocks);
            }
            if fine.len() == coarse.len() || fine.len() < 3 {
                continue;
            }
            fine.shuffle(&mut self.rng);
            let cols: Vec<Vec<Rational>> = fine
                .iter()
                .map(|part| {
                    let c = self.nonzero_scalar();
                    b.line(part[0]).expect("supported").coords().into_iter().map(|x| x * c.clone()).collect()
                })
                .collect();
            let partition = Partition::new(fine, &b.support()).expect("refinement");
            let cok = Mat::from_columns(2, &cols).expect("2 x s");
            if let Ok(p) = SheafPresentation::from_cokernel_map(fan.clone(), &b.jumps(), partition, cok) {
                return p;
            }
        }
        unreachable!("refinable bundles are dense")
    }

    /// An `n × m` matrix of rank `m` with entries in `-2..=2`, biased towards
    /// zero; rows are nonzero unless `allow_zero_rows`.
    pub fn full_rank_matrix(&mut self, n: usize, m: usize, allow_zero_rows: bool) -> Mat {
        assert!(m <= n);
        loop {
            let a = Mat::from_fn(n, m, |_, _| if self.rng.gen_bool(0.35) { int(0) } else { int(self.small_int(2)) });
            let zero_row = (0..n).any(|i| a.row(i).iter().all(num_traits::Zero::is_zero));
            if a.rank() == m && (allow_zero_rows || !zero_row) {
                return a;
            }
        }
    }
}
