//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use torix::bundle::{coarse_partition, is_refinement, sigma_family_dim, split_summands, BundleData, Partition};
use torix::fan::{pairing, Character, Fan};
use torix::gen::Gen;
use torix::git::{
    config_stability, dual_presentation, grass_stability, locally_free_splits, moduli_coordinate_s4, p_equivalent, p_stability,
    semistable_classes, GrassMode, PSubject, PointConfig, StabilityStatus, Subject,
};
use torix::resolution::{build_resolution, check_local_freeness, cokernel_filtrations, MonomialMatrix, ResolutionError};
use torix::scalar::int;
use torix::sheaf::{bidual, chart_graded_dims, delta2_cones, lengths_via_coarsening, oracle_lengths, SheafPresentation};
use torix::{LinePoint, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn fans() -> Vec<(&'static str, Fan)> {
    vec![
        ("p2", Fan::projective_plane()),
        ("f0", Fan::hirzebruch(0)),
        ("f1", Fan::hirzebruch(1)),
        ("f2", Fan::hirzebruch(2)),
        ("f0+blowup:0", Fan::from_spec("hirzebruch:0+blowup:0").unwrap()),
        ("f1+blowup:0,2", Fan::from_spec("hirzebruch:1+blowup:0,2").unwrap()),
    ]
}

/// Intersection dimension of two one-step filtrations, computed from the
/// input lines: level `a` has dimension 2 for `a >= 0`, 1 for
/// `-jump <= a < 0` and 0 below.
fn oracle_sigma_dim(b: &BundleData, k: usize, m: Character) -> u8 {
    let fan = b.fan();
    let n = fan.num_rays();
    let (r0, r1) = (k, (k + 1) % n);
    let level = |r: usize| {
        let a = pairing(m, fan.ray(r));
        let jump = b.jump(r) as i64;
        if a >= 0 {
            2
        } else if a >= -jump {
            1
        } else {
            0
        }
    };
    match (level(r0), level(r1)) {
        (0, _) | (_, 0) => 0,
        (2, d) | (d, 2) => d,
        _ => {
            let (p, q) = (b.line(r0).unwrap().coords(), b.line(r1).unwrap().coords());
            u8::from(p[0].clone() * q[1].clone() == p[1].clone() * q[0].clone())
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fan = Fan::projective_plane();
    let part = Partition::fine(&[0, 1, 2]);
    let mut g = Gen::new(101);
    let bundles: Vec<BundleData> = (0..100).map(|_| g.distinct_line_bundle(&fan, &[1, 2, 3])).collect();
    for b in &bundles {
        let v = p_stability(Subject::Bundle(b), &part).map_err(|e| e.to_string())?;
        ensure(v.status == StabilityStatus::Stable, || "generated bundle is not stable".into())?;
    }
    let mut pairs = 0;
    for (i, x) in bundles.iter().enumerate() {
        for y in &bundles[i..] {
            let px = PSubject { subject: Subject::Bundle(x), partition: &part };
            let py = PSubject { subject: Subject::Bundle(y), partition: &part };
            ensure(p_equivalent(px, py) == Ok(true), || format!("pair {pairs} not equivalent"))?;
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{pairs} pairs of stable triples all equivalent in {elapsed:.2?}"))
}

/// `(p4 − p1)(p2 − p3) / ((p4 − p3)(p2 − p1))` on affine values, with
/// `None` for infinity.
fn oracle_cross_ratio(z: [Rational; 4]) -> Option<Rational> {
    let num = (z[3].clone() - z[0].clone()) * (z[1].clone() - z[2].clone());
    let den = (z[3].clone() - z[2].clone()) * (z[1].clone() - z[0].clone());
    assert!(!(num == int(0) && den == int(0)));
    (den != int(0)).then(|| num / den)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(202);
    let mut seen = BTreeSet::new();
    let cases = 300;
    for _ in 0..cases {
        let [p, q]: [Rational; 2] = [0, 1].map(|_| Rational::new(g.small_int(9).into(), 1.into()));
        if p == q {
            continue;
        }
        for (pattern, expected) in [([0, 1, 0, 1], Some(int(1))), ([0, 0, 1, 1], None), ([0, 1, 1, 0], Some(int(0)))] {
            let affine = pattern.map(|i| if i == 0 { p.clone() } else { q.clone() });
            let oracle = oracle_cross_ratio(affine.clone());
            ensure(oracle == expected, || format!("oracle disagrees with the boundary value on {affine:?}"))?;
            // Random homogeneous representatives of each point.
            let points = affine
                .iter()
                .map(|z| {
                    let c = g.nonzero_scalar();
                    vec![z.clone() * c.clone(), c]
                })
                .collect();
            let config = PointConfig::new(2, points).map_err(|e| e.to_string())?;
            let m = moduli_coordinate_s4(&config).map_err(|e| e.to_string())?;
            let want = match &expected {
                Some(v) => LinePoint::affine(v.clone()),
                None => LinePoint::infinity(),
            };
            ensure(m.point == want, || format!("{affine:?} gave {:?}", m.point))?;
            seen.insert(m.point);
        }
    }
    ensure(seen.len() == 3, || format!("expected three distinct boundary values, got {}", seen.len()))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("boundary classes map to 1, infinity and 0 over {cases} seeds in {elapsed:.2?}"))
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn criterion_3() -> Outcome {
    let six = semistable_classes(6).map_err(|e| e.to_string())?.count;
    let four = semistable_classes(4).map_err(|e| e.to_string())?.count;
    ensure(six == 10, || format!("s = 6 gave {six}"))?;
    ensure(four == 3 && four as u64 == binomial(4, 2) / 2, || format!("s = 4 gave {four}"))?;
    for s in [8, 10] {
        let c = semistable_classes(s).map_err(|e| e.to_string())?.count as u64;
        ensure(c == binomial(s as u64, s as u64 / 2) / 2, || format!("s = {s} gave {c}"))?;
    }
    Ok("ten classes for six parts, three for four".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(404);
    let mut cells = 0u64;
    let mut bundles = 0;
    for (name, fan) in fans() {
        for _ in 0..50 {
            let b = g.resolvable_bundle(&fan, 3);
            let r = build_resolution(&b).map_err(|e| format!("{name}: {e}"))?;
            let quotient = cokernel_filtrations(&r, &fan).map_err(|e| e.to_string())?;
            ensure(quotient == b, || format!("{name}: cokernel filtrations differ from the input"))?;
            let p = SheafPresentation::from_resolution(fan.clone(), &r).map_err(|e| e.to_string())?;
            let radius = b.max_jump() as i64 + 2;
            for k in 0..fan.num_cones() {
                let grid = chart_graded_dims(&p, k, radius).map_err(|e| e.to_string())?;
                for (&(a, c), &d) in &grid.dims {
                    let m = grid.characters[&(a, c)];
                    let expected = sigma_family_dim(&quotient, k, m);
                    let oracle = oracle_sigma_dim(&b, k, m);
                    ensure(u32::from(expected) == d && expected == oracle, || {
                        format!("{name}, cone {k}, m = {m:?}: chart {d}, filtrations {expected}, oracle {oracle}")
                    })?;
                    cells += 1;
                }
            }
            bundles += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("{bundles} bundles on six fans, {cells} graded pieces equal in {elapsed:.2?}"))
}

/// Rank of `A` at the fixed point of cone `k`: variables on the cone's rays
/// vanish, every other variable is 1.
fn oracle_fixed_point_rank(mm: &MonomialMatrix, fan: &Fan, k: usize) -> usize {
    let n = fan.num_rays();
    let on_cone = |r: usize| r == k || r == (k + 1) % n;
    let rows: Vec<usize> = (0..mm.num_parts()).filter(|&i| mm.partition().part(i).iter().all(|&r| !on_cone(r))).collect();
    mm.coeffs().select_rows(&rows).rank()
}

fn criterion_5() -> Outcome {
    let mut g = Gen::new(505);
    let (mut free, mut not_free, mut total) = (0, 0, 0);
    for (name, fan) in fans() {
        for _ in 0..40 {
            let mm = g.interval_matrix(&fan, 3);
            let rep = check_local_freeness(&mm, &fan).map_err(|e| e.to_string())?;
            let cyclic = rep.cyclic_minors.ok_or_else(|| format!("{name}: cyclic criterion not applicable"))?;
            let s = mm.num_parts();
            let oracle = (0..fan.num_cones()).all(|k| oracle_fixed_point_rank(&mm, &fan, k) == s - 2);
            ensure(cyclic == rep.fitting && rep.fitting == rep.fixed_point_ranks && oracle == rep.fixed_point_ranks, || {
                format!(
                    "{name}: verdicts differ: minors {cyclic}, fitting {}, ranks {}, oracle {oracle}",
                    rep.fitting, rep.fixed_point_ranks
                )
            })?;
            if oracle {
                free += 1;
            } else {
                not_free += 1;
            }
            total += 1;
        }
    }
    ensure(free >= 20 && not_free >= 20, || format!("too few cases of one kind: {free} free, {not_free} not free"))?;
    Ok(format!("{total} matrices, three verdicts agree ({free} locally free, {not_free} not)"))
}

fn criterion_6() -> Outcome {
    let mut g = Gen::new(606);
    let (mut total, mut with_support, mut sections) = (0, 0, 0);
    for (name, fan) in fans() {
        for _ in 0..20 {
            let p = g.refined_presentation(&fan, 3);
            let radius = p.default_radius();
            let lengths = oracle_lengths(&p, radius);
            let delta: BTreeSet<usize> = delta2_cones(&p).into_iter().collect();
            let positive: BTreeSet<usize> = lengths.iter().filter(|(_, &l)| l > 0).map(|(&k, _)| k).collect();
            ensure(delta == positive, || format!("{name}: combinatorial {delta:?}, oracle {positive:?}"))?;
            let jumps = p.jumps();
            for (&k, &l) in &lengths {
                let (r0, r1) = fan.cone_rays(k);
                let expected = if delta.contains(&k) { jumps[r0] as u64 * jumps[r1] as u64 } else { 0 };
                ensure(l == expected, || format!("{name}, cone {k}: length {l}, expected {expected}"))?;
            }
            let coarse = coarse_partition(&bidual(&p));
            let refinement = is_refinement(p.partition(), &coarse).ok_or_else(|| format!("{name}: not a refinement"))?;
            for section in refinement.all_sections() {
                let via = lengths_via_coarsening(&p, &section, radius).map_err(|e| e.to_string())?;
                ensure(via == lengths, || format!("{name}: section {section:?} changes the lengths"))?;
                sections += 1;
            }
            if !delta.is_empty() {
                with_support += 1;
            }
            total += 1;
        }
    }
    ensure(with_support >= total / 4, || format!("only {with_support} of {total} presentations have support"))?;
    Ok(format!("{total} presentations ({with_support} with support), {sections} sections agree"))
}

fn criterion_7() -> Outcome {
    let mut g = Gen::new(707);
    let mut total = 0;
    let mut seen = BTreeSet::new();
    for n in 2..=7 {
        for m in 1..n {
            for _ in 0..10 {
                let a = g.full_rank_matrix(n, m, true);
                let v = grass_stability(&a, GrassMode::Torus).map_err(|e| e.to_string())?.status;
                let dual = dual_presentation(&a).map_err(|e| e.to_string())?.transpose();
                let w = grass_stability(&dual, GrassMode::Torus).map_err(|e| e.to_string())?.status;
                ensure(v == w, || format!("{n}x{m}: {v:?} but dual {w:?}"))?;

                let b = g.full_rank_matrix(n, m, false);
                let v = grass_stability(&b, GrassMode::Torus).map_err(|e| e.to_string())?.status;
                let c = config_stability(&PointConfig::from_rows(&b).map_err(|e| e.to_string())?).status;
                ensure(v == c, || format!("{n}x{m}: span {v:?} but rows {c:?}"))?;
                seen.insert(v.as_str());
                total += 1;
            }
        }
    }
    ensure(seen.len() == 3, || format!("only verdicts {seen:?} occurred"))?;
    Ok(format!("{total} matrix pairs agree under duality and between quotient routes"))
}

/// Balanced splits, counted up to complement, with no two cyclically
/// adjacent rays of the `s`-gon in different parts on the same side.
fn oracle_free_splits(s: usize) -> Vec<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << s {
        if mask.count_ones() as usize * 2 != s {
            continue;
        }
        let side = |r: usize| mask >> r & 1;
        if (0..s).all(|r| side(r) != side((r + 1) % s)) {
            let half: Vec<usize> = (0..s).filter(|&r| side(r) == side(0)).collect();
            out.insert(half);
        }
    }
    out.into_iter().collect()
}

fn criterion_8() -> Outcome {
    let hexagon = Fan::from_spec("p2+blowup:0,2,4").map_err(|e| e.to_string())?;
    let cases = [
        (Fan::hirzebruch(0), vec![0, 2]),
        (Fan::hirzebruch(3), vec![0, 2]),
        (hexagon, vec![0, 2, 4]),
        (Fan::from_spec("hirzebruch:1+blowup:0,2").map_err(|e| e.to_string())?, vec![0, 2, 4]),
    ];
    for (fan, expected) in cases {
        let s = fan.num_rays();
        let found = locally_free_splits(&fan, &Partition::fine(&(0..s).collect::<Vec<_>>())).map_err(|e| e.to_string())?;
        let oracle = oracle_free_splits(s);
        ensure(found == vec![expected.clone()] && oracle == found, || format!("{s} rays: found {found:?}, oracle {oracle:?}"))?;
    }
    Ok("exactly one locally free balanced split on four and six rays".into())
}

fn criterion_9() -> Outcome {
    let mut g = Gen::new(909);
    let mut total = 0;
    for (name, fan) in fans() {
        for _ in 0..30 {
            let b = g.split_bundle(&fan, 3);
            match build_resolution(&b) {
                Err(ResolutionError::Splits(s)) if s <= 2 => {}
                other => return Err(format!("{name}: expected a splitting, got {other:?}")),
            }
            let (d1, d2) = split_summands(&b).ok_or_else(|| format!("{name}: no summands"))?;
            for r in 0..fan.num_rays() {
                ensure(d1[r] + d2[r] == b.jump(r) as i64, || format!("{name}: summands do not add up at ray {r}"))?;
                ensure(d1[r] == 0 || d2[r] == 0, || format!("{name}: ray {r} in both summands"))?;
            }
            // Rays with the same nonzero summand carry the same line.
            for d in [&d1, &d2] {
                let lines: BTreeSet<&LinePoint> = (0..fan.num_rays()).filter(|&r| d[r] != 0).map(|r| b.line(r).unwrap()).collect();
                ensure(lines.len() <= 1, || format!("{name}: a summand mixes lines"))?;
            }
            total += 1;
        }
    }
    Ok(format!("{total} bundles with at most two runs split, summands add up to the jumps"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("stable triples on the projective plane are all equivalent", criterion_1),
        ("moduli coordinate of the boundary classes", criterion_2),
        ("number of semistable classes", criterion_3),
        ("chart dimensions of resolutions match the filtrations", criterion_4),
        ("local freeness criteria agree", criterion_5),
        ("skyscraper support and lengths", criterion_6),
        ("stability under duality and between quotient routes", criterion_7),
        ("unique locally free split", criterion_8),
        ("splitting detection", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
