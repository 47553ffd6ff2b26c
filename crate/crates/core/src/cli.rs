//! The `torix` command line: every operation over JSON files, with canonical
//! JSON output (sorted keys, scalars as `"p/q"` strings).

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bundle::{coarse_partition, is_refinement, normalize_twist, sigma_dim_at, split_summands, BundleData, Partition};
use crate::fan::{validate_rays, Fan};
use crate::gen::{ConfigShape, Gen};
use crate::git::{
    config_stability, grass_stability, locally_free_splits, moduli_coordinate_s4, p_equivalent, p_stability, part_lines,
    semistable_classes, GrassMode, PSubject, PointConfig, StabilityStatus, StabilityVerdict, Subject,
};
use crate::io::{self, IoError};
use crate::resolution::{build_resolution, check_local_freeness, cokernel_filtrations, LocalFreenessReport, MonomialResolution};
use crate::sheaf::{
    bidual, chart_dims_of_matrix, chart_graded_dims, lengths_via_coarsening, skyscraper_support_with_radius, GradedDimGrid,
    SheafPresentation,
};
use crate::Mat;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "torix", version, about = "Equivariant rank-2 sheaves on toric surfaces")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub output: OutputMode,
    /// Worker threads for parallel oracle sums.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct FanArg {
    /// `p2`, `hirzebruch:a` or `file:<path>`.
    #[arg(long)]
    pub fan: Option<String>,
    /// Blow up these cones, left to right.
    #[arg(long, value_delimiter = ',')]
    pub blowup: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(subcommand)]
    Fan(FanCommand),
    #[command(subcommand)]
    Bundle(BundleCommand),
    /// Monomial resolution of a bundle.
    Resolve {
        #[arg(long)]
        bundle: PathBuf,
        #[command(flatten)]
        fan: FanArg,
    },
    /// Local freeness report of a resolution, bundle or presentation.
    Check {
        #[arg(long, conflicts_with_all = ["resolution", "presentation"])]
        bundle: Option<PathBuf>,
        #[arg(long, requires = "fan", conflicts_with = "presentation")]
        resolution: Option<PathBuf>,
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[command(flatten)]
        fan: FanArg,
    },
    /// Filtrations of the reflexive hull of a presentation.
    Bidual {
        #[arg(long)]
        presentation: PathBuf,
    },
    /// Support and lengths of the skyscraper sheaf `E''/E'`.
    Skyscraper {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        radius: Option<i64>,
        /// Fine part chosen in each coarse part, for the coarsening cross-check.
        #[arg(long, value_delimiter = ',')]
        section: Option<Vec<usize>>,
    },
    /// GIT stability of a configuration, bundle or presentation.
    Stability {
        #[arg(long, conflicts_with_all = ["bundle", "presentation"])]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "config")]
        mode: StabilityMode,
        #[arg(long, conflicts_with = "presentation")]
        bundle: Option<PathBuf>,
        #[arg(long)]
        presentation: Option<PathBuf>,
        /// Partition as JSON, e.g. `[[0,1],[2],[3]]`.
        #[arg(long)]
        partition: Option<String>,
    },
    /// Equivalence of two semistable bundles or presentations.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Moduli coordinate (four parts) or class descriptor.
    Moduli {
        #[arg(long, conflicts_with_all = ["config", "presentation"])]
        bundle: Option<PathBuf>,
        #[arg(long, conflicts_with = "presentation")]
        config: Option<PathBuf>,
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Balanced splits of `s` parts up to complement.
    Classes {
        #[arg(long)]
        s: Option<usize>,
        #[command(flatten)]
        fan: FanArg,
    },
    /// Chart dimension grids compared with the bidual.
    Oracle {
        #[arg(long, conflicts_with = "presentation")]
        bundle: Option<PathBuf>,
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long)]
        cone: Option<usize>,
        #[arg(long)]
        radius: Option<i64>,
    },
    /// Seeded random test data.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[command(flatten)]
    pub fan: FanArg,
    #[arg(long, default_value_t = 2)]
    pub max_jump: u32,
    #[arg(long, value_enum)]
    pub shape: Option<ShapeArg>,
    #[arg(long, default_value_t = 4)]
    pub s: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

#[derive(Debug, Subcommand)]
pub enum FanCommand {
    /// Print a fan.
    Make(FanArg),
    /// Check smoothness and completeness of a fan file.
    Validate(FanArg),
    /// Blow up one cone.
    Blowup {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long)]
        cone: usize,
    },
    /// Generators of the irrelevant ideal.
    Irrelevant(FanArg),
}

#[derive(Debug, Subcommand)]
pub enum BundleCommand {
    /// Normalize raw filtration triples.
    Normalize {
        #[arg(long)]
        triples: PathBuf,
    },
    /// Coarse partition.
    Partition {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Line-bundle summands when the bundle splits.
    Split {
        #[arg(long)]
        bundle: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StabilityMode {
    Config,
    GrassTorus,
    GrassGl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Bundle,
    Presentation,
    Matrix,
    Config,
    Resolution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Stable,
    ProperlySemistable,
    Unstable,
}

impl From<ShapeArg> for ConfigShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Stable => ConfigShape::Stable,
            ShapeArg::ProperlySemistable => ConfigShape::ProperlySemistable,
            ShapeArg::Unstable => ConfigShape::Unstable,
        }
    }
}

const MAX_SUBSET_SIZE: usize = 12;

fn resolve_fan(arg: &FanArg) -> Result<Option<Fan>> {
    let Some(spec) = &arg.fan else {
        if arg.blowup.is_empty() {
            return Ok(None);
        }
        return Err(input("--blowup requires --fan"));
    };
    let mut fan = match spec.strip_prefix("file:") {
        Some(path) => io::fan_from_json(&io::read_json(Path::new(path))?)?,
        None => Fan::from_spec(spec).map_err(input)?,
    };
    for &k in &arg.blowup {
        fan = fan.blow_up(k).map_err(input)?;
    }
    Ok(Some(fan))
}

fn require_fan(arg: &FanArg) -> Result<Fan> {
    resolve_fan(arg)?.ok_or_else(|| input("--fan is required"))
}

/// Reads a JSON document, replacing its `fan` member when one is given.
fn read_with_fan(path: &Path, fan: Option<&Fan>) -> Result<Value> {
    let mut v = io::read_json(path)?;
    if let (Some(f), Some(o)) = (fan, v.as_object_mut()) {
        o.insert("fan".into(), io::fan_to_json(f));
    }
    Ok(v)
}

fn read_bundle(path: &Path) -> Result<BundleData> {
    Ok(io::bundle_from_json(&io::read_json(path)?)?)
}

fn read_presentation(path: &Path) -> Result<SheafPresentation> {
    Ok(io::presentation_from_json(&io::read_json(path)?)?)
}

fn parse_partition(text: &str, support: &[usize]) -> Result<Partition> {
    let v: Value = serde_json::from_str(text).map_err(|e| input(format!("--partition: {e}")))?;
    Ok(io::partition_from_json(&v, support)?)
}

fn verdict_json(v: &StabilityVerdict) -> Value {
    json!({"status": v.status.as_str(), "witness": v.witness})
}

fn report_json(r: &LocalFreenessReport) -> Value {
    json!({
        "cyclic_minors": r.cyclic_minors,
        "failing_minors": r.failing_minors,
        "fitting": r.fitting,
        "failing_fitting_cones": r.failing_fitting_cones,
        "fixed_point_ranks": r.fixed_point_ranks,
        "rank_deficient_cones": r.rank_deficient_cones,
        "locally_free": r.locally_free(),
        "consistent": r.consistent(),
    })
}

fn resolution_json(r: &MonomialResolution) -> Value {
    let mut v = io::resolution_to_json(r);
    let o = v.as_object_mut().expect("object");
    o.insert("sequence".into(), json!(r.display_sequence()));
    o.insert("source_rank".into(), json!(r.source_rank()));
    v
}

fn grid_json(grid: &GradedDimGrid, reference: impl Fn(i64, i64) -> u8) -> Value {
    let mut mismatches = Vec::new();
    let cells: Vec<Value> = grid
        .dims
        .iter()
        .map(|(&(a, b), &d)| {
            let expected = reference(a, b);
            if u32::from(expected) != d {
                mismatches.push(json!([a, b]));
            }
            json!({"pairings": [a, b], "character": grid.characters[&(a, b)], "dim": d, "bidual_dim": expected})
        })
        .collect();
    json!({
        "cone": grid.cone,
        "radius": grid.radius,
        "cells": cells,
        "matches_bidual": mismatches.is_empty(),
        "mismatches": mismatches,
    })
}

/// A bundle or presentation read from a file, told apart by its keys.
enum Loaded {
    Bundle(BundleData),
    Presentation(SheafPresentation),
}

impl Loaded {
    fn read(path: &Path) -> Result<Self> {
        let v = io::read_json(path)?;
        if v.get("filtrations").is_some() {
            Ok(Loaded::Bundle(io::bundle_from_json(&v)?))
        } else {
            Ok(Loaded::Presentation(io::presentation_from_json(&v)?))
        }
    }

    fn subject(&self) -> Subject<'_> {
        match self {
            Loaded::Bundle(b) => Subject::Bundle(b),
            Loaded::Presentation(p) => Subject::Presentation(p),
        }
    }

    /// The bundle's coarse partition, or the presentation's own partition.
    fn default_partition(&self) -> Partition {
        match self {
            Loaded::Bundle(b) => coarse_partition(b),
            Loaded::Presentation(p) => p.partition().clone(),
        }
    }

    fn support(&self) -> Vec<usize> {
        match self {
            Loaded::Bundle(b) => b.support(),
            Loaded::Presentation(p) => p.partition().support(),
        }
    }

    fn partition(&self, text: Option<&str>) -> Result<Partition> {
        match text {
            Some(t) => parse_partition(t, &self.support()),
            None => Ok(self.default_partition()),
        }
    }
}

fn load_one(bundle: &Option<PathBuf>, presentation: &Option<PathBuf>) -> Result<Loaded> {
    match (bundle, presentation) {
        (Some(b), None) => Ok(Loaded::Bundle(read_bundle(b)?)),
        (None, Some(p)) => Ok(Loaded::Presentation(read_presentation(p)?)),
        _ => Err(input("exactly one of --bundle or --presentation is required")),
    }
}

fn check_subset_size(n: usize) -> Result<()> {
    if n > MAX_SUBSET_SIZE {
        return Err(input(format!("at most {MAX_SUBSET_SIZE} points or parts are supported, got {n}")));
    }
    Ok(())
}

fn run_fan(cmd: &FanCommand) -> Result<Value> {
    match cmd {
        FanCommand::Make(arg) => Ok(io::fan_to_json(&require_fan(arg)?)),
        FanCommand::Validate(arg) => {
            let spec = arg.fan.as_deref().ok_or_else(|| input("--fan is required"))?;
            let rays = match spec.strip_prefix("file:") {
                Some(path) => io::rays_from_json(&io::read_json(Path::new(path))?)?,
                None => require_fan(arg)?.rays().to_vec(),
            };
            Ok(match validate_rays(&rays) {
                Ok(()) => json!({"valid": true, "num_rays": rays.len(), "error": null}),
                Err(e) => json!({"valid": false, "num_rays": rays.len(), "error": e.to_string()}),
            })
        }
        FanCommand::Blowup { fan, cone } => Ok(io::fan_to_json(&require_fan(fan)?.blow_up(*cone).map_err(input)?)),
        FanCommand::Irrelevant(arg) => {
            let fan = require_fan(arg)?;
            let gens: Vec<Value> = fan.irrelevant_generators().iter().map(|e| json!(e.0)).collect();
            Ok(json!({"generators": gens}))
        }
    }
}

fn run_bundle(cmd: &BundleCommand) -> Result<Value> {
    match cmd {
        BundleCommand::Normalize { triples } => {
            let (fan, raw) = io::triples_from_json(&io::read_json(triples)?)?;
            let (b, twist) = normalize_twist(&fan, &raw).map_err(input)?;
            Ok(json!({"bundle": io::bundle_to_json(&b), "twist": twist}))
        }
        BundleCommand::Partition { bundle } => {
            let p = coarse_partition(&read_bundle(bundle)?);
            Ok(json!({"partition": io::partition_to_json(&p), "s": p.len(), "interval": p.is_interval()}))
        }
        BundleCommand::Split { bundle } => {
            let summands = split_summands(&read_bundle(bundle)?);
            Ok(json!({"splits": summands.is_some(), "summands": summands.map(|(a, b)| vec![a, b])}))
        }
    }
}

fn run_stability(
    config: &Option<PathBuf>,
    mode: StabilityMode,
    bundle: &Option<PathBuf>,
    presentation: &Option<PathBuf>,
    partition: Option<&str>,
) -> Result<Value> {
    if let Some(path) = config {
        let v = io::read_json(path)?;
        let verdict = match mode {
            StabilityMode::Config => {
                let c = io::config_from_json(&v)?;
                check_subset_size(c.len())?;
                config_stability(&c)
            }
            StabilityMode::GrassTorus | StabilityMode::GrassGl => {
                let points = v.get("points").ok_or_else(|| input("field `points`: missing"))?;
                let a: Mat = io::matrix_from_json(points, "points", None)?;
                check_subset_size(a.nrows())?;
                let grass = if mode == StabilityMode::GrassTorus { GrassMode::Torus } else { GrassMode::FullGl };
                grass_stability(&a, grass).map_err(input)?
            }
        };
        return Ok(verdict_json(&verdict));
    }
    let loaded = load_one(bundle, presentation)?;
    if mode != StabilityMode::Config {
        return Err(input("--mode applies to --config inputs only"));
    }
    let partition = loaded.partition(partition)?;
    check_subset_size(partition.len())?;
    let verdict = p_stability(loaded.subject(), &partition).map_err(input)?;
    let mut v = verdict_json(&verdict);
    v.as_object_mut().expect("object").insert("partition".into(), io::partition_to_json(&partition));
    Ok(v)
}

fn moduli_json(c: &PointConfig) -> Result<Value> {
    check_subset_size(c.len())?;
    if c.ambient() == 2 && c.len() == 4 {
        let m = moduli_coordinate_s4(c).map_err(input)?;
        return Ok(json!({
            "s": 4,
            "coordinate": io::line_to_json(&m.point),
            "affine": m.point.affine_value().map(|x| io::rational_to_json(&x)),
            "boundary": m.boundary,
        }));
    }
    let verdict = config_stability(c);
    let class = match verdict.status {
        StabilityStatus::ProperlySemistable => {
            verdict.witness.clone().map(|w| if w.contains(&0) { w } else { (0..c.len()).filter(|i| !w.contains(i)).collect() })
        }
        _ => None,
    };
    Ok(json!({"s": c.len(), "status": verdict.status.as_str(), "class": class}))
}

fn oracle(loaded: &Loaded, cone: Option<usize>, radius: Option<i64>) -> Result<Value> {
    let (fan, cones) = match loaded {
        Loaded::Bundle(b) => (b.fan(), b.fan().num_cones()),
        Loaded::Presentation(p) => (p.fan(), p.fan().num_cones()),
    };
    let cones: Vec<usize> = match cone {
        Some(k) => {
            fan.check_cone(k).map_err(input)?;
            vec![k]
        }
        None => (0..cones).collect(),
    };
    let grids: Vec<Value> = match loaded {
        Loaded::Bundle(b) => {
            let r = build_resolution(b).map_err(input)?;
            let hull = cokernel_filtrations(&r, b.fan()).map_err(input)?;
            let radius = radius.unwrap_or(b.max_jump() as i64 + 2);
            if radius < 1 {
                return Err(input("radius must be at least 1"));
            }
            cones
                .iter()
                .map(|&k| grid_json(&chart_dims_of_matrix(b.fan(), r.matrix(), k, radius), |a, c| sigma_dim_at(&hull, k, a, c)))
                .collect()
        }
        Loaded::Presentation(p) => {
            let hull = bidual(p);
            let radius = radius.unwrap_or(p.default_radius());
            cones
                .iter()
                .map(|&k| Ok(grid_json(&chart_graded_dims(p, k, radius).map_err(input)?, |a, c| sigma_dim_at(&hull, k, a, c))))
                .collect::<Result<_>>()?
        }
    };
    let all = grids.iter().all(|g| g["matches_bidual"] == json!(true));
    Ok(json!({"grids": grids, "matches_bidual": all}))
}

fn generate(args: &GenArgs) -> Result<Value> {
    let GenArgs { seed, kind, max_jump, shape, s, n, m, .. } = *args;
    let mut g = Gen::new(seed);
    let fan = resolve_fan(&args.fan)?.unwrap_or_else(Fan::projective_plane);
    let positive_jump = || if max_jump == 0 { Err(input("--max-jump must be positive")) } else { Ok(()) };
    Ok(match kind {
        GenKind::Bundle => {
            positive_jump()?;
            io::bundle_to_json(&g.resolvable_bundle(&fan, max_jump))
        }
        GenKind::Resolution => {
            positive_jump()?;
            let b = g.resolvable_bundle(&fan, max_jump);
            resolution_json(&build_resolution(&b).map_err(|e| CliError::Internal(e.to_string()))?)
        }
        GenKind::Presentation => {
            positive_jump()?;
            io::presentation_to_json(&g.refined_presentation(&fan, max_jump))
        }
        GenKind::Matrix => {
            if m == 0 || m > n || n > MAX_SUBSET_SIZE {
                return Err(input("need 1 <= m <= n <= 12"));
            }
            json!({"m": m, "points": io::matrix_to_json(&g.full_rank_matrix(n, m, false))})
        }
        GenKind::Config => {
            check_subset_size(s)?;
            let shape = shape.unwrap_or(ShapeArg::Stable);
            let lines = g
                .lines_with_shape(s, shape.into())
                .ok_or_else(|| input(format!("no configuration of {s} points has the requested type")))?;
            io::config_to_json(&PointConfig::from_line_points(&lines))
        }
    })
}

fn dispatch(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Fan(cmd) => run_fan(cmd),
        Command::Bundle(cmd) => run_bundle(cmd),
        Command::Resolve { bundle, fan } => {
            let fan = resolve_fan(fan)?;
            let b = io::bundle_from_json(&read_with_fan(bundle, fan.as_ref())?)?;
            Ok(resolution_json(&build_resolution(&b).map_err(input)?))
        }
        Command::Check { bundle, resolution, presentation, fan } => {
            let report = match (bundle, resolution, presentation) {
                (Some(b), None, None) => {
                    let fan = resolve_fan(fan)?;
                    let b = io::bundle_from_json(&read_with_fan(b, fan.as_ref())?)?;
                    let r = build_resolution(&b).map_err(input)?;
                    check_local_freeness(r.matrix(), b.fan())
                }
                (None, Some(r), None) => {
                    let r = io::resolution_from_json(&io::read_json(r)?)?;
                    check_local_freeness(r.matrix(), &require_fan(fan)?)
                }
                (None, None, Some(p)) => {
                    let p = read_presentation(p)?;
                    check_local_freeness(p.matrix(), p.fan())
                }
                _ => return Err(input("exactly one of --bundle, --resolution or --presentation is required")),
            };
            Ok(report_json(&report.map_err(input)?))
        }
        Command::Bidual { presentation } => {
            let p = read_presentation(presentation)?;
            let hull = bidual(&p);
            let coarse = coarse_partition(&hull);
            Ok(json!({
                "bundle": io::bundle_to_json(&hull),
                "coarse_partition": io::partition_to_json(&coarse),
                "refines": is_refinement(p.partition(), &coarse).is_some(),
            }))
        }
        Command::Skyscraper { presentation, radius, section } => {
            let p = read_presentation(presentation)?;
            let radius = radius.unwrap_or(p.default_radius());
            if radius < 1 {
                return Err(input("radius must be at least 1"));
            }
            let report = skyscraper_support_with_radius(&p, radius);
            let lengths: Map<String, Value> = report.lengths.iter().map(|(k, l)| (k.to_string(), json!(l))).collect();
            let mut out = json!({"support": report.support, "lengths": lengths, "radius": radius});
            if let Some(section) = section {
                let via = lengths_via_coarsening(&p, section, radius).map_err(input)?;
                let via: Map<String, Value> = via.iter().map(|(k, l)| (k.to_string(), json!(l))).collect();
                out.as_object_mut().expect("object").insert("section_lengths".into(), Value::Object(via));
            }
            Ok(out)
        }
        Command::Stability { config, mode, bundle, presentation, partition } => {
            run_stability(config, *mode, bundle, presentation, partition.as_deref())
        }
        Command::Equiv { first, second, partition } => {
            let (x, y) = (Loaded::read(first)?, Loaded::read(second)?);
            let px = x.partition(partition.as_deref())?;
            let py = y.partition(partition.as_deref())?;
            check_subset_size(px.len())?;
            let equivalent =
                p_equivalent(PSubject { subject: x.subject(), partition: &px }, PSubject { subject: y.subject(), partition: &py })
                    .map_err(input)?;
            Ok(json!({"equivalent": equivalent}))
        }
        Command::Moduli { bundle, config, presentation, partition } => {
            let c = match config {
                Some(path) => io::config_from_json(&io::read_json(path)?)?,
                None => {
                    let loaded = load_one(bundle, presentation)?;
                    let partition = loaded.partition(partition.as_deref())?;
                    let (_, lines) = part_lines(loaded.subject(), &partition).map_err(input)?;
                    PointConfig::from_line_points(&lines)
                }
            };
            moduli_json(&c)
        }
        Command::Classes { s, fan } => {
            let fan = resolve_fan(fan)?;
            let s = match (s, &fan) {
                (Some(s), Some(f)) if *s != f.num_rays() => return Err(input("--s must equal the number of rays of --fan")),
                (Some(s), _) => *s,
                (None, Some(f)) => f.num_rays(),
                (None, None) => return Err(input("--s or --fan is required")),
            };
            if s > 2 * MAX_SUBSET_SIZE {
                return Err(input("s is too large"));
            }
            let classes = semistable_classes(s).map_err(input)?;
            let mut out = json!({"count": classes.count, "representatives": classes.representatives});
            if let Some(f) = fan {
                let fine = Partition::fine(&(0..s).collect::<Vec<_>>());
                let free = locally_free_splits(&f, &fine).map_err(input)?;
                out.as_object_mut().expect("object").insert("locally_free".into(), json!(free));
            }
            Ok(out)
        }
        Command::Oracle { bundle, presentation, cone, radius } => oracle(&load_one(bundle, presentation)?, *cone, *radius),
        Command::Gen(args) => generate(args),
    }
}

fn styled(key: &str, color: bool) -> String {
    if color {
        format!("\x1b[1m{key}\x1b[0m")
    } else {
        key.to_string()
    }
}

/// One `key: value` line per top-level member; nested values stay compact JSON.
pub fn render_text(v: &Value, color: bool) -> String {
    let mut out = String::new();
    match v {
        Value::Object(o) => {
            for (k, val) in o {
                let shown = match val {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{}: {}\n", styled(k, color), shown));
            }
        }
        other => {
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
    out
}

fn use_color() -> bool {
    std::env::var_os("TORIX_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

/// Parses `args`, runs the command and writes the result to `out`; returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli))).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string());
        Err(CliError::Internal(msg))
    });
    let (value, code) = match result {
        Ok(v) => (v, 0),
        Err(e) => (json!({"error": e.to_string()}), e.exit_code()),
    };
    let text = match cli.output {
        OutputMode::Json => io::to_canonical_string(&value),
        OutputMode::Text => render_text(&value, use_color()),
    };
    if out.write_all(text.as_bytes()).is_err() {
        return 1;
    }
    code
}
