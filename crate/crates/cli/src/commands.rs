//! Subcommand argument structs and handlers. Each handler resolves its
//! flags, runs the corresponding library operations, and returns one
//! [`Artifact`] holding the reproducible config, the structured results,
//! and a tabular view for CSV output.

use crate::output::{fnum, onum, Artifact, Table};
use crate::CliError;
use anchored::expansion::{animal_counts, expansion_profile, BoundaryMode, ExpansionError};
use anchored::formulas;
use anchored::graph::{
    ExplicitGraph, FiniteGroupGraph, GraphError, GraphOracle, StretchDescriptor, Vertex,
};
use anchored::gw::{backbone_decompose, sample_tree, GwError, OffspringDistribution};
use anchored::percolation::{boundary_tail_histogram, survival_fraction, PercolationMode};
use anchored::prf::trial_seed;
use anchored::walks::{
    exit_before_return, lamplighter_distance_bounds, lamplighter_distance_d1, return_probability,
    speed_estimate, WalkError,
};
use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::{json, Value};

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidParameter(_) | GraphError::Group(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::Graph(g) => g.into(),
            ExpansionError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Graph(g) => g.into(),
            WalkError::SiteMode
            | WalkError::InvalidParameter(_)
            | WalkError::UnsupportedFamily { .. }
            | WalkError::ExactMetricUnavailable { .. } => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<GwError> for CliError {
    fn from(e: GwError) -> Self {
        match e {
            GwError::InvalidDistribution(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Shared flag plumbing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Edge,
    Vertex,
}

impl BoundaryArg {
    fn to_core(self) -> BoundaryMode {
        match self {
            BoundaryArg::Edge => BoundaryMode::Edge,
            BoundaryArg::Vertex => BoundaryMode::Vertex,
        }
    }

    fn name(self) -> &'static str {
        match self {
            BoundaryArg::Edge => "edge",
            BoundaryArg::Vertex => "vertex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bond,
    Site,
}

impl ModeArg {
    fn to_core(self) -> PercolationMode {
        match self {
            ModeArg::Bond => PercolationMode::Bond,
            ModeArg::Site => PercolationMode::Site,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Bond => "bond",
            ModeArg::Site => "site",
        }
    }
}

/// Graph-family selection shared by the enumeration and percolation
/// subcommands.
#[derive(Debug, clap::Args)]
pub struct FamilyOpts {
    /// Graph family: tree | lattice | binary-rooted | lamplighter.
    #[arg(long)]
    pub family: String,

    /// Branching factor for --family tree (the infinite (b+1)-regular tree).
    #[arg(long)]
    pub b: Option<u8>,

    /// Dimension for --family lattice, and the marker lattice of
    /// --family lamplighter.
    #[arg(long)]
    pub d: Option<u8>,

    /// Lamp factor for --family lamplighter: "z2", "cyclic:N", or a path to
    /// a multiplication-table file.
    #[arg(long = "F", value_name = "GROUP", default_value = "z2")]
    pub lamp: String,

    /// Depth of the explicit tree for --family binary-rooted.
    #[arg(long)]
    pub depth: Option<u32>,
}

impl FamilyOpts {
    /// Builds the oracle plus the family fragment of the config.
    fn oracle(&self, default_depth: u32) -> Result<(GraphOracle, Value), CliError> {
        match self.family.as_str() {
            "tree" => {
                let b = self.b.unwrap_or(2);
                Ok((GraphOracle::regular_tree(b)?, json!({ "name": "tree", "b": b })))
            }
            "lattice" => {
                let d = self.d.unwrap_or(2);
                Ok((GraphOracle::lattice(d)?, json!({ "name": "lattice", "d": d })))
            }
            "binary-rooted" => {
                let depth = self.depth.unwrap_or(default_depth);
                let oracle = GraphOracle::explicit(ExplicitGraph::full_tree(2, depth));
                Ok((oracle, json!({ "name": "binary-rooted", "depth": depth })))
            }
            "lamplighter" => {
                let d = self.d.unwrap_or(1);
                let group = lamp_group(&self.lamp)?;
                let order = group.order();
                let oracle = GraphOracle::lamplighter(GraphOracle::lattice(d)?, group);
                Ok((
                    oracle,
                    json!({ "name": "lamplighter", "d": d, "F": self.lamp, "lamp_order": order }),
                ))
            }
            other => Err(CliError::Usage(format!(
                "unknown family '{other}' (expected tree, lattice, binary-rooted, or lamplighter)"
            ))),
        }
    }
}

fn lamp_group(spec: &str) -> Result<FiniteGroupGraph, CliError> {
    if spec.eq_ignore_ascii_case("z2") {
        return Ok(FiniteGroupGraph::cyclic(2));
    }
    if let Some(rest) = spec.strip_prefix("cyclic:") {
        let n: u16 = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("--F cyclic:N needs an integer order, got '{rest}'")))?;
        if n < 2 {
            return Err(CliError::Usage("--F cyclic:N needs order >= 2".into()));
        }
        return Ok(FiniteGroupGraph::cyclic(n));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Run(format!("reading lamp group file '{spec}': {e}")))?;
    FiniteGroupGraph::parse(&text)
        .map_err(|e| CliError::Usage(format!("lamp group file '{spec}': {e}")))
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let token = part.trim();
        if token.is_empty() {
            continue;
        }
        out.push(
            token
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{flag}: '{token}' is not a number")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{flag}: empty list")));
    }
    Ok(out)
}

fn parse_u32_list(text: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let token = part.trim();
        if token.is_empty() {
            continue;
        }
        out.push(
            token
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("{flag}: '{token}' is not a positive integer")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{flag}: empty list")));
    }
    Ok(out)
}

fn check_h(h: f64, flag: &str) -> Result<(), CliError> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag} must be positive and finite, got {h}")))
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result serializes to JSON")
}

// ---------------------------------------------------------------------------
// expansion
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ExpansionArgs {
    #[command(flatten)]
    pub family: FamilyOpts,

    /// Largest set size enumerated.
    #[arg(long, default_value_t = 10)]
    pub max_size: usize,

    /// Boundary flavor minimized per size.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Edge)]
    pub mode: BoundaryArg,

    /// Expansion constant for the comparison column Psi(h)^n.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,

    /// Vertex budget when materializing the enumeration region.
    #[arg(long, default_value_t = 1_000_000)]
    pub ball_budget: usize,
}

pub fn expansion(args: &ExpansionArgs, seed: u64) -> Result<Artifact, CliError> {
    check_h(args.h, "--h")?;
    if args.max_size == 0 {
        return Err(CliError::Usage("--max-size must be at least 1".into()));
    }
    let (oracle, family_cfg) = args.family.oracle(args.max_size as u32 + 1)?;
    let profile = expansion_profile(&oracle, args.max_size, args.mode.to_core(), args.ball_budget)?;
    let psi_h = formulas::psi(args.h);

    let mut rows = Vec::with_capacity(args.max_size);
    for k in 1..=args.max_size {
        let per = &profile.per_size[k - 1];
        let anchored_point = &profile.anchored[k - 1];
        rows.push(vec![
            k.to_string(),
            fnum(per.ratio),
            fnum(anchored_point.value),
            fnum(psi_h.powi(k as i32)),
        ]);
    }

    let config = json!({
        "subcommand": "expansion",
        "family": family_cfg,
        "max_size": args.max_size,
        "mode": args.mode.name(),
        "h": args.h,
        "ball_budget": args.ball_budget,
        "seed": seed,
    });
    let results = json!({
        "profile": to_value(&profile),
        "h": args.h,
        "psi_h": psi_h,
    });
    Ok(Artifact {
        config,
        results,
        table: Table {
            header: &["k", "f_k", "iota_n", "bound_psi_h_pow_n"],
            rows,
            scalars: Some(json!({ "psi_h": psi_h })),
        },
    })
}

// ---------------------------------------------------------------------------
// animals
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct AnimalsArgs {
    #[command(flatten)]
    pub family: FamilyOpts,

    /// Largest boundary size counted.
    #[arg(long, default_value_t = 10)]
    pub max_boundary: u64,

    /// Cap on set sizes during enumeration. Counts whose boundary never
    /// occurs at the cap are exact for every larger region.
    #[arg(long)]
    pub size_cap: Option<usize>,

    /// Boundary flavor indexed by the counts.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Edge)]
    pub mode: BoundaryArg,

    /// Check ln(count) <= n * ln(Psi(h)) for this h and report the verdict.
    #[arg(long, value_name = "H")]
    pub check_psi: Option<f64>,

    /// Vertex budget when materializing the enumeration region.
    #[arg(long, default_value_t = 1_000_000)]
    pub ball_budget: usize,
}

pub fn animals(args: &AnimalsArgs, seed: u64) -> Result<Artifact, CliError> {
    if args.max_boundary == 0 {
        return Err(CliError::Usage("--max-boundary must be at least 1".into()));
    }
    let size_cap = args.size_cap.unwrap_or(args.max_boundary as usize);
    if size_cap == 0 {
        return Err(CliError::Usage("--size-cap must be at least 1".into()));
    }
    let h = args.check_psi.unwrap_or(1.0);
    check_h(h, "--check-psi")?;

    let (oracle, family_cfg) = args.family.oracle(size_cap as u32 + 1)?;
    let mode = args.mode.to_core();
    let counts = animal_counts(&oracle, args.max_boundary, size_cap, mode, args.ball_budget)?;
    // Companion per-size profile so the artifact carries both indexings
    // (counts by boundary size, minima by set size).
    let profile = expansion_profile(&oracle, size_cap, mode, args.ball_budget)?;

    let psi_h = formulas::psi(h);
    let ln_psi = psi_h.ln();
    let mut bound_holds_all = true;
    let mut count_rows = Vec::new();
    let mut rows = Vec::new();
    for n in 1..=args.max_boundary {
        let count = counts.count(n);
        let holds = count == 0 || (count as f64).ln() <= n as f64 * ln_psi + 1e-12;
        bound_holds_all &= holds;
        count_rows.push(json!({
            "n": n,
            "count": count,
            "exact": counts.is_exact(n),
            "bound_psi_h_pow_n": psi_h.powi(n as i32),
            "bound_holds": holds,
        }));
        let iota = if n as usize <= size_cap {
            fnum(profile.anchored[n as usize - 1].value)
        } else {
            String::new()
        };
        rows.push(vec![n.to_string(), count.to_string(), iota, fnum(psi_h.powi(n as i32))]);
    }

    let config = json!({
        "subcommand": "animals",
        "family": family_cfg,
        "max_boundary": args.max_boundary,
        "size_cap": size_cap,
        "mode": args.mode.name(),
        "check_psi": args.check_psi,
        "ball_budget": args.ball_budget,
        "seed": seed,
    });
    let results = json!({
        "counts": count_rows,
        "saturated": counts.saturated.iter().copied().collect::<Vec<u64>>(),
        "profile": to_value(&profile),
        "h": h,
        "psi_h": psi_h,
        "bound_holds_all": bound_holds_all,
    });
    Ok(Artifact {
        config,
        results,
        table: Table {
            header: &["n", "count", "iota_n", "bound_psi_h_pow_n"],
            rows,
            scalars: Some(json!({ "psi_h": psi_h, "bound_holds_all": bound_holds_all })),
        },
    })
}

// ---------------------------------------------------------------------------
// percolate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    /// Fraction of clusters reaching the vertex budget, per p.
    Survival,
    /// Histogram of finite-cluster closed-boundary sizes (bond only).
    Boundary,
}

#[derive(Debug, clap::Args)]
pub struct PercolateArgs {
    #[command(flatten)]
    pub family: FamilyOpts,

    /// Retention probabilities, comma separated.
    #[arg(long, default_value = "0.5")]
    pub p: String,

    /// Percolation flavor.
    #[arg(long, value_enum, default_value_t = ModeArg::Bond)]
    pub mode: ModeArg,

    /// Statistic to estimate.
    #[arg(long, value_enum, default_value_t = StatArg::Survival)]
    pub stat: StatArg,

    /// Independent exploration trials per point.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,

    /// Cluster vertex budget; reaching it counts as survival.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
}

pub fn percolate(args: &PercolateArgs, seed: u64) -> Result<Artifact, CliError> {
    let ps = parse_f64_list(&args.p, "--p")?;
    let (oracle, family_cfg) = args.family.oracle(16)?;

    let config = json!({
        "subcommand": "percolate",
        "family": family_cfg,
        "p": ps,
        "mode": args.mode.name(),
        "stat": match args.stat { StatArg::Survival => "survival", StatArg::Boundary => "boundary" },
        "trials": args.trials,
        "budget": args.budget,
        "seed": seed,
    });

    match args.stat {
        StatArg::Survival => {
            let mut points = Vec::new();
            let mut rows = Vec::new();
            if args.trials > 0 {
                for &p in &ps {
                    let est = survival_fraction(
                        &oracle,
                        p,
                        args.mode.to_core(),
                        args.trials,
                        args.budget,
                        seed,
                    )?;
                    rows.push(vec![
                        fnum(est.p),
                        est.survived.to_string(),
                        est.trials.to_string(),
                        fnum(est.fraction),
                    ]);
                    points.push(to_value(&est));
                }
            }
            Ok(Artifact {
                config,
                results: json!({ "stat": "survival", "points": points }),
                table: Table {
                    header: &["p", "survived", "trials", "fraction"],
                    rows,
                    scalars: None,
                },
            })
        }
        StatArg::Boundary => {
            if args.mode == ModeArg::Site {
                return Err(CliError::Usage(
                    "--stat boundary histograms the bond exploration; site mode is not supported"
                        .into(),
                ));
            }
            if ps.len() != 1 {
                return Err(CliError::Usage("--stat boundary takes exactly one --p value".into()));
            }
            let p = ps[0];
            let mut rows = Vec::new();
            let (histogram, scalars) = if args.trials > 0 {
                let hist = boundary_tail_histogram(&oracle, p, args.trials, args.budget, seed)?;
                let points: Vec<Value> = hist
                    .counts
                    .iter()
                    .map(|(&n, &count)| {
                        rows.push(vec![
                            n.to_string(),
                            count.to_string(),
                            fnum(count as f64 / hist.trials as f64),
                        ]);
                        json!({ "boundary": n, "count": count })
                    })
                    .collect();
                let scalars = json!({
                    "finite_trials": hist.finite_trials,
                    "budget_hits": hist.budget_hits,
                });
                (points, scalars)
            } else {
                (Vec::new(), json!({ "finite_trials": 0, "budget_hits": 0 }))
            };
            let mut results = json!({ "stat": "boundary", "histogram": histogram });
            if let (Value::Object(res), Value::Object(extra)) = (&mut results, scalars.clone()) {
                res.extend(extra);
            }
            Ok(Artifact {
                config,
                results,
                table: Table {
                    header: &["boundary", "count", "frequency"],
                    rows,
                    scalars: Some(scalars),
                },
            })
        }
    }
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkOp {
    /// Distance-over-time bracket at geometric checkpoints.
    Speed,
    /// Marker exit-before-return odds over a distance ladder.
    Exit,
    /// Simple-walk return-probability curve.
    Return,
}

#[derive(Debug, clap::Args)]
pub struct WalkArgs {
    /// Walks run on lamplighter graphs; only "lamplighter" is accepted.
    #[arg(long, default_value = "lamplighter")]
    pub family: String,

    /// Marker lattice dimension.
    #[arg(long, default_value_t = 1)]
    pub d: u8,

    /// Lamp factor: "z2", "cyclic:N", or a multiplication-table file path.
    #[arg(long = "F", value_name = "GROUP", default_value = "z2")]
    pub lamp: String,

    /// Bond retention probability for the delayed walk; omit to run the
    /// simple (undelayed) walk on the full graph.
    #[arg(long)]
    pub p: Option<f64>,

    /// Environment flavor. The delayed walk is defined over bond
    /// environments; site is rejected.
    #[arg(long, value_enum, default_value_t = ModeArg::Bond)]
    pub mode: ModeArg,

    /// Steps per trajectory.
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,

    /// Independent trajectories.
    #[arg(long, default_value_t = 10)]
    pub trials: u64,

    /// Checkpoint schedule; only "geometric" is accepted.
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,

    /// Statistic to estimate.
    #[arg(long, value_enum, default_value_t = WalkOp::Speed)]
    pub op: WalkOp,

    /// Marker distances for --op exit, comma separated.
    #[arg(long, default_value = "5,10,20,40")]
    pub distances: String,

    /// Step cap per --op exit trial before it is recorded undecided.
    #[arg(long, default_value_t = 10_000_000)]
    pub step_cap: u64,

    /// Largest time on the --op return curve.
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
}

pub fn walk(args: &WalkArgs, seed: u64) -> Result<Artifact, CliError> {
    if args.family != "lamplighter" {
        return Err(CliError::Usage(format!(
            "walks run on lamplighter graphs; --family {} is not supported",
            args.family
        )));
    }
    if args.checkpoints != "geometric" {
        return Err(CliError::Usage(format!(
            "only the geometric checkpoint schedule is supported, got '{}'",
            args.checkpoints
        )));
    }
    if args.mode == ModeArg::Site {
        return Err(CliError::Usage(
            "the delayed walk is defined over bond environments; --mode site is not supported"
                .into(),
        ));
    }
    if let Some(p) = args.p {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CliError::Usage(format!("--p must lie in (0, 1], got {p}")));
        }
    }

    let group = lamp_group(&args.lamp)?;
    let lamp_order = group.order();
    let oracle = GraphOracle::lamplighter(GraphOracle::lattice(args.d)?, group);

    let op_name = match args.op {
        WalkOp::Speed => "speed",
        WalkOp::Exit => "exit",
        WalkOp::Return => "return",
    };
    let distances = parse_u32_list(&args.distances, "--distances")?;
    let config = json!({
        "subcommand": "walk",
        "family": { "name": "lamplighter", "d": args.d, "F": args.lamp, "lamp_order": lamp_order },
        "p": args.p,
        "mode": args.mode.name(),
        "steps": args.steps,
        "trials": args.trials,
        "checkpoints": "geometric",
        "op": op_name,
        "distances": distances,
        "step_cap": args.step_cap,
        "n_max": args.n_max,
        "seed": seed,
    });

    match args.op {
        WalkOp::Speed => {
            if args.steps == 0 {
                return Err(CliError::Usage("--steps must be at least 1".into()));
            }
            let (checkpoint_rows, rows, resampled) = if args.trials == 0 {
                (Vec::new(), Vec::new(), 0)
            } else {
                let est = speed_estimate(&oracle, args.p, args.steps, args.trials, seed)?;
                let mut checkpoint_rows = Vec::with_capacity(est.points.len());
                let mut rows = Vec::with_capacity(est.points.len());
                for point in &est.points {
                    let mean_exact = point.exact_over_n.map(|m| m.mean);
                    let ci = point
                        .exact_over_n
                        .map(|m| m.half_width)
                        .unwrap_or(point.upper_over_n.half_width);
                    checkpoint_rows.push(json!({
                        "n": point.n,
                        "mean_lower": point.lower_over_n.mean,
                        "mean_upper": point.upper_over_n.mean,
                        "mean_exact": mean_exact,
                        "ci": ci,
                        "range_mean": point.range_mean,
                        "lamps_mean": point.lamps_mean,
                        "mean_regen": point.regen_over_n.mean,
                    }));
                    rows.push(vec![
                        point.n.to_string(),
                        fnum(point.lower_over_n.mean),
                        fnum(point.upper_over_n.mean),
                        onum(mean_exact),
                        fnum(ci),
                        fnum(point.range_mean),
                        fnum(point.lamps_mean),
                        fnum(point.regen_over_n.mean),
                    ]);
                }
                (checkpoint_rows, rows, est.resampled)
            };
            Ok(Artifact {
                config,
                results: json!({
                    "checkpoints": checkpoint_rows,
                    "resampled_trials": resampled,
                }),
                table: Table {
                    header: &[
                        "n",
                        "mean_lower",
                        "mean_upper",
                        "mean_exact",
                        "ci",
                        "range_mean",
                        "lamps_mean",
                        "mean_regen",
                    ],
                    rows,
                    scalars: Some(json!({ "resampled_trials": resampled })),
                },
            })
        }
        WalkOp::Exit => {
            let Some(p) = args.p else {
                return Err(CliError::Usage("--op exit needs --p (a bond environment)".into()));
            };
            let mut ladder = Vec::new();
            let mut rows = Vec::new();
            if args.trials > 0 {
                for &distance in &distances {
                    if distance == 0 {
                        return Err(CliError::Usage("--distances entries must be >= 1".into()));
                    }
                    let est =
                        exit_before_return(&oracle, p, distance, args.trials, args.step_cap, seed)?;
                    rows.push(vec![
                        est.distance.to_string(),
                        est.exits.to_string(),
                        est.returns.to_string(),
                        est.undecided.to_string(),
                        est.resampled.to_string(),
                        fnum(est.estimate),
                    ]);
                    ladder.push(to_value(&est));
                }
            }
            Ok(Artifact {
                config,
                results: json!({ "step_cap": args.step_cap, "ladder": ladder }),
                table: Table {
                    header: &["distance", "exits", "returns", "undecided", "resampled", "estimate"],
                    rows,
                    scalars: None,
                },
            })
        }
        WalkOp::Return => {
            if args.p.is_some() {
                return Err(CliError::Usage(
                    "--op return runs the simple walk on the full graph; drop --p".into(),
                ));
            }
            if args.trials == 0 {
                return Ok(Artifact {
                    config,
                    results: json!({ "points": [] }),
                    table: Table {
                        header: &["n", "returns", "frequency"],
                        rows: Vec::new(),
                        scalars: None,
                    },
                });
            }
            let curve = return_probability(&oracle, args.n_max, args.trials, seed)?;
            let rows = curve
                .points
                .iter()
                .map(|pt| {
                    vec![pt.n.to_string(), pt.returns.to_string(), fnum(pt.frequency)]
                })
                .collect();
            let scalars = json!({ "decay_coefficient": curve.decay_coefficient });
            Ok(Artifact {
                config,
                results: to_value(&curve),
                table: Table {
                    header: &["n", "returns", "frequency"],
                    rows,
                    scalars: Some(scalars),
                },
            })
        }
    }
}

// ---------------------------------------------------------------------------
// gw
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct GwArgs {
    /// Offspring probabilities "p0,p1,p2,...".
    #[arg(long)]
    pub probs: String,

    /// Sampled trees per estimate.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    /// Vertex budget per sampled tree.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,

    /// Largest size reported individually in the conditioned size tail.
    #[arg(long, default_value_t = 50)]
    pub tail_cap: usize,
}

pub fn gw(args: &GwArgs, seed: u64) -> Result<Artifact, CliError> {
    let probs = parse_f64_list(&args.probs, "--probs")?;
    let dist = OffspringDistribution::new(probs.clone())?;
    let decomp = backbone_decompose(&dist)?;

    // Disjoint seed streams for the two ensembles.
    let extinction_master = trial_seed(seed, 0);
    let bush_master = trial_seed(seed, 1);

    let mut extinction_frequency = None;
    let mut size_counts: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
    let mut over_cap = 0u64;
    let mut truncated_trees = 0u64;
    if args.trials > 0 {
        let extinct: u64 = (0..args.trials)
            .into_par_iter()
            .map(|t| u64::from(sample_tree(&dist, trial_seed(extinction_master, t), args.budget).is_extinct()))
            .collect::<Vec<u64>>()
            .into_iter()
            .sum();
        extinction_frequency = Some(extinct as f64 / args.trials as f64);

        // Size tail of trees conditioned on extinction, sampled from the
        // conditioned law directly.
        let sizes: Vec<(usize, bool)> = (0..args.trials)
            .into_par_iter()
            .map(|t| {
                let tree = sample_tree(&decomp.bush, trial_seed(bush_master, t), args.budget);
                (tree.size(), tree.truncated)
            })
            .collect();
        for (size, truncated) in sizes {
            if truncated {
                truncated_trees += 1;
            }
            if size <= args.tail_cap {
                *size_counts.entry(size).or_insert(0) += 1;
            } else {
                over_cap += 1;
            }
        }
    }

    let mut rows = Vec::new();
    let size_tail: Vec<Value> = size_counts
        .iter()
        .map(|(&size, &count)| {
            let frequency = count as f64 / args.trials as f64;
            rows.push(vec![size.to_string(), count.to_string(), fnum(frequency)]);
            json!({ "size": size, "count": count, "frequency": frequency })
        })
        .collect();

    let config = json!({
        "subcommand": "gw",
        "probs": probs,
        "trials": args.trials,
        "budget": args.budget,
        "tail_cap": args.tail_cap,
        "seed": seed,
    });
    let results = json!({
        "q": decomp.q,
        "open_prob": decomp.open_prob,
        "backbone_law": decomp.backbone,
        "bush_law": decomp.bush.probs(),
        "extinction_frequency": extinction_frequency,
        "size_tail": size_tail,
        "size_tail_over_cap": over_cap,
        "truncated_trees": truncated_trees,
    });
    let scalars = json!({
        "q": decomp.q,
        "open_prob": decomp.open_prob,
        "extinction_frequency": extinction_frequency,
        "size_tail_over_cap": over_cap,
    });
    Ok(Artifact {
        config,
        results,
        table: Table { header: &["size", "count", "frequency"], rows, scalars: Some(scalars) },
    })
}

// ---------------------------------------------------------------------------
// stretch
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Constant,
    Geometric,
    Power,
}

#[derive(Debug, clap::Args)]
pub struct StretchArgs {
    /// Base family to stretch: binary-rooted | tree.
    #[arg(long, default_value = "binary-rooted")]
    pub family: String,

    /// Branching factor for --family tree.
    #[arg(long)]
    pub b: Option<u8>,

    /// Depth of the explicit tree for --family binary-rooted
    /// (default: deep enough for --max-size).
    #[arg(long)]
    pub depth: Option<u32>,

    /// Edge-length law.
    #[arg(long, value_enum)]
    pub law: LawArg,

    /// Length for --law constant.
    #[arg(long, default_value_t = 2)]
    pub length: u32,

    /// Success probability for --law geometric.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,

    /// Exponent for --law power.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,

    /// Largest length for --law power.
    #[arg(long, default_value_t = 64)]
    pub cap: u32,

    /// Largest set size enumerated on each stretched graph.
    #[arg(long, default_value_t = 10)]
    pub max_size: usize,

    /// Boundary flavor.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Edge)]
    pub mode: BoundaryArg,

    /// Independent stretch environments averaged over.
    #[arg(long, default_value_t = 10)]
    pub stretch_seeds: u64,

    /// Vertex budget when materializing each enumeration region.
    #[arg(long, default_value_t = 1_000_000)]
    pub ball_budget: usize,
}

pub fn stretch(args: &StretchArgs, seed: u64) -> Result<Artifact, CliError> {
    if args.max_size == 0 {
        return Err(CliError::Usage("--max-size must be at least 1".into()));
    }
    let descriptor = match args.law {
        LawArg::Constant => StretchDescriptor::Constant { length: args.length },
        LawArg::Geometric => StretchDescriptor::Geometric { q: args.q },
        LawArg::Power => StretchDescriptor::TruncatedPowerLaw { beta: args.beta, cap: args.cap },
    };
    let depth = args.depth.unwrap_or(args.max_size as u32 + 1);
    let make_base = || -> Result<(GraphOracle, Value), CliError> {
        match args.family.as_str() {
            "tree" => {
                let b = args.b.unwrap_or(2);
                Ok((GraphOracle::regular_tree(b)?, json!({ "name": "tree", "b": b })))
            }
            "binary-rooted" => Ok((
                GraphOracle::explicit(ExplicitGraph::full_tree(2, depth)),
                json!({ "name": "binary-rooted", "depth": depth }),
            )),
            other => Err(CliError::Usage(format!(
                "unknown stretch base '{other}' (expected binary-rooted or tree)"
            ))),
        }
    };
    let (_, family_cfg) = make_base()?;

    let profiles: Vec<anchored::ExpansionProfile> = (0..args.stretch_seeds)
        .into_par_iter()
        .map(|s| -> Result<anchored::ExpansionProfile, CliError> {
            let (base, _) = make_base()?;
            let oracle = GraphOracle::stretch(base, descriptor.clone(), trial_seed(seed, s))?;
            Ok(expansion_profile(&oracle, args.max_size, args.mode.to_core(), args.ball_budget)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut rows = Vec::new();
    let mut profile_rows = Vec::new();
    if !profiles.is_empty() {
        let seeds = profiles.len() as f64;
        for k in 1..=args.max_size {
            let f_mean: f64 =
                profiles.iter().map(|p| p.per_size[k - 1].ratio).sum::<f64>() / seeds;
            let iota_mean: f64 =
                profiles.iter().map(|p| p.anchored[k - 1].value).sum::<f64>() / seeds;
            profile_rows.push(json!({ "n": k, "f_mean": f_mean, "iota_mean": iota_mean }));
            rows.push(vec![k.to_string(), fnum(f_mean), fnum(iota_mean)]);
        }
    }

    let config = json!({
        "subcommand": "stretch",
        "family": family_cfg,
        "law": to_value(&descriptor),
        "max_size": args.max_size,
        "mode": args.mode.name(),
        "stretch_seeds": args.stretch_seeds,
        "ball_budget": args.ball_budget,
        "seed": seed,
    });
    let results = json!({
        "stretch_seeds": args.stretch_seeds,
        "profile": profile_rows,
    });
    Ok(Artifact {
        config,
        results,
        table: Table { header: &["n", "f_mean", "iota_mean"], rows, scalars: None },
    })
}

// ---------------------------------------------------------------------------
// dist
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct DistArgs {
    /// Marker lattice dimension.
    #[arg(long, default_value_t = 1)]
    pub d: u8,

    /// Lamp factor: "z2", "cyclic:N", or a multiplication-table file path.
    #[arg(long = "F", value_name = "GROUP", default_value = "z2")]
    pub lamp: String,

    /// Ball radius enumerated around the identity state.
    #[arg(long, default_value_t = 6)]
    pub radius: u32,

    /// Vertex budget for the ball.
    #[arg(long, default_value_t = 500_000)]
    pub budget: usize,
}

pub fn dist(args: &DistArgs, seed: u64) -> Result<Artifact, CliError> {
    let group = lamp_group(&args.lamp)?;
    let lamp_order = group.order();
    let oracle = GraphOracle::lamplighter(GraphOracle::lattice(args.d)?, group);
    let ball = oracle.ball(&oracle.basepoint(), args.radius, args.budget)?;

    let mut rows = Vec::with_capacity(ball.len());
    let mut row_values = Vec::with_capacity(ball.len());
    let mut bounds_hold = true;
    let mut exact_matches_bfs = true;
    for id in 0..ball.len() as u32 {
        let Vertex::Lamp(state) = ball.vertex(id) else {
            return Err(CliError::Run("ball contains a non-lamplighter vertex".into()));
        };
        let bfs = u64::from(ball.dist(id));
        let (lower, upper) = lamplighter_distance_bounds(&oracle, state)?;
        let exact = if args.d == 1 {
            let e = lamplighter_distance_d1(&oracle, state)?;
            bounds_hold &= lower <= e && e <= upper;
            exact_matches_bfs &= e == bfs;
            Some(e)
        } else {
            bounds_hold &= lower <= bfs && bfs <= upper;
            None
        };
        rows.push(vec![
            ball.key(id).to_hex(),
            bfs.to_string(),
            lower.to_string(),
            exact.map(|e| e.to_string()).unwrap_or_default(),
            upper.to_string(),
        ]);
        row_values.push(json!({
            "key": ball.key(id).to_hex(),
            "bfs": bfs,
            "lower": lower,
            "exact": exact,
            "upper": upper,
        }));
    }

    let config = json!({
        "subcommand": "dist",
        "family": { "name": "lamplighter", "d": args.d, "F": args.lamp, "lamp_order": lamp_order },
        "radius": args.radius,
        "budget": args.budget,
        "seed": seed,
    });
    let exact_flag = if args.d == 1 { Some(exact_matches_bfs) } else { None };
    let results = json!({
        "d": args.d,
        "radius": args.radius,
        "vertices": ball.len(),
        "bounds_hold": bounds_hold,
        "exact_matches_bfs": exact_flag,
        "rows": row_values,
    });
    let scalars = json!({
        "vertices": ball.len(),
        "bounds_hold": bounds_hold,
        "exact_matches_bfs": exact_flag,
    });
    Ok(Artifact {
        config,
        results,
        table: Table {
            header: &["key", "bfs", "lower", "exact", "upper"],
            rows,
            scalars: Some(scalars),
        },
    })
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ThresholdsArgs {
    /// Expansion constants h, comma separated.
    #[arg(long, default_value = "1.0")]
    pub h: String,
}

pub fn thresholds(args: &ThresholdsArgs, seed: u64) -> Result<Artifact, CliError> {
    let hs = parse_f64_list(&args.h, "--h")?;
    for &h in &hs {
        check_h(h, "--h")?;
    }
    let mut rows = Vec::with_capacity(hs.len());
    let row_values: Vec<Value> = hs
        .iter()
        .map(|&h| {
            let t = formulas::thresholds(h);
            let psi_h = formulas::psi(h);
            rows.push(vec![
                fnum(h),
                fnum(psi_h),
                fnum(t.pc_bound),
                fnum(t.counting_bound),
                fnum(t.exploration_bound),
            ]);
            json!({
                "h": h,
                "psi": psi_h,
                "pc_bound": t.pc_bound,
                "counting_bound": t.counting_bound,
                "exploration_bound": t.exploration_bound,
            })
        })
        .collect();

    let config = json!({ "subcommand": "thresholds", "h": hs, "seed": seed });
    Ok(Artifact {
        config,
        results: json!({ "rows": row_values }),
        table: Table {
            header: &["h", "psi", "pc_bound", "counting_bound", "exploration_bound"],
            rows,
            scalars: None,
        },
    })
}
