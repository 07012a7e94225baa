//! Simple and delayed random walks on lamplighter graphs over `Z^d`, their
//! word-metric observables, and the ensemble statistics built on them:
//! speed brackets, marker range, exit-versus-return odds, lamp regeneration
//! counts, and return-probability decay.
//!
//! The delayed walk lives in a bond environment: at each step the walker
//! picks uniformly among its current state and all ambient neighbors, and
//! crosses to a chosen neighbor only when the connecting edge is open.
//! Ensembles resample environments whose start lies in a finite or
//! closed-out cluster (the resample count is reported), trials derive
//! per-trial seeds from one master seed, and every reduction is performed
//! in trial-index order, so results are independent of worker count.

mod engine;
mod metric;

pub use metric::{lamplighter_distance_bounds, lamplighter_distance_d1};

use crate::graph::{GraphError, GraphOracle, LampState, Vertex, VertexKey};
use crate::percolation::{explore_cluster, run_trials, PercolationConfig, PercolationMode};
use crate::prf::{prf64, trial_seed, Domain};
use crate::stats::{fit_line, mean_ci, LineFit, MeanCi};
use engine::LampWalker;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Cluster-size budget for the start-viability check: a start whose cluster
/// is fully explored within this many vertices counts as finite (closed
/// out) and is rejected — ensemble drivers resample the environment.
pub const START_CLUSTER_BUDGET: usize = 2000;

/// Upper limit on environment resamples per trial before giving up.
pub const MAX_RESAMPLE_ATTEMPTS: u32 = 1000;

#[derive(Debug, thiserror::Error)]
pub enum WalkError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("walks need a lamplighter graph over a lattice base; got family {family}")]
    UnsupportedFamily { family: &'static str },
    #[error("the delayed walk is defined over bond environments; site mode is not supported")]
    SiteMode,
    #[error("start vertex lies in a finite cluster of {cluster_vertices} vertices")]
    NotInCluster { cluster_vertices: u64 },
    #[error("no start inside a large open cluster after {attempts} environment resamples")]
    ResamplingExhausted { attempts: u32 },
    #[error("isolated vertex has no neighbors to step to")]
    IsolatedVertex,
    #[error("exact lamplighter distance needs a one-dimensional base; got Z^{d}")]
    ExactMetricUnavailable { d: u8 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("an open edge leaves the supplied vertex set; it is not a complete cluster")]
    ClusterNotClosed,
}

/// One step of the simple random walk: a uniformly chosen neighbor.
pub fn srw_step(
    oracle: &GraphOracle,
    rng: &mut impl Rng,
    v: &Vertex,
) -> Result<Vertex, WalkError> {
    let mut nbrs = oracle.neighbors(v)?;
    if nbrs.is_empty() {
        return Err(WalkError::IsolatedVertex);
    }
    let i = rng.random_range(0..nbrs.len());
    Ok(nbrs.swap_remove(i))
}

/// One step of the delayed walk: a uniform choice over the current vertex
/// and its ambient neighbors (`degree + 1` outcomes, choice 0 = stay); a
/// chosen neighbor is entered only if the connecting edge is open in `cfg`,
/// otherwise the walker stays put.
pub fn delayed_step(
    oracle: &GraphOracle,
    cfg: &PercolationConfig,
    rng: &mut impl Rng,
    v: &Vertex,
) -> Result<Vertex, WalkError> {
    ensure_bond(cfg)?;
    let mut nbrs = oracle.neighbors(v)?;
    let choice = rng.random_range(0..=nbrs.len());
    if choice == 0 {
        return Ok(v.clone());
    }
    let w = nbrs.swap_remove(choice - 1);
    if cfg.edge_open(v.fingerprint(), w.fingerprint()) {
        Ok(w)
    } else {
        Ok(v.clone())
    }
}

fn ensure_bond(cfg: &PercolationConfig) -> Result<(), WalkError> {
    if cfg.mode != PercolationMode::Bond {
        return Err(WalkError::SiteMode);
    }
    Ok(())
}

/// Compact per-step record of a walk trace: enough to recover the marker
/// trajectory (by fingerprint) and which steps executed a lamp switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    /// Marker fingerprint after the step.
    pub marker_fp: u64,
    /// The step executed a lamp-generator move (which always changes the
    /// lamp configuration).
    pub lamp_move: bool,
    /// The step executed a marker move.
    pub marker_moved: bool,
}

/// Observables of one walk at one checkpoint time `n`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WalkCheckpoint {
    pub n: u64,
    /// Number of distinct marker positions visited in `[0, n]`.
    pub marker_range: u64,
    /// Number of lit lamps (sites holding a non-identity element).
    pub lamp_count: u64,
    /// Total lamp-group word length over the lit sites.
    pub lamp_weight: u64,
    /// Lattice distance of the marker from the origin.
    pub marker_l1: u64,
    /// Lower bound on the word distance to the basepoint:
    /// `marker_l1 + lamp_weight`.
    pub distance_lower: u64,
    /// Upper bound on the word distance: a tour of the (connected) visited
    /// marker set, `marker_l1 + 2 * (marker_range - 1) + lamp_weight`.
    pub distance_upper: u64,
    /// Exact word distance, available on one-dimensional bases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_exact: Option<u64>,
    /// Marker back at its start position.
    pub marker_at_origin: bool,
    /// Full state equals the start state (marker home, all lamps off).
    pub state_is_start: bool,
}

/// Time series of one walk: checkpoint observables plus compact per-step
/// records (16 bytes per step) for trajectory statistics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WalkTrace {
    pub steps: u64,
    /// Environment the walk was delayed in; `None` for the simple walk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub percolation: Option<PercolationConfig>,
    pub checkpoints: Vec<WalkCheckpoint>,
    #[serde(skip_serializing)]
    pub records: Vec<StepRecord>,
    #[serde(skip_serializing)]
    pub final_state: LampState,
    pub final_state_key: VertexKey,
    #[serde(skip_serializing)]
    pub initial_marker_fp: u64,
}

impl WalkTrace {
    /// Number of regeneration steps over the whole trace: steps that switch
    /// a lamp at a site the marker occupies only at times `k-1` and `k`
    /// within the recorded horizon. Each such site keeps a non-identity
    /// lamp forever after, so the count never exceeds the final lamp weight
    /// (and hence never exceeds the exact distance where available).
    pub fn regeneration_count(&self) -> u64 {
        self.regeneration_count_up_to(self.steps)
    }

    /// Regeneration count restricted to steps `1..=horizon`, with site
    /// occupation also read over `[0, horizon]`.
    pub fn regeneration_count_up_to(&self, horizon: u64) -> u64 {
        let h = (horizon.min(self.records.len() as u64)) as usize;
        let mut first: HashMap<u64, usize> = HashMap::new();
        let mut last: HashMap<u64, usize> = HashMap::new();
        first.insert(self.initial_marker_fp, 0);
        last.insert(self.initial_marker_fp, 0);
        for (k, record) in self.records[..h].iter().enumerate() {
            first.entry(record.marker_fp).or_insert(k + 1);
            last.insert(record.marker_fp, k + 1);
        }
        let mut count = 0u64;
        for (k, record) in self.records[..h].iter().enumerate() {
            let k = k + 1;
            if record.lamp_move
                && first.get(&record.marker_fp) == Some(&(k - 1))
                && last.get(&record.marker_fp) == Some(&k)
            {
                count += 1;
            }
        }
        count
    }
}

/// Number of regeneration steps of a trace (see
/// [`WalkTrace::regeneration_count`]).
pub fn regeneration_count(trace: &WalkTrace) -> u64 {
    trace.regeneration_count()
}

/// Geometric checkpoint ladder `{10^2, 10^2.5, 10^3, ...}` capped at and
/// always ending with `steps` itself, so trend assertions compare the same
/// time points across runs.
pub fn geometric_checkpoints(steps: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 4u32;
    loop {
        let v = 10f64.powf(f64::from(k) / 2.0).round() as u64;
        if v >= steps {
            break;
        }
        out.push(v);
        k += 1;
    }
    out.push(steps);
    out
}

fn snapshot(walker: &LampWalker<'_>, n: u64) -> WalkCheckpoint {
    let l1 = walker.marker_l1();
    let range = walker.range_size();
    let weight = walker.lamp_weight();
    WalkCheckpoint {
        n,
        marker_range: range,
        lamp_count: walker.lamp_count(),
        lamp_weight: weight,
        marker_l1: l1,
        distance_lower: l1 + weight,
        distance_upper: l1 + 2 * (range - 1) + weight,
        distance_exact: walker.exact_distance_z1(),
        marker_at_origin: walker.marker_at_origin(),
        state_is_start: walker.is_initial_state(),
    }
}

/// Runs one walk from the basepoint of a lamplighter graph: the simple
/// random walk when `percolation` is `None`, the delayed walk in the given
/// bond environment otherwise.
///
/// With an environment, the start must lie in a cluster larger than
/// [`START_CLUSTER_BUDGET`]; a start in a smaller (hence finite) cluster is
/// rejected with [`WalkError::NotInCluster`] so callers can decide their
/// resampling policy. Checkpoint times beyond `steps` are ignored.
pub fn simulate_walk(
    oracle: &GraphOracle,
    percolation: Option<&PercolationConfig>,
    steps: u64,
    checkpoints: &[u64],
    seed: u64,
) -> Result<WalkTrace, WalkError> {
    if let Some(cfg) = percolation {
        ensure_bond(cfg)?;
        if !start_cluster_viable(oracle, cfg)? {
            let report = explore_cluster(oracle, cfg, &oracle.basepoint(), START_CLUSTER_BUDGET)?;
            return Err(WalkError::NotInCluster { cluster_vertices: report.vertex_count() });
        }
    }
    run_walk(oracle, percolation, steps, checkpoints, seed)
}

/// Walk loop without the start-viability check (ensemble drivers run the
/// check themselves while resampling environments).
fn run_walk(
    oracle: &GraphOracle,
    percolation: Option<&PercolationConfig>,
    steps: u64,
    checkpoints: &[u64],
    seed: u64,
) -> Result<WalkTrace, WalkError> {
    let mut walker = LampWalker::new(oracle)?;
    let n_gens = walker.generator_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cps: Vec<u64> = checkpoints.iter().copied().filter(|&n| n <= steps).collect();
    cps.sort_unstable();
    cps.dedup();

    let initial_marker_fp = walker.marker_fp();
    let mut out = Vec::with_capacity(cps.len());
    let mut next_cp = 0usize;
    if cps.first() == Some(&0) {
        out.push(snapshot(&walker, 0));
        next_cp = 1;
    }
    let mut records = Vec::with_capacity(usize::try_from(steps).unwrap_or(usize::MAX).min(1 << 22));
    for k in 1..=steps {
        let outcome = match percolation {
            Some(cfg) => walker.delayed_step(cfg, &mut rng),
            None => {
                let idx = walker.srw_step(&mut rng);
                engine::StepOutcome { executed: Some(idx), marker_fp: walker.marker_fp() }
            }
        };
        records.push(StepRecord {
            marker_fp: outcome.marker_fp,
            lamp_move: outcome.executed.is_some_and(|i| i < n_gens),
            marker_moved: outcome.executed.is_some_and(|i| i >= n_gens),
        });
        if next_cp < cps.len() && cps[next_cp] == k {
            out.push(snapshot(&walker, k));
            next_cp += 1;
        }
    }

    let final_state = walker.to_state();
    let final_state_key = Vertex::Lamp(Box::new(final_state.clone())).encode();
    Ok(WalkTrace {
        steps,
        percolation: percolation.copied(),
        checkpoints: out,
        records,
        final_state,
        final_state_key,
        initial_marker_fp,
    })
}

/// True when the basepoint's cluster extends past [`START_CLUSTER_BUDGET`]
/// vertices (everything is open at `p = 1`, so the check is skipped).
fn start_cluster_viable(oracle: &GraphOracle, cfg: &PercolationConfig) -> Result<bool, WalkError> {
    if cfg.p >= 1.0 {
        return Ok(true);
    }
    let report = explore_cluster(oracle, cfg, &oracle.basepoint(), START_CLUSTER_BUDGET)?;
    Ok(!report.is_finite())
}

/// Per-trial, per-attempt seed streams derived from one master seed: lane 0
/// feeds the walk's step randomness, lane 1 the percolation environment.
fn stream_seed(master: u64, trial: u64, attempt: u32, lane: u64) -> u64 {
    let base = trial_seed(master, trial);
    prf64(base, Domain::Trial, (u64::from(attempt) << 1) | lane)
}

/// Draws environments for one trial until the basepoint lies in a large
/// open cluster; returns the environment, the walk seed, and the number of
/// discarded environments.
fn viable_environment(
    oracle: &GraphOracle,
    p: f64,
    master: u64,
    trial: u64,
) -> Result<(PercolationConfig, u64, u32), WalkError> {
    for attempt in 0..MAX_RESAMPLE_ATTEMPTS {
        let cfg =
            PercolationConfig::new(p, PercolationMode::Bond, stream_seed(master, trial, attempt, 1))?;
        if start_cluster_viable(oracle, &cfg)? {
            return Ok((cfg, stream_seed(master, trial, attempt, 0), attempt));
        }
    }
    Err(WalkError::ResamplingExhausted { attempts: MAX_RESAMPLE_ATTEMPTS })
}

/// Ensemble statistic of `statistic / n` at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpeedPoint {
    pub n: u64,
    /// Mean and CI of (distance lower bound) / n over trials.
    pub lower_over_n: MeanCi,
    /// Mean and CI of (distance upper bound) / n over trials.
    pub upper_over_n: MeanCi,
    /// Mean and CI of (exact distance) / n, on one-dimensional bases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_over_n: Option<MeanCi>,
    /// Mean and CI of (regeneration count up to n) / n.
    pub regen_over_n: MeanCi,
    /// Mean marker range at `n` over trials.
    pub range_mean: f64,
    /// Mean lit-lamp count at `n` over trials.
    pub lamps_mean: f64,
}

/// Distance-over-time statistics across independent trials.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SpeedEstimate {
    pub steps: u64,
    pub trials: u64,
    /// Bond retention probability; `None` for the simple walk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Environments discarded because the start's cluster was finite.
    pub resampled: u64,
    pub points: Vec<SpeedPoint>,
}

/// Runs `trials` independent walks of `steps` steps at the geometric
/// checkpoint ladder and aggregates `statistic / n` at each checkpoint with
/// normal-approximation confidence intervals. `p = None` runs the simple
/// walk; `p = Some(q)` runs the delayed walk in per-trial Bernoulli(q) bond
/// environments (resampled until the start lies in a large cluster).
pub fn speed_estimate(
    oracle: &GraphOracle,
    p: Option<f64>,
    steps: u64,
    trials: u64,
    seed: u64,
) -> Result<SpeedEstimate, WalkError> {
    if steps == 0 || trials == 0 {
        return Err(WalkError::InvalidParameter(
            "speed estimation needs at least one step and one trial".into(),
        ));
    }
    let cps = geometric_checkpoints(steps);
    let outcomes: Vec<(WalkTrace, u32)> = run_trials(trials, |t| match p {
        None => {
            run_walk(oracle, None, steps, &cps, stream_seed(seed, t, 0, 0)).map(|tr| (tr, 0))
        }
        Some(p) => {
            let (cfg, walk_seed, attempts) = viable_environment(oracle, p, seed, t)?;
            run_walk(oracle, Some(&cfg), steps, &cps, walk_seed).map(|tr| (tr, attempts))
        }
    })?;

    let resampled: u64 = outcomes.iter().map(|(_, a)| u64::from(*a)).sum();
    let traces: Vec<&WalkTrace> = outcomes.iter().map(|(tr, _)| tr).collect();
    let mut points = Vec::with_capacity(cps.len());
    for (ci, &n) in cps.iter().enumerate() {
        let nf = n as f64;
        let collect = |f: &dyn Fn(&WalkCheckpoint) -> f64| -> Vec<f64> {
            traces.iter().map(|tr| f(&tr.checkpoints[ci])).collect()
        };
        let lower = collect(&|cp| cp.distance_lower as f64 / nf);
        let upper = collect(&|cp| cp.distance_upper as f64 / nf);
        let exact = if traces[0].checkpoints[ci].distance_exact.is_some() {
            Some(mean_ci(&collect(&|cp| {
                cp.distance_exact.expect("exactness is uniform across trials") as f64 / nf
            })))
        } else {
            None
        };
        let regen: Vec<f64> = traces
            .iter()
            .map(|tr| tr.regeneration_count_up_to(n) as f64 / nf)
            .collect();
        points.push(SpeedPoint {
            n,
            lower_over_n: mean_ci(&lower),
            upper_over_n: mean_ci(&upper),
            exact_over_n: exact,
            regen_over_n: mean_ci(&regen),
            range_mean: mean_ci(&collect(&|cp| cp.marker_range as f64)).mean,
            lamps_mean: mean_ci(&collect(&|cp| cp.lamp_count as f64)).mean,
        });
    }
    Ok(SpeedEstimate { steps, trials, p, resampled, points })
}

/// Outcome counts for the exit-versus-return experiment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExitEstimate {
    /// Marker distance the walk must reach for an exit.
    pub distance: u32,
    pub trials: u64,
    /// Trials whose marker reached `distance` before revisiting the origin.
    pub exits: u64,
    /// Trials whose marker revisited the origin first.
    pub returns: u64,
    /// Trials undecided within `step_cap` steps.
    pub undecided: u64,
    /// Environments discarded by the start-viability resampling.
    pub resampled: u64,
    pub step_cap: u64,
    /// `exits / trials`.
    pub estimate: f64,
}

/// Estimates the probability that the marker of the delayed walk reaches
/// lattice distance `distance` before returning to the origin.
///
/// Events are read off the marker jump chain: only steps that actually move
/// the marker can trigger an exit or a return, so lamp switches, explicit
/// stays, and closed-edge stalls at the origin do not count as returns.
/// Trials still undecided after `step_cap` steps are reported separately.
pub fn exit_before_return(
    oracle: &GraphOracle,
    p: f64,
    distance: u32,
    trials: u64,
    step_cap: u64,
    seed: u64,
) -> Result<ExitEstimate, WalkError> {
    if distance == 0 {
        return Err(WalkError::InvalidParameter("exit distance must be at least 1".into()));
    }
    if trials == 0 || step_cap == 0 {
        return Err(WalkError::InvalidParameter(
            "exit estimation needs at least one trial and a positive step cap".into(),
        ));
    }

    #[derive(Clone, Copy)]
    enum Outcome {
        Exit,
        Return,
        Undecided,
    }

    let outcomes: Vec<(Outcome, u32)> = run_trials(trials, |t| {
        let (cfg, walk_seed, attempts) = viable_environment(oracle, p, seed, t)?;
        let mut walker = LampWalker::new(oracle)?;
        let n_gens = walker.generator_count();
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        for _ in 0..step_cap {
            let outcome = walker.delayed_step(&cfg, &mut rng);
            if outcome.executed.is_some_and(|i| i >= n_gens) {
                let l1 = walker.marker_l1();
                if l1 >= u64::from(distance) {
                    return Ok((Outcome::Exit, attempts));
                }
                if l1 == 0 {
                    return Ok((Outcome::Return, attempts));
                }
            }
        }
        Ok::<_, WalkError>((Outcome::Undecided, attempts))
    })?;

    let mut exits = 0u64;
    let mut returns = 0u64;
    let mut undecided = 0u64;
    let mut resampled = 0u64;
    for (outcome, attempts) in outcomes {
        resampled += u64::from(attempts);
        match outcome {
            Outcome::Exit => exits += 1,
            Outcome::Return => returns += 1,
            Outcome::Undecided => undecided += 1,
        }
    }
    Ok(ExitEstimate {
        distance,
        trials,
        exits,
        returns,
        undecided,
        resampled,
        step_cap,
        estimate: exits as f64 / trials as f64,
    })
}

/// One point of the empirical return-probability curve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ReturnPoint {
    pub n: u64,
    pub returns: u64,
    pub frequency: f64,
}

/// Empirical return probabilities of the simple random walk at even times,
/// with a least-squares fit of `ln frequency` against `n^(1/3)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ReturnCurve {
    pub n_max: u64,
    pub trials: u64,
    pub points: Vec<ReturnPoint>,
    /// Fit of `ln frequency` vs `n^(1/3)` over positive frequencies at
    /// `n >= 2`; `None` with fewer than three usable points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<LineFit>,
    /// Decay coefficient `C` in `frequency <= exp(-C n^(1/3))` (the negated
    /// fitted slope).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_coefficient: Option<f64>,
}

/// Estimates `P[X_n = start]` of the simple random walk on any family at
/// even times `n <= n_max` from independent trials, and fits the decay of
/// `ln P` against `n^(1/3)`.
pub fn return_probability(
    oracle: &GraphOracle,
    n_max: u64,
    trials: u64,
    seed: u64,
) -> Result<ReturnCurve, WalkError> {
    if trials == 0 {
        return Err(WalkError::InvalidParameter("return estimation needs trials".into()));
    }
    let start = oracle.basepoint();
    let even_points = (n_max / 2) as usize;
    let flags: Vec<Vec<bool>> = run_trials(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, t));
        let mut cur = start.clone();
        let mut hit = vec![false; even_points];
        for k in 1..=n_max {
            cur = srw_step(oracle, &mut rng, &cur)?;
            if k % 2 == 0 {
                hit[(k / 2 - 1) as usize] = cur == start;
            }
        }
        Ok::<_, WalkError>(hit)
    })?;

    let mut points = vec![ReturnPoint { n: 0, returns: trials, frequency: 1.0 }];
    for i in 0..even_points {
        let returns = flags.iter().filter(|f| f[i]).count() as u64;
        points.push(ReturnPoint {
            n: 2 * (i as u64 + 1),
            returns,
            frequency: returns as f64 / trials as f64,
        });
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for pt in points.iter().filter(|pt| pt.n >= 2 && pt.returns > 0) {
        xs.push((pt.n as f64).cbrt());
        ys.push(pt.frequency.ln());
    }
    let fit = fit_line(&xs, &ys);
    let decay_coefficient = fit.map(|f| -f.slope);
    Ok(ReturnCurve { n_max, trials, points, fit, decay_coefficient })
}

/// Transition matrix of the delayed walk restricted to a fully explored
/// cluster, row-major over `vertices` in the given order: each open edge
/// carries probability `1/(degree+1)` and the remaining mass sits on the
/// diagonal. Errors with [`WalkError::ClusterNotClosed`] if an open edge
/// leads outside the set.
pub fn delayed_transition_matrix(
    oracle: &GraphOracle,
    cfg: &PercolationConfig,
    vertices: &[VertexKey],
) -> Result<Vec<f64>, WalkError> {
    ensure_bond(cfg)?;
    let n = vertices.len();
    let index: HashMap<&VertexKey, usize> =
        vertices.iter().enumerate().map(|(i, k)| (k, i)).collect();
    if index.len() != n {
        return Err(WalkError::InvalidParameter("duplicate vertices in cluster list".into()));
    }
    let mut matrix = vec![0.0f64; n * n];
    for (i, key) in vertices.iter().enumerate() {
        let v = key.decode()?;
        let degree = oracle.degree(&v)?;
        let unit = 1.0 / (degree as f64 + 1.0);
        let fv = v.fingerprint();
        let mut open = 0usize;
        for w in oracle.neighbors(&v)? {
            if cfg.edge_open(fv, w.fingerprint()) {
                let j = *index.get(&w.encode()).ok_or(WalkError::ClusterNotClosed)?;
                matrix[i * n + j] += unit;
                open += 1;
            }
        }
        matrix[i * n + i] = 1.0 - open as f64 * unit;
    }
    Ok(matrix)
}
