//! Acceptance suite: thirteen numbered criteria covering exact enumeration,
//! closed-form identities, percolation thresholds and tails, branching
//! process laws, lamplighter metrics, walk-speed trends, stretch
//! comparisons, reversibility, and determinism.
//!
//! Every test prints exactly one line
//!
//! ```text
//! ACCEPTANCE NN <name>: PASS|FAIL (<measured detail>)
//! ```
//!
//! and then asserts the verdict (run with `-- --nocapture` to see the PASS
//! lines). All tolerances are pinned as constants below; every stochastic
//! check runs under the fixed master seed, so a verdict is reproducible
//! bit-for-bit.

use anchored::expansion::{
    animal_counts_finite, enumerate_connected_sets, expansion_profile, BoundaryMode,
    ExpansionProfile,
};
use anchored::formulas::{binomial_tail, psi, rate_function, thresholds};
use anchored::graph::{
    ExplicitGraph, FiniteGraph, FiniteGroupGraph, GraphOracle, StretchDescriptor, Vertex,
};
use anchored::gw::{
    backbone_decompose, extinction_probability, sample_tree, OffspringDistribution,
};
use anchored::percolation::{
    boundary_tail_histogram, explore_cluster, survival_fraction, PercolationConfig,
    PercolationMode,
};
use anchored::prf::trial_seed;
use anchored::stats::{fit_line, mean_ci};
use anchored::walks::{
    delayed_transition_matrix, exit_before_return, lamplighter_distance_bounds,
    lamplighter_distance_d1, speed_estimate,
};
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

/// Master seed for every stochastic criterion.
const SEED: u64 = 11;

/// Absolute tolerance for closed-form identities.
const T_FORMULA: f64 = 1e-12;
/// Log-space slack when comparing exact binomial tails to their envelope.
const T_ENVELOPE_LOG: f64 = 1e-9;

/// Criterion 5: survival grid, trials per point, cluster budget, the level
/// that marks the onset of survival, and the allowed distance between the
/// onset location and 1/2.
const AC5_GRID: [f64; 7] = [0.44, 0.46, 0.48, 0.50, 0.52, 0.54, 0.56];
const AC5_TRIALS: u64 = 10_000;
const AC5_BUDGET: usize = 100_000;
const AC5_ONSET_LEVEL: f64 = 0.05;
const AC5_WINDOW: f64 = 0.02;

/// Criterion 6/7: histogram cells participate in trend checks only when
/// they hold at least this many observations.
const COUNT_FLOOR: u64 = 50;

/// Criterion 7 tolerances.
const AC7_Q_TOL: f64 = 1e-10;
const AC7_LAW_TOL: f64 = 1e-9;
const AC7_EXTINCTION_TOL: f64 = 5e-3;
const AC7_TV_LIMIT: f64 = 0.01;
const AC7_SAMPLES: u64 = 100_000;
const AC7_TREE_BUDGET: usize = 500;

/// Criteria 9/10: walk length, trials, and the exit-before-return ladder.
const WALK_STEPS: u64 = 100_000;
const WALK_TRIALS: u64 = 50;
const EXIT_DISTANCES: [u32; 4] = [5, 10, 20, 40];
const EXIT_TRIALS: u64 = 800;
const EXIT_STEP_CAP: u64 = 1_000_000;

/// Criterion 9: ceiling on exact-distance/n at the final checkpoint.
const AC9_FINAL_LIMIT: f64 = 0.05;

/// Criterion 10: floor on lower-bound-distance/n, floor on every exit
/// estimate, the allowed spread of the exit plateau, and the band for the
/// regeneration-rate stability ratio between the last two checkpoints.
const AC10_SPEED_FLOOR: f64 = 0.01;
const AC10_EXIT_FLOOR: f64 = 0.2;
const AC10_PLATEAU_SPREAD: f64 = 0.15;
const AC10_STABILITY_BAND: (f64, f64) = (0.5, 2.0);

/// Criterion 11: stretch ensemble size, enumerated sizes, monotonicity
/// slack for the averaged per-size profile, and the pinned floor on the
/// final geometric/power expansion ratio. The floor is set from the means
/// of the two stretch laws (lengths average 2 vs about 2.9, so expansion
/// ratios concentrate near their quotient); see notes/decisions for why a
/// larger floor is not attainable at these set sizes.
const AC11_SEEDS: u64 = 100;
const AC11_MAX_SIZE: usize = 14;
const AC11_PROFILE_SLACK: f64 = 1e-3;
const AC11_FINAL_FACTOR: f64 = 1.15;

/// Wall-clock ceilings for the long-running criteria.
const AC1_TIME: Duration = Duration::from_secs(60);
const AC5_TIME: Duration = Duration::from_secs(300);
const AC9_TIME: Duration = Duration::from_secs(600);
const AC10_TIME: Duration = Duration::from_secs(900);

fn report(num: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {num:02} {name}: {verdict} ({detail})");
    assert!(pass, "ACCEPTANCE {num:02} {name}: FAIL ({detail})");
}

fn t2() -> GraphOracle {
    GraphOracle::regular_tree(2).expect("branching factor 2 is valid")
}

fn lamplighter(d: u8) -> GraphOracle {
    GraphOracle::lamplighter(
        GraphOracle::lattice(d).expect("lattice dimension is valid"),
        FiniteGroupGraph::cyclic(2),
    )
}

// ---------------------------------------------------------------------------
// 1. Enumeration matches brute force on every small corpus graph
// ---------------------------------------------------------------------------

type SetMap = BTreeMap<Vec<u32>, (u64, u64)>;

/// Every connected vertex set containing the center, found by filtering all
/// 2^n subsets, with exact edge- and vertex-boundary sizes.
fn brute_force_sets(graph: &FiniteGraph) -> SetMap {
    let n = graph.len();
    assert!(n <= 12, "brute force corpus is capped at 12 vertices");
    let center = graph.center();
    let mut out = SetMap::new();
    for mask in 1u32..(1u32 << n) {
        if mask & (1 << center) == 0 {
            continue;
        }
        let mut seen = 1u32 << center;
        let mut stack = vec![center];
        while let Some(u) = stack.pop() {
            for &v in graph.neighbors(u) {
                let bit = 1u32 << v;
                if mask & bit != 0 && seen & bit == 0 {
                    seen |= bit;
                    stack.push(v);
                }
            }
        }
        if seen != mask {
            continue;
        }
        let mut members = Vec::new();
        let mut edge_boundary = 0u64;
        let mut outside = BTreeSet::new();
        for u in 0..n as u32 {
            if mask & (1 << u) == 0 {
                continue;
            }
            members.push(u);
            for &v in graph.neighbors(u) {
                if mask & (1 << v) == 0 {
                    edge_boundary += 1;
                    outside.insert(v);
                }
            }
        }
        out.insert(members, (edge_boundary, outside.len() as u64));
    }
    out
}

fn enumerated_sets(graph: &FiniteGraph) -> SetMap {
    let mut out = SetMap::new();
    enumerate_connected_sets(graph, graph.len(), |members, ann| {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let previous = out.insert(sorted, (ann.edge_boundary, ann.vertex_boundary));
        assert!(previous.is_none(), "a set was emitted twice");
    })
    .expect("enumeration succeeds on corpus graphs");
    out
}

#[test]
fn criterion_01_enumeration_matches_brute_force() {
    let start = Instant::now();
    let mut corpus: Vec<(String, FiniteGraph)> = Vec::new();
    for n in [1usize, 2, 3, 6, 12] {
        corpus.push((format!("path-{n}"), FiniteGraph::from_explicit(&ExplicitGraph::path(n))));
    }
    for n in [3usize, 4, 6, 12] {
        corpus.push((format!("cycle-{n}"), FiniteGraph::from_explicit(&ExplicitGraph::cycle(n))));
    }
    let tree = t2();
    corpus.push(("tree-ball-2".into(), tree.ball(&tree.basepoint(), 2, 1000).unwrap()));
    corpus.push((
        "binary-rooted-2".into(),
        FiniteGraph::from_explicit(&ExplicitGraph::full_tree(2, 2)),
    ));
    let plane = GraphOracle::lattice(2).unwrap();
    corpus.push(("plane-ball-1".into(), plane.ball(&plane.basepoint(), 1, 1000).unwrap()));
    let mut grid_edges = Vec::new();
    for r in 0..3u32 {
        for c in 0..4u32 {
            let id = r * 4 + c;
            if c < 3 {
                grid_edges.push((id, id + 1));
            }
            if r < 2 {
                grid_edges.push((id, id + 4));
            }
        }
    }
    corpus.push((
        "grid-3x4".into(),
        FiniteGraph::from_explicit(&ExplicitGraph::from_edges(12, &grid_edges, 0).unwrap()),
    ));

    let mut total_sets = 0usize;
    let mut mismatches: Vec<String> = Vec::new();
    for (name, graph) in &corpus {
        let expected = brute_force_sets(graph);
        let actual = enumerated_sets(graph);
        if expected != actual {
            mismatches.push(name.clone());
        }
        total_sets += expected.len();
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < AC1_TIME;
    report(
        1,
        "enumeration matches brute force",
        pass,
        &format!(
            "{} graphs, {} anchored sets, boundaries both flavors; mismatches: {:?}; {:.2?}",
            corpus.len(),
            total_sets,
            mismatches,
            elapsed
        ),
    );
}

// ---------------------------------------------------------------------------
// 2./3. Counts on the rooted binary tree: Catalan identity and psi envelope
// ---------------------------------------------------------------------------

/// Catalan numbers C_0..C_11.
const CATALAN: [u64; 12] = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786];

fn binary_tree_counts() -> anchored::expansion::AnimalCounts {
    let graph = FiniteGraph::from_explicit(&ExplicitGraph::full_tree(2, 12));
    animal_counts_finite(&graph, 12, 12, BoundaryMode::Edge).expect("enumeration fits")
}

#[test]
fn criterion_02_rooted_binary_counts_are_catalan() {
    let counts = binary_tree_counts();
    let mut bad: Vec<String> = Vec::new();
    if counts.count(1) != 0 {
        bad.push(format!("boundary 1 has {} sets", counts.count(1)));
    }
    for n in 2..=12u64 {
        let expect = CATALAN[n as usize - 1];
        if counts.count(n) != expect {
            bad.push(format!("count({n}) = {} != {expect}", counts.count(n)));
        }
        if !counts.is_exact(n) {
            bad.push(format!("count({n}) not exact"));
        }
    }
    let listed: Vec<u64> = (2..=12).map(|n| counts.count(n)).collect();
    report(
        2,
        "rooted binary tree counts are Catalan(n-1)",
        bad.is_empty(),
        &format!("counts for boundaries 2..=12: {listed:?}; issues: {bad:?}"),
    );
}

#[test]
fn criterion_03_counts_within_psi_envelope() {
    let counts = binary_tree_counts();
    let ln_psi = psi(0.9).ln();
    let mut worst_margin = f64::INFINITY;
    let mut bad = Vec::new();
    for n in 3..=12u64 {
        let count = counts.count(n);
        let margin = n as f64 * ln_psi - (count as f64).ln();
        worst_margin = worst_margin.min(margin);
        if margin < -T_FORMULA {
            bad.push(n);
        }
    }
    report(
        3,
        "counts within psi(0.9)^n",
        bad.is_empty(),
        &format!(
            "ln-space margin >= {worst_margin:.4} for boundaries 3..=12; violations: {bad:?}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Closed-form suite and the exact binomial-tail envelope
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_formula_suite() {
    let mut bad: Vec<String> = Vec::new();

    if psi(1.0) != 4.0 {
        bad.push(format!("psi(1) = {:?} != 4 exactly", psi(1.0)));
    }
    let t = thresholds(1.0);
    for (name, got, want) in [
        ("pc_bound", t.pc_bound, 0.5),
        ("counting_bound", t.counting_bound, 0.75),
        ("exploration_bound", t.exploration_bound, 0.5),
    ] {
        if (got - want).abs() > T_FORMULA {
            bad.push(format!("thresholds(1).{name} = {got}"));
        }
    }

    let ps = [0.3, 0.5, 0.7, 0.9];
    for &p in &ps {
        if rate_function(p, p).abs() > T_FORMULA {
            bad.push(format!("I_{p}({p}) = {}", rate_function(p, p)));
        }
        let at_zero = rate_function(p, 0.0);
        if (at_zero - (-(1.0 - p).ln())).abs() > T_FORMULA {
            bad.push(format!("I_{p}(0) = {at_zero}"));
        }
    }

    // Exact lower tails stay under their large-deviation envelope on the
    // whole grid, compared in log space.
    let mut checks = 0u32;
    let mut worst_log_gap = f64::NEG_INFINITY;
    for &p in &ps {
        for j in 0..=9u32 {
            let alpha = 0.1 * j as f64 * p;
            for n in 1..=200u64 {
                let tail = binomial_tail(n, p, alpha);
                let envelope = -(n as f64) * rate_function(p, alpha);
                let gap = tail.ln() - envelope;
                worst_log_gap = worst_log_gap.max(gap);
                if gap > T_ENVELOPE_LOG {
                    bad.push(format!("tail(n={n}, p={p}, alpha={alpha:.3}) above envelope"));
                }
                checks += 1;
            }
        }
    }

    report(
        4,
        "formula suite",
        bad.is_empty(),
        &format!(
            "psi/thresholds/rate identities at 1e-12; {checks} tail-envelope checks, max \
             ln-gap {worst_log_gap:.2e}; issues: {bad:?}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. Survival turns on at p = 1/2 on the binary tree, bond and site
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_survival_threshold_both_modes() {
    let start = Instant::now();
    let oracle = t2();
    let mut pass = true;
    let mut parts: Vec<String> = Vec::new();
    let mut level_half_note = String::new();
    for mode in [PercolationMode::Bond, PercolationMode::Site] {
        let mut fractions = Vec::new();
        for &p in &AC5_GRID {
            let est = survival_fraction(&oracle, p, mode, AC5_TRIALS, AC5_BUDGET, SEED)
                .expect("survival estimate");
            fractions.push(est.fraction);
        }
        // The estimated threshold is where survival first turns on.
        let onset = AC5_GRID
            .iter()
            .zip(&fractions)
            .find(|(_, &f)| f >= AC5_ONSET_LEVEL)
            .map(|(&p, _)| p);
        let ok = onset.is_some_and(|p| (p - 0.5).abs() <= AC5_WINDOW + 1e-9);
        pass &= ok;
        if mode == PercolationMode::Bond {
            let first_above_half = AC5_GRID
                .iter()
                .zip(&fractions)
                .find(|(_, &f)| f >= 0.5)
                .map(|(&p, _)| p);
            level_half_note = format!(
                "; survival level 1/2 itself is first reached at p = {first_above_half:?} \
                 (bond) — the tested quantity is the threshold location"
            );
        }
        let curve: Vec<String> = fractions.iter().map(|f| format!("{f:.3}")).collect();
        parts.push(format!("{mode:?}: onset {onset:?} [{}]", curve.join(" ")));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < AC5_TIME;
    report(
        5,
        "survival threshold within 0.50 +/- 0.02",
        pass,
        &format!("{}{level_half_note}; {:.1?}", parts.join("; "), elapsed),
    );
}

// ---------------------------------------------------------------------------
// 6. Finite-cluster boundary histogram decays with negative fitted slope
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_boundary_tail_decay() {
    let hist = boundary_tail_histogram(&t2(), 0.7, 20_000, 10_000, SEED).expect("histogram");
    let region: Vec<(u64, u64)> = hist
        .counts
        .iter()
        .map(|(&b, &c)| (b, c))
        .filter(|&(_, c)| c >= COUNT_FLOOR)
        .collect();
    let decreasing = region.windows(2).all(|w| w[1].1 < w[0].1);
    let xs: Vec<f64> = region.iter().map(|&(b, _)| b as f64).collect();
    let ys: Vec<f64> = region.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let fit = fit_line(&xs, &ys).expect("enough histogram cells to fit");
    let (lo, hi) = fit.slope_ci95();
    let pass = region.len() >= 4 && decreasing && hi < 0.0;
    report(
        6,
        "finite-cluster boundary tail decays",
        pass,
        &format!(
            "{} cells with count >= {COUNT_FLOOR}: {:?}; strictly decreasing: {decreasing}; \
             ln-slope CI95 [{lo:.3}, {hi:.3}]; finite trials {}",
            region.len(),
            region,
            hist.finite_trials
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Branching-process suite for the law (1/4, 0, 3/4)
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_branching_process_suite() {
    let dist = OffspringDistribution::new(vec![0.25, 0.0, 0.75]).unwrap();
    let decomp = backbone_decompose(&dist).unwrap();
    let mut bad: Vec<String> = Vec::new();

    let q = extinction_probability(&dist, 1e-14);
    if (q - 1.0 / 3.0).abs() > AC7_Q_TOL {
        bad.push(format!("q = {q}"));
    }

    // The surviving skeleton of this law always branches in two.
    if decomp.backbone.len() != 3
        || decomp.backbone[0].abs() > AC7_LAW_TOL
        || decomp.backbone[1].abs() > AC7_LAW_TOL
        || (decomp.backbone[2] - 1.0).abs() > AC7_LAW_TOL
    {
        bad.push(format!("backbone law {:?}", decomp.backbone));
    }

    // Extinction frequency against the fixed point.
    let ext_master = trial_seed(SEED, 1);
    let extinct = (0..AC7_SAMPLES)
        .filter(|&i| sample_tree(&dist, trial_seed(ext_master, i), AC7_TREE_BUDGET).is_extinct())
        .count();
    let freq = extinct as f64 / AC7_SAMPLES as f64;
    if (freq - 1.0 / 3.0).abs() > AC7_EXTINCTION_TOL {
        bad.push(format!("extinction frequency {freq}"));
    }

    // Size law of the conditioned sampler vs a rejection oracle that keeps
    // exactly the extinct trees of the unconditioned law.
    let bush_master = trial_seed(SEED, 2);
    let mut bush_sizes: BTreeMap<usize, u64> = BTreeMap::new();
    for i in 0..AC7_SAMPLES {
        let tree = sample_tree(&decomp.bush, trial_seed(bush_master, i), AC7_TREE_BUDGET);
        assert!(!tree.truncated, "conditioned trees stay tiny");
        *bush_sizes.entry(tree.size()).or_insert(0) += 1;
    }
    let rej_master = trial_seed(SEED, 3);
    let mut rej_sizes: BTreeMap<usize, u64> = BTreeMap::new();
    let mut accepted = 0u64;
    let mut draws = 0u64;
    while accepted < AC7_SAMPLES {
        let tree = sample_tree(&dist, trial_seed(rej_master, draws), AC7_TREE_BUDGET);
        draws += 1;
        assert!(draws < 20 * AC7_SAMPLES, "rejection oracle stalled");
        if tree.is_extinct() {
            *rej_sizes.entry(tree.size()).or_insert(0) += 1;
            accepted += 1;
        }
    }
    let keys: BTreeSet<usize> =
        bush_sizes.keys().chain(rej_sizes.keys()).copied().collect();
    let tv: f64 = keys
        .iter()
        .map(|k| {
            let a = *bush_sizes.get(k).unwrap_or(&0) as f64 / AC7_SAMPLES as f64;
            let b = *rej_sizes.get(k).unwrap_or(&0) as f64 / AC7_SAMPLES as f64;
            (a - b).abs()
        })
        .sum::<f64>()
        / 2.0;
    if tv > AC7_TV_LIMIT {
        bad.push(format!("TV distance {tv}"));
    }

    // Conditioned sizes thin out geometrically: negative log-linear slope
    // over the well-populated cells.
    let region: Vec<(usize, u64)> =
        bush_sizes.iter().map(|(&s, &c)| (s, c)).filter(|&(_, c)| c >= COUNT_FLOOR).collect();
    let xs: Vec<f64> = region.iter().map(|&(s, _)| s as f64).collect();
    let ys: Vec<f64> = region.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let (slope_lo, slope_hi) =
        fit_line(&xs, &ys).map(|f| f.slope_ci95()).unwrap_or((0.0, 1.0));
    if !(region.len() >= 4 && slope_hi < 0.0) {
        bad.push(format!("size-tail slope CI [{slope_lo:.3}, {slope_hi:.3}]"));
    }

    report(
        7,
        "branching-process suite",
        bad.is_empty(),
        &format!(
            "q err {:.1e}; backbone {:?}; extinction freq {freq:.4}; TV {tv:.4} over \
             {} sizes; tail slope CI [{slope_lo:.3}, {slope_hi:.3}]; issues: {bad:?}",
            (q - 1.0 / 3.0).abs(),
            decomp.backbone,
            keys.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Lamplighter metric: exact d=1 distance vs breadth-first search
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_lamplighter_metric_exhaustive() {
    let oracle = lamplighter(1);
    let ball = oracle.ball(&oracle.basepoint(), 8, 500_000).expect("ball fits");
    let mut bad = 0u32;
    for id in 0..ball.len() as u32 {
        let Vertex::Lamp(state) = ball.vertex(id) else {
            panic!("non-lamplighter vertex in ball");
        };
        let bfs = u64::from(ball.dist(id));
        let exact = lamplighter_distance_d1(&oracle, state).expect("d=1 metric");
        let (lower, upper) = lamplighter_distance_bounds(&oracle, state).expect("bounds");
        if exact != bfs || lower > exact || exact > upper {
            bad += 1;
        }
    }
    let pass = ball.len() == 490 && bad == 0;
    report(
        8,
        "exact lamplighter metric on the radius-8 ball",
        pass,
        &format!("{} states (expected 490), {bad} disagreements with BFS/bounds", ball.len()),
    );
}

// ---------------------------------------------------------------------------
// 9. Zero speed for the delayed walk over a one-dimensional marker
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_zero_speed_d1() {
    let start = Instant::now();
    let oracle = lamplighter(1);
    let est = speed_estimate(&oracle, Some(0.9), WALK_STEPS, WALK_TRIALS, SEED).expect("speed");
    let final_point = est.points.last().expect("checkpoints exist");
    let final_exact = final_point.exact_over_n.expect("d=1 exposes the exact metric").mean;
    let at_1000 = est
        .points
        .iter()
        .find(|pt| pt.n == 1000)
        .and_then(|pt| pt.exact_over_n)
        .expect("checkpoint at n = 1000")
        .mean;

    let mut ladder = Vec::new();
    for d in EXIT_DISTANCES {
        let e = exit_before_return(&oracle, 0.9, d, EXIT_TRIALS, EXIT_STEP_CAP, SEED)
            .expect("exit estimate");
        ladder.push(e.estimate);
    }
    let ladder_decreasing = ladder.windows(2).all(|w| w[1] < w[0]);
    let elapsed = start.elapsed();
    let pass = final_exact < AC9_FINAL_LIMIT
        && final_exact < at_1000
        && ladder_decreasing
        && elapsed < AC9_TIME;
    report(
        9,
        "zero-speed trend, one-dimensional marker",
        pass,
        &format!(
            "exact/n {at_1000:.4} at n=1e3 -> {final_exact:.4} at n=1e5 (limit \
             {AC9_FINAL_LIMIT}); exit ladder {ladder:?} decreasing: {ladder_decreasing}; {:.1?}",
            elapsed
        ),
    );
}

// ---------------------------------------------------------------------------
// 10. Positive speed for the delayed walk over a three-dimensional marker
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_positive_speed_d3() {
    let start = Instant::now();
    let oracle = lamplighter(3);
    let est = speed_estimate(&oracle, Some(0.95), WALK_STEPS, WALK_TRIALS, SEED).expect("speed");
    let final_point = est.points.last().expect("checkpoints exist");
    let prev_point = &est.points[est.points.len() - 2];
    let lower = final_point.lower_over_n;
    let speed_ok = lower.mean >= AC10_SPEED_FLOOR && lower.mean - lower.half_width > 0.0;
    let regen_final = final_point.regen_over_n.mean;
    let regen_prev = prev_point.regen_over_n.mean;
    let stability = regen_final / regen_prev;
    let regen_ok = regen_final > 0.0
        && stability >= AC10_STABILITY_BAND.0
        && stability <= AC10_STABILITY_BAND.1;

    let mut ladder = Vec::new();
    for d in EXIT_DISTANCES {
        let e = exit_before_return(&oracle, 0.95, d, EXIT_TRIALS, EXIT_STEP_CAP, SEED)
            .expect("exit estimate");
        ladder.push(e.estimate);
    }
    let min = ladder.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ladder.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ladder_ok = min >= AC10_EXIT_FLOOR && (max - min) <= AC10_PLATEAU_SPREAD;

    let elapsed = start.elapsed();
    let pass = speed_ok && regen_ok && ladder_ok && elapsed < AC10_TIME;
    report(
        10,
        "positive-speed trend, three-dimensional marker",
        pass,
        &format!(
            "lower/n {:.4} +/- {:.4} (floor {AC10_SPEED_FLOOR}); regen/n {regen_final:.4} \
             (stability {stability:.3}); exit ladder {ladder:?} in [{min:.3}, {max:.3}] \
             above {AC10_EXIT_FLOOR}; {:.1?}",
            lower.mean, lower.half_width, elapsed
        ),
    );
}

// ---------------------------------------------------------------------------
// 11. Stretch comparison: exponential-tail vs heavy-tail edge lengths
// ---------------------------------------------------------------------------

fn stretch_profiles(law: &StretchDescriptor) -> Vec<ExpansionProfile> {
    (0..AC11_SEEDS)
        .map(|s| {
            let base = GraphOracle::explicit(ExplicitGraph::full_tree(2, 15));
            let oracle =
                GraphOracle::stretch(base, law.clone(), trial_seed(SEED, s)).expect("stretch");
            expansion_profile(&oracle, AC11_MAX_SIZE, BoundaryMode::Edge, 1_000_000)
                .expect("profile")
        })
        .collect()
}

#[test]
fn criterion_11_stretch_dichotomy() {
    let geo = stretch_profiles(&StretchDescriptor::Geometric { q: 0.5 });
    let pow = stretch_profiles(&StretchDescriptor::TruncatedPowerLaw { beta: 2.0, cap: 64 });
    let seeds = AC11_SEEDS as f64;
    let mean_iota = |profiles: &[ExpansionProfile], k: usize| -> f64 {
        profiles.iter().map(|p| p.anchored[k].value).sum::<f64>() / seeds
    };
    let mean_ratio = |profiles: &[ExpansionProfile], k: usize| -> f64 {
        profiles.iter().map(|p| p.per_size[k].ratio).sum::<f64>() / seeds
    };

    let mut bad: Vec<String> = Vec::new();

    // (a) The geometric stretch keeps more anchored expansion at every size.
    for k in 0..AC11_MAX_SIZE {
        if mean_iota(&geo, k) <= mean_iota(&pow, k) {
            bad.push(format!("iota ordering fails at n = {}", k + 1));
        }
    }

    // (b) The averaged power-law per-size profile keeps falling.
    let pow_ratios: Vec<f64> = (0..AC11_MAX_SIZE).map(|k| mean_ratio(&pow, k)).collect();
    if !pow_ratios.windows(2).all(|w| w[1] <= w[0] + AC11_PROFILE_SLACK) {
        bad.push(format!("power profile not decreasing: {pow_ratios:?}"));
    }
    if pow_ratios[AC11_MAX_SIZE - 1] > 0.5 * pow_ratios[1] {
        bad.push("power profile fell by less than half".into());
    }

    // (c) Final anchored values separate with disjoint confidence intervals
    // and at least the pinned factor.
    let geo_final: Vec<f64> = geo.iter().map(|p| p.anchored[AC11_MAX_SIZE - 1].value).collect();
    let pow_final: Vec<f64> = pow.iter().map(|p| p.anchored[AC11_MAX_SIZE - 1].value).collect();
    let g = mean_ci(&geo_final);
    let w = mean_ci(&pow_final);
    let ratio = g.mean / w.mean;
    if g.mean - g.half_width <= w.mean + w.half_width {
        bad.push("final confidence intervals overlap".into());
    }
    if ratio < AC11_FINAL_FACTOR {
        bad.push(format!("final ratio {ratio:.3} under factor {AC11_FINAL_FACTOR}"));
    }

    report(
        11,
        "stretch dichotomy on the rooted binary tree",
        bad.is_empty(),
        &format!(
            "iota ordering holds at all {AC11_MAX_SIZE} sizes over {AC11_SEEDS} seeds; power \
             per-size profile {:.3} -> {:.3}; final iota {:.4}+/-{:.4} (geometric) vs \
             {:.4}+/-{:.4} (power), ratio {ratio:.3} (pinned floor {AC11_FINAL_FACTOR}); \
             issues: {bad:?}",
            pow_ratios[0],
            pow_ratios[AC11_MAX_SIZE - 1],
            g.mean,
            g.half_width,
            w.mean,
            w.half_width
        ),
    );
}

// ---------------------------------------------------------------------------
// 12. The delayed walk is reversible on a fully explored cluster
// ---------------------------------------------------------------------------

#[test]
fn criterion_12_delayed_walk_reversibility() {
    let oracle = lamplighter(1);
    let mut found = None;
    for env_seed in 0..10_000u64 {
        let cfg = PercolationConfig::new(0.45, PercolationMode::Bond, env_seed).unwrap();
        let report = explore_cluster(&oracle, &cfg, &oracle.basepoint(), 2000).unwrap();
        if report.is_finite() && report.vertex_count() == 10 {
            found = Some((env_seed, cfg, report));
            break;
        }
    }
    let (env_seed, cfg, cluster) = found.expect("a 10-vertex cluster appears in the seed scan");
    let n = cluster.vertices.len();
    let matrix = delayed_transition_matrix(&oracle, &cfg, &cluster.vertices).unwrap();
    let mut asym = 0u32;
    for i in 0..n {
        for j in 0..n {
            if i != j && matrix[i * n + j].to_bits() != matrix[j * n + i].to_bits() {
                asym += 1;
            }
        }
    }
    let mut worst_row_gap = 0.0f64;
    for i in 0..n {
        let sum: f64 = matrix[i * n..(i + 1) * n].iter().sum();
        worst_row_gap = worst_row_gap.max((sum - 1.0).abs());
    }
    let pass = asym == 0 && worst_row_gap <= 1e-12;
    report(
        12,
        "delayed-walk reversibility on a 10-vertex cluster",
        pass,
        &format!(
            "environment seed {env_seed}; {asym} bit-level asymmetries off-diagonal; \
             worst |row sum - 1| = {worst_row_gap:.1e}"
        ),
    );
}

// ---------------------------------------------------------------------------
// 13. Byte-identical payloads for any worker count and on rerun
// ---------------------------------------------------------------------------

#[test]
fn criterion_13_determinism_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let pipelines: [(&str, Vec<&str>); 3] = [
        (
            "percolate",
            vec![
                "percolate", "--family", "tree", "--b", "2", "--p", "0.45,0.55", "--trials",
                "2000", "--budget", "20000",
            ],
        ),
        ("walk", vec!["walk", "--d", "1", "--p", "0.9", "--steps", "5000", "--trials", "5"]),
        ("gw", vec!["gw", "--probs", "0.25,0,0.75", "--trials", "20000", "--budget", "2000"]),
    ];
    let mut bad: Vec<String> = Vec::new();
    let mut total_bytes = 0usize;
    for (name, tail) in &pipelines {
        for format in ["json", "csv"] {
            let mut payloads: Vec<Vec<u8>> = Vec::new();
            for workers in ["1", "2", "3", "2"] {
                let path = dir.path().join(format!("{name}-{format}-{workers}.out"));
                let status = std::process::Command::new(env!("CARGO_BIN_EXE_anchored"))
                    .arg("--seed")
                    .arg("11")
                    .arg("--workers")
                    .arg(workers)
                    .arg("--format")
                    .arg(format)
                    .arg("--out")
                    .arg(&path)
                    .args(tail)
                    .status()
                    .expect("binary runs");
                if !status.success() {
                    bad.push(format!("{name}/{format} workers={workers} exited {status:?}"));
                    continue;
                }
                payloads.push(std::fs::read(&path).expect("payload written"));
            }
            let identical =
                payloads.len() == 4 && payloads.iter().all(|p| !p.is_empty() && *p == payloads[0]);
            if !identical {
                bad.push(format!("{name}/{format} differs across workers or rerun"));
            }
            total_bytes += payloads.first().map(Vec::len).unwrap_or(0);
        }
    }
    report(
        13,
        "byte-identical payloads across worker counts",
        bad.is_empty(),
        &format!(
            "3 pipelines x 2 formats x workers(1,2,3,rerun 2): {} reference bytes; issues: {bad:?}",
            total_bytes
        ),
    );
}
