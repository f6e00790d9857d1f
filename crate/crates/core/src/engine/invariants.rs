use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prng::SplitMix64;
use crate::report::{Check, Report};
use crate::scalar::{choose2, Scalar};
use crate::set::{key_len, key_min, singleton_key, VertexSet};

use super::run::{Mode, RunTrace};
use super::thresholds::ThresholdKind;

/// How many random vertex sets the degree-sum inequalities are sampled at,
/// in addition to the full vertex set.
pub const RANDOM_SET_SAMPLES: usize = 50;

/// Machine-checks the post-run degree inequalities on a finished trace.
///
/// Strong traces get the subset-degree cap, the Gamma degree-growth
/// inequality and the degree-sum bound. Weak traces get the per-vertex and
/// per-subset degree caps, the degree-sum bound, the two fingerprint-measure
/// bounds (prune only; the Gamma_1 part only when the induced input is
/// degenerate or sparse enough) and the level-size recurrence (build only).
/// Degree-sum bounds are evaluated at the full vertex set plus
/// `RANDOM_SET_SAMPLES` seeded random subsets.
pub fn check_invariants<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    kind: ThresholdKind,
    set_seed: u64,
) -> Result<Report> {
    if trace.kind != kind {
        return Err(Error::invalid(format!(
            "trace was produced with {} thresholds, asked to check {kind}",
            trace.kind
        )));
    }
    let mut report = Report::new();
    let r = graph.uniformity();
    report.push(Check::bool(
        "top-level-count-exact",
        trace.p_sizes[r as usize] == graph.edge_count(),
    ));
    match trace.mode {
        Mode::Prune => {
            report.push(Check::bool(
                "fingerprint-within-input",
                trace.t.is_subset_of(&trace.input),
            ));
        }
        Mode::Build => {
            let c = trace.c.as_ref().expect("build trace");
            report.push(Check::bool(
                "fingerprint-within-container",
                trace.t.intersect(&graph.vertex_set()).is_subset_of(c),
            ));
        }
    }
    if graph.edge_count() == 0 {
        report.flag("degenerate instance: nothing further to check".to_string());
        return Ok(report);
    }
    check_level_provenance(graph, trace, &mut report);

    let sample_sets = {
        let mut rng = SplitMix64::derive(set_seed, 0x5e75);
        let mut sets = vec![graph.vertex_set()];
        for _ in 0..RANDOM_SET_SAMPLES {
            sets.push(
                graph
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|_| rng.next_bool(0.5))
                    .collect(),
            );
        }
        sets
    };

    match kind {
        ThresholdKind::Strong => {
            check_strong_subset_caps(graph, trace, &mut report);
            check_gamma_degree_growth(graph, trace, &mut report);
            check_strong_degree_sums(graph, trace, &sample_sets, &mut report)?;
        }
        ThresholdKind::Weak => {
            let delta = trace.weak_delta.expect("weak trace carries delta");
            check_weak_degree_caps(graph, trace, delta, &mut report);
            check_weak_degree_sums(graph, trace, delta, &sample_sets, &mut report)?;
            if trace.mode == Mode::Prune {
                check_fingerprint_measures(graph, trace, delta, &mut report)?;
            }
            if trace.mode == Mode::Build {
                check_level_size_recurrence(graph, trace, delta, &mut report)?;
            }
        }
    }
    Ok(report)
}

/// Every set in P_s (s < r) must come from an edge through the fingerprint:
/// some t with |t| = r-s, t inside T, t and f forming an edge, and f being
/// the last s vertices of that edge.
fn check_level_provenance<R: Scalar>(graph: &Hypergraph, trace: &RunTrace<R>, report: &mut Report) {
    let r = graph.uniformity();
    let mut all_ok = true;
    let mut checked = 0u64;
    for s in 1..r {
        for (f, _mult) in trace.level_elements(s) {
            checked += 1;
            let lowest = f[0];
            let sound = graph.edges_containing(&f).any(|e| {
                e.iter()
                    .filter(|v| !f.contains(v))
                    .all(|&v| v < lowest && trace.t.contains(v))
            });
            if !sound {
                all_ok = false;
            }
        }
    }
    report.push(
        Check::bool("level-provenance", all_ok)
            .with_note(format!("{checked} level sets traced to edges through T")),
    );
}

/// Strong runs: d_s(sigma) <= 2^C(r,2) tau^{r-s} sum_l 2^{-C(s+l,2)+l}
/// tau^{-l} d^(j)(sigma), for every sigma with |sigma| >= 2.
fn check_strong_subset_caps<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    report: &mut Report,
) {
    let r = graph.uniformity();
    let tau = trace.tau;
    for s in 2..=r {
        let mut worst: Option<(f64, f64)> = None;
        let mut scan = |key: crate::set::Key, deg: u64| {
            let size = key_len(key) as u32;
            if size < 2 || size > s {
                return;
            }
            let sigma = crate::set::key_to_vec(key);
            let mut bound = R::zero();
            for ell in 0..=(r - s) {
                let j = size + ell;
                if j > r {
                    break;
                }
                let dj = graph.max_superset_degree_sorted(&sigma, j);
                bound = bound
                    + R::two_pow(-choose2(s + ell) + ell as i32)
                        * tau.powi(-(ell as i32))
                        * R::from_count(dj);
            }
            bound = bound * R::two_pow(choose2(r)) * tau.powi((r - s) as i32);
            let lhs = deg as f64;
            let rhs = bound.report();
            if worst.map_or(true, |(l, b)| lhs - rhs > l - b) {
                worst = Some((lhs, rhs));
            }
        };
        if s == r {
            for &(key, deg) in graph.degree_entries() {
                scan(key, deg);
            }
        } else {
            for (&key, &deg) in trace.level_map(s) {
                scan(key, deg);
            }
        }
        if let Some((lhs, rhs)) = worst {
            report.push(Check::le(format!("subset-degree-cap[s={s}]"), lhs, rhs));
        }
    }
}

/// Strong runs: sigma in Gamma_{s-1} with |sigma| >= 2 implies
/// d_{s-1}(sigma) >= 2^{s-1} tau d_s(sigma).
fn check_gamma_degree_growth<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    report: &mut Report,
) {
    let r = graph.uniformity();
    let tau = trace.tau;
    for s in 3..=r {
        let mut worst: Option<(f64, f64)> = None;
        for (&key, _) in trace.gamma_level(s - 1) {
            if key_len(key) < 2 {
                continue;
            }
            let low = trace.level_degree_key(graph, s - 1, key);
            let high = trace.level_degree_key(graph, s, key);
            let lhs = low as f64;
            let rhs = (R::two_pow(s as i32 - 1) * tau * R::from_count(high)).report();
            if worst.map_or(true, |(l, b)| rhs - lhs > b - l) {
                worst = Some((lhs, rhs));
            }
        }
        if let Some((lhs, rhs)) = worst {
            report.push(Check::ge(
                format!("gamma-degree-growth[s={}]", s - 1),
                lhs,
                rhs,
            ));
        }
    }
}

fn degree_sum<R: Scalar>(graph: &Hypergraph, trace: &RunTrace<R>, s: u32, set: &VertexSet) -> u64 {
    set.iter()
        .map(|v| trace.level_degree_key(graph, s, singleton_key(v)))
        .sum()
}

/// Strong runs: sum_{u in U} d_s(u) <= (mu(U) + 4^{1-s} delta(G,tau))
/// tau^{r-s} nd, at the full set plus random sets.
fn check_strong_degree_sums<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    sets: &[VertexSet],
    report: &mut Report,
) -> Result<()> {
    let r = graph.uniformity();
    let tau = trace.tau;
    let delta = graph.codegree_function(tau)?.delta;
    let nd = R::from_count(graph.total_degree());
    for s in 1..=r {
        let mut worst: Option<(f64, f64)> = None;
        for set in sets {
            let lhs = degree_sum(graph, trace, s, set) as f64;
            let mu = graph.mu::<R>(set)?;
            let rhs = ((mu + R::two_pow(2 - 2 * s as i32) * delta) * tau.powi((r - s) as i32) * nd)
                .report();
            if worst.map_or(true, |(l, b)| lhs - rhs > l - b) {
                worst = Some((lhs, rhs));
            }
        }
        let (lhs, rhs) = worst.expect("at least one sample set");
        report.push(Check::le(format!("degree-sum-cap[s={s}]"), lhs, rhs));
    }
    Ok(())
}

/// Weak runs: d_s(u) <= tau^{r-s} (d(u) + r delta d) for every vertex, and
/// d_s(sigma) <= r delta d tau^{r-s+|sigma|-1} for |sigma| >= 2.
fn check_weak_degree_caps<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    delta: R,
    report: &mut Report,
) {
    let r = graph.uniformity();
    let tau = trace.tau;
    let d = graph.average_degree::<R>();
    let rd = R::from_count(r as u64) * delta * d;
    for s in 1..=r {
        let mut worst_v: Option<(f64, f64)> = None;
        for &v in graph.vertices() {
            let lhs = trace.level_degree_key(graph, s, singleton_key(v)) as f64;
            let rhs =
                (tau.powi((r - s) as i32) * (R::from_count(graph.vertex_degree(v)) + rd)).report();
            if worst_v.map_or(true, |(l, b)| lhs - rhs > l - b) {
                worst_v = Some((lhs, rhs));
            }
        }
        let (lhs, rhs) = worst_v.expect("graphs have vertices");
        report.push(Check::le(format!("vertex-degree-cap[s={s}]"), lhs, rhs));

        let mut worst: Option<(f64, f64)> = None;
        let mut scan = |key: crate::set::Key, deg: u64| {
            let size = key_len(key) as u32;
            if size < 2 {
                return;
            }
            let lhs = deg as f64;
            let rhs = (rd * tau.powi((r - s) as i32 + size as i32 - 1)).report();
            if worst.map_or(true, |(l, b)| lhs - rhs > l - b) {
                worst = Some((lhs, rhs));
            }
        };
        if s == r {
            for &(key, deg) in graph.degree_entries() {
                scan(key, deg);
            }
        } else {
            for (&key, &deg) in trace.level_map(s) {
                scan(key, deg);
            }
        }
        if let Some((lhs, rhs)) = worst {
            report.push(Check::le(format!("subset-degree-cap[s={s}]"), lhs, rhs));
        }
    }
}

/// Weak runs: sum_{u in U} d_s(u) <= (mu(U) + r delta) tau^{r-s} nd.
fn check_weak_degree_sums<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    delta: R,
    sets: &[VertexSet],
    report: &mut Report,
) -> Result<()> {
    let r = graph.uniformity();
    let tau = trace.tau;
    let nd = R::from_count(graph.total_degree());
    let rdelta = R::from_count(r as u64) * delta;
    for s in 1..=r {
        let mut worst: Option<(f64, f64)> = None;
        for set in sets {
            let lhs = degree_sum(graph, trace, s, set) as f64;
            let mu = graph.mu::<R>(set)?;
            let rhs = ((mu + rdelta) * tau.powi((r - s) as i32) * nd).report();
            if worst.map_or(true, |(l, b)| lhs - rhs > l - b) {
                worst = Some((lhs, rhs));
            }
        }
        let (lhs, rhs) = worst.expect("at least one sample set");
        report.push(Check::le(format!("degree-sum-cap[s={s}]"), lhs, rhs));
    }
    Ok(())
}

/// Weak prune runs: mu(T minus Gamma_1) <= (r-1)(tau/zeta)(1 + r delta),
/// and under the degeneracy/sparsity clause on the induced input,
/// mu(T meet Gamma_1) <= (tau/zeta)(1 + r delta).
fn check_fingerprint_measures<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    delta: R,
    report: &mut Report,
) -> Result<()> {
    let r = graph.uniformity();
    let tau = trace.tau;
    let zeta = trace.zeta;
    let gamma1: VertexSet = trace.gamma_level(1).keys().map(|&k| key_min(k)).collect();
    let factor = (tau / zeta) * (R::one() + R::from_count(r as u64) * delta);

    let outside = trace.t.difference(&gamma1);
    report.push(Check::le(
        "fingerprint-measure-outside-gamma1",
        graph.mu::<R>(&outside)?.report(),
        (R::from_count(r as u64 - 1) * factor).report(),
    ));

    let info = graph.independence_and_sparsity(&trace.input);
    let degeneracy_bound =
        ((zeta / R::from_count(r as u64)) * tau.powi(r as i32 - 1) * graph.average_degree::<R>())
            .floor();
    let edge_bound =
        (R::from_count(r as u64) / zeta) * tau.powi(r as i32) * R::from_count(graph.edge_count());
    let clause = R::from_count(info.degeneracy) <= degeneracy_bound
        || R::from_count(info.edges_within) <= edge_bound;
    if clause {
        let inside = trace.t.intersect(&gamma1);
        report.push(Check::le(
            "fingerprint-measure-inside-gamma1",
            graph.mu::<R>(&inside)?.report(),
            factor.report(),
        ));
    } else {
        report.push(Check::skipped(
            "fingerprint-measure-inside-gamma1",
            "induced input neither degenerate nor sparse enough",
        ));
    }
    Ok(())
}

/// Weak build runs: with D = (V - C) + T + B and e_s the normalized level
/// sizes, e_{s+1} <= r 2^s e_s + mu(D) + zeta + 2 r delta for s >= 2 and
/// e_2 <= 2 mu(D) + zeta + 3 r delta.
fn check_level_size_recurrence<R: Scalar>(
    graph: &Hypergraph,
    trace: &RunTrace<R>,
    delta: R,
    report: &mut Report,
) -> Result<()> {
    let r = graph.uniformity();
    let zeta = trace.zeta;
    let c = trace.c.as_ref().expect("build trace");
    let d_set = graph
        .vertex_set()
        .difference(c)
        .union(&trace.t)
        .union(&trace.b);
    let mu_d = graph.mu::<R>(&d_set)?;
    let rdelta = R::from_count(r as u64) * delta;
    for s in 1..r {
        let lhs = trace.level_density(graph, s + 1).report();
        let rhs = if s == 1 {
            R::from_count(2) * mu_d + zeta + R::from_count(3) * rdelta
        } else {
            R::from_count(r as u64) * R::two_pow(s as i32) * trace.level_density(graph, s)
                + mu_d
                + zeta
                + R::from_count(2) * rdelta
        };
        report.push(Check::le(
            format!("level-size-recurrence[s={s}]"),
            lhs,
            rhs.report(),
        ));
    }
    Ok(())
}

/// Convenience: seeded random subsets of the graph's vertex set.
pub fn random_vertex_subsets(graph: &Hypergraph, count: usize, seed: u64) -> Vec<VertexSet> {
    let mut rng = SplitMix64::derive(seed, 0x7a11);
    (0..count)
        .map(|_| {
            graph
                .vertices()
                .iter()
                .copied()
                .filter(|_| rng.next_bool(0.5))
                .collect::<VertexSet>()
        })
        .collect()
}

/// Convenience for tests: did prune and build fire the rule on identical
/// vertex sets when build consumed prune's output?
pub fn decisions_agree<R: Scalar>(prune: &RunTrace<R>, build: &RunTrace<R>) -> bool {
    prune.decisions.len() == build.decisions.len()
        && prune.decisions.iter().zip(&build.decisions).all(|(p, b)| {
            p.vertex == b.vertex
                && p.fired == b.fired
                && p.candidate_sizes == b.candidate_sizes
                && p.updated == b.updated
        })
}
