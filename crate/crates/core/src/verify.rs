//! Brute-force oracles and the exhaustive harness that binds every covering
//! guarantee to an executable check at desk scale.

use rayon::prelude::*;

use crate::engine::{
    check_invariants, decisions_agree, online_equality, run_with, sample_between, strong_cover,
    weak_cover, EngineParams, Mode, ThresholdKind, Thresholds,
};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prng::SplitMix64;
use crate::report::Check;
use crate::set::{Vertex, VertexSet};

const ENUMERATION_GUARD: usize = 20;

/// All independent sets of G, the empty set included. Backtracking over the
/// vertex order with early pruning; guarded to n <= 20.
pub fn enumerate_independent_sets(graph: &Hypergraph) -> Result<Vec<VertexSet>> {
    let n = graph.vertex_count();
    if n > ENUMERATION_GUARD {
        return Err(Error::scale(format!(
            "independent-set enumeration limited to {ENUMERATION_GUARD} vertices, got {n}"
        )));
    }
    // edges indexed by their largest vertex position
    let vertices = graph.vertices();
    let pos_of = |v: Vertex| vertices.binary_search(&v).expect("member");
    let mut edges_by_last: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for e in graph.edges() {
        let positions: Vec<usize> = e.iter().map(|&v| pos_of(v)).collect();
        let last = *positions.iter().max().expect("nonempty edge");
        edges_by_last[last].push(positions);
    }
    let mut chosen = vec![false; n];
    let mut out: Vec<VertexSet> = Vec::new();
    fn recurse(
        pos: usize,
        n: usize,
        vertices: &[Vertex],
        edges_by_last: &[Vec<Vec<usize>>],
        chosen: &mut Vec<bool>,
        out: &mut Vec<VertexSet>,
    ) {
        if pos == n {
            out.push(
                chosen
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| c)
                    .map(|(i, _)| vertices[i])
                    .collect(),
            );
            return;
        }
        // skip
        recurse(pos + 1, n, vertices, edges_by_last, chosen, out);
        // take, unless that completes an edge
        let completes = edges_by_last[pos]
            .iter()
            .any(|e| e.iter().all(|&p| p == pos || chosen[p]));
        if !completes {
            chosen[pos] = true;
            recurse(pos + 1, n, vertices, edges_by_last, chosen, out);
            chosen[pos] = false;
        }
    }
    recurse(0, n, vertices, &edges_by_last, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

/// Seeded Erdos-Renyi style r-graph: `edges` distinct edges drawn uniformly.
pub fn random_hypergraph(n: u32, r: u32, edges: usize, seed: u64) -> Result<Hypergraph> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!(
            "uniformity {r} out of range 1..={n}"
        )));
    }
    let max_edges = crate::scalar::binomial(n as u64, r as u64);
    if (edges as u128) > max_edges {
        return Err(Error::invalid(format!(
            "{edges} edges requested, only {max_edges} exist"
        )));
    }
    let mut rng = SplitMix64::derive(seed, 0xed9e);
    let mut chosen: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
    while chosen.len() < edges {
        let mut edge: Vec<u32> = Vec::with_capacity(r as usize);
        while edge.len() < r as usize {
            let v = rng.next_below(n as u64) as u32 + 1;
            if !edge.contains(&v) {
                edge.push(v);
            }
        }
        edge.sort_unstable();
        chosen.insert(edge);
    }
    let edges: Vec<Vec<u32>> = chosen.into_iter().collect();
    Hypergraph::build(n, r, &edges)
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub tau: f64,
    pub zeta: f64,
    pub kind: ThresholdKind,
    pub seed: u64,
    /// sparse non-independent inputs to try in addition to the independent family
    pub random_sparse_inputs: usize,
    /// random supersets per input for the over-specification check
    pub overspec_samples: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            tau: 0.25,
            zeta: 0.25,
            kind: ThresholdKind::Weak,
            seed: 1,
            random_sparse_inputs: 50,
            overspec_samples: 10,
        }
    }
}

/// One line of the harness report: (input, check, status, lhs, rhs).
#[derive(Debug, Clone)]
pub struct HarnessLine {
    pub input: VertexSet,
    pub check: Check,
}

#[derive(Debug, Clone)]
pub struct HarnessReport {
    /// configuration echo for replay
    pub header: String,
    pub lines: Vec<HarnessLine>,
    pub flags: Vec<String>,
    pub inputs_checked: usize,
}

impl HarnessReport {
    pub fn all_ok(&self) -> bool {
        self.lines.iter().all(|l| l.check.ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &HarnessLine> {
        self.lines.iter().filter(|l| !l.check.ok())
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.header);
        for flag in &self.flags {
            out.push_str(&format!("flag {flag}\n"));
        }
        for line in &self.lines {
            out.push_str(&format!("input={} {}\n", line.input, line.check));
        }
        out.push_str(&format!(
            "summary inputs={} checks={} failures={}\n",
            self.inputs_checked,
            self.lines.len(),
            self.failures().count()
        ));
        out
    }
}

/// Exhaustive harness: for every independent set (plus seeded sparse
/// non-independent inputs), prune and build, then check containment, the
/// covering bounds (hypothesis-gated), prefix equality at every cut point,
/// over-specification, rule agreement between the modes, and the post-run
/// degree inequalities.
pub fn full_harness(graph: &Hypergraph, config: &HarnessConfig) -> Result<HarnessReport> {
    let params = EngineParams::new(config.tau, config.zeta, config.kind)?;
    let independents = enumerate_independent_sets(graph)?;
    let mut inputs: Vec<(VertexSet, bool)> = independents.into_iter().map(|i| (i, true)).collect();
    {
        let mut rng = SplitMix64::derive(config.seed, 0x59a7);
        let mut added = 0;
        let mut attempts = 0;
        while added < config.random_sparse_inputs && attempts < config.random_sparse_inputs * 40 {
            attempts += 1;
            let set: VertexSet = graph
                .vertices()
                .iter()
                .copied()
                .filter(|_| rng.next_bool(0.4))
                .collect();
            let info = graph.independence_and_sparsity(&set);
            if info.is_independent {
                continue;
            }
            if sparse_clause_met(graph, &info, config) {
                inputs.push((set, false));
                added += 1;
            }
        }
    }

    let n_last = graph.vertices().last().copied().unwrap_or(0);
    let results: Vec<(usize, Vec<Check>, Vec<String>)> = inputs
        .par_iter()
        .enumerate()
        .map_init(
            || Thresholds::new(graph, params.tau, params.kind),
            |thresholds, (idx, (input, _independent))| {
                let thresholds = match thresholds {
                    Ok(t) => t,
                    Err(e) => {
                        return (idx, vec![Check::bool(format!("setup: {e}"), false)], vec![])
                    }
                };
                let mut checks = Vec::new();
                let mut flags = Vec::new();
                let seed = SplitMix64::derive(config.seed, idx as u64).next_u64();
                match harness_one(graph, &params, config, thresholds, input, seed, n_last) {
                    Ok((mut c, mut f)) => {
                        checks.append(&mut c);
                        flags.append(&mut f);
                    }
                    Err(e) => checks.push(Check::bool(format!("error: {e}"), false)),
                }
                (idx, checks, flags)
            },
        )
        .collect();

    let mut sorted = results;
    sorted.sort_by_key(|(idx, _, _)| *idx);
    let mut lines = Vec::new();
    let mut flags = Vec::new();
    for (idx, checks, fl) in sorted {
        for check in checks {
            lines.push(HarnessLine {
                input: inputs[idx].0.clone(),
                check,
            });
        }
        flags.extend(fl);
    }
    let header = format!(
        "harness n={} r={} edges={} tau={} zeta={} kind={} seed={}",
        graph.vertex_count(),
        graph.uniformity(),
        graph.edge_count(),
        config.tau,
        config.zeta,
        config.kind,
        config.seed
    );
    Ok(HarnessReport {
        header,
        lines,
        flags,
        inputs_checked: inputs.len(),
    })
}

fn sparse_clause_met(
    graph: &Hypergraph,
    info: &crate::hypergraph::SparsityInfo,
    config: &HarnessConfig,
) -> bool {
    let r = graph.uniformity();
    let d = graph.average_degree::<f64>();
    // the weak-run clause at the harness parameters
    let degeneracy_bound = ((config.zeta / r as f64) * config.tau.powi(r as i32 - 1) * d).floor();
    let edge_bound =
        (r as f64 / config.zeta) * config.tau.powi(r as i32) * graph.edge_count() as f64;
    (info.degeneracy as f64) <= degeneracy_bound || (info.edges_within as f64) <= edge_bound
}

fn harness_one(
    graph: &Hypergraph,
    params: &EngineParams<f64>,
    config: &HarnessConfig,
    thresholds: &Thresholds<'_, f64>,
    input: &VertexSet,
    seed: u64,
    n_last: Vertex,
) -> Result<(Vec<Check>, Vec<String>)> {
    let mut checks = Vec::new();
    let mut flags = Vec::new();
    let prune = run_with(graph, params, Mode::Prune, input, thresholds)?;
    let t = prune.t.clone();
    let build = run_with(graph, params, Mode::Build, &t, thresholds)?;
    let c = build.output().clone();

    checks.push(Check::bool(
        "fingerprint-within-input",
        t.is_subset_of(input),
    ));
    checks.push(Check::bool(
        "input-within-container",
        input.is_subset_of(&c),
    ));
    checks.push(Check::bool(
        "mode-agreement",
        decisions_agree(&prune, &build),
    ));

    // hypothesis-gated covering bounds
    match config.kind {
        ThresholdKind::Weak => {
            let outcome = weak_cover(graph, config.tau, input)?;
            for check in outcome.report.checks {
                checks.push(prefixed("covering", check));
            }
        }
        ThresholdKind::Strong => match strong_cover(graph, config.tau, config.zeta, input) {
            Ok(outcome) => {
                for check in outcome.report.checks {
                    checks.push(prefixed("covering", check));
                }
            }
            Err(Error::Precondition(msg)) => {
                flags.push(format!("covering precondition failed: {msg}"));
            }
            Err(e) => return Err(e),
        },
    }

    // prefix equality at every cut point
    let mut online_ok = true;
    for w in 0..=n_last {
        if !online_equality(graph, params, &t, w)? {
            online_ok = false;
            break;
        }
    }
    checks.push(Check::bool("prefix-equality", online_ok));

    // over-specification
    let mut rng = SplitMix64::new(seed);
    let mut overspec_ok = true;
    for s in sample_between(&t, input, config.overspec_samples, &mut rng) {
        let wide = run_with(graph, params, Mode::Build, &s, thresholds)?;
        if wide.output() != &c {
            overspec_ok = false;
            break;
        }
    }
    checks.push(Check::bool("over-specification", overspec_ok));

    // post-run degree inequalities on both traces
    for trace in [&prune, &build] {
        let report = check_invariants(graph, trace, config.kind, seed)?;
        for check in report.checks {
            checks.push(prefixed(&format!("{}", trace.mode), check));
        }
        flags.extend(report.flags);
    }
    Ok((checks, flags))
}

fn prefixed(prefix: &str, mut check: Check) -> Check {
    check.name = format!("{prefix}.{}", check.name);
    check
}
