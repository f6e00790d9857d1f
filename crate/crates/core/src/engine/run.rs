use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::scalar::Scalar;
use crate::set::{
    key_drop_min, key_min, key_of, nonempty_subkeys, singleton_key, Key, Vertex, VertexSet,
};

use super::thresholds::{ThresholdKind, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Prune,
    Build,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Prune => write!(f, "prune"),
            Mode::Build => write!(f, "build"),
        }
    }
}

/// Index room for the per-level maps: levels run 1..r-1, and slot 1 must
/// exist even at uniformity 1 (where no level ever fills).
fn level_slots(r: u32) -> usize {
    (r as usize).max(2)
}

/// How Gamma candidates are scanned after a batch of additions. The default
/// tests only subsets of newly added sets; `Literal` scans every subset of
/// the unprocessed suffix. Observable behaviour is identical (tested); the
/// literal scan can additionally admit subsets of zero threshold and zero
/// degree, which never influence any later decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaScan {
    #[default]
    NewlyAdded,
    Literal,
}

#[derive(Debug, Clone)]
pub struct EngineParams<R> {
    pub tau: R,
    pub zeta: R,
    pub kind: ThresholdKind,
    pub gamma_scan: GammaScan,
}

impl<R: Scalar> EngineParams<R> {
    pub fn new(tau: R, zeta: R, kind: ThresholdKind) -> Result<Self> {
        if tau <= R::zero() || zeta <= R::zero() {
            return Err(Error::invalid("tau and zeta must be positive".to_string()));
        }
        Ok(EngineParams {
            tau,
            zeta,
            kind,
            gamma_scan: GammaScan::default(),
        })
    }
}

/// Record of one Gamma insertion.
#[derive(Debug, Clone)]
pub struct GammaRecord<R> {
    pub at_vertex: Vertex,
    pub degree_at_insert: u64,
    pub threshold: R,
}

/// Per-vertex decision record.
#[derive(Debug, Clone)]
pub struct Decision {
    pub vertex: Vertex,
    pub in_low_degree_set: bool,
    /// |F_{v,s}| for s = 1..r-1 (multiplicities counted)
    pub candidate_sizes: Vec<u64>,
    /// levels s whose candidate multiset met the rule bound
    pub breached_levels: Vec<u32>,
    pub via_gamma1: bool,
    pub fired: bool,
    pub in_input: bool,
    /// whether the data structure was updated (v landed in T)
    pub updated: bool,
}

/// Full post-run record of one pass.
#[derive(Debug, Clone)]
pub struct RunTrace<R> {
    pub mode: Mode,
    pub kind: ThresholdKind,
    pub tau: R,
    pub zeta: R,
    pub input: VertexSet,
    /// prune: the output fingerprint; build: the input fingerprint
    pub t: VertexSet,
    /// build only
    pub c: Option<VertexSet>,
    pub b: VertexSet,
    /// weak-threshold constant used by the run (weak kind only)
    pub weak_delta: Option<R>,
    /// |P_s| with multiplicities, index s = 1..=r (index 0 unused)
    pub p_sizes: Vec<u64>,
    /// final contents of P_s for s = 1..=r-1 (index 0 unused), with
    /// multiplicities merged; level r is the edge set
    pub(crate) p_elements: Vec<FxHashMap<Key, u64>>,
    /// final degree maps of P_s for s = 1..=r-1 (index 0 unused);
    /// level r degrees live in the graph itself
    pub(crate) d_s: Vec<FxHashMap<Key, u64>>,
    /// Gamma_s for s = 1..=r-1 (index 0 unused)
    pub(crate) gamma: Vec<FxHashMap<Key, GammaRecord<R>>>,
    pub decisions: Vec<Decision>,
}

impl<R: Scalar> RunTrace<R> {
    pub fn output(&self) -> &VertexSet {
        match self.mode {
            Mode::Prune => &self.t,
            Mode::Build => self.c.as_ref().expect("build trace has a container"),
        }
    }

    /// Final degree of sigma in P_s (s = 1..=r).
    pub fn level_degree(&self, graph: &Hypergraph, s: u32, sigma: &[Vertex]) -> u64 {
        let mut sorted = sigma.to_vec();
        sorted.sort_unstable();
        let key = key_of(&sorted);
        self.level_degree_key(graph, s, key)
    }

    pub(crate) fn level_degree_key(&self, graph: &Hypergraph, s: u32, key: Key) -> u64 {
        let r = graph.uniformity();
        if s == r {
            graph.degree_key(key)
        } else {
            self.d_s[s as usize].get(&key).copied().unwrap_or(0)
        }
    }

    pub fn gamma_contains(&self, s: u32, sigma: &[Vertex]) -> bool {
        let mut sorted = sigma.to_vec();
        sorted.sort_unstable();
        self.gamma[s as usize].contains_key(&key_of(&sorted))
    }

    /// Members of Gamma_1 (as vertices).
    pub fn gamma1_vertices(&self) -> VertexSet {
        self.gamma[1].keys().map(|&k| key_min(k)).collect()
    }

    /// Members of Gamma_s as sorted vertex lists.
    pub fn gamma_members(&self, s: u32) -> Vec<Vec<Vertex>> {
        let mut out: Vec<Vec<Vertex>> = self.gamma[s as usize]
            .keys()
            .map(|&k| crate::set::key_to_vec(k))
            .collect();
        out.sort();
        out
    }

    pub(crate) fn gamma_level(&self, s: u32) -> &FxHashMap<Key, GammaRecord<R>> {
        &self.gamma[s as usize]
    }

    pub(crate) fn level_map(&self, s: u32) -> &FxHashMap<Key, u64> {
        &self.d_s[s as usize]
    }

    /// Contents of P_s (s < r) as sorted (set, multiplicity) pairs.
    pub fn level_elements(&self, s: u32) -> Vec<(Vec<Vertex>, u64)> {
        let mut out: Vec<(Vec<Vertex>, u64)> = self.p_elements[s as usize]
            .iter()
            .map(|(&k, &m)| (crate::set::key_to_vec(k), m))
            .collect();
        out.sort();
        out
    }

    /// e_s defined by |P_s| = e_s * tau^{r-s} * nd.
    pub fn level_density(&self, graph: &Hypergraph, s: u32) -> R {
        let r = graph.uniformity();
        let nd = R::from_count(graph.total_degree());
        R::from_count(self.p_sizes[s as usize]) / (self.tau.powi((r - s) as i32) * nd)
    }
}

/// One pass of the container algorithm over the graph's vertex order.
pub fn run<R: Scalar>(
    graph: &Hypergraph,
    params: &EngineParams<R>,
    mode: Mode,
    input: &VertexSet,
) -> Result<RunTrace<R>> {
    let thresholds = Thresholds::new(graph, params.tau, params.kind)?;
    run_with(graph, params, mode, input, &thresholds)
}

/// Variant taking a shared threshold oracle (reused across runs).
pub fn run_with<R: Scalar>(
    graph: &Hypergraph,
    params: &EngineParams<R>,
    mode: Mode,
    input: &VertexSet,
    thresholds: &Thresholds<'_, R>,
) -> Result<RunTrace<R>> {
    if params.tau <= R::zero() || params.zeta <= R::zero() {
        return Err(Error::invalid("tau and zeta must be positive".to_string()));
    }
    let r = graph.uniformity();
    let n = graph.vertex_count();

    // Degenerate instance: the rule never fires; no vertex has degree below
    // zeta * 0, so B is empty and both modes pass through.
    if graph.edge_count() == 0 {
        let decisions = graph
            .vertices()
            .iter()
            .map(|&v| Decision {
                vertex: v,
                in_low_degree_set: false,
                candidate_sizes: vec![0; r.saturating_sub(1) as usize],
                breached_levels: Vec::new(),
                via_gamma1: false,
                fired: false,
                in_input: input.contains(v),
                updated: false,
            })
            .collect();
        return Ok(RunTrace {
            mode,
            kind: params.kind,
            tau: params.tau,
            zeta: params.zeta,
            input: input.clone(),
            t: match mode {
                Mode::Prune => VertexSet::new(),
                Mode::Build => input.clone(),
            },
            c: match mode {
                Mode::Prune => None,
                Mode::Build => Some(graph.vertex_set()),
            },
            b: VertexSet::new(),
            weak_delta: None,
            p_sizes: vec![0; r as usize + 1],
            p_elements: vec![FxHashMap::default(); level_slots(r)],
            d_s: vec![FxHashMap::default(); level_slots(r)],
            gamma: vec![FxHashMap::default(); level_slots(r)],
            decisions,
        });
    }

    let avg = graph.average_degree::<R>();
    let b: VertexSet = graph
        .vertices()
        .iter()
        .copied()
        .filter(|&v| R::from_count(graph.vertex_degree(v)) < params.zeta * avg)
        .collect();

    // P_s entries bucketed by their minimum vertex position; multiplicities
    // may be split across entries of the same set.
    let mut buckets: Vec<Vec<Vec<(Key, u64)>>> = vec![vec![Vec::new(); n]; r as usize + 1];
    let mut p_sizes = vec![0u64; r as usize + 1];
    for e in graph.edges() {
        let key = key_of(e);
        let pos = graph.vertex_position(key_min(key)).expect("edge vertex");
        buckets[r as usize][pos].push((key, 1));
    }
    p_sizes[r as usize] = graph.edge_count();

    let mut d_s: Vec<FxHashMap<Key, u64>> = vec![FxHashMap::default(); level_slots(r)];
    let mut p_elements: Vec<FxHashMap<Key, u64>> = vec![FxHashMap::default(); level_slots(r)];
    let mut gamma: Vec<FxHashMap<Key, GammaRecord<R>>> = vec![FxHashMap::default(); level_slots(r)];

    let mut t_set = match mode {
        Mode::Prune => VertexSet::new(),
        Mode::Build => input.clone(),
    };
    let mut c_set = graph.vertex_set();
    let mut decisions = Vec::with_capacity(n);

    let blocked = |gamma_s: &FxHashMap<Key, GammaRecord<R>>, f: Key| -> bool {
        if gamma_s.is_empty() {
            return false;
        }
        nonempty_subkeys(f)
            .into_iter()
            .any(|sub| gamma_s.contains_key(&sub))
    };

    for (pos, &v) in graph.vertices().iter().enumerate() {
        // candidate multisets F_{v,s}, s = 1..r-1, inherited from P_{s+1}
        let mut candidates: Vec<Vec<(Key, u64)>> = Vec::with_capacity(r as usize);
        let mut sizes = vec![0u64; r as usize + 1];
        for s in 1..r {
            let mut list = Vec::new();
            for &(full, mult) in &buckets[s as usize + 1][pos] {
                let f = key_drop_min(full);
                debug_assert_eq!(key_min(full), v);
                if !blocked(&gamma[s as usize], f) {
                    list.push((f, mult));
                    sizes[s as usize] += mult;
                }
            }
            candidates.push(list);
        }

        let dv = R::from_count(graph.vertex_degree(v));
        let in_b = b.contains(v);
        let mut breached = Vec::new();
        for s in 1..r {
            let bound = params.zeta * params.tau.powi((r - s - 1) as i32) * dv;
            if R::from_count(sizes[s as usize]) >= bound {
                breached.push(s);
            }
        }
        let via_gamma1 = gamma[1].contains_key(&singleton_key(v));
        let fired = !in_b && (!breached.is_empty() || via_gamma1);
        let in_input = input.contains(v);

        let mut updated = false;
        if fired {
            match mode {
                Mode::Prune => {
                    if in_input {
                        t_set.insert(v);
                        updated = true;
                    }
                }
                Mode::Build => {
                    if !in_input {
                        c_set.remove(v);
                    } else {
                        updated = true;
                    }
                }
            }
        }

        if updated {
            for s in 1..r {
                let added = &candidates[s as usize - 1];
                if added.is_empty() {
                    continue;
                }
                let mut touched: FxHashSet<Key> = FxHashSet::default();
                for &(f, mult) in added {
                    let dest = graph.vertex_position(key_min(f)).expect("candidate vertex");
                    buckets[s as usize][dest].push((f, mult));
                    p_sizes[s as usize] += mult;
                    *p_elements[s as usize].entry(f).or_insert(0) += mult;
                    for sub in nonempty_subkeys(f) {
                        *d_s[s as usize].entry(sub).or_insert(0) += mult;
                        touched.insert(sub);
                    }
                }
                match params.gamma_scan {
                    GammaScan::NewlyAdded => {
                        let mut keys: Vec<Key> = touched.into_iter().collect();
                        keys.sort_unstable();
                        for key in keys {
                            maybe_insert_gamma(
                                graph,
                                thresholds,
                                &mut gamma[s as usize],
                                &d_s[s as usize],
                                s,
                                key,
                                v,
                            );
                        }
                    }
                    GammaScan::Literal => {
                        let suffix: Vec<Vertex> = graph.vertices()[pos + 1..].to_vec();
                        for size in 1..=s {
                            crate::hypergraph::for_each_combination(
                                &suffix,
                                size as usize,
                                &mut |subset| {
                                    let key = key_of(subset);
                                    maybe_insert_gamma(
                                        graph,
                                        thresholds,
                                        &mut gamma[s as usize],
                                        &d_s[s as usize],
                                        s,
                                        key,
                                        v,
                                    );
                                },
                            );
                        }
                    }
                }
            }
        }

        decisions.push(Decision {
            vertex: v,
            in_low_degree_set: in_b,
            candidate_sizes: sizes[1..r as usize].to_vec(),
            breached_levels: breached,
            via_gamma1,
            fired,
            in_input,
            updated,
        });
    }

    Ok(RunTrace {
        mode,
        kind: params.kind,
        tau: params.tau,
        zeta: params.zeta,
        input: input.clone(),
        t: t_set,
        c: match mode {
            Mode::Prune => None,
            Mode::Build => Some(c_set),
        },
        b,
        weak_delta: match params.kind {
            ThresholdKind::Weak => Some(thresholds.weak_delta_value()),
            ThresholdKind::Strong => None,
        },
        p_sizes,
        p_elements,
        d_s,
        gamma,
        decisions,
    })
}

fn maybe_insert_gamma<R: Scalar>(
    _graph: &Hypergraph,
    thresholds: &Thresholds<'_, R>,
    gamma_s: &mut FxHashMap<Key, GammaRecord<R>>,
    d_map: &FxHashMap<Key, u64>,
    s: u32,
    key: Key,
    at_vertex: Vertex,
) {
    if gamma_s.contains_key(&key) {
        return;
    }
    let deg = d_map.get(&key).copied().unwrap_or(0);
    let theta = thresholds.theta_key(s, key);
    if R::from_count(deg) >= theta {
        gamma_s.insert(
            key,
            GammaRecord {
                at_vertex,
                degree_at_insert: deg,
                threshold: theta,
            },
        );
    }
}

/// prune on I, then build on the resulting T. The pair of traces shares one
/// threshold oracle.
pub fn prune_then_build<R: Scalar>(
    graph: &Hypergraph,
    params: &EngineParams<R>,
    input: &VertexSet,
) -> Result<(RunTrace<R>, RunTrace<R>)> {
    let thresholds = Thresholds::new(graph, params.tau, params.kind)?;
    let prune = run_with(graph, params, Mode::Prune, input, &thresholds)?;
    let build = run_with(graph, params, Mode::Build, &prune.t.clone(), &thresholds)?;
    Ok((prune, build))
}

/// Does build(T) agree with build(T cut to the prefix `[w]`) on `[w]`?
pub fn online_equality<R: Scalar>(
    graph: &Hypergraph,
    params: &EngineParams<R>,
    t: &VertexSet,
    w: Vertex,
) -> Result<bool> {
    let full = run(graph, params, Mode::Build, t)?;
    let cut = run(graph, params, Mode::Build, &t.prefix(w))?;
    let lhs = full.output().prefix(w);
    let rhs = cut.output().prefix(w);
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> Hypergraph {
        Hypergraph::build(3, 3, &[vec![1, 2, 3]]).unwrap()
    }

    fn weak_params() -> EngineParams<f64> {
        EngineParams::new(0.5, 0.5, ThresholdKind::Weak).unwrap()
    }

    #[test]
    fn hand_trace_prune() {
        let g = single_edge();
        let i = VertexSet::parse("1,2").unwrap();
        let trace = run(&g, &weak_params(), Mode::Prune, &i).unwrap();
        assert_eq!(trace.t.as_slice(), &[1, 2]);
        // v=1 fires via |F_{1,2}| = 1 >= 1/2
        let d1 = &trace.decisions[0];
        assert!(d1.fired && d1.breached_levels.contains(&2));
        assert_eq!(d1.candidate_sizes, vec![0, 1]);
        // {2,3} lands in P_2 and Gamma_2
        assert_eq!(trace.level_degree(&g, 2, &[2, 3]), 1);
        assert!(trace.gamma_contains(2, &[2, 3]));
        // v=2 fires via |F_{2,1}| = 1 >= 1/4; {3} lands in P_1 and Gamma_1
        let d2 = &trace.decisions[1];
        assert!(d2.fired && d2.breached_levels.contains(&1));
        assert_eq!(trace.level_degree(&g, 1, &[3]), 1);
        assert!(trace.gamma_contains(1, &[3]));
        // v=3 fires through Gamma_1 but is outside I
        let d3 = &trace.decisions[2];
        assert!(d3.fired && d3.via_gamma1 && !d3.in_input && !d3.updated);
        assert_eq!(trace.p_sizes, vec![0, 1, 1, 1]);
    }

    #[test]
    fn hand_trace_build() {
        let g = single_edge();
        let t = VertexSet::parse("1,2").unwrap();
        let trace = run(&g, &weak_params(), Mode::Build, &t).unwrap();
        assert_eq!(trace.output().as_slice(), &[1, 2]);
        let d3 = &trace.decisions[2];
        assert!(d3.fired && d3.via_gamma1 && !d3.in_input);
    }

    #[test]
    fn degenerate_graph() {
        let g = Hypergraph::build(4, 2, &[]).unwrap();
        let p = run(
            &g,
            &weak_params(),
            Mode::Prune,
            &VertexSet::parse("1,2,3").unwrap(),
        )
        .unwrap();
        assert!(p.t.is_empty());
        let b = run(&g, &weak_params(), Mode::Build, &VertexSet::new()).unwrap();
        assert_eq!(b.output().as_slice(), &[1, 2, 3, 4]);
    }

    #[test]
    fn candidate_multiplicities_accumulate() {
        // two edges sharing the pair {3,4}: once 1 and 2 are in T, the
        // level-2 multiset holds {3,4} twice and vertex 3 sees candidate
        // size 2 at level 1
        let g = Hypergraph::build(4, 3, &[vec![1, 3, 4], vec![2, 3, 4]]).unwrap();
        let params = EngineParams::new(0.9_f64, 0.1, ThresholdKind::Weak).unwrap();
        let i = VertexSet::parse("1,2,3,4").unwrap();
        let trace = run(&g, &params, Mode::Prune, &i).unwrap();
        assert!(trace.decisions[0].updated && trace.decisions[1].updated);
        assert_eq!(trace.p_sizes[2], 2);
        assert_eq!(trace.level_degree(&g, 2, &[3, 4]), 2);
        assert_eq!(trace.level_elements(2), vec![(vec![3, 4], 2)]);
        let d3 = &trace.decisions[2];
        assert_eq!(d3.candidate_sizes[0], 2);
    }

    #[test]
    fn uniformity_one_never_fires() {
        // no levels exist below r = 1, so the rule has nothing to test
        let g = Hypergraph::build(3, 1, &[vec![2]]).unwrap();
        let p = run(
            &g,
            &weak_params(),
            Mode::Prune,
            &VertexSet::parse("1,2").unwrap(),
        )
        .unwrap();
        assert!(p.t.is_empty());
        assert!(p.gamma1_vertices().is_empty());
        let b = run(&g, &weak_params(), Mode::Build, &VertexSet::new()).unwrap();
        assert_eq!(b.output().as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn coverage_for_arbitrary_inputs() {
        // T subset of I subset of C must hold for every input, independent or not
        let g = Hypergraph::build(
            6,
            3,
            &[vec![1, 2, 3], vec![2, 3, 4], vec![3, 5, 6], vec![1, 4, 5]],
        )
        .unwrap();
        let params = weak_params();
        for mask in 0u32..64 {
            let i: VertexSet = (1..=6u16).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
            let (p, b) = prune_then_build(&g, &params, &i).unwrap();
            assert!(p.t.is_subset_of(&i));
            assert!(i.is_subset_of(b.output()));
        }
    }

    #[test]
    fn gamma_scan_modes_agree() {
        let g = Hypergraph::build(
            7,
            3,
            &[
                vec![1, 2, 3],
                vec![2, 3, 4],
                vec![3, 5, 6],
                vec![1, 4, 7],
                vec![4, 6, 7],
            ],
        )
        .unwrap();
        for kind in [ThresholdKind::Weak, ThresholdKind::Strong] {
            let mut a = EngineParams::new(0.4_f64, 0.3, kind).unwrap();
            let mut b = a.clone();
            a.gamma_scan = GammaScan::NewlyAdded;
            b.gamma_scan = GammaScan::Literal;
            for mask in 0u32..128 {
                let i: VertexSet = (1..=7u16).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
                let ta = run(&g, &a, Mode::Prune, &i).unwrap();
                let tb = run(&g, &b, Mode::Prune, &i).unwrap();
                assert_eq!(ta.t, tb.t);
                assert_eq!(ta.p_sizes, tb.p_sizes);
                for (da, db) in ta.decisions.iter().zip(&tb.decisions) {
                    assert_eq!(da.fired, db.fired);
                    assert_eq!(da.candidate_sizes, db.candidate_sizes);
                }
                let ca = run(&g, &a, Mode::Build, &ta.t).unwrap();
                let cb = run(&g, &b, Mode::Build, &tb.t).unwrap();
                assert_eq!(ca.output(), cb.output());
            }
        }
    }

    #[test]
    fn online_examples() {
        let g = single_edge();
        let params = weak_params();
        let t = VertexSet::parse("1,2").unwrap();
        for w in 0..=3 {
            assert!(online_equality(&g, &params, &t, w).unwrap());
        }
        // w = 2 concretely: C(T) cut to [2] equals C(T cut to [2]) cut to [2]
        let full = run(&g, &params, Mode::Build, &t).unwrap();
        assert_eq!(full.output().prefix(2).as_slice(), &[1, 2]);
    }
}
