//! Additive quadruples in {1..n}: the 4-graph whose edges are the
//! four-element sets {w,x,y,z} with w+x = y+z, exact counting oracles for
//! sets with all pairwise sums distinct, the per-stage tau schedule, and the
//! container pipeline with its counting bound.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::iterate::{canonical_zeta, collect_containers, iterate_scheduled, ContainerCollection};
use crate::report::{Check, Report};
use crate::scalar::binomial;
use crate::set::{Vertex, VertexSet};

const GRAPH_GUARD: u64 = 300;
const BRUTE_GUARD: u64 = 30;

/// The additive 4-graph on {1..n}, edges grouped by pair sum. Two distinct
/// pairs with the same sum are automatically disjoint, and a 4-set supports
/// at most one balanced pairing, so no duplicates arise.
pub fn build_sidon_graph(n: u64) -> Result<Hypergraph> {
    if n < 4 {
        return Err(Error::invalid(format!(
            "need at least four elements, got {n}"
        )));
    }
    if n > GRAPH_GUARD {
        return Err(Error::scale(format!(
            "additive 4-graph limited to n <= {GRAPH_GUARD}"
        )));
    }
    let mut by_sum: Vec<Vec<(u32, u32)>> = vec![Vec::new(); (2 * n + 1) as usize];
    for x in 1..=n as u32 {
        for y in x + 1..=n as u32 {
            by_sum[(x + y) as usize].push((x, y));
        }
    }
    let mut edges: Vec<Vec<u32>> = Vec::new();
    for pairs in &by_sum {
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                let mut e = vec![a, b, c, d];
                e.sort_unstable();
                edges.push(e);
            }
        }
    }
    Hypergraph::build(n as u32, 4, &edges)
}

/// Direct scan over all 4-subsets; cross-checks the sum-grouped builder.
pub fn count_edges_by_scan(n: u64) -> Result<u64> {
    if n > 50 {
        return Err(Error::scale(
            "direct 4-subset scan limited to n <= 50".to_string(),
        ));
    }
    let mut count = 0u64;
    for w in 1..=n {
        for x in w + 1..=n {
            for y in x + 1..=n {
                for z in y + 1..=n {
                    // any of the three pairings balanced?
                    if w + x == y + z || w + y == x + z || w + z == x + y {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Difference statistics of a set U: t_i counts the pairs at difference i.
#[derive(Debug, Clone)]
pub struct DifferenceCounts {
    pub t: Vec<u64>,
    /// three-term progressions x, x+i, x+2i inside U, per difference i
    pub chains: Vec<u64>,
}

pub fn difference_counts(u: &VertexSet) -> DifferenceCounts {
    let members: Vec<u64> = u.iter().map(|v| v as u64).collect();
    let max = members.last().copied().unwrap_or(0);
    let mut t = vec![0u64; max as usize + 1];
    let mut chains = vec![0u64; max as usize + 1];
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            t[(b - a) as usize] += 1;
        }
    }
    for &a in &members {
        for i in 1..=max {
            if a + 2 * i > max {
                break;
            }
            if u.contains((a + i) as Vertex) && u.contains((a + 2 * i) as Vertex) {
                chains[i as usize] += 1;
            }
        }
    }
    DifferenceCounts { t, chains }
}

/// The display count: half the number of pair-of-pair coincidences,
/// sum of C(t_i, 2) over differences, halved. Counts pairs sharing an
/// element as well, so it overshoots the 4-distinct edge count.
pub fn pairing_formula_count(diffs: &DifferenceCounts) -> f64 {
    diffs.t.iter().map(|&t| binomial(t, 2) as f64).sum::<f64>() / 2.0
}

/// Edge count recovered from difference statistics with the overlapping
/// pairs removed: (sum C(t_i,2) - sum chains_i) / 2.
pub fn corrected_formula_count(diffs: &DifferenceCounts) -> u64 {
    let pairs: u64 = diffs.t.iter().map(|&t| binomial(t, 2) as u64).sum();
    let overlaps: u64 = diffs.chains.iter().sum();
    (pairs - overlaps) / 2
}

/// All pairwise sums distinct, repeated elements included: {1,2,3} fails
/// through 1+3 = 2+2.
pub fn is_sidon(s: &VertexSet) -> bool {
    let members: Vec<u64> = s.iter().map(|v| v as u64).collect();
    let mut sums = std::collections::HashSet::new();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i..] {
            if !sums.insert(a + b) {
                return false;
            }
        }
    }
    true
}

/// Exact count of such sets in {1..n} (empty set included), by backtracking
/// over increasing elements with the running pairwise-sum set.
pub fn count_sidon_brute(n: u64) -> Result<u128> {
    if n > BRUTE_GUARD {
        return Err(Error::scale(format!(
            "exact counting limited to n <= {BRUTE_GUARD}"
        )));
    }
    fn recurse(next: u64, n: u64, chosen: &mut Vec<u64>, sums: &mut Vec<u64>) -> u128 {
        if next > n {
            return 1;
        }
        // skip `next`
        let mut total = recurse(next + 1, n, chosen, sums);
        // take `next` when all new sums are fresh
        let mut new_sums: Vec<u64> = chosen.iter().map(|&a| a + next).collect();
        new_sums.push(2 * next);
        new_sums.sort_unstable();
        let fresh = new_sums.windows(2).all(|w| w[0] != w[1])
            && new_sums.iter().all(|s| sums.binary_search(s).is_err());
        if fresh {
            let mut merged = Vec::with_capacity(sums.len() + new_sums.len());
            merged.extend_from_slice(sums);
            merged.extend_from_slice(&new_sums);
            merged.sort_unstable();
            chosen.push(next);
            total += recurse(next + 1, n, chosen, &mut merged);
            chosen.pop();
        }
        total
    }
    Ok(recurse(1, n, &mut Vec::new(), &mut Vec::new()))
}

/// Seeded random such sets: a shuffled greedy pass per sample, deduplicated.
pub fn sample_sidon_sets(n: u64, count: usize, seed: u64) -> Vec<VertexSet> {
    let mut out = std::collections::BTreeSet::new();
    for s in 0..count as u64 {
        let mut rng = crate::prng::SplitMix64::derive(seed, s);
        let mut order: Vec<u64> = (1..=n).collect();
        for pos in (1..order.len()).rev() {
            let j = rng.next_below(pos as u64 + 1) as usize;
            order.swap(pos, j);
        }
        let keep = rng.next_below(n) + 1;
        let mut set = VertexSet::new();
        for &x in order.iter().take(keep as usize) {
            let mut candidate = set.clone();
            candidate.insert(x as Vertex);
            if is_sidon(&candidate) {
                set = candidate;
            }
        }
        out.insert(set);
    }
    out.into_iter().collect()
}

/// All such sets, for families at desk scale.
pub fn enumerate_sidon_sets(n: u64) -> Result<Vec<VertexSet>> {
    if n > 24 {
        return Err(Error::scale("enumeration limited to n <= 24".to_string()));
    }
    let mut out = Vec::new();
    let mut chosen: Vec<u64> = Vec::new();
    fn recurse(next: u64, n: u64, chosen: &mut Vec<u64>, out: &mut Vec<VertexSet>) {
        if next > n {
            out.push(chosen.iter().map(|&v| v as Vertex).collect());
            return;
        }
        recurse(next + 1, n, chosen, out);
        chosen.push(next);
        let candidate: VertexSet = chosen.iter().map(|&v| v as Vertex).collect();
        if is_sidon(&candidate) {
            recurse(next + 1, n, chosen, out);
        }
        chosen.pop();
    }
    recurse(1, n, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

/// Largest such set in {1..n}.
pub fn max_sidon_size(n: u64) -> Result<usize> {
    if n > BRUTE_GUARD {
        return Err(Error::scale(format!(
            "exact maximum limited to n <= {BRUTE_GUARD}"
        )));
    }
    fn recurse(next: u64, n: u64, chosen: &mut Vec<u64>, best: &mut usize) {
        if next > n {
            *best = (*best).max(chosen.len());
            return;
        }
        if chosen.len() + (n - next + 1) as usize <= *best {
            return;
        }
        chosen.push(next);
        let candidate: VertexSet = chosen.iter().map(|&v| v as Vertex).collect();
        if is_sidon(&candidate) {
            recurse(next + 1, n, chosen, best);
        }
        chosen.pop();
        recurse(next + 1, n, chosen, best);
    }
    let mut best = 0;
    recurse(1, n, &mut Vec::new(), &mut best);
    Ok(best)
}

/// Per-stage tau: max(24 k u^2 / m, (4 k u / m)^(1/3)) with k = 288,
/// u = |U| and m the induced edge count. Both branch values are returned.
#[derive(Debug, Clone, Copy)]
pub struct TauSchedule {
    pub quadratic_branch: f64,
    pub cube_root_branch: f64,
}

impl TauSchedule {
    pub fn value(&self) -> f64 {
        self.quadratic_branch.max(self.cube_root_branch)
    }
}

pub const SCHEDULE_K: u64 = 288;

pub fn tau_schedule(graph: &Hypergraph) -> Result<TauSchedule> {
    let m = graph.edge_count();
    if m == 0 {
        return Err(Error::DegenerateInstance {
            quantity: "tau schedule",
        });
    }
    let u = graph.vertex_count() as f64;
    let k = SCHEDULE_K as f64;
    Ok(TauSchedule {
        quadratic_branch: 24.0 * k * u * u / m as f64,
        cube_root_branch: (4.0 * k * u / m as f64).cbrt(),
    })
}

/// Nominal pipeline constants: beta and the edge target beta^4 n / 20.
pub const BETA_DEFAULT: f64 = 3e14;

pub fn default_edge_target(n: u64, beta: f64) -> f64 {
    beta.powi(4) * n as f64 / 20.0
}

#[derive(Debug, Clone)]
pub struct SidonPipeline {
    pub n: u64,
    pub edge_count: u64,
    pub edge_target: u64,
    pub exact_count: Option<u128>,
    /// exact maximum set size when within the brute-force guard
    pub max_size: Option<usize>,
    pub family_size: usize,
    pub family_exhaustive: bool,
    pub collection: ContainerCollection,
    /// present only when the maximum size is exact
    pub log2_count_bound: Option<f64>,
    pub report: Report,
}

/// Container pipeline: the scheduled strong chain over the family of all
/// pairwise-sum-distinct sets, with the counting bound
/// log2(#collection) + log2(# subsets of the largest container up to the
/// maximum set size) compared against the exact count.
///
/// At desk scale the schedule hypotheses fail immediately (the nominal
/// constants need astronomically many edges), which the report records; the
/// resulting trivial containers still cover everything and the bound is
/// still valid, just slack.
pub fn sidon_container_pipeline(n: u64, edge_target: u64) -> Result<SidonPipeline> {
    let graph = build_sidon_graph(n)?;
    let mut report = Report::new();
    // the nominal edge lower bound u^4/(20 n) is flagged, not asserted: it
    // only kicks in for large sets
    let u = graph.vertex_count() as f64;
    let nominal_lower = u.powi(4) / (20.0 * n as f64);
    if (graph.edge_count() as f64) < nominal_lower {
        report.flag(format!(
            "edge count {} below the nominal lower bound {nominal_lower:.1} (small-range regime)",
            graph.edge_count()
        ));
    }
    let family_exhaustive = n <= 20;
    let family = if family_exhaustive {
        enumerate_sidon_sets(n)?
    } else {
        sample_sidon_sets(n, 200, 0x51d0 + n)
    };
    let zeta = canonical_zeta::<f64>(4);
    let (collection, collect_report) = collect_containers(&family, |member| {
        iterate_scheduled(
            &graph,
            edge_target,
            zeta,
            |g| tau_schedule(g).map(|t| t.value()),
            member,
        )
    })?;
    report.merge(collect_report);

    for entry in &collection.entries {
        let inside = graph.edges_within(&entry.container);
        if inside > edge_target {
            report.flag(format!(
                "container for T={} keeps {inside} edges above the target {edge_target}",
                entry.fingerprint
            ));
        }
    }

    let exact_count = if n <= BRUTE_GUARD {
        Some(count_sidon_brute(n)?)
    } else {
        None
    };
    let max_size = if n <= BRUTE_GUARD {
        Some(max_sidon_size(n)?)
    } else {
        None
    };
    // the counting bound needs the exact maximum size as the subset cap,
    // and it is only a proof when every set generated its own container
    let log2_count_bound = max_size.map(|cap| {
        let max_container = collection.max_container_size() as u64;
        let subsets: u128 = (0..=cap as u64).map(|j| binomial(max_container, j)).sum();
        let bound = (collection.len() as f64).log2() + (subsets as f64).log2();
        match exact_count {
            Some(count) if family_exhaustive => {
                report.push(Check::ge(
                    "count-bound-dominates",
                    bound,
                    (count as f64).log2(),
                ));
                let exact_ok = count <= (collection.len() as u128).saturating_mul(subsets);
                report.push(Check::bool("count-bound-exact", exact_ok));
            }
            _ => {
                report.flag(format!(
                    "count bound {bound:.3} from a sampled family: reported, not asserted"
                ));
            }
        }
        bound
    });

    Ok(SidonPipeline {
        n,
        edge_count: graph.edge_count(),
        edge_target,
        exact_count,
        max_size,
        family_size: family.len(),
        family_exhaustive,
        collection,
        log2_count_bound,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts_small() {
        assert_eq!(build_sidon_graph(4).unwrap().edge_count(), 1);
        assert_eq!(build_sidon_graph(6).unwrap().edge_count(), 7);
        // the single edge at n = 4
        let g = build_sidon_graph(4).unwrap();
        let e: Vec<_> = g.edges().collect();
        assert_eq!(e[0], &[1, 2, 3, 4]);
    }

    #[test]
    fn grouped_matches_scan() {
        for n in 4..=24u64 {
            assert_eq!(
                build_sidon_graph(n).unwrap().edge_count(),
                count_edges_by_scan(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn difference_formula_discrepancy_at_six() {
        // the raw pairing display gives 10 at n = 6; the true edge count is 7
        let u = VertexSet::range(6);
        let diffs = difference_counts(&u);
        assert_eq!(pairing_formula_count(&diffs), 10.0);
        assert_eq!(corrected_formula_count(&diffs), 7);
        assert_eq!(build_sidon_graph(6).unwrap().edge_count(), 7);
    }

    #[test]
    fn corrected_formula_matches_everywhere() {
        for n in 4..=40u64 {
            let g = build_sidon_graph(n).unwrap();
            let diffs = difference_counts(&VertexSet::range(n as Vertex));
            assert_eq!(corrected_formula_count(&diffs), g.edge_count(), "n={n}");
        }
    }

    #[test]
    fn difference_count_total() {
        let u = VertexSet::parse("1,3,4,7,9").unwrap();
        let diffs = difference_counts(&u);
        let total: u64 = diffs.t.iter().sum();
        assert_eq!(total, binomial(5, 2) as u64);
    }

    #[test]
    fn sidon_membership() {
        assert!(!is_sidon(&VertexSet::parse("1,2,3").unwrap()));
        assert!(is_sidon(&VertexSet::parse("1,2,5,11").unwrap()));
        assert!(is_sidon(&VertexSet::new()));
    }

    #[test]
    fn count_four_is_thirteen() {
        assert_eq!(count_sidon_brute(4).unwrap(), 13);
        // all sixteen subsets except {1,2,3}, {2,3,4}, {1,2,3,4}
        let sets = enumerate_sidon_sets(4).unwrap();
        assert_eq!(sets.len(), 13);
        assert!(!sets.contains(&VertexSet::parse("1,2,3").unwrap()));
        assert!(!sets.contains(&VertexSet::parse("2,3,4").unwrap()));
    }

    #[test]
    fn backtracking_matches_naive() {
        for n in 1..=12u64 {
            let fast = count_sidon_brute(n).unwrap();
            let mut slow = 0u128;
            for mask in 0u64..(1 << n) {
                let s: VertexSet = (1..=n as u16)
                    .filter(|&v| mask & (1 << (v - 1)) != 0)
                    .collect();
                if is_sidon(&s) {
                    slow += 1;
                }
            }
            assert_eq!(fast, slow, "n={n}");
        }
    }

    #[test]
    fn independence_strictly_weaker() {
        for n in 4..=12u64 {
            let g = build_sidon_graph(n).unwrap();
            // every pairwise-sum-distinct set is independent
            for s in enumerate_sidon_sets(n).unwrap() {
                assert!(g.independence_and_sparsity(&s).is_independent);
            }
            // the witness is independent but not pairwise-sum-distinct
            let witness = VertexSet::parse("1,2,3").unwrap();
            assert!(g.independence_and_sparsity(&witness).is_independent);
            assert!(!is_sidon(&witness));
        }
    }

    #[test]
    fn schedule_values() {
        let g = build_sidon_graph(12).unwrap();
        let t = tau_schedule(&g).unwrap();
        let m = g.edge_count() as f64;
        assert_eq!(t.quadratic_branch, 24.0 * 288.0 * 144.0 / m);
        assert_eq!(t.cube_root_branch, (4.0 * 288.0 * 12.0 / m).cbrt());
        // both branches shrink as the edge count grows
        let g2 = build_sidon_graph(24).unwrap();
        let t2 = tau_schedule(&g2).unwrap();
        assert!(g2.edge_count() > g.edge_count());
        let _ = t2;
    }

    #[test]
    fn default_target_is_vacuous_at_desk_scale() {
        let g = build_sidon_graph(20).unwrap();
        assert!(default_edge_target(20, BETA_DEFAULT) > g.edge_count() as f64);
    }

    #[test]
    fn pipeline_bound_dominates() {
        let out = sidon_container_pipeline(10, 2).unwrap();
        let count = out.exact_count.unwrap();
        assert!(out.family_exhaustive);
        assert!(out.log2_count_bound.unwrap() >= (count as f64).log2());
        assert!(out
            .report
            .checks
            .iter()
            .any(|c| c.name == "count-bound-dominates" && c.ok()));
        // the schedule hypotheses fail at this scale and are reported
        assert!(!out.report.flags.is_empty());
    }

    #[test]
    fn pipeline_samples_above_the_enumeration_guard() {
        let out = sidon_container_pipeline(26, 50).unwrap();
        assert!(!out.family_exhaustive);
        assert!(out.family_size > 0);
        // still within the brute-force guard: count and maximum exist, the
        // bound is reported through a flag rather than asserted
        assert!(out.exact_count.is_some());
        assert!(out
            .report
            .flags
            .iter()
            .any(|f| f.contains("sampled family")));
    }

    #[test]
    fn sampled_sets_are_valid() {
        for s in sample_sidon_sets(30, 25, 9) {
            assert!(is_sidon(&s));
        }
    }
}
