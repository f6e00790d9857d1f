use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::scalar::{choose2, Scalar};
use crate::set::{key_of, key_unpack, nonempty_subkeys, Key, Vertex, VertexSet, MAX_KEY_LEN};

/// Hard cap on the number of indexed subsets (about e(G) * 2^r).
const INDEX_GUARD: u64 = 40_000_000;

/// Immutable r-uniform hypergraph on an ordered vertex set.
///
/// The top-level constructor produces vertex set 1..=n; induced subgraphs
/// keep their original labels and relative order, so fingerprints and prefix
/// arguments stay meaningful across iterated runs.
///
/// Degrees are indexed for every subset of every edge (any other subset has
/// degree zero). Degree arithmetic is exact integer throughout; measures are
/// produced in a caller-chosen scalar type.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    vertices: Vec<Vertex>,
    r: u32,
    edges: Vec<Vec<Vertex>>,
    // sorted by key; one entry per subset of an edge
    degree_index: Vec<(Key, u64)>,
    // edge ids containing each vertex, aligned with `vertices`
    vertex_edges: Vec<Vec<u32>>,
}

/// Codegree summary at a given tau: the per-level averages delta_j
/// (j = 2..=r) and their weighted combination delta.
#[derive(Debug, Clone)]
pub struct CodegreeBreakdown<R> {
    pub tau: R,
    /// delta_j for j = 2..=r, stored at index j-2.
    pub delta_j: Vec<R>,
    pub delta: R,
}

/// Result of inspecting a candidate set: edge count inside, independence,
/// and the degeneracy of the induced subgraph (min-degree peeling).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityInfo {
    pub is_independent: bool,
    pub edges_within: u64,
    pub degeneracy: u64,
}

impl Hypergraph {
    /// Build a hypergraph on vertex set 1..=n from the given edges.
    pub fn build(n: u32, r: u32, edges: &[Vec<u32>]) -> Result<Hypergraph> {
        if n == 0 || n > u16::MAX as u32 {
            return Err(Error::invalid(format!(
                "vertex count {n} out of range 1..=65535"
            )));
        }
        if r == 0 || r > n {
            return Err(Error::invalid(format!(
                "uniformity {r} out of range 1..={n}"
            )));
        }
        if r as usize > MAX_KEY_LEN {
            return Err(Error::scale(format!(
                "uniformity {r} exceeds supported maximum {MAX_KEY_LEN}"
            )));
        }
        let mut normalized: Vec<Vec<Vertex>> = Vec::with_capacity(edges.len());
        for edge in edges {
            let mut e: Vec<Vertex> = Vec::with_capacity(edge.len());
            for &v in edge {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, max: n });
                }
                e.push(v as Vertex);
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::RepeatedVertex { edge: e });
            }
            if e.len() != r as usize {
                return Err(Error::WrongCardinality {
                    edge: e.clone(),
                    got: e.len(),
                    expected: r as usize,
                });
            }
            normalized.push(e);
        }
        let mut sorted_view = normalized.clone();
        sorted_view.sort_unstable();
        if let Some(w) = sorted_view.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge { edge: w[0].clone() });
        }
        Self::from_parts((1..=n as Vertex).collect(), r, normalized)
    }

    fn from_parts(vertices: Vec<Vertex>, r: u32, edges: Vec<Vec<Vertex>>) -> Result<Hypergraph> {
        let subsets_per_edge = (1u64 << r) - 1;
        if edges.len() as u64 * subsets_per_edge > INDEX_GUARD {
            return Err(Error::scale(format!(
                "degree index would hold {} entries (limit {INDEX_GUARD})",
                edges.len() as u64 * subsets_per_edge
            )));
        }
        let mut keys: Vec<Key> = Vec::with_capacity(edges.len() * subsets_per_edge as usize);
        for e in &edges {
            keys.extend(nonempty_subkeys(key_of(e)));
        }
        keys.sort_unstable();
        let mut degree_index: Vec<(Key, u64)> = Vec::new();
        for k in keys {
            match degree_index.last_mut() {
                Some((prev, c)) if *prev == k => *c += 1,
                _ => degree_index.push((k, 1)),
            }
        }
        let mut vertex_edges: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
        for (id, e) in edges.iter().enumerate() {
            for &v in e {
                let pos = vertices.binary_search(&v).expect("edge vertex is a member");
                vertex_edges[pos].push(id as u32);
            }
        }
        Ok(Hypergraph {
            vertices,
            r,
            edges,
            degree_index,
            vertex_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn uniformity(&self) -> u32 {
        self.r
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::from_sorted(self.vertices.clone())
    }

    pub fn edges(&self) -> impl Iterator<Item = &[Vertex]> {
        self.edges.iter().map(|e| e.as_slice())
    }

    pub fn edge(&self, id: u32) -> &[Vertex] {
        &self.edges[id as usize]
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub(crate) fn vertex_position(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Sum of all vertex degrees, equal to r*e(G).
    pub fn total_degree(&self) -> u64 {
        self.r as u64 * self.edge_count()
    }

    /// Average degree d = r*e(G)/n.
    pub fn average_degree<R: Scalar>(&self) -> R {
        R::from_ratio(self.total_degree(), self.vertex_count() as u64)
    }

    pub(crate) fn degree_key(&self, key: Key) -> u64 {
        match self.degree_index.binary_search_by_key(&key, |&(k, _)| k) {
            Ok(pos) => self.degree_index[pos].1,
            Err(_) => 0,
        }
    }

    pub(crate) fn degree_entries(&self) -> &[(Key, u64)] {
        &self.degree_index
    }

    /// d(sigma): the number of edges containing sigma.
    pub fn degree(&self, sigma: &[Vertex]) -> Result<u64> {
        self.check_subset_arg(sigma, self.r)?;
        let mut s = sigma.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != sigma.len() {
            return Err(Error::invalid("subset has a repeated vertex".to_string()));
        }
        Ok(self.degree_key(key_of(&s)))
    }

    pub fn vertex_degree(&self, v: Vertex) -> u64 {
        match self.vertex_position(v) {
            Some(pos) => self.vertex_edges[pos].len() as u64,
            None => 0,
        }
    }

    fn check_subset_arg(&self, sigma: &[Vertex], j: u32) -> Result<()> {
        if sigma.is_empty() || sigma.len() > self.r as usize {
            return Err(Error::invalid(format!(
                "subset size {} out of range 1..={}",
                sigma.len(),
                self.r
            )));
        }
        if j > self.r {
            return Err(Error::invalid(format!(
                "superset size {j} exceeds uniformity {}",
                self.r
            )));
        }
        Ok(())
    }

    /// d^(j)(sigma): the maximum degree over j-element supersets of sigma.
    /// Zero when no edge contains sigma.
    pub fn max_superset_degree(&self, sigma: &[Vertex], j: u32) -> Result<u64> {
        self.check_subset_arg(sigma, j)?;
        if (j as usize) < sigma.len() {
            return Err(Error::invalid(format!(
                "superset size {j} below subset size {}",
                sigma.len()
            )));
        }
        let mut s = sigma.to_vec();
        s.sort_unstable();
        Ok(self.max_superset_degree_sorted(&s, j))
    }

    pub(crate) fn max_superset_degree_sorted(&self, sigma: &[Vertex], j: u32) -> u64 {
        if sigma.len() == j as usize {
            return self.degree_key(key_of(sigma));
        }
        let mut best = 0u64;
        for e in self.edges_containing(sigma) {
            let rest: Vec<Vertex> = e.iter().copied().filter(|v| !sigma.contains(v)).collect();
            let need = j as usize - sigma.len();
            for_each_combination(&rest, need, &mut |chosen| {
                let mut sup: Vec<Vertex> = sigma.to_vec();
                sup.extend_from_slice(chosen);
                sup.sort_unstable();
                let d = self.degree_key(key_of(&sup));
                if d > best {
                    best = d;
                }
            });
        }
        best
    }

    /// Edges containing all of `sigma` (sigma sorted).
    pub(crate) fn edges_containing<'a>(
        &'a self,
        sigma: &'a [Vertex],
    ) -> impl Iterator<Item = &'a [Vertex]> + 'a {
        let list: &[u32] = sigma
            .iter()
            .filter_map(|&v| self.vertex_position(v))
            .map(|pos| &self.vertex_edges[pos])
            .min_by_key(|l| l.len())
            .map(|l| l.as_slice())
            .unwrap_or(&[]);
        let complete = sigma.iter().all(|&v| self.contains_vertex(v));
        list.iter()
            .filter(move |_| complete)
            .map(|&id| self.edges[id as usize].as_slice())
            .filter(move |e| sigma.iter().all(|v| e.contains(v)))
    }

    /// Degree measure mu(S) = (1/nd) * sum of d(u) over u in S.
    pub fn mu<R: Scalar>(&self, s: &VertexSet) -> Result<R> {
        if self.edge_count() == 0 {
            return Err(Error::DegenerateInstance {
                quantity: "degree measure",
            });
        }
        let mut sum = 0u64;
        for v in s.iter() {
            if !self.contains_vertex(v) {
                return Err(Error::invalid(format!("vertex {v} is not in the graph")));
            }
            sum += self.vertex_degree(v);
        }
        Ok(R::from_ratio(sum, self.total_degree()))
    }

    /// d^(j)(v) for every vertex, j = 2..=r; one pass over the degree index.
    fn max_superset_tables(&self) -> Vec<Vec<u64>> {
        let r = self.r as usize;
        let mut tables = vec![vec![0u64; self.vertices.len()]; r + 1];
        let mut buf = [0u16; MAX_KEY_LEN];
        for &(key, d) in &self.degree_index {
            let len = key_unpack(key, &mut buf);
            let table = &mut tables[len];
            for &v in &buf[..len] {
                let pos = self.vertex_position(v).expect("indexed vertex");
                if d > table[pos] {
                    table[pos] = d;
                }
            }
        }
        tables
    }

    /// The codegree function delta(G, tau) along with its per-level parts.
    pub fn codegree_function<R: Scalar>(&self, tau: R) -> Result<CodegreeBreakdown<R>> {
        if tau <= R::zero() {
            return Err(Error::invalid("tau must be positive".to_string()));
        }
        if self.edge_count() == 0 {
            return Err(Error::DegenerateInstance {
                quantity: "codegree function",
            });
        }
        let r = self.r;
        let nd = R::from_count(self.total_degree());
        let tables = self.max_superset_tables();
        let mut delta_j = Vec::new();
        let mut delta = R::zero();
        for j in 2..=r {
            let sum: u64 = tables[j as usize].iter().sum();
            // delta_j * tau^{j-1} * nd = sum of d^(j)(v) over v
            let dj = R::from_count(sum) / (tau.powi(j as i32 - 1) * nd);
            delta = delta + R::two_pow(-choose2(j - 1)) * dj;
            delta_j.push(dj);
        }
        delta = delta * R::two_pow(choose2(r) - 1);
        Ok(CodegreeBreakdown {
            tau,
            delta_j,
            delta,
        })
    }

    /// The weak-threshold constant: the least delta with
    /// d(sigma) <= delta * d * tau^{|sigma|-1} for all sigma with |sigma| >= 2.
    pub fn weak_delta<R: Scalar>(&self, tau: R) -> Result<R> {
        if tau <= R::zero() {
            return Err(Error::invalid("tau must be positive".to_string()));
        }
        if self.edge_count() == 0 {
            return Err(Error::DegenerateInstance {
                quantity: "weak threshold constant",
            });
        }
        let d = self.average_degree::<R>();
        let mut best = R::zero();
        let mut buf = [0u16; MAX_KEY_LEN];
        for &(key, deg) in &self.degree_index {
            let len = key_unpack(key, &mut buf);
            if len < 2 {
                continue;
            }
            let val = R::from_count(deg) / (d * tau.powi(len as i32 - 1));
            if val > best {
                best = val;
            }
        }
        Ok(best)
    }

    /// Least tau (to relative tolerance 1e-9, bisection over [1e-12, 1]) with
    /// delta(G, tau) <= zeta. None when even tau = 1 fails.
    pub fn find_tau<R: Scalar>(&self, zeta: R) -> Result<Option<R>> {
        if zeta <= R::zero() {
            return Err(Error::invalid("zeta must be positive".to_string()));
        }
        let lo_bound = R::from_f64(1e-12).unwrap();
        let hi_bound = R::one();
        if self.codegree_function(hi_bound)?.delta > zeta {
            return Ok(None);
        }
        if self.codegree_function(lo_bound)?.delta <= zeta {
            return Ok(Some(lo_bound));
        }
        let (mut lo, mut hi) = (lo_bound, hi_bound);
        let rel = R::from_f64(1e-9).unwrap();
        while (hi - lo) / hi > rel {
            let mid = (lo + hi) / R::from_count(2);
            if self.codegree_function(mid)?.delta <= zeta {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }

    /// Induced subgraph on U (original labels, original order).
    pub fn induced(&self, u: &VertexSet) -> Hypergraph {
        let members: Vec<Vertex> = self
            .vertices
            .iter()
            .copied()
            .filter(|&v| u.contains(v))
            .collect();
        let keep = VertexSet::from_sorted(members.clone());
        let edges: Vec<Vec<Vertex>> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| keep.contains(v)))
            .cloned()
            .collect();
        Self::from_parts(members, self.r, edges).expect("induced subgraph within guard")
    }

    /// Edge count of the induced subgraph without materializing it.
    pub fn edges_within(&self, u: &VertexSet) -> u64 {
        self.edges
            .iter()
            .filter(|e| e.iter().all(|&v| u.contains(v)))
            .count() as u64
    }

    /// Independence, edge count and degeneracy of `G[I]`.
    ///
    /// Degeneracy peels a minimum-degree vertex at each step (smallest label
    /// on ties) and reports the largest degree seen at removal time.
    pub fn independence_and_sparsity(&self, i: &VertexSet) -> SparsityInfo {
        let members: Vec<Vertex> = self
            .vertices
            .iter()
            .copied()
            .filter(|&v| i.contains(v))
            .collect();
        let inside: Vec<&Vec<Vertex>> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| members.binary_search(&v).is_ok()))
            .collect();
        let edges_within = inside.len() as u64;
        let mut alive: FxHashMap<Vertex, u64> = members.iter().map(|&v| (v, 0)).collect();
        let mut edge_alive: Vec<bool> = vec![true; inside.len()];
        for e in &inside {
            for &v in e.iter() {
                *alive.get_mut(&v).unwrap() += 1;
            }
        }
        let mut degeneracy = 0u64;
        let mut remaining = members;
        while !remaining.is_empty() {
            let (&min_v, &min_d) = remaining
                .iter()
                .map(|v| (v, alive.get(v).unwrap()))
                .min_by_key(|&(v, d)| (*d, *v))
                .unwrap();
            degeneracy = degeneracy.max(min_d);
            for (idx, e) in inside.iter().enumerate() {
                if edge_alive[idx] && e.contains(&min_v) {
                    edge_alive[idx] = false;
                    for &w in e.iter() {
                        if w != min_v {
                            *alive.get_mut(&w).unwrap() -= 1;
                        }
                    }
                }
            }
            alive.remove(&min_v);
            remaining.retain(|&v| v != min_v);
        }
        SparsityInfo {
            is_independent: edges_within == 0,
            edges_within,
            degeneracy,
        }
    }
}

/// Visit every `k`-combination of `items` in lexicographic order.
pub(crate) fn for_each_combination<T: Copy>(items: &[T], k: usize, f: &mut impl FnMut(&[T])) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen: Vec<T> = Vec::with_capacity(k);
    loop {
        chosen.clear();
        chosen.extend(idx.iter().map(|&i| items[i]));
        f(&chosen);
        // advance
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + 1 <= items.len() - (k - pos) {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> Hypergraph {
        Hypergraph::build(3, 3, &[vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn build_single_edge() {
        let g = single_edge();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.average_degree::<f64>(), 1.0);
        assert_eq!(g.degree(&[1, 2]).unwrap(), 1);
    }

    #[test]
    fn build_rejects_bad_edges() {
        assert!(matches!(
            Hypergraph::build(3, 3, &[vec![1, 2, 2]]),
            Err(Error::RepeatedVertex { .. })
        ));
        assert!(matches!(
            Hypergraph::build(3, 3, &[vec![1, 2]]),
            Err(Error::WrongCardinality { .. })
        ));
        assert!(matches!(
            Hypergraph::build(3, 3, &[vec![1, 2, 4]]),
            Err(Error::VertexOutOfRange { vertex: 4, .. })
        ));
        assert!(matches!(
            Hypergraph::build(4, 3, &[vec![1, 2, 3], vec![3, 1, 2]]),
            Err(Error::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn triangle_degrees() {
        let g = Hypergraph::build(6, 2, &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        for v in [1, 2, 3] {
            assert_eq!(g.vertex_degree(v), 2);
        }
        for v in [4, 5, 6] {
            assert_eq!(g.vertex_degree(v), 0);
        }
        assert_eq!(g.average_degree::<f64>(), 1.0);
    }

    #[test]
    fn degree_and_max_superset() {
        let g = single_edge();
        assert_eq!(g.degree(&[1, 2]).unwrap(), 1);
        assert_eq!(g.max_superset_degree(&[1], 2).unwrap(), 1);
        let g4 = Hypergraph::build(4, 3, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(g4.degree(&[1, 4]).unwrap(), 0);
        assert!(g4.max_superset_degree(&[1], 4).is_err());
    }

    #[test]
    fn mu_values() {
        let g = single_edge();
        assert_eq!(g.mu::<f64>(&VertexSet::new()).unwrap(), 0.0);
        assert_eq!(g.mu::<f64>(&g.vertex_set()).unwrap(), 1.0);
        assert_eq!(
            g.mu::<f64>(&VertexSet::parse("1").unwrap()).unwrap(),
            1.0 / 3.0
        );
        let empty = Hypergraph::build(3, 2, &[]).unwrap();
        assert!(matches!(
            empty.mu::<f64>(&VertexSet::new()),
            Err(Error::DegenerateInstance { .. })
        ));
    }

    #[test]
    fn codegree_hand_value() {
        let g = single_edge();
        let c = g.codegree_function::<f64>(1.0).unwrap();
        assert_eq!(c.delta_j, vec![1.0, 1.0]);
        assert_eq!(c.delta, 6.0);
        // decreasing in tau
        let lo = g.codegree_function::<f64>(0.1).unwrap().delta;
        let hi = g.codegree_function::<f64>(0.2).unwrap().delta;
        assert!(lo >= hi);
    }

    #[test]
    fn codegree_against_direct_summation() {
        // direct oracle: delta_j from definition via max_superset_degree per vertex
        let g = Hypergraph::build(7, 3, &[vec![1, 2, 3], vec![4, 5, 6], vec![1, 4, 7]]).unwrap();
        let tau = 0.37;
        let c = g.codegree_function::<f64>(tau).unwrap();
        let nd = g.total_degree() as f64;
        for j in 2..=3u32 {
            let mut sum = 0u64;
            for &v in g.vertices() {
                sum += g.max_superset_degree(&[v], j).unwrap();
            }
            let expect = sum as f64 / (tau.powi(j as i32 - 1) * nd);
            let got = c.delta_j[(j - 2) as usize];
            assert!((expect - got).abs() < 1e-12);
        }
    }

    #[test]
    fn find_tau_examples() {
        let g = single_edge();
        // delta(G, 1) = 6, so zeta = 6 is satisfiable at tau ~ 1
        let t = g.find_tau::<f64>(6.0).unwrap().unwrap();
        assert!(g.codegree_function(t).unwrap().delta <= 6.0);
        if t > 1.0001e-12 {
            assert!(g.codegree_function(0.99 * t).unwrap().delta > 6.0);
        }
        // vacuous constraint returns the lower end (delta at 1e-12 is ~2e24)
        let t = g.find_tau::<f64>(1e30).unwrap().unwrap();
        assert_eq!(t, 1e-12);
        // unsatisfiable
        assert_eq!(g.find_tau::<f64>(1e-9).unwrap(), None);
    }

    #[test]
    fn weak_delta_values() {
        let g = single_edge();
        assert_eq!(g.weak_delta::<f64>(0.5).unwrap(), 4.0);
        assert_eq!(g.weak_delta::<f64>(1.0).unwrap(), 1.0);
        // matching: pairwise-disjoint edges, d(sigma) = 1 inside an edge
        let m = Hypergraph::build(6, 3, &[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let tau = 0.5;
        let d = m.average_degree::<f64>();
        assert_eq!(m.weak_delta::<f64>(tau).unwrap(), 1.0 / (d * tau * tau));
    }

    #[test]
    fn induced_examples() {
        let g = single_edge();
        let same = g.induced(&g.vertex_set());
        assert_eq!(same.edge_count(), 1);
        assert_eq!(same.vertices(), g.vertices());
        let none = g.induced(&VertexSet::new());
        assert_eq!(none.edge_count(), 0);
        assert_eq!(none.vertex_count(), 0);
        let cut = g.induced(&VertexSet::parse("1,2").unwrap());
        assert_eq!(cut.edge_count(), 0);
        assert_eq!(cut.vertices(), &[1, 2]);
    }

    #[test]
    fn induced_composes() {
        let g = Hypergraph::build(6, 2, &[vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 5]]).unwrap();
        let u = VertexSet::parse("1,2,3,4").unwrap();
        let u2 = VertexSet::parse("2,3").unwrap();
        let a = g.induced(&u).induced(&u2);
        let b = g.induced(&u2);
        assert_eq!(a.vertices(), b.vertices());
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }

    #[test]
    fn sparsity_info() {
        let g = single_edge();
        let free = g.independence_and_sparsity(&VertexSet::parse("1,2").unwrap());
        assert_eq!(
            free,
            SparsityInfo {
                is_independent: true,
                edges_within: 0,
                degeneracy: 0
            }
        );
        let full = g.independence_and_sparsity(&VertexSet::parse("1,2,3").unwrap());
        assert_eq!(
            full,
            SparsityInfo {
                is_independent: false,
                edges_within: 1,
                degeneracy: 1
            }
        );
    }

    #[test]
    fn degree_sum_identity() {
        let g = Hypergraph::build(8, 3, &[vec![1, 2, 3], vec![2, 3, 4], vec![5, 6, 7]]).unwrap();
        let total: u64 = g.vertices().iter().map(|&v| g.vertex_degree(v)).sum();
        assert_eq!(total, g.total_degree());
    }
}
