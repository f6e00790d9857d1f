use std::cell::RefCell;

use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::hypergraph::{for_each_combination, Hypergraph};
use crate::scalar::{choose2, Scalar};
use crate::set::{key_len, key_to_vec, Key};

/// Which threshold family governs entry into the Gamma sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    Strong,
    Weak,
}

impl std::fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdKind::Strong => write!(f, "strong"),
            ThresholdKind::Weak => write!(f, "weak"),
        }
    }
}

/// Threshold oracle for one (graph, tau, kind) triple.
///
/// Thresholds depend only on pre-run quantities, so they can be evaluated
/// lazily and memoized, or fully precomputed; `run` behaves identically
/// either way (there is an equivalence test in the engine tests).
pub struct Thresholds<'g, R: Scalar> {
    pub(crate) graph: &'g Hypergraph,
    pub(crate) tau: R,
    pub(crate) kind: ThresholdKind,
    /// weak-threshold constant delta; zero for strong kind or empty graphs
    pub(crate) weak_delta: R,
    memo: RefCell<FxHashMap<(u8, Key), R>>,
    superset_memo: RefCell<FxHashMap<Key, Vec<u64>>>,
}

impl<'g, R: Scalar> Thresholds<'g, R> {
    pub fn new(graph: &'g Hypergraph, tau: R, kind: ThresholdKind) -> Result<Self> {
        let weak_delta = match kind {
            ThresholdKind::Weak if graph.edge_count() > 0 => graph.weak_delta(tau)?,
            _ => R::zero(),
        };
        Ok(Thresholds {
            graph,
            tau,
            kind,
            weak_delta,
            memo: RefCell::new(FxHashMap::default()),
            superset_memo: RefCell::new(FxHashMap::default()),
        })
    }

    /// Evaluate every threshold up front (strict-precompute mode).
    pub fn precompute(&self) {
        let r = self.graph.uniformity();
        let keys: Vec<Key> = self
            .graph
            .degree_entries()
            .iter()
            .map(|&(k, _)| k)
            .collect();
        for key in keys {
            for s in key_len(key) as u32..r {
                let _ = self.theta_key(s, key);
            }
        }
    }

    pub fn weak_delta_value(&self) -> R {
        self.weak_delta
    }

    /// d^(j)(sigma) for j = |sigma|..=r, computed in one sweep over the
    /// edges containing sigma and memoized.
    fn superset_degrees(&self, key: Key) -> Vec<u64> {
        if let Some(v) = self.superset_memo.borrow().get(&key) {
            return v.clone();
        }
        let sigma = key_to_vec(key);
        let r = self.graph.uniformity() as usize;
        let base = sigma.len();
        let mut out = vec![0u64; r - base + 1];
        for e in self.graph.edges_containing(&sigma) {
            let rest: Vec<u16> = e.iter().copied().filter(|v| !sigma.contains(v)).collect();
            for j in base..=r {
                let need = j - base;
                let slot = j - base;
                for_each_combination(&rest, need, &mut |chosen| {
                    let mut sup = sigma.clone();
                    sup.extend_from_slice(chosen);
                    sup.sort_unstable();
                    let d = self.graph.degree_key(crate::set::key_of(&sup));
                    if d > out[slot] {
                        out[slot] = d;
                    }
                });
            }
        }
        self.superset_memo.borrow_mut().insert(key, out.clone());
        out
    }

    /// theta_s(sigma), memoized per (s, sigma).
    pub(crate) fn theta_key(&self, s: u32, key: Key) -> R {
        if let Some(&v) = self.memo.borrow().get(&(s as u8, key)) {
            return v;
        }
        let r = self.graph.uniformity();
        let size = key_len(key);
        let value = if size == 1 {
            let v = crate::set::key_min(key);
            self.tau.powi((r - s) as i32) * R::from_count(self.graph.vertex_degree(v))
        } else {
            match self.kind {
                ThresholdKind::Weak => {
                    let d = self.graph.average_degree::<R>();
                    self.weak_delta * d * self.tau.powi((r - s) as i32 + size as i32 - 1)
                }
                ThresholdKind::Strong => {
                    let sup = self.superset_degrees(key);
                    let mut sum = R::zero();
                    for ell in 0..=(r - s) {
                        let j = size as u32 + ell;
                        if j > r {
                            break;
                        }
                        let dj = R::from_count(sup[(j as usize) - size]);
                        sum =
                            sum + R::two_pow(-choose2(s + ell)) * self.tau.powi(-(ell as i32)) * dj;
                    }
                    R::two_pow(choose2(r)) * self.tau.powi((r - s) as i32) * sum
                }
            }
        };
        self.memo.borrow_mut().insert((s as u8, key), value);
        value
    }

    /// Public threshold evaluation for a subset given as vertex labels.
    pub fn theta(&self, s: u32, sigma: &[u16]) -> Result<R> {
        let r = self.graph.uniformity();
        if sigma.is_empty() || sigma.len() as u32 > s || s > r {
            return Err(crate::error::Error::invalid(format!(
                "need 1 <= |sigma| <= s <= r, got |sigma|={}, s={s}, r={r}",
                sigma.len()
            )));
        }
        let mut sorted = sigma.to_vec();
        sorted.sort_unstable();
        Ok(self.theta_key(s, crate::set::key_of(&sorted)))
    }
}

/// One-shot threshold evaluation.
pub fn theta<R: Scalar>(
    graph: &Hypergraph,
    tau: R,
    kind: ThresholdKind,
    s: u32,
    sigma: &[u16],
) -> Result<R> {
    Thresholds::new(graph, tau, kind)?.theta(s, sigma)
}
