use std::fmt;

use crate::error::{Error, Result};

/// Vertex label. Labels are 1-based and bounded by u16 (desk-scale guard).
pub type Vertex = u16;

/// A set of vertices kept as a strictly increasing vector of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_sorted(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        VertexSet(v)
    }

    pub fn from_unsorted(mut v: Vec<Vertex>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    /// Full range 1..=n.
    pub fn range(n: Vertex) -> Self {
        VertexSet((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: Vertex) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn remove(&mut self, v: Vertex) {
        if let Ok(pos) = self.0.binary_search(&v) {
            self.0.remove(pos);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        VertexSet(
            self.0
                .iter()
                .copied()
                .filter(|&v| other.contains(v))
                .collect(),
        )
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(
            self.0
                .iter()
                .copied()
                .filter(|&v| !other.contains(v))
                .collect(),
        )
    }

    /// Elements <= w (the prefix `[w]` of the label order).
    pub fn prefix(&self, w: Vertex) -> VertexSet {
        let cut = self.0.partition_point(|&v| v <= w);
        VertexSet(self.0[..cut].to_vec())
    }

    /// Parse "1,2,5" (empty string is the empty set).
    pub fn parse(text: &str) -> Result<VertexSet> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(VertexSet::new());
        }
        let mut v = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let x: u32 = part
                .parse()
                .map_err(|_| Error::invalid(format!("bad vertex label '{part}'")))?;
            if x == 0 || x > u16::MAX as u32 {
                return Err(Error::invalid(format!("vertex label {x} out of range")));
            }
            v.push(x as u16);
        }
        Ok(VertexSet::from_unsorted(v))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Packed key for a subset of at most 8 vertices: 16 bits per label,
/// smallest label in the least significant position. Zero is the empty set.
pub(crate) type Key = u128;

pub(crate) const MAX_KEY_LEN: usize = 8;

pub(crate) fn key_of(sorted: &[Vertex]) -> Key {
    debug_assert!(sorted.len() <= MAX_KEY_LEN);
    debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    let mut k: Key = 0;
    for (i, &v) in sorted.iter().enumerate() {
        k |= (v as Key) << (16 * i);
    }
    k
}

pub(crate) fn singleton_key(v: Vertex) -> Key {
    v as Key
}

pub(crate) fn key_len(k: Key) -> usize {
    let mut n = 0;
    let mut k = k;
    while k != 0 {
        n += 1;
        k >>= 16;
    }
    n
}

/// Unpack into the buffer; returns the number of vertices.
pub(crate) fn key_unpack(k: Key, out: &mut [Vertex; MAX_KEY_LEN]) -> usize {
    let mut n = 0;
    let mut k = k;
    while k != 0 {
        out[n] = (k & 0xffff) as Vertex;
        n += 1;
        k >>= 16;
    }
    n
}

pub(crate) fn key_min(k: Key) -> Vertex {
    debug_assert!(k != 0);
    (k & 0xffff) as Vertex
}

/// The key with its smallest vertex removed.
pub(crate) fn key_drop_min(k: Key) -> Key {
    k >> 16
}

pub(crate) fn key_to_vec(k: Key) -> Vec<Vertex> {
    let mut buf = [0u16; MAX_KEY_LEN];
    let n = key_unpack(k, &mut buf);
    buf[..n].to_vec()
}

/// All nonempty subset keys of `k` (including `k` itself).
pub(crate) fn nonempty_subkeys(k: Key) -> Vec<Key> {
    let mut buf = [0u16; MAX_KEY_LEN];
    let n = key_unpack(k, &mut buf);
    let mut out = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..(1u32 << n) {
        let mut sub: Key = 0;
        let mut shift = 0;
        for (i, &v) in buf[..n].iter().enumerate() {
            if mask & (1 << i) != 0 {
                sub |= (v as Key) << shift;
                shift += 16;
            }
        }
        out.push(sub);
    }
    out
}
