//! Immutable undirected simple graphs in compressed adjacency form.
//!
//! Vertex ids are dense and 0-based. A [`Graph`] built through [`Graph::from_edges`]
//! or [`load_graph`] is always connected; induced subgraphs are not required to be.

use std::collections::VecDeque;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::dense::DenseSymMatrix;
use crate::error::{Error, Result};

pub type VertexId = usize;

/// Sorted, duplicate-free list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_unsorted<I: IntoIterator<Item = VertexId>>(ids: I) -> Self {
        let mut v: Vec<VertexId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    /// Normalizes `ids` and rejects any id `>= n`.
    pub fn checked<I: IntoIterator<Item = VertexId>>(ids: I, n: usize) -> Result<Self> {
        let set = Self::from_unsorted(ids);
        match set.0.last() {
            Some(&max) if max >= n => Err(Error::OutOfRange { vertex: max, n }),
            _ => Ok(set),
        }
    }

    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` within the set.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.intersection(other).is_empty()
    }
}

impl From<Vec<VertexId>> for VertexSet {
    fn from(v: Vec<VertexId>) -> Self {
        Self::from_unsorted(v)
    }
}

impl From<VertexSet> for Vec<VertexId> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        Self::from_unsorted(iter)
    }
}

/// Undirected simple graph, adjacency in CSR layout with sorted rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    edge_count: usize,
}

impl Graph {
    /// Builds a connected simple graph on `n` vertices. Duplicate and mirrored
    /// edges collapse into one.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let g = Self::build(n, edges)?;
        let components = g.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    /// Same as [`Graph::from_edges`] but tolerates several components.
    pub fn from_edges_allow_disconnected(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        Self::build(n, edges)
    }

    fn build(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut rows: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(Error::OutOfRange { vertex: w, n });
                }
            }
            rows[u].push(v);
            rows[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(&row);
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Ok(Self {
            offsets,
            targets,
            edge_count,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Open neighbourhood of `v`, sorted. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check(v)?;
        Ok(self.neighbors(v).len())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Vertices within `radius` hops of `v`, excluding `v` itself.
    pub fn neighborhood(&self, v: VertexId, radius: usize) -> Result<VertexSet> {
        self.check(v)?;
        if radius == 1 {
            return Ok(VertexSet(self.neighbors(v).to_vec()));
        }
        let mut seen = vec![v];
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in self.neighbors(u) {
                    if !seen.contains(&w) {
                        seen.push(w);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen.swap_remove(0);
        Ok(VertexSet::from_unsorted(seen))
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut label = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] {
                continue;
            }
            components += 1;
            label[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if !label[w] {
                        label[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Subgraph induced by `vs`; local vertex `i` is global vertex `vs[i]`.
    pub fn induced_subgraph(&self, vs: &VertexSet) -> Result<InducedSubgraph> {
        if vs.is_empty() {
            return Err(Error::EmptySet);
        }
        let n = self.vertex_count();
        let mut local = vec![usize::MAX; n];
        for (i, v) in vs.iter().enumerate() {
            self.check(v)?;
            local[v] = i;
        }
        let mut offsets = Vec::with_capacity(vs.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in vs.iter() {
            // global rows are sorted and `local` is monotone on vs, so rows stay sorted
            targets.extend(
                self.neighbors(v)
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w])),
            );
            offsets.push(targets.len());
        }
        let edge_count = targets.len() / 2;
        Ok(InducedSubgraph {
            graph: Graph {
                offsets,
                targets,
                edge_count,
            },
            global_ids: vs.clone(),
        })
    }

    /// Dense combinatorial Laplacian `L = D - A`.
    pub fn laplacian(&self) -> DenseSymMatrix {
        let n = self.vertex_count();
        let mut l = DenseSymMatrix::zeros(n);
        for u in 0..n {
            let nb = self.neighbors(u);
            l.add_diag(u, nb.len() as f64);
            for &v in nb {
                if v > u {
                    l.set_sym(u, v, -1.0);
                }
            }
        }
        l
    }

    /// Sparse adjacency product `A x`.
    pub fn adjacency_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.vertex_count());
        (0..self.vertex_count())
            .map(|u| self.neighbors(u).iter().map(|&v| x[v]).sum())
            .collect()
    }
}

/// Induced subgraph together with its local-to-global index map.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    pub global_ids: VertexSet,
}

impl InducedSubgraph {
    pub fn to_global(&self, local: usize) -> VertexId {
        self.global_ids.as_slice()[local]
    }

    pub fn to_local(&self, global: VertexId) -> Option<usize> {
        self.global_ids.index_of(global)
    }
}

/// Reads a whitespace-separated `u v` edge list. Blank lines and `#` comments
/// are skipped; the vertex count is one more than the largest id seen.
pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id: Option<VertexId> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<VertexId> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            tok.parse::<VertexId>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {tok:?}"),
            })
        };
        let u = parse(fields.next())?;
        let v = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected exactly two vertex ids".into(),
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = max_id.map(|m| m + 1).ok_or_else(|| Error::Parse {
        line: 0,
        message: "edge list contains no edges".into(),
    })?;
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
    pub fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
    }
}
