//! Immutable weighted graph with dense node ids.
//!
//! Edge weights are transmission rates: a higher weight means faster spread.
//! Unweighted inputs carry weight `1.0` on every edge. Adjacency is stored in
//! compressed sparse rows, sorted by neighbor id, so iteration order (and
//! therefore every seeded computation built on top of it) is deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::observation::InfectionSnapshot;

/// Marker for "no path" in hop-distance vectors.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// One adjacency entry. For undirected graphs both directions of an edge
/// share the same `edge` id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub to: u32,
    pub edge: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    out_arcs: Vec<Arc>,
    // only populated for directed graphs
    in_offsets: Vec<usize>,
    in_arcs: Vec<Arc>,
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// Rejects self-loops, ids `>= n`, non-positive or non-finite weights and
    /// duplicate edges. For undirected graphs `(a, b)` and `(b, a)` are the
    /// same edge and listing both is a duplicate.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (src, dst, weight) in edges {
            validate_edge(n, src, dst, weight)?;
            list.push(Edge { src, dst, weight });
        }

        let mut keys: Vec<(usize, usize)> = list
            .iter()
            .map(|e| {
                if directed {
                    (e.src, e.dst)
                } else {
                    (e.src.min(e.dst), e.src.max(e.dst))
                }
            })
            .collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }

        if list.len() > u32::MAX as usize || n > u32::MAX as usize {
            return Err(Error::param("graph too large for 32-bit ids"));
        }

        let mut out: Vec<Vec<Arc>> = vec![Vec::new(); n];
        let mut inc: Vec<Vec<Arc>> = if directed { vec![Vec::new(); n] } else { Vec::new() };
        for (id, e) in list.iter().enumerate() {
            let id = id as u32;
            out[e.src].push(Arc { to: e.dst as u32, edge: id });
            if directed {
                inc[e.dst].push(Arc { to: e.src as u32, edge: id });
            } else {
                out[e.dst].push(Arc { to: e.src as u32, edge: id });
            }
        }
        let (out_offsets, out_arcs) = flatten(out);
        let (in_offsets, in_arcs) = if directed { flatten(inc) } else { (Vec::new(), Vec::new()) };

        Ok(Graph {
            n,
            directed,
            edges: list,
            out_offsets,
            out_arcs,
            in_offsets,
            in_arcs,
        })
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted<I>(n: usize, directed: bool, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, directed, pairs.into_iter().map(|(a, b)| (a, b, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn weight(&self, id: u32) -> f64 {
        self.edges[id as usize].weight
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unit_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Arcs leaving `v` (all incident arcs for undirected graphs).
    pub fn out_arcs(&self, v: usize) -> &[Arc] {
        &self.out_arcs[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Arcs entering `v`; `to` holds the tail. For undirected graphs this is
    /// the same slice as [`Graph::out_arcs`].
    pub fn in_arcs(&self, v: usize) -> &[Arc] {
        if self.directed {
            &self.in_arcs[self.in_offsets[v]..self.in_offsets[v + 1]]
        } else {
            self.out_arcs(v)
        }
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_arcs(v).iter().map(|a| a.to as usize)
    }

    /// Parents of `v` for directed graphs, neighbors otherwise.
    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_arcs(v).iter().map(|a| a.to as usize)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn edge_between(&self, src: usize, dst: usize) -> Option<u32> {
        let arcs = self.out_arcs(src);
        arcs.binary_search_by_key(&(dst as u32), |a| a.to)
            .ok()
            .map(|i| arcs[i].edge)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_between(src, dst).is_some()
    }

    /// Same graph with every edge direction flipped. Undirected graphs are
    /// returned unchanged.
    pub fn reversed(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        Graph::from_edges(
            self.n,
            true,
            self.edges.iter().map(|e| (e.dst, e.src, e.weight)),
        )
        .expect("reversing a valid graph keeps it valid")
    }
}

fn validate_edge(n: usize, src: usize, dst: usize, weight: f64) -> Result<()> {
    if src >= n {
        return Err(Error::NodeOutOfRange { id: src, n });
    }
    if dst >= n {
        return Err(Error::NodeOutOfRange { id: dst, n });
    }
    if src == dst {
        return Err(Error::SelfLoop(src));
    }
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(Error::InvalidWeight { src, dst, weight });
    }
    Ok(())
}

fn flatten(mut lists: Vec<Vec<Arc>>) -> (Vec<usize>, Vec<Arc>) {
    let mut offsets = Vec::with_capacity(lists.len() + 1);
    let mut arcs = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    offsets.push(0);
    for list in lists.iter_mut() {
        list.sort_unstable_by_key(|a| a.to);
        arcs.extend_from_slice(list);
        offsets.push(arcs.len());
    }
    (offsets, arcs)
}

/// Hop distances from `source` along edge direction.
pub fn hop_distances(g: &Graph, source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for a in g.out_arcs(v) {
            let w = a.to as usize;
            if dist[w] == UNREACHABLE {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Disk `D(center, radius) = {j : d(center, j) < radius}`, sorted.
pub fn disk(g: &Graph, center: usize, radius: u32) -> Vec<usize> {
    let mut members = Vec::new();
    if radius == 0 {
        return members;
    }
    let mut dist = vec![UNREACHABLE; g.node_count()];
    let mut queue = VecDeque::new();
    dist[center] = 0;
    queue.push_back(center);
    while let Some(v) = queue.pop_front() {
        members.push(v);
        let next = dist[v] + 1;
        if next >= radius {
            continue;
        }
        for w in g.out_neighbors(v) {
            if dist[w] == UNREACHABLE {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    members.sort_unstable();
    members
}

/// Weakly connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut label = vec![usize::MAX; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        label[start] = id;
        stack.push(start);
        while let Some(v) = stack.pop() {
            let both = g.out_neighbors(v).chain(g.in_neighbors(v));
            for w in both {
                if label[w] == usize::MAX {
                    label[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Longest finite shortest-path hop distance over all ordered pairs. For a
/// disconnected graph this is the maximum over its components.
pub fn diameter(g: &Graph) -> u32 {
    (0..g.node_count())
        .map(|s| {
            hop_distances(g, s)
                .into_iter()
                .filter(|&d| d != UNREACHABLE)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Subgraph induced by a node set, with the mapping back to original ids.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[new_id]` is the id in the parent graph.
    pub original: Vec<usize>,
}

impl InducedSubgraph {
    /// Inverse of `original`: parent id to subgraph id.
    pub fn local_id(&self, parent_id: usize) -> Option<usize> {
        self.original.binary_search(&parent_id).ok()
    }
}

/// Subgraph over the infected nodes keeping only edges with both endpoints
/// infected. Weights are preserved.
pub fn induced_infected_subgraph(g: &Graph, snap: &InfectionSnapshot) -> Result<InducedSubgraph> {
    if snap.is_empty() {
        return Err(Error::EmptyInfectedSet);
    }
    snap.validate(g.node_count())?;
    induced_subgraph(g, snap.infected())
}

/// Subgraph induced by a sorted, deduplicated node list.
pub fn induced_subgraph(g: &Graph, nodes: &[usize]) -> Result<InducedSubgraph> {
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in nodes.iter().enumerate() {
        if v >= g.node_count() {
            return Err(Error::NodeOutOfRange { id: v, n: g.node_count() });
        }
        local[v] = i;
    }
    let edges = g.edges().iter().filter_map(|e| {
        let (a, b) = (local[e.src], local[e.dst]);
        (a != usize::MAX && b != usize::MAX).then_some((a, b, e.weight))
    });
    let graph = Graph::from_edges(nodes.len(), g.is_directed(), edges)?;
    Ok(InducedSubgraph {
        graph,
        original: nodes.to_vec(),
    })
}
