//! Directed conflict graphs.
//!
//! A vertex is a (packet, requesting user) pair. There is an edge `v2 -> v1`
//! when the packet of `v1` is neither cached by the requester of `v2` nor the
//! same packet as the one `v2` asks for. [`Digraph`] is the plain graph used by
//! the solvers; [`ConflictGraph`] adds the caching semantics on top.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{requested_vertices, CachePlacement, PacketLabel, RequestMatrix, SystemParams};

/// A directed graph with a symmetric closure and a grouping of vertices into
/// classes. Classes must be independent sets; in conflict graphs they are the
/// vertices sharing one packet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    successors: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    class_count: usize,
    labels: Vec<String>,
}

impl Digraph {
    /// Graph on `order` vertices, every vertex in its own class.
    pub fn new(order: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut successors = vec![BTreeSet::new(); order];
        for (a, b) in edges {
            if a >= order || b >= order {
                return Err(Error::Parse(format!(
                    "edge {a} -> {b} outside vertex range 0..{order}"
                )));
            }
            if a == b {
                return Err(Error::Parse(format!("self-loop at vertex {a}")));
            }
            successors[a].insert(b);
        }
        let mut neighbors = vec![BTreeSet::new(); order];
        for (a, succ) in successors.iter().enumerate() {
            for &b in succ {
                neighbors[a].insert(b);
                neighbors[b].insert(a);
            }
        }
        Ok(Digraph {
            successors: successors.into_iter().map(|s| s.into_iter().collect()).collect(),
            neighbors: neighbors.into_iter().map(|s| s.into_iter().collect()).collect(),
            class_of: (0..order).collect(),
            class_count: order,
            labels: (0..order).map(|v| v.to_string()).collect(),
        })
    }

    /// Every edge in both directions.
    pub fn bidirected(order: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
        Self::new(order, edges)
    }

    pub fn complete(order: usize) -> Self {
        let edges = (0..order).flat_map(|a| (0..order).filter(move |&b| b != a).map(move |b| (a, b)));
        Self::new(order, edges).expect("valid complete graph")
    }

    pub fn cycle(order: usize) -> Self {
        Self::bidirected(order, (0..order).map(|v| (v, (v + 1) % order))).expect("valid cycle")
    }

    /// Assigns vertex classes; ids are renumbered to `0..k` in order of first
    /// appearance. Fails if two vertices of one class are adjacent.
    pub fn with_classes(mut self, classes: &[usize]) -> Result<Self> {
        if classes.len() != self.order() {
            return Err(Error::Parse(format!(
                "{} class ids for {} vertices",
                classes.len(),
                self.order()
            )));
        }
        let mut remap = BTreeMap::new();
        let mut first_seen = Vec::new();
        for &c in classes {
            let next = first_seen.len();
            if let std::collections::btree_map::Entry::Vacant(e) = remap.entry(c) {
                e.insert(next);
                first_seen.push(c);
            }
        }
        let class_of: Vec<usize> = classes.iter().map(|c| remap[c]).collect();
        for v in 0..self.order() {
            if let Some(&w) = self.neighbors[v].iter().find(|&&w| class_of[w] == class_of[v]) {
                return Err(Error::Parse(format!(
                    "vertices {v} and {w} share a class but are adjacent"
                )));
            }
        }
        self.class_count = first_seen.len();
        self.class_of = class_of;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order());
        self.labels = labels;
        self
    }

    pub fn order(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    /// Neighbors in the undirected version.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// `{v}` together with all heads of edges leaving `v`.
    pub fn closed_out_neighborhood(&self, v: usize) -> Result<BTreeSet<usize>> {
        if v >= self.order() {
            return Err(Error::Parse(format!(
                "vertex {v} outside range 0..{}",
                self.order()
            )));
        }
        let mut set: BTreeSet<usize> = self.successors[v].iter().copied().collect();
        set.insert(v);
        Ok(set)
    }

    /// The vertex classes as a partition, ordered by class id.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn has_nontrivial_classes(&self) -> bool {
        self.class_count < self.order()
    }

    /// Serializes to the edge-list text format: `#` header lines carrying the
    /// vertex count and per-vertex class and label, then one `u v` line per
    /// directed edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vertices {}", self.order());
        for v in 0..self.order() {
            let _ = writeln!(out, "# {v} class={} {}", self.class_of[v], self.labels[v]);
        }
        for (a, succ) in self.successors.iter().enumerate() {
            for b in succ {
                let _ = writeln!(out, "{a} {b}");
            }
        }
        out
    }

    /// Parses the edge-list format. Header lines are optional; without a
    /// `# vertices` line the order is one more than the largest index seen.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        let mut meta: BTreeMap<usize, (Option<usize>, String)> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {raw:?}", lineno + 1));
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let mut words = rest.splitn(2, char::is_whitespace);
                let head = words.next().unwrap_or("");
                let tail = words.next().unwrap_or("").trim();
                if head == "vertices" {
                    declared = Some(tail.parse().map_err(|_| bad("bad vertex count"))?);
                } else if let Ok(v) = head.parse::<usize>() {
                    let (class, label) = match tail.split_once(char::is_whitespace) {
                        Some((c, l)) if c.starts_with("class=") => (Some(c), l.trim()),
                        _ if tail.starts_with("class=") => (Some(tail), ""),
                        _ => (None, tail),
                    };
                    let class = class
                        .map(|c| c["class=".len()..].parse::<usize>().map_err(|_| bad("bad class id")))
                        .transpose()?;
                    meta.insert(v, (class, label.to_string()));
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let a = it.next().and_then(|x| x.parse::<usize>().ok()).ok_or_else(|| bad("bad edge"))?;
            let b = it.next().and_then(|x| x.parse::<usize>().ok()).ok_or_else(|| bad("bad edge"))?;
            if it.next().is_some() {
                return Err(bad("trailing tokens"));
            }
            edges.push((a, b));
        }
        let inferred = edges
            .iter()
            .flat_map(|&(a, b)| [a + 1, b + 1])
            .chain(meta.keys().map(|v| v + 1))
            .max()
            .unwrap_or(0);
        let order = match declared {
            Some(n) if n < inferred => {
                return Err(Error::Parse(format!(
                    "declared {n} vertices but index {} appears",
                    inferred - 1
                )))
            }
            Some(n) => n,
            None => inferred,
        };
        let mut graph = Digraph::new(order, edges)?;
        if meta.values().any(|(c, _)| c.is_some()) {
            let classes: Vec<usize> = (0..order)
                .map(|v| match meta.get(&v) {
                    Some((Some(c), _)) => *c,
                    // unclassed vertices get fresh ids past any declared one
                    _ => usize::MAX - v,
                })
                .collect();
            graph = graph.with_classes(&classes)?;
        }
        let labels = (0..order)
            .map(|v| match meta.get(&v) {
                Some((_, l)) if !l.is_empty() => l.clone(),
                _ => v.to_string(),
            })
            .collect();
        Ok(graph.with_labels(labels))
    }
}

/// A requested packet and the user requesting it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub packet: PacketLabel,
    pub user: usize,
}

/// Conflict graph of one request matrix under the combinatorial placement.
#[derive(Clone, Debug)]
pub struct ConflictGraph {
    params: SystemParams,
    packets_per_file: usize,
    vertices: Vec<Vertex>,
    packets: Vec<PacketLabel>,
    graph: Digraph,
}

impl ConflictGraph {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// `C(n, t)`, the number of packets a file is split into.
    pub fn packets_per_file(&self) -> usize {
        self.packets_per_file
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// The distinct requested packets, indexed by class id.
    pub fn packets(&self) -> &[PacketLabel] {
        &self.packets
    }

    pub fn packet_of_class(&self, class: usize) -> &PacketLabel {
        &self.packets[class]
    }

    pub fn closed_out_neighborhood(&self, v: usize) -> Result<BTreeSet<usize>> {
        self.graph.closed_out_neighborhood(v)
    }

    pub fn to_edge_list(&self) -> String {
        self.graph.to_edge_list()
    }
}

/// Builds the conflict graph. Vertices are sorted by (user, file, subset).
pub fn build_conflict_graph(placement: &CachePlacement, demands: &RequestMatrix) -> Result<ConflictGraph> {
    let pairs = requested_vertices(placement, demands)?;
    let vertices: Vec<Vertex> = pairs
        .into_iter()
        .map(|(user, packet)| Vertex { packet, user })
        .collect();
    let mut edges = Vec::new();
    for (i2, v2) in vertices.iter().enumerate() {
        for (i1, v1) in vertices.iter().enumerate() {
            if v1.packet != v2.packet && !placement.is_cached(v2.user, &v1.packet) {
                edges.push((i2, i1));
            }
        }
    }
    let packets: Vec<PacketLabel> = vertices
        .iter()
        .map(|v| v.packet.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_ids: Vec<usize> = vertices
        .iter()
        .map(|v| packets.binary_search(&v.packet).expect("packet listed"))
        .collect();
    let labels = vertices
        .iter()
        .map(|v| format!("{}@u{}", v.packet, v.user))
        .collect();
    let graph = Digraph::new(vertices.len(), edges)?
        .with_classes(&class_ids)?
        .with_labels(labels);
    // with_classes renumbers by first appearance; keep packets aligned with it
    let mut ordered = vec![None; graph.class_count()];
    for (v, vert) in vertices.iter().enumerate() {
        ordered[graph.class_of(v)].get_or_insert_with(|| vert.packet.clone());
    }
    Ok(ConflictGraph {
        params: placement.params().clone(),
        packets_per_file: placement.packets_per_file(),
        vertices,
        packets: ordered.into_iter().map(|p| p.expect("class has a vertex")).collect(),
        graph,
    })
}

/// The vertices grouped by packet.
pub fn packet_classes(graph: &ConflictGraph) -> Vec<Vec<usize>> {
    graph.digraph().classes()
}
