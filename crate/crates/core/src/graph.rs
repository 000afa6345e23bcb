//! Combinatorial graph model: validation, canonical edge orientation,
//! spanning-tree cycle combinatorics, bipartition, and the degree-weighted
//! vertex inner products of the refined graphs.
//!
//! Every edge is stored as `(tail, head)` with `tail < head`; the local
//! coordinate on an edge always runs from 0 at the tail to 1 at the head.
//! All downstream per-edge coefficient storage relies on this convention.

use std::collections::VecDeque;

use num_complex::Complex64;
use thiserror::Error;

use crate::sampling::{SamplingError, VertexSignal};

/// Violation report produced by graph validation. Each variant names the
/// failing invariant together with witness vertices or edges.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count must be positive")]
    NoVertices,
    #[error("edge {index} is a loop at vertex {vertex}")]
    Loop { index: usize, vertex: usize },
    #[error("edge {index} = ({tail}, {head}) violates tail < head orientation")]
    Orientation {
        index: usize,
        tail: usize,
        head: usize,
    },
    #[error("edge {index} references vertex {vertex} outside 0..{vertex_count}")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("edges {first} and {second} duplicate the pair ({tail}, {head})")]
    DuplicateEdge {
        first: usize,
        second: usize,
        tail: usize,
        head: usize,
    },
    #[error("not connected: vertex {witness} is unreachable from vertex 0")]
    NotConnected { witness: usize },
    #[error("degree < 2 at vertex {vertex} (degree {degree})")]
    DegreeTooSmall { vertex: usize, degree: usize },
}

/// A finite simple connected graph with unit edge lengths and minimum
/// degree two. Constructed through [`Graph::new`], which validates all
/// invariants, so a `Graph` in hand is always valid.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    name: String,
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// Adjacency lists as (neighbor, edge index), sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Validates and builds a graph. Edge indices are fixed by list order.
    pub fn new(
        name: impl Into<String>,
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        validate_parts(vertex_count, &edges)?;
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (index, &(tail, head)) in edges.iter().enumerate() {
            adjacency[tail].push((head, index));
            adjacency[head].push((tail, index));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            name: name.into(),
            vertex_count,
            edges,
            adjacency,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in index order, each as `(tail, head)` with `tail < head`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    /// Neighbors of `vertex` with the connecting edge index, ascending by
    /// neighbor index.
    pub fn neighbors(&self, vertex: usize) -> &[(usize, usize)] {
        &self.adjacency[vertex]
    }

    /// Number of independent cycles, `N_E - N_V + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() - self.vertex_count + 1
    }

    // ---- canonical refinement indexing -----------------------------------

    /// Number of vertices of the refinement `G_N`.
    pub fn refined_vertex_count(&self, n: usize) -> usize {
        self.vertex_count + (n - 1) * self.edges.len()
    }

    /// Canonical index of the interior sample `x_{i} = i/N` on `edge`
    /// (1 <= i <= N-1). Original vertices occupy indices `0..N_V`; interior
    /// samples follow per edge in list order, tail to head.
    pub fn interior_index(&self, edge: usize, i: usize, n: usize) -> usize {
        debug_assert!(i >= 1 && i < n);
        self.vertex_count + edge * (n - 1) + (i - 1)
    }

    /// Degree of a `G_N` vertex: original vertices keep their degree,
    /// interior samples have degree 2.
    pub fn refined_degree(&self, index: usize, _n: usize) -> usize {
        if index < self.vertex_count {
            self.degree(index)
        } else {
            2
        }
    }

    /// Total degree weight of `G_N`: `W = 2 N N_E`.
    pub fn refined_weight(&self, n: usize) -> f64 {
        (2 * n * self.edges.len()) as f64
    }

    /// Neighbors of a `G_N` vertex in canonical indexing.
    pub fn refined_neighbors(&self, index: usize, n: usize) -> Vec<usize> {
        if index < self.vertex_count {
            self.adjacency[index]
                .iter()
                .map(|&(other, edge)| {
                    if n == 1 {
                        other
                    } else if self.edges[edge].0 == index {
                        self.interior_index(edge, 1, n)
                    } else {
                        self.interior_index(edge, n - 1, n)
                    }
                })
                .collect()
        } else {
            let offset = index - self.vertex_count;
            let edge = offset / (n - 1);
            let i = offset % (n - 1) + 1;
            let (tail, head) = self.edges[edge];
            let low = if i == 1 {
                tail
            } else {
                self.interior_index(edge, i - 1, n)
            };
            let high = if i == n - 1 {
                head
            } else {
                self.interior_index(edge, i + 1, n)
            };
            vec![low, high]
        }
    }
}

/// Checks the graph invariants on raw parts and reports the first violation:
/// structural per-edge checks in file order, then duplicates, then
/// connectedness, then minimum degree.
pub fn validate_parts(vertex_count: usize, edges: &[(usize, usize)]) -> Result<(), GraphError> {
    if vertex_count == 0 {
        return Err(GraphError::NoVertices);
    }
    for (index, &(tail, head)) in edges.iter().enumerate() {
        if tail == head {
            return Err(GraphError::Loop {
                index,
                vertex: tail,
            });
        }
        if tail >= vertex_count || head >= vertex_count {
            return Err(GraphError::VertexOutOfRange {
                index,
                vertex: tail.max(head),
                vertex_count,
            });
        }
        if tail > head {
            return Err(GraphError::Orientation { index, tail, head });
        }
    }
    let mut seen = std::collections::HashMap::new();
    for (index, &pair) in edges.iter().enumerate() {
        if let Some(&first) = seen.get(&pair) {
            return Err(GraphError::DuplicateEdge {
                first,
                second: index,
                tail: pair.0,
                head: pair.1,
            });
        }
        seen.insert(pair, index);
    }
    let mut adjacency = vec![Vec::new(); vertex_count];
    for &(tail, head) in edges {
        adjacency[tail].push(head);
        adjacency[head].push(tail);
    }
    let mut visited = vec![false; vertex_count];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if !visited[u] {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    if let Some(witness) = visited.iter().position(|&r| !r) {
        return Err(GraphError::NotConnected { witness });
    }
    if let Some((vertex, list)) = adjacency.iter().enumerate().find(|(_, l)| l.len() < 2) {
        return Err(GraphError::DegreeTooSmall {
            vertex,
            degree: list.len(),
        });
    }
    Ok(())
}

/// One fundamental cycle: a directed closed vertex walk together with its
/// signed incidence vector over the edges (+1 where the walk traverses the
/// edge tail to head, -1 head to tail, 0 off the cycle).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub walk: Vec<usize>,
    pub signed_incidence: Vec<i64>,
    /// Edge index of the distinguishing non-tree edge.
    pub chord: usize,
}

/// Fundamental cycle basis relative to the deterministic BFS spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub cycles: Vec<Cycle>,
}

/// Fundamental cycle basis from the breadth-first spanning tree rooted at
/// vertex 0 (neighbor ties broken by ascending index). One cycle per
/// non-tree edge, in edge-index order; the count is `N_E - N_V + 1` and
/// cycle `j` is the only cycle containing its chord edge.
pub fn spanning_tree_cycles(graph: &Graph) -> CycleBasis {
    let nv = graph.vertex_count();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv]; // (parent vertex, edge)
    let mut depth = vec![0usize; nv];
    let mut in_tree = vec![false; graph.edge_count()];
    let mut visited = vec![false; nv];
    let mut queue = VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(u, edge) in graph.neighbors(v) {
            if !visited[u] {
                visited[u] = true;
                parent[u] = Some((v, edge));
                depth[u] = depth[v] + 1;
                in_tree[edge] = true;
                queue.push_back(u);
            }
        }
    }

    let mut cycles = Vec::with_capacity(graph.cycle_rank());
    for (chord, &(tail, head)) in graph.edges().iter().enumerate() {
        if in_tree[chord] {
            continue;
        }
        // Tree paths from both endpoints up to their lowest common ancestor.
        let (mut a, mut b) = (tail, head);
        let mut up_a: Vec<(usize, usize)> = Vec::new(); // (edge, child vertex)
        let mut up_b: Vec<(usize, usize)> = Vec::new();
        while depth[a] > depth[b] {
            let (p, e) = parent[a].expect("non-root has a parent");
            up_a.push((e, a));
            a = p;
        }
        while depth[b] > depth[a] {
            let (p, e) = parent[b].expect("non-root has a parent");
            up_b.push((e, b));
            b = p;
        }
        while a != b {
            let (pa, ea) = parent[a].expect("non-root has a parent");
            let (pb, eb) = parent[b].expect("non-root has a parent");
            up_a.push((ea, a));
            up_b.push((eb, b));
            a = pa;
            b = pb;
        }

        // Walk: tail --chord--> head, then head's path up to the meeting
        // vertex, then down the meeting-to-tail branch back to tail.
        let mut walk = vec![tail, head];
        let mut incidence = vec![0i64; graph.edge_count()];
        incidence[chord] = 1;
        for &(edge, child) in &up_b {
            let (t, h) = graph.edges()[edge];
            // Traversal goes child -> parent.
            incidence[edge] = if t == child { 1 } else { -1 };
            let p = if t == child { h } else { t };
            walk.push(p);
        }
        for &(edge, child) in up_a.iter().rev() {
            let (t, _) = graph.edges()[edge];
            // Traversal goes parent -> child.
            incidence[edge] = if t == child { -1 } else { 1 };
            walk.push(child);
        }
        debug_assert_eq!(walk.last(), Some(&tail));
        cycles.push(Cycle {
            walk,
            signed_incidence: incidence,
            chord,
        });
    }
    CycleBasis { cycles }
}

/// Proper 2-coloring of the vertices, class 0 containing vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub classes: Vec<u8>,
}

/// BFS 2-coloring; `None` when some edge joins vertices of equal parity
/// (an odd closed walk exists through that edge).
pub fn bipartition(graph: &Graph) -> Option<Bipartition> {
    let nv = graph.vertex_count();
    let mut classes = vec![u8::MAX; nv];
    classes[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in graph.neighbors(v) {
            if classes[u] == u8::MAX {
                classes[u] = 1 - classes[v];
                queue.push_back(u);
            } else if classes[u] == classes[v] {
                return None;
            }
        }
    }
    Some(Bipartition { classes })
}

/// Degree-weighted inner product on `G_N`:
/// `(1/W) sum_v deg(v) f(v) conj(g(v))` with `W = 2 N N_E`.
pub fn vertex_inner_product(
    graph: &Graph,
    f: &VertexSignal,
    g: &VertexSignal,
) -> Result<Complex64, SamplingError> {
    f.check_shape(graph)?;
    g.check_shape(graph)?;
    if f.level() != g.level() {
        return Err(SamplingError::ShapeMismatch {
            level: f.level(),
            expected: graph.refined_vertex_count(f.level()),
            got: g.values().len(),
        });
    }
    let n = f.level();
    let mut acc = Complex64::new(0.0, 0.0);
    for (index, (a, b)) in f.values().iter().zip(g.values()).enumerate() {
        acc += graph.refined_degree(index, n) as f64 * a * b.conj();
    }
    Ok(acc / graph.refined_weight(n))
}
