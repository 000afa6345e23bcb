//! Named graph families used by the command-line generator and the tests.

use crate::graph::{Graph, GraphError};

/// Complete bipartite graph `K(m,2)`: two degree-m vertices 0 and 1, and
/// `m` degree-2 vertices `2..m+2`. Requires `m >= 3` so the graph is simple
/// with minimum degree 2 and the two hubs are not forced into a multi-edge.
pub fn complete_bipartite(m: usize) -> Result<Graph, GraphError> {
    if m < 3 {
        return Err(GraphError::DegreeTooSmall {
            vertex: 0,
            degree: m,
        });
    }
    let mut edges = Vec::with_capacity(2 * m);
    for hub in 0..2 {
        for leaf in 2..m + 2 {
            edges.push((hub, leaf));
        }
    }
    Graph::new(format!("k{m}_2"), m + 2, edges)
}

/// Cycle graph on `v >= 3` vertices.
pub fn cycle(v: usize) -> Result<Graph, GraphError> {
    if v < 3 {
        return Err(GraphError::DegreeTooSmall {
            vertex: 0,
            degree: v.saturating_sub(1),
        });
    }
    let mut edges: Vec<(usize, usize)> = (0..v - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, v - 1));
    Graph::new(format!("c{v}"), v, edges)
}

/// Bowtie: two triangles {0,1,2} and {3,4,5} joined by the bridge edge
/// (2,3). Six vertices, seven edges, both cycles odd.
pub fn bowtie() -> Graph {
    Graph::new(
        "bowtie",
        6,
        vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
    )
    .expect("bowtie is a valid graph")
}
