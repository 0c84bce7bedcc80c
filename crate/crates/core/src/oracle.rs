//! Brute-force reference answers, recomputed from scratch on every call.

use std::collections::VecDeque;

use crate::graph::{DiGraph, VertexId};

/// BFS distances from `source`; `None` marks unreachable vertices.
pub fn bfs_distances(graph: &DiGraph, source: VertexId) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.vertex_count()];
    dist[source.index()] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()].unwrap_or_default();
        for inc in graph.out_edges(u) {
            let w = inc.other.index();
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(inc.other);
            }
        }
    }
    dist
}

pub fn reachable_set(graph: &DiGraph, source: VertexId) -> Vec<bool> {
    bfs_distances(graph, source).into_iter().map(|d| d.is_some()).collect()
}

/// Whether a directed `source -> target` path exists. `source` always reaches itself.
pub fn oracle_reachable(graph: &DiGraph, source: VertexId, target: VertexId) -> bool {
    reachable_set(graph, source)[target.index()]
}
