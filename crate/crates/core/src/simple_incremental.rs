//! Simple-incremental reachability trees (`si:<R|nR>:<SF|nSF>:<ratio>`).
//!
//! Keeps an arbitrary reachability tree rooted at the source. Insertions grow
//! the tree by BFS from the newly reachable head. Deleting a tree edge marks
//! the subtree below it unknown and re-certifies each member by a backward BFS
//! that stops at the first vertex known to be reachable. Subtrees larger than
//! `ratio * n` are rebuilt from scratch instead.

use std::collections::VecDeque;
use std::fmt;

use crate::algorithm::{Counters, EdgeRef, SsrAlgorithm};
use crate::graph::{DiGraph, EdgeId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Reachable,
    Unreachable,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiParams {
    /// Process the affected vertices in reverse preorder.
    pub reverse: bool,
    /// Start a forward BFS from every re-certified vertex.
    pub forward_search: bool,
    /// Rebuild from scratch when the affected subtree exceeds `ratio * n`.
    pub ratio: f64,
}

impl fmt::Display for SiParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "si:{}:{}:{}",
            if self.reverse { "R" } else { "nR" },
            if self.forward_search { "SF" } else { "nSF" },
            self.ratio
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TreeLink {
    edge: EdgeId,
    parent: VertexId,
}

#[derive(Clone, Debug)]
pub struct SimpleIncremental {
    source: VertexId,
    params: SiParams,
    status: Vec<Status>,
    tree: Vec<Option<TreeLink>>,
    children: Vec<Vec<VertexId>>,
    child_pos: Vec<u32>,
    // scratch for the backward searches
    stamp: Vec<u32>,
    epoch: u32,
    toward: Vec<Option<(EdgeId, VertexId)>>,
}

impl SimpleIncremental {
    pub fn new(source: VertexId, params: SiParams) -> Self {
        SimpleIncremental {
            source,
            params,
            status: Vec::new(),
            tree: Vec::new(),
            children: Vec::new(),
            child_pos: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            toward: Vec::new(),
        }
    }

    pub fn params(&self) -> SiParams {
        self.params
    }

    pub fn status(&self, v: VertexId) -> Status {
        self.status[v.index()]
    }

    /// Tree edge certifying `v`, if `v` is reachable and not the source.
    pub fn tree_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.tree[v.index()].map(|l| l.edge)
    }

    pub fn tree_parent(&self, v: VertexId) -> Option<VertexId> {
        self.tree[v.index()].map(|l| l.parent)
    }

    /// Checks the tree against the graph: every reachable non-source vertex
    /// hangs off a live edge from a reachable parent, parent chains end at the
    /// source, and child lists mirror the parent pointers.
    pub fn check_tree(&self, graph: &DiGraph) -> Result<(), String> {
        let n = graph.vertex_count();
        for v in graph.vertices() {
            let st = self.status[v.index()];
            if st == Status::Unknown {
                return Err(format!("{v} left unknown"));
            }
            match (self.tree[v.index()], st) {
                (None, Status::Reachable) if v != self.source => return Err(format!("reachable {v} has no tree edge")),
                (Some(_), _) if v == self.source => return Err("source has a tree edge".into()),
                (Some(_), Status::Unreachable) => return Err(format!("unreachable {v} has a tree edge")),
                (Some(link), Status::Reachable) => {
                    if graph.endpoints(link.edge) != Some((link.parent, v)) {
                        return Err(format!("tree edge of {v} is not a live ({}, {v})", link.parent));
                    }
                    if self.status[link.parent.index()] != Status::Reachable {
                        return Err(format!("parent of {v} is not reachable"));
                    }
                    let siblings = &self.children[link.parent.index()];
                    if siblings.get(self.child_pos[v.index()] as usize) != Some(&v) {
                        return Err(format!("{v} missing from child list of {}", link.parent));
                    }
                }
                _ => {}
            }
        }
        if self.status[self.source.index()] != Status::Reachable {
            return Err("source not reachable".into());
        }
        let listed: usize = self.children.iter().map(Vec::len).sum();
        let linked = self.tree.iter().filter(|l| l.is_some()).count();
        if listed != linked {
            return Err(format!("{listed} children listed, {linked} tree edges"));
        }
        for v in graph.vertices() {
            let mut cur = v;
            let mut steps = 0;
            while let Some(link) = self.tree[cur.index()] {
                cur = link.parent;
                steps += 1;
                if steps > n {
                    return Err(format!("cycle in parent chain of {v}"));
                }
            }
            if self.status[v.index()] == Status::Reachable && cur != self.source {
                return Err(format!("parent chain of {v} ends at {cur}"));
            }
        }
        Ok(())
    }

    fn attach(&mut self, v: VertexId, edge: EdgeId, parent: VertexId) {
        debug_assert!(self.tree[v.index()].is_none());
        self.tree[v.index()] = Some(TreeLink { edge, parent });
        let list = &mut self.children[parent.index()];
        self.child_pos[v.index()] = list.len() as u32;
        list.push(v);
    }

    fn detach(&mut self, v: VertexId) {
        let Some(link) = self.tree[v.index()].take() else {
            return;
        };
        let list = &mut self.children[link.parent.index()];
        let pos = self.child_pos[v.index()] as usize;
        list.swap_remove(pos);
        if let Some(&moved) = list.get(pos) {
            self.child_pos[moved.index()] = pos as u32;
        }
    }

    fn rebuild(&mut self, graph: &DiGraph, work: &mut Counters) {
        let n = graph.vertex_count();
        self.status = vec![Status::Unreachable; n];
        self.tree = vec![None; n];
        self.children = vec![Vec::new(); n];
        self.child_pos = vec![0; n];
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.toward = vec![None; n];
            self.epoch = 0;
        }
        self.status[self.source.index()] = Status::Reachable;
        work.vertices_visited += 1;
        self.claim_forward(graph, self.source, Status::Unreachable, work);
    }

    /// BFS from `start` that claims every vertex currently in state `claimable`,
    /// marking it reachable with the discovering edge as tree edge.
    fn claim_forward(&mut self, graph: &DiGraph, start: VertexId, claimable: Status, work: &mut Counters) {
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            work.queue_pops += 1;
            let out = graph.out_edges(x);
            work.edges_scanned += out.len() as u64;
            for inc in out {
                let w = inc.other;
                if self.status[w.index()] == claimable {
                    self.status[w.index()] = Status::Reachable;
                    self.attach(w, inc.edge, x);
                    work.vertices_visited += 1;
                    queue.push_back(w);
                }
            }
        }
    }

    /// Preorder of the subtree rooted at `root`, or `None` once it grows past `limit`.
    fn collect_subtree(&self, root: VertexId, limit: usize, work: &mut Counters) -> Option<Vec<VertexId>> {
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            order.push(x);
            work.queue_pops += 1;
            if order.len() > limit {
                return None;
            }
            stack.extend(self.children[x.index()].iter().rev());
        }
        Some(order)
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Backward BFS from the unknown vertex `w` through unknown vertices. On
    /// reaching a reachable vertex the discovery path is attached to the tree
    /// and `true` is returned; otherwise every vertex seen is marked unreachable.
    fn recertify(&mut self, graph: &DiGraph, w: VertexId, work: &mut Counters) -> bool {
        let epoch = self.next_epoch();
        self.stamp[w.index()] = epoch;
        self.toward[w.index()] = None;
        let mut seen = vec![w];
        let mut queue = VecDeque::from([w]);
        let mut anchor = None;
        'search: while let Some(z) = queue.pop_front() {
            work.queue_pops += 1;
            for inc in graph.in_edges(z) {
                work.edges_scanned += 1;
                let y = inc.other;
                match self.status[y.index()] {
                    Status::Reachable => {
                        anchor = Some((y, inc.edge, z));
                        break 'search;
                    }
                    Status::Unreachable => {}
                    Status::Unknown => {
                        if self.stamp[y.index()] != epoch {
                            self.stamp[y.index()] = epoch;
                            self.toward[y.index()] = Some((inc.edge, z));
                            work.vertices_visited += 1;
                            seen.push(y);
                            queue.push_back(y);
                        }
                    }
                }
            }
        }

        match anchor {
            Some((x, edge, first)) => {
                // x -edge-> first -> ... -> w
                let mut parent = x;
                let mut cur = first;
                let mut via = edge;
                loop {
                    self.status[cur.index()] = Status::Reachable;
                    self.attach(cur, via, parent);
                    match self.toward[cur.index()] {
                        Some((e, next)) => {
                            parent = cur;
                            cur = next;
                            via = e;
                        }
                        None => break,
                    }
                }
                true
            }
            None => {
                for y in seen {
                    self.status[y.index()] = Status::Unreachable;
                }
                false
            }
        }
    }
}

impl SsrAlgorithm for SimpleIncremental {
    fn name(&self) -> String {
        self.params.to_string()
    }

    fn source(&self) -> VertexId {
        self.source
    }

    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters) {
        self.rebuild(graph, work);
    }

    fn edge_inserted(&mut self, graph: &DiGraph, e: EdgeRef, work: &mut Counters) {
        if self.status[e.tail.index()] != Status::Reachable || self.status[e.head.index()] == Status::Reachable {
            return;
        }
        self.status[e.head.index()] = Status::Reachable;
        self.attach(e.head, e.id, e.tail);
        work.vertices_visited += 1;
        self.claim_forward(graph, e.head, Status::Unreachable, work);
    }

    fn edge_deleted(&mut self, graph: &DiGraph, e: EdgeRef, work: &mut Counters) {
        let v = e.head;
        match self.tree[v.index()] {
            Some(link) if link.edge == e.id => {}
            _ => return,
        }
        let n = graph.vertex_count();
        // |L| > ratio * n  <=>  |L| > floor(ratio * n) for integral |L|
        let limit = (self.params.ratio * n as f64).floor() as usize;
        let Some(mut affected) = self.collect_subtree(v, limit, work) else {
            work.recomputations += 1;
            self.rebuild(graph, work);
            return;
        };

        self.detach(v);
        for &w in &affected {
            self.status[w.index()] = Status::Unknown;
            self.tree[w.index()] = None;
            self.children[w.index()].clear();
        }
        if self.params.reverse {
            affected.reverse();
        }
        for &w in &affected {
            if self.status[w.index()] != Status::Unknown {
                continue;
            }
            if self.recertify(graph, w, work) && self.params.forward_search {
                self.claim_forward(graph, w, Status::Unknown, work);
            }
        }
    }

    fn query(&mut self, _: &DiGraph, target: VertexId, _: &mut Counters) -> bool {
        self.status[target.index()] == Status::Reachable
    }
}
