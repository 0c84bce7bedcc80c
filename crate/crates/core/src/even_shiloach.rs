//! Even-Shiloach trees made fully dynamic: `es`, `mes` and `ses`.
//!
//! All three keep the exact BFS level of every vertex (`u32::MAX` for
//! unreachable ones). `es` and `mes` additionally keep per-vertex ordered
//! in-edge lists with an edge-to-position index and store the tree edge as a
//! position in that list; `ses` stores the tree edge directly.
//!
//! A deletion that removes a tree edge pushes the head into a FIFO repair
//! queue. Repair aborts and rebuilds from scratch when a vertex enters the
//! queue more than `beta` times or the queue yields more than `ratio * n`
//! vertices within the same deletion.

use std::collections::VecDeque;
use std::fmt;

use crate::algorithm::{Counters, EdgeRef, SsrAlgorithm};
use crate::graph::{DiGraph, EdgeId, Incidence, VertexId};

const INF: u32 = u32::MAX;
const NO_POS: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EsVariant {
    /// Classic: rescans from the tree-edge index and raises the level one step at a time.
    Classic,
    /// Multi-level: one cyclic scan per dequeued vertex picks the best tail directly.
    MultiLevel,
    /// Simplified: no ordered in-edge lists; scans the graph's in-edges.
    Simplified,
}

impl EsVariant {
    pub fn prefix(self) -> &'static str {
        match self {
            EsVariant::Classic => "es",
            EsVariant::MultiLevel => "mes",
            EsVariant::Simplified => "ses",
        }
    }
}

/// Abort thresholds; `None` means unlimited.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EsParams {
    pub beta: Option<u32>,
    pub ratio: Option<f64>,
}

impl EsParams {
    pub const UNLIMITED: EsParams = EsParams {
        beta: None,
        ratio: None,
    };
}

fn fmt_limit<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

enum Repair {
    Done,
    Abort,
}

#[derive(Clone, Debug)]
pub struct EvenShiloach {
    variant: EsVariant,
    source: VertexId,
    params: EsParams,
    level: Vec<u32>,
    // es / mes
    in_list: Vec<Vec<Incidence>>,
    in_pos: Vec<u32>,
    tree_idx: Vec<u32>,
    // ses
    tree_edge: Vec<Option<EdgeId>>,
    // repair scratch, reset after every deletion
    enqueued: Vec<u32>,
    in_queue: Vec<bool>,
    touched: Vec<VertexId>,
    queue: VecDeque<VertexId>,
}

impl EvenShiloach {
    pub fn new(variant: EsVariant, source: VertexId, params: EsParams) -> Self {
        EvenShiloach {
            variant,
            source,
            params,
            level: Vec::new(),
            in_list: Vec::new(),
            in_pos: Vec::new(),
            tree_idx: Vec::new(),
            tree_edge: Vec::new(),
            enqueued: Vec::new(),
            in_queue: Vec::new(),
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    pub fn classic(source: VertexId, params: EsParams) -> Self {
        Self::new(EsVariant::Classic, source, params)
    }

    pub fn multi_level(source: VertexId, params: EsParams) -> Self {
        Self::new(EsVariant::MultiLevel, source, params)
    }

    pub fn simplified(source: VertexId, params: EsParams) -> Self {
        Self::new(EsVariant::Simplified, source, params)
    }

    pub fn variant(&self) -> EsVariant {
        self.variant
    }

    pub fn params(&self) -> EsParams {
        self.params
    }

    /// BFS level of `v`, `None` if unreachable.
    pub fn level(&self, v: VertexId) -> Option<u32> {
        match self.level[v.index()] {
            INF => None,
            l => Some(l),
        }
    }

    pub fn levels(&self) -> Vec<Option<u32>> {
        self.level
            .iter()
            .map(|&l| if l == INF { None } else { Some(l) })
            .collect()
    }

    fn indexed(&self) -> bool {
        self.variant != EsVariant::Simplified
    }

    fn indexed_tree_edge(&self, v: VertexId) -> Option<(EdgeId, VertexId)> {
        if v == self.source || self.level[v.index()] == INF {
            return None;
        }
        self.in_list[v.index()]
            .get(self.tree_idx[v.index()] as usize)
            .map(|inc| (inc.edge, inc.other))
    }

    /// Tree edge of `v` with its tail resolved through the graph.
    pub fn tree_edge_in(&self, graph: &DiGraph, v: VertexId) -> Option<(EdgeId, VertexId)> {
        if self.indexed() {
            return self.indexed_tree_edge(v);
        }
        if v == self.source || self.level[v.index()] == INF {
            return None;
        }
        let e = self.tree_edge[v.index()]?;
        graph.endpoints(e).map(|(tail, _)| (e, tail))
    }

    /// Checks level and tree-edge invariants against the graph. With
    /// `minimal_index`, `es`/`mes` must also point at the first in-list
    /// entry whose tail sits one level up.
    pub fn check_invariants(&self, graph: &DiGraph, minimal_index: bool) -> Result<(), String> {
        let s = self.source;
        if self.level[s.index()] != 0 {
            return Err("source level is not 0".into());
        }
        for v in graph.vertices() {
            let lv = self.level[v.index()];
            if self.indexed() {
                let list = &self.in_list[v.index()];
                if list.len() != graph.in_degree(v) {
                    return Err(format!(
                        "in-list of {v} has {} entries, graph {}",
                        list.len(),
                        graph.in_degree(v)
                    ));
                }
                for (i, inc) in list.iter().enumerate() {
                    if self.in_pos.get(inc.edge.index()) != Some(&(i as u32)) {
                        return Err(format!("in_pos of {} disagrees with position {i}", inc.edge));
                    }
                    if graph.endpoints(inc.edge) != Some((inc.other, v)) {
                        return Err(format!("in-list of {v} holds stale {}", inc.edge));
                    }
                }
            }
            if v == s || lv == INF {
                continue;
            }
            let Some((e, tail)) = self.tree_edge_in(graph, v) else {
                return Err(format!("reachable {v} has no tree edge"));
            };
            if graph.endpoints(e) != Some((tail, v)) {
                return Err(format!("tree edge of {v} is not live"));
            }
            if self.level[tail.index()] == INF || self.level[tail.index()] + 1 != lv {
                return Err(format!("tree edge of {v} does not come from level {}", lv - 1));
            }
            if minimal_index && self.indexed() {
                let first = self.in_list[v.index()]
                    .iter()
                    .position(|inc| self.level[inc.other.index()].wrapping_add(1) == lv);
                if first != Some(self.tree_idx[v.index()] as usize) {
                    return Err(format!("tree edge index of {v} is not minimal"));
                }
            }
        }
        Ok(())
    }

    fn rebuild(&mut self, graph: &DiGraph, work: &mut Counters) {
        let n = graph.vertex_count();
        let s = self.source;
        self.level = vec![INF; n];
        self.level[s.index()] = 0;
        work.vertices_visited += 1;
        if self.enqueued.len() != n {
            self.enqueued = vec![0; n];
            self.in_queue = vec![false; n];
        }
        let indexed = self.indexed();
        if indexed {
            self.in_list = vec![Vec::new(); n];
            self.in_pos = vec![NO_POS; graph.edge_id_bound()];
            self.tree_idx = vec![0; n];
        } else {
            self.tree_edge = vec![None; n];
        }

        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            work.queue_pops += 1;
            let lu = self.level[u.index()];
            for inc in graph.out_edges(u) {
                work.edges_scanned += 1;
                let w = inc.other;
                let mut pos = 0;
                if indexed {
                    pos = self.push_in_edge(w, inc.edge, u);
                }
                if self.level[w.index()] == INF {
                    self.level[w.index()] = lu + 1;
                    if indexed {
                        self.tree_idx[w.index()] = pos;
                    } else {
                        self.tree_edge[w.index()] = Some(inc.edge);
                    }
                    work.vertices_visited += 1;
                    queue.push_back(w);
                }
            }
        }
        if indexed {
            // in-edges whose tails the BFS never reached
            for u in graph.vertices() {
                if self.level[u.index()] != INF {
                    continue;
                }
                for inc in graph.out_edges(u) {
                    work.edges_scanned += 1;
                    self.push_in_edge(inc.other, inc.edge, u);
                }
            }
        }
    }

    fn push_in_edge(&mut self, head: VertexId, edge: EdgeId, tail: VertexId) -> u32 {
        let list = &mut self.in_list[head.index()];
        let pos = list.len() as u32;
        list.push(Incidence { edge, other: tail });
        if edge.index() >= self.in_pos.len() {
            self.in_pos.resize(edge.index() + 1, NO_POS);
        }
        self.in_pos[edge.index()] = pos;
        pos
    }

    /// Removes `edge` from the in-list of `head` by swap-remove. Returns whether
    /// it was the tree edge. Keeps the tree-edge index pointing at the first
    /// valid entry when the swap moves a valid edge below it.
    fn pop_in_edge(&mut self, head: VertexId, edge: EdgeId) -> bool {
        let h = head.index();
        let pos = self.in_pos[edge.index()];
        self.in_pos[edge.index()] = NO_POS;
        let list = &mut self.in_list[h];
        let last = (list.len() - 1) as u32;
        list.swap_remove(pos as usize);
        let reachable = head != self.source && self.level[h] != INF;
        let was_tree = reachable && self.tree_idx[h] == pos;
        if pos != last {
            let moved = list[pos as usize];
            self.in_pos[moved.edge.index()] = pos;
            if reachable && !was_tree {
                let tail_level = self.level[moved.other.index()];
                if self.tree_idx[h] == last
                    || (pos < self.tree_idx[h] && tail_level != INF && tail_level + 1 == self.level[h])
                {
                    self.tree_idx[h] = pos;
                }
            }
        }
        was_tree
    }

    fn enqueue(&mut self, v: VertexId, work: &mut Counters) -> Result<(), ()> {
        let i = v.index();
        if self.in_queue[i] {
            return Ok(());
        }
        if self.enqueued[i] == 0 {
            self.touched.push(v);
        }
        if self.params.beta.is_some_and(|b| self.enqueued[i] >= b) {
            return Err(());
        }
        self.enqueued[i] += 1;
        work.max_enqueues = work.max_enqueues.max(u64::from(self.enqueued[i]));
        self.in_queue[i] = true;
        self.queue.push_back(v);
        Ok(())
    }

    /// Whether `e`, entering `head`, is the tree edge of `head`.
    fn is_tree_edge(&self, e: EdgeId, head: VertexId) -> bool {
        let h = head.index();
        if head == self.source || self.level[h] == INF {
            return false;
        }
        if self.indexed() {
            self.in_pos[e.index()] == self.tree_idx[h]
        } else {
            self.tree_edge[h] == Some(e)
        }
    }

    /// Enqueues the BFS-tree children of `w`, found by scanning its out-edges.
    fn enqueue_children(&mut self, graph: &DiGraph, w: VertexId, work: &mut Counters) -> Result<(), ()> {
        for inc in graph.out_edges(w) {
            work.edges_scanned += 1;
            if self.is_tree_edge(inc.edge, inc.other) {
                self.enqueue(inc.other, work)?;
            }
        }
        Ok(())
    }

    fn repair(&mut self, graph: &DiGraph, start: VertexId, work: &mut Counters) -> Repair {
        let n = graph.vertex_count();
        let pop_limit = self.params.ratio.map(|r| r * n as f64);
        if self.enqueue(start, work).is_err() {
            return Repair::Abort;
        }
        let mut pops = 0u64;
        while let Some(w) = self.queue.pop_front() {
            self.in_queue[w.index()] = false;
            work.queue_pops += 1;
            pops += 1;
            if pop_limit.is_some_and(|limit| pops as f64 > limit) {
                return Repair::Abort;
            }
            if self.level[w.index()] == INF {
                continue;
            }
            let step = match self.variant {
                EsVariant::Classic => self.settle_classic(graph, w, n, work),
                EsVariant::MultiLevel => self.settle_multi_level(graph, w, n, work),
                EsVariant::Simplified => self.settle_simplified(graph, w, n, work),
            };
            if step.is_err() {
                return Repair::Abort;
            }
        }
        Repair::Done
    }

    fn settle_classic(&mut self, graph: &DiGraph, w: VertexId, n: usize, work: &mut Counters) -> Result<(), ()> {
        let i = w.index();
        let lw = self.level[i];
        let list = &self.in_list[i];
        let start = self.tree_idx[i] as usize;
        let mut found = None;
        for (k, inc) in list.iter().enumerate().skip(start) {
            work.edges_scanned += 1;
            let lt = self.level[inc.other.index()];
            if lt != INF && lt + 1 == lw {
                found = Some(k);
                break;
            }
        }
        if let Some(k) = found {
            self.tree_idx[i] = k as u32;
            return Ok(());
        }
        if (lw as usize) + 1 < n {
            self.level[i] = lw + 1;
            self.tree_idx[i] = 0;
            self.enqueue(w, work)?;
        } else {
            self.level[i] = INF;
        }
        self.enqueue_children(graph, w, work)
    }

    fn settle_multi_level(&mut self, graph: &DiGraph, w: VertexId, n: usize, work: &mut Counters) -> Result<(), ()> {
        let i = w.index();
        let lw = self.level[i];
        let list = &self.in_list[i];
        let len = list.len();
        let start = self.tree_idx[i] as usize;
        let mut best = (INF, 0usize);
        let mut found = None;
        for k in 0..len {
            let idx = (start + k) % len;
            work.edges_scanned += 1;
            let lt = self.level[list[idx].other.index()];
            if lt != INF && lt + 1 == lw {
                found = Some(idx);
                break;
            }
            if lt < best.0 {
                best = (lt, idx);
            }
        }
        if let Some(idx) = found {
            self.tree_idx[i] = idx as u32;
            return Ok(());
        }
        if best.0 == INF || (best.0 as usize) + 1 >= n {
            self.level[i] = INF;
        } else {
            self.level[i] = best.0 + 1;
            self.tree_idx[i] = best.1 as u32;
        }
        self.enqueue_children(graph, w, work)
    }

    fn settle_simplified(&mut self, graph: &DiGraph, w: VertexId, n: usize, work: &mut Counters) -> Result<(), ()> {
        let i = w.index();
        let lw = self.level[i];
        let mut best: (u32, Option<Incidence>) = (INF, None);
        for inc in graph.in_edges(w) {
            work.edges_scanned += 1;
            let lt = self.level[inc.other.index()];
            if lt < best.0 {
                best = (lt, Some(*inc));
            }
        }
        match best {
            (lt, Some(inc)) if (lt as usize) + 1 < n => {
                self.tree_edge[i] = Some(inc.edge);
                self.level[i] = lt + 1;
            }
            _ => {
                self.tree_edge[i] = None;
                self.level[i] = INF;
            }
        }
        if self.level[i] != lw {
            self.enqueue_children(graph, w, work)?;
        }
        Ok(())
    }

    fn reset_scratch(&mut self) {
        for v in self.touched.drain(..) {
            self.enqueued[v.index()] = 0;
            self.in_queue[v.index()] = false;
        }
        for v in self.queue.drain(..) {
            self.in_queue[v.index()] = false;
        }
    }
}

impl SsrAlgorithm for EvenShiloach {
    fn name(&self) -> String {
        format!(
            "{}:{}:{}",
            self.variant.prefix(),
            fmt_limit(self.params.beta),
            fmt_limit(self.params.ratio)
        )
    }

    fn source(&self) -> VertexId {
        self.source
    }

    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters) {
        self.rebuild(graph, work);
    }

    fn edge_inserted(&mut self, graph: &DiGraph, e: EdgeRef, work: &mut Counters) {
        let indexed = self.indexed();
        let pos = if indexed {
            self.push_in_edge(e.head, e.id, e.tail)
        } else {
            0
        };
        let lu = self.level[e.tail.index()];
        let v = e.head.index();
        if lu == INF {
            return;
        }
        if lu + 1 < self.level[v] {
            self.level[v] = lu + 1;
            if indexed {
                self.tree_idx[v] = pos;
            } else {
                self.tree_edge[v] = Some(e.id);
            }
        } else {
            // an appended entry never undercuts an existing tree-edge index
            return;
        }
        work.vertices_visited += 1;

        let mut queue = VecDeque::from([e.head]);
        while let Some(x) = queue.pop_front() {
            work.queue_pops += 1;
            let cand = self.level[x.index()] + 1;
            for inc in graph.out_edges(x) {
                work.edges_scanned += 1;
                let w = inc.other.index();
                if cand < self.level[w] {
                    self.level[w] = cand;
                    if indexed {
                        self.tree_idx[w] = self.in_pos[inc.edge.index()];
                    } else {
                        self.tree_edge[w] = Some(inc.edge);
                    }
                    work.vertices_visited += 1;
                    queue.push_back(inc.other);
                } else if indexed && cand == self.level[w] && inc.other != self.source {
                    let p = self.in_pos[inc.edge.index()];
                    if p < self.tree_idx[w] {
                        self.tree_idx[w] = p;
                    }
                }
            }
        }
    }

    fn edge_deleted(&mut self, graph: &DiGraph, e: EdgeRef, work: &mut Counters) {
        let was_tree = if self.indexed() {
            self.pop_in_edge(e.head, e.id)
        } else {
            let hit = e.head != self.source
                && self.level[e.head.index()] != INF
                && self.tree_edge[e.head.index()] == Some(e.id);
            if hit {}
            hit
        };
        if !was_tree {
            return;
        }
        let outcome = self.repair(graph, e.head, work);
        self.reset_scratch();
        if let Repair::Abort = outcome {
            work.recomputations += 1;
            self.rebuild(graph, work);
        }
    }

    fn query(&mut self, _: &DiGraph, target: VertexId, _: &mut Counters) -> bool {
        self.level[target.index()] != INF
    }
}
