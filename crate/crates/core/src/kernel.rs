//! Feedback-edge-number preprocessing: pendant peeling, the linear kernel
//! for two pages and the long-path kernel for three or more pages.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{feedback_edge_number, feedback_edge_set, EdgeId, MultiGraph, VertexId};

/// One reduction step, in input vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum KernelRule {
    /// A vertex of degree at most one was deleted.
    PendantDelete { vertex: VertexId, neighbor: Option<VertexId> },
    /// A degree-two vertex was removed and its neighbors joined.
    EdgeContract { vertex: VertexId, joined: (VertexId, VertexId) },
    /// Inner vertices of a long path were removed and the cut closed.
    PathShrink { removed: Vec<VertexId>, joined: (VertexId, VertexId), old_length: usize, new_length: usize },
}

/// Sets derived from a minimum feedback edge set `F` of the peeled graph
/// and the tree `T` left after removing `F`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bookkeeping {
    pub fen: usize,
    pub feedback_edges: Vec<(VertexId, VertexId)>,
    /// Leaves of `T`.
    pub leaves: Vec<VertexId>,
    /// Vertices of degree at least three in `T`.
    pub branching: Vec<VertexId>,
    /// Endpoints of feedback edges.
    pub feedback_vertices: Vec<VertexId>,
    /// Branching and feedback vertices.
    pub anchors: Vec<VertexId>,
    /// Maximal proper paths of `T` between anchors.
    pub proper_paths: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelTrace {
    pub pages: usize,
    pub input_vertices: usize,
    pub input_edges: usize,
    pub rules: Vec<KernelRule>,
    pub bookkeeping: Bookkeeping,
    /// Input id of every kernel vertex.
    pub labels: Vec<VertexId>,
    /// Kernel edges in kernel ids.
    pub edges: Vec<(VertexId, VertexId)>,
    /// Path length bound of the last long-path round.
    pub threshold: Option<u128>,
    pub rounds: usize,
    /// Set when a threshold override replaced the proven bound.
    pub non_conforming: bool,
}

impl KernelTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Mutable graph over the input ids.
struct Work {
    ends: Vec<(VertexId, VertexId)>,
    inc: Vec<Vec<EdgeId>>,
    alive: Vec<bool>,
}

impl Work {
    fn new(g: &MultiGraph) -> Self {
        let mut inc = vec![Vec::new(); g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            inc[u].push(e);
            inc[v].push(e);
        }
        Work { ends: g.edges().to_vec(), inc, alive: vec![true; g.n()] }
    }

    fn degree(&self, v: VertexId) -> usize {
        self.inc[v].len()
    }

    fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.inc[v].iter().map(|&e| self.other(e, v)).collect()
    }

    fn remove_vertex(&mut self, v: VertexId) {
        for e in std::mem::take(&mut self.inc[v]) {
            let w = self.other(e, v);
            self.inc[w].retain(|&x| x != e);
        }
        self.alive[v] = false;
    }

    fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<()> {
        if a == b {
            return Err(Error::Integrity(format!("reduction would create a loop at {a}")));
        }
        let e = self.ends.len();
        self.ends.push((a, b));
        self.inc[a].push(e);
        self.inc[b].push(e);
        Ok(())
    }

    /// Compact graph on the surviving vertices in id order, edges in id
    /// order, plus the input id of every vertex.
    fn finish(&self) -> (MultiGraph, Vec<VertexId>) {
        let labels: Vec<VertexId> = (0..self.alive.len()).filter(|&v| self.alive[v]).collect();
        let mut local = vec![usize::MAX; self.alive.len()];
        for (i, &v) in labels.iter().enumerate() {
            local[v] = i;
        }
        let mut live: Vec<EdgeId> = self.inc.iter().flatten().copied().collect();
        live.sort_unstable();
        live.dedup();
        let mut g = MultiGraph::new(labels.len());
        for e in live {
            let (a, b) = self.ends[e];
            g.add_edge(local[a], local[b]).expect("loopless");
        }
        (g, labels)
    }
}

fn peel(w: &mut Work, rules: &mut Vec<KernelRule>) {
    let mut queue: VecDeque<VertexId> = (0..w.alive.len()).filter(|&v| w.alive[v] && w.degree(v) <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !w.alive[v] || w.degree(v) > 1 {
            continue;
        }
        let neighbor = w.neighbors(v).first().copied();
        w.remove_vertex(v);
        rules.push(KernelRule::PendantDelete { vertex: v, neighbor });
        if let Some(u) = neighbor {
            if w.degree(u) <= 1 {
                queue.push_back(u);
            }
        }
    }
}

/// Delete vertices of degree at most one until none is left.
pub fn peel_pendants(g: &MultiGraph) -> (MultiGraph, KernelTrace) {
    let mut w = Work::new(g);
    let mut rules = Vec::new();
    peel(&mut w, &mut rules);
    let (out, labels) = w.finish();
    let bookkeeping = bookkeeping(&out, &labels);
    let trace = trace(g, 2, rules, bookkeeping, &out, labels);
    (out, trace)
}

fn trace(g: &MultiGraph, pages: usize, rules: Vec<KernelRule>, bookkeeping: Bookkeeping, out: &MultiGraph, labels: Vec<VertexId>) -> KernelTrace {
    KernelTrace {
        pages,
        input_vertices: g.n(),
        input_edges: g.m(),
        rules,
        bookkeeping,
        labels,
        edges: out.edges().to_vec(),
        threshold: None,
        rounds: 0,
        non_conforming: false,
    }
}

/// Degree-two vertices of `w` grouped into maximal threads. Each item is
/// the thread's vertices in walk order plus its two outer neighbors, or
/// `None` for a thread that closes into a cycle.
fn threads(w: &Work) -> Vec<(Vec<VertexId>, Option<(VertexId, VertexId)>)> {
    let n = w.alive.len();
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if !w.alive[v] || w.degree(v) != 2 || done[v] {
            continue;
        }
        done[v] = true;
        let mut sides: Vec<(Vec<VertexId>, Option<VertexId>)> = Vec::with_capacity(2);
        let mut closed = false;
        for &first in &w.inc[v][..2] {
            if closed {
                break;
            }
            let mut seq = Vec::new();
            let (mut cur, mut via) = (v, first);
            let end = loop {
                let nxt = w.other(via, cur);
                if nxt == v {
                    closed = true;
                    break None;
                }
                if w.degree(nxt) != 2 {
                    break Some(nxt);
                }
                done[nxt] = true;
                seq.push(nxt);
                via = if w.inc[nxt][0] == via { w.inc[nxt][1] } else { w.inc[nxt][0] };
                cur = nxt;
            };
            sides.push((seq, end));
        }
        if closed {
            let mut cyc = vec![v];
            cyc.extend(sides.swap_remove(0).0);
            out.push((cyc, None));
            continue;
        }
        let (right, b) = sides.pop().expect("two sides");
        let (left, a) = sides.pop().expect("two sides");
        let mut seq: Vec<VertexId> = left.into_iter().rev().collect();
        seq.push(v);
        seq.extend(right);
        let (mut a, mut b) = (a.expect("open thread"), b.expect("open thread"));
        if seq.first() > seq.last() {
            seq.reverse();
            std::mem::swap(&mut a, &mut b);
        }
        out.push((seq, Some((a, b))));
    }
    out
}

/// Kernel for two pages: peel pendants, then shorten every thread of
/// degree-two vertices while it contains a path of length four whose
/// inner vertices have degree two. Threads are handled in order of their
/// smallest vertex, each from its smaller end.
pub fn kernelize_two_page(g: &MultiGraph) -> Result<(MultiGraph, KernelTrace)> {
    if !g.is_connected() {
        return Err(Error::Contract("the two-page kernel expects a connected graph".into()));
    }
    let mut w = Work::new(g);
    let mut rules = Vec::new();
    peel(&mut w, &mut rules);
    let (peeled, peeled_labels) = w.finish();
    let bookkeeping = bookkeeping(&peeled, &peeled_labels);
    for (seq, ends) in threads(&w) {
        match ends {
            None => {
                // A bare cycle: keep four vertices.
                let len = seq.len();
                for i in 0..len.saturating_sub(4) {
                    let x = seq[i];
                    let (p, q) = (seq[len - 1], seq[i + 1]);
                    w.remove_vertex(x);
                    w.add_edge(p, q)?;
                    rules.push(KernelRule::EdgeContract { vertex: x, joined: (p, q) });
                }
            }
            Some((a, b)) => {
                let mut i = 0;
                loop {
                    let r = seq.len() - i;
                    if !(r >= 4 || (r == 3 && a != b)) {
                        break;
                    }
                    let x = seq[i];
                    w.remove_vertex(x);
                    w.add_edge(a, seq[i + 1])?;
                    rules.push(KernelRule::EdgeContract { vertex: x, joined: (a, seq[i + 1]) });
                    i += 1;
                }
            }
        }
    }
    let (out, labels) = w.finish();
    Ok((out.clone(), trace(g, 2, rules, bookkeeping, &out, labels)))
}

/// Feedback edge set, tree sets and proper paths of a peeled graph whose
/// vertices carry input ids `labels`.
fn bookkeeping(g: &MultiGraph, labels: &[VertexId]) -> Bookkeeping {
    let n = g.n();
    let fes = feedback_edge_set(g);
    let in_f: Vec<bool> = {
        let mut v = vec![false; g.m()];
        for &e in &fes {
            v[e] = true;
        }
        v
    };
    let tree_deg: Vec<usize> = (0..n).map(|v| g.incident(v).iter().filter(|&&e| !in_f[e]).count()).collect();
    let mut fv = vec![false; n];
    for &e in &fes {
        let (a, b) = g.endpoints(e);
        fv[a] = true;
        fv[b] = true;
    }
    let anchor: Vec<bool> = (0..n).map(|v| fv[v] || tree_deg[v] >= 3).collect();
    let paths = proper_paths(g, &in_f, &anchor);
    let lab = |vs: Vec<VertexId>| -> Vec<VertexId> { vs.into_iter().map(|v| labels[v]).collect() };
    Bookkeeping {
        fen: feedback_edge_number(g),
        feedback_edges: fes.iter().map(|&e| (labels[g.endpoints(e).0], labels[g.endpoints(e).1])).collect(),
        leaves: lab((0..n).filter(|&v| tree_deg[v] == 1).collect()),
        branching: lab((0..n).filter(|&v| tree_deg[v] >= 3).collect()),
        feedback_vertices: lab((0..n).filter(|&v| fv[v]).collect()),
        anchors: lab((0..n).filter(|&v| anchor[v]).collect()),
        proper_paths: paths.into_iter().map(lab).collect(),
    }
}

/// Maximal paths of the tree `g - F` with at least two edges whose inner
/// vertices have degree two in `g` and are not anchors; each reported
/// once, from its lexicographically smaller end.
fn proper_paths(g: &MultiGraph, in_f: &[bool], anchor: &[bool]) -> Vec<Vec<VertexId>> {
    let mut out = Vec::new();
    for s in 0..g.n() {
        if !anchor[s] {
            continue;
        }
        for &e0 in g.incident(s) {
            if in_f[e0] {
                continue;
            }
            let mut path = vec![s];
            let (mut cur, mut via) = (s, e0);
            loop {
                let nxt = g.other(via, cur);
                path.push(nxt);
                if anchor[nxt] || g.degree(nxt) != 2 {
                    break;
                }
                let Some(&e) = g.incident(nxt).iter().find(|&&e| e != via && !in_f[e]) else { break };
                via = e;
                cur = nxt;
            }
            let k = path.len();
            if k >= 3 && (path[0], path[1]) < (path[k - 1], path[k - 2]) {
                out.push(path);
            }
        }
    }
    out
}

/// Path length bound for `anchors` fixed vertices and `paths` paths:
/// `(anchors + 1) * 2^paths * paths`, saturating.
pub fn long_path_threshold(anchors: usize, paths: usize) -> u128 {
    if paths >= 100 {
        return u128::MAX;
    }
    ((anchors as u128 + 1) << paths).saturating_mul(paths as u128)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MultiPageOptions {
    /// NON-CONFORMING: replaces the proven path length bound by a fixed
    /// value so the shrinking step can be exercised on small graphs.
    pub threshold_override: Option<u128>,
}

/// Kernel for `pages >= 3` pages. Starting from the anchors and proper
/// paths of the peeled graph, short paths are absorbed into the anchor
/// set until every remaining path exceeds the bound; those are then cut
/// down to exactly the bound.
pub fn kernelize_multi_page(g: &MultiGraph, pages: usize, opts: MultiPageOptions) -> Result<(MultiGraph, KernelTrace)> {
    if pages < 3 {
        return Err(Error::Contract(format!("the long-path kernel needs at least three pages, got {pages}; use the two-page kernel")));
    }
    let mut w = Work::new(g);
    let mut rules = Vec::new();
    peel(&mut w, &mut rules);
    let (peeled, labels) = w.finish();
    let bookkeeping = bookkeeping(&peeled, &labels);
    let mut anchors = bookkeeping.anchors.len();
    let mut paths: Vec<Vec<VertexId>> = bookkeeping.proper_paths.clone();
    let mut rounds = 0;
    let mut threshold = None;
    while !paths.is_empty() {
        rounds += 1;
        let bound = opts.threshold_override.unwrap_or_else(|| long_path_threshold(anchors, paths.len()));
        threshold = Some(bound);
        let (short, long): (Vec<_>, Vec<_>) = paths.into_iter().partition(|p| (p.len() as u128 - 1) <= bound);
        if short.is_empty() {
            let keep = usize::try_from(bound).map_err(|_| Error::Integrity("path bound exceeds the address space".into()))?;
            if keep == 0 {
                return Err(Error::Contract("path bound must be positive".into()));
            }
            for p in long {
                let k = p.len();
                let b = p[k - 1];
                let removed: Vec<VertexId> = p[keep..k - 1].to_vec();
                for &x in &removed {
                    w.remove_vertex(x);
                }
                let a = p[keep - 1];
                w.add_edge(a, b)?;
                rules.push(KernelRule::PathShrink { removed, joined: (a, b), old_length: k - 1, new_length: keep });
            }
            break;
        }
        anchors += short.iter().map(|p| p.len() - 2).sum::<usize>();
        paths = long;
    }
    let (out, labels) = w.finish();
    let mut t = trace(g, pages, rules, bookkeeping, &out, labels);
    t.threshold = threshold;
    t.rounds = rounds;
    t.non_conforming = opts.threshold_override.is_some();
    Ok((out, t))
}

/// Apply the rules of `trace` to `g` again and return the result.
pub fn replay(g: &MultiGraph, trace: &KernelTrace) -> Result<MultiGraph> {
    let mut w = Work::new(g);
    let bad = |msg: String| Error::Contract(format!("trace does not replay: {msg}"));
    for rule in &trace.rules {
        match rule {
            KernelRule::PendantDelete { vertex, neighbor } => {
                let v = *vertex;
                if v >= w.alive.len() || !w.alive[v] || w.degree(v) > 1 || w.neighbors(v).first() != neighbor.as_ref() {
                    return Err(bad(format!("vertex {v} is not a pendant next to {neighbor:?}")));
                }
                w.remove_vertex(v);
            }
            KernelRule::EdgeContract { vertex, joined } => {
                let v = *vertex;
                if v >= w.alive.len() || !w.alive[v] || w.degree(v) != 2 {
                    return Err(bad(format!("vertex {v} does not have degree two")));
                }
                let mut nb = w.neighbors(v);
                nb.sort_unstable();
                let mut want = vec![joined.0, joined.1];
                want.sort_unstable();
                if nb != want {
                    return Err(bad(format!("vertex {v} is not between {joined:?}")));
                }
                w.remove_vertex(v);
                w.add_edge(joined.0, joined.1)?;
            }
            KernelRule::PathShrink { removed, joined, .. } => {
                if let Some(x) = removed.iter().find(|&&x| x >= w.alive.len() || !w.alive[x] || w.degree(x) != 2) {
                    return Err(bad(format!("vertex {x} is not an inner path vertex")));
                }
                for &x in removed {
                    w.remove_vertex(x);
                }
                w.add_edge(joined.0, joined.1)?;
            }
        }
    }
    Ok(w.finish().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn sorted_edges(g: &MultiGraph) -> Vec<(VertexId, VertexId)> {
        let mut e: Vec<_> = g.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    }

    #[test]
    fn tree_peels_to_nothing() {
        let (g, t) = peel_pendants(&gen::path(7));
        assert_eq!(g.n(), 0);
        assert_eq!(t.rules.len(), 7);
    }

    #[test]
    fn triangle_with_tail_keeps_triangle() {
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let (k, t) = peel_pendants(&g);
        assert_eq!((k.n(), k.m()), (3, 3));
        assert_eq!(t.labels, vec![0, 1, 2]);
    }

    #[test]
    fn four_cycle_is_untouched() {
        let (k, t) = peel_pendants(&gen::cycle(4));
        assert_eq!(sorted_edges(&k), sorted_edges(&gen::cycle(4)));
        assert!(t.rules.is_empty());
    }

    #[test]
    fn long_cycle_shrinks_to_four() {
        let (k, t) = kernelize_two_page(&gen::cycle(100)).unwrap();
        assert_eq!((k.n(), k.m()), (4, 4));
        assert_eq!(t.bookkeeping.fen, 1);
        assert!(k.n() <= 12 - 8);
    }

    #[test]
    fn tree_kernel_is_empty() {
        let (k, _) = kernelize_two_page(&gen::path(9)).unwrap();
        assert_eq!(k.n(), 0);
    }

    #[test]
    fn fen_three_sizes() {
        for seed in 0..20 {
            let g = gen::random_fen(60, 3, seed).unwrap();
            assert_eq!(feedback_edge_number(&g), 3);
            let (k, t) = kernelize_two_page(&g).unwrap();
            assert!(k.n() <= 28 && k.m() <= 33, "{} {}", k.n(), k.m());
            assert_eq!(sorted_edges(&replay(&g, &t).unwrap()), sorted_edges(&k));
        }
    }

    #[test]
    fn short_threads_absorb_to_input() {
        let g = gen::complete(4);
        let (k, t) = kernelize_multi_page(&g, 3, MultiPageOptions::default()).unwrap();
        assert_eq!(sorted_edges(&k), sorted_edges(&g));
        assert!(t.rules.is_empty());
    }

    #[test]
    fn long_theta_is_cut_to_the_bound() {
        let len = 1_000_000;
        let g = gen::theta_paths(&[len - 1, len - 1, len - 1]);
        let (k, t) = kernelize_multi_page(&g, 3, MultiPageOptions::default()).unwrap();
        let bound = t.threshold.unwrap() as usize;
        assert!(bound < len);
        let shrinks: Vec<_> = t.rules.iter().filter_map(|r| if let KernelRule::PathShrink { new_length, .. } = r { Some(*new_length) } else { None }).collect();
        assert_eq!(shrinks.len(), t.bookkeeping.proper_paths.len());
        assert!(shrinks.iter().all(|&l| l == bound));
        assert!(k.n() < g.n());
        assert_eq!(sorted_edges(&replay(&g, &t).unwrap()), sorted_edges(&k));
        assert!(!t.non_conforming);
    }

    #[test]
    fn two_pages_are_routed_elsewhere() {
        assert!(kernelize_multi_page(&gen::cycle(5), 2, MultiPageOptions::default()).is_err());
    }

    #[test]
    fn trace_serializes() {
        let (_, t) = kernelize_two_page(&gen::cycle(9)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rules"][0]["rule"], "edge-contract");
    }
}
