//! Brute-force ground truth: page assignment for a fixed spine order,
//! exhaustive search over spine orders, and verifiers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexId};
use crate::planarity::{check_permutation, planar_with_cycle};

pub const DEFAULT_SUBHAM_CAP: usize = 11;
pub const MULTI_PAGE_CAP: usize = 8;

/// Spine order plus a page (numbered from 1) for every edge id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookEmbedding {
    pub order: Vec<VertexId>,
    pub pages: Vec<u8>,
}

/// Hamiltonian cycle on all vertices, read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianWitness {
    pub cycle: Vec<VertexId>,
}

fn positions(n: usize, order: &[VertexId]) -> Vec<usize> {
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Edges `(a, b)` and `(c, d)` cross on one page iff their endpoints
/// strictly interleave along the spine.
fn interleave(pos: &[usize], e: (VertexId, VertexId), f: (VertexId, VertexId)) -> bool {
    let (a, b) = (pos[e.0].min(pos[e.1]), pos[e.0].max(pos[e.1]));
    let (c, d) = (pos[f.0].min(pos[f.1]), pos[f.0].max(pos[f.1]));
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

fn conflict_graph(g: &MultiGraph, pos: &[usize]) -> Vec<Vec<usize>> {
    let m = g.m();
    let mut adj = vec![Vec::new(); m];
    for e in 0..m {
        for f in e + 1..m {
            if interleave(pos, g.endpoints(e), g.endpoints(f)) {
                adj[e].push(f);
                adj[f].push(e);
            }
        }
    }
    adj
}

/// Proper colouring of the conflict graph with `pages` colours, if any.
pub fn pages_given_order(g: &MultiGraph, order: &[VertexId], pages: usize) -> Result<Option<Vec<u8>>> {
    check_permutation(g.n(), order)?;
    let pos = positions(g.n(), order);
    let adj = conflict_graph(g, &pos);
    Ok(colour(&adj, pages))
}

fn colour(adj: &[Vec<usize>], k: usize) -> Option<Vec<u8>> {
    let m = adj.len();
    if m == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    if k == 2 {
        return two_colour(adj);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(adj[e].len()));
    let mut col = vec![0u8; m];
    if colour_rec(adj, &order, 0, k as u8, &mut col) {
        Some(col)
    } else {
        None
    }
}

fn colour_rec(adj: &[Vec<usize>], order: &[usize], i: usize, k: u8, col: &mut [u8]) -> bool {
    if i == order.len() {
        return true;
    }
    let e = order[i];
    // Symmetry: never open more than one new colour at a time.
    let used = order[..i].iter().map(|&f| col[f]).max().unwrap_or(0);
    for c in 1..=k.min(used + 1) {
        if adj[e].iter().all(|&f| col[f] != c) {
            col[e] = c;
            if colour_rec(adj, order, i + 1, k, col) {
                return true;
            }
        }
    }
    col[e] = 0;
    false
}

fn two_colour(adj: &[Vec<usize>]) -> Option<Vec<u8>> {
    let m = adj.len();
    let mut col = vec![0u8; m];
    for s in 0..m {
        if col[s] != 0 {
            continue;
        }
        col[s] = 1;
        let mut stack = vec![s];
        while let Some(e) = stack.pop() {
            for &f in &adj[e] {
                if col[f] == 0 {
                    col[f] = 3 - col[e];
                    stack.push(f);
                } else if col[f] == col[e] {
                    return None;
                }
            }
        }
    }
    Some(col)
}

/// Parity union-find with an undo log, used to keep the conflict graph of
/// a growing spine prefix bipartite.
struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<u8>,
    size: Vec<usize>,
    log: Vec<(usize, usize)>,
}

impl ParityDsu {
    fn new(m: usize) -> Self {
        ParityDsu { parent: (0..m).collect(), parity: vec![0; m], size: vec![1; m], log: Vec::new() }
    }

    fn find(&self, mut x: usize) -> (usize, u8) {
        let mut p = 0;
        while self.parent[x] != x {
            p ^= self.parity[x];
            x = self.parent[x];
        }
        (x, p)
    }

    /// Demand different colours for `a` and `b`; false on an odd cycle.
    fn differ(&mut self, a: usize, b: usize) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa != pb;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.parity[small] = pa ^ pb ^ 1;
        self.size[big] += self.size[small];
        self.log.push((small, big));
        true
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (small, big) = self.log.pop().expect("nonempty");
            self.parent[small] = small;
            self.parity[small] = 0;
            self.size[big] -= self.size[small];
        }
    }
}

struct SubhamSearch<'a> {
    g: &'a MultiGraph,
    pos: Vec<usize>,
    order: Vec<VertexId>,
    placed: Vec<bool>,
    dsu: ParityDsu,
    /// Edges with both ends placed, as (edge, low position, high position).
    spans: Vec<(usize, usize, usize)>,
}

impl SubhamSearch<'_> {
    fn place(&mut self, v: VertexId) -> bool {
        let p = self.order.len();
        self.pos[v] = p;
        self.order.push(v);
        self.placed[v] = true;
        let mut ok = true;
        let start = self.spans.len();
        for &e in self.g.incident(v) {
            let u = self.g.other(e, v);
            if !self.placed[u] || u == v {
                continue;
            }
            let pu = self.pos[u];
            for i in 0..start {
                let (f, a, b) = self.spans[i];
                if a < pu && pu < b && !self.dsu.differ(e, f) {
                    ok = false;
                    break;
                }
            }
            self.spans.push((e, pu, p));
            if !ok {
                break;
            }
        }
        ok
    }

    fn unplace(&mut self, v: VertexId, spans_mark: usize, dsu_mark: usize) {
        self.spans.truncate(spans_mark);
        self.dsu.rollback(dsu_mark);
        self.placed[v] = false;
        self.order.pop();
    }

    fn run(&mut self) -> bool {
        let n = self.g.n();
        if self.order.len() == n {
            return true;
        }
        for v in 1..n {
            if self.placed[v] {
                continue;
            }
            // Mirror symmetry: the last vertex must exceed the second one.
            if self.order.len() == n - 1 && n >= 3 && v < self.order[1] {
                continue;
            }
            let (sm, dm) = (self.spans.len(), self.dsu.log.len());
            if self.place(v) && self.run() {
                return true;
            }
            self.unplace(v, sm, dm);
        }
        false
    }
}

/// Exhaustive 2-page search. Returns a spine order admitting a 2-page
/// assignment, or `None`.
pub fn brute_force_subham(g: &MultiGraph, cap: usize) -> Result<Option<Vec<VertexId>>> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let mut s = SubhamSearch { g, pos: vec![0; n], order: Vec::new(), placed: vec![false; n], dsu: ParityDsu::new(g.m()), spans: Vec::new() };
    s.place(0);
    if s.run() {
        Ok(Some(s.order))
    } else {
        Ok(None)
    }
}

/// Exhaustive `pages`-page search over spine orders (vertex 0 first,
/// reflections skipped).
pub fn brute_force_book_thickness(g: &MultiGraph, pages: usize, cap: usize) -> Result<Option<BookEmbedding>> {
    let n = g.n();
    if pages == 2 {
        return Ok(brute_force_subham(g, cap)?.map(|order| {
            let pages = pages_given_order(g, &order, 2).expect("permutation").expect("feasible");
            BookEmbedding { order, pages }
        }));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(Some(BookEmbedding { order: Vec::new(), pages: Vec::new() }));
    }
    let mut rest: Vec<VertexId> = (1..n).collect();
    let mut found = None;
    permutations(&mut rest, 0, &mut |tail| {
        if tail.len() >= 2 && tail[0] > tail[tail.len() - 1] {
            return false;
        }
        let mut order = vec![0];
        order.extend_from_slice(tail);
        let pos = positions(n, &order);
        if let Some(p) = colour(&conflict_graph(g, &pos), pages) {
            found = Some(BookEmbedding { order, pages: p });
            return true;
        }
        false
    });
    Ok(found)
}

fn permutations(xs: &mut [VertexId], k: usize, visit: &mut impl FnMut(&[VertexId]) -> bool) -> bool {
    if k == xs.len() {
        return visit(xs);
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        if permutations(xs, k + 1, visit) {
            xs.swap(k, i);
            return true;
        }
        xs.swap(k, i);
    }
    false
}

pub fn verify_embedding(g: &MultiGraph, emb: &BookEmbedding, pages: usize) -> bool {
    if check_permutation(g.n(), &emb.order).is_err() || emb.pages.len() != g.m() {
        return false;
    }
    if emb.pages.iter().any(|&p| p == 0 || p as usize > pages) {
        return false;
    }
    let pos = positions(g.n(), &emb.order);
    for e in 0..g.m() {
        for f in e + 1..g.m() {
            if emb.pages[e] == emb.pages[f] && interleave(&pos, g.endpoints(e), g.endpoints(f)) {
                return false;
            }
        }
    }
    true
}

pub fn verify_witness(g: &MultiGraph, h: &HamiltonianWitness) -> bool {
    planar_with_cycle(g, &h.cycle).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn exhaustive_two_pages(g: &MultiGraph, order: &[VertexId]) -> bool {
        let m = g.m();
        (0u32..1 << m).any(|mask| {
            let pages = (0..m).map(|e| 1 + (mask >> e & 1) as u8).collect();
            verify_embedding(g, &BookEmbedding { order: order.to_vec(), pages }, 2)
        })
    }

    #[test]
    fn triangle_fits_one_page() {
        let p = pages_given_order(&gen::cycle(3), &[0, 1, 2], 1).unwrap();
        assert!(p.is_some());
    }

    #[test]
    fn crossed_square_needs_two_pages() {
        let g = gen::cycle(4);
        let order = [0, 2, 1, 3];
        assert!(pages_given_order(&g, &order, 1).unwrap().is_none());
        let p = pages_given_order(&g, &order, 2).unwrap().unwrap();
        assert!(verify_embedding(&g, &BookEmbedding { order: order.to_vec(), pages: p }, 2));
    }

    #[test]
    fn k4_never_one_page() {
        let g = gen::complete(4);
        let mut xs = vec![0, 1, 2, 3];
        let mut any = false;
        permutations(&mut xs, 0, &mut |o| {
            any |= pages_given_order(&g, o, 1).unwrap().is_some();
            false
        });
        assert!(!any);
    }

    #[test]
    fn subham_named() {
        assert!(brute_force_subham(&gen::complete(4), 11).unwrap().is_some());
        assert!(brute_force_subham(&gen::complete(5), 11).unwrap().is_none());
        assert!(brute_force_subham(&gen::goldner_harary(), 11).unwrap().is_none());
        assert!(matches!(brute_force_subham(&gen::cycle(12), 11), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn book_thickness_named() {
        assert!(brute_force_book_thickness(&gen::complete(4), 2, 8).unwrap().is_some());
        assert!(brute_force_book_thickness(&gen::complete(6), 2, 8).unwrap().is_none());
        assert!(brute_force_book_thickness(&gen::cycle(5), 1, 8).unwrap().is_some());
        assert!(brute_force_book_thickness(&gen::complete(6), 3, 8).unwrap().is_some());
        assert!(brute_force_book_thickness(&gen::complete(5), 3, 8).unwrap().is_some());
    }

    #[test]
    fn witness_from_order_verifies() {
        for seed in 0..40 {
            let g = gen::random_multigraph(7, 11, seed);
            if let Some(order) = brute_force_subham(&g, 11).unwrap() {
                assert!(verify_witness(&g, &HamiltonianWitness { cycle: order }));
            }
        }
    }

    #[test]
    fn two_colouring_matches_exhaustive_assignment() {
        for seed in 0..60 {
            let g = gen::random_multigraph(6, 10, seed);
            let order: Vec<usize> = (0..6).collect();
            let fast = pages_given_order(&g, &order, 2).unwrap().is_some();
            assert_eq!(fast, exhaustive_two_pages(&g, &order));
        }
    }

    #[test]
    fn verify_rejects() {
        let g = gen::complete(4);
        // Edges 0-2 and 1-3 interleave on the order 0,1,2,3.
        let mut pages = vec![1; 6];
        assert!(!verify_embedding(&g, &BookEmbedding { order: vec![0, 1, 2, 3], pages: pages.clone() }, 2));
        let e13 = g.edges().iter().position(|&e| e == (1, 3)).unwrap();
        pages[e13] = 2;
        assert!(verify_embedding(&g, &BookEmbedding { order: vec![0, 1, 2, 3], pages }, 2));
        assert!(verify_embedding(&MultiGraph::new(0), &BookEmbedding { order: vec![], pages: vec![] }, 2));
        assert!(!verify_witness(&g, &HamiltonianWitness { cycle: vec![0, 1, 1, 3] }));
        assert!(verify_witness(&gen::cycle(5), &HamiltonianWitness { cycle: vec![0, 1, 2, 3, 4] }));
    }

    #[test]
    fn drawn_example_embedding_verifies() {
        let ex = gen::drawn_example();
        let emb = BookEmbedding { order: ex.cycle.clone(), pages: ex.pages.clone() };
        assert!(verify_embedding(&ex.graph, &emb, 2));
        assert!(verify_witness(&ex.graph, &HamiltonianWitness { cycle: ex.cycle }));
    }
}
