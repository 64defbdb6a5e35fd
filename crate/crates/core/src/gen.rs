//! Instance generators and named graphs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexId};
use crate::planarity::is_planar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complete(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v).expect("distinct");
        }
    }
    g
}

pub fn complete_bipartite(a: usize, b: usize) -> MultiGraph {
    let mut g = MultiGraph::new(a + b);
    for u in 0..a {
        for v in 0..b {
            g.add_edge(u, a + v).expect("distinct");
        }
    }
    g
}

pub fn cycle(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    if n == 2 {
        g.add_edge(0, 1).expect("distinct");
        g.add_edge(0, 1).expect("distinct");
    } else if n >= 3 {
        for v in 0..n {
            g.add_edge(v, (v + 1) % n).expect("distinct");
        }
    }
    g
}

pub fn path(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    for v in 1..n {
        g.add_edge(v - 1, v).expect("distinct");
    }
    g
}

/// Hub `0` joined to a cycle on `1..n`.
pub fn wheel(n: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    let k = n - 1;
    for i in 0..k {
        g.add_edge(1 + i, 1 + (i + 1) % k).expect("distinct");
        g.add_edge(0, 1 + i).expect("distinct");
    }
    g
}

/// Two vertices joined by `k` parallel edges.
pub fn bundle(k: usize) -> MultiGraph {
    MultiGraph::from_edges(2, &vec![(0, 1); k]).expect("valid")
}

/// Poles `0` and `1` joined by internally disjoint paths whose inner
/// vertex counts are given.
pub fn theta_paths(inner: &[usize]) -> MultiGraph {
    let mut g = MultiGraph::new(2);
    for &k in inner {
        let mut prev = 0;
        for _ in 0..k {
            let v = g.add_vertex();
            g.add_edge(prev, v).expect("distinct");
            prev = v;
        }
        g.add_edge(prev, 1).expect("distinct");
    }
    g
}

/// Theta graph on `n` vertices: three paths between two poles with the
/// inner vertices split as evenly as possible.
pub fn theta(n: usize) -> MultiGraph {
    let inner = n.saturating_sub(2);
    let parts = [inner.div_ceil(3), (inner + 1) / 3, inner / 3];
    theta_paths(&parts)
}

/// The 11-vertex maximal planar non-Hamiltonian graph: a triangular
/// bipyramid with one vertex stacked into each of its six faces.
pub fn goldner_harary() -> MultiGraph {
    let mut g = MultiGraph::new(11);
    for (u, v) in [(0, 1), (1, 2), (2, 0)] {
        g.add_edge(u, v).expect("distinct");
    }
    for apex in [3, 4] {
        for v in 0..3 {
            g.add_edge(apex, v).expect("distinct");
        }
    }
    let faces = [(3, 0, 1), (3, 1, 2), (3, 2, 0), (4, 0, 1), (4, 1, 2), (4, 2, 0)];
    for (i, &(a, b, c)) in faces.iter().enumerate() {
        let w = 5 + i;
        for x in [a, b, c] {
            g.add_edge(w, x).expect("distinct");
        }
    }
    g
}

/// The 19-vertex example drawn as a two-page book embedding, with
/// vertices `A..S` numbered `0..18` and the alphabetical cycle as witness.
pub struct DrawnExample {
    pub graph: MultiGraph,
    pub labels: Vec<String>,
    pub cycle: Vec<VertexId>,
    /// Page (1 or 2) per edge id as drawn.
    pub pages: Vec<u8>,
}

pub fn drawn_example() -> DrawnExample {
    fn id(c: char) -> usize {
        (c as u8 - b'A') as usize
    }
    let upper = ["QN", "IC", "CH", "HD", "JL", "DG"];
    let lower = ["OF", "EA", "DB", "GN", "KN", "NL", "GI", "IN", "NJ", "QS", "SP"];
    let on_cycle = ["ON", "NM", "LK", "KJ", "GH", "HI", "FE", "AB", "BC", "CD", "AS", "SR", "RQ", "QP"];
    let mut g = MultiGraph::new(19);
    let mut pages = Vec::new();
    for (list, page) in [(&on_cycle[..], 1u8), (&upper[..], 1), (&lower[..], 2)] {
        for s in list {
            let mut it = s.chars();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            g.add_edge(id(a), id(b)).expect("distinct");
            pages.push(page);
        }
    }
    DrawnExample {
        graph: g,
        labels: (0..19).map(|i| ((b'A' + i as u8) as char).to_string()).collect(),
        cycle: (0..19).collect(),
        pages,
    }
}

/// Five-vertex multigraph whose SPQR-tree has one node of each of the
/// P, S and R kinds. Vertices: 0 top, 1 bottom, 2 left, 3 centre, 4 right.
pub fn mixed_spqr_example() -> MultiGraph {
    MultiGraph::from_edges(5, &[(0, 1), (0, 1), (0, 2), (2, 1), (1, 3), (3, 0), (0, 4), (4, 1), (3, 4)]).expect("valid")
}

/// Random tree on `n` vertices plus `k` extra edges between
/// non-adjacent pairs. The feedback edge number is exactly `k`.
pub fn random_fen(n: usize, k: usize, seed: u64) -> Result<MultiGraph> {
    let mut r = rng(seed);
    let mut g = MultiGraph::new(n);
    let mut present = HashSet::new();
    for v in 1..n {
        let p = r.gen_range(0..v);
        g.add_edge(p, v).expect("distinct");
        present.insert((p, v));
    }
    let max_extra = n * n.saturating_sub(1) / 2 - n.saturating_sub(1);
    if k > max_extra {
        return Err(Error::Contract(format!("cannot add {k} extra edges to a tree on {n} vertices")));
    }
    let mut added = 0;
    while added < k {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        let key = (u.min(v), u.max(v));
        if u != v && present.insert(key) {
            g.add_edge(key.0, key.1).expect("distinct");
            added += 1;
        }
    }
    Ok(g)
}

/// Random loopless multigraph with `m` edges on `n` vertices.
pub fn random_multigraph(n: usize, m: usize, seed: u64) -> MultiGraph {
    let mut r = rng(seed);
    let mut g = MultiGraph::new(n);
    if n < 2 {
        return g;
    }
    for _ in 0..m {
        let u = r.gen_range(0..n);
        let mut v = r.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(u, v).expect("distinct");
    }
    g
}

/// Connected planar graph with maximum degree at most four.
///
/// A random stacked triangulation is mixed by random edge flips; edges at
/// vertices above the degree cap are then deleted (never bridges) until
/// the cap holds.
pub fn planar_deg4(n: usize, seed: u64) -> Result<MultiGraph> {
    if n < 3 {
        return Ok(path(n));
    }
    let mut r = rng(seed);
    for _attempt in 0..64 {
        let tri = random_triangulation(n, &mut r);
        if let Some(g) = cap_degree(n, &tri, 4, &mut r) {
            if !is_planar(&g) || !g.is_connected() || g.max_degree() > 4 {
                return Err(Error::Integrity("degree-capped triangulation failed verification".into()));
            }
            return Ok(g);
        }
    }
    Err(Error::Integrity("could not reach the degree cap".into()))
}

fn random_triangulation(n: usize, r: &mut ChaCha8Rng) -> BTreeSet<(usize, usize)> {
    // Oriented triangular faces.
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for v in 3..n {
        let i = r.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        faces.push([a, b, v]);
        faces.push([b, c, v]);
        faces.push([c, a, v]);
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for f in &faces {
        for i in 0..3 {
            edges.insert(key(f[i], f[(i + 1) % 3]));
        }
    }
    // Random flips: pick a face and one of its edges, locate the opposite
    // face through the reversed dart.
    let flips = 4 * n;
    for _ in 0..flips {
        let fi = r.gen_range(0..faces.len());
        let k = r.gen_range(0..3);
        let f = faces[fi];
        let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
        let Some(gi) = faces.iter().position(|g| (0..3).any(|j| g[j] == b && g[(j + 1) % 3] == a)) else {
            continue;
        };
        let g = faces[gi];
        let j = (0..3).find(|&j| g[j] == b && g[(j + 1) % 3] == a).expect("found");
        let d = g[(j + 2) % 3];
        if c == d || edges.contains(&key(c, d)) {
            continue;
        }
        let deg = |x: usize| edges.iter().filter(|&&(p, q)| p == x || q == x).count();
        if deg(a) <= 3 || deg(b) <= 3 {
            continue;
        }
        edges.remove(&key(a, b));
        edges.insert(key(c, d));
        faces[fi] = [a, d, c];
        faces[gi] = [b, c, d];
    }
    edges
}

fn cap_degree(n: usize, edges: &BTreeSet<(usize, usize)>, cap: usize, r: &mut ChaCha8Rng) -> Option<MultiGraph> {
    let mut alive: Vec<(usize, usize)> = edges.iter().copied().collect();
    alive.shuffle(r);
    let mut deg = vec![0usize; n];
    for &(u, v) in &alive {
        deg[u] += 1;
        deg[v] += 1;
    }
    loop {
        let over: Vec<usize> = (0..n).filter(|&v| deg[v] > cap).collect();
        if over.is_empty() {
            break;
        }
        let mut removed = false;
        // Prefer edges between two overloaded vertices.
        let mut cands: Vec<usize> = (0..alive.len()).filter(|&i| deg[alive[i].0] > cap || deg[alive[i].1] > cap).collect();
        cands.sort_by_key(|&i| std::cmp::Reverse(deg[alive[i].0].min(deg[alive[i].1])));
        for i in cands {
            let (u, v) = alive[i];
            if connected_without(n, &alive, i, u, v) {
                alive.swap_remove(i);
                deg[u] -= 1;
                deg[v] -= 1;
                removed = true;
                break;
            }
        }
        if !removed {
            return None;
        }
    }
    alive.sort_unstable();
    Some(MultiGraph::from_edges(n, &alive).expect("valid"))
}

fn connected_without(n: usize, edges: &[(usize, usize)], skip: usize, u: usize, v: usize) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if i != skip {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    seen[u] = true;
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        if x == v {
            return true;
        }
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    false
}

/// Canonical form of a simple graph on at most eight vertices: the
/// lexicographically largest adjacency bitmask over all relabellings that
/// respect an iterated degree refinement.
pub fn canonical_code(n: usize, adj: &[u8]) -> u32 {
    // Colour refinement.
    let mut colour: Vec<u64> = (0..n).map(|v| adj[v].count_ones() as u64).collect();
    for _ in 0..n {
        let mut sig: Vec<(u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| colour[w]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let mut uniq = sig.clone();
        uniq.sort();
        uniq.dedup();
        let next: Vec<u64> = sig.iter_mut().map(|s| uniq.binary_search(s).unwrap() as u64).collect();
        let stable = next.iter().collect::<BTreeSet<_>>().len() == colour.iter().collect::<BTreeSet<_>>().len();
        colour = next;
        if stable {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| colour[v]);
    // Cells of equal colour, permuted independently.
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match cells.last_mut() {
            Some(c) if colour[c[0]] == colour[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best = 0u32;
    let mut perm = vec![0usize; n];
    permute_cells(&mut cells, 0, &mut perm, 0, adj, n, &mut best);
    best
}

fn permute_cells(cells: &mut [Vec<usize>], ci: usize, perm: &mut [usize], pos: usize, adj: &[u8], n: usize, best: &mut u32) {
    if ci == cells.len() {
        let mut code = 0u32;
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if adj[perm[i]] >> perm[j] & 1 == 1 {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        *best = (*best).max(code);
        return;
    }
    let len = cells[ci].len();
    heap_permute(cells, ci, len, perm, pos, adj, n, best);
}

#[allow(clippy::too_many_arguments)]
fn heap_permute(cells: &mut [Vec<usize>], ci: usize, k: usize, perm: &mut [usize], pos: usize, adj: &[u8], n: usize, best: &mut u32) {
    if k <= 1 {
        let len = cells[ci].len();
        perm[pos..pos + len].copy_from_slice(&cells[ci]);
        permute_cells(cells, ci + 1, perm, pos + len, adj, n, best);
        return;
    }
    for i in 0..k {
        heap_permute(cells, ci, k - 1, perm, pos, adj, n, best);
        let j = if k % 2 == 0 { i } else { 0 };
        cells[ci].swap(j, k - 1);
    }
}

/// One representative of every isomorphism class of simple graphs on `n`
/// vertices (`n <= 8`), grown edge by edge with canonical deduplication.
pub fn all_graphs(n: usize) -> Vec<MultiGraph> {
    assert!(n <= 8, "exhaustive generation is limited to eight vertices");
    let mut level: Vec<Vec<u8>> = vec![vec![0u8; n]];
    let mut out: Vec<Vec<u8>> = level.clone();
    loop {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for adj in &level {
            for u in 0..n {
                for v in u + 1..n {
                    if adj[u] >> v & 1 == 1 {
                        continue;
                    }
                    let mut a = adj.clone();
                    a[u] |= 1 << v;
                    a[v] |= 1 << u;
                    if seen.insert(canonical_code(n, &a)) {
                        next.push(a);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out.iter()
        .map(|adj| {
            let mut g = MultiGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if adj[u] >> v & 1 == 1 {
                        g.add_edge(u, v).expect("distinct");
                    }
                }
            }
            g
        })
        .collect()
}

/// Connected representatives from [`all_graphs`].
pub fn connected_graphs(n: usize) -> Vec<MultiGraph> {
    all_graphs(n).into_iter().filter(|g| g.is_connected()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::feedback_edge_number;

    #[test]
    fn isomorphism_class_counts() {
        let all: Vec<usize> = (1..=6).map(|n| all_graphs(n).len()).collect();
        assert_eq!(all, vec![1, 2, 4, 11, 34, 156]);
        let conn: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(conn, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn seven_vertex_classes() {
        assert_eq!(all_graphs(7).len(), 1044);
        assert_eq!(connected_graphs(7).len(), 853);
    }

    #[test]
    fn goldner_harary_is_maximal_planar() {
        let g = goldner_harary();
        assert_eq!((g.n(), g.m()), (11, 27));
        assert!(is_planar(&g));
    }

    #[test]
    fn drawn_example_shape() {
        let ex = drawn_example();
        assert_eq!((ex.graph.n(), ex.graph.m()), (19, 31));
        assert!(ex.graph.is_simple());
    }

    #[test]
    fn fen_generator_hits_target() {
        for k in 0..6 {
            let g = random_fen(20, k, k as u64).unwrap();
            assert_eq!(feedback_edge_number(&g), k);
            assert!(g.is_connected() && g.is_simple());
        }
    }

    #[test]
    fn deg4_generator() {
        for seed in 0..5 {
            let g = planar_deg4(60, seed).unwrap();
            assert!(g.max_degree() <= 4 && g.is_connected() && is_planar(&g));
            assert_eq!(g.n(), 60);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(planar_deg4(40, 7).unwrap(), planar_deg4(40, 7).unwrap());
        assert_eq!(random_multigraph(9, 14, 3), random_multigraph(9, 14, 3));
    }

    #[test]
    fn theta_sizes() {
        let g = theta(8);
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 9);
    }
}
