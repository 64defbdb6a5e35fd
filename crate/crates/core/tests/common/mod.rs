//! Independent oracles shared by the integration tests. They rebuild noose
//! types and their combinations from explicit roles and matchings,
//! without codes or Dyck words.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twopage::gen;
use twopage::graph::{blocks, MultiGraph, VertexId};
use twopage::planarity::is_planar;
use twopage::spherecut::{decompose_skeleton, xor_nooses, xor_plan, CutKind, Operand, Slot, SphereCut, Subcurve, WeakNoose};
use twopage::spqr::{build_spqr, NodeKind};
use twopage::types::{NooseType, Point};

/// Points of `o` in traversal order for crossing counts `psi`.
pub fn points_in_order(o: &WeakNoose, psi: &BTreeMap<Subcurve, u8>) -> Vec<Point> {
    let mut out = Vec::new();
    for slot in o.layout() {
        match slot {
            Slot::Vertex(v) => out.push(Point::V(v)),
            Slot::Curve { index, forward } => {
                let c = o.subcurves()[index];
                match psi.get(&c).copied().unwrap_or(0) {
                    0 => {}
                    1 => out.push(Point::X(c, 0)),
                    _ if forward => out.extend([Point::X(c, 0), Point::X(c, 1)]),
                    _ => out.extend([Point::X(c, 1), Point::X(c, 0)]),
                }
            }
        }
    }
    out
}

/// True if no two pairs interleave along `order`.
pub fn non_crossing(pairs: &[(Point, Point)], order: &[Point]) -> bool {
    let pos = |p: &Point| order.iter().position(|q| q == p).expect("point on the noose");
    let spans: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(a, b)| {
            let (x, y) = (pos(a), pos(b));
            (x.min(y), x.max(y))
        })
        .collect();
    for (i, &(a, b)) in spans.iter().enumerate() {
        for &(c, d) in &spans[i + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return false;
            }
        }
    }
    true
}

/// Every perfect matching of `items`.
pub fn perfect_matchings<T: Copy>(items: &[T]) -> Vec<Vec<(T, T)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in 1..items.len() {
        let mut rest: Vec<T> = items[1..].to_vec();
        rest.remove(j - 1);
        for mut m in perfect_matchings(&rest) {
            m.push((items[0], items[j]));
            out.push(m);
        }
    }
    out
}

/// Types of `o` by brute force: every vertex is untouched, passed through
/// or a path end; every subcurve is crossed 0, 1 or 2 times; path ends and
/// crossing points are paired by every non-crossing perfect matching.
pub fn oracle_types(o: &WeakNoose) -> BTreeSet<NooseType> {
    let vs = o.boundary();
    let cs = o.subcurves().to_vec();
    let mut out = BTreeSet::new();
    let nv = vs.len();
    for roles in 0..3usize.pow(nv as u32) {
        let role = |i: usize| (roles / 3usize.pow(i as u32)) % 3;
        for counts in 0..3usize.pow(cs.len() as u32) {
            let psi: BTreeMap<Subcurve, u8> = cs.iter().enumerate().map(|(i, &c)| (c, ((counts / 3usize.pow(i as u32)) % 3) as u8)).collect();
            let order = points_in_order(o, &psi);
            let ends: Vec<Point> = order
                .iter()
                .copied()
                .filter(|p| match p {
                    Point::V(v) => role(vs.binary_search(v).expect("boundary vertex")) == 2,
                    Point::X(..) => true,
                })
                .collect();
            if ends.len() % 2 == 1 {
                continue;
            }
            let s: Vec<VertexId> = (0..nv).filter(|&i| role(i) == 1).map(|i| vs[i]).collect();
            for m in perfect_matchings(&ends) {
                if non_crossing(&m, &order) {
                    out.insert(NooseType::new(psi.iter().map(|(&c, &k)| (c, k)).collect(), m, s.clone()));
                }
            }
        }
    }
    out
}

/// Number of path segments at `v`: two if passed through, one if matched.
fn degree(x: &NooseType, v: VertexId) -> u8 {
    if x.s.binary_search(&v).is_ok() {
        2
    } else if x.matching.iter().any(|&(a, b)| a == Point::V(v) || b == Point::V(v)) {
        1
    } else {
        0
    }
}

/// Combination of `x1` on `o1` with `x2` on `o2` by explicit path gluing.
///
/// The full type only combines with the empty type, and only when the
/// empty side adds no boundary vertex. Crossing counts must agree on shared
/// subcurves. Every vertex carries at most two segments, exactly two if it
/// leaves the boundary. Gluing may close one cycle only if nothing else
/// remains and every surviving vertex is passed through; the result is
/// then full. A result without paths must pass through all or none of
/// its boundary. The resulting matching must be non-crossing.
pub fn oracle_combine(o1: &WeakNoose, x1: &NooseType, o2: &WeakNoose, x2: &NooseType) -> Option<NooseType> {
    let o = xor_nooses(o1, o2)?;
    let (b1, b2, b) = (o1.boundary(), o2.boundary(), o.boundary());
    let covers = |big: &[VertexId], small: &[VertexId]| small.iter().all(|v| big.contains(v));
    let (f1, f2) = (x1.is_full(o1), x2.is_full(o2));
    if f1 || f2 {
        if f1 && x2.is_empty() && covers(&b1, &b2) {
            return Some(NooseType::full(&o));
        }
        if f2 && x1.is_empty() && covers(&b2, &b1) {
            return Some(NooseType::full(&o));
        }
        return None;
    }
    for c in o1.subcurves() {
        if o2.index_of(c).is_some() && x1.psi_of(c) != x2.psi_of(c) {
            return None;
        }
    }
    let mut all: Vec<VertexId> = b1.iter().chain(&b2).copied().collect();
    all.sort_unstable();
    all.dedup();
    let mut deg = BTreeMap::new();
    for &v in &all {
        let d = degree(x1, v) + degree(x2, v);
        let survives = b.contains(&v);
        if d > 2 || (!survives && d != 2) {
            return None;
        }
        deg.insert(v, d);
    }
    // Glue the two matchings into paths and cycles.
    let mut adj: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    for &(p, q) in x1.matching.iter().chain(&x2.matching) {
        adj.entry(p).or_default().push(q);
        adj.entry(q).or_default().push(p);
    }
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for (&p, nb) in &adj {
        if nb.len() != 1 || seen.contains(&p) {
            continue;
        }
        let (mut prev, mut cur) = (p, nb[0]);
        seen.insert(p);
        while adj[&cur].len() == 2 {
            seen.insert(cur);
            let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
            prev = cur;
            cur = next;
        }
        seen.insert(cur);
        pairs.push((p, cur));
    }
    let cyclic = adj.keys().any(|p| !seen.contains(p));
    if cyclic {
        let mut left: BTreeSet<Point> = adj.keys().filter(|p| !seen.contains(p)).copied().collect();
        let start = *left.iter().next().expect("nonempty");
        let (mut prev, mut cur) = (start, adj[&start][0]);
        left.remove(&start);
        while cur != start {
            left.remove(&cur);
            let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
            prev = cur;
            cur = next;
        }
        if !left.is_empty() || !pairs.is_empty() || b.iter().any(|v| deg[v] != 2) {
            return None;
        }
        return Some(NooseType::full(&o));
    }
    let s: Vec<VertexId> = b.iter().copied().filter(|v| deg[v] == 2).collect();
    if pairs.is_empty() && !s.is_empty() && s.len() != b.len() {
        return None;
    }
    let mut psi: BTreeMap<Subcurve, u8> = BTreeMap::new();
    for &c in o.subcurves() {
        let k = if o1.index_of(&c).is_some() { x1.psi_of(&c) } else { x2.psi_of(&c) };
        psi.insert(c, k);
    }
    let order = points_in_order(&o, &psi);
    if !non_crossing(&pairs, &order) {
        return None;
    }
    Some(NooseType::new(psi.into_iter().collect(), pairs, s))
}

/// Every compatible triple `(x, x1, x2)` over the oracle type sets.
pub fn oracle_triples(o1: &WeakNoose, o2: &WeakNoose) -> BTreeSet<(NooseType, NooseType, NooseType)> {
    let t1 = oracle_types(o1);
    let t2 = oracle_types(o2);
    let mut out = BTreeSet::new();
    for x1 in &t1 {
        for x2 in &t2 {
            if let Some(x) = oracle_combine(o1, x1, o2, x2) {
                out.insert((x, x1.clone(), x2.clone()));
            }
        }
    }
    out
}

/// Noose around a `k`-cycle of vertices in the given cyclic order, each
/// subcurve in its own face.
pub fn ring(order: &[VertexId]) -> WeakNoose {
    let k = order.len();
    WeakNoose::new((0..k).map(|i| Subcurve::new(order[i], order[(i + 1) % k], i)).collect()).expect("a ring is a noose")
}

/// Sphere-cut decompositions of every rigid or series skeleton of `g`,
/// as built by the decision procedure; none for non-planar graphs.
pub fn skeleton_decompositions(g: &MultiGraph) -> Vec<SphereCut> {
    let mut out = Vec::new();
    if !is_planar(g) {
        return out;
    }
    let comps = g.components();
    let parts = comps.iter().filter(|c| c.len() > 1).flat_map(|c| blocks(&g.induced(c).0).expect("connected part").blocks);
    for b in parts {
        if b.graph.m() <= 1 || b.graph.m() == b.graph.n() {
            continue;
        }
        let t = build_spqr(&b.graph, 0).expect("biconnected block");
        for node in &t.nodes {
            if matches!(node.kind, NodeKind::R | NodeKind::S) && node.parent.is_some() {
                let sk = node.skeleton_graph();
                out.push(decompose_skeleton(&sk, node.ref_index().expect("non-root node")).expect("planar skeleton"));
            }
        }
    }
    out
}

fn operand<'a>(sc: &'a SphereCut, node: usize, plan: &'a twopage::spherecut::XorPlan, op: Operand) -> &'a WeakNoose {
    let CutKind::Inner(l, r) = sc.nodes[node].kind else { unreachable!("plans exist for inner nodes") };
    match op {
        Operand::Left => &sc.nodes[l].noose,
        Operand::Right => &sc.nodes[r].noose,
        Operand::Triangle(k) => &plan.triangles[k],
        Operand::Step(k) => &plan.steps[k].result,
    }
}

/// Operand pairs of xor steps from decompositions of wheels and
/// degree-four planar graphs, deduplicated and shuffled by `seed`.
pub fn splits(seed: u64) -> Vec<(WeakNoose, WeakNoose)> {
    let mut graphs: Vec<MultiGraph> = (4..9).map(gen::wheel).collect();
    for s in 0..12 {
        graphs.push(gen::planar_deg4(12 + 4 * s as usize, s).expect("generator succeeds"));
    }
    let mut found = BTreeSet::new();
    for g in &graphs {
        for sc in skeleton_decompositions(g) {
            for i in 0..sc.nodes.len() {
                if let CutKind::Inner(..) = sc.nodes[i].kind {
                    let plan = xor_plan(&sc, i).expect("plan exists");
                    for st in &plan.steps {
                        let a = operand(&sc, i, &plan, st.a).clone();
                        let b = operand(&sc, i, &plan, st.b).clone();
                        found.insert((a, b));
                    }
                }
            }
        }
    }
    let mut out: Vec<(WeakNoose, WeakNoose)> = found.into_iter().collect();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}
