//! Sphere-cut decompositions of skeleton embeddings.
//!
//! A noose is stored combinatorially as a set of subcurves, each given by
//! the pair of vertices it connects and the face it runs through. The
//! decomposition is built greedily by merging edge clusters whose union
//! is still bounded by a noose; widths are therefore heuristic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{is_biconnected, EdgeId, MultiGraph, VertexId};
use crate::planarity::{dart_edge, CombinatorialEmbedding};

/// Curve through face `face` between vertices `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcurve {
    pub u: VertexId,
    pub v: VertexId,
    pub face: usize,
}

impl Subcurve {
    pub fn new(a: VertexId, b: VertexId, face: usize) -> Self {
        Subcurve { u: a.min(b), v: a.max(b), face }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Position on the canonical traversal of a noose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Vertex(VertexId),
    /// Subcurve by index; `forward` when traversed from `u` to `v`.
    Curve { index: usize, forward: bool },
}

/// Closed curve made of subcurves; consecutive subcurves meet at vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakNoose {
    subcurves: Vec<Subcurve>,
}

impl WeakNoose {
    /// `None` unless the subcurves form a single closed curve.
    pub fn new(mut subcurves: Vec<Subcurve>) -> Option<Self> {
        subcurves.sort_unstable();
        subcurves.dedup();
        if subcurves.len() < 2 || subcurves.iter().any(|c| c.u == c.v) {
            return None;
        }
        let o = WeakNoose { subcurves };
        let mut deg: HashMap<VertexId, usize> = HashMap::new();
        for c in &o.subcurves {
            *deg.entry(c.u).or_default() += 1;
            *deg.entry(c.v).or_default() += 1;
        }
        if deg.values().any(|&d| d != 2) {
            return None;
        }
        let layout = o.layout();
        if layout.len() != 2 * o.subcurves.len() {
            return None;
        }
        Some(o)
    }

    pub fn subcurves(&self) -> &[Subcurve] {
        &self.subcurves
    }

    pub fn len(&self) -> usize {
        self.subcurves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subcurves.is_empty()
    }

    pub fn index_of(&self, c: &Subcurve) -> Option<usize> {
        self.subcurves.binary_search(c).ok()
    }

    /// Touched vertices, sorted.
    pub fn boundary(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.subcurves.iter().flat_map(|c| [c.u, c.v]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// At most one subcurve per face.
    pub fn is_face_simple(&self) -> bool {
        let mut faces: Vec<usize> = self.subcurves.iter().map(|c| c.face).collect();
        faces.sort_unstable();
        faces.windows(2).all(|w| w[0] != w[1])
    }

    /// Canonical traversal: start at the smallest vertex, leave along the
    /// smaller of its two subcurves, alternate vertex and curve slots.
    /// Shorter than `2 * len` if the subcurves form several cycles.
    pub fn layout(&self) -> Vec<Slot> {
        let mut at: HashMap<VertexId, Vec<usize>> = HashMap::new();
        for (i, c) in self.subcurves.iter().enumerate() {
            at.entry(c.u).or_default().push(i);
            at.entry(c.v).or_default().push(i);
        }
        let Some(&start) = at.keys().min() else { return Vec::new() };
        let mut out = Vec::with_capacity(2 * self.subcurves.len());
        let mut v = start;
        let mut c = at[&start][0].min(at[&start][1]);
        loop {
            out.push(Slot::Vertex(v));
            let sc = self.subcurves[c];
            out.push(Slot::Curve { index: c, forward: v == sc.u });
            let w = sc.other(v);
            if w == start {
                break;
            }
            let inc = &at[&w];
            let next = if inc[0] == c { inc[1] } else { inc[0] };
            v = w;
            c = next;
            if out.len() > 2 * self.subcurves.len() {
                break;
            }
        }
        out
    }

    /// Boundary vertices in canonical cyclic order.
    pub fn cyclic_vertices(&self) -> Vec<VertexId> {
        self.layout()
            .into_iter()
            .filter_map(|s| match s {
                Slot::Vertex(v) => Some(v),
                Slot::Curve { .. } => None,
            })
            .collect()
    }
}

/// Symmetric difference of two nooses, `None` unless it is a single
/// closed curve.
pub fn xor_nooses(a: &WeakNoose, b: &WeakNoose) -> Option<WeakNoose> {
    let sa: BTreeSet<Subcurve> = a.subcurves.iter().copied().collect();
    let sb: BTreeSet<Subcurve> = b.subcurves.iter().copied().collect();
    WeakNoose::new(sa.symmetric_difference(&sb).copied().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutKind {
    Leaf(EdgeId),
    Inner(usize, usize),
}

/// Node of the rooted decomposition tree together with the arc to its
/// parent: `edges` is the side away from the root, `noose` separates it.
#[derive(Clone, Debug)]
pub struct CutNode {
    pub kind: CutKind,
    pub edges: Vec<EdgeId>,
    pub noose: WeakNoose,
    pub parent: Option<usize>,
}

/// Sphere-cut decomposition rooted at the leaf of the reference edge. The
/// reference leaf is implicit; `root` is the node attached to it, whose
/// side holds every other edge.
#[derive(Clone, Debug)]
pub struct SphereCut {
    pub emb: CombinatorialEmbedding,
    pub reference: EdgeId,
    pub nodes: Vec<CutNode>,
    pub root: usize,
    pub leaf_of_edge: Vec<usize>,
}

/// Noose separating the edges flagged in `inside` from the rest, if one
/// exists.
pub fn noose_of(emb: &CombinatorialEmbedding, inside: &[bool]) -> Option<WeakNoose> {
    let mut subs = Vec::new();
    for f in 0..emb.face_count() {
        let darts = emb.face_darts(f);
        let k = darts.len();
        let mut ends = Vec::with_capacity(2);
        for i in 0..k {
            let a = inside[dart_edge(darts[i])];
            let b = inside[dart_edge(darts[(i + 1) % k])];
            if a != b {
                ends.push(emb.head(darts[i]));
            }
        }
        match ends.len() {
            0 => {}
            2 => {
                if ends[0] == ends[1] {
                    return None;
                }
                subs.push(Subcurve::new(ends[0], ends[1], f));
            }
            _ => return None,
        }
    }
    WeakNoose::new(subs)
}

fn mask(m: usize, edges: &[EdgeId]) -> Vec<bool> {
    let mut v = vec![false; m];
    for &e in edges {
        v[e] = true;
    }
    v
}

/// Greedy sphere-cut decomposition of a biconnected plane skeleton.
pub fn build_spherecut(sk: &MultiGraph, emb: CombinatorialEmbedding, reference: EdgeId) -> Result<SphereCut> {
    let m = sk.m();
    if reference >= m || m < 3 || !is_biconnected(sk) {
        return Err(Error::NotBiconnected);
    }
    let mut nodes: Vec<CutNode> = Vec::new();
    let mut leaf_of_edge = vec![usize::MAX; m];
    let mut alive: BTreeSet<usize> = BTreeSet::new();
    for e in 0..m {
        if e == reference {
            continue;
        }
        let noose = noose_of(&emb, &mask(m, &[e])).ok_or_else(|| Error::Integrity(format!("edge {e} has no leaf noose")))?;
        leaf_of_edge[e] = nodes.len();
        alive.insert(nodes.len());
        nodes.push(CutNode { kind: CutKind::Leaf(e), edges: vec![e], noose, parent: None });
    }
    let vertex_sets = |n: &CutNode| -> BTreeSet<VertexId> { n.edges.iter().flat_map(|&e| [sk.endpoints(e).0, sk.endpoints(e).1]).collect() };
    // Candidate merges keyed by (noose size, merged size, a, b).
    let mut cache: BTreeMap<(usize, usize), Option<WeakNoose>> = BTreeMap::new();
    while alive.len() > 1 {
        let ids: Vec<usize> = alive.iter().copied().collect();
        let vsets: HashMap<usize, BTreeSet<VertexId>> = ids.iter().map(|&i| (i, vertex_sets(&nodes[i]))).collect();
        let mut best: Option<((usize, usize, usize, usize), WeakNoose)> = None;
        for (x, &a) in ids.iter().enumerate() {
            for &b in &ids[x + 1..] {
                if vsets[&a].is_disjoint(&vsets[&b]) {
                    continue;
                }
                let noose = cache
                    .entry((a, b))
                    .or_insert_with(|| {
                        let mut es = nodes[a].edges.clone();
                        es.extend_from_slice(&nodes[b].edges);
                        noose_of(&emb, &mask(m, &es)).filter(|o| o.is_face_simple())
                    })
                    .clone();
                if let Some(o) = noose {
                    let key = (o.len(), nodes[a].edges.len() + nodes[b].edges.len(), a, b);
                    if best.as_ref().is_none_or(|(k, _)| key < *k) {
                        best = Some((key, o));
                    }
                }
            }
        }
        let Some(((_, _, a, b), noose)) = best else {
            return Err(Error::Integrity("greedy sphere-cut construction found no valid merge".into()));
        };
        let mut edges = nodes[a].edges.clone();
        edges.extend_from_slice(&nodes[b].edges);
        edges.sort_unstable();
        let id = nodes.len();
        nodes[a].parent = Some(id);
        nodes[b].parent = Some(id);
        nodes.push(CutNode { kind: CutKind::Inner(a, b), edges, noose, parent: None });
        alive.remove(&a);
        alive.remove(&b);
        alive.insert(id);
        cache.retain(|&(x, y), _| x != a && x != b && y != a && y != b);
    }
    let root = *alive.iter().next().expect("at least one non-reference edge");
    let sc = SphereCut { emb, reference, nodes, root, leaf_of_edge };
    sc.check()?;
    Ok(sc)
}

impl SphereCut {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.noose.len()).max().unwrap_or(0)
    }

    /// Nodes in post-order (children before parents).
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                out.push(x);
                continue;
            }
            stack.push((x, true));
            if let CutKind::Inner(a, b) = self.nodes[x].kind {
                stack.push((b, false));
                stack.push((a, false));
            }
        }
        out
    }

    /// Structural checks: sides partition, nooses match sides, laminarity.
    pub fn check(&self) -> Result<()> {
        let m = self.emb.m();
        let root = &self.nodes[self.root];
        if root.edges.len() != m - 1 || root.edges.contains(&self.reference) {
            return Err(Error::Integrity("root side must hold every non-reference edge".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            let expect = noose_of(&self.emb, &mask(m, &n.edges));
            if expect.as_ref() != Some(&n.noose) || !n.noose.is_face_simple() {
                return Err(Error::Integrity(format!("cut node {i} has an inconsistent noose")));
            }
            if let CutKind::Inner(a, b) = n.kind {
                let mut es = self.nodes[a].edges.clone();
                es.extend_from_slice(&self.nodes[b].edges);
                es.sort_unstable();
                if es != n.edges || es.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Integrity(format!("cut node {i} does not partition its children")));
                }
            }
        }
        if !self.is_laminar() {
            return Err(Error::Integrity("nooses are not laminar".into()));
        }
        Ok(())
    }

    /// Every node's side contains the sides of all its descendants.
    pub fn is_laminar(&self) -> bool {
        self.nodes.iter().all(|n| match n.parent {
            None => true,
            Some(p) => {
                let pe: BTreeSet<EdgeId> = self.nodes[p].edges.iter().copied().collect();
                n.edges.iter().all(|e| pe.contains(e))
            }
        })
    }

    /// Noose around the reference edge (the root arc).
    pub fn root_noose(&self) -> &WeakNoose {
        &self.nodes[self.root].noose
    }
}

/// Operand of an xor step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Left,
    Right,
    Triangle(usize),
    Step(usize),
}

#[derive(Clone, Debug)]
pub struct XorStep {
    pub a: Operand,
    pub b: Operand,
    pub result: WeakNoose,
}

/// Way of obtaining a parent noose from its children's nooses and
/// edge-less triangles.
#[derive(Clone, Debug)]
pub struct XorPlan {
    pub triangles: Vec<WeakNoose>,
    pub steps: Vec<XorStep>,
}

impl XorPlan {
    pub fn result(&self) -> Option<&WeakNoose> {
        self.steps.last().map(|s| &s.result)
    }
}

/// Plan for the inner node `node`: combine the children's nooses and the
/// triangles of `O_P ⊕ O_L ⊕ O_R` into `O_P`.
pub fn xor_plan(sc: &SphereCut, node: usize) -> Result<XorPlan> {
    let CutKind::Inner(l, r) = sc.nodes.get(node).map(|n| n.kind.clone()).ok_or_else(|| Error::Contract(format!("unknown cut node {node}")))? else {
        return Err(Error::Contract(format!("cut node {node} is a leaf")));
    };
    let parent = &sc.nodes[node].noose;
    let ol = &sc.nodes[l].noose;
    let or = &sc.nodes[r].noose;
    let mut rest: BTreeSet<Subcurve> = BTreeSet::new();
    for c in parent.subcurves().iter().chain(ol.subcurves()).chain(or.subcurves()) {
        if !rest.remove(c) {
            rest.insert(*c);
        }
    }
    let triangles = split_triangles(&rest)?;
    let mut items: Vec<(Operand, WeakNoose)> = vec![(Operand::Left, ol.clone()), (Operand::Right, or.clone())];
    for (i, t) in triangles.iter().enumerate() {
        items.push((Operand::Triangle(i), t.clone()));
    }
    let mut steps = Vec::new();
    if !search_plan(&items, parent, &mut steps) {
        return Err(Error::Integrity(format!("no xor plan for cut node {node}")));
    }
    Ok(XorPlan { triangles, steps })
}

fn split_triangles(rest: &BTreeSet<Subcurve>) -> Result<Vec<WeakNoose>> {
    let mut by_face: BTreeMap<usize, Vec<Subcurve>> = BTreeMap::new();
    for c in rest {
        by_face.entry(c.face).or_default().push(*c);
    }
    let mut out = Vec::new();
    for group in by_face.values() {
        let mut left: Vec<Subcurve> = group.clone();
        while !left.is_empty() {
            let first = left[0];
            let mut found = None;
            'outer: for (i, b) in left.iter().enumerate().skip(1) {
                for (j, c) in left.iter().enumerate().skip(1) {
                    if i == j {
                        continue;
                    }
                    let cand = WeakNoose::new(vec![first, *b, *c]);
                    if let Some(t) = cand {
                        if t.len() == 3 && t.boundary().len() == 3 {
                            found = Some((i, j, t));
                            break 'outer;
                        }
                    }
                }
            }
            let Some((i, j, t)) = found else {
                return Err(Error::Integrity("leftover subcurves do not form triangles".into()));
            };
            let (hi, lo) = (i.max(j), i.min(j));
            left.remove(hi);
            left.remove(lo);
            left.remove(0);
            out.push(t);
        }
    }
    Ok(out)
}

/// Search budget for plan optimization; past it the best plan found so
/// far is kept.
const PLAN_BUDGET: usize = 20_000;

struct PlanSearch<'a> {
    target: &'a WeakNoose,
    steps: Vec<XorStep>,
    best: Option<(usize, f64, Vec<XorStep>)>,
    visited: usize,
}

impl PlanSearch<'_> {
    /// Plans are ranked by their longest intermediate noose, then by the
    /// sum of `20^len` over steps, a rough table-size estimate.
    fn run(&mut self, items: &[(Operand, WeakNoose)], longest: usize, volume: f64) {
        if items.len() == 1 {
            if &items[0].1 == self.target && self.best.as_ref().is_none_or(|b| (longest, volume) < (b.0, b.1)) {
                self.best = Some((longest, volume, self.steps.clone()));
            }
            return;
        }
        if self.best.is_some() && self.visited >= PLAN_BUDGET {
            return;
        }
        self.visited += 1;
        let mut cands = Vec::new();
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let Some(x) = xor_nooses(&items[i].1, &items[j].1) else { continue };
                // Only glue along shared subcurves.
                if x.len() >= items[i].1.len() + items[j].1.len() {
                    continue;
                }
                cands.push((x.len(), i, j, x));
            }
        }
        cands.sort_by_key(|c| c.0);
        for (len, i, j, x) in cands {
            let longest = longest.max(len);
            let volume = volume + 20f64.powi(len as i32);
            if let Some(b) = &self.best {
                if (longest, volume) >= (b.0, b.1) {
                    continue;
                }
            }
            self.steps.push(XorStep { a: items[i].0, b: items[j].0, result: x.clone() });
            let mut next: Vec<(Operand, WeakNoose)> = items.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, it)| it.clone()).collect();
            next.push((Operand::Step(self.steps.len() - 1), x));
            self.run(&next, longest, volume);
            self.steps.pop();
        }
    }
}

fn search_plan(items: &[(Operand, WeakNoose)], target: &WeakNoose, steps: &mut Vec<XorStep>) -> bool {
    let mut search = PlanSearch { target, steps: Vec::new(), best: None, visited: 0 };
    search.run(items, 0, 0.0);
    match search.best {
        Some((_, _, best)) => {
            *steps = best;
            true
        }
        None => false,
    }
}

/// Embed a skeleton and build its decomposition.
pub fn decompose_skeleton(sk: &MultiGraph, reference: EdgeId) -> Result<SphereCut> {
    let emb = crate::planarity::planar_embedding(sk).ok_or(Error::NonPlanar)?;
    build_spherecut(sk, emb, reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn c(a: usize, b: usize, f: usize) -> Subcurve {
        Subcurve::new(a, b, f)
    }

    #[test]
    fn xor_glues_along_shared_subcurves() {
        let oal = WeakNoose::new(vec![c(1, 2, 0), c(2, 3, 1), c(3, 4, 2), c(4, 5, 3), c(1, 5, 4)]).unwrap();
        let o1 = WeakNoose::new(vec![c(1, 2, 0), c(2, 8, 5), c(1, 8, 6)]).unwrap();
        let x = xor_nooses(&oal, &o1).unwrap();
        let expect = WeakNoose::new(vec![c(2, 3, 1), c(3, 4, 2), c(4, 5, 3), c(1, 5, 4), c(2, 8, 5), c(1, 8, 6)]).unwrap();
        assert_eq!(x, expect);
    }

    #[test]
    fn xor_degenerate_cases() {
        let o = WeakNoose::new(vec![c(0, 1, 0), c(1, 2, 1), c(0, 2, 2)]).unwrap();
        assert!(xor_nooses(&o, &o).is_none());
        let p = WeakNoose::new(vec![c(5, 6, 0), c(6, 7, 1), c(5, 7, 2)]).unwrap();
        assert!(xor_nooses(&o, &p).is_none());
    }

    #[test]
    fn layout_is_canonical() {
        let o = WeakNoose::new(vec![c(3, 1, 4), c(1, 2, 7), c(2, 3, 0)]).unwrap();
        let l = o.layout();
        assert_eq!(l.len(), 6);
        assert_eq!(l[0], Slot::Vertex(1));
        assert_eq!(o.cyclic_vertices(), vec![1, 2, 3]);
        let two = WeakNoose::new(vec![c(0, 4, 1), c(0, 4, 2)]).unwrap();
        assert_eq!(two.layout().len(), 4);
    }

    #[test]
    fn cycle_skeleton_width_two() {
        for k in 3..9 {
            let sc = decompose_skeleton(&gen::cycle(k), 0).unwrap();
            assert_eq!(sc.width(), 2);
            assert_eq!(sc.root_noose().len(), 2);
        }
    }

    #[test]
    fn k4_width_three() {
        let sc = decompose_skeleton(&gen::complete(4), 0).unwrap();
        assert_eq!(sc.width(), 3);
        for (i, n) in sc.nodes.iter().enumerate() {
            if let CutKind::Inner(..) = n.kind {
                let plan = xor_plan(&sc, i).unwrap();
                assert_eq!(plan.result(), Some(&n.noose));
                assert!(plan.steps.len() <= 3 && plan.triangles.len() <= 2);
            }
        }
    }

    #[test]
    fn plans_replay_on_wheels() {
        for k in 4..9 {
            let sc = decompose_skeleton(&gen::wheel(k), 1).unwrap();
            for (i, n) in sc.nodes.iter().enumerate() {
                if let CutKind::Inner(..) = n.kind {
                    let plan = xor_plan(&sc, i).unwrap();
                    assert_eq!(plan.result(), Some(&n.noose));
                }
            }
        }
    }
}
