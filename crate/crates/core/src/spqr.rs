//! SPQR-trees of biconnected multigraphs.
//!
//! Split components are found by repeatedly splitting off parallel
//! bundles and separation pairs; adjacent bonds and adjacent polygons are
//! then merged, which yields the unique triconnected components. Every
//! real edge finally becomes its own Q-node and the tree is rooted at the
//! Q-node of the chosen reference edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{is_biconnected, EdgeId, MultiGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    S,
    P,
    Q,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    /// Real edge of the input graph (only in Q-node skeletons).
    Real(EdgeId),
    /// Virtual edge standing for the given child node.
    Child(usize),
    /// Virtual edge towards the parent: the reference edge.
    Parent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub tag: EdgeTag,
}

#[derive(Clone, Debug)]
pub struct SpqrNode {
    pub kind: NodeKind,
    /// Vertices of the skeleton, as ids of the input graph, sorted.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<SkeletonEdge>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Poles `(s, t)` of the reference edge with `s < t`.
    pub poles: (VertexId, VertexId),
}

impl SpqrNode {
    /// Index of the reference edge in `edges`, if the node has a parent.
    pub fn ref_index(&self) -> Option<usize> {
        self.edges.iter().position(|e| e.tag == EdgeTag::Parent)
    }

    /// Skeleton as a multigraph on local vertex ids (positions in
    /// `vertices`), keeping edge order.
    pub fn skeleton_graph(&self) -> MultiGraph {
        let pos: HashMap<VertexId, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = MultiGraph::new(self.vertices.len());
        for e in &self.edges {
            g.add_edge(pos[&e.u], pos[&e.v]).expect("skeleton edges are loopless");
        }
        g
    }
}

#[derive(Clone, Debug)]
pub struct SpqrTree {
    pub nodes: Vec<SpqrNode>,
    pub root: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Real(EdgeId),
    Virtual(usize),
}

#[derive(Clone, Debug)]
struct Comp {
    edges: Vec<(VertexId, VertexId, Label)>,
}

impl Comp {
    fn vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Build the SPQR-tree of a biconnected multigraph rooted at the Q-node
/// of `reference`.
pub fn build_spqr(g: &MultiGraph, reference: EdgeId) -> Result<SpqrTree> {
    if g.m() < 2 || !is_biconnected(g) {
        return Err(Error::NotBiconnected);
    }
    if reference >= g.m() {
        return Err(Error::Graph(crate::error::GraphError::UnknownEdge(reference)));
    }
    let mut next_virtual = 0usize;
    let comps = split_components(g, &mut next_virtual);
    let comps = merge_same_kind(comps);
    assemble(g, comps, reference, &mut next_virtual)
}

fn kind_of(c: &Comp) -> NodeKind {
    let vs = c.vertices();
    if vs.len() == 2 {
        return NodeKind::P;
    }
    let mut deg: HashMap<VertexId, usize> = HashMap::new();
    for &(u, v, _) in &c.edges {
        *deg.entry(u).or_default() += 1;
        *deg.entry(v).or_default() += 1;
    }
    if deg.values().all(|&d| d == 2) {
        NodeKind::S
    } else {
        NodeKind::R
    }
}

fn split_components(g: &MultiGraph, next_virtual: &mut usize) -> Vec<Comp> {
    let start = Comp { edges: g.edges().iter().enumerate().map(|(e, &(u, v))| (u, v, Label::Real(e))).collect() };
    let mut work = vec![start];
    let mut done = Vec::new();
    while let Some(mut c) = work.pop() {
        let vs = c.vertices();
        if vs.len() == 2 {
            done.push(c);
            continue;
        }
        // Split off parallel bundles.
        let mut groups: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, &(u, v, _)) in c.edges.iter().enumerate() {
            groups.entry((u.min(v), u.max(v))).or_default().push(i);
        }
        if groups.values().any(|g| g.len() > 1) {
            let mut keep = Vec::new();
            let mut taken = vec![false; c.edges.len()];
            for (&(a, b), idx) in &groups {
                if idx.len() > 1 {
                    let vid = *next_virtual;
                    *next_virtual += 1;
                    let mut bond: Vec<_> = idx.iter().map(|&i| c.edges[i]).collect();
                    bond.push((a, b, Label::Virtual(vid)));
                    done.push(Comp { edges: bond });
                    for &i in idx {
                        taken[i] = true;
                    }
                    keep.push((a, b, Label::Virtual(vid)));
                }
            }
            for (i, &e) in c.edges.iter().enumerate() {
                if !taken[i] {
                    keep.push(e);
                }
            }
            c.edges = keep;
            work.push(c);
            continue;
        }
        match find_split(&c, &vs) {
            None => done.push(c),
            Some((a, b, side)) => {
                let vid = *next_virtual;
                *next_virtual += 1;
                let mut e1 = Vec::new();
                let mut e2 = Vec::new();
                for (i, &e) in c.edges.iter().enumerate() {
                    if side[i] {
                        e1.push(e);
                    } else {
                        e2.push(e);
                    }
                }
                e1.push((a, b, Label::Virtual(vid)));
                e2.push((a, b, Label::Virtual(vid)));
                work.push(Comp { edges: e1 });
                work.push(Comp { edges: e2 });
            }
        }
    }
    done
}

/// A separation pair `{a, b}` of a simple biconnected component together
/// with the edges of one separation class. `None` if the component is a
/// cycle or triconnected.
fn find_split(c: &Comp, vs: &[VertexId]) -> Option<(VertexId, VertexId, Vec<bool>)> {
    let pos: HashMap<VertexId, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vs.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v, _)) in c.edges.iter().enumerate() {
        adj[pos[&u]].push((pos[&v], i));
        adj[pos[&v]].push((pos[&u], i));
    }
    if adj.iter().all(|a| a.len() == 2) {
        return None;
    }
    for a in 0..n {
        if let Some(b) = articulation_without(&adj, a) {
            // Component of C - {a, b} containing some vertex.
            let mut comp = vec![usize::MAX; n];
            let start = (0..n).find(|&x| x != a && x != b).expect("at least three vertices");
            comp[start] = 0;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &(y, _) in &adj[x] {
                    if y != a && y != b && comp[y] == usize::MAX {
                        comp[y] = 0;
                        stack.push(y);
                    }
                }
            }
            let side: Vec<bool> = c
                .edges
                .iter()
                .map(|&(u, v, _)| comp[pos[&u]] == 0 || comp[pos[&v]] == 0)
                .collect();
            return Some((vs[a].min(vs[b]), vs[a].max(vs[b]), side));
        }
    }
    None
}

/// Some articulation point of the graph with vertex `skip` removed.
fn articulation_without(adj: &[Vec<(usize, usize)>], skip: usize) -> Option<usize> {
    let n = adj.len();
    let root = if skip == 0 { 1 } else { 0 };
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    disc[root] = timer;
    low[root] = timer;
    timer += 1;
    let mut root_children = 0;
    while let Some(&mut (v, pe, ref mut idx)) = stack.last_mut() {
        if *idx < adj[v].len() {
            let (w, e) = adj[v][*idx];
            *idx += 1;
            if w == skip || e == pe {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((w, e, 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                if p != root && low[v] >= disc[p] {
                    return Some(p);
                }
            }
        }
    }
    if root_children > 1 {
        return Some(root);
    }
    None
}

/// Merge bonds sharing a virtual edge, and polygons sharing a virtual edge.
fn merge_same_kind(comps: Vec<Comp>) -> Vec<Comp> {
    let kinds: Vec<NodeKind> = comps.iter().map(kind_of).collect();
    let mut owner: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in comps.iter().enumerate() {
        for &(_, _, l) in &c.edges {
            if let Label::Virtual(v) = l {
                owner.entry(v).or_default().push(i);
            }
        }
    }
    let mut parent: Vec<usize> = (0..comps.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut dropped: Vec<usize> = Vec::new();
    let mut vids: Vec<usize> = owner.keys().copied().collect();
    vids.sort_unstable();
    for vid in vids {
        let o = &owner[&vid];
        debug_assert_eq!(o.len(), 2);
        let (x, y) = (o[0], o[1]);
        if kinds[x] == kinds[y] && kinds[x] != NodeKind::R {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[ry] = rx;
            dropped.push(vid);
        }
    }
    let mut groups: BTreeMap<usize, Vec<(VertexId, VertexId, Label)>> = BTreeMap::new();
    for (i, c) in comps.into_iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().extend(c.edges.into_iter().filter(|&(_, _, l)| match l {
            Label::Virtual(v) => !dropped.contains(&v),
            Label::Real(_) => true,
        }));
    }
    groups.into_values().map(|edges| Comp { edges }).collect()
}

fn assemble(g: &MultiGraph, comps: Vec<Comp>, reference: EdgeId, next_virtual: &mut usize) -> Result<SpqrTree> {
    // Node list: components first, then one Q-node per real edge.
    let mut node_edges: Vec<Vec<(VertexId, VertexId, Label)>> = Vec::new();
    let mut kinds: Vec<NodeKind> = Vec::new();
    let mut q_of_edge = vec![usize::MAX; g.m()];
    for c in &comps {
        kinds.push(kind_of(c));
        node_edges.push(Vec::new());
    }
    for (ci, c) in comps.iter().enumerate() {
        for &(u, v, l) in &c.edges {
            match l {
                Label::Virtual(_) => node_edges[ci].push((u, v, l)),
                Label::Real(e) => {
                    let vid = *next_virtual;
                    *next_virtual += 1;
                    node_edges[ci].push((u, v, Label::Virtual(vid)));
                    let q = kinds.len();
                    kinds.push(NodeKind::Q);
                    node_edges.push(vec![(u, v, Label::Real(e)), (u, v, Label::Virtual(vid))]);
                    q_of_edge[e] = q;
                }
            }
        }
    }
    let count = kinds.len();
    let mut owner: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (ni, es) in node_edges.iter().enumerate() {
        for (ei, &(_, _, l)) in es.iter().enumerate() {
            if let Label::Virtual(v) = l {
                owner.entry(v).or_default().push((ni, ei));
            }
        }
    }
    let root = q_of_edge[reference];
    let mut parent = vec![usize::MAX; count];
    let mut nodes: Vec<Option<SpqrNode>> = vec![None; count];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        let mut edges = Vec::new();
        let mut children = Vec::new();
        for &(u, v, l) in &node_edges[x] {
            let tag = match l {
                Label::Real(e) => EdgeTag::Real(e),
                Label::Virtual(vid) => {
                    let other = owner[&vid].iter().find(|&&(n, _)| n != x).expect("virtual edges come in pairs").0;
                    if parent[x] == other {
                        EdgeTag::Parent
                    } else {
                        if parent[other] != usize::MAX {
                            return Err(Error::Integrity("SPQR adjacency is not a tree".into()));
                        }
                        parent[other] = x;
                        order.push(other);
                        children.push(other);
                        EdgeTag::Child(other)
                    }
                }
            };
            edges.push(SkeletonEdge { u, v, tag });
        }
        let mut vertices: Vec<VertexId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let poles = match edges.iter().find(|e| e.tag == EdgeTag::Parent).or_else(|| edges.iter().find(|e| matches!(e.tag, EdgeTag::Real(_)))) {
            Some(e) => (e.u.min(e.v), e.u.max(e.v)),
            None => return Err(Error::Integrity("node without reference edge".into())),
        };
        nodes[x] = Some(SpqrNode {
            kind: kinds[x],
            vertices,
            edges,
            parent: if x == root { None } else { Some(parent[x]) },
            children,
            poles,
        });
    }
    if order.len() != count {
        return Err(Error::Integrity("SPQR adjacency is disconnected".into()));
    }
    // Renumber in BFS order so parents precede children.
    let mut new_id = vec![0; count];
    for (i, &x) in order.iter().enumerate() {
        new_id[x] = i;
    }
    let mut out: Vec<SpqrNode> = Vec::with_capacity(count);
    for &x in &order {
        let mut n = nodes[x].take().expect("visited");
        n.parent = n.parent.map(|p| new_id[p]);
        n.children = n.children.iter().map(|&c| new_id[c]).collect();
        for e in &mut n.edges {
            if let EdgeTag::Child(c) = e.tag {
                e.tag = EdgeTag::Child(new_id[c]);
            }
        }
        out.push(n);
    }
    let tree = SpqrTree { nodes: out, root: 0 };
    tree.check()?;
    Ok(tree)
}

impl SpqrTree {
    /// The unique child of the root Q-node.
    pub fn root_child(&self) -> usize {
        self.nodes[self.root].children[0]
    }

    /// Real edges of the pertinent graph of `b`.
    pub fn pertinent_edges(&self, b: usize) -> Result<Vec<EdgeId>> {
        if b >= self.nodes.len() {
            return Err(Error::Contract(format!("unknown SPQR node {b}")));
        }
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(x) = stack.pop() {
            for e in &self.nodes[x].edges {
                match e.tag {
                    EdgeTag::Real(id) if x != self.root || b == self.root => out.push(id),
                    EdgeTag::Child(c) => stack.push(c),
                    _ => {}
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Pertinent graph of `b` as an edge-induced subgraph of `g`, with the
    /// map from its vertices to vertices of `g`.
    pub fn pertinent_graph(&self, g: &MultiGraph, b: usize) -> Result<(MultiGraph, Vec<VertexId>)> {
        let edges = self.pertinent_edges(b)?;
        Ok(g.edge_subgraph(&edges))
    }

    /// Structural assertions on node kinds and adjacency.
    pub fn check(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            let bad = |msg: &str| Err(Error::Integrity(format!("node {i}: {msg}")));
            match n.kind {
                NodeKind::Q => {
                    if n.edges.len() != 2 {
                        return bad("Q-node skeleton must have two edges");
                    }
                }
                NodeKind::P => {
                    if n.vertices.len() != 2 {
                        return bad("P-node skeleton must have two vertices");
                    }
                }
                NodeKind::S => {
                    let g = n.skeleton_graph();
                    if n.edges.len() < 3 || (0..g.n()).any(|v| g.degree(v) != 2) || !g.is_connected() {
                        return bad("S-node skeleton must be a cycle");
                    }
                }
                NodeKind::R => {
                    let g = n.skeleton_graph();
                    if !g.is_simple() || g.n() < 4 {
                        return bad("R-node skeleton must be simple with at least four vertices");
                    }
                }
            }
            if let Some(p) = n.parent {
                let pk = self.nodes[p].kind;
                if pk == n.kind && pk != NodeKind::R {
                    return bad("adjacent nodes of the same series/parallel kind");
                }
            }
        }
        Ok(())
    }

    /// Canonical string of the unrooted tree labelled by node kind and
    /// skeleton size, used to compare trees rooted at different edges.
    pub fn unrooted_canonical(&self) -> String {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                adj[i].push(c);
                adj[c].push(i);
            }
        }
        let label = |i: usize| format!("{:?}{}", self.nodes[i].kind, self.nodes[i].edges.len());
        // Tree centre by leaf peeling.
        let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&i| deg[i] <= 1).collect();
        let mut left = n;
        while left > 2 {
            left -= layer.len();
            let mut next = Vec::new();
            for &x in &layer {
                for &y in &adj[x] {
                    deg[y] -= 1;
                    if deg[y] == 1 {
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        fn enc(adj: &[Vec<usize>], x: usize, p: usize, label: &dyn Fn(usize) -> String) -> String {
            let mut parts: Vec<String> = adj[x].iter().filter(|&&y| y != p).map(|&y| enc(adj, y, x, label)).collect();
            parts.sort();
            format!("({}{})", label(x), parts.concat())
        }
        layer.iter().map(|&c| enc(&adj, c, usize::MAX, &label)).min().unwrap_or_default()
    }

    /// Indented text dump of the tree.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((x, depth)) = stack.pop() {
            let n = &self.nodes[x];
            let _ = writeln!(out, "{}{:?} #{} poles={:?} vertices={:?}", "  ".repeat(depth), n.kind, x, n.poles, n.vertices);
            for &c in n.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }

    /// DOT-like structural dump.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph spqr {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{:?}{i}\"];", n.kind);
            for &c in &n.children {
                let _ = writeln!(out, "  n{i} -- n{c};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn kinds(t: &SpqrTree) -> BTreeMap<NodeKind, usize> {
        let mut m = BTreeMap::new();
        for n in &t.nodes {
            *m.entry(n.kind).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn triple_bundle() {
        let t = build_spqr(&gen::bundle(3), 0).unwrap();
        let rc = t.root_child();
        assert_eq!(t.nodes[t.root].kind, NodeKind::Q);
        assert_eq!(t.nodes[rc].kind, NodeKind::P);
        assert_eq!(t.nodes[rc].children.len(), 2);
        assert!(t.nodes[rc].children.iter().all(|&c| t.nodes[c].kind == NodeKind::Q));
        let (pg, _) = t.pertinent_graph(&gen::bundle(3), rc).unwrap();
        assert_eq!((pg.n(), pg.m()), (2, 2));
    }

    #[test]
    fn five_cycle() {
        let t = build_spqr(&gen::cycle(5), 0).unwrap();
        let rc = t.root_child();
        assert_eq!(t.nodes[rc].kind, NodeKind::S);
        assert_eq!(t.nodes[rc].children.len(), 4);
        assert_eq!(kinds(&t)[&NodeKind::Q], 5);
    }

    #[test]
    fn one_node_of_each_kind() {
        let g = gen::mixed_spqr_example();
        let t = build_spqr(&g, 0).unwrap();
        let k = kinds(&t);
        assert_eq!(k.get(&NodeKind::P), Some(&1));
        assert_eq!(k.get(&NodeKind::S), Some(&1));
        assert_eq!(k.get(&NodeKind::R), Some(&1));
        assert_eq!(k[&NodeKind::Q], g.m());
        let r = t.nodes.iter().find(|n| n.kind == NodeKind::R).unwrap();
        assert_eq!(r.vertices, vec![0, 1, 3, 4]);
        let s = t.nodes.iter().find(|n| n.kind == NodeKind::S).unwrap();
        assert_eq!(s.vertices, vec![0, 1, 2]);
    }

    #[test]
    fn k4_is_rigid() {
        let t = build_spqr(&gen::complete(4), 2).unwrap();
        assert_eq!(t.nodes[t.root_child()].kind, NodeKind::R);
        assert_eq!(t.pertinent_edges(t.root_child()).unwrap().len(), 5);
    }

    #[test]
    fn rejects_cut_vertex() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert!(matches!(build_spqr(&g, 0), Err(Error::NotBiconnected)));
    }

    #[test]
    fn wheel_structure() {
        let g = gen::wheel(6);
        let t = build_spqr(&g, 0).unwrap();
        assert_eq!(kinds(&t).get(&NodeKind::R), Some(&1));
        assert_eq!(t.pertinent_edges(t.root).unwrap().len(), g.m());
    }
}
