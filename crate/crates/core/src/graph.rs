//! Multigraphs with stable edge ids, text/JSON I/O, block decomposition and
//! the edit primitives used by the kernels.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::GraphError;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Undirected multigraph on vertices `0..n`. Parallel edges are allowed,
/// self-loops are not. Edge ids are insertion indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiGraph {
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<EdgeId>>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let n = self.n();
        if u >= n || v >= n {
            return Err(GraphError::VertexOutOfRange(u.max(v), n));
        }
        let id = self.edges.len();
        self.edges.push((u, v));
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(id)
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn try_endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        self.edges.get(e).copied().ok_or(GraphError::UnknownEdge(e))
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().map(move |&e| self.other(e, v))
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Number of edges joining `u` and `v`.
    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.adj[u].iter().filter(|&&e| self.other(e, u) == v).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().all(|&(u, v)| seen.insert((u.min(v), u.max(v))))
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `vertices` (in the given order). Returns the
    /// subgraph and, for each of its edges, the id of the original edge.
    pub fn induced(&self, vertices: &[VertexId]) -> (MultiGraph, Vec<EdgeId>) {
        let mut local = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut sub = MultiGraph::new(vertices.len());
        let mut emap = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if let (Some(&a), Some(&b)) = (local.get(&u), local.get(&v)) {
                sub.edges.push((a, b));
                sub.adj[a].push(emap.len());
                sub.adj[b].push(emap.len());
                emap.push(e);
            }
        }
        (sub, emap)
    }

    /// Subgraph formed by the given edges, with vertices renumbered in
    /// first-appearance order. Returns the subgraph and its vertex map.
    pub fn edge_subgraph(&self, edges: &[EdgeId]) -> (MultiGraph, Vec<VertexId>) {
        let mut local: HashMap<VertexId, usize> = HashMap::new();
        let mut vmap = Vec::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for &e in edges {
            let (u, v) = self.edges[e];
            let mut id = |x: VertexId| {
                *local.entry(x).or_insert_with(|| {
                    vmap.push(x);
                    vmap.len() - 1
                })
            };
            let a = id(u);
            let b = id(v);
            pairs.push((a, b));
        }
        let mut sub = MultiGraph::new(vmap.len());
        for (a, b) in pairs {
            sub.add_edge(a, b).expect("subgraph of a loopless graph");
        }
        (sub, vmap)
    }

    /// Graph with the listed edges removed; remaining edges keep their
    /// relative order.
    pub fn without_edges(&self, removed: &[EdgeId]) -> MultiGraph {
        let drop: std::collections::HashSet<EdgeId> = removed.iter().copied().collect();
        let mut g = MultiGraph::new(self.n());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if !drop.contains(&e) {
                g.add_edge(u, v).expect("loopless");
            }
        }
        g
    }

    /// Merge the endpoints of `e`. The larger endpoint disappears and
    /// higher vertex ids shift down by one. Edges that become loops are
    /// dropped, parallel edges are kept.
    pub fn contract_edge(&self, e: EdgeId) -> Result<MultiGraph, GraphError> {
        Ok(self.contract_edge_mapped(e)?.0)
    }

    /// Like [`contract_edge`](Self::contract_edge) but also returns the
    /// vertex map old id → new id.
    pub fn contract_edge_mapped(&self, e: EdgeId) -> Result<(MultiGraph, Vec<VertexId>), GraphError> {
        let (u, v) = self.try_endpoints(e)?;
        let (keep, gone) = (u.min(v), u.max(v));
        let map: Vec<VertexId> = (0..self.n())
            .map(|x| match x.cmp(&gone) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => x - 1,
            })
            .collect();
        let mut g = MultiGraph::new(self.n() - 1);
        for &(a, b) in &self.edges {
            let (a, b) = (map[a], map[b]);
            if a != b {
                g.add_edge(a, b).expect("checked");
            }
        }
        Ok((g, map))
    }

    /// Replace `e` by a path of length two through a fresh vertex `n`.
    /// Edge `e` keeps its id and becomes `(u, n)`; `(n, v)` is appended.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<MultiGraph, GraphError> {
        let (u, v) = self.try_endpoints(e)?;
        let mut g = self.clone();
        let w = g.add_vertex();
        g.edges[e] = (u, w);
        let pos = g.adj[v].iter().position(|&x| x == e).expect("incidence");
        g.adj[v].remove(pos);
        g.adj[w].push(e);
        g.add_edge(w, v)?;
        Ok(g)
    }

    /// Remove isolated vertices, renumbering the rest in id order.
    pub fn drop_isolated(&self) -> (MultiGraph, Vec<VertexId>) {
        let keep: Vec<VertexId> = (0..self.n()).filter(|&v| self.degree(v) > 0).collect();
        let (g, _) = self.induced(&keep);
        (g, keep)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# n={}\n", self.n());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson { n: self.n(), edges: self.edges.iter().map(|&(u, v)| [u, v]).collect() })
            .expect("serialisable")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parse either the edge-list format (`u v` per line, `#` comments) or the
/// JSON format `{"n": .., "edges": [[u, v], ..]}`.
///
/// Edge-list labels are arbitrary tokens, numbered in order of first
/// appearance. A `# n=K` line pads the graph with isolated vertices up to
/// `K`. JSON ids are taken verbatim.
pub fn parse_graph(text: &str) -> Result<MultiGraph, GraphError> {
    if text.trim_start().starts_with('{') {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse { line: e.line(), msg: e.to_string() })?;
        let mut g = MultiGraph::new(doc.n);
        for [u, v] in doc.edges {
            g.add_edge(u, v)?;
        }
        return Ok(g);
    }
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut declared = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(k) = rest.trim().strip_prefix("n=") {
                declared = k.trim().parse().map_err(|_| GraphError::Parse { line: i + 1, msg: format!("bad vertex count `{k}`") })?;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(GraphError::Parse { line: i + 1, msg: format!("expected `u v`, got `{line}`") });
        }
        let mut id = |t: &str| {
            let next = ids.len();
            *ids.entry(t.to_string()).or_insert(next)
        };
        let a = id(toks[0]);
        let b = id(toks[1]);
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        pairs.push((a, b));
    }
    let n = ids.len().max(declared);
    MultiGraph::from_edges(n, &pairs)
}

/// Biconnected blocks of a connected multigraph.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub cut_vertices: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub graph: MultiGraph,
    /// Block vertex → vertex of the parent graph.
    pub vertices: Vec<VertexId>,
    /// Block edge → edge of the parent graph.
    pub edges: Vec<EdgeId>,
}

/// Biconnected components (edge-stack DFS). Each edge lies in exactly one
/// block; bridges form single-edge blocks.
pub fn blocks(g: &MultiGraph) -> Result<BlockDecomposition, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut groups: Vec<Vec<EdgeId>> = Vec::new();
    let mut is_cut = vec![false; n];
    if n == 0 {
        return Ok(BlockDecomposition { blocks: vec![], cut_vertices: vec![] });
    }
    // (vertex, parent edge, next incidence index)
    let mut stack: Vec<(VertexId, usize, usize)> = vec![(0, usize::MAX, 0)];
    disc[0] = 0;
    low[0] = 0;
    timer += 1;
    let mut root_children = 0;
    while let Some(&mut (v, pe, ref mut idx)) = stack.last_mut() {
        if *idx < g.adj[v].len() {
            let e = g.adj[v][*idx];
            *idx += 1;
            if e == pe {
                continue;
            }
            let w = g.other(e, v);
            if disc[w] == usize::MAX {
                edge_stack.push(e);
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if v == 0 {
                    root_children += 1;
                }
                stack.push((w, e, 0));
            } else if disc[w] < disc[v] {
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                if low[v] >= disc[p] {
                    if p != 0 {
                        is_cut[p] = true;
                    }
                    let mut grp = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        grp.push(e);
                        if e == pe {
                            break;
                        }
                    }
                    groups.push(grp);
                }
            }
        }
    }
    if root_children > 1 {
        is_cut[0] = true;
    }
    let mut blocks_out = Vec::with_capacity(groups.len());
    for mut grp in groups {
        grp.sort_unstable();
        let mut verts: Vec<VertexId> = grp.iter().flat_map(|&e| [g.edges[e].0, g.edges[e].1]).collect();
        verts.sort_unstable();
        verts.dedup();
        let pos: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut bg = MultiGraph::new(verts.len());
        for &e in &grp {
            let (u, v) = g.edges[e];
            bg.add_edge(pos[&u], pos[&v]).expect("loopless");
        }
        blocks_out.push(Block { graph: bg, vertices: verts, edges: grp });
    }
    blocks_out.sort_by_key(|b| b.edges[0]);
    let cut_vertices = (0..n).filter(|&v| is_cut[v]).collect();
    Ok(BlockDecomposition { blocks: blocks_out, cut_vertices })
}

/// True if the graph is connected, has at least two vertices and has no
/// cut vertex.
pub fn is_biconnected(g: &MultiGraph) -> bool {
    if g.n() < 2 || !g.is_connected() {
        return false;
    }
    match blocks(g) {
        Ok(d) => d.blocks.len() == 1,
        Err(_) => false,
    }
}

/// Complement of a BFS spanning forest. Its size is `m - n + c`.
pub fn feedback_edge_set(g: &MultiGraph) -> Vec<EdgeId> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut tree = vec![false; g.m()];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in g.incident(v) {
                let w = g.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    (0..g.m()).filter(|&e| !tree[e]).collect()
}

/// Feedback edge number `m - n + c`.
pub fn feedback_edge_number(g: &MultiGraph) -> usize {
    g.m() + g.components().len() - g.n()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_triangle() {
        let g = parse_graph("0 1\n1 2\n2 0").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
    }

    #[test]
    fn parse_parallel_edges() {
        let g = parse_graph("0 1\n0 1").unwrap();
        assert_eq!((g.n(), g.m()), (2, 2));
        assert_eq!(g.multiplicity(0, 1), 2);
    }

    #[test]
    fn parse_rejects_loop() {
        assert!(matches!(parse_graph("0 0"), Err(GraphError::SelfLoop(_))));
    }

    #[test]
    fn parse_reports_line() {
        match parse_graph("0 1\n\n1 2 3\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_normalises_labels() {
        let g = parse_graph("# comment\n7 3\n3 x\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn json_round_trip() {
        let g = parse_graph(r#"{"n": 4, "edges": [[0,1],[1,2],[1,2]]}"#).unwrap();
        assert_eq!(g.n(), 4);
        let again = parse_graph(&g.to_json()).unwrap();
        assert_eq!(g, again);
        assert_eq!(again.to_json(), g.to_json());
    }

    #[test]
    fn edge_list_round_trip_keeps_isolated() {
        let mut g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        g.add_edge(0, 1).unwrap();
        let text = g.to_edge_list();
        let again = parse_graph(&text).unwrap();
        assert_eq!(again, g);
        assert_eq!(again.to_edge_list(), text);
    }

    #[test]
    fn blocks_bowtie() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        let d = blocks(&g).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert_eq!(d.cut_vertices, vec![2]);
    }

    #[test]
    fn blocks_path() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let d = blocks(&g).unwrap();
        assert_eq!(d.blocks.len(), 3);
        assert!(d.blocks.iter().all(|b| b.graph.m() == 1));
    }

    #[test]
    fn blocks_k4() {
        let g = crate::gen::complete(4);
        assert_eq!(blocks(&g).unwrap().blocks.len(), 1);
    }

    #[test]
    fn blocks_rejects_disconnected() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(blocks(&g), Err(GraphError::Disconnected)));
    }

    #[test]
    fn feedback_sizes() {
        let tree = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert!(feedback_edge_set(&tree).is_empty());
        assert_eq!(feedback_edge_set(&crate::gen::complete(4)).len(), 3);
        assert_eq!(feedback_edge_set(&crate::gen::cycle(5)).len(), 1);
    }

    #[test]
    fn contract_examples() {
        let tri = crate::gen::cycle(3);
        let c = tri.contract_edge(0).unwrap();
        assert_eq!((c.n(), c.m()), (2, 2));
        let path = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let c = path.contract_edge(0).unwrap();
        assert_eq!((c.n(), c.m()), (2, 1));
        let c4 = crate::gen::cycle(4).contract_edge(1).unwrap();
        assert_eq!((c4.n(), c4.m()), (3, 3));
        assert!(c4.is_simple());
        assert!(matches!(tri.contract_edge(9), Err(GraphError::UnknownEdge(9))));
    }

    #[test]
    fn subdivide_examples() {
        let e = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        let p = e.subdivide_edge(0).unwrap();
        assert_eq!((p.n(), p.m()), (3, 2));
        let c4 = crate::gen::cycle(3).subdivide_edge(0).unwrap();
        assert_eq!((c4.n(), c4.m()), (4, 4));
        assert!(c4.degree(3) == 2 && c4.max_degree() == 2);
        let par = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let t = par.subdivide_edge(1).unwrap();
        assert_eq!((t.n(), t.m()), (3, 3));
        assert!(t.is_simple());
    }
}
