//! Planarity testing and combinatorial embeddings.
//!
//! Each biconnected block is embedded with the path-addition method of
//! Demoucron, Malgrange and Pertuiset; block rotations are then glued at
//! cut vertices. Parallel edges are handled by subdividing all but one
//! copy while embedding and mapping the rotation back afterwards.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{blocks, EdgeId, MultiGraph, VertexId};

/// Directed half of an edge: dart `2e` runs from the first endpoint of `e`
/// to the second, dart `2e + 1` runs back.
pub type Dart = usize;

pub fn dart(e: EdgeId, forward: bool) -> Dart {
    2 * e + usize::from(!forward)
}

pub fn dart_edge(d: Dart) -> EdgeId {
    d / 2
}

pub fn twin(d: Dart) -> Dart {
    d ^ 1
}

/// Rotation system plus the face walks it induces.
///
/// `rotation[v]` lists the darts leaving `v` in clockwise order. The face
/// walk successor of dart `u -> v` is the dart following `v -> u` in the
/// rotation at `v`.
#[derive(Clone, Debug)]
pub struct CombinatorialEmbedding {
    ends: Vec<(VertexId, VertexId)>,
    rotation: Vec<Vec<Dart>>,
    pos: Vec<usize>,
    faces: Vec<Vec<Dart>>,
    face_of: Vec<usize>,
    outer: usize,
}

impl CombinatorialEmbedding {
    /// Build an embedding from a rotation system and check that it is
    /// consistent and of genus zero.
    pub fn from_rotation(g: &MultiGraph, rotation: Vec<Vec<Dart>>) -> Result<Self> {
        let ends = g.edges().to_vec();
        let m = ends.len();
        if rotation.len() != g.n() {
            return Err(Error::Integrity("rotation does not cover every vertex".into()));
        }
        let mut pos = vec![usize::MAX; 2 * m];
        for (v, rot) in rotation.iter().enumerate() {
            for (i, &d) in rot.iter().enumerate() {
                if d >= 2 * m || pos[d] != usize::MAX {
                    return Err(Error::Integrity(format!("dart {d} misplaced in rotation")));
                }
                let (a, b) = ends[dart_edge(d)];
                let tail = if d % 2 == 0 { a } else { b };
                if tail != v {
                    return Err(Error::Integrity(format!("dart {d} listed at {v} but leaves {tail}")));
                }
                pos[d] = i;
            }
        }
        if pos.iter().any(|&p| p == usize::MAX) {
            return Err(Error::Integrity("some dart is missing from the rotation".into()));
        }
        let mut emb = CombinatorialEmbedding { ends, rotation, pos, faces: Vec::new(), face_of: vec![usize::MAX; 2 * m], outer: 0 };
        emb.trace_faces();
        emb.check_euler(g)?;
        Ok(emb)
    }

    fn trace_faces(&mut self) {
        let m2 = self.face_of.len();
        for start in 0..m2 {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let id = self.faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                self.face_of[d] = id;
                walk.push(d);
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            self.faces.push(walk);
        }
    }

    fn check_euler(&self, g: &MultiGraph) -> Result<()> {
        for comp in g.components() {
            let mut m = 0;
            let mut fset = std::collections::BTreeSet::new();
            for &v in &comp {
                for &d in &self.rotation[v] {
                    if d % 2 == 0 {
                        m += 1;
                    }
                    fset.insert(self.face_of[d]);
                }
            }
            if m == 0 {
                continue;
            }
            let chi = comp.len() as i64 - m as i64 + fset.len() as i64;
            if chi != 2 {
                return Err(Error::Integrity(format!("Euler characteristic {chi} on a component")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn m(&self) -> usize {
        self.ends.len()
    }

    pub fn tail(&self, d: Dart) -> VertexId {
        let (a, b) = self.ends[dart_edge(d)];
        if d % 2 == 0 {
            a
        } else {
            b
        }
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.tail(twin(d))
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotation[v]
    }

    /// Dart following `d` clockwise around its tail.
    pub fn rot_next(&self, d: Dart) -> Dart {
        let v = self.tail(d);
        let r = &self.rotation[v];
        r[(self.pos[d] + 1) % r.len()]
    }

    /// Dart preceding `d` clockwise around its tail.
    pub fn rot_prev(&self, d: Dart) -> Dart {
        let v = self.tail(d);
        let r = &self.rotation[v];
        r[(self.pos[d] + r.len() - 1) % r.len()]
    }

    pub fn face_next(&self, d: Dart) -> Dart {
        self.rot_next(twin(d))
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_darts(&self, f: usize) -> &[Dart] {
        &self.faces[f]
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d]
    }

    /// Vertices along the boundary walk of `f`, in walk order.
    pub fn face_vertices(&self, f: usize) -> Vec<VertexId> {
        self.faces[f].iter().map(|&d| self.tail(d)).collect()
    }

    pub fn outer_face(&self) -> usize {
        self.outer
    }

    pub fn set_outer_face(&mut self, f: usize) {
        assert!(f < self.faces.len());
        self.outer = f;
    }

    /// The two faces on either side of edge `e` (left of the forward dart
    /// first).
    pub fn edge_faces(&self, e: EdgeId) -> (usize, usize) {
        (self.face_of[dart(e, true)], self.face_of[dart(e, false)])
    }
}

/// Face walks of an embedding as `(vertex, edge)` steps.
pub fn faces(emb: &CombinatorialEmbedding) -> Vec<Vec<(VertexId, EdgeId)>> {
    (0..emb.face_count()).map(|f| emb.face_darts(f).iter().map(|&d| (emb.tail(d), dart_edge(d))).collect()).collect()
}

/// A planar rotation system for `g`, or `None` if `g` is not planar.
pub fn planar_embedding(g: &MultiGraph) -> Option<CombinatorialEmbedding> {
    let rotation = planar_rotation(g)?;
    Some(CombinatorialEmbedding::from_rotation(g, rotation).expect("path addition yields a planar rotation"))
}

pub fn is_planar(g: &MultiGraph) -> bool {
    planar_rotation(g).is_some()
}

/// True iff `g` plus the edges of the cyclic sequence `h` is planar.
pub fn planar_with_cycle(g: &MultiGraph, h: &[VertexId]) -> Result<bool> {
    check_permutation(g.n(), h)?;
    Ok(is_planar(&with_cycle(g, h)))
}

/// `g` with the closed walk `h` added as (possibly parallel) edges.
pub fn with_cycle(g: &MultiGraph, h: &[VertexId]) -> MultiGraph {
    let mut gh = g.clone();
    if h.len() >= 2 {
        for i in 0..h.len() {
            gh.add_edge(h[i], h[(i + 1) % h.len()]).expect("permutation");
        }
    }
    gh
}

pub(crate) fn check_permutation(n: usize, h: &[VertexId]) -> Result<()> {
    if h.len() != n {
        return Err(Error::NotPermutation);
    }
    let mut seen = vec![false; n];
    for &v in h {
        if v >= n || seen[v] {
            return Err(Error::NotPermutation);
        }
        seen[v] = true;
    }
    Ok(())
}

/// True iff `g` has a planar drawing in which all of `boundary` lie on one
/// common face. Tested by adding an apex joined to every listed vertex.
pub fn planar_with_common_face(g: &MultiGraph, boundary: &[VertexId]) -> bool {
    let mut h = g.clone();
    let apex = h.add_vertex();
    for &v in boundary {
        h.add_edge(apex, v).expect("distinct");
    }
    is_planar(&h)
}

fn planar_rotation(g: &MultiGraph) -> Option<Vec<Vec<Dart>>> {
    let n = g.n();
    let mut rotation: Vec<Vec<Dart>> = vec![Vec::new(); n];
    for comp in g.components() {
        if comp.len() == 1 {
            continue;
        }
        let (sub, emap) = g.induced(&comp);
        let dec = blocks(&sub).expect("component is connected");
        for block in &dec.blocks {
            let local = embed_block(&block.graph)?;
            for (bv, darts) in local.into_iter().enumerate() {
                let gv = comp[block.vertices[bv]];
                for d in darts {
                    let sub_edge = block.edges[dart_edge(d)];
                    let ge = emap[sub_edge];
                    // Orientation must be recomputed against the global endpoints.
                    let forward = g.endpoints(ge).0 == gv;
                    rotation[gv].push(dart(ge, forward));
                }
            }
        }
    }
    Some(rotation)
}

/// Rotation (by block-local darts) of a biconnected block or single edge.
fn embed_block(b: &MultiGraph) -> Option<Vec<Vec<Dart>>> {
    let n = b.n();
    if b.m() == 1 {
        return Some(vec![vec![dart(0, true)], vec![dart(0, false)]]);
    }
    // Subdivide parallel copies so the path-addition core sees a simple graph.
    let mut simple_edges: Vec<(usize, usize)> = Vec::new();
    // For each original edge: the simple edge incident to each endpoint.
    let mut carrier: Vec<(usize, usize)> = Vec::with_capacity(b.m());
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut extra = n;
    for &(u, v) in b.edges() {
        let key = (u.min(v), u.max(v));
        if seen.insert(key, ()).is_none() {
            simple_edges.push((u, v));
            let id = simple_edges.len() - 1;
            carrier.push((id, id));
        } else {
            let w = extra;
            extra += 1;
            simple_edges.push((u, w));
            let a = simple_edges.len() - 1;
            simple_edges.push((w, v));
            carrier.push((a, a + 1));
        }
    }
    let sn = extra;
    if simple_edges.len() > 3 * sn - 6 {
        return None;
    }
    let face_cycles = path_addition(sn, &simple_edges)?;
    let simple_rot = rotation_from_faces(sn, &simple_edges, &face_cycles);
    // Map simple darts at original vertices back to block darts.
    let mut back: HashMap<(usize, usize), Dart> = HashMap::new();
    for (e, &(u, v)) in b.edges().iter().enumerate() {
        let (cu, cv) = carrier[e];
        back.insert((u, cu), dart(e, true));
        back.insert((v, cv), dart(e, false));
    }
    let mut rot = vec![Vec::new(); n];
    for (v, r) in simple_rot.iter().enumerate().take(n) {
        for &(se, _) in r {
            rot[v].push(back[&(v, se)]);
        }
    }
    Some(rot)
}

/// Rotation at each vertex as `(simple edge, neighbour)` pairs, derived
/// from consistently oriented face cycles.
fn rotation_from_faces(n: usize, edges: &[(usize, usize)], faces: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut eid: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        eid.insert((u, v), e);
        eid.insert((v, u), e);
    }
    // next[(b, a)] = c means: around b, the edge to c follows the edge to a.
    let mut next: HashMap<(usize, usize), usize> = HashMap::new();
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let a = f[(i + k - 1) % k];
            let b = f[i];
            let c = f[(i + 1) % k];
            next.insert((b, a), c);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut rot = vec![Vec::new(); n];
    for v in 0..n {
        if adj[v].is_empty() {
            continue;
        }
        let start = adj[v][0];
        let mut cur = start;
        loop {
            rot[v].push((eid[&(v, cur)], cur));
            cur = next[&(v, cur)];
            if cur == start {
                break;
            }
        }
        debug_assert_eq!(rot[v].len(), adj[v].len());
    }
    rot
}

/// Path-addition planarity test on a simple biconnected graph with at
/// least three vertices. Returns oriented face cycles of a planar
/// embedding.
fn path_addition(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    let m = edges.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let cycle = find_cycle(n, &adj)?;
    let mut in_v = vec![false; n];
    let mut in_e = vec![false; m];
    for i in 0..cycle.len() {
        let a = cycle[i];
        let b = cycle[(i + 1) % cycle.len()];
        in_v[a] = true;
        let e = adj[a].iter().find(|&&(w, _)| w == b).expect("cycle edge").1;
        in_e[e] = true;
    }
    let mut rev = cycle.clone();
    rev.reverse();
    let mut faces: Vec<Vec<usize>> = vec![cycle, rev];
    let mut embedded = faces[0].len();
    let mut comp = vec![usize::MAX; n];
    let mut mark = vec![0usize; n];
    let mut stamp = 0usize;
    while embedded < m {
        // Fragments: chords between embedded vertices, and components of
        // the unembedded vertices with their attachment edges.
        for c in comp.iter_mut() {
            *c = usize::MAX;
        }
        let mut frags: Vec<Fragment> = Vec::new();
        for (e, &(u, v)) in edges.iter().enumerate() {
            if !in_e[e] && in_v[u] && in_v[v] {
                frags.push(Fragment { attach: vec![u, v], chord: Some(e), root: usize::MAX });
            }
        }
        for s in 0..n {
            if in_v[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = frags.len();
            let mut attach = Vec::new();
            let mut stack = vec![s];
            comp[s] = id;
            stamp += 1;
            while let Some(x) = stack.pop() {
                for &(y, _) in &adj[x] {
                    if in_v[y] {
                        if mark[y] != stamp {
                            mark[y] = stamp;
                            attach.push(y);
                        }
                    } else if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            frags.push(Fragment { attach, chord: None, root: s });
        }
        // Admissible faces per fragment.
        let mut choice: Option<(usize, usize)> = None;
        let mut fallback: Option<(usize, usize)> = None;
        for (fi, frag) in frags.iter().enumerate() {
            stamp += 1;
            for &a in &frag.attach {
                mark[a] = stamp;
            }
            let need = frag.attach.len();
            let mut count = 0;
            let mut first = usize::MAX;
            for (fid, face) in faces.iter().enumerate() {
                let hits = face.iter().filter(|&&v| mark[v] == stamp).count();
                if hits == need {
                    count += 1;
                    if first == usize::MAX {
                        first = fid;
                    }
                    if count > 1 {
                        break;
                    }
                }
            }
            if count == 0 {
                return None;
            }
            if count == 1 {
                choice = Some((fi, first));
                break;
            }
            if fallback.is_none() {
                fallback = Some((fi, first));
            }
        }
        let (fi, fid) = choice.or(fallback).expect("at least one fragment remains");
        let frag = &frags[fi];
        let path: Vec<usize> = match frag.chord {
            Some(e) => vec![edges[e].0, edges[e].1],
            None => fragment_path(&adj, &in_v, &comp, fi, frag.root),
        };
        for w in path.windows(2) {
            let e = adj[w[0]].iter().find(|&&(y, e)| y == w[1] && !in_e[e]).expect("path edge").1;
            in_e[e] = true;
            embedded += 1;
        }
        for &v in &path {
            in_v[v] = true;
        }
        let face = std::mem::take(&mut faces[fid]);
        let (f1, f2) = split_face(&face, &path);
        faces[fid] = f1;
        faces.push(f2);
    }
    Some(faces)
}

struct Fragment {
    attach: Vec<usize>,
    chord: Option<usize>,
    root: usize,
}

/// Path through a component fragment between two distinct attachments.
fn fragment_path(adj: &[Vec<(usize, usize)>], in_v: &[bool], comp: &[usize], id: usize, root: usize) -> Vec<usize> {
    // Start from an attachment edge a - x.
    let mut start = None;
    'outer: for x in 0..adj.len() {
        if comp[x] != id || in_v[x] {
            continue;
        }
        for &(a, _) in &adj[x] {
            if in_v[a] {
                start = Some((a, x));
                break 'outer;
            }
        }
    }
    let (a, x) = start.unwrap_or_else(|| panic!("fragment rooted at {root} has no attachment"));
    let mut prev = vec![usize::MAX; adj.len()];
    prev[x] = x;
    let mut queue = std::collections::VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        for &(z, _) in &adj[y] {
            if in_v[z] {
                if z != a {
                    let mut path = vec![z, y];
                    let mut cur = y;
                    while prev[cur] != cur {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.push(a);
                    path.reverse();
                    return path;
                }
            } else if prev[z] == usize::MAX && comp[z] == id {
                prev[z] = y;
                queue.push_back(z);
            }
        }
    }
    panic!("fragment has a single attachment; block is not biconnected")
}

/// Split an oriented face cycle along a path whose ends lie on it.
fn split_face(face: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let a = path[0];
    let b = *path.last().expect("nonempty");
    let k = face.len();
    let i = face.iter().position(|&v| v == a).expect("attachment on face");
    let j = face.iter().position(|&v| v == b).expect("attachment on face");
    let inner = &path[1..path.len() - 1];
    let mut f1 = Vec::new();
    let mut p = i;
    loop {
        f1.push(face[p]);
        if p == j {
            break;
        }
        p = (p + 1) % k;
    }
    f1.extend(inner.iter().rev());
    let mut f2 = Vec::new();
    let mut p = j;
    loop {
        f2.push(face[p]);
        if p == i {
            break;
        }
        p = (p + 1) % k;
    }
    f2.extend(inner.iter());
    (f1, f2)
}

fn find_cycle(n: usize, adj: &[Vec<(usize, usize)>]) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    depth[0] = 0;
    parent[0] = 0;
    while let Some(&mut (v, pe, ref mut idx)) = stack.last_mut() {
        if *idx >= adj[v].len() {
            stack.pop();
            continue;
        }
        let (w, e) = adj[v][*idx];
        *idx += 1;
        if e == pe {
            continue;
        }
        if depth[w] == usize::MAX {
            depth[w] = depth[v] + 1;
            parent[w] = v;
            stack.push((w, e, 0));
        } else if depth[w] < depth[v] {
            let mut cyc = vec![v];
            let mut cur = v;
            while cur != w {
                cur = parent[cur];
                cyc.push(cur);
            }
            return Some(cyc);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn k4_has_four_faces() {
        let emb = planar_embedding(&gen::complete(4)).unwrap();
        assert_eq!(emb.face_count(), 4);
        assert!(faces(&emb).iter().all(|f| f.len() == 3));
    }

    #[test]
    fn k5_and_k33_are_not_planar() {
        assert!(planar_embedding(&gen::complete(5)).is_none());
        assert!(!is_planar(&gen::complete_bipartite(3, 3)));
    }

    #[test]
    fn cycle_has_two_faces() {
        let emb = planar_embedding(&gen::cycle(6)).unwrap();
        assert_eq!(emb.face_count(), 2);
    }

    #[test]
    fn triangle_faces() {
        let f = faces(&planar_embedding(&gen::cycle(3)).unwrap());
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|w| w.len() == 3));
    }

    #[test]
    fn parallel_pair_faces() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        let f = faces(&planar_embedding(&g).unwrap());
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|w| w.len() == 2));
    }

    #[test]
    fn fat_bundle_faces() {
        let g = MultiGraph::from_edges(2, &[(0, 1); 5]).unwrap();
        assert_eq!(planar_embedding(&g).unwrap().face_count(), 5);
    }

    #[test]
    fn every_dart_on_one_face() {
        let g = gen::wheel(7);
        let emb = planar_embedding(&g).unwrap();
        let total: usize = (0..emb.face_count()).map(|f| emb.face_darts(f).len()).sum();
        assert_eq!(total, 2 * g.m());
        assert_eq!(g.n() as i64 - g.m() as i64 + emb.face_count() as i64, 2);
    }

    #[test]
    fn cut_vertices_and_components() {
        let mut g = MultiGraph::from_edges(8, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (5, 6)]).unwrap();
        g.add_edge(6, 7).unwrap();
        assert!(planar_embedding(&g).is_some());
    }

    #[test]
    fn cycle_witness_checks() {
        assert!(planar_with_cycle(&gen::complete(4), &[0, 1, 2, 3]).unwrap());
        assert!(planar_with_cycle(&gen::cycle(4), &[0, 1, 2, 3]).unwrap());
        let mut k5e = gen::complete(5);
        k5e = k5e.without_edges(&[0]);
        // Adding the cycle 0-1-2-3-4 restores the missing edge 0-1.
        assert!(!planar_with_cycle(&k5e, &[0, 1, 2, 3, 4]).unwrap());
        assert!(planar_with_cycle(&gen::complete(4), &[0, 1, 1, 3]).is_err());
    }

    #[test]
    fn outer_face_test() {
        let g = gen::cycle(6);
        assert!(planar_with_common_face(&g, &[0, 1, 2, 3, 4, 5]));
        let k4 = gen::complete(4);
        assert!(planar_with_common_face(&k4, &[0, 1, 2]));
        assert!(!planar_with_common_face(&k4, &[0, 1, 2, 3]));
    }
}
