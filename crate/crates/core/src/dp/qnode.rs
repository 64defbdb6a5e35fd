//! Edge nodes: the fixed type table, brute-force path realization inside
//! the hexagon, and the path-system audit shared by all node kinds.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::graph::{MultiGraph, VertexId};
use crate::planarity::planar_with_common_face;
use crate::types::{NodeType, Port};

use super::recipe::{PathSystem, Tok};

use Port::{L, L2, R, R2, S, T};

/// Pole membership options of a table line.
#[derive(Clone, Copy)]
enum Poles {
    None,
    S,
    Both,
    NoneOrS,
    NoneOrT,
    Any,
}

impl Poles {
    fn options(self) -> &'static [(bool, bool)] {
        match self {
            Poles::None => &[(false, false)],
            Poles::S => &[(true, false)],
            Poles::Both => &[(true, true)],
            Poles::NoneOrS => &[(false, false), (true, false)],
            Poles::NoneOrT => &[(false, false), (false, true)],
            Poles::Any => &[(false, false), (true, false), (false, true), (true, true)],
        }
    }
}

/// The published list, one side of each mirror pair.
const LISTED: &[(&[(Port, Port)], Poles)] = &[
    (&[], Poles::Both),
    (&[], Poles::None),
    (&[(S, T)], Poles::None),
    (&[(L, S)], Poles::NoneOrT),
    (&[(L, T)], Poles::NoneOrS),
    (&[(L, R)], Poles::Any),
    (&[(L, S), (T, R)], Poles::None),
    (&[(L, T), (S, R)], Poles::None),
    (&[(L, L2)], Poles::Any),
    (&[(S, T), (L, L2)], Poles::None),
    (&[(L, S), (L2, T)], Poles::None),
    (&[(L, R), (L2, T)], Poles::S),
    (&[(L, L2), (S, R)], Poles::NoneOrT),
    (&[(L, L2), (T, R)], Poles::NoneOrS),
    (&[(L, L2), (S, R), (T, R2)], Poles::None),
    (&[(R, R2), (L, S), (L2, T)], Poles::None),
    (&[(L, L2), (R, R2), (S, T)], Poles::None),
    (&[(L, L2), (R, R2)], Poles::Any),
    (&[(L, R), (L2, R2)], Poles::Both),
];

/// The published list of edge types closed under mirroring. It differs
/// from the realizable set: see [`q_node_types_exhaustive`].
pub fn q_node_types() -> Vec<NodeType> {
    let mut out = BTreeSet::new();
    for &(pairs, poles) in LISTED {
        for &(s_in, t_in) in poles.options() {
            let x = NodeType::from_parts(pairs, s_in, t_in).expect("listed types are valid");
            out.insert(x);
            out.insert(x.mirror());
        }
    }
    out.into_iter().collect()
}

/// The edge table used by the decision procedure: every realizable type
/// with one realizing path system, on poles `0 < 1`.
pub fn q_node_table() -> &'static [(NodeType, PathSystem)] {
    static TABLE: OnceLock<Vec<(NodeType, PathSystem)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let edge = MultiGraph::from_edges(2, &[(0, 1)]).expect("edge");
        NodeType::all().into_iter().filter_map(|x| realize(&edge, &[0, 1], 0, 1, x).map(|ps| (x, ps))).collect()
    })
}

/// Every type realizable on a single edge, found by brute force.
pub fn q_node_types_exhaustive() -> Vec<NodeType> {
    q_node_table().iter().map(|(x, _)| *x).collect()
}

/// Hexagon corners of the extended graph, appended after the `n` graph
/// vertices: `(s, r, r', t, l', l)`.
fn hexagon(n: usize, s: VertexId, t: VertexId) -> [VertexId; 6] {
    [s, n + 1, n + 2, t, n + 3, n]
}

fn port_vertex(n: usize, s: VertexId, t: VertexId, p: Port) -> VertexId {
    match p {
        Port::S => s,
        Port::T => t,
        Port::L => n,
        Port::R => n + 1,
        Port::R2 => n + 2,
        Port::L2 => n + 3,
    }
}

/// Whether `pe` plus the hexagon plus the given walks (local ids) has a
/// drawing with the hexagon bounding one face.
fn drawable(pe: &MultiGraph, s: VertexId, t: VertexId, walks: &[Vec<VertexId>], closed: bool) -> bool {
    let n = pe.n();
    let mut h = pe.clone();
    for _ in 0..4 {
        h.add_vertex();
    }
    let hex = hexagon(n, s, t);
    for i in 0..6 {
        h.add_edge(hex[i], hex[(i + 1) % 6]).expect("hexagon corners are distinct");
    }
    for w in walks {
        for pair in w.windows(2) {
            if h.add_edge(pair[0], pair[1]).is_err() {
                return false;
            }
        }
        if closed && w.len() >= 2 && h.add_edge(w[w.len() - 1], w[0]).is_err() {
            return false;
        }
    }
    planar_with_common_face(&h, &hex)
}

/// Brute-force path system realizing `x` on the pertinent graph `pe`
/// (local ids, `vmap` to block ids) with poles `s`, `t`.
pub fn realize(pe: &MultiGraph, vmap: &[VertexId], s: VertexId, t: VertexId, x: NodeType) -> Option<PathSystem> {
    let n = pe.n();
    let real = |v: VertexId| -> Tok {
        if v < n {
            Tok::Real(vmap[v])
        } else {
            Tok::Port(match v - n {
                0 => Port::L,
                1 => Port::R,
                2 => Port::R2,
                _ => Port::L2,
            })
        }
    };
    if x.is_full() {
        let rest: Vec<VertexId> = (1..n).collect();
        let mut found = None;
        permute(&rest, &mut |p| {
            let mut cyc = vec![0];
            cyc.extend_from_slice(p);
            if drawable(pe, s, t, std::slice::from_ref(&cyc), true) {
                found = Some(cyc);
                true
            } else {
                false
            }
        });
        return found.map(|c| PathSystem { paths: Vec::new(), cycle: Some(c.into_iter().map(|v| vmap[v]).collect()) });
    }
    let pairs = x.pairs();
    let mut inner: Vec<VertexId> = (0..n).filter(|&v| v != s && v != t).collect();
    if x.s_in() {
        inner.push(s);
    }
    if x.t_in() {
        inner.push(t);
    }
    if pairs.is_empty() {
        return inner.is_empty().then(PathSystem::default);
    }
    let k = pairs.len();
    let mut assign = vec![0usize; inner.len()];
    loop {
        let mut groups: Vec<Vec<VertexId>> = vec![Vec::new(); k];
        for (i, &v) in inner.iter().enumerate() {
            groups[assign[i]].push(v);
        }
        if let Some(walks) = order_groups(pe, s, t, &pairs, &groups) {
            let paths = walks.into_iter().map(|w| w.into_iter().map(real).collect()).collect();
            return Some(PathSystem { paths, cycle: None });
        }
        let mut i = 0;
        while i < assign.len() {
            assign[i] += 1;
            if assign[i] < k {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == assign.len() {
            return None;
        }
    }
}

fn order_groups(pe: &MultiGraph, s: VertexId, t: VertexId, pairs: &[(Port, Port)], groups: &[Vec<VertexId>]) -> Option<Vec<Vec<VertexId>>> {
    let n = pe.n();
    let mut chosen: Vec<Vec<VertexId>> = Vec::with_capacity(groups.len());
    fn rec(i: usize, pe: &MultiGraph, s: VertexId, t: VertexId, n: usize, pairs: &[(Port, Port)], groups: &[Vec<VertexId>], chosen: &mut Vec<Vec<VertexId>>) -> bool {
        if i == groups.len() {
            return drawable(pe, s, t, chosen, false);
        }
        let (a, b) = pairs[i];
        let mut ok = false;
        permute(&groups[i], &mut |p| {
            let mut w = vec![port_vertex(n, s, t, a)];
            w.extend_from_slice(p);
            w.push(port_vertex(n, s, t, b));
            chosen.push(w);
            ok = rec(i + 1, pe, s, t, n, pairs, groups, chosen);
            if !ok {
                chosen.pop();
            }
            ok
        });
        ok
    }
    rec(0, pe, s, t, n, pairs, groups, &mut chosen).then_some(chosen)
}

/// Calls `f` on every permutation until it returns true.
fn permute(items: &[VertexId], f: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
    fn rec(items: &mut Vec<VertexId>, k: usize, f: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
        if k == items.len() {
            return f(items);
        }
        for i in k..items.len() {
            items.swap(k, i);
            if rec(items, k + 1, f) {
                items.swap(k, i);
                return true;
            }
            items.swap(k, i);
        }
        false
    }
    let mut v = items.to_vec();
    rec(&mut v, 0, f)
}

/// Check a stored path system against its type on the pertinent graph
/// `pe` (local ids, `vmap` to block ids) with poles `s`, `t` (local).
pub fn audit_paths(pe: &MultiGraph, vmap: &[VertexId], s: VertexId, t: VertexId, x: NodeType, ps: &PathSystem) -> bool {
    let n = pe.n();
    let local: HashMap<VertexId, VertexId> = vmap.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vertex = |tok: &Tok| -> Option<VertexId> {
        match *tok {
            Tok::Real(v) => local.get(&v).copied(),
            Tok::Port(p) => Some(port_vertex(n, s, t, p)),
            _ => None,
        }
    };
    if x.is_full() {
        let Some(c) = &ps.cycle else { return false };
        if !ps.paths.is_empty() {
            return false;
        }
        let mut cyc = Vec::with_capacity(c.len());
        for v in c {
            let Some(&l) = local.get(v) else { return false };
            cyc.push(l);
        }
        let mut sorted = cyc.clone();
        sorted.sort_unstable();
        sorted.dedup();
        return sorted.len() == n && cyc.len() == n && drawable(pe, s, t, &[cyc], true);
    }
    if ps.cycle.is_some() {
        return false;
    }
    let port_of = |v: VertexId| -> Option<Port> {
        if v == s {
            Some(Port::S)
        } else if v == t {
            Some(Port::T)
        } else if v >= n {
            Some([Port::L, Port::R, Port::R2, Port::L2][v - n])
        } else {
            None
        }
    };
    let mut walks = Vec::new();
    let mut got_pairs = Vec::new();
    let mut inner = Vec::new();
    for p in &ps.paths {
        let mut w = Vec::with_capacity(p.len());
        for tok in p {
            let Some(v) = vertex(tok) else { return false };
            w.push(v);
        }
        if w.len() < 2 {
            return false;
        }
        let (Some(a), Some(b)) = (port_of(w[0]), port_of(*w.last().expect("nonempty"))) else { return false };
        got_pairs.push(if a < b { (a, b) } else { (b, a) });
        for &v in &w[1..w.len() - 1] {
            if v >= n {
                return false;
            }
            inner.push(v);
        }
        walks.push(w);
    }
    let mut want_pairs: Vec<(Port, Port)> = x.pairs().into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
    want_pairs.sort_unstable();
    got_pairs.sort_unstable();
    if want_pairs != got_pairs {
        return false;
    }
    let mut want_inner: Vec<VertexId> = (0..n).filter(|&v| v != s && v != t).collect();
    if x.s_in() {
        want_inner.push(s);
    }
    if x.t_in() {
        want_inner.push(t);
    }
    want_inner.sort_unstable();
    inner.sort_unstable();
    inner == want_inner && drawable(pe, s, t, &walks, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::count_by_psi;

    #[test]
    fn table_groups() {
        let q = q_node_types();
        let groups = count_by_psi(&q);
        assert_eq!(groups[&(0, 0)], 3);
        let full = NodeType::full();
        assert!(q.contains(&full));
        let lr = NodeType::from_parts(&[(L, R), (L2, R2)], true, true).unwrap();
        assert!(q.contains(&lr));
        assert_eq!(q.len(), 47);
    }

    #[test]
    fn table_entries_are_realized() {
        let edge = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        for (x, ps) in q_node_table() {
            assert!(audit_paths(&edge, &[0, 1], 0, 1, *x, ps), "{x}");
        }
    }

    #[test]
    fn crossing_the_edge_needs_a_pole() {
        let edge = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        let bare = NodeType::from_parts(&[(L, R)], false, false).unwrap();
        assert!(realize(&edge, &[0, 1], 0, 1, bare).is_none());
        let via_s = NodeType::from_parts(&[(L, R)], true, false).unwrap();
        assert!(realize(&edge, &[0, 1], 0, 1, via_s).is_some());
    }

    #[test]
    fn listed_types_against_realizable_types() {
        let listed: BTreeSet<NodeType> = q_node_types().into_iter().collect();
        let real: BTreeSet<NodeType> = q_node_types_exhaustive().into_iter().collect();
        assert_eq!(real.len(), 48);
        // A bare left-right path would have to cross the edge.
        let bare = NodeType::from_parts(&[(L, R)], false, false).unwrap();
        assert_eq!(listed.difference(&real).copied().collect::<Vec<_>>(), vec![bare]);
        let missing = NodeType::from_parts(&[(L, S), (L2, R)], false, true).unwrap();
        let mut want = vec![missing, missing.mirror()];
        want.sort_unstable();
        assert_eq!(real.difference(&listed).copied().collect::<Vec<_>>(), want);
        assert!(real.iter().all(|x| real.contains(&x.mirror())));
    }
}
