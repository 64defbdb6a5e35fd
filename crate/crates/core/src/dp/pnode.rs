//! Parallel nodes: enumerate compatible sequences of bad child types and
//! fill the remaining children with good types via a saturating matching.

use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::types::{NodeType, Port};

use super::recipe::Recipe;
use super::Table;

/// Longest bad sequence a compatible sequence can contain.
pub const MAX_BAD: usize = 8;

/// Matching saturating every left vertex and every right vertex in
/// `must`, via unit-capacity flow with a bounded bypass for the other
/// right vertices. Returns `(left, right)` pairs.
pub fn saturating_matching(left: usize, right: usize, edges: &[(usize, usize)], must: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut is_must = vec![false; right];
    for &v in must {
        is_must[v] = true;
    }
    let nm = is_must.iter().filter(|&&b| b).count();
    if nm > left {
        return None;
    }
    // Nodes: source, left, right, bypass t', sink.
    let src = 0;
    let lo = 1;
    let ro = lo + left;
    let bypass = ro + right;
    let sink = bypass + 1;
    let mut net = Network::new(sink + 1);
    for a in 0..left {
        net.arc(src, lo + a, 1);
    }
    for &(a, b) in edges {
        net.arc(lo + a, ro + b, 1);
    }
    for b in 0..right {
        if is_must[b] {
            net.arc(ro + b, sink, 1);
        } else {
            net.arc(ro + b, bypass, 1);
        }
    }
    net.arc(bypass, sink, (left - nm) as i32);
    if net.max_flow(src, sink) < left as i32 {
        return None;
    }
    let mut out = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        if net.flow_on(left + i) > 0 {
            out.push((a, b));
        }
    }
    debug_assert!(out.len() == left);
    Some(out)
}

struct Network {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl Network {
    fn new(n: usize) -> Self {
        Network { adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn arc(&mut self, u: usize, v: usize, c: i32) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Flow on the `k`-th arc added.
    fn flow_on(&self, k: usize) -> i32 {
        self.cap[2 * k + 1]
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i32 {
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && !seen[v] {
                        seen[v] = true;
                        prev[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            total += 1;
        }
    }
}

/// Shape of the auxiliary graph of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Invalid,
    /// Acyclic; the boundary type of the sequence.
    Open(NodeType),
    /// One Hamiltonian cycle.
    Closed,
}

fn port_vertex(i: usize, p: Port) -> usize {
    match p {
        Port::S => 0,
        Port::T => 1,
        Port::L => 2 + 4 * i,
        Port::L2 => 3 + 4 * i,
        Port::R => 4 + 4 * i,
        Port::R2 => 5 + 4 * i,
    }
}

/// Evaluate weak compatibility and the auxiliary graph of `seq`.
fn shape(seq: &[NodeType]) -> Shape {
    let r = seq.len();
    let (mut cs, mut ct) = (0u8, 0u8);
    for (i, x) in seq.iter().enumerate() {
        cs += x.count_s();
        ct += x.count_t();
        if i + 1 < r && x.right() != seq[i + 1].left() {
            return Shape::Invalid;
        }
    }
    if cs > 2 || ct > 2 {
        return Shape::Invalid;
    }
    let nv = 2 + 4 * r;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    let mut m = 0;
    let mut edge = |a: usize, b: usize, adj: &mut Vec<Vec<(usize, usize)>>| {
        adj[a].push((b, m));
        adj[b].push((a, m));
        m += 1;
    };
    for (i, x) in seq.iter().enumerate() {
        if x.is_full() {
            edge(0, 1, &mut adj);
            edge(0, 1, &mut adj);
        }
        for (a, b) in x.pairs() {
            edge(port_vertex(i, a), port_vertex(i, b), &mut adj);
        }
        if i + 1 < r {
            if x.right() >= 1 {
                edge(port_vertex(i, Port::R), port_vertex(i + 1, Port::L), &mut adj);
            }
            if x.right() >= 2 {
                edge(port_vertex(i, Port::R2), port_vertex(i + 1, Port::L2), &mut adj);
            }
        }
    }
    if adj.iter().any(|a| a.len() > 2) {
        return Shape::Invalid;
    }
    // Paths start at degree-one vertices; whatever edges remain lie on cycles.
    let mut seen = vec![false; nv];
    let mut covered = 0;
    let mut ends: Vec<(usize, usize)> = Vec::new();
    for v in 0..nv {
        if adj[v].len() != 1 || seen[v] {
            continue;
        }
        seen[v] = true;
        let (mut cur, mut via) = (v, usize::MAX);
        while let Some(&(w, e)) = adj[cur].iter().find(|&&(_, e)| e != via) {
            covered += 1;
            seen[w] = true;
            cur = w;
            via = e;
        }
        ends.push((v, cur));
    }
    if covered < m {
        // Everything must form one cycle and both poles must be visited.
        let start = (0..nv).find(|&v| !seen[v] && !adj[v].is_empty()).expect("an uncovered edge");
        let (mut cur, mut via, mut len) = (start, usize::MAX, 0);
        loop {
            let &(w, e) = adj[cur].iter().find(|&&(_, e)| e != via).expect("cycle vertices have degree two");
            len += 1;
            cur = w;
            via = e;
            if cur == start {
                break;
            }
        }
        if ends.is_empty() && len == m && cs == 2 && ct == 2 {
            return Shape::Closed;
        }
        return Shape::Invalid;
    }
    let port_of = |v: usize| -> Option<Port> {
        match v {
            0 => Some(Port::S),
            1 => Some(Port::T),
            2 => Some(Port::L),
            3 => Some(Port::L2),
            _ if v == port_vertex(r - 1, Port::R) => Some(Port::R),
            _ if v == port_vertex(r - 1, Port::R2) => Some(Port::R2),
            _ => None,
        }
    };
    let mut pairs = Vec::new();
    for (a, b) in ends {
        let (Some(pa), Some(pb)) = (port_of(a), port_of(b)) else { return Shape::Invalid };
        pairs.push((pa, pb));
    }
    match NodeType::from_parts(&pairs, cs == 2, ct == 2) {
        Ok(x) if x.is_valid() => Shape::Open(x),
        _ => Shape::Invalid,
    }
}

/// Result of a parallel node.
pub struct PNodeOutcome {
    pub table: Table,
    /// Longest accepted bad sequence.
    pub max_bad: usize,
    /// Compatible bad sequences examined.
    pub sequences: usize,
}

struct Search<'a> {
    children: &'a [&'a Table],
    bad: Vec<NodeType>,
    /// Children holding each bad type.
    holders: Vec<Vec<usize>>,
    out: Table,
    max_bad: usize,
    sequences: usize,
}

/// Types of a parallel node from its children's tables.
pub fn p_node_types(children: &[&Table]) -> Result<PNodeOutcome> {
    if children.is_empty() {
        return Err(Error::Contract("parallel node without children".into()));
    }
    let mut bad: Vec<NodeType> = children.iter().flat_map(|t| t.keys().copied()).filter(|x| x.good_level().is_none()).collect();
    bad.sort_unstable();
    bad.dedup();
    let holders = bad.iter().map(|x| (0..children.len()).filter(|&c| children[c].contains_key(x)).collect()).collect();
    let mut search = Search { children, bad, holders, out: BTreeMap::new(), max_bad: 0, sequences: 0 };
    search.all_good();
    let mut seq = Vec::new();
    search.extend(&mut seq)?;
    Ok(PNodeOutcome { table: search.out, max_bad: search.max_bad, sequences: search.sequences })
}

impl Search<'_> {
    fn all_good(&mut self) {
        for x in 0..=2u8 {
            let g = NodeType::good(x);
            if self.children.iter().all(|t| t.contains_key(&g)) {
                let parts = self.children.iter().map(|t| t[&g].clone()).collect();
                self.out.entry(g).or_insert_with(|| Rc::new(Recipe::Chain(parts)));
            }
        }
    }

    /// Depth-first over bad sequences; `seq` holds indices into `bad`.
    fn extend(&mut self, seq: &mut Vec<usize>) -> Result<()> {
        for k in 0..self.bad.len() {
            seq.push(k);
            let types: Vec<NodeType> = seq.iter().map(|&i| self.bad[i]).collect();
            let sh = shape(&types);
            if sh != Shape::Invalid && self.injective(seq) {
                self.sequences += 1;
                self.accept(seq, &types, sh)?;
                if sh != Shape::Closed && seq.len() < self.children.len() {
                    self.extend(seq)?;
                }
            }
            seq.pop();
        }
        Ok(())
    }

    /// Whether distinct children can hold the bad types of `seq`.
    fn injective(&self, seq: &[usize]) -> bool {
        let edges: Vec<(usize, usize)> = seq.iter().enumerate().flat_map(|(i, &k)| self.holders[k].iter().map(move |&c| (i, c))).collect();
        saturating_matching(seq.len(), self.children.len(), &edges, &[]).is_some()
    }

    fn accept(&mut self, seq: &[usize], types: &[NodeType], sh: Shape) -> Result<()> {
        let x = match sh {
            Shape::Open(x) => x,
            Shape::Closed => NodeType::full(),
            Shape::Invalid => return Ok(()),
        };
        let r = types.len();
        // Good levels insertable, with the first valid position for each.
        let mut spot: [Option<usize>; 3] = [None; 3];
        for lvl in 0..=2u8 {
            if types[0].left() == lvl {
                spot[lvl as usize] = Some(0);
            } else if let Some(i) = (0..r).find(|&i| types[i].right() == lvl) {
                spot[lvl as usize] = Some(i + 1);
            }
        }
        let fill: Vec<Option<u8>> = self
            .children
            .iter()
            .map(|t| (0..=2u8).find(|&lvl| spot[lvl as usize].is_some() && t.contains_key(&NodeType::good(lvl))))
            .collect();
        let must: Vec<usize> = (0..self.children.len()).filter(|&c| fill[c].is_none()).collect();
        let edges: Vec<(usize, usize)> = seq.iter().enumerate().flat_map(|(i, &k)| self.holders[k].iter().map(move |&c| (i, c))).collect();
        let Some(m) = saturating_matching(r, self.children.len(), &edges, &must) else { return Ok(()) };
        if r > MAX_BAD {
            return Err(Error::Integrity(format!("accepted a compatible sequence with {r} bad types")));
        }
        self.max_bad = self.max_bad.max(r);
        if self.out.contains_key(&x) {
            return Ok(());
        }
        let mut owner = vec![None; self.children.len()];
        for &(i, c) in &m {
            owner[c] = Some(i);
        }
        let mut slots: Vec<Vec<Rc<Recipe>>> = vec![Vec::new(); r + 1];
        for c in 0..self.children.len() {
            if owner[c].is_none() {
                let lvl = fill[c].expect("unmatched children are fillable");
                let at = spot[lvl as usize].expect("level is insertable");
                slots[at].push(self.children[c][&NodeType::good(lvl)].clone());
            }
        }
        let mut by_pos = vec![None; r];
        for &(i, c) in &m {
            by_pos[i] = Some(self.children[c][&types[i]].clone());
        }
        let mut parts = Vec::with_capacity(self.children.len());
        for i in 0..=r {
            parts.append(&mut slots[i]);
            if i < r {
                parts.push(by_pos[i].take().expect("every position is matched"));
            }
        }
        self.out.insert(x, Rc::new(Recipe::Chain(parts)));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::rng;
    use rand::Rng;
    use Port::{L, R, S, T};

    fn brute(left: usize, right: usize, edges: &[(usize, usize)], must: &[usize]) -> bool {
        fn rec(a: usize, left: usize, used: &mut Vec<bool>, edges: &[(usize, usize)], must: &[usize]) -> bool {
            if a == left {
                return must.iter().all(|&b| used[b]);
            }
            for &(x, b) in edges {
                if x == a && !used[b] {
                    used[b] = true;
                    if rec(a + 1, left, used, edges, must) {
                        return true;
                    }
                    used[b] = false;
                }
            }
            false
        }
        rec(0, left, &mut vec![false; right], edges, must)
    }

    #[test]
    fn matching_examples() {
        assert_eq!(saturating_matching(1, 1, &[(0, 0)], &[0]), Some(vec![(0, 0)]));
        assert_eq!(saturating_matching(2, 1, &[(0, 0), (1, 0)], &[]), None);
        assert_eq!(saturating_matching(1, 2, &[(0, 0)], &[1]), None);
    }

    #[test]
    fn matching_agrees_with_exhaustive_search() {
        let mut r = rng(7);
        for _ in 0..400 {
            let left = r.gen_range(0..=8);
            let right = 20;
            let p: f64 = r.gen_range(0.05..0.4);
            let edges: Vec<(usize, usize)> = (0..left).flat_map(|a| (0..right).map(move |b| (a, b))).filter(|_| r.gen_bool(p)).collect();
            let must: Vec<usize> = (0..right).filter(|_| r.gen_bool(0.15)).collect();
            let got = saturating_matching(left, right, &edges, &must);
            assert_eq!(got.is_some(), brute(left, right, &edges, &must));
            if let Some(m) = got {
                let mut ls: Vec<usize> = m.iter().map(|e| e.0).collect();
                let mut rs: Vec<usize> = m.iter().map(|e| e.1).collect();
                ls.sort_unstable();
                rs.sort_unstable();
                rs.dedup();
                assert_eq!(ls, (0..left).collect::<Vec<_>>());
                assert_eq!(rs.len(), left);
                assert!(must.iter().all(|b| rs.contains(b)));
                assert!(m.iter().all(|e| edges.contains(e)));
            }
        }
    }

    fn table(types: &[NodeType]) -> Table {
        types.iter().map(|&x| (x, Rc::new(Recipe::Paths(Default::default())))).collect()
    }

    #[test]
    fn too_many_pole_visits_are_rejected() {
        let ls = NodeType::from_parts(&[(L, S)], false, false).unwrap();
        let through = NodeType::from_parts(&[(L, R)], true, false).unwrap();
        assert_eq!(shape(&[ls.mirror(), through]), Shape::Invalid);
        assert_eq!(shape(&[ls]), Shape::Open(ls));
        assert_eq!(shape(&[ls.mirror(), ls]), Shape::Invalid);
    }

    #[test]
    fn theta_reaches_full() {
        let q = table(&super::super::qnode::q_node_types());
        let out = p_node_types(&[&q, &q]).unwrap();
        assert!(out.table.contains_key(&NodeType::full()));
        assert!(out.max_bad <= MAX_BAD);
    }

    #[test]
    fn all_one_good_children() {
        let one = NodeType::good(1);
        let t = table(&[one]);
        let out = p_node_types(&[&t, &t, &t]).unwrap();
        assert_eq!(out.table.keys().copied().collect::<Vec<_>>(), vec![one]);
        let lr = NodeType::from_parts(&[(L, R)], false, false).unwrap();
        assert_eq!(one, lr);
        let dirty = NodeType::from_parts(&[(S, T)], false, false).unwrap();
        let out = p_node_types(&[&t, &table(&[dirty])]).unwrap();
        assert!(out.table.is_empty());
    }
}
