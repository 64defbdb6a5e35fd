//! Path-system types on weak nooses and on SPQR nodes.
//!
//! A noose type records how a Hamiltonian cycle meets the region inside a
//! noose: how often it crosses each subcurve (`psi`), which crossing
//! points and boundary vertices are joined by paths (`matching`), and
//! which boundary vertices are passed through (`s`). Types are stored as
//! a compact code: one role per slot of the noose's canonical traversal,
//! read as a Dyck word.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::spherecut::{xor_nooses, Slot, Subcurve, WeakNoose};

/// Compact type code relative to a fixed noose.
pub type Code = u128;

const UNUSED: u8 = 0;
const INNER: u8 = 1;
const OPEN: u8 = 2;
const CLOSE: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

/// Dyck word of a non-crossing matching read along `order` from `start`.
/// Unmatched points are skipped.
pub fn dyck_encode<T: Copy + Eq>(m: &[(T, T)], order: &[T], start: usize, orientation: Orientation) -> Result<String> {
    let n = order.len();
    let seq: Vec<T> = (0..n)
        .map(|i| match orientation {
            Orientation::Clockwise => order[(start + i) % n],
            Orientation::CounterClockwise => order[(start + n - i) % n],
        })
        .collect();
    let pos = |x: T| seq.iter().position(|&y| y == x);
    let mut partner: Vec<Option<usize>> = vec![None; n];
    for &(a, b) in m {
        let (Some(i), Some(j)) = (pos(a), pos(b)) else {
            return Err(Error::Contract("matched point not in order".into()));
        };
        if i == j || partner[i].is_some() || partner[j].is_some() {
            return Err(Error::Contract("not a matching".into()));
        }
        partner[i] = Some(j);
        partner[j] = Some(i);
    }
    let mut word = String::new();
    let mut stack = Vec::new();
    for i in 0..n {
        match partner[i] {
            Some(j) if j > i => {
                word.push('[');
                stack.push(i);
            }
            Some(j) => {
                if stack.pop() != Some(j) {
                    return Err(Error::Contract("matching is crossing".into()));
                }
                word.push(']');
            }
            None => {}
        }
    }
    Ok(word)
}

/// Matching described by a Dyck word over `points` (the matched points in
/// reading order).
pub fn dyck_decode<T: Copy>(word: &str, points: &[T]) -> Result<Vec<(T, T)>> {
    if word.chars().count() != points.len() {
        return Err(Error::Contract("word length differs from point count".into()));
    }
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for (c, &p) in word.chars().zip(points) {
        match c {
            '[' => stack.push(p),
            ']' => out.push((stack.pop().ok_or_else(|| Error::Contract("unbalanced word".into()))?, p)),
            _ => return Err(Error::Contract(format!("bad symbol {c}"))),
        }
    }
    if !stack.is_empty() {
        return Err(Error::Contract("unbalanced word".into()));
    }
    Ok(out)
}

/// All non-crossing perfect matchings on points `0..n` of a circle.
pub fn non_crossing_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(word: &mut String, open: usize, left: usize, out: &mut Vec<String>) {
        if left == 0 {
            if open == 0 {
                out.push(word.clone());
            }
            return;
        }
        if open < left {
            word.push('[');
            rec(word, open + 1, left - 1, out);
            word.pop();
        }
        if open > 0 {
            word.push(']');
            rec(word, open - 1, left - 1, out);
            word.pop();
        }
    }
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut words = Vec::new();
    rec(&mut String::new(), 0, n, &mut words);
    let pts: Vec<usize> = (0..n).collect();
    words.iter().map(|w| dyck_decode(w, &pts).expect("generated words are balanced")).collect()
}

/// Point on a noose: a boundary vertex or the `i`-th crossing point of a
/// subcurve, counted from its smaller endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    V(VertexId),
    X(Subcurve, u8),
}

/// Explicit form of a noose type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NooseType {
    /// Crossing counts of the subcurves crossed at least once, sorted.
    pub psi: Vec<(Subcurve, u8)>,
    /// Pairs `(a, b)` with `a < b`, sorted.
    pub matching: Vec<(Point, Point)>,
    /// Boundary vertices passed through, sorted.
    pub s: Vec<VertexId>,
}

fn slot_bits(slot: &Slot) -> u32 {
    match slot {
        Slot::Vertex(_) => 2,
        Slot::Curve { .. } => 4,
    }
}

/// Crossing points of a curve slot in traversal order.
fn curve_points(sc: Subcurve, count: u8, forward: bool) -> Vec<Point> {
    match (count, forward) {
        (0, _) => vec![],
        (1, _) => vec![Point::X(sc, 0)],
        (_, true) => vec![Point::X(sc, 0), Point::X(sc, 1)],
        (_, false) => vec![Point::X(sc, 1), Point::X(sc, 0)],
    }
}

impl NooseType {
    pub fn new(psi: Vec<(Subcurve, u8)>, matching: Vec<(Point, Point)>, s: Vec<VertexId>) -> Self {
        let mut psi: Vec<(Subcurve, u8)> = psi.into_iter().filter(|&(_, c)| c > 0).collect();
        psi.sort_unstable();
        let mut matching: Vec<(Point, Point)> = matching.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        matching.sort_unstable();
        let mut s = s;
        s.sort_unstable();
        NooseType { psi, matching, s }
    }

    pub fn empty() -> Self {
        NooseType { psi: Vec::new(), matching: Vec::new(), s: Vec::new() }
    }

    pub fn full(o: &WeakNoose) -> Self {
        NooseType { psi: Vec::new(), matching: Vec::new(), s: o.boundary() }
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty() && self.matching.is_empty() && self.s.is_empty()
    }

    pub fn is_full(&self, o: &WeakNoose) -> bool {
        self.matching.is_empty() && self.s == o.boundary()
    }

    pub fn psi_of(&self, c: &Subcurve) -> u8 {
        self.psi.iter().find(|(d, _)| d == c).map_or(0, |&(_, k)| k)
    }

    /// Canonical code on `o`; errors if the type is not valid on `o`.
    pub fn encode(&self, o: &WeakNoose) -> Result<Code> {
        for (c, k) in &self.psi {
            if o.index_of(c).is_none() || *k > 2 {
                return Err(Error::Contract("psi names a foreign subcurve or count above two".into()));
            }
        }
        let boundary = o.boundary();
        if self.s.iter().any(|v| boundary.binary_search(v).is_err()) {
            return Err(Error::Contract("S leaves the boundary".into()));
        }
        let layout = o.layout();
        let mut seq: Vec<Point> = Vec::new();
        for slot in &layout {
            match *slot {
                Slot::Vertex(v) => seq.push(Point::V(v)),
                Slot::Curve { index, forward } => {
                    let sc = o.subcurves()[index];
                    seq.extend(curve_points(sc, self.psi_of(&sc), forward));
                }
            }
        }
        let pos: HashMap<Point, usize> = seq.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut partner: HashMap<Point, Point> = HashMap::new();
        for &(a, b) in &self.matching {
            if !pos.contains_key(&a) || !pos.contains_key(&b) || a == b {
                return Err(Error::Contract("matched point missing from the noose".into()));
            }
            if partner.insert(a, b).is_some() || partner.insert(b, a).is_some() {
                return Err(Error::Contract("not a matching".into()));
            }
        }
        for &v in &self.s {
            if partner.contains_key(&Point::V(v)) {
                return Err(Error::Contract("vertex both in S and matched".into()));
            }
        }
        let mut code: Code = 0;
        let mut shift = 0u32;
        let mut stack: Vec<Point> = Vec::new();
        let role_of = |p: Point, stack: &mut Vec<Point>| -> Result<u8> {
            let q = partner[&p];
            if pos[&q] > pos[&p] {
                stack.push(p);
                Ok(OPEN)
            } else if stack.pop() == Some(q) {
                Ok(CLOSE)
            } else {
                Err(Error::Contract("matching is crossing".into()))
            }
        };
        for slot in &layout {
            match *slot {
                Slot::Vertex(v) => {
                    let p = Point::V(v);
                    let role = if self.s.binary_search(&v).is_ok() {
                        INNER
                    } else if partner.contains_key(&p) {
                        role_of(p, &mut stack)?
                    } else {
                        UNUSED
                    };
                    code |= (role as Code) << shift;
                }
                Slot::Curve { index, forward } => {
                    let sc = o.subcurves()[index];
                    let k = self.psi_of(&sc);
                    let mut bits = k as Code;
                    for (i, p) in curve_points(sc, k, forward).into_iter().enumerate() {
                        if !partner.contains_key(&p) {
                            return Err(Error::Contract("crossing point left unmatched".into()));
                        }
                        if role_of(p, &mut stack)? == CLOSE {
                            bits |= 1 << (2 + i);
                        }
                    }
                    code |= bits << shift;
                }
            }
            shift += slot_bits(slot);
        }
        Ok(code)
    }

    /// Explicit type of a code on `o`.
    pub fn decode(o: &WeakNoose, code: Code) -> Result<Self> {
        let layout = o.layout();
        let mut shift = 0u32;
        let mut stack: Vec<Point> = Vec::new();
        let mut psi = Vec::new();
        let mut matching = Vec::new();
        let mut s = Vec::new();
        for slot in &layout {
            let mut visit = |p: Point, close: bool, stack: &mut Vec<Point>| -> Result<()> {
                if close {
                    let q = stack.pop().ok_or_else(|| Error::Contract("unbalanced code".into()))?;
                    matching.push((q, p));
                } else {
                    stack.push(p);
                }
                Ok(())
            };
            match *slot {
                Slot::Vertex(v) => match ((code >> shift) & 3) as u8 {
                    UNUSED => {}
                    INNER => s.push(v),
                    r => visit(Point::V(v), r == CLOSE, &mut stack)?,
                },
                Slot::Curve { index, forward } => {
                    let bits = (code >> shift) & 15;
                    let k = (bits & 3) as u8;
                    if k > 2 {
                        return Err(Error::Contract("crossing count above two".into()));
                    }
                    let sc = o.subcurves()[index];
                    if k > 0 {
                        psi.push((sc, k));
                    }
                    for (i, p) in curve_points(sc, k, forward).into_iter().enumerate() {
                        visit(p, bits & (1 << (2 + i)) != 0, &mut stack)?;
                    }
                    if (k as usize) < 2 && bits >> (2 + k) != 0 {
                        return Err(Error::Contract("stray role bits".into()));
                    }
                }
            }
            shift += slot_bits(slot);
        }
        if !stack.is_empty() || (shift < 128 && code >> shift != 0) {
            return Err(Error::Contract("unbalanced code".into()));
        }
        Ok(NooseType::new(psi, matching, s))
    }
}

/// Every structurally valid type on `o`, as codes.
pub fn enumerate_type_codes(o: &WeakNoose) -> Vec<Code> {
    let layout = o.layout();
    let mut out = Vec::new();
    fn rec(layout: &[Slot], i: usize, shift: u32, balance: usize, code: Code, out: &mut Vec<Code>) {
        if i == layout.len() {
            if balance == 0 {
                out.push(code);
            }
            return;
        }
        let remaining_points: usize = layout[i..].iter().map(|s| if matches!(s, Slot::Vertex(_)) { 1 } else { 2 }).sum();
        if balance > remaining_points {
            return;
        }
        match layout[i] {
            Slot::Vertex(_) => {
                for role in [UNUSED, INNER, OPEN, CLOSE] {
                    let nb = match role {
                        OPEN => balance + 1,
                        CLOSE if balance == 0 => continue,
                        CLOSE => balance - 1,
                        _ => balance,
                    };
                    rec(layout, i + 1, shift + 2, nb, code | ((role as Code) << shift), out);
                }
            }
            Slot::Curve { .. } => {
                rec(layout, i + 1, shift + 4, balance, code, out);
                for k in 1..=2u8 {
                    for roles in 0..(1u8 << k) {
                        let mut b = balance as isize;
                        let mut ok = true;
                        for j in 0..k {
                            if roles & (1 << j) != 0 {
                                b -= 1;
                                if b < 0 {
                                    ok = false;
                                }
                            } else {
                                b += 1;
                            }
                        }
                        if ok {
                            let bits = (k as Code) | ((roles as Code) << 2);
                            rec(layout, i + 1, shift + 4, b as usize, code | (bits << shift), out);
                        }
                    }
                }
            }
        }
    }
    rec(&layout, 0, 0, 0, 0, &mut out);
    out
}

/// Every structurally valid type on `o`.
pub fn enumerate_types(o: &WeakNoose) -> Vec<NooseType> {
    enumerate_type_codes(o).into_iter().map(|c| NooseType::decode(o, c).expect("generated codes decode")).collect()
}

/// Code of the full type on `o`.
pub fn full_code(o: &WeakNoose) -> Code {
    let mut code = 0;
    let mut shift = 0;
    for slot in o.layout() {
        if let Slot::Vertex(_) = slot {
            code |= (INNER as Code) << shift;
        }
        shift += slot_bits(&slot);
    }
    code
}

const NONE: u16 = u16::MAX;

#[derive(Clone, Copy, Debug)]
enum SlotRef {
    V(u16),
    C { curve: u16, forward: bool },
}

#[derive(Clone, Debug)]
struct Side {
    slots: Vec<SlotRef>,
    has_vertex: Vec<bool>,
    has_curve: Vec<bool>,
}

/// Decoded type on one side of a [`Joiner`].
#[derive(Clone, Debug)]
pub struct Decoded {
    pub code: Code,
    deg: Vec<u8>,
    partner: Vec<u16>,
    psi: Vec<u8>,
    full: bool,
    empty: bool,
}

/// Reusable buffers for [`Joiner::combine_in`].
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    visited: Vec<bool>,
    res: Vec<u16>,
    stack: Vec<u16>,
}

/// Precomputed data for combining types of two nooses into a type of
/// their xor.
#[derive(Clone, Debug)]
pub struct Joiner {
    out: WeakNoose,
    nv: usize,
    curves: Vec<Subcurve>,
    sides: [Side; 2],
    shared_curves: Vec<usize>,
    shared_vertices: Vec<usize>,
    vanishing: Vec<bool>,
    out_slots: Vec<SlotRef>,
    out_pos: Vec<u16>,
    full_ok: [bool; 2],
    full_code: Code,
}

impl Joiner {
    /// `None` if `o1 ⊕ o2` is not a weak noose.
    pub fn new(o1: &WeakNoose, o2: &WeakNoose) -> Option<Self> {
        let out = xor_nooses(o1, o2)?;
        let mut vertices: Vec<VertexId> = o1.boundary();
        vertices.extend(o2.boundary());
        vertices.sort_unstable();
        vertices.dedup();
        let mut curves: Vec<Subcurve> = o1.subcurves().to_vec();
        curves.extend_from_slice(o2.subcurves());
        curves.sort_unstable();
        curves.dedup();
        let nv = vertices.len();
        let vid = |v: VertexId| vertices.binary_search(&v).expect("known vertex") as u16;
        let cid = |c: &Subcurve| curves.binary_search(c).expect("known curve") as u16;
        let slots_of = |o: &WeakNoose| -> Vec<SlotRef> {
            o.layout()
                .into_iter()
                .map(|s| match s {
                    Slot::Vertex(v) => SlotRef::V(vid(v)),
                    Slot::Curve { index, forward } => SlotRef::C { curve: cid(&o.subcurves()[index]), forward },
                })
                .collect()
        };
        let side_of = |o: &WeakNoose| -> Side {
            let mut has_vertex = vec![false; nv];
            for v in o.boundary() {
                has_vertex[vid(v) as usize] = true;
            }
            let mut has_curve = vec![false; curves.len()];
            for c in o.subcurves() {
                has_curve[cid(c) as usize] = true;
            }
            Side { slots: slots_of(o), has_vertex, has_curve }
        };
        let sides = [side_of(o1), side_of(o2)];
        let shared_curves: Vec<usize> = (0..curves.len()).filter(|&k| sides[0].has_curve[k] && sides[1].has_curve[k]).collect();
        let shared_vertices: Vec<usize> = (0..nv).filter(|&v| sides[0].has_vertex[v] && sides[1].has_vertex[v]).collect();
        let out_boundary = out.boundary();
        let vanishing: Vec<bool> = vertices.iter().map(|v| out_boundary.binary_search(v).is_err()).collect();
        let out_slots = slots_of(&out);
        let np = nv + 2 * curves.len();
        let mut out_pos = vec![NONE; np];
        let mut pos = 0u16;
        for s in &out_slots {
            match *s {
                SlotRef::V(v) => {
                    out_pos[v as usize] = pos;
                    pos += 1;
                }
                SlotRef::C { curve, forward } => {
                    let base = nv + 2 * curve as usize;
                    let order = if forward { [base, base + 1] } else { [base + 1, base] };
                    for p in order {
                        out_pos[p] = pos;
                        pos += 1;
                    }
                }
            }
        }
        let sub = |a: &Side, b: &Side| (0..nv).all(|v| !b.has_vertex[v] || a.has_vertex[v]);
        let full_ok = [sub(&sides[0], &sides[1]), sub(&sides[1], &sides[0])];
        let full_code = full_code(&out);
        Some(Joiner { out, nv, curves, sides, shared_curves, shared_vertices, vanishing, out_slots, out_pos, full_ok, full_code })
    }

    pub fn result_noose(&self) -> &WeakNoose {
        &self.out
    }

    fn points(&self) -> usize {
        self.nv + 2 * self.curves.len()
    }

    /// Decode a code of side `side` (0 or 1).
    pub fn decode(&self, side: usize, code: Code) -> Option<Decoded> {
        let sd = &self.sides[side];
        let mut deg = vec![0u8; self.nv];
        let mut partner = vec![NONE; self.points()];
        let mut psi = vec![0u8; self.curves.len()];
        let mut stack: Vec<u16> = Vec::new();
        let mut shift = 0u32;
        let mut all_inner = true;
        let visit = |p: u16, close: bool, stack: &mut Vec<u16>, partner: &mut [u16]| -> bool {
            if close {
                match stack.pop() {
                    Some(q) => {
                        partner[p as usize] = q;
                        partner[q as usize] = p;
                        true
                    }
                    None => false,
                }
            } else {
                stack.push(p);
                true
            }
        };
        for s in &sd.slots {
            match *s {
                SlotRef::V(v) => {
                    let role = ((code >> shift) & 3) as u8;
                    shift += 2;
                    match role {
                        UNUSED => all_inner = false,
                        INNER => deg[v as usize] = 2,
                        r => {
                            all_inner = false;
                            deg[v as usize] = 1;
                            if !visit(v, r == CLOSE, &mut stack, &mut partner) {
                                return None;
                            }
                        }
                    }
                }
                SlotRef::C { curve, forward } => {
                    let bits = (code >> shift) & 15;
                    shift += 4;
                    let k = (bits & 3) as u8;
                    if k > 2 {
                        return None;
                    }
                    psi[curve as usize] = k;
                    let base = (self.nv + 2 * curve as usize) as u16;
                    let order: &[u16] = match (k, forward) {
                        (0, _) => &[],
                        (1, _) => &[base],
                        (_, true) => &[base, base + 1],
                        (_, false) => &[base + 1, base],
                    };
                    for (i, &p) in order.iter().enumerate() {
                        if !visit(p, bits & (1 << (2 + i)) != 0, &mut stack, &mut partner) {
                            return None;
                        }
                    }
                }
            }
        }
        if !stack.is_empty() {
            return None;
        }
        let empty = code == 0;
        let no_match = partner.iter().all(|&p| p == NONE);
        Some(Decoded { code, deg, partner, psi, full: no_match && all_inner, empty })
    }

    /// Join key of a decoded side: crossing counts on shared subcurves and
    /// degrees on shared vertices.
    pub fn key(&self, d: &Decoded) -> u128 {
        let mut k: u128 = 0;
        for &c in &self.shared_curves {
            k = (k << 2) | d.psi[c] as u128;
        }
        for &v in &self.shared_vertices {
            k = (k << 2) | d.deg[v] as u128;
        }
        k
    }

    /// Keys of the other side that may combine with `d`.
    pub fn partner_keys(&self, d: &Decoded) -> Vec<u128> {
        let mut keys: Vec<u128> = vec![0];
        for &c in &self.shared_curves {
            for k in &mut keys {
                *k = (*k << 2) | d.psi[c] as u128;
            }
        }
        for &v in &self.shared_vertices {
            let d1 = d.deg[v];
            let opts: Vec<u8> = if self.vanishing[v] {
                if d1 > 2 {
                    vec![]
                } else {
                    vec![2 - d1]
                }
            } else {
                (0..=2 - d1.min(2)).collect()
            };
            let mut next = Vec::with_capacity(keys.len() * opts.len());
            for &k in &keys {
                for &o in &opts {
                    next.push((k << 2) | o as u128);
                }
            }
            keys = next;
        }
        keys
    }

    /// Combined type of two decoded sides (side 0 first), if compatible.
    pub fn combine(&self, a: &Decoded, b: &Decoded) -> Option<Code> {
        self.combine_in(a, b, &mut Scratch::default())
    }

    /// [`Joiner::combine`] with caller-owned buffers.
    pub fn combine_in(&self, a: &Decoded, b: &Decoded, scratch: &mut Scratch) -> Option<Code> {
        if a.full || b.full {
            if a.full && b.empty && self.full_ok[0] {
                return Some(self.full_code);
            }
            if b.full && a.empty && self.full_ok[1] {
                return Some(self.full_code);
            }
            return None;
        }
        for &c in &self.shared_curves {
            if a.psi[c] != b.psi[c] {
                return None;
            }
        }
        let nv = self.nv;
        for v in 0..nv {
            let d = a.deg[v] + b.deg[v];
            if self.vanishing[v] {
                if d != 2 {
                    return None;
                }
            } else if d > 2 {
                return None;
            }
        }
        let np = self.points();
        let Scratch { visited, res, stack } = scratch;
        visited.clear();
        visited.resize(np, false);
        res.clear();
        res.resize(np, NONE);
        stack.clear();
        let mut paths = 0usize;
        let links = |p: usize| (a.partner[p] != NONE) as u8 + (b.partner[p] != NONE) as u8;
        for p in 0..np {
            if visited[p] || links(p) != 1 {
                continue;
            }
            let mut cur = p;
            let mut use_a = a.partner[p] != NONE;
            visited[p] = true;
            let end = loop {
                let nxt = if use_a { a.partner[cur] } else { b.partner[cur] } as usize;
                visited[nxt] = true;
                let cont = if use_a { b.partner[nxt] } else { a.partner[nxt] };
                if cont == NONE {
                    break nxt;
                }
                cur = nxt;
                use_a = !use_a;
            };
            res[p] = end as u16;
            res[end] = p as u16;
            paths += 1;
        }
        let mut cycle_start = None;
        for p in 0..np {
            if !visited[p] && links(p) > 0 {
                cycle_start = Some(p);
                break;
            }
        }
        if let Some(p0) = cycle_start {
            if paths > 0 {
                return None;
            }
            let mut cur = p0;
            let mut use_a = true;
            loop {
                visited[cur] = true;
                let nxt = if use_a { a.partner[cur] } else { b.partner[cur] } as usize;
                use_a = !use_a;
                if nxt == p0 {
                    break;
                }
                cur = nxt;
            }
            if (0..np).any(|p| !visited[p] && links(p) > 0) {
                return None;
            }
            for s in &self.out_slots {
                if let SlotRef::V(v) = *s {
                    if a.deg[v as usize] + b.deg[v as usize] != 2 {
                        return None;
                    }
                }
            }
            return Some(self.full_code);
        }
        let mut code: Code = 0;
        let mut shift = 0u32;
        let mut any_inner = false;
        let mut all_inner = true;
        for s in &self.out_slots {
            match *s {
                SlotRef::V(v) => {
                    let d = a.deg[v as usize] + b.deg[v as usize];
                    let role = match d {
                        0 => {
                            all_inner = false;
                            UNUSED
                        }
                        2 => {
                            any_inner = true;
                            INNER
                        }
                        _ => {
                            all_inner = false;
                            self.role(v, res, stack)?
                        }
                    };
                    code |= (role as Code) << shift;
                    shift += 2;
                }
                SlotRef::C { curve, forward } => {
                    let c = curve as usize;
                    let k = if self.sides[0].has_curve[c] { a.psi[c] } else { b.psi[c] };
                    let base = (nv + 2 * c) as u16;
                    let order: &[u16] = match (k, forward) {
                        (0, _) => &[],
                        (1, _) => &[base],
                        (_, true) => &[base, base + 1],
                        (_, false) => &[base + 1, base],
                    };
                    let mut bits = k as Code;
                    for (i, &p) in order.iter().enumerate() {
                        if self.role(p, res, stack)? == CLOSE {
                            bits |= 1 << (2 + i);
                        }
                    }
                    code |= bits << shift;
                    shift += 4;
                }
            }
        }
        if paths == 0 && any_inner && !all_inner {
            return None;
        }
        Some(code)
    }

    fn role(&self, p: u16, res: &[u16], stack: &mut Vec<u16>) -> Option<u8> {
        let q = res[p as usize];
        if q == NONE {
            return None;
        }
        if self.out_pos[q as usize] > self.out_pos[p as usize] {
            stack.push(p);
            Some(OPEN)
        } else if stack.pop() == Some(q) {
            Some(CLOSE)
        } else {
            None
        }
    }
}

/// Compatibility of types on abstract nooses: matching crossing counts on
/// shared subcurves, the degree rules, path gluing and the full/empty rule.
/// Enclosure of cancelled subcurves is the caller's concern.
pub fn check_compatible(o1: &WeakNoose, x1: &NooseType, o2: &WeakNoose, x2: &NooseType) -> bool {
    combine_types(o1, x1, o2, x2).is_ok()
}

/// Combined type on `o1 ⊕ o2`.
pub fn combine_types(o1: &WeakNoose, x1: &NooseType, o2: &WeakNoose, x2: &NooseType) -> Result<NooseType> {
    let j = Joiner::new(o1, o2).ok_or_else(|| Error::Contract("xor of the nooses is not a weak noose".into()))?;
    let c1 = x1.encode(o1)?;
    let c2 = x2.encode(o2)?;
    let d1 = j.decode(0, c1).ok_or_else(|| Error::Contract("bad code".into()))?;
    let d2 = j.decode(1, c2).ok_or_else(|| Error::Contract("bad code".into()))?;
    let code = j.combine(&d1, &d2).ok_or_else(|| Error::Contract("types are not compatible".into()))?;
    NooseType::decode(j.result_noose(), code)
}

/// Calls `f(x, x1, x2)` for every compatible pair `x1`, `x2` from the
/// candidate sets, with `x = x1 ∘ x2`.
pub fn for_each_triple(j: &Joiner, left: &[Code], right: &[Code], mut f: impl FnMut(Code, Code, Code)) {
    let mut index: HashMap<u128, Vec<Decoded>> = HashMap::new();
    for &c in right {
        if let Some(d) = j.decode(1, c) {
            index.entry(j.key(&d)).or_default().push(d);
        }
    }
    let mut scratch = Scratch::default();
    for &c in left {
        let Some(d1) = j.decode(0, c) else { continue };
        for key in j.partner_keys(&d1) {
            if let Some(list) = index.get(&key) {
                for d2 in list {
                    if let Some(x) = j.combine_in(&d1, d2, &mut scratch) {
                        f(x, d1.code, d2.code);
                    }
                }
            }
        }
    }
}

/// All codes `(x, x1, x2)` with `x1`, `x2` compatible and `x = x1 ∘ x2`,
/// restricted to the given candidate sets of `x1` and `x2`.
pub fn join_codes(j: &Joiner, left: &[Code], right: &[Code]) -> Vec<(Code, Code, Code)> {
    let mut out = Vec::new();
    for_each_triple(j, left, right, |x, a, b| out.push((x, a, b)));
    out
}

/// Number of compatible triples over the full type sets of `o1` and `o2`,
/// without materializing them.
pub fn count_triples(o1: &WeakNoose, o2: &WeakNoose) -> Result<usize> {
    let j = Joiner::new(o1, o2).ok_or_else(|| Error::Contract("xor of the nooses is not a weak noose".into()))?;
    let mut n = 0;
    for_each_triple(&j, &enumerate_type_codes(o1), &enumerate_type_codes(o2), |_, _, _| n += 1);
    Ok(n)
}

/// All compatible triples over the full type sets of `o1` and `o2`.
pub fn enumerate_triples(o1: &WeakNoose, o2: &WeakNoose) -> Result<Vec<(NooseType, NooseType, NooseType)>> {
    let j = Joiner::new(o1, o2).ok_or_else(|| Error::Contract("xor of the nooses is not a weak noose".into()))?;
    let t1 = enumerate_type_codes(o1);
    let t2 = enumerate_type_codes(o2);
    let o = j.result_noose().clone();
    join_codes(&j, &t1, &t2)
        .into_iter()
        .map(|(x, a, b)| Ok((NooseType::decode(&o, x)?, NooseType::decode(o1, a)?, NooseType::decode(o2, b)?)))
        .collect()
}

/// Curves inside an empty disk realizing a type: one point sequence per
/// matched pair, or the boundary cycle for the full type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiskRealization {
    Paths(Vec<Vec<Point>>),
    Cycle(Vec<VertexId>),
}

/// Whether a type is realizable by non-crossing chords inside a disk
/// bounded by a noose with nothing inside it. Each vertex of `S` must be
/// an inner vertex of one path.
pub fn disk_realizable(o: &WeakNoose, x: &NooseType) -> bool {
    disk_paths(o, x).is_some()
}

/// A realization of `x` inside an empty disk bounded by `o`, if any.
pub fn disk_paths(o: &WeakNoose, x: &NooseType) -> Option<DiskRealization> {
    if x.matching.is_empty() {
        if x.s.is_empty() {
            return Some(DiskRealization::Paths(Vec::new()));
        }
        return x.is_full(o).then(|| DiskRealization::Cycle(o.cyclic_vertices()));
    }
    let layout = o.layout();
    let mut seq: Vec<Point> = Vec::new();
    for slot in &layout {
        match *slot {
            Slot::Vertex(v) => seq.push(Point::V(v)),
            Slot::Curve { index, forward } => {
                let sc = o.subcurves()[index];
                seq.extend(curve_points(sc, x.psi_of(&sc), forward));
            }
        }
    }
    let pos: HashMap<Point, usize> = seq.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let k = x.matching.len();
    let s = &x.s;
    let mut assign = vec![0usize; s.len()];
    loop {
        // Try every ordering of the inner vertices within each path.
        let mut groups: Vec<Vec<VertexId>> = vec![Vec::new(); k];
        for (i, &v) in s.iter().enumerate() {
            groups[assign[i]].push(v);
        }
        if let Some(inner) = orderings_ok(&x.matching, &groups, &pos) {
            let paths = x
                .matching
                .iter()
                .zip(inner)
                .map(|(&(a, b), mid)| {
                    let mut p = vec![a];
                    p.extend(mid.into_iter().map(Point::V));
                    p.push(b);
                    p
                })
                .collect();
            return Some(DiskRealization::Paths(paths));
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

fn orderings_ok(matching: &[(Point, Point)], groups: &[Vec<VertexId>], pos: &HashMap<Point, usize>) -> Option<Vec<Vec<VertexId>>> {
    fn perms(v: &[VertexId]) -> Vec<Vec<VertexId>> {
        if v.len() <= 1 {
            return vec![v.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..v.len() {
            let mut rest = v.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let options: Vec<Vec<Vec<VertexId>>> = groups.iter().map(|g| perms(g)).collect();
    let mut idx = vec![0usize; groups.len()];
    loop {
        let mut chords: Vec<(usize, usize)> = Vec::new();
        for (i, &(a, b)) in matching.iter().enumerate() {
            let mut path = vec![pos[&a]];
            path.extend(options[i][idx[i]].iter().map(|&v| pos[&Point::V(v)]));
            path.push(pos[&b]);
            for w in path.windows(2) {
                chords.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        let crossing = chords.iter().enumerate().any(|(i, &(a, b))| chords[i + 1..].iter().any(|&(c, d)| (a < c && c < b && b < d) || (c < a && a < d && d < b)));
        if !crossing {
            return Some(idx.iter().enumerate().map(|(i, &j)| options[i][j].clone()).collect());
        }
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            return None;
        }
    }
}

/// Codes of the realizable types of an edge-less triangle noose. The set
/// depends only on the slot structure, which every triangle shares.
pub fn triangle_codes() -> &'static HashSet<Code> {
    static CODES: OnceLock<HashSet<Code>> = OnceLock::new();
    CODES.get_or_init(|| {
        let t = WeakNoose::new(vec![Subcurve::new(0, 1, 0), Subcurve::new(1, 2, 0), Subcurve::new(0, 2, 0)]).expect("triangle");
        enumerate_type_codes(&t).into_iter().filter(|&c| disk_realizable(&t, &NooseType::decode(&t, c).expect("valid"))).collect()
    })
}

/// Corner of the outer hexagon `(s, r, r', t, l', l)` of an SPQR node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    S = 0,
    R = 1,
    R2 = 2,
    T = 3,
    L2 = 4,
    L = 5,
}

pub const PORTS: [Port; 6] = [Port::S, Port::R, Port::R2, Port::T, Port::L2, Port::L];

impl Port {
    pub fn mirror(self) -> Port {
        match self {
            Port::S => Port::S,
            Port::T => Port::T,
            Port::R => Port::L,
            Port::R2 => Port::L2,
            Port::L => Port::R,
            Port::L2 => Port::R2,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, Port::S | Port::T)
    }
}

/// Type of an SPQR node: two bits per hexagon corner in the order
/// `(s, r, r', t, l', l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeType(pub u16);

impl NodeType {
    pub fn role(self, p: Port) -> u8 {
        ((self.0 >> (2 * p as u16)) & 3) as u8
    }

    /// Build from explicit pairs and the pole membership of `S`.
    pub fn from_parts(pairs: &[(Port, Port)], s_in: bool, t_in: bool) -> Result<NodeType> {
        let mut partner: [Option<Port>; 6] = [None; 6];
        for &(a, b) in pairs {
            if a == b || partner[a as usize].is_some() || partner[b as usize].is_some() {
                return Err(Error::Contract("not a matching".into()));
            }
            partner[a as usize] = Some(b);
            partner[b as usize] = Some(a);
        }
        if (s_in && partner[0].is_some()) || (t_in && partner[3].is_some()) {
            return Err(Error::Contract("pole both in S and matched".into()));
        }
        let mut code = 0u16;
        for p in PORTS {
            let role = match partner[p as usize] {
                Some(q) if (q as u8) > (p as u8) => OPEN,
                Some(_) => CLOSE,
                None if (p == Port::S && s_in) || (p == Port::T && t_in) => INNER,
                None => UNUSED,
            };
            code |= (role as u16) << (2 * p as u16);
        }
        let t = NodeType(code);
        if !t.is_valid() {
            return Err(Error::Contract("not a valid node type".into()));
        }
        let mut want: Vec<(Port, Port)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        want.sort_unstable();
        if t.pairs() != want {
            return Err(Error::Contract("matching is crossing".into()));
        }
        Ok(t)
    }

    /// Structural validity: balanced roles, `S` only at poles, and
    /// `ψ(L) ∈ {∅, {l}, {l, l'}}`, likewise for `R`.
    pub fn is_valid(self) -> bool {
        if self.0 >> 12 != 0 {
            return false;
        }
        let mut bal = 0i32;
        for p in PORTS {
            match self.role(p) {
                INNER if !p.is_pole() => return false,
                OPEN => bal += 1,
                CLOSE => {
                    bal -= 1;
                    if bal < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        bal == 0 && (self.role(Port::R2) == UNUSED || self.role(Port::R) != UNUSED) && (self.role(Port::L2) == UNUSED || self.role(Port::L) != UNUSED)
    }

    pub fn pairs(self) -> Vec<(Port, Port)> {
        let mut stack = Vec::new();
        let mut out = Vec::new();
        for p in PORTS {
            match self.role(p) {
                OPEN => stack.push(p),
                CLOSE => {
                    if let Some(q) = stack.pop() {
                        out.push((q.min(p), q.max(p)));
                    }
                }
                _ => {}
            }
        }
        out.sort_unstable();
        out
    }

    pub fn partner(self, p: Port) -> Option<Port> {
        self.pairs().into_iter().find_map(|(a, b)| if a == p { Some(b) } else if b == p { Some(a) } else { None })
    }

    pub fn uses(self, p: Port) -> bool {
        self.role(p) != UNUSED
    }

    pub fn left(self) -> u8 {
        self.uses(Port::L) as u8 + self.uses(Port::L2) as u8
    }

    pub fn right(self) -> u8 {
        self.uses(Port::R) as u8 + self.uses(Port::R2) as u8
    }

    pub fn s_in(self) -> bool {
        self.role(Port::S) == INNER
    }

    pub fn t_in(self) -> bool {
        self.role(Port::T) == INNER
    }

    /// Number of cycle edges at `s` contributed by this type.
    pub fn count_s(self) -> u8 {
        match self.role(Port::S) {
            INNER => 2,
            UNUSED => 0,
            _ => 1,
        }
    }

    pub fn count_t(self) -> u8 {
        match self.role(Port::T) {
            INNER => 2,
            UNUSED => 0,
            _ => 1,
        }
    }

    pub fn mirror(self) -> NodeType {
        let pairs: Vec<(Port, Port)> = self.pairs().into_iter().map(|(a, b)| (a.mirror(), b.mirror())).collect();
        NodeType::from_parts(&pairs, self.s_in(), self.t_in()).expect("mirror of a valid type is valid")
    }

    pub fn full() -> NodeType {
        NodeType::from_parts(&[], true, true).expect("valid")
    }

    pub fn is_full(self) -> bool {
        self == NodeType::full()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_clean(self) -> bool {
        self.count_s() + self.count_t() == 0
    }

    /// `Some(x)` for an x-good type.
    pub fn good_level(self) -> Option<u8> {
        if !self.is_clean() {
            return None;
        }
        let p = self.pairs();
        if p.is_empty() {
            Some(0)
        } else if p == [(Port::R, Port::L)] {
            Some(1)
        } else if p == [(Port::R, Port::L), (Port::R2, Port::L2)] {
            Some(2)
        } else {
            None
        }
    }

    pub fn good(x: u8) -> NodeType {
        match x {
            0 => NodeType(0),
            1 => NodeType::from_parts(&[(Port::L, Port::R)], false, false).expect("valid"),
            _ => NodeType::from_parts(&[(Port::L, Port::R), (Port::L2, Port::R2)], false, false).expect("valid"),
        }
    }

    /// All structurally valid node types.
    pub fn all() -> Vec<NodeType> {
        (0u16..4096).map(NodeType).filter(|t| t.is_valid()).collect()
    }
}

impl std::fmt::Display for NodeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = |p: Port| match p {
            Port::S => "s",
            Port::T => "t",
            Port::L => "l",
            Port::L2 => "l'",
            Port::R => "r",
            Port::R2 => "r'",
        };
        let m: Vec<String> = self.pairs().into_iter().map(|(a, b)| format!("{{{},{}}}", name(a), name(b))).collect();
        let mut s = Vec::new();
        if self.s_in() {
            s.push("s");
        }
        if self.t_in() {
            s.push("t");
        }
        write!(f, "(psi{}{}, {{{}}}, {{{}}})", self.left(), self.right(), m.join(","), s.join(","))
    }
}

/// Type counts by crossing pattern, for reports.
pub fn count_by_psi(types: &[NodeType]) -> BTreeMap<(u8, u8), usize> {
    let mut m = BTreeMap::new();
    for t in types {
        *m.entry((t.left(), t.right())).or_insert(0) += 1;
    }
    m
}
