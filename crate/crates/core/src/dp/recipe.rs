//! Lazy path systems attached to table entries. A recipe records how an
//! entry was derived; materializing it glues the path fragments of its
//! sources and smooths away crossing points and interface corners.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::spherecut::{Subcurve, WeakNoose};
use crate::types::{disk_paths, Code, DiskRealization, NooseType, Point, Port};

/// Endpoint or inner token of a path fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tok {
    /// A vertex of the block being decided.
    Real(VertexId),
    /// A non-pole corner of the hexagon around an SPQR node.
    Port(Port),
    /// Crossing point `i` of a subcurve of the current skeleton.
    Cross(Subcurve, u8),
    /// Interface between consecutive children of a parallel node.
    Slot(u32, Port),
}

impl Tok {
    pub fn is_real(&self) -> bool {
        matches!(self, Tok::Real(_))
    }
}

/// Paths between boundary tokens, or one closed cycle of real vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathSystem {
    pub paths: Vec<Vec<Tok>>,
    pub cycle: Option<Vec<VertexId>>,
}

impl PathSystem {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty() && self.cycle.is_none()
    }

    fn renamed(mut self, map: &HashMap<Tok, Tok>) -> Self {
        for p in &mut self.paths {
            for t in p.iter_mut() {
                if let Some(&u) = map.get(t) {
                    *t = u;
                }
            }
        }
        self
    }
}

#[derive(Debug)]
pub enum Recipe {
    Paths(PathSystem),
    Rename { inner: Rc<Recipe>, map: Vec<(Tok, Tok)> },
    Join(Rc<Recipe>, Rc<Recipe>),
    /// Children of a parallel node from left to right.
    Chain(Vec<Rc<Recipe>>),
    /// Curves inside an edge-less triangle; `vertices` maps skeleton ids
    /// to block ids.
    Disk { noose: Rc<WeakNoose>, code: Code, vertices: Rc<Vec<VertexId>> },
}

impl Recipe {
    pub fn materialize(&self) -> Result<PathSystem> {
        match self {
            Recipe::Paths(p) => Ok(p.clone()),
            Recipe::Rename { inner, map } => {
                let map: HashMap<Tok, Tok> = map.iter().copied().collect();
                Ok(inner.materialize()?.renamed(&map))
            }
            Recipe::Join(a, b) => {
                let a = a.materialize()?;
                let b = b.materialize()?;
                merge(vec![a, b])
            }
            Recipe::Chain(parts) => {
                let k = parts.len() as u32;
                let mut systems = Vec::with_capacity(parts.len());
                for (i, part) in parts.iter().enumerate() {
                    let i = i as u32;
                    let map: HashMap<Tok, Tok> = [
                        (Tok::Port(Port::L), Tok::Slot(i, Port::L)),
                        (Tok::Port(Port::L2), Tok::Slot(i, Port::L2)),
                        (Tok::Port(Port::R), Tok::Slot(i + 1, Port::L)),
                        (Tok::Port(Port::R2), Tok::Slot(i + 1, Port::L2)),
                    ]
                    .into_iter()
                    .collect();
                    systems.push(part.materialize()?.renamed(&map));
                }
                let glued = merge(systems)?;
                let map: HashMap<Tok, Tok> = [
                    (Tok::Slot(0, Port::L), Tok::Port(Port::L)),
                    (Tok::Slot(0, Port::L2), Tok::Port(Port::L2)),
                    (Tok::Slot(k, Port::L), Tok::Port(Port::R)),
                    (Tok::Slot(k, Port::L2), Tok::Port(Port::R2)),
                ]
                .into_iter()
                .collect();
                Ok(glued.renamed(&map))
            }
            Recipe::Disk { noose, code, vertices } => {
                let x = NooseType::decode(noose, *code)?;
                let tok = |p: &Point| match *p {
                    Point::V(v) => Tok::Real(vertices[v]),
                    Point::X(c, i) => Tok::Cross(c, i),
                };
                match disk_paths(noose, &x).ok_or_else(|| Error::Integrity("triangle type has no realization".into()))? {
                    DiskRealization::Paths(ps) => Ok(PathSystem { paths: ps.iter().map(|p| p.iter().map(tok).collect()).collect(), cycle: None }),
                    DiskRealization::Cycle(c) => Ok(PathSystem { paths: Vec::new(), cycle: Some(c.into_iter().map(|v| vertices[v]).collect()) }),
                }
            }
        }
    }
}

fn merge(systems: Vec<PathSystem>) -> Result<PathSystem> {
    let nonempty = systems.iter().filter(|s| !s.is_empty()).count();
    if let Some(pos) = systems.iter().position(|s| s.cycle.is_some()) {
        if nonempty > 1 {
            return Err(Error::Integrity("a closed cycle was combined with further paths".into()));
        }
        return Ok(systems.into_iter().nth(pos).expect("position is valid"));
    }
    glue(systems.into_iter().flat_map(|s| s.paths).collect())
}

/// Concatenate fragments at endpoints shared by exactly two fragment ends
/// and drop non-vertex tokens from the interiors.
pub fn glue(frags: Vec<Vec<Tok>>) -> Result<PathSystem> {
    let mut ends: HashMap<Tok, Vec<(usize, usize)>> = HashMap::new();
    for (i, f) in frags.iter().enumerate() {
        if f.len() < 2 {
            return Err(Error::Integrity("path fragment with fewer than two tokens".into()));
        }
        ends.entry(f[0]).or_default().push((i, 0));
        ends.entry(*f.last().expect("nonempty")).or_default().push((i, 1));
    }
    if let Some((t, _)) = ends.iter().find(|(_, v)| v.len() > 2) {
        return Err(Error::Integrity(format!("token {t:?} ends more than two fragments")));
    }
    let partner = |t: &Tok, me: (usize, usize)| ends[t].iter().copied().find(|&x| x != me);
    let mut used = vec![false; frags.len()];
    let oriented = |i: usize, from: usize| -> Vec<Tok> {
        if from == 0 {
            frags[i].clone()
        } else {
            frags[i].iter().rev().copied().collect()
        }
    };
    let walk = |start: (usize, usize), used: &mut Vec<bool>| -> (Vec<Tok>, bool) {
        let (mut i, mut from) = start;
        let mut seq = oriented(i, from);
        used[i] = true;
        loop {
            let last = *seq.last().expect("nonempty");
            let Some((j, side)) = partner(&last, (i, 1 - from)) else { return (seq, false) };
            if used[j] {
                return (seq, true);
            }
            used[j] = true;
            seq.extend(oriented(j, side).into_iter().skip(1));
            i = j;
            from = side;
        }
    };
    let mut paths = Vec::new();
    let mut cycles = Vec::new();
    for i in 0..frags.len() {
        for side in 0..2 {
            let t = if side == 0 { frags[i][0] } else { *frags[i].last().expect("nonempty") };
            if !used[i] && ends[&t].len() == 1 {
                let (seq, closed) = walk((i, side), &mut used);
                debug_assert!(!closed);
                paths.push(smooth(seq));
            }
        }
    }
    for i in 0..frags.len() {
        if !used[i] {
            let (mut seq, _) = walk((i, 0), &mut used);
            seq.pop();
            cycles.push(seq.into_iter().filter_map(|t| if let Tok::Real(v) = t { Some(v) } else { None }).collect::<Vec<_>>());
        }
    }
    match (cycles.len(), paths.is_empty()) {
        (0, _) => Ok(PathSystem { paths, cycle: None }),
        (1, true) => Ok(PathSystem { paths, cycle: cycles.pop() }),
        _ => Err(Error::Integrity("gluing produced a premature cycle".into())),
    }
}

fn smooth(seq: Vec<Tok>) -> Vec<Tok> {
    let n = seq.len();
    seq.into_iter().enumerate().filter(|(i, t)| *i == 0 || *i == n - 1 || t.is_real()).map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glue_joins_and_smooths() {
        let c = Subcurve::new(0, 1, 0);
        let frags = vec![
            vec![Tok::Port(Port::L), Tok::Real(3), Tok::Cross(c, 0)],
            vec![Tok::Real(5), Tok::Cross(c, 0)],
            vec![Tok::Port(Port::R), Tok::Real(7)],
        ];
        let ps = glue(frags).unwrap();
        assert_eq!(ps.cycle, None);
        assert_eq!(ps.paths.len(), 2);
        assert!(ps.paths.contains(&vec![Tok::Port(Port::L), Tok::Real(3), Tok::Real(5)]));
    }

    #[test]
    fn glue_closes_cycles() {
        let frags = vec![vec![Tok::Real(0), Tok::Real(1)], vec![Tok::Real(1), Tok::Real(2), Tok::Real(0)]];
        let ps = glue(frags).unwrap();
        assert!(ps.paths.is_empty());
        let mut c = ps.cycle.unwrap();
        c.sort_unstable();
        assert_eq!(c, vec![0, 1, 2]);
        let bad = vec![vec![Tok::Real(0), Tok::Real(1)], vec![Tok::Real(1), Tok::Real(0)], vec![Tok::Real(4), Tok::Port(Port::L)]];
        assert!(glue(bad).is_err());
    }

    #[test]
    fn chain_links_consecutive_children() {
        let child = |a: VertexId| Rc::new(Recipe::Paths(PathSystem { paths: vec![vec![Tok::Port(Port::L), Tok::Real(a), Tok::Port(Port::R)]], cycle: None }));
        let r = Recipe::Chain(vec![child(4), child(5), child(6)]);
        let ps = r.materialize().unwrap();
        assert_eq!(ps.paths, vec![vec![Tok::Port(Port::L), Tok::Real(4), Tok::Real(5), Tok::Real(6), Tok::Port(Port::R)]]);
    }
}
