//! Rigid and series nodes: dynamic programming over a sphere-cut
//! decomposition of the skeleton, from child tables at the leaves to the
//! node's own table at the reference noose.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::spherecut::{decompose_skeleton, xor_plan, CutKind, Operand, SphereCut, Subcurve, WeakNoose, XorPlan};
use crate::spqr::{EdgeTag, SpqrTree};
use crate::types::{triangle_codes, Code, Joiner, Scratch, NodeType, NooseType, Point, Port};

use super::recipe::{Recipe, Tok};
use super::{DpStats, Table};

type NooseTable = HashMap<Code, Rc<Recipe>>;

/// The two subcurves of a noose around one skeleton edge, in order, and
/// its ends `a < b`.
fn edge_noose(o: &WeakNoose) -> Result<(Subcurve, Subcurve, VertexId, VertexId)> {
    let cs = o.subcurves();
    if cs.len() != 2 || (cs[0].u, cs[0].v) != (cs[1].u, cs[1].v) {
        return Err(Error::Integrity("edge noose is not a pair of parallel subcurves".into()));
    }
    Ok((cs[0], cs[1], cs[0].u, cs[0].v))
}

/// Port-to-point correspondence on an edge noose, `side` choosing which
/// subcurve carries the left corners.
fn port_points(o: &WeakNoose, side: bool) -> Result<Vec<(Port, Point)>> {
    let (c0, c1, a, b) = edge_noose(o)?;
    let (lc, rc) = if side { (c1, c0) } else { (c0, c1) };
    Ok(vec![
        (Port::S, Point::V(a)),
        (Port::T, Point::V(b)),
        (Port::L, Point::X(lc, 0)),
        (Port::L2, Point::X(lc, 1)),
        (Port::R, Point::X(rc, 0)),
        (Port::R2, Point::X(rc, 1)),
    ])
}

/// Noose type of a child node type on the noose of its skeleton edge.
fn leaf_code(o: &WeakNoose, x: NodeType) -> Result<Code> {
    let (c0, c1, a, b) = edge_noose(o)?;
    let map: HashMap<Port, Point> = port_points(o, false)?.into_iter().collect();
    let pairs = x.pairs().into_iter().map(|(p, q)| (map[&p], map[&q])).collect();
    let mut s = Vec::new();
    if x.s_in() {
        s.push(a);
    }
    if x.t_in() {
        s.push(b);
    }
    NooseType::new(vec![(c0, x.left()), (c1, x.right())], pairs, s).encode(o)
}

/// Node types read off a reference-noose type, one per boundary bijection.
fn root_types(o: &WeakNoose, x: &NooseType) -> Result<Vec<(NodeType, bool)>> {
    let (_, _, a, b) = edge_noose(o)?;
    let mut out = Vec::new();
    for side in [false, true] {
        let map: HashMap<Point, Port> = port_points(o, side)?.into_iter().map(|(p, q)| (q, p)).collect();
        let pairs: Vec<(Port, Port)> = x.matching.iter().map(|(p, q)| (map[p], map[q])).collect();
        let y = NodeType::from_parts(&pairs, x.s.contains(&a), x.s.contains(&b))?;
        out.push((y, side));
    }
    Ok(out)
}

fn tok_map(o: &WeakNoose, side: bool, to_ports: bool) -> Result<Vec<(Tok, Tok)>> {
    let mut out = Vec::new();
    for (p, pt) in port_points(o, side)? {
        if let Point::X(c, i) = pt {
            let (port, cross) = (Tok::Port(p), Tok::Cross(c, i));
            out.push(if to_ports { (cross, port) } else { (port, cross) });
        }
    }
    Ok(out)
}

/// All combinations of two noose tables, keeping the first derivation of
/// every resulting code.
fn join(j: &Joiner, left: &NooseTable, right: &NooseTable) -> NooseTable {
    let mut index: HashMap<u128, Vec<_>> = HashMap::new();
    for (&c, r) in right {
        if let Some(d) = j.decode(1, c) {
            index.entry(j.key(&d)).or_default().push((d, r));
        }
    }
    let mut keys: Vec<&Code> = left.keys().collect();
    keys.sort_unstable();
    let mut out = NooseTable::new();
    let mut scratch = Scratch::default();
    for c in keys {
        let Some(d1) = j.decode(0, *c) else { continue };
        for key in j.partner_keys(&d1) {
            let Some(list) = index.get(&key) else { continue };
            for (d2, r2) in list {
                if let Some(x) = j.combine_in(&d1, d2, &mut scratch) {
                    out.entry(x).or_insert_with(|| Rc::new(Recipe::Join(left[c].clone(), (*r2).clone())));
                }
            }
        }
    }
    out
}

type Operands<'a> = (&'a WeakNoose, &'a NooseTable);

#[allow(clippy::too_many_arguments)]
fn operand<'a>(
    op: Operand,
    (l, r): (usize, usize),
    sc: &'a SphereCut,
    arc: &'a [Option<NooseTable>],
    tri: &'a [(Rc<WeakNoose>, NooseTable)],
    plan: &'a XorPlan,
    steps: &'a [NooseTable],
) -> Operands<'a> {
    match op {
        Operand::Left => (&sc.nodes[l].noose, arc[l].as_ref().expect("children come first in post order")),
        Operand::Right => (&sc.nodes[r].noose, arc[r].as_ref().expect("children come first in post order")),
        Operand::Triangle(k) => (&tri[k].0, &tri[k].1),
        Operand::Step(k) => (&plan.steps[k].result, &steps[k]),
    }
}

/// Types of the R- or S-node `b` of `tree` from its children's tables.
pub fn rs_node_types(tree: &SpqrTree, b: usize, tables: &[Option<Table>], width_cap: Option<usize>, stats: &mut DpStats) -> Result<Table> {
    let node = &tree.nodes[b];
    let sk = node.skeleton_graph();
    let reference = node.ref_index().ok_or_else(|| Error::Contract("node without reference edge".into()))?;
    let t0 = std::time::Instant::now();
    let sc = decompose_skeleton(&sk, reference)?;
    stats.spherecut_ms += t0.elapsed().as_secs_f64() * 1e3;
    let width = sc.width();
    stats.max_width = stats.max_width.max(width);
    if let Some(cap) = width_cap {
        if width > cap {
            return Err(Error::WidthExceeded { width, cap });
        }
    }
    let t1 = std::time::Instant::now();
    let out = run(tree, b, &sc, tables, stats);
    stats.dp_ms += t1.elapsed().as_secs_f64() * 1e3;
    out
}

fn run(tree: &SpqrTree, b: usize, sc: &SphereCut, tables: &[Option<Table>], stats: &mut DpStats) -> Result<Table> {
    let node = &tree.nodes[b];
    let vertices: Rc<Vec<VertexId>> = Rc::new(node.vertices.clone());
    let mut arc: Vec<Option<NooseTable>> = vec![None; sc.nodes.len()];
    let triangle = triangle_codes();
    for i in sc.post_order() {
        let cut = &sc.nodes[i];
        let table = match cut.kind {
            CutKind::Leaf(e) => {
                let EdgeTag::Child(c) = node.edges[e].tag else {
                    return Err(Error::Integrity("skeleton edge without a child".into()));
                };
                let child = tables[c].as_ref().ok_or_else(|| Error::Contract(format!("missing table of node {c}")))?;
                let map = tok_map(&cut.noose, false, false)?;
                let mut t = NooseTable::new();
                for (&x, r) in child {
                    t.insert(leaf_code(&cut.noose, x)?, Rc::new(Recipe::Rename { inner: r.clone(), map: map.clone() }));
                }
                t
            }
            CutKind::Inner(l, r) => {
                let plan = xor_plan(sc, i)?;
                stats.plans += 1;
                stats.max_plan_steps = stats.max_plan_steps.max(plan.steps.len());
                stats.max_plan_triangles = stats.max_plan_triangles.max(plan.triangles.len());
                if plan.result() != Some(&cut.noose) {
                    stats.plan_replay_failures += 1;
                    return Err(Error::Integrity(format!("xor plan of cut node {i} does not replay to its noose")));
                }
                let tri: Vec<(Rc<WeakNoose>, NooseTable)> = plan
                    .triangles
                    .iter()
                    .map(|t| {
                        let noose = Rc::new(t.clone());
                        let table = triangle.iter().map(|&c| (c, Rc::new(Recipe::Disk { noose: noose.clone(), code: c, vertices: vertices.clone() }))).collect();
                        (noose, table)
                    })
                    .collect();
                let mut steps: Vec<NooseTable> = Vec::with_capacity(plan.steps.len());
                for step in &plan.steps {
                    let joined = {
                        let (oa, ta) = operand(step.a, (l, r), sc, &arc, &tri, &plan, &steps);
                        let (ob, tb) = operand(step.b, (l, r), sc, &arc, &tri, &plan, &steps);
                        let j = Joiner::new(oa, ob).ok_or_else(|| Error::Integrity("plan step is not a weak noose".into()))?;
                        if j.result_noose() != &step.result {
                            stats.plan_replay_failures += 1;
                            return Err(Error::Integrity(format!("xor plan of cut node {i} does not replay")));
                        }
                        join(&j, ta, tb)
                    };
                    stats.max_noose_table = stats.max_noose_table.max(joined.len());
                    steps.push(joined);
                }
                steps.pop().expect("plans have at least one step")
            }
        };
        stats.max_noose_table = stats.max_noose_table.max(table.len());
        arc[i] = Some(table);
    }
    let root = arc[sc.root].take().ok_or_else(|| Error::Integrity("root noose without table".into()))?;
    let o = sc.root_noose();
    let mut codes: Vec<&Code> = root.keys().collect();
    codes.sort_unstable();
    let mut out = Table::new();
    for c in codes {
        let x = NooseType::decode(o, *c)?;
        for (y, side) in root_types(o, &x)? {
            if !y.is_valid() {
                continue;
            }
            out.entry(y).or_insert_with(|| Rc::new(Recipe::Rename { inner: root[c].clone(), map: tok_map(o, side, true).expect("edge noose") }));
        }
    }
    Ok(out)
}
