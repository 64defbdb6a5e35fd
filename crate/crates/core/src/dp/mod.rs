//! The decision procedure: type tables bottom-up over the SPQR-tree of
//! every block, the root decision, and witness reconstruction.

pub mod embed;
pub mod pnode;
pub mod qnode;
pub mod recipe;
pub mod rsnode;
pub mod shortcut;

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{blocks, MultiGraph, VertexId};
use crate::oracle::HamiltonianWitness;
use crate::planarity::{is_planar, planar_with_cycle};
use crate::spqr::{build_spqr, NodeKind, SpqrTree};
use crate::types::NodeType;

pub use embed::witness_to_embedding;
pub use pnode::{p_node_types, saturating_matching};
pub use qnode::{q_node_types, q_node_types_exhaustive};
pub use recipe::{PathSystem, Recipe, Tok};

/// Type table of one SPQR node with a derivation per entry.
pub type Table = BTreeMap<NodeType, Rc<Recipe>>;

#[derive(Clone, Debug)]
pub struct DpOptions {
    /// Refuse skeleton decompositions wider than this.
    pub width_cap: Option<usize>,
    /// Table entries per node whose path systems are checked against the
    /// pertinent graph.
    pub audit_per_node: usize,
    /// Pertinent graphs larger than this are not audited.
    pub audit_max_vertices: usize,
    pub witness: bool,
    /// Try the verified cycle search on each block before the exact
    /// procedure. Only YES answers can come from it.
    pub certificate_first: bool,
}

impl DpOptions {
    /// Exact procedure only, with every block decided by the tables.
    pub fn exact() -> Self {
        DpOptions { certificate_first: false, ..DpOptions::default() }
    }
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { width_cap: None, audit_per_node: 0, audit_max_vertices: 60, witness: true, certificate_first: true }
    }
}

/// Counters collected while deciding.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DpStats {
    pub blocks: usize,
    pub trivial_blocks: usize,
    /// Blocks answered YES by the verified cycle search.
    pub certified_blocks: usize,
    pub spqr_nodes: usize,
    pub p_nodes: usize,
    pub rs_nodes: usize,
    pub max_width: usize,
    pub max_node_table: usize,
    pub max_noose_table: usize,
    pub max_bad_sequence: usize,
    pub bad_sequences: usize,
    pub plans: usize,
    pub max_plan_steps: usize,
    pub max_plan_triangles: usize,
    pub plan_replay_failures: usize,
    pub mirror_violations: usize,
    pub audits: usize,
    pub audit_failures: usize,
    pub blocks_ms: f64,
    pub spqr_ms: f64,
    pub spherecut_ms: f64,
    pub dp_ms: f64,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub subhamiltonian: bool,
    pub witness: Option<HamiltonianWitness>,
    pub stats: DpStats,
}

pub fn decide_subham(g: &MultiGraph) -> Result<Decision> {
    decide_subham_with(g, &DpOptions::default())
}

/// Decide whether `g` admits a two-page book embedding; on YES the
/// witness is a Hamiltonian cycle `H` with `g ∪ H` planar.
pub fn decide_subham_with(g: &MultiGraph, opts: &DpOptions) -> Result<Decision> {
    let mut stats = DpStats::default();
    if !is_planar(g) {
        return Ok(Decision { subhamiltonian: false, witness: None, stats });
    }
    let mut cycle: Vec<VertexId> = Vec::with_capacity(g.n());
    for comp in g.components() {
        let (sub, _) = g.induced(&comp);
        match component_cycle(&sub, opts, &mut stats)? {
            Some(c) => cycle.extend(c.into_iter().map(|v| comp[v])),
            None => return Ok(Decision { subhamiltonian: false, witness: None, stats }),
        }
    }
    let witness = if opts.witness {
        if !planar_with_cycle(g, &cycle)? {
            return Err(Error::Integrity("reconstructed cycle is not a witness".into()));
        }
        Some(HamiltonianWitness { cycle })
    } else {
        None
    };
    Ok(Decision { subhamiltonian: true, witness, stats })
}

/// Witness cycle of a connected planar graph, or `None` if there is none.
/// Without witness reconstruction the returned order is meaningless.
fn component_cycle(g: &MultiGraph, opts: &DpOptions, stats: &mut DpStats) -> Result<Option<Vec<VertexId>>> {
    if g.m() == 0 {
        return Ok(Some((0..g.n()).collect()));
    }
    let t0 = Instant::now();
    let dec = blocks(g)?;
    stats.blocks_ms += t0.elapsed().as_secs_f64() * 1e3;
    let mut cycles: Vec<Vec<VertexId>> = Vec::with_capacity(dec.blocks.len());
    for b in &dec.blocks {
        stats.blocks += 1;
        let Some(c) = block_cycle(&b.graph, opts, stats)? else { return Ok(None) };
        cycles.push(c.into_iter().map(|v| b.vertices[v]).collect());
    }
    Ok(Some(splice(g.n(), cycles)))
}

/// Merge block cycles at shared cut vertices.
fn splice(n: usize, cycles: Vec<Vec<VertexId>>) -> Vec<VertexId> {
    let mut placed = vec![false; n];
    let mut order: Vec<VertexId> = Vec::with_capacity(n);
    let mut pending: Vec<Vec<VertexId>> = cycles;
    let first = pending.remove(0);
    for &v in &first {
        placed[v] = true;
    }
    order.extend(first);
    while !pending.is_empty() {
        let k = pending.iter().position(|c| c.iter().any(|&v| placed[v])).expect("block tree is connected");
        let c = pending.remove(k);
        let at = c.iter().position(|&v| placed[v]).expect("shared cut vertex");
        let cut = c[at];
        let rest: Vec<VertexId> = (1..c.len()).map(|i| c[(at + i) % c.len()]).collect();
        let pos = order.iter().position(|&v| v == cut).expect("cut vertex is placed");
        for &v in &rest {
            placed[v] = true;
        }
        order.splice(pos + 1..pos + 1, rest);
    }
    order
}

/// Witness cycle of a biconnected block (a single edge counts).
fn block_cycle(b: &MultiGraph, opts: &DpOptions, stats: &mut DpStats) -> Result<Option<Vec<VertexId>>> {
    if b.m() == 1 || b.m() == b.n() {
        stats.trivial_blocks += 1;
        return Ok(Some(trivial_cycle(b)));
    }
    if opts.certificate_first {
        if let Some(c) = shortcut::verified_cycle(b, 0, shortcut::ShortcutBudget::default()) {
            stats.certified_blocks += 1;
            return Ok(Some(c));
        }
    }
    let t0 = Instant::now();
    let tree = build_spqr(b, 0)?;
    stats.spqr_ms += t0.elapsed().as_secs_f64() * 1e3;
    let tables = tables(b, &tree, opts, stats)?;
    let root = &tables[tree.root_child()].as_ref().expect("root child table");
    let Some(recipe) = root.get(&NodeType::full()) else { return Ok(None) };
    if !opts.witness {
        return Ok(Some((0..b.n()).collect()));
    }
    let ps = recipe.materialize()?;
    let cycle = ps.cycle.ok_or_else(|| Error::Integrity("full type without a closed cycle".into()))?;
    Ok(Some(cycle))
}

/// Vertex order of a block that is a single edge or a cycle.
fn trivial_cycle(b: &MultiGraph) -> Vec<VertexId> {
    let mut order = vec![0];
    let mut prev_edge = usize::MAX;
    while order.len() < b.n() {
        let v = *order.last().expect("nonempty");
        let &e = b.incident(v).iter().find(|&&e| e != prev_edge && !order.contains(&b.other(e, v))).expect("cycle continues");
        order.push(b.other(e, v));
        prev_edge = e;
    }
    order
}

/// Tables of every non-root node of `tree`, children first.
pub fn tables(b: &MultiGraph, tree: &SpqrTree, opts: &DpOptions, stats: &mut DpStats) -> Result<Vec<Option<Table>>> {
    let q = qnode::q_node_table();
    let mut tables: Vec<Option<Table>> = vec![None; tree.nodes.len()];
    stats.spqr_nodes += tree.nodes.len();
    for i in (0..tree.nodes.len()).rev() {
        if i == tree.root {
            continue;
        }
        let node = &tree.nodes[i];
        let table = match node.kind {
            NodeKind::Q => {
                let (s, t) = node.poles;
                let map = |tok: &Tok| match *tok {
                    Tok::Real(0) => Tok::Real(s),
                    Tok::Real(_) => Tok::Real(t),
                    other => other,
                };
                q.iter()
                    .map(|(x, ps)| {
                        let paths = ps.paths.iter().map(|p| p.iter().map(map).collect()).collect();
                        let cycle = ps.cycle.as_ref().map(|c| c.iter().map(|&v| if v == 0 { s } else { t }).collect());
                        (*x, Rc::new(Recipe::Paths(PathSystem { paths, cycle })))
                    })
                    .collect()
            }
            NodeKind::P => {
                stats.p_nodes += 1;
                let t0 = Instant::now();
                let children: Vec<&Table> = node.children.iter().map(|&c| tables[c].as_ref().ok_or_else(|| Error::Contract(format!("missing table of node {c}")))).collect::<Result<_>>()?;
                let out = p_node_types(&children)?;
                stats.dp_ms += t0.elapsed().as_secs_f64() * 1e3;
                stats.max_bad_sequence = stats.max_bad_sequence.max(out.max_bad);
                stats.bad_sequences += out.sequences;
                out.table
            }
            NodeKind::S | NodeKind::R => {
                stats.rs_nodes += 1;
                rsnode::rs_node_types(tree, i, &tables, opts.width_cap, stats)?
            }
        };
        stats.max_node_table = stats.max_node_table.max(table.len());
        stats.mirror_violations += table.keys().filter(|x| !table.contains_key(&x.mirror())).count();
        if opts.audit_per_node > 0 {
            audit(b, tree, i, &table, opts, stats)?;
        }
        tables[i] = Some(table);
    }
    Ok(tables)
}

/// Check a deterministic sample of entries against the pertinent graph.
fn audit(b: &MultiGraph, tree: &SpqrTree, i: usize, table: &Table, opts: &DpOptions, stats: &mut DpStats) -> Result<()> {
    let (pe, vmap) = tree.pertinent_graph(b, i)?;
    if pe.n() > opts.audit_max_vertices {
        return Ok(());
    }
    let local: HashMap<VertexId, VertexId> = vmap.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let (s, t) = tree.nodes[i].poles;
    let (s, t) = (local[&s], local[&t]);
    let n = table.len();
    let picks: Vec<usize> = if n <= opts.audit_per_node { (0..n).collect() } else { (0..opts.audit_per_node).map(|k| k * n / opts.audit_per_node).collect() };
    for (k, (x, r)) in table.iter().enumerate() {
        if picks.binary_search(&k).is_err() {
            continue;
        }
        stats.audits += 1;
        let ps = r.materialize()?;
        if !qnode::audit_paths(&pe, &vmap, s, t, *x, &ps) {
            stats.audit_failures += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle::{brute_force_subham, verify_embedding, verify_witness};

    fn check(g: &MultiGraph, expect: bool) {
        let opts = DpOptions { audit_per_node: 4, ..DpOptions::exact() };
        let d = decide_subham_with(g, &opts).unwrap();
        assert_eq!(d.subhamiltonian, expect);
        assert_eq!(d.stats.audit_failures, 0);
        assert_eq!(d.stats.mirror_violations, 0);
        if expect {
            let w = d.witness.unwrap();
            assert!(verify_witness(g, &w));
            let emb = witness_to_embedding(g, &w).unwrap();
            assert!(verify_embedding(g, &emb, 2));
        }
    }

    #[test]
    fn small_named_graphs() {
        check(&gen::cycle(5), true);
        check(&gen::bundle(3), true);
        check(&gen::complete(4), true);
        check(&gen::complete(5), false);
        check(&gen::wheel(6), true);
        check(&gen::complete_bipartite(2, 4), true);
        check(&gen::mixed_spqr_example(), true);
    }

    #[test]
    fn goldner_harary_is_not_subhamiltonian() {
        check(&gen::goldner_harary(), false);
    }

    #[test]
    fn drawn_example_is_subhamiltonian() {
        check(&gen::drawn_example().graph, true);
    }

    #[test]
    fn theta_witness_is_the_two_cycle() {
        let d = decide_subham_with(&gen::bundle(3), &DpOptions::exact()).unwrap();
        let mut c = d.witness.unwrap().cycle;
        c.sort_unstable();
        assert_eq!(c, vec![0, 1]);
    }

    #[test]
    fn cycle_block_is_trivial() {
        let d = decide_subham(&gen::cycle(6)).unwrap();
        assert_eq!(d.stats.trivial_blocks, 1);
        assert_eq!(d.witness.unwrap().cycle, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn agrees_with_oracle_on_six_vertices() {
        for g in gen::connected_graphs(6) {
            let want = brute_force_subham(&g, 11).unwrap().is_some();
            check(&g, want);
        }
    }
}
