mod common;

use proptest::prelude::*;

use twopage::gen;
use twopage::graph::{blocks, feedback_edge_number, feedback_edge_set, is_biconnected, MultiGraph};
use twopage::kernel::{kernelize_two_page, replay};
use twopage::oracle::{brute_force_subham, verify_witness, HamiltonianWitness};
use twopage::planarity::{planar_embedding, CombinatorialEmbedding};
use twopage::spqr::build_spqr;

/// Simple graph on `n` vertices from a bit mask over vertex pairs.
fn from_mask(n: usize, mask: u64, limit: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n);
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> bit & 1 == 1 && g.m() < limit {
                g.add_edge(a, b).unwrap();
            }
            bit += 1;
        }
    }
    g
}

/// Faces of the rotation system given by per-vertex dart orders.
fn face_count(g: &MultiGraph, rot: &[Vec<usize>]) -> usize {
    // Dart 2e leaves the first endpoint of e, 2e + 1 the second.
    let tail = |d: usize| if d % 2 == 0 { g.endpoints(d / 2).0 } else { g.endpoints(d / 2).1 };
    let mut seen = vec![false; 2 * g.m()];
    let mut faces = 0;
    for d0 in 0..2 * g.m() {
        if seen[d0] {
            continue;
        }
        faces += 1;
        let mut d = d0;
        while !seen[d] {
            seen[d] = true;
            let back = d ^ 1;
            let v = tail(back);
            let at = rot[v].iter().position(|&x| x == back).unwrap();
            d = rot[v][(at + 1) % rot[v].len()];
        }
    }
    faces
}

/// Planarity by trying every rotation system against Euler's formula.
fn planar_by_rotations(g: &MultiGraph) -> bool {
    let darts: Vec<Vec<usize>> = (0..g.n())
        .map(|v| g.incident(v).iter().map(|&e| if g.endpoints(e).0 == v { 2 * e } else { 2 * e + 1 }).collect())
        .collect();
    let comps: Vec<Vec<usize>> = g.components().into_iter().filter(|c| c.len() > 1).collect();
    let nv: usize = comps.iter().map(|c| c.len()).sum();
    let target = 2 * comps.len() + g.m() - nv;
    let mut rot = darts.clone();
    fn search(v: usize, g: &MultiGraph, darts: &[Vec<usize>], rot: &mut Vec<Vec<usize>>, target: usize) -> bool {
        if v == darts.len() {
            return face_count(g, rot) == target;
        }
        let d = &darts[v];
        if d.len() <= 2 {
            rot[v] = d.clone();
            return search(v + 1, g, darts, rot, target);
        }
        let mut rest: Vec<usize> = d[1..].to_vec();
        let mut found = false;
        permute(&mut rest, 0, &mut |p| {
            if found {
                return;
            }
            let mut r = vec![d[0]];
            r.extend_from_slice(p);
            rot[v] = r;
            found = search(v + 1, g, darts, &mut rot.clone(), target);
        });
        found
    }
    search(0, g, &darts, &mut rot, target)
}

fn permute(v: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

fn euler_holds(g: &MultiGraph, emb: &CombinatorialEmbedding) -> bool {
    let comps = g.components();
    let c = comps.iter().filter(|c| c.len() > 1).count();
    let nv: usize = comps.iter().filter(|c| c.len() > 1).map(|c| c.len()).sum();
    nv + emb.face_count() == g.m() + 2 * c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn planarity_matches_rotation_search(n in 2usize..=6, mask in any::<u64>()) {
        let g = from_mask(n, mask, 11);
        let emb = planar_embedding(&g);
        prop_assert_eq!(emb.is_some(), planar_by_rotations(&g));
        if let Some(emb) = emb {
            prop_assert!(euler_holds(&g, &emb));
            let mut sides = vec![0; g.m()];
            for f in 0..emb.face_count() {
                for &d in emb.face_darts(f) {
                    sides[d / 2] += 1;
                }
            }
            prop_assert!(sides.iter().all(|&s| s == 2));
        }
    }

    #[test]
    fn feedback_set_and_blocks(n in 1usize..=10, m in 0usize..=16, seed in any::<u64>()) {
        let g = gen::random_multigraph(n, m, seed);
        let c = g.components().len();
        prop_assert_eq!(feedback_edge_set(&g).len(), g.m() + c - g.n());
        if g.is_connected() {
            let dec = blocks(&g).unwrap();
            let mut seen = vec![0; g.m()];
            for b in &dec.blocks {
                for &e in &b.edges {
                    seen[e] += 1;
                }
                if b.graph.n() >= 3 {
                    prop_assert!(is_biconnected(&b.graph));
                }
            }
            prop_assert!(seen.iter().all(|&k| k == 1));
        }
    }

    #[test]
    fn spqr_is_independent_of_the_reference_edge(n in 4usize..=12, seed in 0u64..10_000) {
        let g = gen::planar_deg4(n, seed).unwrap();
        for b in blocks(&g).unwrap().blocks {
            if b.graph.m() < 3 || b.graph.m() == b.graph.n() {
                continue;
            }
            let first = build_spqr(&b.graph, 0).unwrap();
            first.check().unwrap();
            let canon = first.unrooted_canonical();
            for e in 1..b.graph.m() {
                let t = build_spqr(&b.graph, e).unwrap();
                t.check().unwrap();
                prop_assert_eq!(&t.unrooted_canonical(), &canon);
            }
        }
    }

    #[test]
    fn decompositions_are_laminar(n in 5usize..=40, seed in 0u64..10_000) {
        let g = gen::planar_deg4(n, seed).unwrap();
        for sc in common::skeleton_decompositions(&g) {
            sc.check().unwrap();
            prop_assert!(sc.is_laminar());
        }
    }

    #[test]
    fn two_page_kernel_replays(n in 5usize..=60, k in 0usize..=6, seed in any::<u64>()) {
        let g = gen::random_fen(n, k, seed).unwrap();
        let (kg, trace) = kernelize_two_page(&g).unwrap();
        let again = replay(&g, &trace).unwrap();
        prop_assert_eq!(again.edges(), kg.edges());
        let (kg2, trace2) = kernelize_two_page(&g).unwrap();
        prop_assert_eq!(kg2.edges(), kg.edges());
        prop_assert_eq!(trace2.to_json(), trace.to_json());
        let bk = &trace.bookkeeping;
        prop_assert_eq!(bk.fen, feedback_edge_number(&g));
        prop_assert!(bk.proper_paths.len() <= bk.anchors.len());
        prop_assert!(bk.anchors.len() <= 4 * bk.fen);
    }

    #[test]
    fn adding_edges_never_helps(n in 3usize..=8, seed in any::<u64>()) {
        let full = gen::random_multigraph(n, 14, seed);
        let mut g = MultiGraph::new(n);
        let mut was_yes = true;
        for &(a, b) in full.edges() {
            g.add_edge(a, b).unwrap();
            let w = brute_force_subham(&g, 11).unwrap();
            if let Some(cycle) = &w {
                let h = HamiltonianWitness { cycle: cycle.clone() };
                prop_assert!(verify_witness(&g, &h));
            }
            prop_assert!(was_yes || w.is_none());
            was_yes = w.is_some();
        }
    }
}

#[test]
fn rotation_search_separates_kuratowski_graphs() {
    assert!(!planar_by_rotations(&gen::complete(5)));
    assert!(!planar_by_rotations(&gen::complete_bipartite(3, 3)));
    assert!(planar_by_rotations(&gen::complete(4)));
    assert!(planar_by_rotations(&gen::wheel(5)));
}
