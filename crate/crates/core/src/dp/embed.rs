//! From a witness cycle to a two-page book embedding.

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::oracle::{verify_embedding, BookEmbedding, HamiltonianWitness};
use crate::planarity::{check_permutation, dart, planar_embedding, with_cycle};

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Spine order: the cycle cut at its smallest vertex. Pages: the two
/// sides of the cycle in a planar drawing of the graph plus the cycle.
pub fn witness_to_embedding(g: &MultiGraph, h: &HamiltonianWitness) -> Result<BookEmbedding> {
    check_permutation(g.n(), &h.cycle)?;
    let n = g.n();
    let order: Vec<usize> = match h.cycle.iter().enumerate().min_by_key(|&(_, &v)| v) {
        Some((at, _)) => (0..n).map(|i| h.cycle[(at + i) % n]).collect(),
        None => Vec::new(),
    };
    let mut pages = vec![1u8; g.m()];
    if n >= 2 && g.m() > 0 {
        let gh = with_cycle(g, &order);
        let emb = planar_embedding(&gh).ok_or_else(|| Error::Contract("graph plus witness cycle is not planar".into()))?;
        let mut parent: Vec<usize> = (0..emb.face_count()).collect();
        for e in 0..g.m() {
            let (a, b) = emb.edge_faces(e);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let side = find(&mut parent, emb.face_of(dart(g.m(), true)));
        for (e, p) in pages.iter_mut().enumerate() {
            let f = emb.edge_faces(e).0;
            if find(&mut parent, f) != side {
                *p = 2;
            }
        }
    }
    let out = BookEmbedding { order, pages };
    if !verify_embedding(g, &out, 2) {
        return Err(Error::Integrity("page assignment from the witness has a crossing".into()));
    }
    Ok(out)
}
