//! Certificate-first search for YES instances: chord every face of a
//! planar embedding, look for a Hamiltonian cycle of the chorded graph by
//! rotation-extension, and accept it only after an independent planarity
//! check of the graph plus the cycle. A miss proves nothing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{MultiGraph, VertexId};
use crate::planarity::{planar_embedding, planar_with_cycle};

/// Effort limits of the search.
#[derive(Clone, Copy, Debug)]
pub struct ShortcutBudget {
    pub attempts: usize,
    /// Path moves per attempt, as a multiple of `n`.
    pub moves_per_vertex: usize,
}

impl Default for ShortcutBudget {
    fn default() -> Self {
        ShortcutBudget { attempts: 8, moves_per_vertex: 200 }
    }
}

/// A Hamiltonian cycle `h` with `g ∪ h` planar, or `None` if none was
/// found within the budget.
pub fn verified_cycle(g: &MultiGraph, seed: u64, budget: ShortcutBudget) -> Option<Vec<VertexId>> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    let emb = planar_embedding(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget.attempts {
        let adj = chorded(g, &emb, &mut rng);
        if let Some(c) = hamiltonian_cycle(&adj, &mut rng, budget.moves_per_vertex * n) {
            if planar_with_cycle(g, &c).unwrap_or(false) {
                return Some(c);
            }
        }
    }
    None
}

/// Adjacency of `g` plus zigzag chords inside every face, starting at a
/// random corner of each face.
fn chorded(g: &MultiGraph, emb: &crate::planarity::CombinatorialEmbedding, rng: &mut ChaCha8Rng) -> Vec<Vec<VertexId>> {
    let n = g.n();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let add = |adj: &mut Vec<Vec<VertexId>>, a: VertexId, b: VertexId| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for &(a, b) in g.edges() {
        add(&mut adj, a, b);
    }
    for f in 0..emb.face_count() {
        let walk = emb.face_vertices(f);
        let k = walk.len();
        if k < 4 {
            continue;
        }
        let off = rng.gen_range(0..k);
        let w: Vec<VertexId> = (0..k).map(|i| walk[(off + i) % k]).collect();
        let (mut lo, mut hi) = (1usize, k - 1);
        let mut step_lo = true;
        while hi > lo + 1 {
            add(&mut adj, w[lo], w[hi]);
            if step_lo {
                lo += 1;
            } else {
                hi -= 1;
            }
            step_lo = !step_lo;
        }
    }
    adj
}

/// Rotation-extension search for a Hamiltonian cycle.
fn hamiltonian_cycle(adj: &[Vec<VertexId>], rng: &mut ChaCha8Rng, moves: usize) -> Option<Vec<VertexId>> {
    let n = adj.len();
    let mut pos = vec![usize::MAX; n];
    let start = rng.gen_range(0..n);
    let mut path = vec![start];
    pos[start] = 0;
    let mut nbrs: Vec<VertexId> = Vec::new();
    for _ in 0..moves {
        let end = *path.last().expect("nonempty");
        if path.len() == n && adj[end].contains(&path[0]) {
            return Some(path);
        }
        nbrs.clear();
        nbrs.extend(adj[end].iter().copied().filter(|&u| pos[u] == usize::MAX));
        if let Some(&u) = nbrs.choose(rng) {
            pos[u] = path.len();
            path.push(u);
            continue;
        }
        // Rotate: close `end` onto an inner path vertex and reverse the tail.
        nbrs.extend(adj[end].iter().copied().filter(|&u| pos[u] + 1 < path.len() - 1));
        let Some(&u) = nbrs.choose(rng) else {
            if rng.gen_bool(0.5) {
                path.reverse();
                for (i, &v) in path.iter().enumerate() {
                    pos[v] = i;
                }
            }
            continue;
        };
        let i = pos[u];
        path[i + 1..].reverse();
        for (k, &v) in path.iter().enumerate().skip(i + 1) {
            pos[v] = k;
        }
    }
    None
}
