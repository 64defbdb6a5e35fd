mod common;

use std::collections::BTreeSet;

use common::{oracle_combine, oracle_triples, oracle_types, ring, splits};
use twopage::types::{combine_types, enumerate_triples, enumerate_types};

#[test]
fn types_match_role_assignment_on_rings() {
    for order in [vec![0, 1], vec![0, 1, 2], vec![2, 0, 1], vec![0, 2, 1, 3]] {
        let o = ring(&order);
        let ours: BTreeSet<_> = enumerate_types(&o).into_iter().collect();
        assert_eq!(ours, oracle_types(&o), "ring {order:?}");
    }
}

#[test]
fn triples_match_gluing_on_small_splits() {
    let mut checked = 0;
    for (o1, o2) in splits(7) {
        if o1.len().max(o2.len()) > 3 {
            continue;
        }
        let ours: BTreeSet<_> = enumerate_triples(&o1, &o2).unwrap().into_iter().collect();
        assert_eq!(ours, oracle_triples(&o1, &o2), "{o1:?} {o2:?}");
        checked += 1;
        if checked == 6 {
            break;
        }
    }
    assert!(checked > 0);
}

#[test]
fn combination_is_symmetric() {
    for (o1, o2) in splits(3).into_iter().filter(|(a, b)| a.len().max(b.len()) <= 3).take(3) {
        let t2: Vec<_> = oracle_types(&o2).into_iter().collect();
        for x1 in oracle_types(&o1) {
            for x2 in t2.iter().step_by(17) {
                let ab = combine_types(&o1, &x1, &o2, x2).ok();
                let ba = combine_types(&o2, x2, &o1, &x1).ok();
                assert_eq!(ab, ba);
                assert_eq!(ab, oracle_combine(&o1, &x1, &o2, x2));
            }
        }
    }
}
