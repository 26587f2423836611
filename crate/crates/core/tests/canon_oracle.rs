//! Cross-checks canonical codes against a brute-force isomorphism oracle.
//!
//! The oracle tries every vertex bijection directly (identity only for
//! ordered structures) and never calls into the canonicalization search, so
//! codes and oracle must agree for independent reasons.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relenum::{avoids_all, canonical_code, embeds, CanonicalCode, FiniteStructure, Kind};

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    if a.n() != b.n() || a.k() != b.k() || a.ordered() != b.ordered() {
        return false;
    }
    let n = a.n();
    let maps = if a.ordered() {
        vec![(0..n).collect::<Vec<usize>>()]
    } else {
        all_perms(n)
    };
    maps.iter().any(|s| {
        (0..a.k())
            .all(|i| (0..n).all(|x| (0..n).all(|y| a.get(i, x, y) == b.get(i, s[x], s[y]))))
    })
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            out.push((x, y));
        }
    }
    out
}

fn graph_from_bits(n: usize, bits: u64) -> FiniteStructure {
    let edges: Vec<(usize, usize)> = pairs(n)
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| bits >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    FiniteStructure::graph_from_edges(n, &edges).unwrap()
}

fn tournament_from_bits(n: usize, bits: u64) -> FiniteStructure {
    let arcs: Vec<(usize, usize)> = pairs(n)
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| if bits >> i & 1 == 1 { (x, y) } else { (y, x) })
        .collect();
    FiniteStructure::tournament_from_arcs(n, &arcs).unwrap()
}

fn path(n: usize) -> FiniteStructure {
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    FiniteStructure::graph_from_edges(n, &edges).unwrap()
}

/// Groups structures by canonical code and asserts the grouping is exactly
/// the oracle's isomorphism partition.
fn assert_partition_matches_oracle(items: &[FiniteStructure], expected_classes: usize) {
    let mut by_code: BTreeMap<CanonicalCode, Vec<usize>> = BTreeMap::new();
    for (i, r) in items.iter().enumerate() {
        by_code.entry(canonical_code(r)).or_default().push(i);
    }
    assert_eq!(by_code.len(), expected_classes);
    let reps: Vec<usize> = by_code.values().map(|c| c[0]).collect();
    for class in by_code.values() {
        for &m in &class[1..] {
            assert!(
                isomorphic(&items[class[0]], &items[m]),
                "same code, oracle disagrees: #{} vs #{}",
                class[0],
                m
            );
        }
    }
    for (a, &ra) in reps.iter().enumerate() {
        for &rb in &reps[a + 1..] {
            assert!(
                !isomorphic(&items[ra], &items[rb]),
                "distinct codes, oracle says isomorphic: #{ra} vs #{rb}"
            );
        }
    }
}

#[test]
fn four_vertex_graphs_split_into_eleven_classes() {
    let graphs: Vec<FiniteStructure> = (0..64).map(|b| graph_from_bits(4, b)).collect();
    assert_partition_matches_oracle(&graphs, 11);
}

#[test]
fn five_vertex_graphs_split_into_thirty_four_classes() {
    let graphs: Vec<FiniteStructure> = (0..1024).map(|b| graph_from_bits(5, b)).collect();
    assert_partition_matches_oracle(&graphs, 34);
}

#[test]
fn four_vertex_tournaments_split_into_four_classes() {
    let ts: Vec<FiniteStructure> = (0..64).map(|b| tournament_from_bits(4, b)).collect();
    assert_partition_matches_oracle(&ts, 4);
}

#[test]
fn path_avoiders_on_four_vertices() {
    // the only 4-vertex graph with an induced 4-path is the 4-path itself
    let p4 = path(4);
    let avoiders: Vec<FiniteStructure> = (0..64)
        .map(|b| graph_from_bits(4, b))
        .filter(|g| avoids_all(g, std::slice::from_ref(&p4)).unwrap())
        .collect();
    assert_eq!(avoiders.len(), 64 - 12);
    let codes: std::collections::BTreeSet<CanonicalCode> =
        avoiders.iter().map(canonical_code).collect();
    assert_eq!(codes.len(), 10);
}

#[test]
fn relabeling_never_changes_the_code() {
    for n in 1..=4usize {
        let perms = all_perms(n);
        for bits in 0..1u64 << (n * (n - 1) / 2) {
            let g = graph_from_bits(n, bits);
            let code = canonical_code(&g);
            for s in &perms {
                assert_eq!(canonical_code(&g.relabel(s)), code);
            }
        }
    }
    // digraphs with loops allowed exercise diagonals and asymmetry
    for bits in 0..1u64 << 9 {
        let rows = vec![vec![bits & 7, bits >> 3 & 7, bits >> 6 & 7]];
        let g = FiniteStructure::from_bit_rows(3, 1, false, Kind::Generic, rows).unwrap();
        let code = canonical_code(&g);
        for s in all_perms(3) {
            assert_eq!(canonical_code(&g.relabel(&s)), code);
        }
    }
}

#[test]
fn six_vertex_graphs_have_156_classes_and_stable_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut codes = std::collections::BTreeSet::new();
    for bits in 0..1u64 << 15 {
        let g = graph_from_bits(6, bits);
        let code = canonical_code(&g);
        let mut sigma: Vec<usize> = (0..6).collect();
        sigma.shuffle(&mut rng);
        assert_eq!(canonical_code(&g.relabel(&sigma)), code);
        codes.insert(code);
    }
    assert_eq!(codes.len(), 156);
}

#[test]
fn two_relation_structures_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sample = |rng: &mut ChaCha8Rng, n: usize| {
        let m = (1u64 << n) - 1;
        let rows: Vec<Vec<u64>> = (0..2)
            .map(|_| (0..n).map(|_| rng.gen::<u64>() & m).collect())
            .collect();
        FiniteStructure::from_bit_rows(n, 2, false, Kind::Generic, rows).unwrap()
    };
    for _ in 0..300 {
        let n = rng.gen_range(2..=4);
        let (a, b) = (sample(&mut rng, n), sample(&mut rng, n));
        assert_eq!(canonical_code(&a) == canonical_code(&b), isomorphic(&a, &b));
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(&mut rng);
        assert_eq!(canonical_code(&a.relabel(&sigma)), canonical_code(&a));
    }
}

fn bichain(values: &[usize]) -> FiniteStructure {
    let n = values.len();
    let rows: Vec<u64> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| values[x] <= values[y])
                .fold(0u64, |acc, y| acc | 1 << y)
        })
        .collect();
    FiniteStructure::from_bit_rows(n, 1, true, Kind::Bichain, vec![rows]).unwrap()
}

#[test]
fn ordered_codes_compare_tables_verbatim() {
    let a = bichain(&[2, 1, 3]);
    let b = bichain(&[1, 2, 3]);
    assert_ne!(canonical_code(&a), canonical_code(&b));
    assert_eq!(canonical_code(&a), canonical_code(&a.clone()));
    assert!(isomorphic(&a, &a));
    assert!(!isomorphic(&a, &b));
}

#[test]
fn permutation_pattern_containment_via_bichains() {
    let pattern = bichain(&[5, 1, 3, 4, 2]);
    let text = bichain(&[3, 9, 1, 8, 6, 7, 4, 5, 2]);
    let found = embeds(&pattern, &text).unwrap().expect("pattern occurs");
    // the witness must be increasing in position and order-matching in value
    let tv = [3, 9, 1, 8, 6, 7, 4, 5, 2];
    let pv = [5, 1, 3, 4, 2];
    for i in 0..5 {
        for j in 0..5 {
            if i < j {
                assert!(found.apply(i) < found.apply(j));
            }
            assert_eq!(
                pv[i] <= pv[j],
                tv[found.apply(i)] <= tv[found.apply(j)]
            );
        }
    }
    let descent = bichain(&[3, 2, 1]);
    let rising = bichain(&[1, 2, 3, 4, 5, 6]);
    assert!(embeds(&descent, &rising).unwrap().is_none());
}

fn arb_structure(max_n: usize, max_k: usize) -> impl Strategy<Value = FiniteStructure> {
    (1..=max_n, 1..=max_k, any::<bool>()).prop_flat_map(|(n, k, ordered)| {
        proptest::collection::vec(any::<u64>(), k * n).prop_map(move |raw| {
            let m = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let rel: Vec<Vec<u64>> = raw.chunks(n).map(|c| c.iter().map(|r| r & m).collect()).collect();
            FiniteStructure::from_bit_rows(n, k, ordered, Kind::Generic, rel).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn text_format_round_trips(r in arb_structure(8, 3)) {
        let again: FiniteStructure = r.to_string().parse().unwrap();
        prop_assert_eq!(again, r);
    }

    #[test]
    fn restrictions_embed_into_the_whole(r in arb_structure(7, 2), m1 in any::<u64>(), m2 in any::<u64>()) {
        let full = (1u64 << r.n()) - 1;
        let outer = m1 & full;
        let inner = m2 & outer;
        let b = r.restrict_mask(outer);
        let a = r.restrict_mask(inner);
        prop_assert!(embeds(&b, &r).unwrap().is_some());
        prop_assert!(embeds(&a, &b).unwrap().is_some());
        prop_assert!(embeds(&a, &r).unwrap().is_some());
    }

    #[test]
    fn code_is_invariant_under_relabeling(r in arb_structure(7, 3), seed in any::<u64>()) {
        if !r.ordered() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sigma: Vec<usize> = (0..r.n()).collect();
            sigma.shuffle(&mut rng);
            prop_assert_eq!(canonical_code(&r.relabel(&sigma)), canonical_code(&r));
        }
    }

    #[test]
    fn restriction_codes_only_depend_on_the_subset_type(r in arb_structure(6, 2), m in any::<u64>(), seed in any::<u64>()) {
        // canonical code of an induced substructure is stable under relabeling the host
        if !r.ordered() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sigma: Vec<usize> = (0..r.n()).collect();
            sigma.shuffle(&mut rng);
            let h = r.relabel(&sigma);
            let sub = m & ((1u64 << r.n()) - 1);
            let image = (0..r.n()).filter(|&v| sub >> v & 1 == 1).fold(0u64, |acc, v| acc | 1 << sigma[v]);
            prop_assert_eq!(
                canonical_code(&r.restrict_mask(sub)),
                canonical_code(&h.restrict_mask(image))
            );
        }
    }
}
