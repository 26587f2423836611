//! Small combinatorial iteration helpers shared across the crate.

/// All bitmasks with `r` bits set among the low `n`, in increasing numeric
/// order (Gosper's hack).
pub(crate) fn subsets_of_size(n: usize, r: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 64 && r <= n);
    let limit = crate::structure::mask(n);
    let mut next = Some(crate::structure::mask(r));
    std::iter::from_fn(move || {
        let m = next?;
        next = if m == 0 {
            None
        } else {
            let u = m & m.wrapping_neg();
            let v = m + u;
            let w = v | (((v ^ m) / u) >> 2);
            (w <= limit && v != 0).then_some(w)
        };
        Some(m)
    })
}

/// All permutations of `0..n` in lexicographic order. Intended for small n.
pub(crate) fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    std::iter::from_fn(move || {
        let p = current.clone()?;
        current = next_permutation(p.clone());
        Some(p)
    })
}

fn next_permutation(mut p: Vec<usize>) -> Option<Vec<usize>> {
    let n = p.len();
    if n < 2 {
        return None;
    }
    let i = (0..n - 1).rev().find(|&i| p[i] < p[i + 1])?;
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_counts_are_binomials() {
        let binom = |n: u64, r: u64| {
            (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
        };
        for n in 0..=10 {
            for r in 0..=n {
                assert_eq!(
                    subsets_of_size(n, r).count() as u64,
                    binom(n as u64, r as u64),
                    "n={n} r={r}"
                );
            }
        }
    }

    #[test]
    fn subsets_cover_full_range_without_repeats() {
        let mut seen: Vec<u64> = (0..=6).flat_map(|r| subsets_of_size(6, r)).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..64).collect::<Vec<u64>>());
    }

    #[test]
    fn permutation_count_is_factorial() {
        assert_eq!(permutations(0).count(), 1);
        assert_eq!(permutations(1).count(), 1);
        assert_eq!(permutations(5).count(), 120);
        assert!(permutations(4).all(|p| {
            let mut q = p.clone();
            q.sort_unstable();
            q == vec![0, 1, 2, 3]
        }));
    }
}
