//! Exhaustive subspace enumeration over F_2^m for small m, representing a
//! subspace as the bitmask of its member vectors (m <= 6 so masks fit u64).

/// All subspaces of F_2^m as sorted member-vector lists.
pub fn all_subspaces_f2(m: usize) -> Vec<Vec<u32>> {
    assert!(m <= 6, "oracle subspace enumeration caps at F_2^6");
    let total = 1u32 << m;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let trivial = vec![0u32];
    seen.insert(mask_of(&trivial));
    out.push(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(space) = frontier.pop() {
        for v in 1..total {
            if space.binary_search(&v).is_ok() {
                continue;
            }
            let mut bigger: Vec<u32> = space.iter().flat_map(|&w| [w, w ^ v]).collect();
            bigger.sort_unstable();
            bigger.dedup();
            if seen.insert(mask_of(&bigger)) {
                out.push(bigger.clone());
                frontier.push(bigger);
            }
        }
    }
    out
}

fn mask_of(space: &[u32]) -> u64 {
    space.iter().fold(0u64, |m, &v| m | (1 << v))
}

/// Span of the union of two vector sets.
pub fn sum_f2(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| x ^ y))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_gaussian_binomials() {
        // F_2^3: 1 + 7 + 7 + 1 = 16 subspaces.
        assert_eq!(all_subspaces_f2(3).len(), 16);
        // F_2^4: 1 + 15 + 35 + 15 + 1 = 67.
        assert_eq!(all_subspaces_f2(4).len(), 67);
    }

    #[test]
    fn sum_is_span() {
        let a = vec![0u32, 1];
        let b = vec![0u32, 2];
        assert_eq!(sum_f2(&a, &b), vec![0, 1, 2, 3]);
    }
}
