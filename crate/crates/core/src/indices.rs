//! Multi-indices for tensor-product Hermite bases, ordered by total degree
//! and then lexicographically. Every matrix in the crate is written in this
//! ordering, so the rank of an index is a load-bearing invariant.

use std::collections::HashMap;

/// A multi-index alpha in N^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub alpha: Vec<usize>,
}

impl MultiIndex {
    pub fn new(alpha: Vec<usize>) -> Self {
        MultiIndex { alpha }
    }

    /// Total degree |alpha|.
    pub fn degree(&self) -> usize {
        self.alpha.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// alpha + e_j, where e_j is the j-th unit index.
    pub fn raised(&self, j: usize) -> MultiIndex {
        let mut a = self.alpha.clone();
        a[j] += 1;
        MultiIndex::new(a)
    }

    /// alpha - e_j, or None if alpha_j == 0.
    pub fn lowered(&self, j: usize) -> Option<MultiIndex> {
        if self.alpha[j] == 0 {
            return None;
        }
        let mut a = self.alpha.clone();
        a[j] -= 1;
        Some(MultiIndex::new(a))
    }
}

/// All multi-indices in N^n with degree <= k_max, graded lexicographic:
/// sorted by degree first, then lexicographically within each degree.
pub fn enumerate_indices(n: usize, k_max: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for deg in 0..=k_max {
        let mut cur = vec![0usize; n];
        emit_degree(n, deg, 0, deg, &mut cur, &mut out);
    }
    out
}

fn emit_degree(
    n: usize,
    _deg: usize,
    pos: usize,
    remaining: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex::new(cur.clone()));
        return;
    }
    // Ascending loop keeps standard lex within a degree: (0,2) < (1,1) < (2,0).
    for v in 0..=remaining {
        cur[pos] = v;
        emit_degree(n, _deg, pos + 1, remaining - v, cur, out);
    }
}

/// Rank lookup table from index to its position in the graded-lex ordering.
pub fn rank_table(indices: &[MultiIndex]) -> HashMap<Vec<usize>, usize> {
    indices
        .iter()
        .enumerate()
        .map(|(i, mi)| (mi.alpha.clone(), i))
        .collect()
}

/// Binomial coefficient, exact in u128 for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension of the span of indices with degree <= k_max in n variables.
pub fn graded_dimension(n: usize, k_max: usize) -> usize {
    binomial(k_max + n, n)
}
