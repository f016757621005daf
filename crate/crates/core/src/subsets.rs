//! Lexicographic k-subsets of `{0, .., n-1}` addressed by rank, so that
//! enumerations can be split across threads without materializing them.

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of subsets with sizes in `lo..=hi`, saturating.
pub fn count_range(n: usize, lo: usize, hi: usize) -> u64 {
    (lo..=hi.min(n)).fold(0u64, |acc, k| acc.saturating_add(binomial(n, k)))
}

/// The `rank`-th k-subset of `{0, .., n-1}` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    debug_assert!(rank < binomial(n, k));
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for pos in 0..k {
        let mut c = next;
        loop {
            let below = binomial(n - c - 1, k - pos - 1);
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}
