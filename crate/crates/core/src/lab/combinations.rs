//! Lexicographic enumeration of k-subsets of `{1, ..., n}`.
//!
//! Subsets are sorted `u32` sequences. Ranking follows the combinatorial
//! number system so any contiguous rank range can be handed to a worker.

/// `C(n, k)`, or `None` if it does not fit in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // exact: c * (n - i) is divisible by (i + 1)
        c = c.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        if c > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(c).ok()
}

/// The `rank`-th (0-based) k-subset of `{1, ..., n}` in lexicographic order.
///
/// Panics if `rank >= C(n, k)`.
pub fn unrank(n: u32, k: u32, mut rank: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 1u32;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            assert!(next <= n, "rank out of range");
            let with_next = binomial(u64::from(n - next), u64::from(remaining))
                .expect("rank space fits in u64");
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    assert!(rank == 0 || k == 0, "rank out of range");
    out
}

/// Steps `comb` to its lexicographic successor among k-subsets of `{1, ..., n}`.
/// Returns `false` (leaving `comb` unchanged) if it was the last one.
pub fn advance(comb: &mut [u32], n: u32) -> bool {
    let k = comb.len() as u32;
    for i in (0..comb.len()).rev() {
        let cap = n - (k - 1 - i as u32);
        if comb[i] < cap {
            comb[i] += 1;
            for j in i + 1..comb.len() {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
