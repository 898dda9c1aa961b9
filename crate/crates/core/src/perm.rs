//! Permutations of `0..n` in lexicographic order, ranked by Lehmer code.

pub fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Lexicographic rank of a permutation of `0..n`.
pub fn lehmer_rank(perm: &[u8]) -> u64 {
    let n = perm.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller_after = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller_after;
    }
    rank
}

/// Inverse of [`lehmer_rank`]. `rank` must be below `n!`.
pub fn lehmer_unrank(n: usize, mut rank: u64) -> Vec<u8> {
    let mut digits = vec![0u64; n];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<u8> = (0..n as u8).collect();
    digits
        .into_iter()
        .map(|d| pool.remove(d as usize))
        .collect()
}

/// Advances `perm` to its lexicographic successor, returning false after the last one.
pub fn next_permutation(perm: &mut [u8]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// All permutations of `0..n`, in lexicographic order (so entry `r` has Lehmer rank `r`).
pub fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(factorial_u64(n) as usize);
    let mut p: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

pub fn is_permutation(values: &[u8]) -> bool {
    let n = values.len();
    let mut seen = vec![false; n];
    for &v in values {
        let v = v as usize;
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}
