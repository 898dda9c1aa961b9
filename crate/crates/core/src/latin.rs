//! Backtracking enumeration of Latin squares, used to generate the Latin profile
//! families and to check the stored Latin-square counts.

use crate::perm;

/// Calls `visit` with every Latin square of order `n` (row-major, symbols `0..n`).
pub fn for_each_latin_square(n: usize, mut visit: impl FnMut(&[u8])) {
    let rows = perm::all_permutations(n);
    let mut square = vec![0u8; n * n];
    // used[col] is a bitmask of symbols already placed in that column
    let mut used = vec![0u32; n];
    fill(n, 0, &rows, &mut square, &mut used, &mut visit);
}

fn fill(n: usize, row: usize, rows: &[Vec<u8>], square: &mut [u8], used: &mut [u32], visit: &mut impl FnMut(&[u8])) {
    if row == n {
        visit(square);
        return;
    }
    for cand in rows {
        if cand.iter().enumerate().any(|(c, &s)| used[c] & (1 << s) != 0) {
            continue;
        }
        for (c, &s) in cand.iter().enumerate() {
            used[c] |= 1 << s;
        }
        square[row * n..(row + 1) * n].copy_from_slice(cand);
        fill(n, row + 1, rows, square, used, visit);
        for (c, &s) in cand.iter().enumerate() {
            used[c] &= !(1 << s);
        }
    }
}

pub fn all_latin_squares(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for_each_latin_square(n, |sq| out.push(sq.to_vec()));
    out
}

pub fn count_latin_squares(n: usize) -> u64 {
    let mut count = 0;
    for_each_latin_square(n, |_| count += 1);
    count
}
