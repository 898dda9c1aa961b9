//! Exact counting formulas for profile families, evaluated with big integers.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default largest `n` accepted by [`evaluate`].
pub const DEFAULT_MAX_N: usize = 20;

/// Number of Latin squares of order 1 through 7.
pub const LATIN_SQUARE_COUNTS: [u64; 7] = [1, 2, 12, 576, 161280, 812851200, 61479419904000];

const FACTORIAL_CACHE: usize = 128;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_CACHE + 1);
        t.push(BigUint::one());
        for i in 1..=FACTORIAL_CACHE {
            let next = &t[i - 1] * BigUint::from(i);
            t.push(next);
        }
        t
    })
}

pub fn factorial(n: usize) -> BigUint {
    let table = factorial_table();
    if n <= FACTORIAL_CACHE {
        return table[n].clone();
    }
    (FACTORIAL_CACHE + 1..=n).fold(table[FACTORIAL_CACHE].clone(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Derangements `D_i` from `D_i = (i - 1)(D_{i-1} + D_{i-2})`.
pub fn derangements(i: usize) -> BigUint {
    let mut prev = BigUint::one(); // D_0
    if i == 0 {
        return prev;
    }
    let mut cur = BigUint::zero(); // D_1
    for j in 2..=i {
        let next = BigUint::from(j - 1) * (&cur + &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Number of Latin squares of order `n`, from the stored table (`1 <= n <= 7`).
pub fn latin_squares(n: usize) -> Result<BigUint> {
    match n {
        1..=7 => Ok(BigUint::from(LATIN_SQUARE_COUNTS[n - 1])),
        _ => Err(domain("latin-squares", n, "stored for 1 <= n <= 7 only")),
    }
}

fn domain(formula: &str, n: usize, reason: &str) -> Error {
    Error::Domain {
        formula: formula.to_string(),
        n,
        reason: reason.to_string(),
    }
}

fn require_positive(formula: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain(formula, n, "requires n >= 1"));
    }
    Ok(())
}

fn exact_div(num: BigUint, den: &BigUint) -> BigUint {
    let q = &num / den;
    assert!(&q * den == num, "non-exact division {num} / {den}");
    q
}

fn pow(base: &BigUint, exp: usize) -> BigUint {
    base.pow(exp as u32)
}

/// `(n!)^(2n)`.
pub fn total_profiles(n: usize) -> BigUint {
    pow(&factorial(n), 2 * n)
}

/// Men's matrices in which everyone ranks the same woman first: `n (n-1)!^n`.
pub fn homecoming_queen_men(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    BigUint::from(n) * pow(&factorial(n - 1), n)
}

/// `n (n-1)!^n n!^n`.
pub fn homecoming_queen_profiles(n: usize) -> BigUint {
    homecoming_queen_men(n) * pow(&factorial(n), n)
}

/// Men's matrices in which everyone ranks woman 1 first: `(n-1)!^n`.
pub fn homecoming_queen_fixed(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    pow(&factorial(n - 1), n)
}

/// Both a homecoming queen and a homecoming king: `(n (n-1)!^n)^2`.
pub fn homecoming_both(n: usize) -> BigUint {
    pow(&homecoming_queen_men(n), 2)
}

fn require_two(formula: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(formula, n, "needs two distinct people, n >= 2"));
    }
    Ok(())
}

/// Every man prefers woman 1 to woman 2: `n!^(2n) / 2^n`.
pub fn dominance_profiles(n: usize) -> Result<BigUint> {
    require_two("dominance", n)?;
    Ok(exact_div(total_profiles(n), &pow(&BigUint::from(2u32), n)))
}

/// Men's matrices only: `n!^n / 2^n`.
pub fn dominance_men_only(n: usize) -> Result<BigUint> {
    require_two("dominance-men", n)?;
    Ok(exact_div(pow(&factorial(n), n), &pow(&BigUint::from(2u32), n)))
}

/// Men prefer woman 1 to woman 2 and women prefer man 1 to man 2: `n!^(2n) / 4^n`.
pub fn dominance_both_sides(n: usize) -> Result<BigUint> {
    require_two("dominance-both", n)?;
    Ok(exact_div(total_profiles(n), &pow(&BigUint::from(4u32), n)))
}

pub fn same_taste_men(n: usize) -> BigUint {
    factorial(n)
}

/// `(n!)^(n+1)`.
pub fn same_taste_profiles(n: usize) -> BigUint {
    pow(&factorial(n), n + 1)
}

/// `n!^2`.
pub fn same_taste_both(n: usize) -> BigUint {
    pow(&factorial(n), 2)
}

/// `n! (n-1)!^n`.
pub fn tastes_differ_men_only(n: usize) -> Result<BigUint> {
    require_positive("tastes-differ-men", n)?;
    Ok(factorial(n) * pow(&factorial(n - 1), n))
}

/// `n!^(n+1) (n-1)!^n`.
pub fn tastes_differ_profiles(n: usize) -> Result<BigUint> {
    require_positive("tastes-differ", n)?;
    Ok(tastes_differ_men_only(n)? * pow(&factorial(n), n))
}

/// `n!^2 (n-1)!^(2n)`.
pub fn tastes_differ_both(n: usize) -> Result<BigUint> {
    require_positive("tastes-differ-both", n)?;
    Ok(pow(&tastes_differ_men_only(n)?, 2))
}

/// `n!^n L_n`.
pub fn latin_men_profiles(n: usize) -> Result<BigUint> {
    Ok(pow(&factorial(n), n) * latin_squares(n)?)
}

/// `L_n^2`.
pub fn mutually_latin_profiles(n: usize) -> Result<BigUint> {
    Ok(pow(&latin_squares(n)?, 2))
}

/// Every pair costs `n + 1`; the women's matrix is determined by the men's, so `L_n`.
pub fn latin_profiles(n: usize) -> Result<BigUint> {
    latin_squares(n)
}

/// `L_n n!`: a Latin square for the women times a key permutation.
pub fn joint_profiles(n: usize) -> Result<BigUint> {
    Ok(latin_squares(n)? * factorial(n))
}

fn signed_sum(terms: impl Iterator<Item = (bool, BigUint)>) -> BigUint {
    let total = terms.fold(BigInt::zero(), |acc, (negative, t)| {
        let t = BigInt::from_biguint(Sign::Plus, t);
        if negative {
            acc - t
        } else {
            acc + t
        }
    });
    total
        .to_biguint()
        .expect("inclusion-exclusion count must be nonnegative")
}

fn check_k(formula: &str, n: usize, k: usize) -> Result<()> {
    require_positive(formula, n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("{formula}: k={k} exceeds n={n}")));
    }
    Ok(())
}

/// Completions of the `2(n-k)` people outside a fixed group of `k` couples such that
/// none of them form a soulmate pair:
/// `sum_i (-1)^i C(n-k,i)^2 (n-1)!^(2i) i! n!^(2n-2k-2i)`.
pub fn soulmate_free_completions(n: usize, k: usize) -> Result<BigUint> {
    check_k("S", n, k)?;
    let rest = n - k;
    let fm1 = factorial(n - 1);
    let fnn = factorial(n);
    Ok(signed_sum((0..=rest).map(|i| {
        let term = pow(&binomial(rest, i), 2) * pow(&fm1, 2 * i) * factorial(i) * pow(&fnn, 2 * (rest - i));
        (i % 2 == 1, term)
    })))
}

/// Profiles with exactly `k` soulmate pairs: `C(n,k)^2 k! (n-1)!^(2k) S(k,n)`.
pub fn soulmate_profiles(n: usize, k: usize) -> Result<BigUint> {
    check_k("F", n, k)?;
    Ok(pow(&binomial(n, k), 2) * factorial(k) * pow(&factorial(n - 1), 2 * k) * soulmate_free_completions(n, k)?)
}

/// Men's matrix Latin and exactly `k` soulmate pairs: `L_n C(n,k) (n-1)^(n-k) (n-1)!^n`.
pub fn latin_men_soulmates(n: usize, k: usize) -> Result<BigUint> {
    check_k("latin-men-soulmates", n, k)?;
    Ok(latin_squares(n)? * binomial(n, k) * pow(&BigUint::from(n - 1), n - k) * pow(&factorial(n - 1), n))
}

/// Both matrices Latin and exactly `k` soulmate pairs:
/// `L_n^2 / n! * C(n,k) * sum_i (-1)^i (n-k)!/i!`.
pub fn mutually_latin_soulmates(n: usize, k: usize) -> Result<BigUint> {
    check_k("mutually-latin-soulmates", n, k)?;
    let rest = n - k;
    let frest = factorial(rest);
    let alternating = signed_sum((0..=rest).map(|i| (i % 2 == 1, &frest / factorial(i))));
    let reduced = exact_div(pow(&latin_squares(n)?, 2), &factorial(n));
    Ok(reduced * binomial(n, k) * alternating)
}

/// Profiles with at least one outcast pair: `n^4 (n-1)!^(2n)`, except 14 for `n = 2`.
pub fn outcast_profiles(n: usize) -> Result<BigUint> {
    require_positive("outcasts", n)?;
    if n == 2 {
        return Ok(BigUint::from(14u32));
    }
    Ok(pow(&BigUint::from(n), 4) * pow(&factorial(n - 1), 2 * n))
}

/// Outcasts who also rank each other last: `n^2 (n-1)!^(2n)`.
pub fn outcast_hell_profiles(n: usize) -> Result<BigUint> {
    require_positive("outcast-hell", n)?;
    Ok(pow(&BigUint::from(n), 2) * pow(&factorial(n - 1), 2 * n))
}

/// Men's matrices up to relabeling the men: multisets of `n` rankings, `C(n! + n - 1, n)`.
pub fn men_profiles_up_to_relabeling(n: usize) -> Result<BigUint> {
    require_positive("men-up-to-relabeling", n)?;
    // n! fits in usize only for small n; compute the multiset coefficient directly
    let f = factorial(n);
    let mut acc = BigUint::one();
    for i in 0..n {
        acc *= &f + BigUint::from(i);
    }
    Ok(exact_div(acc, &factorial(n)))
}

/// Upper bound `(n^2)!` and divisor `n!^2` for the number of disjoint profiles.
pub fn disjoint_profile_bounds(n: usize) -> Result<(BigUint, BigUint)> {
    require_positive("disjoint-bounds", n)?;
    Ok((factorial(n * n), pow(&factorial(n), 2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arity {
    N,
    NK,
}

/// A named formula exposed through [`evaluate`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FormulaInfo {
    pub name: &'static str,
    pub arity: Arity,
    /// OEIS identifier of the sequence the formula generates, if any.
    pub oeis: &'static str,
    pub description: &'static str,
}

macro_rules! formula {
    ($name:expr, $arity:ident, $oeis:expr, $desc:expr) => {
        FormulaInfo {
            name: $name,
            arity: Arity::$arity,
            oeis: $oeis,
            description: $desc,
        }
    };
}

pub const FORMULAS: &[FormulaInfo] = &[
    formula!("total", N, "A185141", "all preference profiles, (n!)^(2n)"),
    formula!("factorial", N, "A000142", "n!"),
    formula!("derangements", N, "A000166", "derangements D_n"),
    formula!("latin-squares", N, "A002860", "Latin squares of order n (stored, n <= 7)"),
    formula!("homecoming-queen", N, "A340890", "all men rank the same woman first"),
    formula!("homecoming-queen-men", N, "A342573", "men's matrices with a common first choice"),
    formula!("homecoming-queen-fixed", N, "", "men's matrices where everyone ranks woman 1 first, (n-1)!^n"),
    formula!("homecoming-both", N, "A343474", "a homecoming queen and a homecoming king"),
    formula!("dominance", N, "A338665", "all men prefer woman 1 to woman 2 (n >= 2)"),
    formula!("dominance-men", N, "A343692", "men's matrices where all prefer woman 1 to woman 2 (n >= 2)"),
    formula!("dominance-both", N, "A343693", "dominance on both sides (n >= 2)"),
    formula!("same-taste-men", N, "A000142", "men's matrices with identical rows"),
    formula!("same-taste", N, "A091868", "all men rank the women identically, (n!)^(n+1)"),
    formula!("same-taste-both", N, "A001044", "both sides have identical rows, n!^2"),
    formula!("tastes-differ", N, "A343475", "all men have different first choices"),
    formula!("tastes-differ-men", N, "A343694", "men's matrices with distinct first choices"),
    formula!("tastes-differ-both", N, "A343695", "distinct first choices on both sides"),
    formula!("latin-men", N, "A343696", "men's matrix is a Latin square"),
    formula!("mutually-latin", N, "A343697", "both matrices are Latin squares"),
    formula!("latin", N, "A002860", "every pair has egalitarian cost n+1"),
    formula!("joint", N, "A344693", "joint profiles, L_n n!"),
    formula!("S", NK, "", "soulmate-free completions outside k fixed couples"),
    formula!("F", NK, "", "profiles with exactly k soulmate pairs"),
    formula!("latin-men-soulmates", NK, "", "Latin men's matrix and exactly k soulmate pairs"),
    formula!("mutually-latin-soulmates", NK, "", "both matrices Latin and exactly k soulmate pairs"),
    formula!("outcasts", N, "A344689", "at least one outcast pair"),
    formula!("outcast-hell", N, "A343474", "an outcast pair that is also a hell-pair"),
    formula!("men-up-to-relabeling", N, "A344690", "men's matrices up to relabeling men"),
    formula!("disjoint-upper", N, "", "upper bound (n^2)! on disjoint profiles"),
    formula!("disjoint-divisor", N, "", "n!^2, which divides the disjoint-profile count"),
];

pub fn formula_info(name: &str) -> Option<&'static FormulaInfo> {
    FORMULAS.iter().find(|f| f.name == name)
}

/// Evaluates a named formula. `k` is required for two-parameter formulas; `n` must not exceed `cap`.
pub fn evaluate(name: &str, n: usize, k: Option<usize>, cap: usize) -> Result<BigUint> {
    let info = formula_info(name).ok_or_else(|| Error::UnknownFormula(name.to_string()))?;
    if n > cap {
        return Err(domain(name, n, &format!("exceeds the configured cap n <= {cap}")));
    }
    let k = match (info.arity, k) {
        (Arity::NK, Some(k)) => k,
        (Arity::NK, None) => return Err(Error::InvalidArgument(format!("{name} needs --k"))),
        (Arity::N, Some(_)) => return Err(Error::InvalidArgument(format!("{name} takes no k"))),
        (Arity::N, None) => 0,
    };
    match name {
        "total" => Ok(total_profiles(n)),
        "factorial" => Ok(factorial(n)),
        "derangements" => Ok(derangements(n)),
        "latin-squares" => latin_squares(n),
        "homecoming-queen" => require_positive(name, n).map(|_| homecoming_queen_profiles(n)),
        "homecoming-queen-men" => require_positive(name, n).map(|_| homecoming_queen_men(n)),
        "homecoming-queen-fixed" => require_positive(name, n).map(|_| homecoming_queen_fixed(n)),
        "homecoming-both" => require_positive(name, n).map(|_| homecoming_both(n)),
        "dominance" => dominance_profiles(n),
        "dominance-men" => dominance_men_only(n),
        "dominance-both" => dominance_both_sides(n),
        "same-taste-men" => Ok(same_taste_men(n)),
        "same-taste" => Ok(same_taste_profiles(n)),
        "same-taste-both" => Ok(same_taste_both(n)),
        "tastes-differ" => tastes_differ_profiles(n),
        "tastes-differ-men" => tastes_differ_men_only(n),
        "tastes-differ-both" => tastes_differ_both(n),
        "latin-men" => latin_men_profiles(n),
        "mutually-latin" => mutually_latin_profiles(n),
        "latin" => latin_profiles(n),
        "joint" => joint_profiles(n),
        "S" => soulmate_free_completions(n, k),
        "F" => soulmate_profiles(n, k),
        "latin-men-soulmates" => latin_men_soulmates(n, k),
        "mutually-latin-soulmates" => mutually_latin_soulmates(n, k),
        "outcasts" => outcast_profiles(n),
        "outcast-hell" => outcast_hell_profiles(n),
        "men-up-to-relabeling" => men_profiles_up_to_relabeling(n),
        "disjoint-upper" => disjoint_profile_bounds(n).map(|b| b.0),
        "disjoint-divisor" => disjoint_profile_bounds(n).map(|b| b.1),
        _ => unreachable!("formula table and dispatch disagree on {name}"),
    }
}
