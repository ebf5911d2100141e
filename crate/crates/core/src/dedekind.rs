//! Exact Dedekind sums and the eta multiplier ω.
//!
//! `s(h, k) = Σ_{r=1}^{k−1} (r/k)·(hr/k − ⌊hr/k⌋ − ½)`, with `s(h, 1) = 0`.
//!
//! [`dedekind_sum_naive`] evaluates the definition term by term and accepts
//! any `h`. [`dedekind_sum_fast`] runs the reciprocity law as a Euclidean
//! algorithm and requires `gcd(h, k) = 1`, the hypothesis under which the
//! periodicity, oddness and reciprocity identities hold.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DedekindError {
    #[error("modulus k must be positive, got {0}")]
    NonPositiveModulus(BigInt),
    #[error("h = {h} and k = {k} are not coprime")]
    NotCoprime { h: BigInt, k: BigInt },
    #[error("lemma requires positive h, got {0}")]
    NonPositiveH(BigInt),
    #[error("matrix ({}, {}; {}, {}) has determinant {det}, expected 1", .entries[0], .entries[1], .entries[2], .entries[3])]
    NotUnimodular { entries: Box<[BigInt; 4]>, det: BigInt },
    #[error("lower-left entry c must be positive, got {0}")]
    NonPositiveC(BigInt),
    /// ω came out non-integral. Valid input can never produce this.
    #[error("internal invariant violated: omega = {0} is not an integer")]
    NonIntegralOmega(BigRational),
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn check_modulus(k: &BigInt) -> Result<(), DedekindError> {
    if k.is_positive() {
        Ok(())
    } else {
        Err(DedekindError::NonPositiveModulus(k.clone()))
    }
}

fn check_coprime(h: &BigInt, k: &BigInt) -> Result<(), DedekindError> {
    if h.gcd(k).is_one() {
        Ok(())
    } else {
        Err(DedekindError::NotCoprime {
            h: h.clone(),
            k: k.clone(),
        })
    }
}

/// The defining sum, evaluated directly in `O(k)` big-integer steps.
///
/// Writing `hr mod k` for the least non-negative residue, the sum is
/// `Σ r·(2·(hr mod k) − k) / (2k²)`.
pub fn dedekind_sum_naive(h: &BigInt, k: &BigInt) -> Result<BigRational, DedekindError> {
    check_modulus(k)?;
    let mut acc = BigInt::zero();
    let mut r = BigInt::one();
    while &r < k {
        let frac_num = (h * &r).mod_floor(k);
        // The sawtooth vanishes at integers.
        if !frac_num.is_zero() {
            acc += &r * (frac_num * 2 - k);
        }
        r += 1;
    }
    Ok(ratio(acc, k * k * 2))
}

/// `(h² + k² − 3hk + 1) / (12hk)`, the reciprocity right-hand side.
pub fn reciprocity_rhs(h: &BigInt, k: &BigInt) -> BigRational {
    let num = h * h + k * k - h * k * 3 + 1;
    ratio(num, h * k * 12)
}

/// `s(h, k)` via reciprocity, in `O(log k)` arithmetic steps.
///
/// Each round reduces `h` to its least absolute residue mod `k`, uses
/// oddness to make it non-negative, then trades `s(h, k)` for
/// `R(h, k) − s(k, h)`. The loop stops at `k = 1`.
pub fn dedekind_sum_fast(h: &BigInt, k: &BigInt) -> Result<BigRational, DedekindError> {
    check_modulus(k)?;
    check_coprime(h, k)?;

    let mut total = BigRational::zero();
    let mut negate = false;
    let (mut h, mut k) = (h.clone(), k.clone());
    while !k.is_one() {
        // Least absolute residue in (−k/2, k/2].
        let mut r = h.mod_floor(&k);
        if &r * 2 > k {
            r -= &k;
        }
        if r.is_negative() {
            r = -r;
            negate = !negate;
        }
        // gcd(r, k) = 1 and k > 1 force r >= 1.
        let step = reciprocity_rhs(&r, &k);
        if negate {
            total -= step;
        } else {
            total += step;
        }
        negate = !negate;
        h = k;
        k = r;
    }
    Ok(total)
}

/// Both sides of `Σ_{r=1}^{k−1} ⌊hr/k⌋ = (h−1)(k−1)/2`.
///
/// The identity holds for every `h` coprime to `k`, negative ones included,
/// so only coprimality is checked.
pub fn floor_sum_check(h: &BigInt, k: &BigInt) -> Result<(BigInt, BigInt), DedekindError> {
    check_modulus(k)?;
    check_coprime(h, k)?;
    let mut lhs = BigInt::zero();
    let mut r = BigInt::one();
    while &r < k {
        lhs += (h * &r).div_floor(k);
        r += 1;
    }
    let twice: BigInt = (h - 1) * (k - 1);
    let (rhs, rem) = twice.div_rem(&int(2));
    debug_assert!(rem.is_zero());
    Ok((lhs, rhs))
}

/// Both sides of
/// `Σ_{r=1}^{k−1} ⌊hr/k⌋² = 2h·s(k, h) + (2hk − 3h − k + 3)(h − 1)/6`.
pub fn floor_square_sum_check(
    h: &BigInt,
    k: &BigInt,
) -> Result<(BigRational, BigRational), DedekindError> {
    check_modulus(k)?;
    if !h.is_positive() {
        return Err(DedekindError::NonPositiveH(h.clone()));
    }
    check_coprime(h, k)?;
    let mut lhs = BigInt::zero();
    let mut r = BigInt::one();
    while &r < k {
        let f = (h * &r).div_floor(k);
        lhs += &f * &f;
        r += 1;
    }
    let s = dedekind_sum_fast(k, h)?;
    let poly = (h * k * 2 - h * 3 - k + 3) * (h - 1);
    let rhs = BigRational::from_integer(h * 2) * s + ratio(poly, int(6));
    Ok((BigRational::from_integer(lhs), rhs))
}

fn check_matrix(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Result<(), DedekindError> {
    let det = a * d - b * c;
    if !det.is_one() {
        return Err(DedekindError::NotUnimodular {
            entries: Box::new([a.clone(), b.clone(), c.clone(), d.clone()]),
            det,
        });
    }
    if !c.is_positive() {
        return Err(DedekindError::NonPositiveC(c.clone()));
    }
    Ok(())
}

/// `ω(a, b, c, d) = (a + d)/c + 12·s(−d, c)` for `ad − bc = 1`, `c >= 1`.
///
/// `−d` is first reduced into `[0, c)`. The result is always an integer; a
/// fractional value is reported as [`DedekindError::NonIntegralOmega`].
pub fn omega(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Result<BigInt, DedekindError> {
    check_matrix(a, b, c, d)?;
    let r = (-d).mod_floor(c);
    let s = dedekind_sum_fast(&r, c)?;
    let value = ratio(a + d, c.clone()) + s * BigRational::from_integer(int(12));
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(DedekindError::NonIntegralOmega(value))
    }
}

/// One step of the induction on `c`: `d = cq − r` with `0 < r < c` and
/// `u = aq − b`, so that `(a, b; c, d) = (u, a; r, c)·S·T^q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaStep {
    pub u: BigInt,
    pub r: BigInt,
    pub q: BigInt,
}

/// The induction step for `c >= 2`; `None` when `c < 2`.
pub fn omega_step(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Option<OmegaStep> {
    if c < &int(2) {
        return None;
    }
    let r = (-d).mod_floor(c);
    assert!(
        !r.is_zero(),
        "gcd(c, d) = 1 with c >= 2 rules out c | d"
    );
    let q = (d + &r) / c;
    let u = a * &q - b;
    Some(OmegaStep { u, r, q })
}

/// ω computed without Dedekind sums: `ω = a + d` when `c = 1`, otherwise
/// `ω(a, b, c, d) = ω(u, a, r, c) + q − 3`.
pub fn omega_by_induction(
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
) -> Result<BigInt, DedekindError> {
    check_matrix(a, b, c, d)?;
    let mut acc = BigInt::zero();
    let (mut a, mut b, mut c, mut d) = (a.clone(), b.clone(), c.clone(), d.clone());
    while let Some(step) = omega_step(&a, &b, &c, &d) {
        acc += &step.q - 3;
        (a, b, c, d) = (step.u, a, step.r, c);
    }
    Ok(acc + a + d)
}
