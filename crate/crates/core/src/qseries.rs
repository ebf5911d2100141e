//! Exact truncated power series with big-integer coefficients.
//!
//! [`QSeries`] is a series in one nome variable known up to a truncation
//! order; [`BiSeries`] is a series in `w` whose coefficients are Laurent
//! polynomials in `z²`. Both are used to check product/sum identities
//! coefficient by coefficient, so nothing here is ever rounded and no
//! operation reports coefficients past the order it can actually vouch for.

use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::character::chi12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("exponent {exponent} exceeds truncation order {order}")]
    BeyondOrder { exponent: usize, order: usize },
    #[error("z² exponent {j} out of range for w-degree {m} (need |j| <= m)")]
    LaurentRange { m: usize, j: i64 },
    #[error("factor 1 + c·w^{w_exp}·z^(2·{z2_exp}) is not admissible")]
    BadFactor { w_exp: i64, z2_exp: i64 },
}

/// A power series `Σ c_e q^e` known exactly for `0 <= e <= order`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I, C>(order: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (usize, C)>,
        C: Into<BigInt>,
    {
        let mut s = Self::zero(order);
        for (e, c) in terms {
            s.add_term(e, c.into())?;
        }
        Ok(s)
    }

    pub fn add_term(&mut self, exponent: usize, c: BigInt) -> Result<(), SeriesError> {
        let order = self.order();
        let slot = self
            .coeffs
            .get_mut(exponent)
            .ok_or(SeriesError::BeyondOrder { exponent, order })?;
        *slot += c;
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `q^e`, or `None` when `e` is past the truncation order.
    pub fn coeff(&self, e: usize) -> Option<&BigInt> {
        self.coeffs.get(e)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops everything above `order`. Never extends.
    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    /// Multiplies by `q^s`. The low `s` coefficients become known zeros.
    pub fn shift(&self, s: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); s];
        coeffs.extend(self.coeffs.iter().cloned());
        QSeries { coeffs }
    }

    /// Substitutes `q -> q^k`. Exponents that are not multiples of `k` are
    /// known to vanish, so the order grows to `k·order + k − 1`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1, "substitution power must be positive");
        let mut out = Self::zero(k * self.order() + k - 1);
        for (e, c) in self.nonzero_terms() {
            out.coeffs[k * e] = c.clone();
        }
        out
    }

    /// In-place multiplication by the binomial `1 + c·q^e`, `e >= 1`.
    fn mul_binomial(&mut self, e: usize, c: i64) {
        if e > self.order() {
            return;
        }
        // Descending so that each source coefficient is still the old one.
        for k in (e..self.coeffs.len()).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(k);
            let src = &lo[k - e];
            if src.is_zero() {
                continue;
            }
            match c {
                1 => hi[0] += src,
                -1 => hi[0] -= src,
                _ => hi[0] += src * c,
            }
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[")?;
        let mut first = true;
        for (e, c) in self.nonzero_terms() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{c}q^{e}")?;
        }
        write!(f, "; O(q^{})]", self.order() + 1)
    }
}

/// Exact Cauchy product truncated to the smaller of the two orders.
pub fn series_mul(a: &QSeries, b: &QSeries) -> QSeries {
    let order = a.order().min(b.order());
    let mut out = QSeries::zero(order);
    for (i, x) in a.coeffs.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate().take(order + 1 - i) {
            if !y.is_zero() {
                out.coeffs[i + j] += x * y;
            }
        }
    }
    out
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        series_mul(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        // zip stops at the shorter series, i.e. the common order.
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(x, y)| x - y)
            .collect();
        QSeries { coeffs }
    }
}

/// `∏_{n=1}^{N} (1 − q^n)` to order `N`. Factors with `n > N` leave every
/// coefficient up to `q^N` unchanged, so this is the infinite product there.
pub fn euler_product_series(n: usize) -> QSeries {
    let mut s = QSeries::one(n);
    for k in 1..=n {
        s.mul_binomial(k, -1);
    }
    s
}

/// Generalized pentagonal exponents `(3k² − k)/2` for all integers `k`,
/// paired with the sign `(−1)^k`, up to `bound`.
fn pentagonal_terms(bound: usize) -> impl Iterator<Item = (usize, i64)> {
    (0i64..)
        .map(|k| (k, (3 * k * k - k) as usize / 2, (3 * k * k + k) as usize / 2))
        .take_while(move |&(_, lo, _)| lo <= bound)
        .flat_map(move |(k, lo, hi)| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            // k and −k; k = 0 has a single term.
            let neg = (k > 0 && hi <= bound).then_some((hi, sign));
            std::iter::once((lo, sign)).chain(neg)
        })
}

/// `Σ_k (−1)^k q^{(3k²−k)/2}` over all integers `k` with exponent `<= N`.
pub fn pentagonal_series(n: usize) -> QSeries {
    QSeries::from_terms(n, pentagonal_terms(n)).expect("terms respect the bound")
}

/// Series in `u = q^{1/24}`: `½ Σ_{n∈ℤ, n² <= N} χ(n) u^{n²}`.
pub fn eta_char_qseries(n: usize) -> QSeries {
    let mut doubled = QSeries::zero(n);
    let bound = (n as f64).sqrt() as i64 + 1;
    for m in -bound..=bound {
        let e = (m * m) as usize;
        let c = chi12(m);
        if e <= n && c != 0 {
            doubled.coeffs[e] += c;
        }
    }
    let coeffs = doubled
        .coeffs
        .into_iter()
        .map(|c| {
            let (q, r) = c.div_rem(&BigInt::from(2));
            assert!(r.is_zero(), "χ-series terms pair up under n -> −n");
            q
        })
        .collect();
    QSeries { coeffs }
}

/// `u · ∏(1 − u^{24n})` to order `N` in `u`: the product side of the
/// character series.
pub fn eta_char_euler_side(n: usize) -> QSeries {
    if n == 0 {
        return QSeries::zero(0);
    }
    euler_product_series((n - 1) / 24)
        .substitute_power(24)
        .shift(1)
        .truncate(n)
}

/// A series in `w` whose `w^m` coefficient is a Laurent polynomial in `z²`
/// supported on `|j| <= m`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiSeries {
    // rows[m][j + m] is the coefficient of w^m z^{2j}.
    rows: Vec<Vec<BigInt>>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        BiSeries {
            rows: (0..=order).map(|m| vec![BigInt::zero(); 2 * m + 1]).collect(),
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.rows[0][0] = BigInt::one();
        s
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// Coefficient of `w^m z^{2j}`; `None` past the truncation order.
    pub fn coeff(&self, m: usize, j: i64) -> Option<BigInt> {
        let row = self.rows.get(m)?;
        if j.unsigned_abs() as usize > m {
            return Some(BigInt::zero());
        }
        Some(row[(j + m as i64) as usize].clone())
    }

    pub fn add_term(&mut self, m: usize, j: i64, c: BigInt) -> Result<(), SeriesError> {
        let order = self.order();
        let row = self
            .rows
            .get_mut(m)
            .ok_or(SeriesError::BeyondOrder { exponent: m, order })?;
        if j.unsigned_abs() as usize > m {
            return Err(SeriesError::LaurentRange { m, j });
        }
        row[(j + m as i64) as usize] += c;
        Ok(())
    }

    /// Nonzero `(m, j, coefficient)` triples in increasing `m`, then `j`.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, i64, &BigInt)> {
        self.rows.iter().enumerate().flat_map(|(m, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(idx, c)| (m, idx as i64 - m as i64, c))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    /// True when every `w^m` coefficient is invariant under `j -> −j`.
    pub fn is_z_symmetric(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().eq(row.iter().rev()))
    }

    /// In-place multiplication by `1 + c·w^e·z^{2j}`.
    fn mul_factor(&mut self, f: BinomialFactor) {
        let e = f.w_exp as usize;
        if e > self.order() {
            return;
        }
        for m in (e..self.rows.len()).rev() {
            let (lo, hi) = self.rows.split_at_mut(m);
            let src = &lo[m - e];
            let dst = &mut hi[0];
            // Source index i (j_s = i − (m−e)) lands at j_s + f.z2_exp.
            let offset = (e as i64 + f.z2_exp) as usize;
            for (i, x) in src.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let slot = &mut dst[i + offset];
                match f.coeff {
                    1 => *slot += x,
                    -1 => *slot -= x,
                    c => *slot += x * c,
                }
            }
        }
    }

    fn product(order: usize, factors: &[BinomialFactor]) -> Self {
        let mut s = Self::one(order);
        for &f in factors {
            s.mul_factor(f);
        }
        s
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        BiSeries { rows }
    }
}

impl fmt::Debug for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiSeries[")?;
        let mut first = true;
        for (m, j, c) in self.nonzero_terms() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{c}w^{m}z^{}", 2 * j)?;
        }
        write!(f, "; O(w^{})]", self.order() + 1)
    }
}

/// `1 + coeff·w^{w_exp}·z^{2·z2_exp}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BinomialFactor {
    w_exp: i64,
    z2_exp: i64,
    coeff: i64,
}

impl BinomialFactor {
    fn check(self) -> Result<Self, SeriesError> {
        if self.w_exp >= 1 && self.z2_exp.abs() <= self.w_exp && self.coeff != 0 {
            Ok(self)
        } else {
            Err(SeriesError::BadFactor {
                w_exp: self.w_exp,
                z2_exp: self.z2_exp,
            })
        }
    }

    /// Image under `z -> w·z`.
    fn shift_z(self) -> Self {
        BinomialFactor {
            w_exp: self.w_exp + 2 * self.z2_exp,
            ..self
        }
    }
}

/// The three factor families of the triple product for `k = 1..=top`.
fn jtp_factor_triples(top: i64) -> Vec<BinomialFactor> {
    (1..=top)
        .flat_map(|k| {
            [
                BinomialFactor { w_exp: 2 * k, z2_exp: 0, coeff: -1 },
                BinomialFactor { w_exp: 2 * k - 1, z2_exp: 1, coeff: 1 },
                BinomialFactor { w_exp: 2 * k - 1, z2_exp: -1, coeff: 1 },
            ]
        })
        .collect()
}

/// The factors of `∏ (1 − w^{2n})(1 + w^{2n−1}z²)(1 + w^{2n−1}z^{−2})` that
/// can reach w-degree `N`.
fn jtp_factors(n: usize) -> Vec<BinomialFactor> {
    jtp_factor_triples((n + 1).div_ceil(2) as i64)
}

/// Product side of the triple product, expanded to w-order `N`.
pub fn jtp_product_side(n: usize) -> BiSeries {
    BiSeries::product(n, &jtp_factors(n))
}

/// `Σ_{k² <= N} w^{k²} z^{2k}`.
pub fn jtp_sum_side(n: usize) -> BiSeries {
    let mut s = BiSeries::zero(n);
    for k in 0i64.. {
        let m = (k * k) as usize;
        if m > n {
            break;
        }
        s.add_term(m, k, BigInt::one()).expect("k <= k²");
        if k != 0 {
            s.add_term(m, -k, BigInt::one()).expect("k <= k²");
        }
    }
    s
}

/// `(z²w)·F(w, wz) − F(w, z)` to w-order `N`, where `F` is the triple
/// product.
///
/// `F(w, wz)` is built by pushing the substitution through every factor.
/// Exactly one factor, `1 + w^{−1}z^{−2}`, leaves the power-series ring; it
/// is absorbed into the `z²w` prefactor, giving `1 + wz²`.
pub fn jtp_shift_residual(n: usize) -> BiSeries {
    let top = (n + 1).div_ceil(2) as i64;
    // z^{-2} factors drop by two in degree, so one more index is needed.
    let shifted_src = jtp_factor_triples(top + 1);

    // Prefactor w^1 z^2, tracked as exponents of w and z².
    let (mut pre_w, mut pre_z) = (1i64, 1i64);
    let mut shifted = Vec::with_capacity(shifted_src.len());
    for f in shifted_src.into_iter().map(BinomialFactor::shift_z) {
        if f.w_exp >= 1 {
            shifted.push(f);
            continue;
        }
        // (1 + M)·M⁻¹ = 1 + M⁻¹: consume M⁻¹ from the prefactor.
        assert_eq!(f.coeff, 1, "only 1 + M absorbs a monomial without a sign");
        pre_w += f.w_exp;
        pre_z += f.z2_exp;
        shifted.push(BinomialFactor {
            w_exp: -f.w_exp,
            z2_exp: -f.z2_exp,
            coeff: 1,
        });
    }
    assert_eq!((pre_w, pre_z), (0, 0), "prefactor must be fully absorbed");

    let shifted: Vec<_> = shifted
        .into_iter()
        .map(|f| f.check().expect("shifted factors are admissible"))
        .collect();
    let lhs = BiSeries::product(n, &shifted);
    let rhs = jtp_product_side(n);
    &lhs - &rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(order: usize, terms: &[(usize, i64)]) -> QSeries {
        QSeries::from_terms(order, terms.iter().copied()).unwrap()
    }

    /// Brute-force expansion of ∏_{n<=top} (1 − q^n) as an untruncated
    /// polynomial, then cut to `order`.
    fn brute_euler(top: usize, order: usize) -> Vec<i64> {
        let mut poly = vec![1i64];
        for n in 1..=top {
            let mut next = vec![0i64; poly.len() + n];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + n] -= c;
            }
            poly = next;
        }
        poly.resize(poly.len().max(order + 1), 0);
        poly.truncate(order + 1);
        poly
    }

    fn as_i64(s: &QSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = q(4, &[(0, 1), (1, -1)]);
        let b = q(4, &[(0, 1), (1, 1)]);
        assert_eq!(&a * &b, q(4, &[(0, 1), (2, -1)]));
    }

    #[test]
    fn mul_identity() {
        let a = q(5, &[(0, 3), (2, -7), (5, 11)]);
        assert_eq!(&a * &QSeries::one(5), a);
    }

    #[test]
    fn mul_three_factors() {
        let f = |n| q(6, &[(0, 1), (n, -1)]);
        let p = &(&f(1) * &f(2)) * &f(3);
        assert_eq!(as_i64(&p), vec![1, -1, -1, 0, 1, 1, -1]);
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let a = q(3, &[(0, 1), (1, 1)]);
        let b = q(7, &[(0, 1), (1, 1)]);
        assert_eq!((&a * &b).order(), 3);
    }

    #[test]
    fn beyond_order_rejected() {
        assert_eq!(
            QSeries::from_terms(2, [(3usize, 1i64)]),
            Err(SeriesError::BeyondOrder { exponent: 3, order: 2 })
        );
        assert!(QSeries::one(2).coeff(3).is_none());
    }

    #[test]
    fn euler_small_orders() {
        assert_eq!(euler_product_series(0), QSeries::one(0));
        assert_eq!(as_i64(&euler_product_series(7)), vec![1, -1, -1, 0, 0, 1, 0, 1]);
        let nz: Vec<_> = euler_product_series(15)
            .nonzero_terms()
            .map(|(e, c)| (e, i64::try_from(c).unwrap()))
            .collect();
        assert_eq!(
            nz,
            vec![(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1), (15, -1)]
        );
    }

    #[test]
    fn euler_matches_brute_force() {
        for n in [0, 1, 5, 30, 80] {
            assert_eq!(as_i64(&euler_product_series(n)), brute_euler(n, n), "N={n}");
        }
    }

    #[test]
    fn euler_matches_repeated_series_mul() {
        let n = 40;
        let mut acc = QSeries::one(n);
        for k in 1..=n {
            acc = &acc * &q(n, &[(0, 1), (k, -1)]);
        }
        assert_eq!(acc, euler_product_series(n));
    }

    #[test]
    fn pentagonal_small() {
        assert_eq!(pentagonal_series(0), QSeries::one(0));
        assert_eq!(pentagonal_series(2), q(2, &[(0, 1), (1, -1), (2, -1)]));
        assert_eq!(
            pentagonal_series(12),
            q(12, &[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)])
        );
    }

    #[test]
    fn pentagonal_theorem_to_2000() {
        let n = 2000;
        assert_eq!(euler_product_series(n), pentagonal_series(n));
    }

    #[test]
    fn euler_coefficients_are_units_or_zero() {
        let s = euler_product_series(3000);
        assert!(s.coeffs().iter().all(|c| c.magnitude() <= &1u32.into()));
    }

    #[test]
    fn substitute_and_shift() {
        let s = q(2, &[(0, 1), (1, -1), (2, 5)]);
        let t = s.substitute_power(3);
        assert_eq!(t.order(), 8);
        assert_eq!(t, q(8, &[(0, 1), (3, -1), (6, 5)]));
        assert_eq!(s.shift(2), q(4, &[(2, 1), (3, -1), (4, 5)]));
    }

    #[test]
    fn char_series_small() {
        assert_eq!(eta_char_qseries(1), q(1, &[(1, 1)]));
        assert_eq!(eta_char_qseries(49), q(49, &[(1, 1), (25, -1), (49, -1)]));
        let s = eta_char_qseries(121);
        assert_eq!(s.coeff(121).map(|c| i64::try_from(c).unwrap()), Some(1));
        assert_eq!(s.coeff(0).map(|c| i64::try_from(c).unwrap()), Some(0));
    }

    #[test]
    fn char_series_matches_euler_side() {
        for n in [0, 1, 24, 25, 49, 120, 121, 600] {
            assert_eq!(eta_char_qseries(n), eta_char_euler_side(n), "N={n}");
        }
    }

    #[test]
    fn jtp_low_orders() {
        let p0 = jtp_product_side(0);
        assert_eq!(p0.coeff(0, 0), Some(BigInt::one()));
        let p1 = jtp_product_side(1);
        assert_eq!(p1.coeff(1, 1), Some(BigInt::one()));
        assert_eq!(p1.coeff(1, -1), Some(BigInt::one()));
        assert_eq!(p1.coeff(1, 0), Some(BigInt::zero()));
        let p4 = jtp_product_side(4);
        let w4: Vec<_> = (-4..=4).map(|j| p4.coeff(4, j).unwrap()).collect();
        let mut expected = vec![BigInt::zero(); 9];
        // w^4 comes only from q^{n^2} z^{2n} with n = ±2.
        expected[2] = BigInt::one();
        expected[6] = BigInt::one();
        assert_eq!(w4, expected);
    }

    #[test]
    fn jtp_sum_side_terms() {
        let s = jtp_sum_side(3);
        let terms: Vec<_> = s.nonzero_terms().map(|(m, j, _)| (m, j)).collect();
        assert_eq!(terms, vec![(0, 0), (1, -1), (1, 1)]);
        let s = jtp_sum_side(9);
        let terms: Vec<_> = s.nonzero_terms().map(|(m, j, _)| (m, j)).collect();
        assert_eq!(
            terms,
            vec![(0, 0), (1, -1), (1, 1), (4, -2), (4, 2), (9, -3), (9, 3)]
        );
    }

    /// Brute force: enumerate every subset choice of the factors as a map
    /// (m, j) -> coefficient, with no truncation until the end.
    fn brute_jtp(order: usize) -> std::collections::BTreeMap<(usize, i64), i64> {
        use std::collections::BTreeMap;
        let mut poly: BTreeMap<(usize, i64), i64> = BTreeMap::new();
        poly.insert((0, 0), 1);
        for f in jtp_factors(order) {
            let mut next = poly.clone();
            for (&(m, j), &c) in &poly {
                let key = (m + f.w_exp as usize, j + f.z2_exp);
                *next.entry(key).or_default() += c * f.coeff;
            }
            next.retain(|&(m, _), c| m <= order && *c != 0);
            poly = next;
        }
        poly
    }

    #[test]
    fn jtp_product_matches_brute_force() {
        let order = 12;
        let brute = brute_jtp(order);
        let fast = jtp_product_side(order);
        let got: std::collections::BTreeMap<_, _> = fast
            .nonzero_terms()
            .map(|(m, j, c)| ((m, j), i64::try_from(c).unwrap()))
            .collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn jtp_identity_to_60() {
        assert_eq!(jtp_product_side(60), jtp_sum_side(60));
    }

    #[test]
    fn shift_residual_vanishes() {
        for n in [0, 1, 2, 10, 40] {
            assert!(jtp_shift_residual(n).is_zero(), "N={n}");
        }
    }

    #[test]
    fn shifting_the_wrong_way_is_detected() {
        // Sanity check that the residual machinery can fail: dropping the
        // absorbed factor breaks the relation.
        let n = 6;
        let original = jtp_factors(n);
        let wrong: Vec<_> = original.iter().map(|f| f.shift_z()).filter(|f| f.w_exp >= 1).collect();
        let diff = &BiSeries::product(n, &wrong) - &BiSeries::product(n, &original);
        assert!(!diff.is_zero());
    }

    #[test]
    fn laurent_range_enforced() {
        let mut s = BiSeries::zero(3);
        assert_eq!(
            s.add_term(2, 3, BigInt::one()),
            Err(SeriesError::LaurentRange { m: 2, j: 3 })
        );
        assert!(s.add_term(4, 0, BigInt::one()).is_err());
        assert!(BinomialFactor { w_exp: 1, z2_exp: 2, coeff: 1 }.check().is_err());
    }

    proptest! {
        #[test]
        fn both_jtp_sides_symmetric(n in 0usize..40) {
            prop_assert!(jtp_product_side(n).is_z_symmetric());
            prop_assert!(jtp_sum_side(n).is_z_symmetric());
        }

        #[test]
        fn mul_commutes(
            a in proptest::collection::vec(-5i64..5, 1..12),
            b in proptest::collection::vec(-5i64..5, 1..12),
        ) {
            let sa = QSeries::from_terms(a.len() - 1, a.iter().copied().enumerate()).unwrap();
            let sb = QSeries::from_terms(b.len() - 1, b.iter().copied().enumerate()).unwrap();
            prop_assert_eq!(&sa * &sb, &sb * &sa);
        }
    }
}
