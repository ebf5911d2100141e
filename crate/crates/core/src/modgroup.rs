//! The modular group PSL(2, ℤ) acting on the upper half-plane.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModGroupError {
    #[error("determinant is {0}, expected 1")]
    NotUnimodular(BigInt),
    #[error("imaginary part must be positive and finite, got {0}")]
    NotInUpperHalfPlane(f64),
    #[error("real part must be finite, got {0}")]
    NonFinite(f64),
    #[error("fundamental-domain reduction did not settle within {0} steps")]
    ReductionBudget(usize),
}

/// A point `τ` with `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint(Complex64);

impl UpperHalfPoint {
    pub fn new(re: f64, im: f64) -> Result<Self, ModGroupError> {
        if !re.is_finite() {
            return Err(ModGroupError::NonFinite(re));
        }
        if !(im > 0.0 && im.is_finite()) {
            return Err(ModGroupError::NotInUpperHalfPlane(im));
        }
        Ok(UpperHalfPoint(Complex64::new(re, im)))
    }

    pub fn from_complex(z: Complex64) -> Result<Self, ModGroupError> {
        Self::new(z.re, z.im)
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn as_complex(self) -> Complex64 {
        self.0
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

fn to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::NAN)
}

/// An element of PSL(2, ℤ), stored as the representative with `c > 0`, or
/// `c = 0` and `d > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModularMatrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl ModularMatrix {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, ModGroupError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(ModGroupError::NotUnimodular(det));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        if c.is_negative() || (c.is_zero() && d.is_negative()) {
            ModularMatrix {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            ModularMatrix { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::translation(0)
    }

    /// `S: τ ↦ −1/τ`.
    pub fn s() -> Self {
        Self::canonical(0.into(), (-1).into(), 1.into(), 0.into())
    }

    /// `T^m: τ ↦ τ + m`.
    pub fn translation(m: impl Into<BigInt>) -> Self {
        Self::canonical(1.into(), m.into(), 0.into(), 1.into())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Largest absolute entry.
    pub fn height(&self) -> BigInt {
        self.entries().into_iter().map(|x| x.abs()).max().unwrap()
    }

    pub fn compose(&self, rhs: &ModularMatrix) -> ModularMatrix {
        Self::canonical(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> ModularMatrix {
        Self::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// `cτ + d`.
    pub fn denominator_at(&self, tau: UpperHalfPoint) -> Complex64 {
        tau.as_complex() * to_f64(&self.c) + to_f64(&self.d)
    }

    /// `(aτ + b)/(cτ + d)`.
    ///
    /// For `c ≠ 0` this is evaluated as `a/c − 1/(c(cτ + d))`, which keeps the
    /// imaginary part at `Im τ / |cτ + d|²` even when the entries are large.
    pub fn apply(&self, tau: UpperHalfPoint) -> UpperHalfPoint {
        let t = tau.as_complex();
        let z = if self.c.is_zero() {
            (t * to_f64(&self.a) + to_f64(&self.b)) / to_f64(&self.d)
        } else {
            let c = to_f64(&self.c);
            let den = self.denominator_at(tau);
            let re = to_f64(&self.a) / c - (den.conj() / (c * den.norm_sqr())).re;
            Complex64::new(re, tau.im() / den.norm_sqr())
        };
        debug_assert!(z.im > 0.0, "Möbius image left the upper half-plane");
        UpperHalfPoint(z)
    }
}

impl Mul for &ModularMatrix {
    type Output = ModularMatrix;
    fn mul(self, rhs: &ModularMatrix) -> ModularMatrix {
        self.compose(rhs)
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

/// `apply_mobius(M, τ)`.
pub fn apply_mobius(m: &ModularMatrix, tau: UpperHalfPoint) -> UpperHalfPoint {
    m.apply(tau)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    S,
    /// `T^m` with `m ≠ 0`.
    T(BigInt),
}

impl Generator {
    pub fn matrix(&self) -> ModularMatrix {
        match self {
            Generator::S => ModularMatrix::s(),
            Generator::T(m) => ModularMatrix::translation(m.clone()),
        }
    }
}

/// A product of generators, read left to right.
///
/// Adjacent T-powers are merged, zero powers dropped, and `S·S` cancelled.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneratorWord(Vec<Generator>);

impl GeneratorWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push_s(&mut self) {
        if self.0.last() == Some(&Generator::S) {
            self.0.pop();
        } else {
            self.0.push(Generator::S);
        }
    }

    pub fn push_t(&mut self, m: impl Into<BigInt>) {
        let m = m.into();
        if m.is_zero() {
            return;
        }
        if let Some(Generator::T(prev)) = self.0.last_mut() {
            *prev += m;
            if prev.is_zero() {
                self.0.pop();
            }
        } else {
            self.0.push(Generator::T(m));
        }
    }

    pub fn push(&mut self, g: Generator) {
        match g {
            Generator::S => self.push_s(),
            Generator::T(m) => self.push_t(m),
        }
    }

    pub fn extend(&mut self, other: GeneratorWord) {
        for g in other.0 {
            self.push(g);
        }
    }
}

impl FromIterator<Generator> for GeneratorWord {
    fn from_iter<I: IntoIterator<Item = Generator>>(iter: I) -> Self {
        let mut w = GeneratorWord::new();
        for g in iter {
            w.push(g);
        }
        w
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match g {
                Generator::S => write!(f, "S")?,
                Generator::T(m) if m.is_one() => write!(f, "T")?,
                Generator::T(m) => write!(f, "T^{m}")?,
            }
        }
        Ok(())
    }
}

/// Canonical product of the word's factors.
pub fn evaluate_word(word: &GeneratorWord) -> ModularMatrix {
    word.0
        .iter()
        .fold(ModularMatrix::identity(), |acc, g| acc.compose(&g.matrix()))
}

/// Factors `M` into S and T-powers by induction on `c`.
pub fn decompose(m: &ModularMatrix) -> GeneratorWord {
    decompose_with_depth(m).0
}

/// As [`decompose`], also returning the number of induction levels visited
/// (the `c = 0` and `c = 1` base cases count as one level).
///
/// With `d = cq − r`, `0 < r < c`, `u = aq − b` the matrix splits as
/// `(u, a; r, c)·S·T^q`, and the first factor has a strictly smaller
/// lower-left entry.
pub fn decompose_with_depth(m: &ModularMatrix) -> (GeneratorWord, usize) {
    let (mut a, mut b, mut c, mut d) = (m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone());
    // Suffixes S·T^q, innermost last.
    let mut tails: Vec<BigInt> = Vec::new();
    let mut word = GeneratorWord::new();
    loop {
        if c.is_zero() {
            // Canonical with c = 0 means a = d = 1.
            word.push_t(b);
            break;
        }
        if c.is_one() {
            word.push_t(a);
            word.push_s();
            word.push_t(d);
            break;
        }
        let r = (-&d).mod_floor(&c);
        assert!(!r.is_zero(), "gcd(c, d) = 1 with c >= 2 rules out c | d");
        let q = (&d + &r) / &c;
        let u = &a * &q - &b;
        tails.push(q);
        (a, b, c, d) = (u, a, r, c);
    }
    let depth = tails.len() + 1;
    for q in tails.into_iter().rev() {
        word.push_s();
        word.push_t(q);
    }
    (word, depth)
}

/// Iteration cap for [`reduce_to_fundamental_domain`].
pub const REDUCTION_STEP_LIMIT: usize = 10_000;

/// Moves `τ` into `|Re τ| <= 1/2`, `|τ| >= 1` by alternating translations and
/// inversions. Returns the reduced point and the matrix `M` with
/// `M·τ = τ_reduced`. Boundary points are left wherever they land.
pub fn reduce_to_fundamental_domain(
    tau: UpperHalfPoint,
) -> Result<(UpperHalfPoint, ModularMatrix), ModGroupError> {
    let mut z = tau.as_complex();
    let mut m = ModularMatrix::identity();
    for _ in 0..REDUCTION_STEP_LIMIT {
        let n = z.re.round();
        if n != 0.0 {
            z.re -= n;
            m = ModularMatrix::translation(BigInt::from(-(n as i64))).compose(&m);
        }
        // Invert only when clearly inside the unit circle; the slack keeps
        // points on |τ| = 1 from bouncing forever.
        if z.norm_sqr() < 1.0 - 1e-14 {
            z = -z.inv();
            m = ModularMatrix::s().compose(&m);
        } else {
            let point = UpperHalfPoint::from_complex(z)?;
            return Ok((point, m));
        }
    }
    Err(ModGroupError::ReductionBudget(REDUCTION_STEP_LIMIT))
}

/// A random element built as `T^{e_1} S T^{e_2} S … T^{e_n}` with
/// `n ∈ [1, 30]` and `e_i ∈ [−9, 9]`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R) -> ModularMatrix {
    let n = rng.random_range(1..=30);
    let mut acc = ModularMatrix::identity();
    for i in 0..n {
        if i > 0 {
            acc = acc.compose(&ModularMatrix::s());
        }
        let e: i64 = rng.random_range(-9..=9);
        acc = acc.compose(&ModularMatrix::translation(e));
    }
    acc
}

/// Draws from [`random_matrix`] until the result has `c > 0` and every entry
/// is at most `max_entry` in absolute value.
pub fn random_matrix_with_positive_c<R: Rng + ?Sized>(
    rng: &mut R,
    max_entry: i64,
) -> ModularMatrix {
    let bound = BigInt::from(max_entry);
    loop {
        let m = random_matrix(rng);
        if m.c.is_positive() && m.height() <= bound {
            return m;
        }
    }
}

/// Steps taken by the induction in [`decompose`] on `(r, c)`: the number of
/// times `(c, r) ↦ (r, (−c) mod r)` runs before `r` reaches zero.
pub fn ceiling_euclid_steps(c: &BigInt, d: &BigInt) -> usize {
    let mut c = c.clone();
    let mut r = (-d).mod_floor(&c);
    let mut steps = 0;
    while !r.is_zero() {
        let next = (-&c).mod_floor(&r);
        c = r;
        r = next;
        steps += 1;
    }
    steps
}
