//! Double-precision evaluation of η and of the theta/Poisson identities.
//!
//! Every evaluator reports a `tail_bound`: an absolute bound on the
//! truncation error (rounding is not included), already multiplied by a
//! safety factor of 2. Evaluators stop as soon as
//! `tail_bound <= tol · |value|`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::character::chi12;
use crate::dedekind::{self, DedekindError};
use crate::modgroup::{reduce_to_fundamental_domain, ModGroupError, ModularMatrix, UpperHalfPoint};

/// Default relative tolerance for the evaluators.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Most factors or terms any single evaluation may use.
pub const TERM_BUDGET: usize = 10_000_000;

/// Below this imaginary part the direct series are abandoned in favour of
/// reduction to the fundamental domain.
pub const TRANSFORM_THRESHOLD: f64 = 0.05;

const SAFETY: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("series would need more than {budget} terms (estimated {needed}); use the transformed evaluator")]
    Budget { needed: f64, budget: usize },
    #[error("series terms overflow double precision for these parameters")]
    Overflow,
    #[error("transformation factor needs c > 0, got c = {0}")]
    NonPositiveC(BigInt),
    #[error(transparent)]
    ModGroup(#[from] ModGroupError),
    #[error(transparent)]
    Dedekind(#[from] DedekindError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

fn check_tol(tol: f64) -> Result<(), EvalError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(EvalError::BadTolerance(tol))
    }
}

enum Stop {
    Absolute(f64),
    Relative(f64),
}

impl Stop {
    fn satisfied(&self, tail: f64, sum: Complex64) -> bool {
        match *self {
            Stop::Absolute(t) => tail <= t,
            Stop::Relative(t) => tail <= t * sum.norm(),
        }
    }
}

/// `Σ_{n∈ℤ} weight(n)·exp(α n² + β n + γ)` with `Re α < 0` and
/// `|weight| <= weight_bound`.
///
/// Terms are added outward from the peak of the real part of the exponent.
/// Beyond the peak consecutive term ratios on each side are at most
/// `e^{−δ}` for an explicit `δ > 0`, which gives the geometric tail bound.
fn lattice_sum(
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    weight: impl Fn(i64) -> f64,
    weight_bound: f64,
    stop: Stop,
) -> Result<EvalResult, EvalError> {
    let a = -alpha.re;
    debug_assert!(a > 0.0);
    let b = beta.re;
    let peak = b / (2.0 * a);
    if !peak.is_finite() || peak.abs() > 1e15 {
        return Err(EvalError::Overflow);
    }
    let center = peak.round() as i64;
    let log_mag = |n: f64| -a * n * n + b * n + gamma.re;
    let term = |n: i64| {
        let w = weight(n);
        if w == 0.0 {
            return Complex64::zero();
        }
        let x = n as f64;
        (alpha * (x * x) + beta * x + gamma).exp() * w
    };

    let mut sum = term(center);
    let mut terms = 1usize;
    let mut radius = 0i64;
    loop {
        if !sum.re.is_finite() || !sum.im.is_finite() {
            return Err(EvalError::Overflow);
        }
        let right = (center + radius + 1) as f64;
        let left = (center - radius - 1) as f64;
        let delta_r = 2.0 * a * (right - peak) + a;
        let delta_l = 2.0 * a * (peak - left) + a;
        let tail_r = log_mag(right).exp() / -(-delta_r).exp_m1();
        let tail_l = log_mag(left).exp() / -(-delta_l).exp_m1();
        let tail = SAFETY * weight_bound * (tail_r + tail_l);
        if stop.satisfied(tail, sum) && tail.is_finite() {
            return Ok(EvalResult {
                value: sum,
                tail_bound: tail,
                terms_used: terms,
            });
        }
        if terms >= TERM_BUDGET {
            return Err(EvalError::Budget {
                needed: f64::INFINITY,
                budget: TERM_BUDGET,
            });
        }
        radius += 1;
        sum += term(center + radius) + term(center - radius);
        terms += 2;
    }
}

/// `e^{πi·k/12}` for an integer `k`, reduced mod 24 before going to floats.
pub fn phase_twelfths(k: &BigInt) -> Complex64 {
    let r = k.mod_floor(&BigInt::from(24)).to_f64().unwrap();
    Complex64::from_polar(1.0, PI * r / 12.0)
}

/// `η(τ) = e^{πiτ/12} ∏_{n>=1} (1 − q^n)`, `q = e^{2πiτ}`.
///
/// With `s = |q|^{N+1}/(1 − |q|)` the omitted factors change the product by
/// a relative amount at most `e^s − 1`; `N` is the smallest count making
/// that at most `tol/2`.
pub fn eta_product_eval(tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    check_tol(tol)?;
    let t = tau.as_complex();
    let log_q = -2.0 * PI * tau.im();
    let abs_q = log_q.exp();
    let target = (tol / SAFETY).ln_1p() * -(log_q.exp_m1());
    let needed = (target.ln() / log_q).ceil() - 1.0;
    let n = needed.max(1.0);
    if n.is_nan() || n > TERM_BUDGET as f64 {
        return Err(EvalError::Budget {
            needed: n,
            budget: TERM_BUDGET,
        });
    }
    let n = n as usize;
    let two_pi_i_tau = Complex64::new(0.0, 2.0 * PI) * t;
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        prod *= Complex64::new(1.0, 0.0) - (two_pi_i_tau * k as f64).exp();
    }
    let value = (Complex64::new(0.0, PI / 12.0) * t).exp() * prod;
    let s = abs_q.powi(n as i32 + 1) / (1.0 - abs_q);
    Ok(EvalResult {
        value,
        tail_bound: SAFETY * value.norm() * s.exp_m1(),
        terms_used: n,
    })
}

/// `η(τ) = Σ_n (−1)^n e^{3πiτ(n + 1/6)²}`.
pub fn eta_pentagonal_eval(tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    check_tol(tol)?;
    let t = tau.as_complex();
    let i_pi = Complex64::new(0.0, PI);
    // 3πiτ(n + 1/6)² + πin = 3πiτ·n² + (πiτ + πi)·n + πiτ/12
    lattice_sum(
        i_pi * t * 3.0,
        i_pi * t + i_pi,
        i_pi * t / 12.0,
        |_| 1.0,
        1.0,
        Stop::Relative(tol),
    )
}

/// `η(τ) = ½ Σ_{n∈ℤ} χ(n) e^{πiτn²/12}` with χ the character mod 12.
pub fn eta_char_eval(tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    check_tol(tol)?;
    let t = tau.as_complex();
    lattice_sum(
        Complex64::new(0.0, PI / 12.0) * t,
        Complex64::zero(),
        Complex64::zero(),
        |n| 0.5 * f64::from(chi12(n)),
        0.5,
        Stop::Relative(tol),
    )
}

/// `(1/√12) Σ_{m=1}^{12} χ(m) e^{2πimn/12}`, which equals `χ(n)`.
pub fn chi_gauss_sum(n: i64) -> Complex64 {
    // The angle is reduced exactly in integers before conversion.
    let total: Complex64 = (1..=12i64)
        .map(|m| {
            let turn = (m * n).rem_euclid(12) as f64;
            Complex64::from_polar(f64::from(chi12(m)), 2.0 * PI * turn / 12.0)
        })
        .sum();
    total / 12f64.sqrt()
}

/// The factor `e^{πiω/12}·{−i(cτ + d)}^{1/2}` relating `η(Mτ)` to `η(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformContext {
    pub matrix: ModularMatrix,
    pub omega: BigInt,
    /// `ω/12` reduced mod 2.
    pub multiplier_phase: BigRational,
    /// Principal square root of `−i(cτ + d)`.
    pub sqrt_factor: Complex64,
}

impl TransformContext {
    pub fn factor(&self) -> Complex64 {
        phase_twelfths(&self.omega) * self.sqrt_factor
    }
}

fn context_with_sqrt_arg(m: &ModularMatrix, j: Complex64) -> Result<TransformContext, EvalError> {
    if !m.c().is_positive() {
        return Err(EvalError::NonPositiveC(m.c().clone()));
    }
    let omega = dedekind::omega(m.a(), m.b(), m.c(), m.d())?;
    let reduced = omega.mod_floor(&BigInt::from(24));
    // −i(cτ + d) has real part c·Im τ > 0, so the principal root is continuous.
    let sqrt_factor = (Complex64::new(0.0, -1.0) * j).sqrt();
    Ok(TransformContext {
        matrix: m.clone(),
        omega,
        multiplier_phase: BigRational::new(reduced, BigInt::from(12)),
        sqrt_factor,
    })
}

/// Transformation data for `M` at `τ`; requires `c > 0`.
pub fn transform_factor(m: &ModularMatrix, tau: UpperHalfPoint) -> Result<TransformContext, EvalError> {
    context_with_sqrt_arg(m, m.denominator_at(tau))
}

/// `η(τ)` for any `τ ∈ ℍ`: reduce to the fundamental domain, sum the
/// pentagonal series there, then undo the transformation.
pub fn eta_transformed_eval(tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    check_tol(tol)?;
    let (reduced, m) = reduce_to_fundamental_domain(tau)?;
    let inner = eta_pentagonal_eval(reduced, tol)?;
    let factor = if m.c().is_zero() {
        // M = T^b: η(τ + b) = e^{πib/12} η(τ)
        phase_twelfths(m.b())
    } else {
        transform_factor(&m, tau)?.factor()
    };
    Ok(EvalResult {
        value: inner.value / factor,
        tail_bound: inner.tail_bound / factor.norm(),
        terms_used: inner.terms_used,
    })
}

/// `η(τ)`, switching to [`eta_transformed_eval`] below
/// [`TRANSFORM_THRESHOLD`].
pub fn eta_eval(tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    if tau.im() < TRANSFORM_THRESHOLD {
        eta_transformed_eval(tau, tol)
    } else {
        eta_pentagonal_eval(tau, tol)
    }
}

/// `η(Mτ)` without rounding `Mτ` first.
///
/// When `Im(Mτ)` is tiny the floating-point image has lost most of its
/// imaginary part, so instead `τ` itself is reduced by `R'` and
/// `R = R'·M⁻¹` carries `Mτ` to the same reduced point. The square-root
/// argument `c_R·Mτ + d_R` is recovered exactly from integer entries as
/// `(c_{RM}·τ + d_{RM}) / (cτ + d)`.
pub fn eta_image_eval(m: &ModularMatrix, tau: UpperHalfPoint, tol: f64) -> Result<EvalResult, EvalError> {
    check_tol(tol)?;
    let image = m.apply(tau);
    if image.im() >= TRANSFORM_THRESHOLD {
        return eta_pentagonal_eval(image, tol);
    }
    let (reduced, r_prime) = reduce_to_fundamental_domain(tau)?;
    let inner = eta_pentagonal_eval(reduced, tol)?;
    let r = r_prime.compose(&m.inverse());
    let factor = if r.c().is_zero() {
        phase_twelfths(r.b())
    } else {
        // Bottom row of the uncanonicalized product R·M.
        let c_rm = r.c() * m.a() + r.d() * m.c();
        let d_rm = r.c() * m.b() + r.d() * m.d();
        let num = tau.as_complex() * c_rm.to_f64().unwrap() + d_rm.to_f64().unwrap();
        let j = num / m.denominator_at(tau);
        context_with_sqrt_arg(&r, j)?.factor()
    };
    Ok(EvalResult {
        value: inner.value / factor,
        tail_bound: inner.tail_bound / factor.norm(),
        terms_used: inner.terms_used,
    })
}

/// `|η(Mτ) − e^{πiω/12}{−i(cτ+d)}^{1/2} η(τ)| / |η(τ)|` for `c > 0`.
pub fn functional_eq_residual(m: &ModularMatrix, tau: UpperHalfPoint, tol: f64) -> Result<f64, EvalError> {
    let ctx = transform_factor(m, tau)?;
    let base = eta_eval(tau, tol)?;
    let image = eta_image_eval(m, tau, tol)?;
    Ok((image.value - ctx.factor() * base.value).norm() / base.value.norm())
}

/// `|H1 − H2|` with
/// `H1 = Σ e^{−2πi(n+z)w} e^{πiτ(n+z)²}` and
/// `H2 = (−iτ)^{−1/2} Σ e^{2πinz} e^{−πi(n+w)²/τ}`.
pub fn theta_identity_residual(
    tau: Complex64,
    z: Complex64,
    w: Complex64,
    tol: f64,
) -> Result<f64, EvalError> {
    check_tol(tol)?;
    if tau.im.is_nan() || tau.im <= 0.0 {
        return Err(EvalError::NonPositive {
            name: "Im tau",
            value: tau.im,
        });
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let pi_i = Complex64::new(0.0, PI);
    let h1 = lattice_sum(
        pi_i * tau,
        two_pi_i * tau * z - two_pi_i * w,
        pi_i * tau * z * z - two_pi_i * z * w,
        |_| 1.0,
        1.0,
        Stop::Absolute(tol),
    )?;
    let pre = (Complex64::new(0.0, -1.0) * tau).sqrt().inv();
    let h2 = lattice_sum(
        -pi_i / tau,
        two_pi_i * z - two_pi_i * w / tau,
        -pi_i * w * w / tau,
        |_| 1.0,
        1.0,
        Stop::Absolute(tol / pre.norm()),
    )?;
    Ok((h1.value - pre * h2.value).norm())
}

/// Both sides of
/// `Σ e^{−2πi(n+a)b} e^{−πu(n+a)²} = u^{−1/2} Σ e^{2πina} e^{−π(n+b)²/u}`.
pub fn gaussian_poisson_residual(u: f64, a: f64, b: f64, tol: f64) -> Result<f64, EvalError> {
    check_tol(tol)?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(EvalError::NonPositive { name: "u", value: u });
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let lhs = lattice_sum(
        Complex64::new(-PI * u, 0.0),
        Complex64::new(-2.0 * PI * u * a, 0.0) - two_pi_i * b,
        Complex64::new(-PI * u * a * a, 0.0) - two_pi_i * (a * b),
        |_| 1.0,
        1.0,
        Stop::Absolute(tol),
    )?;
    let scale = u.sqrt().recip();
    let rhs = lattice_sum(
        Complex64::new(-PI / u, 0.0),
        two_pi_i * a - Complex64::new(2.0 * PI * b / u, 0.0),
        Complex64::new(-PI * b * b / u, 0.0),
        |_| 1.0,
        1.0,
        Stop::Absolute(tol / scale),
    )?;
    Ok((lhs.value - rhs.value * scale).norm())
}
