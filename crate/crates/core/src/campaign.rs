//! Verification campaigns: exhaustive or seeded-random sweeps over one
//! identity each, summarised as a [`VerificationReport`].
//!
//! Trial inputs are drawn sequentially from a `ChaCha8Rng` seeded with the
//! campaign seed, then evaluated through [`crate::par::map`]. Aggregation
//! takes a maximum and a sorted failure list, so the report does not depend
//! on the execution order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dedekind::{
    dedekind_sum_fast, dedekind_sum_naive, floor_square_sum_check, floor_sum_check, omega,
    omega_by_induction, reciprocity_rhs,
};
use crate::eval::{
    eta_pentagonal_eval, eta_transformed_eval, functional_eq_residual, gaussian_poisson_residual,
    theta_identity_residual,
};
use crate::modgroup::{random_matrix_with_positive_c, ModularMatrix, UpperHalfPoint};
use crate::par::{self, Execution};
use crate::qseries::{
    eta_char_euler_side, eta_char_qseries, euler_product_series, jtp_product_side,
    jtp_shift_residual, jtp_sum_side, pentagonal_series, QSeries,
};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// Largest matrix entry drawn in random-matrix campaigns.
pub const MAX_RANDOM_ENTRY: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Jtp,
    Pentagonal,
    Reciprocity,
    FunctionalEq,
    Theta,
    Poisson,
    Omega,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Jtp,
        Suite::Pentagonal,
        Suite::Reciprocity,
        Suite::FunctionalEq,
        Suite::Theta,
        Suite::Poisson,
        Suite::Omega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jtp => "jtp",
            Suite::Pentagonal => "pentagonal",
            Suite::Reciprocity => "reciprocity",
            Suite::FunctionalEq => "functional-eq",
            Suite::Theta => "theta",
            Suite::Poisson => "poisson",
            Suite::Omega => "omega",
        }
    }

    /// Pass threshold on the residual. Exact suites use zero.
    pub fn default_threshold(self) -> f64 {
        match self {
            Suite::FunctionalEq => 1e-10,
            Suite::Theta | Suite::Poisson => 1e-12,
            _ => 0.0,
        }
    }

    pub fn default_order(self) -> usize {
        match self {
            Suite::Jtp => 200,
            Suite::Pentagonal => 10_000,
            Suite::Reciprocity => 500,
            _ => 0,
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::FunctionalEq => 1000,
            Suite::Theta | Suite::Poisson => 200,
            Suite::Omega => 10_000,
            _ => 0,
        }
    }

    fn is_exact(self) -> bool {
        self.default_threshold() == 0.0
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignConfig {
    /// Overrides the suite's pass threshold (ignored by exact suites).
    pub tolerance: Option<f64>,
    pub order: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub execution: Execution,
}


#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub input: String,
    /// `None` when the residual could not be computed; see `error`.
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub campaign: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub failures: Vec<Failure>,
    pub seed: u64,
    /// Left out of JSON so that reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of one check.
struct Outcome {
    input: String,
    residual: Result<f64, String>,
}

impl Outcome {
    fn ok(input: impl Into<String>, residual: f64) -> Self {
        Outcome {
            input: input.into(),
            residual: Ok(residual),
        }
    }

    fn from_result<E: fmt::Display>(input: impl Into<String>, r: Result<f64, E>) -> Self {
        Outcome {
            input: input.into(),
            residual: r.map_err(|e| e.to_string()),
        }
    }
}

/// Running summary; merging is associative and order-independent.
#[derive(Default)]
struct Tally {
    trials: usize,
    max_residual: f64,
    failures: Vec<Failure>,
}

impl Tally {
    fn record(&mut self, o: Outcome, threshold: f64) {
        self.trials += 1;
        match o.residual {
            // NaN fails the comparison and is reported as a failure.
            Ok(r) if r <= threshold => self.max_residual = self.max_residual.max(r),
            Ok(r) => {
                self.max_residual = if r.is_nan() { f64::INFINITY } else { self.max_residual.max(r) };
                self.failures.push(Failure {
                    input: o.input,
                    residual: r.is_finite().then_some(r),
                    error: None,
                });
            }
            Err(e) => {
                self.max_residual = f64::INFINITY;
                self.failures.push(Failure {
                    input: o.input,
                    residual: None,
                    error: Some(e),
                });
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.failures.extend(other.failures);
        self
    }

    fn into_report(mut self, suite: Suite, seed: u64, threshold: f64, start: Instant) -> VerificationReport {
        self.failures.sort_by(|a, b| a.input.cmp(&b.input));
        VerificationReport {
            schema: REPORT_SCHEMA,
            campaign: suite.name().to_string(),
            trials: self.trials,
            tolerance: threshold,
            max_residual: self.max_residual,
            failures: self.failures,
            seed,
            wall_time: start.elapsed(),
        }
    }
}

fn tally_of(outcomes: impl IntoIterator<Item = Outcome>, threshold: f64) -> Tally {
    let mut t = Tally::default();
    for o in outcomes {
        t.record(o, threshold);
    }
    t
}

fn rational_gap(a: &BigRational, b: &BigRational) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        0.0
    } else {
        // Nonzero but possibly below f64 resolution; never report 0.
        d.to_f64().unwrap_or(f64::INFINITY).max(f64::MIN_POSITIVE)
    }
}

fn int_gap(a: &BigInt, b: &BigInt) -> f64 {
    rational_gap(&BigRational::from_integer(a.clone()), &BigRational::from_integer(b.clone()))
}

fn mismatches(a: &QSeries, b: &QSeries) -> f64 {
    if a.order() != b.order() {
        return f64::INFINITY;
    }
    a.coeffs().iter().zip(b.coeffs()).filter(|(x, y)| x != y).count() as f64
}

/// Runs one campaign.
pub fn run_suite(suite: Suite, cfg: &CampaignConfig) -> VerificationReport {
    let start = Instant::now();
    let threshold = if suite.is_exact() {
        0.0
    } else {
        cfg.tolerance.unwrap_or(suite.default_threshold())
    };
    // Truncation error is kept well below the pass threshold.
    let eval_tol = (threshold * 1e-3).max(1e-16);
    let order = cfg.order.unwrap_or(suite.default_order());
    let trials = cfg.trials.unwrap_or(suite.default_trials());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let exec = cfg.execution;

    let tally = match suite {
        Suite::Jtp => jtp_campaign(order),
        Suite::Pentagonal => pentagonal_campaign(order),
        Suite::Reciprocity => reciprocity_campaign(order, exec),
        Suite::FunctionalEq => functional_eq_campaign(&mut rng, trials, eval_tol, threshold, exec),
        Suite::Theta => theta_campaign(&mut rng, trials, eval_tol, threshold, exec),
        Suite::Poisson => poisson_campaign(&mut rng, trials, eval_tol, threshold, exec),
        Suite::Omega => omega_campaign(&mut rng, trials, exec),
    };
    tally.into_report(suite, cfg.seed, threshold, start)
}

/// Runs every campaign in [`Suite::ALL`] order.
pub fn run_all(cfg: &CampaignConfig) -> Vec<VerificationReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, cfg)).collect()
}

fn jtp_campaign(order: usize) -> Tally {
    let product = jtp_product_side(order);
    let sum = jtp_sum_side(order);
    let diff = &product - &sum;
    let shift = jtp_shift_residual(order);
    tally_of(
        [
            Outcome::ok(
                format!("product = sum to w^{order}"),
                diff.nonzero_terms().count() as f64,
            ),
            Outcome::ok(
                format!("shift relation to w^{order}"),
                shift.nonzero_terms().count() as f64,
            ),
            Outcome::ok("product symmetric in j", f64::from(u8::from(!product.is_z_symmetric()))),
            Outcome::ok("sum symmetric in j", f64::from(u8::from(!sum.is_z_symmetric()))),
        ],
        0.0,
    )
}

fn pentagonal_campaign(order: usize) -> Tally {
    let euler = euler_product_series(order);
    let pent = pentagonal_series(order);
    let out_of_range = euler
        .coeffs()
        .iter()
        .filter(|c| c.magnitude() > &One::one())
        .count();
    tally_of(
        [
            Outcome::ok(format!("euler = pentagonal to q^{order}"), mismatches(&euler, &pent)),
            Outcome::ok(format!("euler coefficients in {{-1,0,1}} to q^{order}"), out_of_range as f64),
            Outcome::ok(
                format!("character series = u*euler(u^24) to u^{order}"),
                mismatches(&eta_char_qseries(order), &eta_char_euler_side(order)),
            ),
        ],
        0.0,
    )
}

fn coprime(h: i64, k: i64) -> bool {
    h.gcd(&k) == 1
}

/// Exhaustive lemma checks. Reciprocity runs over all coprime pairs up to
/// `bound`; the naive-oracle comparison up to 300; the remaining lemmas up
/// to 200.
fn reciprocity_campaign(bound: usize, exec: Execution) -> Tally {
    let bound = bound as i64;
    let oracle_bound = bound.min(300);
    let lemma_bound = bound.min(200);
    let ks: Vec<i64> = (1..=bound).collect();
    par::map(&ks, exec, |&k| {
        let kb = BigInt::from(k);
        let mut t = Tally::default();
        for h in 1..=bound {
            if !coprime(h, k) {
                continue;
            }
            let hb = BigInt::from(h);
            let s_hk = dedekind_sum_fast(&hb, &kb).unwrap();
            if h <= k {
                // Each unordered pair once.
                let s_kh = dedekind_sum_fast(&kb, &hb).unwrap();
                t.record(
                    Outcome::ok(
                        format!("reciprocity ({h},{k})"),
                        rational_gap(&(&s_hk + &s_kh), &reciprocity_rhs(&hb, &kb)),
                    ),
                    0.0,
                );
            }
            if h < k && k <= oracle_bound {
                let naive = dedekind_sum_naive(&hb, &kb).unwrap();
                t.record(Outcome::ok(format!("fast = naive ({h},{k})"), rational_gap(&s_hk, &naive)), 0.0);
            }
            if k <= lemma_bound && h <= lemma_bound {
                let shifted = dedekind_sum_fast(&(&hb + &kb), &kb).unwrap();
                t.record(Outcome::ok(format!("periodicity ({h},{k})"), rational_gap(&shifted, &s_hk)), 0.0);
                let neg = dedekind_sum_fast(&-&hb, &kb).unwrap();
                t.record(Outcome::ok(format!("oddness ({h},{k})"), rational_gap(&neg, &-&s_hk)), 0.0);
                let (l, r) = floor_sum_check(&hb, &kb).unwrap();
                t.record(Outcome::ok(format!("floor sum ({h},{k})"), int_gap(&l, &r)), 0.0);
                let (l, r) = floor_square_sum_check(&hb, &kb).unwrap();
                t.record(Outcome::ok(format!("floor square sum ({h},{k})"), rational_gap(&l, &r)), 0.0);
            }
        }
        if k <= 500 && oracle_bound >= 1 {
            let closed = BigRational::new(BigInt::from(k * k - 3 * k + 2), BigInt::from(12 * k));
            let s = dedekind_sum_fast(&BigInt::one(), &kb).unwrap();
            t.record(Outcome::ok(format!("s(1,{k}) closed form"), rational_gap(&s, &closed)), 0.0);
        }
        t
    })
    .into_iter()
    .fold(Tally::default(), Tally::merge)
}

fn random_tau<R: Rng>(rng: &mut R, re: (f64, f64), im: (f64, f64)) -> UpperHalfPoint {
    UpperHalfPoint::new(rng.random_range(re.0..re.1), rng.random_range(im.0..im.1)).unwrap()
}

fn functional_eq_campaign(
    rng: &mut ChaCha8Rng,
    trials: usize,
    tol: f64,
    threshold: f64,
    exec: Execution,
) -> Tally {
    let inputs: Vec<(ModularMatrix, UpperHalfPoint)> = (0..trials)
        .map(|_| {
            let m = random_matrix_with_positive_c(rng, MAX_RANDOM_ENTRY);
            (m, random_tau(rng, (-1.0, 1.0), (0.2, 2.0)))
        })
        .collect();
    let outcomes = par::map(&inputs, exec, |(m, tau)| {
        Outcome::from_result(format!("M={m} tau={tau}"), functional_eq_residual(m, *tau, tol))
    });

    let i = UpperHalfPoint::new(0.0, 1.0).unwrap();
    let s = ModularMatrix::s();
    let mut special = vec![
        Outcome::from_result("M=S tau=i", functional_eq_residual(&s, i, tol)),
        Outcome::from_result(
            "M=S tau=1+i",
            functional_eq_residual(&s, UpperHalfPoint::new(1.0, 1.0).unwrap(), tol),
        ),
        Outcome::from_result(
            "M=[2 1; 1 1] tau=0.3+0.7i",
            functional_eq_residual(
                &ModularMatrix::new(2, 1, 1, 1).unwrap(),
                UpperHalfPoint::new(0.3, 0.7).unwrap(),
                tol,
            ),
        ),
    ];
    let half = eta_transformed_eval(UpperHalfPoint::new(0.0, 0.5).unwrap(), tol);
    let two = eta_pentagonal_eval(UpperHalfPoint::new(0.0, 2.0).unwrap(), tol);
    special.push(Outcome::from_result(
        "eta(i/2) = sqrt(2) eta(2i)",
        half.and_then(|h| two.map(|t| (h.value - t.value * 2f64.sqrt()).norm() / h.value.norm())),
    ));
    tally_of(outcomes.into_iter().chain(special), threshold)
}

fn theta_campaign(
    rng: &mut ChaCha8Rng,
    trials: usize,
    tol: f64,
    threshold: f64,
    exec: Execution,
) -> Tally {
    let c = Complex64::new;
    let mut inputs = vec![
        (c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 1.0), c(0.5, 0.0), c(1.0 / 6.0, 0.0)),
        (c(0.0, 1.0 / 3.0), c(0.5, 0.0), c(1.0 / 6.0, 0.0)),
        (c(0.3, 0.4), c(0.5, 0.0), c(1.0 / 6.0, 0.0)),
    ];
    let small = |rng: &mut ChaCha8Rng| c(rng.random_range(-1.0..1.0), rng.random_range(-0.25..0.25));
    for _ in 0..trials {
        let tau = c(rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0));
        let z = small(rng);
        let w = small(rng);
        inputs.push((tau, z, w));
    }
    let outcomes = par::map(&inputs, exec, |&(tau, z, w)| {
        Outcome::from_result(
            format!("tau={tau} z={z} w={w}"),
            theta_identity_residual(tau, z, w, tol),
        )
    });
    tally_of(outcomes, threshold)
}

fn poisson_campaign(
    rng: &mut ChaCha8Rng,
    trials: usize,
    tol: f64,
    threshold: f64,
    exec: Execution,
) -> Tally {
    let mut inputs = vec![(1.0, 0.0, 0.0), (4.0, 0.0, 0.0), (1.0, 1.0 / 3.0, 0.2)];
    for _ in 0..trials {
        inputs.push((
            rng.random_range(0.25..4.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
    }
    let outcomes = par::map(&inputs, exec, |&(u, a, b)| {
        Outcome::from_result(format!("u={u} a={a} b={b}"), gaussian_poisson_residual(u, a, b, tol))
    });
    tally_of(outcomes, threshold)
}

/// Integrality of ω on `trials` random matrices, and the induction step
/// `ω(a,b,c,d) = ω(u,a,r,c) + q − 3` (unrolled to the base case) on the
/// first thousand of them with `c >= 2`.
fn omega_campaign(rng: &mut ChaCha8Rng, trials: usize, exec: Execution) -> Tally {
    let inputs: Vec<ModularMatrix> = (0..trials)
        .map(|_| random_matrix_with_positive_c(rng, MAX_RANDOM_ENTRY))
        .collect();
    let integrality = par::map(&inputs, exec, |m| {
        Outcome::from_result(
            format!("omega integral M={m}"),
            omega(m.a(), m.b(), m.c(), m.d()).map(|_| 0.0),
        )
    });
    let deep: Vec<&ModularMatrix> = inputs
        .iter()
        .filter(|m| m.c() >= &BigInt::from(2))
        .take(1000)
        .collect();
    let recursion = par::map(&deep, exec, |m| {
        let direct = omega(m.a(), m.b(), m.c(), m.d());
        let induced = omega_by_induction(m.a(), m.b(), m.c(), m.d());
        let r = match (direct, induced) {
            (Ok(x), Ok(y)) => Ok(int_gap(&x, &y)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        Outcome::from_result(format!("omega recursion M={m}"), r)
    });
    tally_of(integrality.into_iter().chain(recursion), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> CampaignConfig {
        CampaignConfig {
            order: Some(60),
            trials: Some(30),
            seed: 11,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_campaigns_pass() {
        for s in Suite::ALL {
            let r = run_suite(s, &small_cfg());
            assert!(r.passed(), "{s}: {:?}", r.failures);
            assert!(r.trials > 0, "{s}");
            assert!(r.max_residual <= r.tolerance);
        }
    }

    #[test]
    fn reports_deterministic_across_execution_modes() {
        for s in [Suite::FunctionalEq, Suite::Omega, Suite::Reciprocity] {
            let seq = run_suite(s, &CampaignConfig { execution: Execution::Sequential, ..small_cfg() });
            let par = run_suite(s, &CampaignConfig { execution: Execution::Parallel, ..small_cfg() });
            assert_eq!(
                serde_json::to_string(&seq).unwrap(),
                serde_json::to_string(&par).unwrap()
            );
        }
    }

    #[test]
    fn failures_iff_over_threshold() {
        let mut t = Tally::default();
        t.record(Outcome::ok("b", 2.0), 1.0);
        t.record(Outcome::ok("a", 0.5), 1.0);
        t.record(Outcome::from_result::<String>("c", Err("boom".into())), 1.0);
        let r = t.into_report(Suite::Theta, 0, 1.0, Instant::now());
        assert_eq!(r.failures.len(), 2);
        assert_eq!(r.failures[0].input, "b");
        assert!(r.max_residual > r.tolerance);
        assert!(!r.passed());
    }

    #[test]
    fn threshold_override_applies_to_numeric_suites_only() {
        let cfg = CampaignConfig { tolerance: Some(1e-3), ..small_cfg() };
        assert_eq!(run_suite(Suite::Poisson, &cfg).tolerance, 1e-3);
        assert_eq!(run_suite(Suite::Jtp, &cfg).tolerance, 0.0);
    }
}
