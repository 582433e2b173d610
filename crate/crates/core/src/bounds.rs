//! Rigorous lower bounds on the success probabilities.
//!
//! Two families are provided. The series bounds need only `n > n0` and come
//! from Maclaurin estimates of the sine ratio; they prove the 70% floor for
//! `r >= 40`, `n - n0 >= 11`. The integral bounds compare the closed-form
//! sums to integrals of `sin^2(pi x)/(x+h)^2` and are sharper, with the
//! asymptotic constants `2(-2 + pi Si(pi))/pi^2` (nearest set),
//! `2 Si(4 pi)/pi` (distance-2 window), and `2 Si(2^(q+2) pi)/pi` (padded
//! windows). Every report carries its preconditions; values are returned
//! even when vacuous so that threshold searches see the whole curve.

use std::fmt;

use serde::Serialize;

use crate::kahan::KahanSum;
use crate::modular::{self, MAX_Q_PAD};
use crate::quad;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Si(x) = integral of sin(t)/t over [0, x], by adaptive quadrature to an
/// absolute 1e-12. One code path for all arguments; the guarded cap keeps
/// the largest argument at `2^(q+2) pi` with `q <= 8`.
pub fn sine_integral(x: f64) -> f64 {
    assert!(x >= 0.0, "Si is evaluated for x >= 0 only");
    quad::integrate(|t| if t < 1e-8 { 1.0 } else { t.sin() / t }, 0.0, x, 1e-12)
}

/// `sin^2(pi x)/x^2` with the removable singularity at 0 replaced by its
/// limit `pi^2` below 1e-8.
fn sin_sq_over_sq(x: f64) -> f64 {
    if x < 1e-8 {
        return PI * PI;
    }
    let s = (PI * x).sin();
    s * s / (x * x)
}

/// `sin^2(pi x)/(x + h)^2`; the integrands of the window bounds.
fn shifted_integrand(x: f64, h: i64) -> f64 {
    if h == 0 {
        return sin_sq_over_sq(x);
    }
    let s = (PI * x).sin();
    let d = x + h as f64;
    s * s / (d * d)
}

/// Which asymptotic constant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymptoticKind {
    /// Nearest-integer set: `(2/pi^2)(-2 + pi Si(pi))`, about 0.7737.
    Nearest,
    /// Distance-`2^(1+q)` window: `2 Si(2^(q+2) pi)/pi`; about 0.9499 at
    /// `q = 0` and 0.9937 at `q = 3`.
    WindowQ,
}

pub fn asymptotic_bound(kind: AsymptoticKind, q_pad: u32) -> f64 {
    match kind {
        AsymptoticKind::Nearest => 2.0 / (PI * PI) * (-2.0 + PI * sine_integral(PI)),
        AsymptoticKind::WindowQ => {
            assert!(q_pad <= MAX_Q_PAD);
            2.0 * sine_integral(f64::exp2((q_pad + 2) as f64) * PI) / PI
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    SeriesOdd,
    SeriesEven,
    IntegralP,
    IntegralPTilde,
    IntegralPTildeQ,
    Asymptotic,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BoundKind::SeriesOdd => "series (odd r)",
            BoundKind::SeriesEven => "series (even r)",
            BoundKind::IntegralP => "integral P",
            BoundKind::IntegralPTilde => "integral P~",
            BoundKind::IntegralPTildeQ => "integral P~_q",
            BoundKind::Asymptotic => "asymptotic",
        };
        f.write_str(name)
    }
}

/// The fixed parameters a bound was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    pub modulus: Option<u64>,
    pub kappa: u32,
    pub r_prime: u64,
    pub q_pad: u32,
    pub n: Option<u32>,
    pub n0: Option<u32>,
}

/// One named precondition, recorded rather than silently assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: &'static str,
    pub held: bool,
    /// Whether the inequality itself depends on it. Non-required entries
    /// (like `r >= 40`) only gate the published threshold claims.
    pub required: bool,
}

/// A lower-bound value plus the context it was computed in. Values may be
/// negative (the bound is then vacuous but still reported).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub preconditions: Vec<Precondition>,
    pub params: BoundParams,
}

impl BoundReport {
    /// True when every precondition the inequality depends on held, i.e.
    /// the value really is a lower bound for the matching probability.
    pub fn sound_context(&self) -> bool {
        self.preconditions.iter().all(|p| !p.required || p.held)
    }
}

fn pre(name: &'static str, held: bool, required: bool) -> Precondition {
    Precondition {
        name,
        held,
        required,
    }
}

/// Series lower bound on `P` for a register split `(n, n0)` and an order
/// `r = 2^kappa r'`. Only the differences `n - n0` enter.
pub fn series_lower_bound(n: u32, n0: u32, kappa: u32, r_prime: u64) -> BoundReport {
    let d = n as f64 - n0 as f64;
    let rp = r_prime as f64;
    let pi2_36 = PI * PI / 36.0;
    let value = if kappa == 0 {
        (1.0 - f64::exp2(-d) - 1.0 / rp)
            * (1.0 - pi2_36 * ((rp + 1.0) / rp + f64::exp2(1.0 - d) + f64::exp2(-2.0 * d)))
    } else {
        (1.0 - f64::exp2(-d) - 1.0 / rp)
            * (1.0 - pi2_36 * ((rp + 1.0) / rp + f64::exp2(2.0 - d) + f64::exp2(1.0 - 2.0 * d)))
            + 1.0 / rp
            - f64::exp2(-(kappa as f64)) / rp
            - f64::exp2(-d)
    };
    let r_full = (r_prime as u128) << kappa;
    BoundReport {
        kind: if kappa == 0 {
            BoundKind::SeriesOdd
        } else {
            BoundKind::SeriesEven
        },
        value,
        preconditions: vec![
            pre("n > n0", n > n0, true),
            pre("r' odd", r_prime % 2 == 1, true),
            pre("r' >= 3", r_prime >= 3, true),
            pre("r <= 2^n0", r_full <= 1u128 << n0.min(127), true),
            pre("n - n0 >= 11", n >= n0 + 11, false),
            pre("r >= 40", r_full >= 40, false),
        ],
        params: BoundParams {
            modulus: None,
            kappa,
            r_prime,
            q_pad: 0,
            n: Some(n),
            n0: Some(n0),
        },
    }
}

/// Integral lower bound on `P` in terms of `(N, kappa, r')` alone; valid for
/// any register with `N^2 <= 2^(n+q)`, which Shor's sizing guarantees.
/// Monotone increasing in each of `N`, `kappa`, and `r'`.
pub fn integral_lower_bound_p(modulus: u64, kappa: u32, r_prime: u64) -> BoundReport {
    let big_n = modulus as f64;
    let rp = r_prime as f64;
    let integral = quad::integrate(sin_sq_over_sq, 1.0 / rp, 0.5 + 0.5 / rp, 1e-12);
    let value = (1.0 - PI * PI / (4.0 * big_n * big_n)) / (1.0 + 1.0 / big_n)
        * (2.0 / (PI * PI))
        * integral
        - 3.0 / big_n
        + 1.0 / rp
        - f64::exp2(-(kappa as f64)) / rp;
    BoundReport {
        kind: BoundKind::IntegralP,
        value,
        preconditions: vec![
            pre("r' odd", r_prime % 2 == 1, true),
            pre("r' >= 3", r_prime >= 3, true),
            pre(
                "r < N",
                ((r_prime as u128) << kappa) < modulus as u128,
                true,
            ),
            pre("N^2 <= 2^(n+q) (register at least Shor-sized)", true, true),
        ],
        params: BoundParams {
            modulus: Some(modulus),
            kappa,
            r_prime,
            q_pad: 0,
            n: None,
            n0: None,
        },
    }
}

/// Integral lower bound on `P~_q` (`q_pad = 0` gives the distance-2 window
/// bound on `P~`). Needs `r < N/2`; the modulus not being a prime power is
/// recorded but the inequality itself only uses the order gap.
pub fn integral_lower_bound_window(
    modulus: u64,
    kappa: u32,
    r_prime: u64,
    q_pad: u32,
) -> BoundReport {
    assert!(
        q_pad <= MAX_Q_PAD,
        "window bound capped at q_pad = {MAX_Q_PAD}"
    );
    let big_n = modulus as f64;
    let rp = r_prime as f64;
    let radius = 1i64 << (q_pad + 1);
    let two_q1 = f64::exp2((q_pad + 1) as f64);
    let prefactor = (1.0 - (PI / big_n).powi(2)) * (1.0 - (PI / (2.0 * two_q1 * big_n)).powi(2))
        / (1.0 + 1.0 / (two_q1 * big_n));
    let upper = 0.5 - 0.5 / rp;
    let mut sum = KahanSum::new();
    for h in -radius..radius {
        sum.add(quad::integrate(
            |x| shifted_integrand(x, h),
            0.0,
            upper,
            1e-12,
        ));
    }
    let value = prefactor * (2.0 / (PI * PI)) * sum.value()
        - 1.0 / rp
        - 7.0 / (big_n * two_q1)
        - 16.0 / (PI * big_n * (1.0 - 1.0 / (big_n * two_q1)))
        - f64::exp2(-(kappa as f64)) / rp;
    BoundReport {
        kind: if q_pad == 0 {
            BoundKind::IntegralPTilde
        } else {
            BoundKind::IntegralPTildeQ
        },
        value,
        preconditions: vec![
            pre("r' odd", r_prime % 2 == 1, true),
            pre("r' >= 3", r_prime >= 3, true),
            pre(
                "r < N/2",
                2 * ((r_prime as u128) << kappa) < modulus as u128,
                true,
            ),
            pre(
                "N not a prime power",
                !modular::is_prime_power(modulus),
                false,
            ),
            pre("N^2 <= 2^(n+q) (register at least Shor-sized)", true, true),
        ],
        params: BoundParams {
            modulus: Some(modulus),
            kappa,
            r_prime,
            q_pad,
            n: None,
            n0: None,
        },
    }
}

/// Which variable a threshold search scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchVar {
    /// Scan odd `r'` upward from 3.
    RPrime,
    /// Scan powers of two `N` upward from 4.
    Modulus,
}

/// A threshold query: find the least value of the search variable at which
/// `kind` exceeds `target`, holding the other parameters fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdQuery {
    pub kind: BoundKind,
    pub modulus: u64,
    pub kappa: u32,
    pub r_prime: u64,
    pub q_pad: u32,
    pub target: f64,
    pub var: SearchVar,
    /// Largest value of the search variable to try.
    pub cap: u64,
}

fn bound_for(
    kind: BoundKind,
    modulus: u64,
    kappa: u32,
    r_prime: u64,
    q_pad: u32,
) -> Result<BoundReport> {
    match kind {
        BoundKind::IntegralP => Ok(integral_lower_bound_p(modulus, kappa, r_prime)),
        BoundKind::IntegralPTilde | BoundKind::IntegralPTildeQ => {
            Ok(integral_lower_bound_window(modulus, kappa, r_prime, q_pad))
        }
        _ => Err(Error::UnsupportedSearch),
    }
}

/// Least odd `r'` (or least power-of-two `N`) at which the bound exceeds the
/// target. The scan skips parameter points whose required preconditions
/// fail. Monotonicity along the search variable is spot-checked first, and
/// the value at the largest candidate then serves as a ceiling, so
/// unreachable targets fail without walking the whole range.
pub fn threshold_search(query: &ThresholdQuery) -> Result<u64> {
    let point = |c: u64| match query.var {
        SearchVar::RPrime => (c, query.modulus),
        SearchVar::Modulus => (query.r_prime, c),
    };
    let eval = |c: u64| -> Result<Option<f64>> {
        let (r_prime, modulus) = point(c);
        let report = bound_for(query.kind, modulus, query.kappa, r_prime, query.q_pad)?;
        Ok(report.sound_context().then_some(report.value))
    };

    let candidates: Vec<u64> = match query.var {
        SearchVar::RPrime => (3..=query.cap).step_by(2).collect(),
        SearchVar::Modulus => (2..64)
            .map(|k| 1u64 << k)
            .take_while(|&n| n <= query.cap)
            .collect(),
    };
    let Some(&largest) = candidates.last() else {
        return Err(Error::TargetUnreachable {
            target: query.target,
            cap: query.cap,
        });
    };

    // monotonicity spot check on a geometric subsample
    let mut samples = Vec::new();
    let mut idx = 0usize;
    while idx < candidates.len() {
        samples.push(candidates[idx]);
        idx = idx * 8 + 8;
    }
    let mut last: Option<(u64, f64)> = None;
    for &c in &samples {
        if let Some(v) = eval(c)? {
            if let Some((at, prev)) = last {
                if v < prev - 1e-12 {
                    return Err(Error::NotMonotone { at });
                }
            }
            last = Some((c, v));
        }
    }

    // monotone in the search variable, so the raw value at the largest
    // candidate caps every value the scan can see
    let (r_top, n_top) = point(largest);
    let ceiling = bound_for(query.kind, n_top, query.kappa, r_top, query.q_pad)?.value;
    if ceiling <= query.target {
        return Err(Error::TargetUnreachable {
            target: query.target,
            cap: query.cap,
        });
    }

    for &c in &candidates {
        if let Some(v) = eval(c)? {
            if v > query.target {
                return Ok(c);
            }
        }
    }
    Err(Error::TargetUnreachable {
        target: query.target,
        cap: query.cap,
    })
}
