//! Closed-form measurement statistics of the order-finding state.
//!
//! After the output-register measurement, the input register holds a periodic
//! superposition of `m` basis states spaced `r` apart. The inverse transform
//! concentrates its mass near the multiples `s 2^(n+q)/r`, and every
//! per-outcome probability reduces to a ratio of squared sines whose angles
//! are exact integer fractions of the register length. This module evaluates
//! those ratios and the aggregate success probabilities:
//!
//! - `P`: mass on the nearest integers `y_s = nint(s 2^(n+q)/r)`,
//! - `P~`: mass on all outcomes within distance 2 (unpadded register),
//! - `P~_q`: mass within distance `2^(1+q)` on a register padded by `q` qubits.

use serde::Serialize;

use crate::kahan::KahanSum;
use crate::modular::{self, OrderInstance};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Which set of outcomes counts as success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TargetSet {
    /// `S`: the nearest integer to each `s 2^(n+q)/r`.
    Nearest,
    /// `S~`: outcomes within distance 2, on the unpadded register.
    Window2,
    /// `S~_q`: outcomes within distance `2^(1+q)` on the padded register.
    WindowQ,
}

/// Additive pieces of a probability aggregate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Components {
    /// `(2^kappa - 1) m / 2^(n+q)`: mass sitting exactly on the outcomes
    /// where `s 2^(n+q)/r` is an integer (multiples of `r'`).
    pub multiples_term: f64,
    /// Per-offset windowed sums: for each `h`, the mass
    /// `2^kappa (2/(2^(n+q) m)) sum_j sin^2(..)/sin^2(..)` at that `h`.
    pub per_h: Vec<(i64, f64)>,
    /// Fringe mass of the exact multiples, `2 (2^kappa - 1)/(2^(n+q) m)`
    /// times the sum over `j = 1..2^(q+1)`; zero when `r` is odd.
    pub fringe_term: f64,
}

/// Exact probabilities for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityReport {
    /// `P`: mass on the nearest-integer set `S`.
    pub p: f64,
    /// `2 P_1`: mass on `{y_s - 1, y_s + 1}`; populated for the `q = 0`
    /// window computation.
    pub p1_pair: Option<f64>,
    /// One-sided distance-2 fringe mass (`y_s + 2` when `y_s` undershoots,
    /// `y_s - 2` otherwise); populated for the `q = 0` window computation.
    pub pt: Option<f64>,
    /// `P~` (or `P~_q`): mass on the requested window set.
    pub p_tilde: Option<f64>,
    pub components: Components,
}

/// `m = ceil((2^(n+q) - x0)/r)`, the number of terms in the periodic state.
pub fn m_value(inst: &OrderInstance) -> u64 {
    (inst.register_len() - inst.x0).div_ceil(inst.order)
}

/// `delta_s = nint(s 2^(n+q)/r) - s 2^(n+q)/r`, always in `(-1/2, 1/2)`.
///
/// Computed from the exact integer remainder of `s 2^(n+q)` by `r`, never by
/// floating division of the large operands.
pub fn delta(s: u64, inst: &OrderInstance) -> f64 {
    let (_, r_delta) = nearest_outcome(s, inst);
    r_delta as f64 / inst.order as f64
}

/// `y_s = nint(s 2^(n+q)/r)` together with the exact integer `r * delta_s`.
pub(crate) fn nearest_outcome(s: u64, inst: &OrderInstance) -> (u64, i64) {
    debug_assert!(s >= 1 && s < inst.order);
    let r = inst.order;
    let prod = s as u128 * inst.register_len() as u128;
    let rho = (prod % r as u128) as u64;
    // s 2^(n+q)/r can never be a half-integer; fail loudly if that breaks
    assert!(2 * rho != r, "half-integer s*2^(n+q)/r at s = {s}");
    if 2 * rho < r {
        (((prod - rho as u128) / r as u128) as u64, -(rho as i64))
    } else {
        let up = r - rho;
        (((prod + up as u128) / r as u128) as u64, up as i64)
    }
}

/// `sin(pi k / len)` for `0 <= k < len`, with the angle folded into
/// `[0, pi/2]` before the multiplication by pi.
fn sin_pi_frac(k: u64, len: u64) -> f64 {
    let folded = k.min(len - k);
    (PI * (folded as f64 / len as f64)).sin()
}

/// Probability mass of the geometric phase sum at reduced phase index `w`:
/// `|sum_{k=0}^{m-1} e^(2 pi i k w / 2^log2_len)|^2 / (2^log2_len * m)`.
///
/// `w` may be any integer; it is reduced mod `2^log2_len` exactly, and the
/// aligned-phase case `w = 0 (mod 2^log2_len)` takes the `m^2` limit branch
/// instead of a 0/0 sine ratio.
pub(crate) fn geometric_mass(w: i64, m: u64, log2_len: u32) -> f64 {
    let len = 1u64 << log2_len;
    let w_mod = w.rem_euclid(len as i64) as u64;
    if w_mod == 0 {
        return m as f64 / len as f64;
    }
    let v = ((m as u128 * w_mod as u128) % len as u128) as u64;
    let num = sin_pi_frac(v, len);
    let den = sin_pi_frac(w_mod, len);
    (num * num) / (den * den) / (len as f64 * m as f64)
}

/// `sin^2(pi m j / 2^log2_den) / sin^2(pi j / 2^log2_den)` with exact integer
/// angle reduction; `j = 0 (mod 2^log2_den)` yields the limit `m^2`.
fn sine_ratio_sq(j: u64, m: u64, log2_den: u32) -> f64 {
    let den = 1u64 << log2_den;
    let j_mod = j % den;
    if j_mod == 0 {
        return m as f64 * m as f64;
    }
    let v = ((m as u128 * j_mod as u128) % den as u128) as u64;
    let num = sin_pi_frac(v, den);
    let s_den = sin_pi_frac(j_mod, den);
    (num * num) / (s_den * s_den)
}

/// `p(y_s + h)`: probability that the outcome `h` away from the nearest
/// integer for `s` is measured.
pub fn p_outcome(s: u64, h: i64, inst: &OrderInstance) -> f64 {
    let (_, r_delta) = nearest_outcome(s, inst);
    let w = (inst.order as i128 * h as i128 + r_delta as i128)
        .rem_euclid(inst.register_len() as i128) as i64;
    geometric_mass(w, inst.m, inst.total_qubits())
}

/// The `h = 0` windowed sum and the exact-multiples term of `P`.
///
/// The sum runs over the reduced modulus `2^(n+q-kappa)`, which matches the
/// per-outcome route term for term.
fn p_components(inst: &OrderInstance) -> (f64, f64) {
    let len_f = inst.register_len() as f64;
    let m_f = inst.m as f64;
    let two_kappa = (1u64 << inst.kappa) as f64;
    let log2_reduced = inst.total_qubits() - inst.kappa;
    let mut sum = KahanSum::new();
    for j in 1..=inst.r_prime / 2 {
        sum.add(sine_ratio_sq(j, inst.m, log2_reduced));
    }
    let nearest = two_kappa * 2.0 / (len_f * m_f) * sum.value();
    let multiples = (two_kappa - 1.0) * m_f / len_f;
    (nearest, multiples)
}

/// Exact probability `P` of observing a member of the nearest-integer set.
///
/// Evaluates the closed form (empty sum when `r' = 1`) and cross-checks it
/// against the direct sum of the `r - 1` per-outcome probabilities; the two
/// routes must agree to 1e-12.
pub fn exact_p(inst: &OrderInstance) -> Result<ProbabilityReport> {
    let total = inst.total_qubits();
    if total <= inst.n0 {
        return Err(Error::RegisterTooSmall { total, n0: inst.n0 });
    }
    let (nearest, multiples) = p_components(inst);
    let p = nearest + multiples;

    let mut direct = KahanSum::new();
    for s in 1..inst.order {
        direct.add(p_outcome(s, 0, inst));
    }
    assert!(
        (p - direct.value()).abs() <= 1e-12,
        "closed form and per-outcome sum disagree: {p} vs {}",
        direct.value()
    );

    Ok(ProbabilityReport {
        p,
        p1_pair: None,
        pt: None,
        p_tilde: None,
        components: Components {
            multiples_term: multiples,
            per_h: vec![(0, nearest)],
            fringe_term: 0.0,
        },
    })
}

fn ensure_gerjuoy(inst: &OrderInstance, allow_prime_power: bool) -> Result<()> {
    let prime_power = modular::is_prime_power(inst.modulus);
    if !inst.order_below_half_modulus() || (prime_power && !allow_prime_power) {
        return Err(Error::GerjuoyInapplicable {
            modulus: inst.modulus,
            order: inst.order,
            prime_power,
        });
    }
    Ok(())
}

/// The windowed sum at offset `h != 0`: `2^(kappa+1) sum_j gm(2^kappa j + r h)`.
fn window_term(h: i64, inst: &OrderInstance) -> f64 {
    let mut sum = KahanSum::new();
    for j in 1..=inst.r_prime / 2 {
        let w = (j as i64) << inst.kappa;
        sum.add(geometric_mass(
            w + inst.order as i64 * h,
            inst.m,
            inst.total_qubits(),
        ));
    }
    (1u64 << (inst.kappa + 1)) as f64 * sum.value()
}

/// Exact probability `P~_q` of observing an outcome within `2^(1+q_pad)` of
/// some `s 2^(n+q)/r`, on the padded register.
///
/// Requires the widened-set precondition `r < N/2`. A prime-power modulus is
/// rejected unless `allow_prime_power` is set: the formulas themselves only
/// need `r < N/2`, which is checked directly, but for a prime power that has
/// to be the caller's explicit call.
pub fn exact_p_tilde_q(inst: &OrderInstance, allow_prime_power: bool) -> Result<ProbabilityReport> {
    ensure_gerjuoy(inst, allow_prime_power)?;
    let total = inst.total_qubits();
    if total <= inst.n0 {
        return Err(Error::RegisterTooSmall { total, n0: inst.n0 });
    }

    let (nearest, multiples) = p_components(inst);
    let p = nearest + multiples;
    let radius = 1i64 << (inst.q_pad + 1);
    let two_kappa_m1 = ((1u64 << inst.kappa) - 1) as f64;

    let mut per_h = Vec::with_capacity(2 * radius as usize);
    let mut rest = KahanSum::new();
    for h in -radius..radius {
        let v = if h == 0 {
            nearest
        } else {
            let v = window_term(h, inst);
            rest.add(v);
            v
        };
        per_h.push((h, v));
    }

    let mut fringe = 0.0;
    if inst.kappa > 0 {
        let mut fringe_sum = KahanSum::new();
        for j in 1..=radius as u64 {
            fringe_sum.add(geometric_mass((inst.order * j) as i64, inst.m, total));
        }
        fringe = 2.0 * two_kappa_m1 * fringe_sum.value();
        rest.add(fringe);
    }

    // everything beyond P is nonnegative, so p_tilde >= p holds exactly
    let p_tilde = p + rest.value();

    let (p1_pair, pt) = if inst.q_pad == 0 {
        let v = |h: i64| per_h[(h + radius) as usize].1;
        let g1 = geometric_mass(inst.order as i64, inst.m, total);
        let g2 = geometric_mass(2 * inst.order as i64, inst.m, total);
        (
            Some(v(1) + v(-1) + 2.0 * two_kappa_m1 * g1),
            Some(v(-2) + two_kappa_m1 * g2),
        )
    } else {
        (None, None)
    };

    Ok(ProbabilityReport {
        p,
        p1_pair,
        pt,
        p_tilde: Some(p_tilde),
        components: Components {
            multiples_term: multiples,
            per_h,
            fringe_term: fringe,
        },
    })
}

/// Exact probability `P~` of landing within distance 2 of some `s 2^n/r`, on
/// the unpadded register. Identical to [`exact_p_tilde_q`] at `q_pad = 0`.
pub fn exact_p_tilde(inst: &OrderInstance, allow_prime_power: bool) -> Result<ProbabilityReport> {
    if inst.q_pad != 0 {
        return Err(Error::WindowNeedsUnpaddedRegister { q_pad: inst.q_pad });
    }
    exact_p_tilde_q(inst, allow_prime_power)
}

/// All outcomes in the requested target set, sorted.
///
/// Window members follow the one-sided rule: when `y_s` overshoots
/// `s 2^(n+q)/r` the window is `[y_s - R, y_s + R - 1]`, when it undershoots
/// `[y_s - R + 1, y_s + R]`, and when `s 2^(n+q)/r` is an integer the full
/// `[y_s - R, y_s + R]` (with `R = 2^(1+q)`). Windows of distinct `s` are
/// disjoint and in range; both are asserted.
pub fn target_set_members(
    inst: &OrderInstance,
    set: TargetSet,
    allow_prime_power: bool,
) -> Result<Vec<u64>> {
    let radius: i64 = match set {
        TargetSet::Nearest => 0,
        TargetSet::Window2 => {
            if inst.q_pad != 0 {
                return Err(Error::WindowNeedsUnpaddedRegister { q_pad: inst.q_pad });
            }
            ensure_gerjuoy(inst, allow_prime_power)?;
            2
        }
        TargetSet::WindowQ => {
            ensure_gerjuoy(inst, allow_prime_power)?;
            1i64 << (inst.q_pad + 1)
        }
    };
    let len = inst.register_len();
    let mut members = Vec::new();
    for s in 1..inst.order {
        let (y_s, r_delta) = nearest_outcome(s, inst);
        let (lo, hi) = if radius == 0 {
            (0, 0)
        } else {
            match r_delta.signum() {
                0 => (-radius, radius),
                1 => (-radius, radius - 1),
                _ => (-radius + 1, radius),
            }
        };
        for h in lo..=hi {
            let y = y_s as i64 + h;
            assert!(
                y >= 0 && (y as u64) < len,
                "target window escapes the register at s = {s}"
            );
            members.push(y as u64);
        }
    }
    members.sort_unstable();
    for pair in members.windows(2) {
        assert!(pair[0] != pair[1], "target windows overlap");
    }
    Ok(members)
}
