//! Integer number theory for order finding.
//!
//! Everything here is exact integer arithmetic: multiplicative orders, the
//! two-adic split of an order, Shor's register sizing, prime-power detection,
//! and continued-fraction convergents with the Legendre-criterion divisor
//! extraction. [`OrderInstance`] bundles the derived quantities for one
//! `(N, b)` problem.

use serde::Serialize;

use crate::{Error, Result};

/// Order finding is a brute-force loop over at most `N - 1` multiplications,
/// so the modulus is capped at desk scale.
pub const MAX_MODULUS_BITS: u32 = 25;

/// Cap on the extra input-register qubits; window sets and fringe sums grow
/// like `2^(q+1)` and nothing past `q = 3` is of practical interest.
pub const MAX_Q_PAD: u32 = 8;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least `r >= 1` with `b^r = 1 (mod N)`.
///
/// Runs the plain iterated product, which is guaranteed to terminate in fewer
/// than `N` steps for coprime `b`.
pub fn multiplicative_order(base: u64, modulus: u64) -> Result<u64> {
    if modulus >= 1 << MAX_MODULUS_BITS {
        return Err(Error::ModulusTooLarge {
            modulus,
            max_bits: MAX_MODULUS_BITS,
        });
    }
    if base <= 1 || base >= modulus {
        return Err(Error::BaseOutOfRange { base, modulus });
    }
    if gcd(base, modulus) != 1 {
        return Err(Error::NotCoprime { base, modulus });
    }
    let mut acc = base;
    let mut r = 1u64;
    while acc != 1 {
        acc = acc * base % modulus; // products stay below 2^50
        r += 1;
    }
    Ok(r)
}

/// Split `r = 2^kappa * r'` with `r'` odd.
pub fn decompose_order(r: u64) -> (u32, u64) {
    assert!(r >= 1);
    let kappa = r.trailing_zeros();
    (kappa, r >> kappa)
}

/// Shor's register sizes for a modulus `N >= 2`: the least `n` with
/// `N^2 <= 2^n` (which automatically gives `2^n < 2 N^2`) and the least `n0`
/// with `N <= 2^n0`.
pub fn register_sizes(modulus: u64) -> (u32, u32) {
    assert!(modulus >= 2, "register sizes need N >= 2");
    (ceil_log2(modulus * modulus), ceil_log2(modulus))
}

/// Least `k` with `2^k >= v`.
fn ceil_log2(v: u64) -> u32 {
    debug_assert!(v >= 1);
    64 - (v - 1).leading_zeros()
}

/// The division `2^(n_total - kappa) = q_int * r' + t` with `0 <= t < r'`.
///
/// Whenever `t` is nonzero it is coprime to `r'`: a common odd divisor would
/// divide a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KlDecomposition {
    pub q_int: u64,
    pub t: u64,
}

pub fn kl_decompose(n_total: u32, kappa: u32, r_prime: u64) -> KlDecomposition {
    assert!(r_prime % 2 == 1, "r' must be odd");
    assert!(n_total > kappa && n_total - kappa <= 63);
    let pow = 1u64 << (n_total - kappa);
    assert!(pow > r_prime, "need 2^n > r");
    KlDecomposition {
        q_int: pow / r_prime,
        t: pow % r_prime,
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// True iff `n = p^j` for a prime `p` and some `j >= 1`.
pub fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for j in (1..=n.ilog2()).rev() {
        let root = integer_kth_root(n, j);
        if checked_pow_eq(root, j, n) && is_prime(root) {
            return true;
        }
    }
    false
}

/// Floor of the `k`-th root of `n`, by binary search.
pub fn integer_kth_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n <= 1 {
        return n;
    }
    // invariant: lo^k <= n < hi^k
    let mut lo = 1u64;
    let mut hi = 1u64 << (n.ilog2() / k + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pow_leq(mid, k, n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn pow_leq(base: u64, k: u32, limit: u64) -> bool {
    let mut acc = 1u128;
    for _ in 0..k {
        acc *= base as u128;
        if acc > limit as u128 {
            return false;
        }
    }
    true
}

fn checked_pow_eq(base: u64, k: u32, n: u64) -> bool {
    let mut acc = 1u128;
    for _ in 0..k {
        acc *= base as u128;
        if acc > n as u128 {
            return false;
        }
    }
    acc == n as u128
}

/// Euler's totient by trial factorization.
pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n >= 1);
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// One truncation `s~/r~` of a continued-fraction expansion, in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub numerator: u64,
    pub denominator: u64,
}

/// All convergents of `target_numerator / target_denominator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergentList {
    pub entries: Vec<Convergent>,
    pub target_numerator: u64,
    pub target_denominator: u64,
}

/// Continued-fraction convergents of `y / denominator` for `0 <= y <
/// denominator`, ending with the target itself in lowest terms.
///
/// Denominators are strictly increasing along the list; when the two leading
/// convergents tie at denominator 1 (first partial quotient 1), only the
/// closer of the two is kept.
pub fn continued_fraction_convergents(y: u64, denominator: u64) -> ConvergentList {
    assert!(denominator > 0 && y < denominator);
    let mut entries: Vec<Convergent> = Vec::new();
    // p_k = a_k p_{k-1} + p_{k-2}, likewise q_k
    let (mut p_prev2, mut q_prev2) = (0u64, 1u64);
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut num, mut den) = (y, denominator);
    loop {
        let a = num / den;
        let p = a * p_prev + p_prev2;
        let q = a * q_prev + q_prev2;
        if entries.last().map(|c: &Convergent| c.denominator) == Some(q) {
            entries.pop();
        }
        entries.push(Convergent {
            numerator: p,
            denominator: q,
        });
        (p_prev2, q_prev2) = (p_prev, q_prev);
        (p_prev, q_prev) = (p, q);
        (num, den) = (den, num % den);
        if den == 0 {
            break;
        }
    }
    let g = gcd(y, denominator);
    ConvergentList {
        entries,
        target_numerator: y / g,
        target_denominator: denominator / g,
    }
}

/// Largest convergent denominator `1 < r~ < modulus` of `y / 2^n_total`
/// meeting the Legendre criterion `|y/2^n - s~/r~| <= 1/(2 r~^2)`, or `None`.
///
/// Larger qualifying denominators carry more of the order, so the largest one
/// is returned. For any `y` within 1/2 of a multiple `s 2^n / r` of a true
/// order `r < 2^(n/2)`, the result divides `r`.
pub fn extract_divisor(y: u64, n_total: u32, modulus: u64) -> Option<u64> {
    assert!(n_total <= 63);
    let den = 1u64 << n_total;
    assert!(y < den);
    let mut best = None;
    for c in continued_fraction_convergents(y, den).entries {
        if c.denominator <= 1 || c.denominator >= modulus {
            continue;
        }
        // |y/2^n - s/r| <= 1/(2 r^2)  <=>  2 r |y r - s 2^n| <= 2^n
        let cross = (y as u128 * c.denominator as u128).abs_diff(c.numerator as u128 * den as u128);
        if 2 * c.denominator as u128 * cross <= den as u128 {
            best = Some(c.denominator);
        }
    }
    best
}

/// A fully derived order-finding problem: modulus, base, order, and all the
/// register quantities the probability formulas consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderInstance {
    /// Modulus `N`.
    pub modulus: u64,
    /// Base `b` with `1 < b < N`, coprime to `N`.
    pub base: u64,
    /// Multiplicative order `r` of `b` mod `N`.
    pub order: u64,
    /// Two-adic valuation of `r`.
    pub kappa: u32,
    /// Odd part of `r`, so `r = 2^kappa * r_prime`.
    pub r_prime: u64,
    /// Input-register qubits: `N^2 <= 2^n < 2 N^2`.
    pub n: u32,
    /// Output-register qubits: least with `N <= 2^n0`.
    pub n0: u32,
    /// Extra input qubits; the measured register has `n + q_pad` qubits.
    pub q_pad: u32,
    /// Offset of the periodic state, from the output-register measurement.
    pub x0: u64,
    /// Term count of the periodic state: `ceil((2^(n+q) - x0)/r)`.
    pub m: u64,
}

impl OrderInstance {
    /// Derive the full instance for `(N, b)` with offset `x0` and `q_pad`
    /// extra register qubits.
    pub fn new(modulus: u64, base: u64, x0: u64, q_pad: u32) -> Result<Self> {
        if q_pad > MAX_Q_PAD {
            return Err(Error::QPadTooLarge {
                q_pad,
                max: MAX_Q_PAD,
            });
        }
        let order = multiplicative_order(base, modulus)?;
        if x0 >= order {
            return Err(Error::OffsetOutOfRange { x0, order });
        }
        let (kappa, r_prime) = decompose_order(order);
        let (n, n0) = register_sizes(modulus);
        let len = 1u64 << (n + q_pad);
        let m = (len - x0).div_ceil(order);
        Ok(Self {
            modulus,
            base,
            order,
            kappa,
            r_prime,
            n,
            n0,
            q_pad,
            x0,
            m,
        })
    }

    /// Total input-register size `n + q_pad`.
    pub fn total_qubits(&self) -> u32 {
        self.n + self.q_pad
    }

    /// `2^(n + q_pad)`, the number of possible outcomes.
    pub fn register_len(&self) -> u64 {
        1u64 << self.total_qubits()
    }

    /// Whether `r < N/2` holds, the precondition for the widened target sets.
    pub fn order_below_half_modulus(&self) -> bool {
        2 * self.order < self.modulus
    }
}
