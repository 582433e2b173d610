//! Exact success probabilities for Shor's order-finding algorithm.
//!
//! Given a modulus `N` and a base `b` coprime to it, the final measurement of
//! Shor's order-finding circuit yields a "useful" outcome (one from which a
//! divisor of the order of `b` can be recovered via continued fractions) with
//! a probability that admits an exact closed form. This crate computes those
//! probabilities, evaluates rigorous lower bounds for them, and checks
//! everything against a brute-force inverse-DFT oracle.
//!
//! - [`modular`]: integer number theory — multiplicative orders, register
//!   sizing, prime-power detection, continued-fraction convergents, and the
//!   [`OrderInstance`] problem context.
//! - [`state`]: closed-form measurement statistics — per-outcome
//!   probabilities and the aggregates `P`, `P~`, `P~_q` over the nearest,
//!   distance-2, and distance-`2^(1+q)` target sets.
//! - [`bounds`]: series and integral lower bounds, asymptotic constants, the
//!   sine integral, and threshold searches.
//! - [`oracle`]: independent verification — a radix-2 FFT (and a naive DFT)
//!   applied to the explicitly constructed periodic state.
//!
//! ```
//! use shor_prob::{state, OrderInstance};
//!
//! let inst = OrderInstance::new(247, 4, 0, 0).unwrap();
//! assert_eq!(inst.order, 18);
//! let report = state::exact_p_tilde(&inst, false).unwrap();
//! assert!((report.p - 0.7198248255808054).abs() < 1e-12);
//! ```

pub mod bounds;
mod kahan;
pub mod modular;
pub mod oracle;
mod quad;
pub mod state;

pub use kahan::KahanSum;
pub use modular::OrderInstance;

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u64, modulus: u64 },

    #[error("modulus {modulus} exceeds the brute-force order-finding cap 2^{max_bits}")]
    ModulusTooLarge { modulus: u64, max_bits: u32 },

    #[error("base {base} must satisfy 1 < b < N for modulus {modulus}")]
    BaseOutOfRange { base: u64, modulus: u64 },

    #[error("offset {x0} must lie in [0, {order})")]
    OffsetOutOfRange { x0: u64, order: u64 },

    #[error("register padding {q_pad} exceeds the supported maximum {max}")]
    QPadTooLarge { q_pad: u32, max: u32 },

    #[error("input register ({total} qubits) must exceed the output register ({n0} qubits)")]
    RegisterTooSmall { total: u32, n0: u32 },

    #[error("register of {total} qubits exceeds the {max}-qubit limit of this backend")]
    RegisterTooLarge { total: u32, max: u32 },

    #[error(
        "widened target sets unavailable for N = {modulus}, r = {order}: they need r < N/2, \
         and a prime-power modulus (prime power here: {prime_power}) needs an explicit override"
    )]
    GerjuoyInapplicable {
        modulus: u64,
        order: u64,
        prime_power: bool,
    },

    #[error("the distance-2 window set is defined on the unpadded register, but q_pad = {q_pad}")]
    WindowNeedsUnpaddedRegister { q_pad: u32 },

    #[error("target {target} not reached within the search cap {cap}")]
    TargetUnreachable { target: f64, cap: u64 },

    #[error("bound is not monotone in the search variable (sampled near {at})")]
    NotMonotone { at: u64 },

    #[error("threshold search is defined for the integral bound kinds only")]
    UnsupportedSearch,
}

pub type Result<T> = std::result::Result<T, Error>;
