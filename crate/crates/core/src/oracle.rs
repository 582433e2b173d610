//! Brute-force verification backends.
//!
//! The post-measurement state is a vector with `1/sqrt(m)` at positions
//! `k r + x0` and zeros elsewhere. Applying the unitary inverse DFT to it and
//! squaring magnitudes gives every outcome probability with no closed-form
//! shortcuts, which is exactly what the closed-form engine must reproduce.
//! Three backends are provided: a radix-2 FFT, a naive quadratic DFT for
//! small registers, and the closed-form geometric-sum evaluation.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::kahan::KahanSum;
use crate::modular::OrderInstance;
use crate::state;
use crate::{Error, Result};

/// Register limit for the FFT backend; the table alone is `16 * 2^max` bytes.
pub const MAX_FFT_QUBITS: u32 = 22;

/// Register limit for the naive DFT backend.
pub const MAX_NAIVE_QUBITS: u32 = 12;

/// How each amplitude table was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    FullTransform,
    ClosedForm,
    NaiveDft,
}

/// `|amplitude|^2` for every outcome `y` in `[0, 2^n_total)`.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    pub n_total: u32,
    pub probabilities: Vec<f64>,
    pub backend: Backend,
}

impl AmplitudeTable {
    /// Compensated sum of the probabilities over `members`.
    pub fn mass_on(&self, members: &[u64]) -> f64 {
        let mut sum = KahanSum::new();
        for &y in members {
            sum.add(self.probabilities[y as usize]);
        }
        sum.value()
    }

    /// Compensated sum over the whole table; 1 within 1e-10 for any
    /// correctly built backend.
    pub fn total_mass(&self) -> f64 {
        let mut sum = KahanSum::new();
        for &p in &self.probabilities {
            sum.add(p);
        }
        sum.value()
    }
}

/// Closed-form `|amplitude|^2` at outcome `y`.
///
/// The phase index `r y` is reduced mod `2^(n+q)` in integer arithmetic
/// before any sine is evaluated; the offset `x0` contributes only a global
/// phase per outcome and drops out of the magnitude (it still enters through
/// `m`).
pub fn amplitude_sq(y: u64, inst: &OrderInstance) -> f64 {
    let len = inst.register_len();
    assert!(y < len);
    let w = ((inst.order as u128 * y as u128) % len as u128) as u64;
    state::geometric_mass(w as i64, inst.m, inst.total_qubits())
}

/// Compensated sum of closed-form probabilities over `members`.
pub fn closed_form_mass(inst: &OrderInstance, members: &[u64]) -> f64 {
    let mut sum = KahanSum::new();
    for &y in members {
        sum.add(amplitude_sq(y, inst));
    }
    sum.value()
}

fn guarded_len(inst: &OrderInstance, max: u32) -> Result<usize> {
    let total = inst.total_qubits();
    if total > max {
        return Err(Error::RegisterTooLarge { total, max });
    }
    Ok(1usize << total)
}

/// Closed-form amplitudes tabulated for the whole register.
pub fn closed_form_table(inst: &OrderInstance) -> Result<AmplitudeTable> {
    let len = guarded_len(inst, MAX_FFT_QUBITS)?;
    let probabilities = (0..len as u64).map(|y| amplitude_sq(y, inst)).collect();
    Ok(AmplitudeTable {
        n_total: inst.total_qubits(),
        probabilities,
        backend: Backend::ClosedForm,
    })
}

/// Build the periodic state and apply the unitary inverse DFT via a radix-2
/// FFT, returning squared magnitudes.
pub fn full_transform(inst: &OrderInstance) -> Result<AmplitudeTable> {
    let len = guarded_len(inst, MAX_FFT_QUBITS)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let amp = 1.0 / (inst.m as f64).sqrt();
    for k in 0..inst.m {
        buf[(k * inst.order + inst.x0) as usize] = Complex64::new(amp, 0.0);
    }
    fft_inverse_unnormalized(&mut buf);
    let scale = 1.0 / len as f64;
    let probabilities = buf.iter().map(|z| z.norm_sqr() * scale).collect();
    Ok(AmplitudeTable {
        n_total: inst.total_qubits(),
        probabilities,
        backend: Backend::FullTransform,
    })
}

/// Quadratic-time inverse DFT over the nonzero positions only; every phase
/// angle is reduced mod `2^(n+q)` exactly before the trig call.
pub fn naive_transform(inst: &OrderInstance) -> Result<AmplitudeTable> {
    let len = guarded_len(inst, MAX_NAIVE_QUBITS)? as u64;
    let positions: Vec<u64> = (0..inst.m).map(|k| k * inst.order + inst.x0).collect();
    let norm = 1.0 / (inst.m as f64 * len as f64);
    let step = std::f64::consts::TAU / len as f64;
    let probabilities = (0..len)
        .map(|y| {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for &p in &positions {
                let (s, c) = (step * ((p * y) % len) as f64).sin_cos();
                re.add(c);
                im.add(s);
            }
            (re.value() * re.value() + im.value() * im.value()) * norm
        })
        .collect();
    Ok(AmplitudeTable {
        n_total: inst.total_qubits(),
        probabilities,
        backend: Backend::NaiveDft,
    })
}

/// In-place radix-2 FFT with `e^(+2 pi i / len)` twiddles (the inverse-DFT
/// convention), without normalization.
fn fft_inverse_unnormalized(a: &mut [Complex64]) {
    let n = a.len();
    assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    if n == 1 {
        return;
    }
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 / n as f64)))
        .collect();
    let mut len = 2usize;
    while len <= n {
        let stride = n / len;
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for k in 0..len / 2 {
                let w = twiddles[k * stride];
                let v = hi[k] * w;
                let u = lo[k];
                lo[k] = u + v;
                hi[k] = u - v;
            }
        }
        len <<= 1;
    }
}

/// One row of the probability-versus-outcome dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure1Row {
    pub y: u64,
    /// `y / 2^(n+q)`.
    pub frac: f64,
    pub prob: f64,
    /// Whether `y` is one of the nearest-integer targets `y_s`.
    pub flag: bool,
}

/// Half-width of the per-peak slices emitted for registers too large to dump
/// in full.
const SLICE_HALF_WIDTH: i64 = 32;

/// Probability of every outcome (full transform up to [`MAX_FFT_QUBITS`]),
/// or closed-form slices around each peak beyond that, with the
/// nearest-integer targets flagged.
pub fn figure1_dump(inst: &OrderInstance) -> Result<Vec<Figure1Row>> {
    let len = inst.register_len();
    let len_f = len as f64;
    let targets: Vec<u64> = (1..inst.order)
        .map(|s| state::nearest_outcome(s, inst).0)
        .collect();

    if inst.total_qubits() <= MAX_FFT_QUBITS {
        let table = full_transform(inst)?;
        let mut flags = vec![false; len as usize];
        for &y in &targets {
            flags[y as usize] = true;
        }
        return Ok((0..len)
            .map(|y| Figure1Row {
                y,
                frac: y as f64 / len_f,
                prob: table.probabilities[y as usize],
                flag: flags[y as usize],
            })
            .collect());
    }

    let mut rows: BTreeMap<u64, bool> = BTreeMap::new();
    for &y_s in &targets {
        for d in -SLICE_HALF_WIDTH..=SLICE_HALF_WIDTH {
            let y = y_s as i64 + d;
            if y >= 0 && (y as u64) < len {
                let entry = rows.entry(y as u64).or_insert(false);
                *entry |= d == 0;
            }
        }
    }
    Ok(rows
        .into_iter()
        .map(|(y, flag)| Figure1Row {
            y,
            frac: y as f64 / len_f,
            prob: amplitude_sq(y, inst),
            flag,
        })
        .collect())
}

/// Write rows as CSV: header `y,frac,prob,flag`, floats at 17 significant
/// digits.
pub fn write_figure1_csv<W: Write>(rows: &[Figure1Row], mut out: W) -> io::Result<()> {
    writeln!(out, "y,frac,prob,flag")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{}",
            row.y,
            row.frac,
            row.prob,
            u8::from(row.flag)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_transforms_flat() {
        // a single nonzero entry spreads uniformly: |X_y|^2 = 1/len for all y
        for pos in [0usize, 1, 5] {
            let mut buf = vec![Complex64::new(0.0, 0.0); 16];
            buf[pos] = Complex64::new(1.0, 0.0);
            fft_inverse_unnormalized(&mut buf);
            for z in &buf {
                assert!((z.norm_sqr() / 16.0 - 1.0 / 16.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fft_matches_direct_dft_on_random_vector() {
        // deterministic pseudo-random input
        let n = 64usize;
        let mut x = 1u64;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|_| {
                x = x
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let re = (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                x = x
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let im = (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(re, im)
            })
            .collect();
        let reference: Vec<Complex64> = (0..n)
            .map(|y| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, v) in buf.iter().enumerate() {
                    let ang = std::f64::consts::TAU * ((k * y) % n) as f64 / n as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc
            })
            .collect();
        fft_inverse_unnormalized(&mut buf);
        for (a, b) in buf.iter().zip(&reference) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        let inst = OrderInstance::new(247, 4, 0, 0).unwrap();
        assert!((amplitude_sq(0, &inst) - inst.m as f64 / 65536.0).abs() < 1e-18);
        let table = closed_form_table(&inst).unwrap();
        assert!((table.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn three_backends_agree_small() {
        for (n_mod, b, q) in [(15u64, 2u64, 0u32), (21, 2, 1), (33, 5, 0), (35, 3, 1)] {
            let inst = OrderInstance::new(n_mod, b, 0, q).unwrap();
            let fft = full_transform(&inst).unwrap();
            let naive = naive_transform(&inst).unwrap();
            let closed = closed_form_table(&inst).unwrap();
            for y in 0..inst.register_len() as usize {
                let (a, b_, c) = (
                    fft.probabilities[y],
                    naive.probabilities[y],
                    closed.probabilities[y],
                );
                assert!((a - b_).abs() < 1e-12, "fft vs naive at y = {y}");
                assert!((a - c).abs() < 1e-12, "fft vs closed at y = {y}");
            }
            assert!((fft.total_mass() - 1.0).abs() < 1e-10);
            assert!((naive.total_mass() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn offset_is_a_pure_phase() {
        // same m for x0 = 0 and x0 = 5, so the tables must agree entrywise
        let a = full_transform(&OrderInstance::new(247, 4, 0, 0).unwrap()).unwrap();
        let b = full_transform(&OrderInstance::new(247, 4, 5, 0).unwrap()).unwrap();
        for (pa, pb) in a.probabilities.iter().zip(&b.probabilities) {
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn register_guards() {
        // 2 has order 25 modulo 2^25 - 1, and the register is 50 qubits
        let inst = OrderInstance::new((1 << 25) - 1, 2, 0, 0).unwrap();
        assert_eq!(inst.order, 25);
        assert!(inst.total_qubits() > MAX_FFT_QUBITS);
        assert!(matches!(
            full_transform(&inst),
            Err(Error::RegisterTooLarge { .. })
        ));
        let small = OrderInstance::new(247, 4, 0, 0).unwrap();
        assert!(small.total_qubits() > MAX_NAIVE_QUBITS);
        assert!(matches!(
            naive_transform(&small),
            Err(Error::RegisterTooLarge { .. })
        ));
    }

    #[test]
    fn empty_set_has_zero_mass() {
        let inst = OrderInstance::new(15, 2, 0, 0).unwrap();
        let table = full_transform(&inst).unwrap();
        assert_eq!(table.mass_on(&[]), 0.0);
        assert_eq!(closed_form_mass(&inst, &[]), 0.0);
    }

    #[test]
    fn oversize_register_dumps_slices() {
        // 50-qubit register: no full table, closed-form slices around the
        // 24 peaks instead
        let inst = OrderInstance::new((1 << 25) - 1, 2, 0, 0).unwrap();
        let rows = figure1_dump(&inst).unwrap();
        assert_eq!(rows.len(), 24 * 65);
        assert_eq!(rows.iter().filter(|r| r.flag).count(), 24);
        for r in &rows {
            assert!(r.prob >= 0.0 && r.prob <= 1.0);
        }
        // flagged rows dominate their slice
        let best = rows.iter().map(|r| r.prob).fold(0.0, f64::max);
        assert!(rows.iter().any(|r| r.flag && r.prob == best));
    }

    #[test]
    fn csv_shape() {
        let inst = OrderInstance::new(15, 2, 0, 0).unwrap();
        let rows = figure1_dump(&inst).unwrap();
        assert_eq!(rows.len(), 256);
        assert_eq!(rows.iter().filter(|r| r.flag).count(), 3);
        let mut out = Vec::new();
        write_figure1_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("y,frac,prob,flag"));
        assert_eq!(text.lines().count(), 257);
        // spot-check one row: y = 64 is a flagged peak with p = 1/4
        let row = text.lines().find(|l| l.starts_with("64,")).unwrap();
        assert!(row.ends_with(",1"), "{row}");
        assert!(row.contains("2.5000000000000000e-1"), "{row}");
    }
}
