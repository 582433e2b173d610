#![allow(clippy::excessive_precision)] // golden constants keep their published digits

//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime (visible with `cargo test --test acceptance -- --nocapture`).

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shor_prob::bounds::{
    asymptotic_bound, integral_lower_bound_p, integral_lower_bound_window, series_lower_bound,
    AsymptoticKind,
};
use shor_prob::modular::{
    decompose_order, gcd, is_prime_power, kl_decompose, multiplicative_order,
};
use shor_prob::state::{self, TargetSet};
use shor_prob::{oracle, OrderInstance};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn criterion(name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<(), String>) {
    let started = Instant::now();
    let mut outcome = body();
    let elapsed = started.elapsed();
    if outcome.is_ok() {
        if let Some(limit) = limit {
            if elapsed > limit {
                outcome = Err(format!("runtime {elapsed:.2?} exceeds limit {limit:.2?}"));
            }
        }
    }
    match &outcome {
        Ok(()) => println!("[PASS] {name} ({elapsed:.2?})"),
        Err(msg) => println!("[FAIL] {name} ({elapsed:.2?}): {msg}"),
    }
    if let Err(msg) = outcome {
        panic!("{name}: {msg}");
    }
}

/// Composite Simpson on a uniform grid; the independent quadrature used to
/// cross-check the library's adaptive integrals.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn window_integrand(x: f64, h: i64) -> f64 {
    if h == 0 && x < 1e-12 {
        return PI * PI;
    }
    let s = (PI * x).sin();
    let d = x + h as f64;
    s * s / (d * d)
}

/// The shared random-instance sweep: 200 non-prime-power moduli, random
/// coprime bases, q_pad in {0, 1, 3}, registers capped at 20 qubits.
fn sweep_instances() -> Vec<OrderInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55);
    let mut out = Vec::with_capacity(200);
    while out.len() < 200 {
        let q = [0u32, 1, 3][rng.gen_range(0..3)];
        let cap = (1u64 << (20 - q)).isqrt().min(4096);
        let modulus = rng.gen_range(6..=cap);
        if is_prime_power(modulus) {
            continue;
        }
        let base = rng.gen_range(2..modulus);
        if gcd(base, modulus) != 1 {
            continue;
        }
        let inst = OrderInstance::new(modulus, base, 0, q).unwrap();
        assert!(inst.total_qubits() <= 20);
        out.push(inst);
    }
    out
}

const P_GOLD: f64 = 0.719_824_825_580_805_455_40;
const PAIR_GOLD: f64 = 0.155_776_679_576_395_598_17;
const PT_GOLD: f64 = 0.018_781_342_656_774_252_754;
const P_TILDE_GOLD: f64 = 0.894_382_847_865_713_921_15;

#[test]
fn criterion_1_case_study_reproduction() {
    criterion(
        "criterion 1: case-study golden values (N=247, b=4) from both engines",
        Some(Duration::from_secs(5)),
        || {
            let inst = OrderInstance::new(247, 4, 0, 0).unwrap();
            let tol = 1e-9;

            // closed-form engine
            let report = state::exact_p_tilde(&inst, false).unwrap();
            ensure!((report.p - P_GOLD).abs() < tol, "closed P = {}", report.p);
            let pair = report.p1_pair.unwrap();
            ensure!((pair - PAIR_GOLD).abs() < tol, "closed 2P1 = {pair}");
            let pt = report.pt.unwrap();
            ensure!((pt - PT_GOLD).abs() < tol, "closed Pt = {pt}");
            let p_tilde = report.p_tilde.unwrap();
            ensure!(
                (p_tilde - P_TILDE_GOLD).abs() < tol,
                "closed P~ = {p_tilde}"
            );

            // full-transform oracle
            let table = oracle::full_transform(&inst).unwrap();
            let nearest = state::target_set_members(&inst, TargetSet::Nearest, false).unwrap();
            let p_oracle = table.mass_on(&nearest);
            ensure!((p_oracle - P_GOLD).abs() < tol, "oracle P = {p_oracle}");

            let mut pair_set = Vec::new();
            let mut pt_set = Vec::new();
            for (i, &y) in nearest.iter().enumerate() {
                let s = i as u64 + 1;
                pair_set.push(y - 1);
                pair_set.push(y + 1);
                // one-sided rule: +2 when y_s undershoots, else -2
                if state::delta(s, &inst) < 0.0 {
                    pt_set.push(y + 2);
                } else {
                    pt_set.push(y - 2);
                }
            }
            let pair_oracle = table.mass_on(&pair_set);
            ensure!(
                (pair_oracle - PAIR_GOLD).abs() < tol,
                "oracle 2P1 = {pair_oracle}"
            );
            let pt_oracle = table.mass_on(&pt_set);
            ensure!((pt_oracle - PT_GOLD).abs() < tol, "oracle Pt = {pt_oracle}");

            let window = state::target_set_members(&inst, TargetSet::Window2, false).unwrap();
            let p_tilde_oracle = table.mass_on(&window);
            ensure!(
                (p_tilde_oracle - P_TILDE_GOLD).abs() < tol,
                "oracle P~ = {p_tilde_oracle}"
            );

            // the two engines agree far beyond the golden-digit tolerance
            ensure!(
                (p_tilde - p_tilde_oracle).abs() < 1e-12,
                "engines diverge: {p_tilde} vs {p_tilde_oracle}"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_2_backend_equivalence_sweep() {
    criterion(
        "criterion 2: closed form vs FFT oracle on 200 random instances",
        Some(Duration::from_secs(120)),
        || {
            let mut worst_dev = 0.0f64;
            let mut worst_unit = 0.0f64;
            for inst in sweep_instances() {
                let fft = oracle::full_transform(&inst).unwrap();
                for y in 0..inst.register_len() {
                    let dev =
                        (fft.probabilities[y as usize] - oracle::amplitude_sq(y, &inst)).abs();
                    if dev > worst_dev {
                        worst_dev = dev;
                    }
                }
                worst_unit = worst_unit.max((fft.total_mass() - 1.0).abs());
            }
            ensure!(
                worst_dev <= 1e-11,
                "max per-outcome deviation {worst_dev:.3e}"
            );
            ensure!(worst_unit <= 1e-10, "max unitarity defect {worst_unit:.3e}");
            Ok(())
        },
    );
}

#[test]
fn criterion_3_bound_soundness_sweep() {
    criterion(
        "criterion 3: every applicable bound sits below the exact probability",
        None,
        || {
            for inst in sweep_instances() {
                let p = state::exact_p(&inst).unwrap().p;
                let p_tilde = state::exact_p_tilde_q(&inst, false)
                    .unwrap()
                    .p_tilde
                    .unwrap();

                let series =
                    series_lower_bound(inst.total_qubits(), inst.n0, inst.kappa, inst.r_prime);
                if series.sound_context() {
                    ensure!(
                        series.value <= p,
                        "series bound {} > P = {p} at N={} b={} q={}",
                        series.value,
                        inst.modulus,
                        inst.base,
                        inst.q_pad
                    );
                }

                let integral = integral_lower_bound_p(inst.modulus, inst.kappa, inst.r_prime);
                if integral.sound_context() {
                    ensure!(
                        integral.value <= p,
                        "integral bound {} > P = {p} at N={} b={} q={}",
                        integral.value,
                        inst.modulus,
                        inst.base,
                        inst.q_pad
                    );
                }

                let window =
                    integral_lower_bound_window(inst.modulus, inst.kappa, inst.r_prime, inst.q_pad);
                if window.sound_context() {
                    ensure!(
                        window.value <= p_tilde,
                        "window bound {} > P~ = {p_tilde} at N={} b={} q={}",
                        window.value,
                        inst.modulus,
                        inst.base,
                        inst.q_pad
                    );
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_4_published_thresholds() {
    criterion("criterion 4: published bound thresholds", None, || {
        let checks = [
            (
                integral_lower_bound_p(1 << 11, 0, 75).value,
                0.75,
                "F(2^11, 0, 75)",
            ),
            (
                integral_lower_bound_p(1 << 15, 0, 447).value,
                0.77,
                "F(2^15, 0, 447)",
            ),
            (
                integral_lower_bound_window(1 << 16, 0, 59, 0).value,
                0.90,
                "W(2^16, 0, 59, 0)",
            ),
            (
                integral_lower_bound_window(1 << 16, 0, 299, 0).value,
                0.94,
                "W(2^16, 0, 299, 0)",
            ),
            (
                integral_lower_bound_window(1 << 20, 0, 819, 3).value,
                0.99,
                "W(2^20, 0, 819, 3)",
            ),
        ];
        for (value, floor, label) in checks {
            ensure!(value > floor, "{label} = {value} does not exceed {floor}");
        }
        Ok(())
    });
}

#[test]
fn criterion_5_asymptotic_constants() {
    criterion(
        "criterion 5: asymptotic constants and the integral identity",
        None,
        || {
            let nearest = asymptotic_bound(AsymptoticKind::Nearest, 0);
            ensure!(
                (nearest - 0.7737).abs() < 5e-5,
                "nearest constant {nearest}"
            );
            let window0 = asymptotic_bound(AsymptoticKind::WindowQ, 0);
            ensure!((window0 - 0.9499).abs() < 5e-5, "window constant {window0}");
            let window3 = asymptotic_bound(AsymptoticKind::WindowQ, 3);
            ensure!((window3 - 0.9937).abs() < 5e-5, "q=3 constant {window3}");

            // four-integral identity, with an independent quadrature
            let mut sum = 0.0;
            for h in -2i64..2 {
                sum += 2.0 / (PI * PI) * simpson(|x| window_integrand(x, h), 0.0, 0.5, 8192);
            }
            ensure!(
                (sum - window0).abs() < 1e-10,
                "four-integral sum {sum} vs 2 Si(4 pi)/pi = {window0}"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_6_series_bound_claims() {
    criterion(
        "criterion 6: series bounds exceed 0.70 for all r in [40, 2000] at n - n0 = 11",
        None,
        || {
            for r in 40u64..=2000 {
                let (kappa, r_prime) = decompose_order(r);
                let report = series_lower_bound(19, 8, kappa, r_prime);
                ensure!(
                    report.value > 0.70,
                    "r = {r} (kappa {kappa}, r' {r_prime}): {}",
                    report.value
                );
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_7_number_theory_properties() {
    criterion(
        "criterion 7: order bound, residue bijection, and remainder coprimality",
        Some(Duration::from_secs(60)),
        || {
            // r < N/2 for every non-prime-power modulus up to 1000
            for modulus in 6u64..=1000 {
                if is_prime_power(modulus) {
                    continue;
                }
                for base in 2..modulus {
                    if gcd(base, modulus) != 1 {
                        continue;
                    }
                    let r = multiplicative_order(base, modulus).unwrap();
                    ensure!(2 * r < modulus, "order {r} of {base} mod {modulus}");
                }
            }

            // s -> (k r + s) t mod r permutes {1..r-1}, exhaustively
            let mut seen = vec![0u32; 201];
            let mut stamp = 0u32;
            for r in 2u64..=200 {
                for t in 1..r {
                    if gcd(t, r) != 1 {
                        continue;
                    }
                    for k in 0u64..=3 {
                        stamp += 1;
                        for s in 1..r {
                            let image = ((k * r + s) * t % r) as usize;
                            ensure!(
                                image != 0 && seen[image] != stamp,
                                "collision at r={r} t={t} k={k} s={s}"
                            );
                            seen[image] = stamp;
                        }
                    }
                }
            }

            // remainder of 2^(n-kappa) by odd r' is coprime to r'
            for n_total in 2u32..=24 {
                for kappa in 0..n_total {
                    for r_prime in (1u64..=99).step_by(2) {
                        if (1u128 << (n_total - kappa)) <= r_prime as u128 {
                            continue;
                        }
                        let kl = kl_decompose(n_total, kappa, r_prime);
                        ensure!(
                            kl.t == 0 || gcd(kl.t, r_prime) == 1,
                            "gcd({}, {r_prime}) > 1 at n={n_total} kappa={kappa}",
                            kl.t
                        );
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_8_inequality_grids() {
    criterion("criterion 8: sine-estimate inequality grids", None, || {
        // sin^2 x >= (x - x^3/6)^2 on [0, 3 pi/4]
        let grid = 100_000;
        for i in 0..=grid {
            let x = 0.75 * PI * i as f64 / grid as f64;
            let lhs = x.sin() * x.sin();
            let cubic = x - x * x * x / 6.0;
            ensure!(
                lhs >= cubic * cubic - 1e-15,
                "sine estimate fails at x = {x}"
            );
        }

        // sin^2(a +- b) >= sin^2(a)(1 - b^2) - 2|b||sin a| on a random grid
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100_000 {
            let a: f64 = rng.gen_range(-10.0..10.0);
            let b: f64 = rng.gen_range(-3.0..3.0);
            let floor = a.sin() * a.sin() * (1.0 - b * b) - 2.0 * b.abs() * a.sin().abs();
            for v in [a + b, a - b] {
                ensure!(
                    v.sin() * v.sin() >= floor - 1e-12,
                    "angle-shift floor fails at a = {a}, b = {b}"
                );
            }
        }

        // partial sums of 1/(h - 1/2)^2 never exceed 6
        let mut partial = 0.0f64;
        for h in 1..=1_000_000u64 {
            let d = h as f64 - 0.5;
            partial += 1.0 / (d * d);
            ensure!(partial <= 6.0, "partial sum {partial} exceeds 6 at h = {h}");
        }

        // Riemann-sum vs integral comparison for the shifted window integrand
        for r_prime in (3u64..=99).step_by(2) {
            let upper = 0.5 - 0.5 / r_prime as f64;
            for h in -16i64..=16 {
                if h == 0 {
                    continue;
                }
                let mut lhs = 0.0;
                for j in 1..=r_prime / 2 {
                    let x = j as f64 / r_prime as f64;
                    let s = (PI * x).sin();
                    let d = x + h as f64;
                    lhs += s * s / (d * d);
                }
                lhs /= r_prime as f64;
                let rhs = simpson(|x| window_integrand(x, h), 0.0, upper, 4096);
                ensure!(
                    lhs >= rhs - 1e-9,
                    "Riemann comparison fails at r' = {r_prime}, h = {h}: {lhs} < {rhs}"
                );
            }
        }
        Ok(())
    });
}
