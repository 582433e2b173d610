//! Adaptive Simpson quadrature.

use crate::kahan::KahanSum;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first cut into panels of width at most 1/2 so that
/// oscillatory integrands (sine-integral tails run out to arguments in the
/// thousands) never fool the initial Simpson estimate, then each panel is
/// refined adaptively with Richardson extrapolation. Returns 0 for an empty
/// interval.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / 0.5).ceil() as usize;
    let panel_tol = tol / panels as f64;
    let mut total = KahanSum::new();
    for i in 0..panels {
        let x0 = a + (b - a) * i as f64 / panels as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / panels as f64;
        total.add(adaptive_simpson(&f, x0, x1, panel_tol));
    }
    total.value()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(mid), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let halves = left + right;
    if depth == 0 || (halves - whole).abs() <= 15.0 * tol {
        return halves + (halves - whole) / 15.0;
    }
    refine(f, a, mid, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, mid, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-12), 0.0);
        assert_eq!(integrate(|x| x, 2.0, 1.0, 1e-12), 0.0);
    }

    #[test]
    fn oscillatory_long_range() {
        // integral of sin over [0, 200*pi] vanishes
        let v = integrate(|x| x.sin(), 0.0, 200.0 * PI, 1e-12);
        assert!(v.abs() < 1e-10, "got {v}");
        // and over a half period it is 2
        let w = integrate(|x| x.sin(), 0.0, PI, 1e-13);
        assert!((w - 2.0).abs() < 1e-12, "got {w}");
    }

    #[test]
    fn known_transcendental() {
        let v = integrate(|x| (-x).exp(), 0.0, 5.0, 1e-13);
        assert!((v - (1.0 - (-5.0f64).exp())).abs() < 1e-12);
    }
}
