//! Adaptive quadrature used by the stationary-moment and Bessel evaluations.

/// Number of equal panels the interval is split into before refinement;
/// keeps narrow interior features from being skipped by the error estimate.
const BASE_PANELS: usize = 256;

/// Adaptive Simpson integration of `f` on `[a, b]`.
///
/// The interval is pre-split into equal panels, each refined adaptively with
/// its share of a tolerance scaled to a coarse composite estimate, so
/// integrals of any magnitude converge to near machine relative precision.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let coarse = composite_simpson(f, a, b, BASE_PANELS);
    let tol = 1e-12 * coarse.abs().max(1e-300) / BASE_PANELS as f64;
    let h = (b - a) / BASE_PANELS as f64;
    let mut total = 0.0;
    for i in 0..BASE_PANELS {
        let x0 = a + i as f64 * h;
        let x1 = if i + 1 == BASE_PANELS { b } else { x0 + h };
        let xm = 0.5 * (x0 + x1);
        let f0 = f(x0);
        let fm = f(xm);
        let f1 = f(x1);
        let whole = simpson(x0, x1, f0, fm, f1);
        total += adaptive(f, x0, x1, f0, fm, f1, whole, tol, 45);
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn composite_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        acc += simpson(x0, x1, f(x0), f(xm), f(x1));
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Richardson error estimate is delta / 15; accepting at |delta| <= tol
    // leaves a comfortable safety margin.
    if depth == 0 || delta.abs() <= tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
