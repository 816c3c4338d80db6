//! Independent oracles shared by the integration tests. Everything here is
//! deliberately implemented without touching the library's own transform /
//! quadrature paths, so the tests compare two genuinely different routes.
#![allow(dead_code)] // each test binary uses its own subset

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Composite Simpson quadrature with a fixed panel count (no adaptivity —
/// distinct from the library's adaptive rule).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        acc += h / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    }
    acc
}

/// Composite Gauss-Legendre (5 point) quadrature; a second independent rule.
pub fn gauss_legendre5(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    // nodes/weights on [-1, 1]
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let mid = a + (i as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W.iter()) {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    acc * 0.5 * h
}

/// Exact-transition sampler for `dx = -mu x dt + sigma dbeta` started at 0:
/// returns `(x(t), x(t + lag))` for one path.
pub fn ou_pair(
    mu: f64,
    sigma: f64,
    t: f64,
    lag: f64,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let mut x = 0.0;
    let mut at_t = 0.0;
    let total = t + lag;
    let h = total / steps as f64;
    let decay = (-mu * h).exp();
    let amp = sigma * ((1.0 - decay * decay) / (2.0 * mu)).sqrt();
    let t_index = (t / h).round() as usize;
    for m in 1..=steps {
        let xi: f64 = rng.sample(rand_distr::StandardNormal);
        x = x * decay + amp * xi;
        if m == t_index {
            at_t = x;
        }
    }
    (at_t, x)
}

/// Mean and standard error of a sample.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pearson correlation of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}
