//! Sums over the integer lattice disc `|k| <= N` in two dimensions.
//!
//! Evaluations group lattice points by the squared radius and cache the
//! multiplicities per cutoff, so repeated sums (e.g. inside a fixed-point
//! bisection) cost one pass over the distinct radii instead of the full
//! disc enumeration.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Compensated (Kahan) accumulator; lattice sums run over millions of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Multiplicities of squared radii on the disc `|k| <= n`, sorted by `ksq`.
pub type DiscCounts = Arc<Vec<(u64, u32)>>;

fn cache() -> &'static Mutex<BTreeMap<usize, DiscCounts>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, DiscCounts>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Number-of-representations table for the disc of radius `n`: entry
/// `(ksq, count)` says `count` lattice points have `|k|^2 = ksq <= n^2`.
pub fn disc_counts(n: usize) -> DiscCounts {
    if let Some(hit) = cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let n_i = n as i64;
    let limit = n_i * n_i;
    let mut table = vec![0u32; (limit + 1) as usize];
    for k1 in -n_i..=n_i {
        let rem = limit - k1 * k1;
        let k2_max = int_sqrt(rem);
        for k2 in -k2_max..=k2_max {
            table[(k1 * k1 + k2 * k2) as usize] += 1;
        }
    }
    let entries: Vec<(u64, u32)> = table
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(ksq, c)| (ksq as u64, c))
        .collect();
    let counts: DiscCounts = Arc::new(entries);
    cache().lock().unwrap().insert(n, counts.clone());
    counts
}

/// Exact integer floor square root.
pub fn int_sqrt(v: i64) -> i64 {
    if v < 0 {
        return -1;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// `sum_{|k| <= n, k in Z^2} f(|k|^2)` by exact enumeration.
pub fn sum_over_disc(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let counts = disc_counts(n);
    let mut acc = KahanSum::default();
    for &(ksq, count) in counts.iter() {
        acc.add(count as f64 * f(ksq as f64));
    }
    acc.value()
}

/// Number of lattice points in the disc.
pub fn disc_mode_count(n: usize) -> usize {
    disc_counts(n).iter().map(|&(_, c)| c as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_disc_counts() {
        // |k| <= 1: (0,0) and the four unit vectors
        assert_eq!(disc_mode_count(1), 5);
        // |k| <= 2 adds (+-1,+-1) and (+-2,0),(0,+-2)
        assert_eq!(disc_mode_count(2), 13);
    }

    #[test]
    fn counts_match_brute_force() {
        let n = 23i64;
        let mut brute = 0usize;
        let mut brute_sum = 0.0;
        for k1 in -n..=n {
            for k2 in -n..=n {
                let ksq = k1 * k1 + k2 * k2;
                if ksq <= n * n {
                    brute += 1;
                    brute_sum += 1.0 / (1.0 + ksq as f64);
                }
            }
        }
        assert_eq!(disc_mode_count(n as usize), brute);
        let grouped = sum_over_disc(n as usize, |ksq| 1.0 / (1.0 + ksq));
        assert!((grouped - brute_sum).abs() < 1e-12);
    }

    #[test]
    fn int_sqrt_edges() {
        assert_eq!(int_sqrt(0), 0);
        assert_eq!(int_sqrt(15), 3);
        assert_eq!(int_sqrt(16), 4);
        assert_eq!(int_sqrt(17), 4);
        assert_eq!(int_sqrt((1 << 40) - 1), (1 << 20) - 1);
    }
}
