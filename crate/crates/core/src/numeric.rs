//! Small numerical kernels shared by the solver and the exact enumerators.

/// `x ln x` with the convention `0 ln 0 = 0`.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln(sum_i exp(v_i))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Normalizes log-weights into probabilities in place.
pub fn normalize_log_weights(log_w: &mut [f64]) {
    let lse = log_sum_exp(log_w);
    for w in log_w.iter_mut() {
        *w = (*w - lse).exp();
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Stops once the bracket is no wider than `tol`. Returns the midpoint of the
/// final bracket. The caller guarantees `f(lo)` and `f(hi)` have opposite
/// signs (or one of them is zero).
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Table of `ln k!` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        LogFactorials(table)
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `ln( n! / prod_i counts_i! )` where `n` is the sum of `counts`.
    pub fn log_multinomial(&self, counts: &[usize]) -> f64 {
        let n: usize = counts.iter().sum();
        self.get(n) - counts.iter().map(|&c| self.get(c)).sum::<f64>()
    }
}

/// Binomial coefficient as a float (exact up to 2^53).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of weak compositions of `n` into `parts` parts.
pub fn composition_count(n: usize, parts: usize) -> f64 {
    if parts == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    binomial((n + parts - 1) as u64, (parts - 1) as u64)
}

/// Iterates over all weak compositions of `n` into `parts` nonnegative parts,
/// in reverse lexicographic order starting from `(n, 0, ..., 0)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<usize>,
    done: bool,
}

impl Compositions {
    pub fn new(n: usize, parts: usize) -> Self {
        if parts == 0 {
            return Compositions { current: Vec::new(), done: n != 0 };
        }
        let mut current = vec![0; parts];
        current[0] = n;
        Compositions { current, done: false }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let parts = self.current.len();
        if parts <= 1 {
            self.done = true;
            return Some(out);
        }
        // Find the rightmost nonzero entry among the first parts-1 positions.
        match (0..parts - 1).rev().find(|&i| self.current[i] > 0) {
            None => self.done = true,
            Some(i) => {
                let tail = self.current[parts - 1];
                self.current[parts - 1] = 0;
                self.current[i] -= 1;
                self.current[i + 1] = tail + 1;
            }
        }
        Some(out)
    }
}
