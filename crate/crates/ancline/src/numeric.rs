//! Shared numeric kernels: log-space accumulation and falling-factorial
//! ratios for without-replacement sampling weights.

/// `log(sum(exp(v)))`, stabilised by the maximum entry.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + v.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Falling-factorial ratio `k^(n) / N^(n)`, the probability that `n`
/// individuals drawn without replacement from a population of `N` containing
/// `k` marked ones are all marked.
///
/// Accumulated in log space so that `n` up to `N = 10^4` cannot overflow.
/// Returns 0 whenever `n > k` (a zero factor enters the product).
pub fn falling_factorial_ratio(k: usize, n: usize, pop: usize) -> f64 {
    debug_assert!(k <= pop && n <= pop);
    if n == 0 {
        return 1.0;
    }
    if n > k {
        return 0.0;
    }
    let mut log_ratio = 0.0;
    for j in 0..n {
        log_ratio += (((k - j) as f64) / ((pop - j) as f64)).ln();
    }
    log_ratio.exp()
}
