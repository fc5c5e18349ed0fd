//! Shared numeric helpers, all written for stability over speed.

/// `log Σ exp(x)` with max-subtraction; `-inf` for an empty slice.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Softmax with max-subtraction; the result sums to 1.
pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    let z: f64 = out.iter().sum();
    for p in &mut out {
        *p /= z;
    }
    out
}

/// Scales a non-negative vector to sum to 1.
pub fn normalize(xs: &mut [f64]) {
    let z: f64 = xs.iter().sum();
    debug_assert!(z > 0.0, "normalizing a zero vector");
    for x in xs {
        *x /= z;
    }
}

/// Total-variation distance between two distributions of equal length.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Draws an index from a distribution; the caller guarantees `p` sums to 1.
pub fn sample_index<R: rand::Rng>(p: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.gen();
    for (i, &pi) in p.iter().enumerate() {
        u -= pi;
        if u <= 0.0 {
            return i;
        }
    }
    p.len() - 1
}
