#![allow(dead_code)]

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn within(mean: f64, se: f64, target: f64, k: f64) -> bool {
    (mean - target).abs() <= k * se
}
