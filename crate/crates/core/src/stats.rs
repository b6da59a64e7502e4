//! Small sample-statistics helpers shared by the Monte Carlo checks.

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    /// Distance from `value` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.se
    }
}

/// Mean of a serially correlated sequence with a batch-means standard error.
///
/// The sequence is cut into `n_batches` contiguous batches (a trailing
/// remainder is dropped); the standard error is the spread of the batch means.
/// Batches must be much longer than the correlation time of the samples.
pub fn batch_means(samples: &[f64], n_batches: usize) -> Estimate {
    assert!(n_batches >= 2, "need at least two batches");
    let len = samples.len() / n_batches;
    assert!(len >= 1, "fewer samples than batches");
    let means: Vec<f64> = samples
        .chunks_exact(len)
        .take(n_batches)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect();
    mean_and_se(&means)
}

/// Sample mean and the standard error of that mean for independent samples.
pub fn mean_and_se(samples: &[f64]) -> Estimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate {
        mean,
        se: (var / n).sqrt(),
    }
}

/// Unbiased sample variance.
pub fn variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}
