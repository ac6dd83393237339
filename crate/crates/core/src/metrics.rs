use crate::error::{invalid, Result};

pub const BCE_EPS: f64 = 1e-12;

/// Class 1 iff `p > 0.5`; a tie goes to class 0.
pub fn threshold(p: f64) -> u8 {
    u8::from(p > 0.5)
}

pub fn accuracy(predicted: &[u8], truth: &[u8]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != truth.len() {
        return Err(invalid(format!(
            "accuracy needs equal nonempty inputs, got {} and {}",
            predicted.len(),
            truth.len()
        )));
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / predicted.len() as f64)
}

pub(crate) fn bce_term(p: f64, y: u8) -> f64 {
    let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// dℓ/dp of one clipped BCE term; zero where the clip is active.
pub(crate) fn bce_term_grad(p: f64, y: u8) -> f64 {
    if !(BCE_EPS..=1.0 - BCE_EPS).contains(&p) {
        return 0.0;
    }
    if y == 1 {
        -1.0 / p
    } else {
        1.0 / (1.0 - p)
    }
}

/// Mean binary cross-entropy with `p` clipped to `[1e-12, 1 − 1e-12]`.
pub fn bce_loss(probabilities: &[f64], labels: &[u8]) -> Result<f64> {
    if probabilities.is_empty() || probabilities.len() != labels.len() {
        return Err(invalid(format!(
            "bce needs equal nonempty inputs, got {} and {}",
            probabilities.len(),
            labels.len()
        )));
    }
    let total: f64 = probabilities.iter().zip(labels).map(|(&p, &y)| bce_term(p, y)).sum();
    Ok(total / probabilities.len() as f64)
}

/// Mean and sample standard deviation (n − 1 denominator; 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
