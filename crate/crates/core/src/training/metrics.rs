use crate::datasets::Label;
use crate::error::{Error, Result};

fn check(outputs: &[f64], labels: &[f64]) -> Result<()> {
    if outputs.len() != labels.len() {
        return Err(Error::Contract(format!("{} outputs but {} labels", outputs.len(), labels.len())));
    }
    if outputs.is_empty() {
        return Err(Error::Contract("no samples".into()));
    }
    Ok(())
}

/// Mean squared error against ±1 labels.
pub fn loss(outputs: &[f64], labels: &[f64]) -> Result<f64> {
    check(outputs, labels)?;
    let sum: f64 = outputs.iter().zip(labels).map(|(f, y)| (f - y).powi(2)).sum();
    Ok(sum / outputs.len() as f64)
}

/// Fraction of samples whose sign prediction (0 counts as +1) matches the label.
pub fn accuracy(outputs: &[f64], labels: &[f64]) -> Result<f64> {
    check(outputs, labels)?;
    let hits = outputs.iter().zip(labels).filter(|(f, y)| Label::predict(**f).value() == **y).count();
    Ok(hits as f64 / outputs.len() as f64)
}
