use super::comparison::ComparisonPoint;
use crate::datasets::Label;
use crate::error::{Error, Result};

/// Mean silhouette coefficient of the 2-D points, using class labels as
/// cluster assignments. Ranges over `[-1, 1]`; higher is cleaner separation.
pub fn separation_score(points: &[ComparisonPoint]) -> Result<f64> {
    let positives = points.iter().filter(|p| p.label == Label::Positive).count();
    let negatives = points.len() - positives;
    if positives < 2 || negatives < 2 {
        return Err(Error::Contract(format!(
            "separation score needs at least 2 points per class, got {positives} positive and {negatives} negative"
        )));
    }

    let total: f64 = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (mut same, mut other) = (0.0, 0.0);
            for (j, q) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (p.x - q.x).hypot(p.y - q.y);
                if q.label == p.label {
                    same += d;
                } else {
                    other += d;
                }
            }
            let (own, rest) = if p.label == Label::Positive { (positives, negatives) } else { (negatives, positives) };
            let a = same / (own - 1) as f64;
            let b = other / rest as f64;
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .sum();
    Ok(total / points.len() as f64)
}
