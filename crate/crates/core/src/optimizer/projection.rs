use crate::error::{Error, Result};
use crate::weights::SimplexWeights;

/// Euclidean projection onto the probability simplex by sorting and
/// thresholding.
pub fn project_to_simplex(v: &[f64]) -> Result<SimplexWeights> {
    if v.is_empty() {
        return Err(Error::InvalidWeights("cannot project an empty vector".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("projection input {v:?}")));
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk > t {
            theta = t;
        }
    }
    Ok(SimplexWeights::from_raw(
        v.iter().map(|x| (x - theta).max(0.0)).collect(),
    ))
}
