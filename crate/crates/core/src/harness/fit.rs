use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Least-squares line through (log c, log value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit, HarnessError> {
    if pairs.len() < 3 {
        return Err(HarnessError::TooFewPoints(pairs.len()));
    }
    if let Some(&(c, value)) = pairs.iter().find(|&&(c, v)| !(c > 0.0 && v > 0.0 && v.is_finite())) {
        return Err(HarnessError::NonPositive { c, value });
    }
    let points: Vec<(f64, f64)> = pairs.iter().map(|&(c, v)| (c.ln(), v.ln())).collect();
    let (slope, intercept, r_squared) = least_squares(&points);
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points,
    })
}

/// (slope, intercept, r²) of the ordinary least-squares line.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let data: Vec<_> = [8.0, 16.0, 32.0, 64.0].iter().map(|&c: &f64| (c, 7.0 / c)).collect();
        let fit = fit_rate(&data).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-12);
        let data: Vec<_> = [2.0, 5.0, 11.0].iter().map(|&c: &f64| (c, 3.0 / c.sqrt())).collect();
        assert!((fit_rate(&data).unwrap().slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 2.0)]), Err(HarnessError::TooFewPoints(2))));
        assert!(matches!(
            fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]),
            Err(HarnessError::NonPositive { .. })
        ));
    }
}
