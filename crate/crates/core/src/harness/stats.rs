use crate::error::{Error, Result};

/// Ordinary least-squares line `y = slope x + intercept` and its `R^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("fit inputs differ in length".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("fit needs 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (my + slope * (a - mx));
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Fit of `ln y` against `t` over `t in [t_lo, t_hi]`; `series[t]` is the
/// value at integer time `t`.
pub fn log_linear_fit(series: &[f64], t_lo: usize, t_hi: usize) -> Result<LinearFit> {
    if t_hi < t_lo || t_hi >= series.len() {
        return Err(Error::InvalidInput(format!(
            "fit window [{t_lo}, {t_hi}] outside series of length {}",
            series.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, &v) in series.iter().enumerate().take(t_hi + 1).skip(t_lo) {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidInput(format!("non-positive value {v} at t={t}")));
        }
        xs.push(t as f64);
        ys.push(v.ln());
    }
    linear_fit(&xs, &ys)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(
            "pearson needs two equal series of length >= 2".into(),
        ));
    }
    let nf = x.len() as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidInput("constant series has no correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
