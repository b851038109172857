//! Least-squares line fits on log-log data.

use crate::error::{Error, Result};

/// Errors at or below this value are treated as round-off and dropped from
/// order fits.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residual variance (0 for two
    /// points or an exact fit).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Unweighted least-squares fit of `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("fit inputs differ in length".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            usable: n,
            required: 2,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        points: n,
    })
}

/// Fits `log y` against `log x`, dropping points with `y <= floor` or
/// non-finite values. At least `min_points` must survive.
pub fn log_log_fit(points: &[(f64, f64)], floor: f64, min_points: usize) -> Result<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && y.is_finite() && *y > floor)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    if xs.len() < min_points {
        return Err(Error::TooFewPoints {
            usable: xs.len(),
            required: min_points,
        });
    }
    linear_fit(&xs, &ys)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
