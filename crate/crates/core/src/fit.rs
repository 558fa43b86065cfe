//! Least-squares line fits shared by the estimation routines.

/// Result of an ordinary least-squares line fit `y ~ intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 when fewer than 3 points).
    pub slope_stderr: f64,
}

/// Fit a line through `(xs[i], ys[i])`. Requires at least two points with
/// distinct x; callers validate their inputs, so this panics on degenerate
/// data in debug builds and divides by ~0 otherwise.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> FitLine {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if xs.len() > 2 {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    FitLine {
        slope,
        intercept,
        slope_stderr,
    }
}
