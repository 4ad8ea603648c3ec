//! Least-squares regression and isotonic regression used by the exponent fits.

use crate::error::{Error, Result};

/// Ordinary least squares via Householder QR on centred, scaled columns.
/// Returns coefficients for `cols` plus the intercept as the last entry.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = y.len();
    let k = cols.len();
    if m < k + 2 {
        return Err(Error::invalid(format!(
            "regression needs at least {} points, got {m}",
            k + 2
        )));
    }
    let ymean = y.iter().sum::<f64>() / m as f64;
    let mut means = Vec::with_capacity(k);
    let mut scales = Vec::with_capacity(k);
    let mut a = vec![vec![0.0; m]; k];
    for (j, c) in cols.iter().enumerate() {
        let mu = c.iter().sum::<f64>() / m as f64;
        let sd = (c.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m as f64).sqrt();
        if sd == 0.0 {
            return Err(Error::invalid("constant regression column"));
        }
        means.push(mu);
        scales.push(sd);
        for i in 0..m {
            a[j][i] = (c[i] - mu) / sd;
        }
    }
    let mut b: Vec<f64> = y.iter().map(|v| v - ymean).collect();
    // Householder QR, column-major.
    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("rank-deficient regression"));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>();
        if vn == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j) {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vn;
            for (x, vi) in col[j..].iter_mut().zip(&v) {
                *x -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&b[j..]).map(|(p, q)| p * q).sum();
        let f = 2.0 * dot / vn;
        for (x, vi) in b[j..].iter_mut().zip(&v) {
            *x -= f * vi;
        }
    }
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = b[j];
        for l in j + 1..k {
            s -= a[l][j] * coef[l];
        }
        if a[j][j].abs() < 1e-14 * (m as f64).sqrt() {
            return Err(Error::invalid("ill-conditioned regression"));
        }
        coef[j] = s / a[j][j];
    }
    let rss = b[k..].iter().map(|v| v * v).sum::<f64>();
    let mut out: Vec<f64> = coef.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let intercept = ymean - out.iter().zip(&means).map(|(c, mu)| c * mu).sum::<f64>();
    out.push(intercept);
    Ok((out, (rss / m as f64).sqrt()))
}

/// Slope of a simple linear regression y ~ a + b x.
pub fn linear_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let (c, rms) = least_squares(&[x.to_vec()], y)?;
    Ok((c[0], rms))
}

/// Pool-adjacent-violators: nondecreasing least-squares fit with weights.
pub fn isotonic_increasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    let mut vals: Vec<f64> = Vec::with_capacity(y.len());
    let mut wts: Vec<f64> = Vec::with_capacity(y.len());
    let mut lens: Vec<usize> = Vec::with_capacity(y.len());
    for (yi, wi) in y.iter().zip(w) {
        vals.push(*yi);
        wts.push(*wi);
        lens.push(1);
        while vals.len() > 1 && vals[vals.len() - 2] > vals[vals.len() - 1] {
            let v2 = vals.pop().unwrap();
            let w2 = wts.pop().unwrap();
            let l2 = lens.pop().unwrap();
            let last = vals.len() - 1;
            let wsum = wts[last] + w2;
            vals[last] = (vals[last] * wts[last] + v2 * w2) / wsum;
            wts[last] = wsum;
            lens[last] += l2;
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (v, l) in vals.iter().zip(&lens) {
        out.extend(std::iter::repeat(*v).take(*l));
    }
    out
}

/// Fitted asymptotic exponents of ln F(x), x = ln t: power a, log b.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PowerLogFit {
    pub power: f64,
    pub log: f64,
    pub rms: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

/// Regress y = a x + b ln x + c over the samples; `fixed_loglog` is subtracted
/// as `fixed_loglog · ln ln x` before fitting (not identifiable at desk scale).
pub fn fit_power_log(x: &[f64], y: &[f64], fixed_loglog: f64) -> Result<PowerLogFit> {
    if x.iter().any(|v| *v <= 1.0) {
        return Err(Error::invalid("log-exponent fit needs ln t > 1"));
    }
    let yy: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| yi - fixed_loglog * xi.ln().ln())
        .collect();
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let (c, rms) = least_squares(&[x.to_vec(), lx], &yy)?;
    Ok(PowerLogFit {
        power: c[0],
        log: c[1],
        rms,
        x_lo: x[0],
        x_hi: x[x.len() - 1],
    })
}
