//! Derivatives and quadrature on uniformly sampled fields.
//!
//! Two stencil families are provided. `Stencil::Central` is the classic
//! three-point scheme with second-order one-sided ends. `Stencil::Compact` is
//! the fourth-order Pade scheme
//!
//! ```text
//! (f''[i-1] + 10 f''[i] + f''[i+1]) / 12 = (f[i+1] - 2 f[i] + f[i-1]) / h^2
//! ```
//!
//! closed with explicit fourth-order one-sided formulas. The compact relation
//! is the same three-term identity the Numerov recurrence enforces, so for a
//! Numerov eigenvector `-f''/f` reproduces `k^2` up to rounding.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Second-order central differences.
    Central,
    /// Fourth-order compact (Pade) differences.
    #[default]
    Compact,
}

/// Composite trapezoidal rule for samples spaced by `h`.
pub fn trapezoid(y: &[f64], h: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (y[0] + y[n - 1]) + y[1..n - 1].iter().sum::<f64>()),
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` multiplies `x[i-1]` and `upper[i]` multiplies `x[i+1]` in row `i`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i + 1] * next;
    }
}

fn check_len(y: &[f64], min: usize) -> Result<()> {
    if y.len() < min {
        Err(Error::Size(format!(
            "need at least {min} samples, got {}",
            y.len()
        )))
    } else {
        Ok(())
    }
}

/// Second derivative of uniformly spaced samples.
pub fn second_derivative(y: &[f64], h: f64, stencil: Stencil) -> Result<Vec<f64>> {
    second_derivative_pinned(y, h, stencil, (None, None))
}

/// As [`second_derivative`], with the end values optionally prescribed
/// instead of taken from the one-sided closures.
pub fn second_derivative_pinned(
    y: &[f64],
    h: f64,
    stencil: Stencil,
    ends: (Option<f64>, Option<f64>),
) -> Result<Vec<f64>> {
    check_len(y, 3)?;
    let n = y.len();
    let h2 = h * h;
    if stencil == Stencil::Central || n < 6 {
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2;
        }
        if n >= 4 {
            d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
            d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
        } else {
            d[0] = d[1];
            d[n - 1] = d[n - 2];
        }
        d[0] = ends.0.unwrap_or(d[0]);
        d[n - 1] = ends.1.unwrap_or(d[n - 1]);
        return Ok(d);
    }

    let one_sided = |f0: f64, f1: f64, f2: f64, f3: f64, f4: f64, f5: f64| {
        (45.0 * f0 - 154.0 * f1 + 214.0 * f2 - 156.0 * f3 + 61.0 * f4 - 10.0 * f5) / (12.0 * h2)
    };
    let d0 = ends.0.unwrap_or_else(|| one_sided(y[0], y[1], y[2], y[3], y[4], y[5]));
    let dn = ends
        .1
        .unwrap_or_else(|| one_sided(y[n - 1], y[n - 2], y[n - 3], y[n - 4], y[n - 5], y[n - 6]));

    let m = n - 2;
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 12.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2)
        .collect();
    rhs[0] -= d0;
    rhs[m - 1] -= dn;
    let off = vec![1.0; m];
    let diag = vec![10.0; m];
    solve_tridiagonal(&off, &diag, &off, &mut rhs);

    let mut d = Vec::with_capacity(n);
    d.push(d0);
    d.extend_from_slice(&rhs);
    d.push(dn);
    Ok(d)
}

/// First derivative of uniformly spaced samples.
pub fn first_derivative(y: &[f64], h: f64, stencil: Stencil) -> Result<Vec<f64>> {
    check_len(y, 3)?;
    let n = y.len();
    if stencil == Stencil::Central || n < 6 {
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
        d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
        return Ok(d);
    }

    let d0 = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
    let dn = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4]
        + 3.0 * y[n - 5])
        / (12.0 * h);

    let m = n - 2;
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 3.0 * (y[i + 1] - y[i - 1]) / h)
        .collect();
    rhs[0] -= d0;
    rhs[m - 1] -= dn;
    let off = vec![1.0; m];
    let diag = vec![4.0; m];
    solve_tridiagonal(&off, &diag, &off, &mut rhs);

    let mut d = Vec::with_capacity(n);
    d.push(d0);
    d.extend_from_slice(&rhs);
    d.push(dn);
    Ok(d)
}

/// Pads `y` with `ghosts` mirrored samples at each end.
///
/// For a cell-centred grid the sample at `-(j + 1/2) h` mirrors the one at
/// `(j + 1/2) h`, scaled by `left_sign`; likewise at the far end.
pub fn mirror_extend(y: &[f64], ghosts: usize, left_sign: f64, right_sign: f64) -> Vec<f64> {
    let n = y.len();
    let g = ghosts.min(n);
    let mut out = Vec::with_capacity(n + 2 * g);
    out.extend((0..g).rev().map(|j| left_sign * y[j]));
    out.extend_from_slice(y);
    out.extend((0..g).map(|j| right_sign * y[n - 1 - j]));
    out
}

/// First and second derivatives of samples at `theta_j = (j + 1/2) pi / N`
/// of a function that is even about `0` and `pi`, from its cosine series.
///
/// Such a function is a `2 pi`-periodic even signal, so the series is exact
/// for any polynomial in `cos(theta)` of degree below `N`. Coefficients
/// below `cutoff` times the largest one are rounding and are dropped, which
/// keeps them from being amplified by `k^2`.
pub fn cosine_derivatives(y: &[f64], cutoff: f64) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    // k theta_j = pi k (2j + 1) / 2N, reduced exactly before the trig call.
    let period = 4 * n;
    let angle = |k: usize, j: usize| {
        let phase = (k * (2 * j + 1)) % period;
        std::f64::consts::PI * phase as f64 / (2 * n) as f64
    };
    let mut a: Vec<f64> = (0..n)
        .map(|k| {
            let w = if k == 0 { 1.0 } else { 2.0 } / n as f64;
            w * y.iter().enumerate().map(|(j, v)| v * angle(k, j).cos()).sum::<f64>()
        })
        .collect();
    let top = a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    a.iter_mut().filter(|c| c.abs() <= cutoff * top).for_each(|c| *c = 0.0);
    let live: Vec<(usize, f64)> = a.iter().copied().enumerate().filter(|(_, c)| *c != 0.0).collect();
    (0..n)
        .map(|j| {
            live.iter().fold((0.0, 0.0), |(d1, d2), &(k, c)| {
                let (s, co) = angle(k, j).sin_cos();
                let kf = k as f64;
                (d1 - kf * c * s, d2 - kf * kf * c * co)
            })
        })
        .unzip()
}

/// Spectral first and second derivatives of a periodic signal sampled at
/// `N` equidistant points covering one period of length `2 pi`.
///
/// Exact for trigonometric polynomials of degree below `N / 2`. The first
/// sample is subtracted before transforming, so a constant signal has
/// derivatives that are exactly zero.
pub fn periodic_derivatives(y: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = y.len();
    let two_pi_n = 2.0 * std::f64::consts::PI / n as f64;
    let y: Vec<Complex64> = y.iter().map(|v| v - y[0]).collect();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            y.iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -two_pi_n * (j * k % n) as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let wavenumber = |k: usize| -> f64 {
        if 2 * k < n {
            k as f64
        } else {
            k as f64 - n as f64
        }
    };
    let synth = |weight: &dyn Fn(usize) -> Complex64| -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| coeffs[k] * weight(k) * Complex64::from_polar(1.0, two_pi_n * (j * k % n) as f64))
                    .sum()
            })
            .collect()
    };
    let d1 = synth(&|k| {
        if 2 * k == n {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, wavenumber(k))
        }
    });
    let d2 = synth(&|k| {
        let w = wavenumber(k);
        Complex64::new(-w * w, 0.0)
    });
    (d1, d2)
}
