//! Numerov shooting for `u'' + k^2(x; E) u = 0` on a uniform lattice.
//!
//! The recurrence is written in terms of `z_i = a_i u_i`, `a_i = 1 + h^2 k_i^2 / 12`:
//!
//! ```text
//! z[i+1] - 2 z[i] + z[i-1] = -h^2 k_i^2 u_i
//! ```
//!
//! which is a symmetric three-term relation. For a left solution and a right
//! solution meeting at index `m`, the number of eigenvalues strictly below `E`
//! is
//!
//! ```text
//! nodes(u_L on [0, m]) + nodes(u_R on [m, N-1]) + [W / (z_L[m] z_R[m]) < 0]
//! ```
//!
//! with the Casoratian `W = z_L[m+1] z_R[m] - z_L[m] z_R[m+1]`. This is the
//! pivot count of the matrix `J(E)`, so bisecting on it converges to the
//! discrete eigenvalue itself rather than to a node passing the grid edge.

use crate::error::{Error, Result};
use crate::model::count_sign_changes;

/// A boundary-value problem the shooting engine can solve.
#[allow(clippy::len_without_is_empty)]
pub trait ShootingProblem: Sync {
    /// Number of lattice samples.
    fn len(&self) -> usize;
    fn spacing(&self) -> f64;
    /// `k^2` at every sample for trial eigenvalue `e`.
    fn k2(&self, e: f64) -> Vec<f64>;
    /// Leading samples `u[0], u[1], ...` fixed by the left boundary (at least two).
    fn left_start(&self, e: f64) -> Vec<f64>;
    /// Trailing samples `u[N-1], u[N-2], ...` fixed by the right boundary.
    fn right_start(&self, e: f64) -> Vec<f64>;
    /// Matching position (fraction of the lattice) when no turning point exists.
    fn fallback_match(&self) -> f64 {
        0.5
    }
}

const RESCALE_ABOVE: f64 = 1e150;

/// Marches the recurrence from `start` up to index `end` (inclusive).
///
/// The update is carried in summed form, `dz[i+1] = dz[i] - h^2 k_i^2 u_i` with
/// `dz[i] = z[i] - z[i-1]`, so the energy enters additively instead of through
/// `1 + h^2 k^2 / 12`, where it would sink below the last bit on fine grids.
/// Whenever the running solution exceeds `1e150` the computed prefix is
/// rescaled in place; only the shape of the solution is meaningful.
pub fn march(k2: &[f64], h: f64, start: &[f64], end: usize) -> Vec<f64> {
    assert!(start.len() >= 2, "need two starting values");
    let h2 = h * h;
    let a = |i: usize| 1.0 + h2 * k2[i] / 12.0;
    let mut u: Vec<f64> = start.iter().copied().take(end + 1).collect();
    let mut i = u.len();
    if i > end {
        return u;
    }
    let mut z = a(i - 1) * u[i - 1];
    let mut dz = z - a(i - 2) * u[i - 2];
    while i <= end {
        dz -= h2 * k2[i - 1] * u[i - 1];
        z += dz;
        let next = z / a(i);
        u.push(next);
        if next.abs() > RESCALE_ABOVE {
            let s = 1.0 / next.abs();
            u.iter_mut().for_each(|v| *v *= s);
            z *= s;
            dz *= s;
        }
        i += 1;
    }
    u
}

/// Result of a left/right shot meeting at `match_index`.
#[derive(Debug, Clone)]
pub struct Matching {
    pub match_index: usize,
    /// `u_L` on `0..=match_index + 1`.
    pub left: Vec<f64>,
    /// `u_R` on `match_index..N`, stored in natural order.
    pub right: Vec<f64>,
    /// Casoratian normalized by the local magnitudes of both shots.
    pub mismatch: f64,
    /// Number of eigenvalues strictly below the trial value.
    pub count: usize,
}

/// Index of the last classically allowed sample, if it lies inside the lattice.
fn turning_point(k2: &[f64]) -> Option<usize> {
    let n = k2.len();
    let last = k2.iter().rposition(|&v| v >= 0.0)?;
    (last >= 3 && last + 4 < n).then_some(last)
}

/// Shoots from both ends and meets at the outer turning point, or at the
/// problem's fallback position when the trial energy has none.
pub fn shoot_matched<P: ShootingProblem + ?Sized>(problem: &P, e: f64) -> Matching {
    shoot_matched_at(problem, e, None)
}

/// As [`shoot_matched`] with an explicit meeting index.
pub fn shoot_matched_at<P: ShootingProblem + ?Sized>(
    problem: &P,
    e: f64,
    match_index: Option<usize>,
) -> Matching {
    let n = problem.len();
    let h = problem.spacing();
    let k2 = problem.k2(e);
    let left_start = problem.left_start(e);
    let right_start = problem.right_start(e);
    let lo = left_start.len().max(2);
    let hi = n - right_start.len().max(2) - 1;
    let m = match_index
        .or_else(|| turning_point(&k2))
        .unwrap_or_else(|| (problem.fallback_match() * (n - 1) as f64).round() as usize)
        .clamp(lo, hi.max(lo));

    let left = march(&k2, h, &left_start, m + 1);
    let k2_rev: Vec<f64> = k2.iter().rev().copied().collect();
    let mut right = march(&k2_rev, h, &right_start, n - 1 - m);
    right.reverse();

    let f = h * h / 12.0;
    let a = |i: usize| 1.0 + f * k2[i];
    let (zl0, zl1) = (a(m) * left[m], a(m + 1) * left[m + 1]);
    let (zr0, zr1) = (a(m) * right[0], a(m + 1) * right[1]);
    let w = zl1 * zr0 - zl0 * zr1;
    let scale = (zl0.abs() + zl1.abs()) * (zr0.abs() + zr1.abs());
    let mismatch = if scale > 0.0 { w / scale } else { 0.0 };

    let junction_positive = w * zl0 * zr0 < 0.0;
    let count = count_sign_changes(&left[..=m])
        + count_sign_changes(&right)
        + usize::from(junction_positive);

    Matching {
        match_index: m,
        left,
        right,
        mismatch,
        count,
    }
}

/// Number of eigenvalues strictly below `e`.
pub fn eigenvalue_count<P: ShootingProblem + ?Sized>(problem: &P, e: f64) -> usize {
    shoot_matched(problem, e).count
}

impl Matching {
    /// Joins the two shots into one sampled solution.
    pub fn join(&self) -> Vec<f64> {
        let m = self.match_index;
        let (l0, l1) = (self.left[m], self.left[m + 1]);
        let (r0, r1) = (self.right[0], self.right[1]);
        let denom = r0 * r0 + r1 * r1;
        let s = if denom > 0.0 { (l0 * r0 + l1 * r1) / denom } else { 0.0 };
        let mut u = self.left[..=m].to_vec();
        u.extend(self.right[1..].iter().map(|v| v * s));
        // Bring the peak to O(1) so downstream products cannot underflow.
        let peak = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if peak > 0.0 {
            u.iter_mut().for_each(|v| *v /= peak);
        }
        u
    }
}

/// A converged eigenvalue with its (unnormalized) eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub index: usize,
    pub energy: f64,
    pub samples: Vec<f64>,
    pub bisection_steps: usize,
    pub mismatch: f64,
}

/// Finds eigenvalue number `index` (zero-based) inside `[lo, hi]`.
///
/// Bisects on the eigenvalue count until the bracket is narrower than
/// `rel_tol * |E|`, then polishes with regula falsi on the Casoratian.
pub fn locate<P: ShootingProblem + ?Sized>(
    problem: &P,
    index: usize,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<Eigenpair> {
    let (mut lo, mut hi) = (lo, hi);
    if !(lo < hi) {
        return Err(Error::Input(format!("empty bracket [{lo}, {hi}]")));
    }
    let c_lo = eigenvalue_count(problem, lo);
    let c_hi = eigenvalue_count(problem, hi);
    if c_lo > index {
        return Err(Error::Convergence(format!(
            "{c_lo} eigenvalues already lie below the bracket start {lo}"
        )));
    }
    if c_hi <= index {
        return Err(Error::Convergence(format!(
            "bracket [{lo}, {hi}] holds only {c_hi} eigenvalues, wanted index {index}"
        )));
    }

    let mut steps = 0;
    while steps < 400 {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
            break;
        }
        if eigenvalue_count(problem, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }

    let energy = polish(problem, lo, hi);
    let matched = shoot_matched(problem, energy);
    // Re-join at the largest sample so no rounding kink sits next to a node.
    let first = matched.join();
    let peak = first
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
        .0;
    let matched = shoot_matched_at(problem, energy, Some(peak));
    Ok(Eigenpair {
        index,
        energy,
        samples: matched.join(),
        bisection_steps: steps,
        mismatch: matched.mismatch,
    })
}

/// Locates several eigenvalues of the same problem concurrently.
///
/// Results come back in the order of `indices` regardless of scheduling.
pub fn locate_many<P: ShootingProblem + ?Sized>(
    problem: &P,
    indices: &[usize],
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Vec<Result<Eigenpair>> {
    use rayon::prelude::*;
    indices
        .par_iter()
        .map(|&k| locate(problem, k, lo, hi, rel_tol))
        .collect()
}

/// Illinois regula falsi on the mismatch within a count-certified bracket.
fn polish<P: ShootingProblem + ?Sized>(problem: &P, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = shoot_matched(problem, lo).mismatch;
    let mut f_hi = shoot_matched(problem, hi).mismatch;
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
        return 0.5 * (lo + hi);
    }
    let mut side = 0i8;
    let mut best = 0.5 * (lo + hi);
    for _ in 0..60 {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            break;
        }
        best = x;
        let fx = shoot_matched(problem, x).mismatch;
        if fx == 0.0 {
            break;
        }
        if fx.signum() == f_hi.signum() {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= 4.0 * f64::EPSILON * best.abs() {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Free particle between hard walls on [0, 1], hbar = m = 1.
    struct Walls {
        n: usize,
    }

    impl ShootingProblem for Walls {
        fn len(&self) -> usize {
            self.n
        }
        fn spacing(&self) -> f64 {
            1.0 / (self.n - 1) as f64
        }
        fn k2(&self, e: f64) -> Vec<f64> {
            vec![2.0 * e; self.n]
        }
        fn left_start(&self, _e: f64) -> Vec<f64> {
            vec![0.0, self.spacing()]
        }
        fn right_start(&self, _e: f64) -> Vec<f64> {
            vec![0.0, self.spacing()]
        }
    }

    #[test]
    fn march_reproduces_sine_at_exact_numerov_wavenumber() {
        let n = 201;
        let h = 1.0 / (n - 1) as f64;
        let k2 = vec![PI * PI; n];
        let u = march(&k2, h, &[0.0, (PI * h).sin()], n - 1);
        let err = u
            .iter()
            .enumerate()
            .map(|(i, v)| (v - (PI * i as f64 * h).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn march_rescales_instead_of_overflowing() {
        let k2 = vec![-400.0; 5000];
        let u = march(&k2, 0.01, &[0.0, 1e-3], 4999);
        assert!(u.iter().all(|v| v.is_finite()));
        assert!(u[4999] > 0.0);
    }

    #[test]
    fn count_matches_closed_form_levels() {
        let p = Walls { n: 401 };
        for (e, expected) in [(1.0, 0), (6.0, 1), (25.0, 2), (50.0, 3), (80.0, 4)] {
            assert_eq!(eigenvalue_count(&p, e), expected, "E = {e}");
        }
    }

    #[test]
    fn locate_finds_box_levels() {
        let p = Walls { n: 2001 };
        for k in 0..4 {
            let pair = locate(&p, k, 0.1, 200.0, 1e-12).unwrap();
            let exact = ((k + 1) as f64 * PI).powi(2) / 2.0;
            assert!((pair.energy - exact).abs() / exact < 1e-6);
            assert_eq!(count_sign_changes(&pair.samples[1..2000]), k);
        }
    }

    #[test]
    fn bracket_without_the_requested_level_errors() {
        let p = Walls { n: 201 };
        assert!(matches!(locate(&p, 3, 0.1, 10.0, 1e-10), Err(Error::Convergence(_))));
    }
}
