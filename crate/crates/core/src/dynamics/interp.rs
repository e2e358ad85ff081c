//! Local cubic interpolation of uniformly sampled fields.

use crate::error::{Error, Result};

/// Whether masked samples may be replaced by their eigenstate continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodePolicy {
    /// Masked samples already hold the continued value and are used as is.
    #[default]
    Continue,
    /// Any stencil touching a masked sample is an error.
    Reject,
}

/// Samples `values[k]` at `origin + k h` with a node mask, interpolated by
/// the 4-point Lagrange cubic of the enclosing cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SampledAxis {
    pub origin: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub policy: NodePolicy,
}

/// Lagrange weights and their derivatives for nodes `-1, 0, 1, 2` at `s`.
fn weights(s: f64) -> ([f64; 4], [f64; 4]) {
    let (a, b, c, d) = (s + 1.0, s, s - 1.0, s - 2.0);
    let w = [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ];
    let dw = [
        -(c * d + b * d + b * c) / 6.0,
        (c * d + a * d + a * c) / 2.0,
        -(b * d + a * d + a * b) / 2.0,
        (b * c + a * c + a * b) / 6.0,
    ];
    (w, dw)
}

impl SampledAxis {
    fn cell(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let t = (x - self.origin) / self.h;
        let i = (t.floor().max(1.0) as usize).min(n - 3);
        (i - 1, t - i as f64)
    }

    /// True when the stencil used at `x` touches a masked sample.
    pub fn masked_near(&self, x: f64) -> bool {
        let (k, _) = self.cell(x);
        self.mask[k..k + 4].iter().any(|m| *m)
    }

    /// Value and slope at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let (k, s) = self.cell(x);
        if self.policy == NodePolicy::Reject && self.masked_near(x) {
            return Err(Error::Domain(format!("{x} lies in a node-exclusion window")));
        }
        let (w, dw) = weights(s);
        let y = &self.values[k..k + 4];
        let v = (0..4).map(|j| w[j] * y[j]).sum();
        let d = (0..4).map(|j| dw[j] * y[j]).sum::<f64>() / self.h;
        Ok((v, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn axis(f: impl Fn(f64) -> f64, n: usize, h: f64) -> SampledAxis {
        SampledAxis {
            origin: 0.0,
            h,
            values: (0..n).map(|k| f(k as f64 * h)).collect(),
            mask: vec![false; n],
            policy: NodePolicy::Continue,
        }
    }

    proptest! {
        #[test]
        fn cubics_are_reproduced(c in prop::array::uniform4(-3.0f64..3.0), x in 0.0f64..2.0) {
            let f = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
            let df = |x: f64| c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
            let a = axis(f, 21, 0.1);
            let (v, d) = a.eval(x).unwrap();
            prop_assert!((v - f(x)).abs() < 1e-12);
            prop_assert!((d - df(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn smooth_fields_converge_at_fourth_order() {
        let err = |h: f64| {
            let a = axis(f64::sin, (2.0 / h) as usize + 1, h);
            (0..50)
                .map(|k| 0.2 + 1.6 * k as f64 / 50.0 + 0.013)
                .map(|x| (a.eval(x).unwrap().0 - x.sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn reject_policy_refuses_masked_stencils() {
        let mut a = axis(|x| x, 11, 0.1);
        a.mask[5] = true;
        a.policy = NodePolicy::Reject;
        assert!(a.eval(0.45).is_err());
        assert!(a.eval(0.05).is_ok());
        a.policy = NodePolicy::Continue;
        assert!(a.eval(0.45).is_ok());
    }
}
