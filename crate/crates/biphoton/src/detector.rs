//! Detector-response chain: Gaussian timing-jitter convolution, peak
//! normalization and the optional accidental-coincidence floor.

use serde::{Deserialize, Serialize};

use crate::trace::RealTrace;
use crate::{Error, Result};

/// Gaussian timing-jitter model of the single-photon detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterModel {
    /// FWHM of the timing uncertainty, seconds.
    pub fwhm: f64,
    /// Kernel truncation in units of σ.
    pub kernel_support_sigmas: f64,
}

impl Default for JitterModel {
    fn default() -> Self {
        Self {
            fwhm: 0.35e-9,
            kernel_support_sigmas: 6.0,
        }
    }
}

impl JitterModel {
    pub fn validate(&self) -> Result<()> {
        if !self.fwhm.is_finite() || self.fwhm <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "jitter.fwhm",
                value: self.fwhm,
                reason: "must be finite and strictly positive",
            });
        }
        if !self.kernel_support_sigmas.is_finite() || self.kernel_support_sigmas <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "jitter.kernel_support_sigmas",
                value: self.kernel_support_sigmas,
                reason: "must be finite and strictly positive",
            });
        }
        Ok(())
    }

    pub fn kernel(&self, t_step: f64) -> Result<Vec<f64>> {
        gaussian_kernel_with_support(self.fwhm, t_step, self.kernel_support_sigmas)
    }
}

/// Discrete symmetric Gaussian with σ = fwhm / (2 sqrt(2 ln 2)), truncated
/// at ±6σ and normalized to sum exactly 1.
pub fn gaussian_kernel(fwhm: f64, t_step: f64) -> Result<Vec<f64>> {
    gaussian_kernel_with_support(fwhm, t_step, 6.0)
}

pub fn gaussian_kernel_with_support(fwhm: f64, t_step: f64, support_sigmas: f64) -> Result<Vec<f64>> {
    if !fwhm.is_finite() || fwhm <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "fwhm",
            value: fwhm,
            reason: "must be finite and strictly positive",
        });
    }
    if !t_step.is_finite() || t_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t_step",
            value: t_step,
            reason: "must be finite and strictly positive",
        });
    }
    if t_step > fwhm / 3.0 {
        return Err(Error::KernelUndersampled {
            t_step,
            limit: fwhm / 3.0,
        });
    }
    let sigma = fwhm / (2.0 * (2.0 * f64::ln(2.0)).sqrt());
    let half = (support_sigmas * sigma / t_step).ceil() as usize;
    let mut weights = Vec::with_capacity(2 * half + 1);
    for k in -(half as i64)..=(half as i64) {
        let t = k as f64 * t_step;
        weights.push((-(t * t) / (2.0 * sigma * sigma)).exp());
    }
    // normalize symmetrically so w[k] == w[-k] survives the division
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(weights)
}

/// Discrete convolution on the trace grid with zero-padding at the edges.
/// The kernel must be odd-length and normalized (as produced by
/// [`gaussian_kernel`]); output lives on the same grid.
pub fn convolve(trace: &RealTrace, kernel: &[f64]) -> RealTrace {
    assert!(!kernel.is_empty() && kernel.len() % 2 == 1, "kernel must have odd length");
    let half = kernel.len() / 2;
    let n = trace.values.len();
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                // y[j] = sum_k w[k] x[j - (k - half)]
                let idx = j as i64 - (k as i64 - half as i64);
                if idx >= 0 && (idx as usize) < n {
                    acc += w * trace.values[idx as usize];
                }
            }
            // kernel and trace are non-negative; clamp away -0.0
            acc.max(0.0)
        })
        .collect();
    RealTrace {
        grid: trace.grid,
        values,
    }
}

/// Rescale so the maximum equals exactly 1.
pub fn normalize_peak(trace: &RealTrace) -> Result<RealTrace> {
    let max = trace.max_value();
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Normalization { max });
    }
    Ok(RealTrace {
        grid: trace.grid,
        values: trace.values.iter().map(|v| v / max).collect(),
    })
}

/// Uniform additive floor modeling the accidental-coincidence baseline.
/// Whether it applies before or after peak normalization is the caller's
/// pipeline decision.
pub fn add_background(trace: &RealTrace, floor: f64) -> RealTrace {
    RealTrace {
        grid: trace.grid,
        values: trace.values.iter().map(|v| v + floor).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TauGrid;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> TauGrid {
        TauGrid::new(0.0, 1e-11, n).unwrap()
    }

    #[test]
    fn kernel_sums_to_one_and_is_even() {
        let k = gaussian_kernel(0.35e-9, 1e-11).unwrap();
        let sum: f64 = k.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(k.len() % 2, 1);
        for i in 0..k.len() / 2 {
            assert_eq!(k[i], k[k.len() - 1 - i]);
        }
    }

    #[test]
    fn kernel_center_weight_matches_closed_form() {
        let fwhm = 0.35e-9;
        let t_step = 1e-11;
        let sigma = fwhm / (2.0 * (2.0 * f64::ln(2.0)).sqrt());
        assert_relative_eq!(sigma, 0.14865e-9, max_relative = 1e-3);
        let k = gaussian_kernel(fwhm, t_step).unwrap();
        let center = k[k.len() / 2];
        // unnormalized center weight is 1; the sum approximates
        // sigma sqrt(2 pi) / t_step, so the normalized center approaches
        // t_step / (sigma sqrt(2 pi))
        let expected = t_step / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        assert_relative_eq!(center, expected, max_relative = 1e-6);
    }

    #[test]
    fn kernel_rejects_undersampling() {
        assert!(matches!(
            gaussian_kernel(0.35e-9, 0.2e-9),
            Err(Error::KernelUndersampled { .. })
        ));
        assert!(gaussian_kernel(0.0, 1e-11).is_err());
    }

    #[test]
    fn convolution_impulse_response_reproduces_kernel() {
        let kernel = gaussian_kernel(0.35e-9, 1e-11).unwrap();
        let n = 401;
        let mut values = vec![0.0; n];
        values[200] = 1.0;
        let trace = RealTrace::new(grid(n), values).unwrap();
        let out = convolve(&trace, &kernel);
        let half = kernel.len() / 2;
        for (k, w) in kernel.iter().enumerate() {
            assert_relative_eq!(out.values[200 + k - half], *w, max_relative = 1e-14);
        }
    }

    #[test]
    fn convolution_preserves_area_away_from_edges() {
        let kernel = gaussian_kernel(0.35e-9, 1e-11).unwrap();
        let n = 2001;
        // bump well inside the grid
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let x = (j as f64 - 1000.0) / 40.0;
                (-x * x).exp()
            })
            .collect();
        let trace = RealTrace::new(grid(n), values).unwrap();
        let out = convolve(&trace, &kernel);
        let a_in: f64 = trace.values.iter().sum();
        let a_out: f64 = out.values.iter().sum();
        assert_relative_eq!(a_out, a_in, max_relative = 1e-9);
    }

    #[test]
    fn convolution_is_linear() {
        let kernel = gaussian_kernel(0.35e-9, 1e-11).unwrap();
        let n = 301;
        let xa: Vec<f64> = (0..n).map(|j| (j as f64 / 50.0).sin().abs()).collect();
        let xb: Vec<f64> = (0..n).map(|j| ((j as f64 - 150.0) / 30.0).cosh().recip()).collect();
        let ta = RealTrace::new(grid(n), xa.clone()).unwrap();
        let tb = RealTrace::new(grid(n), xb.clone()).unwrap();
        let combined: Vec<f64> = xa.iter().zip(&xb).map(|(a, b)| 2.0 * a + 0.5 * b).collect();
        let tc = RealTrace::new(grid(n), combined).unwrap();
        let ca = convolve(&ta, &kernel);
        let cb = convolve(&tb, &kernel);
        let cc = convolve(&tc, &kernel);
        for j in 0..n {
            assert_relative_eq!(
                cc.values[j],
                2.0 * ca.values[j] + 0.5 * cb.values[j],
                max_relative = 1e-12,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn convolution_never_raises_the_peak() {
        let kernel = gaussian_kernel(0.35e-9, 1e-11).unwrap();
        let n = 1001;
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let x = (j as f64 - 500.0) / 15.0;
                (-x * x).exp()
            })
            .collect();
        let trace = RealTrace::new(grid(n), values).unwrap();
        let out = convolve(&trace, &kernel);
        assert!(out.max_value() <= trace.max_value());
    }

    #[test]
    fn normalize_peak_basics() {
        let t = RealTrace::new(grid(3), vec![0.5, 2.0, 1.0]).unwrap();
        let n1 = normalize_peak(&t).unwrap();
        assert_eq!(n1.max_value(), 1.0);
        assert_eq!(n1.values, vec![0.25, 1.0, 0.5]);
        // idempotent
        let n2 = normalize_peak(&n1).unwrap();
        assert_eq!(n1.values, n2.values);
        // constant trace becomes all ones
        let c = RealTrace::new(grid(3), vec![3.0, 3.0, 3.0]).unwrap();
        assert_eq!(normalize_peak(&c).unwrap().values, vec![1.0, 1.0, 1.0]);
        // all-zero trace fails
        let z = RealTrace::new(grid(3), vec![0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(normalize_peak(&z), Err(Error::Normalization { .. })));
    }

    #[test]
    fn background_floor() {
        let z = RealTrace::new(grid(3), vec![0.0, 0.0, 0.0]).unwrap();
        let lifted = add_background(&z, 1.0);
        assert_eq!(lifted.values, vec![1.0, 1.0, 1.0]);
        let same = add_background(&z, 0.0);
        assert_eq!(same.values, z.values);
    }
}
