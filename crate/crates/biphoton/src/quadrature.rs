//! Adaptive composite Gauss-Legendre quadrature for complex integrands.
//!
//! The velocity integrand stacks Lorentzian-like resonances a few m/s wide
//! inside a Maxwell-Boltzmann envelope two orders of magnitude wider, times
//! an oscillatory factor; uniform rules waste most of their points. Panels
//! are seeded at the resonance velocities, capped below a fraction of the
//! oscillation period, and split where a low/high-order rule pair disagrees.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gauss-Legendre nodes/weights on [-1, 1].
#[derive(Debug, Clone)]
pub(crate) struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre polynomial roots.
    pub(crate) fn new(n: usize) -> Self {
        assert!(n >= 2, "rule order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// ∫ f over [a, b] mapped from [-1, 1].
    #[inline]
    fn integrate<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * x);
        }
        half * acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Controls of the velocity integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Integration range is ±cutoff_sigmas·u; e^{-cutoff²} bounds the
    /// truncation (e^{-36} ≈ 2e-16 at the default).
    pub cutoff_sigmas: f64,
    /// Initial uniform panel count before refinement.
    pub base_panels: usize,
    /// Relative tolerance on the summed panel error.
    pub refinement_tolerance: f64,
    /// Total panel splits allowed before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            cutoff_sigmas: 6.0,
            base_panels: 32,
            refinement_tolerance: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.cutoff_sigmas.is_finite() || self.cutoff_sigmas < 4.0 {
            return Err(Error::InvalidParameter {
                name: "cutoff_sigmas",
                value: self.cutoff_sigmas,
                reason: "must be at least 4",
            });
        }
        if !(self.refinement_tolerance > 0.0 && self.refinement_tolerance <= 1e-3) {
            return Err(Error::InvalidParameter {
                name: "refinement_tolerance",
                value: self.refinement_tolerance,
                reason: "must lie in (0, 1e-3]",
            });
        }
        if self.base_panels == 0 {
            return Err(Error::InvalidParameter {
                name: "base_panels",
                value: 0.0,
                reason: "need at least one initial panel",
            });
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                reason: "need a positive subdivision budget",
            });
        }
        Ok(())
    }
}

/// Convergence diagnostics of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureStats {
    pub panels: usize,
    pub subdivisions: usize,
    pub error_estimate: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

/// Shared rule pair; order 10 vs 20 resolves the panel-level error.
pub(crate) struct PanelIntegrator {
    low: GaussLegendre,
    high: GaussLegendre,
}

impl PanelIntegrator {
    pub(crate) fn new() -> Self {
        Self {
            low: GaussLegendre::new(10),
            high: GaussLegendre::new(20),
        }
    }

    fn evaluate<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Panel {
        let low = self.low.integrate(f, a, b);
        let high = self.high.integrate(f, a, b);
        Panel {
            a,
            b,
            value: high,
            error: (high - low).norm(),
        }
    }

    /// Adaptive integral of `f` over `[a, b]`.
    ///
    /// `seeds` become initial panel boundaries (resonance centers and their
    /// width-scale guards); `max_panel_width`, when set, bounds every initial
    /// panel (one tenth of the oscillation period in the caller).
    pub(crate) fn integrate<F: Fn(f64) -> Complex64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        seeds: &[f64],
        max_panel_width: Option<f64>,
        spec: &QuadratureSpec,
    ) -> Result<(Complex64, QuadratureStats)> {
        spec.validate()?;

        let mut boundaries: Vec<f64> = Vec::with_capacity(spec.base_panels + seeds.len() + 2);
        boundaries.push(a);
        boundaries.extend(seeds.iter().copied().filter(|s| *s > a && *s < b));
        boundaries.push(b);
        boundaries.sort_by(|x, y| x.partial_cmp(y).expect("finite boundaries"));
        boundaries.dedup();

        // subdivide the initial segments to honor base_panels and the width cap
        let base_width = (b - a) / spec.base_panels as f64;
        let target = match max_panel_width {
            Some(cap) => cap.min(base_width),
            None => base_width,
        };
        let mut panels: Vec<Panel> = Vec::new();
        for pair in boundaries.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let splits = ((hi - lo) / target).ceil().max(1.0) as usize;
            let step = (hi - lo) / splits as f64;
            for s in 0..splits {
                let pa = lo + s as f64 * step;
                let pb = if s + 1 == splits { hi } else { lo + (s + 1) as f64 * step };
                panels.push(self.evaluate(f, pa, pb));
            }
        }

        let mut subdivisions = 0usize;
        let mut previous = total_value(&panels);
        loop {
            let total = total_value(&panels);
            let err: f64 = panels.iter().map(|p| p.error).sum();
            if !total.re.is_finite() || !total.im.is_finite() {
                return Err(Error::ConvergenceFailure {
                    subdivisions,
                    last: total,
                    previous,
                    tau_index: None,
                });
            }
            let scale = total.norm();
            // Oscillatory cancellation can push |total| far below the sum of
            // panel magnitudes; the error estimate then bottoms out at the
            // rounding floor of that larger scale and a purely relative test
            // would never be met.
            let l1: f64 = panels.iter().map(|p| p.value.norm()).sum();
            let allowance = (spec.refinement_tolerance * scale).max(1e-14 * l1);
            if err <= allowance {
                return Ok((
                    total,
                    QuadratureStats {
                        panels: panels.len(),
                        subdivisions,
                        error_estimate: err,
                    },
                ));
            }

            // split every panel above its fair share of the allowed error;
            // the set is non-empty whenever the sum exceeds the allowance
            let threshold = allowance / panels.len() as f64;
            let mut marked: Vec<usize> = (0..panels.len())
                .filter(|&i| panels[i].error > threshold)
                .collect();
            if marked.is_empty() {
                let worst = panels
                    .iter()
                    .enumerate()
                    .max_by(|(_, x), (_, y)| x.error.partial_cmp(&y.error).expect("finite errors"))
                    .map(|(i, _)| i)
                    .expect("at least one panel");
                marked.push(worst);
            }
            if subdivisions + marked.len() > spec.max_subdivisions {
                return Err(Error::ConvergenceFailure {
                    subdivisions,
                    last: total,
                    previous,
                    tau_index: None,
                });
            }
            subdivisions += marked.len();
            previous = total;
            for &i in &marked {
                let Panel { a: pa, b: pb, .. } = panels[i];
                let mid = 0.5 * (pa + pb);
                panels[i] = self.evaluate(f, pa, mid);
                panels.push(self.evaluate(f, mid, pb));
            }
        }
    }
}

fn total_value(panels: &[Panel]) -> Complex64 {
    panels.iter().map(|p| p.value).sum()
}
