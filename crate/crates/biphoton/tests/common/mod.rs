//! Implementation-independent oracles shared by the integration suites.
//!
//! Everything here recomputes the physics from scratch with straight-line
//! arithmetic — no calls into the crate's wavefunction or quadrature paths —
//! so agreement genuinely cross-checks two routes to the same number.

#![allow(dead_code)]

use num_complex::Complex64;

/// Parameter bundle mirroring the published closed form, kept as bare
/// numbers on purpose.
#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub gamma_21: f64,
    pub gamma_3: f64,
    pub delta_p: f64,
    pub omega_c: f64,
    pub k_p: f64,
    pub k_c: f64,
    pub c_re: f64,
    pub c_im: f64,
}

impl OracleParams {
    pub fn six_d_defaults() -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            gamma_21: tau * 5.2e6,
            gamma_3: tau * 2.6e6,
            delta_p: 0.0,
            omega_c: tau * 5.0e6,
            k_p: tau / 852e-9,
            k_c: tau / 917e-9,
            c_re: 0.0,
            c_im: 1.0,
        }
    }
}

/// Straight-line re/im evaluation of the velocity-resolved wavefunction:
/// every complex product and quotient written out by hand.
pub fn psi_oracle(tau: f64, v: f64, p: &OracleParams) -> Complex64 {
    if tau < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // first factor: a = gamma_21/2 + i (delta_p - k_p v)
    let a_re = p.gamma_21 / 2.0;
    let a_im = p.delta_p - p.k_p * v;
    // second factor: b = gamma_3/2 + i (-k_p + k_c) v
    let b_re = p.gamma_3 / 2.0;
    let b_im = (-p.k_p + p.k_c) * v;
    // denominator: 4 a b + omega_c^2
    let den_re = 4.0 * (a_re * b_re - a_im * b_im) + p.omega_c * p.omega_c;
    let den_im = 4.0 * (a_re * b_im + a_im * b_re);
    // C / den
    let den_sq = den_re * den_re + den_im * den_im;
    let q_re = (p.c_re * den_re + p.c_im * den_im) / den_sq;
    let q_im = (p.c_im * den_re - p.c_re * den_im) / den_sq;
    // e^{i k_p v tau} e^{-(gamma_21/2) tau}
    let damp = (-p.gamma_21 / 2.0 * tau).exp();
    let (sin_ph, cos_ph) = (p.k_p * v * tau).sin_cos();
    Complex64::new(
        damp * (q_re * cos_ph - q_im * sin_ph),
        damp * (q_re * sin_ph + q_im * cos_ph),
    )
}

/// Uniform-trapezoid velocity integral of `psi_oracle * f(v)` over
/// `[-span, span]` with `n` points.
pub fn trapezoid_velocity_integral(
    tau: f64,
    u: f64,
    span: f64,
    n: usize,
    p: &OracleParams,
) -> Complex64 {
    let h = 2.0 * span / (n - 1) as f64;
    let norm = 1.0 / (std::f64::consts::PI.sqrt() * u);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let v = -span + j as f64 * h;
        let f = norm * (-(v / u) * (v / u)).exp();
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += w * f * psi_oracle(tau, v, p);
    }
    acc * h
}

/// Composite Simpson integral of a real function on [a, b]; n must be even.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * h / 3.0
}

/// Largest |a - b| over the trace divided by the largest |a|.
pub fn sup_norm_relative(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    diff / scale
}

/// Least-squares slope of ln(y) against x over the given points.
pub fn log_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in points {
        let ly = y.ln();
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
        n += 1.0;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
