//! Gamma function and Pochhammer symbols on complex and bicomplex arguments.
//!
//! The complex gamma uses the Lanczos approximation (g = 7, nine
//! coefficients) on `Re w >= 1/2` and the reflection formula
//!
//! ```text
//! Gamma(w) Gamma(1 - w) = pi / sin(pi w)
//! ```
//!
//! elsewhere. Bicomplex arguments are handled per idempotent component.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numbers::BiComplex;

/// Distance to a nonpositive integer treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Nearest nonpositive integer when `w` is within [`POLE_TOL`] of it.
pub fn near_nonpositive_integer(w: Complex64) -> Option<i64> {
    let n = w.re.round();
    if n <= 0.0 && (w - n).norm() < POLE_TOL {
        Some(n as i64)
    } else {
        None
    }
}

fn lanczos(w: Complex64) -> Complex64 {
    let w = w - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((w + 0.5) * t.ln() - t).exp() * x
}

/// `sin(pi w)` with the integer part removed first so that arguments near
/// integers keep their relative accuracy.
fn sin_pi(w: Complex64) -> Complex64 {
    let n = w.re.round();
    let s = ((w - n) * PI).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Largest `n` with `(n - 1)!` exact in a double.
const EXACT_FACTORIAL: f64 = 23.0;

fn gamma_unchecked(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re >= 1.0 && w.re <= EXACT_FACTORIAL && w.re.fract() == 0.0 {
        let f: f64 = (1..w.re as u32).map(f64::from).product();
        return Complex64::new(f, 0.0);
    }
    if w.re < 0.5 {
        PI / (sin_pi(w) * lanczos(1.0 - w))
    } else {
        lanczos(w)
    }
}

/// Complex gamma; poles are reported with component 0.
pub fn complex_gamma(w: Complex64) -> Result<Complex64> {
    gamma_component(0, w)
}

fn gamma_component(component: u8, w: Complex64) -> Result<Complex64> {
    if near_nonpositive_integer(w).is_some() {
        return Err(Error::Pole { component, at: w });
    }
    Ok(gamma_unchecked(w))
}

/// Reciprocal gamma, entire: zero at the poles of gamma.
pub fn complex_rgamma(w: Complex64) -> Complex64 {
    if near_nonpositive_integer(w).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if w.re < 0.5 {
        sin_pi(w) * lanczos(1.0 - w) / PI
    } else {
        1.0 / gamma_unchecked(w)
    }
}

/// Real gamma for `x > 0`.
pub fn gamma_real(x: f64) -> f64 {
    gamma_unchecked(Complex64::new(x, 0.0)).re
}

/// `Gamma(Z)` per idempotent component.
pub fn bc_gamma(z: BiComplex) -> Result<BiComplex> {
    z.try_map(gamma_component)
}

/// `(a)_n = a (a + 1) ... (a + n - 1)` by the recurrence.
pub fn pochhammer(a: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

/// Bicomplex Pochhammer symbol, componentwise identical to [`pochhammer`].
pub fn bc_pochhammer(a: BiComplex, n: usize) -> BiComplex {
    a.map(|w| pochhammer(w, n))
}

/// Truncated Weierstrass product
///
/// ```text
/// 1/Gamma(w) = w e^(gamma w) prod_{k=1}^{terms} (1 + w/k) e^(-w/k)
/// ```
///
/// Slow (error of order `|w|^2 / terms`); intended as a reference only.
pub fn gamma_weierstrass(w: Complex64, terms: usize) -> Complex64 {
    let mut log_r = w.ln() + EULER_GAMMA * w;
    for k in 1..=terms {
        let k = k as f64;
        log_r += (1.0 + w / k).ln() - w / k;
    }
    (-log_r).exp()
}
