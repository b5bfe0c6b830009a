//! One-sample (paired) JZS Bayes factor.
//!
//! With a Cauchy(0, r) prior on the standardized effect, written as a normal
//! scale mixture δ | g ~ N(0, g r²), g ~ InvGamma(1/2, 1/2), the Bayes factor
//! for H1 over H0 given a t statistic on ν = n − 1 degrees of freedom is
//!
//! ```text
//! BF10 = ∫₀^∞ (1 + n g r²)^{-1/2}
//!        · [(1 + t²/((1 + n g r²) ν)) / (1 + t²/ν)]^{-(ν+1)/2}
//!        · (2π)^{-1/2} g^{-3/2} e^{-1/(2g)} dg
//! ```
//!
//! The integral is taken over u ∈ (0, 1) with g = u / (1 − u), which keeps
//! the integrand bounded at both ends.

use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};

pub const DEFAULT_CAUCHY_SCALE: f64 = 0.707;

/// Log of the integrand in g.
pub fn jzs_log_integrand(g: f64, t: f64, n: usize, r: f64) -> f64 {
    let nu = (n - 1) as f64;
    let s = 1.0 + n as f64 * g * r * r;
    let likelihood_ratio = -(nu + 1.0) / 2.0 * ((t * t / (s * nu)).ln_1p() - (t * t / nu).ln_1p());
    let prior = -0.5 * (2.0 * std::f64::consts::PI).ln() - 1.5 * g.ln() - 1.0 / (2.0 * g);
    -0.5 * s.ln() + likelihood_ratio + prior
}

pub fn jzs_bf10(t: f64, n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewUnits { got: n, min: 2 });
    }
    if !(r > 0.0 && r.is_finite()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite t and r > 0 (t = {t}, r = {r})")));
    }
    let integrand = |u: f64| {
        let g = u / (1.0 - u);
        let jac = 1.0 / ((1.0 - u) * (1.0 - u));
        let v = (jzs_log_integrand(g, t, n, r)).exp() * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let res = integrate(integrand, 0.0, 1.0, QuadratureOptions::default())?;
    if res.value.is_nan() || res.value <= 0.0 {
        return Err(Error::IntegrationFailure(format!("non-positive Bayes factor {}", res.value)));
    }
    Ok(res.value)
}
