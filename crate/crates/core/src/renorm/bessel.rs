//! Exponentially scaled modified Bessel functions, evaluated through their
//! integral representations:
//!
//! `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`
//! `I_nu(x) = (1/pi) int_0^pi exp(x cos h) cos(nu h) dh
//!            - sin(nu pi)/pi int_0^inf exp(-x cosh t - nu t) dt`
//!
//! Only the scaled forms `e^x K_nu(x)` and `e^-x I_nu(x)` are exposed: the
//! quantities built on them are ratios at a common argument, so the
//! exponentials cancel exactly and extreme arguments cannot overflow.

use std::f64::consts::PI;

use super::quad;
use crate::error::{Result, SpdeError};

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(SpdeError::Domain(format!(
            "scaled Bessel evaluation needs a positive argument, got {x}"
        )));
    }
    Ok(())
}

/// Largest `t` where `exp(-x (cosh t - 1))` is still above the underflow
/// floor.
fn cosh_reach(x: f64) -> f64 {
    let reach = 1.0 + 750.0 / x;
    (reach + (reach * reach - 1.0).sqrt()).ln()
}

/// `e^x K_nu(x)` for `x > 0`.
pub fn scaled_bessel_k(nu: f64, x: f64) -> Result<f64> {
    check_positive(x)?;
    let t_max = cosh_reach(x);
    let f = move |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    Ok(quad::integrate(&f, 0.0, t_max))
}

/// `e^{-x} I_nu(x)` for `x > 0` and `nu > -1`.
pub fn scaled_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_positive(x)?;
    let arc = quad::integrate(&move |h: f64| (-x * (1.0 - h.cos())).exp() * (nu * h).cos(), 0.0, PI)
        / PI;
    if nu == nu.round() {
        return Ok(arc);
    }
    let t_max = cosh_reach(x);
    let tail =
        quad::integrate(&move |t: f64| (-x * (t.cosh() - 1.0) - nu * t).exp(), 0.0, t_max);
    // e^{-x} * e^{-x cosh t} = e^{-2x} * e^{-x (cosh t - 1)}
    Ok(arc - (nu * PI).sin() / PI * (-2.0 * x).exp() * tail)
}

/// `I_{-nu}(x) + I_nu(x)` in scaled form, via
/// `I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu`.
pub fn scaled_bessel_i_pair(nu: f64, x: f64) -> Result<f64> {
    let i = scaled_bessel_i(nu, x)?;
    let k = scaled_bessel_k(nu, x)?;
    Ok(2.0 * i + 2.0 / PI * (nu * PI).sin() * (-2.0 * x).exp() * k)
}
