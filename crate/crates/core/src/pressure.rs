//! Singular congestion pressure `π_ε(z) = ε z^α / (1 - z)^β`, its polynomial
//! truncation beyond `1 - δ`, derivatives, and the energy potentials
//! `H(z) = z ∫_0^z π(s)/s² ds`.
//!
//! Every function here is pure; nothing holds state.

use crate::error::{Error, Result};
use crate::quadrature;

const QUAD_REL_TOL: f64 = 1e-10;
/// Below this abscissa the integrand `π(s)/s²` is replaced by its leading
/// term `ε s^(α-2)` when `α < 2`.
const SINGULAR_SPLIT: f64 = 1e-6;

/// Constitutive constants of the singular law and its truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureParams {
    pub epsilon: f64,
    /// Truncation width; `0` means the untruncated law.
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for PressureParams {
    fn default() -> Self {
        PressureParams {
            epsilon: 0.1,
            delta: 0.1,
            alpha: 2.0,
            beta: 3.0,
            gamma: 6.0,
        }
    }
}

/// Which lower bound on `β` is enforced for a given dimension.
pub fn beta_reading(dim: usize) -> (&'static str, f64) {
    if dim >= 3 {
        ("beta > 5/2 for d = 3", 2.5)
    } else {
        ("beta > 2 for d <= 2", 2.0)
    }
}

impl PressureParams {
    pub fn with_eps_delta(self, epsilon: f64, delta: f64) -> Self {
        PressureParams {
            epsilon,
            delta,
            ..self
        }
    }

    /// Checks the parameter invariants for spatial dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return bad(format!("delta must lie in [0, 1), got {}", self.delta));
        }
        if !(self.alpha > 1.0) {
            return bad(format!("alpha must exceed 1, got {}", self.alpha));
        }
        if !(self.gamma > dim as f64) {
            return bad(format!(
                "gamma must exceed the dimension {dim}, got {}",
                self.gamma
            ));
        }
        let (reading, floor) = beta_reading(dim);
        if !(self.beta > floor) {
            return bad(format!("{reading} required, got beta = {}", self.beta));
        }
        Ok(())
    }

    fn split(&self) -> f64 {
        1.0 - self.delta
    }

    fn require_truncated(&self) -> Result<()> {
        if self.delta > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "truncated law requires delta > 0".to_string(),
            ))
        }
    }
}

fn check_open_unit(z: f64) -> Result<()> {
    if (0.0..1.0).contains(&z) {
        Ok(())
    } else {
        Err(Error::Domain(format!("z = {z} outside [0, 1)")))
    }
}

fn check_nonneg(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("z = {z} is negative or not finite")))
    }
}

#[inline]
fn pi_eps_raw(z: f64, p: &PressureParams) -> f64 {
    p.epsilon * z.powf(p.alpha) / (1.0 - z).powf(p.beta)
}

#[inline]
fn dpi_eps_raw(z: f64, p: &PressureParams) -> f64 {
    let one_minus = 1.0 - z;
    p.epsilon
        * (p.alpha * z.powf(p.alpha - 1.0) * one_minus.powf(-p.beta)
            + p.beta * z.powf(p.alpha) * one_minus.powf(-p.beta - 1.0))
}

/// `π_ε(z)` on `[0, 1)`.
pub fn eval_pi_eps(z: f64, p: &PressureParams) -> Result<f64> {
    check_open_unit(z)?;
    Ok(pi_eps_raw(z, p))
}

/// Truncated law: `π_ε` up to `1 - δ`, then `π_ε(1-δ) + ε (z - 1 + δ)^γ`.
pub fn eval_pi_delta(z: f64, p: &PressureParams) -> Result<f64> {
    check_nonneg(z)?;
    p.require_truncated()?;
    Ok(pi_delta_unchecked(z, p))
}

/// Truncated pressure for solver kernels: negative arguments map to zero
/// pressure, and the parameters are assumed validated.
#[inline]
pub fn pi_delta_unchecked(z: f64, p: &PressureParams) -> f64 {
    let z = z.max(0.0);
    let a = p.split();
    if z <= a {
        pi_eps_raw(z, p)
    } else {
        pi_eps_raw(a, p) + p.epsilon * (z - a).powf(p.gamma)
    }
}

/// Derivative of the truncated law, same conventions as
/// [`pi_delta_unchecked`]. At `z = 1 - δ` the left derivative is returned.
#[inline]
pub fn dpi_delta_unchecked(z: f64, p: &PressureParams) -> f64 {
    let z = z.max(0.0);
    let a = p.split();
    if z <= a {
        dpi_eps_raw(z, p)
    } else {
        p.epsilon * p.gamma * (z - a).powf(p.gamma - 1.0)
    }
}

/// Analytic derivative of the selected branch.
pub fn eval_dpi(z: f64, p: &PressureParams, truncated: bool) -> Result<f64> {
    if truncated {
        check_nonneg(z)?;
        p.require_truncated()?;
        Ok(dpi_delta_unchecked(z, p))
    } else {
        check_open_unit(z)?;
        Ok(dpi_eps_raw(z, p))
    }
}

/// `∫_0^z π_ε(s)/s² ds` for `z` in `[0, 1)`.
fn integral_eps(z: f64, p: &PressureParams) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if p.alpha == 2.0 {
        return p.epsilon * ((1.0 - z).powf(1.0 - p.beta) - 1.0) / (p.beta - 1.0);
    }
    let integrand = |s: f64| p.epsilon * s.powf(p.alpha - 2.0) * (1.0 - s).powf(-p.beta);
    if p.alpha < 2.0 {
        let s0 = SINGULAR_SPLIT.min(z);
        let head = p.epsilon * s0.powf(p.alpha - 1.0) / (p.alpha - 1.0);
        head + quadrature::integrate(integrand, s0, z, QUAD_REL_TOL, 0.0)
    } else {
        quadrature::integrate(integrand, 0.0, z, QUAD_REL_TOL, 0.0)
    }
}

/// `∫_0^z π_δ(s)/s² ds` for `z ≥ 0`.
fn integral_delta(z: f64, p: &PressureParams) -> f64 {
    let a = p.split();
    if z <= a {
        return integral_eps(z, p);
    }
    let plateau = pi_eps_raw(a, p);
    let poly = quadrature::integrate(
        |s| p.epsilon * (s - a).powf(p.gamma) / (s * s),
        a,
        z,
        QUAD_REL_TOL,
        0.0,
    );
    integral_eps(a, p) + plateau * (1.0 / a - 1.0 / z) + poly
}

/// `H_ε(z) = z ∫_0^z π_ε(s)/s² ds` on `[0, 1)`.
pub fn eval_h_eps(z: f64, p: &PressureParams) -> Result<f64> {
    check_open_unit(z)?;
    Ok(z * integral_eps(z, p))
}

/// Potential of the truncated law, finite for every `z ≥ 0`.
pub fn eval_h_delta(z: f64, p: &PressureParams) -> Result<f64> {
    check_nonneg(z)?;
    p.require_truncated()?;
    Ok(z * integral_delta(z, p))
}

/// `H_δ` for solver-side diagnostics; negative arguments map to zero.
pub fn h_delta_unchecked(z: f64, p: &PressureParams) -> f64 {
    let z = z.max(0.0);
    z * integral_delta(z, p)
}

/// Most singular part of `H_δ`: `ε (1 - z)^{-(β-1)}` continued linearly
/// past `1 - δ`.
pub fn eval_tilde_h_delta(z: f64, p: &PressureParams) -> Result<f64> {
    check_nonneg(z)?;
    p.require_truncated()?;
    let a = p.split();
    Ok(if z <= a {
        p.epsilon * (1.0 - z).powf(-(p.beta - 1.0))
    } else {
        p.epsilon * p.delta.powf(-(p.beta - 1.0)) + p.epsilon * p.delta.powf(-p.beta) * (z - a)
    })
}

/// Acoustic speed `sqrt(π'(z) z / ρ)` used by the explicit CFL bound.
///
/// Uses the truncated law when `delta > 0`; with the untruncated law a
/// congested argument (`z ≥ 1`) yields infinity.
pub fn sound_speed(rho: f64, z: f64, p: &PressureParams) -> f64 {
    if !(rho > 0.0) || !(z > 0.0) {
        return 0.0;
    }
    let dpi = if p.delta > 0.0 {
        dpi_delta_unchecked(z, p)
    } else if z < 1.0 {
        dpi_eps_raw(z, p)
    } else {
        return f64::INFINITY;
    };
    (dpi * z / rho).sqrt()
}
