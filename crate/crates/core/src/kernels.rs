//! Scalar spectral kernels for dynamic processes on graphs.
//!
//! Each kernel is a function of the scaled graph eigenvalue `s*lambda` and a
//! time step `t`:
//!
//! * heat:        `exp(-s lambda t)` — diffusion from an initial distribution;
//! * wave:        `cos(t arccos(1 - s lambda / 2))` — the discrete-time wave
//!   solution with vanishing initial velocity, valid for `0 <= s lambda <= 4`
//!   (outside that range `arccos` leaves the real line, which is exactly the
//!   CFL-type stability bound `s < 4/lambda_max`);
//! * damped wave: `H(t) exp(-beta t) * wave` — causal (zero before onset,
//!   `H(0) = 1`) and attenuated, which is what makes a frame of these atoms
//!   possible.
//!
//! The damped wave kernel's time profile has a closed-form infinite-horizon
//! DFT — a pair of geometric series — used to cross-check the truncated
//! spectra and to bound the lower frame bound away from zero.

use num_complex::Complex64;

use crate::error::{DgwError, Result};

/// Slack for `s*lambda` marginally outside [0, 4] from floating-point
/// eigenvalue error; larger violations are rejected.
const STABILITY_SLACK: f64 = 1e-9;

/// Kernel family selector with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Heat { scale: f64 },
    Wave { scale: f64 },
    DampedWave { scale: f64, beta: f64 },
}

impl KernelSpec {
    pub fn heat(scale: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(DgwError::InvalidParameter(format!(
                "heat kernel scale {scale} must be >= 0"
            )));
        }
        Ok(Self::Heat { scale })
    }

    pub fn wave(scale: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(DgwError::InvalidParameter(format!(
                "wave kernel scale {scale} must be >= 0"
            )));
        }
        Ok(Self::Wave { scale })
    }

    pub fn damped_wave(scale: f64, beta: f64) -> Result<Self> {
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(DgwError::InvalidParameter(format!(
                "damped wave scale {scale} must be >= 0"
            )));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(DgwError::InvalidParameter(format!(
                "damping beta {beta} must be >= 0"
            )));
        }
        Ok(Self::DampedWave { scale, beta })
    }

    pub fn scale(&self) -> f64 {
        match *self {
            Self::Heat { scale } | Self::Wave { scale } | Self::DampedWave { scale, .. } => scale,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::DampedWave { beta, .. } => beta,
            _ => 0.0,
        }
    }

    /// Evaluate the kernel at eigenvalue `lambda`, time step `t`.
    pub fn evaluate(&self, lambda: f64, t: f64) -> Result<f64> {
        match *self {
            Self::Heat { scale } => Ok(heat_kernel(scale, lambda, t)),
            Self::Wave { scale } => wave_kernel(scale, lambda, t),
            Self::DampedWave { .. } => damped_wave_kernel(self, lambda, t),
        }
    }
}

/// `exp(-s lambda t)`.
pub fn heat_kernel(scale: f64, lambda: f64, t: f64) -> f64 {
    (-scale * lambda * t).exp()
}

/// Validate `s*lambda` against the arccos domain, clamping violations within
/// [`STABILITY_SLACK`] of the boundary.
fn checked_s_lambda(scale: f64, lambda: f64) -> Result<f64> {
    let s_lambda = scale * lambda;
    if (0.0..=4.0).contains(&s_lambda) {
        return Ok(s_lambda);
    }
    if (4.0..=4.0 + STABILITY_SLACK).contains(&s_lambda) {
        return Ok(4.0);
    }
    if (-STABILITY_SLACK..0.0).contains(&s_lambda) {
        return Ok(0.0);
    }
    let bound = if lambda > 0.0 { 4.0 / lambda } else { f64::INFINITY };
    Err(DgwError::Stability {
        scale,
        s_lambda,
        bound,
    })
}

/// `cos(t arccos(1 - s lambda / 2))` for `0 <= s lambda <= 4`.
pub fn wave_kernel(scale: f64, lambda: f64, t: f64) -> Result<f64> {
    let s_lambda = checked_s_lambda(scale, lambda)?;
    let theta = (1.0 - s_lambda / 2.0).acos();
    Ok((t * theta).cos())
}

/// Causal damped wave: 0 for `t < 0`, `exp(-beta t) cos(t theta)` for `t >= 0`.
pub fn damped_wave_kernel(spec: &KernelSpec, lambda: f64, t: f64) -> Result<f64> {
    let (scale, beta) = match *spec {
        KernelSpec::DampedWave { scale, beta } => (scale, beta),
        _ => {
            return Err(DgwError::InvalidParameter(
                "damped_wave_kernel requires a damped_wave spec".into(),
            ))
        }
    };
    if t < 0.0 {
        return Ok(0.0);
    }
    Ok((-beta * t).exp() * wave_kernel(scale, lambda, t)?)
}

/// Unnormalized forward DFT of the length-T truncated damped-wave profile at
/// one eigenvalue: `sum_{t=0}^{T-1} exp(-beta t) cos(t theta) exp(-j 2 pi k t / T)`.
///
/// This is the analysis normalization the frame multipliers use.
pub(crate) fn damped_profile_dft(
    scale: f64,
    beta: f64,
    lambda: f64,
    n_steps: usize,
) -> Result<Vec<Complex64>> {
    let s_lambda = checked_s_lambda(scale, lambda)?;
    let theta = (1.0 - s_lambda / 2.0).acos();
    let mut buf: Vec<Complex64> = (0..n_steps)
        .map(|t| {
            let t = t as f64;
            Complex64::new((-beta * t).exp() * (t * theta).cos(), 0.0)
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n_steps).process(&mut buf);
    Ok(buf)
}

/// Unitary DFT (1/sqrt(T) scaling) of the truncated damped-wave time profile.
///
/// Requires a damped-wave spec and `T >= 2`. The infinite-horizon companion
/// is [`kernel_time_spectrum_closed_form`].
pub fn kernel_time_spectrum(
    spec: &KernelSpec,
    lambda: f64,
    n_steps: usize,
) -> Result<Vec<Complex64>> {
    let (scale, beta) = match *spec {
        KernelSpec::DampedWave { scale, beta } => (scale, beta),
        _ => {
            return Err(DgwError::InvalidParameter(
                "kernel_time_spectrum requires a damped_wave spec".into(),
            ))
        }
    };
    if n_steps < 2 {
        return Err(DgwError::InvalidParameter(format!(
            "kernel_time_spectrum needs T >= 2, got {n_steps}"
        )));
    }
    let mut spectrum = damped_profile_dft(scale, beta, lambda, n_steps)?;
    let unit = 1.0 / (n_steps as f64).sqrt();
    for v in &mut spectrum {
        *v *= unit;
    }
    Ok(spectrum)
}

/// Infinite-horizon spectral symbol of the damped-wave kernel at the T bin
/// frequencies `omega = 2 pi k / T`:
///
/// `sum_{t>=0} exp(-beta t) cos(t theta) exp(-j omega t)
///    = (1 - z cos(theta)) / (1 - 2 z cos(theta) + z^2)`, `z = exp(-beta - j omega)`.
///
/// No DFT normalization; compare against `sqrt(T) *` [`kernel_time_spectrum`],
/// which agrees up to the geometric tail `O(exp(-beta T))`. Requires
/// `beta > 0` (at `beta = 0` the denominator can vanish on resonance).
pub fn kernel_time_spectrum_closed_form(
    spec: &KernelSpec,
    lambda: f64,
    n_steps: usize,
) -> Result<Vec<Complex64>> {
    let (scale, beta) = match *spec {
        KernelSpec::DampedWave { scale, beta } => (scale, beta),
        _ => {
            return Err(DgwError::InvalidParameter(
                "kernel_time_spectrum_closed_form requires a damped_wave spec".into(),
            ))
        }
    };
    if beta <= 0.0 {
        return Err(DgwError::InvalidParameter(
            "closed-form spectrum requires beta > 0".into(),
        ));
    }
    if n_steps < 2 {
        return Err(DgwError::InvalidParameter(format!(
            "kernel_time_spectrum_closed_form needs T >= 2, got {n_steps}"
        )));
    }
    let s_lambda = checked_s_lambda(scale, lambda)?;
    let cos_theta = 1.0 - s_lambda / 2.0;
    Ok((0..n_steps)
        .map(|k| {
            let omega = std::f64::consts::TAU * k as f64 / n_steps as f64;
            let z = Complex64::new(-beta, -omega).exp();
            (1.0 - z * cos_theta) / (1.0 - 2.0 * z * cos_theta + z * z)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_kernel_values() {
        assert_eq!(heat_kernel(3.0, 7.0, 0.0), 1.0);
        assert_eq!(heat_kernel(3.0, 0.0, 9.0), 1.0);
        // s*lambda = ln 2, t = 1 -> 1/2
        let v = heat_kernel(1.0, std::f64::consts::LN_2, 1.0);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn heat_kernel_monotone_in_t() {
        let mut prev = f64::INFINITY;
        for t in 0..50 {
            let v = heat_kernel(0.3, 1.7, t as f64);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn wave_kernel_values() {
        // lambda = 0 -> 1 for all t
        for t in [0.0, 1.0, 17.0] {
            assert_eq!(wave_kernel(1.5, 0.0, t).unwrap(), 1.0);
        }
        // s*lambda = 2, t = 1 -> cos(pi/2) = 0
        assert!(wave_kernel(1.0, 2.0, 1.0).unwrap().abs() < 1e-15);
        // s*lambda = 4, t = 2 -> cos(2 pi) = 1
        assert!((wave_kernel(2.0, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_kernel_rejects_unstable() {
        let err = wave_kernel(1.0, 4.1, 1.0).unwrap_err();
        match err {
            DgwError::Stability { s_lambda, bound, .. } => {
                assert!((s_lambda - 4.1).abs() < 1e-12);
                assert!((bound - 4.0 / 4.1).abs() < 1e-12);
            }
            other => panic!("expected stability error, got {other}"),
        }
        // marginal violations clamp
        assert!(wave_kernel(1.0, 4.0 + 1e-10, 1.0).is_ok());
        assert!(wave_kernel(1.0, -1e-12, 1.0).is_ok());
    }

    #[test]
    fn wave_kernel_bounded_by_one() {
        for i in 0..40 {
            let s_lambda = 4.0 * i as f64 / 39.0;
            for t in 0..64 {
                let v = wave_kernel(1.0, s_lambda, t as f64).unwrap();
                assert!(v.abs() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn wave_recurrence_certifies_pde() {
        // K(t+1) - 2K(t) + K(t-1) = -s*lambda*K(t), exact to 1e-10
        for i in 0..20 {
            let s_lambda = 4.0 * i as f64 / 19.0;
            for t in 1..128 {
                let km = wave_kernel(1.0, s_lambda, (t - 1) as f64).unwrap();
                let k0 = wave_kernel(1.0, s_lambda, t as f64).unwrap();
                let kp = wave_kernel(1.0, s_lambda, (t + 1) as f64).unwrap();
                assert!(
                    (kp - 2.0 * k0 + km + s_lambda * k0).abs() < 1e-10,
                    "recurrence broken at s_lambda={s_lambda}, t={t}"
                );
            }
        }
    }

    #[test]
    fn damped_wave_heaviside_and_onset() {
        let spec = KernelSpec::damped_wave(1.0, 0.7).unwrap();
        assert_eq!(damped_wave_kernel(&spec, 2.0, -1.0).unwrap(), 0.0);
        assert_eq!(damped_wave_kernel(&spec, 2.0, 0.0).unwrap(), 1.0);
        // beta = ln 2, s*lambda = 0, t = 1 -> 1/2
        let spec = KernelSpec::damped_wave(1.0, std::f64::consts::LN_2).unwrap();
        assert!((damped_wave_kernel(&spec, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn damped_wave_beta_zero_equals_wave() {
        let spec = KernelSpec::damped_wave(0.9, 0.0).unwrap();
        for t in 0..64 {
            let d = damped_wave_kernel(&spec, 3.3, t as f64).unwrap();
            let w = wave_kernel(0.9, 3.3, t as f64).unwrap();
            assert_eq!(d, w);
        }
    }

    #[test]
    fn spectrum_near_delta_is_flat() {
        let t_len = 32;
        let spec = KernelSpec::damped_wave(1.0, 20.0).unwrap();
        let spectrum = kernel_time_spectrum(&spec, 1.0, t_len).unwrap();
        let unit = 1.0 / (t_len as f64).sqrt();
        for v in &spectrum {
            assert!((v.norm() - unit).abs() < 1e-8 * unit.max(1.0) + 1e-8);
        }
    }

    #[test]
    fn closed_form_at_zero_eigenvalue_is_geometric() {
        let t_len = 16;
        let beta = 0.8;
        let spec = KernelSpec::damped_wave(1.3, beta).unwrap();
        let cf = kernel_time_spectrum_closed_form(&spec, 0.0, t_len).unwrap();
        for (k, v) in cf.iter().enumerate() {
            let omega = std::f64::consts::TAU * k as f64 / t_len as f64;
            let z = Complex64::new(-beta, -omega).exp();
            let expect = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z);
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn truncated_dft_matches_closed_form_within_tail() {
        let t_len = 64;
        let beta = 1.0;
        let lambda = 1.7;
        let spec = KernelSpec::damped_wave(1.0, beta).unwrap();
        let truncated = kernel_time_spectrum(&spec, lambda, t_len).unwrap();
        let closed = kernel_time_spectrum_closed_form(&spec, lambda, t_len).unwrap();
        let scale = (t_len as f64).sqrt();
        // Geometric tail bound: the truncated sum drops terms t >= T of
        // magnitude <= exp(-beta t), but the closed form also differs from a
        // periodized profile; exp(-beta T)/(1 - exp(-beta)) covers the gap.
        let tail = (-beta * t_len as f64).exp() / (1.0 - (-beta).exp());
        let tol = (tail * 4.0).max(1e-12);
        for (tr, cl) in truncated.iter().zip(&closed) {
            assert!((tr * scale - cl).norm() < tol);
        }
    }
}
