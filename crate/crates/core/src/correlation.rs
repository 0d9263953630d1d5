//! First- and second-order correlation functions of the biphoton state.
//!
//! `G¹(τ) = ∫|T(ν)|² e^{−iντ} dν` is the Fourier transform of the
//! single-photon power spectrum (the carrier `e^{−iΩτ}` is left out) and
//! `G²(τ) = |∫T(ν) e^{−iντ} dν|²`. Both are evaluated by trapezoidal
//! quadrature on the detuning grid, one delay at a time; the per-delay sum
//! runs in fixed index order so results do not depend on how the delay loop
//! is parallelized.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::spectral::{DetuningGrid, SpectralAmplitude};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    G1Envelope,
    G2,
    /// `g¹(2τ)`: envelope of the coincidence dip/peak.
    TwoPhotonEnvelope,
}

/// A real function of delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: TraceKind,
    pub source: String,
    /// Constant the raw quadrature was divided by.
    pub normalization: f64,
}

/// Re-anchor the phasor recurrence every this many samples.
const ANCHOR_EVERY: usize = 256;

/// Trapezoidal `Σ w_k x_k e^{−iν_k τ}` over the grid.
pub fn fourier_sum<X>(grid: &DetuningGrid, x: X, tau: f64) -> Complex64
where
    X: Fn(usize) -> Complex64,
{
    let nu = grid.nu();
    let n = nu.len();
    let step = Complex64::from_polar(1.0, -grid.spacing() * tau);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phasor = Complex64::new(1.0, 0.0);
    for k in 0..n {
        if k % ANCHOR_EVERY == 0 {
            phasor = Complex64::from_polar(1.0, -nu[k] * tau);
        }
        acc += x(k) * phasor * grid.weight(k);
        phasor *= step;
    }
    acc
}

fn check_delays(grid: &DetuningGrid, tau: &[f64], scale: f64) -> Result<()> {
    let max = grid.max_delay_fs();
    for &t in tau {
        if !t.is_finite() || (t * scale).abs() > max {
            return Err(Error::DelayOutOfRange { tau_fs: t * scale, max_fs: max });
        }
    }
    Ok(())
}

/// Normalized complex `G¹(τ)/G¹(0)` at the given delays.
pub fn g1_complex(t: &SpectralAmplitude, tau: &[f64]) -> Result<Vec<Complex64>> {
    check_delays(&t.grid, tau, 1.0)?;
    let power = t.power_spectrum();
    let norm = t.power_integral();
    if !(norm > 0.0) {
        return Err(Error::Numerical("amplitude has zero power".into()));
    }
    Ok(tau
        .par_iter()
        .map(|&d| fourier_sum(&t.grid, |k| Complex64::new(power[k], 0.0), d) / norm)
        .collect())
}

/// Unnormalized `G¹(τ)` values (used for Parseval checks).
pub fn g1_raw(t: &SpectralAmplitude, tau: &[f64]) -> Result<Vec<Complex64>> {
    let norm = t.power_integral();
    Ok(g1_complex(t, tau)?.into_iter().map(|g| g * norm).collect())
}

/// Envelope `g¹(τ) = |G¹(τ)|/|G¹(0)|`.
pub fn g1_envelope(t: &SpectralAmplitude, tau: &[f64]) -> Result<CorrelationTrace> {
    let g = g1_complex(t, tau)?;
    Ok(CorrelationTrace {
        tau: tau.to_vec(),
        values: g.iter().map(|v| v.norm().min(1.0)).collect(),
        kind: TraceKind::G1Envelope,
        source: t.description.clone(),
        normalization: t.power_integral(),
    })
}

/// `g¹` on the conjugate delay grid `τ_j = 2πj/(N dν)` via one FFT.
pub fn g1_envelope_fft(t: &SpectralAmplitude) -> CorrelationTrace {
    let grid = &t.grid;
    let n = grid.len();
    let norm = t.power_integral();
    let mut buf: Vec<Complex64> = t
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| Complex64::new(v.norm_sqr() * grid.weight(k), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = (n / 2) as i64;
    let dtau = 2.0 * std::f64::consts::PI / (n as f64 * grid.spacing());
    let mut tau = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for j in -half..=half {
        let idx = if j < 0 { (n as i64 + j) as usize } else { j as usize };
        tau.push(j as f64 * dtau);
        values.push((buf[idx].norm() / norm).min(1.0));
    }
    CorrelationTrace {
        tau,
        values,
        kind: TraceKind::G1Envelope,
        source: t.description.clone(),
        normalization: norm,
    }
}

/// Two-photon envelope `g¹(2τ)`.
pub fn two_photon_envelope(t: &SpectralAmplitude, tau: &[f64]) -> Result<CorrelationTrace> {
    let doubled: Vec<f64> = tau.iter().map(|x| 2.0 * x).collect();
    let mut trace = g1_envelope(t, &doubled)?;
    trace.tau = tau.to_vec();
    trace.kind = TraceKind::TwoPhotonEnvelope;
    Ok(trace)
}

/// Unit-peak `G²(τ) = |∫T(ν)e^{−iντ}dν|²`; the spectral phase participates.
pub fn g2(t: &SpectralAmplitude, tau: &[f64]) -> Result<CorrelationTrace> {
    check_delays(&t.grid, tau, 1.0)?;
    let raw: Vec<f64> = tau
        .par_iter()
        .map(|&d| fourier_sum(&t.grid, |k| t.values[k], d).norm_sqr())
        .collect();
    let peak = raw.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Numerical("G² vanishes on the requested delays".into()));
    }
    Ok(CorrelationTrace {
        tau: tau.to_vec(),
        values: raw.iter().map(|v| v / peak).collect(),
        kind: TraceKind::G2,
        source: t.description.clone(),
        normalization: peak,
    })
}

/// Full width at half maximum of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Width {
    pub fwhm_fs: f64,
    pub left_fs: f64,
    pub right_fs: f64,
    /// The trace dips below half maximum between the outer crossings.
    pub multimodal: bool,
}

/// FWHM with linear interpolation of the outermost half-height crossings.
pub fn fwhm(trace: &CorrelationTrace) -> Result<Width> {
    fwhm_of(&trace.tau, &trace.values)
}

pub fn fwhm_of(x: &[f64], y: &[f64]) -> Result<Width> {
    let n = y.len();
    if n < 3 || x.len() != n {
        return Err(Error::UnresolvedPeak("trace needs at least three samples".into()));
    }
    let (imax, &peak) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if imax == 0 || imax == n - 1 {
        return Err(Error::UnresolvedPeak(format!("maximum at array boundary (x = {})", x[imax])));
    }
    let half = peak / 2.0;
    let first = y.iter().position(|&v| v >= half).expect("peak exceeds half");
    let last = y.iter().rposition(|&v| v >= half).expect("peak exceeds half");
    if first == 0 || last == n - 1 {
        return Err(Error::UnresolvedPeak("half maximum not reached inside the delay range".into()));
    }
    let interp = |i0: usize, i1: usize| {
        let (y0, y1) = (y[i0], y[i1]);
        x[i0] + (half - y0) * (x[i1] - x[i0]) / (y1 - y0)
    };
    let left = interp(first - 1, first);
    let right = interp(last, last + 1);
    let multimodal = y[first..=last].iter().any(|&v| v < half);
    Ok(Width { fwhm_fs: right - left, left_fs: left, right_fs: right, multimodal })
}

/// Uniform delay array `[start, stop]` with the given step.
pub fn delay_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as i64;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_type2, DetuningGrid};

    fn type2(zeros: f64) -> SpectralAmplitude {
        let grid = DetuningGrid::for_type2(494.0, zeros, 16385).unwrap();
        build_type2(0.247, 2000.0, &grid, 702.2).unwrap()
    }

    #[test]
    fn g1_at_zero_is_one() {
        let t = type2(64.0);
        let g = g1_envelope(&t, &[0.0]).unwrap();
        assert!((g.values[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn delay_beyond_nyquist_errors() {
        let t = type2(64.0);
        let max = t.grid.max_delay_fs();
        assert!(matches!(g1_envelope(&t, &[max * 1.01]), Err(Error::DelayOutOfRange { .. })));
        assert!(g2(&t, &[-max * 1.01]).is_err());
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        let t = type2(64.0);
        let fast = g1_envelope_fft(&t);
        let pick: Vec<usize> = (0..fast.tau.len()).step_by(997).collect();
        let taus: Vec<f64> = pick.iter().map(|&i| fast.tau[i]).collect();
        let direct = g1_envelope(&t, &taus).unwrap();
        for (j, &i) in pick.iter().enumerate() {
            assert!((direct.values[j] - fast.values[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn fwhm_triangle_and_errors() {
        let tau = delay_range(-600.0, 600.0, 1.0);
        let tri: Vec<f64> = tau.iter().map(|t| (1.0 - t.abs() / 494.0).max(0.0)).collect();
        let w = fwhm_of(&tau, &tri).unwrap();
        assert!((w.fwhm_fs - 494.0).abs() <= 1.0);
        assert!(!w.multimodal);

        let rising: Vec<f64> = tau.iter().map(|t| t + 600.0).collect();
        assert!(matches!(fwhm_of(&tau, &rising), Err(Error::UnresolvedPeak(_))));
    }

    #[test]
    fn fwhm_top_hat() {
        let tau = delay_range(-400.0, 400.0, 2.0);
        let hat: Vec<f64> = tau.iter().map(|t| if t.abs() <= 247.0 { 1.0 } else { 0.0 }).collect();
        let w = fwhm_of(&tau, &hat).unwrap();
        assert!((w.fwhm_fs - 494.0).abs() <= 2.0);
    }

    #[test]
    fn fwhm_flags_multimodal() {
        let tau = delay_range(-10.0, 10.0, 0.5);
        let y: Vec<f64> = tau
            .iter()
            .map(|t| (-(t - 4.0) * (t - 4.0)).exp() + 0.9 * (-(t + 4.0) * (t + 4.0)).exp())
            .collect();
        let w = fwhm_of(&tau, &y).unwrap();
        assert!(w.multimodal);
        assert!(w.fwhm_fs > 8.0);
    }

    #[test]
    fn parseval_consistency() {
        let t = type2(64.0);
        let direct = t.power_integral();
        let g0 = g1_raw(&t, &[0.0]).unwrap()[0];
        assert!(((g0.re - direct) / direct).abs() < 1e-10);
        assert!(g0.im.abs() < 1e-12 * direct);
    }

    #[test]
    fn g2_nonnegative() {
        let t = type2(64.0);
        let tau = delay_range(-800.0, 300.0, 5.0);
        let g = g2(&t, &tau).unwrap();
        assert!(g.values.iter().all(|&v| v >= 0.0));
    }
}
