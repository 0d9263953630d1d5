//! Michelson single-count fringes and two-photon coincidence patterns.
//!
//! With analyzers at θ₁, θ₂ behind the beamsplitter the coincidence rate
//! integrated over both detection times reduces, by Parseval, to
//!
//! ```text
//! R(τ) = (c₁² + c₂²) N − 2 c₁ c₂ Re ∫ T(ν) T*(−ν) e^{2iντ} dν,
//! c₁ = cos θ₁ sin θ₂,  c₂ = sin θ₁ cos θ₂,  N = ∫ |T|² dν,
//! ```
//!
//! reported as `R/N`. A linear spectral phase (type-II) displaces the
//! overlap to `τ₀`; [`hom_general`] measures delays from `τ₀` so that at
//! ±45° it coincides with [`hom_closed`], which uses `Re G¹(2τ)/G¹(0)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{fourier_sum, g1_complex, g1_envelope};
use crate::spectral::SpectralAmplitude;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternMode {
    Michelson,
    HomClosed,
    HomGeneral,
}

/// Sign in `½(1 ± g¹(2τ))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// Coincidence peak (θ₁ = −θ₂ = 45°).
    Plus,
    /// Coincidence dip (θ₁ = θ₂ = 45°).
    Minus,
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Config(format!("sign must be plus or minus, got {other:?}"))),
        }
    }
}

/// Normalized interference trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferencePattern {
    pub tau: Vec<f64>,
    pub rate: Vec<f64>,
    pub analyzer_deg: [f64; 2],
    /// Carrier Ω (rad/fs), Michelson only.
    pub carrier_omega: Option<f64>,
    pub mode: PatternMode,
    pub sign: Option<Sign>,
    /// Analytic g¹ envelope of a Michelson pattern.
    pub envelope: Option<Vec<f64>>,
    /// Absolute delay corresponding to `tau = 0`.
    pub delay_offset_fs: f64,
    pub source: String,
}

impl InterferencePattern {
    /// Sample closest to `tau = 0`.
    pub fn center_index(&self) -> usize {
        self.tau
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Mean rate over samples with `|τ| ≥ 0.9 max|τ|`.
    pub fn far_wing_baseline(&self) -> f64 {
        far_wing_mean(&self.tau, &self.rate)
    }

    /// Mean rate over the outermost 10% of samples (5% on each side).
    pub fn edge_mean(&self) -> f64 {
        let n = self.rate.len();
        let k = (n / 20).max(1);
        let s: f64 = self.rate[..k].iter().chain(&self.rate[n - k..]).sum();
        s / (2 * k) as f64
    }
}

/// Single-count rate `½(1 + g¹(τ) cos Ωτ)` at one Michelson output.
pub fn michelson(t: &SpectralAmplitude, tau: &[f64]) -> Result<InterferencePattern> {
    let omega = t.center_omega;
    let limit = 2.0 * PI / omega / 10.0;
    let spacing = tau.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    if spacing > limit {
        return Err(Error::Aliasing { spacing_fs: spacing, limit_fs: limit });
    }
    let env = g1_envelope(t, tau)?;
    let rate = tau
        .iter()
        .zip(&env.values)
        .map(|(&d, &g)| 0.5 * (1.0 + g * (omega * d).cos()))
        .collect();
    Ok(InterferencePattern {
        tau: tau.to_vec(),
        rate,
        analyzer_deg: [0.0, 0.0],
        carrier_omega: Some(omega),
        mode: PatternMode::Michelson,
        sign: None,
        envelope: Some(env.values),
        delay_offset_fs: 0.0,
        source: t.description.clone(),
    })
}

/// Fringe envelope recovered from the data alone: parabolic-refined local
/// maxima of `2|rate − ½|`, linearly interpolated back onto `tau`.
pub fn fringe_envelope(p: &InterferencePattern) -> Vec<f64> {
    let d: Vec<f64> = p.rate.iter().map(|r| 2.0 * (r - 0.5).abs()).collect();
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 1..d.len().saturating_sub(1) {
        if d[i] >= d[i - 1] && d[i] > d[i + 1] {
            let (a, b, c) = (d[i - 1], d[i], d[i + 1]);
            let den = a - 2.0 * b + c;
            let (shift, height) = if den < 0.0 {
                let s = 0.5 * (a - c) / den;
                (s, b - 0.25 * (a - c) * s)
            } else {
                (0.0, b)
            };
            let step = p.tau[i + 1] - p.tau[i];
            peaks.push((p.tau[i] + shift * step, height));
        }
    }
    if peaks.is_empty() {
        return d;
    }
    p.tau
        .iter()
        .map(|&x| {
            let j = peaks.partition_point(|&(px, _)| px < x);
            if j == 0 {
                peaks[0].1
            } else if j == peaks.len() {
                peaks[j - 1].1
            } else {
                let (x0, y0) = peaks[j - 1];
                let (x1, y1) = peaks[j];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        })
        .collect()
}

/// `½(1 ± Re G¹(2τ)/G¹(0))`.
pub fn hom_closed(t: &SpectralAmplitude, tau: &[f64], sign: Sign) -> Result<InterferencePattern> {
    let doubled: Vec<f64> = tau.iter().map(|x| 2.0 * x).collect();
    let g = g1_complex(t, &doubled)?;
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let rate = g.iter().map(|v| (0.5 * (1.0 + s * v.re)).clamp(0.0, 1.0)).collect();
    let analyzer_deg = match sign {
        Sign::Plus => [45.0, -45.0],
        Sign::Minus => [45.0, 45.0],
    };
    Ok(InterferencePattern {
        tau: tau.to_vec(),
        rate,
        analyzer_deg,
        carrier_omega: None,
        mode: PatternMode::HomClosed,
        sign: Some(sign),
        envelope: None,
        delay_offset_fs: 0.0,
        source: t.description.clone(),
    })
}

/// `X(ν) = T(ν) T*(−ν)` on the (symmetric) grid.
fn exchange_overlap(t: &SpectralAmplitude) -> Vec<Complex64> {
    let n = t.values.len();
    (0..n).map(|k| t.values[k] * t.values[n - 1 - k].conj()).collect()
}

/// Delay `τ₀` at which the exchange overlap peaks, from the
/// magnitude-weighted mean phase slope of `T(ν)T*(−ν)`.
pub fn pair_overlap_delay(t: &SpectralAmplitude) -> f64 {
    let x = exchange_overlap(t);
    let (mut num, mut den) = (0.0, 0.0);
    for w in x.windows(2) {
        let m = w[0].norm() * w[1].norm();
        if m > 0.0 {
            num += m * (w[1] * w[0].conj()).arg();
            den += m;
        }
    }
    if den == 0.0 {
        return 0.0;
    }
    let slope = num / den / t.grid.spacing();
    -0.5 * slope
}

/// Analyzer projections `(c₁, c₂)`.
pub fn analyzer_coefficients(theta1_deg: f64, theta2_deg: f64) -> (f64, f64) {
    let (t1, t2) = (theta1_deg.to_radians(), theta2_deg.to_radians());
    (t1.cos() * t2.sin(), t1.sin() * t2.cos())
}

/// Coincidence rate for arbitrary analyzer angles, delays measured from
/// [`pair_overlap_delay`].
pub fn hom_general(t: &SpectralAmplitude, tau: &[f64], theta1_deg: f64, theta2_deg: f64) -> Result<InterferencePattern> {
    let tau0 = pair_overlap_delay(t);
    let max = t.grid.max_delay_fs();
    for &d in tau {
        let arg = 2.0 * (d + tau0);
        if !arg.is_finite() || arg.abs() > max {
            return Err(Error::DelayOutOfRange { tau_fs: arg, max_fs: max });
        }
    }
    let (c1, c2) = analyzer_coefficients(theta1_deg, theta2_deg);
    let x = exchange_overlap(t);
    let norm = t.power_integral();
    let rate = tau
        .par_iter()
        .map(|&d| {
            let cross = fourier_sum(&t.grid, |k| x[k], -2.0 * (d + tau0)).re;
            (((c1 * c1 + c2 * c2) * norm - 2.0 * c1 * c2 * cross) / norm).clamp(0.0, 1.0)
        })
        .collect();
    Ok(InterferencePattern {
        tau: tau.to_vec(),
        rate,
        analyzer_deg: [theta1_deg, theta2_deg],
        carrier_omega: None,
        mode: PatternMode::HomGeneral,
        sign: None,
        envelope: None,
        delay_offset_fs: tau0,
        source: t.description.clone(),
    })
}

/// `(max − min)/(max + min)` at `τ = 0` with `max` from the peak trace.
pub fn visibility(dip: &InterferencePattern, peak: &InterferencePattern) -> Result<f64> {
    if dip.tau != peak.tau {
        return Err(Error::Config("visibility needs dip and peak traces on the same delay grid".into()));
    }
    let i = dip.center_index();
    let (hi, lo) = (peak.rate[i], dip.rate[i]);
    if hi + lo == 0.0 {
        return Err(Error::Numerical("visibility undefined: max + min = 0".into()));
    }
    Ok((hi - lo) / (hi + lo))
}

/// Removes a flat background and rescales so the far wing returns to ½.
pub fn subtract_accidentals(p: &InterferencePattern, accidental_level: f64) -> Result<InterferencePattern> {
    subtract_accidentals_per_sample(p, &vec![accidental_level; p.rate.len()])
}

/// As [`subtract_accidentals`] with a separately measured level per delay.
pub fn subtract_accidentals_per_sample(p: &InterferencePattern, levels: &[f64]) -> Result<InterferencePattern> {
    const TOLERANCE: f64 = 1e-9;
    if levels.len() != p.rate.len() {
        return Err(Error::Config("one accidental level per delay sample is required".into()));
    }
    if let Some(bad) = levels.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::Config(format!("accidental level must be ≥ 0, got {bad}")));
    }
    for (j, (&r, &a)) in p.rate.iter().zip(levels).enumerate() {
        if a > r + TOLERANCE {
            return Err(Error::Numerical(format!(
                "over-subtraction: accidental level {a} above the rate {r} at tau = {} fs",
                p.tau[j]
            )));
        }
    }
    let baseline = p.far_wing_baseline();
    let wing_level = far_wing_mean(&p.tau, levels);
    if wing_level >= baseline {
        return Err(Error::Numerical(format!(
            "over-subtraction: accidental level {wing_level} ≥ baseline {baseline}"
        )));
    }
    let scale = 0.5 / (baseline - wing_level);
    let mut out = p.clone();
    for (r, a) in out.rate.iter_mut().zip(levels) {
        *r = (*r - a) * scale;
    }
    Ok(out)
}

fn far_wing_mean(tau: &[f64], values: &[f64]) -> f64 {
    let reach = tau.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    let (sum, n) = tau
        .iter()
        .zip(values)
        .filter(|(t, _)| t.abs() >= 0.9 * reach)
        .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
    sum / n.max(1) as f64
}

/// Mixes in a flat background: `r → a + (1 − 2a) r`.
pub fn add_accidentals(p: &InterferencePattern, accidental_level: f64) -> Result<InterferencePattern> {
    if !(0.0..0.5).contains(&accidental_level) {
        return Err(Error::Config(format!("accidental level must lie in [0, 0.5), got {accidental_level}")));
    }
    let mut out = p.clone();
    for r in &mut out.rate {
        *r = accidental_level + (1.0 - 2.0 * accidental_level) * *r;
    }
    Ok(out)
}

/// Scales the modulation about ½ by `factor ∈ [0, 1]`.
pub fn scale_visibility(p: &InterferencePattern, factor: f64) -> Result<InterferencePattern> {
    if !(0.0..=1.0).contains(&factor) {
        return Err(Error::Config(format!("visibility factor must lie in [0, 1], got {factor}")));
    }
    let mut out = p.clone();
    for r in &mut out.rate {
        *r = 0.5 + factor * (*r - 0.5);
    }
    Ok(out)
}

/// Brute-force evaluation of the coincidence rate from the detector field
/// amplitudes on a grid of detection times, without the Parseval reduction.
pub mod oracle {
    use super::*;

    /// Coincidence rate at absolute delays `tau_abs`, normalized by the
    /// θ₁ = 0°, θ₂ = 90° rate. Intended for coarse grids (a few hundred ν).
    pub fn coincidence_rate(t: &SpectralAmplitude, tau_abs: &[f64], theta1_deg: f64, theta2_deg: f64) -> Vec<f64> {
        let reach = tau_abs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let period = 2.0 * PI / t.grid.spacing();
        // amplitudes are periodic in t₂ − t₁ with the conjugate period;
        // integrate over one full period (exact for trigonometric sums)
        let n_x = 2 * t.grid.len() + 1;
        assert!(2.0 * reach < period / 2.0, "delays too large for the oracle grid");
        let dx = period / n_x as f64;
        let xs: Vec<f64> = (0..n_x).map(|j| -period / 2.0 + (j as f64 + 0.5) * dx).collect();
        let t1s = [0.0, 41.3, -117.9];
        let reference = integrate(t, &xs, &t1s, 0.0, 0.0, 90.0);
        tau_abs
            .par_iter()
            .map(|&tau| integrate(t, &xs, &t1s, tau, theta1_deg, theta2_deg) / reference)
            .collect()
    }

    fn integrate(t: &SpectralAmplitude, xs: &[f64], t1s: &[f64], tau: f64, th1: f64, th2: f64) -> f64 {
        let (c1, c2) = analyzer_coefficients(th1, th2);
        let omega = t.center_omega;
        let nu = t.grid.nu();
        let dnu = t.grid.spacing();
        let mut total = 0.0;
        for &t1 in t1s {
            for &x in xs {
                let t2 = t1 + x;
                let mut a = Complex64::new(0.0, 0.0);
                for (k, &v) in nu.iter().enumerate() {
                    let term1 = Complex64::cis(-(omega + v) * t2 - (omega - v) * (t1 + tau));
                    let term2 = Complex64::cis(-(omega - v) * (t2 + tau) - (omega + v) * t1);
                    a += t.values[k] * (c1 * term1 - c2 * term2) * dnu;
                }
                total += a.norm_sqr();
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::delay_range;
    use crate::spectral::{build_type2, DetuningGrid};

    fn type2() -> SpectralAmplitude {
        let grid = DetuningGrid::for_type2(494.0, 128.0, 8193).unwrap();
        build_type2(0.247, 2000.0, &grid, 702.2).unwrap()
    }

    fn flat(level: f64) -> InterferencePattern {
        let tau = delay_range(-100.0, 100.0, 1.0);
        InterferencePattern {
            rate: vec![level; tau.len()],
            tau,
            analyzer_deg: [45.0, 45.0],
            carrier_omega: None,
            mode: PatternMode::HomClosed,
            sign: Some(Sign::Minus),
            envelope: None,
            delay_offset_fs: 0.0,
            source: "synthetic".into(),
        }
    }

    #[test]
    fn michelson_limits() {
        let t = type2();
        let p = michelson(&t, &[0.0]).unwrap();
        assert!((p.rate[0] - 1.0).abs() < 1e-14);
        let far = michelson(&t, &[600.0]).unwrap();
        assert!((far.rate[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn michelson_rejects_coarse_delays() {
        let t = type2();
        let tau = delay_range(0.0, 10.0, 0.5);
        assert!(matches!(michelson(&t, &tau), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn hom_closed_extremes() {
        let t = type2();
        let dip = hom_closed(&t, &[0.0], Sign::Minus).unwrap();
        let peak = hom_closed(&t, &[0.0], Sign::Plus).unwrap();
        assert!(dip.rate[0].abs() < 1e-12);
        assert!((peak.rate[0] - 1.0).abs() < 1e-12);
        assert!((visibility(&dip, &peak).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn type2_overlap_delay_is_half_dl() {
        let t = type2();
        assert!((pair_overlap_delay(&t) - 247.0).abs() < 1e-6);
    }

    #[test]
    fn crossed_analyzers_show_no_interference() {
        let t = type2();
        let p = hom_general(&t, &delay_range(-300.0, 300.0, 10.0), 0.0, 90.0).unwrap();
        for r in &p.rate {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn visibility_arithmetic() {
        let v = visibility(&flat(0.08), &flat(0.92)).unwrap();
        assert!((v - 0.84).abs() < 1e-12);
        assert_eq!(visibility(&flat(0.5), &flat(0.5)).unwrap(), 0.0);
        assert!(visibility(&flat(0.0), &flat(0.0)).is_err());
    }

    #[test]
    fn subtraction_guards() {
        let p = flat(0.5);
        assert_eq!(subtract_accidentals(&p, 0.0).unwrap().rate, p.rate);
        assert!(subtract_accidentals(&p, 0.5).is_err());
        assert!(subtract_accidentals(&p, -0.1).is_err());
        let mut dip = flat(0.5);
        dip.rate[100] = 0.1;
        assert!(subtract_accidentals(&dip, 0.2).is_err());
    }

    #[test]
    fn scale_visibility_about_half() {
        let t = type2();
        let tau = delay_range(-400.0, 400.0, 5.0);
        let dip = scale_visibility(&hom_closed(&t, &tau, Sign::Minus).unwrap(), 0.84).unwrap();
        let peak = scale_visibility(&hom_closed(&t, &tau, Sign::Plus).unwrap(), 0.84).unwrap();
        assert!((visibility(&dip, &peak).unwrap() - 0.84).abs() < 1e-12);
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("minus".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("sideways".parse::<Sign>().is_err());
    }
}
