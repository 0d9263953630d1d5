//! Biphoton spectral amplitude `T(ν) = S(ν) P(ν)` on a detuning grid.
//!
//! The detuning is `ν = ω_s − Ω` with `Ω = Ω_p / 2`; the idler sits at
//! `Ω − ν`. Amplitudes are peak-normalized after every operation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{angular_frequency, wavelength_nm, Error, Result, SPEED_OF_LIGHT_NM_PER_FS};

/// Default number of grid points (odd so that ν = 0 is a sample).
pub const DEFAULT_GRID_POINTS: usize = 16_385;
/// Default half-span of a type-II grid, in first zeros of `sinc(νDL/2)`.
pub const DEFAULT_TYPE2_ZEROS: f64 = 512.0;
/// Default half-span of a type-I grid, in zeros of `sinc(ν²D''L/2)`.
pub const DEFAULT_TYPE1_ZEROS: f64 = 32.0;
/// Minimum number of sinc zeros a grid half-span must contain.
pub const MIN_ZEROS: f64 = 8.0;
/// Minimum grid size.
pub const MIN_GRID_POINTS: usize = 129;

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Uniform, symmetric grid of detunings (rad/fs).
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningGrid {
    nu: Arc<[f64]>,
    spacing: f64,
}

impl DetuningGrid {
    /// `count` samples spanning `[-half_span, half_span]`; `count` must be
    /// odd so the grid holds ±ν pairs and 0.
    pub fn new(half_span: f64, count: usize) -> Result<Self> {
        if count < MIN_GRID_POINTS || count % 2 == 0 {
            return Err(Error::Config(format!(
                "grid.points must be odd and at least {MIN_GRID_POINTS}, got {count}"
            )));
        }
        if !(half_span > 0.0 && half_span.is_finite()) {
            return Err(Error::Config(format!("grid half-span must be positive, got {half_span}")));
        }
        let half = (count / 2) as i64;
        let spacing = half_span / half as f64;
        let nu: Arc<[f64]> = (-half..=half).map(|k| k as f64 * spacing).collect();
        Ok(Self { nu, spacing })
    }

    /// Grid covering `zeros` first-zero widths `2π/(DL)` on each side.
    pub fn for_type2(d_l_fs: f64, zeros: f64, count: usize) -> Result<Self> {
        Self::new(zeros * 2.0 * PI / d_l_fs.abs(), count)
    }

    /// Grid covering `zeros` zeros of `sinc(ν²D''L/2)` on each side.
    pub fn for_type1(dpp_l_fs2: f64, zeros: f64, count: usize) -> Result<Self> {
        Self::new((zeros * 2.0 * PI / dpp_l_fs2.abs()).sqrt(), count)
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    pub fn half_span(&self) -> f64 {
        self.nu[self.nu.len() - 1]
    }

    /// Largest delay magnitude `π/dν` the grid resolves without aliasing.
    pub fn max_delay_fs(&self) -> f64 {
        PI / self.spacing
    }

    /// Trapezoidal weight of sample `k` (endpoint halving, times dν).
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.nu.len() {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }
}

/// Origin of an amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeKind {
    TypeI,
    TypeII,
    Custom,
}

/// Complex biphoton amplitude sampled on a detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    pub grid: DetuningGrid,
    pub values: Vec<Complex64>,
    /// Degenerate angular frequency Ω (rad/fs).
    pub center_omega: f64,
    pub kind: AmplitudeKind,
    /// Human-readable provenance, carried into exported metadata.
    pub description: String,
}

impl SpectralAmplitude {
    /// Wraps arbitrary samples; peak-normalizes them.
    pub fn custom(grid: DetuningGrid, values: Vec<Complex64>, center_omega: f64, description: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} amplitude samples for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Self {
            grid,
            values,
            center_omega,
            kind: AmplitudeKind::Custom,
            description: description.into(),
        }
        .normalized()
    }

    fn normalized(mut self) -> Result<Self> {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::Numerical(format!(
                "amplitude has no finite nonzero peak ({})",
                self.description
            )));
        }
        for v in &mut self.values {
            *v /= peak;
        }
        Ok(self)
    }

    pub fn degenerate_nm(&self) -> f64 {
        wavelength_nm(self.center_omega)
    }

    /// `|T(ν)|²` samples.
    pub fn power_spectrum(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Trapezoidal `∫|T|² dν`.
    pub fn power_integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.weight(k) * v.norm_sqr())
            .sum()
    }

    /// Multiplies by signal- and idler-arm amplitude transmissions evaluated
    /// at `Ω + ν` and `Ω − ν`, then renormalizes.
    pub fn apply_filters(&self, signal: &FilterSpec, idler: &FilterSpec) -> Result<Self> {
        signal.validate()?;
        idler.validate()?;
        let mut out = self.clone();
        for (v, &nu) in out.values.iter_mut().zip(self.grid.nu()) {
            let a_s = signal.amplitude_at_omega(self.center_omega + nu);
            let a_i = idler.amplitude_at_omega(self.center_omega - nu);
            *v *= a_s * a_i;
        }
        if out.values.iter().all(|v| v.norm() == 0.0) {
            return Err(Error::Config(format!(
                "filter passbands ({} nm / {} nm) lie entirely outside the detuning grid",
                signal.center_nm, idler.center_nm
            )));
        }
        out.description = format!(
            "{} | filters {} nm/{} nm FWHM {:?}",
            self.description, signal.fwhm_nm, idler.fwhm_nm, signal.shape
        );
        out.normalized()
    }

    /// Multiplies by `exp(−i β ν²)`; magnitudes are untouched.
    pub fn apply_quadratic_phase(&self, beta_fs2: f64) -> Self {
        let mut out = self.clone();
        if beta_fs2 != 0.0 {
            for (v, &nu) in out.values.iter_mut().zip(self.grid.nu()) {
                *v *= Complex64::from_polar(1.0, -beta_fs2 * nu * nu);
            }
            out.description = format!("{} | quadratic phase {beta_fs2} fs²", self.description);
        }
        out
    }

    /// Multiplies the magnitude by a real weight per sample, renormalizing.
    pub fn apply_weight(&self, weight: &[f64]) -> Result<Self> {
        if weight.len() != self.values.len() {
            return Err(Error::Config("weight length does not match the grid".into()));
        }
        let mut out = self.clone();
        for (v, &w) in out.values.iter_mut().zip(weight) {
            *v *= w;
        }
        out.normalized()
    }
}

fn check_zeros(grid: &DetuningGrid, first_zero: f64, zero_n: impl Fn(f64) -> f64) -> Result<()> {
    let needed = zero_n(MIN_ZEROS);
    if grid.half_span() < needed * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "detuning grid half-span {:.4e} rad/fs holds fewer than {MIN_ZEROS} sinc zeros \
             (first zero at {first_zero:.4e}, need {needed:.4e})",
            grid.half_span()
        )));
    }
    Ok(())
}

/// Type-II amplitude `sinc(νDL/2) e^{−iνDL/2}`.
pub fn build_type2(d_fs_per_um: f64, length_um: f64, grid: &DetuningGrid, degenerate_nm: f64) -> Result<SpectralAmplitude> {
    if d_fs_per_um == 0.0 || !d_fs_per_um.is_finite() {
        return Err(Error::Config(format!("group-velocity mismatch D must be nonzero, got {d_fs_per_um}")));
    }
    if !(length_um > 0.0) {
        return Err(Error::Config(format!("crystal length must be positive, got {length_um}")));
    }
    let dl = d_fs_per_um * length_um;
    let first = 2.0 * PI / dl.abs();
    check_zeros(grid, first, |n| n * first)?;
    let values = grid
        .nu()
        .iter()
        .map(|&nu| {
            let x = nu * dl / 2.0;
            Complex64::from_polar(1.0, -x) * sinc(x)
        })
        .collect();
    SpectralAmplitude {
        grid: grid.clone(),
        values,
        center_omega: angular_frequency(degenerate_nm),
        kind: AmplitudeKind::TypeII,
        description: format!("type-II sinc, D·L = {dl:.3} fs"),
    }
    .normalized()
}

/// Type-I amplitude `sinc(ν²D''L/2) e^{−iν²D''L/2}`.
pub fn build_type1(dpp_fs2_per_um: f64, length_um: f64, grid: &DetuningGrid, degenerate_nm: f64) -> Result<SpectralAmplitude> {
    if dpp_fs2_per_um == 0.0 || !dpp_fs2_per_um.is_finite() {
        return Err(Error::Config(format!("group-velocity dispersion D'' must be nonzero, got {dpp_fs2_per_um}")));
    }
    if !(length_um > 0.0) {
        return Err(Error::Config(format!("crystal length must be positive, got {length_um}")));
    }
    let a = dpp_fs2_per_um * length_um;
    let first = (2.0 * PI / a.abs()).sqrt();
    check_zeros(grid, first, |n| (n * 2.0 * PI / a.abs()).sqrt())?;
    let values = grid
        .nu()
        .iter()
        .map(|&nu| {
            let x = nu * nu * a / 2.0;
            Complex64::from_polar(1.0, -x) * sinc(x)
        })
        .collect();
    SpectralAmplitude {
        grid: grid.clone(),
        values,
        center_omega: angular_frequency(degenerate_nm),
        kind: AmplitudeKind::TypeI,
        description: format!("type-I sinc, D''·L = {a:.3} fs²"),
    }
    .normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterShape {
    Gaussian,
    Rectangular,
}

/// Bandpass filter specified by its intensity-transmission FWHM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub shape: FilterShape,
}

impl FilterSpec {
    pub fn gaussian(center_nm: f64, fwhm_nm: f64) -> Self {
        Self { center_nm, fwhm_nm, shape: FilterShape::Gaussian }
    }

    pub fn rectangular(center_nm: f64, fwhm_nm: f64) -> Self {
        Self { center_nm, fwhm_nm, shape: FilterShape::Rectangular }
    }

    /// Transmission ≡ 1.
    pub fn open(center_nm: f64) -> Self {
        Self::gaussian(center_nm, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm_nm > 0.0) || !(self.center_nm > 0.0 && self.center_nm.is_finite()) {
            return Err(Error::Config(format!(
                "filter requires center_nm > 0 and fwhm_nm > 0, got {} / {}",
                self.center_nm, self.fwhm_nm
            )));
        }
        Ok(())
    }

    /// Intensity transmission at vacuum wavelength `lambda_nm`.
    pub fn intensity_transmission(&self, lambda_nm: f64) -> f64 {
        if !(lambda_nm > 0.0 && lambda_nm.is_finite()) {
            return 0.0;
        }
        if self.fwhm_nm.is_infinite() {
            return 1.0;
        }
        let d = lambda_nm - self.center_nm;
        match self.shape {
            FilterShape::Gaussian => (-4.0 * std::f64::consts::LN_2 * d * d / (self.fwhm_nm * self.fwhm_nm)).exp(),
            FilterShape::Rectangular => {
                if d.abs() <= self.fwhm_nm / 2.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Intensity transmission at angular frequency `omega`; zero for
    /// non-positive frequencies.
    pub fn intensity_at_omega(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            0.0
        } else {
            self.intensity_transmission(wavelength_nm(omega))
        }
    }

    /// Amplitude transmission (square root of the intensity curve).
    pub fn amplitude_at_omega(&self, omega: f64) -> f64 {
        self.intensity_at_omega(omega).sqrt()
    }
}

/// Rough filter-limited coherence time `λ²/(cΔλ)` in fs.
pub fn filter_coherence_time(center_nm: f64, fwhm_nm: f64) -> Result<f64> {
    if !(fwhm_nm > 0.0) {
        return Err(Error::Config(format!("filter FWHM must be positive, got {fwhm_nm}")));
    }
    Ok(center_nm * center_nm / (SPEED_OF_LIGHT_NM_PER_FS * fwhm_nm))
}

/// Convert a detuning width (rad/fs) around `center_nm` to a wavelength width.
pub fn detuning_width_to_nm(center_nm: f64, width_rad_per_fs: f64) -> f64 {
    center_nm * center_nm * width_rad_per_fs / (2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DL: f64 = 494.0;

    fn type2() -> SpectralAmplitude {
        let grid = DetuningGrid::for_type2(DL, 64.0, 4097).unwrap();
        build_type2(DL / 2000.0, 2000.0, &grid, 702.2).unwrap()
    }

    #[test]
    fn grid_is_symmetric_with_zero() {
        let g = DetuningGrid::new(1.0, 1025).unwrap();
        assert_eq!(g.nu()[512], 0.0);
        for k in 0..512 {
            assert_eq!(g.nu()[k], -g.nu()[1024 - k]);
        }
        assert!(DetuningGrid::new(1.0, 1024).is_err());
        assert!(DetuningGrid::new(1.0, 101).is_err());
    }

    #[test]
    fn type2_peak_and_first_zero() {
        let t = type2();
        let mid = t.grid.len() / 2;
        assert!((t.values[mid].norm() - 1.0).abs() < 1e-15);
        // first zero at 2π/(DL): 64 zeros over 2048 samples → every 32 samples
        assert!((t.grid.nu()[mid + 32] - 2.0 * PI / DL).abs() < 1e-15);
        assert!(t.values[mid + 32].norm() < 1e-12);
        assert!((2.0 * PI / DL - 0.012_719).abs() < 1e-6);
    }

    #[test]
    fn type2_rejects_narrow_grid() {
        let grid = DetuningGrid::for_type2(DL, 4.0, 1025).unwrap();
        match build_type2(DL / 2000.0, 2000.0, &grid, 702.2) {
            Err(Error::Config(msg)) => assert!(msg.contains("sinc zeros")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn type1_even_magnitude() {
        let a = 180.0;
        let grid = DetuningGrid::for_type1(a, 32.0, 2049).unwrap();
        let t = build_type1(a / 2000.0, 2000.0, &grid, 702.2).unwrap();
        let n = t.values.len();
        for k in 0..n {
            assert_eq!(t.values[k].norm(), t.values[n - 1 - k].norm());
        }
        assert!((t.values[n / 2].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn open_filter_is_identity() {
        let t = type2();
        let f = t.apply_filters(&FilterSpec::open(702.2), &FilterSpec::open(702.2)).unwrap();
        assert_eq!(f.values, t.values);
    }

    #[test]
    fn symmetric_filters_keep_even_magnitude() {
        let t = type2();
        let f = t
            .apply_filters(&FilterSpec::gaussian(702.2, 1.0), &FilterSpec::gaussian(702.2, 1.0))
            .unwrap();
        let n = f.values.len();
        for k in 0..n {
            let (a, b) = (f.values[k].norm(), f.values[n - 1 - k].norm());
            assert!((a - b).abs() < 1e-12);
        }
        let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
    }

    #[test]
    fn filter_outside_grid_errors() {
        let t = type2();
        let far = FilterSpec::rectangular(500.0, 1.0);
        assert!(matches!(t.apply_filters(&far, &far), Err(Error::Config(_))));
    }

    #[test]
    fn quadratic_phase_is_pure_phase() {
        let t = type2();
        let p = t.apply_quadratic_phase(1234.5);
        for (a, b) in t.values.iter().zip(&p.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert_eq!(t.apply_quadratic_phase(0.0).values, t.values);
    }

    #[test]
    fn coherence_time_values() {
        let t3 = filter_coherence_time(702.2, 3.0).unwrap();
        let exact = 702.2 * 702.2 / (299.792_458 * 3.0);
        assert!((t3 - exact).abs() < 1e-9);
        assert!((t3 - 548.25).abs() < 1.0);
        let t20 = filter_coherence_time(702.2, 20.0).unwrap();
        assert!((t20 - 82.24).abs() < 0.05);
        let t6 = filter_coherence_time(702.2, 6.0).unwrap();
        assert!((t6 * 2.0 - t3).abs() < 1e-12);
        assert!(filter_coherence_time(702.2, 0.0).is_err());
    }

    #[test]
    fn sinc_convention() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(1.0) - 1f64.sin()).abs() < 1e-15);
    }
}
