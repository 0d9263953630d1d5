//! Non-collinear type-I emission geometry and the pair-detectable window.
//!
//! The pump (extraordinary) travels along the z axis at `pump_angle_deg` to
//! the optic axis; signal and idler are ordinary rays at internal angles
//! `α_s`, `α_i` on opposite sides of the pump. The exit face is flat and
//! normal to the pump, so `sin θ_ext = n sin α`.
//!
//! A signal photon leaving at external angle θ with detuning ν is emitted
//! with weight `sinc²(Δk_z L/2)`, where the idler direction follows from
//! transverse momentum balance and
//! `Δk_z = K_p − k_s cos α_s − k_i cos α_i`. Angular integrals of this weight
//! over the apertures give the acceptances used by [`pair_window`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{fwhm_of, CorrelationTrace, TraceKind};
use crate::crystal::{solve_collinear_pm_angle, CrystalConfig, PhaseMatchingType, Polarization};
use crate::interferometry::{hom_closed, Sign};
use crate::roots::brent;
use crate::spectral::{sinc, DetuningGrid, FilterSpec, SpectralAmplitude};
use crate::{angular_frequency, wavelength_nm, Error, Result};

/// Residual tolerance of the momentum equations, µm⁻¹.
pub const MOMENTUM_TOLERANCE: f64 = 1e-8;
/// Half-width of the angular window used to normalize acceptances.
pub const REFERENCE_HALF_WIDTH_DEG: f64 = 1.5;
/// Detuning half-span and size of the pair-window grid.
pub const PAIR_WINDOW_HALF_SPAN: f64 = 0.6;
pub const PAIR_WINDOW_POINTS: usize = 2401;

/// `1/(1/λ_p − 1/λ_s)`.
pub fn conjugate_wavelength(lambda_s_nm: f64, lambda_p_nm: f64) -> Result<f64> {
    if !(lambda_s_nm > lambda_p_nm && lambda_p_nm > 0.0) {
        return Err(Error::Config(format!(
            "signal wavelength {lambda_s_nm} nm must exceed the pump wavelength {lambda_p_nm} nm"
        )));
    }
    Ok(1.0 / (1.0 / lambda_p_nm - 1.0 / lambda_s_nm))
}

/// Solution of the non-collinear momentum equations for one signal
/// wavelength. External angles are signed: signal positive, idler negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionAngles {
    pub signal_ext_deg: f64,
    pub idler_ext_deg: f64,
    pub signal_int_deg: f64,
    pub idler_int_deg: f64,
    pub idler_nm: f64,
    /// `K_p − k_s cos α_s − k_i cos α_i`, µm⁻¹.
    pub longitudinal_residual: f64,
    /// `k_s sin α_s − k_i sin α_i`, µm⁻¹.
    pub transverse_residual: f64,
}

/// Perfect-phase-matching emission angles for signal wavelength `lambda_s_nm`.
pub fn emission_angles(lambda_s_nm: f64, pump_nm: f64, cfg: &CrystalConfig, pump_angle_deg: f64) -> Result<EmissionAngles> {
    let lambda_i = conjugate_wavelength(lambda_s_nm, pump_nm)?;
    let kp = cfg.wavenumber(pump_nm, Polarization::Extraordinary, pump_angle_deg)?;
    let ks = cfg.wavenumber(lambda_s_nm, Polarization::Ordinary, 0.0)?;
    let ki = cfg.wavenumber(lambda_i, Polarization::Ordinary, 0.0)?;
    let idler_angle = |a: f64| (ks * a.sin() / ki).clamp(-1.0, 1.0).asin();
    let longitudinal = |a: f64| kp - ks * a.cos() - ki * idler_angle(a).cos();

    let upper = if ks > ki { (ki / ks).asin() } else { PI / 2.0 };
    let root = brent(longitudinal, 0.0, upper, 1e-15, 1e-13, 200).map_err(|e| match e {
        Error::NoPhaseMatching(msg) => Error::OutsideTuningRange(format!(
            "no non-collinear solution for {lambda_s_nm} nm at pump angle {pump_angle_deg}°: {msg}"
        )),
        other => other,
    })?;
    let a_s = root.x;
    let a_i = idler_angle(a_s);
    let n_s = cfg.index(lambda_s_nm, Polarization::Ordinary, 0.0)?;
    let n_i = cfg.index(lambda_i, Polarization::Ordinary, 0.0)?;
    let (sin_s, sin_i) = (n_s * a_s.sin(), n_i * a_i.sin());
    if sin_s > 1.0 || sin_i > 1.0 {
        return Err(Error::OutsideTuningRange(format!(
            "emission at {lambda_s_nm} nm is totally internally reflected at the exit face"
        )));
    }
    let out = EmissionAngles {
        signal_ext_deg: sin_s.asin().to_degrees(),
        idler_ext_deg: -sin_i.asin().to_degrees(),
        signal_int_deg: a_s.to_degrees(),
        idler_int_deg: -a_i.to_degrees(),
        idler_nm: lambda_i,
        longitudinal_residual: longitudinal(a_s),
        transverse_residual: ks * a_s.sin() - ki * a_i.sin(),
    };
    if out.longitudinal_residual.abs() >= MOMENTUM_TOLERANCE || out.transverse_residual.abs() >= MOMENTUM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "momentum residuals {:e}, {:e} µm⁻¹ above tolerance",
            out.longitudinal_residual, out.transverse_residual
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Signal,
    Idler,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Signal => "signal",
            Branch::Idler => "idler",
        }
    }
}

/// External emission angle versus wavelength for one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCurve {
    pub lambda: Vec<f64>,
    pub theta_ext: Vec<f64>,
    pub branch: Branch,
}

/// Crystal, pump and calibrated pump-to-axis angle of a non-collinear source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoncollinearSetup {
    pub crystal: CrystalConfig,
    pub pump_nm: f64,
    pub pump_angle_deg: f64,
    /// Target degenerate external angle used for calibration, if any.
    pub calibrated_for_deg: Option<f64>,
}

impl NoncollinearSetup {
    pub fn new(crystal: CrystalConfig, pump_nm: f64, pump_angle_deg: f64) -> Self {
        Self { crystal, pump_nm, pump_angle_deg, calibrated_for_deg: None }
    }

    /// Chooses the pump-to-axis angle so the degenerate pair leaves at
    /// `±degenerate_ext_deg`.
    pub fn calibrate(crystal: CrystalConfig, pump_nm: f64, degenerate_ext_deg: f64) -> Result<Self> {
        if !(degenerate_ext_deg > 0.0 && degenerate_ext_deg < 90.0) {
            return Err(Error::Config(format!(
                "degenerate emission angle must lie in (0, 90) degrees, got {degenerate_ext_deg}"
            )));
        }
        let degenerate = 2.0 * pump_nm;
        let collinear = solve_collinear_pm_angle(pump_nm, degenerate, PhaseMatchingType::TypeI, &crystal)?;
        let angle_at = |tp: f64| -> f64 {
            match emission_angles(degenerate, pump_nm, &crystal, tp) {
                Ok(a) => a.signal_ext_deg - degenerate_ext_deg,
                Err(_) => f64::NAN,
            }
        };
        let mut hi = collinear;
        let mut step = 0.25;
        loop {
            hi = (hi + step).min(90.0);
            let v = angle_at(hi);
            if v.is_nan() || v > 0.0 || hi >= 90.0 {
                break;
            }
            step *= 1.5;
        }
        if angle_at(hi).is_nan() {
            // refine the upper bracket back into the solvable region
            let mut lo_ok = collinear;
            for _ in 0..60 {
                let mid = 0.5 * (lo_ok + hi);
                if angle_at(mid).is_nan() {
                    hi = mid;
                } else {
                    lo_ok = mid;
                }
            }
            hi = lo_ok;
        }
        let root = brent(|t| angle_at(t), collinear + 1e-9, hi, 1e-13, 1e-12, 200).map_err(|e| {
            Error::OutsideTuningRange(format!("cannot reach {degenerate_ext_deg}° degenerate emission: {e}"))
        })?;
        Ok(Self {
            crystal,
            pump_nm,
            pump_angle_deg: root.x,
            calibrated_for_deg: Some(degenerate_ext_deg),
        })
    }

    pub fn degenerate_nm(&self) -> f64 {
        2.0 * self.pump_nm
    }

    pub fn emission(&self, lambda_s_nm: f64) -> Result<EmissionAngles> {
        emission_angles(lambda_s_nm, self.pump_nm, &self.crystal, self.pump_angle_deg)
    }

    /// Tuning curve of one branch; idler-branch wavelengths are the idler's.
    pub fn tuning_curve(&self, lambdas_nm: &[f64], branch: Branch) -> Result<TuningCurve> {
        let theta_ext = lambdas_nm
            .par_iter()
            .map(|&l| match branch {
                Branch::Signal => self.emission(l).map(|a| a.signal_ext_deg),
                Branch::Idler => {
                    let signal = conjugate_wavelength(l, self.pump_nm)?;
                    self.emission(signal).map(|a| a.idler_ext_deg)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TuningCurve { lambda: lambdas_nm.to_vec(), theta_ext, branch })
    }

    /// Emission weight `sinc²(Δk_z L/2)` for a signal at external angle
    /// `theta_ext_deg` and idler fixed by transverse balance, given the
    /// per-detuning wavenumbers.
    fn weight(&self, kp: f64, mode: &DetuningMode, theta_ext_deg: f64) -> f64 {
        let s = theta_ext_deg.to_radians().sin() / mode.n_s;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let a_s = s.asin();
        let q = mode.k_s * a_s.sin();
        let si = q / mode.k_i;
        if si.abs() >= 1.0 {
            return 0.0;
        }
        let dz = kp - mode.k_s * a_s.cos() - mode.k_i * si.asin().cos();
        let x = sinc(dz * self.crystal.length_um / 2.0);
        x * x
    }
}

struct DetuningMode {
    lambda_s: f64,
    lambda_i: f64,
    n_s: f64,
    k_s: f64,
    k_i: f64,
}

/// Circular aperture at a signed center angle from the pump axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureGeometry {
    pub center_angle_deg: f64,
    pub distance_mm: f64,
    pub diameter_mm: f64,
}

impl ApertureGeometry {
    pub fn new(center_angle_deg: f64, distance_mm: f64, diameter_mm: f64) -> Result<Self> {
        let ap = Self { center_angle_deg, distance_mm, diameter_mm };
        ap.validate()?;
        Ok(ap)
    }

    /// 3 mm aperture 2800 mm from the crystal (coincidence arms).
    pub fn coincidence_arm(center_angle_deg: f64) -> Self {
        Self { center_angle_deg, distance_mm: 2800.0, diameter_mm: 3.0 }
    }

    /// 3 mm aperture 2000 mm from the crystal (Michelson arm).
    pub fn michelson_arm(center_angle_deg: f64) -> Self {
        Self { center_angle_deg, distance_mm: 2000.0, diameter_mm: 3.0 }
    }

    /// Accepts every direction.
    pub fn unlimited(center_angle_deg: f64) -> Self {
        Self { center_angle_deg, distance_mm: 1.0, diameter_mm: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_mm > 0.0) || !(self.diameter_mm > 0.0) {
            return Err(Error::Config(format!(
                "aperture distance_mm and diameter_mm must be positive, got {} / {}",
                self.distance_mm, self.diameter_mm
            )));
        }
        if !self.center_angle_deg.is_finite() {
            return Err(Error::Config("aperture center_angle_deg must be finite".into()));
        }
        Ok(())
    }

    pub fn half_acceptance_deg(&self) -> f64 {
        (self.diameter_mm / 2.0 / self.distance_mm).atan().to_degrees()
    }

    pub fn contains(&self, theta_ext_deg: f64) -> bool {
        (theta_ext_deg - self.center_angle_deg).abs() <= self.half_acceptance_deg()
    }

    fn bounds(&self) -> (f64, f64) {
        let h = self.half_acceptance_deg();
        (self.center_angle_deg - h, self.center_angle_deg + h)
    }
}

/// Pair-detectable spectral window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWindow {
    pub nu: Vec<f64>,
    /// `w(ν) = J(ν) T_s(ν) T_i(−ν)`, `J` the fraction of emission whose
    /// signal and idler both land in their apertures.
    pub weight: Vec<f64>,
    /// Aperture-restricted singles density `∫_ap sinc² dθ` times `T_s`.
    pub singles: Vec<f64>,
    /// Normalizing angular integral of the emission weight.
    pub reference: Vec<f64>,
    pub effective_pair_fwhm_nm: f64,
    pub singles_fwhm_nm: f64,
    pub pair_fraction: f64,
    pub degenerate_nm: f64,
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    // keep ≥ 500 samples per degree
    let mut n = ((b - a) * 500.0).ceil() as usize;
    n = n.max(128);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Evaluates the pair window on a uniform detuning grid.
pub fn pair_window(
    setup: &NoncollinearSetup,
    ap_s: &ApertureGeometry,
    ap_i: &ApertureGeometry,
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
    grid: &DetuningGrid,
) -> Result<PairWindow> {
    ap_s.validate()?;
    ap_i.validate()?;
    filter_s.validate()?;
    filter_i.validate()?;
    let cfg = &setup.crystal;
    let kp = cfg.wavenumber(setup.pump_nm, Polarization::Extraordinary, setup.pump_angle_deg)?;
    let omega = angular_frequency(setup.degenerate_nm());
    let ref_lo = ap_s.center_angle_deg - REFERENCE_HALF_WIDTH_DEG;
    let ref_hi = ap_s.center_angle_deg + REFERENCE_HALF_WIDTH_DEG;
    let (s_lo, s_hi) = ap_s.bounds();
    let (s_lo, s_hi) = (s_lo.max(ref_lo), s_hi.min(ref_hi));
    let (i_lo, i_hi) = ap_i.bounds();

    let modes = grid
        .nu()
        .iter()
        .map(|&nu| {
            let lambda_s = wavelength_nm(omega + nu);
            let lambda_i = wavelength_nm(omega - nu);
            Ok(DetuningMode {
                lambda_s,
                lambda_i,
                n_s: cfg.index(lambda_s, Polarization::Ordinary, 0.0)?,
                k_s: cfg.wavenumber(lambda_s, Polarization::Ordinary, 0.0)?,
                k_i: cfg.wavenumber(lambda_i, Polarization::Ordinary, 0.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<(f64, f64, f64)> = grid
        .nu()
        .par_iter()
        .zip(modes.par_iter())
        .map(|(&nu, m)| {
            let w = |t: f64| setup.weight(kp, m, t);
            let reference = simpson(w, ref_lo, ref_hi);
            let singles = simpson(w, s_lo, s_hi);
            // signal angles whose idler (sin θ_i = −(λ_i/λ_s) sin θ_s) is
            // inside the idler aperture
            let r = m.lambda_s / m.lambda_i;
            let to_signal = |ti: f64| (-r * ti.to_radians().sin()).clamp(-1.0, 1.0).asin().to_degrees();
            let (a, b) = (to_signal(i_hi.min(90.0)), to_signal(i_lo.max(-90.0)));
            let (j_lo, j_hi) = (a.min(b).max(s_lo), a.max(b).min(s_hi));
            let joint = simpson(w, j_lo, j_hi);
            let t_s = filter_s.intensity_at_omega(omega + nu);
            let t_i = filter_i.intensity_at_omega(omega - nu);
            let acceptance = if reference > 0.0 { (joint / reference).min(1.0) } else { 0.0 };
            (acceptance * t_s * t_i, singles * t_s, reference)
        })
        .collect();

    let weight: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let singles: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let reference: Vec<f64> = rows.iter().map(|r| r.2).collect();
    if weight.iter().all(|&w| w == 0.0) {
        return Err(Error::Config(format!(
            "misaligned apertures: no detectable pairs (signal at {}°, idler at {}°)",
            ap_s.center_angle_deg, ap_i.center_angle_deg
        )));
    }
    let pair_density: Vec<f64> = weight.iter().zip(&reference).map(|(w, r)| w * r).collect();
    let integrate = |y: &[f64]| -> f64 { y.iter().enumerate().map(|(k, v)| grid.weight(k) * v).sum() };
    let singles_total = integrate(&singles);
    let pair_fraction = if singles_total > 0.0 {
        (integrate(&pair_density) / singles_total).min(1.0)
    } else {
        0.0
    };
    let width_nm = |y: &[f64]| -> Result<f64> {
        let w = fwhm_of(grid.nu(), y)?;
        Ok((wavelength_nm(omega + w.left_fs) - wavelength_nm(omega + w.right_fs)).abs())
    };
    Ok(PairWindow {
        nu: grid.nu().to_vec(),
        effective_pair_fwhm_nm: width_nm(&pair_density)?,
        singles_fwhm_nm: width_nm(&singles)?,
        weight,
        singles,
        reference,
        pair_fraction,
        degenerate_nm: setup.degenerate_nm(),
    })
}

/// Default grid for [`pair_window`].
pub fn default_pair_grid() -> DetuningGrid {
    DetuningGrid::new(PAIR_WINDOW_HALF_SPAN, PAIR_WINDOW_POINTS).expect("valid default grid")
}

impl PairWindow {
    /// Linear interpolation of `w` at detuning `nu` (zero outside the grid).
    pub fn weight_at(&self, nu: f64) -> f64 {
        let n = self.nu.len();
        if nu < self.nu[0] || nu > self.nu[n - 1] {
            return 0.0;
        }
        let j = self.nu.partition_point(|&x| x < nu).clamp(1, n - 1);
        let (x0, x1) = (self.nu[j - 1], self.nu[j]);
        let f = (nu - x0) / (x1 - x0);
        self.weight[j - 1] * (1.0 - f) + self.weight[j] * f
    }
}

/// Two-photon envelope `Re g¹(2τ)` of `T` weighted by `√w`. `T` should be
/// the unfiltered amplitude: `w` already carries the filter transmissions.
pub fn predict_two_photon_envelope(pw: &PairWindow, t: &SpectralAmplitude, tau: &[f64]) -> Result<CorrelationTrace> {
    let sqrt_w: Vec<f64> = t.grid.nu().iter().map(|&nu| pw.weight_at(nu).sqrt()).collect();
    let weighted = t.apply_weight(&sqrt_w)?;
    let dip = hom_closed(&weighted, tau, Sign::Minus)?;
    Ok(CorrelationTrace {
        tau: tau.to_vec(),
        values: dip.rate.iter().map(|r| 1.0 - 2.0 * r).collect(),
        kind: TraceKind::TwoPhotonEnvelope,
        source: format!("{} | pair window (pair fraction {:.3})", weighted.description, pw.pair_fraction),
        normalization: weighted.power_integral(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> NoncollinearSetup {
        NoncollinearSetup::calibrate(CrystalConfig::bbo(2000.0, 0.0).unwrap(), 351.1, 3.0).unwrap()
    }

    #[test]
    fn conjugate_values() {
        assert!((conjugate_wavelength(702.2, 351.1).unwrap() - 702.2).abs() < 1e-9);
        let li = conjugate_wavelength(662.0, 351.1).unwrap();
        assert!((li - 351.1 * 662.0 / 310.9).abs() < 1e-9);
        assert!((li - 747.7).abs() < 0.5);
        assert!(conjugate_wavelength(351.1, 351.1).is_err());
    }

    #[test]
    fn calibration_hits_target() {
        let s = setup();
        let a = s.emission(702.2).unwrap();
        assert!((a.signal_ext_deg - 3.0).abs() < 1e-8);
        assert!((a.idler_ext_deg + 3.0).abs() < 0.01);
        assert_eq!(s.calibrated_for_deg, Some(3.0));
    }

    #[test]
    fn collinear_pump_angle_has_no_cone() {
        let c = CrystalConfig::bbo(2000.0, 0.0).unwrap();
        // below the collinear angle K_p exceeds k_s + k_i
        let err = emission_angles(702.2, 351.1, &c, 30.0).unwrap_err();
        assert!(matches!(err, Error::OutsideTuningRange(_)), "{err}");
    }

    #[test]
    fn aperture_acceptance() {
        let ap = ApertureGeometry::coincidence_arm(3.0);
        assert!((ap.half_acceptance_deg() - (1.5f64 / 2800.0).atan().to_degrees()).abs() < 1e-15);
        assert!(ap.contains(3.02));
        assert!(!ap.contains(3.04));
        assert!(ApertureGeometry::new(3.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn misaligned_window_errors() {
        let s = setup();
        let grid = DetuningGrid::new(0.05, 1025).unwrap();
        let open = FilterSpec::open(702.2);
        let err = pair_window(
            &s,
            &ApertureGeometry::coincidence_arm(3.0),
            &ApertureGeometry::coincidence_arm(-5.0),
            &open,
            &open,
            &grid,
        )
        .unwrap_err();
        assert!(err.to_string().contains("misaligned"));
    }
}
