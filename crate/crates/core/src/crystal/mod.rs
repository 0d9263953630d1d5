//! Uniaxial crystal optics: indices, group parameters and collinear phase
//! matching.
//!
//! The wavenumber inside the crystal is `K(ω) = ω n(λ(ω)) / c`. Its
//! derivatives follow analytically from the dispersion formula:
//!
//! ```text
//! dK/dω   = (n − λ dn/dλ) / c          (group index / c)
//! d²K/dω² = λ³ d²n/dλ² / (2π c²)
//! ```
//!
//! The extraordinary index at propagation angle θ to the optic axis obeys
//! `1/n² = cos²θ/n_o² + sin²θ/n_e²`; group parameters of the e-ray are taken
//! at fixed θ (no dθ/dω term), and walk-off is ignored.

mod sellmeier;

pub use sellmeier::{FormulaVariant, SellmeierSet};

use serde::{Deserialize, Serialize};

use crate::roots::brent;
use crate::{angular_frequency, Error, Result, SPEED_OF_LIGHT_UM_PER_FS};

/// Polarization eigenmode of a uniaxial crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

impl Polarization {
    pub fn other(self) -> Self {
        match self {
            Polarization::Ordinary => Polarization::Extraordinary,
            Polarization::Extraordinary => Polarization::Ordinary,
        }
    }
}

/// Type of birefringent phase matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseMatchingType {
    /// e-pump → o-signal + o-idler
    #[serde(rename = "I")]
    TypeI,
    /// e-pump → e-signal + o-idler
    #[serde(rename = "II")]
    TypeII,
}

/// Nonlinear crystal description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalConfig {
    pub length_um: f64,
    /// Angle between optic axis and surface normal.
    pub cut_angle_deg: f64,
    pub sellmeier_o: SellmeierSet,
    pub sellmeier_e: SellmeierSet,
}

impl CrystalConfig {
    pub fn new(
        length_um: f64,
        cut_angle_deg: f64,
        sellmeier_o: SellmeierSet,
        sellmeier_e: SellmeierSet,
    ) -> Result<Self> {
        let cfg = Self { length_um, cut_angle_deg, sellmeier_o, sellmeier_e };
        cfg.validate()?;
        Ok(cfg)
    }

    /// BBO with the shipped Sellmeier data.
    pub fn bbo(length_um: f64, cut_angle_deg: f64) -> Result<Self> {
        Self::new(
            length_um,
            cut_angle_deg,
            SellmeierSet::bbo_ordinary(),
            SellmeierSet::bbo_extraordinary(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_um > 0.0 && self.length_um.is_finite()) {
            return Err(Error::Config(format!(
                "crystal.length_um must be positive, got {}",
                self.length_um
            )));
        }
        if !(0.0..=90.0).contains(&self.cut_angle_deg) {
            return Err(Error::Config(format!(
                "crystal.cut_angle_deg must lie in [0, 90], got {}",
                self.cut_angle_deg
            )));
        }
        Ok(())
    }

    /// Refractive index for a polarization travelling at `theta_deg` to the
    /// optic axis (the angle is ignored for the o-ray).
    pub fn index(&self, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
        Ok(self.index_derivatives(lambda_nm, pol, theta_deg)?[0])
    }

    /// `[n, dn/dλ, d²n/dλ²]` with λ in µm.
    fn index_derivatives(&self, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<[f64; 3]> {
        match pol {
            Polarization::Ordinary => principal_derivatives(&self.sellmeier_o, lambda_nm),
            Polarization::Extraordinary => {
                check_angle(theta_deg)?;
                self.sellmeier_o.check_range(lambda_nm)?;
                self.sellmeier_e.check_range(lambda_nm)?;
                let l = lambda_nm * 1e-3;
                let [fo, fo1, fo2] = self.sellmeier_o.n_squared_derivatives(l);
                let [fe, fe1, fe2] = self.sellmeier_e.n_squared_derivatives(l);
                let t = theta_deg.to_radians();
                let (c2, s2) = (t.cos().powi(2), t.sin().powi(2));
                // g = 1/n²
                let g = c2 / fo + s2 / fe;
                let g1 = -c2 * fo1 / (fo * fo) - s2 * fe1 / (fe * fe);
                let g2 = c2 * (-fo2 / (fo * fo) + 2.0 * fo1 * fo1 / (fo * fo * fo))
                    + s2 * (-fe2 / (fe * fe) + 2.0 * fe1 * fe1 / (fe * fe * fe));
                let n = g.powf(-0.5);
                let n1 = -0.5 * g.powf(-1.5) * g1;
                let n2 = 0.75 * g.powf(-2.5) * g1 * g1 - 0.5 * g.powf(-1.5) * g2;
                Ok([n, n1, n2])
            }
        }
    }

    /// Wavenumber `K = 2π n / λ` in µm⁻¹.
    pub fn wavenumber(&self, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
        let n = self.index(lambda_nm, pol, theta_deg)?;
        Ok(2.0 * std::f64::consts::PI * n / (lambda_nm * 1e-3))
    }

    /// Group index `n − λ dn/dλ`.
    pub fn group_index(&self, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
        let [n, n1, _] = self.index_derivatives(lambda_nm, pol, theta_deg)?;
        Ok(n - lambda_nm * 1e-3 * n1)
    }

    /// Inverse group velocity `dK/dω` in fs/µm.
    pub fn group_delay_per_length(&self, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
        Ok(self.group_index(lambda_nm, pol, theta_deg)? / SPEED_OF_LIGHT_UM_PER_FS)
    }
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if (0.0..=90.0).contains(&theta_deg) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "propagation angle must lie in [0, 90] degrees, got {theta_deg}"
        )))
    }
}

fn principal_derivatives(set: &SellmeierSet, lambda_nm: f64) -> Result<[f64; 3]> {
    set.check_range(lambda_nm)?;
    let [f, f1, f2] = set.n_squared_derivatives(lambda_nm * 1e-3);
    if f <= 1.0 || !f.is_finite() {
        return Err(Error::Numerical(format!("{}: n² = {f} at {lambda_nm} nm", set.name)));
    }
    let n = f.sqrt();
    let n1 = f1 / (2.0 * n);
    let n2 = f2 / (2.0 * n) - f1 * f1 / (4.0 * n * n * n);
    Ok([n, n1, n2])
}

/// Ordinary index `n_o(λ)`.
pub fn index_ordinary(lambda_nm: f64, s: &SellmeierSet) -> Result<f64> {
    s.index(lambda_nm)
}

/// Extraordinary index at angle `theta_deg` to the optic axis.
pub fn index_extraordinary(lambda_nm: f64, theta_deg: f64, s_o: &SellmeierSet, s_e: &SellmeierSet) -> Result<f64> {
    check_angle(theta_deg)?;
    let no = s_o.index(lambda_nm)?;
    let ne = s_e.index(lambda_nm)?;
    let t = theta_deg.to_radians();
    Ok(1.0 / (t.cos().powi(2) / (no * no) + t.sin().powi(2) / (ne * ne)).sqrt())
}

/// Group-velocity mismatch and dispersion evaluated at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    /// `D`, fs/µm.
    pub d_fs_per_um: f64,
    /// `D''`, fs²/µm.
    pub dpp_fs2_per_um: f64,
    pub wavelength_nm: f64,
    pub angle_deg: f64,
}

/// Which polarization plays signal and idler in `D = dK_i/dΩ_i − dK_s/dΩ_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIIRoles {
    pub signal: Polarization,
    pub idler: Polarization,
}

impl Default for TypeIIRoles {
    fn default() -> Self {
        Self { signal: Polarization::Extraordinary, idler: Polarization::Ordinary }
    }
}

impl TypeIIRoles {
    pub fn swapped(self) -> Self {
        Self { signal: self.idler, idler: self.signal }
    }
}

/// Type-II group-velocity mismatch `D = dK_i/dΩ − dK_s/dΩ` (fs/µm) at the
/// degenerate wavelength, e-ray evaluated at `theta_pm_deg`.
pub fn group_delay_mismatch(cfg: &CrystalConfig, lambda_degenerate_nm: f64, theta_pm_deg: f64, roles: TypeIIRoles) -> Result<f64> {
    let ki = cfg.group_delay_per_length(lambda_degenerate_nm, roles.idler, theta_pm_deg)?;
    let ks = cfg.group_delay_per_length(lambda_degenerate_nm, roles.signal, theta_pm_deg)?;
    let d = ki - ks;
    if !d.is_finite() {
        return Err(Error::Numerical(format!("group-velocity mismatch is {d}")));
    }
    Ok(d)
}

/// Group-velocity dispersion `D'' = d²K/dΩ²` (fs²/µm), analytic.
pub fn gvd(cfg: &CrystalConfig, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
    let [_, _, n2] = cfg.index_derivatives(lambda_nm, pol, theta_deg)?;
    let l = lambda_nm * 1e-3;
    let c = SPEED_OF_LIGHT_UM_PER_FS;
    Ok(l * l * l * n2 / (2.0 * std::f64::consts::PI * c * c))
}

/// `D''` by second-order central differences of `K(ω)`, validated against a
/// halved step. Returns the Richardson-extrapolated value.
pub fn gvd_richardson(cfg: &CrystalConfig, lambda_nm: f64, pol: Polarization, theta_deg: f64) -> Result<f64> {
    let omega = angular_frequency(lambda_nm);
    let k = |w: f64| -> Result<f64> {
        let lam = crate::wavelength_nm(w);
        Ok(w * cfg.index(lam, pol, theta_deg)? / SPEED_OF_LIGHT_UM_PER_FS)
    };
    let second = |h: f64| -> Result<f64> {
        Ok((k(omega + h)? - 2.0 * k(omega)? + k(omega - h)?) / (h * h))
    };
    let h = omega * 2e-3;
    let coarse = second(h)?;
    let fine = second(h / 2.0)?;
    if !(coarse.is_finite() && fine.is_finite()) || (coarse - fine).abs() > 1e-3 * fine.abs() {
        return Err(Error::UnstableDerivative { coarse, fine });
    }
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Both group parameters at one operating point.
pub fn group_params(cfg: &CrystalConfig, lambda_degenerate_nm: f64, theta_pm_deg: f64) -> Result<GroupParams> {
    Ok(GroupParams {
        d_fs_per_um: group_delay_mismatch(cfg, lambda_degenerate_nm, theta_pm_deg, TypeIIRoles::default())?,
        dpp_fs2_per_um: gvd(cfg, lambda_degenerate_nm, Polarization::Ordinary, theta_pm_deg)?,
        wavelength_nm: lambda_degenerate_nm,
        angle_deg: theta_pm_deg,
    })
}

/// Collinear phase mismatch `Δk = k_p − k_s − k_i` (µm⁻¹) at pump angle θ.
pub fn phase_mismatch(
    cfg: &CrystalConfig,
    pump_nm: f64,
    degenerate_nm: f64,
    pm_type: PhaseMatchingType,
    theta_deg: f64,
) -> Result<f64> {
    use Polarization::*;
    let kp = cfg.wavenumber(pump_nm, Extraordinary, theta_deg)?;
    let (ks, ki) = match pm_type {
        PhaseMatchingType::TypeI => {
            let k = cfg.wavenumber(degenerate_nm, Ordinary, theta_deg)?;
            (k, k)
        }
        PhaseMatchingType::TypeII => (
            cfg.wavenumber(degenerate_nm, Extraordinary, theta_deg)?,
            cfg.wavenumber(degenerate_nm, Ordinary, theta_deg)?,
        ),
    };
    Ok(kp - ks - ki)
}

/// Residual tolerance of the phase-matching solvers, µm⁻¹.
pub const PHASE_MATCHING_TOLERANCE: f64 = 1e-8;

/// Collinear degenerate phase-matching angle (degrees) by bracketed root
/// finding on θ ∈ (0°, 90°).
pub fn solve_collinear_pm_angle(
    pump_nm: f64,
    degenerate_nm: f64,
    pm_type: PhaseMatchingType,
    cfg: &CrystalConfig,
) -> Result<f64> {
    if (degenerate_nm - 2.0 * pump_nm).abs() > 1e-9 * degenerate_nm {
        return Err(Error::Config(format!(
            "degenerate wavelength {degenerate_nm} nm is not twice the pump wavelength {pump_nm} nm"
        )));
    }
    // validate wavelengths up front so range errors are not reported as
    // missing solutions
    cfg.index(pump_nm, Polarization::Extraordinary, 0.0)?;
    cfg.index(degenerate_nm, Polarization::Extraordinary, 0.0)?;

    let f = |t: f64| phase_mismatch(cfg, pump_nm, degenerate_nm, pm_type, t).unwrap_or(f64::NAN);
    let root = brent(f, 1e-9, 90.0, 1e-13, 0.0, 200).map_err(|e| match e {
        Error::NoPhaseMatching(msg) => Error::NoPhaseMatching(format!(
            "{pm_type:?} with {pump_nm} nm pump: {msg}"
        )),
        other => other,
    })?;
    let residual = phase_mismatch(cfg, pump_nm, degenerate_nm, pm_type, root.x)?;
    if residual.abs() >= PHASE_MATCHING_TOLERANCE {
        return Err(Error::Numerical(format!(
            "phase-matching residual {residual:e} µm⁻¹ above tolerance"
        )));
    }
    Ok(root.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbo() -> CrystalConfig {
        CrystalConfig::bbo(2000.0, 0.0).unwrap()
    }

    #[test]
    fn ordinary_out_of_range() {
        let err = index_ordinary(50.0, &SellmeierSet::bbo_ordinary()).unwrap_err();
        assert!(matches!(err, Error::WavelengthOutOfRange { .. }));
        assert!(err.to_string().contains("210"));
    }

    #[test]
    fn extraordinary_limits() {
        let (o, e) = (SellmeierSet::bbo_ordinary(), SellmeierSet::bbo_extraordinary());
        let no = index_ordinary(702.2, &o).unwrap();
        let ne = e.index(702.2).unwrap();
        assert_eq!(index_extraordinary(702.2, 0.0, &o, &e).unwrap(), no);
        assert!((index_extraordinary(702.2, 90.0, &o, &e).unwrap() - ne).abs() < 1e-15);
        let n45 = index_extraordinary(702.2, 45.0, &o, &e).unwrap();
        assert!(n45 > ne && n45 < no);
    }

    #[test]
    fn crystal_index_matches_free_functions() {
        let c = bbo();
        let (o, e) = (SellmeierSet::bbo_ordinary(), SellmeierSet::bbo_extraordinary());
        for theta in [0.0, 17.0, 33.5, 49.2, 90.0] {
            let a = c.index(702.2, Polarization::Extraordinary, theta).unwrap();
            let b = index_extraordinary(702.2, theta, &o, &e).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_crystal() {
        assert!(CrystalConfig::bbo(0.0, 0.0).is_err());
        assert!(CrystalConfig::bbo(2000.0, 91.0).is_err());
    }

    #[test]
    fn swapping_roles_flips_sign() {
        let c = bbo();
        let d = group_delay_mismatch(&c, 702.2, 49.2, TypeIIRoles::default()).unwrap();
        let ds = group_delay_mismatch(&c, 702.2, 49.2, TypeIIRoles::default().swapped()).unwrap();
        assert!(d > 0.0);
        assert_eq!(d, -ds);
    }

    #[test]
    fn pm_angle_no_solution() {
        // isotropic "crystal": no birefringence to compensate dispersion
        let o = SellmeierSet::bbo_ordinary();
        let c = CrystalConfig::new(2000.0, 0.0, o.clone(), o).unwrap();
        let err = solve_collinear_pm_angle(351.1, 702.2, PhaseMatchingType::TypeI, &c).unwrap_err();
        assert!(matches!(err, Error::NoPhaseMatching(_)), "{err}");
    }

    #[test]
    fn pm_angle_requires_degenerate() {
        assert!(solve_collinear_pm_angle(351.1, 700.0, PhaseMatchingType::TypeI, &bbo()).is_err());
    }

    #[test]
    fn richardson_agrees_with_analytic() {
        let c = bbo();
        let a = gvd(&c, 702.2, Polarization::Ordinary, 0.0).unwrap();
        let r = gvd_richardson(&c, 702.2, Polarization::Ordinary, 0.0).unwrap();
        assert!(((a - r) / a).abs() < 1e-6, "{a} vs {r}");
    }
}
