//! Non-collinear type-I tuning curve and the 662 nm / 748 nm pair.

use biphoton::cli::RunConfig;
use biphoton::tuning::{conjugate_wavelength, Branch};

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let setup = cfg.noncollinear(&cfg.crystal()?)?;
    println!("pump at {:.4}° to the optic axis", setup.pump_angle_deg);
    let lambdas: Vec<f64> = (0..=12).map(|k| 650.0 + 10.0 * k as f64).collect();
    let curve = setup.tuning_curve(&lambdas, Branch::Signal)?;
    for (l, th) in curve.lambda.iter().zip(&curve.theta_ext) {
        println!("{l:>6.1} nm  {th:>7.4}°");
    }
    let e = setup.emission(662.0)?;
    let ap = cfg.apertures.idler;
    println!(
        "662 nm signal: idler {:.2} nm at {:.3}° (aperture {:.3}° ± {:.4}°)",
        conjugate_wavelength(662.0, cfg.pump_nm)?,
        e.idler_ext_deg,
        ap.center_angle_deg,
        ap.half_acceptance_deg()
    );
    Ok(())
}
