//! Coincidence dip and peak for type-I and type-II pairs.

use biphoton::cli::RunConfig;
use biphoton::correlation::{delay_range, fwhm_of};
use biphoton::crystal::PhaseMatchingType;
use biphoton::interferometry::{hom_closed, visibility, Sign};

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let crystal = cfg.crystal()?;
    for (ty, reach) in [(PhaseMatchingType::TypeI, 40.0), (PhaseMatchingType::TypeII, 400.0)] {
        let t = cfg.unfiltered(&crystal, ty)?.amplitude;
        let tau = delay_range(-reach, reach, reach / 2000.0);
        let dip = hom_closed(&t, &tau, Sign::Minus)?;
        let peak = hom_closed(&t, &tau, Sign::Plus)?;
        let env: Vec<f64> = dip.rate.iter().map(|r| 1.0 - 2.0 * r).collect();
        println!(
            "{ty:?}: dip FWHM {:.2} fs, visibility {:.4}",
            fwhm_of(&tau, &env)?.fwhm_fs,
            visibility(&dip, &peak)?
        );
    }
    Ok(())
}
