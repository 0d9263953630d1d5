//! A quadratic spectral phase broadens G² but leaves the coincidence dip.

use biphoton::cli::RunConfig;
use biphoton::correlation::{delay_range, fwhm, g2};
use biphoton::crystal::PhaseMatchingType;
use biphoton::interferometry::{hom_closed, Sign};

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let t = cfg.unfiltered(&cfg.crystal()?, PhaseMatchingType::TypeI)?.amplitude;
    let tau_dip = delay_range(-40.0, 40.0, 0.1);
    let tau_g2 = delay_range(-4000.0, 4000.0, 1.0);
    let dip0 = hom_closed(&t, &tau_dip, Sign::Minus)?;
    for beta in [0.0, 500.0, 1000.0, 2000.0, 5000.0] {
        let tb = t.apply_quadratic_phase(beta);
        let dip = hom_closed(&tb, &tau_dip, Sign::Minus)?;
        let dev = dip.rate.iter().zip(&dip0.rate).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("β = {beta:>6} fs²: G² FWHM {:>8.1} fs, dip change {dev:.1e}", fwhm(&g2(&tb, &tau_g2)?)?.fwhm_fs);
    }
    Ok(())
}
