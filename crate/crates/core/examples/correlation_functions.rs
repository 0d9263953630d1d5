//! g¹ envelope, two-photon envelope and G² of the type-II amplitude.

use biphoton::cli::RunConfig;
use biphoton::correlation::{delay_range, fwhm, g1_envelope, g2, two_photon_envelope};
use biphoton::crystal::PhaseMatchingType;

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let t = cfg.unfiltered(&cfg.crystal()?, PhaseMatchingType::TypeII)?.amplitude;
    let tau = delay_range(-700.0, 700.0, 1.0);
    let g1 = g1_envelope(&t, &tau)?;
    let tp = two_photon_envelope(&t, &tau)?;
    let g = g2(&t, &tau)?;
    println!("g1 FWHM {:.1} fs", fwhm(&g1)?.fwhm_fs);
    println!("two-photon envelope FWHM {:.1} fs", fwhm(&tp)?.fwhm_fs);
    let w = fwhm(&g)?;
    println!("G2 FWHM {:.1} fs, from {:.1} to {:.1} fs", w.fwhm_fs, w.left_fs, w.right_fs);
    for k in (0..tau.len()).step_by(100) {
        println!("{:>8.1} {:.4} {:.4}", tau[k], g1.values[k], g.values[k]);
    }
    Ok(())
}
