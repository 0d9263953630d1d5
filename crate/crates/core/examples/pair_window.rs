//! Pair-detectable spectral window and pair fraction for three filter widths.

use biphoton::cli::RunConfig;

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let setup = cfg.noncollinear(&cfg.crystal()?)?;
    for nm in [3.0, 20.0, 80.0] {
        let pw = cfg.pair_window_for(&setup, Some(nm))?;
        println!(
            "{nm:>4} nm filters: pair window {:.2} nm, singles {:.2} nm, pair fraction {:.3}",
            pw.effective_pair_fwhm_nm, pw.singles_fwhm_nm, pw.pair_fraction
        );
    }
    Ok(())
}
