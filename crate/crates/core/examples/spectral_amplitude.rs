//! Type-I and type-II spectral amplitudes, optionally filtered.

use biphoton::cli::RunConfig;
use biphoton::crystal::PhaseMatchingType;
use biphoton::spectral::{detuning_width_to_nm, FilterSpec};

fn half_width(nu: &[f64], p: &[f64]) -> f64 {
    let peak = p.iter().cloned().fold(0.0, f64::max);
    let inside: Vec<f64> = nu.iter().zip(p).filter(|(_, v)| **v >= peak / 2.0).map(|(n, _)| *n).collect();
    inside.last().unwrap() - inside.first().unwrap()
}

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let crystal = cfg.crystal()?;
    for ty in [PhaseMatchingType::TypeI, PhaseMatchingType::TypeII] {
        let t = cfg.unfiltered(&crystal, ty)?.amplitude;
        let w = half_width(t.grid.nu(), &t.power_spectrum());
        println!("{ty:?}: |T|² FWHM {w:.4} rad/fs = {:.2} nm ({} points)", detuning_width_to_nm(702.2, w), t.grid.len());
    }
    let t = cfg.unfiltered(&crystal, PhaseMatchingType::TypeI)?.amplitude;
    let f = FilterSpec::gaussian(702.2, 20.0);
    let tf = t.apply_filters(&f, &f)?;
    let w = half_width(tf.grid.nu(), &tf.power_spectrum());
    println!("type-I behind 20 nm filters: FWHM {:.2} nm", detuning_width_to_nm(702.2, w));
    Ok(())
}
