//! Monte-Carlo TAC histogram and the accidental-subtracted visibility.

use biphoton::montecarlo::{config_from_pair_fraction, extract_coincidences, simulate_mca, simulate_visibility_chain, CountingConfig};

fn main() -> biphoton::Result<()> {
    let base = CountingConfig { duration_s: 0.05, rng_seed: 3, ..Default::default() };
    let cfg = config_from_pair_fraction(&base, 2e6, 0.3)?;
    let h = simulate_mca(&cfg, 0.5)?;
    let c = extract_coincidences(&h, cfg.window_width_ns, cfg.accidental_offset_ns)?;
    println!("starts {}, stops {}", h.total_starts, h.total_stops);
    println!("peak window {} counts, offset window {} (expected {:.0})", c.true_counts, c.accidental_counts, cfg.expected_accidentals(0.5));
    let chain = simulate_visibility_chain(&cfg, 0.86)?;
    println!("raw visibility {:.3}, corrected {:.3}", chain.raw_visibility, chain.corrected_visibility);
    Ok(())
}
