//! Ordinary and extraordinary indices of BBO and their group indices.

use biphoton::crystal::{CrystalConfig, Polarization};

fn main() -> biphoton::Result<()> {
    let bbo = CrystalConfig::bbo(2000.0, 0.0)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "nm", "n_o", "n_e", "ng_o", "ng_e");
    for nm in [351.1, 500.0, 650.0, 702.2, 750.0, 900.0] {
        println!(
            "{nm:>8.1} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            bbo.index(nm, Polarization::Ordinary, 0.0)?,
            bbo.index(nm, Polarization::Extraordinary, 90.0)?,
            bbo.group_index(nm, Polarization::Ordinary, 0.0)?,
            bbo.group_index(nm, Polarization::Extraordinary, 90.0)?,
        );
    }
    Ok(())
}
