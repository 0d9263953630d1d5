//! Collinear phase-matching angles and group parameters for a 351.1 nm pump.

use biphoton::crystal::{group_params, solve_collinear_pm_angle, CrystalConfig, PhaseMatchingType};

fn main() -> biphoton::Result<()> {
    let bbo = CrystalConfig::bbo(2000.0, 0.0)?;
    for ty in [PhaseMatchingType::TypeI, PhaseMatchingType::TypeII] {
        let theta = solve_collinear_pm_angle(351.1, 702.2, ty, &bbo)?;
        let gp = group_params(&bbo, 702.2, theta)?;
        match ty {
            PhaseMatchingType::TypeI => println!("type I: θ = {theta:.4}°, D'' = {:.5} fs²/µm", gp.dpp_fs2_per_um),
            PhaseMatchingType::TypeII => println!(
                "type II: θ = {theta:.4}°, D = {:.6} fs/µm, D·L/2 = {:.2} fs",
                gp.d_fs_per_um,
                gp.d_fs_per_um * bbo.length_um / 2.0
            ),
        }
    }
    Ok(())
}
