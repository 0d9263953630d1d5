//! Single-count fringes of a Michelson interferometer and their envelope.

use biphoton::cli::RunConfig;
use biphoton::correlation::{delay_range, fwhm_of};
use biphoton::crystal::PhaseMatchingType;
use biphoton::interferometry::michelson;

fn main() -> biphoton::Result<()> {
    let cfg = RunConfig::paper();
    let t = cfg.unfiltered(&cfg.crystal()?, PhaseMatchingType::TypeI)?.amplitude;
    let p = michelson(&t, &delay_range(-40.0, 40.0, 0.05))?;
    let env = p.envelope.as_ref().unwrap();
    println!("envelope FWHM {:.2} fs", fwhm_of(&p.tau, env)?.fwhm_fs);
    for k in (780..820).step_by(2) {
        println!("{:>7.2} {:.4} {:.4}", p.tau[k], p.rate[k], env[k]);
    }
    Ok(())
}
