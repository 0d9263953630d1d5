//! Runs every numerical check on the paper preset and prints the table.

use biphoton::cli::RunConfig;
use biphoton::reproduce::run_all;

fn main() -> biphoton::Result<()> {
    let report = run_all(&RunConfig::paper())?;
    print!("{}", report.render());
    for c in report.failing() {
        println!("failing: {} {}", c.id, c.name);
    }
    Ok(())
}
