//! Runs the seeded benchmark and writes both CSV files to stdout.

use quickest::bench::run_bench;

fn main() -> quickest::Result<()> {
    let report = run_bench(0, 20, 20)?;
    report.write_csv(std::io::stdout())?;
    println!();
    report.write_envelope_csv(std::io::stdout().lock())?;
    Ok(())
}
