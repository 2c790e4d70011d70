//! Running the verification suites and writing their reports.

use gdimlab::error::Result;
use gdimlab::preset::{run_preset, ExperimentPreset, PresetName};
use gdimlab::session::SessionStore;

fn main() -> Result<()> {
    let store = SessionStore::from_env_or(std::env::temp_dir().join("gdimlab-example-presets"))?;
    for name in PresetName::ALL {
        let report = run_preset(&ExperimentPreset::defaults(name))?;
        report.write(&store)?;
        println!("{name}: {} checks, passed {}", report.checks.len(), report.passed);
    }
    println!("reports in {}", store.dir().display());
    Ok(())
}
