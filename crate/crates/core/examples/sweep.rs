//! Mean exit time across ε and the fitted `-α` slope, run through the same
//! entry point as the `levy-exit sweep` subcommand.
//!
//! ```text
//! cargo run --release --example sweep
//! ```

use levy_exit::cli::{self, Cli, Command};

fn main() -> levy_exit::Result<()> {
    let dir = std::env::temp_dir().join("levy-exit-sweep-example");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("sweep.toml");
    std::fs::write(
        &config,
        "potential = \"quadratic\"\na = 1\nb = 1\nalpha = 1.5\neps = [0.1, 0.05, 0.02]\nn_paths = 1000\nseed = 1\n",
    )?;
    let run = Cli {
        command: Command::Sweep,
        config: Some(config),
        manifest: None,
        seed: None,
        out: dir.join("out"),
        workers: None,
    };
    let outcome = cli::run(&run)?;
    print!("{}", std::fs::read_to_string(dir.join("out/sweep.csv"))?);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("out/summary.json"))?)?;
    println!("log-log slope {} (theory {})", summary["empirical"]["loglog_slope"], summary["theory"]["loglog_slope"]);
    println!("outputs {:?} in {}", outcome.manifest.outputs, dir.join("out").display());
    Ok(())
}
