//! Driving a run from a TOML config, as the `bosegp` binary does.
//!
//! `cargo run --example run_config -- examples/configs/tf.toml csv`

use std::io::Write;
use std::path::PathBuf;

use bosegp::cli::{self, Format};

fn main() -> bosegp::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/tf.toml"
        ))
    });
    let format = match args.next().as_deref() {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let command = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.parse().ok())
        .unwrap_or(cli::Command::Tf);

    let cfg = cli::load_config(&path, std::env::vars())?;
    let report = cli::run(command, &cfg)?;
    std::io::stdout().write_all(&cli::emit(&report, format)?)?;
    if !report.valid {
        eprintln!("failures: {:?}", report.failures);
    }
    Ok(())
}
