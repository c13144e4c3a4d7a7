use std::path::PathBuf;

use clap::Parser;

use eigenverify_cli::{catalog, runner, Manifest};

/// Manifest-driven verification of eigenfamilies on charted manifolds.
///
/// Exit codes: 0 all checks passed, 1 at least one check failed,
/// 2 configuration or parse error.
#[derive(Parser)]
#[command(name = "eigenverify", version, about)]
struct Cli {
    /// Path to the JSON manifest (manifold, family, transforms, checks)
    #[arg(long, required_unless_present = "list_checks", conflicts_with = "list_checks")]
    manifest: Option<PathBuf>,

    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the sampling seed from the manifest
    #[arg(long)]
    seed: Option<u64>,

    /// Override the per-chart sample count from the manifest
    #[arg(long)]
    points: Option<usize>,

    /// Override every check tolerance
    #[arg(long)]
    tol: Option<f64>,

    /// Suppress the summary line on stdout
    #[arg(long)]
    quiet: bool,

    /// Print the catalog of available checks and exit
    #[arg(long)]
    list_checks: bool,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();

    if cli.list_checks {
        let listing = serde_json::to_string_pretty(catalog::catalog())
            .expect("catalog serialization cannot fail");
        println!("{listing}");
        return 0;
    }

    let path = cli.manifest.as_ref().expect("clap enforces --manifest");
    let mut manifest: Manifest = match load_manifest(path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    if let Some(seed) = cli.seed {
        manifest.sampling.seed = seed;
    }
    if let Some(points) = cli.points {
        manifest.sampling.count = points;
    }
    if let Some(tol) = cli.tol {
        for check in &mut manifest.checks {
            check.tol = Some(tol);
        }
    }

    let outcome = match runner::run(&manifest) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };

    let rendered = serde_json::to_string_pretty(&outcome.document)
        .expect("report serialization cannot fail");
    match &cli.out {
        Some(out_path) => {
            if let Err(e) = std::fs::write(out_path, rendered.as_bytes()) {
                eprintln!("error: cannot write report to {}: {e}", out_path.display());
                return 2;
            }
            if !cli.quiet {
                print_summary(&outcome);
            }
        }
        None => {
            println!("{rendered}");
            if !cli.quiet {
                print_summary(&outcome);
            }
        }
    }
    if outcome.all_passed {
        0
    } else {
        1
    }
}

fn load_manifest(path: &PathBuf) -> anyhow::Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read manifest {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("manifest {}: {e}", path.display()))
}

fn print_summary(outcome: &runner::RunOutcome) {
    for check in &outcome.document.checks {
        eprintln!("{:<32} {}", check.name, check.verdict);
    }
    eprintln!(
        "overall: {} ({} checks, {} ms)",
        outcome.document.overall_verdict,
        outcome.document.checks.len(),
        outcome.document.wall_clock_ms
    );
}
