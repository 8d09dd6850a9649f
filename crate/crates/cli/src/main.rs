use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thumbscope_cli::commands::*;
use thumbscope_cli::synth::SynthSpec;
use thumbscope_cli::{CliError, RunConfig};
use thumbscope_corpus::SidecarKind;

#[derive(Parser)]
#[command(name = "thumbscope", version, about = "Aesthetic features, visual themes and group statistics for video thumbnails")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the manifest from the YouTube Data API, or a synthetic corpus.
    Ingest {
        /// Generate this many synthetic images instead of calling the API.
        #[arg(long, value_name = "N")]
        synthetic: Option<usize>,
        /// L* added to the first group of a synthetic corpus.
        #[arg(long, default_value_t = 0.0, requires = "synthetic")]
        luminance_shift: f64,
    },
    /// Compute the 19 features for every image.
    Extract,
    /// Cluster embeddings into themes, tag them and report setting purity.
    Themes {
        /// Use colour/orientation histograms when there is no embedding sidecar.
        #[arg(long)]
        fallback_embedding: bool,
    },
    /// Two-group comparison of every feature within every theme.
    Compare,
    /// View power laws, engagement rates and feature-metric correlations.
    Performance,
    /// Monthly theme counts per group.
    Temporal,
    /// Highest- and lowest-ranked images for one feature.
    Inspect {
        feature: String,
        #[arg(short, default_value_t = 10)]
        k: usize,
    },
    /// Check a sidecar file against the manifest.
    ValidateSidecar {
        /// embeddings, tags or annotations
        kind: SidecarKind,
        path: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = cli.output_dir {
        config.output_dir = dir;
    }
    match cli.command {
        Command::Ingest {
            synthetic: Some(n),
            luminance_shift,
        } => {
            let spec = SynthSpec {
                images: n,
                luminance_shift,
                seed: config.seed,
                ..SynthSpec::default()
            };
            let planted = cmd_ingest_synthetic(&config, &spec)?;
            println!("wrote {} synthetic images to {}", planted.len(), config.output_dir.display());
        }
        Command::Ingest { synthetic: None, .. } => {
            let m = cmd_ingest(&config)?;
            println!("manifest with {} records at {}", m.records.len(), config.manifest_path().display());
        }
        Command::Extract => {
            let s = cmd_extract(&config)?;
            println!("{} rows written, {} failures", s.rows, s.failures.len());
        }
        Command::Themes { fallback_embedding } => {
            config.themes.fallback_embedding |= fallback_embedding;
            let s = cmd_themes(&config)?;
            for (event, m) in &s.models {
                println!("{event}: {} themes, sizes {:?}", m.k, m.sizes());
            }
        }
        Command::Compare => {
            let m = cmd_compare(&config)?;
            println!(
                "{} of {} cells significant ({} vs {})",
                m.significant_count(),
                m.cells.len(),
                m.group_a,
                m.group_b
            );
        }
        Command::Performance => {
            let s = cmd_performance(&config)?;
            for ((group, event), fit) in &s.fits {
                match fit {
                    Some(f) => println!("{group} / {event}: slope {:.3}, r2 {:.3}", f.slope, f.r_squared),
                    None => println!("{group} / {event}: too few videos"),
                }
            }
            println!("{} correlations", s.correlations);
        }
        Command::Temporal => {
            let rows = cmd_temporal(&config)?;
            println!("{} month/theme/group cells", rows.len());
        }
        Command::Inspect { feature, k } => {
            let r = cmd_inspect(&config, &feature, k)?;
            println!("top: {}", r.top.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>().join(" "));
            println!("bottom: {}", r.bottom.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>().join(" "));
        }
        Command::ValidateSidecar { kind, path } => {
            let s = cmd_validate_sidecar(&config, kind, &path)?;
            println!(
                "ok: {} entries, coverage {:.1}%{}",
                s.entries,
                s.coverage * 100.0,
                s.dimension.map(|d| format!(", dimension {d}")).unwrap_or_default()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
