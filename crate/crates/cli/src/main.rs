use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use tablediff::manifest::{DatasetManifest, ManifestError};
use tablediff::mw_client::{ArticleRef, ClientConfig, MwClient, DEFAULT_USER_AGENT};
use tablediff::pipeline::run_pipeline;
use tablediff::report::{emit, OutputFormat, Report, Settings};
use tablediff::schema_align::HeaderMapping;

/// Compare Wikipedia tables across language editions.
#[derive(Parser)]
#[command(name = "tablediff", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download pages, language links and item ids into the cache.
    Fetch(RunArgs),
    /// Count the language editions of each family's seed article.
    Langs {
        #[command(flatten)]
        source: SourceArgs,
        /// Write `language_versions.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full analysis and write a report.
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Output formats; repeat or separate with commas.
        #[arg(long, value_delimiter = ',', default_value = "json")]
        format: Vec<OutputFormat>,
        #[arg(long, default_value = "tablediff-out")]
        out: PathBuf,
    },
    /// Re-render a stored json report.
    Report {
        /// A `report.json` written by `analyze`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv")]
        format: Vec<OutputFormat>,
        #[arg(long, default_value = "tablediff-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, env = "TABLEDIFF_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Never touch the network; fail on cache misses.
    #[arg(long, conflicts_with = "refresh")]
    offline: bool,
    /// Ignore cached pages and download again.
    #[arg(long)]
    refresh: bool,
    #[arg(long)]
    user_agent: Option<String>,
    /// Requests per second per client.
    #[arg(long, default_value_t = 5.0)]
    rate: f64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Restrict every family to these languages.
    #[arg(long, value_delimiter = ',')]
    langs: Option<Vec<String>>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AnalysisArgs {
    /// Relative difference two numbers may have and still agree.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Minimum revision age gap for a timeliness candidate.
    #[arg(long)]
    staleness_days: Option<i64>,
    /// Header alias file mapping column headers onto shared attributes.
    #[arg(long)]
    header_map: Option<PathBuf>,
    /// Also count columns of every table, not only the main one.
    #[arg(long)]
    all_tables: bool,
    /// Extra cell texts that mean "no value".
    #[arg(long, value_delimiter = ',')]
    missing: Vec<String>,
}

fn load_manifest(path: &Path) -> Result<DatasetManifest, ManifestError> {
    DatasetManifest::load(path)
}

fn client(source: &SourceArgs, manifest: &DatasetManifest) -> Result<MwClient> {
    let cache_dir = source
        .cache_dir
        .clone()
        .or_else(|| manifest.settings.cache_dir.clone())
        .unwrap_or_else(ClientConfig::default_cache_dir);
    let mut config = ClientConfig::new(cache_dir);
    config.offline = source.offline;
    config.refresh = source.refresh;
    config.requests_per_second = source.rate;
    config.user_agent = source
        .user_agent
        .clone()
        .unwrap_or_else(|| DEFAULT_USER_AGENT.to_string());
    config.timeout = Duration::from_secs(60);
    info!("cache directory {}", config.cache_dir.display());
    MwClient::new(config).context("cannot create client")
}

fn settings(
    run: &RunArgs,
    analysis: Option<&AnalysisArgs>,
    manifest: &DatasetManifest,
) -> Settings {
    let from = &manifest.settings;
    let defaults = Settings::default();
    let mut missing_tokens = from.missing_tokens.clone().unwrap_or_default();
    if let Some(a) = analysis {
        missing_tokens.extend(a.missing.iter().cloned());
    }
    Settings {
        languages: run.langs.clone().or_else(|| from.languages.clone()),
        rel_tol: analysis
            .and_then(|a| a.rel_tol)
            .or(from.rel_tol)
            .unwrap_or(defaults.rel_tol),
        staleness_days: analysis
            .and_then(|a| a.staleness_days)
            .or(from.staleness_days)
            .unwrap_or(defaults.staleness_days),
        header_map: analysis
            .and_then(|a| a.header_map.clone())
            .or_else(|| from.header_map.clone()),
        jobs: run.jobs.or(from.jobs).unwrap_or(defaults.jobs),
        all_tables: analysis.is_some_and(|a| a.all_tables) || from.all_tables.unwrap_or(false),
        offline: run.source.offline,
        refresh: run.source.refresh,
        missing_tokens,
    }
}

fn mapping(settings: &Settings) -> Result<HeaderMapping> {
    match &settings.header_map {
        Some(path) => Ok(HeaderMapping::load(path)?),
        None => Ok(HeaderMapping::default()),
    }
}

fn write_all(report: &Report, formats: &[OutputFormat], out: &Path) -> Result<()> {
    for format in formats {
        for path in emit(report, *format, out)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Fetch(run) => {
            let manifest = load_manifest(&run.source.manifest)?;
            let client = client(&run.source, &manifest)?;
            let settings = settings(&run, None, &manifest);
            let report = run_pipeline(&manifest, &settings, &client, &HeaderMapping::default());
            for family in &report.families {
                let present = family
                    .editions
                    .iter()
                    .filter(|e| e.revision_id.is_some())
                    .count();
                println!(
                    "{}: {present}/{} editions cached",
                    family.id,
                    family.editions.len()
                );
            }
            Ok(report.exit_code() as u8)
        }
        Command::Langs { source, out } => {
            let manifest = load_manifest(&source.manifest)?;
            let client = client(&source, &manifest)?;
            let mut rows = Vec::new();
            let mut failed = false;
            for family in &manifest.families {
                match client.list_language_versions(&family.seed) {
                    Ok(editions) => rows.push((
                        family.id.clone(),
                        family.seed.clone(),
                        editions.len().to_string(),
                    )),
                    Err(e) => {
                        eprintln!("{}: {e}", family.id);
                        failed = true;
                        rows.push((family.id.clone(), family.seed.clone(), String::new()));
                    }
                }
            }
            write_langs(&rows, out.as_deref())?;
            Ok(if failed { 2 } else { 0 })
        }
        Command::Analyze {
            run,
            analysis,
            format,
            out,
        } => {
            let manifest = load_manifest(&run.source.manifest)?;
            let client = client(&run.source, &manifest)?;
            let settings = settings(&run, Some(&analysis), &manifest);
            let mapping = mapping(&settings)?;
            let report = run_pipeline(&manifest, &settings, &client, &mapping);
            write_all(&report, &format, &out)?;
            eprintln!(
                "{} families, {} records",
                report.families.len(),
                report.record_count()
            );
            Ok(report.exit_code() as u8)
        }
        Command::Report { input, format, out } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let report = Report::from_json(&text)
                .with_context(|| format!("{} is not a report", input.display()))?;
            write_all(&report, &format, &out)?;
            Ok(0)
        }
    }
}

fn write_langs(rows: &[(String, ArticleRef, String)], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join("language_versions.csv");
            println!("{}", path.display());
            Box::new(std::fs::File::create(path)?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["family", "language", "title", "language_versions"])?;
    for (id, seed, count) in rows {
        writer.write_record([id, &seed.language, &seed.title, count])?;
    }
    writer.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
