use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use acadperf_core::corpus::{default_excluded_doc_types, DateSpan};
use acadperf_core::credit::{Convention, ConventionMap};
use acadperf_core::indicators::Indicator;
use acadperf_core::regress::{ModelSpec, SolverOptions};
use acadperf_core::report::{Table, TableOptions};
use acadperf_core::sim::SimConfig;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{AppError, Result};
use crate::io::{self, config, dumps, maps, publications, roster};
use crate::manifest::RunManifest;
use crate::pipeline;

#[derive(Debug, Parser)]
#[command(
    name = "acadperf",
    version,
    about = "Age, seniority and research performance of full professors"
)]
pub struct Cli {
    /// Worker threads (0 uses every core). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Indicators, covariates and cohort percentiles from a roster and corpus.
    Compute(ComputeArgs),
    /// Fractional logit fits per UDA on computed percentiles.
    Regress(RegressArgs),
    /// Synthetic cohorts and a sign-recovery experiment.
    Simulate(SimulateArgs),
    /// Descriptive tables from computed dumps.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

impl Format {
    fn render(self, table: &Table) -> String {
        match self {
            Format::Text => table.to_text(),
            Format::Csv => table.to_csv(),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Csv => "csv",
        }
    }
}

fn parse_convention(s: &str) -> std::result::Result<Convention, String> {
    s.parse().map_err(|e: acadperf_core::Error| e.to_string())
}

fn parse_indicator(s: &str) -> std::result::Result<Indicator, String> {
    s.parse().map_err(|e: acadperf_core::Error| e.to_string())
}

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    io::parse_date(s)
}

/// `2006-2010` or `2006..2010`, whole calendar years.
fn parse_window(s: &str) -> std::result::Result<DateSpan, String> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| format!("window {s:?} should look like 2006-2010"))?;
    let first: i32 = a.trim().parse().map_err(|_| format!("bad year {a:?}"))?;
    let last: i32 = b.trim().parse().map_err(|_| format!("bad year {b:?}"))?;
    DateSpan::years(first, last).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub roster: PathBuf,
    /// Publications as CSV, or JSON Lines with a .jsonl extension.
    #[arg(long)]
    pub pubs: PathBuf,
    /// Observation window in whole years.
    #[arg(long, value_parser = parse_window, default_value = "2006-2010")]
    pub window: DateSpan,
    /// Date at which age and seniority are measured; defaults to the window's end.
    #[arg(long, value_parser = parse_date)]
    pub census_date: Option<NaiveDate>,
    /// SDS to UDA map (columns sds, uda); every roster SDS must appear.
    #[arg(long)]
    pub sds_map: Option<PathBuf>,
    /// Per-SDS credit conventions (columns sds, convention).
    #[arg(long)]
    pub conventions: Option<PathBuf>,
    /// Use one convention for every field.
    #[arg(long, value_parser = parse_convention)]
    pub convention: Option<Convention>,
    /// Document types to drop; replaces the default list.
    #[arg(long = "exclude-doc-type")]
    pub exclude_doc_types: Vec<String>,
    /// Unknown authors, missing scaling cells and unlisted SDS conventions are errors.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Directory written by `compute`.
    #[arg(long)]
    pub from: PathBuf,
    /// Model specification in TOML; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_indicator)]
    pub dependent: Option<Indicator>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub max_degree: Option<u8>,
    /// Keep only professors with seniority strictly below this.
    #[arg(long)]
    pub max_seniority: Option<f64>,
    /// Write results for the groups that fit and exit 0 even if some failed.
    #[arg(long)]
    pub allow_partial: bool,
    /// Append average marginal effects to table cells.
    #[arg(long)]
    pub show_ame: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulator configuration in TOML; missing keys take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_professors: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory written by `compute`.
    #[arg(long)]
    pub from: PathBuf,
    /// Population headcounts per UDA (columns uda, total) for coverage.
    #[arg(long)]
    pub population: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub bin_width: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const INDICATORS_FILE: &str = "indicators.csv";
pub const COVARIATES_FILE: &str = "covariates.csv";
pub const PERCENTILES_FILE: &str = "percentiles.csv";

pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    })
}

fn cmd_compute(args: ComputeArgs) -> Result<()> {
    let census = args.census_date.unwrap_or(args.window.end);
    let excluded: BTreeSet<String> = if args.exclude_doc_types.is_empty() {
        default_excluded_doc_types()
    } else {
        args.exclude_doc_types.iter().cloned().collect()
    };
    let mut manifest = RunManifest::new("compute", &args.out)
        .input("roster", Some(&args.roster))
        .input("publications", Some(&args.pubs))
        .input("sds_map", args.sds_map.as_deref())
        .input("conventions", args.conventions.as_deref());
    manifest.census_date = Some(census.to_string());
    manifest.window = Some(format!("{}..{}", args.window.start, args.window.end));
    manifest.convention_override = args.convention.map(|c| c.to_string());
    manifest.excluded_doc_types = excluded.iter().cloned().collect();
    manifest.strict = args.strict;
    manifest.check_inputs()?;

    let roster = roster::read_roster(&args.roster, Some(&args.window))?;
    let pubs = publications::read_publications(&args.pubs)?;
    let sds_map = args
        .sds_map
        .as_deref()
        .map(maps::read_sds_map)
        .transpose()?;
    let conventions = match &args.conventions {
        Some(p) => maps::read_conventions(p, !args.strict)?,
        None => ConventionMap::default(),
    }
    .with_override(args.convention);
    let settings = pipeline::ComputeSettings {
        census,
        window: args.window,
        conventions,
        sds_map,
        excluded_doc_types: excluded,
        strict: args.strict,
    };
    let out = pipeline::compute(&roster, pubs, &settings)?;
    for w in &out.warnings {
        log::warn!("{w}");
    }
    log::info!(
        "kept {} publications, dropped {} by document type, {} byline entries off the roster",
        out.ingest.kept,
        out.ingest.dropped_by_doc_type,
        out.ingest.unknown_authors
    );
    dumps::write_indicators(&args.out.join(INDICATORS_FILE), &out.indicators)?;
    dumps::write_covariates(&args.out.join(COVARIATES_FILE), &out.covariates)?;
    dumps::write_percentiles(&args.out.join(PERCENTILES_FILE), &out.percentiles)?;
    manifest.write()?;
    println!(
        "{} professors scored; outputs in {}",
        out.indicators.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_regress(args: RegressArgs) -> Result<()> {
    let covariates_path = args.from.join(COVARIATES_FILE);
    let percentiles_path = args.from.join(PERCENTILES_FILE);
    let mut manifest = RunManifest::new("regress", &args.out)
        .input("covariates", Some(&covariates_path))
        .input("percentiles", Some(&percentiles_path))
        .input("config", args.config.as_deref());
    manifest.check_inputs()?;
    let mut spec = match &args.config {
        Some(p) => config::load_model_spec(p)?,
        None => ModelSpec::default(),
    };
    if let Some(d) = args.dependent {
        spec.dependent = d;
    }
    if let Some(d) = args.max_degree {
        spec.max_degree = d;
    }
    if args.max_seniority.is_some() {
        spec.max_seniority = args.max_seniority;
    }
    spec.validate()
        .map_err(|e| AppError::Usage(e.to_string()))?;
    manifest.model = Some(spec.clone());

    let covariates = dumps::read_covariates(&covariates_path)?;
    let percentiles = dumps::read_percentiles(&percentiles_path)?;
    let out = pipeline::regress(
        &covariates,
        &percentiles,
        &spec,
        &SolverOptions::default(),
        TableOptions {
            show_ame: args.show_ame,
        },
    )?;
    dumps::write_fits_csv(&args.out.join("fits.csv"), &out.fits)?;
    dumps::write_fits_json(&args.out.join("fits.json"), &out.fits)?;
    let rendered = args.format.render(&out.table);
    let table_path = args.out.join(format!(
        "table_{}.{}",
        spec.dependent.name(),
        args.format.extension()
    ));
    io::write_file(&table_path, rendered.as_bytes())?;
    manifest.write()?;
    print!("{rendered}");
    if !out.failures.is_empty() {
        let listing: Vec<String> = out
            .failures
            .iter()
            .map(|(g, e)| format!("{g}: {e}"))
            .collect();
        if args.allow_partial {
            for l in &listing {
                log::warn!("fit failed for {l}");
            }
        } else {
            return Err(AppError::Failed(format!(
                "fits failed for {} group(s): {}",
                listing.len(),
                listing.join("; ")
            )));
        }
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(p) => config::load_sim_config(p)?,
        None => SimConfig::default(),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(n) = args.n_professors {
        config.n_professors = n;
    }
    config
        .validate()
        .map_err(|e| AppError::Usage(e.to_string()))?;
    let runs = args.runs as usize;
    let mut manifest =
        RunManifest::new("simulate", &args.out).input("config", args.config.as_deref());
    manifest.check_inputs()?;
    manifest.simulation = Some(config.clone());
    manifest.runs = Some(runs);
    manifest.seed = Some(config.seed);

    let (roster, corpus) =
        acadperf_core::sim::generate_cohort(&config).map_err(AppError::stage("simulate"))?;
    roster::write_roster(&args.out.join("roster.csv"), &roster)?;
    publications::write_publications(&args.out.join("publications.csv"), &corpus)?;
    let report = pipeline::simulate(&config, runs)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| AppError::format(args.out.join("recovery.json"), e))?;
    io::write_file(
        &args.out.join("recovery.json"),
        format!("{json}\n").as_bytes(),
    )?;
    write_recovery_csv(&args.out.join("recovery.csv"), &report)?;
    io::write_file(
        &args.out.join("config.toml"),
        config::sim_config_to_toml(&config).as_bytes(),
    )?;
    manifest.write()?;
    println!(
        "{} of {} runs succeeded; age AME negative in {}, seniority AME positive in {}{}",
        report.n_succeeded,
        report.n_runs,
        report.age_negative,
        report.seniority_positive,
        if report.low_power {
            " (low power: small cohort)"
        } else {
            ""
        }
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct RecoveryLine {
    run: usize,
    seed: u64,
    age_ame: Option<f64>,
    seniority_ame: Option<f64>,
    age_degree: Option<u8>,
    pseudo_r2: Option<f64>,
    corr_age_seniority: Option<f64>,
    inactive_fraction: Option<f64>,
    n_fitted: Option<usize>,
    error: Option<String>,
}

fn write_recovery_csv(path: &Path, report: &acadperf_core::sim::RecoveryReport) -> Result<()> {
    let rows: Vec<RecoveryLine> = report
        .runs
        .iter()
        .map(|r| {
            let s = r.summary.as_ref();
            RecoveryLine {
                run: r.run,
                seed: r.seed,
                age_ame: s.map(|s| s.age_ame),
                seniority_ame: s.map(|s| s.seniority_ame),
                age_degree: s.map(|s| s.age_degree),
                pseudo_r2: s.map(|s| s.pseudo_r2),
                corr_age_seniority: s.map(|s| s.corr_age_seniority),
                inactive_fraction: s.map(|s| s.inactive_fraction),
                n_fitted: s.map(|s| s.n_fitted),
                error: r.error.clone(),
            }
        })
        .collect();
    io::write_csv(path, &rows)
}

#[derive(Deserialize)]
struct PopulationRow {
    uda: String,
    total: usize,
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let covariates_path = args.from.join(COVARIATES_FILE);
    let indicators_path = args.from.join(INDICATORS_FILE);
    RunManifest::new("report", &args.from)
        .input("covariates", Some(&covariates_path))
        .input("indicators", Some(&indicators_path))
        .input("population", args.population.as_deref())
        .check_inputs()?;
    let covariates = dumps::read_covariates(&covariates_path)?;
    let indicators = dumps::read_indicators(&indicators_path)?;
    let population: BTreeMap<String, usize> = match &args.population {
        Some(p) => io::read_records(p, |r: PopulationRow| Ok((r.uda, r.total)))?
            .into_iter()
            .collect(),
        None => BTreeMap::new(),
    };
    let out = pipeline::describe(&covariates, &indicators, &population, args.bin_width)?;
    for w in &out.warnings {
        log::warn!("{w}");
    }
    let sections = [
        ("headcount", &out.headcount),
        ("appointment_age", &out.appointment_age),
        ("age_histogram", &out.age_histogram),
        ("fss_dispersion", &out.fss_dispersion),
    ];
    for (name, table) in sections {
        let rendered = args.format.render(table);
        match &args.out {
            Some(dir) => io::write_file(
                &dir.join(format!("{name}.{}", args.format.extension())),
                rendered.as_bytes(),
            )?,
            None => println!("{name}\n{rendered}"),
        }
    }
    Ok(())
}
