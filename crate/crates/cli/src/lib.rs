//! Command-line frontend for the `aeenrich` library.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use aeenrich::report::{aeks_csv, aeks_enriched, aeks_json, fisher_csv, fisher_enriched, fisher_json};
use aeenrich::simulate::{benchmark, read_empirical, SimConfig, Surrogates};
use aeenrich::{
    aefisher_test, aeks_test, parse_aggregated, parse_groups, parse_reports, AeError, ContingencyTable, FisherOptions,
    GroupMap, MonteCarloConfig, PermutationScheme, Sidedness, SignalRule, Totals,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "aeenrich", version, about = "Adverse-event group enrichment tests (AEKS, AEFisher)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tie-aware KS enrichment with zero-proportion gate and multinomial null.
    Aeks(AeksArgs),
    /// Per-AE Fisher signals, gated group odds ratio, permutation null.
    Fisher(FisherArgs),
    /// Simulation benchmark of AEKS, AEFisher and their baselines.
    Simulate(SimArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SideArg {
    Greater,
    TwoSided,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PermArg {
    /// Signal and zero status move together
    Joint,
    /// Only signal labels move
    Label,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Report-level file with header `report_id,vaccine,ae_term`
    #[arg(long, conflicts_with = "aggregated", required_unless_present = "aggregated")]
    reports: Option<PathBuf>,
    /// Aggregated counts with header `ae_term,n1i,ndoti`
    #[arg(long)]
    aggregated: Option<PathBuf>,
    /// Target vaccine (required with --reports)
    #[arg(long, requires = "reports")]
    vaccine: Option<String>,
    /// Total reports mentioning the target vaccine (aggregated input)
    #[arg(long, requires = "n_total", requires = "aggregated")]
    n1_total: Option<u64>,
    /// Total reports in the database (aggregated input)
    #[arg(long, requires = "n1_total", requires = "aggregated")]
    n_total: Option<u64>,
    /// Group mapping file with header `group,ae_term`
    #[arg(long)]
    groups: PathBuf,
    /// Field delimiter for all input files
    #[arg(long, default_value_t = ',', conflicts_with = "tab")]
    delimiter: char,
    /// Tab-delimited input (same as --delimiter '\t')
    #[arg(long)]
    tab: bool,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Monte Carlo replicates
    #[arg(long = "m", default_value_t = 5000)]
    m: usize,
    /// RNG seed [env: AEENRICH_SEED; default 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Report (1 + k) / (1 + M) instead of k / M
    #[arg(long)]
    pseudo_count: bool,
    /// BH q-value cutoff for calling groups and AEs significant
    #[arg(long, default_value_t = 0.1)]
    q_cut: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the version/settings header line
    #[arg(long)]
    no_header: bool,
}

#[derive(Args, Debug)]
struct AeksArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct FisherArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Odds-ratio cutoff for signaling an AE
    #[arg(long, default_value_t = 1.5)]
    or_cut: f64,
    /// Sidedness of the per-AE Fisher test
    #[arg(long, value_enum, default_value_t = SideArg::Greater)]
    sidedness: SideArg,
    /// Permutation scheme for the group null
    #[arg(long, value_enum, default_value_t = PermArg::Joint)]
    permutation: PermArg,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Directory for ROC curves, summaries and the overlay plot
    #[arg(long)]
    out_dir: PathBuf,
    /// AE groups per dataset
    #[arg(long, default_value_t = 150)]
    n_groups: usize,
    /// Minimum group size
    #[arg(long, default_value_t = 10)]
    min_group_size: u64,
    /// Fraction of groups that are enriched
    #[arg(long, default_value_t = 0.10)]
    enriched_frac: f64,
    /// Number of simulated datasets
    #[arg(long, default_value_t = 10)]
    datasets: usize,
    /// Probability an un-enriched group follows variant A (high zero share)
    #[arg(long, default_value_t = 0.5)]
    variant_a_prob: f64,
    /// Monte Carlo replicates per test
    #[arg(long = "m", default_value_t = 1000)]
    m: usize,
    /// RNG seed [env: AEENRICH_SEED; default 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the version/settings header line
    #[arg(long)]
    no_header: bool,
    /// Empirical group sizes, one per line
    #[arg(long)]
    group_sizes_file: Option<PathBuf>,
    /// Empirical AE totals, one per line
    #[arg(long)]
    totals_file: Option<PathBuf>,
    /// Empirical reporting rates in [0, 1], one per line
    #[arg(long)]
    rates_file: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<AeError> for Failure {
    fn from(e: AeError) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn seed_from_env(flag: Option<u64>) -> Outcome<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("AEENRICH_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("AEENRICH_SEED `{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn open(path: &Path) -> Outcome<File> {
    File::open(path).map_err(|e| Failure::Usage(format!("cannot open {}: {e}", path.display())))
}

fn delimiter(input: &InputArgs) -> Outcome<u8> {
    if input.tab {
        return Ok(b'\t');
    }
    if !input.delimiter.is_ascii() {
        return Err(Failure::Usage(format!("delimiter `{}` must be ASCII", input.delimiter)));
    }
    Ok(input.delimiter as u8)
}

fn load(input: &InputArgs) -> Outcome<(ContingencyTable, GroupMap)> {
    let delim = delimiter(input)?;
    let table = match (&input.reports, &input.aggregated) {
        (Some(path), _) => {
            let vaccine = input
                .vaccine
                .as_deref()
                .ok_or_else(|| Failure::Usage("--vaccine is required with --reports".into()))?;
            parse_reports(open(path)?, delim, vaccine)?
        }
        (None, Some(path)) => {
            let totals = match (input.n1_total, input.n_total) {
                (Some(n1_total), Some(n_total)) => Some(Totals { n1_total, n_total }),
                _ => None,
            };
            parse_aggregated(open(path)?, delim, totals)?
        }
        (None, None) => return Err(Failure::Usage("one of --reports or --aggregated is required".into())),
    };
    let parsed = parse_groups(open(&input.groups)?, delim, &table)?;
    for (g, why) in &parsed.excluded {
        log::warn!("group `{g}` excluded: {why:?}");
    }
    if parsed.groups.is_empty() {
        return Err(Failure::Data("no analyzable group after matching terms to the count data".into()));
    }
    Ok((table, parsed.groups))
}

fn check_threads(threads: Option<usize>) -> Outcome<()> {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be >= 1".into())),
        _ => Ok(()),
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Outcome<T> {
    check_threads(threads)?;
    match threads {
        None | Some(0) => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn check_q_cut(q: f64) -> Outcome<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--q-cut {q} not in (0, 1]")))
    }
}

fn header(cmd: &str, settings: &[(&str, String)], off: bool) -> Option<String> {
    if off {
        return None;
    }
    let kv: Vec<String> = settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Some(format!("aeenrich {} {cmd} {}", env!("CARGO_PKG_VERSION"), kv.join(" ")))
}

fn mc_config(c: &CommonArgs) -> Outcome<MonteCarloConfig> {
    let cfg = MonteCarloConfig {
        replicates: c.m,
        seed: seed_from_env(c.seed)?,
        pseudo_count: c.pseudo_count,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run_aeks(a: AeksArgs) -> Outcome<()> {
    let c = &a.common;
    let cfg = mc_config(c)?;
    check_q_cut(c.q_cut)?;
    check_threads(c.threads)?;
    let (table, groups) = load(&a.input)?;
    let res = with_threads(c.threads, || aeks_test::<f64>(&table, &groups, &cfg))??;
    let enriched = aeks_enriched(&res, &groups, c.q_cut);
    let h = header(
        "aeks",
        &[
            ("m", cfg.replicates.to_string()),
            ("seed", cfg.seed.to_string()),
            ("pseudo_count", cfg.pseudo_count.to_string()),
            ("q_cut", c.q_cut.to_string()),
        ],
        c.no_header,
    );
    let text = match c.format {
        Format::Csv => aeks_csv(&res, &enriched, h.as_deref()),
        Format::Json => aeks_json(&res, &enriched, h.as_deref()).map_err(AeError::from)?,
    };
    emit(c.out.as_deref(), &text)
}

fn run_fisher(a: FisherArgs) -> Outcome<()> {
    let c = &a.common;
    let cfg = mc_config(c)?;
    check_q_cut(c.q_cut)?;
    check_threads(c.threads)?;
    let rule = SignalRule {
        q_cut: c.q_cut,
        or_cut: a.or_cut,
    };
    rule.validate()?;
    let opts = FisherOptions {
        sidedness: match a.sidedness {
            SideArg::Greater => Sidedness::Greater,
            SideArg::TwoSided => Sidedness::TwoSided,
        },
        scheme: match a.permutation {
            PermArg::Joint => PermutationScheme::JointRecord,
            PermArg::Label => PermutationScheme::LabelOnly,
        },
    };
    let (table, groups) = load(&a.input)?;
    let res = with_threads(c.threads, || aefisher_test::<f64>(&table, &groups, &rule, &opts, &cfg))??;
    let enriched = fisher_enriched(&res, &groups, c.q_cut);
    let h = header(
        "fisher",
        &[
            ("m", cfg.replicates.to_string()),
            ("seed", cfg.seed.to_string()),
            ("pseudo_count", cfg.pseudo_count.to_string()),
            ("q_cut", c.q_cut.to_string()),
            ("or_cut", a.or_cut.to_string()),
            ("sidedness", format!("{:?}", a.sidedness).to_lowercase()),
            ("permutation", format!("{:?}", a.permutation).to_lowercase()),
        ],
        c.no_header,
    );
    let text = match c.format {
        Format::Csv => fisher_csv(&res, &enriched, h.as_deref()),
        Format::Json => fisher_json(&res, &enriched, h.as_deref()).map_err(AeError::from)?,
    };
    emit(c.out.as_deref(), &text)
}

fn empirical<T: std::str::FromStr>(path: &Option<PathBuf>) -> Outcome<Option<Vec<T>>> {
    match path {
        None => Ok(None),
        Some(p) => Ok(Some(read_empirical(open(p)?)?)),
    }
}

fn run_simulate(a: SimArgs) -> Outcome<()> {
    let seed = seed_from_env(a.seed)?;
    check_threads(a.threads)?;
    let cfg = SimConfig {
        n_groups: a.n_groups,
        min_group_size: a.min_group_size,
        enriched_frac: a.enriched_frac,
        variant_a_prob: a.variant_a_prob,
        replicates: a.datasets,
        seed,
        surrogates: Surrogates {
            group_sizes: empirical(&a.group_sizes_file)?,
            totals: empirical(&a.totals_file)?,
            rates: empirical(&a.rates_file)?,
        },
        ..SimConfig::default()
    };
    cfg.validate()?;
    let mc = MonteCarloConfig::new(a.m, seed);
    mc.validate()?;
    let report = with_threads(a.threads, || benchmark(&cfg, &mc))??;
    let h = header(
        "simulate",
        &[
            ("datasets", cfg.replicates.to_string()),
            ("n_groups", cfg.n_groups.to_string()),
            ("m", a.m.to_string()),
            ("seed", seed.to_string()),
        ],
        a.no_header,
    );
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", a.out_dir.display())))?;
    report.write_to(&a.out_dir, h.as_deref())?;
    print!("{}", report.summary_csv(None));
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Aeks(a) => run_aeks(a),
        Command::Fisher(a) => run_fisher(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            eprintln!("data error: {msg}");
            EXIT_DATA
        }
    }
}
