use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hecke_cycles::config::{RunConfig, SuiteName, VariantSel};
use hecke_cycles::report::Format;
use hecke_cycles::suites;

#[derive(Parser)]
#[command(
    name = "hecke-cycles",
    version,
    about = "Exact verification of Hecke relations for special cycles on unitary trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factorization of the Hecke polynomial in the quotient ring
    VerifySymbolic(Opts),
    /// Neighbor counts and brute-force neighbor comparison
    Census(Opts),
    /// Partial Hecke operator relations on sampled vertices
    VerifyRelations(Opts),
    /// Invariants of the canonical family
    Family(Opts),
    /// Orbit sums, trace and the distribution relation
    VerifyDistribution(Opts),
    /// Norm-compatible family from a root of the specialized polynomial
    NormFamily(Opts),
    /// Every suite in order
    All(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Short,
    Full,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

#[derive(Args)]
struct Opts {
    /// flat key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// sample vertices for verify-relations
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(opts: &Opts, suites: &[SuiteName]) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    cfg.suites = suites.to_vec();
    if let Some(q) = opts.q {
        cfg.q = q;
    }
    if let Some(p) = opts.precision {
        cfg.precision = Some(p);
    }
    if let Some(r) = opts.radius {
        cfg.radius = r;
    }
    if let Some(n) = opts.n {
        cfg.n = n;
    }
    if let Some(n) = opts.n_max {
        cfg.n_max = n;
    }
    if let Some(v) = opts.variant {
        cfg.variant = match v {
            VariantArg::Short => VariantSel::Short,
            VariantArg::Full => VariantSel::Full,
            VariantArg::Both => VariantSel::Both,
        };
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(s) = opts.samples {
        cfg.samples = Some(s);
    }
    if let Some(f) = opts.format {
        cfg.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Markdown => Format::Markdown,
        };
    }
    if let Some(o) = &opts.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> u8 {
    let (opts, selected): (&Opts, Vec<SuiteName>) = match &cli.command {
        Command::VerifySymbolic(o) => (o, vec![SuiteName::Symbolic]),
        Command::Census(o) => (o, vec![SuiteName::Census]),
        Command::VerifyRelations(o) => (o, vec![SuiteName::Relations]),
        Command::Family(o) => (o, vec![SuiteName::Family]),
        Command::VerifyDistribution(o) => (o, vec![SuiteName::Distribution]),
        Command::NormFamily(o) => (o, vec![SuiteName::NormFamily]),
        Command::All(o) => (o, SuiteName::ALL.to_vec()),
    };
    let cfg = match build_config(opts, &selected) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let report = suites::run(&cfg);
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    u8::from(report.failed())
}

fn main() -> ExitCode {
    ExitCode::from(execute(&Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hecke_cycles::report::{Report, Status};

    fn exec(args: &[&str]) -> u8 {
        let mut full = vec!["hecke-cycles"];
        full.extend_from_slice(args);
        execute(&Cli::try_parse_from(full).expect("arguments parse"))
    }

    #[test]
    fn symbolic_writes_json_report() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.json");
        assert_eq!(exec(&["verify-symbolic", "--format", "json", "--out", out.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        let r = Report::from_json(&text).unwrap();
        assert_eq!(r.to_json(), text);
        assert_eq!(r.suites[0].name, "symbolic");
        assert!(r.suites[0].checks.iter().any(|c| c.status == Status::Finding));
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "q = 3\nradius = 4\nsamples = 2\n").unwrap();
        let cli = Cli::try_parse_from(["hecke-cycles", "census", "--config", path.to_str().unwrap(), "--radius", "5"])
            .unwrap();
        let Command::Census(o) = &cli.command else { unreachable!() };
        let cfg = build_config(o, &[SuiteName::Census]).unwrap();
        assert_eq!((cfg.q, cfg.radius, cfg.samples(), cfg.precision()), (3, 5, 2, 16));
    }

    #[test]
    fn bad_inputs_exit_with_two() {
        assert_eq!(exec(&["census", "--q", "7"]), 2);
        assert_eq!(exec(&["verify-symbolic", "--q", "7"]), 0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "q = 2\nradius: 4\n").unwrap();
        assert_eq!(exec(&["family", "--config", path.to_str().unwrap()]), 2);
    }

    #[test]
    fn undersized_budget_fails_with_one() {
        assert_eq!(exec(&["verify-distribution", "--radius", "4", "--format", "json", "--out", "/dev/null"]), 1);
    }
}
