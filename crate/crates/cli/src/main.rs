use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use transeig_core::harness::{
    self, records_csv, scan_from, strip_check, weyl_count, weyl_count_from, ExperimentOptions, ModeLimit, Summary,
};
use transeig_core::parametrix::{
    c_constant_checked, degree_report, eikonal_residual, parametrix_tables, transport_residual, verify_n_dependence,
};
use transeig_core::radialode::{ContactFamily, RadialProfile};
use transeig_core::rootfinder::{find_eigenvalues_with, DiskProblem, SearchBox, SearchOptions};

const PROBLEM_SCHEMA: &str = r#"problem config, one of:
  {"n1": {"radius": R, "coeffs": [c0, c1, ...]}, "n2": {"radius": R, "coeffs": [...]}}
  {"base": {"radius": R, "coeffs": [...]}, "amplitude": c, "order": j}
where n(r) = c0 + c1 r^2 + c2 r^4 + ... must be positive on [0, R]"#;

const FAMILY_SCHEMA: &str = r#"contact family config:
  {"base": {"radius": R, "coeffs": [c0, c1, ...]}, "amplitude": c, "order": j}
giving n1 = n2 + c (R^2 - r^2)^j with n2 = base, j >= 1"#;

#[derive(Parser)]
#[command(name = "transeig", version, about = "Transmission eigenvalues of disks and DN parametrix symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy)]
struct Range(f64, f64);

fn parse_range(s: &str) -> Result<Range, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if !(a < b) {
        return Err(format!("empty range {s}"));
    }
    Ok(Range(a, b))
}

fn parse_mmax(s: &str) -> Result<ModeLimit, String> {
    if s == "auto" {
        return Ok(ModeLimit::Auto);
    }
    s.parse().map(ModeLimit::Fixed).map_err(|e| format!("expected auto or an integer: {e}"))
}

#[derive(clap::Args, Clone)]
struct SearchArgs {
    /// Highest angular mode: auto or an integer.
    #[arg(long, default_value = "auto", value_parser = parse_mmax)]
    mmax: ModeLimit,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Eikonal, transport and DN symbol tables with their exact checks.
    Symbols {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues in a rectangle, as CSV.
    Roots {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_range, default_value = "0.5:60")]
        re: Range,
        #[arg(long, value_parser = parse_range, default_value = "-12:12", allow_hyphen_values = true)]
        im: Range,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parabolic eigenvalue-free-region scan for a contact family.
    Scan {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 80.0)]
        re_max: f64,
        #[arg(long, default_value_t = harness::DEFAULT_IM_MAX)]
        im_max: f64,
        #[command(flatten)]
        search: SearchArgs,
        /// Records CSV; the summary goes next to it as <stem>.summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Strip check for a pair with n1 != n2 on the boundary.
    Strip {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_range, default_value = "20:60")]
        re: Range,
        #[arg(long, value_parser = parse_range, default_value = "5:20")]
        cal: Range,
        #[arg(long, default_value_t = harness::DEFAULT_IM_MAX)]
        im_max: f64,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weyl counting function N(r, C0) for r <= rMax.
    Count {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = harness::DEFAULT_C0)]
        c0: f64,
        #[arg(long, default_value_t = 40.0)]
        r_max: f64,
        #[arg(long, default_value_t = harness::DEFAULT_IM_MAX)]
        im_max: f64,
        #[command(flatten)]
        search: SearchArgs,
        /// Staircase CSV; the summary goes next to it as <stem>.summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Quick checks of the exact, special-function and ODE layers.
    Selftest,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn run(message: impl std::fmt::Display) -> Self {
        Self { code: 1, message: message.to_string() }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProblemConfig {
    Pair { n1: RadialProfile, n2: RadialProfile },
    Family(ContactFamily),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, schema: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}\nexpected {schema}", path.display())))
}

fn load_problem(path: &Path) -> Result<DiskProblem, Failure> {
    let problem = match read_json::<ProblemConfig>(path, PROBLEM_SCHEMA)? {
        ProblemConfig::Pair { n1, n2 } => DiskProblem::new(n1, n2),
        ProblemConfig::Family(f) => DiskProblem::from_family(&f),
    };
    problem.map_err(|e| Failure::usage(format!("{}: {e}\nexpected {PROBLEM_SCHEMA}", path.display())))
}

fn load_family(path: &Path) -> Result<ContactFamily, Failure> {
    let f: ContactFamily = read_json(path, FAMILY_SCHEMA)?;
    f.validate().map_err(|e| Failure::usage(format!("{}: {e}\nexpected {FAMILY_SCHEMA}", path.display())))?;
    Ok(f)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::run(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `--summary` if given, else `<out stem>.summary.json` next to `--out`.
fn summary_path(out: Option<&Path>, summary: Option<&Path>) -> Option<PathBuf> {
    summary.map(Path::to_path_buf).or_else(|| out.map(|o| o.with_extension("summary.json")))
}

fn experiment(search: &SearchArgs, im_max: f64) -> ExperimentOptions {
    ExperimentOptions {
        im_max,
        m_max: search.mmax,
        search: SearchOptions { jobs: search.jobs, ..SearchOptions::default() },
    }
}

fn symbols(order: usize, format: Format, out: Option<&Path>) -> Result<bool, Failure> {
    let t = parametrix_tables(order).map_err(Failure::run)?;
    let mut checks = Map::new();
    let mut ok = true;
    let mut record = |name: &str, r: Result<Value, String>| {
        match r {
            Ok(v) => checks.insert(name.into(), v),
            Err(e) => {
                ok = false;
                checks.insert(name.into(), json!({ "error": e }))
            }
        };
    };
    record("eikonalResidual", eikonal_residual(&t.eikonal).map(|_| json!("zero")).map_err(|e| e.to_string()));
    record("transportResidual", transport_residual(&t).map(|_| json!("zero")).map_err(|e| e.to_string()));
    record(
        "nDependence",
        verify_n_dependence(&t).map(|r| json!({ "identities": r.total() })).map_err(|e| e.to_string()),
    );
    let consts: Result<Map<String, Value>, String> = (1..=order)
        .map(|s| c_constant_checked(s, &t).map(|c| (format!("c_{s}"), json!(c.to_string()))).map_err(|e| e.to_string()))
        .collect();
    record("cConstants", consts.map(Value::Object));
    record(
        "degreeBounds",
        degree_report(&t).map(|r| json!({ "entries": r.entries.len() })).map_err(|e| e.to_string()),
    );

    let phi: Vec<(String, String)> = t.eikonal.iter().map(|(k, e)| (format!("phi_{k}"), e.to_text("rho"))).collect();
    let a: Vec<(String, String)> =
        t.transport.entries().map(|(k, j, e)| (format!("a_{k},{j}"), e.to_text("rho"))).collect();
    let dn = t.dn.to_text("rho");
    let text = match format {
        Format::Json => {
            let obj = |v: &[(String, String)]| Value::Object(v.iter().map(|(k, e)| (k.clone(), json!(e))).collect());
            let doc = json!({ "order": order, "phi": obj(&phi), "a": obj(&a), "dn": dn, "checks": checks });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for (k, e) in phi.iter().chain(a.iter()) {
                let _ = writeln!(s, "{k} = {e}");
            }
            let _ = writeln!(s, "dn = {dn}");
            for (k, v) in &checks {
                let _ = writeln!(s, "check {k}: {v}");
            }
            s
        }
    };
    emit(out, &text)?;
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Symbols { order, format, out } => symbols(order, format, out.as_deref()),
        Command::Roots { config, re, im, search, out } => {
            let p = load_problem(&config)?;
            let region = SearchBox::new(re.0, re.1, im.0, im.1).map_err(|e| Failure::usage(e.to_string()))?;
            let m_max = search.mmax.resolve(&p, &region);
            let opts = SearchOptions { jobs: search.jobs, ..SearchOptions::default() };
            let s = find_eigenvalues_with(&p, &region, m_max, &opts).map_err(Failure::run)?;
            emit(out.as_deref(), &records_csv(&s.records))?;
            eprintln!(
                "{} eigenvalues for m <= {m_max}, winding total {}, unresolved boxes {}",
                s.records.len(),
                s.total_count(),
                s.unresolved.len()
            );
            for u in &s.unresolved {
                eprintln!("unresolved: m={} {:?} count={} ({})", u.m, u.search_box, u.count, u.reason);
            }
            Ok(s.is_complete() && s.total_count() == s.total_multiplicity())
        }
        Command::Scan { family, re_max, im_max, search, out, summary } => {
            let f = load_family(&family)?;
            let p = DiskProblem::from_family(&f).map_err(|e| Failure::usage(e.to_string()))?;
            let s = harness::spectrum(&p, harness::DEFAULT_C0, re_max, &experiment(&search, im_max))
                .map_err(Failure::run)?;
            let scan = scan_from(&p, &s, re_max).map_err(Failure::run)?;
            let counting = weyl_count_from(&p, &s, harness::DEFAULT_C0, re_max).ok();
            let sum = Summary::from_scan(&p, &scan, counting.as_ref());
            emit(out.as_deref(), &records_csv(&scan.records))?;
            let json = sum.to_json() + "\n";
            match summary_path(out.as_deref(), summary.as_deref()) {
                Some(path) => emit(Some(&path), &json)?,
                None => eprint!("{json}"),
            }
            Ok(scan.violations.is_empty() && !scan.partial)
        }
        Command::Strip { config, re, cal, im_max, search, out } => {
            let p = load_problem(&config)?;
            let rep =
                strip_check(&p, (re.0, re.1), (cal.0, cal.1), &experiment(&search, im_max)).map_err(Failure::run)?;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&rep).expect("json") + "\n"))?;
            eprintln!("C = {}, {} eigenvalues checked, {} offenders", rep.c, rep.n_checked, rep.offenders.len());
            Ok(rep.passed() && !rep.partial)
        }
        Command::Count { config, c0, r_max, im_max, search, out, summary } => {
            let p = load_problem(&config)?;
            let c = weyl_count(&p, c0, r_max, &experiment(&search, im_max)).map_err(Failure::run)?;
            let mut csv = String::from("r,N\n");
            for (r, n) in &c.staircase {
                let _ = writeln!(csv, "{r:e},{n}");
            }
            emit(out.as_deref(), &csv)?;
            let sum = Summary {
                n_eigenvalues: c.n_at_rmax as usize,
                tau: c.tau,
                rel_err_at_rmax: Some(c.rel_err_at_rmax),
                ..Summary::default()
            };
            let json = sum.to_json() + "\n";
            match summary_path(out.as_deref(), summary.as_deref()) {
                Some(path) => emit(Some(&path), &json)?,
                None => eprint!("{json}"),
            }
            eprintln!(
                "N({r_max}) = {}, tau = {}, relErrAtRmax = {:.4}, remainder slope {:?}",
                c.n_at_rmax, c.tau, c.rel_err_at_rmax, c.remainder_slope
            );
            let monotone = c.staircase.windows(2).all(|w| w[0].1 <= w[1].1);
            Ok(monotone && !c.partial)
        }
        Command::Selftest => {
            let items = harness::selftest();
            for it in &items {
                println!("{} {}: {}", if it.passed { "PASS" } else { "FAIL" }, it.name, it.detail);
            }
            Ok(items.iter().all(|i| i.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
