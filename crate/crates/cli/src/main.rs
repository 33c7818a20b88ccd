//! `bernegger` command-line tool: fit, compare, tabulate and simulate
//! exposure-curve distributions for censored losses.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bernegger::distribution::{sample, CensoredDistribution};
use bernegger::family::Family;
use bernegger::fitting::{compare, empirical_stats, fit, FitMode, FitOptions, Observations};
use bernegger::mbbefd::{swiss_re_params, MbbefdParams};
use bernegger::{claims, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bernegger", version, about = "Exposure-curve distributions for lower-truncated, right-censored losses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one family by maximum likelihood and print the result as JSON
    Fit(FitArgs),
    /// Fit several families and tabulate point mass, mean, log-likelihoods and AIC
    Compare(CompareArgs),
    /// Tabulate G, F and f on a grid
    Curve(CurveArgs),
    /// Draw a seeded sample and write it as a `z` column
    Simulate(SimulateArgs),
    /// Empirical point mass, mean, histogram and kernel density of a sample
    Stats(StatsArgs),
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with claims
    #[arg(long)]
    input: PathBuf,
    /// `z` for a column of normalized losses, `raw` for loss,deductible,cover
    #[arg(long, default_value = "z")]
    schema: String,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "standard")]
    mode: String,
    #[command(flatten)]
    input: InputArgs,
    /// Starting value `name=value`; repeat for each parameter
    #[arg(long = "init", value_name = "NAME=VALUE")]
    init: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Family to fit; repeat for several, all families when omitted
    #[arg(long = "family")]
    families: Vec<String>,
    /// Fitting mode; repeat for both, both when omitted
    #[arg(long = "mode")]
    modes: Vec<String>,
    #[command(flatten)]
    input: InputArgs,
    /// Starting value `family:name=value`; a family needs all of its parameters
    #[arg(long = "init", value_name = "FAMILY:NAME=VALUE")]
    init: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, required_unless_present = "swiss_re")]
    family: Option<String>,
    /// Parameter `name=value`; repeat for each parameter
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// MBBEFD curve from the one-parameter Swiss Re family
    #[arg(long = "swiss-re", value_name = "C", conflicts_with_all = ["family", "params"])]
    swiss_re: Option<f64>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of rows, at z = i/grid for i = 0..grid
    #[arg(long, default_value_t = 100)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    /// Bad input, unknown names, parameters out of domain.
    Input(String),
    /// The optimizer failed or did not converge.
    Fit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::FitFailure(_) => Failure::Fit(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let res = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Fit(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn parse_pair(s: &str) -> Result<(String, f64), Failure> {
    let (k, v) = s.split_once('=').ok_or_else(|| Failure::Input(format!("expected NAME=VALUE, got `{s}`")))?;
    let v: f64 = v.trim().parse().map_err(|_| Failure::Input(format!("`{v}` is not a number in `{s}`")))?;
    Ok((k.trim().to_string(), v))
}

fn load(input: &InputArgs) -> Result<Vec<f64>, Failure> {
    let schema: claims::Schema = input.schema.parse()?;
    Ok(claims::load_claims(&input.input, schema)?.z_values)
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).and_then(|_| so.flush()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s.into_bytes()
}

fn cmd_fit(a: FitArgs) -> Result<(), Failure> {
    let family: Family = a.family.parse()?;
    let mode: FitMode = a.mode.parse()?;
    let mut opts = FitOptions::default();
    if !a.init.is_empty() {
        let pairs = a.init.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
        let theta = family.params_from_pairs(&pairs)?;
        family.check_fit_domain(&theta)?;
        opts.starts = Some(vec![theta]);
    }
    let z = load(&a.input)?;
    let obs = Observations::new(&z)?;
    let r = fit(family, &obs, mode, &opts)?;
    emit(&a.output.out, &json_bytes(&r.to_json()))?;
    if r.converged {
        Ok(())
    } else {
        Err(Failure::Fit(format!("{} did not converge after {} iterations", family, r.iterations)))
    }
}

fn cmd_compare(a: CompareArgs) -> Result<(), Failure> {
    let families: Vec<Family> = if a.families.is_empty() {
        Family::ALL.to_vec()
    } else {
        a.families.iter().map(|f| f.parse()).collect::<Result<_, _>>()?
    };
    let modes: Vec<FitMode> = if a.modes.is_empty() {
        vec![FitMode::Standard, FitMode::Extended]
    } else {
        a.modes.iter().map(|m| m.parse()).collect::<Result<_, _>>()?
    };

    let mut inits: Vec<(Family, Vec<(String, f64)>)> = Vec::new();
    for s in &a.init {
        let (f, rest) = s
            .split_once(':')
            .ok_or_else(|| Failure::Input(format!("expected FAMILY:NAME=VALUE, got `{s}`")))?;
        let f: Family = f.parse()?;
        let pair = parse_pair(rest)?;
        match inits.iter_mut().find(|(g, _)| *g == f) {
            Some((_, v)) => v.push(pair),
            None => inits.push((f, vec![pair])),
        }
    }

    let z = load(&a.input)?;
    let table = if inits.is_empty() {
        compare(&families, &modes, &z, &FitOptions::default())?
    } else {
        // families with their own starting point are fitted separately and merged
        let mut rows = Vec::new();
        let mut plain = Vec::new();
        for &f in &families {
            match inits.iter().find(|(g, _)| *g == f) {
                Some((_, pairs)) => {
                    let theta = f.params_from_pairs(pairs)?;
                    f.check_fit_domain(&theta)?;
                    let opts = FitOptions { starts: Some(vec![theta]), ..FitOptions::default() };
                    rows.push(compare(&[f], &modes, &z, &opts)?);
                }
                None => plain.push(f),
            }
        }
        if !plain.is_empty() {
            rows.push(compare(&plain, &modes, &z, &FitOptions::default())?);
        }
        merge_tables(rows)
    };

    let bytes = match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            buf
        }
        Format::Json => json_bytes(&table.to_json()),
    };
    emit(&a.output.out, &bytes)
}

fn merge_tables(tables: Vec<bernegger::fitting::ComparisonTable>) -> bernegger::fitting::ComparisonTable {
    let mut it = tables.into_iter();
    let mut first = it.next().expect("at least one table");
    let empirical = first.rows.remove(0);
    let mut rows = first.rows;
    for t in it {
        rows.extend(t.rows.into_iter().skip(1));
    }
    rows.sort_by(|a, b| {
        let key = |r: &bernegger::fitting::ComparisonRow| (r.aic.is_none(), r.aic.unwrap_or(0.0));
        let (fa, xa) = key(a);
        let (fb, xb) = key(b);
        fa.cmp(&fb)
            .then(xa.total_cmp(&xb))
            .then(a.k.cmp(&b.k))
            .then(a.family.cmp(&b.family))
            .then(a.mode.map(FitMode::name).cmp(&b.mode.map(FitMode::name)))
    });
    rows.insert(0, empirical);
    bernegger::fitting::ComparisonTable { rows }
}

/// A model given on the command line. Degenerate MBBEFD parameters
/// (`g = 1` or `b = 0`) have no continuous part and are kept apart.
enum Model {
    Degenerate,
    Regular(bernegger::family::FamilyDistribution<f64>),
}

fn model(m: &ModelArgs) -> Result<Model, Failure> {
    let (family, theta) = match m.swiss_re {
        Some(c) => {
            let p = swiss_re_params(c)?;
            (Family::Mbbefd, vec![p.b, p.g])
        }
        None => {
            let family: Family = m.family.as_deref().unwrap_or_default().parse()?;
            let pairs = m.params.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
            (family, family.params_from_pairs(&pairs)?)
        }
    };
    if family == Family::Mbbefd && MbbefdParams::new(theta[0], theta[1])?.is_degenerate() {
        return Ok(Model::Degenerate);
    }
    Ok(Model::Regular(family.distribution(&theta)?))
}

fn cmd_curve(a: CurveArgs) -> Result<(), Failure> {
    if a.grid < 2 {
        return Err(Failure::Input(format!("grid size must be at least 2, got {}", a.grid)));
    }
    let m = model(&a.model)?;
    let mut out = String::from("z,G,F,f\n");
    for i in 0..a.grid {
        let z = i as f64 / a.grid as f64;
        let (g, cdf, pdf) = match &m {
            Model::Degenerate => (z, 0.0, 0.0),
            Model::Regular(d) => (d.g(z), d.cdf(z), d.pdf(z)),
        };
        out.push_str(&format!("{z},{g},{cdf},{pdf}\n"));
    }
    let (p, mean) = match &m {
        Model::Degenerate => (1.0, 1.0),
        Model::Regular(d) => (d.point_mass(), d.mean()),
    };
    out.push_str(&format!("# point_mass={p},mean={mean}\n"));
    emit(&a.output.out, out.as_bytes())
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let z = match model(&a.model)? {
        Model::Degenerate => vec![1.0; a.n],
        Model::Regular(d) => sample(&d, a.n, a.seed)?,
    };
    let mut buf = Vec::new();
    claims::write_z_csv(&mut buf, &z)?;
    emit(&a.output.out, &buf)
}

fn cmd_stats(a: StatsArgs) -> Result<(), Failure> {
    let z = load(&a.input)?;
    let s = empirical_stats(&z, a.bins)?;
    let bytes = match a.format {
        Format::Json => json_bytes(&serde_json::to_value(&s).expect("stats serialize")),
        Format::Csv => {
            let mut out = String::from("z,kde\n");
            for (x, d) in &s.kde {
                out.push_str(&format!("{x},{d}\n"));
            }
            out.push_str(&format!("# n={},n_censored={},point_mass={},mean={}\n", s.n, s.n_censored, s.point_mass_at_1, s.mean));
            out.into_bytes()
        }
    };
    emit(&a.output.out, &bytes)
}
