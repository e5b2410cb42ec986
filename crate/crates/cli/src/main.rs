use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pqheis_core::eta::x_p_metric_relation_holds;
use pqheis_core::report::{fmt_f64, to_json};
use pqheis_core::{
    derive_eta_closed_forms, eval_dsf, run_sweep, run_verify_suite, spectrum, DeformationParams, Error, EtaSpec,
    GaugeSpec, Requirement, StructureFunctionKind, SweepConfig, SweepRange, VerifyConfig,
};
use serde::Serialize;

/// Truncated Fock-space checks for (p,q)-deformed Heisenberg algebras.
#[derive(Parser, Debug)]
#[command(name = "pqheis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the structure function phi(n).
    Dsf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate E(n) = (phi(n+1) + phi(n)) / 2.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification suite at one parameter point.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Extra check to demand: x-hermitian or p-hermitian.
        #[arg(long, value_parser = parse_with::<Requirement>)]
        require: Vec<Requirement>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Derive the X and P metrics for a linear ladder metric.
    Eta {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the suite over a (p, q, mu) grid, one JSON line per point.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// start:stop:step
        #[arg(long, value_parser = parse_with::<SweepRange>)]
        p_range: Option<SweepRange>,
        #[arg(long, value_parser = parse_with::<SweepRange>)]
        q_range: Option<SweepRange>,
        #[arg(long, value_parser = parse_with::<SweepRange>)]
        mu_range: Option<SweepRange>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// undeformed, scaled-linear, symmetric-pq, nonstandard-pq, two-sided-equal-gh or custom
    #[arg(long, default_value = "undeformed")]
    kind: String,
    /// Comma-separated phi(0), phi(1), ... for --kind custom.
    #[arg(long)]
    table: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    #[arg(long, default_value_t = pqheis_core::fock::DEFAULT_DIM)]
    dim: usize,
    #[arg(long, default_value_t = pqheis_core::suite::DEFAULT_MARGIN)]
    margin: usize,
    /// symmetric, case-a, case-b or w:g1,g0
    #[arg(long, value_parser = parse_with::<GaugeSpec>, conflicts_with = "eta_a")]
    gauge: Option<GaugeSpec>,
    /// Ladder metric Q^(c1*N+c0) as qpow:0,c1,c0; selects the gauge realizing it.
    #[arg(long, value_parser = parse_eta)]
    eta_a: Option<EtaSpec>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_eta(s: &str) -> Result<EtaSpec, String> {
    EtaSpec::parse_any(s).map_err(|e| e.to_string())
}

impl ModelArgs {
    fn kind(&self) -> Result<StructureFunctionKind, Error> {
        if self.kind == "custom" {
            let table = self.table.as_deref().ok_or_else(|| Error::Parse("--kind custom needs --table".into()))?;
            let values = table
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad table value '{v}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(StructureFunctionKind::Custom(values));
        }
        if self.table.is_some() {
            return Err(Error::Parse("--table only applies to --kind custom".into()));
        }
        self.kind.parse()
    }

    fn params(&self) -> Result<DeformationParams, Error> {
        DeformationParams::new(self.p, self.q)?.with_mu(self.mu)?.with_hbar(self.hbar)
    }
}

impl MatrixArgs {
    fn gauge(&self) -> Result<GaugeSpec, Error> {
        match (&self.eta_a, self.gauge) {
            (Some(eta), _) => GaugeSpec::from_eta_a(eta),
            (None, Some(g)) => Ok(g),
            (None, None) => Ok(GaugeSpec::symmetric()),
        }
    }

    fn config(&self, model: &ModelArgs, require: Vec<Requirement>) -> Result<VerifyConfig, Error> {
        let config = VerifyConfig {
            kind: model.kind()?,
            params: model.params()?,
            gauge: self.gauge()?,
            dim: self.dim,
            margin: self.margin,
            require,
        };
        config.validate()?;
        Ok(config)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DsfRow {
    n: u32,
    phi: f64,
}

#[derive(Serialize)]
struct EtaReport {
    eta_a: EtaSpec,
    eta_a_right: EtaSpec,
    gauge: GaugeSpec,
    eta_x: EtaSpec,
    eta_p: EtaSpec,
    x_hermitian: bool,
    p_hermitian: bool,
    metric_relation_holds: bool,
}

/// Ok(true) when everything requested passed.
fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Dsf { model, n_max, output } => {
            let kind = model.kind()?;
            let params = model.params()?;
            let rows = (0..=n_max)
                .map(|n| Ok(DsfRow { n, phi: eval_dsf(&kind, &params, n)? }))
                .collect::<Result<Vec<_>, Error>>()?;
            let text = match output.format {
                Format::Json => to_json(&rows)? + "\n",
                Format::Csv => rows.iter().fold("n,phi\n".to_string(), |acc, r| acc + &format!("{},{}\n", r.n, fmt_f64(r.phi))),
                Format::Text => rows.iter().map(|r| format!("{:>4}  {}\n", r.n, fmt_f64(r.phi))).collect(),
            };
            emit(&text, output.out.as_ref())?;
            Ok(true)
        }
        Command::Spectrum { model, n_max, output } => {
            let table = spectrum(&model.kind()?, &model.params()?, n_max)?;
            for (n, a, b) in table.monotonicity_findings() {
                eprintln!("finding: E({}) = {} is not above E({n}) = {}", n + 1, fmt_f64(b), fmt_f64(a));
            }
            let text = match output.format {
                Format::Json => to_json(&table)? + "\n",
                Format::Csv => table.to_csv(),
                Format::Text => table.levels.iter().map(|l| format!("{:>4}  {}\n", l.n, fmt_f64(l.energy))).collect(),
            };
            emit(&text, output.out.as_ref())?;
            Ok(true)
        }
        Command::Verify { model, matrix, require, output } => {
            let report = run_verify_suite(&matrix.config(&model, require)?)?;
            let text = match output.format {
                Format::Json => to_json(&report)? + "\n",
                Format::Csv => report.checks.iter().fold("name,residual,tolerance,pass\n".to_string(), |acc, c| {
                    acc + &format!("\"{}\",{},{},{}\n", c.name.replace('"', "\"\""), fmt_f64(c.residual), fmt_f64(c.tolerance), c.pass)
                }),
                Format::Text => {
                    let mut s: String = report
                        .checks
                        .iter()
                        .map(|c| {
                            let status = if c.pass { "PASS" } else { "FAIL" };
                            format!("{status}  {:<24} tol {:<24} {}\n", fmt_f64(c.residual), fmt_f64(c.tolerance), c.name)
                        })
                        .collect();
                    let failed = report.failures().count();
                    s.push_str(&format!("{} checks, {failed} failed\n", report.checks.len()));
                    s
                }
            };
            emit(&text, output.out.as_ref())?;
            Ok(report.pass)
        }
        Command::Eta { model, matrix, output } => {
            let gauge = matrix.gauge()?;
            let eta_a = matrix.eta_a.unwrap_or_else(|| gauge.eta_a());
            let (eta_x, eta_p) = derive_eta_closed_forms(&eta_a)?;
            // the parameters are not needed for the exact exponents, but are
            // validated so that bad input is reported uniformly
            model.params()?;
            let report = EtaReport {
                eta_a_right: pqheis_core::eta::right_form_of(&eta_a),
                eta_a,
                gauge,
                x_hermitian: eta_x.is_constant(),
                p_hermitian: eta_p.is_constant(),
                metric_relation_holds: x_p_metric_relation_holds(&eta_x, &eta_p),
                eta_x,
                eta_p,
            };
            let text = match output.format {
                Format::Json => to_json(&report)? + "\n",
                Format::Csv => format!(
                    "eta_a,eta_a_right,gauge,eta_x,eta_p\n{},{},{},{},{}\n",
                    report.eta_a, report.eta_a_right, report.gauge, report.eta_x, report.eta_p
                ),
                Format::Text => format!(
                    "eta_a       {}\neta_a right {}\ngauge       {}\neta_X       {}\neta_P       {}\n",
                    report.eta_a, report.eta_a_right, report.gauge, report.eta_x, report.eta_p
                ),
            };
            emit(&text, output.out.as_ref())?;
            Ok(true)
        }
        Command::Sweep { model, matrix, p_range, q_range, mu_range, out } => {
            let config = SweepConfig { base: matrix.config(&model, Vec::new())?, p_range, q_range, mu_range };
            let records = run_sweep(&config)?;
            let mut text = String::new();
            for r in &records {
                text.push_str(&to_json(r)?);
                text.push('\n');
            }
            emit(&text, out.as_ref())?;
            Ok(records.iter().all(|r| r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
