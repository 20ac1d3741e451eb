mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chebpade::Error;
use config::RunConfig;

/// Extended-precision nonlinear Chebyshev-Pade approximants.
#[derive(Parser, Debug)]
#[command(name = "chebpade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Chebyshev coefficients a_k of f.
    Coeffs,
    /// A single approximant F_n: report row, poles, zeros, interpolation points.
    Approx,
    /// Fitted convergence rates against the predicted 2G over n_min..n_max.
    Rates,
    /// Counting measures of F_n and, for Markov functions, the equilibrium reference.
    Measures,
    /// Data behind one of the figures (--figure 1-4).
    Figure,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Function from the registry: sqrt2, cbrt3, logratio, markov, sqrtsum, fig2, fig3, rational, power, chebT, cos.
    #[arg(long = "fn", global = true)]
    function: Option<String>,
    /// Function parameter, repeatable: --param b=0.5+0.5i.
    #[arg(long = "param", value_parser = parse_param, global = true)]
    params: Vec<(String, String)>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "nmin", global = true)]
    n_min: Option<usize>,
    #[arg(long = "nmax", global = true)]
    n_max: Option<usize>,
    /// Number of Chebyshev coefficients to compute.
    #[arg(long = "ncoeffs", global = true)]
    n_coeffs: Option<usize>,
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Evaluation point for rates, repeatable: --z 1.5i.
    #[arg(long = "z", global = true)]
    points: Vec<String>,
    #[arg(long, global = true)]
    figure: Option<u8>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    text.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected key=value, got {text:?}"))
}

impl RunArgs {
    fn into_config(self) -> chebpade::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(f) = self.function {
            cfg.function = f;
        }
        cfg.params.extend(self.params);
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.n_min {
            cfg.n_min = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if self.n_coeffs.is_some() {
            cfg.n_coeffs = self.n_coeffs;
        }
        if let Some(v) = self.precision {
            cfg.precision = v;
        }
        if !self.points.is_empty() {
            cfg.points = self.points;
        }
        if self.figure.is_some() {
            cfg.figure = self.figure;
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotRepresentable { .. } => 2,
        Error::NonConvergence { .. } | Error::QuadratureNonConvergence { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = cli.run.into_config().and_then(|cfg| match cli.command {
        Command::Coeffs => commands::coeffs(&cfg),
        Command::Approx => commands::approx(&cfg),
        Command::Rates => commands::rates(&cfg),
        Command::Measures => commands::measures(&cfg),
        Command::Figure => commands::figure(&cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chebpade: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
