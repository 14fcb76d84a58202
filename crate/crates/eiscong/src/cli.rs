//! Argument definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::{commands, load, lvalue, report, CliError, Format, Output};

#[derive(Debug, Parser)]
#[command(name = "eiscong", version, about = "Eisenstein congruences and critical L-value ratios, reproduced at desk scale")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Extra JSON-lines data file; repeatable, merged after the bundled tables.
    #[arg(long = "data", global = true, value_name = "FILE")]
    pub data: Vec<PathBuf>,

    /// Do not load the bundled tables.
    #[arg(long, global = true)]
    pub no_bundled: bool,

    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    pub out: Option<Format>,

    /// Print the provenance of the loaded data and exit.
    #[arg(long)]
    pub seed_manifest: bool,

    #[command(subcommand)]
    pub cmd: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Level-1 eigenforms.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// The Hecke eigenvalue registry.
    #[command(subcommand)]
    Data(DataCmd),
    /// Resolution chain from traces to eigenvalues for a case.
    Resolve {
        #[arg(long)]
        case: String,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Congruence checks.
    #[command(subcommand)]
    Congruence(CongruenceCmd),
    /// Numerical L-values and ratios.
    #[command(subcommand)]
    Lvalue(LvalueCmd),
    /// Exact rational from a decimal via continued fractions.
    Rationalize {
        #[arg(long, allow_hyphen_values = true)]
        decimal: String,
        /// Partial-quotient threshold (default from config).
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Factor an integer.
    Factor {
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Reproduction reports.
    Report {
        #[arg(value_enum)]
        name: ReportName,
        /// Worker threads (0 = automatic).
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FormsCmd {
    /// Hecke eigenvalue a_p of the weight-k eigenform.
    Ap {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        p: u64,
    },
    /// q-expansion coefficients a_0..a_N.
    Expand {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum DataCmd {
    /// Spaces and record counts.
    List,
    /// Validate files against the loaded data and report what they add.
    Import {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Records of one space.
    Show { space: String },
}

#[derive(Debug, Subcommand)]
pub enum CongruenceCmd {
    Check {
        #[arg(long)]
        case: String,
        /// Override the modulus.
        #[arg(long)]
        q: Option<u64>,
        /// Largest prime to check.
        #[arg(long)]
        pmax: Option<u64>,
    },
    /// Bundled case names.
    List,
}

#[derive(Debug, Args)]
pub struct LArgs {
    /// zeta | elliptic:K | spinor:J,K | triple:K1,K2,K3
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub digits: Option<u32>,
    /// Number of Dirichlet coefficients (default: estimated from the tail bound).
    #[arg(long)]
    pub coeffs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum LvalueCmd {
    /// L(s) with its error envelope.
    Eval {
        #[command(flatten)]
        l: LArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// L(l1) / (π^(d(l1−l2)/2) L(l2)).
    Ratio {
        #[command(flatten)]
        l: LArgs,
        #[arg(long)]
        l1: String,
        #[arg(long)]
        l2: String,
    },
    /// A ratio followed by rational reconstruction.
    Rationalize {
        #[command(flatten)]
        l: LArgs,
        #[arg(long)]
        l1: String,
        #[arg(long)]
        l2: String,
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Functional-equation residual at the given points.
    Fe {
        #[command(flatten)]
        l: LArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        probes: Vec<String>,
    },
    /// Estimated coefficient count for a target precision.
    Coeffs {
        #[command(flatten)]
        l: LArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ReportName {
    Harder41,
    So43Suite,
    So44Suite,
    AppendixSweep,
    Roots,
}

/// Everything a command needs besides its own arguments.
pub struct Ctx {
    pub cfg: Config,
    pub data: eiscong_core::dataset::Dataset,
    pub out: Option<Format>,
}

impl Ctx {
    pub fn format(&self, default: Format) -> Format {
        self.out.unwrap_or(default)
    }
}

pub fn dispatch(cli: Cli) -> Output {
    let mut manifest = String::new();
    let result = (|| -> Result<Output, CliError> {
        let mut cfg = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        cfg.data.extend(cli.data.iter().cloned());
        if cli.no_bundled {
            cfg.bundled = false;
        }
        let data = load::load(&cfg.data, cfg.bundled)?;
        for line in load::manifest_lines(&data) {
            manifest.push_str(&line);
            manifest.push('\n');
        }
        let ctx = Ctx { cfg, data, out: cli.out };
        if cli.seed_manifest {
            return Ok(commands::seed_manifest(&ctx));
        }
        let Some(cmd) = cli.cmd else {
            return Err(CliError::usage("no command given; see --help"));
        };
        match cmd {
            Cmd::Forms(c) => commands::forms(&ctx, c),
            Cmd::Data(c) => commands::data(&ctx, c),
            Cmd::Resolve { case, p } => commands::resolve(&ctx, &case, p),
            Cmd::Congruence(CongruenceCmd::Check { case, q, pmax }) => commands::congruence_check(&ctx, &case, q, pmax),
            Cmd::Congruence(CongruenceCmd::List) => commands::congruence_list(&ctx),
            Cmd::Lvalue(c) => lvalue::run(&ctx, c),
            Cmd::Rationalize { decimal, threshold } => commands::rationalize(&ctx, &decimal, threshold.as_deref()),
            Cmd::Factor { n } => commands::factor(&ctx, &n),
            Cmd::Report { name, threads } => report::run(&ctx, name, threads),
        }
    })();
    let mut out = match result {
        Ok(o) => o,
        Err(e) => Output { code: e.code, stdout: String::new(), stderr: format!("error: {}\n", e.msg) },
    };
    out.stderr.insert_str(0, &manifest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exit;

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_for_usage() {
        assert_eq!(crate::run(["eiscong", "--bogus"]).code, Exit::Usage);
        assert_eq!(crate::run(["eiscong"]).code, Exit::Usage);
        assert_eq!(crate::run(["eiscong", "--help"]).code, Exit::Ok);
        assert_eq!(crate::run(["eiscong", "factor", "12", "--frobnicate"]).code, Exit::Usage);
        let o = crate::run(["eiscong", "factor", "12"]);
        assert!(o.stderr.contains("sha256="), "{}", o.stderr);
    }
}
