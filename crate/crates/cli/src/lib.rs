//! `varpi`: batch front end. Reports are versioned JSON (or CSV for the
//! eigencurve grid); failures are JSON on stderr with a typed exit code.

pub mod commands;
pub mod errors;
pub mod schema;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use varpi_core::{Ground, Rational, Valuation};

use commands::{Grid, ToyKind};
pub use errors::CliError;

#[derive(Debug, Parser)]
#[command(name = "varpi", version, about = "Exact p-adic computations for canonical subgroups and slopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Certified digits of the uniformizer
    #[arg(long, global = true, env = "VARPI_PREC", default_value_t = 20)]
    pub prec: i64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GroundArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub e: i64,
    #[arg(long, default_value_t = 1)]
    pub f: usize,
}

impl GroundArgs {
    fn ground(&self) -> Result<Ground, CliError> {
        Ok(Ground::new(self.p, self.e, self.f)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gauss sums and Raynaud constants of the ground
    Constants(GroundArgs),
    /// Classify the height-two series with Hasse valuation w
    Polygon {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_parser = parse_rational)]
        w: Rational,
    },
    /// Hodge-Tate report, comultiplication table and Hopf checks
    Canonical {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_parser = parse_rational)]
        w: Rational,
        /// unit factor of the Hasse-invariant root
        #[arg(long, default_value_t = 1)]
        unit: i64,
    },
    /// Accessibility, disk threshold and growth bound of a character
    Weights {
        /// required unless a character file supplies the tower
        #[arg(long, required_unless_present = "character")]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        e: i64,
        #[arg(long, default_value_t = 1)]
        f: usize,
        /// val(s), as a rational or "inf"
        #[arg(long, value_parser = parse_valuation, allow_hyphen_values = true, conflicts_with = "character", required_unless_present = "character")]
        s_val: Option<Valuation>,
        #[arg(long)]
        r: Option<u32>,
        /// character file {"schema", "tower", "character": {"s", "i", "r"}}
        #[arg(long)]
        character: Option<PathBuf>,
        /// growth to validate against the bound
        #[arg(long, value_parser = parse_rational)]
        w: Option<Rational>,
    },
    /// Fredholm series and slopes at one integer sigma
    Charpoly {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sigma: i64,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_parser = parse_rational)]
        nu: Option<Rational>,
    },
    /// Eigencurve points over an integer sigma grid, optionally with a branch
    Eigencurve {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        grid_start: i64,
        #[arg(long, allow_hyphen_values = true)]
        grid_step: i64,
        #[arg(long)]
        grid_count: usize,
        #[arg(long)]
        degree: Option<usize>,
        /// slope cap for emitted points
        #[arg(long, value_parser = parse_rational)]
        nu: Rational,
        /// track the lowest-slope branch from the first grid point
        #[arg(long, value_parser = parse_rational)]
        deform_nu: Option<Rational>,
    },
    /// Operator-family files
    #[command(subcommand)]
    Family(FamilyCommand),
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// Re-emit a family file in canonical form
    Canonicalize { path: PathBuf },
    /// Emit a built-in toy family
    Toy {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_parser = parse_rational)]
        w: Rational,
        #[arg(long, value_enum, default_value_t = ToyArg::Restriction)]
        kind: ToyArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyArg {
    Restriction,
    Dense,
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let bad = || format!("expected an integer or num/den, got \"{s}\"");
    match s.split_once('/') {
        None => s.trim().parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(n, d))
        }
    }
}

pub fn parse_valuation(s: &str) -> Result<Valuation, String> {
    if matches!(s, "inf" | "infinity") {
        return Ok(Valuation::Infinite);
    }
    parse_rational(s).map(Valuation::Finite)
}

/// Runs one command and returns the report text.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Eigencurve { .. }) {
        return Err(CliError::Usage("csv output is only available for eigencurve".into()));
    }
    let json = |v: serde_json::Value| schema::canonical(&v);
    Ok(match &cli.command {
        Command::Constants(g) => json(commands::constants(g.ground()?, cli.prec)?),
        Command::Polygon { ground, w } => json(commands::polygon(ground.ground()?, *w, cli.prec)?),
        Command::Canonical { ground, w, unit } => {
            json(commands::canonical_group(ground.ground()?, *w, cli.prec, *unit)?)
        }
        Command::Weights {
            p,
            e,
            f,
            s_val,
            r,
            character,
            w,
        } => {
            let (g, val_s, r, component) = match character {
                Some(path) => {
                    let chi = commands::load_character(path)?;
                    let g = Ground::of(chi.s.tower());
                    if p.is_some_and(|p| Ground::new(p, *e, *f).ok() != Some(g)) {
                        return Err(CliError::Usage("ground flags disagree with the character tower".into()));
                    }
                    (g, chi.s.val(), r.unwrap_or(chi.r), Some(chi.component_index()))
                }
                None => {
                    let p = p.expect("enforced by clap");
                    let g = Ground::new(p, *e, *f)?;
                    let r = r.ok_or_else(|| CliError::Usage("--r is required without --character".into()))?;
                    (g, s_val.expect("enforced by clap"), r, None)
                }
            };
            json(commands::weights(g, val_s, r, *w, component)?)
        }
        Command::Charpoly {
            family,
            sigma,
            degree,
            nu,
        } => {
            let fam = commands::load_family(family)?;
            json(commands::charpoly(&fam, *sigma, *degree, *nu)?)
        }
        Command::Eigencurve {
            family,
            r,
            grid_start,
            grid_step,
            grid_count,
            degree,
            nu,
            deform_nu,
        } => {
            let fam = commands::load_family(family)?;
            let grid = Grid {
                start: *grid_start,
                step: *grid_step,
                count: *grid_count,
            };
            let run = commands::eigencurve(&fam, *r, grid, *degree, *nu, *deform_nu)?;
            match cli.format {
                Format::Json => json(run.to_json()),
                Format::Csv => run.to_csv()?,
            }
        }
        Command::Family(FamilyCommand::Canonicalize { path }) => {
            commands::family_canonical(&commands::load_family(path)?)
        }
        Command::Family(FamilyCommand::Toy { ground, rank, w, kind }) => {
            let kind = match kind {
                ToyArg::Restriction => ToyKind::Restriction,
                ToyArg::Dense => ToyKind::Dense,
            };
            commands::family_canonical(&commands::toy_family(ground.ground()?, cli.prec, *rank, *w, kind)?)
        }
    })
}

/// Parses `argv`; help and version requests print and exit 0, other parse
/// failures are reported as JSON usage errors with exit code 2.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::error::ErrorKind;
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 }
        }
        _ => {
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    })
}

/// Runs and writes the report; returns the process exit code.
pub fn dispatch(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(CliError::from)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
