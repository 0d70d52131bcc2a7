use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use arrowkh::verify::{self, Suite};
use arrowkh::{
    homology, jones, parse_gauss, parse_pd, ArrowConvention, Diagram, Error, GradingConvention,
    HomologyGroup, HomologyTable, RingParams,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_PARSE: u8 = 1;
const EXIT_SIZE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Khovanov homology of link diagrams.
#[derive(Parser, Debug)]
#[command(name = "arrowkh", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    homology: HomologyArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology table of a diagram (the default).
    Homology(HomologyArgs),
    /// Unreduced Jones polynomial by state summation.
    Jones(JonesArgs),
    /// Run verification suites over the built-in corpus.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
#[group(id = "input", multiple = false)]
struct Input {
    /// Planar-diagram code, e.g. "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"; empty for the unknot.
    #[arg(long)]
    pd: Option<String>,
    /// Gauss code, e.g. "O1-U2-O3-U1-O2-U3-".
    #[arg(long)]
    gauss: Option<String>,
    /// File holding a PD or Gauss code.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Theory {
    #[default]
    Even,
    Odd,
    Custom,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Table,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Convention {
    #[default]
    Standard,
    Paper,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Arrows {
    #[default]
    Normal,
    Flipped,
}

#[derive(Args, Debug, Clone)]
struct HomologyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t)]
    theory: Theory,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<i8>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<i8>,
    #[arg(long, allow_negative_numbers = true)]
    z: Option<i8>,
    /// Arrow complex instead of the unreduced complex.
    #[arg(long)]
    reduced: bool,
    #[arg(long, value_enum, default_value_t)]
    grading_convention: Convention,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long, value_enum, default_value_t)]
    arrows: Arrows,
}

#[derive(Args, Debug, Clone)]
struct JonesArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t)]
    grading_convention: Convention,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Include the arrow complex in suites that cover both theories.
    #[arg(long)]
    reduced: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: EXIT_PARSE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Diagram(_) | Error::UnknownSymbol(_) => EXIT_PARSE,
            Error::TooLarge { .. } => EXIT_SIZE,
            _ => EXIT_INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<Convention> for GradingConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Standard => GradingConvention::Standard,
            Convention::Paper => GradingConvention::Paper,
        }
    }
}

fn load(input: &Input) -> Result<(String, Diagram), Failure> {
    let (text, gauss) = match (&input.pd, &input.gauss, &input.file) {
        (Some(pd), _, _) => (pd.clone(), false),
        (_, Some(g), _) => (g.clone(), true),
        (_, _, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
            let text = text.trim().to_string();
            let gauss = !text.is_empty() && !text.contains('[');
            (text, gauss)
        }
        _ => return Err(Failure::parse("one of --pd, --gauss or --file is required")),
    };
    let d = if gauss { parse_gauss(&text) } else { parse_pd(&text) };
    Ok((text, d.map_err(Error::from)?))
}

fn ring(args: &HomologyArgs) -> Result<RingParams, Failure> {
    match args.theory {
        Theory::Even => Ok(RingParams::EVEN),
        Theory::Odd => Ok(RingParams::ODD),
        Theory::Custom => {
            let (Some(x), Some(y), Some(z)) = (args.x, args.y, args.z) else {
                return Err(Failure::parse("--theory custom needs --x, --y and --z"));
            };
            RingParams::new(x, y, z).ok_or_else(|| Failure::parse("--x, --y and --z must each be 1 or -1"))
        }
    }
}

#[derive(Serialize)]
struct HomologyOutput<'a> {
    input: &'a str,
    theory: RingParams,
    reduced: bool,
    convention: &'static str,
    groups: &'a [HomologyGroup],
}

fn cell(g: Option<&HomologyGroup>) -> String {
    let Some(g) = g else { return ".".into() };
    let mut parts = Vec::new();
    match g.betti {
        0 => {}
        1 => parts.push("Z".to_string()),
        b => parts.push(format!("Z^{b}")),
    }
    parts.extend(g.torsion.iter().map(|k| format!("Z/{k}")));
    parts.join("+")
}

fn render_table(t: &HomologyTable) -> String {
    if t.groups.is_empty() {
        return "0\n".into();
    }
    let hs: BTreeSet<i32> = t.groups.iter().map(|g| g.h).collect();
    let qs: BTreeSet<i32> = t.groups.iter().map(|g| g.q).collect();
    let (hmin, hmax) = (*hs.first().unwrap(), *hs.last().unwrap());
    let mut rows = vec![std::iter::once("q\\h".to_string()).chain((hmin..=hmax).map(|h| h.to_string())).collect::<Vec<_>>()];
    for &q in qs.iter().rev() {
        rows.push(std::iter::once(q.to_string()).chain((hmin..=hmax).map(|h| cell(t.get(h, q)))).collect());
    }
    let widths: Vec<usize> = (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap()).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    out
}

fn cmd_homology(args: &HomologyArgs) -> Result<String, Failure> {
    let (text, d) = load(&args.input)?;
    let p = ring(args)?;
    let conv = match args.arrows {
        Arrows::Normal => ArrowConvention::Normal,
        Arrows::Flipped => ArrowConvention::Flipped,
    };
    let complex = if args.reduced {
        arrowkh::reduced::build_reduced_with(&d, conv)?
    } else {
        arrowkh::complex::build_unreduced_with(&d, p, conv)?
    };
    let convention = GradingConvention::from(args.grading_convention);
    let table = homology(&complex)?.in_convention(convention);
    Ok(match args.format {
        Format::Json => {
            let out = HomologyOutput { input: &text, theory: p, reduced: args.reduced, convention: convention.name(), groups: &table.groups };
            serde_json::to_string(&out).expect("output serializes") + "\n"
        }
        Format::Table => {
            let kind = if args.reduced { "reduced" } else { "unreduced" };
            format!("{kind} homology, theory {p}, {} grading\n{}", convention.name(), render_table(&table))
        }
    })
}

#[derive(Serialize)]
struct JonesOutput<'a> {
    input: &'a str,
    convention: &'static str,
    jones: String,
    terms: Vec<(i32, i64)>,
}

fn cmd_jones(args: &JonesArgs) -> Result<String, Failure> {
    let (text, d) = load(&args.input)?;
    let convention = GradingConvention::from(args.grading_convention);
    let mut j = jones(&d)?;
    if convention == GradingConvention::Paper {
        j = j.invert();
    }
    Ok(match args.format {
        Format::Json => {
            let out = JonesOutput { input: &text, convention: convention.name(), jones: j.to_string(), terms: j.terms().collect() };
            serde_json::to_string(&out).expect("output serializes") + "\n"
        }
        Format::Table => format!("{j}\n"),
    })
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    suite: &'static str,
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), Failure> {
    let opts = verify::Options { reduced: args.reduced };
    let report = if args.suite == "all" {
        verify::run_all(opts)?
    } else {
        let suite: Suite = args.suite.parse().map_err(Failure::parse)?;
        verify::run(suite, opts)?
    };
    let out = match args.format {
        Format::Json => {
            let checks: Vec<CheckOutput> = report
                .checks
                .iter()
                .map(|c| CheckOutput { suite: c.suite.name(), name: &c.name, passed: c.passed, detail: &c.detail })
                .collect();
            serde_json::to_string(&checks).expect("output serializes") + "\n"
        }
        Format::Table => {
            let mut s = String::new();
            for c in &report.checks {
                writeln!(s, "{c}").unwrap();
            }
            let (pass, fail) = report.count();
            writeln!(s, "{pass} passed, {fail} failed").unwrap();
            s
        }
    };
    Ok((out, report.passed()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        None => cmd_homology(&cli.homology).map(|s| (s, true)),
        Some(Command::Homology(a)) => cmd_homology(a).map(|s| (s, true)),
        Some(Command::Jones(a)) => cmd_jones(a).map(|s| (s, true)),
        Some(Command::Verify(a)) => cmd_verify(a),
    };
    match result {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(EXIT_INTERNAL)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let t = HomologyTable::from_groups(vec![
            HomologyGroup { h: 0, q: 1, betti: 1, torsion: vec![] },
            HomologyGroup { h: 2, q: 5, betti: 2, torsion: vec![2] },
        ]);
        assert_eq!(render_table(&t), "q\\h  0  1        2\n  5  .  .  Z^2+Z/2\n  1  Z  .        .\n");
        assert_eq!(render_table(&HomologyTable::default()), "0\n");
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::TooLarge { what: "crossings", value: 20, limit: 16 }).code, EXIT_SIZE);
        assert_eq!(Failure::from(Error::NotAComplex { h: 0 }).code, EXIT_INTERNAL);
        let e = parse_pd("X[1,2,3]").unwrap_err();
        assert_eq!(Failure::from(Error::from(e)).code, EXIT_PARSE);
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
