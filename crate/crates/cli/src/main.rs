use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dimer_core::entropy::EntropyRegistry;
use dimer_core::{
    CountTarget, Error, LatticeFamily, LatticeSpec, MethodRegistry, PlaneGraph, Precision, QuadratureSpec,
    SymmetricQuotient,
};

const EXIT_USAGE: u8 = 1;
const EXIT_ROUNDING: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Exact perfect-matching counts and dimer entropies.
#[derive(Parser, Debug)]
#[command(name = "dimer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a lattice as a plane graph or, with --quotient, as a symmetric quotient.
    Generate {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Emit the quotient form (cylinder families only).
        #[arg(long)]
        quotient: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Count perfect matchings with one method.
    Count {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value = "fkt", value_parser = ["brute", "fkt", "product", "closed"])]
        method: String,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
    /// Evaluate entropy formulas; prints `name value error` per line.
    Entropy {
        /// Formula to evaluate; repeatable. Defaults to all.
        #[arg(long = "formula")]
        formulas: Vec<String>,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
    /// Run every applicable method and compare.
    Verify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Corrupt the Pfaffian orientation before counting (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
    /// Counts and finite-size entropies over a grid of sizes, as CSV.
    Table {
        #[arg(long)]
        lattice: LatticeFamily,
        /// Sizes such as `3`, `1..4` (inclusive) or `8,16,32`.
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "fkt", value_parser = ["brute", "fkt", "product", "closed"])]
        method: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long, required_unless_present = "input")]
    lattice: Option<LatticeFamily>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    /// Read a graph or quotient file instead of generating a lattice.
    #[arg(long, conflicts_with = "lattice")]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PrecisionArgs {
    /// Target decimal digits for quadrature and extended-precision rounding.
    #[arg(long)]
    precision: Option<u32>,
}

impl PrecisionArgs {
    fn numeric(&self) -> Precision {
        self.precision.map(Precision::from_digits).unwrap_or_default()
    }

    fn quadrature(&self) -> QuadratureSpec {
        self.precision.map(QuadratureSpec::from_digits).unwrap_or_default()
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::RoundingGuardFailure { .. }) => EXIT_ROUNDING,
            Failure::Mismatch => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        }
    }
}

fn lattice_spec(family: LatticeFamily, args: &LatticeArgs) -> Result<LatticeSpec, Error> {
    if family == LatticeFamily::Hexagon {
        let side = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::InvalidParameter(format!("hexagon needs --{name}")));
        return LatticeSpec::hexagon(side(args.a, "a")?, side(args.b, "b")?, side(args.c, "c")?);
    }
    let m = args.m.ok_or_else(|| Error::InvalidParameter(format!("{family} needs --m")))?;
    let n = args.n.ok_or_else(|| Error::InvalidParameter(format!("{family} needs --n")))?;
    LatticeSpec::new(family, m, n)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn target(args: &LatticeArgs) -> Result<CountTarget, Failure> {
    if let Some(path) = &args.input {
        let text = read(path)?;
        let header = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty());
        return Ok(if header == Some("symmetric-quotient v1") {
            CountTarget::Quotient(SymmetricQuotient::parse(&text)?)
        } else {
            CountTarget::Graph(PlaneGraph::parse(&text)?)
        });
    }
    let family = args.lattice.expect("clap requires --lattice without --input");
    Ok(CountTarget::Lattice(lattice_spec(family, args)?))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

/// Accepts `k`, `lo..hi` (inclusive) and comma-separated lists of either.
fn parse_sizes(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidParameter(format!("bad size list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            lattice,
            quotient,
            output,
        } => {
            let target = target(&lattice)?;
            let text = if quotient {
                match target.quotient()? {
                    Some(q) => q.to_text(),
                    None => {
                        return Err(Error::InvalidParameter(format!("{target} has no quotient form")).into());
                    }
                }
            } else {
                target.graph()?.to_text()
            };
            emit(output.as_deref(), &text)
        }
        Command::Count {
            lattice,
            method,
            precision,
        } => {
            let target = target(&lattice)?;
            let registry = MethodRegistry::default();
            let count = registry.get(&method)?.count(&target, precision.numeric())?;
            emit(None, &format!("{count}\n"))
        }
        Command::Entropy { formulas, precision } => {
            let registry = EntropyRegistry::default();
            let spec = precision.quadrature();
            let chosen: Vec<_> = if formulas.is_empty() {
                registry.iter().collect()
            } else {
                formulas
                    .iter()
                    .map(|name| {
                        registry.get(name).ok_or_else(|| {
                            Error::InvalidParameter(format!(
                                "unknown formula `{name}`; known: {}",
                                registry.names().join(", ")
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?
            };
            let mut text = String::new();
            for f in chosen {
                let e = f.evaluate(&spec)?;
                text.push_str(&format!("{} {:.10} {:.10}\n", f.name(), e.value, e.error));
            }
            emit(None, &text)
        }
        Command::Verify {
            lattice,
            inject_fault,
            precision,
        } => {
            let target = target(&lattice)?;
            let registry = if inject_fault {
                MethodRegistry::with_fault_injection()
            } else {
                MethodRegistry::default()
            };
            let results = registry.cross_check(&target, precision.numeric());
            let mut text = format!("{target}\n");
            let mut values = Vec::new();
            for (name, result) in &results {
                match result {
                    Ok(c) => {
                        text.push_str(&format!("{name:<8} {c}\n"));
                        values.push(Some(c.clone()));
                    }
                    Err(e) => {
                        text.push_str(&format!("{name:<8} error: {e}\n"));
                        values.push(None);
                    }
                }
            }
            let agree = values.iter().all(|v| v.is_some() && *v == values[0]);
            text.push_str(if agree { "agree\n" } else { "MISMATCH\n" });
            emit(None, &text)?;
            if agree {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
        Command::Table {
            lattice,
            m,
            n,
            method,
            output,
            precision,
        } => {
            let registry = MethodRegistry::default();
            let method = registry.get(&method)?;
            let mut text = String::from("m,n,count,entropy_finite\n");
            for &mi in &parse_sizes(&m)? {
                for &ni in &parse_sizes(&n)? {
                    // hexagon rows use an m x m x n box
                    let spec = if lattice == LatticeFamily::Hexagon {
                        LatticeSpec::hexagon(mi, mi, ni)?
                    } else {
                        LatticeSpec::new(lattice, mi, ni)?
                    };
                    let count = method.count(&spec.into(), precision.numeric())?;
                    let entropy = 2.0 * count.ln() / spec.vertex_count() as f64;
                    text.push_str(&format!("{mi},{ni},{count},{entropy:.10}\n"));
                }
            }
            emit(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(path, e) => eprintln!("error: {}: {e}", path.display()),
                Failure::Mismatch => eprintln!("error: methods disagree"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("3").unwrap(), vec![3]);
        assert_eq!(parse_sizes("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_sizes("1..=2,8").unwrap(), vec![1, 2, 8]);
        assert!(parse_sizes("4..1").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn exit_codes_are_stable() {
        let rounding = Failure::Core(Error::RoundingGuardFailure {
            what: "product".into(),
            value: "1.5".into(),
            distance: 0.5,
            guard: 0.25,
        });
        assert_eq!(rounding.exit_code(), 2);
        assert_eq!(Failure::Mismatch.exit_code(), 3);
        assert_eq!(Failure::Core(Error::NotBipartite).exit_code(), 1);
    }
}
