//! Subcommand definitions and dispatch. Every command renders into an
//! [`Outcome`] so output is assembled in deterministic order before printing.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use rhpwn_core::lie::{
    closure_check, jacobi_scan, star_scan, AlgebraKind, IndexRange, SignFlipped, Standard, StructureConstants,
};
use rhpwn_core::oracle::{check_eq1, check_exchange_seed};
use rhpwn_core::sandwich::verify_grid;
use rhpwn_core::scalar::theta;
use rhpwn_core::testfn::{StepFn, StepRecord};
use rhpwn_core::wick::{monomial_commutator, renormalize, smear_bracket, PointLabel, SmearArg};

use crate::dsl::{eval_element, Options};
use crate::parse_range;
use crate::render::{self, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rhpwn", version, about = "Exact verification engine for RHPWN and w-infinity brackets")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// rhpwn, winfinity or witt.
    #[arg(long, default_value = "rhpwn", value_parser = parse_kind)]
    pub kind: AlgebraKind,
    /// Inclusive `a..b`; defaults depend on the kind.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub n_range: Option<IndexRange>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub k_range: Option<IndexRange>,
}

impl ScanArgs {
    fn ranges(&self) -> (IndexRange, IndexRange) {
        let (n, k) = match self.kind {
            AlgebraKind::Rhpwn => (IndexRange::new(0, 6), IndexRange::new(0, 6)),
            AlgebraKind::Winfinity => (IndexRange::new(2, 6), IndexRange::new(-4, 4)),
            AlgebraKind::Witt => (IndexRange::new(2, 2), IndexRange::new(-10, 10)),
        };
        (self.n_range.unwrap_or(n), self.k_range.unwrap_or(k))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate theta_L(n,k;N,K); each argument is an integer or an inclusive range.
    Theta {
        #[arg(allow_hyphen_values = true, value_parser = parse_range)]
        l: IndexRange,
        #[arg(allow_hyphen_values = true, value_parser = parse_range)]
        n: IndexRange,
        #[arg(allow_hyphen_values = true, value_parser = parse_range)]
        k: IndexRange,
        #[arg(allow_hyphen_values = true, value_parser = parse_range)]
        big_n: IndexRange,
        #[arg(allow_hyphen_values = true, value_parser = parse_range)]
        big_k: IndexRange,
        /// Omit rows whose value is zero.
        #[arg(long)]
        nonzero: bool,
    },
    /// Evaluate DSL expressions given as arguments, or one per line on stdin.
    Bracket {
        exprs: Vec<String>,
        /// Accept out-of-domain generator indices.
        #[arg(long)]
        relaxed: bool,
        /// Read `Bh` atoms as Witt generators.
        #[arg(long)]
        witt: bool,
    },
    /// Exhaustive (or seeded sampled) Jacobi identity scan.
    Jacobi {
        #[command(flatten)]
        scan: ScanArgs,
        /// Check this many random triples instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_table: bool,
    },
    /// Check that brackets of in-domain generators stay in the domain.
    Closure {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Check [x,y]* = [y*,x*] on all basis pairs.
    StarCheck {
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Verify the sandwich realization of the w-infinity relations on an index grid.
    VerifyW {
        #[arg(long = "n", allow_hyphen_values = true, value_parser = parse_range, default_value = "2..7")]
        n_range: IndexRange,
        #[arg(long = "k", allow_hyphen_values = true, value_parser = parse_range, default_value = "-4..4")]
        k_range: IndexRange,
    },
    /// Decompose a smeared bracket into regular and singular parts.
    Smear {
        n: i64,
        k: i64,
        big_n: i64,
        big_k: i64,
        /// Step-function JSON file for g (otherwise a symbol).
        #[arg(long)]
        g: Option<PathBuf>,
        /// Step-function JSON file for f (otherwise a symbol).
        #[arg(long)]
        f: Option<PathBuf>,
        /// Treat symbolic test functions as vanishing at 0.
        #[arg(long)]
        s0: bool,
    },
    /// Expand [b_t^+^n b_t^k, b_s^+^N b_s^K] into normally ordered words.
    NormalOrder {
        n: i64,
        k: i64,
        big_n: i64,
        big_k: i64,
        /// Apply the delta-power renormalization.
        #[arg(long)]
        renormalize: bool,
    },
    /// Run the truncated polynomial-representation oracle.
    Oracle {
        /// Indices n,k,N,K range over 0..=max.
        #[arg(long, default_value_t = 4)]
        max: i64,
        #[arg(long, default_value_t = 40)]
        degree: usize,
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        #[arg(long, default_value_t = 16)]
        seed_degree: usize,
    },
}

fn parse_kind(s: &str) -> Result<AlgebraKind, String> {
    AlgebraKind::from_name(s).ok_or_else(|| format!("unknown algebra kind {s:?}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn report(body: String, pass: bool) -> Self {
        Outcome { stdout: body + "\n", stderr: String::new(), code: if pass { EXIT_OK } else { EXIT_FAILED } }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: EXIT_USAGE }
    }
}

pub fn run(cli: &Cli, stdin: &mut dyn BufRead) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Theta { l, n, k, big_n, big_k, nonzero } => {
            let mut rows = Vec::new();
            for l in l.iter() {
                for n in n.iter() {
                    for k in k.iter() {
                        for nn in big_n.iter() {
                            for kk in big_k.iter() {
                                match theta(l, n, k, nn, kk) {
                                    Ok(v) if *nonzero && num_traits::Zero::is_zero(&v) => {}
                                    Ok(v) => rows.push((l, n, k, nn, kk, v)),
                                    Err(e) => return Outcome::usage(e),
                                }
                            }
                        }
                    }
                }
            }
            Outcome::report(render::theta_table(&rows, fmt), true)
        }
        Command::Bracket { exprs, relaxed, witt } => {
            let opts = Options { relaxed: *relaxed, witt: *witt };
            let lines: Vec<String> =
                if exprs.is_empty() { stdin.lines().map_while(Result::ok).collect() } else { exprs.clone() };
            bracket_lines(&lines, opts, fmt)
        }
        Command::Jacobi { scan, sample, seed, corrupt_table } => {
            let (nr, kr) = scan.ranges();
            let table: &dyn StructureConstants = if *corrupt_table { &SignFlipped } else { &Standard };
            match jacobi_scan(table, scan.kind, nr, kr, sample.map(|c| (c, *seed))) {
                Ok(r) => Outcome::report(render::jacobi(&r, fmt), r.pass()),
                Err(e) => Outcome::usage(e),
            }
        }
        Command::Closure { scan } => {
            let (nr, kr) = scan.ranges();
            let r = closure_check(scan.kind, nr, kr);
            Outcome::report(render::pairs("closure", &r, fmt), r.pass())
        }
        Command::StarCheck { scan } => {
            let (nr, kr) = scan.ranges();
            let r = star_scan(scan.kind, nr, kr);
            Outcome::report(render::pairs("star-check", &r, fmt), r.pass())
        }
        Command::VerifyW { n_range, k_range } => match verify_grid(*n_range, *k_range) {
            Ok(reports) => {
                let pass = reports.iter().all(|r| r.pass);
                Outcome::report(render::theorem_grid(&reports, fmt), pass)
            }
            Err(e) => Outcome::usage(e),
        },
        Command::Smear { n, k, big_n, big_k, g, f, s0 } => {
            let arg = |path: &Option<PathBuf>, name: &str| -> Result<SmearArg, String> {
                match path {
                    Some(p) => load_step(p).map(SmearArg::Concrete),
                    None => Ok(SmearArg::symbol(name, *s0)),
                }
            };
            let (ga, fa) = match (arg(g, "g"), arg(f, "f")) {
                (Ok(ga), Ok(fa)) => (ga, fa),
                (Err(e), _) | (_, Err(e)) => return Outcome::usage(e),
            };
            match smear_bracket(*n, *k, &ga, *big_n, *big_k, &fa) {
                Ok(d) => Outcome::report(render::decomposition(&d, fmt), true),
                Err(e) => Outcome::usage(e),
            }
        }
        Command::NormalOrder { n, k, big_n, big_k, renormalize: renorm } => {
            match monomial_commutator(*n, *k, *big_n, *big_k, PointLabel::T, PointLabel::S) {
                Ok(e) => {
                    let e = if *renorm { renormalize(&e) } else { e };
                    Outcome::report(render::wick_expr(&e, fmt), true)
                }
                Err(e) => Outcome::usage(e),
            }
        }
        Command::Oracle { max, degree, m_max, seed_degree } => {
            let mut rows = Vec::new();
            for n in 0..=*max {
                for k in 0..=*max {
                    for nn in 0..=*max {
                        for kk in 0..=*max {
                            rows.push((format!("eq1({n},{k},{nn},{kk}) D={degree}"), check_eq1(n, k, nn, kk, *degree)));
                        }
                    }
                }
            }
            for m in 0..=*m_max {
                rows.push((format!("exchange-seed m={m} D={seed_degree}"), check_exchange_seed(m, *seed_degree)));
            }
            if rows.iter().any(|(_, r)| r.is_err()) {
                let mut out = Outcome::report(render::oracle(&rows, fmt), false);
                out.code = EXIT_USAGE;
                return out;
            }
            let pass = rows.iter().all(|(_, r)| matches!(r, Ok(true)));
            Outcome::report(render::oracle(&rows, fmt), pass)
        }
    }
}

fn bracket_lines(lines: &[String], opts: Options, fmt: Format) -> Outcome {
    let mut out = Outcome::default();
    for line in lines {
        let src = line.trim();
        if src.is_empty() {
            continue;
        }
        match eval_element(src, opts) {
            Ok(e) => {
                out.stdout.push_str(&render::element(&e, fmt));
                out.stdout.push('\n');
            }
            Err(err) => {
                let caret = " ".repeat(err.offset()) + "^";
                out.stderr.push_str(&format!("{err}\n  {src}\n  {caret}\n"));
                out.code = EXIT_USAGE;
            }
        }
    }
    out
}

fn load_step(path: &Path) -> Result<StepFn, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let records: Vec<StepRecord> = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    StepFn::from_records(&records).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str], input: &str) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("rhpwn").chain(args.iter().copied())).unwrap();
        run(&cli, &mut input.as_bytes())
    }

    #[test]
    fn bracket_args_and_stdin() {
        let o = exec(&["bracket", "[B[1,2],B[2,1]]", "[B[2,1],B[1,2]]"], "");
        assert_eq!((o.stdout.as_str(), o.code), ("3*B[2,2]\n-3*B[2,2]\n", 0));
        let o = exec(&["bracket"], "[Bh[2,3], Bh[2,5]]\n\nB[1,1]\nBh[3,2]^*\n");
        assert_eq!(o.stdout, "-2*Bh[2,8]\nBh[3,-2]\n");
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("domain error"));
        let o = exec(&["--format", "json", "bracket", "2*Bh[2,0] - Bh[2,0] - Bh[2,0]"], "");
        assert_eq!(o.stdout, "{\"kind\":\"Winfinity\",\"terms\":[]}\n");
    }

    #[test]
    fn scans_and_exit_codes() {
        assert_eq!(exec(&["jacobi", "--n-range", "0..3", "--k-range", "0..3"], "").code, EXIT_OK);
        assert_eq!(
            exec(&["jacobi", "--n-range", "0..3", "--k-range", "0..3", "--corrupt-table"], "").code,
            EXIT_FAILED
        );
        let o = exec(
            &[
                "jacobi",
                "--kind",
                "winfinity",
                "--n-range",
                "2..4",
                "--k-range",
                "-2..2",
                "--sample",
                "50",
                "--seed",
                "9",
            ],
            "",
        );
        assert!(o.stdout.contains("seed 9"));
        assert_eq!(exec(&["closure", "--kind", "witt"], "").code, EXIT_OK);
        assert_eq!(exec(&["star-check", "--kind", "winfinity", "--n-range", "2..3"], "").code, EXIT_OK);
        assert_eq!(exec(&["verify-w", "--n", "2..3", "--k", "-1..1"], "").code, EXIT_OK);
    }

    #[test]
    fn theta_and_wick() {
        let o = exec(&["theta", "2", "2", "2", "2", "2"], "");
        assert_eq!(o.stdout, "theta_2(2,2;2,2) = 0\n");
        assert_eq!(exec(&["theta", "1", "0", "0", "0", "0"], "").code, EXIT_USAGE);
        let o = exec(&["normal-order", "0", "2", "2", "0", "--renormalize"], "");
        assert!(o.stdout.contains("δ(s)"), "{}", o.stdout);
        let o = exec(&["smear", "1", "2", "2", "1"], "");
        assert!(o.stdout.contains("singular part vanishes: no"));
        let o = exec(&["smear", "1", "2", "2", "1", "--s0"], "");
        assert!(o.stdout.contains("singular part vanishes: yes"));
    }

    #[test]
    fn oracle_small() {
        let o = exec(&["oracle", "--max", "1", "--degree", "8", "--m-max", "2", "--seed-degree", "6"], "");
        assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
        let o = exec(&["oracle", "--max", "2", "--degree", "4"], "");
        assert_eq!(o.code, EXIT_USAGE);
    }
}
