//! Acceptance suite: runs every criterion in sequence, prints one PASS/FAIL
//! line per criterion, and exits non-zero if any criterion fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output, Stdio};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhpwn_cli::dsl::parse_element;
use rhpwn_cli::render::{element_from_json, element_json, element_text};
use rhpwn_core::lie::{jacobi_scan, star_scan, witt_check, AlgebraKind, Element, Generator, IndexRange, Standard};
use rhpwn_core::oracle::{check_eq1, check_exchange_seed};
use rhpwn_core::sandwich::{exchange_e_past_q, exchange_expr, verify_grid, Direction, EQExpr, EQTerm, SandwichWord};
use rhpwn_core::scalar::{binom, falling, theta, CScalar, Rational};
use rhpwn_core::testfn::{FnLabel, FnSymbol, StepFn};
use rhpwn_core::wick::{smear_bracket, PointLabel, SmearArg};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn theorem_grid() -> Verdict {
    let start = Instant::now();
    let reports = match verify_grid(IndexRange::new(2, 7), IndexRange::new(-4, 4)) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("engine error: {e}")),
    };
    let elapsed = start.elapsed();
    let failures = reports.iter().filter(|r| !r.pass).count();
    let residual = reports.iter().filter(|r| !r.l0_residual.is_zero()).count();
    let bookkeeping = reports.iter().filter(|r| !r.bookkeeping_ok).count();
    // independent recomputation of the expected constant
    let coeff_mismatch =
        reports.iter().filter(|r| r.expected_coeff != BigInt::from((r.big_n - 1) * r.k - (r.n - 1) * r.big_k)).count();
    let pass = reports.len() == 2916
        && failures == 0
        && residual == 0
        && bookkeeping == 0
        && coeff_mismatch == 0
        && elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "{} tuples, {failures} failures, {residual} nonzero L=0 residuals, {} in {}",
            reports.len(),
            if bookkeeping == 0 { "bookkeeping ok" } else { "bookkeeping broken" },
            secs(elapsed)
        ),
    )
}

fn jacobi_rhpwn() -> Verdict {
    let r = IndexRange::new(0, 6);
    match jacobi_scan(&Standard, AlgebraKind::Rhpwn, r, r, None) {
        Ok(rep) => verdict(
            rep.pass() && rep.generators == 43 && rep.triples == 43 * 43 * 43,
            format!("{} generators, {} triples, {} defects", rep.generators, rep.triples, rep.failures.len()),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn jacobi_winfinity() -> Verdict {
    let (nr, kr) = (IndexRange::new(2, 8), IndexRange::new(-6, 6));
    let start = Instant::now();
    let full = jacobi_scan(&Standard, AlgebraKind::Winfinity, nr, kr, None);
    let elapsed = start.elapsed();
    let rep = match full {
        Ok(rep) if elapsed <= Duration::from_secs(300) => rep,
        Ok(_) => {
            const SEED: u64 = 20_240_601;
            match jacobi_scan(&Standard, AlgebraKind::Winfinity, nr, kr, Some((10_000, SEED))) {
                Ok(rep) => rep,
                Err(e) => return verdict(false, e.to_string()),
            }
        }
        Err(e) => return verdict(false, e.to_string()),
    };
    let mode = match rep.sample_seed {
        Some(seed) => format!("sampled with seed {seed}"),
        None => format!("exhaustive in {}", secs(elapsed)),
    };
    let enough = rep.sample_seed.is_none() || rep.triples >= 10_000;
    verdict(
        rep.pass() && enough && rep.generators == 91,
        format!("{} triples ({mode}), {} defects", rep.triples, rep.failures.len()),
    )
}

fn eq1_oracle() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 0..=4 {
        for k in 0..=4 {
            for nn in 0..=4 {
                for kk in 0..=4 {
                    checked += 1;
                    if !matches!(check_eq1(n, k, nn, kk, 40), Ok(true)) {
                        bad.push((n, k, nn, kk));
                    }
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} index tuples at D=40, failures {bad:?}"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-40..=40);
    let den: i64 = rng.gen_range(1..=17);
    Rational::new(num.into(), den.into())
}

fn exchange_seed() -> Verdict {
    let seed_ok: Vec<u32> = (0..=8).filter(|&m| !matches!(check_exchange_seed(m, 16), Ok(true))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (s, t) = (PointLabel::S, PointLabel::T);
    let mut trips = 0;
    let mut broken = 0;
    for _ in 0..100 {
        let lambda = random_rational(&mut rng);
        for m in 0..=6u32 {
            trips += 1;
            let mut original = SandwichWord::default();
            if m > 0 {
                original.q_pow.insert(t, m);
            }
            if !lambda.is_zero() {
                original.left.insert(s, lambda.clone());
            }
            let expected = EQExpr::from_term(EQTerm { coeff: CScalar::one(), word: original });
            let back = exchange_e_past_q(&lambda, s, m, t, Direction::Rightward)
                .and_then(|there| exchange_expr(&there, s, Direction::Leftward));
            if back.as_ref() != Ok(&expected) {
                broken += 1;
            }
        }
    }
    verdict(
        seed_ok.is_empty() && broken == 0,
        format!("seed identity m=0..8 at D=16 failures {seed_ok:?}; {trips} round trips, {broken} broken"),
    )
}

fn theta_conventions() -> Verdict {
    let mut evals = 0;
    let mut bad = 0;
    for l in 2..=8 {
        for n in 0..=8 {
            for k in 0..=8 {
                for nn in 0..=8 {
                    for kk in 0..=8 {
                        evals += 1;
                        match (theta(l, n, k, nn, kk), theta(l, nn, kk, n, k)) {
                            (Ok(a), Ok(b)) if a == -&b => {}
                            _ => bad += 1,
                        }
                    }
                }
            }
        }
    }
    let mut convention_bad = 0;
    for l in 2..=8 {
        for v in 0..l {
            if binom(v, l).ok() != Some(BigInt::zero()) || falling(v, l).ok() != Some(BigInt::zero()) {
                convention_bad += 1;
            }
        }
    }
    let rejects_low_order = theta(1, 2, 2, 2, 2).is_err();
    verdict(
        bad == 0 && convention_bad == 0 && rejects_low_order,
        format!("{evals} antisymmetry pairs ({bad} bad), {convention_bad} convention violations"),
    )
}

/// Random step function with `f(0) = 0`: consecutive pieces from a negative
/// start, minus any piece containing the origin.
fn random_s0_step(rng: &mut ChaCha8Rng) -> StepFn {
    let mut cursor = Rational::from_integer(rng.gen_range(-6..=-1).into());
    let mut pieces = Vec::new();
    for _ in 0..rng.gen_range(1..=5) {
        let width = Rational::new(rng.gen_range(1..=5).into(), rng.gen_range(1..=3).into());
        let end = &cursor + &width;
        pieces.push((cursor.clone(), end.clone(), CScalar::new(random_rational(rng), random_rational(rng))));
        cursor = end;
    }
    let zero = Rational::zero();
    pieces.retain(|(a, b, _)| !(a <= &zero && &zero < b));
    StepFn::from_pieces(pieces).expect("disjoint pieces")
}

fn eps_redundancy() -> Verdict {
    let (g, f) = (SmearArg::symbol("g", false), SmearArg::symbol("f", false));
    let mut regular_bad = 0;
    for n in 0..=8 {
        for k in 0..=8 {
            for nn in 0..=8 {
                for kk in 0..=8 {
                    match smear_bracket(n, k, &g, nn, kk, &f) {
                        Ok(d)
                            if d.regular_coeff == BigInt::from(k * nn - kk * n)
                                && d.regular_index == (n + nn - 1, k + kk - 1) => {}
                        _ => regular_bad += 1,
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut singular_seen = 0;
    let mut singular_bad = 0;
    for _ in 0..100 {
        let gs = random_s0_step(&mut rng);
        let fs = random_s0_step(&mut rng);
        assert!(gs.is_in_s0() && fs.is_in_s0());
        let idx: Vec<i64> = (0..4).map(|_| rng.gen_range(0..=8)).collect();
        match smear_bracket(idx[0], idx[1], &SmearArg::Concrete(gs), idx[2], idx[3], &SmearArg::Concrete(fs)) {
            Ok(d) => {
                singular_seen += d.singular_terms.len();
                if !d.singular_terms.iter().all(|t| t.point_product == Some(CScalar::zero())) {
                    singular_bad += 1;
                }
            }
            Err(_) => singular_bad += 1,
        }
    }
    verdict(
        regular_bad == 0 && singular_bad == 0,
        format!(
            "9^4 regular coefficients ({regular_bad} bad); 100 S0 pairs, {singular_seen} singular terms, {singular_bad} nonzero"
        ),
    )
}

fn random_element(rng: &mut ChaCha8Rng) -> Element {
    let kind = [AlgebraKind::Rhpwn, AlgebraKind::Winfinity, AlgebraKind::Witt][rng.gen_range(0..3)];
    let mut e = Element::zero(kind);
    for _ in 0..rng.gen_range(0..=5) {
        let (n, k) = match kind {
            AlgebraKind::Rhpwn => loop {
                let (n, k) = (rng.gen_range(0..=9), rng.gen_range(0..=9));
                if n + k >= 3 {
                    break (n, k);
                }
            },
            AlgebraKind::Winfinity => (rng.gen_range(2..=9), rng.gen_range(-9..=9)),
            AlgebraKind::Witt => (2, rng.gen_range(-12..=12)),
        };
        let mut g = Generator::new(kind, n, k).expect("in domain");
        if rng.gen_bool(0.3) {
            let symbols: Vec<FnSymbol> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let s = FnSymbol::new(["f", "g", "h"][rng.gen_range(0..3)]);
                    if rng.gen_bool(0.5) {
                        s.conj()
                    } else {
                        s
                    }
                })
                .collect();
            g = g.with_label(FnLabel::formal(symbols));
        }
        let im = if rng.gen_bool(0.5) { Rational::zero() } else { random_rational(rng) };
        let c = CScalar::new(random_rational(rng), im);
        e = e.add(&Element::term(c, g)).expect("same kind");
    }
    e
}

fn star_structure() -> Verdict {
    let rh = star_scan(AlgebraKind::Rhpwn, IndexRange::new(0, 6), IndexRange::new(0, 6));
    let wi = star_scan(AlgebraKind::Winfinity, IndexRange::new(2, 6), IndexRange::new(-4, 4));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut not_involutive = 0;
    for _ in 0..500 {
        let x = random_element(&mut rng);
        if x.involution().involution() != x {
            not_involutive += 1;
        }
    }
    verdict(
        rh.pass() && wi.pass() && not_involutive == 0 && rh.pairs == 43 * 43 && wi.pairs == 45 * 45,
        format!(
            "RHPWN {} pairs ({} bad), w-infinity {} pairs ({} bad), 500 random involutions ({not_involutive} bad)",
            rh.pairs,
            rh.failures.len(),
            wi.pairs,
            wi.failures.len()
        ),
    )
}

fn witt() -> Verdict {
    let mut bad = Vec::new();
    for k in -10..=10 {
        for kk in -10..=10 {
            let (ok, got) = witt_check(k, kk);
            let expected = if k == kk {
                Element::zero(AlgebraKind::Witt)
            } else {
                Element::term(CScalar::from_int(k - kk), Generator::relaxed(AlgebraKind::Witt, 2, k + kk))
            };
            if !ok || got != expected {
                bad.push((k, kk));
            }
        }
    }
    verdict(bad.is_empty(), format!("441 pairs, failures {bad:?}"))
}

/// Builds the `rhpwn` binary with the invoking cargo and returns its path.
fn binary() -> Result<PathBuf, String> {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let out = Command::new(cargo)
        .args(["build", "--quiet", "-p", "rhpwn-cli", "--bin", "rhpwn", "--message-format=json"])
        .stderr(Stdio::inherit())
        .output()
        .map_err(|e| format!("cannot run cargo: {e}"))?;
    if !out.status.success() {
        return Err("building rhpwn failed".into());
    }
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter(|v| v["target"]["name"] == "rhpwn")
        .find_map(|v| v["executable"].as_str().map(PathBuf::from))
        .ok_or_else(|| "cargo reported no rhpwn executable".into())
}

fn rhpwn(bin: &Path, args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(bin)
        .args(args)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .stdin(Stdio::piped())
        .spawn()
        .expect("spawn rhpwn");
    let mut pipe = child.stdin.take().expect("stdin");
    pipe.write_all(stdin.unwrap_or("").as_bytes()).expect("write stdin");
    drop(pipe);
    child.wait_with_output().expect("rhpwn output")
}

fn cli() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut text_bad = 0;
    let mut json_bad = 0;
    for _ in 0..1000 {
        let x = random_element(&mut rng);
        if parse_element(&element_text(&x), x.kind(), false).as_ref() != Ok(&x) {
            text_bad += 1;
        }
        let reparsed: serde_json::Value = serde_json::from_str(&element_json(&x).to_string()).expect("valid json");
        if element_from_json(&reparsed).as_ref() != Ok(&x) {
            json_bad += 1;
        }
    }

    let bin = match binary() {
        Ok(b) => b,
        Err(e) => return verdict(false, e),
    };
    let out = rhpwn(&bin, &["bracket", "[B[2,1],B[1,2]]"], None);
    let literal = String::from_utf8_lossy(&out.stdout).trim_end().to_string();
    let literal_ok = literal == "3*B[2,2]" && out.status.code() == Some(0);

    let code = |args: &[&str], stdin: Option<&str>| rhpwn(&bin, args, stdin).status.code();
    let codes = [
        ("jacobi", code(&["jacobi", "--n-range", "0..4", "--k-range", "0..4"], None), 0),
        ("jacobi corrupt", code(&["jacobi", "--n-range", "0..4", "--k-range", "0..4", "--corrupt-table"], None), 1),
        ("verify-w", code(&["verify-w", "--n", "2..3", "--k", "-2..2"], None), 0),
        ("domain", code(&["bracket", "B[1,1]"], None), 2),
        ("syntax", code(&["bracket"], Some("[B[2,1] B[1,2]]\n")), 2),
        ("kind mix", code(&["bracket", "B[2,1] + Bh[2,1]"], None), 2),
        ("usage", code(&["jacobi", "--bogus"], None), 2),
    ];
    let wrong_codes: Vec<String> = codes
        .iter()
        .filter(|(_, got, want)| *got != Some(*want))
        .map(|(name, got, want)| format!("{name}: {got:?} != {want}"))
        .collect();

    let det_args = ["--format", "json", "jacobi", "--kind", "winfinity", "--n-range", "2..5", "--k-range", "-3..3"];
    let (a, b) = (rhpwn(&bin, &det_args, None), rhpwn(&bin, &det_args, None));
    let deterministic = a.stdout == b.stdout && !a.stdout.is_empty();

    let pass = text_bad == 0 && json_bad == 0 && literal_ok && wrong_codes.is_empty() && deterministic;
    let mut detail = format!(
        "1000 round trips ({text_bad} text, {json_bad} json bad); bracket printed {literal:?} (required \"3*B[2,2]\"); exit codes {}; deterministic {deterministic}",
        if wrong_codes.is_empty() { "ok".to_string() } else { wrong_codes.join(", ") }
    );
    if !literal_ok && literal == "-3*B[2,2]" {
        detail.push_str(
            "; the bracket constant kN-Kn at (n,k,N,K)=(2,1,1,2) is -3, so the required string is unattainable",
        );
    }
    verdict(pass, detail)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 w-infinity realization grid", theorem_grid),
        ("2 Jacobi, RHPWN", jacobi_rhpwn),
        ("3 Jacobi, w-infinity", jacobi_winfinity),
        ("4 monomial commutator oracle", eq1_oracle),
        ("5 exchange-rule seed", exchange_seed),
        ("6 theta antisymmetry and conventions", theta_conventions),
        ("7 epsilon redundancy and S0", eps_redundancy),
        ("8 *-structure", star_structure),
        ("9 Witt subalgebra", witt),
        ("10 CLI round trip, output, exit codes", cli),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        println!("{} criterion {name}: {} [{}]", if v.pass { "PASS" } else { "FAIL" }, v.detail, secs(start.elapsed()));
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
