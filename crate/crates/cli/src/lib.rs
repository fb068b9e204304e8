//! Command-line front end for `klinv-core`.
//!
//! [`run`] parses an argument list, performs one computation and writes the
//! result to `out`. Diagnostics go to `err`. The return value is the process
//! exit code: 0 on success, 1 when a verification disagrees, 2 on usage or
//! parse errors.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use klinv_core::verify::{
    verify_brenti_bound, verify_descent_choice, verify_flattening, verify_inversion_exhaustive,
    verify_inversion_sampled, verify_lemma_tech1, verify_lemma_tech2,
    verify_smoothness_equivalence, verify_theorem_inverse, verify_theorem_regular,
};
use klinv_core::{
    bruhat_leq, closed_form_inverse, closed_form_regular, interval, inverse_kl, is_smooth_top,
    kl_polynomial, lemma_tech1_check, lemma_tech2_check, make_family, mu, render_bruhat_picture,
    Error, FamilySpec, IdentityCheck, IntPolynomial, KLCache, Permutation, VerificationReport,
    VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "klinv", version)]
#[command(about = "Kazhdan-Lusztig and inverse Kazhdan-Lusztig polynomials in S_n")]
struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Bound on memoized polynomial entries; the cache is flushed when exceeded
    #[arg(long, global = true, value_name = "N")]
    max_cache_entries: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KL polynomial P_{x,w}
    Kl { x: Permutation, w: Permutation },
    /// Inverse KL polynomial Q_{x,w}
    InvKl { x: Permutation, w: Permutation },
    /// Top coefficient mu(x, w)
    Mu { x: Permutation, w: Permutation },
    /// List the Bruhat interval [x, w]
    Interval { x: Permutation, w: Permutation },
    /// Bruhat comparison x <= w
    Leq { x: Permutation, w: Permutation },
    /// Whether w avoids 3412 and 4231
    Smooth { w: Permutation },
    /// Draw the permutation matrices of x and w with the rank-difference support
    Picture { x: Permutation, w: Permutation },
    /// Construct a family member, e.g. "x:2,3"
    Family { spec: FamilySpec },
    /// Closed-form polynomial for the pair whose lower member is SPEC
    ClosedForm {
        spec: FamilySpec,
        /// Inverse polynomial instead of the regular one
        #[arg(long)]
        inverse: bool,
    },
    /// Run a verification and print its report
    Verify {
        check: Check,
        /// Permutation size, or largest size for the family checks
        #[arg(long)]
        n: Option<usize>,
        /// Largest family or identity parameter
        #[arg(long)]
        kmax: Option<usize>,
        /// Seed for sampled checks
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sampled cases, or a cap on exhaustive ones
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Evaluate both sides of a binomial identity
    Lemma {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        k: usize,
        m: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Regular,
    Inverse,
    Inversion,
    Smoothness,
    Brenti,
    Flattening,
    DescentChoice,
    Lemma1,
    Lemma2,
}

enum Output {
    Text(String),
    Json(Value),
}

struct Outcome {
    output: Output,
    success: bool,
}

impl Outcome {
    fn ok(output: Output) -> Self {
        Self {
            output,
            success: true,
        }
    }
}

/// Parses `args` (including the program name) and executes one subcommand.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let first = e.to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "{line}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut cache = KLCache::new();
    if let Some(n) = cli.max_cache_entries {
        cache = cache.with_max_entries(n);
    }
    match execute(cli.command, cli.json, &mut cache) {
        Ok(outcome) => {
            let written = match outcome.output {
                Output::Text(s) => writeln!(out, "{s}"),
                Output::Json(v) => writeln!(out, "{v}"),
            };
            if written.is_err() {
                return EXIT_USAGE;
            }
            if outcome.success {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn poly_out(p: IntPolynomial, json: bool) -> Output {
    if json {
        Output::Json(json!(p))
    } else {
        Output::Text(p.to_string())
    }
}

fn same_size(x: &Permutation, w: &Permutation) -> Result<(), Error> {
    if x.size() != w.size() {
        return Err(Error::SizeMismatch {
            left: x.size(),
            right: w.size(),
        });
    }
    Ok(())
}

fn execute(command: Command, json: bool, cache: &mut KLCache) -> Result<Outcome, Error> {
    let output = match command {
        Command::Kl { x, w } => {
            same_size(&x, &w)?;
            poly_out(kl_polynomial(&x, &w, cache)?, json)
        }
        Command::InvKl { x, w } => {
            same_size(&x, &w)?;
            poly_out(inverse_kl(&x, &w, cache)?, json)
        }
        Command::Mu { x, w } => {
            let v = mu(&x, &w, cache)?;
            if json {
                Output::Json(json!(v))
            } else {
                Output::Text(v.to_string())
            }
        }
        Command::Interval { x, w } => {
            let iv = interval(&x, &w)?;
            let names: Vec<String> = iv.iter().map(|z| z.to_string()).collect();
            if json {
                Output::Json(json!(names))
            } else {
                Output::Text(names.join("\n"))
            }
        }
        Command::Leq { x, w } => {
            let b = bruhat_leq(&x, &w)?;
            if json {
                Output::Json(json!(b))
            } else {
                Output::Text(b.to_string())
            }
        }
        Command::Smooth { w } => smooth_output(&w, json)?,
        Command::Picture { x, w } => {
            let pic = render_bruhat_picture(&x, &w)?;
            if json {
                Output::Json(json!(pic.lines().collect::<Vec<_>>()))
            } else {
                Output::Text(pic.trim_end_matches('\n').to_string())
            }
        }
        Command::Family { spec } => {
            let p = make_family(spec)?;
            if json {
                Output::Json(json!(p.entries()))
            } else {
                Output::Text(p.to_string())
            }
        }
        Command::ClosedForm { spec, inverse } => {
            let pair = spec.kind().pair();
            if spec.kind() != pair.bottom_kind() {
                return Err(Error::InvalidFamily(format!(
                    "closed forms are indexed by the lower family member, got {spec}"
                )));
            }
            let p = if inverse {
                closed_form_inverse(pair, spec.k(), spec.m())?
            } else {
                closed_form_regular(pair, spec.k(), spec.m())?
            };
            poly_out(p, json)
        }
        Command::Verify {
            check,
            n,
            kmax,
            seed,
            cases,
        } => {
            let report = run_verify(check, n, kmax, seed, cases, cache);
            let success = report.passed();
            let output = if json {
                Output::Json(serde_json::to_value(&report).expect("report serializes"))
            } else {
                Output::Text(report.to_string())
            };
            return Ok(Outcome { output, success });
        }
        Command::Lemma { which, k, m } => {
            let check = if which == 1 {
                lemma_tech1_check(k, m)?
            } else {
                lemma_tech2_check(k, m)?
            };
            let success = check.equal;
            return Ok(Outcome {
                output: lemma_output(&check, json),
                success,
            });
        }
    };
    Ok(Outcome::ok(output))
}

fn smooth_output(w: &Permutation, json: bool) -> Result<Output, Error> {
    let smooth = is_smooth_top(w);
    let mut witness = None;
    if !smooth {
        for pattern in ["3,4,1,2", "4,2,3,1"] {
            let p: Permutation = pattern.parse()?;
            if let Some(pos) = w.find_pattern_instance(&p)? {
                witness = Some((pattern, pos));
                break;
            }
        }
    }
    Ok(if json {
        Output::Json(match witness {
            Some((pattern, positions)) => {
                json!({ "smooth": smooth, "pattern": pattern, "positions": positions })
            }
            None => json!({ "smooth": smooth }),
        })
    } else {
        match witness {
            Some((pattern, positions)) => {
                let pos: Vec<String> = positions.iter().map(|p| p.to_string()).collect();
                Output::Text(format!("false ({pattern} at positions {})", pos.join(",")))
            }
            None => Output::Text(smooth.to_string()),
        }
    })
}

fn lemma_output(check: &IdentityCheck, json: bool) -> Output {
    if json {
        Output::Json(serde_json::to_value(check).expect("identity check serializes"))
    } else {
        Output::Text(format!(
            "lhs   {}\nrhs   {}\nequal {}",
            check.lhs, check.rhs, check.equal
        ))
    }
}

fn run_verify(
    check: Check,
    n: Option<usize>,
    kmax: Option<usize>,
    seed: Option<u64>,
    cases: Option<usize>,
    cache: &mut KLCache,
) -> VerificationReport {
    let mut opts = VerifyOptions::from_env();
    if let Some(seed) = seed {
        opts.seed = seed;
    }
    opts.case_cap = cases;
    match check {
        Check::Regular => verify_theorem_regular(n.unwrap_or(7), cache),
        Check::Inverse => verify_theorem_inverse(n.unwrap_or(7), cache),
        Check::Inversion => {
            let n = n.unwrap_or(4);
            match cases {
                Some(samples) if n > 4 => verify_inversion_sampled(n, samples, cache, &opts),
                _ => verify_inversion_exhaustive(n, cache, &opts),
            }
        }
        Check::Smoothness => verify_smoothness_equivalence(n.unwrap_or(5), cache, &opts),
        Check::Brenti => verify_brenti_bound(kmax.unwrap_or(3), cache),
        Check::Flattening => verify_flattening(n.unwrap_or(7), cases.unwrap_or(200), cache, &opts),
        Check::DescentChoice => verify_descent_choice(n.unwrap_or(6), cases.unwrap_or(100), &opts),
        Check::Lemma1 => verify_lemma_tech1(kmax.unwrap_or(8)),
        Check::Lemma2 => verify_lemma_tech2(2, kmax.unwrap_or(8)),
    }
}
