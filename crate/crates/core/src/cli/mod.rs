//! The `ramiform` command line.
//!
//! Exit codes: 0 witness, certificate or clean audit; 1 negative result;
//! 2 input error; 3 indeterminate (budget or precision ran out).

mod commands;

use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::field_ring::{check_degree, FieldId, DEFAULT_BITS};
use crate::forms::{parse_form_with_bits, AdditiveForm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

pub const DEFAULT_SEED: u64 = 20_201_130;
/// Default node budget of the exhaustive certifier.
pub const DEFAULT_CERT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "ramiform",
    version,
    about = "Zeros and anisotropy of additive forms over ramified quadratic extensions of Q2",
    after_help = "Every global flag can also be set through an environment variable named \
                  RAMIFORM_<FLAG>, e.g. RAMIFORM_SEED=7 or RAMIFORM_EMIT_JSON=true.\n\
                  Exit codes: 0 success, 1 negative result, 2 input error, 3 indeterminate."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Field, e.g. `Q2(sqrt(-1))` or `sqrt(10)`.
    #[arg(long, global = true, env = "RAMIFORM_FIELD")]
    pub field: Option<String>,
    /// Degree d = 2m with m odd, m >= 3.
    #[arg(long, global = true, env = "RAMIFORM_DEGREE")]
    pub degree: Option<u32>,
    /// Working precision M: elements are kept modulo 2^M.
    #[arg(long, global = true, env = "RAMIFORM_PRECISION")]
    pub precision: Option<u32>,
    #[arg(long, global = true, env = "RAMIFORM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Solver states or certifier nodes allowed.
    #[arg(long, global = true, env = "RAMIFORM_BUDGET")]
    pub budget: Option<u64>,
    #[arg(long, global = true, env = "RAMIFORM_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Print one JSON document instead of text.
    #[arg(long, global = true, env = "RAMIFORM_EMIT_JSON")]
    pub emit_json: bool,
    /// Form file, or `-` for standard input.
    #[arg(long, global = true, env = "RAMIFORM_INPUT")]
    pub input: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Extremal {
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertMethodArg {
    Auto,
    Distinct,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a nontrivial zero and verify it.
    Solve {
        /// Form file (alternative to --input).
        file: Option<String>,
        /// Use a catalogued extremal form for --field and --degree.
        #[arg(long, value_enum)]
        extremal: Option<Extremal>,
        /// Pi-digits the witness must vanish to (default 2d + 8).
        #[arg(long)]
        target: Option<u32>,
    },
    /// Prove that a form has no nontrivial zero.
    Certify {
        file: Option<String>,
        #[arg(long, value_enum)]
        extremal: Option<Extremal>,
        /// Exhaustive modulus N (default d).
        #[arg(long)]
        modulus: Option<u32>,
        #[arg(long, value_enum, default_value_t = CertMethodArg::Auto)]
        method: CertMethodArg,
        /// Disable digit-plane pruning.
        #[arg(long)]
        no_prune: bool,
    },
    /// Exhaustively check a modular identity or contraction guarantee.
    Audit {
        /// L2.1 .. L2.5, powers_mod_pi4, two_mod_pi4, L1_normalization or `all`.
        #[arg(default_value = "all")]
        id: String,
    },
    /// Rotate levels so that every prefix inequality holds.
    Normalize { file: Option<String> },
    /// Random upper-bound trials and lower-bound certificates per field.
    Reproduce {
        /// Trials per field (default 500 for d = 6, else 100).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// The d-th powers modulo pi^k.
    Powers {
        #[arg(long, default_value_t = 4)]
        k: u32,
    },
}

/// A failure that maps to an exit code, with a message for standard error.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    pub fn indeterminate(message: impl ToString) -> Self {
        Failure {
            code: EXIT_INDETERMINATE,
            message: message.to_string(),
        }
    }
}

pub(crate) type CmdResult = Result<i32, Failure>;

impl Global {
    pub(crate) fn bits(&self) -> u32 {
        self.precision.unwrap_or(DEFAULT_BITS)
    }

    pub(crate) fn field_id(&self) -> Result<Option<FieldId>, Failure> {
        self.field
            .as_deref()
            .map(|s| s.parse::<FieldId>().map_err(Failure::input))
            .transpose()
    }

    pub(crate) fn degree_checked(&self) -> Result<Option<u32>, Failure> {
        match self.degree {
            Some(d) => {
                check_degree(d).map_err(Failure::input)?;
                Ok(Some(d))
            }
            None => Ok(None),
        }
    }

    /// `# key=value ...` header echoing every setting that affects output.
    pub(crate) fn header(&self, command: &str, budget: Option<u64>, extra: &[(&str, String)]) -> String {
        let mut parts = vec![format!("command={command}"), format!("seed={}", self.seed)];
        if let Some(b) = budget {
            parts.push(format!("budget={b}"));
        }
        parts.push(format!("precision={}", self.bits()));
        parts.push(format!("workers={}", self.workers));
        parts.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
        format!("# ramiform {}\n", parts.join(" "))
    }

    pub(crate) fn header_json(&self, command: &str, budget: Option<u64>) -> serde_json::Value {
        serde_json::json!({
            "command": command,
            "seed": self.seed,
            "budget": budget,
            "precision": self.bits(),
            "workers": self.workers,
        })
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::input(format!("reading standard input: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
    }
}

/// The form named by the positional file, `--input`, or `--extremal`.
pub(crate) fn load_form(g: &Global, file: Option<&str>, extremal: Option<Extremal>) -> Result<AdditiveForm, Failure> {
    use crate::forms::catalog::{extremal_f, extremal_g};
    use crate::forms::Degree;

    let field = g.field_id()?;
    let degree = g.degree_checked()?;
    if let Some(which) = extremal {
        let field = field.ok_or_else(|| Failure::input("--extremal needs --field"))?;
        let d = Degree::new(degree.unwrap_or(6)).map_err(Failure::input)?;
        let form = match which {
            Extremal::F => extremal_f(field, d, g.bits()),
            Extremal::G => extremal_g(field, d, g.bits()),
        };
        return form.map_err(Failure::input);
    }
    let path = file
        .or(g.input.as_deref())
        .ok_or_else(|| Failure::input("no form given: pass a file, --input, or --extremal"))?;
    let text = read_source(path)?;
    let form = parse_form_with_bits(&text, g.precision).map_err(|e| Failure::input(format!("{path}: {e}")))?;
    if field.is_some_and(|f| f != form.field()) {
        return Err(Failure::input(format!("--field disagrees with the form's field {}", form.field())));
    }
    if degree.is_some_and(|d| d != form.d()) {
        return Err(Failure::input(format!("--degree disagrees with the form's degree {}", form.d())));
    }
    Ok(form)
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if cli.global.workers == 0 {
        let _ = writeln!(err, "error: --workers must be at least 1");
        return EXIT_INPUT;
    }
    let mut buf = Vec::new();
    let result = commands::dispatch(&cli, &mut buf, err);
    match result {
        Ok(code) => {
            let _ = out.write_all(&buf);
            code
        }
        Err(Failure { code, message }) => {
            // partial output of a failed command is withheld
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}
