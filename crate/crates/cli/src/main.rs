mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use commands::{CliError, CommandResult, Context};

#[derive(Parser)]
#[command(name = "mulrep", version, about = "Integer representations by multilinear forms")]
struct Cli {
    /// Print machine-readable JSON (integers as decimal strings).
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Run searches on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a with F(a) = b.
    Solve {
        form: String,
        #[arg(value_parser = int_arg)]
        b: BigInt,
        /// Force a method: linear, prop4, thm1a, thm1b, prop2 or search.
        #[arg(long)]
        method: Option<String>,
        /// Radius for the search fallback.
        #[arg(long, value_parser = int_arg)]
        radius: Option<BigInt>,
    },
    /// Coprimality profile and applicable methods.
    Check { form: String },
    /// Evaluate a form, or a product of linear forms, at a point.
    Eval {
        #[arg(required = true)]
        forms: Vec<String>,
        /// Comma-separated integer vector.
        #[arg(long)]
        at: String,
    },
    /// Search bounds for F(a) = b.
    Bound {
        form: String,
        #[arg(value_parser = int_arg)]
        b: BigInt,
    },
    /// Smith normal form with transforms, e.g. "2 4; 6 8".
    Snf { matrix: String },
    /// Complete a block to an n x n matrix of determinant b.
    Detsolve {
        matrix: String,
        n: usize,
        #[arg(value_parser = int_arg)]
        b: BigInt,
    },
    /// Search-bound formula for a determinant form.
    Detbound {
        matrix: String,
        n: usize,
        #[arg(value_parser = int_arg)]
        b: BigInt,
    },
    /// Solve L1(a) ... Lm(a) = b for linear forms: FORM... B.
    Prodsolve {
        #[arg(num_args = 2.., required = true)]
        args: Vec<String>,
        /// Search within the Borosh radius instead of using the Smith form.
        #[arg(long)]
        bounded: bool,
        /// Number of variables (default: max(highest index, m + 1)).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Lexicographically first solution in a box: FORM... B.
    Search {
        #[arg(num_args = 2.., required = true)]
        args: Vec<String>,
        #[arg(long, default_value = "10", value_parser = int_arg)]
        radius: BigInt,
    },
    /// Look for a modulus with no solution of F(a) = b: FORM... B.
    Obstruct {
        #[arg(num_args = 2.., required = true)]
        args: Vec<String>,
        /// Test only this modulus.
        #[arg(long, conflicts_with = "mmax")]
        modulus: Option<u64>,
        /// Try every modulus from 2 up to this one.
        #[arg(long, default_value_t = 16)]
        mmax: u64,
    },
    /// Solution of least sup-norm within a radius.
    Minrep {
        form: String,
        #[arg(value_parser = int_arg)]
        b: BigInt,
        #[arg(long, default_value_t = 10)]
        radius: u64,
    },
    /// Classify every b in a range as solved, obstructed or unknown.
    Probe {
        form: String,
        #[arg(long, value_parser = int_arg)]
        bmin: BigInt,
        #[arg(long, value_parser = int_arg)]
        bmax: BigInt,
        #[arg(long, default_value = "10", value_parser = int_arg)]
        radius: BigInt,
        #[arg(long, default_value_t = 16)]
        mmax: u64,
    },
}

fn int_arg(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("not an integer: {s:?}"))
}

/// Values such as `-7` or `-x1+x2` would otherwise be taken for flags. A
/// leading space keeps them positional; all parsers ignore it.
fn protect_negative_values(args: impl Iterator<Item = String>) -> Vec<String> {
    args.enumerate()
        .map(|(i, a)| {
            let looks_like_value = a.len() > 1 && a.starts_with('-') && !a.starts_with("--") && a != "-h" && a != "-V";
            if i > 0 && looks_like_value {
                format!(" {a}")
            } else {
                a
            }
        })
        .collect()
}

fn dispatch(cmd: Command, ctx: &Context) -> Result<CommandResult, CliError> {
    match cmd {
        Command::Solve {
            form,
            b,
            method,
            radius,
        } => commands::solve(ctx, &form, &b, method.as_deref(), radius),
        Command::Check { form } => commands::check(&form),
        Command::Eval { forms, at } => commands::eval(&forms, &at),
        Command::Bound { form, b } => commands::bound(&form, &b),
        Command::Snf { matrix } => commands::snf(&matrix),
        Command::Detsolve { matrix, n, b } => commands::detsolve(&matrix, n, &b),
        Command::Detbound { matrix, n, b } => commands::detbound(&matrix, n, &b),
        Command::Prodsolve { args, bounded, n } => commands::prodsolve(ctx, &args, bounded, n),
        Command::Search { args, radius } => commands::search(ctx, &args, &radius),
        Command::Obstruct { args, modulus, mmax } => commands::obstruct(ctx, &args, modulus, mmax),
        Command::Minrep { form, b, radius } => commands::minrep(ctx, &form, &b, radius),
        Command::Probe {
            form,
            bmin,
            bmax,
            radius,
            mmax,
        } => commands::probe(ctx, &form, &bmin, &bmax, radius, mmax),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(protect_negative_values(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let ctx = match Context::from_env(cli.json, cli.sequential) {
        Ok(ctx) => ctx,
        Err(e) => return e.report(cli.json),
    };
    match dispatch(cli.command, &ctx) {
        Ok(result) => result.emit(cli.json, cli.out.as_deref()),
        Err(e) => e.report(cli.json),
    }
}
