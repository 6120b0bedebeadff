//! `sbl`: command-line front end. Every report is wrapped as
//! `{"config": {"command", "args"}, "report"}` and written atomically.
//!
//! Exit codes: 0 success, 1 randomized failure, 2 bad parameters or I/O,
//! 3 a mathematical invariant was violated.

mod args;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sbl_core::io::write_atomic;
use sbl_core::ErrorClass;
use serde::Serialize;
use serde_json::json;

use args::*;
use commands::{Done, Fail};

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Failure => 1,
        ErrorClass::Parameter | ErrorClass::Io => 2,
        ErrorClass::LemmaViolation => 3,
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => write_atomic(p, text).map_err(Fail::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Fail {
                class: ErrorClass::Io,
                message: e.to_string(),
            })
        }
    }
}

/// Runs a report-producing command and writes its envelope.
fn report<A: Serialize>(
    command: &str,
    args: &A,
    target: Option<&PathBuf>,
    run: impl FnOnce(&A) -> Result<Done, Fail>,
) -> Result<(), Fail> {
    let done = run(args)?;
    let envelope = json!({
        "config": { "command": command, "args": args },
        "report": done.report,
    });
    let mut text = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
    text.push('\n');
    emit(target, &text)?;
    match done.status {
        Some((class, message)) => Err(Fail { class, message }),
        None => Ok(()),
    }
}

fn dispatch(cli: Cli) -> Result<(), Fail> {
    use commands as c;
    match cli.command {
        Command::Expander(ExpanderCmd::Gen(a)) => report("expander gen", &a, a.report.report.as_ref(), c::expander_gen),
        Command::Expander(ExpanderCmd::Verify(a)) => {
            report("expander verify", &a, a.report.report.as_ref(), c::expander_verify)
        }
        Command::Hrt(HrtCmd::Build(a)) => report("hrt build", &a, a.report.report.as_ref(), c::hrt_build),
        Command::Hrt(HrtCmd::Verify(a)) => report("hrt verify", &a, a.report.report.as_ref(), c::hrt_verify),
        Command::Bw(BwCmd::Exact(a)) => report("bw exact", &a, a.report.report.as_ref(), c::bw_exact),
        Command::Bw(BwCmd::Bound(a)) => report("bw bound", &a, a.report.report.as_ref(), c::bw_bound),
        Command::Host(HostCmd::Layered(a)) => report("host layered", &a, a.report.report.as_ref(), c::host_layered),
        Command::Host(HostCmd::Twoclique(a)) => {
            report("host twoclique", &a, a.report.report.as_ref(), c::host_twoclique)
        }
        Command::Host(HostCmd::ProbeRobust(a)) => {
            report("host probe-robust", &a, a.report.report.as_ref(), c::host_probe)
        }
        Command::Host(HostCmd::CertifyNonembed(a)) => {
            report("host certify-nonembed", &a, a.report.report.as_ref(), c::host_certify)
        }
        Command::Embed(EmbedCmd::Pipeline(a)) => {
            report("embed pipeline", &a, a.report.report.as_ref(), c::embed_pipeline)
        }
        Command::Embed(EmbedCmd::Dense(a)) => report("embed dense", &a, a.report.report.as_ref(), c::embed_dense),
        Command::Embed(EmbedCmd::Exact(a)) => report("embed exact", &a, a.report.report.as_ref(), c::embed_exact),
        Command::Embed(EmbedCmd::Planted(a)) => {
            report("embed planted", &a, a.report.report.as_ref(), c::embed_planted)
        }
        Command::Sweep(a) => {
            let text = c::sweep(&a)?;
            emit(a.out.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help/--version
        Err(e) => e.exit(),
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(exit_code(f.class))
        }
    }
}
