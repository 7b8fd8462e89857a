use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cantor_cdh::arrow::{ArrowEvaluation, ArrowPoint};
use cantor_cdh::document::{CertificateReport, Dump, Instance, RunMode, Synthesizer};
use cantor_cdh::engine::Evaluation;
use cantor_cdh::error::Error;
use cantor_cdh::point::EpPoint;
use clap::{Parser, Subcommand};

mod verify;

/// Deepest resolution `eval` accepts.
const MAX_K: usize = 64;

#[derive(Parser)]
#[command(name = "cantor-cdh", version, about = "Stage-certified homeomorphisms of Cantor space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an engine on an instance and write the stage dump and report.
    Synthesize {
        #[arg(long)]
        instance: PathBuf,
        /// cdh, ordered or arrow
        #[arg(long, default_value = "cdh")]
        mode: String,
        #[arg(long)]
        stages: usize,
        /// Output directory.
        #[arg(long, env = "CANTOR_CDH_OUT", default_value = ".")]
        out: PathBuf,
        /// Sample size for the transport and lift checks.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Also write the final partition tree as partition.dot.
        #[arg(long)]
        dot: bool,
    },
    /// Evaluate a dumped map at a point to resolution k.
    Eval {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        k: usize,
        /// Side of the point in arrow mode.
        #[arg(long, default_value_t = 0)]
        side: u8,
        /// Evaluate the inverse map.
        #[arg(long)]
        inverse: bool,
        /// Accept non-canonical point notation.
        #[arg(long)]
        normalize: bool,
    },
    /// Re-check a stage dump or a KR cover file.
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit status for an error: 2 for unreadable input, 3 for rejected instances.
fn status(e: &Error) -> u8 {
    match e {
        Error::MalformedInput(_) => 2,
        Error::InstanceRejected(_) => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

fn synthesize(instance: &Path, mode: &str, stages: usize, out: &Path, samples: usize, dot: bool) -> Result<u8, Error> {
    let mode = RunMode::parse(mode)?;
    let instance = Instance::parse(mode, &read(instance)?)?;
    let t = Instant::now();
    let mut s = Synthesizer::new(&instance)?;
    s.drive_to(stages)?;
    let cert = s.certify(samples);
    eprintln!("{stages} stages synthesized and certified in {:.3}s", t.elapsed().as_secs_f64());
    let dump = Dump { instance, run: s.run().clone() };
    let report = CertificateReport::new("synthesize", Some(mode), Some(stages), cert);
    fs::create_dir_all(out).map_err(|e| Error::MalformedInput(format!("{}: {e}", out.display())))?;
    write(&out.join("dump.json"), &dump.to_json())?;
    write(&out.join("report.json"), &report.to_json())?;
    if dot {
        write(&out.join("partition.dot"), &s.run().current().map.to_dot())?;
    }
    println!("{}", report.to_json());
    Ok(if report.passed { 0 } else { 1 })
}

fn cone(w: &cantor_cdh::word::Word) -> String {
    if w.is_empty() {
        "(ε)".to_string()
    } else {
        w.to_string()
    }
}

fn eval(dump: &Path, point: &str, k: usize, side: u8, inverse: bool, normalize: bool) -> Result<u8, Error> {
    if k > MAX_K {
        return Err(Error::MalformedInput(format!("resolution {k} exceeds {MAX_K}")));
    }
    let dump = Dump::parse(&read(dump)?)?;
    let x = if normalize { EpPoint::parse_normalized(point) } else { EpPoint::parse_strict(point) }?;
    let text = match dump.synthesizer()? {
        Synthesizer::Cdh(mut h) => show(if inverse { h.evaluate_inverse(&x, k)? } else { h.evaluate(&x, k)? }),
        Synthesizer::Ordered(mut h) => show(if inverse { h.evaluate_inverse(&x, k)? } else { h.evaluate(&x, k)? }),
        Synthesizer::Arrow(mut h) => {
            if inverse {
                return Err(Error::MalformedInput("--inverse is not available in arrow mode".into()));
            }
            if side > 1 {
                return Err(Error::MalformedInput(format!("side {side} is not 0 or 1")));
            }
            match h.evaluate(&ArrowPoint::new(x, side), k)? {
                ArrowEvaluation::Exact(p) => p.to_string(),
                ArrowEvaluation::Cone(w) => cone(&w),
            }
        }
    };
    println!("{text}");
    Ok(0)
}

fn show(e: Evaluation) -> String {
    match e {
        Evaluation::Exact(p) => p.to_string(),
        Evaluation::Cone(w) => cone(&w),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synthesize { instance, mode, stages, out, samples, dot } => {
            synthesize(&instance, &mode, stages, &out, samples, dot)
        }
        Command::Eval { dump, point, k, side, inverse, normalize } => eval(&dump, &point, k, side, inverse, normalize),
        Command::Verify { file, depth, samples, seed } => verify::run(&file, depth, samples, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(status(&e))
        }
    }
}
