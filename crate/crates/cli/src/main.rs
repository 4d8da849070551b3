use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use koszul_core::cli::{resolve_input, run, Command, Format, Invocation};

#[derive(Parser)]
#[command(name = "koszul", version, about = "Exact bar constructions, Koszul duals and Hochschild homology")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Degree window.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, global = true)]
    window: Option<Vec<i64>>,

    /// Weight (filtration) cap.
    #[arg(long, global = true)]
    weight_cap: Option<usize>,

    /// q or fp:P; defaults to the document's field.
    #[arg(long, global = true)]
    field: Option<String>,

    /// text, json or machine-readable.
    #[arg(long, default_value = "text", global = true)]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, hide = true, global = true)]
    debug_flip_rotation: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and check d² = 0, Leibniz, associativity or Jacobi.
    Validate { input: String },
    /// Homology of the bar construction.
    Bar { input: String },
    /// The Koszul dual algebra.
    KoszulDual { input: String },
    /// Hochschild homology, total and per weight.
    Hochschild { input: String },
    /// Cardinality layers against the configuration model.
    Layers {
        input: String,
        #[arg(long)]
        layer: Option<usize>,
    },
    /// The free-algebra formula for a complex of generators.
    FreeCalc { input: String },
    /// Goodwillie tower of the free algebra.
    Tower {
        input: String,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Homology of ordered configuration spaces.
    Conf {
        #[arg(long)]
        points: usize,
        #[arg(long, default_value = "circle")]
        manifold: String,
    },
    /// Chevalley–Eilenberg cochains.
    Ce { input: String },
    /// Truncated universal enveloping algebra.
    Envelope { input: String },
    /// PBW comparison of gr U against Sym.
    Pbw { input: String },
    /// Maurer–Cartan elements over k[t]/t^K.
    Mc {
        input: String,
        #[arg(long, default_value_t = 2)]
        artin: usize,
    },
    VerifyCircle { input: String },
    VerifyInterval { input: String },
    VerifyUg { input: String },
    ArtinRoundtrip { input: String },
    /// Additive Poincaré duality for a complex of coefficients.
    AdditivePd {
        input: String,
        #[arg(long, default_value = "circle")]
        manifold: String,
    },
}

fn invocation(cmd: Cmd) -> Result<Invocation, koszul_core::Error> {
    let with = |command: Command, input: &str| -> Result<Invocation, koszul_core::Error> { Ok(Invocation::new(command, Some(resolve_input(input)?))) };
    Ok(match cmd {
        Cmd::Validate { input } => with(Command::Validate, &input)?,
        Cmd::Bar { input } => with(Command::Bar, &input)?,
        Cmd::KoszulDual { input } => with(Command::KoszulDual, &input)?,
        Cmd::Hochschild { input } => with(Command::Hochschild, &input)?,
        Cmd::Layers { input, layer } => Invocation { layer, ..with(Command::Layers, &input)? },
        Cmd::FreeCalc { input } => with(Command::FreeCalc, &input)?,
        Cmd::Tower { input, stage } => Invocation { stage, ..with(Command::Tower, &input)? },
        Cmd::Conf { points, manifold } => Invocation { points: Some(points), manifold: Some(manifold), ..Invocation::new(Command::Conf, None) },
        Cmd::Ce { input } => with(Command::Ce, &input)?,
        Cmd::Envelope { input } => with(Command::Envelope, &input)?,
        Cmd::Pbw { input } => with(Command::Pbw, &input)?,
        Cmd::Mc { input, artin } => Invocation { artin, ..with(Command::Mc, &input)? },
        Cmd::VerifyCircle { input } => with(Command::VerifyCircle, &input)?,
        Cmd::VerifyInterval { input } => with(Command::VerifyInterval, &input)?,
        Cmd::VerifyUg { input } => with(Command::VerifyUg, &input)?,
        Cmd::ArtinRoundtrip { input } => with(Command::ArtinRoundtrip, &input)?,
        Cmd::AdditivePd { input, manifold } => Invocation { manifold: Some(manifold), ..with(Command::AdditivePd, &input)? },
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let format = match Format::parse(&args.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("koszul: {e}");
            return ExitCode::from(1);
        }
    };
    let mut inv = match invocation(args.command) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("koszul: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(w) = args.window {
        inv.window = (w[0], w[1]);
    }
    if let Some(k) = args.weight_cap {
        inv.weight_cap = k;
    }
    inv.field = args.field;
    inv.flip_rotation = args.debug_flip_rotation;

    let outcome = run(&inv);
    let text = format.render(&outcome.report);
    match args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("koszul: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if let Some(e) = &outcome.report.error {
        eprintln!("koszul: {}", e.message);
    }
    ExitCode::from(outcome.exit_code as u8)
}
