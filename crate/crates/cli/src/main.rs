mod commands;
mod input;

use clap::{Parser, Subcommand, ValueEnum};
use commands::Report;
use input::CliError;
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "trophodge", version, about = "Exact Chow rings, tropical cohomology and Steenbrink complexes")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Matroids given by bases, rank, graph edges or vectors
    Matroid {
        #[command(subcommand)]
        cmd: MatroidCmd,
    },
    /// Bergman fans, stars, star subdivisions and tropical modifications
    Fan {
        #[command(subcommand)]
        cmd: FanCmd,
    },
    /// Chow rings of unimodular fans
    Chow {
        #[command(subcommand)]
        cmd: ChowCmd,
    },
    /// Hard Lefschetz and Hodge-Riemann for a degree-one class
    Hodge {
        #[command(subcommand)]
        cmd: HodgeCmd,
    },
    /// Unimodular triangulation with a certified strictly convex function
    Triangulate {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "emit-certificate")]
        emit_certificate: Option<PathBuf>,
    },
    /// Tropical cohomology of the canonical compactification
    Tropcoh {
        #[command(subcommand)]
        cmd: TropcohCmd,
    },
    /// The tropical Steenbrink complex
    Steenbrink {
        #[command(subcommand)]
        cmd: SteenbrinkCmd,
    },
    /// Hodge-Lefschetz structure of the Steenbrink complex with a Kähler form
    Hl {
        #[command(subcommand)]
        cmd: HlCmd,
    },
}

#[derive(Subcommand)]
enum MatroidCmd {
    Info {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    Flats {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    /// Delete or contract one element, given by label
    Minor {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        delete: Option<String>,
        #[arg(long)]
        contract: Option<String>,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    Bergman {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    /// Star fan of a cone given by ray indices, e.g. --cone 0,3
    Star {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        cone: String,
    },
    Subdivide {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        cone: String,
    },
    /// Tropical modification along a divisor given as cones, e.g. --divisor "0,1;2"
    Modify {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        divisor: String,
    },
}

#[derive(Subcommand)]
enum ChowCmd {
    Build {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    /// Degree of a top-degree monomial in ray indices, e.g. --monomial 0,0
    Degree {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        monomial: String,
    },
    Pairing {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum HodgeCmd {
    /// Without --ell the class is the sum of all ray generators
    Verify {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        /// Coefficient of one ray generator as LABEL=RATIONAL; repeatable
        #[arg(long)]
        ell: Vec<String>,
    },
}

#[derive(Subcommand)]
enum TropcohCmd {
    Betti {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    Weight {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        face: usize,
        #[arg(long)]
        p: usize,
    },
    /// Cycle class of the boundary divisor of a ray
    Class {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        ray: usize,
    },
}

#[derive(Subcommand)]
enum SteenbrinkCmd {
    Build {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    Rows {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
    /// Operator, primitive and polarization checks; the function defaults to one found by LP
    Kahler {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        function: Option<String>,
    },
    Compare {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
    },
}

#[derive(Subcommand)]
enum HlCmd {
    Check {
        #[arg(long = "in", value_name = "FILE|NAME")]
        input: String,
        #[arg(long)]
        function: Option<String>,
    },
}

fn run(cmd: Command) -> Result<Report, CliError> {
    use commands as c;
    match cmd {
        Command::Matroid { cmd } => match cmd {
            MatroidCmd::Info { input } => c::matroid_info(&input),
            MatroidCmd::Flats { input } => c::matroid_flats(&input),
            MatroidCmd::Minor { input, delete, contract } => c::matroid_minor(&input, delete.as_deref(), contract.as_deref()),
        },
        Command::Fan { cmd } => match cmd {
            FanCmd::Bergman { input } => c::fan_bergman(&input),
            FanCmd::Star { input, cone } => c::fan_star(&input, &cone),
            FanCmd::Subdivide { input, cone } => c::fan_subdivide(&input, &cone),
            FanCmd::Modify { input, divisor } => c::fan_modify(&input, &divisor),
        },
        Command::Chow { cmd } => match cmd {
            ChowCmd::Build { input } => c::chow_build(&input),
            ChowCmd::Degree { input, monomial } => c::chow_degree(&input, &monomial),
            ChowCmd::Pairing { input, k } => c::chow_pairing(&input, k),
        },
        Command::Hodge { cmd: HodgeCmd::Verify { input, ell } } => c::hodge_verify(&input, &ell),
        Command::Triangulate { input, out, emit_certificate } => c::triangulate(&input, out.as_deref(), emit_certificate.as_deref()),
        Command::Tropcoh { cmd } => match cmd {
            TropcohCmd::Betti { input } => c::tropcoh_betti(&input),
            TropcohCmd::Weight { input, face, p } => c::tropcoh_weight(&input, face, p),
            TropcohCmd::Class { input, ray } => c::tropcoh_class(&input, ray),
        },
        Command::Steenbrink { cmd } => match cmd {
            SteenbrinkCmd::Build { input } => c::steenbrink_build(&input),
            SteenbrinkCmd::Rows { input } => c::steenbrink_rows(&input),
            SteenbrinkCmd::Kahler { input, function } => c::steenbrink_kahler(&input, function.as_deref()),
            SteenbrinkCmd::Compare { input } => c::steenbrink_compare(&input),
        },
        Command::Hl { cmd: HlCmd::Check { input, function } } => c::hl_check(&input, function.as_deref()),
    }
}

/// Indented `key: value` lines; keys come out sorted like the JSON.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                render_text(x, indent + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("TROPHODGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Fails only if a pool exists already, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let (value, code) = match run(cli.command) {
        Ok(r) => (r.value, if r.verified { 0 } else { 1 }),
        Err(CliError::Input(msg)) => (serde_json::json!({"error": msg}), 2),
    };
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
        Format::Text => {
            let mut s = String::new();
            render_text(&value, 0, &mut s);
            print!("{s}");
        }
    }
    ExitCode::from(code)
}
