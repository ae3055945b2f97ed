mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "sheafmod", version, about = "Check sheaves on finite locales in their module, Hilbert and matrix forms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest lattice accepted from input.
    #[arg(long, global = true, default_value_t = sheafmod::lattice::MAX_ELEMENTS)]
    pub max_size: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frames given as a fixture name, a poset or explicit tables.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// B-modules and B-locales.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Inner products and Hilbert bases.
    #[command(subcommand)]
    Hilbert(HilbertCmd),
    /// Projection matrices.
    #[command(subcommand)]
    Matrix(MatrixCmd),
    /// Module homomorphisms.
    #[command(subcommand)]
    Hom(HomCmd),
    /// Maps of B-locales.
    #[command(subcommand)]
    Map(MapCmd),
    /// The seeded law battery.
    #[command(subcommand)]
    Suite(SuiteCmd),
    /// Diagrams.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand, Debug)]
enum FrameCmd {
    /// Verify the frame laws.
    Check { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ModuleCmd {
    /// Module laws, stability, openness and étale verdicts.
    Check { file: PathBuf },
    /// Local sections, their supports and the sections presheaf.
    Sections { file: PathBuf },
    /// Gram matrix over the irreducible sections, with round-trip verification.
    ToMatrix { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum HilbertCmd {
    /// Inner-product axioms and flags.
    Check { file: PathBuf },
    /// Whether a subset is a Hilbert basis, with the basis clauses.
    Basis {
        file: PathBuf,
        /// Comma-separated element labels or indices.
        subset: String,
    },
}

#[derive(Subcommand, Debug)]
enum MatrixCmd {
    /// The module of a projection matrix, with round-trip verification.
    ToModule { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum HomCmd {
    /// The adjoint table.
    Adjoint { file: PathBuf },
    /// Module-hom, sheaf-hom and adjointability verdicts.
    Check { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum MapCmd {
    /// Compare the direct image with the adjoint of the inverse image.
    DaggerCheck { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum SuiteCmd {
    /// Run fixtures and generated instances.
    Run {
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Bound on generated categories of elements.
        #[arg(long, default_value_t = 8)]
        max_elements: usize,
        /// Skip the fixture library.
        #[arg(long)]
        no_fixtures: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ExportCmd {
    /// Hasse diagram of a frame, or of a module's carrier.
    Dot { file: PathBuf },
}

fn run(cli: &Cli) -> sheafmod::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Frame(FrameCmd::Check { file }) => commands::frame_check(g, file),
        Command::Module(ModuleCmd::Check { file }) => commands::module_check(g, file),
        Command::Module(ModuleCmd::Sections { file }) => commands::module_sections(g, file),
        Command::Module(ModuleCmd::ToMatrix { file }) => commands::module_to_matrix(g, file),
        Command::Hilbert(HilbertCmd::Check { file }) => commands::hilbert_check(g, file),
        Command::Hilbert(HilbertCmd::Basis { file, subset }) => commands::hilbert_basis(g, file, subset),
        Command::Matrix(MatrixCmd::ToModule { file }) => commands::matrix_to_module(g, file),
        Command::Hom(HomCmd::Adjoint { file }) => commands::hom_adjoint(g, file),
        Command::Hom(HomCmd::Check { file }) => commands::hom_check(g, file),
        Command::Map(MapCmd::DaggerCheck { file }) => commands::map_dagger_check(g, file),
        Command::Suite(SuiteCmd::Run { count, max_elements, no_fixtures }) => {
            commands::suite_run(g, *count, *max_elements, !no_fixtures)
        }
        Command::Export(ExportCmd::Dot { file }) => commands::export_dot(g, file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.render(cli.global.format).as_bytes());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                if let Some(f) = out.first_failure() {
                    eprintln!("law failure: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
