//! `tda`: command-line front end for the persistent-homology toolkit.
//!
//! The subcommands chain into the full pipeline: `gen` or your own data
//! into `barcode`, diagrams into `vectorize`/`dist`/`gram`/`plot`, and
//! feature or Gram matrices into `classify`.

mod commands;
mod formats;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "tda",
    version,
    about = "Persistent homology toolkit: filtrations, diagrams, features, kernels, classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic point cloud as CSV.
    Gen(GenArgs),
    /// Compute a persistence diagram from a point cloud, PDB file, image
    /// grid, or weighted graph.
    Barcode(BarcodeArgs),
    /// Turn diagram CSVs into a feature matrix.
    Vectorize(VectorizeArgs),
    /// Distance between two diagrams.
    Dist(DistArgs),
    /// Kernel Gram matrix over diagram CSVs.
    Gram(GramArgs),
    /// Fit a codebook or Gaussian mixture for the codebook vectorizers.
    Fit(FitArgs),
    /// Train and evaluate an SVM on a feature or Gram matrix.
    Classify(ClassifyArgs),
    /// Render a diagram as an SVG persistence diagram or barcode.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Circle,
    Sphere,
    Torus,
    Clusters,
    Helix,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    shape: ShapeArg,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radius of circle/sphere, or the helix backbone radius
    /// (defaults: 1.0 for circle/sphere, 2.3 for helix).
    #[arg(long)]
    radius: Option<f64>,
    /// Torus center-to-tube radius.
    #[arg(long, default_value_t = 2.0)]
    major: f64,
    /// Torus tube radius.
    #[arg(long, default_value_t = 0.5)]
    minor: f64,
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexArg {
    Rips,
    Alpha,
    Clique,
    Cubical,
}

#[derive(Args)]
struct BarcodeArgs {
    /// Point CSV, .pdb file, grid CSV (--complex cubical), or edge list
    /// (--complex clique).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "rips")]
    complex: ComplexArg,
    /// Largest homology dimension to report. Rips and clique complexes
    /// are built one simplex dimension higher so this dimension is
    /// computed correctly.
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Distance threshold for Rips (length units of the data).
    #[arg(long, default_value_t = 20.0)]
    max_scale: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the filtration in the debug dump format
    /// (`dim;v0,v1,...;value` per line).
    #[arg(long)]
    dump_filtration: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Stats,
    Algebraic,
    Tropical,
    Bins,
    Pbow,
    Pvlad,
    Pfv,
    Signature,
}

#[derive(Args)]
struct VectorizeArgs {
    /// Diagram CSV files, one sample per file.
    #[arg(required = true)]
    diagrams: Vec<PathBuf>,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Homology dimension for the per-dimension methods.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Binning: maximum filtration value L.
    #[arg(long, default_value_t = 20.0)]
    max_value: f64,
    /// Binning: bin width.
    #[arg(long, default_value_t = 0.5)]
    bin_width: f64,
    /// Binning: comma-separated homology dimensions.
    #[arg(long, default_value = "0,1,2")]
    dims: String,
    /// Binning: comma-separated kinds among
    /// bt,dt,pl,betti,pdgrid,landscape,image.
    #[arg(long, default_value = "bt,dt,pl")]
    kinds: String,
    /// Binning: landscape levels.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Binning: persistence-image resolution, e.g. 20x20.
    #[arg(long, default_value = "20x20")]
    image_res: String,
    /// Fitted model JSON from `tda fit` (pbow/pvlad/pfv).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Signature units CSV: mu0,mu1,sigma0,sigma1,upsilon per line.
    #[arg(long)]
    units: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistMethodArg {
    Bottleneck,
    Wasserstein,
    Sw,
    Fim,
}

#[derive(Args)]
struct DistArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long, value_enum)]
    method: DistMethodArg,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Wasserstein order.
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Sliced-Wasserstein projection count.
    #[arg(long, default_value_t = 50)]
    slices: usize,
    /// Fisher-metric bandwidth.
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Fisher-metric grid resolution per axis.
    #[arg(long, default_value_t = 48)]
    resolution: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Pssk,
    Upssk,
    Pwgk,
    Gtk,
    Glk,
    Pfk,
    Gphk,
}

#[derive(Args)]
struct GramArgs {
    #[arg(required = true)]
    diagrams: Vec<PathBuf>,
    #[arg(long, value_enum)]
    kernel: KernelArg,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// PWGK weight scale.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// PWGK persistence exponent.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// GTK/GLK bandwidth.
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// Use the divergent positive exponent printed in the GTK/GLK
    /// definitions instead of the conventional negative one.
    #[arg(long)]
    positive_exponent: bool,
    /// PFK scale.
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.5)]
    fim_sigma: f64,
    #[arg(long, default_value_t = 48)]
    fim_resolution: usize,
    /// GPHK landscape levels.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// GPHK grid end (defaults to the corpus maximum filtration value).
    #[arg(long)]
    grid_end: Option<f64>,
    #[arg(long, default_value_t = 101)]
    grid_n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Codebook,
    Gmm,
}

#[derive(Args)]
struct FitArgs {
    #[arg(required = true)]
    diagrams: Vec<PathBuf>,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Cluster / component count.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Weighted codebook fitting (persistence-ramp weights).
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyKernelArg {
    Rbf,
    Linear,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Feature matrix CSV (mutually exclusive with --gram).
    #[arg(long, conflicts_with = "gram")]
    features: Option<PathBuf>,
    /// Precomputed Gram CSV covering all samples.
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Labels CSV: `id,label` per line.
    #[arg(long)]
    labels: PathBuf,
    /// Class whose confusions count as Type-I errors (defaults to the
    /// alphabetically first class).
    #[arg(long)]
    mixed_class: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "rbf")]
    kernel: ClassifyKernelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKindArg {
    Pd,
    Pb,
}

#[derive(Args)]
struct PlotArgs {
    diagram: PathBuf,
    #[arg(long, value_enum, default_value = "pd")]
    kind: PlotKindArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Barcode(args) => commands::barcode(args),
        Command::Vectorize(args) => commands::vectorize(args),
        Command::Dist(args) => commands::dist(args),
        Command::Gram(args) => commands::gram(args),
        Command::Fit(args) => commands::fit(args),
        Command::Classify(args) => commands::classify(args),
        Command::Plot(args) => commands::plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // Internal invariant violations exit 2; user/input errors 1.
            let internal = err
                .downcast_ref::<tda_core::Error>()
                .map(|e| {
                    matches!(
                        e,
                        tda_core::Error::InvalidFiltration(_) | tda_core::Error::Model(_)
                    )
                })
                .unwrap_or(false);
            if internal {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
