//! Command-line front end: fit a match file, run the benchmark sweeps, or
//! write a synthetic scene to disk.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multifit::geometry::ModelKind;
use multifit::grouping::GroupingView;
use multifit::io::{self, BenchSuite, FitArgs, Method, OutputFormat, RunError, Sweep};
use multifit::par;
use multifit::synthetic::{generate_scene, SceneSpec};

#[derive(Parser)]
#[command(name = "multifit", version, about = "Two-view multi-structure model fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit models to a match file and emit a report.
    Fit(FitCmd),
    /// Run the outlier and superpixel sweeps on synthetic scenes.
    Bench(BenchCmd),
    /// Write a synthetic scene: matches, labels and both views.
    Generate(GenerateCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sdf,
    Ransac,
    Prosac,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Homography,
    Fundamental,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Both,
    View1,
    View2,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Outliers,
    Superpixels,
    All,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Homography => ModelKind::Homography,
            ModelArg::Fundamental => ModelKind::FundamentalMatrix,
        }
    }
}

#[derive(Args)]
struct FitCmd {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    image1: Option<PathBuf>,
    #[arg(long)]
    image2: Option<PathBuf>,
    #[arg(long)]
    matches: PathBuf,
    /// Ground-truth labels; defaults to the `.labels` sidecar of the match file.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    inlier_scale: f64,
    #[arg(long, default_value_t = 1)]
    num_structures: usize,
    #[arg(long, default_value_t = 150)]
    superpixels: usize,
    #[arg(long, default_value_t = 10.0)]
    compactness: f64,
    /// Subset size per group; defaults to the minimal sample size plus two.
    #[arg(long)]
    m0: Option<usize>,
    #[arg(long, value_enum, default_value_t = ViewArg::Both)]
    grouping_view: ViewArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

impl FitCmd {
    fn to_args(&self) -> FitArgs {
        let method = match self.method {
            MethodArg::Sdf => Method::Sdf,
            MethodArg::Ransac => Method::Ransac,
            MethodArg::Prosac => Method::Prosac,
        };
        let mut a = FitArgs::new(method, self.model.into(), &self.matches, self.inlier_scale);
        a.image1.clone_from(&self.image1);
        a.image2.clone_from(&self.image2);
        a.labels.clone_from(&self.labels);
        a.num_structures = self.num_structures;
        a.superpixels = self.superpixels;
        a.compactness = self.compactness;
        a.m0 = self.m0;
        a.grouping_view = match self.grouping_view {
            ViewArg::Both => GroupingView::Both,
            ViewArg::View1 => GroupingView::View1,
            ViewArg::View2 => GroupingView::View2,
        };
        a.seed = self.seed;
        a.confidence = self.confidence;
        a.max_iters = self.max_iters;
        a.out.clone_from(&self.out);
        a.format = match self.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        };
        a
    }
}

#[derive(Args)]
struct BenchCmd {
    #[arg(long, value_enum, default_value_t = ModelArg::Homography)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = SweepArg::All)]
    sweep: SweepArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateCmd {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Inlier count per structure, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    inliers: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    outliers: usize,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 320)]
    width: usize,
    #[arg(long, default_value_t = 240)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; receives scene.matches, scene.labels, view1.ppm, view2.ppm.
    #[arg(long)]
    out: PathBuf,
}

fn fit(cmd: &FitCmd) -> Result<(), RunError> {
    let args = cmd.to_args();
    let report = io::run_fit(&args)?;
    if args.out.is_none() {
        match args.format {
            OutputFormat::Json => println!("{}", report.to_json()),
            OutputFormat::Csv => print!("{}", report.to_csv()),
        }
    }
    Ok(())
}

fn bench(cmd: &BenchCmd) -> Result<(), RunError> {
    let mut suite = BenchSuite::new(cmd.model.into());
    suite.seed = cmd.seed;
    suite.sweeps = match cmd.sweep {
        SweepArg::Outliers => vec![Sweep::Outliers],
        SweepArg::Superpixels => vec![Sweep::Superpixels],
        SweepArg::All => vec![Sweep::Outliers, Sweep::Superpixels],
    };
    let csv = io::run_benchmark(&suite).to_csv();
    match &cmd.out {
        Some(p) => std::fs::write(p, csv).map_err(|e| RunError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn generate(cmd: &GenerateCmd) -> Result<(), RunError> {
    let spec = SceneSpec::random(
        cmd.model.into(),
        cmd.width,
        cmd.height,
        &cmd.inliers,
        cmd.outliers,
        cmd.noise,
        cmd.seed,
    );
    let scene = generate_scene(&spec).map_err(|e| RunError::Usage(e.to_string()))?;
    for w in &scene.warnings {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(&cmd.out).map_err(|e| RunError::Usage(format!("{}: {e}", cmd.out.display())))?;
    let internal = |e: io::IoError| RunError::Internal(e.to_string());
    io::save_matches(cmd.out.join("scene.matches"), &scene.correspondences).map_err(internal)?;
    io::save_labels(cmd.out.join("scene.labels"), &scene.labels).map_err(internal)?;
    io::save_rgb(cmd.out.join("view1.ppm"), scene.width, scene.height, &scene.rgb1).map_err(internal)?;
    io::save_rgb(cmd.out.join("view2.ppm"), scene.width, scene.height, &scene.rgb2).map_err(internal)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || match &cli.command {
        Command::Fit(c) => fit(c),
        Command::Bench(c) => bench(c),
        Command::Generate(c) => generate(c),
    };
    let result = match par::threads_from_env() {
        Some(n) => par::with_threads(n, run),
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("multifit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
