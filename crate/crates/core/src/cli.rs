//! `bandsel` command-line front end.
//!
//! Every command resolves a [`RunConfig`] (flags over `--config` file over
//! defaults), writes it as `run_config.txt` into the output directory, and
//! then writes its CSV outputs atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{
    generate_synthetic, load_cube, load_ground_truth, render_grid, write_cube, CubeLayout,
    GroundTruth, HyperCube, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::eval::{classify_map, split, sweep, ClassifierConfig, SplitSpec};
use crate::info::{BinStrategy, DiscretizationConfig};
use crate::kv::{self, KeyValues};
use crate::selection::{rank_bands_by_mi, ranking_csv, select, Algorithm, SelectionConfig};

#[derive(Debug, Parser)]
#[command(
    name = "bandsel",
    version,
    about = "Information-theoretic band selection for hyperspectral cubes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank every band by MI with the ground truth (mi_ranking.csv).
    Stats(RunArgs),
    /// Run a selection filter (selection.csv).
    Select(RunArgs),
    /// Select once and evaluate k-NN accuracy at each size (report_<algorithm>.csv).
    Sweep(RunArgs),
    /// Generate a synthetic cube and ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// ENVI header of the cube.
    #[arg(long)]
    pub cube: Option<PathBuf>,
    /// Ground-truth label grid.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// mi, tmi, or both (sweep only).
    #[arg(long)]
    pub algo: Option<String>,
    /// Maximum number of bands to select.
    #[arg(long)]
    pub k: Option<usize>,
    /// MI gain threshold in bits (mi filter).
    #[arg(long, allow_hyphen_values = true)]
    pub th: Option<f64>,
    /// Bins for the MI ranking.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Split seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training fraction of each class.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Neighbours for k-NN.
    #[arg(long)]
    pub knn: Option<usize>,
    /// Subset sizes for sweep, e.g. 3,5,10.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Also write the classified label grid at this size (sweep).
    #[arg(long = "map-at")]
    pub map_at: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file with RunConfig fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SynthArgs {
    /// `key = value` file with synthetic spec fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoChoice {
    One(Algorithm),
    Both,
}

impl AlgoChoice {
    fn parse(s: &str) -> Result<Self> {
        if s.trim() == "both" {
            Ok(AlgoChoice::Both)
        } else {
            s.parse().map(AlgoChoice::One)
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            AlgoChoice::One(a) => a.as_str(),
            AlgoChoice::Both => "both",
        }
    }

    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::One(a) => vec![a],
            AlgoChoice::Both => vec![Algorithm::MiFilter, Algorithm::TmiFilter],
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cube_header: Option<PathBuf>,
    pub gt_path: Option<PathBuf>,
    pub algorithm: AlgoChoice,
    pub k_max: usize,
    pub threshold_th: f64,
    pub n_bins: usize,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub knn_k: usize,
    pub sizes: Vec<usize>,
    pub output_dir: PathBuf,
    pub map_at: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sel = SelectionConfig::default();
        let split = SplitSpec::default();
        RunConfig {
            cube_header: None,
            gt_path: None,
            algorithm: AlgoChoice::One(sel.algorithm),
            k_max: sel.k_max,
            threshold_th: sel.threshold_th,
            n_bins: sel.discretization.n_bins,
            split_seed: split.seed,
            train_fraction: split.train_fraction,
            knn_k: ClassifierConfig::default().knn_k,
            sizes: Vec::new(),
            output_dir: PathBuf::from("."),
            map_at: None,
        }
    }
}

const RUN_KEYS: &[&str] = &[
    "cube_header",
    "gt_path",
    "algorithm",
    "k_max",
    "threshold_th",
    "n_bins",
    "split_seed",
    "train_fraction",
    "knn_k",
    "sizes",
    "output_dir",
    "map_at",
];

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split([',', '|', ' '])
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::format("sizes", format!("`{t}` is not a count")))
        })
        .collect()
}

impl RunConfig {
    /// Applies the fields present in a `key = value` file. Unknown keys are
    /// rejected so typos do not silently fall back to defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let kv = KeyValues::read(path)?;
        if let Some(k) = kv.keys().find(|k| !RUN_KEYS.contains(k)) {
            return Err(Error::Config(format!(
                "{}: unknown key `{k}`",
                path.display()
            )));
        }
        // Paths resolve against the working directory, like flag values, so
        // a written run_config.txt replays from where the run was started.
        if let Some(v) = kv.get("cube_header") {
            self.cube_header = Some(PathBuf::from(v));
        }
        if let Some(v) = kv.get("gt_path") {
            self.gt_path = Some(PathBuf::from(v));
        }
        if let Some(v) = kv.get("output_dir") {
            self.output_dir = PathBuf::from(v);
        }
        if let Some(v) = kv.get("algorithm") {
            self.algorithm = AlgoChoice::parse(v)?;
        }
        if let Some(v) = kv.get("sizes") {
            self.sizes = parse_sizes(v)?;
        }
        self.k_max = kv.parse_opt("k_max")?.unwrap_or(self.k_max);
        self.threshold_th = kv.parse_opt("threshold_th")?.unwrap_or(self.threshold_th);
        self.n_bins = kv.parse_opt("n_bins")?.unwrap_or(self.n_bins);
        self.split_seed = kv.parse_opt("split_seed")?.unwrap_or(self.split_seed);
        self.train_fraction = kv
            .parse_opt("train_fraction")?
            .unwrap_or(self.train_fraction);
        self.knn_k = kv.parse_opt("knn_k")?.unwrap_or(self.knn_k);
        if let Some(m) = kv.parse_opt("map_at")? {
            self.map_at = Some(m);
        }
        Ok(())
    }

    pub fn apply_args(&mut self, a: &RunArgs) -> Result<()> {
        if let Some(v) = &a.cube {
            self.cube_header = Some(v.clone());
        }
        if let Some(v) = &a.gt {
            self.gt_path = Some(v.clone());
        }
        if let Some(v) = &a.algo {
            self.algorithm = AlgoChoice::parse(v)?;
        }
        if let Some(v) = &a.sizes {
            self.sizes = v.clone();
        }
        if let Some(v) = &a.out {
            self.output_dir = v.clone();
        }
        self.k_max = a.k.unwrap_or(self.k_max);
        self.threshold_th = a.th.unwrap_or(self.threshold_th);
        self.n_bins = a.bins.unwrap_or(self.n_bins);
        self.split_seed = a.seed.unwrap_or(self.split_seed);
        self.train_fraction = a.fraction.unwrap_or(self.train_fraction);
        self.knn_k = a.knn.unwrap_or(self.knn_k);
        if a.map_at.is_some() {
            self.map_at = a.map_at;
        }
        Ok(())
    }

    /// Defaults, then the `--config` file, then explicit flags.
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_args(args)?;
        Ok(cfg)
    }

    pub fn selection_config(&self, algorithm: Algorithm) -> SelectionConfig {
        SelectionConfig {
            k_max: self.k_max,
            threshold_th: self.threshold_th,
            discretization: DiscretizationConfig {
                n_bins: self.n_bins,
                strategy: BinStrategy::MinMaxUniform,
            },
            algorithm,
            ..SelectionConfig::default()
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed: self.split_seed,
            stratified: true,
        }
    }

    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig {
            knn_k: self.knn_k,
            ..ClassifierConfig::default()
        }
    }

    pub fn render(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        kv::render(&[
            ("cube_header", path(&self.cube_header)),
            ("gt_path", path(&self.gt_path)),
            ("algorithm", self.algorithm.as_str().to_string()),
            ("k_max", self.k_max.to_string()),
            ("threshold_th", self.threshold_th.to_string()),
            ("n_bins", self.n_bins.to_string()),
            ("split_seed", self.split_seed.to_string()),
            ("train_fraction", self.train_fraction.to_string()),
            ("knn_k", self.knn_k.to_string()),
            ("sizes", sizes.join(",")),
            ("output_dir", self.output_dir.display().to_string()),
            (
                "map_at",
                self.map_at.map(|m| m.to_string()).unwrap_or_default(),
            ),
        ])
    }

    fn load(&self) -> Result<(HyperCube, GroundTruth)> {
        let cube_path = self
            .cube_header
            .as_ref()
            .ok_or_else(|| Error::Config("no cube given (--cube or cube_header)".into()))?;
        let gt_path = self
            .gt_path
            .as_ref()
            .ok_or_else(|| Error::Config("no ground truth given (--gt or gt_path)".into()))?;
        // Check both paths up front so a missing GT is reported before a long cube read.
        for p in [cube_path, gt_path] {
            if !p.exists() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                ));
            }
        }
        let cube = load_cube(cube_path)?;
        let gt = load_ground_truth(gt_path, (cube.width(), cube.height()))?;
        Ok((cube, gt))
    }

    fn prepare_output(&self) -> Result<()> {
        std::fs::create_dir_all(&self.output_dir).map_err(|e| Error::io(&self.output_dir, e))?;
        self.write("run_config.txt", self.render())
    }

    fn write(&self, name: &str, text: String) -> Result<()> {
        kv::write_atomic(&self.output_dir.join(name), text.as_bytes())
    }

    fn single_algorithm(&self) -> Result<Algorithm> {
        match self.algorithm {
            AlgoChoice::One(a) => Ok(a),
            AlgoChoice::Both => Err(Error::Config("`both` is only accepted by sweep".into())),
        }
    }
}

/// Runs a parsed command line; `stdout` receives the human-readable output.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Stats(a) => cmd_stats(&RunConfig::resolve(a)?, stdout),
        Command::Select(a) => cmd_select(&RunConfig::resolve(a)?, stdout),
        Command::Sweep(a) => cmd_sweep(&RunConfig::resolve(a)?, stdout),
        Command::Synth(a) => cmd_synth(a, stdout),
    }
}

fn say(stdout: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_stats(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let (cube, gt) = cfg.load()?;
    let disc = cfg.selection_config(Algorithm::MiFilter).discretization;
    disc.validate()?;
    let ranking = rank_bands_by_mi(&cube, &gt, &disc)?;
    cfg.prepare_output()?;
    cfg.write(
        "mi_ranking.csv",
        ranking_csv(&ranking, cube.band_id_offset()),
    )?;
    say(
        stdout,
        &format!(
            "ranked {} bands -> {}",
            ranking.len(),
            cfg.output_dir.join("mi_ranking.csv").display()
        ),
    )
}

pub fn cmd_select(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let algorithm = cfg.single_algorithm()?;
    let sel_cfg = cfg.selection_config(algorithm);
    sel_cfg.validate()?;
    let (cube, gt) = cfg.load()?;
    if sel_cfg.k_max > cube.n_bands() {
        return Err(Error::Config(format!(
            "k_max {} exceeds the cube's {} bands",
            sel_cfg.k_max,
            cube.n_bands()
        )));
    }
    let result = select(&cube, &gt, &sel_cfg)?;
    cfg.prepare_output()?;
    cfg.write("selection.csv", result.to_csv())?;
    cfg.write("selection.txt", result.sidecar())?;
    let ids: Vec<String> = result
        .selected_ids()
        .iter()
        .map(|b| b.to_string())
        .collect();
    say(stdout, &ids.join(","))
}

pub fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    if cfg.sizes.is_empty() {
        return Err(Error::Config("sweep needs sizes (--sizes a,b,c)".into()));
    }
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if let Some(m) = cfg.map_at {
        if m == 0 || m > *sizes.last().unwrap() {
            return Err(Error::Config(format!(
                "map_at {m} must lie between 1 and the largest size {}",
                sizes.last().unwrap()
            )));
        }
    }
    let split_spec = cfg.split_spec();
    split_spec.validate()?;
    let classifier = cfg.classifier();
    if classifier.knn_k == 0 {
        return Err(Error::Config("knn_k must be at least 1".into()));
    }
    let (cube, gt) = cfg.load()?;
    let mut outputs = Vec::new();
    for algorithm in cfg.algorithm.algorithms() {
        let sel_cfg = cfg.selection_config(algorithm);
        sel_cfg.validate()?;
        let (report, selection) = sweep(&cube, &gt, &sel_cfg, &sizes, &split_spec, &classifier)?;
        let mut sidecar = selection.sidecar();
        sidecar.push_str(&report.sidecar());
        outputs.push((format!("report_{algorithm}.csv"), report.to_csv()));
        outputs.push((format!("report_{algorithm}.txt"), sidecar));
        if let Some(m) = cfg.map_at {
            let n = m.min(selection.selected.len());
            let masks = split(&gt, &split_spec)?;
            let labels = classify_map(&cube, &gt, &selection.selected[..n], &masks, &classifier)?;
            outputs.push((
                format!("map_{algorithm}_{m}.txt"),
                render_grid(cube.width(), &labels),
            ));
        }
        for row in &report.rows {
            say(
                stdout,
                &format!(
                    "{algorithm} n_bands={} accuracy={:.2}%",
                    row.n_bands, row.accuracy_percent
                ),
            )?;
        }
    }
    cfg.prepare_output()?;
    for (name, text) in outputs {
        cfg.write(&name, text)?;
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut spec = match &args.config {
        Some(p) => SyntheticSpec::from_key_values(&KeyValues::read(p)?)?,
        None => SyntheticSpec::default(),
    };
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    spec.validate()?;
    let (cube, gt) = generate_synthetic(&spec)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    kv::write_atomic(&out.join("synth_config.txt"), spec.render().as_bytes())?;
    let data = write_cube(&cube, &out.join("cube.hdr"), CubeLayout::default())?;
    kv::write_atomic(&out.join("gt.txt"), gt.to_text().as_bytes())?;
    say(
        stdout,
        &format!(
            "{}x{}x{} cube -> {}, ground truth -> {}",
            cube.width(),
            cube.height(),
            cube.n_bands(),
            data.display(),
            out.join("gt.txt").display()
        ),
    )
}
