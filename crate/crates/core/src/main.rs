use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use sesam_core::ablate::{self, AblationSpec, Sweep};
use sesam_core::config::{ConfigError, RefinementConfig};
use sesam_core::cost::{self, AnnotationKind, CostEntry, CostModel};
use sesam_core::fusion::{self, TagCounts};
use sesam_core::metrics::{self, MetricsError};
use sesam_core::oracle::{
    wire, GranularityRule, MaskOracle, MockOracle, MockScene, ProcessOracle, ReplayOracle, ORACLE_CMD_ENV,
};
use sesam_core::raster::io::{read_field, read_label_map, read_mask, write_label_map};
use sesam_core::raster::{Connectivity, LabelMap, RasterError};
use sesam_core::refine::{self, PseudoInput, WeakAnnotation, WeakKind};
use sesam_core::sampling::SamplerStrategy;
use sesam_core::selection::SelectionStrategy;
use sesam_core::suite::{self, SuiteSpec};

#[derive(Parser)]
#[command(
    name = "sesam",
    version,
    about = "Refine weak segmentation labels with a promptable mask oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine weak labels for one image and write supervision maps.
    Refine(RefineArgs),
    /// Grow point or scribble labels into initial coarse regions.
    Bootstrap(BootstrapArgs),
    /// Compare a label map against ground truth.
    Evaluate(EvaluateArgs),
    /// Run parameter sweeps over a synthetic scene suite.
    Ablate(AblateArgs),
    /// Annotation hours and cost-vs-performance tables.
    Cost(CostArgs),
    /// Write synthetic scenes with ground truth and eroded coarse labels.
    GenScene(GenSceneArgs),
    /// Answer protocol requests on stdin from mock scenes.
    #[command(hide = true)]
    MockAdapter(MockAdapterArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum OracleKind {
    /// Geometric mock answering from scene files.
    Mock,
    /// External process speaking the line protocol (command from SESAM_ORACLE_CMD).
    File,
    /// Recorded responses file.
    Replay,
}

#[derive(Args)]
struct OracleArgs {
    /// Oracle backend.
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
    /// Mock scene JSON (repeatable), for `--oracle mock`.
    #[arg(long = "scene")]
    scenes: Vec<PathBuf>,
    /// Recorded responses, for `--oracle replay`.
    #[arg(long)]
    responses: Option<PathBuf>,
    /// Shell command for `--oracle file`.
    #[arg(long, env = ORACLE_CMD_ENV)]
    oracle_cmd: Option<String>,
}

#[derive(Args, Default, Serialize)]
struct ConfigFlags {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    tau1: Option<f64>,
    #[arg(long)]
    tau2: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    resample_period: Option<u32>,
    /// 4 or 8.
    #[arg(long)]
    connectivity: Option<Connectivity>,
    /// skeleton-grid, random, center, boundary or top-confidence.
    #[arg(long)]
    sampler: Option<SamplerStrategy>,
    /// weak-aware, best-score or random.
    #[arg(long)]
    selection: Option<SelectionStrategy>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigFlags {
    fn resolve(&self) -> Result<RefinementConfig> {
        let mut cfg = match &self.config {
            Some(p) => RefinementConfig::load(p).with_context(|| format!("config {}", p.display()))?,
            None => RefinementConfig::default(),
        };
        macro_rules! set {
            ($($f:ident => $t:ident),*) => { $(if let Some(v) = self.$f { cfg.$t = v; })* };
        }
        set!(k => k, tau1 => tau1, tau2 => tau2, theta1 => theta1, theta2 => theta2,
             resample_period => resample_period_m, connectivity => connectivity,
             sampler => sampler, selection => selection, seed => seed);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RefineArgs {
    /// Weak labels (LBL1).
    #[arg(long)]
    weak: PathBuf,
    /// Kind of weak labels; point and scribble labels are bootstrapped first.
    #[arg(long, default_value = "coarse")]
    kind: WeakKind,
    /// Image reference sent to the oracle (default: the single mock scene, else the file stem).
    #[arg(long)]
    image_ref: Option<String>,
    /// Teacher predictions (LBL1).
    #[arg(long, requires = "confidence")]
    pseudo: Option<PathBuf>,
    /// Teacher confidence (FLD1).
    #[arg(long, requires = "pseudo")]
    confidence: Option<PathBuf>,
    /// Write the oracle requests to this file and stop.
    #[arg(long)]
    emit_requests: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
    #[command(flatten)]
    cfg: ConfigFlags,
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    weak: PathBuf,
    #[arg(long, default_value = "point")]
    kind: WeakKind,
    #[arg(long)]
    image_ref: Option<String>,
    /// Output label file.
    #[arg(long)]
    out: PathBuf,
    /// Audit lines (JSON per group).
    #[arg(long)]
    audit: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
    #[command(flatten)]
    cfg: ConfigFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// Restrict precision and recall to this mask (LBL1, class 1 = inside).
    #[arg(long)]
    region: Option<PathBuf>,
    /// Restrict precision and recall to pixels unlabeled in these weak labels.
    #[arg(long, conflicts_with = "region")]
    added_from: Option<PathBuf>,
    /// Classes left out of the mean, comma separated.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<u16>,
    /// Also write the per-class table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AblateArgs {
    /// sampler, selection, points or tau; repeatable. Default: all.
    #[arg(long)]
    sweep: Vec<Sweep>,
    #[arg(long, default_value_t = 20)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    suite_seed: u64,
    /// Boundary noise radius of the mock oracle.
    #[arg(long, default_value_t = 2)]
    noise: u32,
    #[arg(long, default_value_t = 2)]
    erosion: usize,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV output (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cfg: ConfigFlags,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long, required_unless_present = "table")]
    kind: Option<AnnotationKind>,
    #[arg(long, requires = "kind")]
    images: Option<u64>,
    /// CSV with columns kind,n_images,miou; prints the cost-vs-performance table.
    #[arg(long, conflicts_with_all = ["kind", "images"])]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct GenSceneArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    noise: u32,
    /// Make the mock return the exact shape as its first candidate.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 2)]
    erosion: usize,
    #[arg(long, default_value_t = 96)]
    width: usize,
    #[arg(long, default_value_t = 96)]
    height: usize,
}

#[derive(Args)]
struct MockAdapterArgs {
    #[arg(long = "scene", required = true)]
    scenes: Vec<PathBuf>,
}

/// Error that maps to exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(RasterError::DimensionMismatch { .. }) = cause.downcast_ref::<RasterError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Refine(a) => cmd_refine(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Cost(a) => cmd_cost(a),
        Command::GenScene(a) => cmd_gen_scene(a),
        Command::MockAdapter(a) => cmd_mock_adapter(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_scenes(paths: &[PathBuf]) -> Result<Vec<MockScene>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("scene {}", p.display()))?;
            let scene = MockScene::from_json(&text).with_context(|| format!("scene {}", p.display()))?;
            scene.validate().with_context(|| format!("scene {}", p.display()))?;
            Ok(scene)
        })
        .collect()
}

struct Backend {
    oracle: Box<dyn MaskOracle>,
    kind: OracleKind,
    detail: String,
    default_ref: Option<String>,
}

fn open_oracle(args: &OracleArgs) -> Result<Backend> {
    let kind = args
        .oracle
        .ok_or_else(|| usage("no oracle backend: pass --oracle mock|file|replay"))?;
    match kind {
        OracleKind::Mock => {
            if args.scenes.is_empty() {
                return Err(usage("--oracle mock needs at least one --scene"));
            }
            let scenes = load_scenes(&args.scenes)?;
            let default_ref = (scenes.len() == 1).then(|| scenes[0].image_ref.clone());
            let detail = args
                .scenes
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(",");
            Ok(Backend {
                oracle: Box::new(MockOracle::new(scenes)),
                kind,
                detail,
                default_ref,
            })
        }
        OracleKind::File => {
            let cmd = args
                .oracle_cmd
                .clone()
                .filter(|c| !c.trim().is_empty())
                .ok_or_else(|| usage(format!("--oracle file needs {ORACLE_CMD_ENV} or --oracle-cmd")))?;
            Ok(Backend {
                oracle: Box::new(ProcessOracle::new(cmd.clone())),
                kind,
                detail: cmd,
                default_ref: None,
            })
        }
        OracleKind::Replay => {
            let path = args
                .responses
                .as_ref()
                .ok_or_else(|| usage("--oracle replay needs --responses"))?;
            Ok(Backend {
                oracle: Box::new(ReplayOracle::open(path)?),
                kind,
                detail: path.display().to_string(),
                default_ref: None,
            })
        }
    }
}

fn image_ref_for(explicit: &Option<String>, backend: Option<&Backend>, weak: &Path) -> String {
    explicit
        .clone()
        .or_else(|| backend.and_then(|b| b.default_ref.clone()))
        .unwrap_or_else(|| {
            weak.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "image".to_owned())
        })
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| path.display().to_string())?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    image_ref: String,
    seed: u64,
    config: RefinementConfig,
    oracle: OracleRecord,
    inputs: Inputs,
    outputs: Outputs,
    counts: Counts,
    timing_ms: Timing,
}

#[derive(Serialize, Deserialize)]
struct OracleRecord {
    backend: String,
    source: String,
}

#[derive(Serialize, Deserialize)]
struct Inputs {
    weak: String,
    kind: WeakKind,
    pseudo: Option<String>,
    confidence: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Outputs {
    sesam: String,
    sam: String,
    supervision: String,
    supervision_source: String,
    audit: String,
}

#[derive(Serialize, Deserialize)]
struct Counts {
    pixels: usize,
    weak_pixels: usize,
    bootstrap_pixels: usize,
    instances: usize,
    sam_pixels: usize,
    pseudo_pixels: usize,
    tags: TagCountsRecord,
}

#[derive(Serialize, Deserialize)]
struct TagCountsRecord {
    weak: usize,
    sam: usize,
    pseudo: usize,
    ignore: usize,
}

impl From<TagCounts> for TagCountsRecord {
    fn from(t: TagCounts) -> Self {
        TagCountsRecord {
            weak: t.weak,
            sam: t.sam,
            pseudo: t.pseudo,
            ignore: t.ignore,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Timing {
    bootstrap: u128,
    refine: u128,
    total: u128,
}

fn cmd_refine(a: RefineArgs) -> Result<()> {
    let started = Instant::now();
    let cfg = a.cfg.resolve()?;
    let weak_labels = read_label_map(&a.weak).with_context(|| format!("weak labels {}", a.weak.display()))?;
    let pseudo = match (&a.pseudo, &a.confidence) {
        (Some(p), Some(c)) => {
            let labels = read_label_map(p).with_context(|| format!("pseudo labels {}", p.display()))?;
            let conf = read_field(c).with_context(|| format!("confidence {}", c.display()))?;
            weak_labels.ensure_dims(labels.dims()).context("pseudo labels")?;
            weak_labels.ensure_dims(conf.dims()).context("confidence")?;
            Some((labels, conf))
        }
        _ => None,
    };
    let pseudo_in = pseudo
        .as_ref()
        .map(|(labels, confidence)| PseudoInput { labels, confidence });

    if let Some(path) = &a.emit_requests {
        if a.kind != WeakKind::Coarse {
            return Err(usage("--emit-requests needs coarse labels; run `bootstrap` first"));
        }
        let backend = a.oracle.oracle.map(|_| open_oracle(&a.oracle)).transpose()?;
        let image_ref = image_ref_for(&a.image_ref, backend.as_ref(), &a.weak);
        let plan = refine::plan_refinement(&weak_labels, &image_ref, &cfg, pseudo_in)?;
        let lines: Vec<String> = plan.requests().iter().map(wire::encode_request).collect();
        fs::write(path, lines.iter().map(|l| format!("{l}\n")).collect::<String>())?;
        eprintln!("wrote {} requests to {}", lines.len(), path.display());
        return Ok(());
    }

    let out_dir = a.out.clone().ok_or_else(|| usage("--out is required"))?;
    let backend = open_oracle(&a.oracle)?;
    let image_ref = image_ref_for(&a.image_ref, Some(&backend), &a.weak);

    let t0 = Instant::now();
    let weak = WeakAnnotation {
        kind: a.kind,
        labels: weak_labels.clone(),
    };
    let (coarse, mut audit) = refine::bootstrap_coarse(&weak, &image_ref, backend.oracle.as_ref(), &cfg)?;
    let bootstrap_ms = t0.elapsed().as_millis();

    let t1 = Instant::now();
    let out = refine::refine_labels(&coarse, &image_ref, backend.oracle.as_ref(), &cfg, pseudo_in)?;
    let refine_ms = t1.elapsed().as_millis();
    let instances = out.audit.len();
    audit.extend(out.audit.iter().cloned());

    // bootstrapped regions count as SAM source
    let mut sam = out.sam.clone();
    for i in 0..sam.len() {
        if weak_labels.get_index(i) == u16::MAX && coarse.get_index(i) != u16::MAX {
            sam.set_index(i, coarse.get_index(i));
        }
    }
    let filtered = match &pseudo {
        Some((labels, conf)) => fusion::filter_pseudo(labels, conf, cfg.theta1)?,
        None => LabelMap::new(weak_labels.width(), weak_labels.height(), weak_labels.class_count())?,
    };
    let supervision = fusion::compose_supervision(&weak_labels, &sam, &filtered)?;

    fs::create_dir_all(&out_dir).with_context(|| out_dir.display().to_string())?;
    let outputs = Outputs {
        sesam: "sesam.lbl".into(),
        sam: "sam.lbl".into(),
        supervision: "supervision.lbl".into(),
        supervision_source: "supervision_source.lbl".into(),
        audit: "audit.jsonl".into(),
    };
    write_label_map(out_dir.join(&outputs.sesam), &out.labels)?;
    write_label_map(out_dir.join(&outputs.sam), &sam)?;
    supervision.write(
        out_dir.join(&outputs.supervision),
        out_dir.join(&outputs.supervision_source),
    )?;
    write_jsonl(&out_dir.join(&outputs.audit), &audit)?;

    let manifest = Manifest {
        tool: "sesam".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        image_ref,
        seed: cfg.seed,
        config: cfg,
        oracle: OracleRecord {
            backend: match backend.kind {
                OracleKind::Mock => "mock",
                OracleKind::File => "file_protocol",
                OracleKind::Replay => "replay",
            }
            .into(),
            source: backend.detail.clone(),
        },
        inputs: Inputs {
            weak: a.weak.display().to_string(),
            kind: a.kind,
            pseudo: a.pseudo.as_ref().map(|p| p.display().to_string()),
            confidence: a.confidence.as_ref().map(|p| p.display().to_string()),
        },
        counts: Counts {
            pixels: weak_labels.len(),
            weak_pixels: weak_labels.labeled_count(),
            bootstrap_pixels: coarse.labeled_count() - weak_labels.labeled_count(),
            instances,
            sam_pixels: sam.labeled_count(),
            pseudo_pixels: filtered.labeled_count(),
            tags: supervision.tag_counts().into(),
        },
        outputs,
        timing_ms: Timing {
            bootstrap: bootstrap_ms,
            refine: refine_ms,
            total: started.elapsed().as_millis(),
        },
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    println!(
        "{}: {} instances, {} pixels added, wrote {}",
        manifest.image_ref,
        instances,
        manifest.counts.sam_pixels,
        out_dir.display()
    );
    Ok(())
}

fn cmd_bootstrap(a: BootstrapArgs) -> Result<()> {
    let cfg = a.cfg.resolve()?;
    let labels = read_label_map(&a.weak).with_context(|| format!("weak labels {}", a.weak.display()))?;
    let backend = open_oracle(&a.oracle)?;
    let image_ref = image_ref_for(&a.image_ref, Some(&backend), &a.weak);
    let weak = WeakAnnotation { kind: a.kind, labels };
    let (coarse, audit) = refine::bootstrap_coarse(&weak, &image_ref, backend.oracle.as_ref(), &cfg)?;
    write_label_map(&a.out, &coarse)?;
    if let Some(p) = &a.audit {
        write_jsonl(p, &audit)?;
    }
    println!(
        "{image_ref}: {} groups, {} labeled pixels (was {})",
        audit.len(),
        coarse.labeled_count(),
        weak.labels.labeled_count()
    );
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let pred = read_label_map(&a.pred).with_context(|| format!("prediction {}", a.pred.display()))?;
    let gt = read_label_map(&a.gt).with_context(|| format!("ground truth {}", a.gt.display()))?;
    let region = match (&a.region, &a.added_from) {
        (Some(p), _) => Some(read_mask(p).with_context(|| format!("region {}", p.display()))?),
        (None, Some(p)) => Some(
            read_label_map(p)
                .with_context(|| format!("weak labels {}", p.display()))?
                .labeled_mask()
                .invert(),
        ),
        _ => None,
    };
    let report = match metrics::evaluate(&pred, &gt, region.as_ref(), &a.exclude) {
        Err(MetricsError::Raster(e)) => return Err(anyhow::Error::new(e).context("evaluate")),
        other => other?,
    };
    print!("{}", report.to_kv());
    if let Some(p) = &a.csv {
        fs::write(p, report.to_csv()?)?;
    }
    Ok(())
}

fn cmd_ablate(a: AblateArgs) -> Result<()> {
    let base = a.cfg.resolve()?;
    let suite = suite::generate_suite(&SuiteSpec {
        scenes: a.scenes,
        seed: a.suite_seed,
        noise: a.noise,
        ..Default::default()
    });
    let spec = AblationSpec {
        base,
        erosion: a.erosion,
        trials: a.trials,
        jobs: a.jobs,
    };
    let sweeps = if a.sweep.is_empty() {
        Sweep::ALL.to_vec()
    } else {
        a.sweep
    };
    let mut rows = Vec::new();
    for sweep in sweeps {
        rows.extend(ablate::run_sweep(&suite, sweep, &spec)?);
    }
    let csv = ablate::rows_to_csv(&rows)?;
    match &a.out {
        Some(p) => fs::write(p, csv)?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

#[derive(Deserialize)]
struct EntryRecord {
    kind: String,
    n_images: u64,
    miou: f64,
}

fn cmd_cost(a: CostArgs) -> Result<()> {
    let model = CostModel::default();
    if let Some(path) = &a.table {
        let mut reader = csv::Reader::from_path(path).with_context(|| path.display().to_string())?;
        let mut entries = Vec::new();
        for rec in reader.deserialize::<EntryRecord>() {
            let rec = rec.map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let kind = rec.kind.parse::<AnnotationKind>().map_err(|e| usage(e.to_string()))?;
            entries.push(CostEntry {
                kind,
                n_images: rec.n_images,
                miou: rec.miou,
            });
        }
        if entries.is_empty() {
            bail!(usage(format!("{} has no entries", path.display())));
        }
        let rows = cost::cost_performance_table(&model, &entries)?;
        print!("{}", cost::table_to_csv(&rows)?);
        return Ok(());
    }
    let kind = a.kind.ok_or_else(|| usage("--kind is required"))?;
    match a.images {
        Some(n) => println!("{:.2}", model.annotation_hours(kind, n)?),
        None => println!("{} min per image", model.minutes(kind)?),
    }
    Ok(())
}

fn cmd_gen_scene(a: GenSceneArgs) -> Result<()> {
    if a.width < 8 || a.height < 8 {
        return Err(usage("scenes must be at least 8x8"));
    }
    let spec = SuiteSpec {
        scenes: a.scenes,
        width: a.width,
        height: a.height,
        seed: a.seed,
        noise: a.noise,
        granularity: if a.exact {
            GranularityRule::Exact
        } else {
            GranularityRule::Nested
        },
        ..Default::default()
    };
    fs::create_dir_all(&a.out)?;
    for scene in suite::generate_suite(&spec) {
        let gt = scene.gt_labels();
        let coarse = suite::eroded_labels(&gt, a.erosion);
        let name = &scene.image_ref;
        fs::write(a.out.join(format!("{name}.json")), scene.to_json())?;
        write_label_map(a.out.join(format!("{name}.gt.lbl")), &gt)?;
        write_label_map(a.out.join(format!("{name}.coarse.lbl")), &coarse)?;
    }
    println!("wrote {} scenes to {}", spec.scenes, a.out.display());
    Ok(())
}

fn cmd_mock_adapter(a: MockAdapterArgs) -> Result<()> {
    let oracle = MockOracle::new(load_scenes(&a.scenes)?);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{}", serde_json::json!({ "variant": "mock" }))?;
    wire::serve(&oracle, io::stdin().lock(), &mut out)?;
    Ok(())
}
