//! Staged execution and export of the full analysis.
//!
//! Stages run in order ingest, classify, stats, graphs, backbone. All
//! exports are rendered in memory and committed to the output directory only
//! after every requested stage succeeded, so a failing run leaves no partial
//! files behind. The backbone stage alone can restart from the edge lists a
//! previous run left in the output directory.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backbone::{self, BackboneConfig, DEFAULT_ALPHAS};
use crate::classify::{self, ClassifyConfig, UserClassification};
use crate::exec::Execution;
use crate::graph::{self, Side, WeightedGraph};
use crate::ingest::{self, ActivityDataset, PageRecord};
use crate::stats::{self, EmpiricalDistribution, Measure, PageMetrics, StatsError};

pub const RESHARES_EDGES: &str = "reshares_edges.csv";
pub const COMMON_USERS_EDGES: &str = "common_users_edges.csv";
pub const MANIFEST: &str = "manifest.json";

/// Columns of the activity correlation table.
pub const ACTIVITY_MEASURES: [Measure; 5] = [
    Measure::Users,
    Measure::Posts,
    Measure::Likes,
    Measure::Comments,
    Measure::Shares,
];
/// Columns of the correlation table including polarized users.
pub const POLARIZED_MEASURES: [Measure; 6] = [
    Measure::Polarized,
    Measure::Users,
    Measure::Posts,
    Measure::Likes,
    Measure::Comments,
    Measure::Shares,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Classify,
    Stats,
    Graphs,
    Backbone,
    Output,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Ingest => 3,
            Stage::Classify => 4,
            Stage::Stats => 5,
            Stage::Graphs => 6,
            Stage::Backbone => 7,
            Stage::Output => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Classify => "classify",
            Stage::Stats => "stats",
            Stage::Graphs => "graphs",
            Stage::Backbone => "backbone",
            Stage::Output => "output",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    fn new(stage: Stage, cause: impl fmt::Display) -> Self {
        PipelineError {
            stage,
            message: cause.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.stage.exit_code()
    }
}

/// What a run should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Ingest,
    Classify,
    Stats,
    Graphs,
    Backbone,
    All,
}

impl Verb {
    fn writes(self, stage: Stage) -> bool {
        self == Verb::All
            || matches!(
                (self, stage),
                (Verb::Ingest, Stage::Ingest)
                    | (Verb::Classify, Stage::Classify)
                    | (Verb::Stats, Stage::Stats)
                    | (Verb::Graphs, Stage::Graphs)
                    | (Verb::Backbone, Stage::Backbone)
            )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputPaths {
    pub pages: PathBuf,
    pub posts: PathBuf,
    pub likes: PathBuf,
    pub comments: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Required by every verb except `backbone`.
    pub inputs: Option<InputPaths>,
    pub classify: ClassifyConfig,
    pub alphas: Vec<f64>,
    pub out_dir: PathBuf,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: None,
            classify: ClassifyConfig::default(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            out_dir: PathBuf::from("out"),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    input: InputSection,
    #[serde(default)]
    classify: Option<ClassifyConfig>,
    #[serde(default)]
    backbone: BackboneSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    pages: Option<PathBuf>,
    posts: Option<PathBuf>,
    likes: Option<PathBuf>,
    comments: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackboneSection {
    alpha: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub pages: Option<PathBuf>,
    pub posts: Option<PathBuf>,
    pub likes: Option<PathBuf>,
    pub comments: Option<PathBuf>,
    pub habitual_min_likes: Option<usize>,
    pub polarization_fraction: Option<f64>,
    pub alphas: Vec<f64>,
    pub out_dir: Option<PathBuf>,
    pub sequential: bool,
}

impl PipelineConfig {
    /// Parses a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn from_toml_str(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| PipelineError::new(Stage::Config, e))?;
        let resolve = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });
        let mut cfg = PipelineConfig {
            classify: file.classify.unwrap_or_default(),
            ..Default::default()
        };
        if let Some(a) = file.backbone.alpha {
            cfg.alphas = a;
        }
        if let Some(d) = resolve(file.output.dir) {
            cfg.out_dir = d;
        }
        cfg.inputs = partial_inputs(
            resolve(file.input.pages),
            resolve(file.input.posts),
            resolve(file.input.likes),
            resolve(file.input.comments),
        )?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::new(Stage::Config, format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Applies command-line overrides.
    pub fn with_overrides(mut self, o: Overrides) -> Result<Self, PipelineError> {
        let current = self.inputs.take();
        let pick = |flag: Option<PathBuf>, f: fn(&InputPaths) -> &PathBuf| {
            flag.or_else(|| current.as_ref().map(|c| f(c).clone()))
        };
        self.inputs = partial_inputs(
            pick(o.pages, |c| &c.pages),
            pick(o.posts, |c| &c.posts),
            pick(o.likes, |c| &c.likes),
            pick(o.comments, |c| &c.comments),
        )?;
        if let Some(m) = o.habitual_min_likes {
            self.classify.habitual_min_likes = m;
        }
        if let Some(f) = o.polarization_fraction {
            self.classify.polarization_fraction = f;
        }
        if !o.alphas.is_empty() {
            self.alphas = o.alphas;
        }
        if let Some(d) = o.out_dir {
            self.out_dir = d;
        }
        if o.sequential {
            self.execution = Execution::Sequential;
        }
        Ok(self)
    }

    pub fn validate(&self, verb: Verb) -> Result<(), PipelineError> {
        let err = |m: String| PipelineError::new(Stage::Config, m);
        self.classify.validate().map_err(|e| err(e.to_string()))?;
        if self.alphas.is_empty() {
            return Err(err("at least one alpha is required".into()));
        }
        for &a in &self.alphas {
            BackboneConfig::new(a).map_err(|e| err(e.to_string()))?;
        }
        if verb != Verb::Backbone && self.inputs.is_none() {
            return Err(err("input paths (pages, posts, likes, comments) are required".into()));
        }
        Ok(())
    }

    fn sorted_alphas(&self) -> Vec<f64> {
        let mut a = self.alphas.clone();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    }
}

fn partial_inputs(
    pages: Option<PathBuf>,
    posts: Option<PathBuf>,
    likes: Option<PathBuf>,
    comments: Option<PathBuf>,
) -> Result<Option<InputPaths>, PipelineError> {
    match (pages, posts, likes, comments) {
        (None, None, None, None) => Ok(None),
        (Some(pages), Some(posts), Some(likes), Some(comments)) => Ok(Some(InputPaths {
            pages,
            posts,
            likes,
            comments,
        })),
        _ => Err(PipelineError::new(
            Stage::Config,
            "inputs must name all of pages, posts, likes and comments",
        )),
    }
}

/// Groups of exported files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportKind {
    Validation,
    Classification,
    Metrics,
    Correlations,
    Distributions,
    Breakdowns,
    Networks,
    Backbones,
    Geolayers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExportedFile {
    pub kind: ExportKind,
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub verb: Verb,
    pub files: Vec<ExportedFile>,
    pub timings: Vec<StageTiming>,
}

impl RunManifest {
    pub fn kinds(&self) -> Vec<ExportKind> {
        let mut k: Vec<ExportKind> = self.files.iter().map(|f| f.kind).collect();
        k.dedup();
        k
    }

    /// Path to checksum map; a pure function of inputs and config.
    pub fn checksums(&self) -> BTreeMap<&str, &str> {
        self.files
            .iter()
            .map(|f| (f.path.as_str(), f.sha256.as_str()))
            .collect()
    }
}

/// Rendered exports waiting to be committed.
#[derive(Default)]
struct Outputs {
    files: Vec<(ExportKind, String, Vec<u8>)>,
}

impl Outputs {
    fn add<E, F>(
        &mut self,
        stage: Stage,
        kind: ExportKind,
        path: impl Into<String>,
        render: F,
    ) -> Result<(), PipelineError>
    where
        E: fmt::Display,
        F: FnOnce(&mut Vec<u8>) -> Result<(), E>,
    {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| PipelineError::new(stage, e))?;
        self.files.push((kind, path.into(), buf));
        Ok(())
    }
}

/// Runs the stages required by `verb` and writes its exports plus a
/// `manifest.json` into the configured output directory.
pub fn run_pipeline(config: &PipelineConfig, verb: Verb) -> Result<RunManifest, PipelineError> {
    config.validate(verb)?;
    let exec = config.execution;
    let mut out = Outputs::default();
    let mut timings = Vec::new();
    let mut timed = |stage: Stage, start: Instant| {
        timings.push(StageTiming {
            stage,
            millis: start.elapsed().as_secs_f64() * 1e3,
        })
    };

    let mut graphs: Option<(WeightedGraph, WeightedGraph)> = None;
    if verb != Verb::Backbone {
        let inputs = config.inputs.as_ref().expect("validated");
        let t = Instant::now();
        let dataset = load_dataset(exec, inputs)?;
        let report = ingest::validate(&dataset);
        if !report.is_ok() {
            return Err(PipelineError::new(Stage::Ingest, report.errors.join("; ")));
        }
        if verb.writes(Stage::Ingest) {
            out.add(Stage::Ingest, ExportKind::Validation, "validation.json", |b| {
                write_json(b, &report)
            })?;
        }
        timed(Stage::Ingest, t);

        if verb == Verb::Ingest {
            return commit(config, verb, out, timings);
        }
        let t = Instant::now();
        let classification = classify::classify_users_with(exec, &dataset, &config.classify)
            .map_err(|e| PipelineError::new(Stage::Classify, e))?;
        if verb.writes(Stage::Classify) {
            export_classification(&mut out, &dataset, &classification)?;
        }
        timed(Stage::Classify, t);

        if verb.writes(Stage::Stats) {
            let t = Instant::now();
            export_stats(&mut out, exec, &dataset, &classification)?;
            timed(Stage::Stats, t);
        }

        if matches!(verb, Verb::Graphs | Verb::All) {
            let t = Instant::now();
            let reshares = graph::project_with(exec, &graph::build_pages_posts(&dataset), Side::Left);
            let common = graph::project_with(
                exec,
                &graph::build_pages_polarized(&dataset, &classification),
                Side::Left,
            );
            out.add(Stage::Graphs, ExportKind::Networks, RESHARES_EDGES, |b| {
                reshares.write_edge_list(b)
            })?;
            out.add(Stage::Graphs, ExportKind::Networks, COMMON_USERS_EDGES, |b| {
                common.write_edge_list(b)
            })?;
            graphs = Some((reshares, common));
            timed(Stage::Graphs, t);
        }
    }

    if matches!(verb, Verb::Backbone | Verb::All) {
        let t = Instant::now();
        let (reshares, common) = match graphs {
            Some(g) => g,
            None => (
                read_graph(&config.out_dir.join(RESHARES_EDGES))?,
                read_graph(&config.out_dir.join(COMMON_USERS_EDGES))?,
            ),
        };
        export_backbones(
            &mut out,
            exec,
            &config.sorted_alphas(),
            &[("reshares", &reshares), ("common_users", &common)],
        )?;
        timed(Stage::Backbone, t);
    }

    commit(config, verb, out, timings)
}

fn load_dataset(exec: Execution, inputs: &InputPaths) -> Result<ActivityDataset, PipelineError> {
    let open = |p: &Path| {
        File::open(p)
            .map(BufReader::new)
            .map_err(|e| PipelineError::new(Stage::Ingest, format!("{}: {e}", p.display())))
    };
    let pages = ingest::load_pages(open(&inputs.pages)?).map_err(|e| PipelineError::new(Stage::Ingest, e))?;
    ingest::load_events_with(
        exec,
        pages,
        open(&inputs.posts)?,
        open(&inputs.likes)?,
        open(&inputs.comments)?,
    )
    .map_err(|e| PipelineError::new(Stage::Ingest, e))
}

fn read_graph(path: &Path) -> Result<WeightedGraph, PipelineError> {
    let f = File::open(path).map_err(|e| PipelineError::new(Stage::Backbone, format!("{}: {e}", path.display())))?;
    WeightedGraph::read_edge_list(BufReader::new(f))
        .map_err(|e| PipelineError::new(Stage::Backbone, format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(buf: &mut Vec<u8>, value: &T) -> Result<(), serde_json::Error> {
    serde_json::to_writer_pretty(&mut *buf, value)?;
    buf.push(b'\n');
    Ok(())
}

#[derive(Serialize)]
struct CategoryReport<'a> {
    habitual_min_likes: usize,
    polarization_fraction: f64,
    #[serde(flatten)]
    summary: &'a classify::CategorySummary,
    polarized_fraction_commented: Option<f64>,
}

fn export_classification(
    out: &mut Outputs,
    dataset: &ActivityDataset,
    c: &UserClassification,
) -> Result<(), PipelineError> {
    const S: Stage = Stage::Classify;
    out.add(S, ExportKind::Classification, "classification.csv", |b| {
        classify::write_classification_csv(c, dataset, b)
    })?;
    let summary = classify::category_counts(c, dataset);
    let activity = classify::polarized_activity_distributions(c, dataset);
    let report = CategoryReport {
        habitual_min_likes: c.config().habitual_min_likes,
        polarization_fraction: c.config().polarization_fraction,
        summary: &summary,
        polarized_fraction_commented: activity.fraction_commented,
    };
    out.add(S, ExportKind::Classification, "user_categories.json", |b| {
        write_json(b, &report)
    })
}

fn ccdf_bytes(buf: &mut Vec<u8>, samples: &[usize]) -> Result<(), StatsError> {
    match EmpiricalDistribution::from_counts(samples) {
        Ok(d) => stats::write_ccdf_csv(&d, buf),
        Err(StatsError::EmptySample) => {
            buf.extend_from_slice(b"x,ccdf\n");
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn export_stats(
    out: &mut Outputs,
    exec: Execution,
    dataset: &ActivityDataset,
    c: &UserClassification,
) -> Result<(), PipelineError> {
    const S: Stage = Stage::Stats;
    let metrics = stats::page_metrics_with(exec, dataset, c);
    out.add(S, ExportKind::Metrics, "metrics.csv", |b| metrics.write_csv(b))?;

    // A single page cannot be correlated; its tables come out empty.
    for (name, cols) in [
        ("correlations_activity.csv", &ACTIVITY_MEASURES[..]),
        ("correlations_polarized.csv", &POLARIZED_MEASURES[..]),
    ] {
        let matrix = match stats::correlation_matrix_with(exec, &metrics, cols) {
            Ok(m) => m,
            Err(StatsError::TooShort(_)) => stats::CorrelationMatrix {
                measures: cols.to_vec(),
                cells: vec![vec![None; cols.len()]; cols.len()],
            },
            Err(e) => return Err(PipelineError::new(S, e)),
        };
        out.add(S, ExportKind::Correlations, name, |b| matrix.write_csv(b))?;
    }

    let admin = stats::admin_split(dataset);
    let audiences = classify::page_audiences(c, dataset);
    let polarized = classify::polarized_activity_distributions(c, dataset);
    let col = |m: Measure| metrics.rows.iter().map(|r| r.get(m)).collect::<Vec<_>>();
    let post_likes: Vec<usize> = (0..dataset.posts().len()).map(|p| dataset.like_count(p)).collect();
    let post_comments: Vec<usize> = (0..dataset.posts().len()).map(|p| dataset.comment_count(p)).collect();
    let series: Vec<(&str, Vec<usize>)> = vec![
        ("page_users", col(Measure::Users)),
        ("page_posts", col(Measure::Posts)),
        ("page_likes", col(Measure::Likes)),
        ("page_comments", col(Measure::Comments)),
        ("page_shares", col(Measure::Shares)),
        ("post_likes", post_likes),
        ("post_comments", post_comments),
        ("admin_post_likes", admin.admin_post_likes.clone()),
        ("non_admin_post_likes", admin.non_admin_post_likes.clone()),
        (
            "page_occasional_users",
            audiences.iter().map(|a| a.occasional).collect(),
        ),
        (
            "page_polarized_here_users",
            audiences.iter().map(|a| a.polarized_here).collect(),
        ),
        (
            "page_habitual_not_polarized_users",
            audiences.iter().map(|a| a.habitual_not_polarized).collect(),
        ),
        (
            "page_polarized_elsewhere_users",
            audiences.iter().map(|a| a.polarized_elsewhere).collect(),
        ),
        ("polarized_user_likes", polarized.likes.clone()),
        ("polarized_user_comments", polarized.comments.clone()),
    ];
    for (name, samples) in &series {
        out.add(S, ExportKind::Distributions, format!("ccdf/{name}.csv"), |b| {
            ccdf_bytes(b, samples)
        })?;
    }

    let breakdown = stats::post_type_breakdown(dataset);
    out.add(S, ExportKind::Breakdowns, "post_types.csv", |b| breakdown.write_csv(b))?;
    out.add(S, ExportKind::Breakdowns, "admin_split.csv", |b| admin.write_csv(b))?;

    for m in Measure::ALL {
        let layer = export_geolayer(&metrics, m.as_str(), dataset.pages()).map_err(|e| PipelineError::new(S, e))?;
        out.add(S, ExportKind::Geolayers, format!("geo/{m}.geojson"), |b| {
            layer.write_json(b)
        })?;
    }
    Ok(())
}

fn alpha_label(alpha: f64) -> String {
    format!("alpha{alpha}")
}

fn export_backbones(
    out: &mut Outputs,
    exec: Execution,
    alphas: &[f64],
    networks: &[(&str, &WeightedGraph)],
) -> Result<(), PipelineError> {
    const S: Stage = Stage::Backbone;
    for &(name, g) in networks {
        // Empty networks still get (empty) backbone files.
        let scores = backbone::score_edges_with(exec, g);
        for &alpha in alphas {
            let result = backbone::apply_threshold(g, &scores, alpha);
            let label = alpha_label(alpha);
            out.add(S, ExportKind::Backbones, format!("backbone/{name}_{label}.csv"), |b| {
                result.write_csv(b)
            })?;
            let ranking = backbone::backbone_report(&result);
            out.add(
                S,
                ExportKind::Backbones,
                format!("backbone/{name}_{label}_ranking.csv"),
                |b| backbone::write_ranking_csv(&ranking, b),
            )?;
        }
    }
    Ok(())
}

fn commit(
    config: &PipelineConfig,
    verb: Verb,
    out: Outputs,
    timings: Vec<StageTiming>,
) -> Result<RunManifest, PipelineError> {
    let io = |e: std::io::Error| PipelineError::new(Stage::Output, e);
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(io)?;
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(dir)
        .map_err(io)?;

    let mut files: Vec<ExportedFile> = out
        .files
        .iter()
        .map(|(kind, path, bytes)| ExportedFile {
            kind: *kind,
            path: path.clone(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        })
        .collect();
    files.sort_by(|a, b| (a.kind, &a.path).cmp(&(b.kind, &b.path)));
    let manifest = RunManifest { verb, files, timings };

    for (_, path, bytes) in &out.files {
        let target = staging.path().join(path);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        fs::write(&target, bytes).map_err(io)?;
    }
    let mut manifest_bytes = Vec::new();
    write_json(&mut manifest_bytes, &manifest).map_err(|e| PipelineError::new(Stage::Output, e))?;
    fs::write(staging.path().join(MANIFEST), &manifest_bytes).map_err(io)?;

    for path in out.files.iter().map(|(_, p, _)| p.as_str()).chain([MANIFEST]) {
        let target = dir.join(path);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(io)?;
        }
        fs::rename(staging.path().join(path), &target).map_err(io)?;
    }
    Ok(manifest)
}

/// One point per page carrying a single page metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoLayer {
    #[serde(rename = "type")]
    kind: &'static str,
    pub name: String,
    pub features: Vec<GeoFeature>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoFeature {
    #[serde(rename = "type")]
    kind: &'static str,
    pub geometry: GeoPoint,
    pub properties: GeoProperties,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoPoint {
    #[serde(rename = "type")]
    kind: &'static str,
    /// `[longitude, latitude]`.
    pub coordinates: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoProperties {
    pub page_id: String,
    pub name: String,
    pub metric: String,
    pub value: usize,
}

impl GeoLayer {
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), serde_json::Error> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n").map_err(serde_json::Error::io)
    }
}

/// Builds a GeoJSON feature collection for `measure` over the pages that
/// appear in `metrics`.
pub fn export_geolayer(metrics: &PageMetrics, measure: &str, pages: &[PageRecord]) -> Result<GeoLayer, StatsError> {
    let m: Measure = measure.parse()?;
    let by_id: BTreeMap<&str, &PageRecord> = pages.iter().map(|p| (p.page_id.as_str(), p)).collect();
    let mut features = Vec::with_capacity(metrics.rows.len());
    for row in &metrics.rows {
        let page = by_id
            .get(row.page_id.as_str())
            .ok_or_else(|| StatsError::Io(format!("page `{}` missing from registry", row.page_id)))?;
        features.push(GeoFeature {
            kind: "Feature",
            geometry: GeoPoint {
                kind: "Point",
                coordinates: [page.longitude, page.latitude],
            },
            properties: GeoProperties {
                page_id: page.page_id.clone(),
                name: page.name.clone(),
                metric: m.to_string(),
                value: row.get(m),
            },
        });
    }
    Ok(GeoLayer {
        kind: "FeatureCollection",
        name: m.to_string(),
        features,
    })
}
