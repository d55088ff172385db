//! Disparity-filter backbone of a weighted undirected network.
//!
//! For a node of degree `k` and strength `s`, an incident edge of weight `w`
//! carries the normalized weight `p = w / s`. Under the null hypothesis that
//! the node's strength is split uniformly at random among its `k` edges, the
//! probability of observing a share at least `p` is `(1 - p)^(k - 1)`. An
//! edge is kept when that probability falls strictly below `alpha` at
//! either endpoint.
//!
//! Conventions:
//! - a degree-one endpoint scores 1, so a lone edge is never significant
//!   from that side;
//! - retention uses `score < alpha`, ties at `alpha` are dropped.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::graph::WeightedGraph;

/// Score of an edge seen from a node with a single edge.
pub const DEGREE_ONE_SCORE: f64 = 1.0;

/// Above this exponent scores are evaluated as `exp((k-1) * ln(1-p))`.
const POWI_MAX_EXPONENT: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum BackboneError {
    #[error("normalized weight {0} outside (0, 1]")]
    InvalidWeight(f64),
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("significance level {0} outside (0, 1]")]
    InvalidAlpha(f64),
    #[error("cannot filter a graph without edges")]
    EmptyGraph,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for BackboneError {
    fn from(e: std::io::Error) -> Self {
        BackboneError::Io(e.to_string())
    }
}

impl From<csv::Error> for BackboneError {
    fn from(e: csv::Error) -> Self {
        BackboneError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackboneConfig {
    pub alpha: f64,
}

impl BackboneConfig {
    pub fn new(alpha: f64) -> Result<Self, BackboneError> {
        let c = BackboneConfig { alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), BackboneError> {
        if self.alpha > 0.0 && self.alpha <= 1.0 {
            Ok(())
        } else {
            Err(BackboneError::InvalidAlpha(self.alpha))
        }
    }
}

/// Default significance levels.
pub const DEFAULT_ALPHAS: [f64; 2] = [0.01, 0.05];

/// Probability `(1 - p)^(k - 1)` of a normalized weight at least `p` on one
/// of `k` edges under the uniform null model.
pub fn edge_significance(p: f64, k: usize) -> Result<f64, BackboneError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(BackboneError::InvalidWeight(p));
    }
    if k == 0 {
        return Err(BackboneError::InvalidDegree);
    }
    if k == 1 {
        return Ok(DEGREE_ONE_SCORE);
    }
    let exponent = k - 1;
    let score = if exponent <= POWI_MAX_EXPONENT {
        (1.0 - p).powi(exponent as i32)
    } else {
        (exponent as f64 * (-p).ln_1p()).exp()
    };
    Ok(score.clamp(0.0, 1.0))
}

/// Scores of one edge as seen from each endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeScores {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    pub score_u: f64,
    pub score_v: f64,
}

impl EdgeScores {
    pub fn min_score(&self) -> f64 {
        self.score_u.min(self.score_v)
    }

    pub fn significant_at(&self, alpha: f64) -> bool {
        self.min_score() < alpha
    }
}

/// Scores every edge of `g`, in the graph's edge order.
pub fn score_edges(g: &WeightedGraph) -> Vec<EdgeScores> {
    score_edges_with(Execution::default(), g)
}

pub fn score_edges_with(exec: Execution, g: &WeightedGraph) -> Vec<EdgeScores> {
    let degrees = g.degrees();
    let strengths = g.strengths();
    let side = |node: usize, w: u64| {
        let p = w as f64 / strengths[node] as f64;
        edge_significance(p, degrees[node]).expect("positive weights give p in (0, 1]")
    };
    exec.map_slice(g.edges(), |e| EdgeScores {
        u: e.u,
        v: e.v,
        weight: e.weight,
        score_u: side(e.u, e.weight),
        score_v: side(e.v, e.weight),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredEdge {
    #[serde(flatten)]
    pub scores: EdgeScores,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackboneResult {
    pub alpha: f64,
    pub nodes: Vec<String>,
    /// Every input edge with its scores and retention flag.
    pub edges: Vec<ScoredEdge>,
    pub total_weight: u64,
    pub retained_weight: u64,
    pub weight_fraction_preserved: f64,
    pub edge_fraction: f64,
    /// Among nodes with at least one edge.
    pub node_fraction: f64,
    pub retained_nodes: usize,
    pub connected_nodes: usize,
}

impl BackboneResult {
    pub fn retained(&self) -> impl Iterator<Item = &EdgeScores> + '_ {
        self.edges.iter().filter(|e| e.retained).map(|e| &e.scores)
    }

    /// Retained edges as `(u, v)` index pairs.
    pub fn retained_set(&self) -> BTreeSet<(usize, usize)> {
        self.retained().map(|e| (e.u, e.v)).collect()
    }

    pub fn retained_count(&self) -> usize {
        self.retained().count()
    }

    /// Writes `source,target,weight,score_src,score_dst,retained_at_alpha`
    /// after `#` header lines stating the conventions and the retention
    /// summary. Rows follow the lexicographic source/target order of the
    /// edge list export.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), BackboneError> {
        writeln!(
            w,
            "# disparity filter alpha={} rule=either-endpoint retention=strict(score<alpha) degree_one_score={}",
            self.alpha, DEGREE_ONE_SCORE
        )?;
        writeln!(
            w,
            "# weight_fraction={} edge_fraction={} node_fraction={} retained_edges={} total_edges={}",
            self.weight_fraction_preserved,
            self.edge_fraction,
            self.node_fraction,
            self.retained_count(),
            self.edges.len()
        )?;
        let mut rows: Vec<(&str, &str, f64, f64, &ScoredEdge)> = self
            .edges
            .iter()
            .map(|e| {
                let s = &e.scores;
                let (a, b) = (self.nodes[s.u].as_str(), self.nodes[s.v].as_str());
                if a <= b {
                    (a, b, s.score_u, s.score_v, e)
                } else {
                    (b, a, s.score_v, s.score_u, e)
                }
            })
            .collect();
        rows.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "source",
            "target",
            "weight",
            "score_src",
            "score_dst",
            "retained_at_alpha",
        ])?;
        for (a, b, sa, sb, e) in rows {
            wtr.write_record([
                a,
                b,
                &e.scores.weight.to_string(),
                &sa.to_string(),
                &sb.to_string(),
                if e.retained { "true" } else { "false" },
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn disparity_filter(g: &WeightedGraph, config: &BackboneConfig) -> Result<BackboneResult, BackboneError> {
    disparity_filter_with(Execution::default(), g, config)
}

pub fn disparity_filter_with(
    exec: Execution,
    g: &WeightedGraph,
    config: &BackboneConfig,
) -> Result<BackboneResult, BackboneError> {
    config.validate()?;
    if g.is_empty() {
        return Err(BackboneError::EmptyGraph);
    }
    let scores = score_edges_with(exec, g);
    Ok(apply_threshold(g, &scores, config.alpha))
}

/// Thresholds precomputed scores; lets one scoring pass serve several
/// significance levels.
pub fn apply_threshold(g: &WeightedGraph, scores: &[EdgeScores], alpha: f64) -> BackboneResult {
    let edges: Vec<ScoredEdge> = scores
        .iter()
        .map(|s| ScoredEdge {
            scores: *s,
            retained: s.significant_at(alpha),
        })
        .collect();
    let total_weight: u64 = scores.iter().map(|s| s.weight).sum();
    let retained_weight: u64 = edges.iter().filter(|e| e.retained).map(|e| e.scores.weight).sum();
    let mut connected = vec![false; g.nodes().len()];
    let mut kept = vec![false; g.nodes().len()];
    for e in &edges {
        connected[e.scores.u] = true;
        connected[e.scores.v] = true;
        if e.retained {
            kept[e.scores.u] = true;
            kept[e.scores.v] = true;
        }
    }
    let connected_nodes = connected.iter().filter(|&&c| c).count();
    let retained_nodes = kept.iter().filter(|&&c| c).count();
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let retained_edges = edges.iter().filter(|e| e.retained).count() as u64;
    BackboneResult {
        alpha,
        nodes: g.nodes().to_vec(),
        total_weight,
        retained_weight,
        weight_fraction_preserved: ratio(retained_weight, total_weight),
        edge_fraction: ratio(retained_edges, edges.len() as u64),
        node_fraction: ratio(retained_nodes as u64, connected_nodes as u64),
        retained_nodes,
        connected_nodes,
        edges,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedPage {
    pub page_id: String,
    /// Sum of retained incident weights.
    pub strength: u64,
    /// Number of retained incident edges.
    pub degree: usize,
}

/// Nodes touched by the backbone, by retained strength then degree
/// (both descending), then id.
pub fn backbone_report(result: &BackboneResult) -> Vec<RankedPage> {
    let n = result.nodes.len();
    let mut strength = vec![0u64; n];
    let mut degree = vec![0usize; n];
    for e in result.retained() {
        for node in [e.u, e.v] {
            strength[node] += e.weight;
            degree[node] += 1;
        }
    }
    let mut out: Vec<RankedPage> = (0..n)
        .filter(|&i| degree[i] > 0)
        .map(|i| RankedPage {
            page_id: result.nodes[i].clone(),
            strength: strength[i],
            degree: degree[i],
        })
        .collect();
    out.sort_by(|a, b| {
        b.strength
            .cmp(&a.strength)
            .then(b.degree.cmp(&a.degree))
            .then_with(|| a.page_id.cmp(&b.page_id))
    });
    out
}

pub fn write_ranking_csv<W: Write>(ranking: &[RankedPage], w: W) -> Result<(), BackboneError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["rank", "page_id", "strength", "degree"])?;
    for (i, r) in ranking.iter().enumerate() {
        wtr.write_record([
            (i + 1).to_string(),
            r.page_id.clone(),
            r.strength.to_string(),
            r.degree.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
