//! Empirical distributions, Pearson correlation and per-page aggregates.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::classify::UserClassification;
use crate::exec::Execution;
use crate::ingest::{ActivityDataset, PostType};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample set")]
    EmptySample,
    #[error("sample value {0} is not a finite non-negative number")]
    InvalidSample(f64),
    #[error("vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("correlation undefined for a constant vector")]
    Constant,
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for StatsError {
    fn from(e: std::io::Error) -> Self {
        StatsError::Io(e.to_string())
    }
}

impl From<csv::Error> for StatsError {
    fn from(e: csv::Error) -> Self {
        StatsError::Io(e.to_string())
    }
}

/// Step-function distribution of a finite sample.
///
/// `cdf(x)` is `Pr(X <= x)` and `ccdf(x)` is `Pr(X > x)`, both computed
/// from exact counts so that `ccdf(x)` is zero from the sample maximum on
/// and one below the sample minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    /// `at_most[i]` = number of samples `<= values[i]`.
    at_most: Vec<usize>,
    n: usize,
}

pub fn empirical_ccdf(samples: &[f64]) -> Result<EmpiricalDistribution, StatsError> {
    EmpiricalDistribution::new(samples)
}

impl EmpiricalDistribution {
    pub fn new(samples: &[f64]) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if let Some(&bad) = samples.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(StatsError::InvalidSample(bad));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut at_most = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            if values.last() == Some(&x) {
                *at_most.last_mut().unwrap() = i + 1;
            } else {
                values.push(x);
                at_most.push(i + 1);
            }
        }
        Ok(EmpiricalDistribution {
            values,
            at_most,
            n: sorted.len(),
        })
    }

    pub fn from_counts(counts: &[usize]) -> Result<Self, StatsError> {
        Self::new(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    fn count_at_most(&self, x: f64) -> usize {
        let idx = self.values.partition_point(|&v| v <= x);
        if idx == 0 {
            0
        } else {
            self.at_most[idx - 1]
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.count_at_most(x) as f64 / self.n as f64
    }

    pub fn ccdf(&self, x: f64) -> f64 {
        (self.n - self.count_at_most(x)) as f64 / self.n as f64
    }

    /// Probability mass of each distinct value.
    pub fn pmf(&self) -> Vec<(f64, f64)> {
        let mut prev = 0;
        self.values
            .iter()
            .zip(&self.at_most)
            .map(|(&x, &c)| {
                let mass = (c - prev) as f64 / self.n as f64;
                prev = c;
                (x, mass)
            })
            .collect()
    }

    /// `(x, Pr(X > x))` at every distinct sample value.
    pub fn ccdf_points(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .zip(&self.at_most)
            .map(|(&x, &c)| (x, (self.n - c) as f64 / self.n as f64))
            .collect()
    }
}

/// Writes `x,ccdf` rows at every distinct sample value.
pub fn write_ccdf_csv<W: Write>(dist: &EmpiricalDistribution, w: W) -> Result<(), StatsError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x", "ccdf"])?;
    for (x, c) in dist.ccdf_points() {
        wtr.write_record([x.to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::TooShort(n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Constant);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Users,
    Posts,
    Likes,
    Comments,
    Shares,
    Polarized,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Users,
        Measure::Posts,
        Measure::Likes,
        Measure::Comments,
        Measure::Shares,
        Measure::Polarized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Users => "users",
            Measure::Posts => "posts",
            Measure::Likes => "likes",
            Measure::Comments => "comments",
            Measure::Shares => "shares",
            Measure::Polarized => "polarized",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = StatsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| StatsError::UnknownMeasure(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageMetricsRow {
    pub page_id: String,
    /// Distinct likers of the page's posts.
    pub users: usize,
    pub posts: usize,
    pub likes: usize,
    pub comments: usize,
    /// Posts whose object id also appears on another page.
    pub shares: usize,
    pub polarized: usize,
}

impl PageMetricsRow {
    pub fn get(&self, m: Measure) -> usize {
        match m {
            Measure::Users => self.users,
            Measure::Posts => self.posts,
            Measure::Likes => self.likes,
            Measure::Comments => self.comments,
            Measure::Shares => self.shares,
            Measure::Polarized => self.polarized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageMetrics {
    pub rows: Vec<PageMetricsRow>,
}

impl PageMetrics {
    pub fn column(&self, m: Measure) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(m) as f64).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), StatsError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["page_id", "users", "posts", "likes", "comments", "shares", "polarized"])?;
        for r in &self.rows {
            let mut rec = vec![r.page_id.clone()];
            rec.extend(Measure::ALL.iter().map(|&m| r.get(m).to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// For every post, whether its object id appears on two or more pages.
pub fn reshared_posts(dataset: &ActivityDataset) -> Vec<bool> {
    let mut pages_by_object: HashMap<&str, BTreeSet<usize>> = HashMap::new();
    for (i, p) in dataset.posts().iter().enumerate() {
        if let Some(o) = &p.object_id {
            pages_by_object
                .entry(o.as_str())
                .or_default()
                .insert(dataset.page_of_post(i));
        }
    }
    dataset
        .posts()
        .iter()
        .map(|p| p.object_id.as_deref().is_some_and(|o| pages_by_object[o].len() >= 2))
        .collect()
}

pub fn page_metrics(dataset: &ActivityDataset, classification: &UserClassification) -> PageMetrics {
    page_metrics_with(Execution::default(), dataset, classification)
}

pub fn page_metrics_with(
    exec: Execution,
    dataset: &ActivityDataset,
    classification: &UserClassification,
) -> PageMetrics {
    let reshared = reshared_posts(dataset);
    let polarized = classification.polarized_by_page();
    let rows = exec.map_range(dataset.pages().len(), |page| {
        let posts = dataset.posts_on_page(page);
        let mut likers: Vec<usize> = posts.iter().flat_map(|&p| dataset.likers(p).iter().copied()).collect();
        let likes = likers.len();
        likers.sort_unstable();
        likers.dedup();
        PageMetricsRow {
            page_id: dataset.pages()[page].page_id.clone(),
            users: likers.len(),
            posts: posts.len(),
            likes,
            comments: posts.iter().map(|&p| dataset.comment_count(p)).sum(),
            shares: posts.iter().filter(|&&p| reshared[p]).count(),
            polarized: polarized[page],
        }
    });
    PageMetrics { rows }
}

/// Symmetric matrix of pairwise Pearson coefficients. Cells whose
/// coefficient is undefined are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub measures: Vec<Measure>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Measure, b: Measure) -> Option<f64> {
        let i = self.measures.iter().position(|&m| m == a)?;
        let j = self.measures.iter().position(|&m| m == b)?;
        self.cells[i][j]
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), StatsError> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["measure".to_string()];
        header.extend(self.measures.iter().map(|m| m.to_string()));
        wtr.write_record(&header)?;
        for (m, row) in self.measures.iter().zip(&self.cells) {
            let mut rec = vec![m.to_string()];
            rec.extend(row.iter().map(|c| c.map_or(String::new(), |v| v.to_string())));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn correlation_matrix(metrics: &PageMetrics, columns: &[Measure]) -> Result<CorrelationMatrix, StatsError> {
    correlation_matrix_with(Execution::default(), metrics, columns)
}

pub fn correlation_matrix_with(
    exec: Execution,
    metrics: &PageMetrics,
    columns: &[Measure],
) -> Result<CorrelationMatrix, StatsError> {
    if metrics.rows.len() < 2 {
        return Err(StatsError::TooShort(metrics.rows.len()));
    }
    let data: Vec<Vec<f64>> = columns.iter().map(|&m| metrics.column(m)).collect();
    let k = columns.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let values = exec.map_slice(&pairs, |&(i, j)| {
        let r = pearson(&data[i], &data[j]).ok();
        // Self-correlation of a valid column is exactly one.
        if i == j {
            r.map(|_| 1.0)
        } else {
            r
        }
    });
    let mut cells = vec![vec![None; k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        cells[i][j] = v;
        cells[j][i] = v;
    }
    Ok(CorrelationMatrix {
        measures: columns.to_vec(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostTypeRow {
    pub post_type: PostType,
    pub posts: usize,
    pub likes: usize,
    pub comments: usize,
    pub post_fraction: Option<f64>,
    pub like_fraction: Option<f64>,
    pub comment_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostTypeBreakdown {
    pub rows: Vec<PostTypeRow>,
    pub total_posts: usize,
    pub total_likes: usize,
    pub total_comments: usize,
}

impl PostTypeBreakdown {
    pub fn row(&self, t: PostType) -> &PostTypeRow {
        self.rows
            .iter()
            .find(|r| r.post_type == t)
            .expect("every post type has a row")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), StatsError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "post_type",
            "posts",
            "likes",
            "comments",
            "post_fraction",
            "like_fraction",
            "comment_fraction",
        ])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for r in &self.rows {
            wtr.write_record([
                r.post_type.to_string(),
                r.posts.to_string(),
                r.likes.to_string(),
                r.comments.to_string(),
                opt(r.post_fraction),
                opt(r.like_fraction),
                opt(r.comment_fraction),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn fraction(part: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| part as f64 / total as f64)
}

pub fn post_type_breakdown(dataset: &ActivityDataset) -> PostTypeBreakdown {
    let mut counts: HashMap<PostType, (usize, usize, usize)> = HashMap::new();
    for (i, p) in dataset.posts().iter().enumerate() {
        let c = counts.entry(p.post_type).or_default();
        c.0 += 1;
        c.1 += dataset.like_count(i);
        c.2 += dataset.comment_count(i);
    }
    let total_posts = dataset.posts().len();
    let total_likes = dataset.likes().len();
    let total_comments = dataset.comments().len();
    let rows = PostType::ALL
        .iter()
        .map(|&t| {
            let (posts, likes, comments) = counts.get(&t).copied().unwrap_or_default();
            PostTypeRow {
                post_type: t,
                posts,
                likes,
                comments,
                post_fraction: fraction(posts, total_posts),
                like_fraction: fraction(likes, total_likes),
                comment_fraction: fraction(comments, total_comments),
            }
        })
        .collect();
    PostTypeBreakdown {
        rows,
        total_posts,
        total_likes,
        total_comments,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdminSplitRow {
    pub page_id: String,
    pub admin_posts: usize,
    pub non_admin_posts: usize,
    pub admin_likes: usize,
    pub non_admin_likes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdminSplit {
    pub per_page: Vec<AdminSplitRow>,
    pub admin_posts: usize,
    pub non_admin_posts: usize,
    pub admin_share: Option<f64>,
    pub admin_like_share: Option<f64>,
    /// Likes received by each admin post.
    pub admin_post_likes: Vec<usize>,
    /// Likes received by each non-admin post.
    pub non_admin_post_likes: Vec<usize>,
}

impl AdminSplit {
    /// Pearson correlation of per-page admin and non-admin post counts.
    pub fn post_count_correlation(&self) -> Result<f64, StatsError> {
        let a: Vec<f64> = self.per_page.iter().map(|r| r.admin_posts as f64).collect();
        let b: Vec<f64> = self.per_page.iter().map(|r| r.non_admin_posts as f64).collect();
        pearson(&a, &b)
    }

    /// Per-page rows preceded by `#` summary lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), StatsError> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        writeln!(
            w,
            "# admin_posts={} non_admin_posts={} admin_share={} admin_like_share={} post_count_correlation={}",
            self.admin_posts,
            self.non_admin_posts,
            opt(self.admin_share),
            opt(self.admin_like_share),
            opt(self.post_count_correlation().ok())
        )?;
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "page_id",
            "admin_posts",
            "non_admin_posts",
            "admin_likes",
            "non_admin_likes",
        ])?;
        for r in &self.per_page {
            wtr.write_record([
                r.page_id.clone(),
                r.admin_posts.to_string(),
                r.non_admin_posts.to_string(),
                r.admin_likes.to_string(),
                r.non_admin_likes.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn admin_split(dataset: &ActivityDataset) -> AdminSplit {
    let mut per_page: Vec<AdminSplitRow> = dataset
        .pages()
        .iter()
        .map(|p| AdminSplitRow {
            page_id: p.page_id.clone(),
            admin_posts: 0,
            non_admin_posts: 0,
            admin_likes: 0,
            non_admin_likes: 0,
        })
        .collect();
    let mut admin_post_likes = Vec::new();
    let mut non_admin_post_likes = Vec::new();
    for (i, p) in dataset.posts().iter().enumerate() {
        let row = &mut per_page[dataset.page_of_post(i)];
        let likes = dataset.like_count(i);
        if p.is_admin {
            row.admin_posts += 1;
            row.admin_likes += likes;
            admin_post_likes.push(likes);
        } else {
            row.non_admin_posts += 1;
            row.non_admin_likes += likes;
            non_admin_post_likes.push(likes);
        }
    }
    let admin_posts = admin_post_likes.len();
    let non_admin_posts = non_admin_post_likes.len();
    let admin_likes: usize = admin_post_likes.iter().sum();
    let total_likes = admin_likes + non_admin_post_likes.iter().sum::<usize>();
    AdminSplit {
        per_page,
        admin_posts,
        non_admin_posts,
        admin_share: fraction(admin_posts, admin_posts + non_admin_posts),
        admin_like_share: fraction(admin_likes, total_likes),
        admin_post_likes,
        non_admin_post_likes,
    }
}
