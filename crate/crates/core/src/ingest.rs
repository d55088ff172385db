//! Loading and indexing of raw activity logs.
//!
//! Pages come from a CSV registry (`page_id,name,lat,lon`). Posts, likes and
//! comments come from line-delimited JSON, one record per line. Loading
//! resolves every identifier to a dense index, collapses repeated likes of
//! the same post by the same user, and builds the per-page and per-user
//! lookups the downstream analyses need. The resulting [`ActivityDataset`]
//! is immutable.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::exec::Execution;

/// Maximum number of offending records quoted in an integrity error.
const MAX_LISTED_OFFENDERS: usize = 20;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name} line {line}: parse error: {message}")]
    Parse {
        source_name: &'static str,
        line: u64,
        message: String,
    },
    #[error("{source_name} line {line}: validation error: {message}")]
    Validation {
        source_name: &'static str,
        line: u64,
        message: String,
    },
    #[error("{source_name}: integrity error: {}", format_offenders(.offenders))]
    Integrity {
        source_name: &'static str,
        offenders: Vec<String>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_offenders(offenders: &[String]) -> String {
    if offenders.len() <= MAX_LISTED_OFFENDERS {
        offenders.join("; ")
    } else {
        format!(
            "{}; ... and {} more",
            offenders[..MAX_LISTED_OFFENDERS].join("; "),
            offenders.len() - MAX_LISTED_OFFENDERS
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRecord {
    pub page_id: String,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    Photo,
    Status,
    Video,
    Link,
}

impl PostType {
    pub const ALL: [PostType; 4] = [PostType::Photo, PostType::Status, PostType::Video, PostType::Link];

    pub fn as_str(self) -> &'static str {
        match self {
            PostType::Photo => "photo",
            PostType::Status => "status",
            PostType::Video => "video",
            PostType::Link => "link",
        }
    }

    pub fn parse(s: &str) -> Option<PostType> {
        PostType::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for PostType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostRecord {
    pub post_id: String,
    pub page_id: String,
    /// Equal to `page_id` when the page itself shared the post.
    pub author_user_id: String,
    pub is_admin: bool,
    pub timestamp: i64,
    pub post_type: PostType,
    pub object_id: Option<String>,
}

/// A like or a comment: one user acting on one post.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngagementRecord {
    pub post_id: String,
    pub user_id: String,
    pub timestamp: i64,
}

pub type LikeRecord = EngagementRecord;
pub type CommentRecord = EngagementRecord;

/// Identifiers may be given as JSON strings or integers.
fn opaque_id<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Int(i64),
        UInt(u64),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::Str(s) => s,
        Raw::Int(i) => i.to_string(),
        Raw::UInt(u) => u.to_string(),
    })
}

fn opt_opaque_id<'de, D: Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "opaque_id")] String);
    Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
}

#[derive(Deserialize)]
struct RawPost {
    #[serde(deserialize_with = "opaque_id")]
    post_id: String,
    #[serde(deserialize_with = "opaque_id")]
    page_id: String,
    #[serde(default, deserialize_with = "opt_opaque_id")]
    author_user_id: Option<String>,
    timestamp: i64,
    post_type: String,
    #[serde(default, deserialize_with = "opt_opaque_id")]
    object_id: Option<String>,
    #[serde(default)]
    is_admin: Option<bool>,
    #[serde(flatten)]
    extra: HashMap<String, serde::de::IgnoredAny>,
}

#[derive(Deserialize)]
struct RawEngagement {
    #[serde(deserialize_with = "opaque_id")]
    post_id: String,
    #[serde(deserialize_with = "opaque_id")]
    user_id: String,
    timestamp: i64,
    #[serde(flatten)]
    extra: HashMap<String, serde::de::IgnoredAny>,
}

#[derive(Serialize)]
struct PostOut<'a> {
    post_id: &'a str,
    page_id: &'a str,
    author_user_id: &'a str,
    timestamp: i64,
    post_type: PostType,
    #[serde(skip_serializing_if = "Option::is_none")]
    object_id: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_admin: Option<bool>,
}

#[derive(Serialize)]
struct EngagementOut<'a> {
    post_id: &'a str,
    user_id: &'a str,
    timestamp: i64,
}

/// Parses the page registry.
pub fn load_pages<R: Read>(stream: R) -> Result<Vec<PageRecord>, IngestError> {
    const SRC: &str = "pages";
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(stream);
    let headers = rdr.headers().map_err(|e| csv_error(SRC, e))?.clone();
    let expected = ["page_id", "name", "lat", "lon"];
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(IngestError::Parse {
            source_name: SRC,
            line: 1,
            message: format!(
                "expected header `page_id,name,lat,lon`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut pages = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut duplicates = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(SRC, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(IngestError::Parse {
                source_name: SRC,
                line,
                message: format!("expected 4 fields, found {}", rec.len()),
            });
        }
        let coord = |idx: usize, what: &str| -> Result<f64, IngestError> {
            rec[idx].trim().parse::<f64>().map_err(|e| IngestError::Parse {
                source_name: SRC,
                line,
                message: format!("bad {what} `{}`: {e}", &rec[idx]),
            })
        };
        let latitude = coord(2, "latitude")?;
        let longitude = coord(3, "longitude")?;
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(IngestError::Validation {
                source_name: SRC,
                line,
                message: format!("latitude {latitude} outside [-90, 90]"),
            });
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(IngestError::Validation {
                source_name: SRC,
                line,
                message: format!("longitude {longitude} outside [-180, 180]"),
            });
        }
        let page_id = rec[0].trim().to_string();
        if page_id.is_empty() {
            return Err(IngestError::Parse {
                source_name: SRC,
                line,
                message: "empty page_id".into(),
            });
        }
        if let Some(first) = seen.get(&page_id) {
            duplicates.push(format!("page_id `{page_id}` on lines {first} and {line}"));
            continue;
        }
        seen.insert(page_id.clone(), line);
        pages.push(PageRecord {
            page_id,
            name: rec[1].to_string(),
            latitude,
            longitude,
        });
    }
    if !duplicates.is_empty() {
        return Err(IngestError::Integrity {
            source_name: SRC,
            offenders: duplicates,
        });
    }
    Ok(pages)
}

fn csv_error(source_name: &'static str, e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    IngestError::Parse {
        source_name,
        line,
        message: e.to_string(),
    }
}

fn parse_lines<T, R, F>(source_name: &'static str, stream: R, mut on_record: F) -> Result<(), IngestError>
where
    T: for<'de> Deserialize<'de>,
    R: BufRead,
    F: FnMut(u64, T) -> Result<(), IngestError>,
{
    for (i, line) in stream.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            source_name,
            line: line_no,
            message: e.to_string(),
        })?;
        on_record(line_no, rec)?;
    }
    Ok(())
}

fn warn_unknown_fields(source_name: &str, unknown: &BTreeSet<String>) {
    if !unknown.is_empty() {
        log::warn!(
            "{source_name}: ignoring unknown fields {}",
            unknown.iter().map(String::as_str).collect::<Vec<_>>().join(", ")
        );
    }
}

fn parse_posts<R: BufRead>(stream: R) -> Result<Vec<(u64, PostRecord)>, IngestError> {
    const SRC: &str = "posts";
    let mut out = Vec::new();
    let mut unknown = BTreeSet::new();
    parse_lines(SRC, stream, |line, raw: RawPost| {
        unknown.extend(raw.extra.into_keys());
        let post_type = PostType::parse(&raw.post_type).ok_or_else(|| IngestError::Validation {
            source_name: SRC,
            line,
            message: format!(
                "unknown post_type `{}` (expected photo, status, video or link)",
                raw.post_type
            ),
        })?;
        let is_admin = match (raw.is_admin, raw.author_user_id.as_deref()) {
            (Some(flag), _) => flag,
            (None, Some(author)) => author == raw.page_id,
            (None, None) => {
                return Err(IngestError::Validation {
                    source_name: SRC,
                    line,
                    message: "post has neither author_user_id nor is_admin".into(),
                })
            }
        };
        let author_user_id = raw.author_user_id.unwrap_or_else(|| raw.page_id.clone());
        out.push((
            line,
            PostRecord {
                post_id: raw.post_id,
                page_id: raw.page_id,
                author_user_id,
                is_admin,
                timestamp: raw.timestamp,
                post_type,
                object_id: raw.object_id.filter(|o| !o.is_empty()),
            },
        ));
        Ok(())
    })?;
    warn_unknown_fields(SRC, &unknown);
    Ok(out)
}

fn parse_engagements<R: BufRead>(
    source_name: &'static str,
    stream: R,
) -> Result<Vec<(u64, EngagementRecord)>, IngestError> {
    let mut out = Vec::new();
    let mut unknown = BTreeSet::new();
    parse_lines(source_name, stream, |line, raw: RawEngagement| {
        unknown.extend(raw.extra.into_keys());
        out.push((
            line,
            EngagementRecord {
                post_id: raw.post_id,
                user_id: raw.user_id,
                timestamp: raw.timestamp,
            },
        ));
        Ok(())
    })?;
    warn_unknown_fields(source_name, &unknown);
    Ok(out)
}

/// One deduplicated like or one comment, in index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engagement {
    pub user: usize,
    pub post: usize,
    pub timestamp: i64,
}

/// Validated, fully indexed activity logs.
///
/// Users are indexed in lexicographic order of their identifiers and include
/// everyone who liked or commented at least once.
#[derive(Debug, Clone)]
pub struct ActivityDataset {
    pages: Vec<PageRecord>,
    posts: Vec<PostRecord>,
    post_page: Vec<usize>,
    users: Vec<String>,
    likes: Vec<Engagement>,
    comments: Vec<Engagement>,
    duplicate_likes: usize,

    page_lookup: HashMap<String, usize>,
    post_lookup: HashMap<String, usize>,
    user_lookup: HashMap<String, usize>,
    posts_by_page: Vec<Vec<usize>>,
    likers_by_post: Vec<Vec<usize>>,
    liked_posts_by_user: Vec<Vec<usize>>,
    comments_by_post: Vec<usize>,
    comments_by_user: Vec<usize>,
}

/// Loads events with the default execution strategy.
pub fn load_events<P, L, C>(
    pages: Vec<PageRecord>,
    posts_stream: P,
    likes_stream: L,
    comments_stream: C,
) -> Result<ActivityDataset, IngestError>
where
    P: BufRead + Send,
    L: BufRead + Send,
    C: BufRead + Send,
{
    load_events_with(Execution::default(), pages, posts_stream, likes_stream, comments_stream)
}

pub fn load_events_with<P, L, C>(
    exec: Execution,
    pages: Vec<PageRecord>,
    posts_stream: P,
    likes_stream: L,
    comments_stream: C,
) -> Result<ActivityDataset, IngestError>
where
    P: BufRead + Send,
    L: BufRead + Send,
    C: BufRead + Send,
{
    let (posts, (likes, comments)) = exec.join(
        || parse_posts(posts_stream),
        || {
            exec.join(
                || parse_engagements("likes", likes_stream),
                || parse_engagements("comments", comments_stream),
            )
        },
    );
    ActivityDataset::build(pages, posts?, likes?, comments?)
}

impl ActivityDataset {
    /// Builds a dataset from already-parsed records. Line numbers are only
    /// used for error messages.
    fn build(
        pages: Vec<PageRecord>,
        posts: Vec<(u64, PostRecord)>,
        likes: Vec<(u64, LikeRecord)>,
        comments: Vec<(u64, CommentRecord)>,
    ) -> Result<Self, IngestError> {
        let mut page_lookup = HashMap::with_capacity(pages.len());
        let mut dup_pages = Vec::new();
        for (i, p) in pages.iter().enumerate() {
            if page_lookup.insert(p.page_id.clone(), i).is_some() {
                dup_pages.push(format!("duplicate page_id `{}`", p.page_id));
            }
        }
        if !dup_pages.is_empty() {
            return Err(IngestError::Integrity {
                source_name: "pages",
                offenders: dup_pages,
            });
        }

        let mut post_lookup = HashMap::with_capacity(posts.len());
        let mut post_page = Vec::with_capacity(posts.len());
        let mut offenders = Vec::new();
        for (i, (line, p)) in posts.iter().enumerate() {
            if post_lookup.insert(p.post_id.clone(), i).is_some() {
                offenders.push(format!("line {line}: duplicate post_id `{}`", p.post_id));
            }
            match page_lookup.get(&p.page_id) {
                Some(&pg) => post_page.push(pg),
                None => offenders.push(format!(
                    "line {line}: post `{}` references unknown page `{}`",
                    p.post_id, p.page_id
                )),
            }
        }
        if !offenders.is_empty() {
            return Err(IngestError::Integrity {
                source_name: "posts",
                offenders,
            });
        }
        let posts: Vec<PostRecord> = posts.into_iter().map(|(_, p)| p).collect();

        for (name, records) in [("likes", &likes), ("comments", &comments)] {
            let offenders: Vec<String> = records
                .iter()
                .filter(|(_, r)| !post_lookup.contains_key(&r.post_id))
                .map(|(line, r)| {
                    format!(
                        "line {line}: user `{}` references unknown post `{}`",
                        r.user_id, r.post_id
                    )
                })
                .collect();
            if !offenders.is_empty() {
                return Err(IngestError::Integrity {
                    source_name: name,
                    offenders,
                });
            }
        }

        let user_set: BTreeSet<&str> = likes
            .iter()
            .chain(comments.iter())
            .map(|(_, r)| r.user_id.as_str())
            .collect();
        let users: Vec<String> = user_set.into_iter().map(str::to_string).collect();
        let user_lookup: HashMap<String, usize> = users.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();

        let mut seen_likes = HashSet::with_capacity(likes.len());
        let mut like_rows = Vec::with_capacity(likes.len());
        let mut duplicate_likes = 0;
        for (_, r) in &likes {
            let e = Engagement {
                user: user_lookup[&r.user_id],
                post: post_lookup[&r.post_id],
                timestamp: r.timestamp,
            };
            if seen_likes.insert((e.user, e.post)) {
                like_rows.push(e);
            } else {
                duplicate_likes += 1;
            }
        }
        let comment_rows: Vec<Engagement> = comments
            .iter()
            .map(|(_, r)| Engagement {
                user: user_lookup[&r.user_id],
                post: post_lookup[&r.post_id],
                timestamp: r.timestamp,
            })
            .collect();

        let mut posts_by_page = vec![Vec::new(); pages.len()];
        for (post, &page) in post_page.iter().enumerate() {
            posts_by_page[page].push(post);
        }
        let mut likers_by_post = vec![Vec::new(); posts.len()];
        let mut liked_posts_by_user = vec![Vec::new(); users.len()];
        for l in &like_rows {
            likers_by_post[l.post].push(l.user);
            liked_posts_by_user[l.user].push(l.post);
        }
        let mut comments_by_post = vec![0; posts.len()];
        let mut comments_by_user = vec![0; users.len()];
        for c in &comment_rows {
            comments_by_post[c.post] += 1;
            comments_by_user[c.user] += 1;
        }

        Ok(ActivityDataset {
            pages,
            posts,
            post_page,
            users,
            likes: like_rows,
            comments: comment_rows,
            duplicate_likes,
            page_lookup,
            post_lookup,
            user_lookup,
            posts_by_page,
            likers_by_post,
            liked_posts_by_user,
            comments_by_post,
            comments_by_user,
        })
    }

    /// Builds a dataset directly from records, applying the same checks as
    /// the stream loaders.
    pub fn from_records(
        pages: Vec<PageRecord>,
        posts: Vec<PostRecord>,
        likes: Vec<LikeRecord>,
        comments: Vec<CommentRecord>,
    ) -> Result<Self, IngestError> {
        fn number<T>(v: Vec<T>) -> Vec<(u64, T)> {
            v.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)).collect()
        }
        Self::build(pages, number(posts), number(likes), number(comments))
    }

    pub fn pages(&self) -> &[PageRecord] {
        &self.pages
    }
    pub fn posts(&self) -> &[PostRecord] {
        &self.posts
    }
    pub fn users(&self) -> &[String] {
        &self.users
    }
    /// Deduplicated likes, first occurrence order.
    pub fn likes(&self) -> &[Engagement] {
        &self.likes
    }
    pub fn comments(&self) -> &[Engagement] {
        &self.comments
    }
    pub fn duplicate_likes_collapsed(&self) -> usize {
        self.duplicate_likes
    }

    pub fn page_index(&self, page_id: &str) -> Option<usize> {
        self.page_lookup.get(page_id).copied()
    }
    pub fn post_index(&self, post_id: &str) -> Option<usize> {
        self.post_lookup.get(post_id).copied()
    }
    pub fn user_index(&self, user_id: &str) -> Option<usize> {
        self.user_lookup.get(user_id).copied()
    }
    /// Page index of a post.
    pub fn page_of_post(&self, post: usize) -> usize {
        self.post_page[post]
    }
    pub fn posts_on_page(&self, page: usize) -> &[usize] {
        &self.posts_by_page[page]
    }
    /// Distinct users who liked a post.
    pub fn likers(&self, post: usize) -> &[usize] {
        &self.likers_by_post[post]
    }
    /// Distinct posts a user liked.
    pub fn liked_posts(&self, user: usize) -> &[usize] {
        &self.liked_posts_by_user[user]
    }
    pub fn like_count(&self, post: usize) -> usize {
        self.likers_by_post[post].len()
    }
    pub fn comment_count(&self, post: usize) -> usize {
        self.comments_by_post[post]
    }
    pub fn comments_by_user(&self, user: usize) -> usize {
        self.comments_by_user[user]
    }

    /// Writes the page registry in the CSV interchange format.
    pub fn write_pages<W: Write>(&self, w: W) -> Result<(), IngestError> {
        write_pages(&self.pages, w)
    }

    /// Writes posts as line-delimited JSON.
    pub fn write_posts<W: Write>(&self, mut w: W) -> Result<(), IngestError> {
        for p in &self.posts {
            let admin_by_author = p.author_user_id == p.page_id;
            let out = PostOut {
                post_id: &p.post_id,
                page_id: &p.page_id,
                author_user_id: &p.author_user_id,
                timestamp: p.timestamp,
                post_type: p.post_type,
                object_id: p.object_id.as_deref(),
                // Only spelled out when the sentinel alone would say otherwise.
                is_admin: (p.is_admin != admin_by_author).then_some(p.is_admin),
            };
            serde_json::to_writer(&mut w, &out).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Writes the deduplicated likes as line-delimited JSON.
    pub fn write_likes<W: Write>(&self, w: W) -> Result<(), IngestError> {
        self.write_engagements(&self.likes, w)
    }

    pub fn write_comments<W: Write>(&self, w: W) -> Result<(), IngestError> {
        self.write_engagements(&self.comments, w)
    }

    fn write_engagements<W: Write>(&self, rows: &[Engagement], mut w: W) -> Result<(), IngestError> {
        for e in rows {
            let out = EngagementOut {
                post_id: &self.posts[e.post].post_id,
                user_id: &self.users[e.user],
                timestamp: e.timestamp,
            };
            serde_json::to_writer(&mut w, &out).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn write_pages<W: Write>(pages: &[PageRecord], w: W) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| IngestError::Io(e.into());
    wtr.write_record(["page_id", "name", "lat", "lon"]).map_err(io)?;
    for p in pages {
        wtr.write_record([
            p.page_id.as_str(),
            &p.name,
            &p.latitude.to_string(),
            &p.longitude.to_string(),
        ])
        .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Summary of a dataset and any invariant violations found in it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pages: usize,
    pub posts: usize,
    pub likes: usize,
    pub duplicate_likes_collapsed: usize,
    pub comments: usize,
    pub users: usize,
    pub active_users: usize,
    pub posts_with_object_id: usize,
    pub object_id_coverage: Option<f64>,
    pub admin_posts: usize,
    pub admin_share: Option<f64>,
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Re-checks every dataset invariant and summarizes the collections.
pub fn validate(dataset: &ActivityDataset) -> ValidationReport {
    let mut errors = Vec::new();
    let d = dataset;

    for p in &d.pages {
        if !(-90.0..=90.0).contains(&p.latitude) || !(-180.0..=180.0).contains(&p.longitude) {
            errors.push(format!("page `{}` has out-of-range coordinates", p.page_id));
        }
    }
    if d.page_lookup.len() != d.pages.len() {
        errors.push("page identifiers are not unique".into());
    }
    if d.post_lookup.len() != d.posts.len() {
        errors.push("post identifiers are not unique".into());
    }
    for (i, p) in d.posts.iter().enumerate() {
        match d.page_lookup.get(&p.page_id) {
            Some(&pg) if pg == d.post_page[i] => {}
            _ => errors.push(format!(
                "post `{}` does not resolve to its page `{}`",
                p.post_id, p.page_id
            )),
        }
    }
    let mut pairs = HashSet::with_capacity(d.likes.len());
    for l in &d.likes {
        if l.post >= d.posts.len() || l.user >= d.users.len() {
            errors.push("like references an unknown post or user".into());
        } else if !pairs.insert((l.user, l.post)) {
            errors.push(format!(
                "duplicate like by `{}` on `{}`",
                d.users[l.user], d.posts[l.post].post_id
            ));
        }
    }
    for c in &d.comments {
        if c.post >= d.posts.len() || c.user >= d.users.len() {
            errors.push("comment references an unknown post or user".into());
        }
    }
    let indexed_likes: usize = d.likers_by_post.iter().map(Vec::len).sum();
    let indexed_posts: usize = d.posts_by_page.iter().map(Vec::len).sum();
    let indexed_comments: usize = d.comments_by_post.iter().sum();
    if indexed_likes != d.likes.len() || indexed_posts != d.posts.len() || indexed_comments != d.comments.len() {
        errors.push("per-page or per-post indexes disagree with raw collections".into());
    }

    let posts_with_object_id = d.posts.iter().filter(|p| p.object_id.is_some()).count();
    let admin_posts = d.posts.iter().filter(|p| p.is_admin).count();
    ValidationReport {
        pages: d.pages.len(),
        posts: d.posts.len(),
        likes: d.likes.len(),
        duplicate_likes_collapsed: d.duplicate_likes,
        comments: d.comments.len(),
        users: d.users.len(),
        active_users: d.liked_posts_by_user.iter().filter(|v| !v.is_empty()).count(),
        posts_with_object_id,
        object_id_coverage: ratio(posts_with_object_id, d.posts.len()),
        admin_posts,
        admin_share: ratio(admin_posts, d.posts.len()),
        errors,
    }
}
