//! Seeded generator for synthetic activity logs.
//!
//! Page popularity follows a Zipf law, per-user like counts a Pareto tail,
//! and users split into loyal followers of a home page and roaming users.
//! A slice of posts carries object ids drawn from a shared pool so that the
//! same content shows up on several pages. Output is a pure function of
//! [`SynthConfig`].

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto, Zipf};
use serde_json::json;

use crate::ingest::{write_pages, CommentRecord, LikeRecord, PageRecord, PostRecord, PostType};

const WINDOW_START: i64 = 1_314_835_200; // 2011-09-01
const WINDOW_END: i64 = 1_362_009_600; // 2013-02-28

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub pages: usize,
    pub users: usize,
    pub posts: usize,
    /// Share of posts carrying an object id.
    pub object_id_rate: f64,
    pub admin_rate: f64,
    /// Share of users who stay on their home page almost exclusively.
    pub loyal_rate: f64,
    /// Chance that a loyal user's like lands on their home page.
    pub loyal_focus: f64,
    pub commenter_rate: f64,
    /// Pareto shape of per-user like counts.
    pub like_tail: f64,
    pub max_likes_per_user: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 2011,
            pages: 50,
            users: 5000,
            posts: 6000,
            object_id_rate: 0.14,
            admin_rate: 0.27,
            loyal_rate: 0.45,
            loyal_focus: 0.98,
            commenter_rate: 0.3,
            like_tail: 1.2,
            max_likes_per_user: 1500,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticData {
    pub pages: Vec<PageRecord>,
    pub posts: Vec<PostRecord>,
    pub likes: Vec<LikeRecord>,
    pub comments: Vec<CommentRecord>,
}

pub fn generate(cfg: &SynthConfig) -> SyntheticData {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let pages: Vec<PageRecord> = (0..cfg.pages)
        .map(|i| PageRecord {
            page_id: format!("page{:03}", i + 1),
            name: format!("Site {:03}", i + 1),
            latitude: round4(rng.random_range(25.0..49.0)),
            longitude: round4(rng.random_range(-124.0..-67.0)),
        })
        .collect();
    // page index i has popularity rank i + 1
    let popularity = WeightedIndex::new((0..cfg.pages).map(|i| 1.0 / (i as f64 + 1.0))).expect("non-empty page set");

    let object_pool = ((cfg.posts as f64 * cfg.object_id_rate) / 2.0).ceil().max(1.0);
    let object_draw = Zipf::new(object_pool, 1.1).expect("valid zipf");
    let post_types = WeightedIndex::new([0.2, 0.4, 0.1, 0.3]).unwrap();

    let mut posts = Vec::with_capacity(cfg.posts);
    let mut page_posts: Vec<Vec<usize>> = vec![Vec::new(); cfg.pages];
    let mut page_admin_posts: Vec<Vec<usize>> = vec![Vec::new(); cfg.pages];
    for i in 0..cfg.posts {
        // every page gets at least one post
        let page = if i < cfg.pages { i } else { popularity.sample(&mut rng) };
        let page_id = pages[page].page_id.clone();
        let is_admin = rng.random_bool(cfg.admin_rate);
        let author_user_id = if is_admin {
            page_id.clone()
        } else {
            user_id(rng.random_range(0..cfg.users))
        };
        let object_id = rng
            .random_bool(cfg.object_id_rate)
            .then(|| format!("obj{:05}", object_draw.sample(&mut rng) as u64));
        let idx = posts.len();
        page_posts[page].push(idx);
        if is_admin {
            page_admin_posts[page].push(idx);
        }
        posts.push(PostRecord {
            post_id: format!("post{:06}", i + 1),
            page_id,
            author_user_id,
            is_admin,
            timestamp: rng.random_range(WINDOW_START..WINDOW_END),
            post_type: PostType::ALL[post_types.sample(&mut rng)],
            object_id,
        });
    }

    let like_count: Pareto<f64> = Pareto::new(1.0, cfg.like_tail).expect("valid pareto");
    let comment_count: Pareto<f64> = Pareto::new(1.0, 1.5).expect("valid pareto");
    let mut likes = Vec::new();
    let mut comments = Vec::new();
    for u in 0..cfg.users {
        let uid = user_id(u);
        let home = popularity.sample(&mut rng);
        let loyalty = if rng.random_bool(cfg.loyal_rate) {
            cfg.loyal_focus
        } else {
            rng.random_range(0.3..0.9)
        };
        let n = (like_count.sample(&mut rng).floor() as usize).clamp(1, cfg.max_likes_per_user);
        let mut liked_pages = Vec::new();
        for _ in 0..n {
            let page = if rng.random_bool(loyalty) {
                home
            } else {
                popularity.sample(&mut rng)
            };
            // admin posts are more visible
            let pool = if !page_admin_posts[page].is_empty() && rng.random_bool(0.8) {
                &page_admin_posts[page]
            } else {
                &page_posts[page]
            };
            let post = pool[rng.random_range(0..pool.len())];
            likes.push(LikeRecord {
                post_id: posts[post].post_id.clone(),
                user_id: uid.clone(),
                timestamp: posts[post].timestamp + rng.random_range(0..86_400),
            });
            liked_pages.push(page);
        }
        if rng.random_bool(cfg.commenter_rate) {
            let c = (comment_count.sample(&mut rng).floor() as usize).clamp(1, 400);
            for _ in 0..c {
                let page = liked_pages[rng.random_range(0..liked_pages.len())];
                let pool = &page_posts[page];
                let post = pool[rng.random_range(0..pool.len())];
                comments.push(CommentRecord {
                    post_id: posts[post].post_id.clone(),
                    user_id: uid.clone(),
                    timestamp: posts[post].timestamp + rng.random_range(0..172_800),
                });
            }
        }
    }

    SyntheticData {
        pages,
        posts,
        likes,
        comments,
    }
}

fn user_id(i: usize) -> String {
    format!("user{:05}", i + 1)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Writes `pages.csv`, `posts.jsonl`, `likes.jsonl` and `comments.jsonl`
/// into `dir`. Records are written as generated, duplicate likes included.
pub fn write_dir(data: &SyntheticData, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_pages(&data.pages, BufWriter::new(File::create(dir.join("pages.csv"))?)).map_err(io::Error::other)?;

    let mut w = BufWriter::new(File::create(dir.join("posts.jsonl"))?);
    for p in &data.posts {
        let mut rec = json!({
            "post_id": p.post_id,
            "page_id": p.page_id,
            "author_user_id": p.author_user_id,
            "timestamp": p.timestamp,
            "post_type": p.post_type.as_str(),
        });
        if let Some(o) = &p.object_id {
            rec["object_id"] = json!(o);
        }
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    for (name, rows) in [("likes.jsonl", &data.likes), ("comments.jsonl", &data.comments)] {
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        for r in rows {
            serde_json::to_writer(
                &mut w,
                &json!({"post_id": r.post_id, "user_id": r.user_id, "timestamp": r.timestamp}),
            )?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    Ok(())
}
