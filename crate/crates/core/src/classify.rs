//! User categories: occasional, habitual and polarized.
//!
//! A user is active when they liked at least one post. Active users with at
//! least `habitual_min_likes` distinct liked posts are habitual, the rest are
//! occasional. A habitual user whose likes on a single page make up at least
//! `polarization_fraction` of their total is polarized on that page. Both
//! bounds are inclusive.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::ingest::ActivityDataset;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("invalid classification config: {0}")]
    InvalidConfig(String),
    #[error("unknown page `{0}`")]
    UnknownPage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub habitual_min_likes: usize,
    pub polarization_fraction: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            habitual_min_likes: 5,
            polarization_fraction: 0.95,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.habitual_min_likes == 0 {
            return Err(ClassifyError::InvalidConfig(
                "habitual_min_likes must be positive".into(),
            ));
        }
        // Above one half, at most one page can hold the required share.
        if !(self.polarization_fraction > 0.5 && self.polarization_fraction <= 1.0) {
            return Err(ClassifyError::InvalidConfig(format!(
                "polarization_fraction must lie in (0.5, 1], got {}",
                self.polarization_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Occasional,
    Habitual,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Occasional => "occasional",
            Category::Habitual => "habitual",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub total_likes: usize,
    /// `(page index, distinct liked posts on that page)`, sorted by page.
    pub likes_by_page: Vec<(usize, usize)>,
    pub category: Category,
    pub polarized_on: Option<usize>,
}

impl UserProfile {
    pub fn is_polarized(&self) -> bool {
        self.polarized_on.is_some()
    }
}

/// Per-user categories, indexed like [`ActivityDataset::users`].
#[derive(Debug, Clone)]
pub struct UserClassification {
    config: ClassifyConfig,
    profiles: Vec<Option<UserProfile>>,
    polarized_by_page: Vec<usize>,
}

impl UserClassification {
    pub fn config(&self) -> &ClassifyConfig {
        &self.config
    }

    /// `None` for users who commented but never liked.
    pub fn profile(&self, user: usize) -> Option<&UserProfile> {
        self.profiles.get(user).and_then(Option::as_ref)
    }

    /// Active users in user-index order.
    pub fn active(&self) -> impl Iterator<Item = (usize, &UserProfile)> + '_ {
        self.profiles
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.as_ref().map(|p| (u, p)))
    }

    /// Number of users polarized on each page.
    pub fn polarized_by_page(&self) -> &[usize] {
        &self.polarized_by_page
    }

    pub fn polarized_users(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.active().filter_map(|(u, p)| p.polarized_on.map(|pg| (u, pg)))
    }
}

pub fn classify_users(dataset: &ActivityDataset, config: &ClassifyConfig) -> Result<UserClassification, ClassifyError> {
    classify_users_with(Execution::default(), dataset, config)
}

pub fn classify_users_with(
    exec: Execution,
    dataset: &ActivityDataset,
    config: &ClassifyConfig,
) -> Result<UserClassification, ClassifyError> {
    config.validate()?;
    let profiles = exec.map_range(dataset.users().len(), |user| profile_user(dataset, config, user));
    let mut polarized_by_page = vec![0; dataset.pages().len()];
    for page in profiles.iter().flatten().filter_map(|p| p.polarized_on) {
        polarized_by_page[page] += 1;
    }
    Ok(UserClassification {
        config: *config,
        profiles,
        polarized_by_page,
    })
}

fn profile_user(dataset: &ActivityDataset, config: &ClassifyConfig, user: usize) -> Option<UserProfile> {
    let liked = dataset.liked_posts(user);
    if liked.is_empty() {
        return None;
    }
    let mut pages: Vec<usize> = liked.iter().map(|&post| dataset.page_of_post(post)).collect();
    pages.sort_unstable();
    let mut likes_by_page: Vec<(usize, usize)> = Vec::new();
    for page in pages {
        match likes_by_page.last_mut() {
            Some((p, n)) if *p == page => *n += 1,
            _ => likes_by_page.push((page, 1)),
        }
    }
    let total_likes = liked.len();
    let category = if total_likes >= config.habitual_min_likes {
        Category::Habitual
    } else {
        Category::Occasional
    };
    let polarized_on = match category {
        Category::Occasional => None,
        Category::Habitual => likes_by_page
            .iter()
            .find(|&&(_, n)| n as f64 / total_likes as f64 >= config.polarization_fraction)
            .map(|&(page, _)| page),
    };
    Some(UserProfile {
        total_likes,
        likes_by_page,
        category,
        polarized_on,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CategorySummary {
    pub active: usize,
    pub habitual: usize,
    pub occasional: usize,
    pub polarized: usize,
    pub total_likes: usize,
    pub total_comments: usize,
    pub polarized_likes: usize,
    pub polarized_comments: usize,
    pub polarized_like_share: Option<f64>,
    pub polarized_comment_share: Option<f64>,
}

pub fn category_counts(classification: &UserClassification, dataset: &ActivityDataset) -> CategorySummary {
    let mut s = CategorySummary {
        total_likes: dataset.likes().len(),
        total_comments: dataset.comments().len(),
        ..Default::default()
    };
    for (user, p) in classification.active() {
        s.active += 1;
        match p.category {
            Category::Habitual => s.habitual += 1,
            Category::Occasional => s.occasional += 1,
        }
        if p.is_polarized() {
            s.polarized += 1;
            s.polarized_likes += p.total_likes;
            s.polarized_comments += dataset.comments_by_user(user);
        }
    }
    s.polarized_like_share = (s.total_likes > 0).then(|| s.polarized_likes as f64 / s.total_likes as f64);
    s.polarized_comment_share = (s.total_comments > 0).then(|| s.polarized_comments as f64 / s.total_comments as f64);
    s
}

/// Active users on one page, split by category. The four counts sum to the
/// number of distinct likers of the page's posts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PageAudience {
    pub occasional: usize,
    pub polarized_here: usize,
    pub habitual_not_polarized: usize,
    pub polarized_elsewhere: usize,
}

impl PageAudience {
    pub fn total(&self) -> usize {
        self.occasional + self.polarized_here + self.habitual_not_polarized + self.polarized_elsewhere
    }
}

pub fn page_audience(
    page_id: &str,
    classification: &UserClassification,
    dataset: &ActivityDataset,
) -> Result<PageAudience, ClassifyError> {
    let page = dataset
        .page_index(page_id)
        .ok_or_else(|| ClassifyError::UnknownPage(page_id.to_string()))?;
    Ok(page_audiences(classification, dataset)[page])
}

/// Audience composition of every page, indexed like the page registry.
pub fn page_audiences(classification: &UserClassification, dataset: &ActivityDataset) -> Vec<PageAudience> {
    let mut out = vec![PageAudience::default(); dataset.pages().len()];
    for (_, p) in classification.active() {
        for &(page, _) in &p.likes_by_page {
            let a = &mut out[page];
            match (p.category, p.polarized_on) {
                (Category::Occasional, _) => a.occasional += 1,
                (Category::Habitual, Some(home)) if home == page => a.polarized_here += 1,
                (Category::Habitual, Some(_)) => a.polarized_elsewhere += 1,
                (Category::Habitual, None) => a.habitual_not_polarized += 1,
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizedActivity {
    /// Likes per polarized user, in user-index order.
    pub likes: Vec<usize>,
    /// Comments per polarized user, aligned with `likes`.
    pub comments: Vec<usize>,
    /// Share of polarized users with at least one comment; `None` without
    /// polarized users.
    pub fraction_commented: Option<f64>,
}

pub fn polarized_activity_distributions(
    classification: &UserClassification,
    dataset: &ActivityDataset,
) -> PolarizedActivity {
    let (likes, comments): (Vec<usize>, Vec<usize>) = classification
        .active()
        .filter(|(_, p)| p.is_polarized())
        .map(|(u, p)| (p.total_likes, dataset.comments_by_user(u)))
        .unzip();
    let commented = comments.iter().filter(|&&c| c > 0).count();
    let fraction_commented = (!likes.is_empty()).then(|| commented as f64 / likes.len() as f64);
    PolarizedActivity {
        likes,
        comments,
        fraction_commented,
    }
}

/// Writes `user_id,total_likes,category,polarized_on` for every active user.
pub fn write_classification_csv<W: Write>(
    classification: &UserClassification,
    dataset: &ActivityDataset,
    w: W,
) -> Result<(), ClassifyError> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| ClassifyError::Io(e.into());
    wtr.write_record(["user_id", "total_likes", "category", "polarized_on"])
        .map_err(io)?;
    for (user, p) in classification.active() {
        let polarized = p.polarized_on.map_or("", |pg| dataset.pages()[pg].page_id.as_str());
        wtr.write_record([
            dataset.users()[user].as_str(),
            &p.total_likes.to_string(),
            p.category.as_str(),
            polarized,
        ])
        .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{EngagementRecord, PageRecord, PostRecord, PostType};
    use proptest::prelude::*;

    /// Builds a dataset with `pages` pages, each holding 64 posts, from
    /// `(user, page, post slot)` likes and `(user, page)` comments.
    fn dataset(pages: usize, likes: &[(usize, usize, usize)], comments: &[(usize, usize)]) -> ActivityDataset {
        let page_recs = (0..pages)
            .map(|p| PageRecord {
                page_id: format!("P{p}"),
                name: format!("page {p}"),
                latitude: 0.0,
                longitude: 0.0,
            })
            .collect();
        let mut posts = Vec::new();
        for p in 0..pages {
            for slot in 0..64 {
                posts.push(PostRecord {
                    post_id: format!("P{p}-{slot}"),
                    page_id: format!("P{p}"),
                    author_user_id: format!("P{p}"),
                    is_admin: true,
                    timestamp: slot as i64,
                    post_type: PostType::Status,
                    object_id: None,
                });
            }
        }
        let likes = likes
            .iter()
            .map(|&(u, p, s)| EngagementRecord {
                post_id: format!("P{p}-{s}"),
                user_id: format!("u{u:03}"),
                timestamp: 0,
            })
            .collect();
        let comments = comments
            .iter()
            .map(|&(u, p)| EngagementRecord {
                post_id: format!("P{p}-0"),
                user_id: format!("u{u:03}"),
                timestamp: 0,
            })
            .collect();
        ActivityDataset::from_records(page_recs, posts, likes, comments).unwrap()
    }

    fn likes_on(user: usize, page: usize, n: usize, first_slot: usize) -> Vec<(usize, usize, usize)> {
        (0..n).map(|i| (user, page, first_slot + i)).collect()
    }

    fn classify(d: &ActivityDataset) -> UserClassification {
        classify_users(d, &ClassifyConfig::default()).unwrap()
    }

    #[test]
    fn config_bounds() {
        assert!(ClassifyConfig::default().validate().is_ok());
        let bad = ClassifyConfig {
            polarization_fraction: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ClassifyConfig {
            habitual_min_likes: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let edge = ClassifyConfig {
            polarization_fraction: 1.0,
            ..Default::default()
        };
        assert!(edge.validate().is_ok());
    }

    #[test]
    fn four_likes_is_occasional() {
        let d = dataset(1, &likes_on(0, 0, 4, 0), &[]);
        let c = classify(&d);
        let p = c.profile(0).unwrap();
        assert_eq!(p.category, Category::Occasional);
        assert_eq!(p.polarized_on, None);
    }

    #[test]
    fn share_exactly_095_is_polarized() {
        let mut likes = likes_on(0, 0, 19, 0);
        likes.extend(likes_on(0, 1, 1, 0));
        let c = classify(&dataset(2, &likes, &[]));
        let p = c.profile(0).unwrap();
        assert_eq!(p.total_likes, 20);
        assert_eq!(p.category, Category::Habitual);
        assert_eq!(p.polarized_on, Some(0));
    }

    #[test]
    fn even_split_not_polarized() {
        let mut likes = likes_on(0, 0, 5, 0);
        likes.extend(likes_on(0, 1, 5, 0));
        let c = classify(&dataset(2, &likes, &[]));
        let p = c.profile(0).unwrap();
        assert_eq!(p.category, Category::Habitual);
        assert_eq!(p.polarized_on, None);
    }

    #[test]
    fn summary_counts() {
        // likes 1, 6 on one page, 6 split 3/3
        let mut likes = likes_on(0, 0, 1, 0);
        likes.extend(likes_on(1, 0, 6, 0));
        likes.extend(likes_on(2, 0, 3, 0));
        likes.extend(likes_on(2, 1, 3, 0));
        let d = dataset(2, &likes, &[]);
        let s = category_counts(&classify(&d), &d);
        assert_eq!((s.active, s.occasional, s.habitual, s.polarized), (3, 1, 2, 1));
        assert_eq!(s.polarized_likes, 6);
        assert_eq!(s.polarized_like_share, Some(6.0 / 13.0));
    }

    #[test]
    fn summary_empty_and_all_polarized() {
        let d = dataset(1, &[], &[]);
        let s = category_counts(&classify(&d), &d);
        assert_eq!(s, CategorySummary::default());

        let likes: Vec<_> = (0..4).flat_map(|u| likes_on(u, 0, 5, 0)).collect();
        let d = dataset(1, &likes, &[]);
        let s = category_counts(&classify(&d), &d);
        assert_eq!(s.polarized, s.active);
        assert_eq!(s.active, 4);
    }

    #[test]
    fn commenters_without_likes_are_not_active() {
        let d = dataset(1, &likes_on(0, 0, 1, 0), &[(1, 0), (1, 0)]);
        let c = classify(&d);
        assert!(c.profile(d.user_index("u001").unwrap()).is_none());
        let s = category_counts(&c, &d);
        assert_eq!(s.active, 1);
        assert_eq!(s.total_comments, 2);
    }

    #[test]
    fn audience_split() {
        // u0 polarized on P0 with one like on P1; u1 occasional on P1.
        let mut likes = likes_on(0, 0, 20, 0);
        likes.extend(likes_on(0, 1, 1, 0));
        likes.push((1, 1, 5));
        let d = dataset(3, &likes, &[]);
        let c = classify(&d);
        let p0 = page_audience("P0", &c, &d).unwrap();
        let p1 = page_audience("P1", &c, &d).unwrap();
        assert_eq!(p0.polarized_here, 1);
        assert_eq!(p0.total(), 1);
        assert_eq!(p1.polarized_elsewhere, 1);
        assert_eq!(p1.occasional, 1);
        assert_eq!(page_audience("P2", &c, &d).unwrap(), PageAudience::default());
        assert!(matches!(
            page_audience("nope", &c, &d),
            Err(ClassifyError::UnknownPage(_))
        ));
    }

    #[test]
    fn audience_five_occasional() {
        let likes: Vec<_> = (0..5).map(|u| (u, 0, u)).collect();
        let d = dataset(1, &likes, &[]);
        let a = page_audience("P0", &classify(&d), &d).unwrap();
        assert_eq!(
            a,
            PageAudience {
                occasional: 5,
                ..Default::default()
            }
        );
    }

    #[test]
    fn polarized_distributions() {
        let mut likes = likes_on(0, 0, 7, 0);
        likes.extend(likes_on(1, 0, 5, 10));
        let d = dataset(1, &likes, &[(0, 0), (0, 0)]);
        let a = polarized_activity_distributions(&classify(&d), &d);
        assert_eq!(a.likes, [7, 5]);
        assert_eq!(a.comments, [2, 0]);
        assert_eq!(a.fraction_commented, Some(0.5));

        let d = dataset(1, &likes_on(0, 0, 1, 0), &[]);
        let a = polarized_activity_distributions(&classify(&d), &d);
        assert!(a.likes.is_empty());
        assert_eq!(a.fraction_commented, None);
    }

    #[test]
    fn csv_export() {
        let mut likes = likes_on(0, 0, 5, 0);
        likes.push((1, 0, 0));
        let d = dataset(1, &likes, &[]);
        let mut buf = Vec::new();
        write_classification_csv(&classify(&d), &d, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "user_id,total_likes,category,polarized_on\nu000,5,habitual,P0\nu001,1,occasional,\n"
        );
    }

    #[test]
    fn execution_strategies_agree() {
        let likes: Vec<_> = (0..40).flat_map(|u| likes_on(u, u % 3, u % 9 + 1, 0)).collect();
        let d = dataset(3, &likes, &[]);
        let cfg = ClassifyConfig::default();
        let a = classify_users_with(Execution::Sequential, &d, &cfg).unwrap();
        let b = classify_users_with(Execution::Parallel, &d, &cfg).unwrap();
        assert_eq!(a.profiles, b.profiles);
    }

    fn arb_likes() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
        prop::collection::vec((0usize..8, 0usize..4, 0usize..12), 0..120)
    }

    proptest! {
        #[test]
        fn partition_and_uniqueness(likes in arb_likes(), frac in 0.51f64..=1.0, min in 1usize..10) {
            let d = dataset(4, &likes, &[]);
            let cfg = ClassifyConfig { habitual_min_likes: min, polarization_fraction: frac };
            let c = classify_users(&d, &cfg).unwrap();
            let s = category_counts(&c, &d);
            prop_assert_eq!(s.habitual + s.occasional, s.active);
            for (_, p) in c.active() {
                let qualifying = p.likes_by_page.iter()
                    .filter(|&&(_, n)| n as f64 / p.total_likes as f64 >= frac)
                    .count();
                prop_assert!(qualifying <= 1);
                if p.category == Category::Occasional {
                    prop_assert!(p.polarized_on.is_none());
                }
                if let Some(pg) = p.polarized_on {
                    let n = p.likes_by_page.iter().find(|x| x.0 == pg).unwrap().1;
                    prop_assert!(n as f64 / p.total_likes as f64 >= frac);
                }
            }
            let distinct: std::collections::HashSet<_> = likes.iter().collect();
            let total: usize = c.active().map(|(_, p)| p.total_likes).sum();
            prop_assert_eq!(total, distinct.len());
        }

        #[test]
        fn thresholds_are_monotone(likes in arb_likes(), f1 in 0.51f64..=1.0, f2 in 0.51f64..=1.0, m1 in 1usize..10, m2 in 1usize..10) {
            let d = dataset(4, &likes, &[]);
            let count = |m, f| {
                let c = classify_users(&d, &ClassifyConfig { habitual_min_likes: m, polarization_fraction: f }).unwrap();
                category_counts(&c, &d)
            };
            let (lo_m, hi_m) = (m1.min(m2), m1.max(m2));
            let (lo_f, hi_f) = (f1.min(f2), f1.max(f2));
            prop_assert!(count(hi_m, lo_f).habitual <= count(lo_m, lo_f).habitual);
            prop_assert!(count(lo_m, hi_f).polarized <= count(lo_m, lo_f).polarized);
        }
    }
}
