//! Bipartite page networks and their one-mode projections.
//!
//! Two bipartite graphs share the page registry as their left side: pages to
//! reshare classes (posts grouped by object id) and pages to polarized
//! users. Projecting either onto the pages yields an undirected network
//! whose edge weight is the number of common right-side neighbours, i.e. the
//! off-diagonal part of `M * M^T` for the incidence matrix `M`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use thiserror::Error;

use crate::classify::UserClassification;
use crate::exec::Execution;
use crate::ingest::{ActivityDataset, PostRecord};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge endpoint ({0}, {1}) out of range")]
    EndpointOutOfRange(usize, usize),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("edge `{0}`-`{1}` has zero weight")]
    ZeroWeight(String, String),
    #[error("edge `{0}`-`{1}` listed twice")]
    DuplicateEdge(String, String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge list line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for GraphError {
    fn from(e: csv::Error) -> Self {
        GraphError::Io(e.into())
    }
}

/// Posts sharing one object id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReshareClass {
    pub object_id: String,
    /// Earliest member; ties go to the smallest post id.
    pub representative: usize,
    /// Indices into the post slice, in input order.
    pub members: Vec<usize>,
}

/// Groups posts by object id, sorted by object id. Posts without one are
/// left out.
pub fn reshare_classes(posts: &[PostRecord]) -> Vec<ReshareClass> {
    let mut by_object: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in posts.iter().enumerate() {
        if let Some(o) = &p.object_id {
            by_object.entry(o).or_default().push(i);
        }
    }
    by_object
        .into_iter()
        .map(|(object_id, members)| {
            let representative = *members
                .iter()
                .min_by(|&&a, &&b| {
                    (posts[a].timestamp, &posts[a].post_id).cmp(&(posts[b].timestamp, &posts[b].post_id))
                })
                .expect("classes are non-empty");
            ReshareClass {
                object_id: object_id.to_string(),
                representative,
                members,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Bipartite graph with adjacency kept on both sides, sorted and free of
/// repeated edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<String>,
    right: Vec<String>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Repeated edges collapse to one.
    pub fn from_edges<I>(left: Vec<String>, right: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        for side in [&left, &right] {
            let mut seen = BTreeSet::new();
            if let Some(dup) = side.iter().find(|v| !seen.insert(v.as_str())) {
                return Err(GraphError::DuplicateVertex(dup.clone()));
            }
        }
        let mut left_adj = vec![Vec::new(); left.len()];
        let mut right_adj = vec![Vec::new(); right.len()];
        for (a, b) in edges {
            if a >= left.len() || b >= right.len() {
                return Err(GraphError::EndpointOutOfRange(a, b));
            }
            left_adj[a].push(b);
            right_adj[b].push(a);
        }
        for adj in left_adj.iter_mut().chain(right_adj.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        Ok(BipartiteGraph {
            left,
            right,
            left_adj,
            right_adj,
        })
    }

    pub fn vertices(&self, side: Side) -> &[String] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn neighbors(&self, side: Side, v: usize) -> &[usize] {
        match side {
            Side::Left => &self.left_adj[v],
            Side::Right => &self.right_adj[v],
        }
    }

    pub fn degree(&self, side: Side, v: usize) -> usize {
        self.neighbors(side, v).len()
    }

    pub fn edge_count(&self) -> usize {
        self.left_adj.iter().map(Vec::len).sum()
    }

    /// Edges as `(left, right)` pairs in left-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_adj
            .iter()
            .enumerate()
            .flat_map(|(a, adj)| adj.iter().map(move |&b| (a, b)))
    }
}

/// Pages against reshare-class representatives. A class is linked to every
/// page carrying one of its members.
pub fn build_pages_posts(dataset: &ActivityDataset) -> BipartiteGraph {
    let classes = reshare_classes(dataset.posts());
    let left = dataset.pages().iter().map(|p| p.page_id.clone()).collect();
    let right = classes
        .iter()
        .map(|c| dataset.posts()[c.representative].post_id.clone())
        .collect();
    let edges = classes
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.members.iter().map(move |&post| (dataset.page_of_post(post), j)));
    BipartiteGraph::from_edges(left, right, edges).expect("indices come from the dataset")
}

/// Pages against polarized users. A user is linked to every page where they
/// liked at least one post.
pub fn build_pages_polarized(dataset: &ActivityDataset, classification: &UserClassification) -> BipartiteGraph {
    let left = dataset.pages().iter().map(|p| p.page_id.clone()).collect();
    let polarized: Vec<usize> = classification.polarized_users().map(|(u, _)| u).collect();
    let right = polarized.iter().map(|&u| dataset.users()[u].clone()).collect();
    let mut edges = Vec::new();
    for (j, &u) in polarized.iter().enumerate() {
        let profile = classification.profile(u).expect("polarized users are active");
        edges.extend(profile.likes_by_page.iter().map(|&(page, _)| (page, j)));
    }
    BipartiteGraph::from_edges(left, right, edges).expect("indices come from the dataset")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedEdge {
    /// Always smaller than `v`.
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

/// Undirected simple graph with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    edges: Vec<WeightedEdge>,
}

impl WeightedGraph {
    /// Orients every edge as `u < v` and sorts the edge list.
    pub fn new(nodes: Vec<String>, edges: Vec<WeightedEdge>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        if let Some(dup) = nodes.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(GraphError::DuplicateVertex(dup.clone()));
        }
        let mut out = Vec::with_capacity(edges.len());
        for e in edges {
            if e.u >= nodes.len() || e.v >= nodes.len() {
                return Err(GraphError::EndpointOutOfRange(e.u, e.v));
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(nodes[e.u].clone()));
            }
            if e.weight == 0 {
                return Err(GraphError::ZeroWeight(nodes[e.u].clone(), nodes[e.v].clone()));
            }
            out.push(WeightedEdge {
                u: e.u.min(e.v),
                v: e.u.max(e.v),
                weight: e.weight,
            });
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(GraphError::DuplicateEdge(nodes[w[0].u].clone(), nodes[w[0].v].clone()));
        }
        Ok(WeightedGraph { nodes, edges: out })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    /// Sum of incident edge weights per node.
    pub fn strengths(&self) -> Vec<u64> {
        let mut s = vec![0; self.nodes.len()];
        for e in &self.edges {
            s[e.u] += e.weight;
            s[e.v] += e.weight;
        }
        s
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> WeightedGraph {
        assert!(factor > 0, "scale factor must be positive");
        WeightedGraph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| WeightedEdge {
                    weight: e.weight * factor,
                    ..*e
                })
                .collect(),
        }
    }

    /// Edges with node identifiers, oriented so the first id sorts before
    /// the second, and listed in that order.
    pub fn labeled_edges(&self) -> Vec<(&str, &str, &WeightedEdge)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.nodes[e.u].as_str(), self.nodes[e.v].as_str());
                if a <= b {
                    (a, b, e)
                } else {
                    (b, a, e)
                }
            })
            .collect();
        out.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        out
    }

    /// Writes `source_page,target_page,weight`.
    pub fn write_edge_list<W: Write>(&self, w: W) -> Result<(), GraphError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["source_page", "target_page", "weight"])?;
        for (a, b, e) in self.labeled_edges() {
            wtr.write_record([a, b, &e.weight.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads an edge list written by [`WeightedGraph::write_edge_list`]. The
    /// node set is the sorted set of endpoints.
    pub fn read_edge_list<R: Read>(r: R) -> Result<WeightedGraph, GraphError> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["source_page", "target_page", "weight"] {
            return Err(GraphError::Parse {
                line: 1,
                message: "expected header `source_page,target_page,weight`".into(),
            });
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 3 {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let weight: u64 = rec[2].parse().map_err(|e| GraphError::Parse {
                line,
                message: format!("bad weight `{}`: {e}", &rec[2]),
            })?;
            rows.push((rec[0].to_string(), rec[1].to_string(), weight));
        }
        let ids: BTreeSet<&str> = rows.iter().flat_map(|(a, b, _)| [a.as_str(), b.as_str()]).collect();
        let nodes: Vec<String> = ids.into_iter().map(str::to_string).collect();
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let edges = rows
            .iter()
            .map(|(a, b, w)| WeightedEdge {
                u: index[a.as_str()],
                v: index[b.as_str()],
                weight: *w,
            })
            .collect();
        WeightedGraph::new(nodes, edges)
    }
}

pub fn project(g: &BipartiteGraph, side: Side) -> WeightedGraph {
    project_with(Execution::default(), g, side)
}

/// One-mode projection onto `side`: every pair of vertices with common
/// neighbours on the other side gets an edge weighted by their count.
///
/// Work is split over the opposite side's vertices; each chunk accumulates
/// pair counts that are merged afterwards.
pub fn project_with(exec: Execution, g: &BipartiteGraph, side: Side) -> WeightedGraph {
    let other = match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    };
    let hubs = g.vertices(other).len();
    let chunks = exec.chunk_count(hubs);
    let partials = exec.map_range(chunks, |c| {
        let (start, end) = (c * hubs / chunks, (c + 1) * hubs / chunks);
        let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
        for hub in start..end {
            let nbrs = g.neighbors(other, hub);
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    *counts.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        counts
    });
    let mut merged: HashMap<(usize, usize), u64> = HashMap::new();
    for part in partials {
        if merged.is_empty() {
            merged = part;
            continue;
        }
        for (k, w) in part {
            *merged.entry(k).or_insert(0) += w;
        }
    }
    let edges = merged
        .into_iter()
        .map(|((u, v), weight)| WeightedEdge { u, v, weight })
        .collect();
    WeightedGraph::new(g.vertices(side).to_vec(), edges).expect("projection yields a simple graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_users, ClassifyConfig};
    use crate::ingest::{EngagementRecord, PageRecord, PostType};
    use proptest::prelude::*;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    /// Dense `M * M^T` (or `M^T * M`) over the incidence matrix.
    fn dense_oracle(g: &BipartiteGraph, side: Side) -> BTreeMap<(usize, usize), u64> {
        let (nl, nr) = (g.vertices(Side::Left).len(), g.vertices(Side::Right).len());
        let mut m = vec![vec![0u64; nr]; nl];
        for (a, b) in g.edges() {
            m[a][b] = 1;
        }
        let (n, inner) = match side {
            Side::Left => (nl, nr),
            Side::Right => (nr, nl),
        };
        let at = |i: usize, k: usize| match side {
            Side::Left => m[i][k],
            Side::Right => m[k][i],
        };
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let c: u64 = (0..inner).map(|k| at(i, k) * at(j, k)).sum();
                if c > 0 {
                    out.insert((i, j), c);
                }
            }
        }
        out
    }

    fn as_map(w: &WeightedGraph) -> BTreeMap<(usize, usize), u64> {
        w.edges().iter().map(|e| ((e.u, e.v), e.weight)).collect()
    }

    fn post(id: &str, page: &str, ts: i64, object: Option<&str>) -> PostRecord {
        PostRecord {
            post_id: id.into(),
            page_id: page.into(),
            author_user_id: "x".into(),
            is_admin: false,
            timestamp: ts,
            post_type: PostType::Link,
            object_id: object.map(str::to_string),
        }
    }

    fn pages(n: usize) -> Vec<PageRecord> {
        ids("P", n)
            .into_iter()
            .map(|page_id| PageRecord {
                name: page_id.clone(),
                page_id,
                latitude: 0.0,
                longitude: 0.0,
            })
            .collect()
    }

    #[test]
    fn classes_and_representatives() {
        let posts = vec![
            post("a", "P0", 5, Some("o1")),
            post("b", "P1", 3, Some("o1")),
            post("c", "P1", 9, Some("o2")),
            post("d", "P1", 9, None),
        ];
        let cls = reshare_classes(&posts);
        assert_eq!(cls.len(), 2);
        assert_eq!(cls[0].members, [0, 1]);
        assert_eq!(cls[0].representative, 1);
        assert_eq!(cls[1].members, [2]);
        assert!(reshare_classes(&posts[3..]).is_empty());

        let tie = vec![post("z", "P0", 1, Some("o")), post("m", "P0", 1, Some("o"))];
        assert_eq!(reshare_classes(&tie)[0].representative, 1);
    }

    #[test]
    fn pages_posts_edges() {
        let posts = vec![
            post("a", "P0", 1, Some("o1")),
            post("b", "P1", 2, Some("o1")),
            post("c", "P0", 3, Some("o2")),
            post("d", "P0", 4, Some("o2")),
            post("e", "P2", 4, None),
        ];
        let d = ActivityDataset::from_records(pages(3), posts, vec![], vec![]).unwrap();
        let g = build_pages_posts(&d);
        assert_eq!(g.vertices(Side::Right), ["a", "c"]);
        assert_eq!(g.neighbors(Side::Right, 0), [0, 1]);
        assert_eq!(g.neighbors(Side::Right, 1), [0]);
        assert_eq!(g.edge_count(), 3);
        let w = project(&g, Side::Left);
        assert_eq!(w.edges().len(), 1);
        assert_eq!(w.weight(0, 1), Some(1));
    }

    #[test]
    fn three_objects_on_two_of_three_pages() {
        let layout = [("o0", [0, 1]), ("o1", [1, 2]), ("o2", [0, 2])];
        let mut posts = Vec::new();
        for (obj, pgs) in layout {
            for p in pgs {
                posts.push(post(&format!("{obj}-{p}"), &format!("P{p}"), 0, Some(obj)));
            }
        }
        let d = ActivityDataset::from_records(pages(3), posts.clone(), vec![], vec![]).unwrap();
        let g = build_pages_posts(&d);
        // Brute-force membership scan.
        let mut expect = BTreeSet::new();
        for (j, (obj, _)) in layout.iter().enumerate() {
            for p in &posts {
                if p.object_id.as_deref() == Some(obj) {
                    expect.insert((d.page_index(&p.page_id).unwrap(), j));
                }
            }
        }
        assert_eq!(g.edges().collect::<BTreeSet<_>>(), expect);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn pages_polarized_edges() {
        let mut posts = Vec::new();
        for p in 0..3 {
            for s in 0..25 {
                posts.push(post(&format!("P{p}-{s}"), &format!("P{p}"), 0, None));
            }
        }
        let like = |u: &str, p: usize, s: usize| EngagementRecord {
            post_id: format!("P{p}-{s}"),
            user_id: u.into(),
            timestamp: 0,
        };
        let mut likes: Vec<_> = (0..20).map(|s| like("u", 0, s)).collect();
        likes.push(like("u", 1, 0));
        likes.extend((0..6).map(|s| like("v", 2, s)));
        likes.extend((0..3).map(|s| like("w", 2, s)));
        let d = ActivityDataset::from_records(pages(3), posts, likes, vec![]).unwrap();
        let c = classify_users(&d, &ClassifyConfig::default()).unwrap();
        let g = build_pages_polarized(&d, &c);
        assert_eq!(g.vertices(Side::Right), ["u", "v"]);
        assert_eq!(g.neighbors(Side::Right, 0), [0, 1]);
        assert_eq!(g.neighbors(Side::Right, 1), [2]);
        for j in 0..g.vertices(Side::Right).len() {
            assert!(g.degree(Side::Right, j) >= 1);
        }
    }

    #[test]
    fn projection_examples() {
        let g = BipartiteGraph::from_edges(ids("a", 2), ids("b", 1), [(0, 0), (1, 0)]).unwrap();
        assert_eq!(project(&g, Side::Left).weight(0, 1), Some(1));

        let g = BipartiteGraph::from_edges(ids("a", 3), ids("b", 2), [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)]).unwrap();
        let w = project(&g, Side::Left);
        assert_eq!(w.weight(0, 1), Some(2));
        assert_eq!(w.weight(0, 2), Some(1));
        assert_eq!(w.weight(1, 2), Some(1));
        assert_eq!(as_map(&w), dense_oracle(&g, Side::Left));

        let g = BipartiteGraph::from_edges(ids("a", 2), ids("b", 2), [(0, 0), (1, 1)]).unwrap();
        assert!(project(&g, Side::Left).is_empty());
        assert!(project(&g, Side::Right).is_empty());
    }

    #[test]
    fn bipartite_rejects_bad_input() {
        assert!(BipartiteGraph::from_edges(ids("a", 1), ids("b", 1), [(0, 1)]).is_err());
        assert!(BipartiteGraph::from_edges(vec!["x".into(), "x".into()], vec![], []).is_err());
        let g = BipartiteGraph::from_edges(ids("a", 1), ids("b", 1), [(0, 0), (0, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn weighted_graph_validation() {
        let n = ids("n", 3);
        let e = |u, v, weight| WeightedEdge { u, v, weight };
        assert!(matches!(
            WeightedGraph::new(n.clone(), vec![e(1, 1, 2)]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            WeightedGraph::new(n.clone(), vec![e(0, 1, 0)]),
            Err(GraphError::ZeroWeight(..))
        ));
        assert!(matches!(
            WeightedGraph::new(n.clone(), vec![e(0, 1, 2), e(1, 0, 3)]),
            Err(GraphError::DuplicateEdge(..))
        ));
        let g = WeightedGraph::new(n, vec![e(2, 0, 4), e(0, 1, 1)]).unwrap();
        assert_eq!(g.edges()[1], e(0, 2, 4));
        assert_eq!(g.weight(2, 0), Some(4));
        assert_eq!(g.strengths(), [5, 1, 4]);
        assert_eq!(g.degrees(), [2, 1, 1]);
    }

    #[test]
    fn edge_list_orientation_and_round_trip() {
        let nodes = vec!["zeta".to_string(), "alpha".to_string(), "mid".to_string()];
        let g = WeightedGraph::new(
            nodes,
            vec![
                WeightedEdge { u: 0, v: 1, weight: 3 },
                WeightedEdge { u: 0, v: 2, weight: 1 },
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "source_page,target_page,weight\nalpha,zeta,3\nmid,zeta,1\n");
        let back = WeightedGraph::read_edge_list(&buf[..]).unwrap();
        let mut again = Vec::new();
        back.write_edge_list(&mut again).unwrap();
        assert_eq!(again, buf);
        assert!(WeightedGraph::read_edge_list("a,b,c\n".as_bytes()).is_err());
        assert!(WeightedGraph::read_edge_list("source_page,target_page,weight\nx,y,-1\n".as_bytes()).is_err());
    }

    fn arb_bipartite() -> impl Strategy<Value = BipartiteGraph> {
        (1usize..=20, 1usize..=20, 0.1f64..0.5, any::<u64>()).prop_map(|(na, nb, density, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for a in 0..na {
                for b in 0..nb {
                    if rng.random_bool(density) {
                        edges.push((a, b));
                    }
                }
            }
            BipartiteGraph::from_edges(ids("a", na), ids("b", nb), edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn projection_matches_dense_product(g in arb_bipartite()) {
            for side in [Side::Left, Side::Right] {
                let seq = project_with(Execution::Sequential, &g, side);
                let par = project_with(Execution::Parallel, &g, side);
                prop_assert_eq!(&seq, &par);
                prop_assert_eq!(as_map(&seq), dense_oracle(&g, side));
                for e in seq.edges() {
                    prop_assert!(e.u < e.v);
                    prop_assert_eq!(seq.weight(e.v, e.u), Some(e.weight));
                    let bound = g.degree(side, e.u).min(g.degree(side, e.v)) as u64;
                    prop_assert!(e.weight <= bound);
                }
            }
        }
    }
}
