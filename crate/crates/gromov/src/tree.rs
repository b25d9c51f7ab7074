//! Metric trees: weighted acyclic graphs with unique-path geodesics.
//!
//! Points live either at vertices or strictly inside edges. Because paths
//! are unique, segments, betweenness sets, and nearest-point projections
//! are all exact, O(n) walks — no shortest-path search involved.

use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::space::{scaled_tol, FiniteMetricSpace, REL_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    EmptyTree,
    #[error("vertex index {index} out of range for {size} vertices")]
    UnknownVertex { index: usize, size: usize },
    #[error("vertex label {0:?} not present in the tree")]
    UnknownLabel(String),
    #[error("self-loop on vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("duplicate edge between vertices {u} and {v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u}, {v}) has non-positive length {len}")]
    NonPositiveLength { u: usize, v: usize, len: f64 },
    #[error("{vertices} vertices with {edges} edges do not form a tree (connected: {connected})")]
    NotATree {
        vertices: usize,
        edges: usize,
        connected: bool,
    },
    #[error("no edge between vertices {u} and {v}")]
    NoSuchEdge { u: usize, v: usize },
    #[error("offset {offset} outside [0, {len}] on edge ({u}, {v})")]
    OffsetOutOfRange {
        u: usize,
        v: usize,
        offset: f64,
        len: f64,
    },
    #[error("vertex set does not induce a connected (hence convex) subtree")]
    NotConvex,
}

/// An edge of a tree, in insertion order (kept for serialization).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub len: f64,
}

/// A point of the tree's geometric realization: a vertex, or a location
/// strictly inside an edge. Edge-hosted points are canonicalized with
/// `u < v` and the offset measured from `u`, so equal points compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint {
    Vertex(usize),
    OnEdge { u: usize, v: usize, offset: f64 },
}

/// A metric tree: connected, acyclic, positive edge lengths.
#[derive(Debug, Clone)]
pub struct MetricTree {
    labels: Vec<String>,
    edges: Vec<TreeEdge>,
    adj: Vec<Vec<(usize, f64)>>,
    parent: Vec<usize>, // parent[root] = root
    depth: Vec<usize>,
    dist_root: Vec<f64>,
}

impl MetricTree {
    pub fn new(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<MetricTree, TreeError> {
        let n = labels.len();
        if n == 0 {
            return Err(TreeError::EmptyTree);
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        for (u, v, len) in edges {
            for &w in &[u, v] {
                if w >= n {
                    return Err(TreeError::UnknownVertex { index: w, size: n });
                }
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            if !(len > 0.0) || !len.is_finite() {
                return Err(TreeError::NonPositiveLength { u, v, len });
            }
            if adj[u].iter().any(|&(w, _)| w == v) {
                return Err(TreeError::DuplicateEdge { u, v });
            }
            adj[u].push((v, len));
            adj[v].push((u, len));
            stored.push(TreeEdge { u, v, len });
        }
        for list in &mut adj {
            list.sort_by_key(|&(w, _)| w);
        }

        // root at 0 and verify the tree shape in one traversal
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut dist_root = vec![0.0f64; n];
        parent[0] = 0;
        let mut stack = vec![0usize];
        let mut reached = 0usize;
        while let Some(u) = stack.pop() {
            reached += 1;
            for &(v, len) in &adj[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    dist_root[v] = dist_root[u] + len;
                    stack.push(v);
                }
            }
        }
        let connected = reached == n;
        if !connected || stored.len() != n - 1 {
            return Err(TreeError::NotATree {
                vertices: n,
                edges: stored.len(),
                connected,
            });
        }
        Ok(MetricTree {
            labels,
            edges: stored,
            adj,
            parent,
            depth,
            dist_root,
        })
    }

    /// Reinterprets a weighted graph as a tree, verifying the shape.
    pub fn from_graph(graph: &WeightedGraph) -> Result<MetricTree, TreeError> {
        MetricTree::new(
            graph.labels().to_vec(),
            graph.edges().iter().map(|e| (e.u, e.v, e.len)).collect(),
        )
    }

    pub fn from_labeled_edges(edges: &[(String, String, f64)]) -> Result<MetricTree, TreeError> {
        let mut labels: Vec<String> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut resolved = Vec::with_capacity(edges.len());
        for (u, v, len) in edges {
            let ui = *index.entry(u.clone()).or_insert_with(|| {
                labels.push(u.clone());
                labels.len() - 1
            });
            let vi = *index.entry(v.clone()).or_insert_with(|| {
                labels.push(v.clone());
                labels.len() - 1
            });
            resolved.push((ui, vi, *len));
        }
        MetricTree::new(labels, resolved)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_len(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, len)| len)
    }

    fn check_vertex(&self, v: usize) -> Result<(), TreeError> {
        if v < self.labels.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex {
                index: v,
                size: self.labels.len(),
            })
        }
    }

    /// Validated edge-interior point; offsets of 0 or `len` collapse to
    /// the corresponding vertex.
    pub fn point_on_edge(&self, u: usize, v: usize, offset: f64) -> Result<TreePoint, TreeError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let len = self
            .edge_len(u, v)
            .ok_or(TreeError::NoSuchEdge { u, v })?;
        if offset < 0.0 || offset > len {
            return Err(TreeError::OffsetOutOfRange { u, v, offset, len });
        }
        if offset == 0.0 {
            return Ok(TreePoint::Vertex(u));
        }
        if offset == len {
            return Ok(TreePoint::Vertex(v));
        }
        Ok(if u < v {
            TreePoint::OnEdge { u, v, offset }
        } else {
            TreePoint::OnEdge {
                u: v,
                v: u,
                offset: len - offset,
            }
        })
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
        }
        u
    }

    /// Distance between two vertices along the unique path.
    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        let l = self.lca(u, v);
        self.dist_root[u] + self.dist_root[v] - 2.0 * self.dist_root[l]
    }

    /// The unique vertex path from `u` to `v` (inclusive).
    pub fn vertex_path(&self, u: usize, v: usize) -> Vec<usize> {
        let l = self.lca(u, v);
        let mut head = Vec::new();
        let mut w = u;
        while w != l {
            head.push(w);
            w = self.parent[w];
        }
        head.push(l);
        let mut tail = Vec::new();
        let mut w = v;
        while w != l {
            tail.push(w);
            w = self.parent[w];
        }
        head.extend(tail.into_iter().rev());
        head
    }

    /// For an edge-hosted point, distances to both endpoint vertices:
    /// `[(u, offset), (v, len - offset)]`; a vertex anchors to itself.
    fn anchors(&self, p: &TreePoint) -> Vec<(usize, f64)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, 0.0)],
            TreePoint::OnEdge { u, v, offset } => {
                let len = self.edge_len(u, v).expect("edge exists");
                vec![(u, offset), (v, len - offset)]
            }
        }
    }

    fn same_edge(&self, p: &TreePoint, q: &TreePoint) -> Option<f64> {
        if let (
            TreePoint::OnEdge { u, v, offset: o1 },
            TreePoint::OnEdge {
                u: u2,
                v: v2,
                offset: o2,
            },
        ) = (p, q)
        {
            // points are canonicalized, so equal edges have equal keys
            if (u, v) == (u2, v2) {
                return Some((o1 - o2).abs());
            }
        }
        None
    }

    /// Length of the unique path between two points.
    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if let Some(d) = self.same_edge(p, q) {
            return d;
        }
        let mut best = f64::INFINITY;
        for &(ap, cp) in &self.anchors(p) {
            for &(aq, cq) in &self.anchors(q) {
                best = best.min(cp + self.vertex_distance(ap, aq) + cq);
            }
        }
        best
    }

    /// The unique segment from `p` to `q` as an ordered point sequence:
    /// the endpoints plus every vertex strictly between them.
    pub fn segment(&self, p: &TreePoint, q: &TreePoint) -> Vec<TreePoint> {
        if p == q {
            return vec![*p];
        }
        if self.same_edge(p, q).is_some() {
            return vec![*p, *q];
        }
        // pick the anchor pair realizing the distance
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for &(ap, cp) in &self.anchors(p) {
            for &(aq, cq) in &self.anchors(q) {
                let d = cp + self.vertex_distance(ap, aq) + cq;
                if d < best.0 {
                    best = (d, ap, aq);
                }
            }
        }
        let mut points = Vec::new();
        if *p != TreePoint::Vertex(best.1) {
            points.push(*p);
        }
        points.extend(self.vertex_path(best.1, best.2).into_iter().map(TreePoint::Vertex));
        if *q != TreePoint::Vertex(best.2) {
            points.push(*q);
        }
        points
    }

    /// All vertices `z` with `d(x,z) + d(z,y) = d(x,y)`. In a tree this
    /// is exactly the vertex set of the unique segment.
    pub fn betweenness_set(&self, x: usize, y: usize) -> Result<Vec<usize>, TreeError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let dxy = self.vertex_distance(x, y);
        let tol = scaled_tol(dxy, REL_TOL);
        Ok((0..self.vertex_count())
            .filter(|&z| {
                (self.vertex_distance(x, z) + self.vertex_distance(z, y) - dxy).abs() <= tol
            })
            .collect())
    }

    /// The point at arc-length `t` from `x` along the segment `[x, y]`.
    pub fn point_at_arc(&self, x: usize, y: usize, t: f64) -> Result<TreePoint, TreeError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let total = self.vertex_distance(x, y);
        if t < 0.0 || t > total + scaled_tol(total, REL_TOL) {
            return Err(TreeError::OffsetOutOfRange {
                u: x,
                v: y,
                offset: t,
                len: total,
            });
        }
        let path = self.vertex_path(x, y);
        let mut walked = 0.0;
        for w in path.windows(2) {
            let len = self.edge_len(w[0], w[1]).expect("path edge exists");
            if t <= walked + len {
                return self.point_on_edge(w[0], w[1], (t - walked).clamp(0.0, len));
            }
            walked += len;
        }
        Ok(TreePoint::Vertex(y))
    }

    /// Is `p` on the segment `[x, y]`?
    fn on_segment(&self, p: &TreePoint, x: usize, y: usize) -> bool {
        let px = self.distance(p, &TreePoint::Vertex(x));
        let py = self.distance(p, &TreePoint::Vertex(y));
        let dxy = self.vertex_distance(x, y);
        (px + py - dxy).abs() <= scaled_tol(dxy, REL_TOL)
    }

    /// Nearest-point projection onto the segment `[x, y]`, found by
    /// walking from `p` toward `x` and stopping at the first contact —
    /// the point where `[p, x]` meets `[x, y]`.
    pub fn project_onto_segment(
        &self,
        p: &TreePoint,
        x: usize,
        y: usize,
    ) -> Result<TreePoint, TreeError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if self.on_segment(p, x, y) {
            return Ok(*p);
        }
        for point in self.segment(p, &TreePoint::Vertex(x)) {
            if self.on_segment(&point, x, y) {
                return Ok(point);
            }
        }
        unreachable!("x itself lies on [x, y]")
    }

    fn convex_set(&self, c: &[usize]) -> Result<Vec<usize>, TreeError> {
        if c.is_empty() {
            return Err(TreeError::NotConvex);
        }
        let mut members = c.to_vec();
        for &v in &members {
            self.check_vertex(v)?;
        }
        members.sort_unstable();
        members.dedup();
        // connected induced subgraph <=> convex in a tree
        let inset = |v: usize| members.binary_search(&v).is_ok();
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![members[0]];
        seen[members[0]] = true;
        let mut reached = 1usize;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if inset(v) && !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    stack.push(v);
                }
            }
        }
        if reached != members.len() {
            return Err(TreeError::NotConvex);
        }
        Ok(members)
    }

    /// Nearest-point projection onto the subtree induced by the convex
    /// vertex set `c`.
    pub fn project_onto_subtree(&self, p: &TreePoint, c: &[usize]) -> Result<TreePoint, TreeError> {
        let members = self.convex_set(c)?;
        let inset = |v: usize| members.binary_search(&v).is_ok();
        match *p {
            TreePoint::Vertex(v) if inset(v) => return Ok(*p),
            TreePoint::OnEdge { u, v, .. } if inset(u) && inset(v) => return Ok(*p),
            _ => {}
        }
        // every path from p into the subtree passes through the same
        // gate vertex: the first member on the walk toward any member
        for point in self.segment(p, &TreePoint::Vertex(members[0])) {
            if let TreePoint::Vertex(w) = point {
                if inset(w) {
                    return Ok(point);
                }
            }
        }
        unreachable!("members[0] is in the set")
    }

    /// Verifies the gluing axiom at `x`: if `[y,x]` and `[x,z]` meet only
    /// at `x`, their union must be exactly `[y,z]` (as vertex sets and in
    /// length). Returns true vacuously when the segments overlap further.
    pub fn check_gluing(&self, y: usize, x: usize, z: usize) -> Result<bool, TreeError> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        self.check_vertex(z)?;
        let seg_yx: Vec<usize> = self.vertex_path(y, x);
        let seg_xz: Vec<usize> = self.vertex_path(x, z);
        let common: Vec<usize> = seg_yx
            .iter()
            .filter(|v| seg_xz.contains(v))
            .copied()
            .collect();
        if common != vec![x] {
            return Ok(true); // hypothesis fails; nothing to check
        }
        let mut union: Vec<usize> = seg_yx.iter().chain(seg_xz.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        let mut seg_yz = self.vertex_path(y, z);
        seg_yz.sort_unstable();
        let dyz = self.vertex_distance(y, z);
        let lengths_add = (self.vertex_distance(y, x) + self.vertex_distance(x, z) - dyz)
            .abs()
            <= scaled_tol(dyz, REL_TOL);
        Ok(union == seg_yz && lengths_add)
    }

    /// Max observed ratio `d(P(p), P(q)) / d(p, q)` over the sample
    /// pairs, `P` being the projection onto the convex set `c`. Pairs at
    /// zero distance are skipped.
    pub fn nonexpansiveness_probe(
        &self,
        c: &[usize],
        pairs: &[(TreePoint, TreePoint)],
    ) -> Result<f64, TreeError> {
        self.convex_set(c)?;
        let mut max_ratio = 0.0f64;
        for (p, q) in pairs {
            let d = self.distance(p, q);
            if d <= 0.0 {
                continue;
            }
            let pp = self.project_onto_subtree(p, c)?;
            let pq = self.project_onto_subtree(q, c)?;
            max_ratio = max_ratio.max(self.distance(&pp, &pq) / d);
        }
        Ok(max_ratio)
    }

    /// The path metric on all vertices (leaves and internal alike).
    pub fn path_metric(&self) -> FiniteMetricSpace {
        let n = self.vertex_count();
        let mut flat = vec![0.0f64; n * n];
        for source in 0..n {
            // one DFS per source; dist accumulates along tree edges
            let mut stack = vec![(source, usize::MAX, 0.0f64)];
            while let Some((u, from, d)) = stack.pop() {
                flat[source * n + u] = d;
                for &(v, len) in &self.adj[u] {
                    if v != from {
                        stack.push((v, u, d + len));
                    }
                }
            }
        }
        FiniteMetricSpace::from_flat(self.labels.clone(), flat).expect("square by construction")
    }

    /// View of the tree as a weighted graph (for geodesic operations).
    pub fn to_graph(&self) -> WeightedGraph {
        WeightedGraph::new(
            self.labels.clone(),
            self.edges.iter().map(|e| (e.u, e.v, e.len)).collect(),
        )
        .expect("tree edges form a valid graph")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolicity::delta_four_point;

    /// a-u(1), b-u(1), u-v(1), c-v(1)
    fn caterpillar() -> MetricTree {
        MetricTree::new(
            vec!["a".into(), "b".into(), "u".into(), "v".into(), "c".into()],
            vec![(0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)],
        )
        .unwrap()
    }

    /// center c with leaves a (length 1) and b (length 2)
    fn star() -> MetricTree {
        MetricTree::new(
            vec!["c".into(), "a".into(), "b".into()],
            vec![(0, 1, 1.0), (0, 2, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn build_rejects_cycles_and_forests() {
        let err = MetricTree::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
        )
        .unwrap_err();
        assert!(matches!(err, TreeError::NotATree { .. }));
        let err = MetricTree::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, 1.0)],
        )
        .unwrap_err();
        assert!(matches!(err, TreeError::NotATree { connected: false, .. }));
    }

    #[test]
    fn distance_and_segment_basics() {
        let t = caterpillar();
        let a = TreePoint::Vertex(0);
        let c = TreePoint::Vertex(4);
        assert_eq!(t.distance(&a, &a), 0.0);
        assert_eq!(t.segment(&a, &a), vec![a]);
        assert_eq!(t.distance(&a, &c), 3.0);
        let seg = t.segment(&a, &c);
        let want: Vec<TreePoint> = [0, 2, 3, 4].iter().map(|&v| TreePoint::Vertex(v)).collect();
        assert_eq!(seg, want);
    }

    #[test]
    fn star_distance_through_center() {
        let t = star();
        assert_eq!(
            t.distance(&TreePoint::Vertex(1), &TreePoint::Vertex(2)),
            3.0
        );
    }

    #[test]
    fn edge_points_collapse_and_canonicalize() {
        let t = caterpillar();
        assert_eq!(t.point_on_edge(0, 2, 0.0).unwrap(), TreePoint::Vertex(0));
        assert_eq!(t.point_on_edge(0, 2, 1.0).unwrap(), TreePoint::Vertex(2));
        let p = t.point_on_edge(2, 0, 0.25).unwrap(); // reversed orientation
        assert_eq!(
            p,
            TreePoint::OnEdge {
                u: 0,
                v: 2,
                offset: 0.75
            }
        );
        assert!(matches!(
            t.point_on_edge(0, 2, 1.5),
            Err(TreeError::OffsetOutOfRange { .. })
        ));
        assert!(matches!(
            t.point_on_edge(0, 4, 0.5),
            Err(TreeError::NoSuchEdge { .. })
        ));
    }

    #[test]
    fn mid_edge_distances() {
        let t = caterpillar();
        let p = t.point_on_edge(0, 2, 0.25).unwrap();
        let q = t.point_on_edge(0, 2, 0.75).unwrap();
        assert!((t.distance(&p, &q) - 0.5).abs() < 1e-15);
        let r = t.point_on_edge(3, 4, 0.5).unwrap();
        // 0.75 to u, 1 to v, 0.5 into (v, c)
        assert!((t.distance(&p, &r) - 2.25).abs() < 1e-12);
        let seg = t.segment(&p, &r);
        assert_eq!(seg.len(), 4); // p, u, v, r
        assert_eq!(seg[1], TreePoint::Vertex(2));
        assert_eq!(seg[2], TreePoint::Vertex(3));
    }

    #[test]
    fn betweenness_matches_segments() {
        let t = caterpillar();
        assert_eq!(t.betweenness_set(0, 4).unwrap(), vec![0, 2, 3, 4]);
        let s = star();
        assert_eq!(s.betweenness_set(1, 2).unwrap(), vec![0, 1, 2]);
        // path graph a-b-c
        let p = MetricTree::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        assert_eq!(p.betweenness_set(0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn projection_onto_segment() {
        let t = caterpillar();
        // b projects onto [a, c] at u, one unit away
        let b = TreePoint::Vertex(1);
        let proj = t.project_onto_segment(&b, 0, 4).unwrap();
        assert_eq!(proj, TreePoint::Vertex(2));
        assert_eq!(t.distance(&b, &proj), 1.0);
        // a point already on the segment is fixed
        let on = t.point_on_edge(2, 3, 0.5).unwrap();
        assert_eq!(t.project_onto_segment(&on, 0, 4).unwrap(), on);
    }

    #[test]
    fn projection_onto_segment_star() {
        // leaf a onto [b, center]: the center
        let t = star();
        let proj = t
            .project_onto_segment(&TreePoint::Vertex(1), 2, 0)
            .unwrap();
        assert_eq!(proj, TreePoint::Vertex(0));
    }

    #[test]
    fn projection_brute_force_cross_check() {
        // dense sampling of [x, y] must not find anything closer
        let t = caterpillar();
        for p in [
            TreePoint::Vertex(1),
            t.point_on_edge(1, 2, 0.3).unwrap(),
            t.point_on_edge(3, 4, 0.9).unwrap(),
        ] {
            let proj = t.project_onto_segment(&p, 0, 4).unwrap();
            let d_proj = t.distance(&p, &proj);
            let total = t.vertex_distance(0, 4);
            let mut best = f64::INFINITY;
            let steps = 2000;
            for s in 0..=steps {
                let at = t
                    .point_at_arc(0, 4, total * s as f64 / steps as f64)
                    .unwrap();
                best = best.min(t.distance(&p, &at));
            }
            assert!(
                d_proj <= best + 1e-9,
                "projection {d_proj} worse than sampled {best}"
            );
        }
    }

    #[test]
    fn projection_idempotent_and_decomposes() {
        let t = caterpillar();
        let b = TreePoint::Vertex(1);
        let proj = t.project_onto_segment(&b, 0, 4).unwrap();
        assert_eq!(t.project_onto_segment(&proj, 0, 4).unwrap(), proj);
        // beyond the projection, distances decompose through it
        for target in [0usize, 3, 4] {
            let via = t.distance(&b, &proj) + t.distance(&proj, &TreePoint::Vertex(target));
            let direct = t.distance(&b, &TreePoint::Vertex(target));
            assert!((via - direct).abs() <= 1e-12, "target {target}");
        }
    }

    #[test]
    fn subtree_projection_and_convexity() {
        let t = caterpillar();
        // the path a-u-v-c is convex; b gates at u
        let proj = t
            .project_onto_subtree(&TreePoint::Vertex(1), &[0, 2, 3, 4])
            .unwrap();
        assert_eq!(proj, TreePoint::Vertex(2));
        // {a, c} does not induce a connected subtree
        assert_eq!(
            t.project_onto_subtree(&TreePoint::Vertex(1), &[0, 4]),
            Err(TreeError::NotConvex)
        );
    }

    #[test]
    fn gluing_cases() {
        // path a-b-c glues [a,b] and [b,c] into [a,c]
        let p = MetricTree::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        assert!(p.check_gluing(0, 1, 2).unwrap());
        let s = star();
        assert!(s.check_gluing(1, 0, 2).unwrap());
        let t = caterpillar();
        // [a,v] ∩ [v,c] = {v}: union is [a,c] with lengths 2 + 1 = 3
        assert!(t.check_gluing(0, 3, 4).unwrap());
        // hypothesis failure (segments overlap in more than one vertex)
        // is vacuously true
        assert!(t.check_gluing(0, 4, 1).unwrap());
    }

    #[test]
    fn gluing_holds_for_all_triples() {
        let t = caterpillar();
        let n = t.vertex_count();
        for y in 0..n {
            for x in 0..n {
                for z in 0..n {
                    assert!(t.check_gluing(y, x, z).unwrap(), "triple ({y},{x},{z})");
                }
            }
        }
    }

    #[test]
    fn nonexpansiveness_probes() {
        let t = caterpillar();
        let path_ac = [0usize, 2, 3, 4];
        // p, q inside C: projection is the identity, ratio 1
        let inside = [(TreePoint::Vertex(2), TreePoint::Vertex(4))];
        let r = t.nonexpansiveness_probe(&path_ac, &inside).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        // b and a: P(b) = u, P(a) = a, so d(P(b), P(a)) = 1 while d(b, a) = 2
        let mixed = [(TreePoint::Vertex(1), TreePoint::Vertex(0))];
        let r = t.nonexpansiveness_probe(&path_ac, &mixed).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        // constant projection onto a single vertex
        let single = [(TreePoint::Vertex(0), TreePoint::Vertex(4))];
        let r = t.nonexpansiveness_probe(&[2], &single).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn tree_metric_is_zero_hyperbolic() {
        let t = caterpillar();
        let w = delta_four_point(&t.path_metric());
        assert!(w.delta <= 1e-12, "tree delta {}", w.delta);
    }

    #[test]
    fn point_at_arc_walks_the_path() {
        let t = caterpillar();
        assert_eq!(t.point_at_arc(0, 4, 0.0).unwrap(), TreePoint::Vertex(0));
        assert_eq!(t.point_at_arc(0, 4, 1.0).unwrap(), TreePoint::Vertex(2));
        assert_eq!(t.point_at_arc(0, 4, 3.0).unwrap(), TreePoint::Vertex(4));
        let mid = t.point_at_arc(0, 4, 1.5).unwrap();
        assert_eq!(
            mid,
            TreePoint::OnEdge {
                u: 2,
                v: 3,
                offset: 0.5
            }
        );
        assert!(t.point_at_arc(0, 4, 3.5).is_err());
    }
}
