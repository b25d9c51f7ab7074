//! Realizing 0-hyperbolic finite metrics as weighted trees.
//!
//! Points are inserted in input order. Each new point `w` picks the
//! already-inserted ordered pair `(x, y)` maximizing the Gromov product
//! `(y, w)_x` and attaches by a pendant edge of length `d(x,w) - (y,w)_x`
//! at the point of `[x, y]` at arc-length `(y,w)_x` from `x`; attaching
//! mid-edge splits the edge at a new Steiner vertex. Correctness is
//! enforced operationally: [`verify_embedding`] recomputes every pairwise
//! distance from the built tree.

use std::collections::HashSet;

use thiserror::Error;

use crate::hyperbolicity::delta_four_point;
use crate::space::FiniteMetricSpace;
use crate::tree::{MetricTree, TreeError};

/// Default gate for the 0-hyperbolicity precondition: strict enough to
/// reject cycle metrics, loose enough for accumulated rounding on
/// realistic tree data.
pub const DEFAULT_ZERO_TOL: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum RealizeError {
    #[error(
        "space is not 0-hyperbolic within {tol}: delta = {delta} at quadruple {witness:?}"
    )]
    NotZeroHyperbolic {
        delta: f64,
        witness: [usize; 4],
        tol: f64,
    },
    #[error("construction produced a non-positive edge length {len} while inserting point {point}; the tolerance is too loose for this data")]
    NegativeEdge { point: usize, len: f64 },
    #[error("label {0:?} from the space is missing in the tree")]
    MissingLabel(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Incremental tree under construction: plain adjacency plus the edge
/// list in a deterministic order.
struct Builder {
    labels: Vec<String>,
    used: HashSet<String>,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<usize>>, // indices into `edges`
    steiner_counter: usize,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            labels: Vec::new(),
            used: HashSet::new(),
            edges: Vec::new(),
            adj: Vec::new(),
            steiner_counter: 0,
        }
    }

    fn add_vertex(&mut self, label: String) -> usize {
        self.used.insert(label.clone());
        self.labels.push(label);
        self.adj.push(Vec::new());
        self.labels.len() - 1
    }

    fn fresh_steiner(&mut self) -> usize {
        loop {
            self.steiner_counter += 1;
            let name = format!("s{}", self.steiner_counter);
            if !self.used.contains(&name) {
                return self.add_vertex(name);
            }
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, len: f64) {
        let idx = self.edges.len();
        self.edges.push((u, v, len));
        self.adj[u].push(idx);
        self.adj[v].push(idx);
    }

    fn other_end(&self, edge: usize, from: usize) -> usize {
        let (u, v, _) = self.edges[edge];
        if u == from {
            v
        } else {
            u
        }
    }

    /// Unique path between two vertices as a list of edge indices.
    fn path_edges(&self, from: usize, to: usize) -> Vec<usize> {
        let n = self.labels.len();
        let mut via: Vec<Option<usize>> = vec![None; n]; // edge used to reach
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            if u == to {
                break;
            }
            for &e in &self.adj[u] {
                let v = self.other_end(e, u);
                if !seen[v] {
                    seen[v] = true;
                    via[v] = Some(e);
                    stack.push(v);
                }
            }
        }
        let mut path = Vec::new();
        let mut w = to;
        while w != from {
            let e = via[w].expect("tree is connected");
            path.push(e);
            w = self.other_end(e, w);
        }
        path.reverse();
        path
    }

    /// Splits edge `e` at `offset` from `from_end`, returning the new
    /// Steiner vertex. The split replaces the edge in place so the edge
    /// list stays deterministic.
    fn split_edge(&mut self, e: usize, from_end: usize, offset: f64) -> usize {
        let (u, v, len) = self.edges[e];
        let (near, far, off) = if from_end == u {
            (u, v, offset)
        } else {
            (v, u, offset)
        };
        let s = self.fresh_steiner();
        self.edges[e] = (near, s, off);
        // rewire: e now ends at s instead of far
        self.adj[far].retain(|&idx| idx != e);
        self.adj[s].push(e);
        self.add_edge(s, far, len - off);
        s
    }

    /// The vertex at arc-length `t` from `x` along the path to `y`,
    /// splitting an edge if the location is interior. Offsets within
    /// `snap` of a vertex collapse to it.
    fn vertex_at_arc(&mut self, x: usize, y: usize, t: f64, snap: f64) -> usize {
        let mut walked = 0.0;
        let mut at = x;
        for e in self.path_edges(x, y) {
            let len = self.edges[e].2;
            if t <= walked + snap {
                return at;
            }
            if t < walked + len - snap {
                return self.split_edge(e, at, t - walked);
            }
            walked += len;
            at = self.other_end(e, at);
        }
        at
    }
}

/// Builds a metric tree whose leaf distances reproduce `space`, or
/// reports why the space cannot embed.
///
/// `tol` gates the four-point precondition (see [`DEFAULT_ZERO_TOL`]) and
/// also serves as the snapping width for zero-length attachments.
pub fn realize_tree(space: &FiniteMetricSpace, tol: f64) -> Result<MetricTree, RealizeError> {
    let gate = delta_four_point(space);
    if gate.delta > tol {
        return Err(RealizeError::NotZeroHyperbolic {
            delta: gate.delta,
            witness: gate.quadruple,
            tol,
        });
    }
    let n = space.len();
    let mut b = Builder::new();
    // input points are tree vertices, in input order
    let mut vertex_of: Vec<usize> = (0..n)
        .map(|i| b.add_vertex(space.label(i).to_string()))
        .collect();
    // which builder vertices carry an input label (merges move these)
    let mut is_input: Vec<bool> = vec![true; n];
    if n == 1 {
        return Ok(MetricTree::new(b.labels, b.edges)?);
    }

    let d01 = space.dist(0, 1);
    if d01 <= tol {
        return Err(RealizeError::NegativeEdge { point: 1, len: d01 });
    }
    b.add_edge(vertex_of[0], vertex_of[1], d01);

    for w in 2..n {
        // ordered pair (x, y) of inserted points maximizing (y, w)_x,
        // lexicographically smallest on ties
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..w {
            for y in 0..w {
                if x == y {
                    continue;
                }
                let gp = 0.5 * (space.dist(y, x) + space.dist(w, x) - space.dist(y, w));
                let better = match best {
                    None => true,
                    Some((bg, bx, by)) => gp > bg || (gp == bg && (x, y) < (bx, by)),
                };
                if better {
                    best = Some((gp, x, y));
                }
            }
        }
        let (gp, x, y) = best.expect("at least two points inserted");
        let seg_len = space.dist(x, y);
        let t = gp.clamp(0.0, seg_len);
        let pendant = space.dist(x, w) - t;
        if pendant < -tol {
            return Err(RealizeError::NegativeEdge {
                point: w,
                len: pendant,
            });
        }
        let attach = b.vertex_at_arc(vertex_of[x], vertex_of[y], t, tol);
        while is_input.len() < b.labels.len() {
            is_input.push(false); // Steiner vertices created by the walk
        }
        if pendant <= tol {
            // w coincides with the attachment point; only a Steiner
            // vertex may absorb an input label
            if is_input[attach] {
                return Err(RealizeError::NegativeEdge {
                    point: w,
                    len: pendant,
                });
            }
            let old = b.labels[attach].clone();
            b.used.remove(&old);
            b.labels[attach] = space.label(w).to_string();
            is_input[attach] = true;
            // the pre-created slot for w has no edges; retire its label
            // (finish() drops isolated vertices) and point w at `attach`
            let unused = vertex_of[w];
            b.labels[unused] = format!("unused{unused}");
            vertex_of[w] = attach;
            continue;
        }
        b.add_edge(attach, vertex_of[w], pendant);
    }
    // drop any merged-away placeholder vertices before building
    let tree = finish(b)?;
    Ok(tree)
}

/// Compacts the builder (removing isolated placeholder vertices left by
/// merges) and produces the final tree.
fn finish(b: Builder) -> Result<MetricTree, TreeError> {
    let n = b.labels.len();
    let mut keep: Vec<bool> = vec![false; n];
    for &(u, v, _) in &b.edges {
        keep[u] = true;
        keep[v] = true;
    }
    if b.edges.is_empty() {
        // single-vertex tree
        return MetricTree::new(b.labels, b.edges);
    }
    let mut remap = vec![usize::MAX; n];
    let mut labels = Vec::new();
    for (i, k) in keep.iter().enumerate() {
        if *k {
            remap[i] = labels.len();
            labels.push(b.labels[i].clone());
        }
    }
    let edges = b
        .edges
        .iter()
        .map(|&(u, v, len)| (remap[u], remap[v], len))
        .collect();
    MetricTree::new(labels, edges)
}

/// Maximum absolute difference between the tree's path distances and the
/// space's matrix, over all label pairs of the space.
pub fn verify_embedding(tree: &MetricTree, space: &FiniteMetricSpace) -> Result<f64, RealizeError> {
    let mut vertex_of = Vec::with_capacity(space.len());
    for label in space.labels() {
        match tree.vertex_index(label) {
            Some(v) => vertex_of.push(v),
            None => return Err(RealizeError::MissingLabel(label.clone())),
        }
    }
    let mut worst = 0.0f64;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let err = (tree.vertex_distance(vertex_of[i], vertex_of[j]) - space.dist(i, j)).abs();
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::validate_metric;
    use crate::space::REL_TOL;

    fn quartet() -> FiniteMetricSpace {
        // ab=2, ac=ad=bc=bd=3, cd=2: a caterpillar metric
        FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec![0.0, 2.0, 3.0, 3.0],
                vec![2.0, 0.0, 3.0, 3.0],
                vec![3.0, 3.0, 0.0, 2.0],
                vec![3.0, 3.0, 2.0, 0.0],
            ],
        )
        .unwrap()
    }

    fn cycle_metric(n: usize) -> FiniteMetricSpace {
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let around = (i as i64 - j as i64).unsigned_abs() as usize;
                rows[i][j] = around.min(n - around) as f64;
            }
        }
        FiniteMetricSpace::new(labels, rows).unwrap()
    }

    #[test]
    fn two_point_space_is_a_single_edge() {
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 5.0], vec![5.0, 0.0]],
        )
        .unwrap();
        let t = realize_tree(&s, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(t.vertex_count(), 2);
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.edges()[0].len, 5.0);
        assert_eq!(verify_embedding(&t, &s).unwrap(), 0.0);
    }

    #[test]
    fn quartet_realizes_as_caterpillar() {
        let s = quartet();
        let t = realize_tree(&s, DEFAULT_ZERO_TOL).unwrap();
        // 4 inputs plus 2 Steiner vertices, all pendant lengths positive
        assert_eq!(t.vertex_count(), 6);
        assert!(t.edges().iter().all(|e| e.len > 0.0));
        assert!(verify_embedding(&t, &s).unwrap() <= 1e-12);
        // its own vertex metric is 0-hyperbolic and valid
        let metric = t.path_metric();
        assert!(validate_metric(&metric, REL_TOL).passed);
        assert!(delta_four_point(&metric).delta <= 1e-12);
    }

    #[test]
    fn collinear_points_merge_onto_steiner() {
        // three points on a line inserted in an order that forces the
        // middle point to land exactly on a previously split edge
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "c".into(), "b".into()],
            vec![
                vec![0.0, 2.0, 1.0],
                vec![2.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let t = realize_tree(&s, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(verify_embedding(&t, &s).unwrap(), 0.0);
        // b absorbed the Steiner split point: exactly 3 vertices remain
        assert_eq!(t.vertex_count(), 3);
    }

    #[test]
    fn cycle_metrics_are_rejected_with_witness() {
        for n in [4usize, 5] {
            let err = realize_tree(&cycle_metric(n), DEFAULT_ZERO_TOL).unwrap_err();
            match err {
                RealizeError::NotZeroHyperbolic { delta, witness, .. } => {
                    let expect = if n == 4 { 1.0 } else { 0.5 };
                    assert_eq!(delta, expect, "C{n}");
                    assert_eq!(witness, [0, 1, 2, 3], "C{n}");
                }
                other => panic!("C{n}: expected NotZeroHyperbolic, got {other:?}"),
            }
        }
    }

    #[test]
    fn verify_embedding_detects_perturbation() {
        let s = quartet();
        let t = realize_tree(&s, DEFAULT_ZERO_TOL).unwrap();
        // rebuild with the middle edge stretched by 0.1: every pair
        // crossing it drifts by exactly 0.1
        let edges: Vec<(usize, usize, f64)> = t
            .edges()
            .iter()
            .map(|e| {
                let stretch = if e.len == 1.0 && t.label(e.u).starts_with('s')
                    && t.label(e.v).starts_with('s')
                {
                    0.1
                } else {
                    0.0
                };
                (e.u, e.v, e.len + stretch)
            })
            .collect();
        let perturbed = MetricTree::new(t.labels().to_vec(), edges).unwrap();
        let err = verify_embedding(&perturbed, &s).unwrap();
        assert!((err - 0.1).abs() < 1e-12, "err {err}");
    }

    #[test]
    fn verify_embedding_reports_missing_label() {
        let s = quartet();
        let t = realize_tree(&s.subspace(&[0, 1]).unwrap(), DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(
            verify_embedding(&t, &s).unwrap_err(),
            RealizeError::MissingLabel("c".into())
        );
    }

    #[test]
    fn random_tree_metrics_round_trip() {
        use rand::{Rng, SeedableRng};
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..=20);
            let mut edges = Vec::new();
            for v in 1..n {
                let parent = rng.gen_range(0..v);
                edges.push((parent, v, rng.gen_range(0.5..1.5)));
            }
            let labels = (0..n).map(|i| format!("p{i}")).collect();
            let tree = MetricTree::new(labels, edges).unwrap();
            let metric = tree.path_metric();
            let rebuilt = realize_tree(&metric, DEFAULT_ZERO_TOL).unwrap();
            let err = verify_embedding(&rebuilt, &metric).unwrap();
            assert!(err <= 1e-6, "seed {seed}: error {err}");
        }
    }
}
