//! Thin-triangle hyperbolicity on geodesic graphs.
//!
//! A triangle on vertices `x, y, z` is made of the three canonical
//! geodesics. Its thinness is the largest distance from a point on one
//! side to the union of the other two; [`delta_thin`] maximizes this over
//! all vertex triples, sampling each side at its vertices, at multiples
//! of the resolution `r`, and at the tripod offsets (the proof-critical
//! points where the three sides would meet in a tree). The returned value
//! approximates the true canonical-triangle thinness within `±r`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::graph::{Geodesic, GeodesicPoint, GeodesicSpace, GraphError, PointOnGraph};
use crate::hyperbolicity::{delta_gromov, equivalence_report, HyperbolicityReport, RelationCheck};
use crate::space::{scaled_tol, REL_TOL};

/// The three tripod points of a geodesic triangle: one point per side,
/// placed at Gromov-product arc-lengths from the corners. In a tree all
/// three coincide at the median.
#[derive(Debug, Clone)]
pub struct TripodPoints {
    /// Side `[x, y]`, oriented from `x`.
    pub side_xy: Geodesic,
    /// Side `[x, z]`, oriented from `x`.
    pub side_xz: Geodesic,
    /// Side `[y, z]`, oriented from `y`.
    pub side_yz: Geodesic,
    /// Arc of the point opposite `z` on `side_xy`; equals `(y,z)_x`.
    pub arc_xy: f64,
    /// Arc of the point opposite `y` on `side_xz`; equals `(y,z)_x`.
    pub arc_xz: f64,
    /// Arc of the point opposite `x` on `side_yz`; equals `(x,z)_y`.
    pub arc_yz: f64,
}

impl TripodPoints {
    /// `a_z`: the tripod point on `[x, y]`.
    pub fn opposite_z(&self) -> GeodesicPoint<'_> {
        GeodesicPoint {
            geodesic: &self.side_xy,
            t: self.arc_xy,
        }
    }

    /// `a_y`: the tripod point on `[x, z]`.
    pub fn opposite_y(&self) -> GeodesicPoint<'_> {
        GeodesicPoint {
            geodesic: &self.side_xz,
            t: self.arc_xz,
        }
    }

    /// `a_x`: the tripod point on `[y, z]`.
    pub fn opposite_x(&self) -> GeodesicPoint<'_> {
        GeodesicPoint {
            geodesic: &self.side_yz,
            t: self.arc_yz,
        }
    }
}

/// Constructs the tripod points of the triangle on `x, y, z`: on each
/// side, the point whose distances to the adjacent corners equal the
/// corner Gromov products.
pub fn tripod_points(
    gs: &GeodesicSpace,
    x: usize,
    y: usize,
    z: usize,
) -> Result<TripodPoints, GraphError> {
    let side_xy = gs.canonical_geodesic(x, y)?;
    let side_xz = gs.canonical_geodesic(x, z)?;
    let side_yz = gs.canonical_geodesic(y, z)?;
    let metric = gs.metric();
    let gp_yz_x = 0.5 * (metric.dist(y, x) + metric.dist(z, x) - metric.dist(y, z));
    let gp_xz_y = 0.5 * (metric.dist(x, y) + metric.dist(z, y) - metric.dist(x, z));
    Ok(TripodPoints {
        arc_xy: gp_yz_x.clamp(0.0, side_xy.total_len()),
        arc_xz: gp_yz_x.clamp(0.0, side_xz.total_len()),
        arc_yz: gp_xz_y.clamp(0.0, side_yz.total_len()),
        side_xy,
        side_xz,
        side_yz,
    })
}

/// Result of the thin-triangle scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinWitness {
    pub delta: f64,
    /// Role-ordered triple: the witness point lies on side `[x, y]` and
    /// was measured against `[x, z] ∪ [z, y]`.
    pub triple: [usize; 3],
    /// Arc-length of the witness point along the canonical `[x, y]`.
    pub t: f64,
    pub resolution: f64,
}

/// Samples of the opposite two sides, grouped for fast nearest-point
/// queries: vertex samples, plus per-graph-edge sorted interior offsets
/// (canonicalized from the smaller endpoint).
#[derive(Default)]
struct SideUnionSamples {
    vertices: Vec<usize>,
    edges: HashMap<(usize, usize), EdgeBucket>,
}

struct EdgeBucket {
    len: f64,
    offsets: Vec<f64>,
}

fn canonical_edge_offset(u: usize, v: usize, offset: f64, len: f64) -> ((usize, usize), f64) {
    if u < v {
        ((u, v), offset)
    } else {
        ((v, u), len - offset)
    }
}

impl SideUnionSamples {
    fn add_side(&mut self, gs: &GeodesicSpace, side: &Geodesic, arcs: &[f64]) {
        for &t in arcs {
            match side.locate(t) {
                PointOnGraph::Vertex(v) => self.vertices.push(v),
                PointOnGraph::EdgeInterior { u, v, offset } => {
                    let len = gs.graph().edge_len(u, v).expect("side edge exists");
                    let (key, off) = canonical_edge_offset(u, v, offset, len);
                    self.edges
                        .entry(key)
                        .or_insert_with(|| EdgeBucket {
                            len,
                            offsets: Vec::new(),
                        })
                        .offsets
                        .push(off);
                }
            }
        }
    }

    fn finish(&mut self) {
        self.vertices.sort_unstable();
        self.vertices.dedup();
        for bucket in self.edges.values_mut() {
            bucket.offsets.sort_by(f64::total_cmp);
            bucket.offsets.dedup();
        }
    }

    /// Least distance from graph vertex `v` to any sample. Interior
    /// samples of an edge are reached through one of its endpoints, and
    /// along each edge those routes are monotone in the offset, so only
    /// the extreme offsets matter.
    fn min_dist_from_vertex(&self, gs: &GeodesicSpace, v: usize) -> f64 {
        let mut best = f64::INFINITY;
        for &b in &self.vertices {
            best = best.min(gs.dist(v, b));
        }
        for (&(eu, ev), bucket) in &self.edges {
            if let (Some(&lo), Some(&hi)) = (bucket.offsets.first(), bucket.offsets.last()) {
                best = best.min(lo + gs.dist(v, eu));
                best = best.min((bucket.len - hi) + gs.dist(v, ev));
            }
        }
        best
    }

    /// Nearest sample offset on the given edge to `off`, if any.
    fn nearest_on_edge(&self, key: (usize, usize), off: f64) -> Option<f64> {
        let bucket = self.edges.get(&key)?;
        let idx = bucket.offsets.partition_point(|&o| o < off);
        let mut best: Option<f64> = None;
        for cand in [idx.checked_sub(1), Some(idx)].into_iter().flatten() {
            if let Some(&o) = bucket.offsets.get(cand) {
                let d = (off - o).abs();
                if best.map_or(true, |b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }
}

/// Sample arcs of a side: all vertices, all multiples of `r`, plus the
/// given extra arcs (tripod offsets), sorted and deduplicated.
fn sample_arcs(side: &Geodesic, r: f64, extra: &[f64]) -> Vec<f64> {
    let len = side.total_len();
    let mut arcs: Vec<f64> = side.cumulative().to_vec();
    let mut k = 1u64;
    loop {
        let t = k as f64 * r;
        if t >= len {
            break;
        }
        arcs.push(t);
        k += 1;
    }
    for &e in extra {
        arcs.push(e.clamp(0.0, len));
    }
    arcs.sort_by(f64::total_cmp);
    arcs.dedup();
    arcs
}

/// Max over sampled points `a` of side `a` of the distance to the
/// sampled union of the two opposite sides. Returns `(distance, arc)`.
fn rotation_max(
    gs: &GeodesicSpace,
    side_a: &Geodesic,
    arcs_a: &[f64],
    union: &SideUnionSamples,
) -> (f64, f64) {
    // distances from each side-a vertex to the union, memoized
    let mut vertex_dist: HashMap<usize, f64> = HashMap::new();
    let mut dist_of = |v: usize| -> f64 {
        *vertex_dist
            .entry(v)
            .or_insert_with(|| union.min_dist_from_vertex(gs, v))
    };
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in arcs_a {
        let d = match side_a.locate(t) {
            PointOnGraph::Vertex(v) => dist_of(v),
            PointOnGraph::EdgeInterior { u, v, offset } => {
                let len = gs.graph().edge_len(u, v).expect("side edge exists");
                let mut d = (offset + dist_of(u)).min((len - offset) + dist_of(v));
                let (key, off) = canonical_edge_offset(u, v, offset, len);
                if let Some(direct) = union.nearest_on_edge(key, off) {
                    d = d.min(direct);
                }
                d
            }
        };
        if d > best.0 {
            best = (d, t);
        }
    }
    best
}

struct Rotation<'g> {
    x: usize,
    y: usize,
    z: usize,
    side_a: &'g Geodesic,
    b1: &'g Geodesic,
    b2: &'g Geodesic,
}

fn scan_triple(
    gs: &GeodesicSpace,
    r: f64,
    triple: [usize; 3],
) -> Result<(f64, [usize; 3], f64), GraphError> {
    let [i, j, k] = triple;
    let g_ij = gs.canonical_geodesic(i, j)?;
    let g_ik = gs.canonical_geodesic(i, k)?;
    let g_jk = gs.canonical_geodesic(j, k)?;
    let g_ji = gs.canonical_geodesic(j, i)?;
    let g_kj = gs.canonical_geodesic(k, j)?;

    let rotations = [
        // a on [i, j] against [i, k] ∪ [k, j]
        Rotation {
            x: i,
            y: j,
            z: k,
            side_a: &g_ij,
            b1: &g_ik,
            b2: &g_kj,
        },
        // a on [i, k] against [i, j] ∪ [j, k]
        Rotation {
            x: i,
            y: k,
            z: j,
            side_a: &g_ik,
            b1: &g_ij,
            b2: &g_jk,
        },
        // a on [j, k] against [j, i] ∪ [i, k]
        Rotation {
            x: j,
            y: k,
            z: i,
            side_a: &g_jk,
            b1: &g_ji,
            b2: &g_ik,
        },
    ];

    let metric = gs.metric();
    let gp = |a: usize, b: usize, p: usize| {
        0.5 * (metric.dist(a, p) + metric.dist(b, p) - metric.dist(a, b))
    };

    let mut best = (f64::NEG_INFINITY, triple, 0.0);
    for rot in &rotations {
        let (x, y, z) = (rot.x, rot.y, rot.z);
        let arcs_a = sample_arcs(rot.side_a, r, &[gp(y, z, x)]);
        let mut union = SideUnionSamples::default();
        union.add_side(gs, rot.b1, &sample_arcs(rot.b1, r, &[gp(y, z, x)]));
        union.add_side(gs, rot.b2, &sample_arcs(rot.b2, r, &[gp(x, y, z)]));
        union.finish();
        let (d, t) = rotation_max(gs, rot.side_a, &arcs_a, &union);
        if d > best.0 {
            best = (d, [x, y, z], t);
        }
    }
    Ok(best)
}

/// Thin-triangle delta of the graph's canonical geodesic triangles,
/// sampled at resolution `r`.
pub fn delta_thin(gs: &GeodesicSpace, r: f64) -> Result<ThinWitness, GraphError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GraphError::NonPositiveResolution(r));
    }
    let n = gs.graph().vertex_count();
    if n < 3 {
        return Ok(ThinWitness {
            delta: 0.0,
            triple: [0, 1.min(n - 1), 2.min(n - 1)],
            t: 0.0,
            resolution: r,
        });
    }
    let per_first: Vec<Result<(f64, [usize; 3], f64), GraphError>> = (0..n - 2)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, [i, i + 1, i + 2], 0.0);
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let cand = scan_triple(gs, r, [i, j, k])?;
                    if cand.0 > best.0 {
                        best = cand;
                    }
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, [0usize; 3], 0.0);
    for cand in per_first {
        let cand = cand?;
        if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
            best = cand;
        }
    }
    Ok(ThinWitness {
        delta: best.0.max(0.0),
        triple: best.1,
        t: best.2,
        resolution: r,
    })
}

/// Largest pairwise distance among the tripod points of any vertex
/// triple; the witnessing triple comes second.
pub fn max_tripod_spread(gs: &GeodesicSpace) -> Result<(f64, [usize; 3]), GraphError> {
    let n = gs.graph().vertex_count();
    let mut best = (0.0f64, [0, 1.min(n - 1), 2.min(n - 1)]);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let tp = tripod_points(gs, i, j, k)?;
                let a_z = tp.opposite_z().locate();
                let a_y = tp.opposite_y().locate();
                let a_x = tp.opposite_x().locate();
                let spread = gs
                    .located_distance(&a_z, &a_y)
                    .max(gs.located_distance(&a_z, &a_x))
                    .max(gs.located_distance(&a_y, &a_x));
                if spread > best.0 {
                    best = (spread, [i, j, k]);
                }
            }
        }
    }
    Ok(best)
}

/// The factor-3 relations tying the Gromov-product delta of the path
/// metric to the measured thin-triangle delta, with the sampling slack
/// `r` carried explicitly, plus the tripod-spread bound.
pub fn thin_relations(gs: &GeodesicSpace, r: f64) -> Result<Vec<RelationCheck>, GraphError> {
    let thin = delta_thin(gs, r)?;
    thin_relation_checks(gs, &thin)
}

fn thin_relation_checks(
    gs: &GeodesicSpace,
    thin: &ThinWitness,
) -> Result<Vec<RelationCheck>, GraphError> {
    let r = thin.resolution;
    let delta3 = delta_gromov(gs.metric()).delta;
    let tol = scaled_tol(gs.metric().diameter(), REL_TOL);
    let (spread, _) = max_tripod_spread(gs)?;
    Ok(vec![
        RelationCheck::le(
            "delta_gromov_le_3_delta_thin",
            delta3,
            3.0 * thin.delta + 3.0 * r,
            tol,
        ),
        RelationCheck::le(
            "delta_thin_le_3_delta_gromov",
            thin.delta,
            3.0 * delta3 + r,
            tol,
        ),
        RelationCheck::le(
            "tripod_spread_le_2_delta_thin",
            spread,
            2.0 * thin.delta + 2.0 * r,
            tol,
        ),
    ])
}

/// Full report for a geodesic graph: both metric deltas, the thin delta,
/// and every equivalence relation including the factor-3 checks.
pub fn geodesic_report(gs: &GeodesicSpace, r: f64) -> Result<HyperbolicityReport, GraphError> {
    let thin = delta_thin(gs, r)?;
    let mut report = equivalence_report(gs.metric());
    report.checks.extend(thin_relation_checks(gs, &thin)?);
    report.delta_thin = Some(thin);
    Ok(report)
}
