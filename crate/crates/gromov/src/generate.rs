//! Generators for the example spaces: the radial metric, Poincaré-disk
//! samples, hyperbolic fillings of ultrametric balls, and the graph test
//! corpus (cycles, random trees, grids). All randomness is seeded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::space::{validate_metric, FiniteMetricSpace, ValidationReport, REL_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("points {a} and {b} coincide")]
    DuplicatePoint { a: usize, b: usize },
    #[error("point {index} has norm {norm}, too close to the unit circle")]
    PointOutsideDisk { index: usize, norm: f64 },
    #[error("ball family is empty")]
    EmptyFamily,
    #[error("ball {id:?} has no members")]
    EmptyBall { id: String },
    #[error("ball {id:?} has non-positive nominal diameter {diameter}")]
    NonPositiveDiameter { id: String, diameter: f64 },
    #[error("ball {id:?} refers to point {index}, but the space has {size} points")]
    BadMemberIndex {
        id: String,
        index: usize,
        size: usize,
    },
    #[error("{what} requires {requirement}, got {got}")]
    BadSize {
        what: &'static str,
        requirement: &'static str,
        got: usize,
    },
    #[error("edge length must be positive, got {0}")]
    BadLength(f64),
}

/// The radial metric on planar points: the Euclidean distance when the
/// two points are proportional (lie on a line through the origin), the
/// sum of their norms otherwise. This is a metric tree on the plane.
pub fn radial_space(points: &[(f64, f64)]) -> Result<FiniteMetricSpace, GenError> {
    if points.is_empty() {
        return Err(GenError::BadSize {
            what: "radial space",
            requirement: "at least 1 point",
            got: 0,
        });
    }
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            if a == b {
                return Err(GenError::DuplicatePoint { a: i, b: j });
            }
        }
    }
    let n = points.len();
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let norm = |(x, y): (f64, f64)| (x * x + y * y).sqrt();
    let mut flat = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i], points[j]);
            let cross = a.0 * b.1 - a.1 * b.0;
            // proportionality is sign-free and includes the origin
            let proportional = cross.abs() <= 1e-12 * (norm(a) * norm(b)).max(1.0);
            let d = if proportional {
                ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
            } else {
                norm(a) + norm(b)
            };
            flat[i * n + j] = d;
            flat[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::from_flat(labels, flat).expect("square by construction"))
}

/// Planar points spread over a few random rays through the origin, so
/// radial samples exercise both branches of the metric.
pub fn sample_radial_points(n: usize, rays: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rays = rays.max(1);
    let angles: Vec<f64> = (0..rays)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect();
    (0..n)
        .map(|_| {
            let angle = angles[rng.gen_range(0..rays)];
            let radius = rng.gen_range(0.1..4.0);
            (radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// Margin kept between sample norms and the unit circle.
pub const DISK_MARGIN: f64 = 1e-6;

/// Hyperbolic distances between points of the open unit disk under the
/// Poincaré model: `arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)))`.
pub fn poincare_space(points: &[(f64, f64)]) -> Result<FiniteMetricSpace, GenError> {
    if points.is_empty() {
        return Err(GenError::BadSize {
            what: "Poincaré space",
            requirement: "at least 1 point",
            got: 0,
        });
    }
    for (i, &(x, y)) in points.iter().enumerate() {
        let norm = (x * x + y * y).sqrt();
        if norm >= 1.0 - DISK_MARGIN {
            return Err(GenError::PointOutsideDisk { index: i, norm });
        }
    }
    let n = points.len();
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let mut flat = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (u, v) = (points[i], points[j]);
            let du = 1.0 - (u.0 * u.0 + u.1 * u.1);
            let dv = 1.0 - (v.0 * v.0 + v.1 * v.1);
            let diff = (u.0 - v.0).powi(2) + (u.1 - v.1).powi(2);
            let d = (1.0 + 2.0 * diff / (du * dv)).acosh();
            flat[i * n + j] = d;
            flat[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::from_flat(labels, flat).expect("square by construction"))
}

/// Seeded uniform samples of the disk of radius `max_norm`.
pub fn sample_disk_points(n: usize, max_norm: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let radius = max_norm * rng.gen::<f64>().sqrt();
            let angle = rng.gen::<f64>() * std::f64::consts::TAU;
            (radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// A ball of an ultrametric space: its member points plus the nominal
/// diameter (actual diameter floored at the ball's scale, kept positive
/// so the filling distance is defined for singletons).
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub id: String,
    pub members: Vec<usize>,
    pub nominal_diameter: f64,
}

/// A family of balls over an underlying point metric.
#[derive(Debug, Clone)]
pub struct UltrametricBallFamily {
    space: FiniteMetricSpace,
    balls: Vec<Ball>,
}

impl UltrametricBallFamily {
    pub fn new(
        space: FiniteMetricSpace,
        balls: Vec<Ball>,
    ) -> Result<UltrametricBallFamily, GenError> {
        if balls.is_empty() {
            return Err(GenError::EmptyFamily);
        }
        for ball in &balls {
            if ball.members.is_empty() {
                return Err(GenError::EmptyBall {
                    id: ball.id.clone(),
                });
            }
            if !(ball.nominal_diameter > 0.0) {
                return Err(GenError::NonPositiveDiameter {
                    id: ball.id.clone(),
                    diameter: ball.nominal_diameter,
                });
            }
            for &m in &ball.members {
                if m >= space.len() {
                    return Err(GenError::BadMemberIndex {
                        id: ball.id.clone(),
                        index: m,
                        size: space.len(),
                    });
                }
            }
        }
        Ok(UltrametricBallFamily { space, balls })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }
}

/// The hyperbolic filling distance on a ball family:
/// `h(A,B) = 2 log(diam(A∪B) / sqrt(diam(A) diam(B)))` with
/// `diam(A∪B) = max(nominal A, nominal B, max cross-pair distance)`.
///
/// Whether `h` satisfies the triangle inequality depends on the family,
/// so the validation report is attached rather than assumed.
pub fn ultrametric_filling(
    family: &UltrametricBallFamily,
) -> (FiniteMetricSpace, ValidationReport) {
    let balls = family.balls();
    let n = balls.len();
    let labels = balls.iter().map(|b| b.id.clone()).collect();
    let mut flat = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&balls[i], &balls[j]);
            let mut union_diam = a.nominal_diameter.max(b.nominal_diameter);
            for &p in &a.members {
                for &q in &b.members {
                    union_diam = union_diam.max(family.space.dist(p, q));
                }
            }
            let h = 2.0 * (union_diam / (a.nominal_diameter * b.nominal_diameter).sqrt()).ln();
            flat[i * n + j] = h;
            flat[j * n + i] = h;
        }
    }
    let space = FiniteMetricSpace::from_flat(labels, flat).expect("square by construction");
    let report = validate_metric(&space, REL_TOL);
    (space, report)
}

/// Seeded random ultrametric: single-linkage heights of a random binary
/// merge tree; `d(i,j)` is the height at which `i` and `j` first share a
/// cluster.
pub fn random_ultrametric(n: usize, seed: u64) -> Result<FiniteMetricSpace, GenError> {
    if n == 0 {
        return Err(GenError::BadSize {
            what: "ultrametric",
            requirement: "at least 1 point",
            got: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut flat = vec![0.0f64; n * n];
    let mut height = 0.0f64;
    while clusters.len() > 1 {
        height += rng.gen_range(0.1..1.0);
        let a = rng.gen_range(0..clusters.len());
        let mut b = rng.gen_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        let (first, second) = (a.min(b), a.max(b));
        let taken = clusters.remove(second);
        for &p in &taken {
            for &q in &clusters[first] {
                flat[p * n + q] = height;
                flat[q * n + p] = height;
            }
        }
        clusters[first].extend(taken);
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    Ok(FiniteMetricSpace::from_flat(labels, flat).expect("square by construction"))
}

/// Balls of `space` at dyadic scales: at each scale `2^k` the classes of
/// the relation `d <= 2^k`, with nominal diameter `2^k`. Covers scales
/// from just below the smallest positive distance up to the diameter.
pub fn dyadic_ball_family(space: &FiniteMetricSpace) -> Result<UltrametricBallFamily, GenError> {
    let n = space.len();
    let mut min_pos = f64::INFINITY;
    let mut diam = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            diam = diam.max(d);
            if d > 0.0 {
                min_pos = min_pos.min(d);
            }
        }
    }
    if !min_pos.is_finite() {
        min_pos = 1.0; // single point or all-zero: one scale suffices
        diam = diam.max(1.0);
    }
    let k_lo = min_pos.log2().floor() as i32;
    let k_hi = diam.log2().ceil() as i32;
    let mut balls = Vec::new();
    for k in k_lo..=k_hi {
        let scale = 2.0f64.powi(k);
        // transitive closure of `d <= scale` via union-find
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut Vec<usize>, mut v: usize) -> usize {
            while root[v] != v {
                root[v] = root[root[v]];
                v = root[v];
            }
            v
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) <= scale {
                    let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                    if ri != rj {
                        root[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut classes: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        for v in 0..n {
            let r = find(&mut root, v);
            classes.entry(r).or_default().push(v);
        }
        for (c, (_, members)) in classes.into_iter().enumerate() {
            balls.push(Ball {
                id: format!("s{k}b{c}"),
                members,
                nominal_diameter: scale,
            });
        }
    }
    UltrametricBallFamily::new(space.clone(), balls)
}

/// The cycle graph `C_n` with uniform edge length.
pub fn cycle_graph(n: usize, edge_len: f64) -> Result<WeightedGraph, GenError> {
    if n < 3 {
        return Err(GenError::BadSize {
            what: "cycle",
            requirement: "at least 3 vertices",
            got: n,
        });
    }
    if !(edge_len > 0.0) {
        return Err(GenError::BadLength(edge_len));
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let edges = (0..n).map(|i| (i, (i + 1) % n, edge_len)).collect();
    Ok(WeightedGraph::new(labels, edges).expect("cycle edges are valid"))
}

/// Seeded random tree: vertex `i` attaches to a uniform earlier vertex
/// with a length uniform in `len_range`.
pub fn random_tree(
    n: usize,
    seed: u64,
    len_range: (f64, f64),
) -> Result<WeightedGraph, GenError> {
    if n == 0 {
        return Err(GenError::BadSize {
            what: "tree",
            requirement: "at least 1 vertex",
            got: 0,
        });
    }
    let (lo, hi) = len_range;
    if !(lo > 0.0) || hi < lo {
        return Err(GenError::BadLength(lo.min(hi)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let len = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        edges.push((parent, v, len));
    }
    Ok(WeightedGraph::new(labels, edges).expect("tree edges are valid"))
}

/// The `w x h` grid graph with unit edge lengths.
pub fn grid_graph(w: usize, h: usize) -> Result<WeightedGraph, GenError> {
    if w == 0 || h == 0 {
        return Err(GenError::BadSize {
            what: "grid",
            requirement: "positive width and height",
            got: w.min(h),
        });
    }
    let at = |r: usize, c: usize| r * w + c;
    let mut labels = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            labels.push(format!("g{r}_{c}"));
        }
    }
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if c + 1 < w {
                edges.push((at(r, c), at(r, c + 1), 1.0));
            }
            if r + 1 < h {
                edges.push((at(r, c), at(r + 1, c), 1.0));
            }
        }
    }
    Ok(WeightedGraph::new(labels, edges).expect("grid edges are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs_shortest;
    use crate::hyperbolicity::delta_four_point;

    #[test]
    fn radial_metric_branches() {
        // same ray: Euclidean distance
        let s = radial_space(&[(1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert!((s.dist(0, 1) - 1.0).abs() < 1e-15);
        // different rays: sum of norms
        let s = radial_space(&[(1.0, 0.0), (0.0, 1.0)]).unwrap();
        assert!((s.dist(0, 1) - 2.0).abs() < 1e-15);
        // opposite rays: both branches agree
        let s = radial_space(&[(1.0, 0.0), (-2.0, 0.0)]).unwrap();
        assert!((s.dist(0, 1) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn radial_origin_is_proportional_to_everything() {
        let s = radial_space(&[(0.0, 0.0), (0.0, 2.5)]).unwrap();
        assert!((s.dist(0, 1) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn radial_rejects_duplicates() {
        assert_eq!(
            radial_space(&[(1.0, 1.0), (1.0, 1.0)]).unwrap_err(),
            GenError::DuplicatePoint { a: 0, b: 1 }
        );
    }

    #[test]
    fn radial_samples_are_tree_metrics() {
        for seed in 0..10 {
            let points = sample_radial_points(12, 3, seed);
            let s = radial_space(&points).unwrap();
            assert!(validate_metric(&s, REL_TOL).passed, "seed {seed}");
            assert!(
                delta_four_point(&s).delta <= 1e-9,
                "seed {seed}: delta {}",
                delta_four_point(&s).delta
            );
        }
    }

    #[test]
    fn poincare_radius_formula() {
        // d(0, (r, 0)) = log((1+r)/(1-r)); r = 0.5 gives log 3
        let s = poincare_space(&[(0.0, 0.0), (0.5, 0.0)]).unwrap();
        assert!((s.dist(0, 1) - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn poincare_rejects_boundary_points() {
        assert!(matches!(
            poincare_space(&[(0.9999999, 0.0)]),
            Err(GenError::PointOutsideDisk { index: 0, .. })
        ));
    }

    #[test]
    fn poincare_samples_are_metrics() {
        for seed in 0..10 {
            let s = poincare_space(&sample_disk_points(8, 0.95, seed)).unwrap();
            assert!(validate_metric(&s, REL_TOL).passed, "seed {seed}");
        }
    }

    #[test]
    fn filling_formula_arithmetic() {
        // two singleton balls, nominal diameters 1 and 4; cross distance 3
        // keeps the union at 4, so h = 2 log 2
        let base = FiniteMetricSpace::new(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 3.0], vec![3.0, 0.0]],
        )
        .unwrap();
        let family = UltrametricBallFamily::new(
            base,
            vec![
                Ball {
                    id: "A".into(),
                    members: vec![0],
                    nominal_diameter: 1.0,
                },
                Ball {
                    id: "B".into(),
                    members: vec![1],
                    nominal_diameter: 4.0,
                },
            ],
        )
        .unwrap();
        let (space, _) = ultrametric_filling(&family);
        assert_eq!(space.dist(0, 0), 0.0);
        assert!((space.dist(0, 1) - 2.0 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn filling_family_validation() {
        let base = FiniteMetricSpace::new(vec!["x".into()], vec![vec![0.0]]).unwrap();
        assert_eq!(
            UltrametricBallFamily::new(base.clone(), vec![]).unwrap_err(),
            GenError::EmptyFamily
        );
        let bad = Ball {
            id: "A".into(),
            members: vec![],
            nominal_diameter: 1.0,
        };
        assert!(matches!(
            UltrametricBallFamily::new(base, vec![bad]).unwrap_err(),
            GenError::EmptyBall { .. }
        ));
    }

    #[test]
    fn dyadic_filling_of_random_ultrametric() {
        let um = random_ultrametric(10, 3).unwrap();
        assert!(validate_metric(&um, REL_TOL).passed);
        let family = dyadic_ball_family(&um).unwrap();
        assert!(!family.balls().is_empty());
        let (space, _report) = ultrametric_filling(&family);
        // h is finite and nonnegative; its delta is recorded, not asserted
        for i in 0..space.len() {
            for j in 0..space.len() {
                let h = space.dist(i, j);
                assert!(h.is_finite() && h >= 0.0, "h({i},{j}) = {h}");
            }
        }
        let delta = delta_four_point(&space).delta;
        assert!(delta.is_finite());
    }

    #[test]
    fn cycle_and_grid_agree_on_c4() {
        let c4 = all_pairs_shortest(&cycle_graph(4, 1.0).unwrap()).unwrap();
        assert_eq!(delta_four_point(&c4).delta, 1.0);
        let grid = all_pairs_shortest(&grid_graph(2, 2).unwrap()).unwrap();
        // same metric up to vertex naming: compare sorted distance multisets
        let mut a: Vec<f64> = c4.matrix().to_vec();
        let mut b: Vec<f64> = grid.matrix().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn random_trees_are_zero_hyperbolic() {
        for seed in 0..10 {
            let g = random_tree(12, seed, (0.5, 1.5)).unwrap();
            let m = all_pairs_shortest(&g).unwrap();
            assert!(
                delta_four_point(&m).delta <= 1e-9,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn generators_reject_bad_sizes() {
        assert!(matches!(
            cycle_graph(2, 1.0),
            Err(GenError::BadSize { .. })
        ));
        assert!(matches!(cycle_graph(4, 0.0), Err(GenError::BadLength(_))));
        assert!(matches!(random_tree(0, 1, (0.5, 1.5)), Err(GenError::BadSize { .. })));
        assert!(matches!(grid_graph(0, 3), Err(GenError::BadSize { .. })));
    }

    #[test]
    fn random_tree_reproducible() {
        let a = random_tree(20, 7, (0.5, 1.5)).unwrap();
        let b = random_tree(20, 7, (0.5, 1.5)).unwrap();
        assert_eq!(a, b);
    }
}
