//! Hyperbolicity constants of finite metric spaces.
//!
//! Two definitions are computed by genuinely separate code paths:
//!
//! * [`delta_four_point`]: the least `delta` such that for every quadruple
//!   `d(x,y) + d(z,p) <= max(d(x,z) + d(y,p), d(x,p) + d(y,z)) + 2*delta`.
//!   Per 4-subset this equals half the gap between the largest and
//!   second-largest of the three pairing sums.
//! * [`delta_gromov`]: the least `delta` such that
//!   `(x,z)_p >= min((x,y)_p, (y,z)_p) - delta` for all quadruples, found
//!   by evaluating the Gromov-product expression over all labelings.
//!
//! Both scans iterate unordered 4-subsets; quadruples with repeated points
//! never demand a positive `delta` on a valid metric, so nothing is lost.
//! The two values agree exactly (up to rounding) on every space; the
//! equivalence is re-checked per space by [`equivalence_report`].

use rayon::prelude::*;
use thiserror::Error;

use crate::space::{scaled_tol, FiniteMetricSpace, MetricError, REL_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum HyperbolicityError {
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A computed delta together with the quadruple attaining it.
///
/// Re-evaluating the defining expression at `quadruple` (via
/// [`four_point_excess`] or [`gromov_excess`]) reproduces `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaWitness {
    pub delta: f64,
    /// Point indices `(x, y, z, p)` of the defining expression.
    pub quadruple: [usize; 4],
}

/// One verifiable relation in a report: `holds` iff the relation is
/// satisfied within tolerance, `slack` is how much margin it holds by
/// (negative when violated).
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
    pub slack: f64,
}

impl RelationCheck {
    /// Check `lhs <= rhs + tol`; slack is `rhs - lhs`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> RelationCheck {
        RelationCheck {
            name: name.into(),
            holds: lhs <= rhs + tol,
            slack: rhs - lhs,
        }
    }
}

/// Delta under both definitions plus the equivalence checks that must
/// hold for any finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicityReport {
    pub delta_four_point: DeltaWitness,
    pub delta_gromov: DeltaWitness,
    /// Thin-triangle delta; only present for geodesic (graph) inputs.
    pub delta_thin: Option<crate::thin::ThinWitness>,
    pub diameter: f64,
    pub checks: Vec<RelationCheck>,
}

impl HyperbolicityReport {
    pub fn all_checks_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Four-point requirement of one labeled quadruple: half the gap between
/// the largest and second-largest pairing sums. Always `>= 0` and
/// invariant under relabeling the quadruple.
pub fn four_point_excess(space: &FiniteMetricSpace, quad: [usize; 4]) -> f64 {
    let [x, y, z, p] = quad;
    let s1 = space.dist(x, y) + space.dist(z, p);
    let s2 = space.dist(x, z) + space.dist(y, p);
    let s3 = space.dist(x, p) + space.dist(y, z);
    let (hi, mid) = top_two(s1, s2, s3);
    0.5 * (hi - mid)
}

/// Gromov-product requirement of one ordered quadruple:
/// `min((x,y)_p, (y,z)_p) - (x,z)_p`. May be negative; the minimal delta
/// is the maximum of this over all quadruples, clamped at zero.
pub fn gromov_excess(space: &FiniteMetricSpace, x: usize, y: usize, z: usize, p: usize) -> f64 {
    let dxp = space.dist(x, p);
    let dyp = space.dist(y, p);
    let dzp = space.dist(z, p);
    let xy_p = 0.5 * (dxp + dyp - space.dist(x, y));
    let yz_p = 0.5 * (dyp + dzp - space.dist(y, z));
    let xz_p = 0.5 * (dxp + dzp - space.dist(x, z));
    xy_p.min(yz_p) - xz_p
}

#[inline]
fn top_two(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if c >= hi {
        (c, hi)
    } else if c >= lo {
        (hi, c)
    } else {
        (hi, lo)
    }
}

fn trivial_witness(n: usize) -> DeltaWitness {
    DeltaWitness {
        delta: 0.0,
        quadruple: [0, 1.min(n - 1), 2.min(n - 1), 3.min(n - 1)],
    }
}

/// Candidate ordering: larger delta wins; on exact ties the
/// lexicographically smaller quadruple wins. This makes the reported
/// witness independent of how the scan is partitioned across workers.
#[inline]
fn better(cand: (f64, [usize; 4]), best: (f64, [usize; 4])) -> bool {
    cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1)
}

fn scan_four_point_from(space: &FiniteMetricSpace, i: usize) -> (f64, [usize; 4]) {
    let n = space.len();
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    let row_i = space.row(i);
    for j in (i + 1)..n {
        let dij = row_i[j];
        let row_j = space.row(j);
        for k in (j + 1)..n {
            let dik = row_i[k];
            let djk = row_j[k];
            let row_k = space.row(k);
            for l in (k + 1)..n {
                let s1 = dij + row_k[l];
                let s2 = dik + row_j[l];
                let s3 = row_i[l] + djk;
                let (hi, mid) = top_two(s1, s2, s3);
                let req = 0.5 * (hi - mid);
                // enumeration is lexicographic, so strict improvement
                // keeps the smallest maximizer
                if req > best.0 {
                    best = (req, [i, j, k, l]);
                }
            }
        }
    }
    best
}

fn scan_gromov_from(space: &FiniteMetricSpace, i: usize) -> (f64, [usize; 4]) {
    let n = space.len();
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    for j in (i + 1)..n {
        for k in (j + 1)..n {
            for l in (k + 1)..n {
                let quad = [i, j, k, l];
                // all base points p and middle points y; the expression is
                // symmetric in x and z, so take x < z
                for pi in 0..4 {
                    for yi in 0..4 {
                        if yi == pi {
                            continue;
                        }
                        let mut rest = quad.iter().copied().filter(|&v| {
                            v != quad[pi] && v != quad[yi]
                        });
                        let x = rest.next().unwrap();
                        let z = rest.next().unwrap();
                        let e = gromov_excess(space, x, quad[yi], z, quad[pi]);
                        let cand = (e, [x, quad[yi], z, quad[pi]]);
                        if better(cand, best) {
                            best = cand;
                        }
                    }
                }
            }
        }
    }
    best
}

fn parallel_max(
    space: &FiniteMetricSpace,
    scan: fn(&FiniteMetricSpace, usize) -> (f64, [usize; 4]),
) -> DeltaWitness {
    let n = space.len();
    if n < 4 {
        return trivial_witness(n);
    }
    // one task per leading index; the sequential fold over the ordered
    // results makes the outcome identical for any worker count
    let candidates: Vec<(f64, [usize; 4])> = (0..n - 3)
        .into_par_iter()
        .map(|i| scan(space, i))
        .collect();
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    for cand in candidates {
        if better(cand, best) {
            best = cand;
        }
    }
    DeltaWitness {
        delta: best.0.max(0.0),
        quadruple: best.1,
    }
}

/// Least delta satisfying the four-point condition, with the maximizing
/// quadruple (lexicographically smallest among maximizers).
pub fn delta_four_point(space: &FiniteMetricSpace) -> DeltaWitness {
    parallel_max(space, scan_four_point_from)
}

/// Least delta satisfying the Gromov-product inequality, with an ordered
/// witness `(x, y, z, p)`.
pub fn delta_gromov(space: &FiniteMetricSpace) -> DeltaWitness {
    parallel_max(space, scan_gromov_from)
}

/// Outcome of testing a specific delta against the four-point condition.
#[derive(Debug, Clone, PartialEq)]
pub struct FourPointCheck {
    pub satisfied: bool,
    /// The quadruple that needs the largest delta, whether or not the
    /// tested delta covers it.
    pub worst: DeltaWitness,
}

/// Does `space` satisfy the four-point condition at the given delta?
pub fn satisfies_four_point(
    space: &FiniteMetricSpace,
    delta: f64,
) -> Result<FourPointCheck, HyperbolicityError> {
    if delta < 0.0 {
        return Err(HyperbolicityError::NegativeDelta(delta));
    }
    let worst = delta_four_point(space);
    Ok(FourPointCheck {
        satisfied: worst.delta <= delta + scaled_tol(delta, REL_TOL),
        worst,
    })
}

/// Number of leave-one-out subspace probes used by [`equivalence_report`].
const SUBSPACE_PROBES: usize = 8;

/// Computes both deltas and verifies the relations that must hold on any
/// finite metric space: the two definitions agree, delta is bounded by
/// the diameter, and delta never grows under passing to a subspace.
pub fn equivalence_report(space: &FiniteMetricSpace) -> HyperbolicityReport {
    let four = delta_four_point(space);
    let gromov = delta_gromov(space);
    let diameter = space.diameter();
    let tol = scaled_tol(diameter, REL_TOL);

    let mut checks = vec![
        RelationCheck {
            name: "delta_gromov_equals_delta_four_point".into(),
            holds: (gromov.delta - four.delta).abs() <= tol,
            slack: tol - (gromov.delta - four.delta).abs(),
        },
        RelationCheck::le("delta_le_diameter", gromov.delta, diameter, tol),
    ];

    let n = space.len();
    if n > 1 {
        for drop in 0..n.min(SUBSPACE_PROBES) {
            let indices: Vec<usize> = (0..n).filter(|&v| v != drop).collect();
            let sub = space
                .subspace(&indices)
                .expect("leave-one-out subset is valid");
            let sub_delta = delta_four_point(&sub).delta;
            checks.push(RelationCheck::le(
                format!("subspace_monotonicity_drop_{drop}"),
                sub_delta,
                four.delta,
                tol,
            ));
        }
    }

    HyperbolicityReport {
        delta_four_point: four,
        delta_gromov: gromov,
        delta_thin: None,
        diameter,
        checks,
    }
}
