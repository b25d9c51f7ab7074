//! Finite metric spaces: labeled point sets with a full distance matrix.
//!
//! Construction is permissive (any square matrix is accepted) so that
//! [`validate_metric`] can report axiom violations on raw data; every
//! other computation in this crate assumes the axioms hold.

use thiserror::Error;

/// Default relative tolerance for metric comparisons.
///
/// Applied as `max(1, scale) * REL_TOL`, so it behaves absolutely near
/// zero and relatively for large distances.
pub const REL_TOL: f64 = 1e-9;

/// Comparison slack at a given magnitude: `max(1, |scale|) * rel`.
pub fn scaled_tol(scale: f64, rel: f64) -> f64 {
    scale.abs().max(1.0) * rel
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix is {rows}x{cols} but {labels} labels were given")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        labels: usize,
    },
    #[error("a metric space needs at least one point")]
    EmptySpace,
    #[error("point index {index} out of range for {size} points")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate point index {index} in subspace selection")]
    DuplicateIndex { index: usize },
}

/// A finite metric space: point labels plus an `n x n` distance matrix.
///
/// The matrix is stored row-major. Distances are `f64`; all equality
/// checks elsewhere use a relative tolerance (see [`REL_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl FiniteMetricSpace {
    /// Builds a space from labels and a square matrix. The matrix is taken
    /// as-is: symmetry and the triangle inequality are checked separately
    /// by [`validate_metric`], not here.
    pub fn new(
        labels: Vec<String>,
        dist_matrix: Vec<Vec<f64>>,
    ) -> Result<FiniteMetricSpace, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::EmptySpace);
        }
        if dist_matrix.len() != n || dist_matrix.iter().any(|row| row.len() != n) {
            return Err(MetricError::DimensionMismatch {
                rows: dist_matrix.len(),
                cols: dist_matrix.iter().map(|r| r.len()).max().unwrap_or(0),
                labels: n,
            });
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in &dist_matrix {
            dist.extend_from_slice(row);
        }
        Ok(FiniteMetricSpace { labels, dist, n })
    }

    /// Builds a space from a flat row-major matrix of length `n*n`.
    pub fn from_flat(labels: Vec<String>, dist: Vec<f64>) -> Result<FiniteMetricSpace, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::EmptySpace);
        }
        if dist.len() != n * n {
            return Err(MetricError::DimensionMismatch {
                rows: dist.len() / n.max(1),
                cols: n,
                labels: n,
            });
        }
        Ok(FiniteMetricSpace { labels, dist, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n = 0 is rejected at construction
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Distance between points `i` and `j`. Panics on out-of-range indices.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Row `i` of the matrix, useful for tight scan loops.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// The flat row-major matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i < self.n {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange {
                index: i,
                size: self.n,
            })
        }
    }

    /// Gromov product `(x, z)_p = (d(x,p) + d(z,p) - d(x,z)) / 2`.
    ///
    /// For a valid metric this is always in `[0, min(d(x,p), d(z,p))]`.
    pub fn gromov_product(&self, x: usize, z: usize, p: usize) -> Result<f64, MetricError> {
        self.check_index(x)?;
        self.check_index(z)?;
        self.check_index(p)?;
        Ok(0.5 * (self.dist(x, p) + self.dist(z, p) - self.dist(x, z)))
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                max = max.max(self.dist(i, j));
            }
        }
        max
    }

    /// Restriction of the space to `indices`, labels preserved in the
    /// given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<FiniteMetricSpace, MetricError> {
        if indices.is_empty() {
            return Err(MetricError::EmptySpace);
        }
        let mut seen = vec![false; self.n];
        for &i in indices {
            self.check_index(i)?;
            if seen[i] {
                return Err(MetricError::DuplicateIndex { index: i });
            }
            seen[i] = true;
        }
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist(i, j));
            }
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(FiniteMetricSpace { labels, dist, n: m })
    }

    /// Returns a copy with every distance scaled by `c`.
    pub fn scaled(&self, c: f64) -> FiniteMetricSpace {
        FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * c).collect(),
            n: self.n,
        }
    }
}

/// The metric axiom families checked by [`validate_metric`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// `d(i,i) = 0`
    ZeroDiagonal,
    /// `d(i,j) = d(j,i)`
    Symmetry,
    /// `d(i,j) > 0` for `i != j`
    Positivity,
    /// `d(i,k) <= d(i,j) + d(j,k)`
    Triangle,
    /// entries must be finite
    Finiteness,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::ZeroDiagonal => "zero-diagonal",
            Axiom::Symmetry => "symmetry",
            Axiom::Positivity => "positivity",
            Axiom::Triangle => "triangle",
            Axiom::Finiteness => "finiteness",
        }
    }
}

/// Worst witness of one violated axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// Point indices involved; 1, 2 or 3 of them depending on the axiom.
    pub witness: Vec<usize>,
    /// How far the axiom is from holding (always > tolerance).
    pub magnitude: f64,
}

/// Result of checking all metric axioms on a space.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    /// At most one entry per axiom: the worst witness found.
    pub violations: Vec<AxiomViolation>,
}

/// Checks all metric axioms, reporting the single worst witness per axiom.
///
/// `rel` is the relative tolerance base (use [`REL_TOL`] unless the data
/// demands otherwise). This reports rather than fails: an asymmetric or
/// non-metric matrix still yields a report.
pub fn validate_metric(space: &FiniteMetricSpace, rel: f64) -> ValidationReport {
    let n = space.len();
    let mut violations: Vec<AxiomViolation> = Vec::new();
    let mut record = |axiom: Axiom, witness: Vec<usize>, magnitude: f64| {
        match violations.iter_mut().find(|v| v.axiom == axiom) {
            Some(v) => {
                if magnitude > v.magnitude {
                    v.witness = witness;
                    v.magnitude = magnitude;
                }
            }
            None => violations.push(AxiomViolation {
                axiom,
                witness,
                magnitude,
            }),
        }
    };

    for i in 0..n {
        for j in 0..n {
            let d = space.dist(i, j);
            if !d.is_finite() {
                record(Axiom::Finiteness, vec![i, j], f64::INFINITY);
            }
        }
    }

    for i in 0..n {
        let d = space.dist(i, i);
        if d.is_finite() && d.abs() > scaled_tol(d, rel) {
            record(Axiom::ZeroDiagonal, vec![i], d.abs());
        }
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let dij = space.dist(i, j);
            let dji = space.dist(j, i);
            if !dij.is_finite() || !dji.is_finite() {
                continue;
            }
            let gap = (dij - dji).abs();
            if gap > scaled_tol(dij.abs().max(dji.abs()), rel) {
                record(Axiom::Symmetry, vec![i, j], gap);
            }
            if dij <= 0.0 || dji <= 0.0 {
                record(Axiom::Positivity, vec![i, j], (-dij.min(dji)).max(0.0));
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = space.dist(i, j);
            if !dij.is_finite() {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let dik = space.dist(i, k);
                let djk = space.dist(j, k);
                if !dik.is_finite() || !djk.is_finite() {
                    continue;
                }
                let slack = dik - (dij + djk);
                if slack > scaled_tol(dij + djk, rel) {
                    record(Axiom::Triangle, vec![i, j, k], slack);
                }
            }
        }
    }

    ValidationReport {
        passed: violations.is_empty(),
        violations,
    }
}
