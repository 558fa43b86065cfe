//! Phase-space primitives for the Galerkin-truncated problem.
//!
//! A state is the coefficient vector of the first `m` sine modes on (0, L).
//! Two norms matter:
//!
//! * `norm_x` - the Euclidean norm of the coefficients (the L2-type norm the
//!   attractors and covers live in);
//! * `norm_y` - the smoothed norm `sqrt(sum_k lambda_k u_k^2)` with
//!   `lambda_k = (k pi / L)^2`, which the smoothing-property estimates use.
//!
//! `norm_y(u) >= sqrt(lambda_1) * norm_x(u)` always, with equality on pure
//! first-mode states.

use crate::error::{Error, Result};
use crate::exec;
use serde::Serialize;

/// Sine-mode discretization of (0, L): eigenvalues and fractional weights.
#[derive(Debug, Clone)]
pub struct SpatialDiscretization {
    length: f64,
    modes: usize,
    delta: f64,
    eigenvalues: Vec<f64>,
    frac_weights: Vec<f64>,
}

impl SpatialDiscretization {
    /// Discretization with `modes` sine modes on (0, 1) and delta = 1/4.
    pub fn new(modes: usize) -> Result<Self> {
        Self::with(1.0, modes, 0.25)
    }

    /// Fully specified discretization. `delta` is the fractional-power
    /// exponent used by the smoothing diagnostics; it must lie in (0, 1/2).
    pub fn with(length: f64, modes: usize, delta: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive and finite, got {length}"
            )));
        }
        if modes == 0 {
            return Err(Error::InvalidParameter("mode count must be >= 1".into()));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "fractional exponent delta must lie in (0, 1/2), got {delta}"
            )));
        }
        let eigenvalues: Vec<f64> = (1..=modes)
            .map(|k| {
                let w = k as f64 * std::f64::consts::PI / length;
                w * w
            })
            .collect();
        let frac_weights = eigenvalues.iter().map(|l| l.powf(delta)).collect();
        Ok(Self {
            length,
            modes,
            delta,
            eigenvalues,
            frac_weights,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `lambda_k = (k pi / L)^2`, 1-based mode `k` at index `k - 1`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `lambda_k^delta`, the weights of the fractional norm.
    pub fn frac_weights(&self) -> &[f64] {
        &self.frac_weights
    }

    /// Smoothed norm `sqrt(sum_k lambda_k u_k^2)`.
    pub fn norm_y(&self, u: &StateVector) -> Result<f64> {
        self.check_modes(u)?;
        let mut acc = 0.0;
        for (c, l) in u.coeffs.iter().zip(&self.eigenvalues) {
            acc += l * c * c;
        }
        Ok(acc.sqrt())
    }

    /// Fractional norm `sqrt(sum_k lambda_k^(2 delta) u_k^2)`; recorded by the
    /// Hoelder diagnostics.
    pub fn norm_fractional(&self, u: &StateVector) -> Result<f64> {
        self.check_modes(u)?;
        let mut acc = 0.0;
        for (c, w) in u.coeffs.iter().zip(&self.frac_weights) {
            acc += w * w * c * c;
        }
        Ok(acc.sqrt())
    }

    pub(crate) fn check_modes(&self, u: &StateVector) -> Result<()> {
        if u.modes() != self.modes {
            return Err(Error::ModeMismatch {
                left: self.modes,
                right: u.modes(),
            });
        }
        Ok(())
    }
}

/// Coefficient vector of the first `m` sine modes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub coeffs: Vec<f64>,
}

impl StateVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(modes: usize) -> Self {
        Self {
            coeffs: vec![0.0; modes],
        }
    }

    /// Unit vector along 1-based mode `k`.
    pub fn unit(modes: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= modes, "mode index {k} out of 1..={modes}");
        let mut coeffs = vec![0.0; modes];
        coeffs[k - 1] = 1.0;
        Self { coeffs }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Euclidean norm of the coefficients.
    pub fn norm_x(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist_x(&self, other: &Self) -> f64 {
        dist2(&self.coeffs, &other.coeffs).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modes(), other.modes());
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Squared Euclidean distance between coefficient slices. Covers compare
/// squared distances against r^2 so no result depends on a sqrt rounding.
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Finite set of states with a label carried through reports.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub label: String,
    pub elements: Vec<StateVector>,
}

impl PointCloud {
    pub fn new(label: impl Into<String>, elements: Vec<StateVector>) -> Self {
        Self {
            label: label.into(),
            elements,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.elements.first().map_or(0, StateVector::modes)
    }

    pub fn max_norm_x(&self) -> f64 {
        self.elements
            .iter()
            .map(StateVector::norm_x)
            .fold(0.0, f64::max)
    }
}

/// One-sided Hausdorff distance `sup_{a in A} inf_{b in B} |a - b|_X`.
///
/// Zero iff every point of `A` already lies in `B` (as a finite set).
pub fn hausdorff_semidist(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput("hausdorff_semidist: first cloud"));
    }
    if b.is_empty() {
        return Err(Error::EmptyInput("hausdorff_semidist: second cloud"));
    }
    if a.modes() != b.modes() {
        return Err(Error::ModeMismatch {
            left: a.modes(),
            right: b.modes(),
        });
    }
    let mins = exec::map_ordered(&a.elements, |p| {
        b.elements
            .iter()
            .map(|q| dist2(&p.coeffs, &q.coeffs))
            .fold(f64::INFINITY, f64::min)
    });
    Ok(mins.into_iter().fold(0.0, f64::max).sqrt())
}

/// Symmetric Hausdorff distance (max of the two semidistances).
pub fn hausdorff_dist(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(hausdorff_semidist(a, b)?.max(hausdorff_semidist(b, a)?))
}

/// Result of a greedy covering pass: chosen centers and their count.
#[derive(Debug, Clone, Serialize)]
pub struct CoverResult {
    pub radius: f64,
    pub count: usize,
    #[serde(skip)]
    pub center_indices: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
}

/// Greedy cover of a finite set by closed balls of radius `r`.
///
/// Scans points in input order; a point not within `r` of an existing center
/// becomes the next center (first-uncovered-point rule), so the result is
/// deterministic and every center is an input point. The count is a feasible
/// upper bound on the optimal covering number at radius `r`.
pub fn greedy_cover(k: &PointCloud, r: f64) -> Result<CoverResult> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if k.is_empty() {
        return Err(Error::EmptyInput("greedy_cover: cloud"));
    }
    let r2 = r * r;
    let mut idx: Vec<usize> = Vec::new();
    for (i, p) in k.elements.iter().enumerate() {
        let covered = idx
            .iter()
            .any(|&c| dist2(&p.coeffs, &k.elements[c].coeffs) <= r2);
        if !covered {
            idx.push(i);
        }
    }
    Ok(CoverResult {
        radius: r,
        count: idx.len(),
        centers: idx.iter().map(|&i| k.elements[i].coeffs.clone()).collect(),
        center_indices: idx,
    })
}

/// Greedy cover under an arbitrary metric; returns indices of the centers.
/// Same first-uncovered-point rule as [`greedy_cover`].
pub fn greedy_cover_by<T>(items: &[T], r: f64, dist: impl Fn(&T, &T) -> f64) -> Result<Vec<usize>> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if items.is_empty() {
        return Err(Error::EmptyInput("greedy_cover_by: items"));
    }
    let mut idx: Vec<usize> = Vec::new();
    for (i, p) in items.iter().enumerate() {
        if !idx.iter().any(|&c| dist(p, &items[c]) <= r) {
            idx.push(i);
        }
    }
    Ok(idx)
}

/// Number of X-balls of radius `rho` needed to cover the unit ball of the
/// Y-norm, counted from an explicit axis-aligned lattice construction.
///
/// The Y-unit ball is the ellipsoid `sum_k lambda_k u_k^2 <= 1` with semi-axes
/// `a_k = lambda_k^(-1/2)`. Cells of side `2 rho / sqrt(m)` have circumradius
/// `rho`, so placing a ball at each lattice cell that meets the ellipsoid is a
/// valid cover; the count is a feasible upper bound on the optimal one. Cell
/// counts per axis snap down by a 1e-9 relative tolerance so exact boundary
/// ratios (for example `a_1 / rho = 3`) do not round up through float noise.
///
/// For `rho >= a_1` a single ball at the origin suffices and 1 is returned.
pub fn unit_ball_y_cover_count(disc: &SpatialDiscretization, rho: f64) -> Result<u64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::NonPositiveRadius(rho));
    }
    let m = disc.modes();
    let semi_axes: Vec<f64> = disc.eigenvalues().iter().map(|l| 1.0 / l.sqrt()).collect();
    if rho >= semi_axes[0] {
        return Ok(1);
    }
    let step = 2.0 * rho / (m as f64).sqrt();
    let counts: Vec<usize> = semi_axes
        .iter()
        .map(|a| {
            let raw = 2.0 * a / step;
            let snapped = (raw - 1e-9 * raw.max(1.0)).ceil();
            (snapped as usize).max(1)
        })
        .collect();
    let total: f64 = counts.iter().map(|&n| n as f64).product();
    if total > 5e7 {
        return Err(Error::LatticeTooFine { cells: total });
    }

    // Depth-first enumeration with pruning: a cell is kept iff the point of
    // its box closest to the origin still lies inside the ellipsoid.
    let lambda = disc.eigenvalues();
    let mut count: u64 = 0;
    fn descend(
        axis: usize,
        acc: f64,
        m: usize,
        counts: &[usize],
        semi_axes: &[f64],
        lambda: &[f64],
        step: f64,
        count: &mut u64,
    ) {
        if axis == m {
            *count += 1;
            return;
        }
        let a = semi_axes[axis];
        for j in 0..counts[axis] {
            let lo = -a + j as f64 * step;
            let hi = lo + step;
            let q = if lo <= 0.0 && 0.0 <= hi {
                0.0
            } else {
                lo.abs().min(hi.abs())
            };
            let next = acc + lambda[axis] * q * q;
            if next <= 1.0 + 1e-12 {
                descend(axis + 1, next, m, counts, semi_axes, lambda, step, count);
            }
        }
    }
    descend(0, 0.0, m, &counts, &semi_axes, lambda, step, &mut count);
    // Every axis keeps at least the cell containing 0, so the count is >= 1.
    Ok(count.max(1))
}

const FIRST_PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// `n` low-discrepancy points in the closed X-ball of the given radius.
///
/// Kronecker sequence with square-root-of-prime increments and a seeded
/// offset: deterministic for a fixed `(n, modes, radius, seed)` on every
/// platform (pure f64 arithmetic, no RNG state beyond the offset hash).
pub fn low_discrepancy_ball(n: usize, modes: usize, radius: f64, seed: u64) -> PointCloud {
    assert!(modes >= 1 && modes <= FIRST_PRIMES.len(), "modes out of range");
    assert!(radius >= 0.0 && radius.is_finite());
    let mut state = seed ^ 0xa076_1d64_78bd_642f;
    let offsets: Vec<f64> = (0..modes)
        .map(|_| (splitmix64(&mut state) >> 11) as f64 / (1u64 << 53) as f64)
        .collect();
    let alphas: Vec<f64> = (0..modes)
        .map(|j| (FIRST_PRIMES[j] as f64).sqrt().fract())
        .collect();
    let elements: Vec<StateVector> = (0..n)
        .map(|i| {
            let mut y: Vec<f64> = (0..modes)
                .map(|j| {
                    let u = (offsets[j] + (i as f64 + 1.0) * alphas[j]).fract();
                    2.0 * u - 1.0
                })
                .collect();
            let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            let s = radius / norm.max(1.0);
            for c in &mut y {
                *c *= s;
            }
            StateVector::new(y)
        })
        .collect();
    PointCloud::new(format!("lowdisc-ball-r{radius}-s{seed}"), elements)
}
