//! Dense vector primitives, cluster statistics, and the orthogonal
//! reflection that aligns the first coordinate axis with a principal
//! direction.
//!
//! Everything operates on `f64`; vectors are plain slices and a [`VectorSet`]
//! stores its members contiguously in row-major order.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Power iteration stops when the eigenvector moves less than this between
/// iterations.
const POWER_TOL: f64 = 1e-10;
/// Hard cap on power iterations; near-tied eigenvalues converge slowly and
/// any direction in the dominant eigenspace splits a cluster equally well.
const POWER_MAX_ITERS: usize = 300;
/// Dimensions up to this form the covariance matrix explicitly; above it the
/// iteration uses matrix-free products against the centered rows.
const DENSE_COV_MAX_DIM: usize = 64;
/// Components at or below this magnitude are ignored by the sign convention.
const SIGN_EPS: f64 = 1e-12;
/// A direction this close to the first axis uses the identity instead of a
/// reflection (the reflector formula divides by the gap).
const ALIGN_EPS: f64 = 1e-9;
/// Tolerance on the unit-length precondition of reflection inputs.
const UNIT_EPS: f64 = 1e-9;
/// Clusters with total squared deviation below this are treated as a single
/// repeated point.
pub(crate) const SCATTER_EPS: f64 = 1e-12;

/// A set of equal-dimension vectors stored contiguously (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    dim: usize,
    data: Vec<f64>,
}

impl VectorSet {
    /// Creates an empty set of `dim`-dimensional vectors.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        VectorSet { dim, data: Vec::new() }
    }

    pub fn with_capacity(dim: usize, vectors: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        VectorSet { dim, data: Vec::with_capacity(dim * vectors) }
    }

    /// Wraps a flat row-major buffer. The length must be a multiple of `dim`
    /// and every component must be finite.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim.max(1), got: data.len() });
        }
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteComponent);
        }
        Ok(VectorSet { dim, data })
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.dim, "row dimension mismatch");
        self.data.extend_from_slice(row);
    }

    /// Number of vectors in the set.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn rows_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.data.chunks_exact_mut(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Copies the given rows into a new set, in the order given.
    pub fn subset(&self, indices: &[usize]) -> VectorSet {
        let mut out = VectorSet::with_capacity(self.dim, indices.len());
        for &i in indices {
            out.push(self.row(i));
        }
        out
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(v: &[f64]) -> f64 {
    math::sqrt(dot(v, v))
}

/// Squared Euclidean distance between two equal-length vectors.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Mean vector of a non-empty set.
pub fn centroid(set: &VectorSet) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut sum = vec![0.0; set.dim()];
    for row in set.rows() {
        for (s, x) in sum.iter_mut().zip(row) {
            *s += x;
        }
    }
    let inv = 1.0 / set.len() as f64;
    for s in &mut sum {
        *s *= inv;
    }
    Ok(sum)
}

/// Total squared deviation from the centroid, `sum_i ||d_i - w||^2`.
///
/// Zero exactly when every vector equals the centroid; this is the quantity
/// the splitter maximizes when choosing which cluster to bisect.
pub fn scatter_value(set: &VectorSet) -> Result<f64> {
    let w = centroid(set)?;
    Ok(scatter_about(set.rows(), &w))
}

pub(crate) fn scatter_about<'a>(rows: impl Iterator<Item = &'a [f64]>, w: &[f64]) -> f64 {
    rows.map(|row| squared_distance(row, w)).sum()
}

/// Unit eigenvector of the cluster covariance with the largest eigenvalue.
///
/// The sign is fixed so the first component larger than `1e-12` in magnitude
/// is positive, making builds reproducible across runs. Fails with
/// [`Error::DegenerateCluster`] when all vectors are identical.
pub fn leading_principal_component(set: &VectorSet) -> Result<Vec<f64>> {
    let w = centroid(set)?;
    if set.len() < 2 {
        return Err(Error::DegenerateCluster);
    }
    let scatter = scatter_about(set.rows(), &w);
    principal_direction(set, None, &w, scatter)
}

/// Power iteration over the (possibly implicit) covariance of the selected
/// rows. `members = None` means the whole set. The caller supplies the
/// centroid and scatter so cluster bookkeeping is not recomputed.
pub(crate) fn principal_direction(
    set: &VectorSet,
    members: Option<&[usize]>,
    w: &[f64],
    scatter: f64,
) -> Result<Vec<f64>> {
    if scatter < SCATTER_EPS {
        return Err(Error::DegenerateCluster);
    }
    let n = set.dim();
    let mut u = if n <= DENSE_COV_MAX_DIM {
        let cov = covariance(set, members, w);
        power_iterate(n, |z, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = dot(&cov[i * n..(i + 1) * n], z);
            }
        })
    } else {
        let mut centered = vec![0.0; n];
        power_iterate(n, |z, out| {
            out.fill(0.0);
            for_each_row(set, members, |row| {
                for ((c, x), m) in centered.iter_mut().zip(row).zip(w) {
                    *c = x - m;
                }
                let p = dot(&centered, z);
                for (o, c) in out.iter_mut().zip(&centered) {
                    *o += p * c;
                }
            });
        })
    }?;
    fix_sign(&mut u);
    Ok(u)
}

fn for_each_row(set: &VectorSet, members: Option<&[usize]>, mut f: impl FnMut(&[f64])) {
    match members {
        None => set.rows().for_each(&mut f),
        Some(idx) => idx.iter().for_each(|&i| f(set.row(i))),
    }
}

/// Dense covariance `sum (d - w)(d - w)^T` of the selected rows, row-major.
fn covariance(set: &VectorSet, members: Option<&[usize]>, w: &[f64]) -> Vec<f64> {
    let n = set.dim();
    let mut cov = vec![0.0; n * n];
    let mut centered = vec![0.0; n];
    for_each_row(set, members, |row| {
        for ((c, x), m) in centered.iter_mut().zip(row).zip(w) {
            *c = x - m;
        }
        for i in 0..n {
            let ci = centered[i];
            let out = &mut cov[i * n..(i + 1) * n];
            for (o, cj) in out.iter_mut().zip(&centered) {
                *o += ci * cj;
            }
        }
    });
    cov
}

/// Runs power iteration with a deterministic start, restarting from a fresh
/// pseudo-random direction if the operator annihilates the current iterate.
fn power_iterate(n: usize, mut apply: impl FnMut(&[f64], &mut [f64])) -> Result<Vec<f64>> {
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    for _ in 0..4 {
        let mut z = pseudo_random_unit(n, &mut state);
        let mut y = vec![0.0; n];
        let mut stalled = false;
        for _ in 0..POWER_MAX_ITERS {
            apply(&z, &mut y);
            let lambda = norm(&y);
            if lambda < f64::MIN_POSITIVE {
                stalled = true;
                break;
            }
            let inv = 1.0 / lambda;
            let mut delta = 0.0;
            let flip = if dot(&y, &z) < 0.0 { -1.0 } else { 1.0 };
            for (zi, yi) in z.iter_mut().zip(&mut y) {
                *yi *= inv;
                let d = flip * *yi - *zi;
                delta += d * d;
                *zi = *yi;
            }
            if math::sqrt(delta) < POWER_TOL {
                return Ok(z);
            }
        }
        if !stalled {
            // Iteration cap reached without meeting the tolerance: the top
            // eigenvalues are nearly tied and the current iterate already
            // lies in their span.
            return Ok(z);
        }
    }
    Err(Error::DegenerateCluster)
}

/// Deterministic unit vector from a splitmix64 stream.
fn pseudo_random_unit(n: usize, state: &mut u64) -> Vec<f64> {
    loop {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut x = *state;
            x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            x ^= x >> 31;
            // Map to [-1, 1).
            v.push((x >> 11) as f64 / 4_503_599_627_370_496.0 - 1.0);
        }
        let len = norm(&v);
        if len > 1e-3 {
            for c in &mut v {
                *c /= len;
            }
            return v;
        }
    }
}

fn fix_sign(u: &mut [f64]) {
    for &c in u.iter() {
        if math::abs(c) > SIGN_EPS {
            if c < 0.0 {
                for x in u.iter_mut() {
                    *x = -*x;
                }
            }
            return;
        }
    }
}

/// Orthogonal symmetry mapping the first canonical axis onto a chosen unit
/// direction. `Identity` covers the degenerate case where the direction
/// already is the first axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Reflection {
    Identity,
    /// Reflection across the hyperplane orthogonal to the stored unit vector:
    /// `x - 2 <x, v> v`.
    Householder(Vec<f64>),
}

impl Reflection {
    pub fn is_identity(&self) -> bool {
        matches!(self, Reflection::Identity)
    }

    /// Applies the symmetry in place. The caller guarantees the dimension.
    #[inline]
    pub fn apply_in_place(&self, x: &mut [f64]) {
        if let Reflection::Householder(v) = self {
            debug_assert_eq!(v.len(), x.len());
            let t = 2.0 * dot(x, v);
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi -= t * vi;
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Reflection::Identity => None,
            Reflection::Householder(v) => Some(v.len()),
        }
    }
}

/// Builds the reflection `v = (u - e1) / ||u - e1||` whose induced symmetry
/// maps `e1` onto `u`. `u` must be unit length within `1e-9`.
pub fn make_reflection(u: &[f64]) -> Result<Reflection> {
    if u.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteComponent);
    }
    if math::abs(norm(u) - 1.0) > UNIT_EPS {
        return Err(Error::UnnormalizedDirection);
    }
    // ||u - e1||^2 = 2 (1 - u[0]) for unit u.
    let mut diff = u.to_vec();
    diff[0] -= 1.0;
    let gap = norm(&diff);
    if gap < ALIGN_EPS {
        return Ok(Reflection::Identity);
    }
    for c in &mut diff {
        *c /= gap;
    }
    Ok(Reflection::Householder(diff))
}

/// Applies the symmetry to one vector, checking dimensions.
pub fn reflect(spec: &Reflection, x: &[f64]) -> Result<Vec<f64>> {
    if let Some(d) = spec.dim() {
        if d != x.len() {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
    }
    Ok(spec.apply(x))
}

/// Applies the symmetry to every vector of a set.
pub fn reflect_set(spec: &Reflection, set: &VectorSet) -> Result<VectorSet> {
    if let Some(d) = spec.dim() {
        if d != set.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: set.dim() });
        }
    }
    let mut data = set.as_flat().to_vec();
    if let Reflection::Householder(_) = spec {
        for row in data.chunks_exact_mut(set.dim()) {
            spec.apply_in_place(row);
        }
    }
    VectorSet::from_flat(set.dim(), data)
}
