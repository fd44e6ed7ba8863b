//! Lattices, their points, content and visibility.
//!
//! Points are stored as integer coordinate vectors relative to the basis.
//! Content and visibility only depend on those coordinates; metric
//! questions (ball membership, lengths) go through the basis matrix.

use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numtheory::{crt, first_primes, gcd_u128, gcd_u64, unit_ball_volume};

/// Default bound on the number of points a single enumeration may visit.
pub const DEFAULT_POINT_CEILING: u128 = 1 << 32;

/// Number of slabs a region scan is split into. The partition does not
/// depend on the thread count, so reductions are reproducible.
pub const DEFAULT_SLABS: usize = 64;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// A full-rank lattice in `R^n`, given by the columns of its basis matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det_abs: f64,
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        if n == 0 || n != basis.ncols() {
            return Err(Error::Argument(format!(
                "basis must be square, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if n > MAX_DIM {
            return Err(Error::Dimension(n));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("basis has non-finite entries".into()));
        }
        let det_abs = basis.determinant().abs();
        let scale: f64 = basis.column_iter().map(|c| c.norm()).product();
        if det_abs == 0.0 || det_abs <= 1e-12 * scale {
            return Err(Error::Argument("basis is singular".into()));
        }
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Argument("basis is singular".into()))?;
        Ok(Self {
            basis,
            inverse,
            det_abs,
        })
    }

    /// Lattice whose basis vectors are the given columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Argument("need n basis vectors of length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| columns[j][i]))
    }

    /// The integer lattice `Z^n`.
    pub fn integer(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    /// `Z^n` scaled by `r`, i.e. `r Z^n`.
    pub fn scaled_integer(n: usize, r: f64) -> Result<Self> {
        Self::new(DMatrix::identity(n, n) * r)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    /// Volume of a fundamental cell.
    pub fn volume(&self) -> f64 {
        self.det_abs
    }

    /// Points per unit volume.
    pub fn density(&self) -> f64 {
        1.0 / self.det_abs
    }

    /// Reciprocal lattice: basis is the inverse transpose.
    pub fn dual(&self) -> Lattice {
        let basis = self.inverse.transpose();
        let inverse = self.basis.transpose();
        Lattice {
            basis,
            inverse,
            det_abs: 1.0 / self.det_abs,
        }
    }

    /// Image of the lattice under the linear map `t`.
    pub fn transformed(&self, t: &DMatrix<f64>) -> Result<Lattice> {
        if t.nrows() != self.dim() || t.ncols() != self.dim() {
            return Err(Error::Argument("transform has wrong shape".into()));
        }
        Lattice::new(t * &self.basis)
    }

    /// Position `B x` of a coordinate vector.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        assert_eq!(coords.len(), self.dim());
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.basis[(i, j)] * coords[j] as f64).sum())
            .collect()
    }

    pub fn norm(&self, coords: &[i64]) -> f64 {
        self.point(coords).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Diameter of the half-open fundamental parallelepiped.
    pub fn cell_diameter(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for signs in 0u32..(1 << n) {
            let len2: f64 = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let s = if signs >> j & 1 == 1 { 1.0 } else { -1.0 };
                            s * self.basis[(i, j)]
                        })
                        .sum::<f64>()
                        .powi(2)
                })
                .sum();
            best = best.max(len2);
        }
        best.sqrt()
    }

    /// Length of a shortest nonzero vector, by exhaustive search in the
    /// ball whose radius is the shortest basis vector.
    pub fn shortest_vector_length(&self) -> f64 {
        let bound = self
            .basis
            .column_iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min);
        let origin = vec![0.0; self.dim()];
        let region = Region::ball(origin, bound * (1.0 + 1e-9));
        let scan = RegionScan::new(self, &region).expect("small ball");
        let mut best = bound;
        scan.for_each(|c, y| {
            if c.iter().any(|&v| v != 0) {
                best = best.min(y.iter().map(|v| v * v).sum::<f64>().sqrt());
            }
        });
        best
    }

    /// Constants `(c1, c2)` with `|N(R) vol - v_n R^n| <= c1 R^(n-1) + c2`
    /// for any translate of the lattice.
    pub fn counting_constants(&self) -> (f64, f64) {
        let n = self.dim();
        let d = self.cell_diameter();
        let vn = unit_ball_volume(n);
        let two_n = 2f64.powi(n as i32);
        (two_n * vn * d, two_n * vn * d.powi(n as i32))
    }
}

/// Content of a lattice point: the largest `l` with `x` in `l Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Content {
    Finite(u64),
    /// The content of the origin.
    Infinite,
}

impl Content {
    pub fn finite(self) -> Option<u64> {
        match self {
            Content::Finite(v) => Some(v),
            Content::Infinite => None,
        }
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Content::Finite(v) => write!(f, "{v}"),
            Content::Infinite => f.write_str("inf"),
        }
    }
}

/// gcd of the coordinates, or [`Content::Infinite`] for the zero vector.
pub fn content_of(coords: &[i64]) -> Content {
    let g = coords
        .iter()
        .fold(0u64, |g, &c| gcd_u64(g, c.unsigned_abs()));
    if g == 0 {
        Content::Infinite
    } else {
        Content::Finite(g)
    }
}

/// [`content_of`] for wide coordinates; `None` stands for the origin.
pub fn content_of_wide(coords: &[i128]) -> Option<u128> {
    let g = coords
        .iter()
        .fold(0u128, |g, &c| gcd_u128(g, c.unsigned_abs()));
    (g != 0).then_some(g)
}

/// Integer coordinates of a lattice point relative to its basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn content(&self) -> Content {
        content_of(&self.0)
    }

    pub fn is_visible(&self) -> Result<bool> {
        is_visible(self)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

pub fn content(x: &LatticeVector) -> Content {
    x.content()
}

/// Whether `x` has content 1. The origin is rejected.
pub fn is_visible(x: &LatticeVector) -> Result<bool> {
    match x.content() {
        Content::Infinite => Err(Error::Domain(
            "visibility is undefined at the origin".into(),
        )),
        Content::Finite(c) => Ok(c == 1),
    }
}

/// Selects which lattice points an enumeration yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFilter {
    All,
    Visible,
    /// Points of content exactly `m`.
    Content(u64),
}

impl PointFilter {
    #[inline]
    pub fn accepts(self, coords: &[i64]) -> bool {
        match self {
            PointFilter::All => true,
            PointFilter::Visible => content_of(coords) == Content::Finite(1),
            PointFilter::Content(m) => content_of(coords) == Content::Finite(m),
        }
    }
}

/// A bounded region of `R^n`; all inequalities are strict.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// Points `y` with `|y - center| < radius`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Points `y` with `|y_i - center_i| < half_widths[i]` for every `i`.
    Box {
        center: Vec<f64>,
        half_widths: Vec<f64>,
    },
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    pub fn origin_ball(n: usize, radius: f64) -> Self {
        Region::Ball {
            center: vec![0.0; n],
            radius,
        }
    }

    pub fn cube(center: Vec<f64>, half_width: f64) -> Self {
        let n = center.len();
        Region::Box {
            center,
            half_widths: vec![half_width; n],
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            Region::Ball { center, .. } | Region::Box { center, .. } => center,
        }
    }

    pub fn dim(&self) -> usize {
        self.center().len()
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Ball { center, radius } => {
                unit_ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
            Region::Box { half_widths, .. } => half_widths.iter().map(|h| 2.0 * h).product(),
        }
    }

    /// Supremum of `|y|` over the region.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Region::Ball { center, radius } => {
                center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius
            }
            Region::Box {
                center,
                half_widths,
            } => center
                .iter()
                .zip(half_widths)
                .map(|(c, h)| (c.abs() + h).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Radius of the largest ball inside the region.
    pub fn inradius(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => *radius,
            Region::Box { half_widths, .. } => {
                half_widths.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => {
                y.iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    < radius * radius
            }
            Region::Box {
                center,
                half_widths,
            } => y
                .iter()
                .zip(center)
                .zip(half_widths)
                .all(|((a, c), h)| (a - c).abs() < *h),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite_center = self.center().iter().all(|c| c.is_finite());
        if !finite_center {
            return Err(Error::Argument("region center is not finite".into()));
        }
        match self {
            Region::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Argument(format!("radius {radius} must be positive")));
                }
            }
            Region::Box {
                center,
                half_widths,
            } => {
                if half_widths.len() != center.len() {
                    return Err(Error::Argument("box half-widths have wrong length".into()));
                }
                if half_widths.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                    return Err(Error::Argument("box half-widths must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Enumerates the lattice points inside a [`Region`].
///
/// Coordinates range over the bounding box of the region pulled back
/// through the inverse basis; the last coordinate is narrowed analytically
/// and every candidate is then tested against the region exactly. Points
/// are visited in lexicographic order of their coordinates.
#[derive(Debug, Clone)]
pub struct RegionScan<'a> {
    lattice: &'a Lattice,
    region: &'a Region,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl<'a> RegionScan<'a> {
    pub fn new(lattice: &'a Lattice, region: &'a Region) -> Result<Self> {
        Self::with_ceiling(lattice, region, DEFAULT_POINT_CEILING)
    }

    pub fn with_ceiling(lattice: &'a Lattice, region: &'a Region, ceiling: u128) -> Result<Self> {
        let n = lattice.dim();
        if region.dim() != n {
            return Err(Error::Argument(format!(
                "region has dimension {}, lattice has {n}",
                region.dim()
            )));
        }
        region.validate()?;

        // upper bound on the count: every point's cell lies within the
        // circumscribed ball grown by one cell diameter
        let outer = (region.sup_norm_about_center() + lattice.cell_diameter()).powi(n as i32)
            * unit_ball_volume(n)
            / lattice.det_abs();
        if outer.is_nan() || outer >= ceiling as f64 {
            return Err(Error::Size {
                what: "lattice points in region",
                requested: if outer.is_finite() {
                    outer as u128
                } else {
                    u128::MAX
                },
                ceiling,
            });
        }

        let inv = lattice.basis_inverse();
        let center = region.center();
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let mid: f64 = (0..n).map(|j| inv[(i, j)] * center[j]).sum();
            let extent = match region {
                Region::Ball { radius, .. } => {
                    radius * (0..n).map(|j| inv[(i, j)].powi(2)).sum::<f64>().sqrt()
                }
                Region::Box { half_widths, .. } => {
                    (0..n).map(|j| inv[(i, j)].abs() * half_widths[j]).sum()
                }
            };
            let a = (mid - extent).floor() - 1.0;
            let b = (mid + extent).ceil() + 1.0;
            if a < i64::MIN as f64 / 2.0 || b > i64::MAX as f64 / 2.0 {
                return Err(Error::Overflow("coordinate range exceeds 64 bits".into()));
            }
            lo.push(a as i64);
            hi.push(b as i64);
        }
        Ok(Self {
            lattice,
            region,
            lo,
            hi,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }

    pub fn region(&self) -> &Region {
        self.region
    }

    /// Visits every point as `(coords, position)`.
    pub fn for_each(&self, mut visit: impl FnMut(&[i64], &[f64])) {
        self.walk_outer(self.lo[0], self.hi[0], &mut visit);
    }

    /// Splits the first coordinate into `slabs` contiguous ranges, folds each
    /// range independently (in parallel) and returns the per-slab results in
    /// slab order.
    pub fn fold_slabs<T, I, V>(&self, slabs: usize, init: I, visit: V) -> Vec<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &[i64], &[f64]) + Sync,
    {
        let ranges = self.slab_ranges(slabs.max(1));
        ranges
            .into_par_iter()
            .map(|(a, b)| {
                let mut acc = init();
                if a <= b {
                    self.walk_outer(a, b, &mut |c: &[i64], y: &[f64]| visit(&mut acc, c, y));
                }
                acc
            })
            .collect()
    }

    fn slab_ranges(&self, slabs: usize) -> Vec<(i64, i64)> {
        let (lo, hi) = (self.lo[0] as i128, self.hi[0] as i128);
        let len = hi - lo + 1;
        let slabs = slabs as i128;
        (0..slabs)
            .map(|s| {
                let a = lo + len * s / slabs;
                let b = lo + len * (s + 1) / slabs - 1;
                (a as i64, b as i64)
            })
            .collect()
    }

    fn walk_outer(&self, first_lo: i64, first_hi: i64, visit: &mut dyn FnMut(&[i64], &[f64])) {
        let n = self.lattice.dim();
        let mut coords = vec![0i64; n];
        // partial positions, one row per level
        let mut partial = vec![0.0f64; n * (n + 1)];
        self.walk(0, first_lo, first_hi, &mut coords, &mut partial, visit);
    }

    fn walk(
        &self,
        level: usize,
        lo: i64,
        hi: i64,
        coords: &mut [i64],
        partial: &mut [f64],
        visit: &mut dyn FnMut(&[i64], &[f64]),
    ) {
        let n = coords.len();
        let basis = self.lattice.basis();
        if level + 1 == n {
            let (head, tail) = partial.split_at_mut((level + 1) * n);
            let base = &head[level * n..];
            let pos = &mut tail[..n];
            let Some((a, b)) = self.last_range(base) else {
                return;
            };
            for t in a.max(lo)..=b.min(hi) {
                for i in 0..n {
                    pos[i] = base[i] + basis[(i, level)] * t as f64;
                }
                if self.region.contains(pos) {
                    coords[level] = t;
                    visit(coords, pos);
                }
            }
            return;
        }
        for t in lo..=hi {
            coords[level] = t;
            let (head, tail) = partial.split_at_mut((level + 1) * n);
            let base = &head[level * n..];
            let next = &mut tail[..n];
            for i in 0..n {
                next[i] = base[i] + basis[(i, level)] * t as f64;
            }
            self.walk(
                level + 1,
                self.lo[level + 1],
                self.hi[level + 1],
                coords,
                partial,
                visit,
            );
        }
    }

    /// Range of the last coordinate `t` for which `base + t b_last` can lie
    /// in the region, widened by one on each side.
    fn last_range(&self, base: &[f64]) -> Option<(i64, i64)> {
        let n = base.len();
        let basis = self.lattice.basis();
        let col = |i: usize| basis[(i, n - 1)];
        match self.region {
            Region::Ball { center, radius } => {
                let mut qa = 0.0;
                let mut qb = 0.0;
                let mut qc = -radius * radius;
                for i in 0..n {
                    let d = base[i] - center[i];
                    qa += col(i) * col(i);
                    qb += 2.0 * d * col(i);
                    qc += d * d;
                }
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    // allow for rounding on tangent rows
                    if disc < -1e-9 * (qb * qb).max(1.0) {
                        return None;
                    }
                }
                let root = disc.max(0.0).sqrt();
                let t0 = (-qb - root) / (2.0 * qa);
                let t1 = (-qb + root) / (2.0 * qa);
                Some((t0.floor() as i64 - 1, t1.ceil() as i64 + 1))
            }
            Region::Box {
                center,
                half_widths,
            } => {
                let mut t0 = f64::NEG_INFINITY;
                let mut t1 = f64::INFINITY;
                for i in 0..n {
                    let d = base[i] - center[i];
                    let b = col(i);
                    if b == 0.0 {
                        if d.abs() >= half_widths[i] {
                            return None;
                        }
                        continue;
                    }
                    let (u, v) = ((-half_widths[i] - d) / b, (half_widths[i] - d) / b);
                    t0 = t0.max(u.min(v));
                    t1 = t1.min(u.max(v));
                }
                if t0 > t1 + 2.0 {
                    return None;
                }
                Some((t0.floor() as i64 - 1, t1.ceil() as i64 + 1))
            }
        }
    }
}

impl Region {
    fn sup_norm_about_center(&self) -> f64 {
        match self {
            Region::Ball { radius, .. } => *radius,
            Region::Box { half_widths, .. } => {
                half_widths.iter().map(|h| h * h).sum::<f64>().sqrt()
            }
        }
    }
}

/// Lattice points `x` with `|B x - center| < radius` passing `filter`, in
/// lexicographic order.
pub fn enumerate_ball(
    lattice: &Lattice,
    center: &[f64],
    radius: f64,
    filter: PointFilter,
) -> Result<Vec<LatticeVector>> {
    let region = Region::ball(center.to_vec(), radius);
    enumerate_region(lattice, &region, filter)
}

pub fn enumerate_region(
    lattice: &Lattice,
    region: &Region,
    filter: PointFilter,
) -> Result<Vec<LatticeVector>> {
    let scan = RegionScan::new(lattice, region)?;
    let mut out = Vec::new();
    scan.for_each(|c, _| {
        if filter.accepts(c) {
            out.push(LatticeVector(c.to_vec()));
        }
    });
    Ok(out)
}

/// Number of points passing `filter` in the region, counted slab-parallel.
pub fn count_region(lattice: &Lattice, region: &Region, filter: PointFilter) -> Result<u64> {
    let scan = RegionScan::new(lattice, region)?;
    Ok(scan
        .fold_slabs(
            DEFAULT_SLABS,
            || 0u64,
            |n, c, _| {
                if filter.accepts(c) {
                    *n += 1;
                }
            },
        )
        .into_iter()
        .sum())
}

/// Solves `a = residues[j] (mod moduli[j] Z^n)` componentwise.
///
/// Returns the representative with `0 <= a_i < prod moduli`.
pub fn crt_lattice(residues: &[Vec<i64>], moduli: &[u64]) -> Result<Vec<i128>> {
    if residues.len() != moduli.len() || residues.is_empty() {
        return Err(Error::Argument(format!(
            "{} residues for {} moduli",
            residues.len(),
            moduli.len()
        )));
    }
    let n = residues[0].len();
    if residues.iter().any(|r| r.len() != n) {
        return Err(Error::Argument("residue vectors differ in length".into()));
    }
    let wide: Vec<u128> = moduli.iter().map(|&m| m as u128).collect();
    (0..n)
        .map(|i| {
            let rs: Vec<i128> = residues.iter().map(|r| r[i] as i128).collect();
            crt(&rs, &wide).map(|(x, _)| x as i128)
        })
        .collect()
}

/// Translation `t` moving every point of `config` off the visible set.
///
/// `t` is chosen with `c_j + t = 0 (mod moduli[j])` for each configuration
/// point, so every translate has content divisible by its modulus. The
/// moduli default to the first `config.len()` primes. If a translate would
/// land on the origin, `t` is shifted by the product of the moduli along the
/// first axis.
pub fn find_hole(
    lattice: &Lattice,
    config: &[LatticeVector],
    moduli: Option<&[u64]>,
) -> Result<Vec<i128>> {
    if config.is_empty() {
        return Err(Error::Argument("empty configuration".into()));
    }
    let n = lattice.dim();
    if config.iter().any(|c| c.dim() != n) {
        return Err(Error::Argument(
            "configuration point has wrong dimension".into(),
        ));
    }
    let moduli: Vec<u64> = match moduli {
        Some(m) => m.to_vec(),
        None => first_primes(config.len()),
    };
    if moduli.len() != config.len() {
        return Err(Error::Argument(format!(
            "{} moduli for {} configuration points",
            moduli.len(),
            config.len()
        )));
    }
    let wide: Vec<u128> = moduli.iter().map(|&m| m as u128).collect();
    let mut product: u128 = 1;
    for &m in &wide {
        let next = product.saturating_mul(m);
        if next >= 1 << 127 {
            return Err(Error::Size {
                what: "product of hole moduli",
                requested: next,
                ceiling: 1 << 127,
            });
        }
        product = next;
    }
    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let rs: Vec<i128> = config.iter().map(|c| -(c.0[i] as i128)).collect();
        let (x, m) = crt(&rs, &wide)?;
        t.push(x as i128);
        debug_assert_eq!(m, product);
    }
    let translate = |t: &[i128], c: &LatticeVector| -> Vec<i128> {
        t.iter().zip(&c.0).map(|(a, &b)| a + b as i128).collect()
    };
    if config
        .iter()
        .any(|c| content_of_wide(&translate(&t, c)).is_none())
    {
        let shift = i128::try_from(product)
            .ok()
            .and_then(|p| t[0].checked_add(p))
            .ok_or_else(|| Error::Overflow("hole translation exceeds 128 bits".into()))?;
        t[0] = shift;
    }
    for c in config {
        let content = content_of_wide(&translate(&t, c));
        assert!(
            matches!(content, Some(g) if g != 1),
            "hole construction left a visible point"
        );
    }
    Ok(t)
}

/// Visible `v1, v2` with `v1 - v2 = x`; needs `n >= 2`.
pub fn visible_difference_witness(
    lattice: &Lattice,
    x: &LatticeVector,
) -> Result<(LatticeVector, LatticeVector)> {
    let n = lattice.dim();
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if x.dim() != n {
        return Err(Error::Argument("vector has wrong dimension".into()));
    }
    let c = &x.0;
    let mut v1 = c.clone();
    v1[0] = c[0]
        .checked_add(1)
        .ok_or_else(|| Error::Overflow("coordinate overflow".into()))?;
    v1[1] = 1;
    let mut v2 = vec![0i64; n];
    v2[0] = 1;
    v2[1] = 1i64
        .checked_sub(c[1])
        .ok_or_else(|| Error::Overflow("coordinate overflow".into()))?;
    Ok((LatticeVector(v1), LatticeVector(v2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn z2() -> Lattice {
        Lattice::integer(2).unwrap()
    }

    #[test]
    fn content_examples() {
        assert_eq!(content_of(&[4, 6]), Content::Finite(2));
        assert_eq!(content_of(&[3, 5]), Content::Finite(1));
        assert_eq!(content_of(&[0, 0]), Content::Infinite);
        assert_eq!(content_of(&[-4, 0, 10]), Content::Finite(2));
    }

    #[test]
    fn visibility_examples() {
        assert!(is_visible(&LatticeVector::new(vec![2, 3])).unwrap());
        assert!(!is_visible(&LatticeVector::new(vec![2, 4])).unwrap());
        assert!(is_visible(&LatticeVector::new(vec![1, 0, 0, 0])).unwrap());
        assert!(matches!(
            is_visible(&LatticeVector::zero(2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn small_ball() {
        let all = enumerate_ball(&z2(), &[0.0, 0.0], 1.5, PointFilter::All).unwrap();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].0, vec![-1, -1]);
        assert_eq!(all[8].0, vec![1, 1]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let vis = enumerate_ball(&z2(), &[0.0, 0.0], 1.5, PointFilter::Visible).unwrap();
        assert_eq!(vis.len(), 8);
        assert!(!vis.contains(&LatticeVector::zero(2)));
    }

    #[test]
    fn boundary_is_excluded() {
        // (3,4) and its images sit exactly on the circle of radius 5
        let pts = enumerate_ball(&z2(), &[0.0, 0.0], 5.0, PointFilter::All).unwrap();
        assert!(!pts.contains(&LatticeVector::new(vec![3, 4])));
        assert!(!pts.contains(&LatticeVector::new(vec![0, 5])));
        assert!(pts.contains(&LatticeVector::new(vec![4, 2])));
        let brute = (-5i64..=5)
            .flat_map(|a| (-5i64..=5).map(move |b| (a, b)))
            .filter(|(a, b)| a * a + b * b < 25)
            .count();
        assert_eq!(pts.len(), brute);
    }

    #[test]
    fn large_ball_count() {
        let n = count_region(&z2(), &Region::origin_ball(2, 1000.0), PointFilter::All).unwrap();
        let err = (n as f64 - std::f64::consts::PI * 1e6).abs();
        assert!(err <= 17.78e3 + 18.0, "N = {n}");
    }

    #[test]
    fn ceiling_is_enforced() {
        let region = Region::origin_ball(2, 1e6);
        assert!(matches!(
            RegionScan::with_ceiling(&z2(), &region, 1_000_000),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            RegionScan::new(&z2(), &Region::origin_ball(2, 0.0)),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn slabs_match_serial_scan() {
        let lat = Lattice::from_columns(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let region = Region::ball(vec![0.3, -2.1], 40.0);
        let scan = RegionScan::new(&lat, &region).unwrap();
        let mut serial = Vec::new();
        scan.for_each(|c, _| serial.push(c.to_vec()));
        let slabs: Vec<Vec<Vec<i64>>> = scan.fold_slabs(7, Vec::new, |v, c, _| v.push(c.to_vec()));
        assert_eq!(serial, slabs.concat());
        // brute force over a generous coordinate box
        let mut brute = Vec::new();
        for a in -80i64..=80 {
            for b in -80i64..=80 {
                if region.contains(&lat.point(&[a, b])) {
                    brute.push(vec![a, b]);
                }
            }
        }
        assert_eq!(serial, brute);
    }

    #[test]
    fn box_scan_matches_brute_force() {
        let lat = Lattice::from_columns(&[vec![1.0, 0.2], vec![-0.7, 1.3]]).unwrap();
        let region = Region::Box {
            center: vec![1.5, -0.5],
            half_widths: vec![9.0, 4.5],
        };
        let got = enumerate_region(&lat, &region, PointFilter::All).unwrap();
        let mut brute = Vec::new();
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                if region.contains(&lat.point(&[a, b])) {
                    brute.push(LatticeVector::new(vec![a, b]));
                }
            }
        }
        assert_eq!(got, brute);
    }

    #[test]
    fn crt_lattice_examples() {
        assert_eq!(crt_lattice(&[vec![1], vec![2]], &[2, 3]).unwrap(), vec![5]);
        assert_eq!(crt_lattice(&[vec![0, 0]], &[7]).unwrap(), vec![0, 0]);
        let brute = (0..6)
            .flat_map(|a| (0..6).map(move |b| (a, b)))
            .find(|&(a, b)| a % 2 == 1 && b % 2 == 0 && a % 3 == 0 && b % 3 == 1)
            .unwrap();
        assert_eq!(brute, (3, 4));
        assert_eq!(
            crt_lattice(&[vec![1, 0], vec![0, 1]], &[2, 3]).unwrap(),
            vec![3, 4]
        );
        assert!(matches!(
            crt_lattice(&[vec![1], vec![2]], &[4, 6]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn hole_examples() {
        let t = find_hole(&z2(), &[LatticeVector::zero(2)], Some(&[2])).unwrap();
        assert!(t.iter().all(|v| v % 2 == 0));
        assert!(content_of_wide(&t).is_some_and(|g| g != 1));

        let config = vec![
            LatticeVector::new(vec![0, 0]),
            LatticeVector::new(vec![1, 0]),
        ];
        assert_eq!(
            find_hole(&z2(), &config, Some(&[2, 3])).unwrap(),
            vec![2, 0]
        );

        let block: Vec<LatticeVector> = (0..3)
            .flat_map(|a| (0..3).map(move |b| LatticeVector::new(vec![a, b])))
            .collect();
        let t = find_hole(&z2(), &block, None).unwrap();
        assert!(t.iter().all(|&v| (0..223_092_870).contains(&v)));
        for c in &block {
            let moved = [t[0] + c.0[0] as i128, t[1] + c.0[1] as i128];
            assert_ne!(content_of_wide(&moved), Some(1));
        }
    }

    #[test]
    fn hole_errors() {
        assert!(find_hole(&z2(), &[], None).is_err());
        let config = vec![LatticeVector::zero(2), LatticeVector::new(vec![1, 1])];
        assert!(find_hole(&z2(), &config, Some(&[2, 4])).is_err());
        let many: Vec<LatticeVector> = (0..40).map(|i| LatticeVector::new(vec![i, 0])).collect();
        assert!(matches!(
            find_hole(&z2(), &many, None),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn duals() {
        let d = z2().dual();
        assert_relative_eq!(d.basis(), z2().basis());
        let lat = Lattice::from_columns(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let d = lat.dual();
        assert_relative_eq!(d.basis()[(0, 0)], 0.5);
        assert_relative_eq!(d.basis()[(1, 1)], 1.0);
        assert_relative_eq!(d.density(), lat.det_abs());

        let hex = Lattice::from_columns(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let hd = hex.dual();
        assert_relative_eq!(hd.density(), 3f64.sqrt() / 2.0, epsilon = 1e-12);
        // b_i . b*_j = delta_ij
        let gram = hex.basis().transpose() * hd.basis();
        assert_relative_eq!(gram, DMatrix::identity(2, 2), epsilon = 1e-12);
        let back = hd.dual();
        assert_relative_eq!(back.basis(), hex.basis(), max_relative = 1e-12);
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(Lattice::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        assert!(Lattice::from_columns(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn witness_examples() {
        let (a, b) = visible_difference_witness(&z2(), &LatticeVector::zero(2)).unwrap();
        assert_eq!((a.0, b.0), (vec![1, 1], vec![1, 1]));
        let (a, b) = visible_difference_witness(&z2(), &LatticeVector::new(vec![4, 6])).unwrap();
        assert_eq!((a.0, b.0), (vec![5, 1], vec![1, -5]));
        let z3 = Lattice::integer(3).unwrap();
        let (a, b) = visible_difference_witness(&z3, &LatticeVector::new(vec![2, 0, 0])).unwrap();
        assert_eq!((a.0, b.0), (vec![3, 1, 0], vec![1, 1, 0]));
        let z1 = Lattice::integer(1).unwrap();
        assert_eq!(
            visible_difference_witness(&z1, &LatticeVector::new(vec![3])),
            Err(Error::Dimension(1))
        );
    }

    #[test]
    fn shortest_vectors() {
        assert_relative_eq!(z2().shortest_vector_length(), 1.0);
        // skewed basis of Z^2
        let skew = Lattice::from_columns(&[vec![1.0, 0.0], vec![7.0, 1.0]]).unwrap();
        assert_relative_eq!(skew.shortest_vector_length(), 1.0);
        let hex = Lattice::from_columns(&[vec![2.0, 0.0], vec![1.0, 3f64.sqrt()]]).unwrap();
        assert_relative_eq!(hex.shortest_vector_length(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn content_filter_is_scaled_visible_set() {
        let region = Region::origin_ball(2, 100.0);
        for m in 1..=3u64 {
            let direct = count_region(&z2(), &region, PointFilter::Content(m)).unwrap();
            let scaled = count_region(
                &z2(),
                &Region::origin_ball(2, 100.0 / m as f64),
                PointFilter::Visible,
            )
            .unwrap();
            assert_eq!(direct, scaled, "m = {m}");
        }
    }
}
