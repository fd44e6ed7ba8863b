//! Empirical estimators and their closed-form counterparts.
//!
//! Every estimator is a volume-normalized count or exponential sum over a
//! finite region. Counts are merged exactly; complex sums are accumulated
//! with compensated summation per slab and merged in slab order, so the
//! result does not depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kfree::{kfree_mask, KFreeSpec};
use crate::lattice::{
    content_of, Content, Lattice, LatticeVector, PointFilter, RegionScan, DEFAULT_SLABS,
};
use crate::numtheory::{factorize, series_constant, unit_ball_volume, SeriesKind};

pub use crate::lattice::Region;

/// Multiplier applied to the leading error order to form `error_bound`.
pub const ERROR_CONSTANT: f64 = 10.0;

/// The point sets the estimators understand.
#[derive(Debug, Clone, Copy)]
pub enum PointSet<'a> {
    /// Visible points of a lattice.
    Visible(&'a Lattice),
    /// All points of a lattice.
    Lattice(&'a Lattice),
    /// k-th-power-free integers.
    KFree(u32),
}

impl PointSet<'_> {
    pub fn dim(&self) -> usize {
        match self {
            PointSet::Visible(l) | PointSet::Lattice(l) => l.dim(),
            PointSet::KFree(_) => 1,
        }
    }

    fn filter(&self) -> PointFilter {
        match self {
            PointSet::Visible(_) => PointFilter::Visible,
            _ => PointFilter::All,
        }
    }
}

/// A point count over a region, normalized by the region's volume.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub count: u64,
    pub region: Region,
    /// Volume of the region.
    pub normalizer: f64,
    pub density: f64,
    /// Closed-form density of the set.
    pub theory: f64,
    /// Leading error order of the density estimate, times [`ERROR_CONSTANT`].
    pub error_bound: f64,
    /// Supremum of `|y|` over the region.
    pub sup_norm: f64,
}

impl DensityEstimate {
    pub fn abs_error(&self) -> f64 {
        (self.density - self.theory).abs()
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub count: u64,
    pub estimate: f64,
    pub theory: f64,
    pub abs_error: f64,
}

impl From<&DensityEstimate> for ConvergenceRow {
    fn from(d: &DensityEstimate) -> Self {
        ConvergenceRow {
            radius: d.region.inradius(),
            count: d.count,
            estimate: d.density,
            theory: d.theory,
            abs_error: d.abs_error(),
        }
    }
}

/// Density of the visible points: `dens(Gamma) / zeta(n)`, and 0 in one
/// dimension.
pub fn theoretical_density_visible(lattice: &Lattice) -> f64 {
    match lattice.dim() {
        1 => 0.0,
        n => lattice.density() * series_constant(SeriesKind::InvZeta, n as u32),
    }
}

fn visible_error_order(n: usize, r: f64) -> f64 {
    if n == 2 {
        r.max(std::f64::consts::E).ln() / r
    } else {
        1.0 / r
    }
}

/// Density of the visible points of `lattice` in `region`.
pub fn density_visible(lattice: &Lattice, region: &Region) -> Result<DensityEstimate> {
    let normalizer = region.volume();
    if normalizer.is_nan() || normalizer <= 0.0 {
        return Err(Error::Argument("region has zero volume".into()));
    }
    let scan = RegionScan::new(lattice, region)?;
    let count: u64 = scan
        .fold_slabs(
            DEFAULT_SLABS,
            || 0u64,
            |n, c, _| {
                if content_of(c) == Content::Finite(1) {
                    *n += 1;
                }
            },
        )
        .into_iter()
        .sum();
    Ok(DensityEstimate {
        count,
        region: region.clone(),
        normalizer,
        density: count as f64 / normalizer,
        theory: theoretical_density_visible(lattice),
        error_bound: ERROR_CONSTANT * visible_error_order(lattice.dim(), region.inradius()),
        sup_norm: region.sup_norm(),
    })
}

/// Visible-point densities in concentric balls, from one pass over the
/// largest ball.
pub fn density_visible_schedule(
    lattice: &Lattice,
    center: &[f64],
    radii: &[f64],
) -> Result<Vec<DensityEstimate>> {
    let radii = sorted_radii(radii)?;
    let largest = Region::ball(center.to_vec(), *radii.last().unwrap());
    let scan = RegionScan::new(lattice, &largest)?;
    let sq: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let buckets = scan.fold_slabs(
        DEFAULT_SLABS,
        || vec![0u64; sq.len()],
        |b, c, y| {
            if content_of(c) == Content::Finite(1) {
                let d2: f64 = y.iter().zip(center).map(|(a, o)| (a - o) * (a - o)).sum();
                let i = sq.partition_point(|&r2| r2 <= d2);
                b[i] += 1;
            }
        },
    );
    let counts = cumulative(&buckets, sq.len());
    let theory = theoretical_density_visible(lattice);
    Ok(radii
        .iter()
        .zip(counts)
        .map(|(&r, count)| {
            let region = Region::ball(center.to_vec(), r);
            let normalizer = region.volume();
            DensityEstimate {
                count,
                normalizer,
                density: count as f64 / normalizer,
                theory,
                error_bound: ERROR_CONSTANT * visible_error_order(lattice.dim(), r),
                sup_norm: region.sup_norm(),
                region,
            }
        })
        .collect())
}

fn sorted_radii(radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() {
        return Err(Error::Argument("empty radius schedule".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Argument("radii must be positive".into()));
    }
    let mut out = radii.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn cumulative(buckets: &[Vec<u64>], len: usize) -> Vec<u64> {
    let mut totals = vec![0u64; len];
    for b in buckets {
        for (t, v) in totals.iter_mut().zip(b) {
            *t += v;
        }
    }
    let mut run = 0;
    totals
        .iter()
        .map(|v| {
            run += v;
            run
        })
        .collect()
}

/// Largest integer strictly below `r`.
fn below(r: f64) -> i64 {
    r.ceil() as i64 - 1
}

/// Density of the k-free integers in `(-R, R)`, normalized by `2R`.
pub fn density_kfree(k: u32, radius: f64) -> Result<DensityEstimate> {
    Ok(density_kfree_schedule(k, &[radius])?.remove(0))
}

pub fn density_kfree_schedule(k: u32, radii: &[f64]) -> Result<Vec<DensityEstimate>> {
    KFreeSpec::new(k)?;
    let radii = sorted_radii(radii)?;
    if radii[0] < 1.0 {
        return Err(Error::Argument("radius must be at least 1".into()));
    }
    let top = below(*radii.last().unwrap());
    let mask = kfree_mask(1, top.max(1), k)?;
    let theory = series_constant(SeriesKind::InvZeta, k);
    Ok(radii
        .iter()
        .map(|&r| {
            let m = below(r) as usize;
            let positive = mask[..m].iter().filter(|&&b| b).count() as u64;
            let count = 2 * positive;
            let region = Region::origin_ball(1, r);
            DensityEstimate {
                count,
                normalizer: 2.0 * r,
                density: count as f64 / (2.0 * r),
                theory,
                error_bound: ERROR_CONSTANT * r.powf(-1.0 + 1.0 / k as f64),
                sup_norm: r,
                region,
            }
        })
        .collect())
}

/// Which pairs the autocorrelation count admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AutocorrMode {
    /// Both `x` and `x - a` lie in the ball.
    #[default]
    TwoSided,
    /// Only `x` is required to lie in the ball.
    OneSided,
}

/// Empirical autocorrelation weight at a shift, with its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrEstimate {
    /// Shift in lattice coordinates (one entry for integer sets).
    pub shift: Vec<i64>,
    pub radius: f64,
    pub count: u64,
    pub w_r: f64,
    pub w_theory: f64,
    pub abs_error: f64,
}

/// Closed-form autocorrelation weight of the visible points at `a != 0`:
/// `dens(Gamma) xi(n) prod_{p | cont(a)} (1 + 1/(p^n - 2))`.
pub fn theoretical_weight_visible(lattice: &Lattice, a: &LatticeVector) -> Result<f64> {
    let n = lattice.dim();
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if a.dim() != n {
        return Err(Error::Argument("shift has wrong dimension".into()));
    }
    let Content::Finite(c) = a.content() else {
        return Err(Error::Domain(
            "weight at the origin is the density of the set".into(),
        ));
    };
    let product: f64 = factorize(c as u128)
        .iter()
        .map(|&(p, _)| 1.0 + 1.0 / ((p as f64).powi(n as i32) - 2.0))
        .product();
    Ok(lattice.density() * series_constant(SeriesKind::Xi, n as u32) * product)
}

/// Closed-form autocorrelation weight of the k-free integers at `a != 0`:
/// `xi(k) prod_{p^k | a} (1 + 1/(p^k - 2))`.
pub fn theoretical_weight_kfree(k: u32, a: i64) -> Result<f64> {
    KFreeSpec::new(k)?;
    if a == 0 {
        return Err(Error::Domain(
            "weight at 0 is the density of the set".into(),
        ));
    }
    let product: f64 = factorize(a.unsigned_abs() as u128)
        .iter()
        .filter(|&&(_, e)| e >= k)
        .map(|&(p, _)| 1.0 + 1.0 / ((p as f64).powi(k as i32) - 2.0))
        .product();
    Ok(series_constant(SeriesKind::Xi, k) * product)
}

/// Autocorrelation estimate `w_R(a)` for a point set.
///
/// For lattice sets `shift` holds lattice coordinates; for k-free integers it
/// holds a single integer.
pub fn empirical_autocorr(
    set: &PointSet,
    shift: &[i64],
    radius: f64,
    mode: AutocorrMode,
) -> Result<AutocorrEstimate> {
    Ok(autocorr_schedule(set, shift, &[radius], mode)?.remove(0))
}

/// [`empirical_autocorr`] for several radii from one pass.
pub fn autocorr_schedule(
    set: &PointSet,
    shift: &[i64],
    radii: &[f64],
    mode: AutocorrMode,
) -> Result<Vec<AutocorrEstimate>> {
    if shift.len() != set.dim() {
        return Err(Error::Argument(format!(
            "shift has dimension {}, set has {}",
            shift.len(),
            set.dim()
        )));
    }
    let radii = sorted_radii(radii)?;
    match set {
        PointSet::Visible(lat) | PointSet::Lattice(lat) => {
            lattice_autocorr(lat, set.filter(), shift, &radii, mode)
        }
        PointSet::KFree(k) => kfree_autocorr(*k, shift[0], &radii, mode),
    }
}

fn shift_theory(lat: &Lattice, filter: PointFilter, a: &LatticeVector) -> Result<f64> {
    match filter {
        PointFilter::Visible if a.is_zero() => Ok(theoretical_density_visible(lat)),
        PointFilter::Visible => theoretical_weight_visible(lat, a),
        _ => Ok(lat.density()),
    }
}

fn lattice_autocorr(
    lat: &Lattice,
    filter: PointFilter,
    shift: &[i64],
    radii: &[f64],
    mode: AutocorrMode,
) -> Result<Vec<AutocorrEstimate>> {
    let n = lat.dim();
    let a = LatticeVector::new(shift.to_vec());
    let offset = lat.point(shift);
    let len = offset.iter().map(|v| v * v).sum::<f64>().sqrt();
    if radii[0] <= len {
        return Err(Error::Argument(format!(
            "radius {} must exceed |a| = {len}",
            radii[0]
        )));
    }
    let theory = shift_theory(lat, filter, &a)?;
    let largest = Region::origin_ball(n, *radii.last().unwrap());
    let scan = RegionScan::new(lat, &largest)?;
    let sq: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let buckets = scan.fold_slabs(
        DEFAULT_SLABS,
        || (vec![0u64; sq.len()], vec![0i64; n]),
        |(b, moved), c, y| {
            if !filter.accepts(c) {
                return;
            }
            for i in 0..n {
                moved[i] = c[i] - shift[i];
            }
            if !filter.accepts(moved) {
                return;
            }
            let d2: f64 = y.iter().map(|v| v * v).sum();
            let key = match mode {
                AutocorrMode::TwoSided => {
                    let e2: f64 = y.iter().zip(&offset).map(|(v, o)| (v - o) * (v - o)).sum();
                    d2.max(e2)
                }
                AutocorrMode::OneSided => d2,
            };
            let i = sq.partition_point(|&r2| r2 <= key);
            if i < b.len() {
                b[i] += 1;
            }
        },
    );
    let buckets: Vec<Vec<u64>> = buckets.into_iter().map(|(b, _)| b).collect();
    let counts = cumulative(&buckets, sq.len());
    let vn = unit_ball_volume(n);
    Ok(radii
        .iter()
        .zip(counts)
        .map(|(&r, count)| {
            let w_r = count as f64 / (vn * r.powi(n as i32));
            AutocorrEstimate {
                shift: shift.to_vec(),
                radius: r,
                count,
                w_r,
                w_theory: theory,
                abs_error: (w_r - theory).abs(),
            }
        })
        .collect())
}

fn kfree_autocorr(
    k: u32,
    a: i64,
    radii: &[f64],
    mode: AutocorrMode,
) -> Result<Vec<AutocorrEstimate>> {
    KFreeSpec::new(k)?;
    if radii[0] <= a.unsigned_abs() as f64 {
        return Err(Error::Argument(format!(
            "radius {} must exceed |a| = {}",
            radii[0],
            a.unsigned_abs()
        )));
    }
    let theory = if a == 0 {
        series_constant(SeriesKind::InvZeta, k)
    } else {
        theoretical_weight_kfree(k, a)?
    };
    let top = below(*radii.last().unwrap());
    let lo = -top - a.abs();
    let hi = top + a.abs();
    let mask = kfree_mask(lo, hi, k)?;
    let at = |x: i64| mask[(x - lo) as usize];
    let mut counts = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = below(r);
        let (x_lo, x_hi) = match mode {
            // |x| < R and |x - a| < R
            AutocorrMode::TwoSided => ((-m).max(a - m), m.min(a + m)),
            AutocorrMode::OneSided => (-m, m),
        };
        let count = (x_lo..=x_hi).filter(|&x| at(x) && at(x - a)).count() as u64;
        counts.push(count);
    }
    Ok(radii
        .iter()
        .zip(counts)
        .map(|(&r, count)| {
            let w_r = count as f64 / (2.0 * r);
            AutocorrEstimate {
                shift: vec![a],
                radius: r,
                count,
                w_r,
                w_theory: theory,
                abs_error: (w_r - theory).abs(),
            }
        })
        .collect())
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexAccumulator {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexAccumulator {
    #[inline]
    fn add_phase(&mut self, turns: f64) {
        // exp(-2 pi i t), reduced to the nearest integer first
        let frac = turns - turns.round();
        let (s, c) = (-std::f64::consts::TAU * frac).sin_cos();
        self.re.add(c);
        self.im.add(s);
    }

    fn merge(parts: impl IntoIterator<Item = ComplexAccumulator>) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for p in parts {
            re.add(p.re.value());
            im.add(p.im.value());
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Fourier-Bohr estimate `(1/(v_n R^n)) sum_{y in S, |y| < R} exp(-2 pi i k.y)`.
///
/// `k` is a frequency in the ambient space; `|m|^2` estimates the Bragg
/// intensity at `k`.
pub fn fourier_bohr(set: &PointSet, k: &[f64], radius: f64) -> Result<Complex64> {
    if k.len() != set.dim() {
        return Err(Error::Argument(format!(
            "frequency has dimension {}, set has {}",
            k.len(),
            set.dim()
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Argument(format!("radius {radius} must be positive")));
    }
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("frequency is not finite".into()));
    }
    let n = set.dim();
    let norm = unit_ball_volume(n) * radius.powi(n as i32);
    let sum = match set {
        PointSet::Visible(lat) | PointSet::Lattice(lat) => {
            let filter = set.filter();
            let region = Region::origin_ball(n, radius);
            let scan = RegionScan::new(lat, &region)?;
            let parts = scan.fold_slabs(DEFAULT_SLABS, ComplexAccumulator::default, |acc, c, y| {
                if filter.accepts(c) {
                    let t: f64 = y.iter().zip(k).map(|(a, b)| a * b).sum();
                    acc.add_phase(t);
                }
            });
            ComplexAccumulator::merge(parts)
        }
        PointSet::KFree(kk) => {
            let top = below(radius);
            if top < 1 {
                Complex64::new(0.0, 0.0)
            } else {
                let mask = kfree_mask(-top, top, *kk)?;
                let freq = k[0];
                let chunk = mask.len().div_ceil(DEFAULT_SLABS);
                let parts: Vec<ComplexAccumulator> = mask
                    .par_chunks(chunk)
                    .enumerate()
                    .map(|(ci, part)| {
                        let mut acc = ComplexAccumulator::default();
                        let base = -top + (ci * chunk) as i64;
                        for (i, &free) in part.iter().enumerate() {
                            if free {
                                acc.add_phase(freq * (base + i as i64) as f64);
                            }
                        }
                        acc
                    })
                    .collect();
                ComplexAccumulator::merge(parts)
            }
        }
    };
    Ok(sum / norm)
}
