//! Bragg peaks of the visible points and of the k-free integers.
//!
//! Both spectra are pure point. For the visible points of a lattice in
//! dimension `n` the peaks sit on the points of the rational span of the
//! dual lattice whose denominator `q` is squarefree, with intensity
//! `dens^2 / zeta(n)^2 * prod_{p | q} (p^n - 1)^-2`. For the k-free
//! integers they sit on the rationals `a/q` with `q` (k+1)-free and have
//! intensity `zeta(k)^-2 * prod_{p | q} (p^k - 1)^-2`. Peaks are listed from
//! these closed forms; the numerical estimators in [`crate::stats`] only
//! serve as a cross-check.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kfree::is_kfree_abs;
use crate::lattice::Lattice;
use crate::numtheory::{factorize, gcd_u64, series_constant, SeriesKind};

/// Default bound on the number of candidate peaks an enumeration may test.
pub const DEFAULT_PEAK_CEILING: u128 = 50_000_000;

/// A point `(1/q) sum_i numerator_i b*_i` of the rational span of the dual
/// lattice, in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalDualPoint {
    numerator: Vec<i64>,
    q: u64,
}

impl RationalDualPoint {
    /// Reduces `numerator / q` to lowest terms.
    pub fn new(numerator: Vec<i64>, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("denominator must be positive".into()));
        }
        if numerator.is_empty() {
            return Err(Error::Argument("empty numerator".into()));
        }
        let g = numerator
            .iter()
            .fold(q, |g, &c| gcd_u64(g, c.unsigned_abs()));
        Ok(Self {
            numerator: numerator.iter().map(|&c| c / g as i64).collect(),
            q: q / g,
        })
    }

    pub fn numerator(&self) -> &[i64] {
        &self.numerator
    }

    /// The denominator: smallest `q >= 1` with `q x` in the dual lattice.
    pub fn den(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.numerator.len()
    }

    /// Position in the ambient space, given the original (not dual) lattice.
    pub fn position(&self, lattice: &Lattice) -> Vec<f64> {
        let dual = lattice.dual();
        let n = self.dim();
        let b = dual.basis();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| b[(i, j)] * self.numerator[j] as f64)
                    .sum::<f64>()
                    / self.q as f64
            })
            .collect()
    }

    /// Lexicographic comparison of the coordinates `numerator_i / q`.
    fn cmp_coords(&self, other: &Self) -> Ordering {
        for (a, b) in self.numerator.iter().zip(&other.numerator) {
            let lhs = *a as i128 * other.q as i128;
            let rhs = *b as i128 * self.q as i128;
            match lhs.cmp(&rhs) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

/// Where a peak sits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PeakLocation {
    /// Rational point of the dual of a lattice.
    Dual(RationalDualPoint),
    /// Rational number `num / q` in lowest terms.
    Rational { num: i64, q: u64 },
}

impl PeakLocation {
    pub fn den(&self) -> u64 {
        match self {
            PeakLocation::Dual(p) => p.den(),
            PeakLocation::Rational { q, .. } => *q,
        }
    }

    /// Numerator entries (one entry for a rational number).
    pub fn numerator(&self) -> Vec<i64> {
        match self {
            PeakLocation::Dual(p) => p.numerator().to_vec(),
            PeakLocation::Rational { num, .. } => vec![*num],
        }
    }

    fn as_dual(&self) -> RationalDualPoint {
        match self {
            PeakLocation::Dual(p) => p.clone(),
            PeakLocation::Rational { num, q } => RationalDualPoint {
                numerator: vec![*num],
                q: *q,
            },
        }
    }
}

/// A Bragg peak with its intensity and the signed amplitude it squares.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPeak {
    pub location: PeakLocation,
    pub intensity: f64,
    pub amplitude: f64,
}

fn is_squarefree(q: u64) -> bool {
    is_kfree_abs(q as u128, 2)
}

fn require_dim(lattice: &Lattice) -> Result<usize> {
    match lattice.dim() {
        n if n >= 2 => Ok(n),
        n => Err(Error::Dimension(n)),
    }
}

/// `prod_{p | q} 1 / (p^e - 1)` and the number of distinct primes of `q`.
fn local_product(q: u64, e: u32) -> (f64, usize) {
    let primes = factorize(q as u128);
    let prod = primes
        .iter()
        .map(|&(p, _)| 1.0 / ((p as f64).powi(e as i32) - 1.0))
        .product();
    (prod, primes.len())
}

/// Signed amplitude `dens mu(q) / zeta(n) prod_{p | q} 1/(p^n - 1)` of the
/// visible points at denominator `q`; zero when `q` is not squarefree.
pub fn amplitude_visible(lattice: &Lattice, q: u64) -> Result<f64> {
    let n = require_dim(lattice)?;
    if q == 0 {
        return Err(Error::Domain("denominator must be positive".into()));
    }
    if !is_squarefree(q) {
        return Ok(0.0);
    }
    let (prod, omega) = local_product(q, n as u32);
    let sign = if omega % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * lattice.density() * series_constant(SeriesKind::InvZeta, n as u32) * prod)
}

/// Intensity of the visible-point spectrum at a point of denominator `q`.
pub fn intensity_visible(lattice: &Lattice, q: u64) -> Result<f64> {
    let n = require_dim(lattice)?;
    if q == 0 {
        return Err(Error::Domain("denominator must be positive".into()));
    }
    if !is_squarefree(q) {
        return Ok(0.0);
    }
    let (prod, _) = local_product(q, n as u32);
    let base = lattice.density() * series_constant(SeriesKind::InvZeta, n as u32);
    Ok(base * base * prod * prod)
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::Domain(format!("k = {k}, need k >= 2")));
    }
    Ok(())
}

/// Signed amplitude of the k-free integers at `a/q` (lowest terms):
/// `mu(rad q) / zeta(k) prod_{p | q} 1/(p^k - 1)`, zero unless `q` is
/// (k+1)-free. It does not depend on `a`.
pub fn amplitude_kfree(k: u32, q: u64) -> Result<f64> {
    check_k(k)?;
    if q == 0 {
        return Err(Error::Domain("denominator must be positive".into()));
    }
    if !is_kfree_abs(q as u128, k + 1) {
        return Ok(0.0);
    }
    let (prod, omega) = local_product(q, k);
    let sign = if omega % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * series_constant(SeriesKind::InvZeta, k) * prod)
}

/// Intensity of the k-free spectrum at a rational with denominator `q`.
pub fn intensity_kfree(k: u32, q: u64) -> Result<f64> {
    check_k(k)?;
    if q == 0 {
        return Err(Error::Domain("denominator must be positive".into()));
    }
    if !is_kfree_abs(q as u128, k + 1) {
        return Ok(0.0);
    }
    let (prod, _) = local_product(q, k);
    let base = series_constant(SeriesKind::InvZeta, k);
    Ok(base * base * prod * prod)
}

/// Half-open box `lo_i <= y_i < hi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Argument("window bounds differ in length".into()));
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::Argument("window bounds must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Argument("window is empty".into()));
        }
        Ok(Self { lo, hi })
    }

    /// The unit cell `[0, 1)^n`.
    pub fn unit(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v < *b)
    }
}

fn sort_peaks(peaks: &mut [WeightedPeak]) {
    peaks.sort_by(|a, b| {
        b.intensity
            .total_cmp(&a.intensity)
            .then_with(|| a.location.as_dual().cmp_coords(&b.location.as_dual()))
    });
}

fn check_enumeration(q_max: u64, floor: f64) -> Result<()> {
    if q_max == 0 {
        return Err(Error::Argument("q_max must be at least 1".into()));
    }
    if floor.is_nan() || floor < 0.0 {
        return Err(Error::Argument(
            "intensity floor must be non-negative".into(),
        ));
    }
    Ok(())
}

/// Peaks of the visible-point spectrum inside a window of the ambient
/// (dual) space, for squarefree denominators up to `q_max`, keeping those
/// with intensity at least `floor`. Sorted by descending intensity, then
/// lexicographically by location.
pub fn enumerate_peaks_visible(
    lattice: &Lattice,
    window: &Window,
    q_max: u64,
    floor: f64,
) -> Result<Vec<WeightedPeak>> {
    enumerate_peaks_visible_with_ceiling(lattice, window, q_max, floor, DEFAULT_PEAK_CEILING)
}

pub fn enumerate_peaks_visible_with_ceiling(
    lattice: &Lattice,
    window: &Window,
    q_max: u64,
    floor: f64,
    ceiling: u128,
) -> Result<Vec<WeightedPeak>> {
    let n = require_dim(lattice)?;
    check_enumeration(q_max, floor)?;
    if window.dim() != n {
        return Err(Error::Argument("window has wrong dimension".into()));
    }
    let dual = lattice.dual();
    let to_coords = dual.basis_inverse();
    let basis = dual.basis();

    // range of dual coordinates over the window, per unit denominator
    let mut span_lo = vec![f64::INFINITY; n];
    let mut span_hi = vec![f64::NEG_INFINITY; n];
    for corner in 0u32..(1 << n) {
        let y: Vec<f64> = (0..n)
            .map(|i| {
                if corner >> i & 1 == 1 {
                    window.hi[i]
                } else {
                    window.lo[i]
                }
            })
            .collect();
        for i in 0..n {
            let c: f64 = (0..n).map(|j| to_coords[(i, j)] * y[j]).sum();
            span_lo[i] = span_lo[i].min(c);
            span_hi[i] = span_hi[i].max(c);
        }
    }

    let candidates = (1..=q_max).filter(|&q| is_squarefree(q)).map(|q| {
        let qf = q as f64;
        (0..n)
            .map(|i| ((span_hi[i] * qf).ceil() - (span_lo[i] * qf).floor() + 3.0).max(0.0) as u128)
            .product::<u128>()
    });
    let mut total: u128 = 0;
    for c in candidates {
        total = total.saturating_add(c);
        if total > ceiling {
            return Err(Error::Size {
                what: "candidate peaks in window",
                requested: total,
                ceiling,
            });
        }
    }

    let mut peaks = Vec::new();
    let mut m = vec![0i64; n];
    for q in (1..=q_max).filter(|&q| is_squarefree(q)) {
        let intensity = intensity_visible(lattice, q)?;
        if intensity < floor {
            continue;
        }
        let amplitude = amplitude_visible(lattice, q)?;
        let qf = q as f64;
        let lo: Vec<i64> = span_lo
            .iter()
            .map(|v| (v * qf).floor() as i64 - 1)
            .collect();
        let hi: Vec<i64> = span_hi.iter().map(|v| (v * qf).ceil() as i64 + 1).collect();
        m.copy_from_slice(&lo);
        'odometer: loop {
            let g = m.iter().fold(q, |g, &c| gcd_u64(g, c.unsigned_abs()));
            if g == 1 {
                let y: Vec<f64> = (0..n)
                    .map(|i| (0..n).map(|j| basis[(i, j)] * m[j] as f64).sum::<f64>() / qf)
                    .collect();
                if window.contains(&y) {
                    peaks.push(WeightedPeak {
                        location: PeakLocation::Dual(RationalDualPoint {
                            numerator: m.clone(),
                            q,
                        }),
                        intensity,
                        amplitude,
                    });
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                if m[i] < hi[i] {
                    m[i] += 1;
                    break;
                }
                m[i] = lo[i];
            }
        }
    }
    sort_peaks(&mut peaks);
    Ok(peaks)
}

/// Peaks `a/q` of the k-free spectrum in `[lo, hi)`, for (k+1)-free `q` up
/// to `q_max`.
pub fn enumerate_peaks_kfree(
    k: u32,
    window: &Window,
    q_max: u64,
    floor: f64,
) -> Result<Vec<WeightedPeak>> {
    check_k(k)?;
    check_enumeration(q_max, floor)?;
    if window.dim() != 1 {
        return Err(Error::Argument("k-free window must be an interval".into()));
    }
    let (lo, hi) = (window.lo[0], window.hi[0]);
    let mut total: u128 = 0;
    for q in 1..=q_max {
        total += ((hi - lo) * q as f64).ceil() as u128 + 2;
        if total > DEFAULT_PEAK_CEILING {
            return Err(Error::Size {
                what: "candidate peaks in window",
                requested: total,
                ceiling: DEFAULT_PEAK_CEILING,
            });
        }
    }
    let mut peaks = Vec::new();
    for q in (1..=q_max).filter(|&q| is_kfree_abs(q as u128, k + 1)) {
        let intensity = intensity_kfree(k, q)?;
        if intensity < floor {
            continue;
        }
        let amplitude = amplitude_kfree(k, q)?;
        let qf = q as f64;
        let a_lo = (lo * qf).floor() as i64 - 1;
        let a_hi = (hi * qf).ceil() as i64 + 1;
        for a in a_lo..=a_hi {
            if gcd_u64(a.unsigned_abs(), q) != 1 {
                continue;
            }
            let y = a as f64 / qf;
            if lo <= y && y < hi {
                peaks.push(WeightedPeak {
                    location: PeakLocation::Rational { num: a, q },
                    intensity,
                    amplitude,
                });
            }
        }
    }
    sort_peaks(&mut peaks);
    Ok(peaks)
}

/// 8-bit grayscale raster, row-major with the origin at the top-left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

/// Renders peaks at `positions` (1 or 2 coordinates each) into a window.
///
/// Each peak sets one pixel to `round(255 (I / I_max)^gamma)`; where peaks
/// share a pixel the largest value wins. Rows run from the top of the
/// window downwards; a 1-D window gives a single row.
pub fn raster_map(
    peaks: &[(Vec<f64>, f64)],
    window: &Window,
    resolution: f64,
    gamma: f64,
) -> Result<GrayImage> {
    if peaks.is_empty() {
        return Err(Error::EmptyImage);
    }
    if !(resolution >= 1.0 && resolution.is_finite()) {
        return Err(Error::Argument("resolution must be at least 1".into()));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Argument("gamma must be positive".into()));
    }
    let d = window.dim();
    if d > 2 {
        return Err(Error::Dimension(d));
    }
    let width = ((window.hi[0] - window.lo[0]) * resolution).ceil().max(1.0) as usize;
    let height = if d == 2 {
        ((window.hi[1] - window.lo[1]) * resolution).ceil().max(1.0) as usize
    } else {
        1
    };
    let cells = width as u128 * height as u128;
    if cells > DEFAULT_PEAK_CEILING {
        return Err(Error::Size {
            what: "image pixels",
            requested: cells,
            ceiling: DEFAULT_PEAK_CEILING,
        });
    }
    let i_max = peaks.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let mut pixels = vec![0u8; width * height];
    for (pos, intensity) in peaks {
        if pos.len() != d {
            return Err(Error::Argument("peak position has wrong dimension".into()));
        }
        if !window.contains(pos) {
            continue;
        }
        let col = (((pos[0] - window.lo[0]) * resolution).floor() as usize).min(width - 1);
        let row = if d == 2 {
            (((window.hi[1] - pos[1]) * resolution).ceil() as usize)
                .saturating_sub(1)
                .min(height - 1)
        } else {
            0
        };
        let value = if i_max > 0.0 {
            (255.0 * (intensity / i_max).powf(gamma)).round() as u8
        } else {
            0
        };
        let px = &mut pixels[row * width + col];
        *px = (*px).max(value);
    }
    Ok(GrayImage {
        width,
        height,
        pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn z2() -> Lattice {
        Lattice::integer(2).unwrap()
    }

    const I0: f64 = 36.0 / (PI * PI * PI * PI);

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6 * b.abs().max(1e-3)
    }

    #[test]
    fn lowest_terms() {
        let p = RationalDualPoint::new(vec![2, 4], 6).unwrap();
        assert_eq!((p.numerator(), p.den()), (&[1, 2][..], 3));
        let z = RationalDualPoint::new(vec![0, 0], 5).unwrap();
        assert_eq!(z.den(), 1);
        let neg = RationalDualPoint::new(vec![-3, 0], 6).unwrap();
        assert_eq!((neg.numerator(), neg.den()), (&[-1, 0][..], 2));
        assert!(RationalDualPoint::new(vec![1], 0).is_err());
    }

    #[test]
    fn positions_use_dual_basis() {
        let lat = Lattice::from_columns(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = RationalDualPoint::new(vec![1, 1], 2).unwrap();
        let y = p.position(&lat);
        assert!((y[0] - 0.25).abs() < 1e-15 && (y[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn visible_intensities() {
        assert!(close(intensity_visible(&z2(), 1).unwrap(), I0));
        assert!((intensity_visible(&z2(), 1).unwrap() - 0.369575).abs() < 1e-5);
        assert!(close(intensity_visible(&z2(), 2).unwrap(), I0 / 9.0));
        assert!((intensity_visible(&z2(), 2).unwrap() - 0.041060).abs() < 1e-5);
        assert_eq!(intensity_visible(&z2(), 4).unwrap(), 0.0);
        let z1 = Lattice::integer(1).unwrap();
        assert_eq!(intensity_visible(&z1, 1), Err(Error::Dimension(1)));
    }

    #[test]
    fn visible_amplitudes() {
        let inv = 6.0 / (PI * PI);
        assert!(close(amplitude_visible(&z2(), 1).unwrap(), inv));
        assert!(close(amplitude_visible(&z2(), 2).unwrap(), -inv / 3.0));
        assert!(close(amplitude_visible(&z2(), 6).unwrap(), inv / 24.0));
        assert!((amplitude_visible(&z2(), 6).unwrap() - 0.02533).abs() < 1e-5);
        assert_eq!(amplitude_visible(&z2(), 12).unwrap(), 0.0);
    }

    #[test]
    fn scaled_lattice_intensity() {
        let lat = Lattice::scaled_integer(2, 2.0).unwrap();
        let a = intensity_visible(&lat, 3).unwrap();
        let b = intensity_visible(&z2(), 3).unwrap();
        assert!(close(a, b / 16.0));
    }

    #[test]
    fn kfree_intensities() {
        assert!(close(intensity_kfree(2, 1).unwrap(), I0));
        assert!(close(intensity_kfree(2, 4).unwrap(), I0 / 9.0));
        assert_eq!(intensity_kfree(2, 8).unwrap(), 0.0);
        assert!(close(intensity_kfree(2, 3).unwrap(), I0 / 64.0));
        assert!(intensity_kfree(1, 2).is_err());
        assert!(close(
            amplitude_kfree(2, 2).unwrap(),
            -(6.0 / (PI * PI)) / 3.0
        ));
        assert!(close(
            amplitude_kfree(2, 12).unwrap(),
            (6.0 / (PI * PI)) / 24.0
        ));
    }

    #[test]
    fn visible_peaks_in_unit_cell() {
        let w = Window::unit(2);
        let one = enumerate_peaks_visible(&z2(), &w, 1, 0.0).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].location.numerator(), vec![0, 0]);
        assert!(close(one[0].intensity, I0));

        let two = enumerate_peaks_visible(&z2(), &w, 2, 0.0).unwrap();
        let locs: Vec<Vec<i64>> = two.iter().map(|p| p.location.numerator()).collect();
        assert_eq!(locs, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(two[1..]
            .iter()
            .all(|p| p.location.den() == 2 && close(p.intensity, I0 / 9.0)));

        let three = enumerate_peaks_visible(&z2(), &w, 3, 0.0).unwrap();
        assert_eq!(three.len(), 12);
        let thirds: Vec<_> = three.iter().filter(|p| p.location.den() == 3).collect();
        assert_eq!(thirds.len(), 8);
        assert!(thirds.iter().all(|p| close(p.intensity, I0 / 64.0)));

        // q = 4 is not squarefree and adds nothing
        assert_eq!(
            enumerate_peaks_visible(&z2(), &w, 4, 0.0).unwrap().len(),
            12
        );
        // floor removes the weak ones
        assert_eq!(
            enumerate_peaks_visible(&z2(), &w, 3, 0.01).unwrap().len(),
            4
        );
    }

    #[test]
    fn peak_count_matches_brute_force() {
        let w = Window::new(vec![-0.5, 0.0], vec![0.5, 2.0]).unwrap();
        let peaks = enumerate_peaks_visible(&z2(), &w, 12, 0.0).unwrap();
        let mut brute = std::collections::BTreeSet::new();
        for q in 1..=12i64 {
            if !is_squarefree(q as u64) {
                continue;
            }
            for a in -q..=2 * q {
                for b in -q..=3 * q {
                    let (x, y) = (a as f64 / q as f64, b as f64 / q as f64);
                    if w.contains(&[x, y]) {
                        let p = RationalDualPoint::new(vec![a, b], q as u64).unwrap();
                        if is_squarefree(p.den()) {
                            brute.insert(p);
                        }
                    }
                }
            }
        }
        let got: std::collections::BTreeSet<_> = peaks
            .iter()
            .map(|p| match &p.location {
                PeakLocation::Dual(d) => d.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(got.len(), peaks.len());
        assert_eq!(got, brute);
    }

    #[test]
    fn peak_ceiling() {
        let w = Window::new(vec![0.0, 0.0], vec![100.0, 100.0]).unwrap();
        assert!(matches!(
            enumerate_peaks_visible_with_ceiling(&z2(), &w, 50, 0.0, 1000),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn kfree_peaks() {
        let w = Window::unit(1);
        let p1 = enumerate_peaks_kfree(2, &w, 1, 0.0).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1[0].location, PeakLocation::Rational { num: 0, q: 1 });
        let p2 = enumerate_peaks_kfree(2, &w, 2, 0.0).unwrap();
        assert_eq!(p2.len(), 2);
        assert_eq!(p2[1].location, PeakLocation::Rational { num: 1, q: 2 });
        let p4 = enumerate_peaks_kfree(2, &w, 4, 0.0).unwrap();
        let locs: Vec<(i64, u64)> = p4
            .iter()
            .map(|p| match p.location {
                PeakLocation::Rational { num, q } => (num, q),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(locs, vec![(0, 1), (1, 4), (1, 2), (3, 4), (1, 3), (2, 3)]);
        assert!(close(p4[1].intensity, I0 / 9.0));
        assert!(close(p4[4].intensity, I0 / 64.0));
        // 8 is not cube-free
        let p8 = enumerate_peaks_kfree(2, &w, 8, 0.0).unwrap();
        assert!(p8.iter().all(|p| p.location.den() != 8));
    }

    #[test]
    fn raster_values() {
        let w = Window::unit(2);
        let img = raster_map(&[(vec![0.5, 0.5], 2.0)], &w, 4.0, 1.0).unwrap();
        assert_eq!((img.width, img.height), (4, 4));
        assert_eq!(img.pixels.iter().filter(|&&v| v > 0).count(), 1);
        assert_eq!(img.get(2, 1), 255);

        let pair = [(vec![0.0, 0.0], 9.0), (vec![0.5, 0.0], 1.0)];
        let img = raster_map(&pair, &w, 2.0, 1.0).unwrap();
        assert_eq!(img.get(0, 1), 255);
        assert_eq!(img.get(1, 1), 28);
        let img = raster_map(&pair, &w, 2.0, 0.5).unwrap();
        assert_eq!(img.get(1, 1), 85);

        // shared pixel keeps the maximum
        let shared = [(vec![0.1, 0.1], 1.0), (vec![0.2, 0.2], 9.0)];
        let img = raster_map(&shared, &w, 1.0, 1.0).unwrap();
        assert_eq!(img.pixels, vec![255]);

        assert_eq!(raster_map(&[], &w, 1.0, 1.0), Err(Error::EmptyImage));
        assert!(raster_map(&pair, &w, 0.5, 1.0).is_err());
        assert!(raster_map(&pair, &w, 1.0, 0.0).is_err());
    }
}
