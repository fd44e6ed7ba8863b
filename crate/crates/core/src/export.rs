//! Text and image writers for the command-line tool.
//!
//! All writers are deterministic: the same input produces the same bytes.

use std::io::{self, Write};

use crate::diffraction::{GrayImage, WeightedPeak};
use crate::lattice::LatticeVector;
use crate::stats::{AutocorrEstimate, ConvergenceRow};

/// Point cloud with header `x1,...,xn,content`. The origin's content is
/// written as `inf`.
pub fn write_points_csv<W: Write>(
    mut out: W,
    dim: usize,
    points: &[LatticeVector],
) -> io::Result<()> {
    let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    writeln!(out, "{},content", header.join(","))?;
    for p in points {
        for c in p.coords() {
            write!(out, "{c},")?;
        }
        writeln!(out, "{}", p.content())?;
    }
    Ok(())
}

/// One integer per line.
pub fn write_integers<W: Write>(mut out: W, values: &[i64]) -> io::Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Peak list with header `num_1,...,num_n,q,intensity,amplitude`.
pub fn write_peaks_csv<W: Write>(mut out: W, dim: usize, peaks: &[WeightedPeak]) -> io::Result<()> {
    let header: Vec<String> = (1..=dim).map(|i| format!("num_{i}")).collect();
    writeln!(out, "{},q,intensity,amplitude", header.join(","))?;
    for p in peaks {
        for c in p.location.numerator() {
            write!(out, "{c},")?;
        }
        writeln!(
            out,
            "{},{:e},{:e}",
            p.location.den(),
            p.intensity,
            p.amplitude
        )?;
    }
    Ok(())
}

/// Convergence table with header `R,count,estimate,theory,abs_error`,
/// ascending in `R`.
pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> io::Result<()> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    writeln!(out, "R,count,estimate,theory,abs_error")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:e},{:e},{:e}",
            r.radius, r.count, r.estimate, r.theory, r.abs_error
        )?;
    }
    Ok(())
}

/// Autocorrelation table with header `R,count,w_R,w_theory,abs_error`,
/// ascending in `R`.
pub fn write_autocorr_csv<W: Write>(mut out: W, rows: &[AutocorrEstimate]) -> io::Result<()> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    writeln!(out, "R,count,w_R,w_theory,abs_error")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:e},{:e},{:e}",
            r.radius, r.count, r.w_r, r.w_theory, r.abs_error
        )?;
    }
    Ok(())
}

/// Binary 8-bit PGM (`P5`) with one comment line.
pub fn write_pgm<W: Write>(mut out: W, image: &GrayImage, comment: &str) -> io::Result<()> {
    let comment = comment.replace(['\n', '\r'], " ");
    write!(
        out,
        "P5\n# {comment}\n{} {}\n255\n",
        image.width, image.height
    )?;
    out.write_all(&image.pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffraction::PeakLocation;

    #[test]
    fn points_csv_layout() {
        let pts = vec![
            LatticeVector::new(vec![0, 0]),
            LatticeVector::new(vec![2, -4]),
        ];
        let mut buf = Vec::new();
        write_points_csv(&mut buf, 2, &pts).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x1,x2,content\n0,0,inf\n2,-4,2\n"
        );
    }

    #[test]
    fn peaks_csv_layout() {
        let peaks = vec![WeightedPeak {
            location: PeakLocation::Rational { num: 1, q: 2 },
            intensity: 0.25,
            amplitude: -0.5,
        }];
        let mut buf = Vec::new();
        write_peaks_csv(&mut buf, 1, &peaks).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "num_1,q,intensity,amplitude\n1,2,2.5e-1,-5e-1\n"
        );
    }

    #[test]
    fn autocorr_sorted() {
        let row = |r: f64| AutocorrEstimate {
            shift: vec![1],
            radius: r,
            count: 3,
            w_r: 0.5,
            w_theory: 0.25,
            abs_error: 0.25,
        };
        let mut buf = Vec::new();
        write_autocorr_csv(&mut buf, &[row(20.0), row(10.0)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "R,count,w_R,w_theory,abs_error\n10,3,5e-1,2.5e-1,2.5e-1\n20,3,5e-1,2.5e-1,2.5e-1\n"
        );
    }

    #[test]
    fn pgm_header() {
        let img = GrayImage {
            width: 2,
            height: 1,
            pixels: vec![0, 255],
        };
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img, "lattice=I2\nq_max=3").unwrap();
        assert_eq!(&buf[..], b"P5\n# lattice=I2 q_max=3\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn convergence_sorted() {
        let row = |r: f64| ConvergenceRow {
            radius: r,
            count: r as u64,
            estimate: 0.5,
            theory: 0.5,
            abs_error: 0.0,
        };
        let mut buf = Vec::new();
        write_convergence_csv(&mut buf, &[row(20.0), row(10.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "R,count,estimate,theory,abs_error");
        assert!(lines[1].starts_with("10,10,"));
        assert!(lines[2].starts_with("20,20,"));
    }
}
