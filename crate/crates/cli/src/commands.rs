use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use vislat::diffraction::{enumerate_peaks_kfree, enumerate_peaks_visible, raster_map, Window};
use vislat::export::{
    write_autocorr_csv, write_convergence_csv, write_integers, write_peaks_csv, write_pgm,
    write_points_csv,
};
use vislat::kfree::{enumerate_kfree, find_gap, is_kfree};
use vislat::lattice::{enumerate_ball, find_hole};
use vislat::numtheory::{dirichlet_sum, eval_series, ArithTables};
use vislat::stats::{
    autocorr_schedule, density_kfree_schedule, density_visible_schedule, fourier_bohr,
    ConvergenceRow,
};
use vislat::{
    AutocorrMode, Content, Error, Lattice, LatticeVector, PeakLocation, PointFilter, PointSet,
    Truncation, WeightedPeak,
};

use crate::args::*;

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Size { .. } | Error::Overflow(_) | Error::EmptyImage => {
                Failure::Compute(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(format!("i/o error: {e}"))
    }
}

type Outcome = Result<Value, Failure>;

/// Where and how the artifact goes.
pub struct Sink<'a> {
    pub out: Option<&'a Path>,
    pub format: Option<Format>,
}

impl Sink<'_> {
    /// The requested format, checked against what the command can write.
    fn format(&self, allowed: &[Format]) -> Result<Format, Failure> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => Err(Failure::Usage(format!(
                "format {} not available for this command",
                format_name(f)
            ))),
        }
    }

    fn write(&self, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
        if let Some(path) = self.out {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    fn write_json(&self, value: &Value) -> Result<(), Failure> {
        self.write(|w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Pgm => "pgm",
    }
}

fn lattice_json(l: &Lattice) -> Value {
    let b = l.basis();
    let cols: Vec<Vec<f64>> = b
        .column_iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    json!(cols)
}

fn content_json(c: Content) -> Value {
    match c {
        Content::Finite(c) => json!(c),
        Content::Infinite => json!("inf"),
    }
}

fn filter_name(f: PointFilter) -> String {
    match f {
        PointFilter::All => "all".into(),
        PointFilter::Visible => "visible".into(),
        PointFilter::Content(m) => format!("content={m}"),
    }
}

fn set_name(s: SetKind) -> &'static str {
    match s {
        SetKind::Visible => "visible",
        SetKind::Kfree => "kfree",
        SetKind::Lattice => "lattice",
    }
}

fn point_set(set: SetKind, lattice: &Lattice, k: u32) -> PointSet<'_> {
    match set {
        SetKind::Visible => PointSet::Visible(lattice),
        SetKind::Lattice => PointSet::Lattice(lattice),
        SetKind::Kfree => PointSet::KFree(k),
    }
}

fn origin_or(center: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>, Failure> {
    match center {
        None => Ok(vec![0.0; n]),
        Some(c) if c.len() == n => Ok(c.clone()),
        Some(c) => Err(Failure::Usage(format!(
            "center has {} coordinates, need {n}",
            c.len()
        ))),
    }
}

pub fn points(a: &PointsArgs, sink: &Sink) -> Outcome {
    let format = sink.format(&[Format::Csv, Format::Json])?;
    let lat = &a.lattice.lattice;
    let center = origin_or(&a.center, lat.dim())?;
    let pts = enumerate_ball(lat, &center, a.radius, a.filter)?;
    match format {
        Format::Csv => sink.write(|w| write_points_csv(w, lat.dim(), &pts))?,
        _ => sink.write_json(&json!(pts
            .iter()
            .map(|p| json!({ "x": p.coords(), "content": content_json(p.content()) }))
            .collect::<Vec<_>>()))?,
    }
    Ok(json!({
        "command": "points",
        "parameters": {
            "lattice": lattice_json(lat), "radius": a.radius, "center": center,
            "filter": filter_name(a.filter),
        },
        "result": { "count": pts.len() },
    }))
}

pub fn kfree(a: &KfreeArgs, sink: &Sink) -> Outcome {
    let format = sink.format(&[Format::Csv, Format::Json])?;
    let xs = enumerate_kfree(a.lo, a.hi, a.k)?;
    match format {
        Format::Csv => sink.write(|w| write_integers(w, &xs))?,
        _ => sink.write_json(&json!(xs))?,
    }
    Ok(json!({
        "command": "kfree",
        "parameters": { "k": a.k, "lo": a.lo, "hi": a.hi },
        "result": { "count": xs.len() },
    }))
}

fn rows_json(rows: &[ConvergenceRow]) -> Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "R": r.radius, "count": r.count, "estimate": r.estimate,
            "theory": r.theory, "abs_error": r.abs_error,
        }))
        .collect::<Vec<_>>())
}

pub fn density(a: &DensityArgs, sink: &Sink) -> Outcome {
    let format = sink.format(&[Format::Csv, Format::Json])?;
    let lat = &a.lattice.lattice;
    let (estimates, params) = match a.set {
        SetKind::Visible => {
            let center = origin_or(&a.center, lat.dim())?;
            let est = density_visible_schedule(lat, &center, &a.radius)?;
            let params = json!({
                "set": "visible", "lattice": lattice_json(lat), "center": center, "radius": a.radius,
            });
            (est, params)
        }
        SetKind::Kfree => {
            if a.center.is_some() {
                return Err(Failure::Usage("k-free densities are taken about 0".into()));
            }
            let est = density_kfree_schedule(a.k, &a.radius)?;
            (est, json!({ "set": "kfree", "k": a.k, "radius": a.radius }))
        }
        SetKind::Lattice => {
            return Err(Failure::Usage(
                "density needs --set visible or kfree".into(),
            ))
        }
    };
    let mut rows: Vec<ConvergenceRow> = estimates.iter().map(ConvergenceRow::from).collect();
    rows.sort_by(|x, y| x.radius.total_cmp(&y.radius));
    match format {
        Format::Csv => sink.write(|w| write_convergence_csv(w, &rows))?,
        _ => sink.write_json(&rows_json(&rows))?,
    }
    let last = rows.last().expect("schedule is never empty");
    Ok(json!({
        "command": "density",
        "parameters": params,
        "result": {
            "R": last.radius, "count": last.count, "estimate": last.estimate,
            "theory": last.theory, "abs_error": last.abs_error,
        },
    }))
}

pub fn autocorr(a: &AutocorrArgs, sink: &Sink) -> Outcome {
    let format = sink.format(&[Format::Csv, Format::Json])?;
    let lat = &a.lattice.lattice;
    let set = point_set(a.set, lat, a.k);
    let mode = match a.mode {
        Mode::TwoSided => AutocorrMode::TwoSided,
        Mode::OneSided => AutocorrMode::OneSided,
    };
    let mut rows = autocorr_schedule(&set, &a.shift, &a.radius, mode)?;
    rows.sort_by(|x, y| x.radius.total_cmp(&y.radius));
    match format {
        Format::Csv => sink.write(|w| write_autocorr_csv(w, &rows))?,
        _ => sink.write_json(&json!(rows
            .iter()
            .map(|r| json!({
                "R": r.radius, "count": r.count, "w_R": r.w_r,
                "w_theory": r.w_theory, "abs_error": r.abs_error,
            }))
            .collect::<Vec<_>>()))?,
    }
    let mut params = json!({
        "set": set_name(a.set), "shift": a.shift, "radius": a.radius,
        "mode": if mode == AutocorrMode::TwoSided { "two-sided" } else { "one-sided" },
    });
    match a.set {
        SetKind::Kfree => params["k"] = json!(a.k),
        _ => params["lattice"] = lattice_json(lat),
    }
    let last = rows.last().expect("schedule is never empty");
    Ok(json!({
        "command": "autocorr",
        "parameters": params,
        "result": {
            "R": last.radius, "count": last.count, "w_R": last.w_r,
            "w_theory": last.w_theory, "abs_error": last.abs_error,
        },
    }))
}

pub fn fourier(a: &FourierArgs, sink: &Sink) -> Outcome {
    sink.format(&[Format::Json])?;
    let lat = &a.lattice.lattice;
    let set = point_set(a.set, lat, a.k);
    let m = fourier_bohr(&set, &a.x, a.radius)?;
    let mut params = json!({ "set": set_name(a.set), "x": a.x, "radius": a.radius });
    match a.set {
        SetKind::Kfree => params["k"] = json!(a.k),
        _ => params["lattice"] = lattice_json(lat),
    }
    let summary = json!({
        "command": "fourier",
        "parameters": params,
        "result": { "re": m.re, "im": m.im, "intensity": m.norm_sqr() },
    });
    sink.write_json(&summary)?;
    Ok(summary)
}

fn window_for(a: &PeaksArgs) -> Result<Window, Failure> {
    let n = match a.set {
        SetKind::Kfree => 1,
        _ => a.lattice.lattice.dim(),
    };
    match &a.window {
        None => Ok(Window::unit(n)),
        Some(w) if w.len() == 2 * n => Ok(Window::new(w[..n].to_vec(), w[n..].to_vec())?),
        Some(w) => Err(Failure::Usage(format!(
            "window has {} numbers, need {} (lower corner then upper corner)",
            w.len(),
            2 * n
        ))),
    }
}

fn find_peaks(a: &PeaksArgs) -> Result<(Window, Vec<WeightedPeak>, Value), Failure> {
    let window = window_for(a)?;
    let lat = &a.lattice.lattice;
    let peaks = match a.set {
        SetKind::Visible => enumerate_peaks_visible(lat, &window, a.qmax, a.floor)?,
        SetKind::Kfree => enumerate_peaks_kfree(a.k, &window, a.qmax, a.floor)?,
        SetKind::Lattice => {
            return Err(Failure::Usage("peaks needs --set visible or kfree".into()))
        }
    };
    let mut params = json!({
        "set": set_name(a.set), "qmax": a.qmax, "floor": a.floor,
        "window": [window.lo, window.hi],
    });
    match a.set {
        SetKind::Kfree => params["k"] = json!(a.k),
        _ => params["lattice"] = lattice_json(lat),
    }
    Ok((window, peaks, params))
}

pub fn peaks(a: &PeaksArgs, sink: &Sink) -> Outcome {
    let format = sink.format(&[Format::Csv, Format::Json])?;
    let (window, peaks, params) = find_peaks(a)?;
    match format {
        Format::Csv => sink.write(|w| write_peaks_csv(w, window.dim(), &peaks))?,
        _ => sink.write_json(&json!(peaks
            .iter()
            .map(|p| json!({
                "numerator": p.location.numerator(), "q": p.location.den(),
                "intensity": p.intensity, "amplitude": p.amplitude,
            }))
            .collect::<Vec<_>>()))?,
    }
    Ok(json!({
        "command": "peaks",
        "parameters": params,
        "result": {
            "count": peaks.len(),
            "max_intensity": peaks.first().map(|p| p.intensity),
        },
    }))
}

pub fn map(a: &MapArgs, sink: &Sink) -> Outcome {
    sink.format(&[Format::Pgm])?;
    let (window, peaks, mut params) = find_peaks(&a.peaks)?;
    let lat = &a.peaks.lattice.lattice;
    let located: Vec<(Vec<f64>, f64)> = peaks
        .iter()
        .map(|p| {
            let y = match &p.location {
                PeakLocation::Dual(d) => d.position(lat),
                PeakLocation::Rational { num, q } => vec![*num as f64 / *q as f64],
            };
            (y, p.intensity)
        })
        .collect();
    let image = raster_map(&located, &window, a.resolution, a.gamma)?;
    let comment = format!(
        "vislat map set={} qmax={} resolution={} gamma={}",
        set_name(a.peaks.set),
        a.peaks.qmax,
        a.resolution,
        a.gamma
    );
    sink.write(|w| write_pgm(w, &image, &comment))?;
    params["resolution"] = json!(a.resolution);
    params["gamma"] = json!(a.gamma);
    let lit = image.pixels.iter().filter(|&&p| p > 0).count();
    Ok(json!({
        "command": "map",
        "parameters": params,
        "result": {
            "width": image.width, "height": image.height,
            "peaks": peaks.len(), "lit_pixels": lit,
        },
    }))
}

fn block(n: usize, m: u32) -> Vec<LatticeVector> {
    let m = m as i64;
    let total = (m as usize).pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = vec![0i64; n];
            for slot in c.iter_mut().rev() {
                *slot = (idx % m as usize) as i64;
                idx /= m as usize;
            }
            LatticeVector::new(c)
        })
        .collect()
}

pub fn holes(a: &HolesArgs, sink: &Sink) -> Outcome {
    sink.format(&[Format::Json])?;
    let lat = &a.lattice.lattice;
    if a.block == 0 {
        return Err(Failure::Usage("block must be positive".into()));
    }
    let n = lat.dim();
    if (a.block as u64)
        .checked_pow(n as u32)
        .is_none_or(|c| c > 64)
    {
        return Err(Failure::Compute(format!(
            "block of {}^{n} points exceeds the ceiling of 64 configuration points",
            a.block
        )));
    }
    let config = block(n, a.block);
    let t = find_hole(lat, &config, None)?;
    // integers past 2^53 do not survive JSON numbers, so coordinates are strings
    let t_str: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    let summary = json!({
        "command": "holes",
        "parameters": { "lattice": lattice_json(lat), "block": a.block },
        "result": { "translation": t_str, "points": config.len() },
    });
    sink.write_json(&summary)?;
    Ok(summary)
}

pub fn gaps(a: &GapsArgs, sink: &Sink) -> Outcome {
    sink.format(&[Format::Json])?;
    let start = find_gap(a.k, a.len, None)?;
    let in_range = i64::try_from(start + a.len as u128).is_ok();
    let verified =
        in_range && (0..a.len as i64).all(|j| !is_kfree(start as i64 + j, a.k).unwrap_or(true));
    let summary = json!({
        "command": "gaps",
        "parameters": { "k": a.k, "len": a.len },
        "result": { "start": start.to_string(), "verified": verified },
    });
    sink.write_json(&summary)?;
    Ok(summary)
}

pub fn series(a: &SeriesArgs, sink: &Sink) -> Outcome {
    sink.format(&[Format::Json])?;
    let v = match a.term_bound {
        None => eval_series(a.kind, a.s, a.prime_bound)?,
        Some(m) => dirichlet_sum(a.kind, a.s, &ArithTables::new(m)?)?,
    };
    let (bound_name, bound) = match v.truncation {
        Truncation::PrimeBound(p) => ("prime_bound", p),
        Truncation::TermBound(m) => ("term_bound", m),
    };
    let summary = json!({
        "command": "series",
        "parameters": { "kind": a.kind.to_string(), "s": a.s, bound_name: bound },
        "result": { "value": v.value, "tail_bound": v.tail_bound },
    });
    sink.write_json(&summary)?;
    Ok(summary)
}
