//! Turns the CSV artifacts of a run directory into SVG figures.
//!
//! | input                 | figure                                          |
//! |-----------------------|-------------------------------------------------|
//! | `grid_*.csv`          | diverging heatmap with dashed `f = 0` boundary  |
//! | `absdiff_*.csv`       | sequential heatmap of `|a − b|`                 |
//! | `hist_*.csv`          | paired score histogram                          |
//! | `sweep.csv`           | accuracy and BCE vs the swept value, ±1 std     |
//! | `curves.csv`          | learning curves per model, mean over seeds      |
//! | `landscape_seed*.csv` | loss-landscape heatmap with iso-loss contours   |
//!
//! Rendering reads nothing but these files, so it is a pure function of the
//! directory contents.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::DecisionGrid;
use crate::data::read_dataset;
use crate::error::{Error, Result};
use crate::svg::{histogram_pair, ColorScale, Heatmap, LineChart, Series};

/// Renders every recognised input in `dir` and returns the written SVG
/// paths relative to `dir`, sorted.
pub fn render(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::MissingInput(format!("{} is not a directory", dir.display())));
    }
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();

    let overlay = if dir.join("data_train.csv").exists() {
        let ds = read_dataset(&dir.join("data_train.csv"))?;
        ds.points.iter().copied().zip(ds.labels.iter().copied()).collect()
    } else {
        Vec::new()
    };

    let mut written = Vec::new();
    let mut emit = |name: String, svg: String| -> Result<()> {
        fs::write(dir.join(&name), svg)?;
        written.push(PathBuf::from(name));
        Ok(())
    };
    for name in &names {
        let stem = name.trim_end_matches(".csv");
        let read = || fs::read_to_string(dir.join(name));
        if name.starts_with("grid_") {
            let g = DecisionGrid::from_csv(&read()?)?;
            let title = format!("decision score f(x), {}", stem.trim_start_matches("grid_"));
            emit(format!("{stem}.svg"), grid_svg(&g, &title, ColorScale::Diverging, vec![(0.0, true)], overlay.clone()))?;
        } else if name.starts_with("absdiff_") {
            let g = DecisionGrid::from_csv(&read()?)?;
            let hi = g.scores.iter().copied().fold(0.05_f64, f64::max);
            let title = format!("|Δf|, {}", stem.trim_start_matches("absdiff_"));
            emit(format!("{stem}.svg"), grid_svg(&g, &title, ColorScale::Sequential { lo: 0.0, hi }, Vec::new(), Vec::new()))?;
        } else if name.starts_with("hist_") {
            emit(format!("{stem}.svg"), hist_svg(&read()?, stem)?)?;
        } else if name == "sweep.csv" {
            for (metric, ylabel) in [("test_acc", "test accuracy"), ("test_bce", "test BCE")] {
                emit(format!("sweep_{metric}.svg"), sweep_svg(&read()?, metric, ylabel)?)?;
            }
        } else if name == "curves.csv" {
            for (file, svg) in curves_svgs(&read()?)? {
                emit(file, svg)?;
            }
        } else if name.starts_with("landscape_seed") {
            emit(format!("{stem}.svg"), landscape_svg(&read()?, stem)?)?;
        }
    }
    if written.is_empty() {
        return Err(Error::MissingInput(format!("no renderable CSV files in {}", dir.display())));
    }
    written.sort();
    Ok(written)
}

fn grid_svg(g: &DecisionGrid, title: &str, scale: ColorScale, contours: Vec<(f64, bool)>, points: Vec<([f64; 2], u8)>) -> String {
    Heatmap {
        title,
        xlabel: "x1",
        ylabel: "x2",
        x_range: (g.x_range.lo, g.x_range.hi),
        y_range: (g.y_range.lo, g.y_range.hi),
        nx: g.nx,
        ny: g.ny,
        values: &g.scores,
        scale,
        contours,
        points,
    }
    .render()
}

/// Splits a headered CSV into a column index and rows of fields.
fn table(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    if let Some(bad) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::Parse(format!("row has {} fields, header has {}", bad.len(), header.len())));
    }
    Ok((header, rows))
}

fn col(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
}

fn num(s: &str) -> Result<f64> {
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse().map_err(|_| Error::Parse(format!("not a number: '{s}'")))
}

fn hist_svg(text: &str, stem: &str) -> Result<String> {
    let (h, rows) = table(text)?;
    let (lo, hi, ca, cb) = (col(&h, "bin_lo")?, col(&h, "bin_hi")?, col(&h, "count_a")?, col(&h, "count_b")?);
    if rows.is_empty() {
        return Err(Error::Parse(format!("{stem}: no bins")));
    }
    let mut edges: Vec<f64> = rows.iter().map(|r| num(&r[lo])).collect::<Result<_>>()?;
    edges.push(num(&rows[rows.len() - 1][hi])?);
    let parse_counts = |c: usize| -> Result<Vec<usize>> {
        rows.iter()
            .map(|r| r[c].parse().map_err(|_| Error::Parse(format!("bad count '{}'", r[c]))))
            .collect()
    };
    let (a, b) = (parse_counts(ca)?, parse_counts(cb)?);
    let pair = stem.trim_start_matches("hist_");
    let pair = pair.split("_seed").next().unwrap_or(pair);
    let (name_a, name_b) = pair.split_once("_vs_").unwrap_or(("a", "b"));
    Ok(histogram_pair(&format!("score distribution, {pair}"), &edges, (name_a, &a), (name_b, &b)))
}

fn sweep_svg(text: &str, metric: &str, ylabel: &str) -> Result<String> {
    let (h, rows) = table(text)?;
    let (var, val, model) = (col(&h, "variable")?, col(&h, "value")?, col(&h, "model")?);
    let (mean, std) = (col(&h, &format!("mean_{metric}"))?, col(&h, &format!("std_{metric}"))?);
    let variable = rows.first().map_or("value", |r| r[var].as_str()).to_string();

    let mut values: Vec<String> = Vec::new();
    for r in &rows {
        if !values.contains(&r[val]) {
            values.push(r[val].clone());
        }
    }
    let numeric = values.iter().all(|v| v.parse::<f64>().is_ok());
    let x_of = |v: &str| -> f64 {
        if numeric {
            v.parse().unwrap_or(f64::NAN)
        } else {
            values.iter().position(|u| u == v).map_or(f64::NAN, |i| i as f64)
        }
    };

    let mut by_model: Vec<(String, Series)> = Vec::new();
    for r in &rows {
        let idx = match by_model.iter().position(|(m, _)| *m == r[model]) {
            Some(i) => i,
            None => {
                by_model.push((r[model].clone(), Series { name: r[model].clone(), xs: vec![], ys: vec![], band: Some(vec![]) }));
                by_model.len() - 1
            }
        };
        let s = &mut by_model[idx].1;
        s.xs.push(x_of(&r[val]));
        s.ys.push(num(&r[mean])?);
        let sd = num(&r[std])?;
        s.band.as_mut().expect("band").push(if sd.is_finite() { sd } else { 0.0 });
    }
    Ok(LineChart {
        title: &format!("{ylabel} vs {variable}"),
        xlabel: &variable,
        ylabel,
        series: by_model.into_iter().map(|(_, s)| s).collect(),
        x_categories: (!numeric).then_some(values),
    }
    .render())
}

fn file_slug(label: &str) -> String {
    let mut out = String::new();
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// One chart per model label: mean train/test BCE and test accuracy by epoch.
fn curves_svgs(text: &str) -> Result<Vec<(String, String)>> {
    let (h, rows) = table(text)?;
    let (model, epoch) = (col(&h, "model")?, col(&h, "epoch")?);
    let cols = [col(&h, "train_bce")?, col(&h, "test_bce")?, col(&h, "test_acc")?];
    // label -> epoch -> (sums, count)
    let mut acc: BTreeMap<String, BTreeMap<usize, ([f64; 3], usize)>> = BTreeMap::new();
    for r in &rows {
        let e: usize = r[epoch].parse().map_err(|_| Error::Parse(format!("bad epoch '{}'", r[epoch])))?;
        let slot = acc.entry(r[model].clone()).or_default().entry(e).or_insert(([0.0; 3], 0));
        for (k, &c) in cols.iter().enumerate() {
            slot.0[k] += num(&r[c])?;
        }
        slot.1 += 1;
    }
    let mut out = Vec::new();
    for (label, epochs) in acc {
        let xs: Vec<f64> = epochs.keys().map(|&e| e as f64).collect();
        let series_of = |k: usize, name: &str| Series {
            name: name.to_string(),
            xs: xs.clone(),
            ys: epochs.values().map(|(s, n)| s[k] / *n as f64).collect(),
            band: None,
        };
        let svg = LineChart {
            title: &format!("learning curves, {label}"),
            xlabel: "epoch",
            ylabel: "BCE / accuracy",
            series: vec![series_of(0, "train BCE"), series_of(1, "test BCE"), series_of(2, "test acc")],
            x_categories: None,
        }
        .render();
        out.push((format!("curves_{}.svg", file_slug(&label)), svg));
    }
    Ok(out)
}

fn landscape_svg(text: &str, stem: &str) -> Result<String> {
    let (h, rows) = table(text)?;
    col(&h, "d_i")?;
    let (cj, cv) = (col(&h, "d_j")?, col(&h, "bce")?);
    let n = (rows.len() as f64).sqrt().round() as usize;
    if n < 2 || n * n != rows.len() {
        return Err(Error::Parse(format!("{stem}: expected a square lattice, got {} rows", rows.len())));
    }
    // rows are ordered with d_i outer; the heatmap wants d_i along x
    let mut values = vec![0.0; n * n];
    let mut offsets = Vec::with_capacity(n);
    for (k, r) in rows.iter().enumerate() {
        let (a, b) = (k / n, k % n);
        values[b * n + a] = num(&r[cv])?;
        if a == 0 {
            offsets.push(num(&r[cj])?);
        }
    }
    let step = offsets[1] - offsets[0];
    let range = (offsets[0] - step / 2.0, offsets[n - 1] + step / 2.0);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let contours = (1..=5).map(|k| (lo + (hi - lo) * f64::from(k) / 6.0, false)).collect();
    Ok(Heatmap {
        title: &format!("training BCE slice, {}", stem.trim_start_matches("landscape_")),
        xlabel: "Δθ_i (rad)",
        ylabel: "Δθ_j (rad)",
        x_range: range,
        y_range: range,
        nx: n,
        ny: n,
        values: &values,
        scale: ColorScale::Sequential { lo, hi },
        contours,
        points: Vec::new(),
    }
    .render())
}
