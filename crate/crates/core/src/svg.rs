//! Minimal SVG writers for heatmaps, contours, line charts and histograms.
//! Output depends only on the inputs; numbers are printed at fixed precision.

use std::fmt::Write as _;

const W: f64 = 560.0;
const H: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColorScale {
    /// Blue (−1) → white (0) → red (+1).
    Diverging,
    /// White (lo) → dark purple (hi).
    Sequential { lo: f64, hi: f64 },
}

impl ColorScale {
    pub fn color(&self, v: f64) -> String {
        match *self {
            ColorScale::Diverging => {
                let t = v.clamp(-1.0, 1.0);
                let (lo, hi) = if t < 0.0 { ([255.0, 255.0, 255.0], [33.0, 102.0, 172.0]) } else { ([255.0, 255.0, 255.0], [178.0, 24.0, 43.0]) };
                rgb(lerp3(lo, hi, t.abs()))
            }
            ColorScale::Sequential { lo, hi } => {
                let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
                rgb(lerp3([255.0, 255.0, 255.0], [63.0, 0.0, 125.0], t))
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            ColorScale::Diverging => (-1.0, 1.0),
            ColorScale::Sequential { lo, hi } => (lo, hi),
        }
    }
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t]
}

fn rgb(c: [f64; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0].round() as u8, c[1].round() as u8, c[2].round() as u8)
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plot-area transform from data coordinates to pixels.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (W - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (H - MARGIN_T - MARGIN_B)
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let (l, r, t, b) = (MARGIN_L, W - MARGIN_R, MARGIN_T, H - MARGIN_B);
        let _ = writeln!(out, "<rect x=\"{l:.1}\" y=\"{t:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>", r - l, b - t);
        for k in 0..=4 {
            let fx = self.x0 + (self.x1 - self.x0) * f64::from(k) / 4.0;
            let fy = self.y0 + (self.y1 - self.y0) * f64::from(k) / 4.0;
            let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", self.px(fx), b + 15.0, tick(fx));
            let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", l - 5.0, self.py(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", (l + r) / 2.0, H - 12.0, escape(xlabel));
        let _ = writeln!(
            out,
            "<text x=\"15\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.1})\">{}</text>",
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(ylabel)
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// A heatmap of `values[iy * nx + ix]` over cell-centered lattice cells.
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub values: &'a [f64],
    pub scale: ColorScale,
    /// `(level, dashed)` iso-lines.
    pub contours: Vec<(f64, bool)>,
    pub points: Vec<([f64; 2], u8)>,
}

impl Heatmap<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, self.title);
        let f = Frame {
            x0: self.x_range.0,
            x1: self.x_range.1,
            y0: self.y_range.0,
            y1: self.y_range.1,
        };
        let dx = (self.x_range.1 - self.x_range.0) / self.nx as f64;
        let dy = (self.y_range.1 - self.y_range.0) / self.ny as f64;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let x = self.x_range.0 + ix as f64 * dx;
                let y = self.y_range.0 + (iy + 1) as f64 * dy;
                let _ = writeln!(
                    out,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                    f.px(x),
                    f.py(y),
                    f.px(x + dx) - f.px(x) + 0.3,
                    f.py(y - dy) - f.py(y) + 0.3,
                    self.scale.color(self.values[iy * self.nx + ix])
                );
            }
        }
        for &(level, dashed) in &self.contours {
            let segs = marching_squares(self.values, self.nx, self.ny, level);
            if segs.is_empty() {
                continue;
            }
            let mut d = String::new();
            for [a, b] in segs {
                let ax = self.x_range.0 + (a[0] + 0.5) * dx;
                let ay = self.y_range.0 + (a[1] + 0.5) * dy;
                let bx = self.x_range.0 + (b[0] + 0.5) * dx;
                let by = self.y_range.0 + (b[1] + 0.5) * dy;
                let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", f.px(ax), f.py(ay), f.px(bx), f.py(by));
            }
            let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
            let _ = writeln!(out, "<path class=\"contour\" data-level=\"{level}\" d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"{dash}/>");
        }
        for (p, y) in &self.points {
            let (fill, stroke) = if *y == 1 { ("#b2182b", "white") } else { ("#2166ac", "white") };
            let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.5\"/>", f.px(p[0]), f.py(p[1]));
        }
        f.axes(&mut out, self.xlabel, self.ylabel);
        colorbar(&mut out, self.scale);
        out.push_str("</svg>\n");
        out
    }
}

fn colorbar(out: &mut String, scale: ColorScale) {
    let (lo, hi) = scale.bounds();
    let x = W - MARGIN_R + 20.0;
    let steps = 40;
    let h = (H - MARGIN_T - MARGIN_B) / f64::from(steps);
    for k in 0..steps {
        let v = lo + (hi - lo) * (f64::from(k) + 0.5) / f64::from(steps);
        let y = H - MARGIN_B - f64::from(k + 1) * h;
        let _ = writeln!(out, "<rect x=\"{x:.1}\" y=\"{y:.2}\" width=\"15\" height=\"{:.2}\" fill=\"{}\"/>", h + 0.3, scale.color(v));
    }
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", x + 18.0, MARGIN_T + 8.0, tick(hi));
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", x + 18.0, H - MARGIN_B, tick(lo));
}

/// Iso-line segments at `level` in lattice index coordinates
/// (`(ix, iy)` with fractional positions along cell edges).
pub fn marching_squares(values: &[f64], nx: usize, ny: usize, level: f64) -> Vec<[[f64; 2]; 2]> {
    let v = |ix: usize, iy: usize| values[iy * nx + ix] - level;
    let mut segs = Vec::new();
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let c = [
                ([ix as f64, iy as f64], v(ix, iy)),
                ([ix as f64 + 1.0, iy as f64], v(ix + 1, iy)),
                ([ix as f64 + 1.0, iy as f64 + 1.0], v(ix + 1, iy + 1)),
                ([ix as f64, iy as f64 + 1.0], v(ix, iy + 1)),
            ];
            let mut crossings = Vec::with_capacity(4);
            for k in 0..4 {
                let (pa, va) = c[k];
                let (pb, vb) = c[(k + 1) % 4];
                if (va < 0.0) != (vb < 0.0) {
                    let t = va / (va - vb);
                    crossings.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                }
            }
            match crossings.len() {
                2 => segs.push([crossings[0], crossings[1]]),
                4 => {
                    // saddle: pair by the sign of the cell mean
                    let mean = c.iter().map(|(_, x)| x).sum::<f64>() / 4.0;
                    if (mean < 0.0) == (c[0].1 < 0.0) {
                        segs.push([crossings[0], crossings[1]]);
                        segs.push([crossings[2], crossings[3]]);
                    } else {
                        segs.push([crossings[3], crossings[0]]);
                        segs.push([crossings[1], crossings[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

pub struct Series {
    pub name: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Half-width of the shaded band around `ys`.
    pub band: Option<Vec<f64>>,
}

pub struct LineChart<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub series: Vec<Series>,
    /// Tick labels for categorical x axes (positions 0, 1, …).
    pub x_categories: Option<Vec<String>>,
}

impl LineChart<'_> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, self.title);
        let finite = |v: &f64| v.is_finite();
        let xs: Vec<f64> = self.series.iter().flat_map(|s| s.xs.iter().copied()).filter(finite).collect();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for (i, y) in s.ys.iter().enumerate() {
                let b = s.band.as_ref().map_or(0.0, |b| b[i]);
                ys.push(y - b);
                ys.push(y + b);
            }
        }
        ys.retain(finite);
        let (mut x0, mut x1) = min_max(&xs);
        let (mut y0, mut y1) = min_max(&ys);
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-9 {
            y0 -= 0.05;
            y1 += 0.05;
        }
        let pad = 0.05 * (y1 - y0);
        let f = Frame { x0, x1, y0: y0 - pad, y1: y1 + pad };
        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            if let Some(band) = &s.band {
                let mut d = String::new();
                for (i, (&x, &y)) in s.xs.iter().zip(&s.ys).enumerate() {
                    let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, f.px(x), f.py(y + band[i]));
                }
                for i in (0..s.xs.len()).rev() {
                    let _ = write!(d, "L{:.2} {:.2}", f.px(s.xs[i]), f.py(s.ys[i] - band[i]));
                }
                let _ = writeln!(out, "<path d=\"{d}Z\" fill=\"{color}\" fill-opacity=\"0.2\" stroke=\"none\"/>");
            }
            let mut d = String::new();
            let mut pen_down = false;
            for (&x, &y) in s.xs.iter().zip(&s.ys) {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let _ = write!(d, "{}{:.2} {:.2}", if pen_down { "L" } else { "M" }, f.px(x), f.py(y));
                pen_down = true;
            }
            let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>");
            let ly = MARGIN_T + 12.0 + 14.0 * k as f64;
            let lx = W - MARGIN_R + 5.0;
            let _ = writeln!(out, "<line x1=\"{lx:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>", ly - 4.0, lx + 12.0, ly - 4.0);
            let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"9\">{}</text>", lx + 15.0, escape(&s.name));
        }
        if let Some(cats) = &self.x_categories {
            for (i, c) in cats.iter().enumerate() {
                let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"9\">{}</text>", f.px(i as f64), H - MARGIN_B + 28.0, escape(c));
            }
        }
        f.axes(&mut out, self.xlabel, self.ylabel);
        out.push_str("</svg>\n");
        out
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 1.0);
    }
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Side-by-side bars of two histograms over shared bin edges.
pub fn histogram_pair(title: &str, edges: &[f64], a: (&str, &[usize]), b: (&str, &[usize])) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let ymax = a.1.iter().chain(b.1).copied().max().unwrap_or(1).max(1) as f64;
    let f = Frame {
        x0: edges[0],
        x1: edges[edges.len() - 1],
        y0: 0.0,
        y1: ymax * 1.05,
    };
    for (k, (name, counts)) in [a, b].into_iter().enumerate() {
        let color = PALETTE[k];
        for (i, &c) in counts.iter().enumerate() {
            let lo = edges[i];
            let w = (edges[i + 1] - lo) / 2.0;
            let x = lo + w * k as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\" fill-opacity=\"0.8\"/>",
                f.px(x),
                f.py(c as f64),
                f.px(x + w) - f.px(x),
                f.py(0.0) - f.py(c as f64)
            );
        }
        let ly = MARGIN_T + 12.0 + 14.0 * k as f64;
        let lx = W - MARGIN_R + 5.0;
        let _ = writeln!(out, "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"10\" height=\"8\" fill=\"{color}\"/>", ly - 8.0);
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"9\">{}</text>", lx + 14.0, escape(name));
    }
    f.axes(&mut out, "decision score f(x)", "count");
    out.push_str("</svg>\n");
    out
}
