//! Scatter data and SVG renderings of point clouds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Coords;
use crate::io::read_points;

use super::manifest::Manifest;

const WIDTH_PX: f64 = 800.0;

/// SVG scatter of the first two coordinates, one `<circle>` per point.
///
/// The view box is the bounding box (y pointing up) so the aspect ratio is
/// the data's. `shade` in `[0, 1]` picks each marker's hue.
pub fn render_svg(coords: &Coords, shade: Option<&[f64]>) -> Result<String> {
    let n = coords.n();
    if n == 0 {
        return Err(Error::Empty("no points to plot".into()));
    }
    if coords.dim() > 2 {
        log::warn!("plotting only the first two of {} coordinates", coords.dim());
    }
    if let Some(s) = shade {
        if s.len() != n {
            return Err(Error::SizeMismatch { left: s.len(), right: n });
        }
    }
    let xy = |i: usize| -> (f64, f64) {
        let p = coords.row(i);
        (p[0], if p.len() > 1 { p[1] } else { 0.0 })
    };
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for i in 0..n {
        let (x, y) = xy(i);
        lo = [lo[0].min(x), lo[1].min(y)];
        hi = [hi[0].max(x), hi[1].max(y)];
    }
    let mut w = hi[0] - lo[0];
    let mut h = hi[1] - lo[1];
    let pad = 1e-9 * (1.0 + w.max(h));
    if w <= 0.0 {
        w = pad;
    }
    if h <= 0.0 {
        h = pad;
    }
    let radius = 0.004 * w.max(h);
    let height_px = (WIDTH_PX * h / w).clamp(1.0, 8.0 * WIDTH_PX);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH_PX}\" height=\"{height_px}\" viewBox=\"{} {} {} {}\" preserveAspectRatio=\"xMidYMid meet\">",
        lo[0],
        -hi[1],
        w,
        h
    );
    for i in 0..n {
        let (x, y) = xy(i);
        let fill = match shade {
            Some(s) => hue(s[i]),
            None => "#1f77b4".to_string(),
        };
        let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{}\" r=\"{radius}\" fill=\"{fill}\"/>", -y);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn hue(t: f64) -> String {
    // blue → red through green
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let r = (255.0 * t) as u8;
    let g = (255.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    let b = (255.0 * (1.0 - t)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn shade_by_first_coordinate(c: &Coords) -> Vec<f64> {
    let xs: Vec<f64> = c.rows().map(|p| p[0]).collect();
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    xs.iter().map(|x| (x - lo) / span).collect()
}

/// Renders the truth and every aligned embedding listed in a run manifest
/// (`file.truth`, `file.*.aligned`), one SVG panel each, coloured by the
/// truth's first coordinate so the panels can be compared point by point.
/// Each aligned panel also gets a side-by-side `x0,x1,...,y0,y1,...` table.
/// Returns the files written.
pub fn emit_plotdata(manifest_path: &Path) -> Result<Vec<PathBuf>> {
    let manifest = Manifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let truth_file = manifest
        .get_str("file.truth")
        .ok_or_else(|| Error::Empty(format!("{} lists no truth points", manifest_path.display())))?;
    let truth = read_points(&dir.join(truth_file))?;
    let shade = shade_by_first_coordinate(&truth);

    let mut written = Vec::new();
    let point_files: Vec<(String, String)> = manifest
        .iter()
        .filter(|(k, _)| *k == "file.truth" || (k.starts_with("file.") && k.ends_with(".aligned")))
        .filter_map(|(k, v)| v.as_str().map(|s| (k.to_string(), s.to_string())))
        .collect();
    for (key, file) in point_files {
        let path = dir.join(&file);
        let coords = read_points(&path)?;
        // embeddings of a component list which truth rows they cover
        let members_key = key.replace(".aligned", ".members");
        let rows: Vec<usize> = match manifest.get_str(&members_key).filter(|_| key != "file.truth") {
            Some(f) => read_members(&dir.join(f))?,
            None => (0..coords.n()).collect(),
        };
        if rows.len() != coords.n() || rows.iter().any(|&i| i >= truth.n()) {
            return Err(Error::SizeMismatch { left: coords.n(), right: truth.n() });
        }
        let colours: Vec<f64> = rows.iter().map(|&i| shade[i]).collect();
        let svg_path = path.with_extension("svg");
        std::fs::write(&svg_path, render_svg(&coords, Some(&colours))?)?;
        written.push(svg_path);
        if key.ends_with(".aligned") {
            let pair_path = path.with_extension("pairs.csv");
            std::fs::write(&pair_path, side_by_side(&truth.select(&rows), &coords))?;
            written.push(pair_path);
        }
    }
    if written.is_empty() {
        return Err(Error::Empty("no point files to plot".into()));
    }
    Ok(written)
}

fn read_members(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(k, l)| {
            l.trim().parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: k + 1,
                msg: format!("`{l}` is not an index"),
            })
        })
        .collect()
}

fn side_by_side(truth: &Coords, other: &Coords) -> String {
    let mut s = String::new();
    let head: Vec<String> =
        (0..truth.dim()).map(|k| format!("x{k}")).chain((0..other.dim()).map(|k| format!("y{k}"))).collect();
    s.push_str(&head.join(","));
    s.push('\n');
    for (a, b) in truth.rows().zip(other.rows()) {
        let cells: Vec<String> = a.iter().chain(b).map(|x| format!("{x}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
