use std::path::Path;

use super::{format_decimal, write_file, ExportError};
use crate::stats::AnnualPoint;

/// Canvas and plot-area placement of the annual chart, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGeometry {
    pub width: f64,
    pub height: f64,
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl ChartGeometry {
    pub const STANDARD: ChartGeometry =
        ChartGeometry { width: 960.0, height: 540.0, left: 80.0, right: 80.0, top: 40.0, bottom: 70.0 };

    pub fn plot_width(&self) -> f64 {
        self.width - self.left - self.right
    }

    pub fn plot_height(&self) -> f64 {
        self.height - self.top - self.bottom
    }

    /// y of the plot baseline.
    pub fn baseline(&self) -> f64 {
        self.height - self.bottom
    }
}

fn px(v: f64) -> String {
    format_decimal(v, 2)
}

fn scaled(value: f64, max: f64, span: f64) -> f64 {
    if max > 0.0 {
        value / max * span
    } else {
        0.0
    }
}

/// Bars of yearly citations on the left axis and a line of mean citations per article on
/// the right axis. Each year gets an equal slot; bars fill their slot.
pub fn annual_svg_string(series: &[AnnualPoint]) -> Result<String, ExportError> {
    if series.is_empty() {
        return Err(ExportError::EmptySeries);
    }
    let geo = ChartGeometry::STANDARD;
    let (plot_w, plot_h, base) = (geo.plot_width(), geo.plot_height(), geo.baseline());
    let right_x = geo.left + plot_w;
    let slot = plot_w / series.len() as f64;
    let max_citations = series.iter().map(|p| p.citations).max().unwrap_or(0) as f64;
    let max_mean = series.iter().map(|p| p.mean_citations_per_article).fold(0.0, f64::max);

    let mut out = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = geo.width,
        h = geo.height
    );
    for (i, p) in series.iter().enumerate() {
        let x = geo.left + slot * i as f64;
        let h = scaled(p.citations as f64, max_citations, plot_h);
        out.push_str(&format!(
            "<rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4c72b0\" stroke=\"white\"/>\n",
            px(x),
            px(base - h),
            px(slot),
            px(h)
        ));
        out.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(x + slot / 2.0),
            px(base + 18.0),
            p.year
        ));
    }
    let points: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = geo.left + slot * (i as f64 + 0.5);
            format!("{},{}", px(x), px(base - scaled(p.mean_citations_per_article, max_mean, plot_h)))
        })
        .collect();
    out.push_str(&format!(
        "<polyline class=\"mean\" points=\"{}\" fill=\"none\" stroke=\"#dd8452\" stroke-width=\"2\"/>\n",
        points.join(" ")
    ));

    out.push_str(&format!(
        "<line class=\"axis\" x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line class=\"axis\" x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line class=\"axis\" x1=\"{r}\" y1=\"{t}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = px(geo.left),
        r = px(right_x),
        t = px(geo.top),
        b = px(base)
    ));
    for frac in [0.0, 0.5, 1.0] {
        let y = px(base - frac * plot_h);
        out.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{y}\" text-anchor=\"end\">{}</text>\n",
            px(geo.left - 6.0),
            format_decimal(frac * max_citations, 1)
        ));
        out.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{y}\" text-anchor=\"start\">{}</text>\n",
            px(right_x + 6.0),
            format_decimal(frac * max_mean, 2)
        ));
    }
    let mid_y = px(geo.top + plot_h / 2.0);
    out.push_str(&format!(
        "<text class=\"axis-label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">Year</text>\n\
         <text class=\"axis-label\" x=\"20\" y=\"{mid_y}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {mid_y})\">Citations</text>\n\
         <text class=\"axis-label\" x=\"{rx}\" y=\"{mid_y}\" text-anchor=\"middle\" transform=\"rotate(90 {rx} {mid_y})\">Mean citations per article</text>\n\
         </svg>\n",
        px(geo.left + plot_w / 2.0),
        px(geo.height - 20.0),
        rx = px(geo.width - 20.0),
    ));
    Ok(out)
}

pub fn render_annual_svg(series: &[AnnualPoint], path: &Path) -> Result<(), ExportError> {
    write_file(path, &annual_svg_string(series)?)
}
