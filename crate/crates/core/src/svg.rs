//! Self-contained SVG line charts with linear or base-10 log axes.
//!
//! Output depends only on the inputs: coordinates are printed with a fixed
//! number of decimals and elements are emitted in input order.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FigureError {
    #[error("series `{series}` has a non-finite value at {at}")]
    NonFinite { series: String, at: String },
    #[error("series `{series}` has non-positive value {value} at {at} on a log axis")]
    NonPositiveOnLog { series: String, at: String, value: f64 },
    #[error("figure has no data")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

/// How x values are printed in tick labels and error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XKind {
    /// x is a (possibly fractional) calendar year.
    Year,
    /// x is a plain number.
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub side: Side,
}

impl SeriesSpec {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            style: Style::Line,
            side: Side::Left,
        }
    }

    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            style: Style::Markers,
            ..Self::line(label, points)
        }
    }

    pub fn on_right(mut self) -> Self {
        self.side = Side::Right;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub label: String,
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub x: f64,
    pub text: String,
}

/// Declarative figure description.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub title: String,
    pub x_label: String,
    pub x_kind: XKind,
    pub x_scale: Scale,
    pub left: AxisSpec,
    pub right: Option<AxisSpec>,
    pub annotations: Vec<Annotation>,
    pub width: f64,
    pub height: f64,
}

impl Layout {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, left: AxisSpec) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            x_kind: XKind::Year,
            x_scale: Scale::Linear,
            left,
            right: None,
            annotations: Vec::new(),
            width: 800.0,
            height: 500.0,
        }
    }
}

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 80.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Maps data values onto a pixel interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub pixel_start: f64,
    pub pixel_end: f64,
}

impl Axis {
    /// Axis covering `values`. Log axes snap to whole decades.
    pub fn fit(scale: Scale, values: impl IntoIterator<Item = f64>, pixel_start: f64, pixel_end: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let t = transform(scale, v);
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        match scale {
            Scale::Log10 => {
                lo = lo.floor();
                hi = hi.ceil();
                if hi <= lo {
                    hi = lo + 1.0;
                }
            }
            Scale::Linear => {
                if hi <= lo {
                    let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
                    lo -= pad;
                    hi += pad;
                } else {
                    let pad = (hi - lo) * 0.05;
                    lo -= pad;
                    hi += pad;
                }
            }
        }
        Self {
            scale,
            min: lo,
            max: hi,
            pixel_start,
            pixel_end,
        }
    }

    /// Pixel position of data value `v`.
    pub fn position(&self, v: f64) -> f64 {
        let t = transform(self.scale, v);
        self.pixel_start + (t - self.min) / (self.max - self.min) * (self.pixel_end - self.pixel_start)
    }

    /// Tick values: every decade on log axes, about six round steps on linear ones.
    pub fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log10 => {
                let span = (self.max - self.min) as i64;
                let stride = (span / 8).max(1);
                (self.min as i64..=self.max as i64)
                    .step_by(stride as usize)
                    .map(|e| 10f64.powi(e as i32))
                    .collect()
            }
            Scale::Linear => {
                let raw = (self.max - self.min) / 6.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|s| *s >= raw)
                    .unwrap_or(10.0 * mag);
                let mut t = (self.min / step).ceil() * step;
                let mut out = Vec::new();
                while t <= self.max + 1e-9 * step {
                    out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
                    t += step;
                }
                out
            }
        }
    }
}

fn transform(scale: Scale, v: f64) -> f64 {
    match scale {
        Scale::Linear => v,
        Scale::Log10 => v.log10(),
    }
}

fn fmt_x(kind: XKind, x: f64) -> String {
    match kind {
        XKind::Year => {
            let year = x.floor();
            let frac = x - year;
            if frac == 0.0 {
                format!("{year:.0}")
            } else {
                let day = (frac * 365.25).floor() as u32;
                chrono::NaiveDate::from_yo_opt(year as i32, day + 1)
                    .map(|d| d.to_string())
                    .unwrap_or_else(|| format!("{x:.4}"))
            }
        }
        XKind::Value => format!("{x}"),
    }
}

fn fmt_tick(scale: Scale, v: f64) -> String {
    match scale {
        Scale::Log10 => {
            let e = v.log10().round() as i32;
            if (-2..=4).contains(&e) {
                format!("{v}")
            } else {
                format!("1e{e}")
            }
        }
        Scale::Linear => {
            if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-3) {
                format!("{v:.1e}")
            } else {
                let s = format!("{v:.3}");
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn check(series: &[SeriesSpec], layout: &Layout) -> Result<(), FigureError> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(FigureError::Empty);
    }
    for s in series {
        let y_scale = match s.side {
            Side::Left => layout.left.scale,
            Side::Right => layout.right.as_ref().map_or(layout.left.scale, |a| a.scale),
        };
        for &(x, y) in &s.points {
            let at = fmt_x(layout.x_kind, x);
            if !x.is_finite() || !y.is_finite() {
                return Err(FigureError::NonFinite {
                    series: s.label.clone(),
                    at,
                });
            }
            if (y_scale == Scale::Log10 && y <= 0.0) || (layout.x_scale == Scale::Log10 && x <= 0.0) {
                return Err(FigureError::NonPositiveOnLog {
                    series: s.label.clone(),
                    at,
                    value: y,
                });
            }
        }
    }
    Ok(())
}

/// Renders the series into an SVG document.
pub fn emit_figure(series: &[SeriesSpec], layout: &Layout) -> Result<String, FigureError> {
    check(series, layout)?;
    let (w, h) = (layout.width, layout.height);
    let (x0, x1) = (MARGIN_LEFT, w - MARGIN_RIGHT);
    let (y0, y1) = (h - MARGIN_BOTTOM, MARGIN_TOP);

    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let x_axis = Axis::fit(layout.x_scale, xs, x0, x1);
    let side_values = |side: Side| {
        series
            .iter()
            .filter(move |s| s.side == side || (side == Side::Left && layout.right.is_none()))
            .flat_map(|s| s.points.iter().map(|p| p.1))
    };
    let left = Axis::fit(layout.left.scale, side_values(Side::Left), y0, y1);
    let right = layout
        .right
        .as_ref()
        .map(|spec| Axis::fit(spec.scale, side_values(Side::Right), y0, y1));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        escape(&layout.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );

    out.push_str("<g class=\"x-ticks\">\n");
    for t in x_axis.ticks() {
        let px = x_axis.position(t);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            match layout.x_kind {
                XKind::Year => format!("{t:.0}"),
                XKind::Value => fmt_tick(layout.x_scale, t),
            }
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        h - 15.0,
        escape(&layout.x_label)
    );

    let mut axis_block = |axis: &Axis, spec: &AxisSpec, side: Side| {
        let (px, dir, anchor) = match side {
            Side::Left => (x0, -1.0, "end"),
            Side::Right => (x1, 1.0, "start"),
        };
        let _ = writeln!(
            out,
            "<g class=\"y-ticks-{}\">",
            if side == Side::Left { "left" } else { "right" }
        );
        for t in axis.ticks() {
            let py = axis.position(t);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
                px + 5.0 * dir,
                px + 8.0 * dir,
                py + 4.0,
                fmt_tick(axis.scale, t)
            );
        }
        out.push_str("</g>\n");
        let lx = px + 60.0 * dir;
        let ly = (y0 + y1) / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
            escape(&spec.label)
        );
    };
    axis_block(&left, &layout.left, Side::Left);
    if let (Some(axis), Some(spec)) = (&right, &layout.right) {
        axis_block(axis, spec, Side::Right);
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let axis = match (s.side, &right) {
            (Side::Right, Some(r)) => r,
            _ => &left,
        };
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|&(x, y)| (x_axis.position(x), axis.position(y)))
            .collect();
        match s.style {
            Style::Line => {
                let mut d = String::new();
                for (k, (px, py)) in pts.iter().enumerate() {
                    let _ = write!(d, "{}{px:.2},{py:.2}", if k == 0 { "M" } else { " L" });
                }
                let _ = writeln!(
                    out,
                    r#"<path class="series" data-label="{}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    escape(&s.label)
                );
            }
            Style::Markers => {
                let _ = writeln!(
                    out,
                    r#"<g class="series" data-label="{}" fill="{color}">"#,
                    escape(&s.label)
                );
                for (px, py) in pts {
                    let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3"/>"#);
                }
                out.push_str("</g>\n");
            }
        }
        let ly = y1 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<g class="legend"><rect x="{:.2}" y="{:.2}" width="12" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            x0 + 10.0,
            ly - 4.0,
            x0 + 28.0,
            ly,
            escape(&s.label)
        );
    }

    for a in &layout.annotations {
        let px = x_axis.position(a.x);
        let _ = writeln!(
            out,
            r#"<g class="annotation"><line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="3,3"/><text x="{:.2}" y="{:.2}" font-size="10" transform="rotate(-90 {:.2} {:.2})">{}</text></g>"#,
            px - 2.0,
            y0 - 6.0,
            px - 2.0,
            y0 - 6.0,
            escape(&a.text)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(scale: Scale) -> Layout {
        Layout::new(
            "t",
            "year",
            AxisSpec {
                label: "y".into(),
                scale,
            },
        )
    }

    #[test]
    fn constant_series_draws_horizontal_path() {
        let s = SeriesSpec::line("flat", vec![(2000.0, 3.0), (2001.0, 3.0), (2002.0, 3.0)]);
        let svg = emit_figure(&[s], &layout(Scale::Linear)).unwrap();
        let path = svg.lines().find(|l| l.starts_with("<path class=\"series\"")).unwrap();
        let d = path.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<&str> = d.split(' ').map(|seg| seg.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn log_ticks_equally_spaced() {
        let axis = Axis::fit(Scale::Log10, [1.0, 10.0, 100.0], 0.0, 300.0);
        let pos: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|&v| axis.position(v)).collect();
        assert!(((pos[1] - pos[0]) - (pos[2] - pos[1])).abs() < 1e-9);
        assert_eq!(axis.ticks(), vec![1.0, 10.0, 100.0]);
    }

    #[test]
    fn nan_is_reported_with_series_and_date() {
        let s = SeriesSpec::line("K", vec![(2000.0, 1.0), (2001.0, f64::NAN)]);
        assert_eq!(
            emit_figure(&[s], &layout(Scale::Linear)),
            Err(FigureError::NonFinite {
                series: "K".into(),
                at: "2001".into()
            })
        );
        let s = SeriesSpec::line("K", vec![(2000.0, 0.0)]);
        assert!(matches!(
            emit_figure(&[s], &layout(Scale::Log10)),
            Err(FigureError::NonPositiveOnLog { .. })
        ));
    }

    #[test]
    fn annotations_and_legend_present() {
        let mut l = layout(Scale::Linear);
        l.annotations.push(Annotation {
            x: 2000.5,
            text: "(0) 1".into(),
        });
        let svg = emit_figure(&[SeriesSpec::line("Y_papers", vec![(2000.0, 1.0), (2001.0, 2.0)])], &l).unwrap();
        assert_eq!(svg.matches("class=\"annotation\"").count(), 1);
        assert!(svg.contains(">Y_papers</text>"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn output_is_deterministic() {
        let s = vec![SeriesSpec::markers("a", vec![(1.0, 2.0), (3.0, 4.0)]).on_right()];
        let mut l = layout(Scale::Linear);
        l.right = Some(AxisSpec {
            label: "r".into(),
            scale: Scale::Log10,
        });
        assert_eq!(emit_figure(&s, &l).unwrap(), emit_figure(&s, &l).unwrap());
    }
}
