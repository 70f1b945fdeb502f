//! Minimal static SVG charts. Coordinates are printed with two decimals so
//! the output is byte-stable.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        let t = if self.log_x {
            (x.ln() - lo.ln()) / (hi.ln() - lo.ln())
        } else {
            (x - lo) / (hi - lo)
        };
        self.x0 + t * self.w
    }

    fn ty(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.y0 + self.h - (y - lo) / (hi - lo) * self.h
    }

    fn axes(&self, out: &mut String) {
        let (x1, y1) = (self.x0 + self.w, self.y0 + self.h);
        let _ = writeln!(
            out,
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}" fill="none" stroke="black"/>"#,
            self.x0, self.y0, self.x0, y1, x1, y1
        );
    }

    fn x_tick(&self, out: &mut String, x: f64, label: &str) {
        self.x_tick_anchored(out, x, label, "middle");
    }

    fn x_tick_anchored(&self, out: &mut String, x: f64, label: &str, anchor: &str) {
        let px = self.tx(x);
        let y1 = self.y0 + self.h;
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y1:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="{anchor}">{label}</text>"#,
            y1 + 4.0,
            y1 + 16.0
        );
    }

    fn y_tick(&self, out: &mut String, y: f64, label: &str) {
        let py = self.ty(y);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#,
            self.x0 - 4.0,
            self.x0,
            self.x0 - 6.0,
            py + 4.0
        );
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn labels(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn short(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn polyline(out: &mut String, frame: &Frame, points: &[(f64, f64)], color: &str) {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { 'M' } else { 'L' }, frame.tx(*x), frame.ty(*y));
    }
    let _ = writeln!(
        out,
        r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
        d.trim_end()
    );
}

/// Line chart over a log-scaled x axis with y in `y_range`.
pub fn log_x_line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    y_range: (f64, f64),
) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (x_lo, x_hi) = xs.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let frame = Frame {
        x0: LEFT,
        y0: TOP,
        w: WIDTH - LEFT - RIGHT,
        h: HEIGHT - TOP - BOTTOM,
        x_range: (x_lo, x_hi),
        y_range,
        log_x: true,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out);
    let mut decade = 10f64.powf(x_lo.log10().floor());
    while decade <= x_hi * 1.0001 {
        for m in [1.0, 2.0, 5.0] {
            let x = decade * m;
            if x >= x_lo * 0.9999 && x <= x_hi * 1.0001 {
                frame.x_tick(&mut out, x, &short(x));
            }
        }
        decade *= 10.0;
    }
    for i in 0..=4 {
        let y = y_range.0 + (y_range.1 - y_range.0) * i as f64 / 4.0;
        frame.y_tick(&mut out, y, &short(y));
    }
    for s in series {
        polyline(&mut out, &frame, s.points, s.color);
    }
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 190.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{y:.2}" font-size="11">{}</text>"#,
            y - 4.0,
            x + 18.0,
            y - 4.0,
            s.color,
            x + 24.0,
            escape(s.name)
        );
    }
    labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// Grid of bar charts sharing the x axis (state index); each panel is
/// scaled to its own maximum.
pub fn bar_panels(title: &str, x_label: &str, panels: &[(String, &[f64])], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns).max(1);
    let cell_w = (WIDTH - LEFT - RIGHT) / columns as f64;
    let cell_h = (HEIGHT - TOP - BOTTOM) / rows as f64;
    let mut out = String::new();
    header(&mut out, title);
    for (idx, (label, values)) in panels.iter().enumerate() {
        let (r, c) = (idx / columns, idx % columns);
        let frame = Frame {
            x0: LEFT + c as f64 * cell_w + 6.0,
            y0: TOP + r as f64 * cell_h + 18.0,
            w: cell_w - 12.0,
            h: cell_h - 36.0,
            x_range: (0.0, values.len().max(1) as f64),
            y_range: (0.0, values.iter().copied().fold(0.0, f64::max).max(1e-300)),
            log_x: false,
        };
        frame.axes(&mut out);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            frame.x0 + frame.w / 2.0,
            frame.y0 - 4.0,
            escape(label)
        );
        let bar = frame.w / values.len().max(1) as f64;
        for (k, v) in values.iter().enumerate() {
            let top = frame.ty(*v);
            let height = frame.y0 + frame.h - top;
            if height > 0.005 {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{top:.2}" width="{bar:.2}" height="{height:.2}" fill="steelblue"/>"#,
                    frame.tx(k as f64)
                );
            }
        }
        let last = values.len().saturating_sub(1) as f64;
        // End labels are anchored inwards so neighbouring panels don't collide.
        frame.x_tick_anchored(&mut out, 0.5, "0", "start");
        frame.x_tick_anchored(&mut out, last + 0.5, &short(last), "end");
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    out.push_str("</svg>\n");
    out
}

/// Lorenz curve against the line of equality.
pub fn lorenz_chart(title: &str, points: &[(f64, f64)], gini: f64) -> String {
    let frame = Frame {
        x0: LEFT,
        y0: TOP,
        w: HEIGHT - TOP - BOTTOM,
        h: HEIGHT - TOP - BOTTOM,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        log_x: false,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out);
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        frame.x_tick(&mut out, v, &short(v));
        frame.y_tick(&mut out, v, &short(v));
    }
    polyline(&mut out, &frame, &[(0.0, 0.0), (1.0, 1.0)], "firebrick");
    polyline(&mut out, &frame, points, "steelblue");
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13">Gini = {gini:.4}</text>"#,
        frame.x0 + frame.w + 24.0,
        TOP + 30.0
    );
    labels(&mut out, "cumulative population", "cumulative income");
    out.push_str("</svg>\n");
    out
}
