//! Static SVG top-down views of flight traces and validation runs.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::sim::{Outcome, RoomConfig, Wall};

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("CSV has no data rows")]
    Empty,
    #[error("unrecognised CSV header (expected a path trace or validation export)")]
    UnknownFormat,
    #[error("malformed CSV: {0}")]
    Malformed(String),
}

/// One decision tick of a path trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub x: f64,
    pub y: f64,
    /// Action node index that set the rudder, `None` when held.
    pub mode: Option<usize>,
}

/// Start pose and result of one validation run.
#[derive(Clone, Debug, PartialEq)]
pub struct StartPoint {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub outcome: Outcome,
}

const SCALE: f64 = 60.0;
const MARGIN: f64 = 30.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn outcome_colour(o: Outcome) -> &'static str {
    match o {
        Outcome::Success => "#2ca02c",
        Outcome::Crash => "#d62728",
        Outcome::Timeout => "#ff7f0e",
    }
}

struct Canvas<'a> {
    room: &'a RoomConfig,
    body: String,
}

impl<'a> Canvas<'a> {
    fn new(room: &'a RoomConfig) -> Self {
        let mut c = Canvas {
            room,
            body: String::new(),
        };
        c.draw_room();
        c
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + x * SCALE, MARGIN + (self.room.length - y) * SCALE)
    }

    fn draw_room(&mut self) {
        let (x0, y0) = self.px(0.0, self.room.length);
        let (w, h) = (self.room.width * SCALE, self.room.length * SCALE);
        let _ = writeln!(
            self.body,
            r##"<rect class="walls" x="{x0:.2}" y="{y0:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#333" stroke-width="3"/>"##
        );
        let win = &self.room.window;
        let (cx, cy) = self.room.window_centre();
        let half = win.width / 2.0;
        let (a, b) = match win.wall {
            Wall::North | Wall::South => ((cx - half, cy), (cx + half, cy)),
            Wall::East | Wall::West => ((cx, cy - half), (cx, cy + half)),
        };
        let (ax, ay) = self.px(a.0, a.1);
        let (bx, by) = self.px(b.0, b.1);
        let _ = writeln!(
            self.body,
            r##"<line class="window" x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="#00a0ff" stroke-width="7"/>"##
        );
    }

    fn finish(self) -> String {
        let w = self.room.width * SCALE + 2.0 * MARGIN;
        let h = self.room.length * SCALE + 2.0 * MARGIN;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Top-down view of one flight: the path is split into runs of equal
/// decision mode, each drawn in its own style (dashed grey while the rudder
/// is held). The start is a circle; the end marker is coloured by outcome.
pub fn trace_svg(points: &[TracePoint], room: &RoomConfig) -> Result<String, PlotError> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(PlotError::Empty),
    };
    let mut c = Canvas::new(room);
    let mut modes: BTreeMap<usize, &str> = BTreeMap::new();
    let mut start = 0;
    while start < points.len() {
        let mode = points[start].mode;
        let mut end = start;
        while end + 1 < points.len() && points[end + 1].mode == mode {
            end += 1;
        }
        // join onto the next run's first point so the path is continuous
        let stop = (end + 1).min(points.len() - 1);
        let coords: Vec<String> = points[start..=stop]
            .iter()
            .map(|p| {
                let (x, y) = c.px(p.x, p.y);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let style = match mode {
            Some(m) => {
                let n = modes.len();
                let colour = *modes.entry(m).or_insert(PALETTE[n % PALETTE.len()]);
                format!(r#"stroke="{colour}" stroke-width="2""#)
            }
            None => r##"stroke="#888" stroke-width="2" stroke-dasharray="5,4""##.to_string(),
        };
        let label = mode.map_or_else(|| "hold".to_string(), |m| m.to_string());
        let _ = writeln!(
            c.body,
            r#"<polyline class="path" data-mode="{label}" fill="none" {style} points="{}"/>"#,
            coords.join(" ")
        );
        start = end + 1;
    }
    let (sx, sy) = c.px(first.x, first.y);
    let _ = writeln!(
        c.body,
        r##"<circle class="start" cx="{sx:.2}" cy="{sy:.2}" r="5" fill="#000"/>"##
    );
    let outcome = infer_outcome(last, room);
    let (ex, ey) = c.px(last.x, last.y);
    let _ = writeln!(
        c.body,
        r#"<rect class="end" data-outcome="{outcome}" x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/>"#,
        ex - 5.0,
        ey - 5.0,
        outcome_colour(outcome)
    );
    let mut legend_y = 16.0;
    for (m, colour) in &modes {
        let _ = writeln!(
            c.body,
            r#"<text x="4" y="{legend_y:.0}" font-size="11" fill="{colour}">action {m}</text>"#
        );
        legend_y += 13.0;
    }
    Ok(c.finish())
}

/// A trace ends on a wall when it crashed or passed the window, and inside
/// the room when it timed out.
fn infer_outcome(p: &TracePoint, room: &RoomConfig) -> Outcome {
    let b = room.bounds();
    let tol = 1e-6;
    let wall = if (p.y - b.y1).abs() < tol {
        Some(Wall::North)
    } else if (p.y - b.y0).abs() < tol {
        Some(Wall::South)
    } else if (p.x - b.x1).abs() < tol {
        Some(Wall::East)
    } else if (p.x - b.x0).abs() < tol {
        Some(Wall::West)
    } else {
        None
    };
    match wall {
        Some(w) if room.in_window_span(w, p.x, p.y) => Outcome::Success,
        Some(_) => Outcome::Crash,
        None => Outcome::Timeout,
    }
}

/// Start positions of validation runs, coloured by outcome, with a short
/// tick showing the initial heading.
pub fn validation_svg(starts: &[StartPoint], room: &RoomConfig) -> Result<String, PlotError> {
    if starts.is_empty() {
        return Err(PlotError::Empty);
    }
    let mut c = Canvas::new(room);
    for s in starts {
        let (x, y) = c.px(s.x, s.y);
        let (hx, hy) = c.px(s.x + 0.2 * s.heading.cos(), s.y + 0.2 * s.heading.sin());
        let colour = outcome_colour(s.outcome);
        let _ = writeln!(
            c.body,
            r#"<g class="start" data-outcome="{}"><circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{colour}"/><line x1="{x:.2}" y1="{y:.2}" x2="{hx:.2}" y2="{hy:.2}" stroke="{colour}" stroke-width="1.5"/></g>"#,
            s.outcome
        );
    }
    Ok(c.finish())
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, PlotError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| PlotError::Malformed(format!("missing column `{name}`")))
}

fn number(record: &csv::StringRecord, i: usize, line: usize) -> Result<f64, PlotError> {
    let field = record.get(i).unwrap_or("");
    field
        .parse()
        .map_err(|_| PlotError::Malformed(format!("row {line}: `{field}` is not a number")))
}

/// Renders either a path-trace CSV or a validation CSV, told apart by header.
pub fn plot_csv(text: &str, room: &RoomConfig) -> Result<String, PlotError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| PlotError::Malformed(e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(PlotError::Empty);
    }
    let rows = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PlotError::Malformed(e.to_string()))?;
    if headers.iter().any(|h| h == "mode") {
        let (xi, yi, mi) = (column(&headers, "x")?, column(&headers, "y")?, column(&headers, "mode")?);
        let points = rows
            .iter()
            .enumerate()
            .map(|(n, r)| {
                let mode = match r.get(mi).unwrap_or("") {
                    "hold" => None,
                    m => Some(m.parse().map_err(|_| PlotError::Malformed(format!("row {}: bad mode `{m}`", n + 2)))?),
                };
                Ok(TracePoint {
                    x: number(r, xi, n + 2)?,
                    y: number(r, yi, n + 2)?,
                    mode,
                })
            })
            .collect::<Result<Vec<_>, PlotError>>()?;
        trace_svg(&points, room)
    } else if headers.iter().any(|h| h == "init_x") {
        let (xi, yi, hi, oi) = (
            column(&headers, "init_x")?,
            column(&headers, "init_y")?,
            column(&headers, "init_heading")?,
            column(&headers, "outcome")?,
        );
        let starts = rows
            .iter()
            .enumerate()
            .map(|(n, r)| {
                Ok(StartPoint {
                    x: number(r, xi, n + 2)?,
                    y: number(r, yi, n + 2)?,
                    heading: number(r, hi, n + 2)?,
                    outcome: r
                        .get(oi)
                        .unwrap_or("")
                        .parse()
                        .map_err(|e| PlotError::Malformed(format!("row {}: {e}", n + 2)))?,
                })
            })
            .collect::<Result<Vec<_>, PlotError>>()?;
        validation_svg(&starts, room)
    } else {
        Err(PlotError::UnknownFormat)
    }
}
