//! Minimal SVG writer for figures.
//!
//! Coordinates are world coordinates with the y-axis pointing up; the
//! viewport is fitted to the drawn points with 5% padding on every side.

use std::fmt::Write;

use crate::geom::Point;

const PADDING: f64 = 0.05;

pub struct SvgCanvas {
    min: Point,
    max: Point,
    scale: f64,
    width: f64,
    height: f64,
    body: String,
}

impl SvgCanvas {
    /// Canvas whose larger side is `size` pixels.
    pub fn fit(pts: &[Point], size: f64) -> Self {
        let (mut min, mut max) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        if pts.is_empty() {
            (min, max) = (Point::ORIGIN, Point::new(1.0, 1.0));
        }
        let span = (max.x - min.x).max(max.y - min.y).max(1e-12);
        let pad = Point::new(
            ((max.x - min.x) * PADDING).max(span * 1e-3),
            ((max.y - min.y) * PADDING).max(span * 1e-3),
        );
        min -= pad;
        max += pad;
        let extent = (max.x - min.x).max(max.y - min.y);
        let scale = size / extent;
        SvgCanvas {
            min,
            max,
            scale,
            width: (max.x - min.x) * scale,
            height: (max.y - min.y) * scale,
            body: String::new(),
        }
    }

    /// World length of one pixel.
    pub fn stroke_unit(&self) -> f64 {
        1.0 / self.scale
    }

    fn px(&self, p: Point) -> (f64, f64) {
        ((p.x - self.min.x) * self.scale, (self.max.y - p.y) * self.scale)
    }

    /// `width` in world units.
    pub fn line(&mut self, a: Point, b: Point, width: f64, color: &str) {
        let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="{color}" stroke-width="{:.4}" stroke-linecap="round"/>"#,
            width * self.scale
        );
    }

    /// `r` in pixels.
    pub fn dot(&mut self, p: Point, r: f64, color: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.4}" cy="{y:.4}" r="{r:.4}" fill="{color}"/>"#);
    }

    pub fn finish(self, title: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <!-- {title}; world coordinates with y up, 5% padding, bbox [{:.6}, {:.6}] x [{:.6}, {:.6}] -->\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.2}\" height=\"{:.2}\" viewBox=\"0 0 {:.2} {:.2}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.min.x, self.max.x, self.min.y, self.max.y, self.width, self.height, self.width, self.height, self.body
        )
    }
}
