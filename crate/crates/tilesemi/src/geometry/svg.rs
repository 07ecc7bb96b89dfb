//! SVG drawings of tiles with decimal coordinates.

use std::fmt::Write as _;

use crate::arith::Part;

use super::{Point, Shape, Tile, Tileset};

/// Environment variable overriding the number of fractional digits.
pub const DIGITS_ENV: &str = "TILESEMI_DIGITS";
pub const DEFAULT_DIGITS: usize = 40;

pub fn default_digits() -> usize {
    std::env::var(DIGITS_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_DIGITS)
}

#[derive(Clone, Debug)]
pub struct SvgOptions {
    pub digits: usize,
    pub labels: bool,
    pub punctures: bool,
    /// Extra outlines drawn on top, such as supertile boundaries.
    pub outlines: Vec<Shape>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { digits: default_digits(), labels: true, punctures: true, outlines: Vec::new() }
    }
}

fn colour(p: usize, n: usize) -> String {
    let hue = (p as f64 * 360.0 / n.max(1) as f64 + 17.0) % 360.0;
    format!("hsl({hue:.0},55%,75%)")
}

struct Frame {
    digits: usize,
    /// Bar height for one-dimensional tiles.
    bar: f64,
}

impl Frame {
    fn xy(&self, z: &Point) -> String {
        let y = -z;
        format!("{},{}", z.to_decimal(Part::Real, self.digits), y.to_decimal(Part::Imaginary, self.digits))
    }

    fn polygon(&self, shape: &Shape) -> String {
        match shape {
            Shape::Interval { lo, hi } => {
                let (l, h) = (lo.to_decimal(Part::Real, self.digits), hi.to_decimal(Part::Real, self.digits));
                format!("{l},0 {h},0 {h},{b} {l},{b}", b = -self.bar)
            }
            Shape::Polygon { vertices } => vertices.iter().map(|v| self.xy(v)).collect::<Vec<_>>().join(" "),
        }
    }
}

fn bounds(ts: &Tileset, tiles: &[Tile], bar: f64) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for t in tiles {
        let tb = ts.bbox(t);
        b[0] = b[0].min(tb[0]);
        b[1] = b[1].min(tb[1]);
        b[2] = b[2].max(tb[2]);
        b[3] = b[3].max(tb[3] + if ts.dimension() == 1 { bar } else { 0.0 });
    }
    b
}

pub fn patch_svg(ts: &Tileset, tiles: &[Tile], opts: &SvgOptions) -> String {
    let longest = ts.prototiles().iter().map(|p| p.bbox()).map(|b| (b[2] - b[0]).max(b[3] - b[1])).fold(0.0, f64::max);
    let frame = Frame { digits: opts.digits, bar: 0.25 * longest };
    let b = if tiles.is_empty() { [0.0, 0.0, 1.0, 1.0] } else { bounds(ts, tiles, frame.bar) };
    let pad = 0.05 * (b[2] - b[0]).max(b[3] - b[1]).max(1e-9);
    let stroke = 0.01 * longest;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        b[0] - pad,
        -b[3] - pad,
        b[2] - b[0] + 2.0 * pad,
        b[3] - b[1] + 2.0 * pad
    );
    let _ = writeln!(s, "<g stroke=\"#333\" stroke-width=\"{stroke:.6}\" stroke-linejoin=\"round\">");
    for t in tiles {
        let _ = writeln!(
            s,
            "<polygon class=\"tile\" data-tile=\"{}\" fill=\"{}\" points=\"{}\"/>",
            ts.label(t.proto),
            colour(t.proto, ts.len()),
            frame.polygon(&ts.support(t))
        );
    }
    for o in &opts.outlines {
        let _ = writeln!(s, "<polygon class=\"outline\" fill=\"none\" stroke-width=\"{:.6}\" points=\"{}\"/>", 3.0 * stroke, frame.polygon(o));
    }
    s.push_str("</g>\n");
    if opts.punctures {
        s.push_str("<g fill=\"#000\">\n");
        for t in tiles {
            let _ = writeln!(s, "<circle r=\"{:.6}\" transform=\"translate({})\"/>", 2.0 * stroke, frame.xy(&ts.puncture(t)));
        }
        s.push_str("</g>\n");
    }
    if opts.labels {
        let _ = writeln!(s, "<g font-size=\"{:.6}\" text-anchor=\"middle\" font-family=\"sans-serif\">", 0.12 * longest);
        for t in tiles {
            let _ = writeln!(s, "<text transform=\"translate({})\" dy=\"-0.4em\">{}</text>", frame.xy(&ts.puncture(t)), ts.label(t.proto));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
