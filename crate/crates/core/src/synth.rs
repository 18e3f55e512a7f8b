//! Visual prompt synthesis from object masks.
//!
//! Every generator is a pure function of `(mask, kind, style, seed)`.
//! Shapes are anchored on the mask's bounding box or centroid so results are
//! reproducible; only scribbles and arrows draw from the seeded stream.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::draw;
use crate::error::{check_dims, Error, Result};
use crate::raster::{chamfer_distance, mask_bbox, mask_centroid, nearest_interior_point};
use crate::raster::{BinaryMask, PointF, PromptLayer, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Mask,
    MaskContour,
    Rectangle,
    Ellipse,
    Triangle,
    Scribble,
    Arrow,
    Point,
}

impl PromptKind {
    pub const ALL: [PromptKind; 8] = [
        PromptKind::Mask,
        PromptKind::MaskContour,
        PromptKind::Rectangle,
        PromptKind::Ellipse,
        PromptKind::Triangle,
        PromptKind::Scribble,
        PromptKind::Arrow,
        PromptKind::Point,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptKind::Mask => "mask",
            PromptKind::MaskContour => "mask_contour",
            PromptKind::Rectangle => "rectangle",
            PromptKind::Ellipse => "ellipse",
            PromptKind::Triangle => "triangle",
            PromptKind::Scribble => "scribble",
            PromptKind::Arrow => "arrow",
            PromptKind::Point => "point",
        }
    }

    /// Kinds drawn with the fill alpha rather than the stroke alpha.
    pub fn is_filled(self) -> bool {
        matches!(self, PromptKind::Mask | PromptKind::Point)
    }
}

impl fmt::Display for PromptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownKind(pub String);

impl fmt::Display for UnknownKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = PromptKind::ALL.iter().map(|k| k.name()).collect();
        write!(f, "unknown prompt kind `{}`, expected one of: {}", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownKind {}

impl FromStr for PromptKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        PromptKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// Color and stroke parameters for a synthesized prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptStyle {
    pub color: [u8; 3],
    pub fill_alpha: u8,
    pub stroke_alpha: u8,
    pub stroke_width: u32,
}

impl Default for PromptStyle {
    fn default() -> Self {
        Self {
            color: [255, 0, 0],
            fill_alpha: 128,
            stroke_alpha: 255,
            stroke_width: 2,
        }
    }
}

impl PromptStyle {
    /// Default style with the stroke width scaled to the image:
    /// `max(2, round(0.006 * diagonal))`.
    pub fn for_dims(width: u32, height: u32) -> Self {
        Self {
            stroke_width: default_stroke_width(width, height),
            ..Self::default()
        }
    }

    pub fn with_color(mut self, color: [u8; 3]) -> Self {
        self.color = color;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.stroke_width == 0 {
            return Err(Error::InvalidConfig("stroke_width must be at least 1".into()));
        }
        if self.fill_alpha == 0 || self.stroke_alpha == 0 {
            return Err(Error::InvalidConfig("prompt alphas must be non-zero".into()));
        }
        Ok(())
    }

    fn stroke_rgba(&self) -> [u8; 4] {
        [self.color[0], self.color[1], self.color[2], self.stroke_alpha]
    }

    fn fill_rgba(&self) -> [u8; 4] {
        [self.color[0], self.color[1], self.color[2], self.fill_alpha]
    }

    fn rgba_for(&self, kind: PromptKind) -> [u8; 4] {
        if kind.is_filled() {
            self.fill_rgba()
        } else {
            self.stroke_rgba()
        }
    }
}

pub fn default_stroke_width(width: u32, height: u32) -> u32 {
    let diag = ((width as f64).powi(2) + (height as f64).powi(2)).sqrt();
    ((0.006 * diag).round() as u32).max(2)
}

/// Uniform draw over the eight kinds.
pub fn random_prompt_kind(seed: u64) -> PromptKind {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PromptKind::ALL[rng.gen_range(0..PromptKind::ALL.len())]
}

pub fn synthesize_prompt(mask: &BinaryMask, kind: PromptKind, style: &PromptStyle, seed: u64) -> Result<PromptLayer> {
    style.validate()?;
    let bbox = mask_bbox(mask)?;
    let (w, h) = mask.dims();
    let mut layer = PromptLayer::transparent(w, h, 0).with_kind(Some(kind));
    let rgba = style.rgba_for(kind);
    let sw = style.stroke_width;
    match kind {
        PromptKind::Mask => draw::fill_mask(&mut layer, mask, rgba),
        PromptKind::MaskContour => {
            let hw = draw::half_width(sw);
            for (x, y) in mask.boundary().iter_set() {
                draw::fill_disc(&mut layer, PointF::new(x as f64, y as f64), hw, rgba);
            }
        }
        PromptKind::Rectangle => draw::draw_polyline(&mut layer, &rect_corners(&bbox), true, sw, rgba),
        PromptKind::Ellipse => {
            let (c, rx, ry) = ellipse_params(&bbox);
            draw::draw_polyline(&mut layer, &draw::ellipse_polyline(c, rx, ry), true, sw, rgba);
        }
        PromptKind::Triangle => draw::draw_polyline(&mut layer, &triangle_corners(&bbox), true, sw, rgba),
        PromptKind::Point => {
            let c = mask_centroid(mask)?;
            let (rx, ry) = (c.x.round() as u32, c.y.round() as u32);
            let center = if mask.get(rx, ry) {
                c
            } else {
                nearest_interior_point(mask, c)?
            };
            draw::fill_disc(&mut layer, center, sw as f64, rgba);
        }
        PromptKind::Scribble => {
            require_non_degenerate(&bbox, "scribble")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            layer = scribble(mask, &bbox, style, &mut rng);
        }
        PromptKind::Arrow => {
            require_non_degenerate(&bbox, "arrow")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (tail, head) = arrow_endpoints(mask, &bbox, style, &mut rng)?;
            draw_arrow(&mut layer, tail, head, style);
        }
    }
    Ok(layer)
}

fn require_non_degenerate(bbox: &Rect, kind: &'static str) -> Result<()> {
    if bbox.width() < 3 || bbox.height() < 3 {
        Err(Error::DegenerateMask { kind })
    } else {
        Ok(())
    }
}

fn rect_corners(b: &Rect) -> Vec<PointF> {
    let (x0, y0, x1, y1) = (b.min_x as f64, b.min_y as f64, b.max_x as f64, b.max_y as f64);
    vec![
        PointF::new(x0, y0),
        PointF::new(x1, y0),
        PointF::new(x1, y1),
        PointF::new(x0, y1),
    ]
}

fn ellipse_params(b: &Rect) -> (PointF, f64, f64) {
    (
        b.center(),
        (b.max_x - b.min_x) as f64 / 2.0,
        (b.max_y - b.min_y) as f64 / 2.0,
    )
}

/// Isosceles, apex at the top edge center, base on the bottom edge.
fn triangle_corners(b: &Rect) -> Vec<PointF> {
    let c = b.center();
    vec![
        PointF::new(c.x, b.min_y as f64),
        PointF::new(b.max_x as f64, b.max_y as f64),
        PointF::new(b.min_x as f64, b.max_y as f64),
    ]
}

const SCRIBBLE_ATTEMPTS: u32 = 12;

fn scribble(mask: &BinaryMask, bbox: &Rect, style: &PromptStyle, rng: &mut ChaCha8Rng) -> PromptLayer {
    let (w, h) = mask.dims();
    let rgba = style.stroke_rgba();
    let hw = draw::half_width(style.stroke_width);
    let depth = chamfer_distance(mask, false, true);

    // Waypoints come from pixels deep enough for the stroke to stay inside;
    // thin masks fall back to their deepest pixels.
    let deepest = depth.iter().cloned().fold(0.0, f64::max);
    let threshold = (hw + 1.0).min(deepest);
    let candidates: Vec<PointF> = mask
        .iter_set()
        .filter(|&(x, y)| depth[(y * w + x) as usize] >= threshold)
        .map(|(x, y)| PointF::new(x as f64, y as f64))
        .collect();

    let mut spread = (bbox.diagonal() / 2.0).max(3.0);
    for _ in 0..SCRIBBLE_ATTEMPTS {
        let n = rng.gen_range(4..=8);
        let mut waypoints = vec![candidates[rng.gen_range(0..candidates.len())]];
        while waypoints.len() < n {
            let last = *waypoints.last().unwrap();
            let near: Vec<PointF> = candidates
                .iter()
                .copied()
                .filter(|p| p.distance(last) <= spread)
                .collect();
            waypoints.push(near[rng.gen_range(0..near.len())]);
        }
        let mut layer = PromptLayer::transparent(w, h, 0).with_kind(Some(PromptKind::Scribble));
        draw::draw_polyline(&mut layer, &smooth_path(&waypoints), false, style.stroke_width, rgba);
        if scribble_checks(&layer, mask).is_empty() {
            return layer;
        }
        spread *= 0.7;
    }

    // A dot at the deepest point always satisfies the predicate.
    let (idx, _) = depth
        .iter()
        .enumerate()
        .filter(|(i, _)| mask.bits()[*i])
        .fold((0usize, -1.0f64), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
    let p = PointF::new((idx as u32 % w) as f64, (idx as u32 / w) as f64);
    let mut layer = PromptLayer::transparent(w, h, 0).with_kind(Some(PromptKind::Scribble));
    draw::fill_disc(&mut layer, p, hw, rgba);
    layer
}

/// Quadratic Bézier smoothing through segment midpoints, with each interior
/// waypoint acting as the control point.
fn smooth_path(w: &[PointF]) -> Vec<PointF> {
    if w.len() < 3 {
        return w.to_vec();
    }
    let mid = |a: PointF, b: PointF| PointF::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
    let mut path = vec![w[0]];
    for i in 1..w.len() - 1 {
        let start = mid(w[i - 1], w[i]);
        let end = mid(w[i], w[i + 1]);
        path.extend(draw::quad_bezier(start, w[i], end));
    }
    path.push(w[w.len() - 1]);
    path
}

fn arrow_geometry(style: &PromptStyle) -> (f64, f64) {
    let barb = 4.0 * style.stroke_width as f64;
    (barb, 30f64.to_radians())
}

fn arrow_endpoints(mask: &BinaryMask, bbox: &Rect, style: &PromptStyle, rng: &mut ChaCha8Rng) -> Result<(PointF, PointF)> {
    let (w, h) = mask.dims();
    let head = nearest_interior_point(mask, mask_centroid(mask)?)?;
    let (barb, _) = arrow_geometry(style);
    let nominal = 1.5 * bbox.diagonal() * rng.gen_range(0.2..0.4);
    let min_len = nominal.max(2.0 * barb);
    let clearance = style.stroke_width as f64 + 1.0;
    let margin = draw::half_width(style.stroke_width);
    let to_mask = chamfer_distance(mask, true, false);

    let tail_along = |theta: f64| -> Option<PointF> {
        let (dx, dy) = (theta.cos(), theta.sin());
        let mut t = min_len;
        loop {
            let p = PointF::new(head.x + t * dx, head.y + t * dy);
            if p.x < margin || p.y < margin || p.x > w as f64 - 1.0 - margin || p.y > h as f64 - 1.0 - margin {
                return None;
            }
            let (px, py) = (p.x.round() as u32, p.y.round() as u32);
            if to_mask[(py * w + px) as usize] > clearance {
                return Some(p);
            }
            t += 1.0;
        }
    };

    for _ in 0..64 {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        if let Some(tail) = tail_along(theta) {
            return Ok((tail, head));
        }
    }
    for i in 0..360 {
        if let Some(tail) = tail_along((i as f64).to_radians()) {
            return Ok((tail, head));
        }
    }
    Err(Error::DegenerateMask { kind: "arrow" })
}

fn draw_arrow(layer: &mut PromptLayer, tail: PointF, head: PointF, style: &PromptStyle) {
    let rgba = style.stroke_rgba();
    let sw = style.stroke_width;
    draw::draw_segment(layer, tail, head, sw, rgba);
    let (barb, angle) = arrow_geometry(style);
    let len = tail.distance(head);
    let (ux, uy) = ((head.x - tail.x) / len, (head.y - tail.y) / len);
    for sign in [-1.0, 1.0] {
        let (s, c) = (sign * angle).sin_cos();
        let (bx, by) = (ux * c - uy * s, ux * s + uy * c);
        let end = PointF::new(head.x - barb * bx, head.y - barb * by);
        draw::draw_segment(layer, head, end, sw, rgba);
    }
}

/// Outcome of checking a prompt layer against its source mask.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl ValidityReport {
    fn from_violations(violations: Vec<String>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }
}

/// Check the per-kind geometric predicate. Never fails; dimension problems
/// are reported as violations.
pub fn validate_prompt(layer: &PromptLayer, mask: &BinaryMask, kind: PromptKind, style: &PromptStyle) -> ValidityReport {
    if let Err(e) = check_dims("validate_prompt", mask.dims(), layer.dims()) {
        return ValidityReport::from_violations(vec![e.to_string()]);
    }
    let mark = layer.mark_mask();
    if mark.is_empty() {
        return ValidityReport::from_violations(vec!["layer has no marked pixels".into()]);
    }
    let Ok(mask_box) = mask_bbox(mask) else {
        return ValidityReport::from_violations(vec!["mask is empty".into()]);
    };

    let mut v = Vec::new();
    let bad_alpha = layer
        .pixels()
        .chunks_exact(4)
        .any(|p| p[3] != 0 && p[3] != style.stroke_alpha && p[3] != style.fill_alpha);
    if bad_alpha {
        v.push("marked alpha outside {stroke_alpha, fill_alpha}".into());
    }

    let sw = style.stroke_width as f64;
    match kind {
        PromptKind::Mask => {
            if &mark != mask {
                v.push("mask: marked pixels differ from mask pixels".into());
            }
        }
        PromptKind::MaskContour => {
            let boundary = mask.boundary();
            let dist = chamfer_distance(&boundary, true, false);
            let w = mask.width();
            if mark.iter_set().any(|(x, y)| dist[(y * w + x) as usize] > sw) {
                v.push("mask_contour: marked pixel farther than stroke_width from the mask boundary".into());
            }
            if boundary.iter_set().any(|(x, y)| !mark.get(x, y)) {
                v.push("mask_contour: boundary pixel left unmarked".into());
            }
        }
        PromptKind::Rectangle | PromptKind::Ellipse | PromptKind::Triangle => {
            let mark_box = mask_bbox(&mark).expect("non-empty");
            let tol = style.stroke_width as i64;
            let diff = |a: u32, b: u32| (a as i64 - b as i64).abs();
            if diff(mark_box.min_x, mask_box.min_x) > tol
                || diff(mark_box.min_y, mask_box.min_y) > tol
                || diff(mark_box.max_x, mask_box.max_x) > tol
                || diff(mark_box.max_y, mask_box.max_y) > tol
            {
                v.push(format!(
                    "{kind}: mark bbox {mark_box:?} not within stroke_width of mask bbox {mask_box:?}"
                ));
            }
            if !is_outline(&mark, kind, &mask_box, sw) {
                v.push(format!("{kind}: mark fills the shape interior"));
            }
        }
        PromptKind::Scribble => v.extend(scribble_checks(layer, mask)),
        PromptKind::Arrow => v.extend(arrow_checks(&mark, mask, sw)),
        PromptKind::Point => {
            let c = mask_centroid(&mark).expect("non-empty");
            let (x, y) = (c.x.round() as i64, c.y.round() as i64);
            if !mask.get_signed(x, y) {
                v.push(format!("point: disc center ({:.2}, {:.2}) outside mask", c.x, c.y));
            }
        }
    }
    ValidityReport::from_violations(v)
}

/// No pixel deeper than the stroke width inside the ideal shape is marked.
fn is_outline(mark: &BinaryMask, kind: PromptKind, b: &Rect, sw: f64) -> bool {
    let inset = 1.5 * sw;
    let inside = |p: PointF| -> bool {
        match kind {
            PromptKind::Rectangle => {
                p.x > b.min_x as f64 + inset
                    && p.x < b.max_x as f64 - inset
                    && p.y > b.min_y as f64 + inset
                    && p.y < b.max_y as f64 - inset
            }
            PromptKind::Ellipse => {
                let (c, rx, ry) = ellipse_params(b);
                let (ax, ay) = (rx - inset, ry - inset);
                ax > 0.0 && ay > 0.0 && ((p.x - c.x) / ax).powi(2) + ((p.y - c.y) / ay).powi(2) < 1.0
            }
            _ => {
                let t = triangle_corners(b);
                (0..3).all(|i| signed_edge_distance(p, t[i], t[(i + 1) % 3]) > inset)
            }
        }
    };
    !mark.iter_set().any(|(x, y)| inside(PointF::new(x as f64, y as f64)))
}

/// Positive on the interior side of a clockwise (in image coordinates) edge.
fn signed_edge_distance(p: PointF, a: PointF, b: PointF) -> f64 {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let len = (ex * ex + ey * ey).sqrt();
    if len == 0.0 {
        return f64::NEG_INFINITY;
    }
    (ex * (p.y - a.y) - ey * (p.x - a.x)) / len
}

fn scribble_checks(layer: &PromptLayer, mask: &BinaryMask) -> Vec<String> {
    let mark = layer.mark_mask();
    let mut v = Vec::new();
    let total = mark.count();
    let inside = mark.iter_set().filter(|&(x, y)| mask.get(x, y)).count();
    if (inside as f64) < 0.8 * total as f64 {
        v.push(format!("scribble: only {inside}/{total} marked pixels inside the mask"));
    }
    if components_8(&mark) != 1 {
        v.push("scribble: stroke is not connected".into());
    }
    v
}

fn components_8(m: &BinaryMask) -> usize {
    let (w, h) = (m.width() as i64, m.height() as i64);
    let mut seen = vec![false; (w * h) as usize];
    let mut count = 0;
    let mut stack = Vec::new();
    for (sx, sy) in m.iter_set() {
        let si = (sy as i64 * w + sx as i64) as usize;
        if seen[si] {
            continue;
        }
        count += 1;
        seen[si] = true;
        stack.push((sx as i64, sy as i64));
        while let Some((x, y)) = stack.pop() {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if m.get_signed(nx, ny) {
                        let ni = (ny * w + nx) as usize;
                        if !seen[ni] {
                            seen[ni] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    count
}

/// Locates the arrow's two ends along the mark's principal axis. The tip
/// is the end with the wider perpendicular spread (the barbs).
fn arrow_checks(mark: &BinaryMask, mask: &BinaryMask, sw: f64) -> Vec<String> {
    let pts: Vec<PointF> = mark.iter_set().map(|(x, y)| PointF::new(x as f64, y as f64)).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (ax, ay) = (theta.cos(), theta.sin());
    let along = |p: &PointF| (p.x - mx) * ax + (p.y - my) * ay;
    let across = |p: &PointF| -(p.x - mx) * ay + (p.y - my) * ax;

    let smin = pts.iter().map(along).fold(f64::INFINITY, f64::min);
    let smax = pts.iter().map(along).fold(f64::NEG_INFINITY, f64::max);
    let len = smax - smin;
    if len < 2.0 * sw {
        return vec!["arrow: mark too short to have a shaft".into()];
    }
    let end_info = |high: bool| -> (f64, PointF) {
        let near: Vec<&PointF> = pts
            .iter()
            .filter(|p| if high { along(p) >= smax - len / 4.0 } else { along(p) <= smin + len / 4.0 })
            .collect();
        let lo = near.iter().map(|p| across(p)).fold(f64::INFINITY, f64::min);
        let hi = near.iter().map(|p| across(p)).fold(f64::NEG_INFINITY, f64::max);
        let extreme = near
            .iter()
            .copied()
            .fold(None::<&PointF>, |best, p| match best {
                Some(b) if (if high { along(p) <= along(b) } else { along(p) >= along(b) }) => Some(b),
                _ => Some(p),
            })
            .copied()
            .expect("end has pixels");
        (hi - lo, extreme)
    };
    let (spread_hi, end_hi) = end_info(true);
    let (spread_lo, end_lo) = end_info(false);
    let (tip, tail) = if spread_hi >= spread_lo { (end_hi, end_lo) } else { (end_lo, end_hi) };

    let to_mask = chamfer_distance(mask, true, false);
    let w = mask.width();
    let dist = |p: PointF| to_mask[(p.y as u32 * w + p.x as u32) as usize];
    let mut v = Vec::new();
    if dist(tip) > sw {
        v.push(format!("arrow: tip ({}, {}) not inside the mask", tip.x, tip.y));
    }
    if dist(tail) == 0.0 {
        v.push(format!("arrow: tail ({}, {}) inside the mask", tail.x, tail.y));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_mask(w: u32, h: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| x >= x0 && x <= x1 && y >= y0 && y <= y1)
    }

    fn blob(w: u32, h: u32, cx: f64, cy: f64, rx: f64, ry: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            ((x as f64 - cx) / rx).powi(2) + ((y as f64 - cy) / ry).powi(2) <= 1.0
        })
    }

    #[test]
    fn kind_names_round_trip() {
        for k in PromptKind::ALL {
            assert_eq!(k.name().parse::<PromptKind>().unwrap(), k);
        }
        assert_eq!("Mask-Contour".parse::<PromptKind>().unwrap(), PromptKind::MaskContour);
        let err = "circle".parse::<PromptKind>().unwrap_err().to_string();
        for k in PromptKind::ALL {
            assert!(err.contains(k.name()));
        }
    }

    #[test]
    fn default_stroke_width_scales() {
        assert_eq!(default_stroke_width(64, 64), 2);
        assert_eq!(default_stroke_width(1920, 1080), 13);
    }

    #[test]
    fn rectangle_outline_sits_on_bbox() {
        let mask = square_mask(20, 16, 2, 3, 10, 8);
        let style = PromptStyle::default();
        let layer = synthesize_prompt(&mask, PromptKind::Rectangle, &style, 0).unwrap();
        // stroke of width 2 is centered on the bbox edges
        let b = mask_bbox(&layer.mark_mask()).unwrap();
        assert_eq!((b.min_x, b.min_y, b.max_x, b.max_y), (1, 2, 11, 9));
        for x in 2..=10 {
            assert_eq!(layer.alpha(x, 3), 255);
            assert_eq!(layer.alpha(x, 8), 255);
        }
        assert_eq!(layer.alpha(6, 5), 0);
        assert!(validate_prompt(&layer, &mask, PromptKind::Rectangle, &style).valid);
    }

    #[test]
    fn shifted_rectangle_is_rejected() {
        let mask = square_mask(40, 40, 10, 10, 25, 25);
        let style = PromptStyle::default();
        let shifted = mask.translated(5, 0);
        let layer = synthesize_prompt(&shifted, PromptKind::Rectangle, &style, 0).unwrap();
        let report = validate_prompt(&layer, &mask, PromptKind::Rectangle, &style);
        assert!(!report.valid);
        assert!(report.violations[0].contains("bbox"));
    }

    #[test]
    fn filled_rectangle_is_not_an_outline() {
        let mask = square_mask(40, 40, 10, 10, 25, 25);
        let style = PromptStyle::default();
        let mut layer = synthesize_prompt(&mask, PromptKind::Mask, &style, 0).unwrap();
        layer = PromptLayer::new(
            40,
            40,
            layer.pixels().chunks_exact(4).flat_map(|p| [p[0], p[1], p[2], if p[3] > 0 { 255 } else { 0 }]).collect(),
            None,
            0,
        )
        .unwrap();
        assert!(!validate_prompt(&layer, &mask, PromptKind::Rectangle, &style).valid);
    }

    #[test]
    fn point_disc_at_centroid() {
        let mask = square_mask(30, 30, 5, 5, 15, 15);
        let style = PromptStyle::default();
        let layer = synthesize_prompt(&mask, PromptKind::Point, &style, 0).unwrap();
        assert_eq!(mask_centroid(&layer.mark_mask()).unwrap(), PointF::new(10.0, 10.0));
        assert_eq!(layer.marked_count(), 13);
        assert_eq!(layer.rgba(10, 10), [255, 0, 0, 128]);
        assert!(validate_prompt(&layer, &mask, PromptKind::Point, &style).valid);
    }

    #[test]
    fn point_moves_inside_non_convex_mask() {
        let ring = BinaryMask::from_fn(41, 41, |x, y| {
            let d = ((x as f64 - 20.0).powi(2) + (y as f64 - 20.0).powi(2)).sqrt();
            (12.0..=16.0).contains(&d)
        });
        let style = PromptStyle::default();
        let layer = synthesize_prompt(&ring, PromptKind::Point, &style, 0).unwrap();
        assert!(validate_prompt(&layer, &ring, PromptKind::Point, &style).valid);
    }

    #[test]
    fn mask_kind_copies_mask() {
        let mask = blob(30, 20, 12.0, 9.0, 7.0, 5.0);
        let style = PromptStyle::default();
        let layer = synthesize_prompt(&mask, PromptKind::Mask, &style, 3).unwrap();
        assert_eq!(layer.mark_mask(), mask);
        assert!(layer.pixels().chunks_exact(4).all(|p| p[3] == 0 || p[3] == 128));
    }

    #[test]
    fn all_kinds_validate_on_blob() {
        let mask = blob(64, 48, 30.0, 22.0, 12.0, 8.0);
        let style = PromptStyle::default();
        for kind in PromptKind::ALL {
            for seed in 0..5 {
                let layer = synthesize_prompt(&mask, kind, &style, seed).unwrap();
                let report = validate_prompt(&layer, &mask, kind, &style);
                assert!(report.valid, "{kind} seed {seed}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let mask = blob(64, 48, 30.0, 22.0, 12.0, 8.0);
        let style = PromptStyle::default();
        for kind in [PromptKind::Scribble, PromptKind::Arrow] {
            let a = synthesize_prompt(&mask, kind, &style, 42).unwrap();
            let b = synthesize_prompt(&mask, kind, &style, 42).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn degenerate_and_empty_masks() {
        let style = PromptStyle::default();
        let thin = square_mask(20, 20, 2, 5, 15, 6);
        for kind in [PromptKind::Scribble, PromptKind::Arrow] {
            assert!(matches!(
                synthesize_prompt(&thin, kind, &style, 0),
                Err(Error::DegenerateMask { .. })
            ));
        }
        assert!(synthesize_prompt(&thin, PromptKind::Rectangle, &style, 0).is_ok());
        assert!(matches!(
            synthesize_prompt(&BinaryMask::empty(5, 5), PromptKind::Point, &style, 0),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn arrow_points_from_outside() {
        let mask = square_mask(80, 80, 30, 30, 45, 45);
        let style = PromptStyle::default();
        let layer = synthesize_prompt(&mask, PromptKind::Arrow, &style, 9).unwrap();
        let mark = layer.mark_mask();
        assert!(mark.iter_set().any(|(x, y)| !mask.get(x, y)));
        assert!(layer.alpha(37, 37) == 255 || layer.alpha(38, 38) == 255);
        // a plain segment has no barbs; swapping which end carries them flips validity
        let mut reversed = PromptLayer::transparent(80, 80, 0);
        draw_arrow(&mut reversed, PointF::new(38.0, 38.0), PointF::new(70.0, 38.0), &style);
        assert!(!validate_prompt(&reversed, &mask, PromptKind::Arrow, &style).valid);
    }

    #[test]
    fn random_kind_is_deterministic_and_covers_all() {
        assert_eq!(random_prompt_kind(7), random_prompt_kind(7));
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..200 {
            seen.insert(random_prompt_kind(s));
        }
        assert_eq!(seen.len(), 8);
    }
}
