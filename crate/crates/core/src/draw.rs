//! Distance-based rasterization onto prompt layers. A pixel is painted when
//! its center lies within the stroke's half width of the ideal curve.

use crate::raster::{BinaryMask, PointF, PromptLayer};

const EPS: f64 = 1e-9;

pub(crate) fn half_width(stroke_width: u32) -> f64 {
    (stroke_width as f64 / 2.0).max(0.5)
}

/// Clipped integer window covering `[min, max]` in both axes.
fn window(layer: &PromptLayer, min: PointF, max: PointF) -> Option<(u32, u32, u32, u32)> {
    let (w, h) = (layer.width() as f64, layer.height() as f64);
    let x0 = min.x.floor().max(0.0);
    let y0 = min.y.floor().max(0.0);
    let x1 = max.x.ceil().min(w - 1.0);
    let y1 = max.y.ceil().min(h - 1.0);
    if x0 > x1 || y0 > y1 || !x0.is_finite() || !y1.is_finite() {
        return None;
    }
    Some((x0 as u32, y0 as u32, x1 as u32, y1 as u32))
}

pub(crate) fn fill_disc(layer: &mut PromptLayer, center: PointF, radius: f64, rgba: [u8; 4]) {
    let r = radius + EPS;
    let Some((x0, y0, x1, y1)) = window(
        layer,
        PointF::new(center.x - r, center.y - r),
        PointF::new(center.x + r, center.y + r),
    ) else {
        return;
    };
    for y in y0..=y1 {
        for x in x0..=x1 {
            if PointF::new(x as f64, y as f64).distance_squared(center) <= r * r {
                layer.set_rgba(x, y, rgba);
            }
        }
    }
}

fn segment_distance_squared(p: PointF, a: PointF, b: PointF) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0)
    };
    p.distance_squared(PointF::new(a.x + t * vx, a.y + t * vy))
}

pub(crate) fn draw_segment(layer: &mut PromptLayer, a: PointF, b: PointF, stroke_width: u32, rgba: [u8; 4]) {
    let hw = half_width(stroke_width) + EPS;
    let Some((x0, y0, x1, y1)) = window(
        layer,
        PointF::new(a.x.min(b.x) - hw, a.y.min(b.y) - hw),
        PointF::new(a.x.max(b.x) + hw, a.y.max(b.y) + hw),
    ) else {
        return;
    };
    for y in y0..=y1 {
        for x in x0..=x1 {
            if segment_distance_squared(PointF::new(x as f64, y as f64), a, b) <= hw * hw {
                layer.set_rgba(x, y, rgba);
            }
        }
    }
}

pub(crate) fn draw_polyline(
    layer: &mut PromptLayer,
    points: &[PointF],
    closed: bool,
    stroke_width: u32,
    rgba: [u8; 4],
) {
    for pair in points.windows(2) {
        draw_segment(layer, pair[0], pair[1], stroke_width, rgba);
    }
    if closed && points.len() > 2 {
        draw_segment(layer, points[points.len() - 1], points[0], stroke_width, rgba);
    }
    if points.len() == 1 {
        draw_segment(layer, points[0], points[0], stroke_width, rgba);
    }
}

pub(crate) fn draw_circle(layer: &mut PromptLayer, center: PointF, radius: f64, stroke_width: u32, rgba: [u8; 4]) {
    let hw = half_width(stroke_width) + EPS;
    let outer = radius + hw;
    let Some((x0, y0, x1, y1)) = window(
        layer,
        PointF::new(center.x - outer, center.y - outer),
        PointF::new(center.x + outer, center.y + outer),
    ) else {
        return;
    };
    for y in y0..=y1 {
        for x in x0..=x1 {
            let d = PointF::new(x as f64, y as f64).distance(center);
            if (d - radius).abs() <= hw {
                layer.set_rgba(x, y, rgba);
            }
        }
    }
}

pub(crate) fn fill_mask(layer: &mut PromptLayer, mask: &BinaryMask, rgba: [u8; 4]) {
    for (x, y) in mask.iter_set() {
        layer.set_rgba(x, y, rgba);
    }
}

/// Closed polyline approximating an axis-aligned ellipse.
pub(crate) fn ellipse_polyline(center: PointF, rx: f64, ry: f64) -> Vec<PointF> {
    let perimeter = std::f64::consts::PI * (rx + ry);
    let n = ((perimeter / 1.5).ceil() as usize).clamp(16, 2048);
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            PointF::new(center.x + rx * t.cos(), center.y + ry * t.sin())
        })
        .collect()
}

/// Samples of a quadratic Bézier curve, endpoints included.
pub(crate) fn quad_bezier(p0: PointF, c: PointF, p1: PointF) -> Vec<PointF> {
    let len = p0.distance(c) + c.distance(p1);
    let n = ((len / 1.0).ceil() as usize).clamp(2, 512);
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let u = 1.0 - t;
            PointF::new(
                u * u * p0.x + 2.0 * u * t * c.x + t * t * p1.x,
                u * u * p0.y + 2.0 * u * t * c.y + t * t * p1.y,
            )
        })
        .collect()
}
