//! Minimum enclosing circle.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::raster::PointF;

/// Relative slack for containment tests in the incremental algorithm.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: PointF,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: PointF) -> bool {
        p.distance(self.center) <= self.radius * (1.0 + SLACK) + SLACK
    }

    fn from_two(a: PointF, b: PointF) -> Circle {
        let center = PointF::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        Circle {
            center,
            radius: center.distance(a),
        }
    }

    /// Circumcircle; `None` for collinear points.
    fn from_three(a: PointF, b: PointF, c: PointF) -> Option<Circle> {
        let (bx, by) = (b.x - a.x, b.y - a.y);
        let (cx, cy) = (c.x - a.x, c.y - a.y);
        let d = 2.0 * (bx * cy - by * cx);
        if d.abs() < 1e-12 {
            return None;
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        let center = PointF::new(a.x + ux, a.y + uy);
        Some(Circle {
            center,
            radius: (ux * ux + uy * uy).sqrt(),
        })
    }
}

/// Smallest circle containing every point (Welzl's randomized incremental
/// construction, expected linear time). The shuffle uses a fixed seed, so the
/// result is deterministic. Returns `None` for an empty input.
pub fn min_enclosing_circle(points: &[PointF]) -> Option<Circle> {
    if points.is_empty() {
        return None;
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));

    let mut c = Circle {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = Circle::from_two(pts[i], pts[j]);
            for k in 0..j {
                if c.contains(pts[k]) {
                    continue;
                }
                c = Circle::from_three(pts[i], pts[j], pts[k]).unwrap_or_else(|| {
                    // collinear: the two farthest apart span the circle
                    let cands = [
                        Circle::from_two(pts[i], pts[j]),
                        Circle::from_two(pts[i], pts[k]),
                        Circle::from_two(pts[j], pts[k]),
                    ];
                    cands
                        .into_iter()
                        .max_by(|a, b| a.radius.total_cmp(&b.radius))
                        .unwrap()
                });
            }
        }
    }
    Some(c)
}
