//! Point seeding and bi-directional point tracking.
//!
//! The classical tracker is a coarse-to-fine Lucas-Kanade solver. Any other
//! tracker can be plugged in through [`Tracker`]; everything downstream only
//! sees the resulting [`TrackedPointSet`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::raster::{Frame, PointF, Rect, VideoClip};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRadius {
    Fixed(f64),
    /// Half the short side of the prompt's bounding box, clamped to [3, 16].
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    pub pyramid_levels: u32,
    pub window: u32,
    pub max_iterations: u32,
    pub convergence_eps: f64,
    pub residual_threshold: f64,
    pub max_points: usize,
    pub seed_radius: SeedRadius,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            pyramid_levels: 3,
            window: 15,
            max_iterations: 30,
            convergence_eps: 0.03,
            residual_threshold: 20.0,
            max_points: 64,
            seed_radius: SeedRadius::Auto,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "tracker window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if self.pyramid_levels < 1 {
            return Err(Error::InvalidConfig("pyramid_levels must be >= 1".into()));
        }
        if self.max_points < 1 {
            return Err(Error::InvalidConfig("max_points must be >= 1".into()));
        }
        if let SeedRadius::Fixed(r) = self.seed_radius {
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidConfig("seed radius must be positive".into()));
            }
        }
        Ok(())
    }

    /// Resolves the seed radius against the prompt's bounding box.
    pub fn radius_for(&self, mark_bbox: &Rect) -> f64 {
        match self.seed_radius {
            SeedRadius::Fixed(r) => r,
            SeedRadius::Auto => auto_seed_radius(mark_bbox),
        }
    }
}

pub fn auto_seed_radius(mark_bbox: &Rect) -> f64 {
    let minor = mark_bbox.width().min(mark_bbox.height()) as f64;
    (minor / 2.0).clamp(3.0, 16.0)
}

/// Lattice pixel centers within `radius` of `center`, row-major.
///
/// When more than `max_points` qualify, the disc is thinned to a regular
/// grid with an increasing stride, anchored on the pixel nearest `center` so
/// that pixel always survives. If no lattice point lies in the disc (tiny
/// radius, fractional center) the nearest pixel is returned alone.
pub fn seed_points(center: PointF, radius: f64, max_points: usize) -> Vec<PointF> {
    let (cx, cy) = (center.x.round() as i64, center.y.round() as i64);
    let r2 = radius * radius;
    let x0 = (center.x - radius).ceil() as i64;
    let x1 = (center.x + radius).floor() as i64;
    let y0 = (center.y - radius).ceil() as i64;
    let y1 = (center.y + radius).floor() as i64;
    let mut disc = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = PointF::new(x as f64, y as f64);
            if p.distance_squared(center) <= r2 {
                disc.push((x, y));
            }
        }
    }
    if disc.is_empty() {
        return vec![PointF::new(cx as f64, cy as f64)];
    }
    let max_points = max_points.max(1);
    let mut stride = 1i64;
    let mut kept = disc.clone();
    while kept.len() > max_points {
        stride += 1;
        kept = disc
            .iter()
            .copied()
            .filter(|&(x, y)| (x - cx).rem_euclid(stride) == 0 && (y - cy).rem_euclid(stride) == 0)
            .collect();
        if kept.is_empty() {
            kept = vec![(cx, cy)];
        }
    }
    kept.into_iter().map(|(x, y)| PointF::new(x as f64, y as f64)).collect()
}

/// Single-channel 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LumaFrame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl LumaFrame {
    pub fn from_frame(frame: &Frame) -> Self {
        Self {
            width: frame.width(),
            height: frame.height(),
            data: frame.to_luma(),
        }
    }
}

#[derive(Debug, Clone)]
struct Plane {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl Plane {
    #[inline]
    fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x] as f64
    }

    #[inline]
    fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= (self.width - 1) as f64 && y <= (self.height - 1) as f64
    }

    /// Bilinear sample with coordinates clamped to the image.
    #[inline]
    fn sample(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.at(x0, y0) * (1.0 - fx) + self.at(x1, y0) * fx;
        let bottom = self.at(x0, y1) * (1.0 - fx) + self.at(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// 5-tap binomial blur followed by 2x decimation.
    fn downsample(&self) -> Plane {
        const K: [f32; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
        let (w, h) = (self.width, self.height);
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
        let mut tmp = vec![0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                for (k, wk) in K.iter().enumerate() {
                    s += wk * self.data[y * w + clamp(x as isize + k as isize - 2, w)];
                }
                tmp[y * w + x] = s;
            }
        }
        let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
        let mut data = vec![0f32; nw * nh];
        for ny in 0..nh {
            for nx in 0..nw {
                let (x, y) = (nx * 2, ny * 2);
                let mut s = 0.0;
                for (k, wk) in K.iter().enumerate() {
                    s += wk * tmp[clamp(y as isize + k as isize - 2, h) * w + x];
                }
                data[ny * nw + nx] = s;
            }
        }
        Plane {
            width: nw,
            height: nh,
            data,
        }
    }
}

/// Image pyramid, level 0 at full resolution.
#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: Vec<Plane>,
}

impl Pyramid {
    pub fn build(luma: &LumaFrame, levels: u32) -> Self {
        let base = Plane {
            width: luma.width as usize,
            height: luma.height as usize,
            data: luma.data.iter().map(|&v| v as f32).collect(),
        };
        let mut out = vec![base];
        while out.len() < levels as usize {
            let last = out.last().unwrap();
            if last.width < 8 || last.height < 8 {
                break;
            }
            out.push(last.downsample());
        }
        Self { levels: out }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.levels[0].width as u32, self.levels[0].height as u32)
    }
}

/// Determinants below this are treated as rank deficient.
const MIN_DET: f64 = 1e-6;

fn in_valid_margin(p: PointF, w: usize, h: usize) -> bool {
    p.is_finite() && p.x >= 1.0 && p.y >= 1.0 && p.x <= w as f64 - 2.0 && p.y <= h as f64 - 2.0
}

/// Tracks one point from `prev` to `next`. Returns the new position and the
/// mean absolute intensity error over the window at full resolution; the
/// residual is infinite when the point leaves the valid area.
fn lk_point(prev: &Pyramid, next: &Pyramid, p: PointF, cfg: &TrackerConfig) -> (PointF, f64) {
    let (w, h) = (prev.levels[0].width, prev.levels[0].height);
    if !in_valid_margin(p, w, h) {
        return (p, f64::INFINITY);
    }
    let half = (cfg.window / 2) as i32;
    let n_win = ((2 * half + 1) * (2 * half + 1)) as usize;
    let mut ival = Vec::with_capacity(n_win);
    let mut grad = Vec::with_capacity(n_win);
    let levels = prev.levels.len().min(next.levels.len());
    let (mut gx, mut gy) = (0.0f64, 0.0f64);

    for level in (0..levels).rev() {
        let scale = (1u32 << level) as f64;
        let (px, py) = (p.x / scale, p.y / scale);
        let img = &prev.levels[level];
        let nxt = &next.levels[level];

        ival.clear();
        grad.clear();
        let (mut gxx, mut gxy, mut gyy) = (0.0, 0.0, 0.0);
        for dy in -half..=half {
            for dx in -half..=half {
                let (sx, sy) = (px + dx as f64, py + dy as f64);
                if !img.contains(sx, sy) {
                    continue;
                }
                let ix = (img.sample(sx + 1.0, sy) - img.sample(sx - 1.0, sy)) * 0.5;
                let iy = (img.sample(sx, sy + 1.0) - img.sample(sx, sy - 1.0)) * 0.5;
                gxx += ix * ix;
                gxy += ix * iy;
                gyy += iy * iy;
                ival.push((dx as f64, dy as f64, img.sample(sx, sy)));
                grad.push((ix, iy));
            }
        }
        let det = gxx * gyy - gxy * gxy;
        let (mut vx, mut vy) = (0.0, 0.0);
        if det >= MIN_DET {
            for _ in 0..cfg.max_iterations {
                let (mut bx, mut by) = (0.0, 0.0);
                let (cx, cy) = (px + gx + vx, py + gy + vy);
                for (&(dx, dy, i), &(ix, iy)) in ival.iter().zip(&grad) {
                    // samples that would come from outside the next frame carry no information
                    if !nxt.contains(cx + dx, cy + dy) {
                        continue;
                    }
                    let diff = i - nxt.sample(cx + dx, cy + dy);
                    bx += diff * ix;
                    by += diff * iy;
                }
                let ex = (gyy * bx - gxy * by) / det;
                let ey = (gxx * by - gxy * bx) / det;
                vx += ex;
                vy += ey;
                if ex * ex + ey * ey < cfg.convergence_eps * cfg.convergence_eps {
                    break;
                }
            }
        }
        if level > 0 {
            gx = 2.0 * (gx + vx);
            gy = 2.0 * (gy + vy);
        } else {
            gx += vx;
            gy += vy;
        }
    }

    let q = PointF::new(p.x + gx, p.y + gy);
    if !in_valid_margin(q, w, h) {
        return (q, f64::INFINITY);
    }
    let (img, nxt) = (&prev.levels[0], &next.levels[0]);
    let mut err = 0.0;
    for dy in -half..=half {
        for dx in -half..=half {
            let (dx, dy) = (dx as f64, dy as f64);
            err += (img.sample(p.x + dx, p.y + dy) - nxt.sample(q.x + dx, q.y + dy)).abs();
        }
    }
    (q, err / n_win as f64)
}

/// One frame-to-frame step of the pyramidal Lucas-Kanade solver.
pub fn lk_track_step(
    prev: &LumaFrame,
    next: &LumaFrame,
    points: &[PointF],
    cfg: &TrackerConfig,
) -> Result<(Vec<PointF>, Vec<f64>)> {
    check_dims("lk_track_step", (prev.width, prev.height), (next.width, next.height))?;
    cfg.validate()?;
    let a = Pyramid::build(prev, cfg.pyramid_levels);
    let b = Pyramid::build(next, cfg.pyramid_levels);
    Ok(points.iter().map(|&p| lk_point(&a, &b, p, cfg)).unzip())
}

/// A frame as seen by a tracker.
pub struct TrackFrame<'a> {
    pub index: usize,
    pub pyramid: &'a Pyramid,
}

/// Frame-to-frame point tracker. Returns `(position, residual)` per input
/// point, in order. An infinite residual marks a failed track.
pub trait Tracker: Sync {
    fn track(&self, from: &TrackFrame<'_>, to: &TrackFrame<'_>, points: &[PointF]) -> Vec<(PointF, f64)>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LkTracker {
    pub config: TrackerConfig,
}

impl LkTracker {
    pub fn new(config: TrackerConfig) -> Self {
        Self { config }
    }
}

impl Tracker for LkTracker {
    fn track(&self, from: &TrackFrame<'_>, to: &TrackFrame<'_>, points: &[PointF]) -> Vec<(PointF, f64)> {
        points
            .iter()
            .map(|&p| lk_point(from.pyramid, to.pyramid, p, &self.config))
            .collect()
    }
}

/// Tracker driven by known motion, `f(from_index, to_index, point)`.
/// `None` means the point is lost.
pub struct OracleTracker<F>(pub F);

impl<F> Tracker for OracleTracker<F>
where
    F: Fn(usize, usize, PointF) -> Option<PointF> + Sync,
{
    fn track(&self, from: &TrackFrame<'_>, to: &TrackFrame<'_>, points: &[PointF]) -> Vec<(PointF, f64)> {
        points
            .iter()
            .map(|&p| match (self.0)(from.index, to.index, p) {
                Some(q) => (q, 0.0),
                None => (p, f64::INFINITY),
            })
            .collect()
    }
}

/// Per-frame point positions and visibility for a whole clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TrackedJson", try_from = "TrackedJson")]
pub struct TrackedPointSet {
    anchor: usize,
    positions: Vec<Vec<PointF>>,
    visible: Vec<Vec<bool>>,
}

impl TrackedPointSet {
    pub fn new(anchor: usize, positions: Vec<Vec<PointF>>, visible: Vec<Vec<bool>>) -> Result<Self> {
        let n = positions.first().map_or(0, Vec::len);
        let shape_ok = positions.len() == visible.len()
            && anchor < positions.len()
            && positions.iter().zip(&visible).all(|(p, v)| p.len() == n && v.len() == n);
        if !shape_ok {
            return Err(Error::Contract {
                context: "TrackedPointSet::new",
                message: "positions and visibility must cover every frame with the same point count".into(),
            });
        }
        Ok(Self {
            anchor,
            positions,
            visible,
        })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn num_frames(&self) -> usize {
        self.positions.len()
    }

    pub fn num_points(&self) -> usize {
        self.positions[0].len()
    }

    pub fn positions(&self, frame: usize) -> &[PointF] {
        &self.positions[frame]
    }

    pub fn visible(&self, frame: usize) -> &[bool] {
        &self.visible[frame]
    }

    pub fn seeds(&self) -> &[PointF] {
        &self.positions[self.anchor]
    }

    pub fn visible_fraction(&self, frame: usize) -> f64 {
        let v = &self.visible[frame];
        v.iter().filter(|&&b| b).count() as f64 / v.len() as f64
    }

    pub fn visible_points(&self, frame: usize) -> impl Iterator<Item = PointF> + '_ {
        self.positions[frame]
            .iter()
            .zip(&self.visible[frame])
            .filter(|(_, &v)| v)
            .map(|(&p, _)| p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TrackedJson {
    anchor: usize,
    num_points: usize,
    frames: Vec<TrackedFrameJson>,
}

#[derive(Serialize, Deserialize)]
struct TrackedFrameJson {
    idx: usize,
    pts: Vec<(f64, f64, bool)>,
}

impl From<TrackedPointSet> for TrackedJson {
    fn from(t: TrackedPointSet) -> Self {
        let num_points = t.num_points();
        let frames = t
            .positions
            .iter()
            .zip(&t.visible)
            .enumerate()
            .map(|(idx, (p, v))| TrackedFrameJson {
                idx,
                pts: p.iter().zip(v).map(|(p, &v)| (p.x, p.y, v)).collect(),
            })
            .collect();
        TrackedJson {
            anchor: t.anchor,
            num_points,
            frames,
        }
    }
}

impl TryFrom<TrackedJson> for TrackedPointSet {
    type Error = Error;

    fn try_from(mut j: TrackedJson) -> Result<Self> {
        j.frames.sort_by_key(|f| f.idx);
        if j.frames.iter().enumerate().any(|(i, f)| f.idx != i || f.pts.len() != j.num_points) {
            return Err(Error::Contract {
                context: "TrackedPointSet::from_json",
                message: "frames must be indexed 0..T with num_points entries each".into(),
            });
        }
        let positions = j
            .frames
            .iter()
            .map(|f| f.pts.iter().map(|&(x, y, _)| PointF::new(x, y)).collect())
            .collect();
        let visible = j.frames.iter().map(|f| f.pts.iter().map(|p| p.2).collect()).collect();
        TrackedPointSet::new(j.anchor, positions, visible)
    }
}

fn in_frame(p: PointF, w: u32, h: u32) -> bool {
    p.is_finite() && p.x >= 0.0 && p.y >= 0.0 && p.x <= (w - 1) as f64 && p.y <= (h - 1) as f64
}

/// Chains frame-to-frame tracking from `anchor` to the last frame and from
/// `anchor` back to frame 0.
///
/// Seeds outside the frame are discarded first, so every remaining point is
/// visible at the anchor. A point is lost once it leaves the frame or its
/// residual exceeds `cfg.residual_threshold`; lost points keep their last
/// visible position and stay lost for the rest of that direction.
pub fn track_bidirectional(
    clip: &VideoClip,
    points: &[PointF],
    anchor: usize,
    cfg: &TrackerConfig,
    tracker: &dyn Tracker,
) -> Result<TrackedPointSet> {
    cfg.validate()?;
    let t = clip.len();
    if t == 0 {
        return Err(Error::EmptyClip);
    }
    if anchor >= t {
        return Err(Error::Contract {
            context: "track_bidirectional",
            message: format!("anchor {anchor} outside clip of {t} frames"),
        });
    }
    let (w, h) = clip.dims();
    let seeds: Vec<PointF> = points.iter().copied().filter(|&p| in_frame(p, w, h)).collect();
    if seeds.is_empty() {
        return Err(Error::NoPoints);
    }

    let pyramids: Vec<Pyramid> = {
        use rayon::prelude::*;
        clip.frames()
            .par_iter()
            .map(|f| Pyramid::build(&LumaFrame::from_frame(f), cfg.pyramid_levels))
            .collect()
    };

    let run = |order: Vec<usize>| -> Vec<(Vec<PointF>, Vec<bool>)> {
        let mut pos = seeds.clone();
        let mut vis = vec![true; seeds.len()];
        let mut out = Vec::with_capacity(order.len());
        for pair in order.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            let live: Vec<usize> = (0..pos.len()).filter(|&i| vis[i]).collect();
            if !live.is_empty() {
                let query: Vec<PointF> = live.iter().map(|&i| pos[i]).collect();
                let result = tracker.track(
                    &TrackFrame {
                        index: from,
                        pyramid: &pyramids[from],
                    },
                    &TrackFrame {
                        index: to,
                        pyramid: &pyramids[to],
                    },
                    &query,
                );
                for (&i, (q, residual)) in live.iter().zip(result) {
                    if in_frame(q, w, h) && residual <= cfg.residual_threshold {
                        pos[i] = q;
                    } else {
                        vis[i] = false;
                    }
                }
            }
            out.push((pos.clone(), vis.clone()));
        }
        out
    };

    let (forward, backward) = rayon::join(
        || run((anchor..t).collect()),
        || run((0..=anchor).rev().collect()),
    );

    let mut positions = vec![Vec::new(); t];
    let mut visible = vec![Vec::new(); t];
    positions[anchor] = seeds.clone();
    visible[anchor] = vec![true; seeds.len()];
    for (k, (p, v)) in forward.into_iter().enumerate() {
        positions[anchor + 1 + k] = p;
        visible[anchor + 1 + k] = v;
    }
    for (k, (p, v)) in backward.into_iter().enumerate() {
        positions[anchor - 1 - k] = p;
        visible[anchor - 1 - k] = v;
    }
    TrackedPointSet::new(anchor, positions, visible)
}
