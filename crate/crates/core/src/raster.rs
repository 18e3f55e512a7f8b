//! Raster value types, mask geometry and the alpha compositing operator.
//!
//! Coordinates: pixel at row `i`, column `j` has its center at `(x, y) = (j, i)`.
//! All sub-pixel geometry in the crate uses this frame.

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::synth::PromptKind;

/// Sub-pixel position, `x` to the right and `y` downwards.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointF {
    pub x: f64,
    pub y: f64,
}

impl PointF {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: PointF) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(self, other: PointF) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Inclusive axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl Rect {
    pub fn width(&self) -> u32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u32 {
        self.max_y - self.min_y + 1
    }

    pub fn center(&self) -> PointF {
        PointF::new(
            (self.min_x + self.max_x) as f64 / 2.0,
            (self.min_y + self.max_y) as f64 / 2.0,
        )
    }

    pub fn diagonal(&self) -> f64 {
        let w = (self.max_x - self.min_x) as f64;
        let h = (self.max_y - self.min_y) as f64;
        (w * w + h * h).sqrt()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.min_x && x <= self.max_x && y >= self.min_y && y <= self.max_y
    }
}

/// 8-bit RGB frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    index: usize,
}

impl Frame {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, index: usize) -> Result<Self> {
        check_size("Frame::new", width, height, pixels.len(), 3)?;
        Ok(Self {
            width,
            height,
            pixels,
            index,
        })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3], index: usize) -> Result<Self> {
        let pixels = rgb
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * 3)
            .collect();
        Self::new(width, height, pixels, index)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let o = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[o], self.pixels[o + 1], self.pixels[o + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[o..o + 3].copy_from_slice(&rgb);
    }

    /// Luma with fixed integer weights: round(0.299 R + 0.587 G + 0.114 B).
    pub fn to_luma(&self) -> Vec<u8> {
        self.pixels
            .chunks_exact(3)
            .map(|p| ((299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32 + 500) / 1000) as u8)
            .collect()
    }
}

/// Ordered frames of one video, all of the same size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoClip {
    frames: Vec<Frame>,
}

impl VideoClip {
    /// Frames are re-indexed 0..T in the given order.
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::EmptyClip);
        };
        let dims = first.dims();
        for f in &frames {
            check_dims("VideoClip::new", dims, f.dims())?;
        }
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.with_index(i))
            .collect();
        Ok(Self { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (u32, u32) {
        self.frames[0].dims()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}

/// One visual prompt as an RGBA raster. Pixels with alpha 0 are not part of
/// the mark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptLayer {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    kind: Option<PromptKind>,
    anchor_frame: usize,
}

impl PromptLayer {
    pub fn new(
        width: u32,
        height: u32,
        pixels: Vec<u8>,
        kind: Option<PromptKind>,
        anchor_frame: usize,
    ) -> Result<Self> {
        check_size("PromptLayer::new", width, height, pixels.len(), 4)?;
        Ok(Self {
            width,
            height,
            pixels,
            kind,
            anchor_frame,
        })
    }

    /// A layer with no mark at all. Used for frames where a prompt is absent.
    pub fn transparent(width: u32, height: u32, anchor_frame: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width as usize * height as usize * 4],
            kind: None,
            anchor_frame,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn kind(&self) -> Option<PromptKind> {
        self.kind
    }

    pub fn anchor_frame(&self) -> usize {
        self.anchor_frame
    }

    pub fn with_kind(mut self, kind: Option<PromptKind>) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_anchor_frame(mut self, anchor_frame: usize) -> Self {
        self.anchor_frame = anchor_frame;
        self
    }

    pub fn rgba(&self, x: u32, y: u32) -> [u8; 4] {
        let o = (y as usize * self.width as usize + x as usize) * 4;
        [
            self.pixels[o],
            self.pixels[o + 1],
            self.pixels[o + 2],
            self.pixels[o + 3],
        ]
    }

    pub fn alpha(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y as usize * self.width as usize + x as usize) * 4 + 3]
    }

    pub(crate) fn set_rgba(&mut self, x: u32, y: u32, rgba: [u8; 4]) {
        let o = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[o..o + 4].copy_from_slice(&rgba);
    }

    /// True when no pixel has alpha > 0.
    pub fn is_empty(&self) -> bool {
        self.pixels.chunks_exact(4).all(|p| p[3] == 0)
    }

    pub fn marked_count(&self) -> usize {
        self.pixels.chunks_exact(4).filter(|p| p[3] > 0).count()
    }

    /// Pixels with alpha > 0.
    pub fn mark_mask(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.pixels.chunks_exact(4).map(|p| p[3] > 0).collect(),
        }
    }
}

/// Per-pixel foreground flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        check_size("BinaryMask::new", width, height, bits.len(), 1)?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64 && self.get(x as u32, y as u32)
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Set pixels in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    /// Foreground pixels with at least one 4-neighbour in the background.
    /// Pixels outside the image count as background.
    pub fn boundary(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            if !self.get(x, y) {
                return false;
            }
            let (x, y) = (x as i64, y as i64);
            !(self.get_signed(x - 1, y)
                && self.get_signed(x + 1, y)
                && self.get_signed(x, y - 1)
                && self.get_signed(x, y + 1))
        })
    }

    /// Translated copy; pixels shifted out of the image are dropped.
    pub fn translated(&self, dx: i64, dy: i64) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            self.get_signed(x as i64 - dx, y as i64 - dy)
        })
    }
}

/// Two-pass chamfer distance (weights 1 and sqrt 2) from every pixel to the
/// nearest pixel whose flag equals `target`. With `border_is_target` the area
/// outside the image counts as a target one pixel beyond the edge.
pub(crate) fn chamfer_distance(mask: &BinaryMask, target: bool, border_is_target: bool) -> Vec<f64> {
    const DIAG: f64 = std::f64::consts::SQRT_2;
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut d: Vec<f64> = mask
        .bits
        .iter()
        .map(|&b| if b == target { 0.0 } else { f64::INFINITY })
        .collect();
    if border_is_target {
        for y in 0..h {
            for x in 0..w {
                if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                    let i = y * w + x;
                    d[i] = d[i].min(1.0);
                }
            }
        }
    }
    let at = |x: usize, y: usize| y * w + x;
    for y in 0..h {
        for x in 0..w {
            let mut v = d[at(x, y)];
            if x > 0 {
                v = v.min(d[at(x - 1, y)] + 1.0);
            }
            if y > 0 {
                v = v.min(d[at(x, y - 1)] + 1.0);
                if x > 0 {
                    v = v.min(d[at(x - 1, y - 1)] + DIAG);
                }
                if x + 1 < w {
                    v = v.min(d[at(x + 1, y - 1)] + DIAG);
                }
            }
            d[at(x, y)] = v;
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let mut v = d[at(x, y)];
            if x + 1 < w {
                v = v.min(d[at(x + 1, y)] + 1.0);
            }
            if y + 1 < h {
                v = v.min(d[at(x, y + 1)] + 1.0);
                if x + 1 < w {
                    v = v.min(d[at(x + 1, y + 1)] + DIAG);
                }
                if x > 0 {
                    v = v.min(d[at(x - 1, y + 1)] + DIAG);
                }
            }
            d[at(x, y)] = v;
        }
    }
    d
}

fn check_size(context: &'static str, width: u32, height: u32, len: usize, channels: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Contract {
            context,
            message: format!("dimensions must be at least 1x1, got {width}x{height}"),
        });
    }
    let expected = width as usize * height as usize * channels;
    if len != expected {
        return Err(Error::LengthMismatch {
            context,
            expected,
            found: len,
        });
    }
    Ok(())
}

/// Composite `layer` over `frame`: `round(a * mark + (1 - a) * src)` per
/// channel with `a = alpha / 255`, rounding half up.
pub fn alpha_blend(frame: &Frame, layer: &PromptLayer) -> Result<Frame> {
    check_dims("alpha_blend", frame.dims(), layer.dims())?;
    let mut out = frame.clone();
    for (dst, src) in out.pixels.chunks_exact_mut(3).zip(layer.pixels.chunks_exact(4)) {
        let a = src[3] as u32;
        if a == 0 {
            continue;
        }
        for c in 0..3 {
            dst[c] = blend_channel(dst[c], src[c], a);
        }
    }
    Ok(out)
}

#[inline]
fn blend_channel(src: u8, mark: u8, alpha: u32) -> u8 {
    // floor(x / 255 + 1/2) == floor((2x + 255) / 510)
    let num = alpha * mark as u32 + (255 - alpha) * src as u32;
    ((2 * num + 255) / 510) as u8
}

/// Arithmetic mean of the set pixel centers.
pub fn mask_centroid(mask: &BinaryMask) -> Result<PointF> {
    let (mut sx, mut sy, mut n) = (0u64, 0u64, 0u64);
    for (x, y) in mask.iter_set() {
        sx += x as u64;
        sy += y as u64;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(PointF::new(sx as f64 / n as f64, sy as f64 / n as f64))
}

pub fn mask_bbox(mask: &BinaryMask) -> Result<Rect> {
    let mut it = mask.iter_set();
    let (x0, y0) = it.next().ok_or(Error::EmptyMask)?;
    let mut r = Rect {
        min_x: x0,
        min_y: y0,
        max_x: x0,
        max_y: y0,
    };
    // row-major scan: the first set pixel already fixes min_y
    for (x, y) in it {
        r.min_x = r.min_x.min(x);
        r.max_x = r.max_x.max(x);
        r.max_y = r.max_y.max(y);
    }
    Ok(r)
}

/// Set pixel center closest to `p`; ties go to the first pixel in row-major
/// order.
pub fn nearest_interior_point(mask: &BinaryMask, p: PointF) -> Result<PointF> {
    let mut best: Option<(f64, PointF)> = None;
    for (x, y) in mask.iter_set() {
        let c = PointF::new(x as f64, y as f64);
        let d = c.distance_squared(p);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c).ok_or(Error::EmptyMask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(w: u32, h: u32, px: &[(u32, u32)]) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h);
        for &(x, y) in px {
            m.set(x, y, true);
        }
        m
    }

    fn layer_one_pixel(rgba: [u8; 4]) -> PromptLayer {
        PromptLayer::new(1, 1, rgba.to_vec(), None, 0).unwrap()
    }

    #[test]
    fn blend_identity_on_transparent_layer() {
        let f = Frame::new(2, 1, vec![1, 2, 3, 250, 251, 252], 0).unwrap();
        let l = PromptLayer::transparent(2, 1, 0);
        assert_eq!(alpha_blend(&f, &l).unwrap(), f);
    }

    #[test]
    fn blend_full_and_half_alpha() {
        let f = Frame::filled(1, 1, [100, 100, 100], 0).unwrap();
        let out = alpha_blend(&f, &layer_one_pixel([200, 0, 0, 255])).unwrap();
        assert_eq!(out.pixel(0, 0), [200, 0, 0]);
        let out = alpha_blend(&f, &layer_one_pixel([200, 0, 0, 128])).unwrap();
        assert_eq!(out.pixel(0, 0), [150, 50, 50]);
    }

    #[test]
    fn blend_matches_float_formula() {
        for a in 0..=255u32 {
            for &(s, m) in &[(0u8, 255u8), (17, 200), (255, 0), (128, 128), (3, 4)] {
                let af = a as f64 / 255.0;
                let expected = (af * m as f64 + (1.0 - af) * s as f64 + 0.5).floor() as u8;
                assert_eq!(blend_channel(s, m, a), expected, "a={a} s={s} m={m}");
            }
        }
    }

    #[test]
    fn blend_rejects_mismatched_dims() {
        let f = Frame::filled(2, 2, [0, 0, 0], 0).unwrap();
        let l = PromptLayer::transparent(3, 2, 0);
        let err = alpha_blend(&f, &l).unwrap_err();
        assert_eq!(err.code(), "dimension_mismatch");
        assert_eq!(err.contract(), Some("alpha_blend"));
    }

    #[test]
    fn constructors_validate_buffers() {
        assert!(Frame::new(2, 2, vec![0; 11], 0).is_err());
        assert!(Frame::new(0, 2, vec![], 0).is_err());
        assert!(PromptLayer::new(1, 1, vec![0; 3], None, 0).is_err());
        assert!(BinaryMask::new(2, 1, vec![true]).is_err());
    }

    #[test]
    fn centroid_examples() {
        let m = mask_from(10, 10, &[(3, 7)]);
        assert_eq!(mask_centroid(&m).unwrap(), PointF::new(3.0, 7.0));
        let sq = BinaryMask::from_fn(8, 8, |x, y| x < 4 && y < 4);
        assert_eq!(mask_centroid(&sq).unwrap(), PointF::new(1.5, 1.5));
        let l = mask_from(4, 4, &[(0, 0), (0, 1), (0, 2), (1, 2)]);
        assert_eq!(mask_centroid(&l).unwrap(), PointF::new(0.25, 1.25));
        assert!(matches!(mask_centroid(&BinaryMask::empty(3, 3)), Err(Error::EmptyMask)));
    }

    #[test]
    fn bbox_examples() {
        let r = |a, b, c, d| Rect {
            min_x: a,
            min_y: b,
            max_x: c,
            max_y: d,
        };
        assert_eq!(mask_bbox(&mask_from(10, 10, &[(3, 7)])).unwrap(), r(3, 7, 3, 7));
        assert_eq!(mask_bbox(&mask_from(10, 10, &[(1, 2), (5, 9)])).unwrap(), r(1, 2, 5, 9));
        assert_eq!(
            mask_bbox(&mask_from(3, 3, &[(0, 0), (1, 1), (2, 2)])).unwrap(),
            r(0, 0, 2, 2)
        );
        assert!(mask_bbox(&BinaryMask::empty(2, 2)).is_err());
    }

    #[test]
    fn nearest_interior_cases() {
        let m = mask_from(10, 10, &[(2, 2), (5, 5)]);
        assert_eq!(
            nearest_interior_point(&m, PointF::new(5.2, 4.9)).unwrap(),
            PointF::new(5.0, 5.0)
        );
        // equidistant: (2,2) comes first in row-major order
        assert_eq!(
            nearest_interior_point(&m, PointF::new(3.5, 3.5)).unwrap(),
            PointF::new(2.0, 2.0)
        );

        // ring: centroid sits in the hole, compare against a brute-force scan
        let ring = BinaryMask::from_fn(21, 21, |x, y| {
            let d = ((x as f64 - 10.0).powi(2) + (y as f64 - 10.0).powi(2)).sqrt();
            (6.0..=8.0).contains(&d)
        });
        let c = mask_centroid(&ring).unwrap();
        assert!(!ring.get(c.x.round() as u32, c.y.round() as u32));
        let got = nearest_interior_point(&ring, c).unwrap();
        let best = ring
            .iter_set()
            .map(|(x, y)| (x as f64 - c.x).powi(2) + (y as f64 - c.y).powi(2))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(got.distance_squared(c), best);
        assert!(ring.get(got.x as u32, got.y as u32));
    }

    #[test]
    fn boundary_of_filled_square() {
        let sq = BinaryMask::from_fn(6, 6, |x, y| (1..5).contains(&x) && (1..5).contains(&y));
        let b = sq.boundary();
        assert_eq!(b.count(), 12);
        assert!(!b.get(2, 2));
        // touching the image edge still yields a boundary
        let full = BinaryMask::from_fn(3, 3, |_, _| true);
        assert_eq!(full.boundary().count(), 8);
    }

    #[test]
    fn luma_weights() {
        let f = Frame::new(3, 1, vec![255, 0, 0, 0, 255, 0, 0, 0, 255], 0).unwrap();
        assert_eq!(f.to_luma(), vec![76, 150, 29]);
    }
}
