//! Synthetic clips with known motion, for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Frame, PointF, VideoClip};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareClipSpec {
    pub width: u32,
    pub height: u32,
    pub frames: usize,
    pub side: u32,
    /// Largest per-axis integer step between consecutive frames; 0 is static.
    pub max_step: u32,
}

impl Default for SquareClipSpec {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            frames: 32,
            side: 20,
            max_step: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticClip {
    pub clip: VideoClip,
    pub masks: Vec<BinaryMask>,
    /// Ground-truth square center per frame.
    pub centers: Vec<PointF>,
}

const BACKGROUND: u8 = 30;

/// Smoothed random texture of `side`², values spread over [40, 215].
fn texture(side: u32, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n = side as usize;
    let mut v: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..255.0)).collect();
    for _ in 0..2 {
        let src = v.clone();
        for y in 0..n {
            for x in 0..n {
                let mut s = 0.0;
                let mut c = 0.0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx >= 0 && ny >= 0 && nx < n as i64 && ny < n as i64 {
                            s += src[ny as usize * n + nx as usize];
                            c += 1.0;
                        }
                    }
                }
                v[y * n + x] = s / c;
            }
        }
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    v.iter().map(|x| (40.0 + 175.0 * (x - lo) / span).round() as u8).collect()
}

/// A textured square on a flat background, moving by a random integer step
/// of at most `max_step` per axis each frame and bouncing off the borders.
pub fn textured_square_clip(spec: &SquareClipSpec, seed: u64) -> Result<SyntheticClip> {
    if spec.frames == 0 {
        return Err(Error::EmptyClip);
    }
    if spec.side == 0 || spec.side > spec.width || spec.side > spec.height {
        return Err(Error::InvalidConfig("square must fit inside the frame".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tex = texture(spec.side, &mut rng);
    let max_x = (spec.width - spec.side) as i64;
    let max_y = (spec.height - spec.side) as i64;
    let mut pos = (rng.gen_range(0..=max_x), rng.gen_range(0..=max_y));
    let step = spec.max_step as i64;

    let mut frames = Vec::with_capacity(spec.frames);
    let mut masks = Vec::with_capacity(spec.frames);
    let mut centers = Vec::with_capacity(spec.frames);
    for i in 0..spec.frames {
        if i > 0 && step > 0 {
            let reflect = |v: i64, max: i64| {
                if v < 0 {
                    (-v).min(max)
                } else if v > max {
                    (2 * max - v).max(0)
                } else {
                    v
                }
            };
            pos.0 = reflect(pos.0 + rng.gen_range(-step..=step), max_x);
            pos.1 = reflect(pos.1 + rng.gen_range(-step..=step), max_y);
        }
        let (ox, oy) = (pos.0 as u32, pos.1 as u32);
        let mut frame = Frame::filled(spec.width, spec.height, [BACKGROUND; 3], i)?;
        for y in 0..spec.side {
            for x in 0..spec.side {
                let t = tex[(y * spec.side + x) as usize];
                frame.set_pixel(ox + x, oy + y, [t, t, t]);
            }
        }
        frames.push(frame);
        masks.push(BinaryMask::from_fn(spec.width, spec.height, |x, y| {
            x >= ox && x < ox + spec.side && y >= oy && y < oy + spec.side
        }));
        let half = (spec.side - 1) as f64 / 2.0;
        centers.push(PointF::new(ox as f64 + half, oy as f64 + half));
    }
    Ok(SyntheticClip {
        clip: VideoClip::new(frames)?,
        masks,
        centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::mask_centroid;

    #[test]
    fn motion_is_bounded_and_matches_masks() {
        let s = textured_square_clip(&SquareClipSpec::default(), 4).unwrap();
        assert_eq!(s.clip.len(), 32);
        for w in s.centers.windows(2) {
            assert!((w[1].x - w[0].x).abs() <= 3.0 && (w[1].y - w[0].y).abs() <= 3.0);
        }
        for (m, c) in s.masks.iter().zip(&s.centers) {
            assert_eq!(mask_centroid(m).unwrap(), *c);
        }
    }

    #[test]
    fn static_and_deterministic() {
        let spec = SquareClipSpec {
            max_step: 0,
            ..Default::default()
        };
        let s = textured_square_clip(&spec, 1).unwrap();
        assert!(s.clip.frames().windows(2).all(|w| w[0].pixels() == w[1].pixels()));
        let a = textured_square_clip(&SquareClipSpec::default(), 9).unwrap();
        let b = textured_square_clip(&SquareClipSpec::default(), 9).unwrap();
        assert_eq!(a.clip, b.clip);
    }
}
