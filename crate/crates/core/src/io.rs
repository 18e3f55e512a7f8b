//! PNG reading and writing for frames, masks and prompt layers, and the
//! `%05d.png` frame-directory layout.

use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, ImageBuffer, Luma, Rgb, RgbImage, Rgba, RgbaImage};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Frame, PromptLayer, VideoClip};

fn image_err(path: &Path) -> impl FnOnce(image::ImageError) -> Error + '_ {
    move |source| Error::Image {
        path: path.to_path_buf(),
        source,
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

pub fn frame_file_name(index: usize) -> String {
    format!("{index:05}.png")
}

/// Reads any PNG as 8-bit RGB.
pub fn read_frame(path: &Path, index: usize) -> Result<Frame> {
    let img = image::open(path).map_err(image_err(path))?.to_rgb8();
    let (w, h) = img.dimensions();
    Frame::new(w, h, img.into_raw(), index)
}

pub fn write_frame(path: &Path, frame: &Frame) -> Result<()> {
    ensure_parent(path)?;
    let img: RgbImage = ImageBuffer::<Rgb<u8>, _>::from_raw(frame.width(), frame.height(), frame.pixels().to_vec())
        .expect("frame buffer length is checked at construction");
    img.save(path).map_err(image_err(path))
}

/// Any nonzero gray level is foreground.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = image::open(path).map_err(image_err(path))?.to_luma8();
    let (w, h) = img.dimensions();
    BinaryMask::new(w, h, img.into_raw().into_iter().map(|v| v != 0).collect())
}

/// Foreground is written as 255.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    ensure_parent(path)?;
    let raw = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let img: GrayImage = ImageBuffer::<Luma<u8>, _>::from_raw(mask.width(), mask.height(), raw)
        .expect("mask buffer length is checked at construction");
    img.save(path).map_err(image_err(path))
}

pub fn read_layer(path: &Path) -> Result<PromptLayer> {
    let img = image::open(path).map_err(image_err(path))?.to_rgba8();
    let (w, h) = img.dimensions();
    PromptLayer::new(w, h, img.into_raw(), None, 0)
}

pub fn write_layer(path: &Path, layer: &PromptLayer) -> Result<()> {
    ensure_parent(path)?;
    let img: RgbaImage = ImageBuffer::<Rgba<u8>, _>::from_raw(layer.width(), layer.height(), layer.pixels().to_vec())
        .expect("layer buffer length is checked at construction");
    img.save(path).map_err(image_err(path))
}

/// Numbered files in order, plus everything else that was passed over.
pub type NumberedListing = (Vec<(u64, PathBuf)>, Vec<PathBuf>);

/// `*.png` files whose stem parses as an integer, sorted numerically.
/// Other entries are returned separately so callers can report them.
pub fn list_numbered_pngs(dir: &Path) -> Result<NumberedListing> {
    let mut numbered = Vec::new();
    let mut skipped = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        match path.file_stem().and_then(|s| s.to_str()).and_then(|s| s.parse::<u64>().ok()) {
            Some(n) => numbered.push((n, path)),
            None => skipped.push(path),
        }
    }
    numbered.sort();
    skipped.sort();
    Ok((numbered, skipped))
}

/// Loads a frame directory in numeric order.
pub fn read_clip_dir(dir: &Path) -> Result<VideoClip> {
    let (files, _) = list_numbered_pngs(dir)?;
    let frames = files
        .iter()
        .enumerate()
        .map(|(i, (_, p))| read_frame(p, i))
        .collect::<Result<Vec<_>>>()?;
    VideoClip::new(frames)
}

pub fn read_mask_dir(dir: &Path) -> Result<Vec<BinaryMask>> {
    let (files, _) = list_numbered_pngs(dir)?;
    files.iter().map(|(_, p)| read_mask(p)).collect()
}

pub fn write_clip_dir(dir: &Path, frames: &[Frame]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, f) in frames.iter().enumerate() {
        write_frame(&dir.join(frame_file_name(i)), f)?;
    }
    Ok(())
}

pub fn write_layer_dir(dir: &Path, layers: &[PromptLayer]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, l) in layers.iter().enumerate() {
        write_layer(&dir.join(frame_file_name(i)), l)?;
    }
    Ok(())
}

pub fn read_layer_dir(dir: &Path) -> Result<Vec<PromptLayer>> {
    let (files, _) = list_numbered_pngs(dir)?;
    files
        .iter()
        .enumerate()
        .map(|(i, (_, p))| read_layer(p).map(|l| l.with_anchor_frame(i)))
        .collect()
}
