//! Symbol extraction from road signs: a sign is a region close to the
//! expected background colour that contains other regions, and the symbol
//! is what it contains.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::error::PyramidError;
use crate::level::{Level, VertexId};
use crate::merge::{color_distance, region_stats, rgb, RegionStats};
use crate::raster::Image;

#[derive(Debug, Error)]
pub enum RoadsignError {
    #[error("no sign found")]
    NoSign,
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Pyramid(#[from] PyramidError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sign {
    /// The candidate background region.
    pub background: VertexId,
    pub symbol: BTreeSet<VertexId>,
    /// Distance from the symbol's mean colour to the expected one.
    pub score: f64,
    pub symbol_area: u64,
}

struct Candidate {
    region: VertexId,
    inside: BTreeSet<VertexId>,
    score: f64,
    area: u64,
}

fn candidates(
    level: &Level,
    image: &Image,
    k: usize,
    background: [u8; 3],
    symbol: [u8; 3],
) -> Result<Vec<Candidate>, RoadsignError> {
    if k == 0 {
        return Err(RoadsignError::ZeroK);
    }
    let stats: BTreeMap<VertexId, RegionStats> = region_stats(level, image)?;
    let mut near: Vec<(f64, VertexId)> =
        stats.iter().map(|(&v, s)| (color_distance(s.mean(), rgb(background)), v)).collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    for &(_, v) in near.iter().take(k) {
        let inside = level.inside_all(v)?;
        if inside.is_empty() {
            continue;
        }
        let (mut area, mut sum) = (0u64, [0f64; 3]);
        for u in &inside {
            let s = &stats[u];
            area += s.count;
            for (acc, m) in sum.iter_mut().zip(s.mean()) {
                *acc += m * s.count as f64;
            }
        }
        let mean = sum.map(|x| x / area as f64);
        out.push(Candidate { region: v, inside, score: color_distance(mean, rgb(symbol)), area });
    }
    // best score first; ties go to the larger contained area
    out.sort_by(|a, b| a.score.total_cmp(&b.score).then(b.area.cmp(&a.area)).then(a.region.cmp(&b.region)));
    Ok(out)
}

fn sign(c: Candidate) -> Sign {
    Sign { background: c.region, symbol: c.inside, score: c.score, symbol_area: c.area }
}

/// Among the `k` regions whose mean colour is nearest `background`, keeps
/// those containing something and returns the one whose contents are
/// closest to `symbol`.
pub fn roadsign_extract(
    level: &Level,
    image: &Image,
    k: usize,
    background: [u8; 3],
    symbol: [u8; 3],
) -> Result<Sign, RoadsignError> {
    candidates(level, image, k, background, symbol)?.into_iter().next().map(sign).ok_or(RoadsignError::NoSign)
}

/// One sign per innermost candidate: a candidate is dropped when another
/// candidate lies inside it.
pub fn roadsign_extract_all(
    level: &Level,
    image: &Image,
    k: usize,
    background: [u8; 3],
    symbol: [u8; 3],
) -> Result<Vec<Sign>, RoadsignError> {
    let all = candidates(level, image, k, background, symbol)?;
    let regions: BTreeSet<VertexId> = all.iter().map(|c| c.region).collect();
    let signs: Vec<Sign> = all.into_iter().filter(|c| c.inside.is_disjoint(&regions)).map(sign).collect();
    if signs.is_empty() {
        return Err(RoadsignError::NoSign);
    }
    Ok(signs)
}

/// Binary mask of the given regions: white where a pixel belongs to one.
pub fn region_mask(level: &Level, regions: &BTreeSet<VertexId>) -> Image {
    let grid = level.pyramid().grid();
    let pixels = level.pixel_labels().iter().map(|v| if regions.contains(v) { [255; 3] } else { [0; 3] }).collect();
    Image::new(grid.width() as usize, grid.height() as usize, pixels).expect("grid has pixels")
}

/// Synthetic sign rasters.
pub mod fixtures {
    use crate::raster::Image;

    pub const RED: [u8; 3] = [200, 20, 30];
    pub const WHITE: [u8; 3] = [250, 250, 250];
    pub const BLUE: [u8; 3] = [20, 40, 200];
    pub const GREY: [u8; 3] = [120, 130, 120];

    fn paint(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Image {
        Image::new(width, height, (0..width * height).map(|i| f(i % width, i / width)).collect())
            .expect("fixture sizes are positive")
    }

    /// Arrow pointing right in a `size`-wide square, relative coordinates.
    fn arrow(x: usize, y: usize, size: usize) -> bool {
        let (x, y) = (x as f64 / size as f64, y as f64 / size as f64);
        let shaft = (0.25..0.6).contains(&x) && (0.44..0.56).contains(&y);
        let head = (0.58..0.8).contains(&x) && (y - 0.5).abs() < 0.8 - x;
        shaft || head
    }

    fn sign_pixel(x: usize, y: usize, size: usize) -> [u8; 3] {
        let frame = size / 8;
        if x < frame || y < frame || x >= size - frame || y >= size - frame {
            RED
        } else if arrow(x, y, size) {
            BLUE
        } else {
            WHITE
        }
    }

    /// Red frame touching the image edge, white background, blue arrow.
    pub fn arrow_sign(size: usize) -> Image {
        paint(size, size, |x, y| sign_pixel(x, y, size))
    }

    /// Three vertical bands, white, blue, white, each touching the image
    /// edge. Its adjacency graph is the same path as the arrow sign's.
    pub fn flag_sign(size: usize) -> Image {
        paint(size, size, |x, _| if x * 3 / size == 1 { BLUE } else { WHITE })
    }

    /// Two arrow signs side by side on a grey scene.
    pub fn two_signs(size: usize) -> Image {
        let margin = size / 4;
        paint(2 * size + 3 * margin, size + 2 * margin, |x, y| {
            if y < margin || y >= margin + size {
                return GREY;
            }
            let y = y - margin;
            for left in [margin, 2 * margin + size] {
                if (left..left + size).contains(&x) {
                    return sign_pixel(x - left, y, size);
                }
            }
            GREY
        })
    }
}
