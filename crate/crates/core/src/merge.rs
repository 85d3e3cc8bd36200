//! Colour-threshold region merging that drives a pyramid from an image.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::grid::Grid;
use crate::level::{Level, VertexId};
use crate::pyramid::{Kernel, KernelState, Pyramid, UnionFind};
use crate::raster::Image;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionStats {
    pub count: u64,
    sum: [u64; 3],
    /// Inclusive pixel bounds: `[min_x, min_y, max_x, max_y]`.
    pub bbox: [usize; 4],
}

impl RegionStats {
    fn pixel(x: usize, y: usize, c: [u8; 3]) -> RegionStats {
        RegionStats { count: 1, sum: c.map(u64::from), bbox: [x, y, x, y] }
    }

    fn absorb(&mut self, o: &RegionStats) {
        self.count += o.count;
        for k in 0..3 {
            self.sum[k] += o.sum[k];
        }
        self.bbox = [
            self.bbox[0].min(o.bbox[0]),
            self.bbox[1].min(o.bbox[1]),
            self.bbox[2].max(o.bbox[2]),
            self.bbox[3].max(o.bbox[3]),
        ];
    }

    pub fn mean(&self) -> [f64; 3] {
        self.sum.map(|s| s as f64 / self.count as f64)
    }
}

pub fn color_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn rgb(c: [u8; 3]) -> [f64; 3] {
    c.map(f64::from)
}

/// Statistics of every non-outer region of a level, keyed by vertex.
pub fn region_stats(level: &Level, image: &Image) -> Result<BTreeMap<VertexId, RegionStats>> {
    let grid = level.pyramid().grid();
    if grid.width() as usize != image.width || grid.height() as usize != image.height {
        return Err(PyramidError::Format(format!(
            "image is {}x{} but the pyramid is {}x{}",
            image.width,
            image.height,
            grid.width(),
            grid.height()
        )));
    }
    let mut out: BTreeMap<VertexId, RegionStats> = BTreeMap::new();
    for (i, v) in level.pixel_labels().into_iter().enumerate() {
        let (x, y) = (i % image.width, i / image.width);
        let px = RegionStats::pixel(x, y, image.pixels[i]);
        match out.get_mut(&v) {
            Some(s) => s.absorb(&px),
            None => {
                out.insert(v, px);
            }
        }
    }
    Ok(out)
}

/// Contraction forest of the top level: Kruskal over edges between distinct
/// non-outer regions whose mean colours are within `threshold`, ordered by
/// (distance, smallest dart).
pub fn merge_kernel(pyr: &Pyramid, image: &Image, threshold: f64) -> Result<Kernel> {
    let top = pyr.top();
    let stats = region_stats(&top, image)?;
    let outer = top.outer_vertex();
    let mut edges: Vec<(f64, Dart)> = Vec::new();
    for d in top.map().darts() {
        let e = top.alpha(d);
        if d > e || top.is_self_loop(d) {
            continue;
        }
        let (u, v) = (top.vertex_of(d)?, top.vertex_of(e)?);
        if Some(u) == outer || Some(v) == outer {
            continue;
        }
        let dist = color_distance(stats[&u].mean(), stats[&v].mean());
        if dist <= threshold {
            edges.push((dist, d));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut uf = UnionFind::new(top.vertex_count());
    let mut darts = Vec::new();
    for (_, d) in edges {
        let e = top.alpha(d);
        if uf.union(top.vertex_number(d), top.vertex_number(e)) {
            darts.extend([d, e]);
        }
    }
    Ok(Kernel::new(KernelState::Ck, darts))
}

/// Contracts the regions closer than `threshold` and simplifies the result.
/// Returns `false` and leaves the pyramid untouched when nothing merges.
pub fn merge_level(pyr: &mut Pyramid, image: &Image, threshold: f64) -> Result<bool> {
    if pyr.expected_state() != KernelState::Ck {
        return Err(PyramidError::KernelOrder { expected: KernelState::Ck, got: pyr.expected_state() });
    }
    let ck = merge_kernel(pyr, image, threshold)?;
    if ck.is_empty() {
        return Ok(false);
    }
    apply_round(pyr, &ck)?;
    Ok(true)
}

fn apply_round(pyr: &mut Pyramid, ck: &Kernel) -> Result<()> {
    pyr.apply_kernel(ck)?;
    let k = pyr.compute_rkesl();
    pyr.apply_kernel(&k)?;
    let k = pyr.compute_rkede();
    pyr.apply_kernel(&k)
}

/// Merges until stable. If the first round merges nothing, an empty
/// contraction is still followed by both removal kernels so that the top
/// level is free of redundant edges.
pub fn build_pyramid(image: &Image, threshold: f64) -> Result<Pyramid> {
    let grid = Grid::new(image.width as i64, image.height as i64)?;
    let mut pyr = Pyramid::new(grid);
    while merge_level(&mut pyr, image, threshold)? {}
    if pyr.top_index() == 0 {
        apply_round(&mut pyr, &Kernel::empty(KernelState::Ck))?;
    }
    Ok(pyr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(w: usize, h: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Image {
        Image::new(w, h, (0..w * h).map(|i| f(i % w, i / w)).collect()).unwrap()
    }

    #[test]
    fn distinct_colors_do_not_merge() {
        let img = image(3, 2, |x, y| [(x * 40) as u8, (y * 90) as u8, 0]);
        let mut pyr = Pyramid::new(Grid::new(3, 2).unwrap());
        assert!(!merge_level(&mut pyr, &img, 0.0).unwrap());
        assert_eq!(pyr.top_index(), 0);
        let pyr = build_pyramid(&img, 0.0).unwrap();
        assert_eq!(pyr.top().vertex_count(), 7);
        assert!(pyr.top().is_redundant_edge_free());
    }

    #[test]
    fn uniform_image_collapses_to_one_region() {
        let img = Image::filled(5, 4, [10, 20, 30]).unwrap();
        let pyr = build_pyramid(&img, 1.0).unwrap();
        let top = pyr.top();
        assert_eq!(top.vertex_count(), 2);
        let stats = region_stats(&top, &img).unwrap();
        assert_eq!(stats.len(), 1);
        let s = stats.values().next().unwrap();
        assert_eq!((s.count, s.bbox, s.mean()), (20, [0, 0, 4, 3], [10.0, 20.0, 30.0]));
        let region = *stats.keys().next().unwrap();
        assert!(top.vertex_darts(region).unwrap().iter().all(|&d| top.vertex_of(top.alpha(d)).unwrap() != region));
    }

    #[test]
    fn pixel_counts_are_conserved() {
        let img = image(6, 5, |x, y| [((x * y) % 3 * 50) as u8, 0, ((x + y) % 2 * 20) as u8]);
        let pyr = build_pyramid(&img, 30.0).unwrap();
        for i in 0..=pyr.top_index() {
            let total: u64 = region_stats(&pyr.level(i).unwrap(), &img).unwrap().values().map(|s| s.count).sum();
            assert_eq!(total, 30);
        }
    }
}
