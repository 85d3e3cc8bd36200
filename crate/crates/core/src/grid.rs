//! The base level: a `W x H` 4-connected sampling grid with its crack
//! embedding.
//!
//! Pixel corners have integer coordinates `(x, y)` with `0 <= x <= W`,
//! `0 <= y <= H` and `y` growing downwards. Every pixel side (crack) carries
//! one positive dart. Numbering:
//!
//! * vertical cracks first, row-major: the crack on column `x` between
//!   corners `(x, y)` and `(x, y + 1)` is `1 + y (W + 1) + x`, oriented up;
//! * then horizontal cracks, row-major: the crack on row `y` between
//!   `(x, y)` and `(x + 1, y)` is `1 + (W + 1) H + y W + x`, oriented left.
//!
//! A dart belongs to the vertex lying on its left, so the sides of a pixel
//! read counter-clockwise and the outer vertex walks the image border
//! clockwise. Corners are the `phi` cycles (darts sharing a start point).

use serde::{Deserialize, Serialize};

use crate::boundary::Move;
use crate::dart::Dart;
use crate::map::{CombinatorialMap, MapError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub fn new(x: i32, y: i32) -> Point {
        Point { x, y }
    }

    pub fn step(self, m: Move) -> Point {
        let (dx, dy) = m.delta();
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Which base-level vertex a dart belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseVertex {
    Pixel { x: u32, y: u32 },
    Outer,
}

/// An oriented crack: start corner plus Freeman move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crack {
    pub start: Point,
    pub mv: Move,
}

impl Crack {
    pub fn end(&self) -> Point {
        self.start.step(self.mv)
    }
}

/// Geometry of the base grid. The embedding of each dart is computed from
/// its id, so it costs no storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    width: u32,
    height: u32,
}

impl Grid {
    pub fn new(width: i64, height: i64) -> Result<Grid, MapError> {
        if width < 1 || height < 1 || width > 1 << 14 || height > 1 << 14 {
            return Err(MapError::EmptyGrid { width, height });
        }
        Ok(Grid { width: width as u32, height: height as u32 })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    fn vertical_count(&self) -> u32 {
        (self.width + 1) * self.height
    }

    /// Number of cracks, i.e. of positive darts.
    pub fn crack_count(&self) -> usize {
        (self.vertical_count() + self.width * (self.height + 1)) as usize
    }

    pub fn dart_count(&self) -> usize {
        2 * self.crack_count()
    }

    /// Positive dart of the vertical crack on column `x`, rows `y..y+1`.
    pub fn vertical(&self, x: u32, y: u32) -> Dart {
        debug_assert!(x <= self.width && y < self.height);
        Dart::from_id((1 + y * (self.width + 1) + x) as i32)
    }

    /// Positive dart of the horizontal crack on row `y`, columns `x..x+1`.
    pub fn horizontal(&self, x: u32, y: u32) -> Dart {
        debug_assert!(x < self.width && y <= self.height);
        Dart::from_id((1 + self.vertical_count() + y * self.width + x) as i32)
    }

    pub fn contains(&self, d: Dart) -> bool {
        (d.id().unsigned_abs() as usize) <= self.crack_count()
    }

    /// Start corner and move of a dart.
    pub fn crack(&self, d: Dart) -> Crack {
        let k = d.id().unsigned_abs() - 1;
        let positive = if k < self.vertical_count() {
            let (x, y) = (k % (self.width + 1), k / (self.width + 1));
            Crack { start: Point::new(x as i32, y as i32 + 1), mv: Move::Up }
        } else {
            let k = k - self.vertical_count();
            let (x, y) = (k % self.width, k / self.width);
            Crack { start: Point::new(x as i32 + 1, y as i32), mv: Move::Left }
        };
        if d.is_positive() {
            positive
        } else {
            Crack { start: positive.end(), mv: positive.mv.opposite() }
        }
    }

    pub fn move_of(&self, d: Dart) -> Move {
        self.crack(d).mv
    }

    /// The pixel on the left of the oriented crack, if inside the image.
    pub fn left_pixel(&self, d: Dart) -> Option<(u32, u32)> {
        let c = self.crack(d);
        let (x, y) = match c.mv {
            Move::Up => (c.start.x - 1, c.start.y - 1),
            Move::Left => (c.start.x - 1, c.start.y),
            Move::Down => (c.start.x, c.start.y),
            Move::Right => (c.start.x, c.start.y - 1),
        };
        self.pixel_at(x, y)
    }

    pub fn right_pixel(&self, d: Dart) -> Option<(u32, u32)> {
        self.left_pixel(d.alpha0())
    }

    fn pixel_at(&self, x: i32, y: i32) -> Option<(u32, u32)> {
        (x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height).then_some((x as u32, y as u32))
    }

    pub fn base_vertex(&self, d: Dart) -> BaseVertex {
        match self.left_pixel(d) {
            Some((x, y)) => BaseVertex::Pixel { x, y },
            None => BaseVertex::Outer,
        }
    }

    /// Dense id of a base vertex: pixels row-major, then the outer vertex.
    pub fn base_vertex_index(&self, v: BaseVertex) -> usize {
        match v {
            BaseVertex::Pixel { x, y } => (y * self.width + x) as usize,
            BaseVertex::Outer => self.pixel_count(),
        }
    }

    /// Sides of a pixel in counter-clockwise order: right, top, left, bottom.
    pub fn pixel_darts(&self, x: u32, y: u32) -> [Dart; 4] {
        [
            self.vertical(x + 1, y),
            self.horizontal(x, y),
            self.vertical(x, y).alpha0(),
            self.horizontal(x, y + 1).alpha0(),
        ]
    }

    /// Darts of the outer vertex, walking the border clockwise from the
    /// top-left corner.
    pub fn outer_darts(&self) -> Vec<Dart> {
        let (w, h) = (self.width, self.height);
        let mut out = Vec::with_capacity(2 * (w + h) as usize);
        out.extend((0..w).map(|x| self.horizontal(x, 0).alpha0()));
        out.extend((0..h).map(|y| self.vertical(w, y).alpha0()));
        out.extend((0..w).rev().map(|x| self.horizontal(x, h)));
        out.extend((0..h).rev().map(|y| self.vertical(0, y)));
        out
    }

    /// Builds the base combinatorial map `G0`.
    pub fn build_map(&self) -> CombinatorialMap {
        let n = self.dart_count();
        let mut sigma = vec![None; n];
        let mut alpha = vec![None; n];
        for y in 0..self.height {
            for x in 0..self.width {
                let ring = self.pixel_darts(x, y);
                for k in 0..4 {
                    sigma[ring[k].index()] = Some(ring[(k + 1) % 4]);
                }
            }
        }
        let outer = self.outer_darts();
        for k in 0..outer.len() {
            sigma[outer[k].index()] = Some(outer[(k + 1) % outer.len()]);
        }
        for (i, slot) in alpha.iter_mut().enumerate() {
            *slot = Some(Dart::from_index(i).alpha0());
        }
        CombinatorialMap::from_dense(sigma, alpha)
    }
}

/// Base map of a `width x height` grid together with its embedding.
pub fn build_grid_map(width: i64, height: i64) -> Result<(CombinatorialMap, Grid), MapError> {
    let grid = Grid::new(width, height)?;
    Ok((grid.build_map(), grid))
}
