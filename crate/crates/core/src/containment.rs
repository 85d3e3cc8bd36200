//! Local contains/inside computation around one vertex.
//!
//! The two darts of a self-loop play symmetric roles in `sigma*(v)`. The one
//! that opens the span enclosing the inner connected component is the
//! *starting* dart: the closed boundary strictly between it and its partner
//! has orientation `+4`. Spans of loops at one vertex are properly nested,
//! so a single traversal with a stack of prefix orientations classifies all
//! of them.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::level::{Level, VertexId};

/// One self-loop met while traversing a vertex, with the data used to
/// classify it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopRecord {
    /// Loop dart met first from the traversal origin (`d_j`).
    pub first: Dart,
    /// Its partner (`d_k`).
    pub second: Dart,
    /// Orientation of `d_{j+1}..d_{k-1}` from the prefix orientations.
    pub inner_orientation: i32,
    pub starting: Dart,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopScan {
    /// `sigma*(v)` from `v`.
    pub cycle: Vec<Dart>,
    pub loops: Vec<LoopRecord>,
    pub visits: usize,
}

impl LoopScan {
    pub fn starting_darts(&self) -> Vec<Dart> {
        self.loops.iter().map(|l| l.starting).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsideDirect {
    pub vertices: BTreeSet<VertexId>,
    pub starting: Vec<Dart>,
    /// Darts visited by the loop scan plus the inside walks.
    pub visits: usize,
    pub degree: usize,
}

impl Level<'_> {
    /// Orientation of a surviving dart: the cached value at the top level,
    /// otherwise recomputed from its segment.
    pub fn orientation_of(&self, d: Dart) -> Result<i32> {
        if self.index() == self.pyramid().top_index() {
            self.check_alive(d)?;
            Ok(self.pyramid().cached_orientation(d))
        } else {
            self.dart_orientation(d)
        }
    }

    /// Traverses `sigma*(v)` once and classifies every self-loop.
    pub fn scan_loops(&self, v: Dart) -> Result<LoopScan> {
        self.check_alive(v)?;
        self.require_redundant_free()?;
        let cycle = self.vertex_darts(v)?;
        let mut stack: Vec<(Dart, i32)> = Vec::new();
        let mut opened: HashSet<Dart> = HashSet::new();
        let mut loops = Vec::new();
        let mut prefix = 0;
        let mut prev: Option<Dart> = None;
        for &d in &cycle {
            let before = prefix;
            prefix = match prev {
                None => self.orientation_of(d)?,
                Some(p) => prefix + self.junction(p, d)? + self.orientation_of(d)?,
            };
            if self.is_self_loop(d) {
                let partner = self.alpha(d);
                match stack.last() {
                    Some(&(top, at_first)) if top == partner => {
                        stack.pop();
                        let after_first = self.sigma(partner);
                        let last_inside = prev.expect("a closing dart is never first");
                        let inner = before - at_first - self.junction(partner, after_first)?
                            + self.junction(last_inside, after_first)?;
                        let starting = match inner {
                            4 => partner,
                            -4 => d,
                            other => {
                                return Err(PyramidError::Corrupt(format!(
                                    "loop ({partner}, {d}) encloses orientation {other}"
                                )))
                            }
                        };
                        loops.push(LoopRecord { first: partner, second: d, inner_orientation: inner, starting });
                    }
                    _ if opened.contains(&partner) => return Err(PyramidError::NonPlanar(d)),
                    _ => {
                        opened.insert(d);
                        stack.push((d, prefix));
                    }
                }
            }
            prev = Some(d);
        }
        if let Some(&(d, _)) = stack.last() {
            return Err(PyramidError::Corrupt(format!("loop dart {d} has no partner in its vertex")));
        }
        let visits = cycle.len();
        Ok(LoopScan { cycle, loops, visits })
    }

    /// Starting darts of the self-loops of the vertex of `v`.
    pub fn starting_darts(&self, v: Dart) -> Result<Vec<Dart>> {
        Ok(self.scan_loops(v)?.starting_darts())
    }

    /// Vertices reached by non-loop darts strictly inside the span of a
    /// starting dart, each dart visited at most once.
    pub fn inside_direct(&self, v: Dart) -> Result<InsideDirect> {
        let scan = self.scan_loops(v)?;
        let starting: HashSet<Dart> = scan.loops.iter().map(|l| l.starting).collect();
        let mut vertices = BTreeSet::new();
        let mut visits = scan.visits;
        for &s in &starting {
            let end = self.alpha(s);
            let mut x = self.sigma(s);
            while x != end {
                visits += 1;
                if starting.contains(&x) {
                    x = self.sigma(self.alpha(x));
                    continue;
                }
                if !self.is_self_loop(x) {
                    vertices.insert(self.vertex_of(self.alpha(x))?);
                }
                x = self.sigma(x);
            }
        }
        let mut starting: Vec<Dart> = scan.starting_darts();
        starting.sort();
        Ok(InsideDirect { vertices, starting, visits, degree: scan.cycle.len() })
    }

    /// Every vertex reachable from the directly enclosed ones without going
    /// through `v`.
    pub fn inside_all(&self, v: Dart) -> Result<BTreeSet<VertexId>> {
        let own = self.vertex_of(v)?;
        let direct = self.inside_direct(v)?.vertices;
        let mut seen: BTreeSet<VertexId> = direct.clone();
        let mut queue: VecDeque<VertexId> = direct.into_iter().collect();
        while let Some(u) = queue.pop_front() {
            for d in self.vertex_darts(u)? {
                let w = self.vertex_of(self.alpha(d))?;
                if w != own && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(seen)
    }

    /// `a contains b`.
    pub fn contains_region(&self, a: VertexId, b: VertexId) -> Result<bool> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        Ok(a != b && self.inside_all(a)?.contains(&b))
    }

    /// `a inside b`.
    pub fn inside_region(&self, a: VertexId, b: VertexId) -> Result<bool> {
        self.contains_region(b, a)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("label {0} does not occur in the image")]
    UnknownLabel(u32),
    #[error("label array has {len} entries for a {width}x{height} image")]
    Shape { len: usize, width: usize, height: usize },
}

/// Pixel-level definition of "`b` inside `a`": a flood fill from the pixels
/// of `b` over the pixels not labelled `a` never reaches the image border.
///
/// Regions are 4-connected, so the fill uses 8-connectivity: two pixels of
/// `a` touching only at a corner do not seal the gap between them.
pub fn flood_fill_contains_oracle(
    labels: &[u32],
    width: usize,
    height: usize,
    a: u32,
    b: u32,
) -> std::result::Result<bool, OracleError> {
    if labels.len() != width * height {
        return Err(OracleError::Shape { len: labels.len(), width, height });
    }
    for l in [a, b] {
        if !labels.contains(&l) {
            return Err(OracleError::UnknownLabel(l));
        }
    }
    if a == b {
        return Ok(false);
    }
    let mut seen = vec![false; labels.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, &l) in labels.iter().enumerate() {
        if l == b {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % width, i / width);
        if x == 0 || y == 0 || x + 1 == width || y + 1 == height {
            return Ok(false);
        }
        for j in [i - width - 1, i - width, i - width + 1, i - 1, i + 1, i + width - 1, i + width, i + width + 1] {
            if !seen[j] && labels[j] != a {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(true)
}

/// Regions of a label image as 4-connected components, numbered in raster
/// order of their first pixel.
pub fn connected_components(labels: &[u32], width: usize, height: usize) -> Vec<u32> {
    let mut out = vec![u32::MAX; labels.len()];
    let mut next = 0;
    for start in 0..labels.len() {
        if out[start] != u32::MAX {
            continue;
        }
        out[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % width, i / width);
            let mut near = Vec::with_capacity(4);
            if x > 0 {
                near.push(i - 1);
            }
            if x + 1 < width {
                near.push(i + 1);
            }
            if y > 0 {
                near.push(i - width);
            }
            if y + 1 < height {
                near.push(i + width);
            }
            for j in near {
                if out[j] == u32::MAX && labels[j] == labels[i] {
                    out[j] = next;
                    queue.push_back(j);
                }
            }
        }
        next += 1;
    }
    out
}

/// Groups pixels by region id.
pub fn label_index<T: Copy + Eq + std::hash::Hash>(labels: &[T]) -> HashMap<T, u32> {
    let mut out = HashMap::new();
    for &l in labels {
        let n = out.len() as u32;
        out.entry(l).or_insert(n);
    }
    out
}
