//! One reconstructed level of a pyramid, with its vertices labelled.

use std::sync::OnceLock;

use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::grid::BaseVertex;
use crate::map::{CombinatorialMap, Perm};
use crate::pyramid::{peel_empty_loops, KernelState, Pyramid, UnionFind};

/// A region of a level, identified by the smallest dart of its sigma cycle.
pub type VertexId = Dart;

pub struct Level<'p> {
    pyr: &'p Pyramid,
    index: usize,
    map: CombinatorialMap,
    vertex_of: Vec<u32>,
    reps: Vec<Dart>,
    redundant: OnceLock<Option<Dart>>,
}

const NONE: u32 = u32::MAX;

impl<'p> Level<'p> {
    pub(crate) fn new(pyr: &'p Pyramid, index: usize, map: CombinatorialMap) -> Level<'p> {
        let mut vertex_of = vec![NONE; map.capacity()];
        let mut reps = Vec::new();
        for cycle in map.cycles(Perm::Sigma) {
            for d in &cycle {
                vertex_of[d.index()] = reps.len() as u32;
            }
            reps.push(cycle[0]);
        }
        Level { pyr, index, map, vertex_of, reps, redundant: OnceLock::new() }
    }

    pub fn pyramid(&self) -> &'p Pyramid {
        self.pyr
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    pub fn contains(&self, d: Dart) -> bool {
        self.map.contains(d)
    }

    pub(crate) fn check_alive(&self, d: Dart) -> Result<()> {
        if self.map.contains(d) {
            Ok(())
        } else {
            Err(PyramidError::DeadDart { dart: d, level: self.index })
        }
    }

    #[inline]
    pub fn sigma(&self, d: Dart) -> Dart {
        self.map.sigma(d)
    }

    #[inline]
    pub fn alpha(&self, d: Dart) -> Dart {
        self.map.alpha(d)
    }

    #[inline]
    pub fn phi(&self, d: Dart) -> Dart {
        self.map.phi(d)
    }

    /// Vertex representatives in canonical order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.reps
    }

    pub fn vertex_count(&self) -> usize {
        self.reps.len()
    }

    /// Dense number of the vertex holding `d`.
    pub(crate) fn vertex_number(&self, d: Dart) -> usize {
        self.vertex_of[d.index()] as usize
    }

    /// Representative of the vertex holding `d`.
    pub fn vertex_of(&self, d: Dart) -> Result<VertexId> {
        self.check_alive(d)?;
        Ok(self.reps[self.vertex_number(d)])
    }

    /// Checks that `v` is the representative of its vertex.
    pub fn check_vertex(&self, v: VertexId) -> Result<usize> {
        if !self.map.contains(v) || self.reps[self.vertex_number(v)] != v {
            return Err(PyramidError::InvalidVertex(v));
        }
        Ok(self.vertex_number(v))
    }

    /// `sigma*(v)` starting at `v`.
    pub fn vertex_darts(&self, v: Dart) -> Result<Vec<Dart>> {
        Ok(self.map.orbit(v, Perm::Sigma)?)
    }

    pub fn is_self_loop(&self, d: Dart) -> bool {
        self.vertex_of[d.index()] == self.vertex_of[self.alpha(d).index()]
    }

    /// A dart of an empty self-loop (degree-1 face) or of an empty double
    /// edge (degree-2 face over two distinct edges), if any.
    pub fn redundant_edge(&self) -> Option<Dart> {
        *self.redundant.get_or_init(|| {
            self.map.darts().find(|&d| {
                let b = self.phi(d);
                b == d || (self.phi(b) == d && b != self.alpha(d))
            })
        })
    }

    pub fn is_redundant_edge_free(&self) -> bool {
        self.redundant_edge().is_none()
    }

    pub(crate) fn require_redundant_free(&self) -> Result<()> {
        match self.redundant_edge() {
            Some(dart) => Err(PyramidError::RedundantEdges { level: self.index, dart }),
            None => Ok(()),
        }
    }

    /// The vertex holding the outer (image background) darts, if it is
    /// still a vertex of its own.
    pub fn outer_vertex(&self) -> Option<VertexId> {
        let grid = self.pyr.grid();
        let labels = self.base_vertex_labels();
        let v = labels[grid.base_vertex_index(BaseVertex::Outer)];
        (v != NONE).then(|| self.reps[v as usize])
    }

    /// For every base vertex (pixels row-major, then the outer vertex) the
    /// dense number of the level vertex it has been merged into.
    pub(crate) fn base_vertex_labels(&self) -> Vec<u32> {
        let grid = self.pyr.grid();
        let base = self.pyr.base();
        let n = grid.pixel_count() + 1;
        let bv = |d: Dart| grid.base_vertex_index(grid.base_vertex(d));
        let mut uf = UnionFind::new(n);
        for d in base.darts() {
            let l = self.pyr.level_of(d);
            if l <= self.index && self.pyr.state(l) == Some(KernelState::Ck) {
                uf.union(bv(d), bv(d.alpha0()));
            }
        }
        let mut class_vertex = vec![NONE; n];
        for d in self.map.darts() {
            class_vertex[uf.find(bv(d))] = self.vertex_of[d.index()];
        }
        (0..n).map(|b| class_vertex[uf.find(b)]).collect()
    }

    /// Region of every pixel, row-major, as vertex representatives.
    ///
    /// Panics on a level without darts, which only arises when the outer
    /// vertex has been contracted together with every pixel.
    pub fn pixel_labels(&self) -> Vec<VertexId> {
        let labels = self.base_vertex_labels();
        labels[..self.pyr.grid().pixel_count()]
            .iter()
            .map(|&v| {
                assert!(v != NONE, "pixel lost its vertex");
                self.reps[v as usize]
            })
            .collect()
    }

    /// Vertices of level `i - 1` merged into `v` by kernel `i`.
    pub fn composed_of(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check_vertex(v)?;
        if self.index == 0 {
            return Err(PyramidError::LevelOutOfRange { level: 0, top: self.pyr.top_index() });
        }
        let below = self.pyr.level(self.index - 1)?;
        let labels = self.base_vertex_labels();
        let below_labels = below.base_vertex_labels();
        let target = self.vertex_number(v) as u32;
        let mut out: Vec<VertexId> = labels
            .iter()
            .zip(&below_labels)
            .filter(|(&l, &b)| l == target && b != NONE)
            .map(|(_, &b)| below.reps[b as usize])
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub(crate) fn check_contraction(&self, darts: &[Dart], members: &[bool]) -> Result<()> {
        let mut uf = UnionFind::new(self.reps.len());
        for &d in darts {
            let partner = self.alpha(d);
            if !members[partner.index()] {
                return Err(PyramidError::NotAlphaClosed(d));
            }
            if self.is_self_loop(d) {
                return Err(PyramidError::ContractedSelfLoop(d));
            }
            if d < partner && !uf.union(self.vertex_number(d), self.vertex_number(partner)) {
                return Err(PyramidError::ContractedCycle(d));
            }
        }
        Ok(())
    }

    pub(crate) fn check_empty_self_loops(&self, darts: &[Dart], members: &[bool]) -> Result<()> {
        for &d in darts {
            if !members[self.alpha(d).index()] {
                return Err(PyramidError::NotAlphaClosed(d));
            }
            if !self.is_self_loop(d) {
                return Err(PyramidError::NotEmptySelfLoop(d));
            }
        }
        let peeled = peel_empty_loops(&self.map, Some(members));
        if peeled.len() != darts.len() {
            let mut gone = vec![false; members.len()];
            for d in peeled {
                gone[d.index()] = true;
            }
            let stuck = darts.iter().find(|d| !gone[d.index()]).copied();
            return Err(PyramidError::NotEmptySelfLoop(stuck.expect("some dart is left")));
        }
        Ok(())
    }

    pub(crate) fn check_double_edges(&self, darts: &[Dart], members: &[bool]) -> Result<()> {
        for &d in darts {
            let b = self.phi(d);
            if b == d || self.phi(b) != d || b == self.alpha(d) || !members[b.index()] {
                return Err(PyramidError::NotDoubleEdge(d));
            }
        }
        let mut kept = vec![false; self.reps.len()];
        for d in self.map.darts() {
            if !members[d.index()] {
                kept[self.vertex_number(d)] = true;
            }
        }
        if let Some(v) = kept.iter().position(|k| !k) {
            return Err(PyramidError::VertexRemoved(self.reps[v]));
        }
        Ok(())
    }
}
