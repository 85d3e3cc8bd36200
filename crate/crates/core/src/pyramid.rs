//! Combinatorial pyramids stored implicitly: the base map, the level at
//! which every dart disappears and the type of every kernel.
//!
//! Level `i` (after kernels `K1..Ki`) is rebuilt from the base on demand:
//! `sigma_i(d)` is the first dart surviving at level `i` along the
//! receptive-field walk from `d`, and `alpha_i(d)` is the base partner of the
//! last dart of the segment of `d`.
//!
//! Removal of an empty double edge deletes the two darts of a degree-2 face
//! and glues their edges: if the face is `{a, b}` then `-a`'s new partner is
//! `alpha(b)`. This is what lets segments grow across removed double edges.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::boundary::{angle, Move};
use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::grid::Grid;
use crate::level::Level;
use crate::map::CombinatorialMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelState {
    #[serde(rename = "CK")]
    Ck,
    #[serde(rename = "RKESL")]
    Rkesl,
    #[serde(rename = "RKEDE")]
    Rkede,
}

impl KernelState {
    /// Kernels cycle through contraction, empty self-loop removal and empty
    /// double edge removal, in that order.
    pub fn next(self) -> KernelState {
        match self {
            KernelState::Ck => KernelState::Rkesl,
            KernelState::Rkesl => KernelState::Rkede,
            KernelState::Rkede => KernelState::Ck,
        }
    }

    pub fn is_removal(self) -> bool {
        !matches!(self, KernelState::Ck)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub state: KernelState,
    pub darts: Vec<Dart>,
}

impl Kernel {
    pub fn new(state: KernelState, darts: impl IntoIterator<Item = Dart>) -> Kernel {
        let mut darts: Vec<Dart> = darts.into_iter().collect();
        darts.sort();
        Kernel { state, darts }
    }

    pub fn empty(state: KernelState) -> Kernel {
        Kernel { state, darts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Pyramid {
    grid: Grid,
    base: CombinatorialMap,
    /// Kernel index that removed the dart, `0` while it survives.
    removed_at: Vec<u32>,
    states: Vec<KernelState>,
    /// Orientation of each dart at the level where it was last alive.
    orientation: Vec<i32>,
    top: CombinatorialMap,
}

impl Pyramid {
    pub fn new(grid: Grid) -> Pyramid {
        let base = grid.build_map();
        let n = base.capacity();
        Pyramid { grid, top: base.clone(), base, removed_at: vec![0; n], states: Vec::new(), orientation: vec![0; n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn base(&self) -> &CombinatorialMap {
        &self.base
    }

    /// Index of the top level, i.e. the number of kernels applied.
    pub fn top_index(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[KernelState] {
        &self.states
    }

    /// State of kernel `i` (1-based).
    pub fn state(&self, i: usize) -> Option<KernelState> {
        i.checked_sub(1).and_then(|k| self.states.get(k).copied())
    }

    /// `level(d)`: the kernel index that removed `d`, or `n + 1` for darts
    /// surviving to the top.
    #[inline]
    pub fn level_of(&self, d: Dart) -> usize {
        match self.removed_at[d.index()] {
            0 => self.states.len() + 1,
            k => k as usize,
        }
    }

    /// Darts removed by kernel `i` (1-based).
    pub fn kernel(&self, i: usize) -> Option<Kernel> {
        let state = self.state(i)?;
        let darts = self.base.darts().filter(|d| self.removed_at[d.index()] as usize == i);
        Some(Kernel::new(state, darts))
    }

    #[inline]
    fn state_of(&self, d: Dart) -> KernelState {
        self.states[self.removed_at[d.index()] as usize - 1]
    }

    pub fn survives(&self, d: Dart, level: usize) -> bool {
        self.base.contains(d) && self.level_of(d) > level
    }

    /// Cached orientation of a dart, maintained during double-edge removal.
    pub fn cached_orientation(&self, d: Dart) -> i32 {
        self.orientation[d.index()]
    }

    /// The reduced map at the top level.
    pub fn top_map(&self) -> &CombinatorialMap {
        &self.top
    }

    pub fn top(&self) -> Level<'_> {
        Level::new(self, self.top_index(), self.top.clone())
    }

    pub fn level(&self, i: usize) -> Result<Level<'_>> {
        Ok(Level::new(self, i, self.reconstruct_level(i)?))
    }

    fn check_level(&self, i: usize) -> Result<()> {
        if i > self.top_index() {
            return Err(PyramidError::LevelOutOfRange { level: i, top: self.top_index() });
        }
        Ok(())
    }

    fn check_alive(&self, i: usize, d: Dart) -> Result<()> {
        self.check_level(i)?;
        if !self.survives(d, i) {
            return Err(PyramidError::DeadDart { dart: d, level: i });
        }
        Ok(())
    }

    #[inline]
    fn phi0(&self, d: Dart) -> Dart {
        self.base.sigma(d.alpha0())
    }

    /// Successor in a receptive-field walk of a dart removed below the
    /// queried level.
    #[inline]
    fn rf_step(&self, d: Dart) -> Dart {
        match self.state_of(d) {
            KernelState::Ck => self.phi0(d),
            KernelState::Rkesl | KernelState::Rkede => self.base.sigma(d),
        }
    }

    /// Receptive field `RF_i(d) = d1..dq` and the first surviving successor
    /// `d_{q+1} = sigma_i(d)`. At level 0 the field is `(d)`.
    pub fn receptive_field(&self, i: usize, d: Dart) -> Result<(Vec<Dart>, Dart)> {
        self.check_alive(i, d)?;
        let mut field = vec![d];
        let mut x = self.base.sigma(d);
        while self.level_of(x) <= i {
            if field.len() > self.base.dart_count() {
                return Err(PyramidError::Corrupt(format!("receptive field of {d} does not close")));
            }
            field.push(x);
            x = self.rf_step(x);
        }
        Ok((field, x))
    }

    fn sigma_at(&self, i: usize, d: Dart) -> Result<Dart> {
        let mut x = self.base.sigma(d);
        let mut steps = 0;
        while self.level_of(x) <= i {
            steps += 1;
            if steps > self.base.dart_count() {
                return Err(PyramidError::Corrupt(format!("receptive field of {d} does not close")));
            }
            x = self.rf_step(x);
        }
        Ok(x)
    }

    /// Base darts of the segment of `d` at level `i`: `d1 = d` and each next
    /// dart is the first dart removed as a double edge met while turning
    /// around the end corner of the previous one with `phi0`. The walk stops
    /// at a dart alive at level `i`.
    pub fn segment_darts(&self, i: usize, d: Dart) -> Result<Vec<Dart>> {
        self.check_alive(i, d)?;
        self.segment_walk(i, d)
    }

    fn segment_walk(&self, i: usize, d: Dart) -> Result<Vec<Dart>> {
        let mut seg = vec![d];
        let limit = self.base.dart_count();
        'outer: loop {
            let last = *seg.last().expect("segment is never empty");
            let mut x = last.alpha0();
            for _ in 0..limit {
                x = self.phi0(x);
                if self.level_of(x) > i {
                    return Ok(seg);
                }
                if self.state_of(x) == KernelState::Rkede {
                    if seg.len() >= limit {
                        break 'outer;
                    }
                    seg.push(x);
                    continue 'outer;
                }
            }
            break;
        }
        Err(PyramidError::Corrupt(format!("segment of {d} at level {i} does not terminate")))
    }

    /// `G_i` rebuilt from the base map, `level` and `state` only.
    pub fn reconstruct_level(&self, i: usize) -> Result<CombinatorialMap> {
        self.check_level(i)?;
        let cap = self.base.capacity();
        let mut sigma = vec![None; cap];
        let mut alpha = vec![None; cap];
        for d in self.base.darts() {
            if self.level_of(d) <= i {
                continue;
            }
            sigma[d.index()] = Some(self.sigma_at(i, d)?);
            let seg = self.segment_walk(i, d)?;
            alpha[d.index()] = Some(seg.last().expect("nonempty").alpha0());
        }
        Ok(CombinatorialMap::from_dense(sigma, alpha))
    }

    /// First and last moves of the segment of a top-level dart, read in
    /// constant time from the top map.
    fn top_moves(&self, d: Dart) -> (Move, Move) {
        let last = self.top.alpha(d).alpha0();
        (self.grid.move_of(d), self.grid.move_of(last))
    }

    /// The state the next kernel must have.
    pub fn expected_state(&self) -> KernelState {
        self.states.last().map_or(KernelState::Ck, |s| s.next())
    }

    /// Appends a kernel after checking it against the current top level.
    pub fn apply_kernel(&mut self, kernel: &Kernel) -> Result<()> {
        let expected = self.expected_state();
        if kernel.state != expected {
            return Err(PyramidError::KernelOrder { expected, got: kernel.state });
        }
        let mut members = vec![false; self.base.capacity()];
        for &d in &kernel.darts {
            if !self.top.contains(d) {
                return Err(PyramidError::DeadDart { dart: d, level: self.top_index() });
            }
            if std::mem::replace(&mut members[d.index()], true) {
                return Err(PyramidError::DuplicateDart(d));
            }
        }
        let top = self.top();
        match kernel.state {
            KernelState::Ck => top.check_contraction(&kernel.darts, &members)?,
            KernelState::Rkesl => top.check_empty_self_loops(&kernel.darts, &members)?,
            KernelState::Rkede => top.check_double_edges(&kernel.darts, &members)?,
        }
        drop(top);

        if kernel.state == KernelState::Rkede {
            self.fold_orientations(&members)?;
        }
        let index = self.states.len() as u32 + 1;
        for &d in &kernel.darts {
            self.removed_at[d.index()] = index;
        }
        self.states.push(kernel.state);
        self.top = self.reconstruct_level(self.top_index())?;
        Ok(())
    }

    /// Extends the cached orientation of every surviving dart whose edge is
    /// glued to removed double edges, folding the chain left to right:
    /// `or(d1) += or(d2) + angle(Lm(d1), Fm(d2))`.
    fn fold_orientations(&mut self, removed: &[bool]) -> Result<()> {
        let mut updates = Vec::new();
        for s in self.top.darts() {
            if removed[s.index()] || !removed[self.top.alpha(s).index()] {
                continue;
            }
            let mut value = self.orientation[s.index()];
            let mut last = s;
            let mut x = self.top.alpha(s);
            let mut steps = 0;
            while removed[x.index()] {
                let next = self.top.phi(x);
                let turn = angle(self.top_moves(last).1, self.top_moves(next).0)
                    .value()
                    .ok_or(PyramidError::UndefinedAngle(last))?;
                value += turn + self.orientation[next.index()];
                last = next;
                x = self.top.alpha(next);
                steps += 1;
                if steps > self.top.dart_count() {
                    return Err(PyramidError::Corrupt(format!("double-edge chain from {s} is closed")));
                }
            }
            updates.push((s, value));
        }
        for (s, value) in updates {
            self.orientation[s.index()] = value;
        }
        Ok(())
    }

    /// Darts of all empty self-loops of the top level, expanded until no
    /// loop whose inside holds only removed loops remains.
    pub fn compute_rkesl(&self) -> Kernel {
        Kernel::new(KernelState::Rkesl, peel_empty_loops(&self.top, None))
    }

    /// Darts of the degree-2 dual vertices of the top level. On a closed
    /// chain of such faces the face holding the smallest dart is kept, so
    /// the two vertices stay joined by one edge.
    pub fn compute_rkede(&self) -> Kernel {
        let map = &self.top;
        let mut faces: Vec<[Dart; 2]> = Vec::new();
        let mut face_of = vec![usize::MAX; map.capacity()];
        for d in map.darts() {
            let b = map.phi(d);
            if d < b && map.phi(b) == d && b != map.alpha(d) {
                face_of[d.index()] = faces.len();
                face_of[b.index()] = faces.len();
                faces.push([d, b]);
            }
        }
        let mut uf = UnionFind::new(faces.len());
        let mut links = vec![0usize; faces.len()];
        for (f, face) in faces.iter().enumerate() {
            for &x in face {
                let partner = map.alpha(x);
                let g = face_of[partner.index()];
                if g != usize::MAX && x < partner {
                    uf.union(f, g);
                    links[f] += 1;
                }
            }
        }
        let mut size = vec![0usize; faces.len()];
        let mut link_count = vec![0usize; faces.len()];
        for (f, &l) in links.iter().enumerate() {
            let r = uf.find(f);
            size[r] += 1;
            link_count[r] += l;
        }
        // faces are pushed in order of their smallest dart, so the first
        // face seen in a component is the one to keep
        let mut kept = vec![false; faces.len()];
        let mut darts = Vec::new();
        for (f, face) in faces.iter().enumerate() {
            let r = uf.find(f);
            if link_count[r] == size[r] && !kept[r] {
                kept[r] = true;
                continue;
            }
            darts.extend_from_slice(face);
        }
        Kernel::new(KernelState::Rkede, darts)
    }

    pub fn to_record(&self) -> PyramidRecord {
        let ids = |v: &CombinatorialMap, f: fn(&CombinatorialMap, Dart) -> Dart| {
            (0..self.base.capacity()).map(|i| f(v, Dart::from_index(i)).id()).collect()
        };
        PyramidRecord {
            format: RECORD_FORMAT.to_string(),
            version: RECORD_VERSION,
            width: self.grid.width(),
            height: self.grid.height(),
            sigma: ids(&self.base, CombinatorialMap::sigma),
            alpha: ids(&self.base, CombinatorialMap::alpha),
            level: (0..self.base.capacity()).map(|i| self.level_of(Dart::from_index(i)) as u32).collect(),
            states: self.states.clone(),
            orientation: self.orientation.clone(),
        }
    }

    pub fn from_record(record: &PyramidRecord) -> Result<Pyramid> {
        let bad = |m: String| PyramidError::Format(m);
        if record.format != RECORD_FORMAT || record.version != RECORD_VERSION {
            return Err(bad(format!("unsupported format {} v{}", record.format, record.version)));
        }
        let grid = Grid::new(record.width.into(), record.height.into())?;
        let mut pyr = Pyramid::new(grid);
        let n = pyr.base.capacity();
        for (name, v) in [("sigma", record.sigma.len()), ("alpha", record.alpha.len())] {
            if v != n {
                return Err(bad(format!("{name} has {v} entries, expected {n}")));
            }
        }
        if record.level.len() != n || record.orientation.len() != n {
            return Err(bad(format!("per-dart arrays must have {n} entries")));
        }
        for i in 0..n {
            let d = Dart::from_index(i);
            if record.sigma[i] != pyr.base.sigma(d).id() || record.alpha[i] != pyr.base.alpha(d).id() {
                return Err(bad(format!("base permutation differs from the grid at dart {d}")));
            }
        }
        let top = record.states.len() as u32 + 1;
        for (i, &l) in record.level.iter().enumerate() {
            if l == 0 || l > top {
                return Err(bad(format!("level {l} of dart {} out of range", Dart::from_index(i))));
            }
            pyr.removed_at[i] = if l == top { 0 } else { l };
        }
        pyr.states = record.states.clone();
        for (k, pair) in pyr.states.windows(2).enumerate() {
            if pair[1] != pair[0].next() {
                return Err(bad(format!("kernel {} has state {:?} after {:?}", k + 2, pair[1], pair[0])));
            }
        }
        if pyr.states.first().is_some_and(|&s| s != KernelState::Ck) {
            return Err(bad("the first kernel must be a contraction kernel".into()));
        }
        pyr.orientation = record.orientation.clone();
        pyr.top = pyr.reconstruct_level(pyr.top_index())?;
        Ok(pyr)
    }
}

impl Pyramid {
    /// Problems found by replaying every kernel on a fresh base and checking
    /// each level. Empty when the pyramid is sound.
    pub fn invariant_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut replay = Pyramid::new(self.grid);
        for i in 1..=self.top_index() {
            let kernel = self.kernel(i).expect("levels up to the top have kernels");
            if let Err(e) = replay.apply_kernel(&kernel) {
                problems.push(format!("kernel {i}: {e}"));
                return problems;
            }
        }
        if replay.orientation != self.orientation {
            let d = (0..self.orientation.len())
                .find(|&i| replay.orientation[i] != self.orientation[i])
                .map(Dart::from_index)
                .expect("vectors differ");
            problems.push(format!("cached orientation of dart {d} is stale"));
        }
        for i in 0..=self.top_index() {
            let level = match self.level(i) {
                Ok(l) => l,
                Err(e) => {
                    problems.push(format!("level {i}: {e}"));
                    continue;
                }
            };
            for c in level.map().validate().failures() {
                problems.push(format!("level {i}: {c}"));
            }
            if level.is_redundant_edge_free() {
                for &v in level.vertices() {
                    let expected = if Some(v) == level.outer_vertex() { 4 } else { -4 };
                    match level.vertex_orientation(v) {
                        Ok(or) if or == expected => {}
                        Ok(or) => problems.push(format!("level {i}: vertex {v} has orientation {or}")),
                        Err(e) => problems.push(format!("level {i}: vertex {v}: {e}")),
                    }
                }
            }
        }
        problems
    }
}

pub const RECORD_FORMAT: &str = "combipyr";
pub const RECORD_VERSION: u32 = 1;

/// Flat serialized form of the implicit encoding. Arrays are indexed by
/// dart storage index (`2(|id|-1)`, `+1` for negative darts).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PyramidRecord {
    pub format: String,
    pub version: u32,
    pub width: u32,
    pub height: u32,
    pub sigma: Vec<i32>,
    pub alpha: Vec<i32>,
    pub level: Vec<u32>,
    pub states: Vec<KernelState>,
    pub orientation: Vec<i32>,
}

/// Iteratively removes degree-1 faces. With `only`, removal is restricted
/// to the flagged darts.
pub(crate) fn peel_empty_loops(map: &CombinatorialMap, only: Option<&[bool]>) -> Vec<Dart> {
    let cap = map.capacity();
    let mut sigma: Vec<Option<Dart>> = vec![None; cap];
    let mut pred: Vec<Option<Dart>> = vec![None; cap];
    for d in map.darts() {
        let s = map.sigma(d);
        sigma[d.index()] = Some(s);
        pred[s.index()] = Some(d);
    }
    let allowed = |d: Dart| only.is_none_or(|o| o[d.index()]);
    let phi = |sigma: &[Option<Dart>], d: Dart| sigma[map.alpha(d).index()];
    let mut work: Vec<Dart> = map.darts().filter(|&d| map.phi(d) == d).collect();
    work.reverse();
    let mut removed = Vec::new();
    while let Some(d) = work.pop() {
        if sigma[d.index()].is_none() || phi(&sigma, d) != Some(d) || !allowed(d) {
            continue;
        }
        let e = map.alpha(d);
        if !allowed(e) {
            continue;
        }
        // a vertex made of this loop alone would vanish
        if sigma[e.index()] == Some(d) && sigma[d.index()] == Some(e) {
            continue;
        }
        let mut touched = Vec::with_capacity(2);
        for x in [d, e] {
            let p = pred[x.index()].expect("alive dart has a predecessor");
            let n = sigma[x.index()].expect("alive dart has a successor");
            sigma[p.index()] = Some(n);
            pred[n.index()] = Some(p);
            sigma[x.index()] = None;
            pred[x.index()] = None;
            touched.push(p);
        }
        removed.push(d);
        removed.push(e);
        for p in touched {
            if sigma[p.index()].is_some() {
                work.push(map.alpha(p));
            }
        }
    }
    removed
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when both were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Set of darts surviving at a level, used by tests and validation.
pub fn surviving_set(pyr: &Pyramid, level: usize) -> HashSet<Dart> {
    pyr.base().darts().filter(|&d| pyr.survives(d, level)).collect()
}
