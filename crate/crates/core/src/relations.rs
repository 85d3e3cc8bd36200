//! The five region relationships over one level, and graph exports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::Segment;
use crate::dart::Dart;
use crate::error::{PyramidError, Result};
use crate::level::{Level, VertexId};
use crate::pyramid::UnionFind;

impl Level<'_> {
    /// One segment per edge of the level between `a` and `b`.
    pub fn meets_each(&self, a: VertexId, b: VertexId) -> Result<Vec<Segment>> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(PyramidError::InvalidVertex(b));
        }
        let mut out = Vec::new();
        for d in self.vertex_darts(a)? {
            if self.vertex_of(self.alpha(d))? == b {
                out.push(self.segment(d)?);
            }
        }
        Ok(out)
    }

    pub fn meets_exists(&self, a: VertexId, b: VertexId) -> Result<bool> {
        Ok(!self.meets_each(a, b)?.is_empty())
    }

    /// Every non-outer vertex.
    pub fn regions(&self) -> Vec<VertexId> {
        let outer = self.outer_vertex();
        self.vertices().iter().copied().filter(|&v| Some(v) != outer).collect()
    }

    /// Region adjacency graph: the simple graph left after dropping the outer
    /// vertex, self-loops and parallel edges.
    pub fn rag(&self) -> Result<Rag> {
        let regions = self.regions();
        let outer = self.outer_vertex();
        let mut edges = BTreeSet::new();
        for d in self.map().darts() {
            let (u, v) = (self.vertex_of(d)?, self.vertex_of(self.alpha(d))?);
            if u < v && Some(u) != outer && Some(v) != outer {
                edges.insert((u, v));
            }
        }
        Ok(Rag { nodes: regions, edges: edges.into_iter().collect() })
    }

    /// All relationships among the regions of the level, optionally only
    /// those involving `filter`.
    pub fn relation_report(&self, filter: Option<VertexId>) -> Result<RelationReport> {
        if let Some(f) = filter {
            self.check_vertex(f)?;
        }
        let keep = |a: VertexId, b: VertexId| filter.is_none_or(|f| a == f || b == f);
        let regions = self.regions();
        let mut pairs = Vec::new();
        let mut warnings = Vec::new();

        for &a in &regions {
            for &b in &regions {
                if a < b && keep(a, b) {
                    let segs = self.meets_each(a, b)?;
                    if !segs.is_empty() {
                        pairs.push(RelationEntry { a, b, relation: Relation::MeetsExists });
                        let segments = segs.iter().map(SegmentSummary::from).collect();
                        pairs.push(RelationEntry {
                            a,
                            b,
                            relation: Relation::MeetsEach { count: segs.len(), segments },
                        });
                    }
                }
            }
        }

        if self.is_redundant_edge_free() {
            let inside: Vec<(VertexId, BTreeSet<VertexId>)> =
                regions.par_iter().map(|&a| self.inside_all(a).map(|s| (a, s))).collect::<Result<_>>()?;
            for (a, set) in &inside {
                for &b in set {
                    if keep(*a, b) {
                        pairs.push(RelationEntry { a: *a, b, relation: Relation::Contains });
                        pairs.push(RelationEntry { a: b, b: *a, relation: Relation::Inside });
                    }
                }
            }
        } else {
            warnings.push(format!("level {} has redundant edges; contains and inside are omitted", self.index()));
        }

        for &a in &regions {
            let parts = if self.index() == 0 { vec![a] } else { self.composed_of(a)? };
            for p in parts {
                if keep(a, p) {
                    pairs.push(RelationEntry { a, b: p, relation: Relation::ComposedOf });
                }
            }
        }

        pairs.sort_by_key(|x| (x.a, x.b, x.relation.rank()));
        Ok(RelationReport { level: self.index(), pairs, warnings })
    }
}

/// Raster count of the pieces of the crack boundary shared by labels `a` and
/// `b`. Two shared cracks belong to one piece when they meet at a point where
/// exactly two boundary cracks end; points where three or four boundary
/// cracks end (the image border counts as a label of its own) separate pieces.
pub fn shared_boundary_components(labels: &[u32], width: usize, height: usize, a: u32, b: u32) -> usize {
    let key = (a.min(b), a.max(b));
    shared_boundary_counts(labels, width, height).get(&key).copied().unwrap_or(0)
}

/// [`shared_boundary_components`] for every pair of labels at once, keyed by
/// `(smaller, larger)`. Pairs with the image border are left out.
pub fn shared_boundary_counts(labels: &[u32], width: usize, height: usize) -> BTreeMap<(u32, u32), usize> {
    let at = |x: isize, y: isize| -> Option<u32> {
        (x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height)
            .then(|| labels[y as usize * width + x as usize])
    };
    // crack ids: vertical (x, y) for x in 0..=width, then horizontal (x, y) for y in 0..=height
    let vid = |x: usize, y: usize| y * (width + 1) + x;
    let hid = |x: usize, y: usize| (width + 1) * height + y * width + x;
    let sides = |id: usize| -> (Option<u32>, Option<u32>) {
        if id < (width + 1) * height {
            let (x, y) = ((id % (width + 1)) as isize, (id / (width + 1)) as isize);
            (at(x - 1, y), at(x, y))
        } else {
            let id = id - (width + 1) * height;
            let (x, y) = ((id % width) as isize, (id / width) as isize);
            (at(x, y - 1), at(x, y))
        }
    };
    let total = (width + 1) * height + width * (height + 1);
    let pair: Vec<Option<(u32, u32)>> = (0..total)
        .map(|c| match sides(c) {
            (Some(p), Some(q)) if p != q => Some((p.min(q), p.max(q))),
            _ => None,
        })
        .collect();
    let is_boundary = |c: usize| {
        let (p, q) = sides(c);
        p != q
    };
    let mut uf = UnionFind::new(total);
    for py in 0..=height {
        for px in 0..=width {
            let mut ends = Vec::with_capacity(4);
            if py > 0 {
                ends.push(vid(px, py - 1));
            }
            if py < height {
                ends.push(vid(px, py));
            }
            if px > 0 {
                ends.push(hid(px - 1, py));
            }
            if px < width {
                ends.push(hid(px, py));
            }
            ends.retain(|&c| is_boundary(c));
            if let [c0, c1] = ends[..] {
                if pair[c0].is_some() && pair[c0] == pair[c1] {
                    uf.union(c0, c1);
                }
            }
        }
    }
    let mut roots: BTreeMap<(u32, u32), BTreeSet<usize>> = BTreeMap::new();
    for (c, p) in pair.iter().enumerate() {
        if let Some(p) = p {
            roots.entry(*p).or_default().insert(uf.find(c));
        }
    }
    roots.into_iter().map(|(k, r)| (k, r.len())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rag {
    pub nodes: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Rag {
    pub fn neighbours(&self) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
        let mut out: BTreeMap<VertexId, BTreeSet<VertexId>> =
            self.nodes.iter().map(|&n| (n, BTreeSet::new())).collect();
        for &(u, v) in &self.edges {
            out.entry(u).or_default().insert(v);
            out.entry(v).or_default().insert(u);
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph rag {\n");
        for n in &self.nodes {
            let _ = writeln!(s, "  r{} [label=\"{}\"];", n.id(), n.id());
        }
        for (u, v) in &self.edges {
            let _ = writeln!(s, "  r{} -- r{};", u.id(), v.id());
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentSummary {
    pub dart: Dart,
    pub cracks: usize,
    /// `x,y:codes` with Freeman codes 0 right, 1 up, 2 left, 3 down.
    pub freeman: String,
}

impl From<&Segment> for SegmentSummary {
    fn from(s: &Segment) -> SegmentSummary {
        SegmentSummary { dart: s.dart, cracks: s.chain.len(), freeman: s.chain.freeman() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    MeetsExists,
    MeetsEach { count: usize, segments: Vec<SegmentSummary> },
    Contains,
    Inside,
    ComposedOf,
}

impl Relation {
    fn rank(&self) -> u8 {
        match self {
            Relation::MeetsExists => 0,
            Relation::MeetsEach { .. } => 1,
            Relation::Contains => 2,
            Relation::Inside => 3,
            Relation::ComposedOf => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationEntry {
    pub a: VertexId,
    pub b: VertexId,
    pub relation: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub level: usize,
    pub pairs: Vec<RelationEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RelationReport {
    pub fn has(&self, a: VertexId, b: VertexId, kind: &str) -> bool {
        self.pairs.iter().any(|p| {
            p.a == a
                && p.b == b
                && matches!(
                    (&p.relation, kind),
                    (Relation::MeetsExists, "meets_exists")
                        | (Relation::MeetsEach { .. }, "meets_each")
                        | (Relation::Contains, "contains")
                        | (Relation::Inside, "inside")
                        | (Relation::ComposedOf, "composed_of")
                )
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::grid::Grid;
    use crate::pyramid::{Kernel, KernelState, Pyramid};

    #[test]
    fn base_level_report_has_meets_and_identity_parts() {
        let pyr = Pyramid::new(Grid::new(2, 1).unwrap());
        let base = pyr.level(0).unwrap();
        let report = base.relation_report(None).unwrap();
        let [a, b] = base.regions()[..] else { panic!() };
        assert!(report.has(a, b, "meets_exists"));
        assert!(report.has(a, a, "composed_of"));
        assert!(!report.warnings.is_empty());
        assert!(report.pairs.iter().all(|p| !report.has(p.a, p.b, "contains")));
    }

    #[test]
    fn single_region_rag() {
        let grid = Grid::new(2, 1).unwrap();
        let mut pyr = Pyramid::new(grid);
        let m = grid.vertical(1, 0);
        pyr.apply_kernel(&Kernel::new(KernelState::Ck, [m, m.alpha0()])).unwrap();
        let rag = pyr.top().rag().unwrap();
        assert_eq!((rag.nodes.len(), rag.edges.len()), (1, 0));
        assert!(rag.to_dot().starts_with("graph rag {"));
    }

    #[test]
    fn meets_each_on_same_vertex_is_rejected() {
        let pyr = Pyramid::new(Grid::new(2, 1).unwrap());
        let base = pyr.level(0).unwrap();
        let a = base.regions()[0];
        assert!(base.meets_each(a, a).is_err());
    }
}
