//! Two-dimensional combinatorial maps `G = (D, sigma, alpha)`.
//!
//! Permutations are stored densely, indexed by [`Dart::index`], with `None`
//! marking darts that are not part of the map. A reduced level of a pyramid
//! is therefore the same type as the base level, only sparser.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dart::Dart;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("grid dimensions must be positive, got {width}x{height}")]
    EmptyGrid { width: i64, height: i64 },
    #[error("dart {0} is not part of the map")]
    UnknownDart(Dart),
    #[error("dart {0} is defined twice for {1}")]
    Duplicate(Dart, &'static str),
    #[error("dart {0} has no image under {1}")]
    Undefined(Dart, &'static str),
    #[error("orbit of dart {0} under {1} does not return to it")]
    OpenOrbit(Dart, &'static str),
}

/// Which permutation an orbit follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Perm {
    Sigma,
    Alpha,
    Phi,
}

impl Perm {
    pub fn name(self) -> &'static str {
        match self {
            Perm::Sigma => "sigma",
            Perm::Alpha => "alpha",
            Perm::Phi => "phi",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialMap {
    sigma: Vec<Option<Dart>>,
    alpha: Vec<Option<Dart>>,
    len: usize,
}

impl CombinatorialMap {
    /// Builds a map from explicit `(d, sigma(d))` and `(d, alpha(d))` pairs.
    ///
    /// Both functions must be defined on the same dart set; whether they are
    /// permutations (and the other map invariants) is left to [`validate`].
    ///
    /// [`validate`]: CombinatorialMap::validate
    pub fn from_pairs(
        sigma: impl IntoIterator<Item = (Dart, Dart)>,
        alpha: impl IntoIterator<Item = (Dart, Dart)>,
    ) -> Result<Self, MapError> {
        let sigma: Vec<_> = sigma.into_iter().collect();
        let alpha: Vec<_> = alpha.into_iter().collect();
        let size =
            sigma.iter().chain(alpha.iter()).flat_map(|&(a, b)| [a.index(), b.index()]).max().map_or(0, |m| m + 1);
        let size = size + size % 2;
        let mut s = vec![None; size];
        let mut a = vec![None; size];
        for (d, img) in sigma {
            if s[d.index()].replace(img).is_some() {
                return Err(MapError::Duplicate(d, "sigma"));
            }
        }
        for (d, img) in alpha {
            if a[d.index()].replace(img).is_some() {
                return Err(MapError::Duplicate(d, "alpha"));
            }
        }
        for i in 0..size {
            let d = Dart::from_index(i);
            match (s[i], a[i]) {
                (Some(_), None) => return Err(MapError::Undefined(d, "alpha")),
                (None, Some(_)) => return Err(MapError::Undefined(d, "sigma")),
                _ => {}
            }
        }
        for i in 0..size {
            for img in [s[i], a[i]].into_iter().flatten() {
                if s[img.index()].is_none() {
                    return Err(MapError::UnknownDart(img));
                }
            }
        }
        let len = s.iter().filter(|x| x.is_some()).count();
        Ok(CombinatorialMap { sigma: s, alpha: a, len })
    }

    /// Dense constructor used by the grid builder and level reconstruction.
    /// The caller guarantees both arrays describe the same dart set.
    pub(crate) fn from_dense(sigma: Vec<Option<Dart>>, alpha: Vec<Option<Dart>>) -> Self {
        debug_assert_eq!(sigma.len(), alpha.len());
        let len = sigma.iter().filter(|x| x.is_some()).count();
        CombinatorialMap { sigma, alpha, len }
    }

    /// Number of darts in the map.
    pub fn dart_count(&self) -> usize {
        self.len
    }

    /// Size of the dense index space (twice the largest `|id|`).
    pub fn capacity(&self) -> usize {
        self.sigma.len()
    }

    #[inline]
    pub fn contains(&self, d: Dart) -> bool {
        self.sigma.get(d.index()).is_some_and(|x| x.is_some())
    }

    /// Darts in canonical order.
    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.sigma.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| Dart::from_index(i))
    }

    /// # Panics
    /// If `d` is not in the map.
    #[inline]
    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d.index()].unwrap_or_else(|| panic!("dart {d} is not in the map"))
    }

    /// # Panics
    /// If `d` is not in the map.
    #[inline]
    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d.index()].unwrap_or_else(|| panic!("dart {d} is not in the map"))
    }

    /// `phi = sigma o alpha`.
    #[inline]
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma(self.alpha(d))
    }

    #[inline]
    pub fn apply(&self, perm: Perm, d: Dart) -> Dart {
        match perm {
            Perm::Sigma => self.sigma(d),
            Perm::Alpha => self.alpha(d),
            Perm::Phi => self.phi(d),
        }
    }

    /// The cycle `(d, pi(d), pi^2(d), ...)` stopping before `d` repeats.
    pub fn orbit(&self, d: Dart, perm: Perm) -> Result<Vec<Dart>, MapError> {
        if !self.contains(d) {
            return Err(MapError::UnknownDart(d));
        }
        let mut out = vec![d];
        let mut x = self.apply(perm, d);
        while x != d {
            if out.len() >= self.len {
                return Err(MapError::OpenOrbit(d, perm.name()));
            }
            out.push(x);
            x = self.apply(perm, x);
        }
        Ok(out)
    }

    /// All cycles of a permutation, each starting at its smallest dart,
    /// listed by that dart. Assumes `perm` is a bijection.
    pub fn cycles(&self, perm: Perm) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.capacity()];
        let mut out = Vec::new();
        for d in self.darts() {
            if seen[d.index()] {
                continue;
            }
            let mut cycle = vec![d];
            seen[d.index()] = true;
            let mut x = self.apply(perm, d);
            while x != d && !seen[x.index()] {
                seen[x.index()] = true;
                cycle.push(x);
                x = self.apply(perm, x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self, perm: Perm) -> usize {
        self.cycles(perm).len()
    }

    /// `|sigma cycles| - |alpha cycles| + |phi cycles|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.cycle_count(Perm::Sigma) as i64 - self.cycle_count(Perm::Alpha) as i64 + self.cycle_count(Perm::Phi) as i64
    }

    /// The dual map `(D, phi, alpha)`.
    pub fn dual(&self) -> CombinatorialMap {
        let mut sigma = vec![None; self.capacity()];
        for d in self.darts() {
            sigma[d.index()] = Some(self.phi(d));
        }
        CombinatorialMap::from_dense(sigma, self.alpha.clone())
    }

    /// Checks every structural invariant and reports each one separately.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();

        let fixed = self.darts().find(|&d| self.alpha(d) == d);
        checks.push(Check::new(CheckKind::AlphaFixedPoint, fixed));

        let not_involution = self.darts().find(|&d| self.alpha(self.alpha(d)) != d);
        checks.push(Check::new(CheckKind::AlphaInvolution, not_involution));

        let sigma_witness = self.non_injective(Perm::Sigma);
        checks.push(Check::new(CheckKind::SigmaBijection, sigma_witness));

        let disconnected = self.disconnected_witness();
        checks.push(Check::new(CheckKind::Connected, disconnected));

        let euler = if sigma_witness.is_none() && not_involution.is_none() {
            let chi = self.euler_characteristic();
            Check { kind: CheckKind::Euler, passed: chi == 2, witness: None, detail: format!("V - E + F = {chi}") }
        } else {
            Check {
                kind: CheckKind::Euler,
                passed: false,
                witness: None,
                detail: "not evaluated: sigma or alpha is not a permutation".into(),
            }
        };
        checks.push(euler);
        ValidationReport { checks }
    }

    fn non_injective(&self, perm: Perm) -> Option<Dart> {
        let mut hit = vec![false; self.capacity()];
        for d in self.darts() {
            let img = self.apply(perm, d);
            if std::mem::replace(&mut hit[img.index()], true) {
                return Some(img);
            }
        }
        None
    }

    fn disconnected_witness(&self) -> Option<Dart> {
        let start = self.darts().next()?;
        let mut seen = vec![false; self.capacity()];
        let mut adjacent = vec![Vec::new(); self.capacity()];
        for d in self.darts() {
            for img in [self.sigma(d), self.alpha(d)] {
                adjacent[d.index()].push(img);
                adjacent[img.index()].push(d);
            }
        }
        let mut queue = VecDeque::from([start]);
        seen[start.index()] = true;
        while let Some(d) = queue.pop_front() {
            for &n in &adjacent[d.index()] {
                if !std::mem::replace(&mut seen[n.index()], true) {
                    queue.push_back(n);
                }
            }
        }
        self.darts().find(|d| !seen[d.index()])
    }

    /// Graphviz rendering: one node per sigma cycle, one edge per alpha cycle.
    pub fn to_dot(&self, name: &str) -> String {
        let vertices = self.cycles(Perm::Sigma);
        let mut owner = vec![usize::MAX; self.capacity()];
        for (v, cycle) in vertices.iter().enumerate() {
            for d in cycle {
                owner[d.index()] = v;
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for cycle in &vertices {
            let label: Vec<String> = cycle.iter().map(|d| d.id().to_string()).collect();
            let _ = writeln!(out, "  v{} [label=\"({})\"];", cycle[0].id().unsigned_abs(), label.join(","));
        }
        for d in self.darts() {
            let partner = self.alpha(d);
            if d > partner {
                continue;
            }
            let a = vertices[owner[d.index()]][0];
            let b = vertices[owner[partner.index()]][0];
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", a.id().unsigned_abs(), b.id().unsigned_abs(), d.id());
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    AlphaFixedPoint,
    AlphaInvolution,
    SigmaBijection,
    Connected,
    Euler,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::AlphaFixedPoint => "alpha fixed point",
            CheckKind::AlphaInvolution => "alpha involution",
            CheckKind::SigmaBijection => "sigma bijection",
            CheckKind::Connected => "not connected",
            CheckKind::Euler => "euler formula",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub kind: CheckKind,
    pub passed: bool,
    pub witness: Option<Dart>,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.kind.label())?;
        if let Some(d) = self.witness {
            write!(f, " at dart {d}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

impl Check {
    fn new(kind: CheckKind, witness: Option<Dart>) -> Check {
        Check {
            kind,
            passed: witness.is_none(),
            witness,
            detail: match witness {
                Some(d) => format!("{} at dart {d}", kind.label()),
                None => String::new(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, kind: CheckKind) -> &Check {
        self.checks.iter().find(|c| c.kind == kind).expect("every kind is checked")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(id: i32) -> Dart {
        Dart::from_id(id)
    }

    /// One vertex with a single self-loop on the sphere: sigma = (1, -1).
    fn loop_map() -> CombinatorialMap {
        CombinatorialMap::from_pairs([(d(1), d(-1)), (d(-1), d(1))], [(d(1), d(-1)), (d(-1), d(1))]).unwrap()
    }

    #[test]
    fn orbit_of_alpha_is_pair() {
        let m = loop_map();
        assert_eq!(m.orbit(d(1), Perm::Alpha).unwrap(), vec![d(1), d(-1)]);
        assert_eq!(m.orbit(d(1), Perm::Phi).unwrap(), vec![d(1)]);
    }

    #[test]
    fn orbit_rejects_unknown_dart() {
        assert_eq!(loop_map().orbit(d(5), Perm::Sigma), Err(MapError::UnknownDart(d(5))));
    }

    #[test]
    fn fixed_point_is_reported_with_witness() {
        let m = CombinatorialMap::from_pairs([(d(1), d(-1)), (d(-1), d(1))], [(d(1), d(1)), (d(-1), d(-1))]).unwrap();
        let report = m.validate();
        assert!(!report.is_valid());
        let check = report.get(CheckKind::AlphaFixedPoint);
        assert!(!check.passed);
        assert_eq!(check.witness, Some(d(1)));
        assert!(check.detail.contains("alpha fixed point"));
    }

    #[test]
    fn non_bijective_sigma_is_reported() {
        let m = CombinatorialMap::from_pairs([(d(1), d(1)), (d(-1), d(1))], [(d(1), d(-1)), (d(-1), d(1))]).unwrap();
        let report = m.validate();
        assert!(!report.get(CheckKind::SigmaBijection).passed);
        assert!(!report.get(CheckKind::Euler).passed);
        assert!(m.orbit(d(-1), Perm::Sigma).is_err());
    }

    #[test]
    fn from_pairs_requires_matching_domains() {
        let err = CombinatorialMap::from_pairs([(d(1), d(1))], [(d(1), d(-1)), (d(-1), d(1))]);
        assert_eq!(err, Err(MapError::Undefined(d(-1), "sigma")));
    }

    #[test]
    fn dual_swaps_vertices_and_faces() {
        let m = loop_map();
        let dual = m.dual();
        assert_eq!(dual.cycle_count(Perm::Sigma), m.cycle_count(Perm::Phi));
        assert_eq!(dual.dual(), m);
    }
}
