//! A deliberately naive mutable map reducer. It applies kernels one edge or
//! one face at a time on explicit permutations and shares no code with the
//! implicit reconstruction.

use std::collections::BTreeMap;

use combipyr::{CombinatorialMap, Dart, Kernel, KernelState};

#[derive(Clone, Debug)]
pub struct EagerMap {
    pub sigma: BTreeMap<i32, i32>,
    pub alpha: BTreeMap<i32, i32>,
}

impl EagerMap {
    pub fn from_map(map: &CombinatorialMap) -> EagerMap {
        EagerMap {
            sigma: map.darts().map(|d| (d.id(), map.sigma(d).id())).collect(),
            alpha: map.darts().map(|d| (d.id(), map.alpha(d).id())).collect(),
        }
    }

    fn phi(&self, d: i32) -> i32 {
        self.sigma[&self.alpha[&d]]
    }

    fn remove_from_sigma(&mut self, x: i32) {
        let next = self.sigma[&x];
        let prev = *self.sigma.iter().find(|(_, &v)| v == x).expect("x has a predecessor").0;
        self.sigma.insert(prev, next);
        self.sigma.remove(&x);
    }

    fn contract_edge(&mut self, e: i32) {
        let f = self.alpha[&e];
        let mut phi: BTreeMap<i32, i32> = self.sigma.keys().map(|&d| (d, self.phi(d))).collect();
        for x in [e, f] {
            let next = phi[&x];
            let prev = *phi.iter().find(|(_, &v)| v == x).unwrap().0;
            phi.insert(prev, next);
            phi.remove(&x);
        }
        self.alpha.remove(&e);
        self.alpha.remove(&f);
        self.sigma = phi.keys().map(|&d| (d, phi[&self.alpha[&d]])).collect();
    }

    fn remove_edge(&mut self, e: i32) {
        let f = self.alpha[&e];
        self.remove_from_sigma(e);
        self.remove_from_sigma(f);
        self.alpha.remove(&e);
        self.alpha.remove(&f);
    }

    fn merge_face(&mut self, a: i32) {
        let b = self.phi(a);
        assert_eq!(self.phi(b), a, "face of {a} is not of degree 2");
        let (na, nb) = (self.alpha[&a], self.alpha[&b]);
        assert_ne!(b, na, "face of {a} is a single edge");
        self.remove_from_sigma(a);
        self.remove_from_sigma(b);
        self.alpha.remove(&a);
        self.alpha.remove(&b);
        self.alpha.insert(na, nb);
        self.alpha.insert(nb, na);
    }

    pub fn apply(&mut self, kernel: &Kernel) {
        let mut pending: Vec<i32> = kernel.darts.iter().map(|d| d.id()).collect();
        while let Some(d) = pending.pop() {
            if !self.sigma.contains_key(&d) {
                continue;
            }
            match kernel.state {
                KernelState::Ck => self.contract_edge(d),
                KernelState::Rkesl => self.remove_edge(d),
                KernelState::Rkede => self.merge_face(d),
            }
        }
    }

    pub fn matches(&self, map: &CombinatorialMap) -> Result<(), String> {
        if map.dart_count() != self.sigma.len() {
            return Err(format!("dart count {} vs eager {}", map.dart_count(), self.sigma.len()));
        }
        for (&d, &s) in &self.sigma {
            let dart = Dart::from_id(d);
            if !map.contains(dart) {
                return Err(format!("dart {d} missing"));
            }
            if map.sigma(dart).id() != s {
                return Err(format!("sigma({d}) = {} vs eager {s}", map.sigma(dart)));
            }
            if map.alpha(dart).id() != self.alpha[&d] {
                return Err(format!("alpha({d}) = {} vs eager {}", map.alpha(dart), self.alpha[&d]));
            }
        }
        Ok(())
    }
}
