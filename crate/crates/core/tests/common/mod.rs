#![allow(dead_code)]

pub mod eager;

use std::collections::HashMap;

use combipyr::{Dart, Grid, Kernel, KernelState, Pyramid};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random forest of non-loop edges of the top level. Edges touching the
/// outer vertex are skipped unless `allow_outer`.
pub fn random_contraction<R: Rng>(pyr: &Pyramid, rng: &mut R, p: f64, allow_outer: bool) -> Kernel {
    let top = pyr.top();
    let outer = top.outer_vertex();
    let mut edges: Vec<Dart> = top
        .map()
        .darts()
        .filter(|&d| d < top.alpha(d) && !top.is_self_loop(d))
        .filter(|&d| {
            allow_outer
                || outer.is_none_or(|o| top.vertex_of(d).unwrap() != o && top.vertex_of(top.alpha(d)).unwrap() != o)
        })
        .collect();
    edges.shuffle(rng);
    let mut parent: HashMap<Dart, Dart> = HashMap::new();
    fn find(parent: &mut HashMap<Dart, Dart>, x: Dart) -> Dart {
        let p = *parent.get(&x).unwrap_or(&x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    let mut darts = Vec::new();
    for d in edges {
        if !rng.gen_bool(p) {
            continue;
        }
        let a = find(&mut parent, top.vertex_of(d).unwrap());
        let b = find(&mut parent, top.vertex_of(top.alpha(d)).unwrap());
        if a != b {
            parent.insert(a, b);
            darts.push(d);
            darts.push(top.alpha(d));
        }
    }
    Kernel::new(KernelState::Ck, darts)
}

/// Applies `rounds` of (random CK, RKESL, RKEDE) on a fresh grid pyramid.
pub fn random_pyramid<R: Rng>(rng: &mut R, width: i64, height: i64, rounds: usize, allow_outer: bool) -> Pyramid {
    random_pyramid_with(rng, width, height, rounds, allow_outer, |_| {})
}

/// Same as [`random_pyramid`], calling `each` after every kernel.
pub fn random_pyramid_with<R: Rng>(
    rng: &mut R,
    width: i64,
    height: i64,
    rounds: usize,
    allow_outer: bool,
    mut each: impl FnMut(&Pyramid),
) -> Pyramid {
    let mut pyr = Pyramid::new(Grid::new(width, height).unwrap());
    for _ in 0..rounds {
        let p = rng.gen_range(0.2..0.9);
        let ck = random_contraction(&pyr, rng, p, allow_outer);
        pyr.apply_kernel(&ck).unwrap();
        each(&pyr);
        let rkesl = pyr.compute_rkesl();
        pyr.apply_kernel(&rkesl).unwrap();
        each(&pyr);
        let rkede = pyr.compute_rkede();
        pyr.apply_kernel(&rkede).unwrap();
        each(&pyr);
    }
    pyr
}
