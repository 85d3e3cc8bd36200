mod common;

use std::collections::BTreeSet;

use combipyr::merge::build_pyramid;
use combipyr::raster::Image;
use combipyr::{CrackChain, Dart, Move, Point, Pyramid, PyramidRecord, VertexId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pyramid(seed: u64, w: i64, h: i64) -> Pyramid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_pyramid(&mut rng, w, h, 2, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dart_index_round_trip(id in (i32::MIN + 1)..i32::MAX) {
        prop_assume!(id != 0);
        let d = Dart::from_id(id);
        prop_assert_eq!(Dart::from_index(d.index()), d);
        prop_assert_eq!(d.alpha0().alpha0(), d);
        prop_assert_eq!(d.alpha0().index() ^ 1, d.index());
    }

    #[test]
    fn freeman_text_round_trip(x in -50i32..50, y in -50i32..50, codes in proptest::collection::vec(0u8..4, 0..40)) {
        let chain = CrackChain { start: Point::new(x, y), moves: codes.iter().map(|&c| Move::from_code(c).unwrap()).collect() };
        prop_assert_eq!(CrackChain::parse_freeman(&chain.freeman()), Some(chain));
    }

    #[test]
    fn record_round_trip(seed in any::<u64>(), w in 1i64..7, h in 1i64..7) {
        let pyr = pyramid(seed, w, h);
        let text = serde_json::to_string(&pyr.to_record()).unwrap();
        let record: PyramidRecord = serde_json::from_str(&text).unwrap();
        let back = Pyramid::from_record(&record).unwrap();
        prop_assert_eq!(back.states(), pyr.states());
        prop_assert_eq!(back.top_map(), pyr.top_map());
        for d in pyr.top_map().darts() {
            prop_assert_eq!(back.cached_orientation(d), pyr.cached_orientation(d));
        }
        prop_assert!(back.invariant_problems().is_empty());
    }

    #[test]
    fn composed_of_partitions_the_level_below(seed in any::<u64>(), w in 1i64..7, h in 1i64..7) {
        let pyr = pyramid(seed, w, h);
        for i in 1..=pyr.top_index() {
            let (level, below) = (pyr.level(i).unwrap(), pyr.level(i - 1).unwrap());
            let mut seen = BTreeSet::new();
            for &v in level.vertices() {
                for part in level.composed_of(v).unwrap() {
                    prop_assert!(seen.insert(part), "level {} part {} twice", i, part);
                }
            }
            let all: BTreeSet<VertexId> = below.vertices().iter().copied().collect();
            prop_assert_eq!(seen, all);
        }
    }

    #[test]
    fn pixel_labels_name_live_vertices(seed in any::<u64>(), w in 1i64..7, h in 1i64..7) {
        let pyr = pyramid(seed, w, h);
        let top = pyr.top();
        let live: BTreeSet<VertexId> = top.vertices().iter().copied().collect();
        let labels = top.pixel_labels();
        prop_assert_eq!(labels.len(), (w * h) as usize);
        prop_assert!(labels.iter().all(|v| live.contains(v)));
        prop_assert!(top.outer_vertex().is_some_and(|o| !labels.contains(&o)));
    }

    #[test]
    fn uniform_image_is_one_region(w in 1usize..9, h in 1usize..9, c in any::<[u8; 3]>()) {
        let img = Image::new(w, h, vec![c; w * h]).unwrap();
        let pyr = build_pyramid(&img, 0.0).unwrap();
        let top = pyr.top();
        prop_assert_eq!(top.regions().len(), 1);
        prop_assert!(top.is_redundant_edge_free());
    }
}
