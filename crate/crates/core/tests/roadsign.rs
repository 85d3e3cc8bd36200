use std::collections::BTreeSet;

use combipyr::containment::flood_fill_contains_oracle;
use combipyr::merge::build_pyramid;
use combipyr::roadsign::fixtures::{arrow_sign, flag_sign, two_signs, BLUE, RED, WHITE};
use combipyr::roadsign::{roadsign_extract, roadsign_extract_all, RoadsignError};
use combipyr::{Level, VertexId};

fn region_of(level: &Level, img: &combipyr::raster::Image, color: [u8; 3]) -> BTreeSet<VertexId> {
    level.pixel_labels().iter().zip(&img.pixels).filter(|(_, &c)| c == color).map(|(&v, _)| v).collect()
}

fn single(set: BTreeSet<VertexId>) -> VertexId {
    assert_eq!(set.len(), 1, "{set:?}");
    set.into_iter().next().unwrap()
}

#[test]
fn arrow_sign_containment() {
    let img = arrow_sign(32);
    let pyr = build_pyramid(&img, 24.0).unwrap();
    let top = pyr.top();
    let border = single(region_of(&top, &img, RED));
    let background = single(region_of(&top, &img, WHITE));
    let arrow = single(region_of(&top, &img, BLUE));

    assert_eq!(top.inside_direct(border).unwrap().vertices, BTreeSet::from([background]));
    assert_eq!(top.inside_direct(background).unwrap().vertices, BTreeSet::from([arrow]));
    assert_eq!(top.inside_all(border).unwrap(), BTreeSet::from([background, arrow]));
    assert!(top.inside_all(arrow).unwrap().is_empty());

    // the background has one loop; the arrow lies on the span it opens
    let starts = top.starting_darts(background).unwrap();
    assert_eq!(starts.len(), 1);
    let s = starts[0];
    let mut x = top.sigma(s);
    let mut seen_arrow = false;
    while x != top.alpha(s) {
        seen_arrow |= top.vertex_of(top.alpha(x)).unwrap() == arrow;
        x = top.sigma(x);
    }
    assert!(seen_arrow);

    let labels: Vec<u32> = top.pixel_labels().iter().map(|v| v.index() as u32).collect();
    for a in [border, background, arrow] {
        for b in [border, background, arrow] {
            let oracle = flood_fill_contains_oracle(&labels, 32, 32, a.index() as u32, b.index() as u32).unwrap();
            assert_eq!(top.contains_region(a, b).unwrap(), oracle, "{a} contains {b}");
        }
    }

    let report = top.relation_report(None).unwrap();
    assert!(report.has(border, background, "contains"));
    assert!(report.has(border, arrow, "contains"));
    assert!(report.has(background, arrow, "contains"));
    assert!(report.has(arrow, background, "inside"));
    assert!(!report.has(arrow, border, "contains"));
    let (lo, hi) = (border.min(background), border.max(background));
    assert!(report.has(lo, hi, "meets_each"));
    assert!(report.warnings.is_empty());

    let filtered = top.relation_report(Some(arrow)).unwrap();
    assert!(filtered.pairs.iter().all(|p| p.a == arrow || p.b == arrow));
    assert!(!filtered.pairs.is_empty());

    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(json, serde_json::to_string(&top.relation_report(None).unwrap()).unwrap());
}

#[test]
fn extraction_distinguishes_arrow_from_flag() {
    let img = arrow_sign(32);
    let pyr = build_pyramid(&img, 24.0).unwrap();
    let top = pyr.top();
    let sign = roadsign_extract(&top, &img, 5, WHITE, BLUE).unwrap();
    assert_eq!(sign.symbol, region_of(&top, &img, BLUE));
    assert_eq!(sign.background, single(region_of(&top, &img, WHITE)));

    let img = flag_sign(30);
    let pyr = build_pyramid(&img, 24.0).unwrap();
    assert_eq!(pyr.top().regions().len(), 3);
    assert!(matches!(roadsign_extract(&pyr.top(), &img, 5, WHITE, BLUE), Err(RoadsignError::NoSign)));
}

fn is_path_of_three(level: &Level) -> bool {
    let rag = level.rag().unwrap();
    let mut degrees: Vec<usize> = rag.neighbours().values().map(|n| n.len()).collect();
    degrees.sort();
    rag.nodes.len() == 3 && rag.edges.len() == 2 && degrees == [1, 1, 2]
}

#[test]
fn both_signs_share_one_adjacency_graph() {
    let arrow = build_pyramid(&arrow_sign(32), 24.0).unwrap();
    let flag = build_pyramid(&flag_sign(30), 24.0).unwrap();
    assert!(is_path_of_three(&arrow.top()));
    assert!(is_path_of_three(&flag.top()));
    // the map, unlike the graph, tells them apart
    assert!(arrow.top().regions().iter().any(|&r| !arrow.top().inside_all(r).unwrap().is_empty()));
    assert!(flag.top().regions().iter().all(|&r| flag.top().inside_all(r).unwrap().is_empty()));
}

#[test]
fn two_signs_each_yield_their_own_arrow() {
    let img = two_signs(24);
    let pyr = build_pyramid(&img, 24.0).unwrap();
    let top = pyr.top();
    let arrows = region_of(&top, &img, BLUE);
    assert_eq!(arrows.len(), 2);
    let signs = roadsign_extract_all(&top, &img, 5, WHITE, BLUE).unwrap();
    let found: BTreeSet<BTreeSet<VertexId>> = signs.iter().map(|s| s.symbol.clone()).collect();
    let expected: BTreeSet<BTreeSet<VertexId>> = arrows.iter().map(|&a| BTreeSet::from([a])).collect();
    assert_eq!(found, expected);
}

#[test]
fn no_containment_means_no_sign() {
    let img = combipyr::raster::Image::new(4, 1, vec![WHITE, BLUE, WHITE, RED]).unwrap();
    let pyr = build_pyramid(&img, 10.0).unwrap();
    let err = roadsign_extract(&pyr.top(), &img, 5, WHITE, BLUE).unwrap_err();
    assert_eq!(err.to_string(), "no sign found");
}
