use cnp_core::field::{ratio, FieldElement, Point};
use cnp_core::graph::{
    build_named, filter_within, hexagon_pair, make_rotation, minkowski, minkowski_power_within, moser_spindle, rotate,
    small_hexagon, unit_edges, NamedGraph, PointSet, RotationKind, UnitDistanceGraph,
};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = FieldElement> {
    let q = (-12i64..=12, 1i64..=6).prop_map(|(n, d)| ratio(n, d));
    (q.clone(), q.clone(), q).prop_map(|(a, b, c)| &(&FieldElement::from_rational(a) + &FieldElement::sqrt3_times(b)) + &FieldElement::sqrt11_times(c))
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn point_set(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(point(), 1..max).prop_map(PointSet::new)
}

fn rotation_kind() -> impl Strategy<Value = RotationKind> {
    prop_oneof![
        (0u32..12).prop_map(|k| RotationKind::Degrees(30 * k)),
        prop::sample::select(vec![1u32, 3, 7, 19, 25]).prop_map(RotationKind::Theta),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dist_sq_is_symmetric(p in point(), q in point()) {
        prop_assert_eq!(p.dist_sq(&q), q.dist_sq(&p));
        prop_assert!(p.dist_sq(&p).is_zero());
    }

    #[test]
    fn rotations_are_isometries(p in point(), q in point(), kind in rotation_kind()) {
        let rot = make_rotation(kind).unwrap();
        prop_assert_eq!(rot.apply(&p).dist_sq(&rot.apply(&q)), p.dist_sq(&q));
        prop_assert_eq!(rot.apply(&p).norm_sq(), p.norm_sq());
    }

    #[test]
    fn minkowski_is_commutative_and_associative(a in point_set(5), b in point_set(5), c in point_set(4)) {
        let mut ab: Vec<Point> = minkowski(&a, &b).points().to_vec();
        let mut ba: Vec<Point> = minkowski(&b, &a).points().to_vec();
        ab.sort_by_key(|p| p.to_string());
        ba.sort_by_key(|p| p.to_string());
        prop_assert_eq!(ab, ba);
        let mut left: Vec<Point> = minkowski(&minkowski(&a, &b), &c).points().to_vec();
        let mut right: Vec<Point> = minkowski(&a, &minkowski(&b, &c)).points().to_vec();
        left.sort_by_key(|p| p.to_string());
        right.sort_by_key(|p| p.to_string());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn origin_is_minkowski_identity(a in point_set(6)) {
        let id = PointSet::new([Point::origin()]);
        prop_assert_eq!(minkowski(&a, &id).len(), a.len());
    }

    #[test]
    fn unit_edges_match_brute_force(a in point_set(6), b in point_set(3)) {
        let set = minkowski(&merge_hex(&a), &b);
        let g = unit_edges(set.clone());
        let one = FieldElement::one();
        let pts = set.points();
        let mut expected = 0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].dist_sq(&pts[j]) == one {
                    expected += 1;
                }
            }
        }
        prop_assert_eq!(g.edge_count(), expected);
        for &(u, v) in g.edges() {
            prop_assert!(u < v);
            prop_assert_eq!(pts[u].dist_sq(&pts[v]), one.clone());
        }
    }
}

fn merge_hex(a: &PointSet) -> PointSet {
    cnp_core::graph::merge(&[a.clone(), small_hexagon()])
}

#[test]
fn pruned_power_matches_unpruned() {
    let base = hexagon_pair();
    for (times, radius) in [(2, ratio(1, 2)), (3, ratio(1, 1)), (3, ratio(1, 3))] {
        let pruned = minkowski_power_within(&base, times, &radius, true);
        let plain = minkowski_power_within(&base, times, &radius, false);
        let mut full = PointSet::new([Point::origin()]);
        for _ in 0..times {
            full = minkowski(&full, &base);
        }
        let reference = filter_within(&full, &Point::origin(), &radius);
        let key = |s: &PointSet| {
            let mut v: Vec<String> = s.points().iter().map(|p| p.to_string()).collect();
            v.sort();
            v
        };
        assert_eq!(key(&pruned), key(&reference));
        assert_eq!(key(&plain), key(&reference));
    }
}

#[test]
fn twelve_rotations_of_thirty_degrees_return_home() {
    let rot = make_rotation(RotationKind::Degrees(30)).unwrap();
    let h = small_hexagon();
    let back = rotate(&h, &rot, 12);
    assert_eq!(back.points(), h.points());
}

#[test]
fn small_graph_counts() {
    let moser = unit_edges(moser_spindle());
    assert_eq!((moser.vertex_count(), moser.edge_count()), (7, 11));
    let grid = build_named(NamedGraph::Grid37);
    assert_eq!((grid.vertex_count(), grid.edge_count()), (37, 48));
}

#[test]
fn g259_has_720_cross_copy_edges() {
    let g = build_named(NamedGraph::G259);
    assert_eq!((g.vertex_count(), g.edge_count()), (259, 1056));
    // every point is a grid point plus one offset from the rotated hexagon;
    // edges inside a translate of the grid number 7 * 48
    assert_eq!(g.edge_count() - 7 * 48, 720);
    let text = g.to_text();
    assert_eq!(UnitDistanceGraph::from_text(&text).unwrap(), g);
}
