//! Unit-distance graph construction: hexagons, Minkowski sums, exact
//! rotations, merging and radius filtering.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use num_integer::Roots;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{ratio, sqrt_upper_bound, FieldElement, ParseFieldError, Point, Rational};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("rotation {0} leaves Q(√3, √11)")]
    UnsupportedRotation(String),
    #[error("unknown graph name `{0}`")]
    UnknownName(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Field {
        line: usize,
        #[source]
        source: ParseFieldError,
    },
    #[error("edge list does not match the unit distances of the points ({0})")]
    EdgeMismatch(String),
}

/// Duplicate-free points in canonical (coefficient-lexicographic) order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Self {
        let mut points: Vec<Point> = points.into_iter().collect();
        points.sort();
        points.dedup();
        PointSet { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index_of(p).is_some()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<T: IntoIterator<Item = Point>>(iter: T) -> Self {
        PointSet::new(iter)
    }
}

/// Rotation about the origin with exact cosine and sine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation {
    pub cos: FieldElement,
    pub sin: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationKind {
    /// Angle `arccos((2i-1)/(2i))`; maps points at radius √i to points at
    /// unit distance from their preimage.
    Theta(u32),
    /// A multiple of 30 degrees.
    Degrees(u32),
}

impl Rotation {
    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &(&p.x * &self.cos) - &(&p.y * &self.sin),
            &(&p.x * &self.sin) + &(&p.y * &self.cos),
        )
    }
}

/// Writes `√n` as `q·√s` with `s ∈ {1, 3, 11, 33}`, if possible.
fn field_sqrt_of_integer(n: u64) -> Option<FieldElement> {
    for (s, make) in [
        (1u64, FieldElement::from_rational as fn(Rational) -> FieldElement),
        (3, FieldElement::sqrt3_times),
        (11, FieldElement::sqrt11_times),
        (33, FieldElement::sqrt33_times),
    ] {
        if n % s != 0 {
            continue;
        }
        let m = n / s;
        let q = m.sqrt();
        if q * q == m {
            return Some(make(ratio(q as i64, 1)));
        }
    }
    None
}

pub fn make_rotation(kind: RotationKind) -> Result<Rotation, GraphError> {
    match kind {
        RotationKind::Theta(i) => {
            if i == 0 {
                return Err(GraphError::UnsupportedRotation("theta(0)".into()));
            }
            let i = i as i64;
            // sin θ_i = √(4i-1) / (2i)
            let root = field_sqrt_of_integer((4 * i - 1) as u64)
                .ok_or_else(|| GraphError::UnsupportedRotation(format!("theta({i})")))?;
            Ok(Rotation {
                cos: FieldElement::from_rational(ratio(2 * i - 1, 2 * i)),
                sin: root.scale(&ratio(1, 2 * i)),
            })
        }
        RotationKind::Degrees(d) => {
            if d % 30 != 0 {
                return Err(GraphError::UnsupportedRotation(format!("{d} degrees")));
            }
            let half = || FieldElement::from_rational(ratio(1, 2));
            let half_root3 = || FieldElement::sqrt3_times(ratio(1, 2));
            // (cos, sin) of 0, 30, 60 degrees; the remaining angles follow by
            // quarter turns.
            let (c, s) = match (d % 90) / 30 {
                0 => (FieldElement::one(), FieldElement::zero()),
                1 => (half_root3(), half()),
                _ => (half(), half_root3()),
            };
            let (cos, sin) = match (d % 360) / 90 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            Ok(Rotation { cos, sin })
        }
    }
}

/// Regular hexagon of circumradius `radius` together with its centre.
pub fn hexagon(radius: &FieldElement) -> PointSet {
    let half = radius.scale(&ratio(1, 2));
    let height = radius * &FieldElement::sqrt3_times(ratio(1, 2));
    let zero = FieldElement::zero();
    PointSet::new([
        Point::new(zero.clone(), zero.clone()),
        Point::new(radius.clone(), zero.clone()),
        Point::new(half.clone(), height.clone()),
        Point::new(-&half, height.clone()),
        Point::new(-radius, zero),
        Point::new(-&half, -&height),
        Point::new(half, -height),
    ])
}

pub fn minkowski(a: &PointSet, b: &PointSet) -> PointSet {
    let mut seen = HashSet::with_capacity(a.len() * b.len());
    for p in a.iter() {
        for q in b.iter() {
            seen.insert(p + q);
        }
    }
    PointSet::new(seen)
}

pub fn rotate(set: &PointSet, rotation: &Rotation, times: usize) -> PointSet {
    let mut points = set.points.clone();
    for _ in 0..times {
        points = points.iter().map(|p| rotation.apply(p)).collect();
    }
    PointSet::new(points)
}

pub fn merge(sets: &[PointSet]) -> PointSet {
    PointSet::new(sets.iter().flat_map(|s| s.points.iter().cloned()))
}

/// Points whose distance to `center` is at most `radius`.
pub fn filter_within(set: &PointSet, center: &Point, radius: &Rational) -> PointSet {
    assert!(!radius.is_negative(), "negative radius");
    let bound = radius * radius;
    PointSet {
        points: set
            .points
            .iter()
            .filter(|p| p.dist_sq(center).cmp_to_rational(&bound) != Ordering::Greater)
            .cloned()
            .collect(),
    }
}

/// `base ⊕ base ⊕ … (times)` restricted to the closed disc of `radius`
/// around the origin. With `prune`, partial sums that are too far out to
/// come back into the disc are dropped early.
pub fn minkowski_power_within(base: &PointSet, times: usize, radius: &Rational, prune: bool) -> PointSet {
    let origin = Point::origin();
    let reach = base
        .iter()
        .map(|p| p.norm_sq().enclosure(64).1)
        .max()
        .map(|q| sqrt_upper_bound(&q.max(Rational::zero()), 64))
        .unwrap_or_else(Rational::zero);
    let mut acc = PointSet::new([origin.clone()]);
    for step in 1..=times {
        acc = minkowski(&acc, base);
        if prune && step < times {
            let slack = Rational::from_integer(((times - step) as i64).into()) * &reach;
            acc = filter_within(&acc, &origin, &(radius + slack));
        }
    }
    filter_within(&acc, &origin, radius)
}

/// A unit-distance graph: edges join exactly the point pairs at distance 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDistanceGraph {
    points: PointSet,
    edges: Vec<(usize, usize)>,
}

/// Distances this far from 1 in floating point cannot be unit distances.
const PREFILTER_SLACK: f64 = 1e-6;

pub fn unit_edges(points: PointSet) -> UnitDistanceGraph {
    let approx: Vec<(f64, f64)> = points.iter().map(Point::to_f64).collect();
    let one = FieldElement::one();
    let pts = points.points();
    let edges: Vec<(usize, usize)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let approx = &approx;
            let one = &one;
            (i + 1..pts.len()).filter_map(move |j| {
                let (dx, dy) = (approx[i].0 - approx[j].0, approx[i].1 - approx[j].1);
                if (dx * dx + dy * dy - 1.0).abs() > PREFILTER_SLACK {
                    return None;
                }
                (pts[i].dist_sq(&pts[j]) == *one).then_some((i, j))
            })
        })
        .collect();
    UnitDistanceGraph { points, edges }
}

impl UnitDistanceGraph {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn average_degree(&self) -> f64 {
        if self.points.is_empty() {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.points.len() as f64
        }
    }

    /// Subgraph induced by `vertices` (indices into this graph), re-indexed
    /// in canonical order.
    pub fn induced(&self, vertices: &[usize]) -> UnitDistanceGraph {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_index = vec![usize::MAX; self.points.len()];
        for (n, &v) in keep.iter().enumerate() {
            new_index[v] = n;
        }
        let points = PointSet {
            points: keep.iter().map(|&v| self.points.points[v].clone()).collect(),
        };
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| new_index[u] != usize::MAX && new_index[v] != usize::MAX)
            .map(|&(u, v)| (new_index[u], new_index[v]))
            .collect();
        UnitDistanceGraph { points, edges }
    }

    pub fn without_vertex(&self, v: usize) -> UnitDistanceGraph {
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// Text format: `udg <n> <m>`, one rendered point per line, then
    /// `e <i> <j>` lines with 0-based indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "udg {} {}", self.vertex_count(), self.edge_count());
        for p in self.points.iter() {
            let _ = writeln!(out, "{p}");
        }
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "e {i} {j}");
        }
        out
    }

    /// Parses the text format. The edge list is re-derived from the points
    /// and must agree with the file.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `udg` header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_count = |s: &str| {
            usize::from_str(s).map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad count `{s}`"),
            })
        };
        if fields.len() != 3 || fields[0] != "udg" {
            return Err(GraphError::Parse {
                line,
                msg: "expected `udg <n> <m>`".into(),
            });
        }
        let (n, m) = (parse_count(fields[1])?, parse_count(fields[2])?);
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = lines.next().ok_or(GraphError::Parse {
                line,
                msg: format!("expected {n} points"),
            })?;
            points.push(text.parse::<Point>().map_err(|source| GraphError::Field { line, source })?);
        }
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let edge = match fields.as_slice() {
                ["e", i, j] => (usize::from_str(i), usize::from_str(j)),
                _ => {
                    return Err(GraphError::Parse {
                        line,
                        msg: "expected `e <i> <j>`".into(),
                    })
                }
            };
            match edge {
                (Ok(i), Ok(j)) if i < n && j < n && i != j => edges.push((i.min(j), i.max(j))),
                _ => {
                    return Err(GraphError::Parse {
                        line,
                        msg: "bad edge".into(),
                    })
                }
            }
        }
        if edges.len() != m {
            return Err(GraphError::EdgeMismatch(format!("header says {m} edges, found {}", edges.len())));
        }
        let set = PointSet::new(points.iter().cloned());
        if set.points != points {
            return Err(GraphError::EdgeMismatch("points are not in canonical order or repeat".into()));
        }
        let graph = unit_edges(set);
        edges.sort_unstable();
        if graph.edges != edges {
            return Err(GraphError::EdgeMismatch(format!(
                "file lists {} edges, points induce {}",
                edges.len(),
                graph.edge_count()
            )));
        }
        Ok(graph)
    }

    /// Non-authoritative decimal coordinates for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y\n");
        for (i, p) in self.points.iter().enumerate() {
            let (x, y) = p.to_f64();
            let _ = writeln!(out, "{i},{x:.12},{y:.12}");
        }
        out
    }
}

/// `(√3 + √11) / 6`, the radius of the rotated hexagon.
pub fn rotated_hexagon_radius() -> FieldElement {
    FieldElement::new(ratio(0, 1), ratio(1, 6), ratio(1, 6), ratio(0, 1))
}

/// Hexagon of radius 1/3.
pub fn small_hexagon() -> PointSet {
    hexagon(&FieldElement::from_rational(ratio(1, 3)))
}

/// Hexagon of radius `(√3 + √11) / 6` turned by 90 degrees.
pub fn rotated_hexagon() -> PointSet {
    let quarter = make_rotation(RotationKind::Degrees(90)).expect("90 degrees is in the field");
    rotate(&hexagon(&rotated_hexagon_radius()), &quarter, 1)
}

/// Union of the two hexagons (13 points).
pub fn hexagon_pair() -> PointSet {
    merge(&[small_hexagon(), rotated_hexagon()])
}

/// Triangular grid of diameter 1: three sums of the small hexagon.
pub fn triangular_grid() -> PointSet {
    let h = small_hexagon();
    minkowski(&minkowski(&h, &h), &h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedGraph {
    Moser,
    Grid37,
    G259,
    /// Triangular grid plus `j` copies of the rotated hexagon.
    GridRotated(u32),
    G2167,
}

impl FromStr for NamedGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "moser" => Ok(NamedGraph::Moser),
            "grid37" => Ok(NamedGraph::Grid37),
            "g259" => Ok(NamedGraph::G259),
            "g2167" => Ok(NamedGraph::G2167),
            other => other
                .strip_prefix("grid-rot-")
                .and_then(|j| j.parse().ok())
                .map(NamedGraph::GridRotated)
                .ok_or_else(|| GraphError::UnknownName(other.to_string())),
        }
    }
}

pub fn moser_spindle() -> PointSet {
    let zero = FieldElement::zero();
    let a = PointSet::new([
        Point::new(zero.clone(), zero.clone()),
        Point::new(FieldElement::one(), zero.clone()),
    ]);
    let b = PointSet::new([
        Point::new(zero.clone(), zero),
        Point::new(FieldElement::from_rational(ratio(1, 2)), FieldElement::sqrt3_times(ratio(1, 2))),
    ]);
    let rhombus = minkowski(&a, &b);
    let theta3 = make_rotation(RotationKind::Theta(3)).expect("theta(3) is in the field");
    merge(&[rhombus.clone(), rotate(&rhombus, &theta3, 1)])
}

pub fn build_named(name: NamedGraph) -> UnitDistanceGraph {
    let points = match name {
        NamedGraph::Moser => moser_spindle(),
        NamedGraph::Grid37 => triangular_grid(),
        NamedGraph::G259 => minkowski(&triangular_grid(), &rotated_hexagon()),
        NamedGraph::GridRotated(j) => {
            let turned = rotated_hexagon();
            (0..j).fold(triangular_grid(), |acc, _| minkowski(&acc, &turned))
        }
        NamedGraph::G2167 => minkowski_power_within(&hexagon_pair(), 8, &ratio(2, 1), true),
    };
    unit_edges(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: FieldElement, y: FieldElement) -> Point {
        Point::new(x, y)
    }

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::from_rational(ratio(n, d))
    }

    #[test]
    fn hexagon_of_one_third() {
        let h = small_hexagon();
        assert_eq!(h.len(), 7);
        assert!(h.contains(&pt(q(1, 3), q(0, 1))));
        assert!(h.contains(&pt(q(-1, 6), FieldElement::sqrt3_times(ratio(-1, 6)))));
    }

    #[test]
    fn unit_hexagon_has_twelve_edges() {
        // brute force over all 21 pairs
        let h = hexagon(&FieldElement::one());
        let pts = h.points();
        let mut brute = 0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].dist_sq(&pts[j]) == FieldElement::one() {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 12);
        assert_eq!(unit_edges(h).edge_count(), 12);
    }

    #[test]
    fn rotated_radius_hexagon_vertex() {
        let r = rotated_hexagon_radius();
        let h = hexagon(&r);
        // (R/2, R√3/2) = ((√3+√11)/12, (3+√33)/12)
        let expected = pt(
            FieldElement::new(ratio(0, 1), ratio(1, 12), ratio(1, 12), ratio(0, 1)),
            FieldElement::new(ratio(1, 4), ratio(0, 1), ratio(0, 1), ratio(1, 12)),
        );
        assert!(h.contains(&expected));
    }

    #[test]
    fn minkowski_small_example() {
        let zero = FieldElement::zero();
        let a = PointSet::new([pt(zero.clone(), zero.clone()), pt(q(1, 1), zero.clone())]);
        let b = PointSet::new([
            pt(zero.clone(), zero.clone()),
            pt(q(1, 2), FieldElement::sqrt3_times(ratio(1, 2))),
        ]);
        let sum = minkowski(&a, &b);
        let expected = PointSet::new([
            pt(zero.clone(), zero.clone()),
            pt(q(1, 1), zero.clone()),
            pt(q(1, 2), FieldElement::sqrt3_times(ratio(1, 2))),
            pt(q(3, 2), FieldElement::sqrt3_times(ratio(1, 2))),
        ]);
        assert_eq!(sum, expected);
        assert_eq!(minkowski(&a, &PointSet::new([Point::origin()])), a);
    }

    #[test]
    fn rotations() {
        let t3 = make_rotation(RotationKind::Theta(3)).unwrap();
        assert_eq!(t3.cos, q(5, 6));
        assert_eq!(t3.sin, FieldElement::sqrt11_times(ratio(1, 6)));
        let t1 = make_rotation(RotationKind::Theta(1)).unwrap();
        assert_eq!(t1.sin, FieldElement::sqrt3_times(ratio(1, 2)));
        assert!(matches!(
            make_rotation(RotationKind::Theta(2)),
            Err(GraphError::UnsupportedRotation(_))
        ));
        let quarter = make_rotation(RotationKind::Degrees(90)).unwrap();
        assert_eq!(quarter.cos, FieldElement::zero());
        assert_eq!(quarter.sin, FieldElement::one());
        assert!(make_rotation(RotationKind::Degrees(45)).is_err());
        for d in (0..=360).step_by(30) {
            let r = make_rotation(RotationKind::Degrees(d)).unwrap();
            assert_eq!(&(&r.cos * &r.cos) + &(&r.sin * &r.sin), FieldElement::one(), "{d}");
        }
    }

    #[test]
    fn rotate_examples() {
        let s = PointSet::new([pt(FieldElement::sqrt3_times(ratio(1, 1)), q(0, 1))]);
        let t3 = make_rotation(RotationKind::Theta(3)).unwrap();
        let turned = rotate(&s, &t3, 1);
        let expected = pt(FieldElement::sqrt3_times(ratio(5, 6)), FieldElement::sqrt33_times(ratio(1, 6)));
        assert_eq!(turned.points(), &[expected.clone()]);
        assert_eq!(expected.dist_sq(&s.points()[0]), FieldElement::one());
        assert_eq!(rotate(&s, &t3, 0), s);

        let e = PointSet::new([pt(q(1, 1), q(0, 1))]);
        let quarter = make_rotation(RotationKind::Degrees(90)).unwrap();
        assert_eq!(rotate(&e, &quarter, 2).points(), &[pt(q(-1, 1), q(0, 1))]);
    }

    #[test]
    fn moser_spindle_counts() {
        let g = build_named(NamedGraph::Moser);
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 11);
        let s = moser_spindle();
        assert_eq!(merge(&[s.clone()]), s);
    }

    #[test]
    fn thirteen_point_union() {
        assert_eq!(hexagon_pair().len(), 13);
    }

    #[test]
    fn filter_examples() {
        let s = PointSet::new([Point::origin(), pt(q(3, 1), q(0, 1))]);
        assert_eq!(filter_within(&s, &Point::origin(), &ratio(2, 1)).points(), &[Point::origin()]);
        let c = pt(q(3, 1), q(0, 1));
        assert_eq!(filter_within(&s, &c, &ratio(0, 1)).points(), &[c.clone()]);
    }

    #[test]
    fn grid_counts() {
        let g = build_named(NamedGraph::Grid37);
        assert_eq!((g.vertex_count(), g.edge_count()), (37, 48));
    }

    #[test]
    fn named_parse() {
        assert_eq!("grid-rot-2".parse::<NamedGraph>().unwrap(), NamedGraph::GridRotated(2));
        assert!("g1".parse::<NamedGraph>().is_err());
    }

    #[test]
    fn induced_subgraph_reinduces_edges() {
        let g = build_named(NamedGraph::Moser);
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(g.induced(&all), g);
        let sub = g.without_vertex(0);
        assert_eq!(sub.vertex_count(), 6);
        let degree0 = g.edges().iter().filter(|&&(u, v)| u == 0 || v == 0).count();
        assert_eq!(sub.edge_count(), 11 - degree0);
    }

    #[test]
    fn text_round_trip() {
        let g = build_named(NamedGraph::Moser);
        let text = g.to_text();
        assert!(text.starts_with("udg 7 11\n"));
        assert_eq!(UnitDistanceGraph::from_text(&text).unwrap(), g);
        let broken = text.replace("e 0 ", "e 1 ");
        assert!(UnitDistanceGraph::from_text(&broken).is_err());
    }
}
