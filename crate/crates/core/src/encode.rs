//! k-colouring formulas for unit-distance graphs.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, Formula, Group, Lit};
use crate::field::{ratio, FieldElement, Point};
use crate::graph::UnitDistanceGraph;
use crate::solver::{solve_with, Outcome, SolveError, SolverConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("the graph lacks the triangle (0,0), (1,0), (1/2,√3/2) used for symmetry breaking")]
    MissingSymmetryTriangle,
    #[error("at least one colour is required")]
    NoColors,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("colour {color} is outside 1..={k}")]
    ColorOutOfRange { color: usize, k: usize },
    #[error("vertex {0} has no colour in the model")]
    UncoloredVertex(usize),
}

/// Variable numbering: vertex `v` (0-based) with colour `c` (1-based) is
/// variable `v·k + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarMap {
    vertices: usize,
    colors: usize,
}

impl VarMap {
    pub fn new(vertices: usize, colors: usize) -> VarMap {
        VarMap { vertices, colors }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn num_vars(&self) -> usize {
        self.vertices * self.colors
    }

    pub fn var(&self, vertex: usize, color: usize) -> u32 {
        debug_assert!(vertex < self.vertices && (1..=self.colors).contains(&color));
        (vertex * self.colors + color) as u32
    }

    pub fn lit(&self, vertex: usize, color: usize) -> Lit {
        Lit::positive(self.var(vertex, color))
    }

    /// Inverse of [`VarMap::var`].
    pub fn decode(&self, var: u32) -> Option<(usize, usize)> {
        let v = var as usize;
        if v == 0 || v > self.num_vars() {
            return None;
        }
        Some(((v - 1) / self.colors, (v - 1) % self.colors + 1))
    }

    fn check(&self, vertex: usize, color: usize) -> Result<(), EncodeError> {
        if vertex >= self.vertices {
            return Err(EncodeError::UnknownVertex(vertex));
        }
        if !(1..=self.colors).contains(&color) {
            return Err(EncodeError::ColorOutOfRange { color, k: self.colors });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    pub symmetry: bool,
    pub at_most_one: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            symmetry: true,
            at_most_one: false,
        }
    }
}

/// Vertex → colour pairs over some designated vertices.
pub type PartialColoring = Vec<(usize, usize)>;

/// Indices of (0,0), (1,0) and (1/2,√3/2), if all present.
pub fn symmetry_triangle(graph: &UnitDistanceGraph) -> Option<[usize; 3]> {
    let zero = FieldElement::zero();
    let corners = [
        Point::new(zero.clone(), zero.clone()),
        Point::new(FieldElement::one(), zero),
        Point::new(FieldElement::from_rational(ratio(1, 2)), FieldElement::sqrt3_times(ratio(1, 2))),
    ];
    let pts = graph.points();
    Some([
        pts.index_of(&corners[0])?,
        pts.index_of(&corners[1])?,
        pts.index_of(&corners[2])?,
    ])
}

/// Clause order: one vertex clause per vertex, `k` clauses per edge, the
/// symmetry units, then at-most-one clauses.
pub fn encode_coloring(
    graph: &UnitDistanceGraph,
    k: usize,
    options: EncodeOptions,
) -> Result<(Formula, VarMap), EncodeError> {
    if k == 0 {
        return Err(EncodeError::NoColors);
    }
    let map = VarMap::new(graph.vertex_count(), k);
    let triangle = if options.symmetry {
        Some(symmetry_triangle(graph).ok_or(EncodeError::MissingSymmetryTriangle)?)
    } else {
        None
    };
    let mut f = Formula::new(map.num_vars());
    for v in 0..graph.vertex_count() {
        f.push(Clause::new((1..=k).map(|c| map.lit(v, c))), Group::Vertex(v));
    }
    for &(u, v) in graph.edges() {
        for c in 1..=k {
            f.push(
                Clause::new([!map.lit(u, c), !map.lit(v, c)]),
                Group::Edge { u, v, color: c },
            );
        }
    }
    if let Some(tri) = triangle {
        for (i, &v) in tri.iter().enumerate().take(k) {
            f.push(Clause::new([map.lit(v, i + 1)]), Group::Symmetry);
        }
    }
    if options.at_most_one {
        for v in 0..graph.vertex_count() {
            for a in 1..=k {
                for b in a + 1..=k {
                    f.push(Clause::new([!map.lit(v, a), !map.lit(v, b)]), Group::Other);
                }
            }
        }
    }
    Ok((f, map))
}

/// Appends one clause per colouring forbidding all of its assignments at
/// once.
pub fn add_blocking_clauses(
    formula: &Formula,
    colorings: &[PartialColoring],
    map: &VarMap,
) -> Result<Formula, EncodeError> {
    let mut out = formula.clone();
    for coloring in colorings {
        for &(v, c) in coloring {
            map.check(v, c)?;
        }
        out.push(Clause::new(coloring.iter().map(|&(v, c)| !map.lit(v, c))), Group::Blocking);
    }
    Ok(out)
}

/// Each vertex gets the least colour whose variable is true.
pub fn decode_model(model: &Assignment, map: &VarMap) -> Result<Vec<usize>, EncodeError> {
    (0..map.vertices())
        .map(|v| {
            (1..=map.colors())
                .find(|&c| model.value(map.var(v, c)) == Some(true))
                .ok_or(EncodeError::UncoloredVertex(v))
        })
        .collect()
}

pub fn is_proper(graph: &UnitDistanceGraph, coloring: &[usize]) -> bool {
    coloring.len() == graph.vertex_count() && graph.edges().iter().all(|&(u, v)| coloring[u] != coloring[v])
}

/// Vertices touched by the vertex and edge clauses of `core`.
pub fn core_vertices(core: &Formula) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (id, _) in core.iter() {
        match core.group(id) {
            Group::Vertex(v) => {
                out.insert(v);
            }
            Group::Edge { u, v, .. } => {
                out.insert(u);
                out.insert(v);
            }
            _ => {}
        }
    }
    out
}

/// Subgraph on the vertices of `core`, with every unit edge among them.
/// Also returns the kept vertices as indices into `graph`.
pub fn core_to_subgraph(core: &Formula, graph: &UnitDistanceGraph) -> (UnitDistanceGraph, Vec<usize>) {
    let keep: Vec<usize> = core_vertices(core).into_iter().collect();
    (graph.induced(&keep), keep)
}

/// Projected enumeration of colourings of `vertices`: solve, block the
/// decoded colouring of those vertices, repeat until UNSAT or `limit`.
pub fn enumerate_colorings(
    formula: &Formula,
    map: &VarMap,
    vertices: &[usize],
    limit: Option<usize>,
    config: &SolverConfig,
) -> Result<Vec<PartialColoring>, EnumerateError> {
    for &v in vertices {
        map.check(v, 1)?;
    }
    let mut f = formula.clone();
    let mut found = Vec::new();
    while limit.map_or(true, |l| found.len() < l) {
        let result = solve_with(&f, config)?;
        let model = match result.outcome {
            Outcome::Sat(m) => m,
            Outcome::Unsat(_) => break,
        };
        let coloring = decode_model(&model, map)?;
        let projected: PartialColoring = vertices.iter().map(|&v| (v, coloring[v])).collect();
        f = add_blocking_clauses(&f, std::slice::from_ref(&projected), map)?;
        found.push(projected);
        if vertices.is_empty() {
            break;
        }
    }
    Ok(found)
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
