//! Cell graphs, substitution data and their validation; finite n-cells and the
//! infinite graph generated by nesting.

mod address;
mod infinite;
mod ncell;
mod symmetry;

pub use address::{phi_s_step, CellAddress};
pub use infinite::{CellKey, SelfSimilarGraph, VertexKey, VertexRef, VertexRefError};
pub use ncell::{build_ncell, build_origin_approximation, FiniteGraph, NCell, OriginApproximation, OriginMode};
pub use symmetry::{check_symmetry, check_symmetry_with_cap, Automorphism, SymmetryReport};

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on vertices for the automorphism search.
pub const SYMMETRY_VERTEX_CAP: usize = 64;
/// Default cap on the vertex count of a constructed n-cell.
pub const NCELL_VERTEX_CAP: usize = 2_000_000;

/// Which structural requirement a spec violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    Format,
    /// no two boundary vertices adjacent
    F1,
    /// distinct cliques share at most one vertex
    F2,
    /// the cell is a union of complete graphs of equal size
    S1,
    Connectivity,
    Substitution,
    Origin,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Format => "format",
            Axiom::F1 => "(F1)",
            Axiom::F2 => "(F2)",
            Axiom::S1 => "(S1)",
            Axiom::Connectivity => "connectivity",
            Axiom::Substitution => "substitution maps",
            Axiom::Origin => "origin",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.axiom, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CellError {
    #[error("syntax error in cell spec: {0}")]
    Syntax(String),
    #[error("invalid cell spec: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("automorphism search aborted: {vertices} vertices exceed the cap of {cap}")]
    SearchCap { vertices: usize, cap: usize },
    #[error("n-cell of level {level} would have {vertices} vertices, above the cap of {cap}")]
    SizeCap { level: usize, vertices: usize, cap: usize },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("empty cell address")]
    EmptyAddress,
    #[error("address digit {digit} out of range for {mu} cliques")]
    DigitOutOfRange { digit: usize, mu: usize },
    #[error("origin-vertex mode needs origin_vertex and star_multiplicity in the spec")]
    NoOriginVertex,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CellError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            CellError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// On-disk JSON form of a cell spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpecFile {
    pub name: String,
    pub theta: usize,
    pub vertices: Vec<String>,
    pub boundary: Vec<String>,
    pub cliques: Vec<Vec<String>>,
    pub origin_clique: usize,
    pub substitution_maps: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_multiplicity: Option<usize>,
}

/// A validated cell: Ĉ as μ glued copies of K_θ with boundary θC and
/// substitution data. Vertices are referred to by index into `names`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpec {
    name: String,
    theta: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
    boundary: Vec<usize>,
    boundary_pos: Vec<Option<usize>>,
    cliques: Vec<Vec<usize>>,
    /// `maps[i][j]` is the vertex of clique `i` glued to `boundary[j]` of the inserted copy.
    maps: Vec<Vec<usize>>,
    cliques_of: Vec<Vec<usize>>,
    origin_clique: usize,
    origin_vertex: Option<usize>,
    star_multiplicity: Option<usize>,
    adjacency: Vec<Vec<usize>>,
}

pub fn parse_cell_spec(text: &str) -> Result<CellSpec, CellError> {
    let file: CellSpecFile = serde_json::from_str(text).map_err(|e| CellError::Syntax(e.to_string()))?;
    CellSpec::from_file(&file)
}

impl CellSpec {
    pub fn from_file(file: &CellSpecFile) -> Result<Self, CellError> {
        let mut errs = Vec::new();
        let mut push = |axiom, message: String| errs.push(Violation { axiom, message });
        let theta = file.theta;
        if theta < 2 {
            push(Axiom::Format, format!("theta must be at least 2, got {theta}"));
        }
        let mut index = HashMap::new();
        for (i, n) in file.vertices.iter().enumerate() {
            if n.is_empty() || n.contains([':', '@']) || n.chars().any(char::is_whitespace) {
                push(Axiom::Format, format!("vertex name {n:?} is empty or contains ':', '@' or whitespace"));
            }
            if index.insert(n.clone(), i).is_some() {
                push(Axiom::Format, format!("duplicate vertex name {n:?}"));
            }
        }
        let lookup = |n: &String, what: &str, errs: &mut Vec<Violation>| -> Option<usize> {
            let r = index.get(n).copied();
            if r.is_none() {
                errs.push(Violation { axiom: Axiom::Format, message: format!("unknown vertex {n:?} in {what}") });
            }
            r
        };
        let boundary: Vec<usize> = file.boundary.iter().filter_map(|n| lookup(n, "boundary", &mut errs)).collect();
        let cliques: Vec<Vec<usize>> = file
            .cliques
            .iter()
            .map(|c| c.iter().filter_map(|n| lookup(n, "cliques", &mut errs)).collect())
            .collect();
        let maps: Vec<Vec<usize>> = file
            .substitution_maps
            .iter()
            .map(|c| c.iter().filter_map(|n| lookup(n, "substitution_maps", &mut errs)).collect())
            .collect();
        let origin_vertex = file.origin_vertex.as_ref().and_then(|n| lookup(n, "origin_vertex", &mut errs));
        if !errs.is_empty() {
            return Err(CellError::Invalid(errs));
        }
        let nv = file.vertices.len();
        let mut push = |axiom, message: String| errs.push(Violation { axiom, message });

        let mut boundary_pos = vec![None; nv];
        if boundary.len() != theta {
            push(Axiom::Format, format!("boundary has {} vertices, theta is {theta}", boundary.len()));
        }
        for (j, &b) in boundary.iter().enumerate() {
            if boundary_pos[b].replace(j).is_some() {
                push(Axiom::Format, format!("boundary vertex {} listed twice", file.vertices[b]));
            }
        }
        if cliques.is_empty() {
            push(Axiom::S1, "no cliques".into());
        }
        let mut adj = vec![Vec::new(); nv];
        let mut cliques_of = vec![Vec::new(); nv];
        for (i, c) in cliques.iter().enumerate() {
            let mut sorted = c.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if c.len() != theta || sorted.len() != theta {
                push(Axiom::S1, format!("clique {i} must have exactly {theta} distinct vertices"));
                continue;
            }
            for &x in c {
                cliques_of[x].push(i);
                for &y in c {
                    if x != y {
                        adj[x].push(y);
                    }
                }
            }
        }
        for (i, a) in cliques.iter().enumerate() {
            for (k, b) in cliques.iter().enumerate().skip(i + 1) {
                let shared = a.iter().filter(|x| b.contains(x)).count();
                if shared > 1 {
                    push(Axiom::F2, format!("cliques {i} and {k} share {shared} vertices"));
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        for (j, &b) in boundary.iter().enumerate() {
            for &c in boundary.iter().skip(j + 1) {
                if adj[b].contains(&c) {
                    push(
                        Axiom::F1,
                        format!("boundary vertices {} and {} are adjacent", file.vertices[b], file.vertices[c]),
                    );
                }
            }
        }
        for v in 0..nv {
            if cliques_of[v].is_empty() {
                push(Axiom::Connectivity, format!("vertex {} lies in no clique", file.vertices[v]));
            }
        }
        if nv > 0 && bfs_distances(&adj, 0).iter().any(Option::is_none) {
            push(Axiom::Connectivity, "cell graph is not connected".into());
        }
        if file.origin_clique >= cliques.len() {
            push(Axiom::Origin, format!("origin_clique {} out of range", file.origin_clique));
        }
        if maps.len() != cliques.len() {
            push(
                Axiom::Substitution,
                format!("{} substitution maps for {} cliques", maps.len(), cliques.len()),
            );
        } else {
            for (i, (m, c)) in maps.iter().zip(&cliques).enumerate() {
                let mut a = m.clone();
                let mut b = c.clone();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    push(Axiom::Substitution, format!("map {i} is not a bijection onto clique {i}"));
                }
            }
        }
        match (origin_vertex, file.star_multiplicity) {
            (None, None) => {}
            (Some(o), Some(m)) => {
                if m < 2 {
                    push(Axiom::Origin, format!("star_multiplicity must be at least 2, got {m}"));
                }
                match boundary_pos[o] {
                    None => push(Axiom::Origin, format!("origin_vertex {} is not a boundary vertex", file.vertices[o])),
                    Some(j) => {
                        let fixed = maps.get(file.origin_clique).and_then(|m| m.get(j)) == Some(&o);
                        if !fixed {
                            push(
                                Axiom::Origin,
                                format!(
                                    "origin_clique must contain origin_vertex {} and map it to its own boundary position",
                                    file.vertices[o]
                                ),
                            );
                        }
                    }
                }
            }
            _ => push(Axiom::Origin, "origin_vertex and star_multiplicity must be given together".into()),
        }
        if !errs.is_empty() {
            return Err(CellError::Invalid(errs));
        }
        Ok(CellSpec {
            name: file.name.clone(),
            theta,
            names: file.vertices.clone(),
            index,
            boundary,
            boundary_pos,
            cliques,
            maps,
            cliques_of,
            origin_clique: file.origin_clique,
            origin_vertex,
            star_multiplicity: file.star_multiplicity,
            adjacency: adj,
        })
    }

    pub fn to_file(&self) -> CellSpecFile {
        let n = |v: &usize| self.names[*v].clone();
        CellSpecFile {
            name: self.name.clone(),
            theta: self.theta,
            vertices: self.names.clone(),
            boundary: self.boundary.iter().map(n).collect(),
            cliques: self.cliques.iter().map(|c| c.iter().map(n).collect()).collect(),
            origin_clique: self.origin_clique,
            substitution_maps: self.maps.iter().map(|c| c.iter().map(n).collect()).collect(),
            origin_vertex: self.origin_vertex.as_ref().map(n),
            star_multiplicity: self.star_multiplicity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    /// Number of cliques μ.
    pub fn mu(&self) -> usize {
        self.cliques.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_position(&self, v: usize) -> Option<usize> {
        self.boundary_pos[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_pos[v].is_some()
    }

    /// Non-boundary vertices in index order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.is_boundary(v)).collect()
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn cliques_of(&self, v: usize) -> &[usize] {
        &self.cliques_of[v]
    }

    pub fn substitution_map(&self, clique: usize) -> &[usize] {
        &self.maps[clique]
    }

    /// Position `j` with `maps[clique][j] == v`.
    pub fn map_position(&self, clique: usize, v: usize) -> Option<usize> {
        self.maps[clique].iter().position(|&x| x == v)
    }

    pub fn origin_clique(&self) -> usize {
        self.origin_clique
    }

    pub fn origin_vertex(&self) -> Option<usize> {
        self.origin_vertex
    }

    pub fn star_multiplicity(&self) -> Option<usize> {
        self.star_multiplicity
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Largest graph distance in Ĉ between two boundary vertices.
    pub fn diam_boundary(&self) -> usize {
        self.boundary
            .iter()
            .map(|&b| {
                let dist = bfs_distances(&self.adjacency, b);
                self.boundary.iter().map(|&c| dist[c].unwrap_or(usize::MAX)).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Copy of this spec with one substitution map replaced; used to test map independence.
    pub fn with_substitution_map(&self, clique: usize, map: Vec<usize>) -> Result<Self, CellError> {
        let mut file = self.to_file();
        file.substitution_maps[clique] = map.iter().map(|&v| self.names[v].clone()).collect();
        Self::from_file(&file)
    }
}

pub(crate) fn bfs_distances(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometryReport {
    pub bounded: bool,
    /// (boundary vertex, number of neighbours inside the open cell)
    pub interior_neighbours: Vec<(String, usize)>,
    pub required: usize,
}

/// True iff every boundary vertex has exactly θ−1 neighbours in the open cell.
pub fn check_bounded_geometry(spec: &CellSpec) -> GeometryReport {
    let required = spec.theta - 1;
    let interior_neighbours: Vec<(String, usize)> = spec
        .boundary
        .iter()
        .map(|&b| {
            let k = spec.neighbours(b).iter().filter(|&&y| !spec.is_boundary(y)).count();
            (spec.names[b].clone(), k)
        })
        .collect();
    GeometryReport { bounded: interior_neighbours.iter().all(|(_, k)| *k == required), interior_neighbours, required }
}

/// The bundled example cells.
pub mod bundled {
    use super::{parse_cell_spec, CellSpec};

    pub const LINE2: &str = include_str!("../../specs/line2.json");
    pub const SIERPINSKI: &str = include_str!("../../specs/sierpinski.json");
    pub const VICSEK: &str = include_str!("../../specs/vicsek.json");

    pub fn line2() -> CellSpec {
        parse_cell_spec(LINE2).expect("bundled line2 spec is valid")
    }

    pub fn sierpinski() -> CellSpec {
        parse_cell_spec(SIERPINSKI).expect("bundled sierpinski spec is valid")
    }

    pub fn vicsek() -> CellSpec {
        parse_cell_spec(VICSEK).expect("bundled vicsek spec is valid")
    }

    pub fn all() -> Vec<CellSpec> {
        vec![line2(), sierpinski(), vicsek()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_specs_parse() {
        let l = bundled::line2();
        assert_eq!((l.theta(), l.mu(), l.vertex_count()), (2, 2, 3));
        let s = bundled::sierpinski();
        assert_eq!((s.theta(), s.mu(), s.vertex_count()), (3, 3, 6));
        let v = bundled::vicsek();
        assert_eq!((v.theta(), v.mu(), v.vertex_count()), (4, 5, 16));
    }

    #[test]
    fn adjacent_boundary_cites_f1() {
        let text = r#"{"name":"bad","theta":2,"vertices":["a","b"],"boundary":["a","b"],
            "cliques":[["a","b"]],"origin_clique":0,"substitution_maps":[["a","b"]]}"#;
        let err = parse_cell_spec(text).unwrap_err();
        assert!(err.violations().iter().any(|v| v.axiom == Axiom::F1), "{err}");
        assert!(err.to_string().contains("(F1)"));
    }

    #[test]
    fn clique_overlap_cites_f2_and_size_cites_s1() {
        let text = r#"{"name":"bad","theta":3,"vertices":["a","b","c","x","y"],"boundary":["a","b","c"],
            "cliques":[["a","x","y"],["b","x","y"],["c","x"]],"origin_clique":0,
            "substitution_maps":[["a","x","y"],["b","x","y"],["c","x"]]}"#;
        let err = parse_cell_spec(text).unwrap_err();
        let axioms: Vec<Axiom> = err.violations().iter().map(|v| v.axiom).collect();
        assert!(axioms.contains(&Axiom::F2));
        assert!(axioms.contains(&Axiom::S1));
    }

    #[test]
    fn syntax_errors_are_reported() {
        assert!(matches!(parse_cell_spec("{"), Err(CellError::Syntax(_))));
    }

    #[test]
    fn bounded_geometry_examples() {
        assert!(check_bounded_geometry(&bundled::line2()).bounded);
        let s = check_bounded_geometry(&bundled::sierpinski());
        assert!(s.bounded);
        assert!(s.interior_neighbours.iter().all(|(_, k)| *k == 2));
        // boundary vertex lying in two cliques has 2(θ-1) interior neighbours
        let text = r#"{"name":"fat","theta":2,"vertices":["a","x","y","b"],"boundary":["a","b"],
            "cliques":[["a","x"],["a","y"],["x","b"],["y","b"]],"origin_clique":0,
            "substitution_maps":[["a","x"],["a","y"],["x","b"],["y","b"]]}"#;
        assert!(!check_bounded_geometry(&parse_cell_spec(text).unwrap()).bounded);
    }

    #[test]
    fn fully_boundary_triangle_fails_f1_first() {
        let text = r#"{"name":"k3","theta":3,"vertices":["a","b","c"],"boundary":["a","b","c"],
            "cliques":[["a","b","c"]],"origin_clique":0,"substitution_maps":[["a","b","c"]]}"#;
        let err = parse_cell_spec(text).unwrap_err();
        assert!(err.violations().iter().all(|v| v.axiom == Axiom::F1));
    }

    #[test]
    fn boundary_diameters() {
        assert_eq!(bundled::line2().diam_boundary(), 2);
        assert_eq!(bundled::sierpinski().diam_boundary(), 2);
        assert_eq!(bundled::vicsek().diam_boundary(), 3);
    }

    #[test]
    fn roundtrip_through_file_form() {
        for s in bundled::all() {
            let text = serde_json::to_string(&s.to_file()).unwrap();
            assert_eq!(parse_cell_spec(&text).unwrap(), s);
        }
    }
}
