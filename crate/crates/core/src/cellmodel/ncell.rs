use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{CellError, CellSpec, NCELL_VERTEX_CAP};
use crate::ratfun::TransitionMatrix;

/// Finite simple graph with named vertices and a designated boundary list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    names: Vec<String>,
    adjacency: Vec<Vec<usize>>,
    boundary: Vec<usize>,
}

impl FiniteGraph {
    /// Builds from an edge list; duplicate edges are merged, loops rejected by panic.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)], boundary: Vec<usize>) -> Self {
        let mut adjacency = vec![Vec::new(); names.len()];
        for &(a, b) in edges {
            assert_ne!(a, b, "loop at vertex {a}");
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for a in &mut adjacency {
            a.sort_unstable();
            a.dedup();
        }
        Self { names, adjacency, boundary }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Simple random walk transition matrix with rows of `absorbing` vertices zeroed.
    pub fn transition_matrix(&self, absorbing: &[usize]) -> TransitionMatrix {
        let mut m = TransitionMatrix::new(self.vertex_count());
        for x in 0..self.vertex_count() {
            if absorbing.contains(&x) || self.degree(x) == 0 {
                continue;
            }
            let p = BigRational::new(BigInt::from(1), BigInt::from(self.degree(x)));
            for &y in self.neighbours(x) {
                m.set(x, y, p.clone());
            }
        }
        m
    }
}

/// Ĉ_n together with the address labels of its vertices.
///
/// Label `(a, v)`: vertex `v` of the cell copy reached by the clique indices
/// `a` (outermost first); `v` is not a boundary vertex of that copy when `a`
/// is nonempty. Labels with empty `a` are the skeleton vertices, which are
/// mapped by φ^{n-1} onto the vertices of Ĉ with the same name.
#[derive(Debug, Clone)]
pub struct NCell {
    pub graph: FiniteGraph,
    level: usize,
    labels: Vec<(Vec<usize>, usize)>,
    lookup: HashMap<(Vec<usize>, usize), usize>,
}

impl NCell {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn label(&self, i: usize) -> (&[usize], usize) {
        let (a, v) = &self.labels[i];
        (a, *v)
    }

    /// Index of the vertex labelled `(addr, v)` after resolving boundary identifications.
    pub fn index(&self, spec: &CellSpec, addr: &[usize], v: usize) -> Option<usize> {
        let mut a = addr.to_vec();
        let v = canonicalize(spec, &mut a, v);
        self.lookup.get(&(a, v)).copied()
    }

    /// Index of the skeleton vertex corresponding to vertex `v` of Ĉ.
    pub fn skeleton(&self, v: usize) -> usize {
        self.lookup[&(Vec::new(), v)]
    }
}

/// Resolve `(addr, v)` to its canonical label.
pub(crate) fn canonicalize(spec: &CellSpec, addr: &mut Vec<usize>, mut v: usize) -> usize {
    while let (Some(&last), Some(j)) = (addr.last(), spec.boundary_position(v)) {
        v = spec.substitution_map(last)[j];
        addr.pop();
    }
    v
}

fn label_name(spec: &CellSpec, addr: &[usize], v: usize) -> String {
    if addr.is_empty() {
        spec.vertex_name(v).to_string()
    } else {
        let a: Vec<String> = addr.iter().map(ToString::to_string).collect();
        format!("{}:{}", a.join("."), spec.vertex_name(v))
    }
}

pub(crate) fn ncell_vertex_count(spec: &CellSpec, n: usize) -> Option<usize> {
    let nv = spec.vertex_count();
    let inner = nv - spec.theta();
    let mut total = nv;
    let mut copies: usize = 1;
    for _ in 1..n {
        copies = copies.checked_mul(spec.mu())?;
        total = total.checked_add(copies.checked_mul(inner)?)?;
    }
    Some(total)
}

pub fn build_ncell(spec: &CellSpec, n: usize) -> Result<NCell, CellError> {
    if n == 0 {
        return Err(CellError::ZeroLevel);
    }
    let count = ncell_vertex_count(spec, n).unwrap_or(usize::MAX);
    if count > NCELL_VERTEX_CAP {
        return Err(CellError::SizeCap { level: n, vertices: count, cap: NCELL_VERTEX_CAP });
    }
    let mut labels = Vec::with_capacity(count);
    for v in 0..spec.vertex_count() {
        labels.push((Vec::new(), v));
    }
    let interior = spec.interior();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 1..n {
        let mut next = Vec::with_capacity(frontier.len() * spec.mu());
        for a in &frontier {
            for i in 0..spec.mu() {
                let mut b = a.clone();
                b.push(i);
                for &v in &interior {
                    labels.push((b.clone(), v));
                }
                next.push(b);
            }
        }
        frontier = next;
    }
    let lookup: HashMap<(Vec<usize>, usize), usize> =
        labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut edges = Vec::new();
    for a in &frontier {
        for x in 0..spec.vertex_count() {
            for &y in spec.neighbours(x) {
                if x < y {
                    let (mut ax, mut ay) = (a.clone(), a.clone());
                    let cx = canonicalize(spec, &mut ax, x);
                    let cy = canonicalize(spec, &mut ay, y);
                    edges.push((lookup[&(ax, cx)], lookup[&(ay, cy)]));
                }
            }
        }
    }
    let names = labels.iter().map(|(a, v)| label_name(spec, a, *v)).collect();
    let boundary = spec.boundary().to_vec();
    Ok(NCell { graph: FiniteGraph::from_edges(names, &edges, boundary), level: n, labels, lookup })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginMode {
    OriginCell,
    OriginVertex,
}

#[derive(Debug, Clone)]
pub struct OriginApproximation {
    pub graph: FiniteGraph,
    /// The distinguished origin: the origin vertex in origin-vertex mode, the
    /// first vertex of the innermost origin cell otherwise.
    pub origin: usize,
    /// Closure of the innermost nested origin cell (origin-cell mode only).
    pub origin_cell: Vec<usize>,
}

pub fn build_origin_approximation(
    spec: &CellSpec,
    n: usize,
    mode: OriginMode,
) -> Result<OriginApproximation, CellError> {
    let cell = build_ncell(spec, n)?;
    match mode {
        OriginMode::OriginCell => {
            let addr = vec![spec.origin_clique(); n - 1];
            let mut marked: Vec<usize> =
                (0..spec.vertex_count()).map(|u| cell.index(spec, &addr, u).expect("label exists")).collect();
            marked.sort_unstable();
            Ok(OriginApproximation { graph: cell.graph, origin: marked[0], origin_cell: marked })
        }
        OriginMode::OriginVertex => {
            let (o_local, copies) = match (spec.origin_vertex(), spec.star_multiplicity()) {
                (Some(o), Some(m)) => (o, m),
                _ => return Err(CellError::NoOriginVertex),
            };
            let o = cell.skeleton(o_local);
            let nv = cell.graph.vertex_count();
            let total = copies * nv - (copies - 1);
            if total > NCELL_VERTEX_CAP {
                return Err(CellError::SizeCap { level: n, vertices: total, cap: NCELL_VERTEX_CAP });
            }
            let mut names = Vec::with_capacity(total);
            let mut edges = Vec::new();
            let mut origin = None;
            for b in 0..copies {
                let mut map = vec![0; nv];
                for (i, slot) in map.iter_mut().enumerate() {
                    if i == o {
                        *slot = *origin.get_or_insert_with(|| {
                            names.push(cell.graph.name(o).to_string());
                            names.len() - 1
                        });
                    } else {
                        *slot = names.len();
                        names.push(format!("{b}/{}", cell.graph.name(i)));
                    }
                }
                for x in 0..nv {
                    for &y in cell.graph.neighbours(x) {
                        if x < y {
                            edges.push((map[x], map[y]));
                        }
                    }
                }
            }
            let origin = origin.expect("at least one copy");
            Ok(OriginApproximation {
                graph: FiniteGraph::from_edges(names, &edges, vec![origin]),
                origin,
                origin_cell: Vec::new(),
            })
        }
    }
}
