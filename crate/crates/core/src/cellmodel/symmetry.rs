use serde::Serialize;

use super::{CellError, CellSpec, SYMMETRY_VERTEX_CAP};

/// A graph automorphism of Ĉ preserving θC setwise: `perm[v]` is the image of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Automorphism {
    pub perm: Vec<usize>,
}

impl Automorphism {
    /// Induced permutation of boundary positions.
    pub fn boundary_action(&self, spec: &CellSpec) -> Vec<usize> {
        spec.boundary()
            .iter()
            .map(|&b| spec.boundary_position(self.perm[b]).expect("boundary preserved"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    /// Aut(Ĉ) acts transitively on θC.
    pub simply_symmetric: bool,
    /// Aut(Ĉ) acts transitively on ordered pairs of distinct boundary vertices.
    pub doubly_symmetric: bool,
    pub witnesses: Vec<Automorphism>,
}

pub fn check_symmetry(spec: &CellSpec) -> Result<SymmetryReport, CellError> {
    check_symmetry_with_cap(spec, SYMMETRY_VERTEX_CAP)
}

/// Exhaustive backtracking search for automorphisms realising each boundary
/// image (and each ordered pair of images) demanded by the two transitivity notions.
pub fn check_symmetry_with_cap(spec: &CellSpec, cap: usize) -> Result<SymmetryReport, CellError> {
    let n = spec.vertex_count();
    if n > cap {
        return Err(CellError::SearchCap { vertices: n, cap });
    }
    let search = Search::new(spec);
    let b = spec.boundary();
    let mut witnesses: Vec<Automorphism> = Vec::new();
    let mut record = |a: Automorphism| {
        if !witnesses.contains(&a) {
            witnesses.push(a);
        }
    };
    let mut simply = true;
    for &target in b {
        match search.find(&[(b[0], target)]) {
            Some(a) => record(a),
            None => simply = false,
        }
    }
    let mut doubly = simply;
    if doubly && b.len() >= 2 {
        'outer: for &t0 in b {
            for &t1 in b {
                if t0 == t1 {
                    continue;
                }
                match search.find(&[(b[0], t0), (b[1], t1)]) {
                    Some(a) => record(a),
                    None => {
                        doubly = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(SymmetryReport { simply_symmetric: simply, doubly_symmetric: doubly, witnesses })
}

struct Search<'a> {
    spec: &'a CellSpec,
    adj: Vec<Vec<bool>>,
}

impl<'a> Search<'a> {
    fn new(spec: &'a CellSpec) -> Self {
        let n = spec.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for (x, row) in adj.iter_mut().enumerate() {
            for &y in spec.neighbours(x) {
                row[y] = true;
            }
        }
        Self { spec, adj }
    }

    fn compatible(&self, x: usize, y: usize) -> bool {
        self.spec.degree(x) == self.spec.degree(y) && self.spec.is_boundary(x) == self.spec.is_boundary(y)
    }

    fn find(&self, pins: &[(usize, usize)]) -> Option<Automorphism> {
        let n = self.spec.vertex_count();
        // pinned vertices first, then breadth-first so each vertex meets mapped neighbours early
        let mut order: Vec<usize> = pins.iter().map(|p| p.0).collect();
        let mut seen = vec![false; n];
        for &v in &order {
            seen[v] = true;
        }
        let mut head = 0;
        loop {
            while head < order.len() {
                let x = order[head];
                head += 1;
                for &y in self.spec.neighbours(x) {
                    if !seen[y] {
                        seen[y] = true;
                        order.push(y);
                    }
                }
            }
            match (0..n).find(|&v| !seen[v]) {
                Some(v) => {
                    seen[v] = true;
                    order.push(v);
                }
                None => break,
            }
        }
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.extend(&order, 0, pins, &mut image, &mut used) {
            Some(Automorphism { perm: image })
        } else {
            None
        }
    }

    fn extend(
        &self,
        order: &[usize],
        k: usize,
        pins: &[(usize, usize)],
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let x = order[k];
        let pinned = pins.iter().find(|p| p.0 == x).map(|p| p.1);
        let candidates: Vec<usize> = match pinned {
            Some(t) => vec![t],
            None => (0..order.len()).collect(),
        };
        for y in candidates {
            if used[y] || !self.compatible(x, y) {
                continue;
            }
            let consistent = order[..k].iter().all(|&p| self.adj[x][p] == self.adj[y][image[p]]);
            if !consistent {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if self.extend(order, k + 1, pins, image, used) {
                return true;
            }
            used[y] = false;
            image[x] = usize::MAX;
        }
        false
    }
}
