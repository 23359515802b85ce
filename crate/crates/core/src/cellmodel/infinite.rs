//! The infinite graph X = ∪ Ĉ_n, nested with Ĉ_{n-1} at position
//! `origin_clique` inside Ĉ_n, optionally as a star of several copies glued at
//! the origin vertex. X is never materialised: vertices carry addresses and
//! neighbourhoods are computed locally (and cached).
//!
//! A vertex at frame `level` is `(addr, local)` inside Ĉ_{level+1}, with
//! `addr.len() <= level`. Keys are kept minimal: the smallest frame that
//! contains the vertex, so equal vertices have equal keys.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use super::ncell::canonicalize;
use super::CellSpec;

/// Default cap on the frame level reachable through neighbour queries.
pub const DEFAULT_LEVEL_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexKey {
    pub branch: usize,
    pub level: usize,
    pub addr: Vec<usize>,
    pub local: usize,
}

/// A 1-cell of X: the bottom copy of Ĉ at `addr` (`addr.len() == level`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub branch: usize,
    pub level: usize,
    pub addr: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VertexRefError {
    #[error("cannot parse vertex reference {0:?}; expected level:address:local[@branch]")]
    Parse(String),
    #[error("unknown vertex name {0:?}")]
    UnknownVertex(String),
    #[error("address {addr:?} is longer than level {level}")]
    AddressTooLong { addr: Vec<usize>, level: usize },
    #[error("address digit {digit} out of range for {mu} cliques")]
    Digit { digit: usize, mu: usize },
    #[error("branch {branch} out of range for {branches} branches")]
    Branch { branch: usize, branches: usize },
    #[error("neighbourhood query reached level {level}, above the cap of {cap}")]
    LevelCap { level: usize, cap: usize },
}

#[derive(Debug)]
pub struct SelfSimilarGraph {
    spec: CellSpec,
    branches: usize,
    /// Local vertex that stays on the frame boundary at every level.
    fixed: Option<usize>,
    level_cap: usize,
    cache: RwLock<HashMap<VertexKey, Arc<[VertexKey]>>>,
}

impl SelfSimilarGraph {
    /// Origin-vertex star when the spec provides one, origin-cell nesting otherwise.
    pub fn new(spec: &CellSpec) -> Self {
        let branches = spec.star_multiplicity().unwrap_or(1);
        Self::build(spec, branches)
    }

    /// Single-branch nesting regardless of any origin vertex.
    pub fn origin_cell(spec: &CellSpec) -> Self {
        Self::build(spec, 1)
    }

    fn build(spec: &CellSpec, branches: usize) -> Self {
        let c0 = spec.origin_clique();
        let fixed = spec
            .boundary()
            .iter()
            .enumerate()
            .find(|&(j, &b)| spec.substitution_map(c0)[j] == b)
            .map(|(_, &b)| b);
        Self {
            spec: spec.clone(),
            branches,
            fixed,
            level_cap: DEFAULT_LEVEL_CAP,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_level_cap(mut self, cap: usize) -> Self {
        self.level_cap = cap;
        self
    }

    pub fn spec(&self) -> &CellSpec {
        &self.spec
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }

    /// The origin o: the fixed boundary vertex if there is one, else the first
    /// boundary vertex of the innermost frame.
    pub fn origin(&self) -> VertexKey {
        let local = self.fixed.unwrap_or(self.spec.boundary()[0]);
        self.minimal(0, 0, Vec::new(), local)
    }

    fn is_star_centre(&self, level: usize, addr: &[usize], local: usize) -> bool {
        self.branches > 1 && level == 0 && addr.is_empty() && Some(local) == self.fixed
    }

    /// Validated, minimal key for `(addr, local)` at frame `level` of `branch`.
    pub fn key(&self, branch: usize, level: usize, addr: &[usize], local: usize) -> Result<VertexKey, VertexRefError> {
        if branch >= self.branches {
            return Err(VertexRefError::Branch { branch, branches: self.branches });
        }
        if addr.len() > level {
            return Err(VertexRefError::AddressTooLong { addr: addr.to_vec(), level });
        }
        if let Some(&digit) = addr.iter().find(|&&d| d >= self.spec.mu()) {
            return Err(VertexRefError::Digit { digit, mu: self.spec.mu() });
        }
        Ok(self.minimal(branch, level, addr.to_vec(), local))
    }

    fn minimal(&self, branch: usize, mut level: usize, mut addr: Vec<usize>, local: usize) -> VertexKey {
        let spec = &self.spec;
        let c0 = spec.origin_clique();
        let mut v = canonicalize(spec, &mut addr, local);
        while level > 0 {
            if let Some(&first) = addr.first() {
                if first != c0 {
                    break;
                }
                addr.remove(0);
            } else {
                match spec.map_position(c0, v) {
                    Some(j) => v = spec.boundary()[j],
                    None => break,
                }
            }
            level -= 1;
        }
        let branch = if self.is_star_centre(level, &addr, v) { 0 } else { branch };
        VertexKey { branch, level, addr, local: v }
    }

    /// Not in F, i.e. interior to a 1-cell.
    pub fn is_interior(&self, k: &VertexKey) -> bool {
        k.addr.len() == k.level && !(k.addr.is_empty() && self.spec.is_boundary(k.local))
    }

    pub fn in_f(&self, k: &VertexKey) -> bool {
        !self.is_interior(k)
    }

    pub fn cell_of(&self, k: &VertexKey) -> Option<CellKey> {
        self.is_interior(k).then(|| CellKey { branch: k.branch, level: k.level, addr: k.addr.clone() })
    }

    pub fn cell_vertex(&self, c: &CellKey, local: usize) -> VertexKey {
        self.minimal(c.branch, c.level, c.addr.clone(), local)
    }

    /// θC of a 1-cell, in boundary order.
    pub fn cell_boundary(&self, c: &CellKey) -> Vec<VertexKey> {
        self.spec.boundary().iter().map(|&b| self.cell_vertex(c, b)).collect()
    }

    /// φ on F: contracts every 1-cell to a clique. `None` for interior vertices.
    pub fn phi(&self, k: &VertexKey) -> Option<VertexKey> {
        if self.is_interior(k) {
            return None;
        }
        if k.level == 0 {
            if Some(k.local) == self.fixed {
                return Some(k.clone());
            }
            let mut addr = vec![self.spec.origin_clique()];
            let v = canonicalize(&self.spec, &mut addr, k.local);
            return Some(self.minimal(k.branch, 0, addr, v));
        }
        Some(self.minimal(k.branch, k.level - 1, k.addr.clone(), k.local))
    }

    /// ψ = φ^{-1}: X → F.
    pub fn psi(&self, k: &VertexKey) -> VertexKey {
        self.minimal(k.branch, k.level + 1, k.addr.clone(), k.local)
    }

    pub fn neighbours(&self, k: &VertexKey) -> Result<Arc<[VertexKey]>, VertexRefError> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(k) {
            return Ok(hit.clone());
        }
        let computed: Arc<[VertexKey]> = self.compute_neighbours(k)?.into();
        self.cache.write().expect("cache lock").insert(k.clone(), computed.clone());
        Ok(computed)
    }

    pub fn degree(&self, k: &VertexKey) -> Result<usize, VertexRefError> {
        Ok(self.neighbours(k)?.len())
    }

    fn compute_neighbours(&self, k: &VertexKey) -> Result<Vec<VertexKey>, VertexRefError> {
        let spec = &self.spec;
        let (mut level, mut addr, mut v) = (k.level, k.addr.clone(), k.local);
        if addr.is_empty() && spec.is_boundary(v) && Some(v) != self.fixed {
            level += 1;
            addr.push(spec.origin_clique());
            v = canonicalize(spec, &mut addr, v);
        }
        if level > self.level_cap {
            return Err(VertexRefError::LevelCap { level, cap: self.level_cap });
        }
        let mut locals = Vec::new();
        self.collect(level, &mut addr, v, &mut locals);
        let branches = if self.is_star_centre(k.level, &k.addr, k.local) { 0..self.branches } else { k.branch..k.branch + 1 };
        let mut out: Vec<VertexKey> = branches
            .flat_map(|b| locals.iter().map(move |(a, u)| (b, a, *u)))
            .map(|(b, a, u)| self.minimal(b, level, a.clone(), u))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn collect(&self, level: usize, addr: &mut Vec<usize>, v: usize, out: &mut Vec<(Vec<usize>, usize)>) {
        let spec = &self.spec;
        if addr.len() == level {
            for &u in spec.neighbours(v) {
                let mut a = addr.clone();
                let cu = canonicalize(spec, &mut a, u);
                out.push((a, cu));
            }
            return;
        }
        for &i in spec.cliques_of(v) {
            let j = spec.map_position(i, v).expect("clique vertex is mapped");
            addr.push(i);
            self.collect(level, addr, spec.boundary()[j], out);
            addr.pop();
        }
    }

    /// Boundary vertices of frame `level` over all branches (the star centre once).
    pub fn frame_boundary(&self, level: usize) -> Vec<VertexKey> {
        let mut out: Vec<VertexKey> = (0..self.branches)
            .flat_map(|b| self.spec.boundary().iter().map(move |&v| (b, v)))
            .map(|(b, v)| self.minimal(b, level, Vec::new(), v))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn format_key(&self, k: &VertexKey) -> String {
        let addr = if k.addr.is_empty() {
            "-".to_string()
        } else {
            k.addr.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
        };
        let mut s = format!("{}:{}:{}", k.level, addr, self.spec.vertex_name(k.local));
        if self.branches > 1 {
            s.push_str(&format!("@{}", k.branch));
        }
        s
    }
}

/// Textual vertex reference `level:address:local[@branch]`.
///
/// The address is a '.'-separated list of 0-based clique indices (a run of
/// single digits is also accepted); `-`, `ε` or nothing mean the empty
/// address. The local name `o` refers to the origin, and so does a bare `o`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRef {
    pub level: usize,
    pub address: Vec<usize>,
    pub local: String,
    pub branch: usize,
}

impl VertexRef {
    pub fn origin() -> Self {
        Self { level: 0, address: Vec::new(), local: "o".into(), branch: 0 }
    }

    pub fn from_key(g: &SelfSimilarGraph, k: &VertexKey) -> Self {
        Self { level: k.level, address: k.addr.clone(), local: g.spec().vertex_name(k.local).to_string(), branch: k.branch }
    }

    pub fn resolve(&self, g: &SelfSimilarGraph) -> Result<VertexKey, VertexRefError> {
        let local = match g.spec().vertex(&self.local) {
            Some(v) => v,
            None if self.local == "o" => return Ok(g.origin()),
            None => return Err(VertexRefError::UnknownVertex(self.local.clone())),
        };
        g.key(self.branch, self.level, &self.address, local)
    }
}

impl FromStr for VertexRef {
    type Err = VertexRefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || VertexRefError::Parse(s.to_string());
        if s.trim() == "o" {
            return Ok(Self::origin());
        }
        let (body, branch) = match s.rsplit_once('@') {
            Some((b, br)) => (b, br.parse().map_err(|_| err())?),
            None => (s, 0),
        };
        let parts: Vec<&str> = body.split(':').collect();
        let [level, addr, local] = parts.as_slice() else {
            return Err(err());
        };
        let level: usize = level.trim().parse().map_err(|_| err())?;
        let addr = addr.trim();
        let address = if addr.is_empty() || addr == "-" || addr == "ε" || addr == "e" {
            Vec::new()
        } else if addr.contains('.') {
            addr.split('.').map(|d| d.parse().map_err(|_| err())).collect::<Result<_, _>>()?
        } else {
            addr.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(err)).collect::<Result<_, _>>()?
        };
        let local = local.trim();
        if local.is_empty() {
            return Err(err());
        }
        Ok(Self { level, address, local: local.to_string(), branch })
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let addr = if self.address.is_empty() {
            "-".to_string()
        } else {
            self.address.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
        };
        write!(f, "{}:{}:{}", self.level, addr, self.local)?;
        if self.branch != 0 {
            write!(f, "@{}", self.branch)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::bundled;
    use std::collections::{HashSet, VecDeque};

    #[test]
    fn line_is_two_sided_path() {
        let g = SelfSimilarGraph::new(&bundled::line2());
        let o = g.origin();
        let mut seen = HashSet::from([o.clone()]);
        let mut queue = VecDeque::from([(o.clone(), 0usize)]);
        let mut per_distance = vec![0usize; 40];
        while let Some((x, dist)) = queue.pop_front() {
            let nb = g.neighbours(&x).unwrap();
            assert_eq!(nb.len(), 2, "{}", g.format_key(&x));
            per_distance[dist] += 1;
            if dist + 1 < 40 {
                for y in nb.iter() {
                    if seen.insert(y.clone()) {
                        queue.push_back((y.clone(), dist + 1));
                    }
                }
            }
        }
        assert_eq!(per_distance[0], 1);
        assert!(per_distance[1..].iter().all(|&c| c == 2));
    }

    #[test]
    fn phi_halves_the_line() {
        let spec = bundled::line2();
        let g = SelfSimilarGraph::new(&spec);
        let o = g.origin();
        // walk 2k steps from o along branch 0; φ of that vertex is k steps along
        let mut path = vec![o.clone()];
        while path.len() < 33 {
            let last = path.last().unwrap().clone();
            let next = g
                .neighbours(&last)
                .unwrap()
                .iter()
                .find(|y| y.branch == 0 && !path.contains(y))
                .cloned()
                .unwrap();
            path.push(next);
        }
        for k in 0..16 {
            assert!(g.in_f(&path[2 * k]));
            assert!(g.is_interior(&path[2 * k + 1]));
            assert_eq!(g.phi(&path[2 * k]).unwrap(), path[k]);
            assert_eq!(g.psi(&path[k]), path[2 * k]);
        }
    }

    #[test]
    fn degrees_are_multiples_of_theta_minus_one() {
        for spec in bundled::all() {
            let g = SelfSimilarGraph::new(&spec);
            let o = g.origin();
            let mut frontier = vec![o.clone()];
            let mut seen = HashSet::from([o]);
            for _ in 0..6 {
                let mut next = Vec::new();
                for x in &frontier {
                    let deg = g.degree(x).unwrap();
                    if g.is_interior(x) {
                        assert_eq!(deg, spec.degree(x.local));
                    } else {
                        // one block of θ-1 neighbours per adjacent cell; some vertices touch a single cell
                        assert!(deg % (spec.theta() - 1) == 0 && deg > 0, "{} in {}", g.format_key(x), spec.name());
                    }
                    if *x == g.origin() {
                        assert_eq!(deg, 2 * (spec.theta() - 1));
                    }
                    for y in g.neighbours(x).unwrap().iter() {
                        assert!(g.neighbours(y).unwrap().contains(x), "asymmetric adjacency");
                        if seen.insert(y.clone()) {
                            next.push(y.clone());
                        }
                    }
                }
                frontier = next;
            }
        }
    }

    #[test]
    fn parse_vertex_refs() {
        let r: VertexRef = "0:ε:o".parse().unwrap();
        assert_eq!(r, VertexRef::origin());
        assert_eq!("o".parse::<VertexRef>().unwrap(), VertexRef::origin());
        let r: VertexRef = "3:0.2.1:m@1".parse().unwrap();
        assert_eq!((r.level, r.address.clone(), r.local.as_str(), r.branch), (3, vec![0, 2, 1], "m", 1));
        let r2: VertexRef = r.to_string().parse().unwrap();
        assert_eq!(r, r2);
        let r: VertexRef = "2:01:m".parse().unwrap();
        assert_eq!(r.address, vec![0, 1]);
        assert!("2:m".parse::<VertexRef>().is_err());
    }

    #[test]
    fn resolution_is_unique() {
        let spec = bundled::sierpinski();
        let g = SelfSimilarGraph::new(&spec);
        // corner b of frame 0 seen from frame 1 and frame 2
        let b = spec.vertex("b").unwrap();
        let k0 = g.key(0, 0, &[], b).unwrap();
        let ab = spec.vertex("ab").unwrap();
        let k1 = g.key(0, 1, &[], ab).unwrap();
        let k2 = g.key(0, 2, &[0], ab).unwrap();
        assert_eq!(k0, k1);
        assert_eq!(k1, k2);
        let o = VertexRef::origin().resolve(&g).unwrap();
        assert_eq!(o, g.origin());
        assert!(matches!(g.key(0, 1, &[0, 0], b), Err(VertexRefError::AddressTooLong { .. })));
    }
}
