//! The graph of B-orbits with typed edges: validation, parabolic induction,
//! Knop's Weyl group action, non-normality and chain statistics.
//!
//! Root indices are 0-based here and 1-based in every rendered output.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::root_weyl::{BetaCase, RootSystemDatum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeType {
    U,
    T,
    N,
}

impl EdgeType {
    pub fn parse(s: &str) -> Option<EdgeType> {
        match s {
            "U" | "u" => Some(EdgeType::U),
            "T" | "t" => Some(EdgeType::T),
            "N" | "n" => Some(EdgeType::N),
            _ => None,
        }
    }

    pub fn rank_jump(self) -> usize {
        match self {
            EdgeType::U => 0,
            EdgeType::T | EdgeType::N => 1,
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeType::U => "U",
            EdgeType::T => "T",
            EdgeType::N => "N",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitVertex {
    pub id: String,
    pub rank: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitEdge {
    pub source: String,
    pub target: String,
    pub root: usize,
    pub etype: EdgeType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitGraph {
    pub vertices: Vec<OrbitVertex>,
    pub edges: Vec<OrbitEdge>,
    /// `None` for a torus (no simple roots).
    pub root_system: Option<RootSystemDatum>,
}

impl OrbitGraph {
    pub fn new(root_system: Option<RootSystemDatum>) -> Self {
        OrbitGraph { vertices: Vec::new(), edges: Vec::new(), root_system }
    }

    pub fn add_vertex(&mut self, id: &str, rank: usize, dim: usize) -> &mut Self {
        self.vertices.push(OrbitVertex { id: id.to_string(), rank, dim });
        self
    }

    /// `root` is 0-based.
    pub fn add_edge(&mut self, source: &str, target: &str, root: usize, etype: EdgeType) -> &mut Self {
        self.edges.push(OrbitEdge { source: source.to_string(), target: target.to_string(), root, etype });
        self
    }

    pub fn vertex(&self, id: &str) -> Option<&OrbitVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    fn index(&self) -> BTreeMap<&str, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect()
    }

    fn simple_rank(&self) -> usize {
        self.root_system.as_ref().map_or(0, |r| r.rank)
    }

    /// Vertices reachable by raising from `id`, including `id`.
    pub fn up_set(&self, id: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([id.to_string()]);
        let mut queue = VecDeque::from([id.to_string()]);
        while let Some(v) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.source == v) {
                if seen.insert(e.target.clone()) {
                    queue.push_back(e.target.clone());
                }
            }
        }
        seen
    }

    /// All maximal raising chains (from vertices with no incoming edge to
    /// vertices with no outgoing edge), as lists of edge indices.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        let has_in: BTreeSet<&str> = self.edges.iter().map(|e| e.target.as_str()).collect();
        let mut out = Vec::new();
        for v in &self.vertices {
            if has_in.contains(v.id.as_str()) {
                continue;
            }
            let mut stack = vec![(v.id.clone(), Vec::<usize>::new())];
            while let Some((cur, path)) = stack.pop() {
                let outs: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].source == cur).collect();
                if outs.is_empty() {
                    if !path.is_empty() {
                        out.push(path);
                    }
                    continue;
                }
                for i in outs.into_iter().rev() {
                    let mut p = path.clone();
                    p.push(i);
                    stack.push((self.edges[i].target.clone(), p));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphReport {
    pub violations: Vec<String>,
}

impl GraphReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn graph_validate(g: &OrbitGraph) -> GraphReport {
    let mut rep = GraphReport::default();
    let mut ids = BTreeSet::new();
    for v in &g.vertices {
        if !ids.insert(v.id.as_str()) {
            rep.violations.push(format!("duplicate vertex id {}", v.id));
        }
        if v.dim < v.rank {
            rep.violations.push(format!("vertex {} has dim {} < rank {}", v.id, v.dim, v.rank));
        }
    }
    let n = g.simple_rank();
    let mut slots = BTreeSet::new();
    for e in &g.edges {
        let name = format!("{} -[{}{}]-> {}", e.source, e.etype, e.root + 1, e.target);
        let (Some(s), Some(t)) = (g.vertex(&e.source), g.vertex(&e.target)) else {
            rep.violations.push(format!("edge {name} has an unknown endpoint"));
            continue;
        };
        if e.root >= n {
            rep.violations.push(format!("edge {name} uses a simple root outside the root system"));
        }
        if t.dim != s.dim + 1 {
            rep.violations.push(format!("edge {name} does not raise dimension by one"));
        }
        if t.rank != s.rank + e.etype.rank_jump() {
            rep.violations.push(format!("edge {name} has rank jump {} for type {}", t.rank as i64 - s.rank as i64, e.etype));
        }
        if !slots.insert((e.source.as_str(), e.root)) {
            rep.violations.push(format!("vertex {} has two edges for root {}", e.source, e.root + 1));
        }
    }
    rep
}

/// Induces the orbit graph of `G ×^P Z` from the graph of the `L`-variety `Z`.
///
/// `gz` is labelled either in the indexing of `rs` (all edge roots in `P`) or
/// in the indexing of its own root system, whose Cartan matrix must equal the
/// submatrix of `rs` on `P` (sorted).
pub fn parabolic_induce(gz: &OrbitGraph, rs: &RootSystemDatum, p: &[usize]) -> Result<OrbitGraph> {
    let mut p_sorted: Vec<usize> = p.to_vec();
    p_sorted.sort();
    p_sorted.dedup();
    for &i in &p_sorted {
        if i >= rs.rank {
            return Err(Error::invalid(format!("parabolic index {} out of range", i + 1)));
        }
    }
    let relabel: Vec<usize> = match &gz.root_system {
        Some(zrs) if zrs == rs => {
            if let Some(e) = gz.edges.iter().find(|e| !p_sorted.contains(&e.root)) {
                return Err(Error::LeviMismatch(format!("edge root {} is not a simple root of P", e.root + 1)));
            }
            (0..rs.rank).collect()
        }
        Some(zrs) => {
            if zrs.rank != p_sorted.len() || zrs.cartan != rs.cartan_submatrix(&p_sorted) {
                return Err(Error::LeviMismatch(format!("{} is not the Levi root system of P", zrs)));
            }
            p_sorted.clone()
        }
        None => {
            if !p_sorted.is_empty() || !gz.edges.is_empty() {
                return Err(Error::LeviMismatch("graph without root system over a non-torus Levi".to_string()));
            }
            Vec::new()
        }
    };
    let rep = graph_validate(gz);
    if !rep.is_valid() {
        return Err(Error::invalid(format!("Levi graph is invalid: {}", rep.violations.join("; "))));
    }
    let reps = rs.minimal_coset_reps(&p_sorted)?;
    let name = |y: &str, w: &crate::root_weyl::WeylElement| format!("{}@{}", y, w.label());
    let mut out = OrbitGraph::new(Some(rs.clone()));
    for w in &reps {
        for y in &gz.vertices {
            out.add_vertex(&name(&y.id, w), y.rank, y.dim + w.length());
        }
    }
    for w in &reps {
        for y in &gz.vertices {
            for alpha in 0..rs.rank {
                match rs.classify_beta(w, alpha, &p_sorted)? {
                    BetaCase::CaseA => {
                        let sw = rs.mul(&rs.simple_reflection(alpha), w);
                        out.add_edge(&name(&y.id, w), &name(&y.id, &sw), alpha, EdgeType::U);
                    }
                    BetaCase::CaseB { gamma, .. } => {
                        if let Some(e) = gz.edges.iter().find(|e| e.source == y.id && relabel[e.root] == gamma) {
                            out.add_edge(&name(&y.id, w), &name(&e.target, w), alpha, e.etype);
                        }
                    }
                    BetaCase::NoRaise => {}
                }
            }
        }
    }
    Ok(out)
}

/// Pairs `(Y3, Y2)` where `Y3` is not normal along `Y2`.
pub fn detect_nonnormal(g: &OrbitGraph) -> Vec<(String, String)> {
    let mut out = BTreeSet::new();
    for e1 in g.edges.iter().filter(|e| e.etype != EdgeType::N) {
        for e2 in g.edges.iter().filter(|e| e.etype == EdgeType::N && e.source == e1.source && e.root != e1.root) {
            for e3 in g.edges.iter().filter(|e| e.etype != EdgeType::N && e.source == e1.target && e.root == e2.root) {
                out.insert((e3.target.clone(), e2.target.clone()));
            }
        }
    }
    out.into_iter().collect()
}

/// No N-edge inside the full subgraph on the up-set of `v`.
pub fn multiplicity_free(g: &OrbitGraph, v: &str) -> Result<bool> {
    if g.vertex(v).is_none() {
        return Err(Error::unknown("vertex", v));
    }
    let up = g.up_set(v);
    Ok(!g.edges.iter().any(|e| e.etype == EdgeType::N && up.contains(&e.source) && up.contains(&e.target)))
}

/// Permutation of the vertices (as indices into `g.vertices`) induced by `s_α`.
pub fn knop_step(g: &OrbitGraph, alpha: usize) -> Result<Vec<usize>> {
    let idx = g.index();
    let n = g.vertices.len();
    let mut image: Vec<Option<usize>> = vec![None; n];
    let set = |image: &mut Vec<Option<usize>>, a: usize, b: usize| -> Result<()> {
        match image[a] {
            Some(x) if x != b => Err(Error::NotAlphaComplete(alpha + 1)),
            _ => {
                image[a] = Some(b);
                Ok(())
            }
        }
    };
    let edges: Vec<&OrbitEdge> = g.edges.iter().filter(|e| e.root == alpha).collect();
    let sources: BTreeSet<&str> = edges.iter().map(|e| e.source.as_str()).collect();
    for e in &edges {
        let (Some(&s), Some(&t)) = (idx.get(e.source.as_str()), idx.get(e.target.as_str())) else {
            return Err(Error::invalid(format!("edge {} -> {} has an unknown endpoint", e.source, e.target)));
        };
        if sources.contains(e.target.as_str()) {
            return Err(Error::NotAlphaComplete(alpha + 1));
        }
        let into_target: Vec<&&OrbitEdge> = edges.iter().filter(|f| f.target == e.target).collect();
        match e.etype {
            EdgeType::U => {
                if into_target.len() != 1 {
                    return Err(Error::NotAlphaComplete(alpha + 1));
                }
                set(&mut image, s, t)?;
                set(&mut image, t, s)?;
            }
            EdgeType::N => {
                if into_target.len() != 1 {
                    return Err(Error::NotAlphaComplete(alpha + 1));
                }
                set(&mut image, s, s)?;
                set(&mut image, t, t)?;
            }
            EdgeType::T => {
                if into_target.len() != 2 || into_target.iter().any(|f| f.etype != EdgeType::T) {
                    return Err(Error::NotAlphaComplete(alpha + 1));
                }
                let other = into_target.iter().find(|f| f.source != e.source).ok_or(Error::NotAlphaComplete(alpha + 1))?;
                set(&mut image, s, idx[other.source.as_str()])?;
                set(&mut image, t, t)?;
            }
        }
    }
    let perm: Vec<usize> = image.iter().enumerate().map(|(i, x)| x.unwrap_or(i)).collect();
    let mut check = perm.clone();
    check.sort();
    if check != (0..n).collect::<Vec<_>>() {
        return Err(Error::NotAlphaComplete(alpha + 1));
    }
    Ok(perm)
}

/// Composite permutation of a word `s_{a1} ⋯ s_{ak}` (rightmost applied first).
pub fn knop_word(g: &OrbitGraph, word: &[usize]) -> Result<Vec<usize>> {
    let n = g.vertices.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for &a in word.iter().rev() {
        let s = knop_step(g, a)?;
        perm = perm.iter().map(|&i| s[i]).collect();
    }
    Ok(perm)
}

/// Statistics of a raising chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStats {
    /// `[α_ℓ, …, α_1]`: the word of `s_{α_ℓ} ⋯ s_{α_1}` (0-based).
    pub word: Vec<usize>,
    pub reduced: bool,
    pub l_n: usize,
    pub l_t: usize,
    pub degree: BigInt,
    pub rank_delta: i64,
}

pub fn chain_stats(g: &OrbitGraph, path: &[usize]) -> Result<ChainStats> {
    let mut word = Vec::new();
    let (mut l_n, mut l_t) = (0, 0);
    for (k, &i) in path.iter().enumerate() {
        let e = g.edges.get(i).ok_or_else(|| Error::invalid(format!("edge index {i} out of range")))?;
        if k > 0 && g.edges[path[k - 1]].target != e.source {
            return Err(Error::DisconnectedPath(format!("edge {} does not start where edge {} ends", k + 1, k)));
        }
        word.push(e.root);
        match e.etype {
            EdgeType::N => l_n += 1,
            EdgeType::T => l_t += 1,
            EdgeType::U => {}
        }
    }
    word.reverse();
    let rank_delta = match (path.first(), path.last()) {
        (Some(&a), Some(&b)) => {
            let s = g.vertex(&g.edges[a].source).ok_or_else(|| Error::unknown("vertex", g.edges[a].source.clone()))?;
            let t = g.vertex(&g.edges[b].target).ok_or_else(|| Error::unknown("vertex", g.edges[b].target.clone()))?;
            t.rank as i64 - s.rank as i64
        }
        _ => 0,
    };
    let reduced = match &g.root_system {
        Some(rs) => rs.is_reduced(&word)?.0,
        None => word.is_empty(),
    };
    Ok(ChainStats { word, reduced, l_n, l_t, degree: BigInt::from(1) << l_n, rank_delta })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT rendering: nodes by (dim, id), N-edges doubled.
pub fn export_dot(g: &OrbitGraph) -> String {
    let mut order: Vec<&OrbitVertex> = g.vertices.iter().collect();
    order.sort_by(|a, b| (a.dim, &a.id).cmp(&(b.dim, &b.id)));
    let pos: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let mut edges: Vec<&OrbitEdge> = g.edges.iter().collect();
    edges.sort_by_key(|e| (pos.get(e.source.as_str()).copied(), pos.get(e.target.as_str()).copied(), e.root));
    let mut out = String::from("digraph G {\n  rankdir=BT;\n");
    for v in &order {
        let _ = writeln!(out, "  \"{}\" [label=\"{}\"];", dot_escape(&v.id), dot_escape(&v.id));
    }
    for e in edges {
        let style = if e.etype == EdgeType::N { ", color=\"black:invis:black\"" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"{}];",
            dot_escape(&e.source),
            dot_escape(&e.target),
            e.root + 1,
            style
        );
    }
    out.push_str("}\n");
    out
}
