//! Symbolic engine for the graph-expansion calculus.
//!
//! A product of resolvent entries is encoded as a directed, edge-coloured
//! multigraph over black vertices (population indices, always pairwise
//! distinct) and white vertices (sample indices, always summed over). Three
//! rewriting operations expand the product into monomials in the entries of
//! `X` and fully-removed minors `R^{(a_b)}`:
//!
//! * [`tau_split`] applies the minor-difference identity to the first
//!   non-maximally-expanded G-edge, producing two graphs whose encoded
//!   values sum to the input's exactly;
//! * [`rho_expand`] replaces every maximally expanded off-diagonal G-edge
//!   by a pair of diagonal G-edges and an off-diagonal R-group, preserving
//!   the white-summed value;
//! * [`expand_diagonal`] rewrites maximally expanded diagonal entries into
//!   diagonal R-groups through the exact finite geometric series, keeping
//!   the series remainder as explicit graphs so no truncation error enters.
//!
//! [`build_tree`] drives tau and rho in tandem until the stopping rule
//! fires, and [`verify_leaf_sum`] checks the resulting leaf decomposition
//! numerically against a directly evaluated root on a concrete sample.
//!
//! Unlike the bounded-coefficient convention used in pen-and-paper
//! arguments, prefactors (sign and integer powers of the rescaled spectral
//! parameter and transform) are tracked exactly, so every rewriting step is
//! a verifiable identity.

mod eval;
mod ops;
mod tree;

pub use eval::{
    vertex_weight, DiagonalExpansionValue, GraphEvaluator, IndexAssignment, LeafSumReport,
    WhiteSummation,
};
pub use ops::{expand_diagonal, rho_expand, tau_split, DiagonalExpansion};
pub use tree::{build_tree, verify_leaf_sum, verify_node_additivity, ExpansionTree, LeafClass, TreeNode};

use crate::error::{Error, Result};
use crate::laws::C64;
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub type VertexId = usize;

/// First colour component: which matrix entry the edge encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    G,
    GStar,
    R,
    RStar,
    X,
    XStar,
}

impl EdgeKind {
    pub fn is_g(&self) -> bool {
        matches!(self, EdgeKind::G | EdgeKind::GStar)
    }

    pub fn is_r(&self) -> bool {
        matches!(self, EdgeKind::R | EdgeKind::RStar)
    }

    pub fn is_x(&self) -> bool {
        matches!(self, EdgeKind::X | EdgeKind::XStar)
    }

    pub fn conjugated(&self) -> bool {
        matches!(self, EdgeKind::GStar | EdgeKind::RStar | EdgeKind::XStar)
    }

    fn token(&self) -> &'static str {
        match self {
            EdgeKind::G => "G",
            EdgeKind::GStar => "G*",
            EdgeKind::R => "R",
            EdgeKind::RStar => "R*",
            EdgeKind::X => "X",
            EdgeKind::XStar => "X*",
        }
    }
}

/// Second colour component: numerator or denominator entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Numerator,
    Denominator,
}

/// Edge colour triple (kind, position, upper-index set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColour {
    pub kind: EdgeKind,
    pub position: Position,
    /// Upper indices as black vertex ids; meaningful for G-edges only
    /// (R-entries implicitly carry the full black set, X-entries none).
    pub upper: BTreeSet<VertexId>,
}

/// A directed coloured edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: VertexId,
    pub target: VertexId,
    pub colour: EdgeColour,
}

impl Edge {
    pub(crate) fn coloured(
        kind: EdgeKind,
        source: VertexId,
        target: VertexId,
        position: Position,
        upper: BTreeSet<VertexId>,
    ) -> Edge {
        Edge { source, target, colour: EdgeColour { kind, position, upper } }
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// Exact scalar prefactor: sign * zt^a * conj(zt)^b * mt^c * conj(mt)^d,
/// where zt is the rescaled spectral parameter and mt the rescaled
/// transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prefactor {
    pub negative: bool,
    pub z_tilde: i32,
    pub z_tilde_conj: i32,
    pub m_tilde: i32,
    pub m_tilde_conj: i32,
}

impl Prefactor {
    pub fn one() -> Prefactor {
        Prefactor { negative: false, z_tilde: 0, z_tilde_conj: 0, m_tilde: 0, m_tilde_conj: 0 }
    }

    pub fn negate(mut self) -> Prefactor {
        self.negative = !self.negative;
        self
    }

    pub fn mul_z_tilde(mut self, conj: bool, pow: i32) -> Prefactor {
        if conj {
            self.z_tilde_conj += pow;
        } else {
            self.z_tilde += pow;
        }
        self
    }

    pub fn mul_m_tilde(mut self, conj: bool, pow: i32) -> Prefactor {
        if conj {
            self.m_tilde_conj += pow;
        } else {
            self.m_tilde += pow;
        }
        self
    }

    pub fn product(&self, other: &Prefactor) -> Prefactor {
        Prefactor {
            negative: self.negative ^ other.negative,
            z_tilde: self.z_tilde + other.z_tilde,
            z_tilde_conj: self.z_tilde_conj + other.z_tilde_conj,
            m_tilde: self.m_tilde + other.m_tilde,
            m_tilde_conj: self.m_tilde_conj + other.m_tilde_conj,
        }
    }

    /// Numerical value given zt and mt.
    pub fn value(&self, z_tilde: C64, m_tilde: C64) -> C64 {
        let sign = if self.negative { -1.0 } else { 1.0 };
        sign * z_tilde.powi(self.z_tilde)
            * z_tilde.conj().powi(self.z_tilde_conj)
            * m_tilde.powi(self.m_tilde)
            * m_tilde.conj().powi(self.m_tilde_conj)
    }
}

/// An R-group: the chain X -> R -> X* through two white vertices.
/// `a` and `b` are the outer black endpoints.
#[derive(Debug, Clone, Copy)]
pub struct RGroup {
    pub x_in: usize,
    pub centre: usize,
    pub x_out: usize,
    pub a: VertexId,
    pub b: VertexId,
    pub conjugated: bool,
}

impl RGroup {
    pub fn is_diagonal(&self) -> bool {
        self.a == self.b
    }
}

/// Edge-coloured multigraph with fixed black vertices `0..n_black` and
/// growable white vertices `n_black..n_black+n_white`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionGraph {
    n_black: usize,
    n_white: usize,
    edges: Vec<Edge>,
    pub prefactor: Prefactor,
}

impl ExpansionGraph {
    pub fn new(n_black: usize) -> ExpansionGraph {
        ExpansionGraph { n_black, n_white: 0, edges: Vec::new(), prefactor: Prefactor::one() }
    }

    pub fn n_black(&self) -> usize {
        self.n_black
    }

    pub fn n_white(&self) -> usize {
        self.n_white
    }

    pub fn n_vertices(&self) -> usize {
        self.n_black + self.n_white
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_black(&self, v: VertexId) -> bool {
        v < self.n_black
    }

    pub(crate) fn push_edge(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub(crate) fn remove_edge(&mut self, idx: usize) -> Edge {
        self.edges.remove(idx)
    }

    pub(crate) fn fresh_white(&mut self) -> VertexId {
        let id = self.n_black + self.n_white;
        self.n_white += 1;
        id
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.source == v) + usize::from(e.target == v))
            .sum()
    }

    /// A G-edge is maximally expanded when its upper set holds every other
    /// black vertex.
    pub fn is_maximally_expanded(&self, e: &Edge) -> bool {
        debug_assert!(e.colour.kind.is_g());
        let mut want: BTreeSet<VertexId> = (0..self.n_black).collect();
        want.remove(&e.source);
        want.remove(&e.target);
        e.colour.upper == want
    }

    /// Index of the first G-edge that is not maximally expanded.
    pub fn first_unexpanded_g_edge(&self) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.colour.kind.is_g() && !self.is_maximally_expanded(e))
    }

    pub fn all_g_edges_maximally_expanded(&self) -> bool {
        self.first_unexpanded_g_edge().is_none()
    }

    pub fn g_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.colour.kind.is_g()).count()
    }

    /// The R-groups of the graph. Fails if an X- or R-edge is not part of a
    /// well-formed group (property vii).
    pub fn r_groups(&self) -> Result<Vec<RGroup>> {
        let mut groups = Vec::new();
        let mut used = vec![false; self.edges.len()];
        for (ci, centre) in self.edges.iter().enumerate() {
            if !centre.colour.kind.is_r() {
                continue;
            }
            let w1 = centre.source;
            let w2 = centre.target;
            let x_in = self
                .edges
                .iter()
                .position(|e| e.colour.kind == EdgeKind::X && e.target == w1)
                .ok_or_else(|| Error::Structure(format!("R-edge {ci} has no incoming X-edge")))?;
            let x_out = self
                .edges
                .iter()
                .position(|e| e.colour.kind == EdgeKind::XStar && e.source == w2)
                .ok_or_else(|| Error::Structure(format!("R-edge {ci} has no outgoing X*-edge")))?;
            if self.degree(w1) != 2 || self.degree(w2) != 2 {
                return Err(Error::Structure(format!(
                    "white vertices of R-edge {ci} must have degree two"
                )));
            }
            used[ci] = true;
            used[x_in] = true;
            used[x_out] = true;
            groups.push(RGroup {
                x_in,
                centre: ci,
                x_out,
                a: self.edges[x_in].source,
                b: self.edges[x_out].target,
                conjugated: centre.colour.kind == EdgeKind::RStar,
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            if (e.colour.kind.is_x() || e.colour.kind.is_r()) && !used[i] {
                return Err(Error::Structure(format!(
                    "edge {i} ({}) does not belong to any R-group",
                    e.colour.kind.token()
                )));
            }
        }
        Ok(groups)
    }

    /// d(Gamma): off-diagonal G-edges plus off-diagonal R-groups.
    pub fn d(&self) -> usize {
        let g_off = self
            .edges
            .iter()
            .filter(|e| e.colour.kind.is_g() && !e.is_loop())
            .count();
        let r_off = self
            .r_groups()
            .map(|gs| gs.iter().filter(|g| !g.is_diagonal()).count())
            .unwrap_or(0);
        g_off + r_off
    }

    /// Checks the structural properties (i)-(vii).
    pub fn assert_structural(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            let (sb, tb) = (self.is_black(e.source), self.is_black(e.target));
            if e.source >= self.n_vertices() || e.target >= self.n_vertices() {
                return Err(Error::Structure(format!("edge {i}: vertex out of range")));
            }
            match e.colour.kind {
                EdgeKind::G | EdgeKind::GStar => {
                    if !sb || !tb {
                        return Err(Error::Structure(format!(
                            "edge {i}: G-edge must join black vertices"
                        )));
                    }
                }
                EdgeKind::R | EdgeKind::RStar => {
                    if sb || tb {
                        return Err(Error::Structure(format!(
                            "edge {i}: R-edge must join white vertices"
                        )));
                    }
                }
                EdgeKind::X => {
                    if !sb || tb {
                        return Err(Error::Structure(format!(
                            "edge {i}: X-edge must run black -> white"
                        )));
                    }
                }
                EdgeKind::XStar => {
                    if sb || !tb {
                        return Err(Error::Structure(format!(
                            "edge {i}: X*-edge must run white -> black"
                        )));
                    }
                }
            }
            if e.colour.position == Position::Denominator && !(e.colour.kind.is_g() && e.is_loop()) {
                return Err(Error::Structure(format!(
                    "edge {i}: only diagonal G-entries may sit in the denominator"
                )));
            }
            if !e.colour.upper.is_empty() {
                if !e.colour.kind.is_g() {
                    return Err(Error::Structure(format!(
                        "edge {i}: only G-edges carry upper indices"
                    )));
                }
                if e.colour.upper.contains(&e.source) || e.colour.upper.contains(&e.target) {
                    return Err(Error::Structure(format!(
                        "edge {i}: upper indices must avoid the edge's endpoints"
                    )));
                }
                if e.colour.upper.iter().any(|v| !self.is_black(*v)) {
                    return Err(Error::Structure(format!(
                        "edge {i}: upper indices must be black"
                    )));
                }
            }
        }
        self.r_groups()?;
        Ok(())
    }

    /// Documented text serialization for debugging and golden tests.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "expansion-graph v1");
        let _ = writeln!(out, "black {}", self.n_black);
        let _ = writeln!(out, "white {}", self.n_white);
        let p = &self.prefactor;
        let _ = writeln!(
            out,
            "prefactor {} zt^{} ztc^{} mt^{} mtc^{}",
            if p.negative { '-' } else { '+' },
            p.z_tilde,
            p.z_tilde_conj,
            p.m_tilde,
            p.m_tilde_conj
        );
        for (i, e) in self.edges.iter().enumerate() {
            let pos = match e.colour.position {
                Position::Numerator => "num",
                Position::Denominator => "den",
            };
            let upper: Vec<String> = e.colour.upper.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                out,
                "edge {i}: {} {} {}->{} upper {{{}}}",
                e.colour.kind.token(),
                pos,
                e.source,
                e.target,
                upper.join(",")
            );
        }
        out.push_str("end\n");
        out
    }
}

/// A partition of `{1..p} x {1,2}` in which `(k,1)` and `(k,2)` always lie
/// in distinct blocks. Blocks are kept sorted, ordered by smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPartition {
    p: usize,
    blocks: Vec<Vec<(usize, u8)>>,
}

impl PairPartition {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<(usize, u8)>] {
        &self.blocks
    }

    /// Builds the partition from raw blocks; validates the separation
    /// constraint and the disjoint cover of `{1..p} x {1,2}`.
    pub fn new(p: usize, mut blocks: Vec<Vec<(usize, u8)>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for block in &mut blocks {
            block.sort();
            for &(k, r) in block.iter() {
                if k == 0 || k > p || !(r == 1 || r == 2) {
                    return Err(Error::invalid(format!("element ({k},{r}) out of range")));
                }
                if !seen.insert((k, r)) {
                    return Err(Error::invalid(format!("element ({k},{r}) appears twice")));
                }
            }
            for k in 1..=p {
                if block.contains(&(k, 1)) && block.contains(&(k, 2)) {
                    return Err(Error::invalid(format!(
                        "block joins ({k},1) and ({k},2), which must stay separated"
                    )));
                }
            }
        }
        if seen.len() != 2 * p {
            return Err(Error::invalid("blocks do not cover {1..p} x {1,2}"));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(PairPartition { p, blocks })
    }

    fn block_of(&self, element: (usize, u8)) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&element))
            .expect("element covered by construction")
    }
}

/// All partitions of `{1..p} x {1,2}` separating each `(k,1)` from `(k,2)`.
/// Desk-scale cap: `1 <= p <= 4`.
pub fn enumerate_partitions(p: usize) -> Result<Vec<PairPartition>> {
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    if p > 4 {
        return Err(Error::Resource(format!("p = {p} above the desk-scale cap 4")));
    }
    let elements: Vec<(usize, u8)> = (1..=p).flat_map(|k| [(k, 1u8), (k, 2u8)]).collect();
    let n = elements.len();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    // restricted growth strings over the fixed element order
    fn rec(
        idx: usize,
        max_used: usize,
        assignment: &mut Vec<usize>,
        elements: &[(usize, u8)],
        out: &mut Vec<PairPartition>,
        p: usize,
    ) {
        if idx == elements.len() {
            let mut blocks: Vec<Vec<(usize, u8)>> = vec![Vec::new(); max_used];
            for (i, &b) in assignment.iter().enumerate() {
                blocks[b].push(elements[i]);
            }
            out.push(PairPartition::new(p, blocks).expect("valid by construction"));
            return;
        }
        let (_, r) = elements[idx];
        for b in 0..=max_used {
            if r == 2 && b == assignment[idx - 1] {
                // (k,2) may not join (k,1), which directly precedes it
                continue;
            }
            assignment[idx] = b;
            rec(idx + 1, max_used.max(b + 1), assignment, elements, out, p);
        }
    }
    rec(0, 0, &mut assignment, &elements, &mut out, p);
    Ok(out)
}

/// The root graph Delta(P): one black vertex per block, one G-edge for each
/// of the first half of the factors and one G*-edge for the rest, running
/// from the block holding `(k,1)` to the block holding `(k,2)`.
pub fn build_delta(partition: &PairPartition) -> Result<ExpansionGraph> {
    let p = partition.p();
    let mut graph = ExpansionGraph::new(partition.blocks().len());
    for k in 1..=p {
        let kind = if k <= p.div_ceil(2) { EdgeKind::G } else { EdgeKind::GStar };
        let source = partition.block_of((k, 1));
        let target = partition.block_of((k, 2));
        if source == target {
            return Err(Error::invalid("partition would create a loop in Delta"));
        }
        graph.push_edge(Edge::coloured(kind, source, target, Position::Numerator, BTreeSet::new()));
    }
    graph.assert_structural()?;
    Ok(graph)
}
