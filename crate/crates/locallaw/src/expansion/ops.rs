//! The three graph rewriting operations: the tau split, the rho expansion,
//! and the diagonal-entry expansion into R-groups.

use super::{Edge, EdgeKind, ExpansionGraph, Position, Prefactor, VertexId};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Splits the first non-maximally-expanded G-edge via the minor-difference
/// identity, returning `(tau0, tau1)` with value(input) = value(tau0) +
/// value(tau1) pointwise in every index assignment.
///
/// In `tau0` the chosen entry gains one upper index (the smallest black
/// vertex outside its upper set and endpoints). In `tau1` the entry is
/// replaced by the compensating product: two off-diagonal entries and a
/// denominator loop for a numerator entry; two off-diagonal entries and
/// three denominator loops, with the sign flipped, for a denominator entry.
pub fn tau_split(graph: &ExpansionGraph) -> Result<(ExpansionGraph, ExpansionGraph)> {
    let idx = graph
        .first_unexpanded_g_edge()
        .ok_or_else(|| Error::NoOp("all G-edges are maximally expanded".into()))?;
    let edge = graph.edges()[idx].clone();
    let expand_at = (0..graph.n_black())
        .find(|v| *v != edge.source && *v != edge.target && !edge.colour.upper.contains(v))
        .expect("non-maximally-expanded edge admits an expansion vertex");

    let mut tau0 = graph.clone();
    tau0.edges[idx].colour.upper.insert(expand_at);

    let mut tau1 = graph.clone();
    tau1.remove_edge(idx);
    let kind = edge.colour.kind;
    let t = &edge.colour.upper;
    let (a, b, i) = (edge.source, edge.target, expand_at);
    match edge.colour.position {
        Position::Numerator => {
            tau1.push_edge(Edge::coloured(kind, a, i, Position::Numerator, t.clone()));
            tau1.push_edge(Edge::coloured(kind, i, b, Position::Numerator, t.clone()));
            tau1.push_edge(Edge::coloured(kind, i, i, Position::Denominator, t.clone()));
        }
        Position::Denominator => {
            debug_assert_eq!(a, b);
            let mut t_i = t.clone();
            t_i.insert(i);
            tau1.push_edge(Edge::coloured(kind, a, i, Position::Numerator, t.clone()));
            tau1.push_edge(Edge::coloured(kind, i, a, Position::Numerator, t.clone()));
            tau1.push_edge(Edge::coloured(kind, a, a, Position::Denominator, t.clone()));
            tau1.push_edge(Edge::coloured(kind, a, a, Position::Denominator, t_i));
            tau1.push_edge(Edge::coloured(kind, i, i, Position::Denominator, t.clone()));
            tau1.prefactor = tau1.prefactor.negate();
        }
    }
    Ok((tau0, tau1))
}

/// Replaces every maximally expanded off-diagonal G-edge by the product of
/// a (not maximally expanded) diagonal entry at the source, a maximally
/// expanded diagonal entry at the target, and an off-diagonal R-group with
/// two fresh white vertices; the prefactor gains one power of the rescaled
/// spectral parameter (conjugated for G*-edges). White-summed values are
/// preserved. Graphs without such edges are returned unchanged.
pub fn rho_expand(graph: &ExpansionGraph) -> ExpansionGraph {
    let targets: Vec<usize> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.colour.kind.is_g() && !e.is_loop() && graph.is_maximally_expanded(e))
        .map(|(i, _)| i)
        .collect();
    if targets.is_empty() {
        return graph.clone();
    }
    let mut out = ExpansionGraph {
        n_black: graph.n_black(),
        n_white: graph.n_white(),
        edges: Vec::with_capacity(graph.edges().len() + 4 * targets.len()),
        prefactor: graph.prefactor,
    };
    for (i, e) in graph.edges().iter().enumerate() {
        if !targets.contains(&i) {
            out.push_edge(e.clone());
        }
    }
    for &i in &targets {
        let e = &graph.edges()[i];
        let (a, b) = (e.source, e.target);
        let kind = e.colour.kind;
        let conj = kind.conjugated();
        // diagonal entry at the source, upper set V_b \ {a, b}
        out.push_edge(Edge::coloured(kind, a, a, Position::Numerator, e.colour.upper.clone()));
        // maximally expanded diagonal entry at the target
        let mut upper_b: BTreeSet<VertexId> = (0..graph.n_black()).collect();
        upper_b.remove(&b);
        out.push_edge(Edge::coloured(kind, b, b, Position::Numerator, upper_b));
        push_r_group(&mut out, a, b, conj);
        out.prefactor = out.prefactor.mul_z_tilde(conj, 1);
    }
    out
}

fn push_r_group(graph: &mut ExpansionGraph, a: VertexId, b: VertexId, conj: bool) {
    let w1 = graph.fresh_white();
    let w2 = graph.fresh_white();
    let r_kind = if conj { EdgeKind::RStar } else { EdgeKind::R };
    graph.push_edge(Edge::coloured(EdgeKind::X, a, w1, Position::Numerator, BTreeSet::new()));
    graph.push_edge(Edge::coloured(r_kind, w1, w2, Position::Numerator, BTreeSet::new()));
    graph.push_edge(Edge::coloured(EdgeKind::XStar, w2, b, Position::Numerator, BTreeSet::new()));
}

/// Output of [`expand_diagonal`]: the expanded terms and the exact
/// geometric-series remainder terms. The input's value equals the sum of
/// the values of every graph in `main` and `remainder`.
#[derive(Debug)]
pub struct DiagonalExpansion {
    pub main: Vec<ExpansionGraph>,
    pub remainder: Vec<ExpansionGraph>,
}

impl DiagonalExpansion {
    pub fn all(&self) -> impl Iterator<Item = &ExpansionGraph> {
        self.main.iter().chain(self.remainder.iter())
    }
}

/// One alternative for a single diagonal G-entry.
pub(crate) struct Alternative {
    pub(crate) pref: Prefactor,
    /// number of diagonal R-groups to attach at the entry's vertex
    pub(crate) groups: usize,
    /// keep the original (maximally expanded diagonal) G-edge as a factor
    pub(crate) keep_edge: bool,
    pub(crate) remainder: bool,
}

/// Validates the operation-(c) precondition and produces the per-edge
/// alternatives of the expansion.
pub(crate) fn diagonal_alternatives(
    graph: &ExpansionGraph,
    ell: usize,
) -> Result<Vec<(usize, Vec<Alternative>)>> {
    if ell == 0 {
        return Err(Error::invalid("expansion order ell must be at least 1"));
    }
    let mut per_edge = Vec::new();
    for (i, e) in graph.edges().iter().enumerate() {
        if !e.colour.kind.is_g() {
            continue;
        }
        if !e.is_loop() || !graph.is_maximally_expanded(e) {
            return Err(Error::Precondition(format!(
                "edge {i} is not a maximally expanded diagonal G-entry"
            )));
        }
        let conj = e.colour.kind.conjugated();
        let mut alts = Vec::new();
        match e.colour.position {
            Position::Denominator => {
                // 1/G^ = (-zt) + (-zt) * sandwich
                alts.push(Alternative {
                    pref: Prefactor::one().mul_z_tilde(conj, 1).negate(),
                    groups: 0,
                    keep_edge: false,
                    remainder: false,
                });
                alts.push(Alternative {
                    pref: Prefactor::one().mul_z_tilde(conj, 1).negate(),
                    groups: 1,
                    keep_edge: false,
                    remainder: false,
                });
            }
            Position::Numerator => {
                // main terms mt (mt E)^k for k < ell, E expanded into its
                // three monomials: zt*sandwich, zt, 1/mt.
                for k in 0..ell {
                    for choice in 0..3usize.pow(k as u32) {
                        alts.push(series_term(conj, k, choice, false));
                    }
                }
                // remainder (mt E)^ell G^
                for choice in 0..3usize.pow(ell as u32) {
                    alts.push(series_term(conj, ell, choice, true));
                }
            }
        }
        per_edge.push((i, alts));
    }
    Ok(per_edge)
}

/// The input graph with its G-edges removed (R-groups and prefactor kept).
pub(crate) fn strip_g_edges(graph: &ExpansionGraph) -> ExpansionGraph {
    let mut base = ExpansionGraph {
        n_black: graph.n_black(),
        n_white: graph.n_white(),
        edges: Vec::new(),
        prefactor: graph.prefactor,
    };
    for e in graph.edges() {
        if !e.colour.kind.is_g() {
            base.push_edge(e.clone());
        }
    }
    base
}

/// Expands every maximally expanded diagonal G-entry into diagonal
/// R-groups.
///
/// Denominator entries follow the exact two-term identity
/// `1/G^ = -zt - zt (X R^{(a_b)} X*)_aa`. Numerator entries follow the
/// finite geometric series
/// `G^ = mt sum_{k<ell} (mt E)^k + (mt E)^ell G^`, where
/// `E = zt (X R^{(a_b)} X*)_aa + zt + 1/mt` (an exact consequence of the
/// defining equation of the transform), expanded multiplicatively so each
/// output graph keeps a pure monomial prefactor. The series remainder is
/// returned as explicit graphs carrying one unexpanded G-edge, so the sum
/// of all outputs reproduces the input exactly.
pub fn expand_diagonal(graph: &ExpansionGraph, ell: usize) -> Result<DiagonalExpansion> {
    let per_edge = diagonal_alternatives(graph, ell)?;
    let term_count = per_edge
        .iter()
        .try_fold(1u64, |acc, (_, alts)| acc.checked_mul(alts.len() as u64))
        .unwrap_or(u64::MAX);
    if term_count > 250_000 {
        return Err(Error::Resource(format!(
            "diagonal expansion would materialize {term_count} graphs; use the factorized \
             evaluator for graphs of this size"
        )));
    }
    let base = strip_g_edges(graph);

    // Cartesian product of the alternatives.
    let mut main = Vec::new();
    let mut remainder = Vec::new();
    let mut picks = vec![0usize; per_edge.len()];
    loop {
        let mut term = base.clone();
        let mut is_remainder = false;
        for (slot, &(edge_idx, ref alts)) in per_edge.iter().enumerate() {
            let alt = &alts[picks[slot]];
            let e = &graph.edges()[edge_idx];
            term.prefactor = term.prefactor.product(&alt.pref);
            for _ in 0..alt.groups {
                push_r_group(&mut term, e.source, e.source, e.colour.kind.conjugated());
            }
            if alt.keep_edge {
                term.push_edge(e.clone());
            }
            is_remainder |= alt.remainder;
        }
        if is_remainder {
            remainder.push(term);
        } else {
            main.push(term);
        }
        // advance the multi-index
        let mut slot = 0;
        loop {
            if slot == picks.len() {
                return Ok(DiagonalExpansion { main, remainder });
            }
            picks[slot] += 1;
            if picks[slot] < per_edge[slot].1.len() {
                break;
            }
            picks[slot] = 0;
            slot += 1;
        }
    }
}

/// The term mt (mt E)^k (or the remainder (mt E)^ell times the kept edge)
/// with the factor choice encoded in base 3: digit 0 picks the sandwich
/// monomial zt * (X R X*)_aa, digit 1 the constant zt, digit 2 the
/// constant 1/mt.
fn series_term(conj: bool, k: usize, mut choice: usize, remainder: bool) -> Alternative {
    let mut pref = Prefactor::one().mul_m_tilde(conj, k as i32 + if remainder { 0 } else { 1 });
    let mut groups = 0usize;
    for _ in 0..k {
        match choice % 3 {
            0 => {
                pref = pref.mul_z_tilde(conj, 1);
                groups += 1;
            }
            1 => {
                pref = pref.mul_z_tilde(conj, 1);
            }
            _ => {
                pref = pref.mul_m_tilde(conj, -1);
            }
        }
        choice /= 3;
    }
    Alternative { pref, groups, keep_edge: remainder, remainder }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{build_delta, enumerate_partitions};

    fn three_vertex_edge() -> ExpansionGraph {
        // one off-diagonal G-edge 0 -> 1 with a third black vertex present
        let mut g = ExpansionGraph::new(3);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 1, Position::Numerator, BTreeSet::new()));
        g
    }

    #[test]
    fn tau_on_off_diagonal_edge() {
        let g = three_vertex_edge();
        let (t0, t1) = tau_split(&g).unwrap();
        // tau0 adds the index of the extra vertex
        assert_eq!(t0.edges().len(), 1);
        assert_eq!(t0.edges()[0].colour.upper, BTreeSet::from([2]));
        // tau1 has three edges including one denominator loop
        assert_eq!(t1.edges().len(), 3);
        let dens: Vec<_> = t1
            .edges()
            .iter()
            .filter(|e| e.colour.position == Position::Denominator)
            .collect();
        assert_eq!(dens.len(), 1);
        assert!(dens[0].is_loop());
        assert!(!t1.prefactor.negative);
        t0.assert_structural().unwrap();
        t1.assert_structural().unwrap();
        // d-monotonicity
        assert_eq!(t0.d(), g.d());
        assert!(t1.d() > g.d());
    }

    #[test]
    fn tau_on_denominator_loop_tracks_sign() {
        let mut g = ExpansionGraph::new(2);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 0, Position::Denominator, BTreeSet::new()));
        let (t0, t1) = tau_split(&g).unwrap();
        assert_eq!(t0.edges()[0].colour.upper, BTreeSet::from([1]));
        assert_eq!(t1.edges().len(), 5);
        assert!(t1.prefactor.negative, "the compensating product carries a minus sign");
        assert_eq!(t1.d(), g.d() + 2);
        t1.assert_structural().unwrap();
    }

    #[test]
    fn tau_noop_when_fully_expanded() {
        let parts = enumerate_partitions(2).unwrap();
        let paired = parts.iter().find(|p| p.blocks().len() == 2).unwrap();
        let delta = build_delta(paired).unwrap();
        assert!(delta.all_g_edges_maximally_expanded());
        assert!(matches!(tau_split(&delta), Err(Error::NoOp(_))));
    }

    #[test]
    fn rho_replaces_maximally_expanded_edges() {
        let mut g = ExpansionGraph::new(2);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 1, Position::Numerator, BTreeSet::new()));
        assert!(g.is_maximally_expanded(&g.edges()[0]));
        let r = rho_expand(&g);
        r.assert_structural().unwrap();
        assert_eq!(r.n_white(), 2);
        assert_eq!(r.edges().len(), 5);
        assert_eq!(r.prefactor.z_tilde, 1);
        // structure: non-max-expanded diagonal at 0, max-expanded at 1
        let d0 = &r.edges()[0];
        assert!(d0.is_loop() && d0.source == 0 && !r.is_maximally_expanded(d0));
        let d1 = &r.edges()[1];
        assert!(d1.is_loop() && d1.source == 1 && r.is_maximally_expanded(d1));
        let groups = r.r_groups().unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!((groups[0].a, groups[0].b), (0, 1));
        assert!(!groups[0].is_diagonal());
        // d preserved
        assert_eq!(r.d(), g.d());
        // identity on graphs without such edges
        let mut plain = ExpansionGraph::new(3);
        plain.push_edge(Edge::coloured(EdgeKind::G, 0, 1, Position::Numerator, BTreeSet::new()));
        assert_eq!(rho_expand(&plain), plain);
    }

    #[test]
    fn rho_conjugated_edge_uses_conjugated_parameter() {
        let mut g = ExpansionGraph::new(2);
        g.push_edge(Edge::coloured(EdgeKind::GStar, 1, 0, Position::Numerator, BTreeSet::new()));
        let r = rho_expand(&g);
        assert_eq!(r.prefactor.z_tilde_conj, 1);
        assert!(r.r_groups().unwrap()[0].conjugated);
    }

    #[test]
    fn expand_diagonal_shapes() {
        // one denominator loop: exactly two output graphs, both with -zt.
        let mut g = ExpansionGraph::new(2);
        let mut upper = BTreeSet::new();
        upper.insert(1);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 0, Position::Denominator, upper.clone()));
        let out = expand_diagonal(&g, 2).unwrap();
        assert_eq!(out.main.len(), 2);
        assert_eq!(out.remainder.len(), 0);
        assert!(out.main.iter().all(|t| t.prefactor.negative && t.prefactor.z_tilde == 1));
        assert_eq!(out.main[0].r_groups().unwrap().len(), 0);
        assert_eq!(out.main[1].r_groups().unwrap().len(), 1);
        assert!(out.main[1].r_groups().unwrap()[0].is_diagonal());

        // numerator loop with ell = 1: mt term plus three remainder terms.
        let mut g = ExpansionGraph::new(2);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 0, Position::Numerator, upper.clone()));
        let out = expand_diagonal(&g, 1).unwrap();
        assert_eq!(out.main.len(), 1);
        assert_eq!(out.main[0].prefactor.m_tilde, 1);
        assert_eq!(out.remainder.len(), 3);
        assert!(out.remainder.iter().all(|t| t.g_edge_count() == 1));

        // non-maximally-expanded entry rejected
        let mut g = ExpansionGraph::new(3);
        g.push_edge(Edge::coloured(EdgeKind::G, 0, 0, Position::Numerator, BTreeSet::new()));
        assert!(expand_diagonal(&g, 1).is_err());
    }

    #[test]
    fn parity_of_black_degrees_invariant() {
        let g = three_vertex_edge();
        let parities = |g: &ExpansionGraph| -> Vec<usize> {
            (0..g.n_black()).map(|v| g.degree(v) % 2).collect()
        };
        let base = parities(&g);
        let (t0, t1) = tau_split(&g).unwrap();
        assert_eq!(parities(&t0), base);
        assert_eq!(parities(&t1), base);
        let mut h = ExpansionGraph::new(2);
        h.push_edge(Edge::coloured(EdgeKind::G, 0, 1, Position::Numerator, BTreeSet::new()));
        let base = parities(&h);
        assert_eq!(parities(&rho_expand(&h)), base);
    }
}
