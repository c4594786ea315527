//! Numerical evaluation of encoded monomials on a concrete sample.

use super::{ExpansionGraph, Position, VertexId};
use crate::error::{Error, Result};
use crate::laws::{mp_stieltjes_dual, C64, SpectralPoint};
use crate::resolvent::{MinorSpec, MinorSystem};
use std::collections::BTreeSet;

/// Injective assignment of black vertices to population row indices.
#[derive(Debug, Clone)]
pub struct IndexAssignment {
    rows: Vec<usize>,
}

impl IndexAssignment {
    pub fn new(rows: Vec<usize>, m: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &r in &rows {
            if r >= m {
                return Err(Error::invalid(format!("row index {r} out of range 0..{m}")));
            }
            if !seen.insert(r) {
                return Err(Error::invalid("black-vertex indices must be injective"));
            }
        }
        Ok(IndexAssignment { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, v: VertexId) -> usize {
        self.rows[v]
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }
}

/// How white-index sums are carried out: as matrix sandwiches through the
/// minor decomposition, or as brute-force double sums over the entries
/// (cross-validation route for tiny N).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhiteSummation {
    Sandwich,
    RawSum,
}

/// Evaluator of expansion graphs at a fixed spectral parameter over a fixed
/// sampled matrix.
pub struct GraphEvaluator<'a> {
    sys: &'a MinorSystem,
    z: C64,
    phi: f64,
    z_tilde: C64,
    m_tilde: C64,
    mode: WhiteSummation,
}

impl<'a> GraphEvaluator<'a> {
    pub fn new(sys: &'a MinorSystem, z: C64, mode: WhiteSummation) -> Result<Self> {
        let phi = sys.m() as f64 / sys.n() as f64;
        let sp = SpectralPoint::from_complex(z)?;
        let m_tilde = phi.sqrt() * mp_stieltjes_dual(&sp, phi)?;
        Ok(GraphEvaluator { sys, z, phi, z_tilde: z / phi.sqrt(), m_tilde, mode })
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn z_tilde(&self) -> C64 {
        self.z_tilde
    }

    pub fn m_tilde(&self) -> C64 {
        self.m_tilde
    }

    /// Value of the monomial encoded by `graph` under `assignment`, white
    /// indices summed over the full sample range.
    pub fn evaluate(&self, graph: &ExpansionGraph, assignment: &IndexAssignment) -> Result<C64> {
        if assignment.len() != graph.n_black() {
            return Err(Error::invalid(format!(
                "assignment covers {} vertices, graph has {} black vertices",
                assignment.len(),
                graph.n_black()
            )));
        }
        let mut value = graph.prefactor.value(self.z_tilde, self.m_tilde);

        // G-edges evaluate to rescaled minor-resolvent entries.
        let scale = self.phi.sqrt();
        for e in graph.edges() {
            if !e.colour.kind.is_g() {
                continue;
            }
            let removed: Vec<usize> = e.colour.upper.iter().map(|&v| assignment.row(v)).collect();
            let minor = self.sys.resolvent(&MinorSpec::rows(removed))?;
            let (i, j) = (assignment.row(e.source), assignment.row(e.target));
            let raw = if e.colour.kind.conjugated() {
                minor.g.resolvent_entry(self.z, j, i).conj()
            } else {
                minor.g.resolvent_entry(self.z, i, j)
            };
            let entry = scale * raw;
            value *= match e.colour.position {
                Position::Numerator => entry,
                Position::Denominator => {
                    if entry.norm() == 0.0 {
                        return Err(Error::Singular("denominator entry vanished".into()));
                    }
                    1.0 / entry
                }
            };
        }

        // R-groups evaluate to sandwiches through the fully removed minor.
        let groups = graph.r_groups()?;
        if !groups.is_empty() {
            let all_rows = MinorSpec::rows(assignment.rows().iter().copied());
            let minor = self.sys.resolvent(&all_rows)?;
            for group in groups {
                let (a, b) = (assignment.row(group.a), assignment.row(group.b));
                let sandwich = match self.mode {
                    WhiteSummation::Sandwich => {
                        if group.conjugated {
                            minor.sandwich_r(self.sys.x(), self.z, b, a).conj()
                        } else {
                            minor.sandwich_r(self.sys.x(), self.z, a, b)
                        }
                    }
                    WhiteSummation::RawSum => {
                        let x = self.sys.x();
                        let n = self.sys.n();
                        let mut acc = C64::new(0.0, 0.0);
                        for mu in 0..n {
                            for nu in 0..n {
                                let r = if group.conjugated {
                                    minor.r.resolvent_entry(self.z, nu, mu).conj()
                                } else {
                                    minor.r.resolvent_entry(self.z, mu, nu)
                                };
                                acc += x.get(a, mu) * r * x.get(b, nu).conj();
                            }
                        }
                        acc
                    }
                };
                value *= sandwich;
            }
        }
        Ok(value)
    }

    /// Direct evaluation of a root graph as a plain product of rescaled
    /// resolvent entries (the oracle side of the leaf-sum identity).
    pub fn evaluate_direct(&self, graph: &ExpansionGraph, assignment: &IndexAssignment) -> Result<C64> {
        self.evaluate(graph, assignment)
    }
}

/// Exact main/remainder sums of the diagonal expansion, computed without
/// materializing the term list.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalExpansionValue {
    /// Sum of all expanded terms without a series-remainder factor.
    pub main: C64,
    /// Sum of all terms carrying at least one series-remainder factor.
    pub remainder: C64,
    /// How many graphs the materialized expansion would hold.
    pub term_count: u64,
}

impl<'a> GraphEvaluator<'a> {
    /// Evaluates the diagonal-entry expansion in factorized
    /// form. Because every alternative of an entry attaches only at that
    /// entry's own vertex (with fresh white vertices), the white sums
    /// factorize and the sum over the full cartesian product of
    /// alternatives is the product of per-entry alternative sums. The
    /// result is bit-for-bit the quantity the materialized
    /// [`super::expand_diagonal`] list sums to, at any size.
    pub fn expand_diagonal_value(
        &self,
        graph: &ExpansionGraph,
        assignment: &IndexAssignment,
        ell: usize,
    ) -> Result<DiagonalExpansionValue> {
        let per_edge = super::ops::diagonal_alternatives(graph, ell)?;
        let base = super::ops::strip_g_edges(graph);
        let base_value = self.evaluate(&base, assignment)?;

        let all_rows = MinorSpec::rows(assignment.rows().iter().copied());
        let minor = self.sys.resolvent(&all_rows)?;
        let scale = self.phi.sqrt();

        let mut total = base_value;
        let mut main = base_value;
        let mut term_count = 1u64;
        for (edge_idx, alts) in &per_edge {
            let e = &graph.edges()[*edge_idx];
            let conj = e.colour.kind.conjugated();
            let row = assignment.row(e.source);
            // the diagonal sandwich (X R^{(a_b)} X*)_aa of this vertex
            let sandwich = {
                let s = minor.sandwich_r(self.sys.x(), self.z, row, row);
                if conj {
                    s.conj()
                } else {
                    s
                }
            };
            // the kept entry of the remainder terms carries the upper set
            // V_b \ {a}, i.e. every black row except its own
            let kept_rows: Vec<usize> =
                assignment.rows().iter().copied().filter(|&r| r != row).collect();
            let kept_minor = self.sys.resolvent(&MinorSpec::rows(kept_rows))?;
            let raw = kept_minor.g.resolvent_entry(self.z, row, row);
            let kept = scale * if conj { raw.conj() } else { raw };

            let mut sum_main = C64::new(0.0, 0.0);
            let mut sum_all = C64::new(0.0, 0.0);
            for alt in alts {
                let mut v = alt.pref.value(self.z_tilde, self.m_tilde);
                for _ in 0..alt.groups {
                    v *= sandwich;
                }
                if alt.keep_edge {
                    v *= kept;
                }
                sum_all += v;
                if !alt.remainder {
                    sum_main += v;
                }
            }
            total *= sum_all;
            main *= sum_main;
            term_count = term_count.saturating_mul(alts.len() as u64);
        }
        Ok(DiagonalExpansionValue { main, remainder: total - main, term_count })
    }
}

/// The summation weight w_a for a root graph: the product over edges of
/// `conj(v[a_source]) * v[a_target]`. Consumed by the verification harness;
/// the engine itself evaluates unweighted monomials.
pub fn vertex_weight(graph: &ExpansionGraph, assignment: &IndexAssignment, v: &[C64]) -> C64 {
    let mut w = C64::new(1.0, 0.0);
    for e in graph.edges() {
        if e.colour.kind.is_g() {
            w *= v[assignment.row(e.source)].conj() * v[assignment.row(e.target)];
        }
    }
    w
}

/// Result of a leaf-sum verification.
#[derive(Debug, Clone)]
pub struct LeafSumReport {
    pub direct: C64,
    pub leaf_sum: C64,
    pub residual: f64,
    pub relative: f64,
    pub n_leaves: usize,
    pub n_nodes: usize,
    pub depth: usize,
}
