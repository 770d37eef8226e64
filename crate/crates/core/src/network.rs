//! Weighted bipartite bank × firm graph.
//!
//! Banks and firms live in two ordered registries; indices are assigned in
//! first-appearance order and are internal only. Every edge carries a
//! strictly positive weight (the outstanding credit amount).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::NetworkError;

/// One input row: bank lends `amount` to firm.
#[derive(Debug, Clone, PartialEq)]
pub struct CreditRecord {
    pub bank: String,
    pub firm: String,
    pub amount: f64,
}

impl CreditRecord {
    pub fn new(bank: impl Into<String>, firm: impl Into<String>, amount: f64) -> Self {
        Self {
            bank: bank.into(),
            firm: firm.into(),
            amount,
        }
    }
}

/// An edge between bank index `bank` and firm index `firm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub bank: usize,
    pub firm: usize,
    pub weight: f64,
}

/// Ordered set of identifiers with reverse lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `id`, registering it at the end if unseen.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(String::from(id));
        self.index.insert(String::from(id), i);
        i
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Immutable simple bipartite graph with positive edge weights.
///
/// Edges are stored sorted by `(bank, firm)`; `bank_edges(μ)` is a
/// contiguous slice. A firm-side adjacency (edge indices per firm) is kept
/// alongside for the `B` side of the share matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteNetwork {
    banks: Registry,
    firms: Registry,
    edges: Vec<Edge>,
    bank_offsets: Vec<usize>,
    firm_edges: Vec<Vec<usize>>,
}

/// Strengths and degrees of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAggregates {
    pub bank_strength: Vec<f64>,
    pub firm_strength: Vec<f64>,
    pub bank_degree: Vec<usize>,
    pub firm_degree: Vec<usize>,
}

/// A node of either class, as reported by [`BipartiteNetwork::connected_components`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Bank(usize),
    Firm(usize),
}

/// Partition of all nodes into connected components.
///
/// Components are numbered by their smallest bank index, so component 0
/// contains bank 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub bank_component: Vec<usize>,
    pub firm_component: Vec<usize>,
    pub count: usize,
}

impl Components {
    /// Nodes of each component, banks first then firms, in index order.
    pub fn groups(&self) -> Vec<Vec<Node>> {
        let mut groups = vec![Vec::new(); self.count];
        for (b, &c) in self.bank_component.iter().enumerate() {
            groups[c].push(Node::Bank(b));
        }
        for (f, &c) in self.firm_component.iter().enumerate() {
            groups[c].push(Node::Firm(f));
        }
        groups
    }
}

impl BipartiteNetwork {
    /// Builds a network from credit records.
    ///
    /// Duplicate `(bank, firm)` rows are summed into one edge. Node indices
    /// follow first appearance in `records`.
    pub fn from_records(records: &[CreditRecord]) -> Result<Self, NetworkError> {
        let mut banks = Registry::new();
        let mut firms = Registry::new();
        let mut sums: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
        for (row, rec) in records.iter().enumerate() {
            if rec.bank.is_empty() || rec.firm.is_empty() {
                return Err(NetworkError::EmptyId { row });
            }
            if !rec.amount.is_finite() {
                return Err(NetworkError::NonFiniteAmount {
                    row,
                    bank: rec.bank.clone(),
                    firm: rec.firm.clone(),
                });
            }
            let b = banks.intern(&rec.bank);
            let f = firms.intern(&rec.firm);
            let slot = sums.entry((b, f)).or_insert((0.0, row));
            slot.0 += rec.amount;
        }
        if sums.is_empty() {
            return Err(NetworkError::EmptyNetwork);
        }
        let mut edges = Vec::with_capacity(sums.len());
        for (&(bank, firm), &(weight, row)) in &sums {
            if weight <= 0.0 {
                return Err(NetworkError::NonPositiveWeight {
                    row,
                    bank: banks.id(bank).into(),
                    firm: firms.id(firm).into(),
                    amount: weight,
                });
            }
            edges.push(Edge { bank, firm, weight });
        }
        Ok(Self::assemble(banks, firms, edges))
    }

    /// Builds a network from index-based edges over given registries.
    ///
    /// Used by the null model, which keeps the original registries. Every
    /// registered node must be covered by at least one edge.
    pub fn from_edges(banks: Registry, firms: Registry, mut edges: Vec<Edge>) -> Result<Self, NetworkError> {
        if edges.is_empty() {
            return Err(NetworkError::EmptyNetwork);
        }
        edges.sort_by_key(|e| (e.bank, e.firm));
        let mut bank_seen = vec![false; banks.len()];
        let mut firm_seen = vec![false; firms.len()];
        for (k, e) in edges.iter().enumerate() {
            if e.bank >= banks.len() || e.firm >= firms.len() {
                return Err(NetworkError::IndexOutOfRange);
            }
            if e.weight <= 0.0 || !e.weight.is_finite() {
                return Err(NetworkError::NonPositiveWeight {
                    row: k,
                    bank: banks.id(e.bank).into(),
                    firm: firms.id(e.firm).into(),
                    amount: e.weight,
                });
            }
            if k > 0 && edges[k - 1].bank == e.bank && edges[k - 1].firm == e.firm {
                return Err(NetworkError::DuplicateEdge {
                    bank: banks.id(e.bank).into(),
                    firm: firms.id(e.firm).into(),
                });
            }
            bank_seen[e.bank] = true;
            firm_seen[e.firm] = true;
        }
        if let Some(b) = bank_seen.iter().position(|s| !s) {
            return Err(NetworkError::IsolatedNode(banks.id(b).into()));
        }
        if let Some(f) = firm_seen.iter().position(|s| !s) {
            return Err(NetworkError::IsolatedNode(firms.id(f).into()));
        }
        Ok(Self::assemble(banks, firms, edges))
    }

    // `edges` must already be sorted by (bank, firm) and cover every node.
    fn assemble(banks: Registry, firms: Registry, edges: Vec<Edge>) -> Self {
        let n = banks.len();
        let mut bank_offsets = vec![0usize; n + 1];
        for e in &edges {
            bank_offsets[e.bank + 1] += 1;
        }
        for b in 0..n {
            bank_offsets[b + 1] += bank_offsets[b];
        }
        let mut firm_edges = vec![Vec::new(); firms.len()];
        for (k, e) in edges.iter().enumerate() {
            firm_edges[e.firm].push(k);
        }
        Self {
            banks,
            firms,
            edges,
            bank_offsets,
            firm_edges,
        }
    }

    pub fn banks(&self) -> &Registry {
        &self.banks
    }

    pub fn firms(&self) -> &Registry {
        &self.firms
    }

    pub fn n_banks(&self) -> usize {
        self.banks.len()
    }

    pub fn n_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges of bank `b`, sorted by firm index.
    pub fn bank_edges(&self, b: usize) -> &[Edge] {
        &self.edges[self.bank_edge_range(b)]
    }

    /// Position of bank `b`'s edges within [`edges`](Self::edges).
    pub fn bank_edge_range(&self, b: usize) -> core::ops::Range<usize> {
        self.bank_offsets[b]..self.bank_offsets[b + 1]
    }

    /// Indices into [`edges`](Self::edges) of the edges incident to firm `f`.
    pub fn firm_edge_indices(&self, f: usize) -> &[usize] {
        &self.firm_edges[f]
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn aggregates(&self) -> NodeAggregates {
        let mut bank_strength = vec![0.0; self.n_banks()];
        let mut firm_strength = vec![0.0; self.n_firms()];
        let mut bank_degree = vec![0usize; self.n_banks()];
        let mut firm_degree = vec![0usize; self.n_firms()];
        for e in &self.edges {
            bank_strength[e.bank] += e.weight;
            firm_strength[e.firm] += e.weight;
            bank_degree[e.bank] += 1;
            firm_degree[e.firm] += 1;
        }
        NodeAggregates {
            bank_strength,
            firm_strength,
            bank_degree,
            firm_degree,
        }
    }

    pub fn bank_strengths(&self) -> Vec<f64> {
        (0..self.n_banks())
            .map(|b| self.bank_edges(b).iter().map(|e| e.weight).sum())
            .collect()
    }

    /// Connected components via breadth-first search over the bipartite
    /// adjacency.
    pub fn connected_components(&self) -> Components {
        const UNSET: usize = usize::MAX;
        let mut bank_component = vec![UNSET; self.n_banks()];
        let mut firm_component = vec![UNSET; self.n_firms()];
        let mut count = 0;
        let mut queue: Vec<usize> = Vec::new();
        for start in 0..self.n_banks() {
            if bank_component[start] != UNSET {
                continue;
            }
            bank_component[start] = count;
            queue.clear();
            queue.push(start);
            while let Some(b) = queue.pop() {
                for e in self.bank_edges(b) {
                    if firm_component[e.firm] != UNSET {
                        continue;
                    }
                    firm_component[e.firm] = count;
                    for &k in &self.firm_edges[e.firm] {
                        let nb = self.edges[k].bank;
                        if bank_component[nb] == UNSET {
                            bank_component[nb] = count;
                            queue.push(nb);
                        }
                    }
                }
            }
            count += 1;
        }
        Components {
            bank_component,
            firm_component,
            count,
        }
    }
}
