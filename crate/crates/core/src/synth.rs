//! Seeded synthetic credit networks.
//!
//! Amounts are log-normal and rounded to whole currency units (at least 1),
//! so strength sums are exact in floating point.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::network::{BipartiteNetwork, CreditRecord};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormal {
    /// Mean of the underlying normal (log scale).
    pub mu: f64,
    pub sigma: f64,
}

impl Default for LogNormal {
    fn default() -> Self {
        Self {
            mu: libm::log(1000.0),
            sigma: 1.0,
        }
    }
}

impl LogNormal {
    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        let v = libm::exp(self.mu + self.sigma * rng.normal());
        libm::round(v).max(1.0)
    }
}

/// Bank/firm counts of one planted community.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub banks: usize,
    pub firms: usize,
}

#[derive(Debug, Clone)]
pub struct BlockNetwork {
    pub network: BipartiteNetwork,
    /// Block of each bank, indexed like the network's bank registry.
    pub bank_block: Vec<usize>,
}

/// Stochastic block bipartite network: a bank–firm pair inside the same
/// block is linked with probability `p_in`, across blocks with `p_out`.
/// Nodes left without edges get one within-block edge to a uniform partner.
///
/// Bank ids are `b{index}` and firm ids `f{index}`, numbered block by block.
pub fn block_network(rng: &mut SeededRng, blocks: &[Block], p_in: f64, p_out: f64, weights: LogNormal) -> BlockNetwork {
    let mut bank_block = Vec::new();
    let mut firm_block = Vec::new();
    for (b, blk) in blocks.iter().enumerate() {
        bank_block.extend(core::iter::repeat_n(b, blk.banks));
        firm_block.extend(core::iter::repeat_n(b, blk.firms));
    }
    let (n, m) = (bank_block.len(), firm_block.len());
    let mut linked = vec![vec![false; m]; n];
    let mut bank_deg = vec![0usize; n];
    let mut firm_deg = vec![0usize; m];
    for mu in 0..n {
        for i in 0..m {
            let p = if bank_block[mu] == firm_block[i] { p_in } else { p_out };
            if rng.bernoulli(p) {
                linked[mu][i] = true;
                bank_deg[mu] += 1;
                firm_deg[i] += 1;
            }
        }
    }
    let members = |block: usize, of: &[usize]| -> Vec<usize> { (0..of.len()).filter(|&k| of[k] == block).collect() };
    for mu in 0..n {
        if bank_deg[mu] == 0 {
            let firms = members(bank_block[mu], &firm_block);
            let i = firms[rng.index_in(0, firms.len())];
            linked[mu][i] = true;
            bank_deg[mu] += 1;
            firm_deg[i] += 1;
        }
    }
    for i in 0..m {
        if firm_deg[i] == 0 {
            let banks = members(firm_block[i], &bank_block);
            let mu = banks[rng.index_in(0, banks.len())];
            linked[mu][i] = true;
            firm_deg[i] += 1;
        }
    }
    let mut records = Vec::new();
    for (mu, row) in linked.iter().enumerate() {
        for (i, &l) in row.iter().enumerate() {
            if l {
                records.push(CreditRecord::new(format!("b{mu}"), format!("f{i}"), weights.sample(rng)));
            }
        }
    }
    // every bank appears in order because rows are scanned in order
    let network = BipartiteNetwork::from_records(&records).expect("generator yields a valid network");
    BlockNetwork { network, bank_block }
}

/// Homogeneous random bipartite network (a single block).
pub fn random_network(rng: &mut SeededRng, banks: usize, firms: usize, p: f64, weights: LogNormal) -> BipartiteNetwork {
    block_network(rng, &[Block { banks, firms }], p, p, weights).network
}

/// Complete bipartite network with random amounts.
pub fn complete_network(rng: &mut SeededRng, banks: usize, firms: usize, weights: LogNormal) -> BipartiteNetwork {
    random_network(rng, banks, firms, 1.0, weights)
}

/// Union of networks on disjoint node sets (ids are prefixed `c{k}_`).
pub fn disjoint_union(parts: &[BipartiteNetwork]) -> BipartiteNetwork {
    let mut records = Vec::new();
    for (k, net) in parts.iter().enumerate() {
        for e in net.edges() {
            records.push(CreditRecord::new(
                format!("c{k}_{}", net.banks().id(e.bank)),
                format!("c{k}_{}", net.firms().id(e.firm)),
                e.weight,
            ));
        }
    }
    BipartiteNetwork::from_records(&records).expect("union of valid networks is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_network_covers_all_nodes() {
        let mut rng = SeededRng::new(1);
        let blocks = [Block { banks: 5, firms: 20 }, Block { banks: 5, firms: 20 }];
        let b = block_network(&mut rng, &blocks, 0.3, 0.02, LogNormal::default());
        assert_eq!(b.network.n_banks(), 10);
        assert_eq!(b.network.n_firms(), 40);
        assert_eq!(b.bank_block, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert!(b.network.edges().iter().all(|e| e.weight >= 1.0 && e.weight.fract() == 0.0));
        assert_eq!(b.network.banks().id(3), "b3");
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_network(&mut SeededRng::new(7), 8, 12, 0.3, LogNormal::default());
        let b = random_network(&mut SeededRng::new(7), 8, 12, 0.3, LogNormal::default());
        assert_eq!(a, b);
    }

    #[test]
    fn union_has_components() {
        let mut rng = SeededRng::new(3);
        let parts = [
            complete_network(&mut rng, 2, 3, LogNormal::default()),
            complete_network(&mut rng, 3, 2, LogNormal::default()),
        ];
        let u = disjoint_union(&parts);
        assert_eq!(u.n_banks(), 5);
        assert_eq!(u.connected_components().count, 2);
    }
}
