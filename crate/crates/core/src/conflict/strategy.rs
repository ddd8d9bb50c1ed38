use std::collections::BTreeMap;

use super::{ConflictGraph, Decomposition, SubGraph};
use crate::cnf::Lit;

/// Decision level of every node: a leaf gets its position (from 1) in the
/// decision trail, or 0 if absent; an implied literal gets the largest level
/// among its predecessors.
pub fn levels_from_trail(g: &ConflictGraph, decisions: &[Lit]) -> BTreeMap<Lit, usize> {
    let mut levels = BTreeMap::new();
    for &l in g.topo_order() {
        let lv = if g.is_leaf(l) {
            decisions.iter().position(|&d| d == l).map_or(0, |p| p + 1)
        } else {
            g.preds(l).iter().map(|p| levels[p]).max().unwrap_or(0)
        };
        levels.insert(l, lv);
    }
    levels
}

/// Subgraphs `E_0 = {x, ¬x} ⊂ E_1 ⊂ … ⊂ E_T = G`, each obtained by expanding
/// the leaf that is not a leaf of `G` with the largest (level, stamp).
pub fn expansion_chain(g: &ConflictGraph, levels: &BTreeMap<Lit, usize>) -> Vec<SubGraph> {
    let mut h = SubGraph::base(g);
    let mut chain = vec![h.clone()];
    let key = |l: Lit| (levels.get(&l).copied().unwrap_or(0), g.stamp(l), l);
    while let Some(l) = h.leaves().filter(|&l| !g.is_leaf(l)).max_by_key(|&l| key(l)) {
        h.expand(g, l);
        chain.push(h.clone());
    }
    chain
}

fn conflict_level(g: &ConflictGraph, levels: &BTreeMap<Lit, usize>) -> usize {
    g.nodes().iter().map(|l| levels.get(l).copied().unwrap_or(0)).max().unwrap_or(0)
}

/// Index of the first chain element after `E_0` with at most one leaf at the conflict level.
fn uip_index(g: &ConflictGraph, chain: &[SubGraph], levels: &BTreeMap<Lit, usize>) -> usize {
    let top = conflict_level(g, levels);
    (1..chain.len())
        .find(|&t| chain[t].leaves().filter(|l| levels.get(l).copied().unwrap_or(0) == top).count() <= 1)
        .unwrap_or(chain.len() - 1)
}

/// Series decomposition `E_0 ⊂ E_t ⊂ G` where `E_t` is the first-UIP cut; the
/// middle graph is dropped when it is already `G`.
pub fn first_uip_decomposition(g: &ConflictGraph, levels: &BTreeMap<Lit, usize>) -> Decomposition {
    let chain = expansion_chain(g, levels);
    let t = uip_index(g, &chain, levels);
    let mut series = vec![chain[0].clone(), chain[t].clone()];
    if t + 1 < chain.len() {
        series.push(chain.last().unwrap().clone());
    }
    Decomposition::series(series)
}

/// The whole expansion chain, split into parallel levels at the first-UIP cut
/// and wherever the level of the expanded node drops.
pub fn all_learnable_decomposition(g: &ConflictGraph, levels: &BTreeMap<Lit, usize>) -> Decomposition {
    let chain = expansion_chain(g, levels);
    let last = chain.len() - 1;
    let t = uip_index(g, &chain, levels);
    let mut expanded = Vec::new();
    for w in chain.windows(2) {
        let l = *w[1].internal().difference(w[0].internal()).next().unwrap();
        expanded.push(levels.get(&l).copied().unwrap_or(0));
    }
    let mut cuts = vec![0];
    for j in 1..last {
        if j == t || (j > t && expanded[j] < expanded[j - 1]) {
            cuts.push(j);
        }
    }
    cuts.push(last);
    let levels = cuts.windows(2).map(|w| chain[w[0]..=w[1]].to_vec()).collect();
    Decomposition { levels }
}
