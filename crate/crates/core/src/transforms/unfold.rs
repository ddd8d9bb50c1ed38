use std::collections::HashMap;

use super::{validate, TransformError};
use crate::cnf::{Clause, Formula, Lit};
use crate::proof::{NodeId, Proof, ProofBuilder, Rule, SystemDescriptor};

/// Output of [`unfold_to_rti`] with the dag measures used by the size bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolded {
    pub proof: Proof,
    /// Distinct clauses reachable from the root after merging duplicates.
    pub dag_size: usize,
    /// Height of the root clause's derivation.
    pub depth: usize,
}

#[derive(Clone, Copy)]
enum Node {
    Leaf,
    Res(Lit, usize, usize),
}

/// Unfolds a resolution dag into a tree with input lemmas. Duplicate clauses
/// are merged first. In the unfolded tree, an occurrence of a derived clause
/// whose index among its occurrences exceeds the clause's height becomes a
/// lemma pointing at the occurrence with index equal to the height.
pub fn unfold_to_rti(p: &Proof, f: &Formula) -> Result<Unfolded, TransformError> {
    validate(p, f, &SystemDescriptor::rd())?;
    // merge: one dag node per clause, derived as at its first occurrence
    let mut index: HashMap<&Clause, usize> = HashMap::new();
    let mut clauses: Vec<Clause> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut of = vec![0usize; p.len()];
    for id in 0..p.len() {
        let c = p.clause(id);
        if let Some(&k) = index.get(c) {
            of[id] = k;
            continue;
        }
        let node = match p.rule(id) {
            Rule::Res { pivot, left, right } => Node::Res(pivot, of[left], of[right]),
            _ => Node::Leaf,
        };
        let k = nodes.len();
        index.insert(c, k);
        clauses.push(c.clone());
        nodes.push(node);
        of[id] = k;
    }
    let root = of[p.root()];
    let m = nodes.len();
    let mut height = vec![0usize; m];
    for k in 0..m {
        if let Node::Res(_, l, r) = nodes[k] {
            height[k] = 1 + height[l].max(height[r]);
        }
    }
    let depth = height[root];
    // occurrence counts of each dag node inside the unfolding of each node,
    // capped where only comparisons with heights matter
    let cap = depth as u64 + 2;
    let mut reach = vec![false; m];
    reach[root] = true;
    for k in (0..m).rev() {
        if let (true, Node::Res(_, l, r)) = (reach[k], nodes[k]) {
            reach[l] = true;
            reach[r] = true;
        }
    }
    let mut counts: Vec<Vec<u64>> = vec![Vec::new(); m];
    for k in 0..m {
        if !reach[k] {
            continue;
        }
        let mut row = vec![0u64; m];
        row[k] = 1;
        if let Node::Res(_, l, r) = nodes[k] {
            for (v, x) in row.iter_mut().enumerate() {
                *x = (*x + counts[l][v] + counts[r][v]).min(cap);
            }
        }
        counts[k] = row;
    }
    let dag_size = reach.iter().filter(|&&b| b).count();
    let mut u = Unfolder {
        nodes: &nodes,
        clauses: &clauses,
        height: &height,
        counts: &counts,
        seen: vec![0; m],
        anchor: vec![None; m],
        cap,
        b: ProofBuilder::new(p.num_vars()),
    };
    u.visit(root);
    let proof = u.b.finish().expect("emission follows post-order");
    Ok(Unfolded { proof, dag_size, depth })
}

struct Unfolder<'a> {
    nodes: &'a [Node],
    clauses: &'a [Clause],
    height: &'a [usize],
    counts: &'a [Vec<u64>],
    seen: Vec<u64>,
    anchor: Vec<Option<NodeId>>,
    cap: u64,
    b: ProofBuilder,
}

impl Unfolder<'_> {
    fn visit(&mut self, k: usize) -> NodeId {
        match self.nodes[k] {
            Node::Leaf => {
                self.seen[k] = (self.seen[k] + 1).min(self.cap);
                self.b.axiom(self.clauses[k].clone())
            }
            Node::Res(pivot, l, r) => {
                let j = self.seen[k] + 1;
                if j > self.height[k] as u64 {
                    for (v, c) in self.counts[k].iter().enumerate() {
                        self.seen[v] = (self.seen[v] + c).min(self.cap);
                    }
                    let target = self.anchor[k].expect("occurrence at the height index precedes later ones");
                    return self.b.lemma(target);
                }
                self.seen[k] = j;
                let lo = self.visit(l);
                let ro = self.visit(r);
                let o = self.b.res(pivot, lo, ro).expect("dag inferences are valid");
                if j == self.height[k] as u64 {
                    self.anchor[k] = Some(o);
                }
                o
            }
        }
    }
}
