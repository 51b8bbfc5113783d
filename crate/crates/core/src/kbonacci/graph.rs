use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{kb_image, KbSymbol, KbSystem};
use crate::error::{Error, Result};
use crate::kbonacci::permanent::permanent;

/// Digraph on the mismatch symbols: an edge `g -> h` whenever `h` occurs in
/// the lifted image of `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    pub k: usize,
    pub vertices: Vec<KbSymbol>,
    pub edges: Vec<Vec<usize>>,
}

impl IncidenceGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, s: KbSymbol) -> Option<usize> {
        self.vertices.iter().position(|&v| v == s)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges[from].binary_search(&to).is_ok()
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.edges[v].len()
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        (0..self.len()).map(|i| (0..self.len()).map(|j| self.has_edge(i, j)).collect()).collect()
    }
}

pub fn incidence_graph(sys: &KbSystem) -> IncidenceGraph {
    let vertices: Vec<KbSymbol> =
        sys.symbols.iter().copied().filter(|s| matches!(s, KbSymbol::Triple(..))).collect();
    let index: BTreeMap<KbSymbol, usize> = vertices.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let edges = vertices
        .iter()
        .map(|&v| {
            let mut out: Vec<usize> = kb_image(v, sys.k).iter().filter_map(|t| index.get(t).copied()).collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    IncidenceGraph { k: sys.k, vertices, edges }
}

/// The distinguished successor of a triple: the lone triple of its image
/// outside the wrap rows, the centre of the closure inside them.
pub fn selector(s: KbSymbol, k: usize) -> Option<KbSymbol> {
    let top = k as i32 - 1;
    match s {
        KbSymbol::Diag(_) => None,
        KbSymbol::Triple(a, b, c) if a > b && a == top => Some(KbSymbol::Triple(-1, c + 1, b + 1)),
        KbSymbol::Triple(a, b, c) if a < b && c == top => Some(KbSymbol::Triple(b + 1, a + 1, -1)),
        KbSymbol::Triple(a, b, c) => Some(KbSymbol::Triple(a + 1, b + 1, c + 1)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCover {
    /// `succ[i]` is the vertex chosen after vertex `i`.
    pub succ: Vec<usize>,
    /// Cycle lengths, largest first.
    pub cycle_lengths: Vec<usize>,
}

impl CycleCover {
    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.cycle_lengths.iter().map(|l| l - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// The cover built from [`selector`], after checking it is a permutation that
/// only uses edges of the graph.
pub fn canonical_cycle_cover(g: &IncidenceGraph) -> Result<CycleCover> {
    let n = g.len();
    let mut succ = Vec::with_capacity(n);
    for (i, &v) in g.vertices.iter().enumerate() {
        let t = selector(v, g.k).and_then(|t| g.index_of(t));
        match t {
            Some(j) if g.has_edge(i, j) => succ.push(j),
            _ => return Err(Error::Internal(format!("selector leaves the graph at {v}"))),
        }
    }
    let mut hit = vec![false; n];
    for &j in &succ {
        if std::mem::replace(&mut hit[j], true) {
            return Err(Error::Internal("selector is not injective".into()));
        }
    }
    let mut seen = vec![false; n];
    let mut cycle_lengths = Vec::new();
    for start in 0..n {
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = succ[v];
            len += 1;
        }
        if len > 0 {
            cycle_lengths.push(len);
        }
    }
    cycle_lengths.sort_unstable_by(|a, b| b.cmp(a));
    Ok(CycleCover { succ, cycle_lengths })
}

/// A cycle of the graph alternating between cover edges and other edges,
/// returned as the vertices whose successor would change. Such a cycle exists
/// exactly when the cover is not the only one.
pub fn alternating_cycle(g: &IncidenceGraph, cover: &CycleCover) -> Option<Vec<usize>> {
    let n = g.len();
    let mut owner = vec![0; n];
    for (i, &j) in cover.succ.iter().enumerate() {
        owner[j] = i;
    }
    // u -> w when u could take over w's target.
    let exchange: Vec<Vec<usize>> = (0..n)
        .map(|u| g.edges[u].iter().filter(|&&j| j != cover.succ[u]).map(|&j| owner[j]).collect())
        .collect();
    let mut state = vec![0u8; n];
    let mut stack_path = Vec::new();
    for root in 0..n {
        if state[root] == 0 {
            if let Some(c) = dfs_cycle(root, &exchange, &mut state, &mut stack_path) {
                return Some(c);
            }
        }
    }
    None
}

fn dfs_cycle(root: usize, adj: &[Vec<usize>], state: &mut [u8], path: &mut Vec<usize>) -> Option<Vec<usize>> {
    let mut stack = vec![(root, 0usize)];
    state[root] = 1;
    path.push(root);
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if let Some(&w) = adj[v].get(*next) {
            *next += 1;
            match state[w] {
                0 => {
                    state[w] = 1;
                    path.push(w);
                    stack.push((w, 0));
                }
                1 => {
                    let at = path.iter().position(|&x| x == w).expect("grey vertex is on the path");
                    return Some(path[at..].to_vec());
                }
                _ => {}
            }
        } else {
            state[v] = 2;
            path.pop();
            stack.pop();
        }
    }
    None
}

pub fn count_cycle_covers(g: &IncidenceGraph) -> Result<BigInt> {
    permanent(&g.adjacency())
}

/// Follows the selector from each `[a,b,-1]` with `a > b >= 0` through the six
/// hops of lengths `k-a, a-b, b+1, k-a, a-b, b+1`, checking each landing
/// vertex, and checks that every selector orbit has length dividing `2(k+1)`.
pub fn cycle_template_holds(k: usize) -> bool {
    let ki = k as i32;
    let step = |s: KbSymbol, n: i32| (0..n).try_fold(s, |s, _| selector(s, k));
    for a in 0..ki {
        for b in 0..a {
            let hops = [
                (ki - a, KbSymbol::Triple(-1, ki - a - 1, ki + b - a)),
                (a - b, KbSymbol::Triple(ki - b - 1, a - b - 1, -1)),
                (b + 1, KbSymbol::Triple(-1, b, a)),
                (ki - a, KbSymbol::Triple(ki + b - a, ki - a - 1, -1)),
                (a - b, KbSymbol::Triple(-1, a - b - 1, ki - b - 1)),
                (b + 1, KbSymbol::Triple(a, b, -1)),
            ];
            let mut cur = KbSymbol::Triple(a, b, -1);
            for (n, want) in hops {
                match step(cur, n) {
                    Some(s) if s == want => cur = s,
                    _ => return false,
                }
            }
        }
    }
    super::kb_symbols(k).into_iter().filter(|s| matches!(s, KbSymbol::Triple(..))).all(|s| {
        let mut cur = s;
        let mut len = 0;
        loop {
            cur = match selector(cur, k) {
                Some(c) => c,
                None => return false,
            };
            len += 1;
            if cur == s {
                return (2 * (k + 1)).is_multiple_of(len);
            }
            if len > 2 * (k + 1) {
                return false;
            }
        }
    })
}
