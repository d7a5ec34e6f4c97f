//! Slow reference implementations used only by tests.
//!
//! These deliberately share no code with the production solvers: parity is
//! decided by enumerating the protagonist's positional strategies and
//! computing the antagonist's exact best response on the fixed graph, and
//! cycle-set search runs over all vertex subsets with a transitive-closure
//! connectivity check.

use crate::bitset::BitSet;
use crate::zerosum::TwoPlayerView;

/// All positional choice vectors for the vertices owned by `for_eve`'s
/// player; entry `c[v]` is an index into `succ[v]` (0 for the other
/// player's vertices).
fn choice_vectors(view: &TwoPlayerView, for_eve: bool) -> Vec<Vec<usize>> {
    let n = view.n();
    let mut out = vec![vec![0usize; n]];
    for v in 0..n {
        if view.eve[v] != for_eve || view.succ[v].len() <= 1 {
            continue;
        }
        let mut bigger = Vec::with_capacity(out.len() * view.succ[v].len());
        for c in &out {
            for k in 0..view.succ[v].len() {
                let mut c2 = c.clone();
                c2[v] = k;
                bigger.push(c2);
            }
        }
        out = bigger;
    }
    out
}

/// Eve's winning region of the max-parity game, computed by enumerating
/// Eve's positional strategies; for each, Adam wins exactly where he can
/// reach a cycle of odd maximal color in the one-player graph.
pub fn parity_winners_by_enumeration(view: &TwoPlayerView, color: &[u8]) -> BitSet {
    let n = view.n();
    let mut win = BitSet::new(n);
    for sigma in choice_vectors(view, true) {
        // Successors available once Eve's choices are fixed.
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if view.eve[v] {
                    vec![view.succ[v][sigma[v]]]
                } else {
                    view.succ[v].clone()
                }
            })
            .collect();
        let adam = one_player_odd_cycle_region(&succ, color);
        for v in 0..n {
            if !adam.contains(v) {
                win.insert(v);
            }
        }
    }
    win
}

/// Where a sole chooser can drive the play onto a cycle whose maximal
/// color is odd.
pub fn one_player_odd_cycle_region(succ: &[Vec<usize>], color: &[u8]) -> BitSet {
    let n = succ.len();
    let mut bad_cycle_vertices = BitSet::new(n);
    let reach = closure(succ, &BitSet::full(n));
    for c in color.iter().copied().collect::<std::collections::BTreeSet<u8>>() {
        if c % 2 == 0 {
            continue;
        }
        // A cycle with maximal color exactly c exists through v iff v has
        // color c and lies on a cycle of the subgraph with colors <= c.
        let mut low = BitSet::new(n);
        for v in 0..n {
            if color[v] <= c {
                low.insert(v);
            }
        }
        let low_reach = closure(succ, &low);
        for v in 0..n {
            if color[v] == c && low_reach[v].contains(v) {
                bad_cycle_vertices.insert(v);
            }
        }
    }
    let mut adam = BitSet::new(n);
    for v in 0..n {
        if bad_cycle_vertices.contains(v) || reach[v].intersects(&bad_cycle_vertices) {
            adam.insert(v);
        }
    }
    adam
}

/// Transitive closure by repeated squaring over the subgraph induced by
/// `mask`: `out[v]` holds w iff a nonempty path v -> w exists inside mask.
fn closure(succ: &[Vec<usize>], mask: &BitSet) -> Vec<BitSet> {
    let n = succ.len();
    let mut reach: Vec<BitSet> = (0..n)
        .map(|v| {
            let mut r = BitSet::new(n);
            if mask.contains(v) {
                for &w in &succ[v] {
                    if mask.contains(w) {
                        r.insert(w);
                    }
                }
            }
            r
        })
        .collect();
    loop {
        let mut changed = false;
        for v in 0..n {
            let mut grown = reach[v].clone();
            for w in reach[v].iter() {
                grown.union_with(&reach[w]);
            }
            if grown != reach[v] {
                reach[v] = grown;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Does some reachable cycle set satisfy `accept`? Checks every subset of
/// every size via transitive closure; independent of the SCC-based search.
pub fn cycle_set_exists(
    succ: &[Vec<usize>],
    start: usize,
    accept: &dyn Fn(&BitSet) -> bool,
) -> bool {
    let n = succ.len();
    assert!(n <= 20, "oracle is exponential");
    let reach = closure(succ, &BitSet::full(n));
    let mut reachable = BitSet::new(n);
    reachable.insert(start);
    reachable.union_with(&reach[start]);
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let set = BitSet::from_indices(n, &members);
        if !set.is_subset(&reachable) {
            continue;
        }
        // The set must be exactly one cycle's footprint: every member must
        // reach every member (including itself) inside the set.
        let inner = closure(succ, &set);
        let strongly = set.iter().all(|v| set.iter().all(|w| inner[v].contains(w)));
        if strongly && accept(&set) {
            return true;
        }
    }
    false
}
