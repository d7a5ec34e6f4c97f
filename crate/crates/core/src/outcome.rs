//! Limit behavior of plays: conditions on the set of states visited
//! infinitely often, expressed as positive combinations of "the cycle hits
//! X" / "the cycle avoids Y" literals, and lasso searches for them.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::zerosum::{cover_walk, sccs_within, shortest_path};

/// A positive boolean combination of cycle-set literals. `Hit(x)` holds on
/// cycle set C iff C ∩ x ≠ ∅, `Miss(y)` iff C ∩ y = ∅.
#[derive(Clone, Debug)]
pub enum SetFormula {
    Const(bool),
    Hit(BitSet),
    Miss(BitSet),
    And(Vec<SetFormula>),
    Or(Vec<SetFormula>),
}

/// One disjunct of a formula in disjunctive normal form: every set in
/// `hits` must be intersected while `miss` must be avoided entirely.
#[derive(Clone, Debug)]
pub struct Disjunct {
    pub hits: Vec<BitSet>,
    pub miss: BitSet,
}

impl SetFormula {
    pub fn and_all(mut parts: Vec<SetFormula>) -> SetFormula {
        match parts.len() {
            0 => SetFormula::Const(true),
            1 => parts.pop().unwrap(),
            _ => SetFormula::And(parts),
        }
    }

    pub fn or_all(mut parts: Vec<SetFormula>) -> SetFormula {
        match parts.len() {
            0 => SetFormula::Const(false),
            1 => parts.pop().unwrap(),
            _ => SetFormula::Or(parts),
        }
    }

    /// Evaluate on a concrete cycle set (reference semantics, used by the
    /// tests and by witness replay).
    pub fn holds_on(&self, set: &BitSet) -> bool {
        match self {
            SetFormula::Const(b) => *b,
            SetFormula::Hit(x) => set.intersects(x),
            SetFormula::Miss(y) => !set.intersects(y),
            SetFormula::And(ps) => ps.iter().all(|p| p.holds_on(set)),
            SetFormula::Or(ps) => ps.iter().any(|p| p.holds_on(set)),
        }
    }

    /// Disjunctive normal form, failing once more than `max` disjuncts
    /// would be produced.
    pub fn dnf(&self, max: usize) -> Result<Vec<Disjunct>> {
        let overflow = || {
            Error::GuardExceeded(format!(
                "cycle condition expands to more than {max} disjuncts"
            ))
        };
        let out = match self {
            SetFormula::Const(false) => Vec::new(),
            SetFormula::Const(true) => vec![Disjunct {
                hits: Vec::new(),
                miss: BitSet::new(0),
            }],
            SetFormula::Hit(x) => {
                if x.is_empty() {
                    Vec::new()
                } else {
                    vec![Disjunct {
                        hits: vec![x.clone()],
                        miss: BitSet::new(x.len()),
                    }]
                }
            }
            SetFormula::Miss(y) => vec![Disjunct {
                hits: Vec::new(),
                miss: y.clone(),
            }],
            SetFormula::Or(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    out.extend(p.dnf(max)?);
                    if out.len() > max {
                        return Err(overflow());
                    }
                }
                out
            }
            SetFormula::And(ps) => {
                let mut out = vec![Disjunct {
                    hits: Vec::new(),
                    miss: BitSet::new(0),
                }];
                for p in ps {
                    let rhs = p.dnf(max)?;
                    let mut next = Vec::new();
                    for a in &out {
                        for b in &rhs {
                            let mut hits = a.hits.clone();
                            hits.extend(b.hits.iter().cloned());
                            let miss = grow_union(&a.miss, &b.miss);
                            if let Some(d) = simplify(hits, miss) {
                                next.push(d);
                            }
                            if next.len() > max {
                                return Err(overflow());
                            }
                        }
                    }
                    out = next;
                }
                out
            }
        };
        Ok(out)
    }
}

/// Union of two miss sets that may have been created with different
/// universe sizes (the empty `BitSet::new(0)` placeholder).
fn grow_union(a: &BitSet, b: &BitSet) -> BitSet {
    if a.len() >= b.len() {
        let mut out = a.clone();
        for i in b.iter() {
            out.insert(i);
        }
        out
    } else {
        grow_union(b, a)
    }
}

/// Drop redundant hit sets and detect unsatisfiable disjuncts.
fn simplify(mut hits: Vec<BitSet>, miss: BitSet) -> Option<Disjunct> {
    for h in &mut hits {
        if !miss.is_empty() {
            let mut trimmed = h.clone();
            for i in miss.iter() {
                if i < trimmed.len() {
                    trimmed.remove(i);
                }
            }
            *h = trimmed;
        }
        if h.is_empty() {
            return None; // must hit a set that is entirely missed
        }
    }
    // A hit requirement implied by a smaller one is redundant.
    let mut keep: Vec<BitSet> = Vec::new();
    'outer: for h in hits {
        for k in &keep {
            if k.is_subset(&h) {
                continue 'outer;
            }
        }
        keep.retain(|k| !h.is_subset(k));
        keep.push(h);
    }
    Some(Disjunct { hits: keep, miss })
}

/// Build the formula "the present atom classes make `eval` true" by
/// expanding over all subsets of the given classes. `members[a]` is the set
/// of states of class `a`; classes beyond `max_classes` are refused.
pub fn presence_minterms(
    eval: &dyn Fn(&BitSet) -> bool,
    members: &[BitSet],
    max_classes: usize,
) -> Result<SetFormula> {
    let k = members.len();
    if k > max_classes {
        return Err(Error::GuardExceeded(format!(
            "condition over {k} atom classes (limit {max_classes})"
        )));
    }
    let mut disjuncts = Vec::new();
    for mask in 0u64..(1 << k) {
        let mut present = BitSet::new(k);
        for (a, _) in members.iter().enumerate() {
            if mask & (1 << a) != 0 {
                present.insert(a);
            }
        }
        if !eval(&present) {
            continue;
        }
        let mut parts = Vec::new();
        let mut absent_union: Option<BitSet> = None;
        for (a, m) in members.iter().enumerate() {
            if present.contains(a) {
                parts.push(SetFormula::Hit(m.clone()));
            } else {
                match &mut absent_union {
                    None => absent_union = Some(m.clone()),
                    Some(u) => u.union_with(m),
                }
            }
        }
        if let Some(u) = absent_union {
            parts.push(SetFormula::Miss(u));
        }
        disjuncts.push(SetFormula::and_all(parts));
    }
    Ok(SetFormula::or_all(disjuncts))
}

/// A cycle found inside `succ`: the vertices that can reach one whose set
/// satisfies the formula built for its strongly connected component.
///
/// `formula` receives each cyclic component (ascending vertex list) and may
/// use per-component constants; the cycle is then any closed subset of that
/// component, so the formula must be sound for subsets as well.
pub fn accepted_cycle_reachers(
    succ: &[Vec<usize>],
    formula: &dyn Fn(&[usize]) -> Result<SetFormula>,
    max_disjuncts: usize,
) -> Result<BitSet> {
    let n = succ.len();
    let mut seeds = BitSet::new(n);
    let all = BitSet::full(n);
    for scc in sccs_within(succ, &all) {
        if !is_cyclic(succ, &scc) {
            continue;
        }
        if accepted_cycle_in_component(succ, &scc, &formula(&scc)?, max_disjuncts)?.is_some() {
            for &v in &scc {
                seeds.insert(v);
            }
        }
    }
    // Backward closure: anything that reaches a seeded component qualifies.
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, out) in succ.iter().enumerate() {
        for &w in out {
            pred[w].push(u);
        }
    }
    let mut stack: Vec<usize> = seeds.iter().collect();
    let mut reach = seeds;
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if !reach.contains(u) {
                reach.insert(u);
                stack.push(u);
            }
        }
    }
    Ok(reach)
}

/// Deterministic lasso search: the first (by component order, then DNF
/// order) cycle reachable from `start` whose set satisfies the formula of
/// its component. Returns (stem, cycle) with the stem excluding the cycle
/// entry.
pub fn accepted_lasso(
    succ: &[Vec<usize>],
    start: usize,
    formula: &dyn Fn(&[usize]) -> Result<SetFormula>,
    max_disjuncts: usize,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let reachable = crate::zerosum::reach_set(succ, start);
    for scc in sccs_within(succ, &reachable) {
        if !is_cyclic(succ, &scc) {
            continue;
        }
        if let Some(cycle) =
            accepted_cycle_in_component(succ, &scc, &formula(&scc)?, max_disjuncts)?
        {
            let stem = shortest_path(succ, start, cycle[0]);
            return Ok(Some((stem, cycle)));
        }
    }
    Ok(None)
}

fn is_cyclic(succ: &[Vec<usize>], scc: &[usize]) -> bool {
    scc.len() > 1 || succ[scc[0]].contains(&scc[0])
}

/// Search one cyclic component for a closed subset satisfying the formula:
/// per DNF disjunct, remove the missed states and look for a sub-component
/// meeting every hit set.
fn accepted_cycle_in_component(
    succ: &[Vec<usize>],
    scc: &[usize],
    formula: &SetFormula,
    max_disjuncts: usize,
) -> Result<Option<Vec<usize>>> {
    let n = succ.len();
    let scc_set = BitSet::from_indices(n, scc);
    for d in formula.dnf(max_disjuncts)? {
        let mut allowed = scc_set.clone();
        for i in d.miss.iter() {
            if i < n {
                allowed.remove(i);
            }
        }
        if allowed.is_empty() {
            continue;
        }
        for sub in sccs_within(succ, &allowed) {
            if !is_cyclic(succ, &sub) {
                continue;
            }
            let sub_set = BitSet::from_indices(n, &sub);
            if !d.hits.iter().all(|h| h.intersects(&sub_set)) {
                continue;
            }
            // Visit one representative of every hit set (and close up).
            let mut must: Vec<usize> = d
                .hits
                .iter()
                .map(|h| h.intersection(&sub_set).first().expect("intersects"))
                .collect();
            if must.is_empty() {
                must.push(sub[0]);
            }
            must.sort_unstable();
            must.dedup();
            return Ok(Some(cover_walk(succ, &sub_set, &must)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Game, Objective};

    fn set(n: usize, xs: &[usize]) -> BitSet {
        BitSet::from_indices(n, xs)
    }

    #[test]
    fn dnf_agrees_with_direct_evaluation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let n = 6;
            let f = random_formula(&mut rng, n, 3);
            let dnf = f.dnf(512).unwrap();
            for mask in 0u32..(1 << n) {
                let mut s = BitSet::new(n);
                for i in 0..n {
                    if mask & (1 << i) != 0 {
                        s.insert(i);
                    }
                }
                let direct = f.holds_on(&s);
                let via_dnf = dnf.iter().any(|d| {
                    d.hits.iter().all(|h| h.intersects(&s))
                        && !d.miss.iter().any(|i| s.contains(i))
                });
                assert_eq!(direct, via_dnf, "formula {f:?} on {s:?}");
            }
        }
    }

    fn random_formula(rng: &mut impl rand::Rng, n: usize, depth: usize) -> SetFormula {
        if depth == 0 || rng.gen_bool(0.3) {
            let mut s = BitSet::new(n);
            for i in 0..n {
                if rng.gen_bool(0.4) {
                    s.insert(i);
                }
            }
            return if rng.gen_bool(0.5) {
                SetFormula::Hit(s)
            } else {
                SetFormula::Miss(s)
            };
        }
        let k = rng.gen_range(1..=3);
        let parts = (0..k)
            .map(|_| random_formula(rng, n, depth - 1))
            .collect::<Vec<_>>();
        if rng.gen_bool(0.5) {
            SetFormula::And(parts)
        } else {
            SetFormula::Or(parts)
        }
    }

    #[test]
    fn presence_minterms_match_circuit() {
        // Three classes over six states; condition: class 0 present and
        // class 2 absent.
        let members = vec![set(6, &[0, 1]), set(6, &[2]), set(6, &[3, 4, 5])];
        let eval = |present: &BitSet| present.contains(0) && !present.contains(2);
        let f = presence_minterms(&eval, &members, 12).unwrap();
        assert!(f.holds_on(&set(6, &[0, 2])));
        assert!(f.holds_on(&set(6, &[1])));
        assert!(!f.holds_on(&set(6, &[0, 3])));
        assert!(!f.holds_on(&set(6, &[2])));
    }

    #[test]
    fn lasso_search_and_reachers_agree_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for round in 0..200 {
            let n = 6;
            let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
            for u in 0..n {
                for w in 0..n {
                    if rng.gen_bool(0.3) {
                        succ[u].push(w);
                    }
                }
                if succ[u].is_empty() {
                    succ[u].push((u + 1) % n);
                }
            }
            let f = random_formula(&mut rng, n, 2);
            let formula = |_scc: &[usize]| Ok(f.clone());
            let reachers = accepted_cycle_reachers(&succ, &formula, 512).unwrap();
            for start in 0..n {
                let expected =
                    crate::brute::cycle_set_exists(&succ, start, &|s| f.holds_on(s));
                assert_eq!(
                    reachers.contains(start),
                    expected,
                    "round {round} start {start} formula {f:?}"
                );
                let lasso = accepted_lasso(&succ, start, &formula, 512).unwrap();
                assert_eq!(lasso.is_some(), expected);
                if let Some((stem, cycle)) = lasso {
                    // Replay: stem then cycle must follow edges, and the
                    // cycle set must satisfy the formula.
                    let walk: Vec<usize> =
                        stem.iter().chain(cycle.iter()).copied().collect();
                    assert_eq!(walk[0], start);
                    for pair in walk.windows(2) {
                        assert!(succ[pair[0]].contains(&pair[1]), "broken step {pair:?}");
                    }
                    assert!(succ[*cycle.last().unwrap()].contains(&cycle[0]));
                    let cycle_set = BitSet::from_indices(n, &cycle);
                    assert!(f.holds_on(&cycle_set));
                }
            }
        }
    }

    #[test]
    fn mixed_loss_unfolding_lifts_objectives() {
        // Player 0 loses on vertex 2 (safety), player 1 has a Büchi
        // objective on vertex 0. Ring 0 -> 1 -> 2 -> 0.
        let game = Game::new(
            vec!["a".into(), "b".into()],
            vec!["u".into(), "v".into(), "w".into()],
            vec![0, 1, 0],
            vec![(0, 1), (1, 2), (2, 0)],
            vec![
                Objective::Safety { bad: set(3, &[2]) },
                Objective::Buchi { acc: set(3, &[0]) },
            ],
            0,
        )
        .unwrap();
        let u = crate::game::unfold_lost(&game, &[0, 1, 2]).unwrap();
        // States: (0,{}), (1,{}), (2,{0}), (0,{0}), (1,{0}); entries first.
        assert_eq!(u.game.n_vertices(), 5);
        for v in 0..3 {
            assert_eq!(u.base_of[v], v);
        }
        let lost0 = match &u.game.objectives[0] {
            Objective::Safety { bad } => bad.clone(),
            _ => panic!("expected safety"),
        };
        assert!(lost0.contains(2) && !lost0.contains(0));
        // The Büchi set contains every copy of vertex 0.
        match &u.game.objectives[1] {
            Objective::Buchi { acc } => {
                for (s, &b) in u.base_of.iter().enumerate() {
                    assert_eq!(acc.contains(s), b == 0);
                }
            }
            _ => panic!("expected büchi"),
        }
        // Once lost, always lost: the successor of (2,{0}) is a lost copy
        // of vertex 0, distinct from its entry.
        let s = u.game.succ[2][0];
        assert_eq!(u.base_of[s], 0);
        assert!(lost0.contains(s));
        assert_ne!(s, 0);
        // A game without safety objectives unfolds to itself.
        let game2 = Game::new(
            vec!["a".into()],
            vec!["u".into(), "v".into()],
            vec![0, 0],
            vec![(0, 1), (1, 0)],
            vec![Objective::Buchi { acc: set(2, &[0]) }],
            0,
        )
        .unwrap();
        let u2 = crate::game::unfold_lost(&game2, &[0, 1]).unwrap();
        assert_eq!(u2.game.n_vertices(), 2);
        assert_eq!(u2.base_of, vec![0, 1]);
    }
}
