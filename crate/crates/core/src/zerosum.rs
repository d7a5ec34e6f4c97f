//! Two-player zero-sum solvers on total game graphs.
//!
//! Every vertex belongs either to the protagonist ("Eve") or the antagonist
//! ("Adam"). All algorithms are deterministic: queues are FIFO seeded in
//! ascending vertex order and successor lists are scanned in ascending
//! order, so strategies and witnesses are reproducible.

use crate::bitset::BitSet;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::game::{Game, Lasso};

/// A two-player projection of a game graph: who is the protagonist at each
/// vertex, and the (total, sorted) successor relation.
#[derive(Clone, Debug)]
pub struct TwoPlayerView {
    pub eve: Vec<bool>,
    pub succ: Vec<Vec<usize>>,
}

impl TwoPlayerView {
    pub fn n(&self) -> usize {
        self.eve.len()
    }

    /// View of a game where `protagonist` plays against the coalition of
    /// everyone else.
    pub fn of_game(game: &Game, protagonist: usize) -> Self {
        TwoPlayerView {
            eve: game.owner.iter().map(|&o| o == protagonist).collect(),
            succ: game.succ.clone(),
        }
    }
}

/// An attractor together with the positional strategy that realizes it.
#[derive(Clone, Debug)]
pub struct Attraction {
    pub region: BitSet,
    /// For controller vertices attracted strictly outside the target: the
    /// successor to move to.
    pub strategy: Vec<Option<usize>>,
}

/// Vertices from which `for_eve`'s player can force a visit to `target`
/// while staying inside `mask` (edges leaving `mask` are ignored; `target`
/// is intersected with `mask`).
pub fn attractor_within(
    view: &TwoPlayerView,
    mask: &BitSet,
    target: &BitSet,
    for_eve: bool,
) -> Attraction {
    let n = view.n();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counter: Vec<usize> = vec![0; n];
    for u in mask.iter() {
        for &v in &view.succ[u] {
            if mask.contains(v) {
                pred[v].push(u);
                counter[u] += 1;
            }
        }
    }
    let mut region = target.intersection(mask);
    let mut strategy: Vec<Option<usize>> = vec![None; n];
    let mut queue: std::collections::VecDeque<usize> = region.iter().collect();
    while let Some(w) = queue.pop_front() {
        for &u in &pred[w] {
            if region.contains(u) {
                continue;
            }
            if view.eve[u] == for_eve {
                region.insert(u);
                strategy[u] = Some(w);
                queue.push_back(u);
            } else {
                counter[u] -= 1;
                if counter[u] == 0 {
                    region.insert(u);
                    queue.push_back(u);
                }
            }
        }
    }
    Attraction { region, strategy }
}

/// Attractor on the full graph.
pub fn attractor(view: &TwoPlayerView, target: &BitSet, for_eve: bool) -> Attraction {
    attractor_within(view, &BitSet::full(view.n()), target, for_eve)
}

/// Result of a safety game: Eve wins iff the play never visits `bad`.
#[derive(Clone, Debug)]
pub struct SafetyResult {
    pub win: BitSet,
    /// For Eve's winning vertices: the lowest successor staying in the
    /// winning region.
    pub strategy: Vec<Option<usize>>,
}

/// Solve the safety game "avoid `bad` forever" for Eve.
pub fn solve_safety(view: &TwoPlayerView, bad: &BitSet) -> SafetyResult {
    let reach_bad = attractor(view, bad, false);
    let win = reach_bad.region.complement();
    let mut strategy = vec![None; view.n()];
    for v in win.iter() {
        if view.eve[v] {
            strategy[v] = view.succ[v].iter().copied().find(|w| win.contains(*w));
            debug_assert!(strategy[v].is_some());
        }
    }
    SafetyResult { win, strategy }
}

/// Solve the Büchi game "visit `acc` infinitely often" for Eve; returns
/// Eve's winning region.
pub fn solve_buchi(view: &TwoPlayerView, acc: &BitSet) -> BitSet {
    let mut mask = BitSet::full(view.n());
    loop {
        if mask.is_empty() {
            return mask;
        }
        let reach = attractor_within(view, &mask, &acc.intersection(&mask), true);
        let stuck = mask.difference(&reach.region);
        if stuck.is_empty() {
            return mask;
        }
        let out = attractor_within(view, &mask, &stuck, false);
        mask.difference_with(&out.region);
    }
}

/// Regions and positional strategies of a max-parity game: Eve wins a play
/// iff the highest color seen infinitely often is even.
#[derive(Clone, Debug)]
pub struct ParityResult {
    pub win_even: BitSet,
    pub win_odd: BitSet,
    pub strategy_even: Vec<Option<usize>>,
    pub strategy_odd: Vec<Option<usize>>,
}

/// Zielonka's algorithm with positional strategies for both players.
pub fn solve_parity(view: &TwoPlayerView, color: &[u8]) -> ParityResult {
    let n = view.n();
    let mut res = ParityResult {
        win_even: BitSet::new(n),
        win_odd: BitSet::new(n),
        strategy_even: vec![None; n],
        strategy_odd: vec![None; n],
    };
    zielonka(view, color, &BitSet::full(n), &mut res);
    res
}

fn zielonka(view: &TwoPlayerView, color: &[u8], mask: &BitSet, res: &mut ParityResult) {
    if mask.is_empty() {
        return;
    }
    let d = mask.iter().map(|v| color[v]).max().unwrap();
    let even_plays = d % 2 == 0;
    let top: BitSet = {
        let mut t = BitSet::new(view.n());
        for v in mask.iter() {
            if color[v] == d {
                t.insert(v);
            }
        }
        t
    };
    let attr = attractor_within(view, mask, &top, even_plays);
    let sub = mask.difference(&attr.region);
    let mut inner = ParityResult {
        win_even: BitSet::new(view.n()),
        win_odd: BitSet::new(view.n()),
        strategy_even: vec![None; view.n()],
        strategy_odd: vec![None; view.n()],
    };
    zielonka(view, color, &sub, &mut inner);
    let (inner_player, inner_opp) = if even_plays {
        (&inner.win_even, &inner.win_odd)
    } else {
        (&inner.win_odd, &inner.win_even)
    };
    if inner_opp.is_empty() {
        // The top-color player wins everywhere in `mask`: attract to the top
        // color, move freely inside the mask on top vertices, and follow the
        // subgame strategy elsewhere.
        let (win, strat, strat_opp, inner_strat, inner_strat_opp) = if even_plays {
            (
                &mut res.win_even,
                &mut res.strategy_even,
                &mut res.strategy_odd,
                &inner.strategy_even,
                &inner.strategy_odd,
            )
        } else {
            (
                &mut res.win_odd,
                &mut res.strategy_odd,
                &mut res.strategy_even,
                &inner.strategy_odd,
                &inner.strategy_even,
            )
        };
        win.union_with(mask);
        for v in mask.iter() {
            if view.eve[v] == even_plays {
                strat[v] = if top.contains(v) {
                    view.succ[v].iter().copied().find(|w| mask.contains(*w))
                } else if attr.region.contains(v) {
                    attr.strategy[v].or_else(|| {
                        // Target vertices of the attractor keep freedom; pin
                        // them to the lowest in-mask successor.
                        view.succ[v].iter().copied().find(|w| mask.contains(*w))
                    })
                } else {
                    inner_strat[v]
                };
            } else {
                // The loser still gets a (futile) positional choice so that
                // strategy tables are total on their vertices.
                strat_opp[v] = inner_strat_opp[v]
                    .or_else(|| view.succ[v].iter().copied().find(|w| mask.contains(*w)));
            }
        }
        let _ = inner_player;
    } else {
        // The opponent of the top color wins at least their subgame region:
        // remove its attractor and re-solve the rest.
        let opp_attr = attractor_within(view, mask, inner_opp, !even_plays);
        let rest = mask.difference(&opp_attr.region);
        zielonka(view, color, &rest, res);
        let (win_opp, strat_opp, inner_strat_opp) = if even_plays {
            (&mut res.win_odd, &mut res.strategy_odd, &inner.strategy_odd)
        } else {
            (&mut res.win_even, &mut res.strategy_even, &inner.strategy_even)
        };
        win_opp.union_with(&opp_attr.region);
        for v in opp_attr.region.iter() {
            if view.eve[v] != even_plays {
                strat_opp[v] = if inner_opp.contains(v) {
                    inner_strat_opp[v]
                } else {
                    opp_attr.strategy[v]
                };
            }
        }
    }
}

/// Product of a game graph with a latest-appearance record over "atoms"
/// (interchangeability classes of vertices), reducing a Muller condition to
/// max-parity.
#[derive(Clone, Debug)]
pub struct MullerParityProduct {
    pub view: TwoPlayerView,
    pub color: Vec<u8>,
    /// Base vertex of each product state.
    pub base_of: Vec<usize>,
    /// Product start state for each base vertex (entered with the canonical
    /// record).
    pub init_of: Vec<usize>,
    /// Atom class of each base vertex.
    pub atom_of: Vec<usize>,
    /// Atom set of the record's hit prefix at each product state. Along a
    /// run, the prefixes visited infinitely often are exactly the subsets
    /// (in record order) of the set of atoms visited infinitely often, so a
    /// condition monotone in the atom set can be read off state-locally.
    pub prefix: Vec<BitSet>,
}

/// Build the record product. The Muller condition is given as a family over
/// *atom sets*: `family(A)` must equal the condition's value on any vertex
/// set whose atom classes are exactly `A` (see
/// [`Circuit::interchange_classes`]). Fails once more than `max_states`
/// product states are materialized.
pub fn reduce_muller_to_parity(
    view: &TwoPlayerView,
    atom_of: &[usize],
    n_atoms: usize,
    family: &dyn Fn(&BitSet) -> bool,
    max_states: usize,
) -> Result<MullerParityProduct> {
    let n = view.n();
    if n_atoms > 100 {
        return Err(Error::GuardExceeded(format!(
            "record reduction over {n_atoms} atoms exceeds the color range"
        )));
    }
    type Key = (usize, Vec<u8>, u8);
    let mut index: std::collections::HashMap<Key, usize> = Default::default();
    let mut states: Vec<Key> = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = Default::default();
    let mut intern = |key: Key,
                      states: &mut Vec<Key>,
                      queue: &mut std::collections::VecDeque<usize>|
     -> Result<usize> {
        if let Some(&s) = index.get(&key) {
            return Ok(s);
        }
        let s = states.len();
        if s >= max_states {
            return Err(Error::GuardExceeded(format!(
                "record product exceeds {max_states} states"
            )));
        }
        index.insert(key.clone(), s);
        states.push(key);
        queue.push_back(s);
        Ok(s)
    };

    let enter = |record: &[u8], v: usize| -> (Vec<u8>, u8) {
        let a = atom_of[v] as u8;
        let h = record.iter().position(|&x| x == a).expect("atom in record") as u8;
        let mut rec = Vec::with_capacity(record.len());
        rec.push(a);
        rec.extend(record.iter().copied().filter(|&x| x != a));
        (rec, h)
    };

    let canonical: Vec<u8> = (0..n_atoms as u8).collect();
    let mut init_of = vec![usize::MAX; n];
    for v in 0..n {
        let (rec, h) = enter(&canonical, v);
        init_of[v] = intern((v, rec, h), &mut states, &mut queue)?;
    }
    let mut succ: Vec<Vec<usize>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let (v, rec, _) = states[s].clone();
        let mut out = Vec::with_capacity(view.succ[v].len());
        for &w in &view.succ[v] {
            let (rec2, h2) = enter(&rec, w);
            out.push(intern((w, rec2, h2), &mut states, &mut queue)?);
        }
        while succ.len() <= s {
            succ.push(Vec::new());
        }
        succ[s] = out;
    }
    while succ.len() < states.len() {
        succ.push(Vec::new());
    }

    let mut color = Vec::with_capacity(states.len());
    let mut base_of = Vec::with_capacity(states.len());
    let mut eve = Vec::with_capacity(states.len());
    let mut prefixes = Vec::with_capacity(states.len());
    for (v, rec, h) in &states {
        let mut prefix = BitSet::new(n_atoms);
        for &a in rec.iter().take(*h as usize + 1) {
            prefix.insert(a as usize);
        }
        color.push(2 * (*h as u8 + 1) + if family(&prefix) { 0 } else { 1 });
        base_of.push(*v);
        eve.push(view.eve[*v]);
        prefixes.push(prefix);
    }
    Ok(MullerParityProduct {
        view: TwoPlayerView { eve, succ },
        color,
        base_of,
        init_of,
        atom_of: atom_of.to_vec(),
        prefix: prefixes,
    })
}

/// Eve's winning region of the two-player game with the Muller condition
/// "the circuit accepts the set of infinitely visited vertices".
///
/// The record is kept over interchangeability classes of the circuit;
/// `max_atoms` bounds the classes the circuit's support may induce and
/// `max_states` bounds the materialized record product.
pub fn muller_winners(
    view: &TwoPlayerView,
    circuit: &Circuit,
    max_atoms: usize,
    max_states: usize,
) -> Result<BitSet> {
    let n = view.n();
    assert_eq!(circuit.n_inputs, n);
    let atom_of = circuit.interchange_classes();
    let n_atoms = atom_of.iter().max().map_or(0, |m| m + 1);
    let referenced = circuit.inputs();
    let tracked: std::collections::BTreeSet<usize> =
        referenced.iter().map(|v| atom_of[v]).collect();
    if tracked.len() > max_atoms {
        return Err(Error::GuardExceeded(format!(
            "muller condition needs {} record symbols (limit {max_atoms})",
            tracked.len()
        )));
    }
    let mut members: Vec<BitSet> = vec![BitSet::new(n); n_atoms];
    for (v, &a) in atom_of.iter().enumerate() {
        members[a].insert(v);
    }
    let family = |atoms: &BitSet| -> bool {
        let mut set = BitSet::new(n);
        for a in atoms.iter() {
            set.union_with(&members[a]);
        }
        circuit.eval(&set)
    };
    let product = reduce_muller_to_parity(view, &atom_of, n_atoms, &family, max_states)?;
    let parity = solve_parity(&product.view, &product.color);
    let mut win = BitSet::new(n);
    for v in 0..n {
        if parity.win_even.contains(product.init_of[v]) {
            win.insert(v);
        }
    }
    Ok(win)
}

/// Which set (infinitely visited or visited at least once) a circuit is
/// evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetMode {
    Inf,
    Occ,
}

/// Search for a lasso from `start` whose cycle set satisfies `accept`.
/// `accept` sees the set of vertices on the cycle; the cycle set is always
/// "closed" (it induces a strongly connected subgraph with at least one
/// edge). Witnesses are deterministic: SCCs ordered by minimal vertex,
/// subsets in ascending mask order, lowest vertices first.
///
/// `disj`/`conj` enable fast paths for conditions known to be a pure
/// disjunction ("hit this set") or pure conjunction ("contain this set");
/// otherwise SCCs larger than `max_enum` are refused.
pub fn find_accepted_cycle(
    succ: &[Vec<usize>],
    start: usize,
    accept: &dyn Fn(&BitSet) -> bool,
    disj: Option<&BitSet>,
    conj: Option<&BitSet>,
    max_enum: usize,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = succ.len();
    let reachable = reach_set(succ, start);
    for scc in sccs_within(succ, &reachable) {
        let scc_set = BitSet::from_indices(n, &scc);
        let cyclic = scc.len() > 1 || succ[scc[0]].contains(&scc[0]);
        if !cyclic {
            continue;
        }
        if let Some(d) = disj {
            if let Some(v) = scc.iter().copied().find(|&v| d.contains(v)) {
                let cycle = cover_walk(succ, &scc_set, &[v]);
                return Ok(Some((shortest_path(succ, start, cycle[0]), cycle)));
            }
            continue;
        }
        if let Some(c) = conj {
            if c.is_subset(&scc_set) && accept(&scc_set) {
                let cycle = cover_walk(succ, &scc_set, &scc);
                return Ok(Some((shortest_path(succ, start, cycle[0]), cycle)));
            }
            continue;
        }
        if scc.len() > max_enum {
            return Err(Error::GuardExceeded(format!(
                "cycle search in a {}-vertex component (limit {max_enum})",
                scc.len()
            )));
        }
        for mask in 1u32..(1 << scc.len()) {
            let subset: Vec<usize> = (0..scc.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| scc[i])
                .collect();
            let set = BitSet::from_indices(n, &subset);
            if !induced_cycle_set(succ, &subset, &set) {
                continue;
            }
            if accept(&set) {
                let cycle = cover_walk(succ, &set, &subset);
                return Ok(Some((shortest_path(succ, start, cycle[0]), cycle)));
            }
        }
    }
    Ok(None)
}

/// Find a lasso from the game's initial vertex satisfying a circuit in the
/// given mode. Occ mode unfolds by visited sets first (guarded) and maps the
/// witness back to base vertices.
pub fn cooperative_emptiness(
    game: &Game,
    circuit: &Circuit,
    mode: SetMode,
    allow_large: bool,
) -> Result<Option<Lasso>> {
    match mode {
        SetMode::Inf => {
            let disj = circuit.as_disjunction();
            let conj = circuit.as_conjunction();
            let found = find_accepted_cycle(
                &game.succ,
                game.init,
                &|set| circuit.eval(set),
                disj.as_ref(),
                conj.as_ref(),
                15,
            )?;
            Ok(found.map(|(stem, cycle)| Lasso::new(stem, cycle)))
        }
        SetMode::Occ => {
            let u = crate::game::unfold_visited(game, &[game.init], allow_large)?;
            // On the unfolding, the visited set is constant along any cycle,
            // so the weak condition holds iff the cycle lies in an accepted
            // stratum.
            let accept = |set: &BitSet| {
                let s = set.first().expect("nonempty cycle set");
                circuit.eval(&u.memory_of[s])
            };
            let found =
                find_accepted_cycle(&u.game.succ, u.game.init, &accept, None, None, 15)?;
            Ok(found.map(|(stem, cycle)| {
                Lasso::new(
                    stem.into_iter().map(|s| u.base_of[s]).collect(),
                    cycle.into_iter().map(|s| u.base_of[s]).collect(),
                )
            }))
        }
    }
}

/// Vertices reachable from `start` (including it).
pub fn reach_set(succ: &[Vec<usize>], start: usize) -> BitSet {
    let mut seen = BitSet::new(succ.len());
    seen.insert(start);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if !seen.contains(v) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Strongly connected components of the subgraph induced by `mask`, each
/// sorted ascending, components ordered by their minimal vertex. The work
/// is proportional to the induced subgraph, not the full arena, since
/// callers probe many small masks.
pub fn sccs_within(succ: &[Vec<usize>], mask: &BitSet) -> Vec<Vec<usize>> {
    let members: Vec<usize> = mask.iter().collect();
    let k = members.len();
    let lid = |v: usize| members.binary_search(&v).ok();
    let mut index = vec![usize::MAX; k];
    let mut low = vec![0usize; k];
    let mut on_stack = vec![false; k];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0;
    let mut out: Vec<Vec<usize>> = Vec::new();
    // Iterative Tarjan; each frame keeps its progress through the
    // successor list.
    for s in 0..k {
        if index[s] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(s, 0)];
        while !call.is_empty() {
            let fi = call.len() - 1;
            let v = call[fi].0;
            if call[fi].1 == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let vs = &succ[members[v]];
            let mut descended = false;
            while call[fi].1 < vs.len() {
                let t = vs[call[fi].1];
                call[fi].1 += 1;
                let Some(w) = lid(t) else { continue };
                if index[w] == usize::MAX {
                    call.push((w, 0));
                    descended = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if descended {
                continue;
            }
            call.pop();
            if let Some(parent) = call.last() {
                low[parent.0] = low[parent.0].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    comp.push(members[w]);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Does `subset` induce a strongly connected subgraph with at least one
/// edge (i.e. can a single cycle visit exactly this set)?
fn induced_cycle_set(succ: &[Vec<usize>], subset: &[usize], set: &BitSet) -> bool {
    if subset.len() == 1 {
        return succ[subset[0]].contains(&subset[0]);
    }
    // Forward reachability from the first member within the set, then on
    // the reversed induced graph.
    let full = |reverse: bool| -> bool {
        let mut seen = vec![false; subset.len()];
        let idx = |v: usize| subset.binary_search(&v).unwrap();
        seen[0] = true;
        let mut stack = vec![subset[0]];
        while let Some(u) = stack.pop() {
            for (a, b) in subset.iter().flat_map(|&x| {
                succ[x]
                    .iter()
                    .filter(|&&y| set.contains(y))
                    .map(move |&y| (x, y))
            }) {
                let (from, to) = if reverse { (b, a) } else { (a, b) };
                if from == u && !seen[idx(to)] {
                    seen[idx(to)] = true;
                    stack.push(to);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    full(false) && full(true)
}

/// A closed walk inside `set` starting at the lowest of `must_visit`,
/// covering all of `must_visit`, returned without the repeated endpoint.
pub(crate) fn cover_walk(succ: &[Vec<usize>], set: &BitSet, must_visit: &[usize]) -> Vec<usize> {
    let start = *must_visit.iter().min().expect("nonempty");
    if must_visit.len() == 1 && succ[start].iter().any(|&w| w == start) {
        return vec![start];
    }
    let mut walk = vec![start];
    let mut cur = start;
    let mut remaining: Vec<usize> =
        must_visit.iter().copied().filter(|&v| v != start).collect();
    remaining.sort_unstable();
    while !remaining.is_empty() {
        // Nearest remaining target (lowest id among nearest).
        let path = bfs_to_nearest(succ, set, cur, &remaining);
        cur = *path.last().unwrap();
        walk.extend_from_slice(&path[1..]);
        remaining.retain(|&v| v != cur);
    }
    let back = bfs_to_nearest(succ, set, cur, &[start]);
    walk.extend_from_slice(&back[1..]);
    debug_assert_eq!(*walk.last().unwrap(), start);
    walk.pop();
    walk
}

/// Shortest nonempty path within `set` from `from` to the nearest of
/// `targets` (ties: lowest vertex id); `from` itself only counts as a
/// target when re-entered. Panics if unreachable — callers guarantee
/// strong connectivity.
fn bfs_to_nearest(
    succ: &[Vec<usize>],
    set: &BitSet,
    from: usize,
    targets: &[usize],
) -> Vec<usize> {
    let n = succ.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut layer: Vec<usize> = vec![from];
    let mut seen = BitSet::new(n);
    loop {
        assert!(!layer.is_empty(), "target reachable within set");
        let mut next: Vec<usize> = Vec::new();
        for &u in &layer {
            for &v in &succ[u] {
                if set.contains(v) && !seen.contains(v) {
                    seen.insert(v);
                    parent[v] = Some(u);
                    next.push(v);
                }
            }
        }
        let mut hits: Vec<usize> =
            next.iter().copied().filter(|v| targets.contains(v)).collect();
        hits.sort_unstable();
        if let Some(&target) = hits.first() {
            let mut path = vec![target];
            let mut cur = target;
            loop {
                let p = parent[cur].expect("parent chain reaches start");
                path.push(p);
                if p == from {
                    break;
                }
                cur = p;
            }
            path.reverse();
            return path;
        }
        layer = next;
    }
}

/// Shortest path from `from` up to but excluding `to` (suitable as a lasso
/// stem); empty when they coincide. Ties are broken by BFS discovery order
/// over ascending successor lists.
pub fn shortest_path(succ: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let n = succ.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = BitSet::new(n);
    seen.insert(from);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if !seen.contains(v) {
                seen.insert(v);
                parent[v] = Some(u);
                if v == to {
                    queue.clear();
                    break;
                }
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    assert_eq!(cur, from, "target not reachable");
    path.reverse();
    // The stem excludes the cycle entry point.
    path.pop();
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_view(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> TwoPlayerView {
        let eve = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let succ = (0..n)
            .map(|_| {
                let deg = rng.gen_range(1..=max_deg);
                let mut s: Vec<usize> = (0..deg).map(|_| rng.gen_range(0..n)).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        TwoPlayerView { eve, succ }
    }

    /// Where the protagonist of `for_even_shift == 0` (odd-max cycles) can
    /// win alone; shifting colors by 1 flips the objective.
    fn one_player_best_response(succ: &[Vec<usize>], color: &[u8], want_even: bool) -> BitSet {
        let shifted: Vec<u8> =
            color.iter().map(|&c| if want_even { c + 1 } else { c }).collect();
        brute::one_player_odd_cycle_region(succ, &shifted)
    }

    #[test]
    fn attractor_respects_ownership() {
        // 0 (Eve) -> 1|2, 1 (Adam) -> 0|3, 2 (Adam) -> 2, 3 (Eve) -> 3.
        let view = TwoPlayerView {
            eve: vec![true, false, false, true],
            succ: vec![vec![1, 2], vec![0, 3], vec![2], vec![3]],
        };
        let target = BitSet::from_indices(4, &[3]);
        let eve_attr = attractor(&view, &target, true);
        // Adam at 1 can dodge to 0, Eve at 0 cannot force 3.
        assert_eq!(eve_attr.region, BitSet::from_indices(4, &[3]));
        let adam_attr = attractor(&view, &target, false);
        // Adam at 1 moves to 3, but Eve at 0 picks 2.
        assert_eq!(adam_attr.region, BitSet::from_indices(4, &[1, 3]));
        assert_eq!(adam_attr.strategy[1], Some(3));
    }

    #[test]
    fn safety_regions_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let bad: BitSet = {
                let mut b = BitSet::new(n);
                b.insert(rng.gen_range(0..n));
                b
            };
            let res = solve_safety(&view, &bad);
            assert!(!res.win.intersects(&bad));
            for v in res.win.iter() {
                if view.eve[v] {
                    let t = res.strategy[v].expect("winning Eve vertex has a move");
                    assert!(res.win.contains(t));
                } else {
                    assert!(view.succ[v].iter().all(|&w| res.win.contains(w)));
                }
            }
        }
    }

    #[test]
    fn parity_matches_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let color: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let res = solve_parity(&view, &color);
            // Determinacy: the two regions partition the vertices.
            assert!(!res.win_even.intersects(&res.win_odd));
            assert_eq!(res.win_even.union(&res.win_odd), BitSet::full(n));
            let oracle = brute::parity_winners_by_enumeration(&view, &color);
            assert_eq!(res.win_even, oracle, "view {view:?} colors {color:?}");
            // The returned strategies must actually win: fix them and let
            // the opponent compute an exact best response.
            let even_fixed: Vec<Vec<usize>> = (0..n)
                .map(|v| {
                    if view.eve[v] && res.win_even.contains(v) {
                        vec![res.strategy_even[v].expect("strategy on winning vertex")]
                    } else {
                        view.succ[v].clone()
                    }
                })
                .collect();
            let spoiler = one_player_best_response(&even_fixed, &color, false);
            assert!(!spoiler.intersects(&res.win_even), "even strategy fails");
            let odd_fixed: Vec<Vec<usize>> = (0..n)
                .map(|v| {
                    if !view.eve[v] && res.win_odd.contains(v) {
                        vec![res.strategy_odd[v].expect("strategy on winning vertex")]
                    } else {
                        view.succ[v].clone()
                    }
                })
                .collect();
            let spoiler = one_player_best_response(&odd_fixed, &color, true);
            assert!(!spoiler.intersects(&res.win_odd), "odd strategy fails");
        }
    }

    #[test]
    fn buchi_agrees_with_parity_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let mut acc = BitSet::new(n);
            for v in 0..n {
                if rng.gen_bool(0.4) {
                    acc.insert(v);
                }
            }
            let colors: Vec<u8> = (0..n).map(|v| if acc.contains(v) { 2 } else { 1 }).collect();
            assert_eq!(solve_buchi(&view, &acc), solve_parity(&view, &colors).win_even);
        }
    }

    /// "The maximal color of the infinitely visited vertices is even" as a
    /// circuit over vertex sets.
    fn parity_circuit(n: usize, color: &[u8]) -> Circuit {
        let mut result = Circuit::constant(n, false);
        let max = color.iter().copied().max().unwrap_or(0);
        for c in (0..=max).filter(|c| c % 2 == 0) {
            let at_c: Vec<usize> = (0..n).filter(|&v| color[v] == c).collect();
            let above: Vec<usize> = (0..n).filter(|&v| color[v] > c).collect();
            if at_c.is_empty() {
                continue;
            }
            let at_c = BitSet::from_indices(n, &at_c);
            let above = BitSet::from_indices(n, &above);
            let term = Circuit::or_of_set(n, &at_c).and(&Circuit::or_of_set(n, &above).negate());
            result = result.or(&term);
        }
        result
    }

    #[test]
    fn record_reduction_agrees_with_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let color: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let circuit = parity_circuit(n, &color);
            let win = muller_winners(&view, &circuit, 10, 1 << 20).unwrap();
            assert_eq!(win, solve_parity(&view, &color).win_even);
        }
    }

    #[test]
    fn record_reduction_agrees_with_buchi() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..60 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let mut acc_list = Vec::new();
            for v in 0..n {
                if rng.gen_bool(0.4) {
                    acc_list.push(v);
                }
            }
            let acc = BitSet::from_indices(n, &acc_list);
            let circuit = Circuit::or_of_set(n, &acc);
            let win = muller_winners(&view, &circuit, 10, 1 << 20).unwrap();
            assert_eq!(win, solve_buchi(&view, &acc));
        }
    }

    fn random_cycle_circuit(rng: &mut ChaCha8Rng, n: usize) -> Circuit {
        let pick = |rng: &mut ChaCha8Rng| -> BitSet {
            (0..n).filter(|_| rng.gen_bool(0.4)).collect::<Vec<_>>().into_iter().collect()
        };
        match rng.gen_range(0..4) {
            0 => Circuit::or_of_set(n, &pick(rng)),
            1 => Circuit::and_of_set(n, &pick(rng)),
            2 => Circuit::or_of_set(n, &pick(rng)).and(&Circuit::or_of_set(n, &pick(rng)).negate()),
            _ => Circuit::and_of_set(n, &pick(rng)).or(&Circuit::or_of_set(n, &pick(rng))),
        }
    }

    #[test]
    fn cycle_search_matches_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for round in 0..150 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let circuit = random_cycle_circuit(&mut rng, n);
            let accept = |set: &BitSet| circuit.eval(set);
            let found = find_accepted_cycle(&view.succ, 0, &accept, None, None, 15).unwrap();
            let exists = brute::cycle_set_exists(&view.succ, 0, &accept);
            assert_eq!(found.is_some(), exists, "round {round}");
            if let Some((stem, cycle)) = found {
                let mut path = stem.clone();
                path.extend_from_slice(&cycle);
                path.push(cycle[0]);
                assert_eq!(path[0], 0);
                for w in path.windows(2) {
                    assert!(view.succ[w[0]].contains(&w[1]), "not an edge: {w:?}");
                }
                let inf = BitSet::from_indices(n, &cycle);
                assert!(accept(&inf), "cycle set not accepted");
            }
        }
    }

    #[test]
    fn cycle_search_fast_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let view = random_view(&mut rng, n, 3);
            let set: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            let bits = BitSet::from_indices(n, &set);

            let disj_circuit = Circuit::or_of_set(n, &bits);
            let accept = |s: &BitSet| disj_circuit.eval(s);
            let fast =
                find_accepted_cycle(&view.succ, 0, &accept, Some(&bits), None, 15).unwrap();
            let slow = find_accepted_cycle(&view.succ, 0, &accept, None, None, 15).unwrap();
            assert_eq!(fast.is_some(), slow.is_some());

            let conj_circuit = Circuit::and_of_set(n, &bits);
            let accept = |s: &BitSet| conj_circuit.eval(s);
            let fast =
                find_accepted_cycle(&view.succ, 0, &accept, None, Some(&bits), 15).unwrap();
            let slow = find_accepted_cycle(&view.succ, 0, &accept, None, None, 15).unwrap();
            assert_eq!(fast.is_some(), slow.is_some());
            if let Some((_, cycle)) = fast {
                assert!(conj_circuit.eval(&BitSet::from_indices(n, &cycle)));
            }
        }
    }
}
