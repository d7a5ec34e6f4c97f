//! Multiplayer turn-based games on finite directed graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub type Player = usize;
pub type Vertex = usize;

/// A player's objective over infinite plays.
#[derive(Clone, Debug)]
pub enum Objective {
    /// Win iff no vertex of `bad` is ever visited.
    Safety { bad: BitSet },
    /// Win iff some vertex of `good` is visited.
    Reachability { good: BitSet },
    /// Win iff `acc` is visited infinitely often.
    Buchi { acc: BitSet },
    /// Win iff the maximal color seen infinitely often is even.
    Parity { color: Vec<u8> },
    /// Win iff the circuit accepts the set of vertices visited infinitely
    /// often.
    Muller { circuit: Circuit },
    /// Win iff the circuit accepts the set of vertices visited at least
    /// once.
    Weak { circuit: Circuit },
}

impl Objective {
    /// Short kind tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Objective::Safety { .. } => "safety",
            Objective::Reachability { .. } => "reachability",
            Objective::Buchi { .. } => "buchi",
            Objective::Parity { .. } => "parity",
            Objective::Muller { .. } => "muller",
            Objective::Weak { .. } => "weak",
        }
    }

    /// Whether the winner of a play depends only on its infinite tail.
    pub fn is_prefix_independent(&self) -> bool {
        matches!(
            self,
            Objective::Buchi { .. } | Objective::Parity { .. } | Objective::Muller { .. }
        )
    }
}

/// A turn-based game: each vertex is controlled by one player, every vertex
/// has at least one outgoing edge, and every player has one objective.
#[derive(Clone, Debug)]
pub struct Game {
    pub player_names: Vec<String>,
    pub vertex_names: Vec<String>,
    pub owner: Vec<Player>,
    /// Successor lists in ascending vertex order.
    pub succ: Vec<Vec<Vertex>>,
    /// Predecessor lists in ascending vertex order.
    pub pred: Vec<Vec<Vertex>>,
    /// All edges sorted lexicographically; the position is the edge id.
    pub edges: Vec<(Vertex, Vertex)>,
    pub objectives: Vec<Objective>,
    pub init: Vertex,
}

impl Game {
    /// Build a game and check all structural invariants.
    pub fn new(
        player_names: Vec<String>,
        vertex_names: Vec<String>,
        owner: Vec<Player>,
        edge_list: Vec<(Vertex, Vertex)>,
        objectives: Vec<Objective>,
        init: Vertex,
    ) -> Result<Game> {
        let n = vertex_names.len();
        let mut edges = edge_list;
        edges.sort_unstable();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u},{v}) out of range")));
            }
            succ[u].push(v);
            pred[v].push(u);
        }
        for p in pred.iter_mut() {
            p.sort_unstable();
        }
        let game = Game {
            player_names,
            vertex_names,
            owner,
            succ,
            pred,
            edges,
            objectives,
            init,
        };
        let issues = game.validate();
        if issues.is_empty() {
            Ok(game)
        } else {
            Err(Error::Invalid(issues.join("; ")))
        }
    }

    /// Check structural invariants; returns a list of human-readable issues
    /// (empty when the game is well-formed).
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let n = self.n_vertices();
        let p = self.n_players();
        if p == 0 {
            issues.push("no players".to_string());
        }
        if n == 0 {
            issues.push("no vertices".to_string());
        }
        for (names, what) in [(&self.player_names, "player"), (&self.vertex_names, "vertex")] {
            let mut seen = std::collections::HashSet::new();
            for name in names.iter() {
                if name.is_empty() || name.contains([',', ' ', '\t']) {
                    issues.push(format!("bad {what} name `{name}`"));
                }
                if !seen.insert(name) {
                    issues.push(format!("duplicate {what} name `{name}`"));
                }
            }
        }
        if self.owner.len() != n {
            issues.push("owner table size mismatch".to_string());
        }
        for (v, &o) in self.owner.iter().enumerate() {
            if o >= p {
                issues.push(format!("vertex {} owned by unknown player {o}", self.vname(v)));
            }
        }
        for (v, s) in self.succ.iter().enumerate() {
            if s.is_empty() {
                issues.push(format!("vertex {} has no successor", self.vname(v)));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                issues.push(format!("duplicate edge from {}", self.vname(v)));
            }
        }
        if self.objectives.len() != p {
            issues.push("one objective per player required".to_string());
        }
        for (i, o) in self.objectives.iter().enumerate() {
            let ok = match o {
                Objective::Safety { bad } => bad.len() == n,
                Objective::Reachability { good } => good.len() == n,
                Objective::Buchi { acc } => acc.len() == n,
                Objective::Parity { color } => color.len() == n,
                Objective::Muller { circuit } | Objective::Weak { circuit } => {
                    circuit.n_inputs == n
                }
            };
            if !ok {
                issues.push(format!("objective of player {} sized to a different game", self.pname(i)));
            }
        }
        if self.init >= n {
            issues.push("initial vertex out of range".to_string());
        }
        issues
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn n_players(&self) -> usize {
        self.player_names.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edge id of (u,v), if present.
    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edges.binary_search(&(u, v)).ok()
    }

    pub fn vname(&self, v: Vertex) -> &str {
        &self.vertex_names[v]
    }

    pub fn pname(&self, p: Player) -> &str {
        &self.player_names[p]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn player_by_name(&self, name: &str) -> Option<Player> {
        self.player_names.iter().position(|n| n == name)
    }

    /// Vertices owned by a player.
    pub fn owned_by(&self, p: Player) -> BitSet {
        let mut s = BitSet::new(self.n_vertices());
        for (v, &o) in self.owner.iter().enumerate() {
            if o == p {
                s.insert(v);
            }
        }
        s
    }

    /// Does `player` win the run `stem · cycle^ω`?
    pub fn wins(&self, player: Player, lasso: &Lasso) -> bool {
        let occ = lasso.occ_set(self.n_vertices());
        let inf = lasso.inf_set(self.n_vertices());
        match &self.objectives[player] {
            Objective::Safety { bad } => !occ.intersects(bad),
            Objective::Reachability { good } => occ.intersects(good),
            Objective::Buchi { acc } => inf.intersects(acc),
            Objective::Parity { color } => {
                let m = inf.iter().map(|v| color[v]).max().unwrap_or(0);
                m % 2 == 0
            }
            Objective::Muller { circuit } => circuit.eval(&inf),
            Objective::Weak { circuit } => circuit.eval(&occ),
        }
    }
}

/// An ultimately periodic play `stem · cycle^ω`. The stem may be empty; the
/// cycle may not. Consecutive vertices (including the wrap-around and the
/// stem-to-cycle seam) must be edges of the game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub stem: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    pub fn new(stem: Vec<Vertex>, cycle: Vec<Vertex>) -> Self {
        Lasso { stem, cycle }
    }

    /// First vertex of the play.
    pub fn start(&self) -> Vertex {
        *self.stem.first().unwrap_or(&self.cycle[0])
    }

    /// Check that every step of the lasso is an edge of the game.
    pub fn check_edges(&self, game: &Game) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::Invalid("lasso cycle is empty".into()));
        }
        let steps = self.steps();
        for (u, v) in steps {
            if game.edge_id(u, v).is_none() {
                return Err(Error::Invalid(format!(
                    "lasso step {} -> {} is not an edge",
                    game.vname(u),
                    game.vname(v)
                )));
            }
        }
        Ok(())
    }

    /// All consecutive pairs of the play (stem, seam, cycle, wrap-around).
    pub fn steps(&self) -> Vec<(Vertex, Vertex)> {
        let mut path: Vec<Vertex> = Vec::with_capacity(self.stem.len() + self.cycle.len() + 1);
        path.extend_from_slice(&self.stem);
        path.extend_from_slice(&self.cycle);
        path.push(self.cycle[0]);
        path.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Vertices visited at least once.
    pub fn occ_set(&self, n: usize) -> BitSet {
        let mut s = BitSet::new(n);
        for &v in self.stem.iter().chain(&self.cycle) {
            s.insert(v);
        }
        s
    }

    /// Vertices visited infinitely often.
    pub fn inf_set(&self, n: usize) -> BitSet {
        let mut s = BitSet::new(n);
        for &v in &self.cycle {
            s.insert(v);
        }
        s
    }
}

/// Classification of the value word of a play for one player.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueSequence {
    /// The value is 0 forever.
    AllZero,
    /// Finitely many 0s, then 1 forever.
    ZeroThenOne,
    /// Finitely many 0s, then -1 forever.
    ZeroThenMinusOne,
    /// Anything else (such plays are never outcomes of admissible
    /// strategies).
    Other,
}

/// Classify the infinite value word of `lasso` under the per-vertex value
/// table `value`.
pub fn lasso_value_sequence(lasso: &Lasso, value: impl Fn(Vertex) -> i8) -> ValueSequence {
    let cycle: Vec<i8> = lasso.cycle.iter().map(|&v| value(v)).collect();
    let c = cycle[0];
    if cycle.iter().any(|&x| x != c) {
        return ValueSequence::Other;
    }
    let stem: Vec<i8> = lasso.stem.iter().map(|&v| value(v)).collect();
    // The stem must be zeros followed by copies of the cycle's constant.
    let zeros = stem.iter().take_while(|&&x| x == 0).count();
    if stem[zeros..].iter().any(|&x| x != c) {
        return ValueSequence::Other;
    }
    match c {
        0 => {
            if zeros == stem.len() {
                ValueSequence::AllZero
            } else {
                ValueSequence::Other
            }
        }
        1 => ValueSequence::ZeroThenOne,
        -1 => ValueSequence::ZeroThenMinusOne,
        _ => ValueSequence::Other,
    }
}

/// Result of unfolding a game with per-history memory (lost players or
/// visited set).
#[derive(Clone, Debug)]
pub struct Unfolded {
    pub game: Game,
    /// Base vertex of each unfolded state.
    pub base_of: Vec<Vertex>,
    /// Memory component of each unfolded state (players lost so far, or
    /// vertices visited so far).
    pub memory_of: Vec<BitSet>,
    index: BTreeMap<(BitSet, Vertex), Vertex>,
}

impl Unfolded {
    /// Unfolded state for (memory, base vertex), if reachable.
    pub fn state_of(&self, memory: &BitSet, base: Vertex) -> Option<Vertex> {
        self.index.get(&(memory.clone(), base)).copied()
    }
}

/// Unfold a game by the set of players who have already lost their safety
/// objective. States are pairs (L, v); taking an edge to v' extends L with
/// every safety player whose bad set contains v'. One start state is
/// materialized per requested base start.
///
/// Safety objectives become "never visit a state where I have lost" (an
/// absorbing set, so the winner depends only on the infinitely visited
/// states); prefix-independent objectives are lifted through the base
/// projection. Reachability and weak objectives stay prefix-dependent even
/// here and are refused.
pub fn unfold_lost(game: &Game, starts: &[Vertex]) -> Result<Unfolded> {
    let p = game.n_players();
    for o in &game.objectives {
        if matches!(o, Objective::Reachability { .. } | Objective::Weak { .. }) {
            return Err(Error::Unsupported(format!(
                "lost-set unfolding does not support {} objectives",
                o.kind()
            )));
        }
    }
    let lost_at = |v: Vertex| -> BitSet {
        let mut l = BitSet::new(p);
        for (i, o) in game.objectives.iter().enumerate() {
            if let Objective::Safety { bad } = o {
                if bad.contains(v) {
                    l.insert(i);
                }
            }
        }
        l
    };
    let step = |l: &BitSet, v: Vertex| -> BitSet {
        let mut l2 = l.clone();
        l2.union_with(&lost_at(v));
        l2
    };
    let mut u = unfold(game, starts, &lost_at, &step, |l: &BitSet| {
        let names: Vec<&str> = l.iter().map(|i| game.pname(i)).collect();
        if names.is_empty() {
            "-".to_string()
        } else {
            names.join("+")
        }
    })?;
    let un = u.game.n_vertices();
    let lift_set = |set: &BitSet| -> BitSet {
        let mut s = BitSet::new(un);
        for (st, &b) in u.base_of.iter().enumerate() {
            if set.contains(b) {
                s.insert(st);
            }
        }
        s
    };
    u.game.objectives = game
        .objectives
        .iter()
        .enumerate()
        .map(|(i, o)| match o {
            Objective::Safety { .. } => {
                // Player i's bad set becomes "states where i has lost".
                let mut b = BitSet::new(un);
                for (s, l) in u.memory_of.iter().enumerate() {
                    if l.contains(i) {
                        b.insert(s);
                    }
                }
                Objective::Safety { bad: b }
            }
            Objective::Buchi { acc } => Objective::Buchi { acc: lift_set(acc) },
            Objective::Parity { color } => Objective::Parity {
                color: u.base_of.iter().map(|&b| color[b]).collect(),
            },
            Objective::Muller { circuit } => {
                Objective::Muller { circuit: lift_circuit(circuit, un, &u.base_of) }
            }
            Objective::Reachability { .. } | Objective::Weak { .. } => unreachable!(),
        })
        .collect();
    Ok(u)
}

/// Product of a game with round-robin indices, one per player whose
/// objective is a conjunction of "hit this set infinitely often"
/// requirements. The index waits for the listed sets in cyclic order; the
/// transient position just past the last set is reached infinitely often
/// exactly when every listed set is, so it serves as a single Büchi set
/// equivalent to the conjunction. `lists[j] = Some(sets)` installs such an
/// index for player j; `None` keeps j's (plain Büchi) objective, lifted
/// through the base projection. Every objective of the result is Büchi.
pub(crate) fn unfold_counters(
    game: &Game,
    starts: &[Vertex],
    lists: &[Option<Vec<BitSet>>],
) -> Result<Unfolded> {
    let p = game.n_players();
    assert_eq!(lists.len(), p);
    for (j, o) in game.objectives.iter().enumerate() {
        if lists[j].is_none() && !matches!(o, Objective::Buchi { .. }) {
            return Err(Error::Unsupported(format!(
                "counter unfolding needs a hit-set list or a buchi objective for {}",
                game.pname(j)
            )));
        }
    }
    let mut offset = vec![0usize; p];
    let mut width = 0usize;
    for j in 0..p {
        if let Some(list) = &lists[j] {
            offset[j] = width;
            width += list.len() + 1;
        }
    }
    let decode = |mem: &BitSet, j: usize| -> usize {
        let l = lists[j].as_ref().expect("counter player").len();
        (offset[j]..=offset[j] + l)
            .find(|&b| mem.contains(b))
            .expect("one position per index")
            - offset[j]
    };
    let advance = |mem: &BitSet, v: Vertex| -> BitSet {
        let mut next = BitSet::new(width);
        for j in 0..p {
            if let Some(list) = &lists[j] {
                let l = list.len();
                let c = if mem.len() == 0 { 0 } else { decode(mem, j) };
                let awaited = if c == l { 0 } else { c };
                let c2 = if l > 0 && list[awaited].contains(v) { awaited + 1 } else { awaited };
                next.insert(offset[j] + c2);
            }
        }
        next
    };
    let fresh = BitSet::new(0);
    let init_mem = |v: Vertex| advance(&fresh, v);
    let step = |mem: &BitSet, w: Vertex| advance(mem, w);
    let mut u = unfold(game, starts, &init_mem, &step, |mem: &BitSet| {
        let ps: Vec<String> = (0..p)
            .filter(|&j| lists[j].is_some())
            .map(|j| decode(mem, j).to_string())
            .collect();
        if ps.is_empty() {
            "-".to_string()
        } else {
            ps.join(".")
        }
    })?;
    let un = u.game.n_vertices();
    u.game.objectives = game
        .objectives
        .iter()
        .enumerate()
        .map(|(j, o)| {
            let mut acc = BitSet::new(un);
            match &lists[j] {
                Some(list) => {
                    for (s, mem) in u.memory_of.iter().enumerate() {
                        if decode(mem, j) == list.len() {
                            acc.insert(s);
                        }
                    }
                }
                None => {
                    let base = match o {
                        Objective::Buchi { acc } => acc,
                        _ => unreachable!("checked above"),
                    };
                    for (s, &b) in u.base_of.iter().enumerate() {
                        if base.contains(b) {
                            acc.insert(s);
                        }
                    }
                }
            }
            Objective::Buchi { acc }
        })
        .collect();
    Ok(u)
}

/// Unfold a game by the set of visited vertices. States are pairs (R, v)
/// with v ∈ R. Exponential in the worst case, so games with more than 16
/// vertices are refused unless `allow_large` is set.
pub fn unfold_visited(game: &Game, starts: &[Vertex], allow_large: bool) -> Result<Unfolded> {
    let n = game.n_vertices();
    if n > 16 && !allow_large {
        return Err(Error::GuardExceeded(format!(
            "visited-set unfolding of a {n}-vertex game (limit 16; override to proceed)"
        )));
    }
    let singleton = |v: Vertex| BitSet::from_indices(n, &[v]);
    let step = |r: &BitSet, v: Vertex| -> BitSet {
        let mut r2 = r.clone();
        r2.insert(v);
        r2
    };
    let mut u = unfold(game, starts, &singleton, &step, |r: &BitSet| {
        r.iter().map(|v| game.vname(v)).collect::<Vec<_>>().join("+")
    })?;

    // Translate objectives onto unfolded states.
    let un = u.game.n_vertices();
    let lift_set = |set: &BitSet| -> BitSet {
        let mut s = BitSet::new(un);
        for (st, &b) in u.base_of.iter().enumerate() {
            if set.contains(b) {
                s.insert(st);
            }
        }
        s
    };
    u.game.objectives = game
        .objectives
        .iter()
        .map(|o| match o {
            Objective::Safety { bad } => Objective::Safety { bad: lift_set(bad) },
            Objective::Reachability { good } => {
                Objective::Reachability { good: lift_set(good) }
            }
            Objective::Buchi { acc } => Objective::Buchi { acc: lift_set(acc) },
            Objective::Parity { color } => Objective::Parity {
                color: u.base_of.iter().map(|&b| color[b]).collect(),
            },
            Objective::Muller { circuit } => {
                // Inf sets project onto base Inf sets: each base input
                // becomes the disjunction of its unfolded copies.
                Objective::Muller { circuit: lift_circuit(circuit, un, &u.base_of) }
            }
            Objective::Weak { circuit } => {
                // On a cycle of the unfolding the visited set is constant,
                // so the weak condition becomes a condition on the Inf set:
                // some infinitely-visited state carries an accepted stratum.
                let mut ok = BitSet::new(un);
                for (st, r) in u.memory_of.iter().enumerate() {
                    if circuit.eval(r) {
                        ok.insert(st);
                    }
                }
                Objective::Buchi { acc: ok }
            }
        })
        .collect();
    Ok(u)
}

/// Rewrite a circuit over base vertices into one over unfolded states.
fn lift_circuit(c: &Circuit, n_states: usize, base_of: &[Vertex]) -> Circuit {
    let mut copies: Vec<BitSet> = vec![BitSet::new(n_states); c.n_inputs];
    for (st, &b) in base_of.iter().enumerate() {
        copies[b].insert(st);
    }
    // Re-evaluate the base circuit with each input replaced by the
    // disjunction of its copies, by serializing through postfix.
    let text = c.to_postfix(|v| format!("@{v}"));
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut stack: Vec<Circuit> = Vec::new();
    for tok in tokens {
        match tok {
            "TRUE" => stack.push(Circuit::constant(n_states, true)),
            "FALSE" => stack.push(Circuit::constant(n_states, false)),
            "NOT" => {
                let a = stack.pop().expect("well-formed postfix");
                stack.push(a.negate());
            }
            "AND" | "OR" => {
                let b = stack.pop().expect("well-formed postfix");
                let a = stack.pop().expect("well-formed postfix");
                stack.push(if tok == "AND" { a.and(&b) } else { a.or(&b) });
            }
            name => {
                let v: usize = name[1..].parse().expect("input token");
                stack.push(Circuit::or_of_set(n_states, &copies[v]));
            }
        }
    }
    stack.pop().expect("nonempty circuit")
}

fn unfold(
    game: &Game,
    starts: &[Vertex],
    init_mem: &dyn Fn(Vertex) -> BitSet,
    step: &dyn Fn(&BitSet, Vertex) -> BitSet,
    mem_name: impl Fn(&BitSet) -> String,
) -> Result<Unfolded> {
    let mut starts: Vec<Vertex> = starts.to_vec();
    starts.sort_unstable();
    starts.dedup();
    if starts.is_empty() {
        return Err(Error::Invalid("no start vertices requested".into()));
    }
    let mut index: BTreeMap<(BitSet, Vertex), Vertex> = BTreeMap::new();
    let mut base_of: Vec<Vertex> = Vec::new();
    let mut memory_of: Vec<BitSet> = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = Default::default();
    let mut intern = |mem: BitSet,
                      v: Vertex,
                      base_of: &mut Vec<Vertex>,
                      memory_of: &mut Vec<BitSet>,
                      queue: &mut std::collections::VecDeque<usize>|
     -> usize {
        if let Some(&s) = index.get(&(mem.clone(), v)) {
            return s;
        }
        let s = base_of.len();
        index.insert((mem.clone(), v), s);
        base_of.push(v);
        memory_of.push(mem);
        queue.push_back(s);
        s
    };
    for &v in &starts {
        if v >= game.n_vertices() {
            return Err(Error::Invalid(format!("start vertex {v} out of range")));
        }
        intern(init_mem(v), v, &mut base_of, &mut memory_of, &mut queue);
    }
    let mut edge_list: Vec<(Vertex, Vertex)> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let v = base_of[s];
        let mem = memory_of[s].clone();
        for &w in &game.succ[v] {
            let t = intern(step(&mem, w), w, &mut base_of, &mut memory_of, &mut queue);
            edge_list.push((s, t));
        }
    }
    let vertex_names: Vec<String> = (0..base_of.len())
        .map(|s| format!("{}@{}", game.vname(base_of[s]), mem_name(&memory_of[s])))
        .collect();
    let owner: Vec<Player> = base_of.iter().map(|&v| game.owner[v]).collect();
    let init = index
        .get(&(init_mem(game.init), game.init))
        .copied()
        .unwrap_or(0);
    let unfolded = Game::new(
        game.player_names.clone(),
        vertex_names,
        owner,
        edge_list,
        // Placeholder objectives; callers translate them.
        (0..game.n_players())
            .map(|_| Objective::Safety { bad: BitSet::new(base_of.len()) })
            .collect(),
        init,
    )?;
    Ok(Unfolded { game: unfolded, base_of, memory_of, index })
}

/// A deterministic, complete automaton reading vertices; used to adjoin
/// finite memory to a game.
#[derive(Clone, Debug)]
pub struct Monitor {
    pub n_states: usize,
    pub init: usize,
    /// `next[q][v]` = state after reading vertex v in state q.
    pub next: Vec<Vec<usize>>,
}

/// Synchronous product of a game with a monitor. Product states are pairs
/// (v, q) where q is the monitor state after reading the play including v.
/// Objectives are lifted through the base projection.
pub fn product(game: &Game, monitor: &Monitor) -> Result<Unfolded> {
    let step = |q: &BitSet, v: Vertex| -> BitSet {
        let cur = q.first().expect("monitor state present");
        BitSet::from_indices(monitor.n_states, &[monitor.next[cur][v]])
    };
    let init_mem =
        |v: Vertex| BitSet::from_indices(monitor.n_states, &[monitor.next[monitor.init][v]]);
    let mut u = unfold(game, &[game.init], &init_mem, &step, |q: &BitSet| {
        format!("m{}", q.first().unwrap())
    })?;
    let un = u.game.n_vertices();
    let lift_set = |set: &BitSet| -> BitSet {
        let mut s = BitSet::new(un);
        for (st, &b) in u.base_of.iter().enumerate() {
            if set.contains(b) {
                s.insert(st);
            }
        }
        s
    };
    u.game.objectives = game
        .objectives
        .iter()
        .map(|o| match o {
            Objective::Safety { bad } => Objective::Safety { bad: lift_set(bad) },
            Objective::Reachability { good } => {
                Objective::Reachability { good: lift_set(good) }
            }
            Objective::Buchi { acc } => Objective::Buchi { acc: lift_set(acc) },
            Objective::Parity { color } => Objective::Parity {
                color: u.base_of.iter().map(|&b| color[b]).collect(),
            },
            Objective::Muller { circuit } => {
                Objective::Muller { circuit: lift_circuit(circuit, un, &u.base_of) }
            }
            Objective::Weak { circuit } => {
                Objective::Weak { circuit: lift_circuit(circuit, un, &u.base_of) }
            }
        })
        .collect();
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-player safety game used by several unit tests: p1 owns a, p2
    /// owns b; a->a, a->b, b->a, b->b; b is bad for p1.
    fn tiny() -> Game {
        Game::new(
            vec!["p1".into(), "p2".into()],
            vec!["a".into(), "b".into()],
            vec![0, 1],
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
            vec![
                Objective::Safety { bad: BitSet::from_indices(2, &[1]) },
                Objective::Safety { bad: BitSet::new(2) },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn validation_catches_issues() {
        let bad = Game::new(
            vec!["p".into()],
            vec!["a".into(), "b".into()],
            vec![0, 0],
            vec![(0, 1)], // b has no successor
            vec![Objective::Safety { bad: BitSet::new(2) }],
            0,
        );
        assert!(matches!(bad, Err(Error::Invalid(_))));

        let dup = Game::new(
            vec!["p".into()],
            vec!["a".into(), "a".into()],
            vec![0, 0],
            vec![(0, 1), (1, 0)],
            vec![Objective::Safety { bad: BitSet::new(2) }],
            0,
        );
        assert!(matches!(dup, Err(Error::Invalid(_))));
    }

    #[test]
    fn edge_ids_are_sorted_positions() {
        let g = tiny();
        assert_eq!(g.edge_id(0, 0), Some(0));
        assert_eq!(g.edge_id(0, 1), Some(1));
        assert_eq!(g.edge_id(1, 0), Some(2));
        assert_eq!(g.edge_id(1, 1), Some(3));
        assert_eq!(g.edge_id(0, 2), None);
    }

    #[test]
    fn lasso_wins_and_sets() {
        let g = tiny();
        let visit_b = Lasso::new(vec![0], vec![1]);
        visit_b.check_edges(&g).unwrap();
        assert!(!g.wins(0, &visit_b));
        assert!(g.wins(1, &visit_b));
        let stay = Lasso::new(vec![], vec![0]);
        assert!(g.wins(0, &stay));
        assert_eq!(visit_b.occ_set(2).iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(visit_b.inf_set(2).iter().collect::<Vec<_>>(), vec![1]);
        assert!(Lasso::new(vec![], vec![0, 0]).check_edges(&g).is_ok());
        assert!(Lasso::new(vec![], vec![]).check_edges(&g).is_err());
    }

    #[test]
    fn value_sequences() {
        let l = Lasso::new(vec![0, 1], vec![2]);
        let tab = |vals: [i8; 3]| move |v: Vertex| vals[v];
        assert_eq!(lasso_value_sequence(&l, tab([0, 0, 0])), ValueSequence::AllZero);
        assert_eq!(lasso_value_sequence(&l, tab([0, 1, 1])), ValueSequence::ZeroThenOne);
        assert_eq!(lasso_value_sequence(&l, tab([0, 0, -1])), ValueSequence::ZeroThenMinusOne);
        assert_eq!(lasso_value_sequence(&l, tab([1, 0, 1])), ValueSequence::Other);
        assert_eq!(lasso_value_sequence(&l, tab([0, -1, 0])), ValueSequence::Other);
        assert_eq!(lasso_value_sequence(&l, tab([0, 1, -1])), ValueSequence::Other);
    }

    #[test]
    fn lost_unfolding_tracks_players() {
        let g = tiny();
        let u = unfold_lost(&g, &[0, 1]).unwrap();
        // States: (∅,a), ({p1},b), and from start b also ({p1},a).
        assert_eq!(u.game.n_vertices(), 3);
        let empty = BitSet::new(2);
        let lost1 = BitSet::from_indices(2, &[0]);
        let s0 = u.state_of(&empty, 0).unwrap();
        let sb = u.state_of(&lost1, 1).unwrap();
        let sa = u.state_of(&lost1, 0).unwrap();
        assert_eq!(u.game.init, s0);
        assert_eq!(u.base_of[sb], 1);
        // (∅,a) -> ({p1},b) and self-loop; ({p1},b) -> ({p1},a).
        assert!(u.game.edge_id(s0, sb).is_some());
        assert!(u.game.edge_id(sb, sa).is_some());
        assert!(u.game.edge_id(s0, s0).is_some());
        // Translated objective: p1's bad set is the lost-states.
        match &u.game.objectives[0] {
            Objective::Safety { bad } => {
                assert!(bad.contains(sb) && bad.contains(sa) && !bad.contains(s0))
            }
            _ => panic!("expected safety"),
        }
        let names: Vec<&str> = (0..3).map(|s| u.game.vname(s)).collect();
        assert!(names.contains(&"a@-") && names.contains(&"b@p1") && names.contains(&"a@p1"));
    }

    #[test]
    fn visited_unfolding_guard_and_weak_translation() {
        let g = tiny();
        let mut big_names: Vec<String> = (0..17).map(|i| format!("v{i}")).collect();
        big_names[0] = "v0".into();
        let big = Game::new(
            vec!["p".into()],
            big_names,
            vec![0; 17],
            (0..17).map(|i| (i, (i + 1) % 17)).collect(),
            vec![Objective::Safety { bad: BitSet::new(17) }],
            0,
        )
        .unwrap();
        assert!(matches!(unfold_visited(&big, &[0], false), Err(Error::GuardExceeded(_))));
        assert!(unfold_visited(&big, &[0], true).is_ok());

        // Weak circuit "b visited" becomes a limit condition satisfied on
        // any cycle whose stratum contains b.
        let mut weak_game = g.clone();
        weak_game.objectives[0] = Objective::Weak { circuit: Circuit::input(2, 1) };
        let u = unfold_visited(&weak_game, &[0], false).unwrap();
        let rb = BitSet::from_indices(2, &[0, 1]);
        let s_ab_a = u.state_of(&rb, 0).unwrap();
        match &u.game.objectives[0] {
            Objective::Buchi { acc } => {
                assert!(acc.contains(s_ab_a));
                let start = u.state_of(&BitSet::from_indices(2, &[0]), 0).unwrap();
                assert!(!acc.contains(start));
            }
            _ => panic!("expected limit translation"),
        }
    }

    #[test]
    fn monitor_product_round_robin() {
        let g = tiny();
        // Two-state monitor: flips on every visit to a.
        let m = Monitor {
            n_states: 2,
            init: 0,
            next: vec![vec![1, 0], vec![0, 1]],
        };
        let u = product(&g, &m).unwrap();
        // From (a, m1): a -> (a, m0), b -> (b, m1), etc. All four
        // combinations are reachable here.
        assert_eq!(u.game.n_vertices(), 4);
        assert_eq!(u.base_of.len(), 4);
        for s in 0..4 {
            assert_eq!(u.game.owner[s], g.owner[u.base_of[s]]);
        }
    }
}
