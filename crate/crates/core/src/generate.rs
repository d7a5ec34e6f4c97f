//! Game constructions used by tests, benchmarks, and the CLI `gen`
//! subcommand: two encodings of quantified Boolean formulas, a ring-shaped
//! train network, and seeded random games.

use crate::bitset::BitSet;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::game::{Game, Objective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Quantifier of one variable of a prenex formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// A closed prenex-CNF quantified Boolean formula. Variable `i` (0-based)
/// is bound by `quants[i]`, outermost first; a literal is a variable index
/// plus a polarity (`true` = positive).
#[derive(Clone, Debug)]
pub struct Qbf {
    pub quants: Vec<Quant>,
    pub clauses: Vec<Vec<(usize, bool)>>,
}

impl Qbf {
    pub fn n_vars(&self) -> usize {
        self.quants.len()
    }

    /// Parse a prefix string of `e`/`a` characters (variable 1 outermost)
    /// and a clause list `1,-2,3;2,-3` (semicolon-separated clauses of
    /// signed 1-based variables).
    pub fn parse(prefix: &str, clauses: &str) -> Result<Qbf> {
        let mut quants = Vec::new();
        for ch in prefix.chars() {
            match ch {
                'e' | 'E' => quants.push(Quant::Exists),
                'a' | 'A' => quants.push(Quant::Forall),
                ' ' => {}
                other => {
                    return Err(Error::Parse(format!(
                        "prefix may contain only 'e' and 'a', found {other:?}"
                    )))
                }
            }
        }
        let mut parsed = Vec::new();
        for clause in clauses.split(';') {
            let clause = clause.trim();
            if clause.is_empty() {
                return Err(Error::Parse("empty clause".into()));
            }
            let mut lits = Vec::new();
            for lit in clause.split(',') {
                let lit: i64 = lit
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal {lit:?}")))?;
                if lit == 0 || lit.unsigned_abs() as usize > quants.len() {
                    return Err(Error::Parse(format!(
                        "literal {lit} out of range for {} variables",
                        quants.len()
                    )));
                }
                lits.push((lit.unsigned_abs() as usize - 1, lit > 0));
            }
            parsed.push(lits);
        }
        Ok(Qbf {
            quants,
            clauses: parsed,
        })
    }
}

/// Brute-force validity of a prenex-CNF formula (test oracle).
pub fn eval_qbf(qbf: &Qbf) -> Result<bool> {
    if qbf.n_vars() > 20 {
        return Err(Error::GuardExceeded(format!(
            "{} variables in brute-force evaluation (limit 20)",
            qbf.n_vars()
        )));
    }
    fn go(qbf: &Qbf, depth: usize, assignment: u64) -> bool {
        if depth == qbf.n_vars() {
            return qbf.clauses.iter().all(|clause| {
                clause
                    .iter()
                    .any(|&(var, pos)| (assignment >> var & 1 == 1) == pos)
            });
        }
        let set = assignment | 1 << depth;
        match qbf.quants[depth] {
            Quant::Exists => go(qbf, depth + 1, assignment) || go(qbf, depth + 1, set),
            Quant::Forall => go(qbf, depth + 1, assignment) && go(qbf, depth + 1, set),
        }
    }
    Ok(go(qbf, 0, 0))
}

/// Incremental game builder shared by the generators.
struct Builder {
    players: Vec<String>,
    vertices: Vec<String>,
    owner: Vec<usize>,
    edges: std::collections::BTreeSet<(usize, usize)>,
}

impl Builder {
    fn new(players: Vec<&str>) -> Builder {
        Builder {
            players: players.into_iter().map(String::from).collect(),
            vertices: Vec::new(),
            owner: Vec::new(),
            edges: Default::default(),
        }
    }

    fn vertex(&mut self, name: String, owner: usize) -> usize {
        self.vertices.push(name);
        self.owner.push(owner);
        self.vertices.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.edges.insert((u, v));
    }

    fn finish(self, objectives: Vec<Objective>, init: usize) -> Result<Game> {
        Game::new(
            self.players,
            self.vertices,
            self.owner,
            self.edges.into_iter().collect(),
            objectives,
            init,
        )
    }
}

/// Player layout shared by both formula encodings: 0 = the verifier
/// ("eve"), 1 = the refuter ("adam"), then players `x<i>`/`nx<i>` for each
/// variable's positive and negative literal.
fn formula_players(qbf: &Qbf) -> Vec<String> {
    let mut players = vec!["eve".to_string(), "adam".to_string()];
    for i in 0..qbf.n_vars() {
        players.push(literal_name(i, true));
        players.push(literal_name(i, false));
    }
    players
}

const EVE: usize = 0;
const ADAM: usize = 1;

fn literal_player(var: usize, positive: bool) -> usize {
    2 + 2 * var + usize::from(!positive)
}

fn literal_name(var: usize, positive: bool) -> String {
    if positive {
        format!("x{}", var + 1)
    } else {
        format!("nx{}", var + 1)
    }
}

/// Encode a formula as a game with one safety objective per player: the
/// formula is valid iff some iteratively admissible profile wins for
/// `eve`.
///
/// The game is a chain: for each variable a chooser (owned by `eve` for an
/// existential, `adam` for a universal) picks one of two branch states, the
/// branch for literal `l` being bad for player `l`; then for each clause
/// `eve` picks a literal module, whose owner either continues through a
/// state bad for himself or diverts to a sink bad for `eve`; holes are
/// closed by a final sink bad for `adam`.
pub fn gen_qbf_safety(qbf: &Qbf) -> Result<Game> {
    let player_names = formula_players(qbf);
    let n_players = player_names.len();
    let mut b = Builder::new(player_names.iter().map(|s| s.as_str()).collect());
    let mut bad: Vec<Vec<usize>> = vec![Vec::new(); n_players];

    // Quantifier chain.
    let mut chain_tail: Option<(usize, usize)> = None; // (branch_t, branch_f)
    let mut init = None;
    for (i, q) in qbf.quants.iter().enumerate() {
        let owner = if *q == Quant::Exists { EVE } else { ADAM };
        let entry = b.vertex(format!("q{}", i + 1), owner);
        let t = b.vertex(format!("v{}t", i + 1), EVE);
        let f = b.vertex(format!("v{}f", i + 1), EVE);
        bad[literal_player(i, true)].push(t);
        bad[literal_player(i, false)].push(f);
        b.edge(entry, t);
        b.edge(entry, f);
        if let Some((pt, pf)) = chain_tail {
            b.edge(pt, entry);
            b.edge(pf, entry);
        } else {
            init = Some(entry);
        }
        chain_tail = Some((t, f));
    }

    // Matrix: one module per clause, in sequence.
    let mut entries = Vec::new();
    let mut joins = Vec::new();
    for (c, clause) in qbf.clauses.iter().enumerate() {
        let entry = b.vertex(format!("c{}", c + 1), EVE);
        let join = b.vertex(format!("j{}", c + 1), EVE);
        for (k, &(var, pos)) in clause.iter().enumerate() {
            let lp = literal_player(var, pos);
            let choice = b.vertex(format!("c{}l{}", c + 1, k + 1), lp);
            let through = b.vertex(format!("c{}p{}", c + 1, k + 1), EVE);
            let sink = b.vertex(format!("c{}s{}", c + 1, k + 1), EVE);
            bad[lp].push(through);
            bad[EVE].push(sink);
            b.edge(entry, choice);
            b.edge(choice, through);
            b.edge(choice, sink);
            b.edge(through, join);
            b.edge(sink, sink);
        }
        entries.push(entry);
        joins.push(join);
    }
    let end = b.vertex("end".to_string(), EVE);
    bad[ADAM].push(end);
    b.edge(end, end);

    // Wire quantifier chain -> first clause -> ... -> end.
    let mut next = end;
    for c in (0..entries.len()).rev() {
        b.edge(joins[c], next);
        next = entries[c];
    }
    if let Some((pt, pf)) = chain_tail {
        b.edge(pt, next);
        b.edge(pf, next);
    } else {
        init = Some(next);
    }

    let n = b.vertices.len();
    let objectives = bad
        .into_iter()
        .map(|list| Objective::Safety {
            bad: BitSet::from_indices(n, &list),
        })
        .collect();
    b.finish(objectives, init.expect("formula has at least one state"))
}

/// Encode a formula as a game with one reachability objective per player:
/// the formula is valid iff some iteratively admissible profile wins for
/// `eve`.
///
/// Same chain as the safety encoding, with the polarity flipped: branch
/// states are good for the chosen literal's player, a clause literal's
/// owner either continues or stops in a sink good for himself (and for
/// `adam`), and the final state is a sink good for `eve`.
pub fn gen_qbf_reachability(qbf: &Qbf) -> Result<Game> {
    let player_names = formula_players(qbf);
    let n_players = player_names.len();
    let mut b = Builder::new(player_names.iter().map(|s| s.as_str()).collect());
    let mut good: Vec<Vec<usize>> = vec![Vec::new(); n_players];

    let mut chain_tail: Option<(usize, usize)> = None;
    let mut init = None;
    for (i, q) in qbf.quants.iter().enumerate() {
        let owner = if *q == Quant::Exists { EVE } else { ADAM };
        let entry = b.vertex(format!("q{}", i + 1), owner);
        let t = b.vertex(format!("v{}t", i + 1), EVE);
        let f = b.vertex(format!("v{}f", i + 1), EVE);
        good[literal_player(i, true)].push(t);
        good[literal_player(i, false)].push(f);
        b.edge(entry, t);
        b.edge(entry, f);
        if let Some((pt, pf)) = chain_tail {
            b.edge(pt, entry);
            b.edge(pf, entry);
        } else {
            init = Some(entry);
        }
        chain_tail = Some((t, f));
    }

    let mut entries = Vec::new();
    let mut joins = Vec::new();
    for (c, clause) in qbf.clauses.iter().enumerate() {
        let entry = b.vertex(format!("c{}", c + 1), EVE);
        let join = b.vertex(format!("j{}", c + 1), EVE);
        for (k, &(var, pos)) in clause.iter().enumerate() {
            let lp = literal_player(var, pos);
            let choice = b.vertex(format!("c{}l{}", c + 1, k + 1), lp);
            let through = b.vertex(format!("c{}p{}", c + 1, k + 1), EVE);
            let sink = b.vertex(format!("c{}s{}", c + 1, k + 1), EVE);
            good[lp].push(sink);
            good[ADAM].push(sink);
            b.edge(entry, choice);
            b.edge(choice, through);
            b.edge(choice, sink);
            b.edge(through, join);
            b.edge(sink, sink);
        }
        entries.push(entry);
        joins.push(join);
    }
    let end = b.vertex("end".to_string(), EVE);
    good[EVE].push(end);
    b.edge(end, end);

    let mut next = end;
    for c in (0..entries.len()).rev() {
        b.edge(joins[c], next);
        next = entries[c];
    }
    if let Some((pt, pf)) = chain_tail {
        b.edge(pt, next);
        b.edge(pf, next);
    } else {
        init = Some(next);
    }

    let n = b.vertices.len();
    let objectives = good
        .into_iter()
        .map(|list| Objective::Reachability {
            good: BitSet::from_indices(n, &list),
        })
        .collect();
    b.finish(objectives, init.expect("formula has at least one state"))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum MetroState {
    /// Positions plus per-train declared intents (None = not yet declared).
    Running(Vec<u8>, Vec<Option<bool>>), // intent: true = move
    /// Two trains ended up on the same section; the game stops here.
    Collision(Vec<u8>),
}

/// A ring of `n` track sections with `p` trains and a controller. Each
/// round the trains declare in index order whether they want to advance
/// one section; the controller then blocks an arbitrary subset of the
/// willing trains and the rest move simultaneously. Trains start on
/// sections p-1, ..., 1, 0 (train 1 in front). Every train wants to serve
/// sections 0 and 1 forever (visit both infinitely often); the controller
/// wins if a collision happens.
pub fn gen_metro(n: usize, p: usize) -> Result<Game> {
    if p == 0 || n < 2 * p {
        return Err(Error::Invalid(format!(
            "a ring of {n} sections cannot safely host {p} trains (need n >= 2p >= 2)"
        )));
    }
    let name = |s: &MetroState| -> String {
        match s {
            MetroState::Running(pos, intents) => {
                let ps: Vec<String> = pos.iter().map(|x| x.to_string()).collect();
                let is: String = intents
                    .iter()
                    .map(|i| match i {
                        None => 'u',
                        Some(true) => 'm',
                        Some(false) => 's',
                    })
                    .collect();
                format!("{}.{}", ps.join("-"), is)
            }
            MetroState::Collision(pos) => {
                let ps: Vec<String> = pos.iter().map(|x| x.to_string()).collect();
                format!("C.{}", ps.join("-"))
            }
        }
    };
    let successors = |s: &MetroState| -> Vec<MetroState> {
        match s {
            MetroState::Collision(_) => vec![s.clone()],
            MetroState::Running(pos, intents) => {
                if let Some(k) = intents.iter().position(|i| i.is_none()) {
                    [true, false]
                        .into_iter()
                        .map(|mv| {
                            let mut is = intents.clone();
                            is[k] = Some(mv);
                            MetroState::Running(pos.clone(), is)
                        })
                        .collect()
                } else {
                    let movers: Vec<usize> =
                        (0..p).filter(|&k| intents[k] == Some(true)).collect();
                    let mut out = Vec::new();
                    let mut seen = std::collections::BTreeSet::new();
                    for block in 0u32..1 << movers.len() {
                        let mut newpos = pos.clone();
                        for (j, &k) in movers.iter().enumerate() {
                            if block & (1 << j) == 0 {
                                newpos[k] = ((newpos[k] as usize + 1) % n) as u8;
                            }
                        }
                        let mut sorted = newpos.clone();
                        sorted.sort_unstable();
                        let collided = sorted.windows(2).any(|w| w[0] == w[1]);
                        let next = if collided {
                            MetroState::Collision(newpos)
                        } else {
                            MetroState::Running(newpos, vec![None; p])
                        };
                        if seen.insert(next.clone()) {
                            out.push(next);
                        }
                    }
                    out
                }
            }
        }
    };
    let owner_of = |s: &MetroState| -> usize {
        match s {
            MetroState::Collision(_) => p, // the controller; irrelevant (sink)
            MetroState::Running(_, intents) => {
                intents.iter().position(|i| i.is_none()).unwrap_or(p)
            }
        }
    };

    // Breadth-first enumeration of the reachable states.
    let initial = MetroState::Running(
        (0..p).map(|k| (p - 1 - k) as u8).collect(),
        vec![None; p],
    );
    let mut index: std::collections::HashMap<MetroState, usize> = Default::default();
    let mut states = vec![initial.clone()];
    index.insert(initial, 0);
    let mut edges = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let s = states[head].clone();
        for next in successors(&s) {
            let id = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                states.len() - 1
            });
            edges.push((head, id));
        }
        head += 1;
    }

    let nv = states.len();
    let mut collision_set = BitSet::new(nv);
    for (v, s) in states.iter().enumerate() {
        if matches!(s, MetroState::Collision(_)) {
            collision_set.insert(v);
        }
    }
    // Train k serves a section when a fresh round starts there.
    let at_section = |k: usize, section: u8| -> BitSet {
        let mut set = BitSet::new(nv);
        for (v, s) in states.iter().enumerate() {
            if let MetroState::Running(pos, intents) = s {
                if pos[k] == section && intents.iter().all(|i| i.is_none()) {
                    set.insert(v);
                }
            }
        }
        set
    };
    let mut objectives = Vec::new();
    for k in 0..p {
        let serve0 = Circuit::or_of_set(nv, &at_section(k, 0));
        let serve1 = Circuit::or_of_set(nv, &at_section(k, 1));
        objectives.push(Objective::Muller {
            circuit: serve0.and(&serve1),
        });
    }
    objectives.push(Objective::Buchi {
        acc: collision_set,
    });

    let mut player_names: Vec<String> = (1..=p).map(|k| format!("t{k}")).collect();
    player_names.push("env".to_string());
    Game::new(
        player_names,
        states.iter().map(|s| name(s)).collect(),
        states.iter().map(|s| owner_of(s)).collect(),
        edges,
        objectives,
        0,
    )
}

/// Objective assignment for random games.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomObjectives {
    Safety,
    Reachability,
    Buchi,
    Parity { max_color: u8 },
    Muller,
    Weak,
    /// Each player independently gets a Büchi, parity, or Muller objective.
    PrefixIndependentMix,
}

/// A seeded random game: every pair (u, v) becomes an edge with the given
/// density, vertices left without successors fall back to the edge
/// u -> (u+1) mod n, owners are uniform, and objectives are drawn by kind.
pub fn gen_random(
    seed: u64,
    n_vertices: usize,
    n_players: usize,
    density: f64,
    kind: RandomObjectives,
) -> Game {
    assert!(n_vertices > 0 && n_players > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n_vertices {
        for v in 0..n_vertices {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    for u in 0..n_vertices {
        if !edges.iter().any(|&(a, _)| a == u) {
            edges.push((u, (u + 1) % n_vertices));
        }
    }
    let owner: Vec<usize> = (0..n_vertices).map(|_| rng.gen_range(0..n_players)).collect();
    let objectives = (0..n_players)
        .map(|_| random_objective(&mut rng, n_vertices, kind))
        .collect();
    let init = rng.gen_range(0..n_vertices);
    let vertex_names = (0..n_vertices).map(|v| format!("v{v}")).collect();
    let player_names = (0..n_players).map(|p| format!("p{p}")).collect();
    Game::new(player_names, vertex_names, owner, edges, objectives, init)
        .expect("random games are well-formed by construction")
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BitSet {
    let mut s = BitSet::new(n);
    for v in 0..n {
        if rng.gen_bool(p) {
            s.insert(v);
        }
    }
    s
}

/// A small random circuit over `n` vertex inputs.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize) -> Circuit {
    let base = |rng: &mut ChaCha8Rng| Circuit::or_of_set(n, &random_subset(rng, n, 0.4));
    match rng.gen_range(0..5) {
        0 => base(rng),
        1 => Circuit::and_of_set(n, &random_subset(rng, n, 0.4)),
        2 => base(rng).and(&base(rng)),
        3 => base(rng).and(&base(rng).negate()),
        _ => base(rng).or(&Circuit::and_of_set(n, &random_subset(rng, n, 0.3))),
    }
}

fn random_objective(rng: &mut ChaCha8Rng, n: usize, kind: RandomObjectives) -> Objective {
    match kind {
        RandomObjectives::Safety => Objective::Safety {
            bad: random_subset(rng, n, 0.25),
        },
        RandomObjectives::Reachability => Objective::Reachability {
            good: random_subset(rng, n, 0.25),
        },
        RandomObjectives::Buchi => Objective::Buchi {
            acc: random_subset(rng, n, 0.3),
        },
        RandomObjectives::Parity { max_color } => Objective::Parity {
            color: (0..n).map(|_| rng.gen_range(0..=max_color)).collect(),
        },
        RandomObjectives::Muller => Objective::Muller {
            circuit: random_circuit(rng, n),
        },
        RandomObjectives::Weak => Objective::Weak {
            circuit: random_circuit(rng, n),
        },
        RandomObjectives::PrefixIndependentMix => match rng.gen_range(0..3) {
            0 => random_objective(rng, n, RandomObjectives::Buchi),
            1 => random_objective(rng, n, RandomObjectives::Parity { max_color: 3 }),
            _ => random_objective(rng, n, RandomObjectives::Muller),
        },
    }
}

/// A seeded random prenex-CNF formula for cross-checking the two formula
/// encodings against [`eval_qbf`].
pub fn random_qbf(rng: &mut ChaCha8Rng, n_vars: usize, max_clauses: usize) -> Qbf {
    let quants = (0..n_vars)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Quant::Exists
            } else {
                Quant::Forall
            }
        })
        .collect();
    let n_clauses = rng.gen_range(1..=max_clauses);
    let clauses = (0..n_clauses)
        .map(|_| {
            let width = rng.gen_range(1..=n_vars);
            let mut vars: Vec<usize> = (0..n_vars).collect();
            for i in (1..vars.len()).rev() {
                vars.swap(i, rng.gen_range(0..=i));
            }
            vars.truncate(width);
            vars.sort_unstable();
            vars.into_iter().map(|v| (v, rng.gen_bool(0.5))).collect()
        })
        .collect();
    Qbf { quants, clauses }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu() -> Qbf {
        Qbf::parse("eae", "1,2,-3;-1,2,3").unwrap()
    }

    #[test]
    fn qbf_parsing_and_evaluation() {
        let q = mu();
        assert_eq!(q.n_vars(), 3);
        assert_eq!(q.clauses.len(), 2);
        assert_eq!(q.clauses[0], vec![(0, true), (1, true), (2, false)]);
        assert!(eval_qbf(&q).unwrap());
        assert!(eval_qbf(&Qbf::parse("e", "1").unwrap()).unwrap());
        assert!(!eval_qbf(&Qbf::parse("a", "1").unwrap()).unwrap());
        assert!(eval_qbf(&Qbf::parse("a", "1,-1").unwrap()).unwrap());
        assert!(Qbf::parse("x", "1").is_err());
        assert!(Qbf::parse("e", "2").is_err());
        assert!(Qbf::parse("e", "").is_err());
    }

    #[test]
    fn safety_encoding_structure() {
        let g = gen_qbf_safety(&mu()).unwrap();
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        assert_eq!(g.player_names.len(), 8);
        assert_eq!(g.player_names[0], "eve");
        assert_eq!(g.player_names[1], "adam");
        // Quantifier entries alternate ownership with the prefix eae.
        assert_eq!(g.owner[g.vertex_by_name("q1").unwrap()], 0);
        assert_eq!(g.owner[g.vertex_by_name("q2").unwrap()], 1);
        assert_eq!(g.owner[g.vertex_by_name("q3").unwrap()], 0);
        // Clause literal choices belong to the literal players.
        let c1l1 = g.vertex_by_name("c1l1").unwrap();
        assert_eq!(g.pname(g.owner[c1l1]), "x1");
        let c2l1 = g.vertex_by_name("c2l1").unwrap();
        assert_eq!(g.pname(g.owner[c2l1]), "nx1");
        // The final state is bad for adam and loops.
        let end = g.vertex_by_name("end").unwrap();
        match &g.objectives[1] {
            Objective::Safety { bad } => assert!(bad.contains(end)),
            _ => panic!("safety objectives expected"),
        }
        assert_eq!(g.succ[end], vec![end]);
        assert_eq!(g.init, g.vertex_by_name("q1").unwrap());
    }

    #[test]
    fn reachability_encoding_structure() {
        let g = gen_qbf_reachability(&mu()).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.player_names.len(), 8);
        let end = g.vertex_by_name("end").unwrap();
        match &g.objectives[0] {
            Objective::Reachability { good } => assert!(good.contains(end)),
            _ => panic!("reachability objectives expected"),
        }
        // Literal sinks are good for their player and for adam.
        let sink = g.vertex_by_name("c1s1").unwrap();
        let x1 = g.player_by_name("x1").unwrap();
        let adam = 1;
        for p in [x1, adam] {
            match &g.objectives[p] {
                Objective::Reachability { good } => assert!(good.contains(sink)),
                _ => unreachable!(),
            }
        }
        // Quantifier branches are pass-through good states, not sinks.
        let v1t = g.vertex_by_name("v1t").unwrap();
        assert_ne!(g.succ[v1t], vec![v1t]);
        match &g.objectives[x1] {
            Objective::Reachability { good } => assert!(good.contains(v1t)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn metro_structure() {
        let g = gen_metro(6, 2).unwrap();
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        assert_eq!(g.player_names, vec!["t1", "t2", "env"]);
        // Initial round: train 1 on section 1, train 2 on section 0.
        assert_eq!(g.vname(g.init), "1-0.uu");
        // Trains declare in order: t1 owns the fresh round, t2 the half
        // declared one, env the fully declared one.
        assert_eq!(g.owner[g.init], 0);
        let half = g.vertex_by_name("1-0.mu").unwrap();
        assert_eq!(g.owner[half], 1);
        let full = g.vertex_by_name("1-0.mm").unwrap();
        assert_eq!(g.owner[full], 2);
        // Blocking both trains keeps the positions; blocking just t1 causes
        // the rear-end collision; collision states self-loop.
        assert!(g.succ[full].contains(&g.init));
        let crash = g.vertex_by_name("C.1-1").unwrap();
        assert!(g.succ[full].contains(&crash));
        assert_eq!(g.succ[crash], vec![crash]);
        // A single train on a two-section ring has no collision states.
        let small = gen_metro(2, 1).unwrap();
        assert!(small.vertex_names.iter().all(|n| !n.starts_with('C')));
        assert!(gen_metro(3, 2).is_err());
    }

    #[test]
    fn metro_size_matches_protocol_enumeration() {
        // Independent count for (6, 2): reachable round-start position
        // pairs are the ordered pairs of distinct sections (the trains can
        // in fact reach all of them), each spawning 2 half-declared and 4
        // fully declared states; collisions are counted from the protocol.
        let g = gen_metro(6, 2).unwrap();
        let rounds = g
            .vertex_names
            .iter()
            .filter(|n| n.ends_with(".uu"))
            .count();
        assert_eq!(rounds, 30);
        let half = g
            .vertex_names
            .iter()
            .filter(|n| n.ends_with("mu") || n.ends_with("su"))
            .count();
        assert_eq!(half, 60);
        let full = g
            .vertex_names
            .iter()
            .filter(|n| {
                n.ends_with("mm") || n.ends_with("ms") || n.ends_with("sm") || n.ends_with("ss")
            })
            .count();
        assert_eq!(full, 120);
        // A collision C.a-a arises exactly when a mover enters an occupied
        // section: for each section a, either train can be the one sitting
        // still (2 orderings), and the two trains can also swap roles of
        // who crashed into whom only via distinct predecessor states, not
        // distinct sinks.
        let collisions = g
            .vertex_names
            .iter()
            .filter(|n| n.starts_with("C."))
            .count();
        assert_eq!(collisions, 6);
        assert_eq!(g.n_vertices(), 30 + 60 + 120 + 6);
    }

    #[test]
    fn random_games_validate_and_reproduce() {
        for seed in 0..20 {
            let g = gen_random(seed, 6, 3, 0.4, RandomObjectives::PrefixIndependentMix);
            assert!(g.validate().is_empty());
            let again = gen_random(seed, 6, 3, 0.4, RandomObjectives::PrefixIndependentMix);
            assert_eq!(g.vertex_names, again.vertex_names);
            assert_eq!(g.edges, again.edges);
            assert_eq!(g.owner, again.owner);
        }
        // Density 0 leaves only the fallback ring.
        let ring = gen_random(1, 5, 2, 0.0, RandomObjectives::Safety);
        assert_eq!(ring.edges.len(), 5);
        assert!(ring.edges.iter().all(|&(u, v)| v == (u + 1) % 5));
        // Density 1 is the complete graph with self-loops.
        let full = gen_random(1, 4, 2, 1.0, RandomObjectives::Buchi);
        assert_eq!(full.edges.len(), 16);
    }
}
