//! Iterated admissibility for occurrence-based objectives: safety,
//! reachability, and arbitrary circuits evaluated on the set of states
//! visited at least once.
//!
//! The value of a history here depends only on the set R of visited states
//! and on the current state, never on the order of visits. The engine
//! therefore unfolds the game by its visited set: along any cycle of the
//! unfolding R is constant, so every occurrence condition turns limit-style
//! (a play's verdict is the verdict of the stratum its tail settles in).
//! Strata with larger R act as already-solved subgames whose entry values
//! feed the smaller strata; within a stratum the player's own objective
//! contributes a fixed verdict while the admissibility-consistency clauses
//! do the real work. Values, help states and dominated edges inside a
//! stratum all use that stratum's tables (a choice the companion engines
//! share through the common iteration bookkeeping).
//!
//! The per-round value games use the same cycle conditions as the limit
//! engine, but exploit the unfolding's shape instead of building one global
//! record product: every strongly connected component of the pruned arena
//! lies inside a single stratum, so objective verdicts and historical
//! values are constants there and each consistency clause folds to a
//! constant or to a single help-set hit. Components are solved locally,
//! callees first — plays that leave a component are resolved by the
//! already-computed status of their target — and only components that keep
//! genuine hit obligations need a (component-sized) record product.

use crate::bitset::BitSet;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::game::{unfold_visited, Game, Objective, Vertex};
use crate::general::{self, GeneralAnalysis};
use crate::iterate::{self, Round};
use crate::outcome::{accepted_cycle_reachers, SetFormula};
use crate::zerosum::{reduce_muller_to_parity, solve_buchi, solve_parity, TwoPlayerView};

/// Tuning knobs for the visited-set engine.
#[derive(Clone, Debug)]
pub struct Options {
    /// Refuse games with more vertices than this; the unfolding can reach
    /// |V|·2^|V| states in the worst case.
    pub vertex_guard: usize,
    /// Knobs for the limit engine run on the unfolding.
    pub engine: general::Options,
}

impl Default for Options {
    fn default() -> Self {
        Options { vertex_guard: 16, engine: general::Options::default() }
    }
}

/// The objective of player i as a circuit over the visited vertex set.
pub(crate) fn occurrence_circuit(game: &Game, i: usize) -> Result<Circuit> {
    let n = game.n_vertices();
    Ok(match &game.objectives[i] {
        Objective::Weak { circuit } => circuit.clone(),
        Objective::Safety { bad } => Circuit::or_of_set(n, bad).negate(),
        Objective::Reachability { good } => Circuit::or_of_set(n, good),
        other => {
            return Err(Error::Unsupported(format!(
                "the visited-set engine needs occurrence-based objectives; {} has a {} objective",
                game.player_names[i],
                other.kind()
            )))
        }
    })
}

pub fn analyze(game: &Game) -> Result<GeneralAnalysis> {
    analyze_with(game, &Options::default())
}

/// Run the elimination to its fixpoint (or to `engine.stop_at`). The
/// reported rounds are projected onto the input game: values and help at
/// base vertex v are those of a play starting fresh at v, removed edges are
/// the base edges dominated in at least one stratum. The returned internal
/// rounds range over the visited-set unfolding.
pub fn analyze_with(game: &Game, opts: &Options) -> Result<GeneralAnalysis> {
    let n_base = game.n_vertices();
    if n_base > opts.vertex_guard {
        return Err(Error::GuardExceeded(format!(
            "visited-set analysis of a {n_base}-vertex game (limit {}; raise vertex_guard to proceed)",
            opts.vertex_guard
        )));
    }
    let mut weak = game.clone();
    weak.objectives = (0..game.n_players())
        .map(|i| Ok(Objective::Weak { circuit: occurrence_circuit(game, i)? }))
        .collect::<Result<_>>()?;
    let starts: Vec<Vertex> = (0..n_base).collect();
    let unfolded = unfold_visited(&weak, &starts, true)?;
    for v in 0..n_base {
        assert_eq!(unfolded.base_of[v], v, "entry states come first");
    }
    let ug = unfolded.game.clone();
    let limits = general::limits_of(&ug.objectives)?;
    // Accepted states per player: every state whose stratum satisfies the
    // player's occurrence circuit (the unfolding translates to exactly this).
    let ok: Vec<BitSet> = ug
        .objectives
        .iter()
        .map(|o| match o {
            Objective::Buchi { acc } => acc.clone(),
            _ => unreachable!("the visited-set translation yields limit objectives"),
        })
        .collect();
    let base_edge_of: Vec<usize> = ug
        .edges
        .iter()
        .map(|&(x, y)| {
            game.edge_id(unfolded.base_of[x], unfolded.base_of[y])
                .expect("unfolded edge projects to a base edge")
        })
        .collect();

    let m = ug.n_vertices();
    let p = ug.n_players();
    let step = |history: &[Round]| -> Result<Round> {
        let gone = history
            .last()
            .map(|r| r.removed_union(ug.n_edges()))
            .unwrap_or_else(|| BitSet::new(ug.n_edges()));
        let arena = iterate::arena_after(&ug, &gone)?;
        let comps = components_callees_first(&arena);
        // Clause folding is player-independent; share it across the p value
        // games of this round. Loop-free singletons never carry a cycle and
        // need none.
        let data: Vec<Option<CompClauses>> = comps
            .iter()
            .map(|c| {
                (c.len() > 1 || arena[c[0]].contains(&c[0]))
                    .then(|| fold_clauses(c, history, &ok))
            })
            .collect();
        let mut values: Vec<Vec<i8>> = vec![vec![0; m]; p];
        for i in 0..p {
            let won = theta_winners(&ug, &arena, &comps, &data, i, &opts.engine)?;
            // Full consistency of everyone plus i's own win, per component:
            // a satisfied objective absorbs its clauses, an unmet +1 level
            // is hopeless, and each unmet 0 level demands a help-set visit.
            let psi = |scc: &[usize]| -> Result<SetFormula> {
                let rep = scc[0];
                if !ok[i].contains(rep) {
                    return Ok(SetFormula::Const(false));
                }
                let mut parts: Vec<SetFormula> = Vec::new();
                for j in 0..p {
                    if ok[j].contains(rep) {
                        continue;
                    }
                    let mut seen: Vec<&BitSet> = Vec::new();
                    for r in history {
                        match r.values[j][rep] {
                            -1 => {}
                            1 => return Ok(SetFormula::Const(false)),
                            _ => {
                                if !seen.contains(&&r.help[j]) {
                                    seen.push(&r.help[j]);
                                    parts.push(SetFormula::Hit(r.help[j].clone()));
                                }
                            }
                        }
                    }
                }
                Ok(SetFormula::and_all(parts))
            };
            let cooperative = accepted_cycle_reachers(&arena, &psi, opts.engine.max_disjuncts)?;
            for u in 0..m {
                let plus = won.contains(u);
                let minus = !cooperative.contains(u);
                if plus && minus {
                    return Err(Error::Invalid(
                        "a state classified as both forced win and sure loss".into(),
                    ));
                }
                values[i][u] = if plus {
                    1
                } else if minus {
                    -1
                } else {
                    0
                };
            }
        }
        let removed = iterate::update_removals(&ug, &values, history.last());
        let help = iterate::help_all(&ug, &values, history.last());
        Ok(Round { values, help, removed })
    };

    let nb_edges = game.n_edges();
    let project = |r: &Round| iterate::project_round(r, n_base, nb_edges, &base_edge_of);

    let bound = p * ug.n_edges() + 1;
    let (analysis, internal) = iterate::drive(step, project, opts.engine.stop_at, bound)?;
    Ok(GeneralAnalysis { analysis, unfolded, internal, limits })
}

/// One player's consistency clause at one prior level, folded with the
/// component's constants: trivially met, unmeetable, or "the cycle must hit
/// this set" (over component-local indices).
#[derive(Clone)]
enum RawClause {
    True,
    False,
    Hit(BitSet),
}

/// The same clause with hit sets interned into a per-solve list, so cycle
/// signatures range over set indices.
#[derive(Clone, Copy)]
enum Clause {
    True,
    False,
    Hit(usize),
}

/// Player-independent cycle data of one cyclic component.
struct CompClauses {
    /// Objective verdict per player (constant on the component).
    w: Vec<bool>,
    /// Folded clause per `[player][level]`.
    raw: Vec<Vec<RawClause>>,
    /// First level some player's clause fails outright (`levels` if none).
    first_false: usize,
}

fn fold_clauses(comp: &[usize], history: &[Round], ok: &[BitSet]) -> CompClauses {
    let n = history.len();
    let p = ok.len();
    let rep = comp[0];
    let w: Vec<bool> = (0..p).map(|j| ok[j].contains(rep)).collect();
    debug_assert!(
        comp.iter().all(|&u| (0..p).all(|j| ok[j].contains(u) == w[j])),
        "objective verdicts are constant on a component"
    );
    let mut raw: Vec<Vec<RawClause>> = vec![vec![RawClause::True; n]; p];
    let mut first_false = n;
    for lev in 0..n {
        for j in 0..p {
            let c = history[lev].values[j][rep];
            debug_assert!(
                comp.iter().all(|&u| history[lev].values[j][u] == c),
                "historical values are constant on a component"
            );
            if c == -1 || w[j] {
                continue;
            }
            let mut inter = BitSet::new(comp.len());
            if c == 0 {
                for (l, &u) in comp.iter().enumerate() {
                    if history[lev].help[j].contains(u) {
                        inter.insert(l);
                    }
                }
            }
            raw[j][lev] = if inter.is_empty() {
                first_false = first_false.min(lev);
                RawClause::False
            } else {
                RawClause::Hit(inter)
            };
        }
    }
    CompClauses { w, raw, first_false }
}

/// Acceptance of one cycle by the clause chain: while every player's
/// clauses held on all lower levels, player i's clause at the next level
/// must hold; a cycle consistent with everyone through all levels must
/// moreover satisfy i's objective.
fn chain_accepts(
    clauses: &[Vec<Clause>],
    i: usize,
    wins_i: bool,
    hit: &dyn Fn(usize) -> bool,
) -> bool {
    let eval = |c: Clause| match c {
        Clause::True => true,
        Clause::False => false,
        Clause::Hit(b) => hit(b),
    };
    let mut everyone = true;
    for lev in 0..clauses[i].len() {
        if everyone && !eval(clauses[i][lev]) {
            return false;
        }
        if everyone {
            everyone = clauses.iter().all(|row| eval(row[lev]));
        }
    }
    !(everyone && !wins_i)
}

/// States from which player i can force an accepted play on the pruned
/// arena. Solved per strongly connected component, callees first: moves
/// leaving a component are resolved by the already-computed status of their
/// target, components without hit obligations become plain limit games, and
/// the rest get a record product over component-local help signatures.
fn theta_winners(
    ug: &Game,
    arena: &[Vec<usize>],
    comps: &[Vec<usize>],
    data: &[Option<CompClauses>],
    i: usize,
    opts: &general::Options,
) -> Result<BitSet> {
    let mut won = BitSet::new(ug.n_vertices());
    for (comp, data) in comps.iter().zip(data) {
        let Some(data) = data else {
            // No cycle through a loop-free singleton: the owner just picks
            // among the already-resolved exits.
            let u = comp[0];
            let win = if ug.owner[u] == i {
                arena[u].iter().any(|&v| won.contains(v))
            } else {
                arena[u].iter().all(|&v| won.contains(v))
            };
            if win {
                won.insert(u);
            }
            continue;
        };
        let k = comp.len();
        let n = data.raw[0].len();
        let p = data.w.len();

        // Intern the hit sets the chain can actually consult: everything
        // behind the first constant failure is immaterial (for other
        // players even on its level), so it must not widen the signatures.
        let mut sets: Vec<&BitSet> = Vec::new();
        let mut clauses: Vec<Vec<Clause>> = vec![vec![Clause::True; n]; p];
        for lev in 0..n {
            for j in 0..p {
                clauses[j][lev] = match &data.raw[j][lev] {
                    RawClause::True => Clause::True,
                    RawClause::False => Clause::False,
                    RawClause::Hit(s) => {
                        let consulted =
                            lev < data.first_false || (lev == data.first_false && j == i);
                        if consulted {
                            let b = sets.iter().position(|x| *x == s).unwrap_or_else(|| {
                                sets.push(s);
                                sets.len() - 1
                            });
                            Clause::Hit(b)
                        } else {
                            Clause::False
                        }
                    }
                };
            }
        }

        if k == 1 {
            // A single state with a self-loop: stay forever (one possible
            // cycle) or leave through an exit.
            let u = comp[0];
            let accept = chain_accepts(&clauses, i, data.w[i], &|b| sets[b].contains(0));
            let exits = || arena[u].iter().filter(|&&v| v != u);
            let win = if ug.owner[u] == i {
                accept || exits().any(|&v| won.contains(v))
            } else {
                accept && exits().all(|&v| won.contains(v))
            };
            if win {
                won.insert(u);
            }
            continue;
        }

        // Local arena: the component plus a winning and a losing exit sink.
        let win_sink = k;
        let lose_sink = k + 1;
        let mut succ: Vec<Vec<usize>> = Vec::with_capacity(k + 2);
        for &u in comp {
            succ.push(
                arena[u]
                    .iter()
                    .map(|&v| match comp.binary_search(&v) {
                        Ok(l) => l,
                        Err(_) => {
                            if won.contains(v) {
                                win_sink
                            } else {
                                lose_sink
                            }
                        }
                    })
                    .collect(),
            );
        }
        succ.push(vec![win_sink]);
        succ.push(vec![lose_sink]);
        let mut eve: Vec<bool> = comp.iter().map(|&u| ug.owner[u] == i).collect();
        eve.push(false);
        eve.push(false);
        let view = TwoPlayerView { eve, succ };

        let winners = if sets.is_empty() {
            // Every clause is a constant, so all internal cycles share one
            // verdict: play to stay inside (or exit winning), or play to
            // exit winning only.
            let accept = chain_accepts(&clauses, i, data.w[i], &|_| false);
            let mut acc = BitSet::new(k + 2);
            acc.insert(win_sink);
            if accept {
                for l in 0..k {
                    acc.insert(l);
                }
            }
            solve_buchi(&view, &acc)
        } else {
            // Atoms are component-local help signatures; the sinks get
            // their own always-accepted / always-rejected atoms.
            let mut atom_hits: Vec<Vec<bool>> = Vec::new();
            let mut atom_of: Vec<usize> = Vec::with_capacity(k + 2);
            for l in 0..k {
                let sig: Vec<bool> = sets.iter().map(|s| s.contains(l)).collect();
                let a = atom_hits.iter().position(|x| *x == sig).unwrap_or_else(|| {
                    atom_hits.push(sig);
                    atom_hits.len() - 1
                });
                atom_of.push(a);
            }
            let a_win = atom_hits.len();
            let a_lose = a_win + 1;
            atom_of.push(a_win);
            atom_of.push(a_lose);
            let family = |aset: &BitSet| -> bool {
                if aset.contains(a_lose) {
                    return false;
                }
                if aset.contains(a_win) {
                    return true;
                }
                chain_accepts(&clauses, i, data.w[i], &|b| {
                    aset.iter().any(|a| atom_hits[a][b])
                })
            };
            let prod = reduce_muller_to_parity(
                &view,
                &atom_of,
                a_lose + 1,
                &family,
                opts.max_product_states,
            )?;
            let par = solve_parity(&prod.view, &prod.color);
            let mut local = BitSet::new(k + 2);
            for l in 0..k {
                if par.win_even.contains(prod.init_of[l]) {
                    local.insert(l);
                }
            }
            local
        };
        for (l, &u) in comp.iter().enumerate() {
            if winners.contains(l) {
                won.insert(u);
            }
        }
    }
    Ok(won)
}

/// Strongly connected components of the arena, callees first: every edge
/// leaving a component targets one listed earlier. Members are ascending.
fn components_callees_first(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    use petgraph::graph::DiGraph;
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..succ.len()).map(|_| g.add_node(())).collect();
    for (u, out) in succ.iter().enumerate() {
        for &v in out {
            g.add_edge(nodes[u], nodes[v], ());
        }
    }
    petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Value lookups per visited set: the value of any history is the value of
/// its pair (visited set, current state), and this oracle serves those pairs
/// for every iteration from a single analysis. One elimination run fills the
/// whole table; repeated lookups never recompute.
pub struct StratumOracle {
    result: GeneralAnalysis,
}

impl StratumOracle {
    pub fn new(game: &Game) -> Result<Self> {
        Self::with(game, &Options::default())
    }

    pub fn with(game: &Game, opts: &Options) -> Result<Self> {
        Ok(StratumOracle { result: analyze_with(game, opts)? })
    }

    /// The analysis backing the lookups.
    pub fn analysis(&self) -> &GeneralAnalysis {
        &self.result
    }

    /// Value of player `i` at iteration `n` for a play that has visited
    /// exactly `visited` and currently stands on `vertex`. `None` when no
    /// play realizes the pair. Iterations past the last computed round
    /// return it unchanged (past the fixpoint the rounds are stationary).
    pub fn value(&self, visited: &BitSet, vertex: Vertex, n: usize, i: usize) -> Option<i8> {
        let u = self.result.unfolded.state_of(visited, vertex)?;
        let internal = &self.result.internal;
        Some(internal[n.min(internal.len() - 1)].values[i][u])
    }

    /// Values of every player at iteration `n` across one stratum, indexed
    /// `[player][base vertex]`; `None` outside `visited` and at pairs no
    /// play realizes.
    pub fn values_at(&self, visited: &BitSet, n: usize) -> Vec<Vec<Option<i8>>> {
        let p = self.result.unfolded.game.n_players();
        let n_base = visited.len();
        (0..p)
            .map(|i| {
                (0..n_base)
                    .map(|v| {
                        if visited.contains(v) {
                            self.value(visited, v, n, i)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }
}
