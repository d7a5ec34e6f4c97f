//! Elimination engine for objectives that depend only on the set of states
//! visited infinitely often (Büchi, parity, Muller circuits); safety
//! objectives are supported through the lost-set unfolding, which makes
//! them limit-style as well.
//!
//! Each round computes, per player, the three-valued state values on the
//! arena left by the previous removals:
//!
//! * **+1** — the player can force a win provided every player sticks to
//!   strategies that survived the earlier rounds. This is a zero-sum game
//!   whose winning condition combines the player's objective with the
//!   consistency clauses of all players, evaluated per cycle; it is solved
//!   through the record (latest-appearance) reduction to parity.
//! * **−1** — even with full cooperation no surviving play wins: no
//!   reachable cycle satisfies all consistency clauses plus the objective.
//! * **0** — otherwise.
//!
//! Edges whose owner's value drops are then removed, and the help states
//! (where another player's indifferent choice keeps a value-0 player's
//! hopes alive) are recorded; the iteration stops when values, removals and
//! help states all repeat.

use std::collections::BTreeMap;

use crate::bitset::BitSet;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::game::{unfold_lost, Game, Objective, Unfolded};
use crate::iterate::{self, Analysis, Round};
use crate::outcome::{accepted_cycle_reachers, presence_minterms, SetFormula};
use crate::zerosum::{reduce_muller_to_parity, solve_parity, TwoPlayerView};

/// Tuning knobs for the engine.
#[derive(Clone, Debug)]
pub struct Options {
    /// Cap on materialized record-product states per value game.
    pub max_product_states: usize,
    /// Cap on the disjunctive normal form of per-component cycle conditions.
    pub max_disjuncts: usize,
    /// Cap on the atom classes expanded when a Muller circuit enters a
    /// cycle condition.
    pub max_classes: usize,
    /// Stop after this round instead of iterating to the fixpoint.
    pub stop_at: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_product_states: 1_000_000,
            max_disjuncts: 4096,
            max_classes: 12,
            stop_at: None,
        }
    }
}

/// A winning condition in limit form over unfolded states.
#[derive(Clone, Debug)]
pub(crate) enum Limit {
    /// Win iff the cycle avoids the set (safety through the unfolding).
    Avoid(BitSet),
    /// Win iff the cycle hits the set (Büchi).
    Hit(BitSet),
    /// Win iff the highest color on the cycle is even (parity).
    MaxEven(Vec<u8>),
    /// Win iff the circuit accepts the cycle set (Muller); evaluation only
    /// depends on which interchangeability classes are present.
    Classes {
        class_of: Vec<usize>,
        members: Vec<BitSet>,
        reps: Vec<usize>,
        circuit: Circuit,
    },
}

impl Limit {
    fn of_objective(o: &Objective) -> Result<Limit> {
        Ok(match o {
            Objective::Safety { bad } => Limit::Avoid(bad.clone()),
            Objective::Buchi { acc } => Limit::Hit(acc.clone()),
            Objective::Parity { color } => Limit::MaxEven(color.clone()),
            Objective::Muller { circuit } => {
                let class_of = circuit.interchange_classes();
                let n_classes = class_of.iter().max().map_or(0, |m| m + 1);
                let mut members = vec![BitSet::new(class_of.len()); n_classes];
                let mut reps = vec![usize::MAX; n_classes];
                for (v, &a) in class_of.iter().enumerate() {
                    members[a].insert(v);
                    if reps[a] == usize::MAX {
                        reps[a] = v;
                    }
                }
                Limit::Classes { class_of, members, reps, circuit: circuit.clone() }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "objective kind {} is not limit-style",
                    other.kind()
                )))
            }
        })
    }

    /// States with equal signatures are interchangeable for this condition.
    fn sig(&self, u: usize) -> u64 {
        match self {
            Limit::Avoid(s) | Limit::Hit(s) => s.contains(u) as u64,
            Limit::MaxEven(color) => color[u] as u64,
            Limit::Classes { class_of, .. } => class_of[u] as u64,
        }
    }

    /// Winner on a cycle given the signatures present on it.
    fn wins_sigs(&self, sigs: &[u64]) -> bool {
        match self {
            Limit::Avoid(_) => sigs.iter().all(|&s| s == 0),
            Limit::Hit(_) => sigs.iter().any(|&s| s == 1),
            Limit::MaxEven(_) => sigs.iter().max().map_or(false, |m| m % 2 == 0),
            Limit::Classes { reps, circuit, .. } => {
                let mut set = BitSet::new(circuit.n_inputs);
                for &s in sigs {
                    set.insert(reps[s as usize]);
                }
                circuit.eval(&set)
            }
        }
    }

    /// Winner on a concrete cycle set.
    pub(crate) fn wins_set(&self, set: &BitSet) -> bool {
        match self {
            Limit::Avoid(s) => !set.intersects(s),
            Limit::Hit(s) => set.intersects(s),
            Limit::MaxEven(color) => {
                set.iter().map(|v| color[v]).max().map_or(false, |m| m % 2 == 0)
            }
            Limit::Classes { circuit, .. } => circuit.eval(set),
        }
    }

    /// Hit/miss formula for "this condition holds (`want`) on cycles inside
    /// the component".
    pub(crate) fn formula(
        &self,
        want: bool,
        scc: &[usize],
        n_states: usize,
        max_classes: usize,
    ) -> Result<SetFormula> {
        Ok(match self {
            Limit::Avoid(s) => {
                if want {
                    SetFormula::Miss(s.clone())
                } else {
                    SetFormula::Hit(s.clone())
                }
            }
            Limit::Hit(s) => {
                if want {
                    SetFormula::Hit(s.clone())
                } else {
                    SetFormula::Miss(s.clone())
                }
            }
            Limit::MaxEven(color) => {
                let mut present: Vec<u8> = scc.iter().map(|&v| color[v]).collect();
                present.sort_unstable();
                present.dedup();
                let mut parts = Vec::new();
                for &c in &present {
                    if (c % 2 == 0) != want {
                        continue;
                    }
                    let mut eq = BitSet::new(n_states);
                    let mut above = BitSet::new(n_states);
                    for v in 0..n_states {
                        if color[v] == c {
                            eq.insert(v);
                        } else if color[v] > c {
                            above.insert(v);
                        }
                    }
                    parts.push(SetFormula::And(vec![
                        SetFormula::Hit(eq),
                        SetFormula::Miss(above),
                    ]));
                }
                SetFormula::or_all(parts)
            }
            Limit::Classes { class_of, members, reps, circuit } => {
                let mut cls: Vec<usize> = scc.iter().map(|&v| class_of[v]).collect();
                cls.sort_unstable();
                cls.dedup();
                let local: Vec<BitSet> = cls.iter().map(|&a| members[a].clone()).collect();
                let eval = |present: &BitSet| -> bool {
                    let mut set = BitSet::new(circuit.n_inputs);
                    for idx in present.iter() {
                        set.insert(reps[cls[idx]]);
                    }
                    circuit.eval(&set) == want
                };
                presence_minterms(&eval, &local, max_classes)?
            }
        })
    }
}

/// States grouped by their full per-round profile: values and help bits at
/// every level so far plus the objective signature of every player. States
/// sharing an atom are interchangeable in all cycle conditions of the
/// current round.
struct Atoms {
    of_state: Vec<usize>,
    n: usize,
    /// val[a][j * levels + m] etc.
    val: Vec<Vec<i8>>,
    hlp: Vec<Vec<bool>>,
    sig: Vec<Vec<u64>>,
}

impl Atoms {
    fn build(m: usize, p: usize, history: &[Round], limits: &[Limit]) -> Atoms {
        let levels = history.len();
        let mut index: BTreeMap<(Vec<i8>, Vec<bool>, Vec<u64>), usize> = BTreeMap::new();
        let mut of_state = vec![0usize; m];
        let mut val = Vec::new();
        let mut hlp = Vec::new();
        let mut sig = Vec::new();
        for u in 0..m {
            let mut vv = Vec::with_capacity(p * levels);
            let mut hh = Vec::with_capacity(p * levels);
            for j in 0..p {
                for r in history {
                    vv.push(r.values[j][u]);
                    hh.push(r.help[j].contains(u));
                }
            }
            let ss: Vec<u64> = limits.iter().map(|l| l.sig(u)).collect();
            let key = (vv, hh, ss);
            let next = index.len();
            let a = *index.entry(key.clone()).or_insert(next);
            if a == next {
                val.push(key.0);
                hlp.push(key.1);
                sig.push(key.2);
            }
            of_state[u] = a;
        }
        Atoms { of_state, n: index.len(), val, hlp, sig }
    }
}

/// The winning condition of player i's value game at round n, evaluated on
/// a set of atoms: under the hypothesis that everyone played consistently
/// with the first m rounds, player i must stay consistent with round m+1;
/// and whenever the whole cycle is consistent with all n rounds, player i
/// must win. Atom sets mixing distinct values at some level cannot occur as
/// real cycles and are mapped to false.
fn gamma(i: usize, aset: &BitSet, atoms: &Atoms, n: usize, limits: &[Limit]) -> bool {
    let members: Vec<usize> = aset.iter().collect();
    if members.is_empty() {
        return true;
    }
    let p = limits.len();
    for j in 0..p {
        for m in 0..n {
            let c = atoms.val[members[0]][j * n + m];
            if members.iter().any(|&a| atoms.val[a][j * n + m] != c) {
                return false;
            }
        }
    }
    let wins: Vec<bool> = (0..p)
        .map(|j| {
            let sigs: Vec<u64> = members.iter().map(|&a| atoms.sig[a][j]).collect();
            limits[j].wins_sigs(&sigs)
        })
        .collect();
    let consistent = |j: usize, k: usize| -> bool {
        match atoms.val[members[0]][j * n + (k - 1)] {
            -1 => true,
            1 => wins[j],
            _ => wins[j] || members.iter().any(|&a| atoms.hlp[a][j * n + (k - 1)]),
        }
    };
    let mut everyone = true; // everyone consistent with rounds 1..=m
    for m in 0..n {
        if everyone && !consistent(i, m + 1) {
            return false;
        }
        if everyone {
            everyone = (0..p).all(|j| consistent(j, m + 1));
        }
    }
    !(everyone && !wins[i])
}

/// The consistency clauses of all players over cycles inside one component,
/// as a hit/miss formula: for each player j and level k, constant previous
/// value −1 imposes nothing, +1 requires j to win, 0 requires j to win or
/// to visit a help state of that level. A required win absorbs the 0-level
/// disjunctions.
pub(crate) fn consistency_parts(
    history: &[Round],
    limits: &[Limit],
    scc: &[usize],
    n_states: usize,
    max_classes: usize,
) -> Result<Vec<SetFormula>> {
    let mut parts = Vec::new();
    for (j, limit) in limits.iter().enumerate() {
        let mut need_win = false;
        let mut helps: Vec<&BitSet> = Vec::new();
        for r in history {
            match r.values[j][scc[0]] {
                -1 => {}
                1 => need_win = true,
                _ => helps.push(&r.help[j]),
            }
        }
        if need_win {
            parts.push(limit.formula(true, scc, n_states, max_classes)?);
        } else {
            let mut seen: Vec<&BitSet> = Vec::new();
            for h in helps {
                if seen.contains(&h) {
                    continue;
                }
                seen.push(h);
                parts.push(SetFormula::or_all(vec![
                    limit.formula(true, scc, n_states, max_classes)?,
                    SetFormula::Hit(h.clone()),
                ]));
            }
        }
    }
    Ok(parts)
}

/// Full result of the general engine: base-level rounds plus the unfolded
/// internals needed by queries and witness checking.
#[derive(Clone, Debug)]
pub struct GeneralAnalysis {
    pub analysis: Analysis,
    pub unfolded: Unfolded,
    /// Rounds over unfolded states/edges (the fixpoint test runs on these).
    pub internal: Vec<Round>,
    pub(crate) limits: Vec<Limit>,
}

impl GeneralAnalysis {
    /// Successor lists of the unfolded arena after the final round.
    pub fn pruned_state_succ(&self) -> Vec<Vec<usize>> {
        let ug = &self.unfolded.game;
        let last = self.internal.last().expect("at least one round");
        let gone = last.removed_union(ug.n_edges());
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ug.n_vertices()];
        for (e, &(x, y)) in ug.edges.iter().enumerate() {
            if !gone.contains(e) {
                succ[x].push(y);
            }
        }
        succ
    }

    /// The rounds that constrain outcomes at the fixpoint.
    pub(crate) fn history(&self) -> &[Round] {
        match self.analysis.fixpoint_at {
            Some(n) => &self.internal[..n],
            None => &self.internal,
        }
    }

    /// Formula satisfied exactly by the admissible-outcome cycles inside
    /// one component of the pruned arena, with extra requirements that
    /// specific players win (`true`) or lose (`false`).
    pub(crate) fn outcome_formula(
        &self,
        scc: &[usize],
        extra: &[(usize, bool)],
        max_classes: usize,
    ) -> Result<SetFormula> {
        let n_states = self.unfolded.game.n_vertices();
        let mut parts =
            consistency_parts(self.history(), &self.limits, scc, n_states, max_classes)?;
        for &(j, want) in extra {
            parts.push(self.limits[j].formula(want, scc, n_states, max_classes)?);
        }
        Ok(SetFormula::and_all(parts))
    }

    /// Does player j win on a play whose infinitely visited unfolded states
    /// are exactly `cycle`?
    pub fn wins_on_cycle(&self, j: usize, cycle: &BitSet) -> bool {
        self.limits[j].wins_set(cycle)
    }
}

pub(crate) fn limits_of(objectives: &[Objective]) -> Result<Vec<Limit>> {
    objectives.iter().map(Limit::of_objective).collect()
}

pub fn analyze(game: &Game) -> Result<GeneralAnalysis> {
    analyze_with(game, &Options::default())
}

pub fn analyze_with(game: &Game, opts: &Options) -> Result<GeneralAnalysis> {
    for o in &game.objectives {
        if matches!(o, Objective::Reachability { .. } | Objective::Weak { .. }) {
            return Err(Error::Unsupported(format!(
                "the general engine does not handle {} objectives",
                o.kind()
            )));
        }
    }
    let n_base = game.n_vertices();
    let starts: Vec<usize> = (0..n_base).collect();
    let unfolded = unfold_lost(game, &starts)?;
    for v in 0..n_base {
        assert_eq!(unfolded.base_of[v], v, "entry states come first");
    }
    let ug = unfolded.game.clone();
    let limits = limits_of(&ug.objectives)?;
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
        let n = history.len();
        let gone = history
            .last()
            .map(|r| r.removed_union(ug.n_edges()))
            .unwrap_or_else(|| BitSet::new(ug.n_edges()));
        let arena = iterate::arena_after(&ug, &gone)?;
        let atoms = Atoms::build(m, p, history, &limits);
        let mut values: Vec<Vec<i8>> = vec![vec![0; m]; p];
        for i in 0..p {
            let view = TwoPlayerView {
                eve: ug.owner.iter().map(|&o| o == i).collect(),
                succ: arena.clone(),
            };
            let family = |aset: &BitSet| gamma(i, aset, &atoms, n, &limits);
            let prod =
                reduce_muller_to_parity(&view, &atoms.of_state, atoms.n, &family, opts.max_product_states)?;
            let par = solve_parity(&prod.view, &prod.color);
            let psi = |scc: &[usize]| -> Result<SetFormula> {
                let mut parts = consistency_parts(history, &limits, scc, m, opts.max_classes)?;
                parts.push(limits[i].formula(true, scc, m, opts.max_classes)?);
                Ok(SetFormula::and_all(parts))
            };
            let cooperative = accepted_cycle_reachers(&arena, &psi, opts.max_disjuncts)?;
            for u in 0..m {
                let plus = par.win_even.contains(prod.init_of[u]);
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
    let (analysis, internal) = iterate::drive(step, project, opts.stop_at, bound)?;
    Ok(GeneralAnalysis { analysis, unfolded, internal, limits })
}
