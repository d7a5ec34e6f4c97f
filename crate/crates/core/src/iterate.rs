//! Bookkeeping shared by the elimination engines: per-round values, help
//! states, removed edges, and the fixpoint driver.
//!
//! Engines iterate on an internal representation (which may track history
//! through a memory unfolding) and project each internal round down to the
//! input game's vertices and edges for reporting. The fixpoint test runs on
//! the internal rounds, so two rounds that merely look alike at the base
//! level never stop the iteration early.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::game::Game;

/// One elimination round as reported on the input game: `values[j][v]` is
/// player j's value in {-1, 0, +1} when starting from v, `help[j]` the
/// vertices where another player's choice keeps j's fate open, and
/// `removed[j]` the accumulated dominated edges (edge ids) of player j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub values: Vec<Vec<i8>>,
    pub help: Vec<BitSet>,
    pub removed: Vec<BitSet>,
}

impl Round {
    /// All removed edges, any player.
    pub fn removed_union(&self, n_edges: usize) -> BitSet {
        let mut all = BitSet::new(n_edges);
        for r in &self.removed {
            all.union_with(r);
        }
        all
    }
}

/// The full elimination run of one engine on one game.
#[derive(Clone, Debug)]
pub struct Analysis {
    /// Rounds 0, 1, ...; when the run stabilized, the last round equals the
    /// one before it (the detected repeat is kept).
    pub rounds: Vec<Round>,
    /// Index of the first round whose full triple repeats the previous one;
    /// `None` when the run was cut off by an iteration cap first.
    pub fixpoint_at: Option<usize>,
    /// Number of rounds in which the removed-edge sets grew.
    pub elimination_rounds: usize,
}

impl Analysis {
    pub fn iterations(&self) -> usize {
        self.rounds.len()
    }

    pub fn final_round(&self) -> &Round {
        self.rounds.last().expect("at least one round")
    }

    /// Successor lists of the arena left after the final round.
    pub fn pruned_succ(&self, game: &Game) -> Vec<Vec<usize>> {
        let gone = self.final_round().removed_union(game.edges.len());
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); game.n_vertices()];
        for (id, &(u, v)) in game.edges.iter().enumerate() {
            if !gone.contains(id) {
                succ[u].push(v);
            }
        }
        succ
    }
}

/// Run `step` (which sees all previous internal rounds) until the internal
/// round repeats, `stop_at` rounds have been computed, or the theoretical
/// bound is exceeded (which indicates an engine bug and yields an error).
/// `project` maps internal rounds to reported ones.
pub fn drive<R: Clone + PartialEq>(
    mut step: impl FnMut(&[R]) -> Result<R>,
    project: impl Fn(&R) -> Round,
    stop_at: Option<usize>,
    bound: usize,
) -> Result<(Analysis, Vec<R>)> {
    let mut internal: Vec<R> = Vec::new();
    let mut fixpoint_at = None;
    loop {
        let r = step(&internal)?;
        let stable = internal.last() == Some(&r);
        internal.push(r);
        if stable {
            fixpoint_at = Some(internal.len() - 1);
            break;
        }
        if stop_at == Some(internal.len() - 1) {
            break;
        }
        if internal.len() > bound + 1 {
            return Err(Error::Invalid(format!(
                "elimination failed to stabilize within {bound} rounds"
            )));
        }
    }
    let rounds: Vec<Round> = internal.iter().map(&project).collect();
    let mut elimination_rounds = 0;
    for (n, round) in rounds.iter().enumerate() {
        let grew = if n == 0 {
            round.removed.iter().any(|r| !r.is_empty())
        } else {
            round.removed != rounds[n - 1].removed
        };
        if grew {
            elimination_rounds += 1;
        }
    }
    Ok((
        Analysis {
            rounds,
            fixpoint_at,
            elimination_rounds,
        },
        internal,
    ))
}

/// The help states of player `i` at round n, given this round's values for
/// i, the previous round's values for every player (all zero at round 0),
/// and the game's successor lists: vertices owned by another player j with
/// two distinct successors that are at least as good for i as losing, all
/// three indifferent for j at the previous level.
pub fn help_states(
    owner: &[usize],
    succ: &[Vec<usize>],
    i: usize,
    values_i_now: &[i8],
    values_prev: &[Vec<i8>],
) -> BitSet {
    let n = owner.len();
    let mut help = BitSet::new(n);
    for s in 0..n {
        let j = owner[s];
        if j == i {
            continue;
        }
        let mut candidates: Vec<usize> = succ[s]
            .iter()
            .copied()
            .filter(|&t| values_i_now[t] >= 0 && values_prev[j][t] == values_prev[j][s])
            .collect();
        // Two *distinct* indifferent continuations are required.
        candidates.sort_unstable();
        candidates.dedup();
        if candidates.len() >= 2 {
            help.insert(s);
        }
    }
    help
}

/// Successor lists of `game` after deleting the removed edges; errors if
/// some vertex is left without a move (elimination never starves a vertex,
/// so this signals an engine bug or a malformed input).
pub fn arena_after(game: &Game, gone: &BitSet) -> Result<Vec<Vec<usize>>> {
    let mut arena: Vec<Vec<usize>> = vec![Vec::new(); game.n_vertices()];
    for (e, &(x, y)) in game.edges.iter().enumerate() {
        if !gone.contains(e) {
            arena[x].push(y);
        }
    }
    for (x, out) in arena.iter().enumerate() {
        if out.is_empty() {
            return Err(Error::Invalid(format!(
                "state {} lost every move during elimination",
                game.vname(x)
            )));
        }
    }
    Ok(arena)
}

/// Accumulate this round's dominated edges (owner's value drops along the
/// edge) into the previous round's removals.
pub fn update_removals(game: &Game, values: &[Vec<i8>], prev: Option<&Round>) -> Vec<BitSet> {
    let mut removed = prev
        .map(|r| r.removed.clone())
        .unwrap_or_else(|| vec![BitSet::new(game.n_edges()); values.len()]);
    for (e, &(x, y)) in game.edges.iter().enumerate() {
        let j = game.owner[x];
        if values[j][y] < values[j][x] {
            removed[j].insert(e);
        }
    }
    removed
}

/// This round's help sets for every player.
pub fn help_all(game: &Game, values: &[Vec<i8>], prev: Option<&Round>) -> Vec<BitSet> {
    let p = values.len();
    let zeros = vec![vec![0i8; game.n_vertices()]; p];
    let prev_values = prev.map(|r| &r.values).unwrap_or(&zeros);
    (0..p)
        .map(|i| help_states(&game.owner, &game.succ, i, &values[i], prev_values))
        .collect()
}

/// Project a round over unfolded states/edges onto the base game, assuming
/// the entry state of base vertex v has id v.
pub fn project_round(
    r: &Round,
    n_base: usize,
    n_base_edges: usize,
    base_edge_of: &[usize],
) -> Round {
    let values = r.values.iter().map(|row| row[..n_base].to_vec()).collect();
    let help = r
        .help
        .iter()
        .map(|h| {
            let mut b = BitSet::new(n_base);
            for v in 0..n_base {
                if h.contains(v) {
                    b.insert(v);
                }
            }
            b
        })
        .collect();
    let removed = r
        .removed
        .iter()
        .map(|set| {
            let mut b = BitSet::new(n_base_edges);
            for e in set.iter() {
                b.insert(base_edge_of[e]);
            }
            b
        })
        .collect();
    Round { values, help, removed }
}
