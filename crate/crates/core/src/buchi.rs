//! Iterated admissibility for games where every objective is a Büchi
//! condition, or a conjunction of Büchi conditions compiled away by a
//! round-robin index before the elimination starts.
//!
//! The engine runs the same elimination loop as the general one but
//! replaces its acceptance bookkeeping with Büchi-specific structure: the
//! outcome constraints accumulated by earlier rounds collapse into one
//! obligation set per player and level ([`k_set`]), and the value game of
//! each round becomes a parity game under an explicit coloring built from
//! certification levels ([`Coloring`]). Results agree with the general
//! engine round for round; this path is the cheaper one on Büchi input.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::game::{unfold_counters, Game, Objective};
use crate::general::{consistency_parts, limits_of, GeneralAnalysis, Options};
use crate::iterate::{self, Round};
use crate::outcome::{accepted_cycle_reachers, SetFormula};
use crate::zerosum::{reduce_muller_to_parity, solve_parity, TwoPlayerView};

/// The obligation set of player `i` at level `k` (1-based): what a play
/// must visit infinitely often to stay consistent with the level-(k−1)
/// values. Sure losers owe nothing, forced winners owe a win, and value-0
/// states owe a win or infinitely many helping opportunities. The player's
/// whole winning set always qualifies.
pub fn k_set(history: &[Round], f: &BitSet, i: usize, k: usize) -> BitSet {
    let r = &history[k - 1];
    let m = f.len();
    let mut set = BitSet::new(m);
    for u in 0..m {
        let along = match r.values[i][u] {
            -1 => true,
            1 => f.contains(u),
            _ => f.contains(u) || r.help[i].contains(u),
        };
        if along {
            set.insert(u);
        }
    }
    debug_assert!(f.is_subset(&set), "the winning set is part of every obligation");
    set
}

/// One player's value game at one round: a record product of the pruned
/// arena with per-level certification sets and the parity coloring over
/// them.
///
/// A product state certifies level m when the obligations of all players
/// up to level m have each been hit since the record's current front
/// formed; along an infinite play the certified levels stabilize to
/// exactly those whose obligations are all visited infinitely often.
pub struct Coloring {
    /// Product arena (game vertices × appearance records of obligation
    /// signatures).
    pub view: TwoPlayerView,
    /// Game vertex of each product state.
    pub base_of: Vec<usize>,
    /// Product entry state of each game vertex.
    pub init_of: Vec<usize>,
    /// `d_sets[m]`: states certifying every obligation of levels ≤ m.
    /// Level 0 places no obligation, so `d_sets[0]` is everything.
    pub d_sets: Vec<BitSet>,
    /// `e_sets[m−1]` (m = 1..=n): states certifying levels ≤ m−1 plus the
    /// player's own level-m obligation.
    pub e_sets: Vec<BitSet>,
    /// States over the player's winning set.
    pub f_set: BitSet,
    /// Winning states get the top even color 2n+2; any other state the
    /// maximum of 2m over its e-levels m and 2m+1 over its d-levels m. A
    /// play is then winning for the player under every constraint exactly
    /// when the maximal color it sees infinitely often is even.
    pub color: Vec<u8>,
}

/// Build the product and coloring for player `i` at round `n` over the
/// pruned arena `view`. `k_sets[j][k−1]` must hold player j's level-k
/// obligation for k = 1..=n, and `f` is player i's Büchi set.
pub fn coloring(
    i: usize,
    n: usize,
    view: &TwoPlayerView,
    k_sets: &[Vec<BitSet>],
    f: &BitSet,
    max_states: usize,
) -> Result<Coloring> {
    let m = view.succ.len();
    let p = k_sets.len();
    if 2 * n + 2 > u8::MAX as usize {
        return Err(Error::GuardExceeded(format!(
            "round {n} needs colors beyond the supported range"
        )));
    }
    // Obligation signature of each state: membership in every K_j^k,
    // plus the winning set.
    let width = p * n + 1;
    let bit = |j: usize, k: usize| j * n + (k - 1);
    let mut sig_of_state: Vec<BitSet> = Vec::with_capacity(m);
    for u in 0..m {
        let mut s = BitSet::new(width);
        for (j, ks) in k_sets.iter().enumerate() {
            for k in 1..=n {
                if ks[k - 1].contains(u) {
                    s.insert(bit(j, k));
                }
            }
        }
        if f.contains(u) {
            s.insert(p * n);
        }
        sig_of_state.push(s);
    }
    let mut atom_ids: std::collections::BTreeMap<BitSet, usize> = Default::default();
    let mut hits: Vec<BitSet> = Vec::new();
    let atom_of: Vec<usize> = sig_of_state
        .iter()
        .map(|s| {
            *atom_ids.entry(s.clone()).or_insert_with(|| {
                hits.push(s.clone());
                hits.len() - 1
            })
        })
        .collect();
    let union_hits = |aset: &BitSet| -> BitSet {
        let mut u = BitSet::new(width);
        for a in aset.iter() {
            u.union_with(&hits[a]);
        }
        u
    };
    let granted = |h: &BitSet, level: usize| -> bool {
        (0..p).all(|j| (1..=level).all(|k| h.contains(bit(j, k))))
    };
    let top_granted = |h: &BitSet| -> usize {
        (0..=n).take_while(|&mm| granted(h, mm)).last().unwrap_or(0)
    };
    // The winning condition itself, for the record colors: under the
    // deepest certified constraints the player must contribute their next
    // obligation, and once everything is certified they must win outright.
    let family = |aset: &BitSet| -> bool {
        let h = union_hits(aset);
        let top = top_granted(&h);
        if top == n {
            h.contains(p * n)
        } else {
            h.contains(bit(i, top + 1))
        }
    };
    let prod = reduce_muller_to_parity(view, &atom_of, hits.len(), &family, max_states)?;

    let np = prod.base_of.len();
    let mut d_sets = vec![BitSet::new(np); n + 1];
    let mut e_sets = vec![BitSet::new(np); n];
    let mut f_set = BitSet::new(np);
    let mut color = vec![0u8; np];
    for st in 0..np {
        let h = union_hits(&prod.prefix[st]);
        let d_level = top_granted(&h);
        for set in d_sets.iter_mut().take(d_level + 1) {
            set.insert(st);
        }
        let mut e_level = None;
        for mm in 1..=n {
            if mm - 1 <= d_level && h.contains(bit(i, mm)) {
                e_sets[mm - 1].insert(st);
                e_level = Some(mm);
            }
        }
        let c = if f.contains(prod.base_of[st]) {
            f_set.insert(st);
            2 * n + 2
        } else {
            match e_level {
                Some(e) if 2 * e > 2 * d_level + 1 => 2 * e,
                _ => 2 * d_level + 1,
            }
        };
        color[st] = c as u8;
    }
    Ok(Coloring {
        view: prod.view,
        base_of: prod.base_of,
        init_of: prod.init_of,
        d_sets,
        e_sets,
        f_set,
        color,
    })
}

/// The player's forced-win states for the coloring's round: parity winners
/// of the colored product, read at the entry states.
pub fn winning_states(col: &Coloring) -> BitSet {
    let par = solve_parity(&col.view, &col.color);
    let mut w = BitSet::new(col.init_of.len());
    for (u, &st) in col.init_of.iter().enumerate() {
        if par.win_even.contains(st) {
            w.insert(u);
        }
    }
    w
}

/// Per-player hit-set lists: `None` keeps a plain Büchi objective, a list
/// asks for a round-robin index. Anything else is refused.
fn hit_lists(game: &Game) -> Result<Vec<Option<Vec<BitSet>>>> {
    game.objectives
        .iter()
        .enumerate()
        .map(|(j, o)| match o {
            Objective::Buchi { .. } => Ok(None),
            Objective::Muller { circuit } => {
                circuit.conjunctive_hit_sets().map(Some).ok_or_else(|| {
                    Error::Unsupported(format!(
                        "the buchi engine needs a conjunction of hit conditions for {}",
                        game.pname(j)
                    ))
                })
            }
            other => Err(Error::Unsupported(format!(
                "the buchi engine does not handle {} objectives",
                other.kind()
            ))),
        })
        .collect()
}

pub fn analyze(game: &Game) -> Result<GeneralAnalysis> {
    analyze_with(game, &Options::default())
}

pub fn analyze_with(game: &Game, opts: &Options) -> Result<GeneralAnalysis> {
    let lists = hit_lists(game)?;
    let n_base = game.n_vertices();
    let starts: Vec<usize> = (0..n_base).collect();
    let unfolded = unfold_counters(game, &starts, &lists)?;
    for v in 0..n_base {
        assert_eq!(unfolded.base_of[v], v, "entry states come first");
    }
    let ug = unfolded.game.clone();
    let limits = limits_of(&ug.objectives)?;
    let f_sets: Vec<BitSet> = ug
        .objectives
        .iter()
        .map(|o| match o {
            Objective::Buchi { acc } => acc.clone(),
            _ => unreachable!("counter unfolding yields buchi objectives"),
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
        let n = history.len();
        let gone = history
            .last()
            .map(|r| r.removed_union(ug.n_edges()))
            .unwrap_or_else(|| BitSet::new(ug.n_edges()));
        let arena = iterate::arena_after(&ug, &gone)?;
        let k_sets: Vec<Vec<BitSet>> = (0..p)
            .map(|j| (1..=n).map(|k| k_set(history, &f_sets[j], j, k)).collect())
            .collect();
        let mut values: Vec<Vec<i8>> = vec![vec![0; m]; p];
        for i in 0..p {
            let view = TwoPlayerView {
                eve: ug.owner.iter().map(|&o| o == i).collect(),
                succ: arena.clone(),
            };
            let col = coloring(i, n, &view, &k_sets, &f_sets[i], opts.max_product_states)?;
            let plus = winning_states(&col);
            let psi = |scc: &[usize]| -> Result<SetFormula> {
                let mut parts = consistency_parts(history, &limits, scc, m, opts.max_classes)?;
                parts.push(limits[i].formula(true, scc, m, opts.max_classes)?);
                Ok(SetFormula::and_all(parts))
            };
            let cooperative = accepted_cycle_reachers(&arena, &psi, opts.max_disjuncts)?;
            for u in 0..m {
                let minus = !cooperative.contains(u);
                if plus.contains(u) && minus {
                    return Err(Error::Invalid(
                        "a state classified as both forced win and sure loss".into(),
                    ));
                }
                values[i][u] = if plus.contains(u) {
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
    let base_of = unfolded.base_of.clone();
    let project = |r: &Round| {
        if cfg!(debug_assertions) {
            for row in &r.values {
                for (u, &b) in base_of.iter().enumerate() {
                    debug_assert_eq!(row[u], row[b], "values agree across index copies");
                }
            }
        }
        iterate::project_round(r, n_base, nb_edges, &base_edge_of)
    };
    let bound = p * ug.n_edges() + 1;
    let (analysis, internal) = iterate::drive(step, project, opts.stop_at, bound)?;
    Ok(GeneralAnalysis { analysis, unfolded, internal, limits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::general;
    use crate::generate::{gen_metro, gen_random, RandomObjectives};
    use crate::zerosum::solve_buchi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stop_after(n: usize) -> Options {
        Options { stop_at: Some(n), ..Options::default() }
    }

    /// Two players; p1 wants to reach the absorbing `good`, phrased as a
    /// Büchi condition; p2 is indifferent (wins always). From s1 player 1
    /// can detour through p2's s4, which can hand the win over.
    fn helper_loop_game() -> Game {
        let nv = 6;
        let good = BitSet::from_indices(nv, &[4]);
        Game::new(
            vec!["p1".into(), "p2".into()],
            vec![
                "s0".into(),
                "s1".into(),
                "s2".into(),
                "s3".into(),
                "good".into(),
                "s4".into(),
            ],
            vec![0, 0, 1, 0, 1, 1],
            vec![
                (0, 1),
                (1, 5),
                (5, 0),
                (1, 2),
                (2, 4),
                (2, 3),
                (5, 4),
                (3, 3),
                (4, 4),
            ],
            vec![
                Objective::Buchi { acc: good },
                Objective::Buchi { acc: BitSet::full(nv) },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn obligation_sets_use_the_help_clause() {
        let g = helper_loop_game();
        let a = analyze(&g).unwrap();
        // Round 0: forced win exactly on good, sure loss exactly on s3.
        let r0 = &a.internal[0];
        assert_eq!(r0.values[0], vec![0, 0, 0, -1, 1, 0]);
        // Only s4 keeps value-0 plays alive: its owner is indifferent and
        // has two nonnegative moves. s2 does not (one successor is lost).
        assert_eq!(r0.help[0], BitSet::from_indices(6, &[5]));
        let f = BitSet::from_indices(6, &[4]);
        let k = k_set(&a.internal[..1], &f, 0, 1);
        assert_eq!(k, BitSet::from_indices(6, &[3, 4, 5]));
        // Nothing is ever eliminated here; the very first refinement
        // already repeats round 0.
        assert_eq!(a.analysis.elimination_rounds, 0);
        assert_eq!(a.analysis.fixpoint_at, Some(1));
    }

    #[test]
    fn round_zero_matches_buchi_solver() {
        for seed in 0..25 {
            let g = gen_random(seed, 5, 1 + (seed as usize % 3), 0.3, RandomObjectives::Buchi);
            let a = analyze_with(&g, &stop_after(0)).unwrap();
            let r0 = &a.analysis.rounds[0];
            for (i, o) in g.objectives.iter().enumerate() {
                let acc = match o {
                    Objective::Buchi { acc } => acc.clone(),
                    _ => unreachable!(),
                };
                let view = TwoPlayerView {
                    eve: g.owner.iter().map(|&o| o == i).collect(),
                    succ: g.succ.clone(),
                };
                let forced = solve_buchi(&view, &acc);
                let coop = solve_buchi(
                    &TwoPlayerView { eve: vec![true; g.n_vertices()], succ: g.succ.clone() },
                    &acc,
                );
                for v in 0..g.n_vertices() {
                    let expect = if forced.contains(v) {
                        1
                    } else if !coop.contains(v) {
                        -1
                    } else {
                        0
                    };
                    assert_eq!(r0.values[i][v], expect, "seed {seed} player {i} state {v}");
                }
            }
        }
    }

    #[test]
    fn agrees_with_general_engine() {
        for seed in 200..240 {
            let nv = 4 + (seed as usize % 3);
            let p = 2 + (seed as usize % 2);
            let g = gen_random(seed, nv, p, 0.35, RandomObjectives::Buchi);
            let a = analyze(&g).unwrap();
            let b = general::analyze(&g).unwrap();
            assert_eq!(a.analysis.rounds, b.analysis.rounds, "seed {seed}");
            assert_eq!(a.analysis.fixpoint_at, b.analysis.fixpoint_at, "seed {seed}");
            assert_eq!(
                a.analysis.elimination_rounds, b.analysis.elimination_rounds,
                "seed {seed}"
            );
            // On plain Büchi input both engines work on the same trivial
            // unfolding, so even the internal rounds must line up.
            assert_eq!(a.internal, b.internal, "seed {seed}");
        }
    }

    /// Random games whose objectives are conjunctions of hit conditions,
    /// exercising the round-robin index against the general engine's
    /// circuit route.
    #[test]
    fn conjunctions_agree_with_general_engine() {
        for seed in 300..320 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let nv = 4 + (seed as usize % 2);
            let g0 = gen_random(seed, nv, 2, 0.4, RandomObjectives::Buchi);
            let objectives = (0..2)
                .map(|_| {
                    let mut whole = Circuit::constant(nv, true);
                    for _ in 0..rng.gen_range(1..=2) {
                        let mut set = BitSet::new(nv);
                        while set.is_empty() {
                            for v in 0..nv {
                                if rng.gen_bool(0.4) {
                                    set.insert(v);
                                }
                            }
                        }
                        whole = whole.and(&Circuit::or_of_set(nv, &set));
                    }
                    Objective::Muller { circuit: whole }
                })
                .collect();
            let g = Game::new(
                g0.player_names.clone(),
                g0.vertex_names.clone(),
                g0.owner.clone(),
                g0.edges.clone(),
                objectives,
                g0.init,
            )
            .unwrap();
            let a = analyze(&g).unwrap();
            let b = general::analyze(&g).unwrap();
            assert_eq!(a.analysis.rounds, b.analysis.rounds, "seed {seed}");
            assert_eq!(a.analysis.fixpoint_at, b.analysis.fixpoint_at, "seed {seed}");
        }
        // A one-train ring: the service objective is a conjunction of two
        // hit conditions, the controller's collision set is empty.
        let g = gen_metro(2, 1).unwrap();
        let a = analyze(&g).unwrap();
        let b = general::analyze(&g).unwrap();
        assert_eq!(a.analysis.rounds, b.analysis.rounds);
        assert_eq!(a.analysis.fixpoint_at, b.analysis.fixpoint_at);
    }

    /// On sampled product lassos, the parity reading of the coloring must
    /// coincide with evaluating the winning condition directly from the
    /// certification sets the lasso visits.
    #[test]
    fn coloring_parity_matches_direct_set_inspection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut lassos = 0usize;
        for seed in 400..420 {
            let g = gen_random(seed, 5, 2 + (seed as usize % 2), 0.35, RandomObjectives::Buchi);
            let a = analyze(&g).unwrap();
            let ug = &a.unfolded.game;
            let f_sets: Vec<BitSet> = ug
                .objectives
                .iter()
                .map(|o| match o {
                    Objective::Buchi { acc } => acc.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let rounds = a.analysis.fixpoint_at.unwrap_or(a.internal.len() - 1);
            for n in 0..=rounds.min(3) {
                let history = &a.internal[..n];
                let gone = history
                    .last()
                    .map(|r| r.removed_union(ug.n_edges()))
                    .unwrap_or_else(|| BitSet::new(ug.n_edges()));
                let arena = iterate::arena_after(ug, &gone).unwrap();
                let k_sets: Vec<Vec<BitSet>> = (0..ug.n_players())
                    .map(|j| (1..=n).map(|k| k_set(history, &f_sets[j], j, k)).collect())
                    .collect();
                for i in 0..ug.n_players() {
                    let view = TwoPlayerView {
                        eve: ug.owner.iter().map(|&o| o == i).collect(),
                        succ: arena.clone(),
                    };
                    let col = coloring(i, n, &view, &k_sets, &f_sets[i], 1_000_000).unwrap();
                    for _ in 0..10 {
                        let start = col.init_of[rng.gen_range(0..ug.n_vertices())];
                        // Random walk until a product state repeats; the
                        // tail from the first repeat is the lasso's cycle.
                        let mut path = vec![start];
                        let cycle: Vec<usize> = loop {
                            let cur = *path.last().unwrap();
                            let outs = &col.view.succ[cur];
                            let next = outs[rng.gen_range(0..outs.len())];
                            if let Some(at) = path.iter().position(|&s| s == next) {
                                break path[at..].to_vec();
                            }
                            path.push(next);
                        };
                        let top_color =
                            cycle.iter().map(|&s| col.color[s]).max().unwrap();
                        let d_top = (0..=n)
                            .filter(|&mm| cycle.iter().any(|&s| col.d_sets[mm].contains(s)))
                            .max()
                            .unwrap();
                        let direct = if d_top == n {
                            cycle.iter().any(|&s| col.f_set.contains(s))
                        } else {
                            cycle.iter().any(|&s| col.e_sets[d_top].contains(s))
                        };
                        assert_eq!(
                            top_color % 2 == 0,
                            direct,
                            "seed {seed} round {n} player {i} cycle {cycle:?}"
                        );
                        lassos += 1;
                    }
                }
            }
        }
        assert!(lassos >= 1000, "sampled only {lassos} lassos");
    }
}
