//! Dedicated elimination engine for games where every objective is safety.
//!
//! On the lost-set unfolding, "player i keeps his objective" becomes "the
//! play never enters a state whose lost component contains i", and the lost
//! components only grow along edges. That structure collapses the round
//! computation: the +1 class is the classical two-player safety region, the
//! −1 class is the complement of the fully cooperative safe region, and the
//! consistency clauses of the general engine hold automatically on every
//! cycle of the unfolding (a cycle stays inside one lost component, so each
//! player on it is either already lost or wins outright). The produced
//! analysis is therefore interchangeable with the general engine's, at a
//! fraction of the cost: two safety solves per player per round.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::game::{unfold_lost, Game, Objective};
use crate::general::GeneralAnalysis;
use crate::iterate::{self, Round};
use crate::zerosum::{solve_safety, TwoPlayerView};

/// Run the elimination to its fixpoint, or only through round `stop_at`.
pub fn analyze_with(game: &Game, stop_at: Option<usize>) -> Result<GeneralAnalysis> {
    for o in &game.objectives {
        if !matches!(o, Objective::Safety { .. }) {
            return Err(Error::Unsupported(format!(
                "the safety engine only handles safety objectives, got {}",
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
    let limits = crate::general::limits_of(&ug.objectives)?;
    let lost: Vec<BitSet> = ug
        .objectives
        .iter()
        .map(|o| match o {
            Objective::Safety { bad } => bad.clone(),
            _ => unreachable!(),
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
    let everyone = vec![true; m];
    let step = |history: &[Round]| -> Result<Round> {
        let gone = history
            .last()
            .map(|r| r.removed_union(ug.n_edges()))
            .unwrap_or_else(|| BitSet::new(ug.n_edges()));
        let arena = iterate::arena_after(&ug, &gone)?;
        let mut values: Vec<Vec<i8>> = vec![vec![0; m]; p];
        for i in 0..p {
            let view = TwoPlayerView {
                eve: ug.owner.iter().map(|&o| o == i).collect(),
                succ: arena.clone(),
            };
            let forced = solve_safety(&view, &lost[i]).win;
            let coop_view = TwoPlayerView { eve: everyone.clone(), succ: arena.clone() };
            let cooperative = solve_safety(&coop_view, &lost[i]).win;
            debug_assert!(forced.is_subset(&cooperative));
            for u in 0..m {
                values[i][u] = if forced.contains(u) {
                    1
                } else if !cooperative.contains(u) {
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
    let (analysis, internal) = iterate::drive(step, project, stop_at, bound)?;
    Ok(GeneralAnalysis { analysis, unfolded, internal, limits })
}

pub fn analyze(game: &Game) -> Result<GeneralAnalysis> {
    analyze_with(game, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_random, RandomObjectives};

    #[test]
    fn named_example_pins() {
        let game = crate::testutil::two_player_safety();
        let a = analyze(&game).unwrap();
        assert_eq!(a.analysis.fixpoint_at, Some(3));
        assert_eq!(a.analysis.elimination_rounds, 2);
        let e04 = game.edge_id(0, 4).unwrap();
        let e12 = game.edge_id(1, 2).unwrap();
        let final_gone: Vec<usize> =
            a.analysis.final_round().removed_union(game.n_edges()).iter().collect();
        assert_eq!(final_gone, vec![e04, e12]);
        // The initially doomed and hopeful states, and the forced win that
        // appears once q0 -> q4 is gone.
        let r = &a.analysis.rounds;
        assert_eq!(r[0].values[0][4], -1);
        assert_eq!(r[0].values[0][0], 0);
        assert_eq!(r[1].values[1][1], 1);
    }

    #[test]
    fn lost_states_stay_minus_one() {
        for seed in 0..30u64 {
            let game = gen_random(seed, 6, 3, 0.3, RandomObjectives::Safety);
            let a = analyze(&game).unwrap();
            let ug = &a.unfolded.game;
            for (i, o) in ug.objectives.iter().enumerate() {
                let Objective::Safety { bad } = o else { unreachable!() };
                for r in &a.internal {
                    for u in bad.iter() {
                        assert_eq!(r.values[i][u], -1, "lost state must stay lost");
                    }
                }
            }
        }
    }

    #[test]
    fn agrees_with_general_engine() {
        for seed in 0..40u64 {
            let n = 4 + (seed % 3) as usize;
            let players = 2 + (seed % 2) as usize;
            let game = gen_random(seed, n, players, 0.35, RandomObjectives::Safety);
            let fast = analyze(&game).unwrap();
            let slow = crate::general::analyze(&game).unwrap();
            assert_eq!(fast.analysis.rounds, slow.analysis.rounds, "seed {seed}");
            assert_eq!(fast.analysis.fixpoint_at, slow.analysis.fixpoint_at);
            assert_eq!(
                fast.analysis.elimination_rounds,
                slow.analysis.elimination_rounds
            );
            assert_eq!(fast.internal, slow.internal, "seed {seed} internal");
        }
    }
}
