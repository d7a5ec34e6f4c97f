//! Small hand-built games shared by the engine test modules.

use crate::bitset::BitSet;
use crate::game::{Game, Objective};

/// Five-vertex safety game: q2 is bad for player 1, q3 is bad for player 2;
/// q0 and q2 belong to player 1, the rest to player 2. Elimination removes
/// exactly q0→q4 (round 0) and q1→q2 (round 1).
pub fn two_player_safety() -> Game {
    Game::new(
        vec!["p1".into(), "p2".into()],
        vec!["q0".into(), "q1".into(), "q2".into(), "q3".into(), "q4".into()],
        vec![0, 1, 0, 1, 1],
        vec![
            (0, 1),
            (0, 4),
            (1, 0),
            (1, 2),
            (2, 1),
            (2, 3),
            (3, 3),
            (4, 2),
        ],
        vec![
            Objective::Safety { bad: BitSet::from_indices(5, &[2]) },
            Objective::Safety { bad: BitSet::from_indices(5, &[3]) },
        ],
        0,
    )
    .unwrap()
}
