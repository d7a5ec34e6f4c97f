//! Iterated admissibility for multiplayer turn-based games on finite graphs.
//!
//! A game is played by several players on a directed graph: each vertex is
//! controlled by one player, who picks the outgoing edge whenever a play is
//! there. Every player has an omega-regular objective over the infinite play.
//! A strategy is *admissible* if it is not weakly dominated by another
//! strategy; iterating the elimination of dominated strategies converges to
//! the set of "iteratively admissible" strategy profiles.
//!
//! The crate computes, for each elimination round, the three-valued state
//! values (+1 forced win, 0 possible win, -1 impossible win), the dominated
//! edges, and the "help" states that keep value-0 plays alive. On top of the
//! fixpoint it answers two queries:
//!
//! * **winning coalition** — is there an outcome of admissible strategies
//!   where a given set of players wins and another set loses?
//! * **model checking under admissibility** — does a property hold on every
//!   outcome of admissible strategies?
//!
//! Four engines cover different objective classes: a dedicated safety engine,
//! a general engine for prefix-independent objectives (parity, Büchi, Muller
//! circuits), an optimized Büchi engine, and an engine for weak (visited-set)
//! conditions which also handles reachability exactly.

pub mod bitset;
pub mod brute;
pub mod buchi;
pub mod circuit;
pub mod error;
pub mod format;
pub mod game;
pub mod general;
pub mod generate;
pub mod iterate;
pub mod outcome;
pub mod queries;
pub mod safety;
#[cfg(test)]
pub(crate) mod testutil;
pub mod weak;
pub mod witness;
pub mod zerosum;

pub use bitset::BitSet;
pub use circuit::Circuit;
pub use error::Error;
pub use game::{Game, Lasso, Objective, Player, Vertex};
