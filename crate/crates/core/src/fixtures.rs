//! Bundled example games used by tests, docs, and the CLI documentation.

use crate::game::NormalFormGame;
use crate::misinfo::MisinformationGame;
use crate::rational::rat_int;

/// Known discrepancy in commonly quoted reference values for the bundled
/// running example: the figures PoA = 18/13 and PoM = 8/3 (together with a
/// mixed equilibrium (2/3,1/3) and a worst-case misinformed welfare of 9/2)
/// do not satisfy the indifference conditions of the example's payoff
/// tables. Direct evaluation of the definitions gives the mixed equilibrium
/// ((1/2,1/2),(1/2,1/2)), worst equilibrium welfare 8, worst misinformed
/// equilibrium welfare 11/2, PoA = 3/2 and PoM = 24/11. This library trusts
/// the definitions; the quoted figures are not targets.
pub const VALUE_DISCREPANCY_NOTE: &str = "Quoted reference values PoA=18/13 and PoM=8/3 for the \
bundled running example are inconsistent with its payoff tables; direct evaluation yields \
PoA=3/2 and PoM=24/11 (worst NME welfare 11/2, mixed equilibrium (1/2,1/2)).";

pub fn bimatrix(cells: [[(i64, i64); 2]; 2]) -> NormalFormGame {
    let mut payoffs = Vec::new();
    for row in cells {
        for (a, b) in row {
            payoffs.push(vec![rat_int(a), rat_int(b)]);
        }
    }
    NormalFormGame::new(vec![2, 2], payoffs).unwrap()
}

/// The 2x2 running example: an actual game G0 and two misinformed views.
pub fn running_example() -> MisinformationGame {
    let actual = bimatrix([[(6, 6), (2, 7)], [(7, 2), (1, 1)]]);
    let view1 = bimatrix([[(2, 2), (0, 3)], [(3, 0), (1, 1)]]);
    let view2 = bimatrix([[(-1, 1), (2, -2)], [(1, -1), (0, 0)]]);
    MisinformationGame::new(actual, vec![view1, view2])
}

/// Running example after both views learn the actual payoff at the
/// bottom-left cell (position (2,1) in 1-based terms).
pub fn after_bottom_left() -> MisinformationGame {
    let actual = bimatrix([[(6, 6), (2, 7)], [(7, 2), (1, 1)]]);
    let view1 = bimatrix([[(2, 2), (0, 3)], [(7, 2), (1, 1)]]);
    let view2 = bimatrix([[(-1, 1), (2, -2)], [(7, 2), (0, 0)]]);
    MisinformationGame::new(actual, vec![view1, view2])
}

/// Running example after learning the bottom-right cell; the first view
/// already had it right.
pub fn after_bottom_right() -> MisinformationGame {
    let actual = bimatrix([[(6, 6), (2, 7)], [(7, 2), (1, 1)]]);
    let view1 = bimatrix([[(2, 2), (0, 3)], [(3, 0), (1, 1)]]);
    let view2 = bimatrix([[(-1, 1), (2, -2)], [(1, -1), (1, 1)]]);
    MisinformationGame::new(actual, vec![view1, view2])
}

/// Running example after learning both bottom cells.
pub fn after_both_bottom() -> MisinformationGame {
    let actual = bimatrix([[(6, 6), (2, 7)], [(7, 2), (1, 1)]]);
    let view1 = bimatrix([[(2, 2), (0, 3)], [(7, 2), (1, 1)]]);
    let view2 = bimatrix([[(-1, 1), (2, -2)], [(7, 2), (1, 1)]]);
    MisinformationGame::new(actual, vec![view1, view2])
}
