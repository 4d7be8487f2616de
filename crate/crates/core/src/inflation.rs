//! Game inflation: padding a game with dummy players (one strategy, zero
//! payoff) and strictly dominated filler strategies, plus a brute-force
//! verifier of the inflated-version relation.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{profiles_of, NormalFormGame, StrategyProfile};
use crate::nash::{pure_nash, support_enumeration_2p};
use crate::rational::{rat_int, Rational};
use crate::Options;

#[derive(Debug, Clone)]
pub struct InflationReport {
    pub is_inflated: bool,
    /// 1..=5 when a defining condition fails; None when is_inflated.
    pub violated_bullet: Option<u8>,
    /// Pure profile pair witnessing a payoff mismatch (condition 3).
    pub witness: Option<(StrategyProfile, StrategyProfile)>,
    /// Equilibrium conditions 4-5 were checked against pure equilibria only
    /// (3+ player games).
    pub pure_ne_only: bool,
}

/// True iff the profiles agree on every common player's common strategies.
pub fn compatible(
    g: &NormalFormGame,
    sigma: &StrategyProfile,
    g2: &NormalFormGame,
    sigma2: &StrategyProfile,
) -> bool {
    let common_players = g.num_players().min(g2.num_players());
    for i in 0..common_players {
        let common = g.strategy_counts()[i].min(g2.strategy_counts()[i]);
        for j in 0..common {
            if sigma.strategies[i].probs[j] != sigma2.strategies[i].probs[j] {
                return false;
            }
        }
    }
    true
}

/// Appends a dummy player with a single strategy and zero payoff everywhere;
/// existing payoffs are untouched.
pub fn add_player(game: &NormalFormGame, player_id: usize) -> Result<NormalFormGame> {
    let n = game.num_players();
    if player_id < n {
        return Err(Error::InvalidInput(format!(
            "player {player_id} already present"
        )));
    }
    if player_id > n {
        return Err(Error::InvalidInput(format!(
            "players must be appended in order (next id {n})"
        )));
    }
    let mut counts = game.strategy_counts().to_vec();
    counts.push(1);
    let payoffs = (0..game.num_cells())
        .map(|c| {
            let mut cell = game.cell_at(c).to_vec();
            cell.push(Rational::zero());
            cell
        })
        .collect();
    NormalFormGame::new(counts, payoffs)
}

/// Appends one strategy for `player`. Old cells are copied; every new cell
/// gets the filler value m = (global minimum payoff) - 1, or -1 when the
/// game has no payoffs yet, so the new strategy is strictly dominated.
pub fn add_strategy(game: &NormalFormGame, player: usize) -> Result<NormalFormGame> {
    let n = game.num_players();
    if player >= n {
        return Err(Error::OutOfBounds(format!("player {player}")));
    }
    let m = match game.min_payoff() {
        Some(v) => v - Rational::one(),
        None => rat_int(-1),
    };
    let old_count = game.strategy_counts()[player];
    let mut counts = game.strategy_counts().to_vec();
    counts[player] += 1;
    NormalFormGame::from_fn(counts, |s, i| {
        if s[player] < old_count {
            game.payoff(s, i).unwrap().clone()
        } else {
            m.clone()
        }
    })
}

/// Inflates to the target shape: missing players appended in ascending
/// order, then missing strategies per player in ascending order. The order
/// is fixed so outputs are reproducible bit-exactly.
pub fn inflate_game(game: &NormalFormGame, target_counts: &[usize]) -> Result<NormalFormGame> {
    if target_counts.len() < game.num_players()
        || game
            .strategy_counts()
            .iter()
            .zip(target_counts)
            .any(|(&c, &t)| t < c)
    {
        return Err(Error::ShapeMismatch(format!(
            "target {:?} is not a superset of {:?}",
            target_counts,
            game.strategy_counts()
        )));
    }
    let mut g = game.clone();
    for p in game.num_players()..target_counts.len() {
        g = add_player(&g, p)?;
    }
    for (i, &t) in target_counts.iter().enumerate() {
        while g.strategy_counts()[i] < t {
            g = add_strategy(&g, i)?;
        }
    }
    Ok(g)
}

fn equilibria_for_check(
    game: &NormalFormGame,
    opts: &Options,
) -> Result<(Vec<StrategyProfile>, bool)> {
    if game.num_players() == 2 {
        let set = support_enumeration_2p(game)?;
        if set.degenerate && !opts.allow_degenerate {
            return Err(Error::DegenerateGame(
                "cannot certify equilibrium compatibility".into(),
            ));
        }
        Ok((set.profiles, false))
    } else {
        let profiles = pure_nash(game)
            .iter()
            .map(|s| StrategyProfile::from_pure(s, game.strategy_counts()))
            .collect();
        Ok((profiles, true))
    }
}

/// Checks the five defining conditions of the inflated-version relation
/// g ⊑ g2: (1) players grow, (2) strategies grow, (3) payoffs of original
/// players coincide on every extension of an original profile, (4) every
/// equilibrium of g2 has a compatible equilibrium of g, (5) vice versa.
pub fn is_inflated_version(
    g: &NormalFormGame,
    g2: &NormalFormGame,
    opts: &Options,
) -> Result<InflationReport> {
    let fail = |bullet, witness| InflationReport {
        is_inflated: false,
        violated_bullet: Some(bullet),
        witness,
        pure_ne_only: false,
    };
    if g2.num_players() < g.num_players() {
        return Ok(fail(1, None));
    }
    if g.strategy_counts()
        .iter()
        .zip(g2.strategy_counts())
        .any(|(&c, &c2)| c2 < c)
    {
        return Ok(fail(2, None));
    }
    let extra_counts = &g2.strategy_counts()[g.num_players()..];
    for s in g.profiles() {
        for extra in profiles_of(extra_counts) {
            let mut s2 = s.clone();
            s2.extend_from_slice(&extra);
            for i in 0..g.num_players() {
                if g.payoff(&s, i).unwrap() != g2.payoff(&s2, i).unwrap() {
                    return Ok(fail(
                        3,
                        Some((
                            StrategyProfile::from_pure(&s, g.strategy_counts()),
                            StrategyProfile::from_pure(&s2, g2.strategy_counts()),
                        )),
                    ));
                }
            }
        }
    }
    let (mut ne_g, pure_only_g) = equilibria_for_check(g, opts)?;
    let (mut ne_g2, pure_only_g2) = equilibria_for_check(g2, opts)?;
    let pure_ne_only = pure_only_g || pure_only_g2;
    if pure_ne_only {
        // Compare like with like: when one side can only enumerate pure
        // equilibria, mixed ones on the other side would fail conditions
        // 4-5 vacuously.
        ne_g.retain(|p| p.as_pure().is_some());
        ne_g2.retain(|p| p.as_pure().is_some());
    }
    for sigma2 in &ne_g2 {
        if !ne_g.iter().any(|sigma| compatible(g, sigma, g2, sigma2)) {
            let mut report = fail(4, None);
            report.pure_ne_only = pure_ne_only;
            return Ok(report);
        }
    }
    for sigma in &ne_g {
        if !ne_g2.iter().any(|sigma2| compatible(g, sigma, g2, sigma2)) {
            let mut report = fail(5, None);
            report.pure_ne_only = pure_ne_only;
            return Ok(report);
        }
    }
    Ok(InflationReport {
        is_inflated: true,
        violated_bullet: None,
        witness: None,
        pure_ne_only,
    })
}
