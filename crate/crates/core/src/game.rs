//! Normal-form games with exact rational payoff tensors.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A pure strategy profile: one 0-based strategy index per player. Also used
/// as a position (an index into the payoff tensors).
pub type PureProfile = Vec<usize>;

/// Finite normal-form game. The payoff tensor is dense, row-major over
/// players (player 0 outermost); each cell holds one payoff per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalFormGame {
    strategy_counts: Vec<usize>,
    payoffs: Vec<Vec<Rational>>,
}

impl NormalFormGame {
    pub fn new(strategy_counts: Vec<usize>, payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        if strategy_counts.iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput(
                "every player needs at least one strategy".into(),
            ));
        }
        let cells: usize = strategy_counts.iter().product();
        if payoffs.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "expected {} cells, got {}",
                cells,
                payoffs.len()
            )));
        }
        let n = strategy_counts.len();
        if payoffs.iter().any(|cell| cell.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "every cell must hold {n} payoffs"
            )));
        }
        Ok(NormalFormGame {
            strategy_counts,
            payoffs,
        })
    }

    /// Builds the tensor by calling `f(profile, player)` for every cell.
    pub fn from_fn(
        strategy_counts: Vec<usize>,
        mut f: impl FnMut(&[usize], usize) -> Rational,
    ) -> Result<Self> {
        let n = strategy_counts.len();
        let mut payoffs = Vec::new();
        for profile in profiles_of(&strategy_counts) {
            payoffs.push((0..n).map(|i| f(&profile, i)).collect());
        }
        NormalFormGame::new(strategy_counts, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.strategy_counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn num_cells(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cell_index(&self, profile: &[usize]) -> Result<usize> {
        if profile.len() != self.num_players() {
            return Err(Error::ShapeMismatch(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.num_players()
            )));
        }
        let mut idx = 0;
        for (i, (&s, &c)) in profile.iter().zip(&self.strategy_counts).enumerate() {
            if s >= c {
                return Err(Error::OutOfBounds(format!(
                    "strategy {s} for player {i} (count {c})"
                )));
            }
            idx = idx * c + s;
        }
        Ok(idx)
    }

    /// Payoff vector (one entry per player) at a pure profile.
    pub fn cell(&self, profile: &[usize]) -> Result<&[Rational]> {
        Ok(&self.payoffs[self.cell_index(profile)?])
    }

    pub fn cell_at(&self, index: usize) -> &[Rational] {
        &self.payoffs[index]
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> Result<&Rational> {
        let cell = self.cell(profile)?;
        cell.get(player)
            .ok_or_else(|| Error::OutOfBounds(format!("player {player}")))
    }

    pub fn set_cell(&mut self, profile: &[usize], values: Vec<Rational>) -> Result<()> {
        if values.len() != self.num_players() {
            return Err(Error::ShapeMismatch("cell arity".into()));
        }
        let idx = self.cell_index(profile)?;
        self.payoffs[idx] = values;
        Ok(())
    }

    /// Iterates pure profiles in lexicographic order.
    pub fn profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        profiles_of(&self.strategy_counts)
    }

    pub fn same_shape(&self, other: &NormalFormGame) -> bool {
        self.strategy_counts == other.strategy_counts
    }

    /// Minimum payoff over all cells and players; None for the empty tensor.
    pub fn min_payoff(&self) -> Option<&Rational> {
        self.payoffs.iter().flatten().min()
    }
}

/// Lexicographic enumeration of all pure profiles for the given shape.
pub fn profiles_of(strategy_counts: &[usize]) -> impl Iterator<Item = PureProfile> + '_ {
    let total: usize = strategy_counts.iter().product();
    let counts = strategy_counts.to_vec();
    (0..total).map(move |mut idx| {
        let mut profile = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            profile[i] = idx % counts[i];
            idx /= counts[i];
        }
        profile
    })
}

/// A probability distribution over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedStrategy {
    pub probs: Vec<Rational>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidInput("negative probability".into()));
        }
        if !probs.iter().sum::<Rational>().is_one() {
            return Err(Error::InvalidInput("probabilities must sum to 1".into()));
        }
        Ok(MixedStrategy { probs })
    }

    /// Degenerate distribution on a single strategy.
    pub fn pure(index: usize, count: usize) -> Self {
        let mut probs = vec![Rational::zero(); count];
        probs[index] = Rational::one();
        MixedStrategy { probs }
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    pub strategies: Vec<MixedStrategy>,
}

impl StrategyProfile {
    pub fn from_pure(profile: &[usize], strategy_counts: &[usize]) -> Self {
        StrategyProfile {
            strategies: profile
                .iter()
                .zip(strategy_counts)
                .map(|(&s, &c)| MixedStrategy::pure(s, c))
                .collect(),
        }
    }

    /// The pure profile this represents, if every component is degenerate.
    pub fn as_pure(&self) -> Option<PureProfile> {
        self.strategies
            .iter()
            .map(|m| {
                let ones: Vec<usize> = (0..m.probs.len()).filter(|&j| m.probs[j].is_one()).collect();
                if ones.len() == 1 {
                    Some(ones[0])
                } else {
                    None
                }
            })
            .collect()
    }

    fn check_shape(&self, game: &NormalFormGame) -> Result<()> {
        if self.strategies.len() != game.num_players()
            || self
                .strategies
                .iter()
                .zip(game.strategy_counts())
                .any(|(m, &c)| m.probs.len() != c)
        {
            return Err(Error::ShapeMismatch(
                "profile does not fit the game's shape".into(),
            ));
        }
        Ok(())
    }
}

/// Strategy indices with probability strictly above `eps` (pass 0 for the
/// exact-rational reading).
pub fn support_with_eps(strategy: &MixedStrategy, eps: &Rational) -> Vec<usize> {
    (0..strategy.probs.len())
        .filter(|&j| &strategy.probs[j] > eps)
        .collect()
}

pub fn support(strategy: &MixedStrategy) -> Vec<usize> {
    support_with_eps(strategy, &Rational::zero())
}

/// Expected payoff of `player` under a mixed profile: the probability-weighted
/// sum of the player's payoff over all pure profiles.
pub fn expected_payoff(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<Rational> {
    profile.check_shape(game)?;
    if player >= game.num_players() {
        return Err(Error::OutOfBounds(format!("player {player}")));
    }
    let mut total = Rational::zero();
    for s in game.profiles() {
        let mut weight = Rational::one();
        for (i, &si) in s.iter().enumerate() {
            let p = &profile.strategies[i].probs[si];
            if p.is_zero() {
                weight = Rational::zero();
                break;
            }
            weight *= p;
        }
        if !weight.is_zero() {
            total += weight * game.payoff(&s, player)?;
        }
    }
    Ok(total)
}

pub fn social_welfare(game: &NormalFormGame, profile: &StrategyProfile) -> Result<Rational> {
    let mut total = Rational::zero();
    for i in 0..game.num_players() {
        total += expected_payoff(game, profile, i)?;
    }
    Ok(total)
}

/// Pure profile maximizing social welfare, lexicographically smallest on
/// ties. The optimum over mixed profiles is attained at a pure profile
/// because welfare is multilinear.
pub fn social_optimum(game: &NormalFormGame) -> (PureProfile, Rational) {
    let mut best: Option<(PureProfile, Rational)> = None;
    for s in game.profiles() {
        let value: Rational = game.cell(&s).unwrap().iter().sum();
        match &best {
            Some((_, v)) if value <= *v => {}
            _ => best = Some((s, value)),
        }
    }
    best.expect("games have at least one cell")
}

/// Social optimum divided by the worst equilibrium welfare.
pub fn price_of_anarchy(
    game: &NormalFormGame,
    equilibria: &[StrategyProfile],
) -> Result<Rational> {
    let (_, opt) = social_optimum(game);
    let worst = equilibria
        .iter()
        .map(|p| social_welfare(game, p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or(Error::EmptyEquilibriumSet)?;
    if !worst.is_positive() {
        return Err(Error::UndefinedMetric(worst.to_string()));
    }
    Ok(opt / worst)
}
