//! Misinformation games: an actual game plus one subjective view per player,
//! canonicalization, the position-update operation, natural misinformed
//! equilibria (NME) and the price of misinformation.

use num::Signed;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::game::{
    profiles_of, social_optimum, social_welfare, support_with_eps, NormalFormGame, PureProfile,
    StrategyProfile,
};
use crate::inflation::inflate_game;
use crate::nash::{all_nash, SolveMode};
use crate::rational::{from_f64, Rational};
use crate::Options;

/// ⟨G⁰, G¹, …, G^N⟩: the actual game and each player's subjective view.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MisinformationGame {
    pub actual: NormalFormGame,
    pub subjective: Vec<NormalFormGame>,
}

/// A position: a pure profile used as an index into the payoff tensors.
pub type PositionVector = PureProfile;

/// Sorted duplicate-free set of positions; the node identity in the
/// set-based adaptation graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PositionSet {
    positions: Vec<PositionVector>,
}

impl PositionSet {
    pub fn empty() -> Self {
        PositionSet::default()
    }

    pub fn from_vec(mut positions: Vec<PositionVector>) -> Self {
        positions.sort();
        positions.dedup();
        PositionSet { positions }
    }

    pub fn contains(&self, v: &[usize]) -> bool {
        self.positions.binary_search_by(|p| p.as_slice().cmp(v)).is_ok()
    }

    /// Copy with `v` inserted (sorted position).
    pub fn with(&self, v: &[usize]) -> Self {
        match self.positions.binary_search_by(|p| p.as_slice().cmp(v)) {
            Ok(_) => self.clone(),
            Err(at) => {
                let mut positions = self.positions.clone();
                positions.insert(at, v.to_vec());
                PositionSet { positions }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &PositionVector> {
        self.positions.iter()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl MisinformationGame {
    pub fn new(actual: NormalFormGame, subjective: Vec<NormalFormGame>) -> Self {
        MisinformationGame { actual, subjective }
    }

    pub fn num_players(&self) -> usize {
        self.actual.num_players()
    }
}

/// Canonical: one subjective view per player and every component game shares
/// the actual game's shape (same players, same per-player strategy counts).
pub fn is_canonical(mg: &MisinformationGame) -> bool {
    mg.subjective.len() == mg.actual.num_players()
        && mg.subjective.iter().all(|g| g.same_shape(&mg.actual))
}

fn require_canonical(mg: &MisinformationGame) -> Result<()> {
    if !is_canonical(mg) {
        return Err(Error::NonCanonical(format!(
            "actual shape {:?}, subjective shapes {:?}",
            mg.actual.strategy_counts(),
            mg.subjective
                .iter()
                .map(|g| g.strategy_counts().to_vec())
                .collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Appends one subjective game: the empty game inflated to the target
/// shape, so its first-strategy cell is all zeros and fillers are strictly
/// dominated.
pub fn add_game(mg: &MisinformationGame, target_counts: &[usize]) -> Result<MisinformationGame> {
    let empty = NormalFormGame::new(vec![], vec![vec![]])?;
    let appended = inflate_game(&empty, target_counts)?;
    let mut out = mg.clone();
    out.subjective.push(appended);
    Ok(out)
}

/// Canonicalizes: every component game is inflated to the per-player union
/// shape, and one subjective game is appended for each player still lacking
/// a view (fictional players introduced by the union).
pub fn inflation_process(mg: &MisinformationGame) -> Result<MisinformationGame> {
    let all_games = std::iter::once(&mg.actual).chain(&mg.subjective);
    let n_union = all_games
        .clone()
        .map(|g| g.num_players())
        .max()
        .unwrap_or(0);
    let mut union_counts = vec![1usize; n_union];
    for g in all_games {
        for (i, &c) in g.strategy_counts().iter().enumerate() {
            union_counts[i] = union_counts[i].max(c);
        }
    }
    let mut out = MisinformationGame {
        actual: inflate_game(&mg.actual, &union_counts)?,
        subjective: mg
            .subjective
            .iter()
            .map(|g| inflate_game(g, &union_counts))
            .collect::<Result<_>>()?,
    };
    while out.subjective.len() < n_union {
        out = add_game(&out, &union_counts)?;
    }
    Ok(out)
}

/// Natural misinformed equilibria: each player independently plays her
/// component of some Nash equilibrium of her own subjective game; the set is
/// the Cartesian product of those per-player components, deduplicated.
/// Returns the profiles and the solve mode (numeric as soon as any
/// subjective game needed the numeric solver).
pub fn nme_with_mode(
    mg: &MisinformationGame,
    opts: &Options,
) -> Result<(Vec<StrategyProfile>, SolveMode)> {
    require_canonical(mg)?;
    let mut mode = SolveMode::Exact;
    let mut components: Vec<Vec<_>> = Vec::with_capacity(mg.num_players());
    for (i, g) in mg.subjective.iter().enumerate() {
        let set = all_nash(g, opts)?;
        if set.degenerate && !opts.allow_degenerate {
            return Err(Error::DegenerateGame(format!("subjective game {}", i + 1)));
        }
        if set.profiles.is_empty() {
            return Err(Error::EmptyEquilibriumSet);
        }
        if set.mode == SolveMode::Numeric {
            mode = SolveMode::Numeric;
        }
        let mut own: Vec<_> = set
            .profiles
            .iter()
            .map(|p| p.strategies[i].clone())
            .collect();
        own.sort();
        own.dedup();
        components.push(own);
    }
    let mut profiles = vec![StrategyProfile { strategies: vec![] }];
    for comp in components {
        let mut next = Vec::with_capacity(profiles.len() * comp.len());
        for partial in &profiles {
            for c in &comp {
                let mut p = partial.clone();
                p.strategies.push(c.clone());
                next.push(p);
            }
        }
        profiles = next;
    }
    profiles.sort();
    profiles.dedup();
    Ok((profiles, mode))
}

pub fn nme(mg: &MisinformationGame, opts: &Options) -> Result<Vec<StrategyProfile>> {
    Ok(nme_with_mode(mg, opts)?.0)
}

/// χ(σ): Cartesian product of the per-player supports — the positions the
/// profile can realize. `eps` thresholds numeric-mode probabilities (pass 0
/// for exact profiles). Sorted lexicographically.
pub fn characteristic_set(profile: &StrategyProfile, eps: f64) -> Vec<PositionVector> {
    let eps_rat = from_f64(eps).filter(|e| e.is_positive());
    let supports: Vec<Vec<usize>> = profile
        .strategies
        .iter()
        .map(|m| match &eps_rat {
            Some(e) => support_with_eps(m, e),
            None => support_with_eps(m, &Rational::from_integer(0.into())),
        })
        .collect();
    let mut out = vec![vec![]];
    for supp in &supports {
        let mut next = Vec::with_capacity(out.len() * supp.len());
        for partial in &out {
            for &s in supp {
                let mut v = partial.clone();
                v.push(s);
                next.push(v);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// The v-update: every subjective view learns the actual payoff vector at
/// position v. The actual game never changes.
pub fn update(mg: &MisinformationGame, v: &[usize]) -> Result<MisinformationGame> {
    require_canonical(mg)?;
    let truth = mg.actual.cell(v)?.to_vec();
    let mut out = mg.clone();
    for g in out.subjective.iter_mut() {
        g.set_cell(v, truth.clone())?;
    }
    Ok(out)
}

/// Fold of `update` over the set; order-independent because single-position
/// updates commute.
pub fn update_set(mg: &MisinformationGame, xs: &PositionSet) -> Result<MisinformationGame> {
    let mut out = mg.clone();
    for v in xs.iter() {
        out = update(&out, v)?;
    }
    Ok(out)
}

/// Cell-by-cell exact equality of all component games.
pub fn mg_equal(a: &MisinformationGame, b: &MisinformationGame) -> Result<bool> {
    if !a.actual.same_shape(&b.actual) || a.subjective.len() != b.subjective.len() {
        return Err(Error::ShapeMismatch(
            "misinformation games have different shapes".into(),
        ));
    }
    Ok(a == b)
}

/// Social optimum of the actual game divided by the worst NME welfare,
/// both evaluated under the actual payoffs.
pub fn price_of_misinformation(mg: &MisinformationGame, opts: &Options) -> Result<Rational> {
    let (profiles, _) = nme_with_mode(mg, opts)?;
    let (_, opt) = social_optimum(&mg.actual);
    let worst = profiles
        .iter()
        .map(|p| social_welfare(&mg.actual, p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or(Error::EmptyEquilibriumSet)?;
    if !worst.is_positive() {
        return Err(Error::UndefinedMetric(worst.to_string()));
    }
    Ok(opt / worst)
}

/// All in-bounds positions of the canonical shape, in lexicographic order.
pub fn all_positions(mg: &MisinformationGame) -> Vec<PositionVector> {
    profiles_of(mg.actual.strategy_counts()).collect()
}

/// Positions whose subjective payoff vectors all already equal the actual
/// ones (updates there are no-ops).
pub fn known_positions(mg: &MisinformationGame) -> BTreeSet<PositionVector> {
    all_positions(mg)
        .into_iter()
        .filter(|v| {
            let truth = mg.actual.cell(v).unwrap();
            mg.subjective.iter().all(|g| g.cell(v).unwrap() == truth)
        })
        .collect()
}
