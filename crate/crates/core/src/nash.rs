//! Nash equilibrium computation: exhaustive pure check, exact 2-player
//! support enumeration over rationals, and a numeric multistart solver for
//! 3+ players.

use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{
    expected_payoff, MixedStrategy, NormalFormGame, PureProfile, StrategyProfile,
};
use crate::linalg::{solve_exact, solve_f64, Solution};
use crate::rational::{from_f64, Rational};
use crate::Options;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Numeric,
}

#[derive(Debug, Clone)]
pub struct EquilibriumSet {
    /// Sorted, deduplicated.
    pub profiles: Vec<StrategyProfile>,
    pub mode: SolveMode,
    /// Some support admitted a solution continuum; only vertex solutions are
    /// listed.
    pub degenerate: bool,
    /// False when a numeric support was skipped by the cap or the numeric
    /// search came back empty.
    pub complete: bool,
}

/// All pure profiles from which no player has a profitable unilateral pure
/// deviation (non-strict comparison).
pub fn pure_nash(game: &NormalFormGame) -> Vec<PureProfile> {
    game.profiles()
        .filter(|s| is_pure_nash(game, s))
        .collect()
}

fn is_pure_nash(game: &NormalFormGame, s: &[usize]) -> bool {
    let mut alt = s.to_vec();
    for i in 0..game.num_players() {
        let here = game.payoff(s, i).unwrap();
        for t in 0..game.strategy_counts()[i] {
            alt[i] = t;
            if game.payoff(&alt, i).unwrap() > here {
                return false;
            }
        }
        alt[i] = s[i];
    }
    true
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|&j| mask >> j & 1 == 1).collect())
}

/// Exact support enumeration for 2-player games.
///
/// For every support pair (R, C) the opponent's mixture is pinned by the
/// indifference system; a pair contributes an equilibrium when both systems
/// have a unique solution that is strictly positive on the support and no
/// strategy outside the support does better. The set is flagged degenerate
/// when some returned equilibrium strategy admits more opponent best
/// responses than its own support size (the classic degeneracy certificate:
/// weight can then be shifted along a continuum, of which only vertex
/// solutions are listed), or when nothing is found at all.
pub fn support_enumeration_2p(game: &NormalFormGame) -> Result<EquilibriumSet> {
    if game.num_players() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "support enumeration needs 2 players, got {}",
            game.num_players()
        )));
    }
    let n1 = game.strategy_counts()[0];
    let n2 = game.strategy_counts()[1];
    let mut profiles = Vec::new();

    for rows in subsets(n1) {
        for cols in subsets(n2) {
            // Player 2's mixture y over `cols` makes player 1 indifferent on
            // `rows` at value v1; unknowns [y..., v1].
            let y_sol = indifference_solve(game, 0, &rows, &cols);
            // Player 1's mixture x over `rows`; unknowns [x..., v2].
            let x_sol = indifference_solve(game, 1, &cols, &rows);
            match (&x_sol, &y_sol) {
                (Solution::Inconsistent, _) | (_, Solution::Inconsistent) => continue,
                // An underdetermined pair carries no isolated solution; if a
                // continuum really is attached to an equilibrium, the
                // post-hoc best-response count below catches it at a vertex.
                (Solution::Underdetermined, _) | (_, Solution::Underdetermined) => continue,
                (Solution::Unique(x), Solution::Unique(y)) => {
                    let (x, v2) = x.split_at(rows.len());
                    let (y, v1) = y.split_at(cols.len());
                    if x.iter().chain(y).any(|p| !p.is_positive()) {
                        continue;
                    }
                    let sigma1 = scatter(x, &rows, n1);
                    let sigma2 = scatter(y, &cols, n2);
                    if best_off_support(game, 0, &sigma2, &rows, &v1[0])
                        || best_off_support(game, 1, &sigma1, &cols, &v2[0])
                    {
                        continue;
                    }
                    profiles.push(StrategyProfile {
                        strategies: vec![
                            MixedStrategy { probs: sigma1 },
                            MixedStrategy { probs: sigma2 },
                        ],
                    });
                }
            }
        }
    }
    profiles.sort();
    profiles.dedup();
    // A nondegenerate game always yields at least one equilibrium here, so
    // an empty result is itself a degeneracy certificate.
    let degenerate =
        profiles.is_empty() || profiles.iter().any(|p| degenerate_at(game, p));
    Ok(EquilibriumSet {
        profiles,
        mode: SolveMode::Exact,
        degenerate,
        complete: true,
    })
}

/// True when either player's strategy in `profile` has more opponent pure
/// best responses than its own support size.
fn degenerate_at(game: &NormalFormGame, profile: &StrategyProfile) -> bool {
    for i in 0..2 {
        let opp = 1 - i;
        let probs = &profile.strategies[i].probs;
        let responses: Vec<Rational> = (0..game.strategy_counts()[opp])
            .map(|t| {
                let mut total = Rational::zero();
                for (s, w) in probs.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    let cell = if i == 0 { [s, t] } else { [t, s] };
                    total += w * game.payoff(&cell, opp).unwrap();
                }
                total
            })
            .collect();
        let best = responses.iter().max().unwrap();
        let br_count = responses.iter().filter(|v| *v == best).count();
        let support_size = probs.iter().filter(|p| p.is_positive()).count();
        if br_count > support_size {
            return true;
        }
    }
    false
}

/// Builds and solves the system that makes `player` indifferent across
/// `own_support` when the opponent mixes over `opp_support`.
fn indifference_solve(
    game: &NormalFormGame,
    player: usize,
    own_support: &[usize],
    opp_support: &[usize],
) -> Solution {
    let k = opp_support.len();
    let mut a = Vec::with_capacity(own_support.len() + 1);
    let mut b = Vec::with_capacity(own_support.len() + 1);
    for &s in own_support {
        let mut row = Vec::with_capacity(k + 1);
        for &t in opp_support {
            let profile = if player == 0 { [s, t] } else { [t, s] };
            row.push(game.payoff(&profile, player).unwrap().clone());
        }
        row.push(-Rational::one());
        a.push(row);
        b.push(Rational::zero());
    }
    let mut norm = vec![Rational::one(); k];
    norm.push(Rational::zero());
    a.push(norm);
    b.push(Rational::one());
    solve_exact(&a, &b)
}

fn scatter(values: &[Rational], positions: &[usize], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (v, &p) in values.iter().zip(positions) {
        out[p] = v.clone();
    }
    out
}

/// True when some strategy of `player` outside `support` strictly beats the
/// equilibrium value against the opponent mixture.
fn best_off_support(
    game: &NormalFormGame,
    player: usize,
    opponent: &[Rational],
    support: &[usize],
    value: &Rational,
) -> bool {
    let own = game.strategy_counts()[player];
    for s in 0..own {
        if support.contains(&s) {
            continue;
        }
        let mut payoff = Rational::zero();
        for (t, w) in opponent.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let profile = if player == 0 { [s, t] } else { [t, s] };
            payoff += w * game.payoff(&profile, player).unwrap();
        }
        if &payoff > value {
            return true;
        }
    }
    false
}

/// Numeric support enumeration for N >= 3 players: for every joint support
/// the multilinear indifference system is attacked with 16 seeded starts of
/// damped Newton. Probabilities are stored as exact rationals of the
/// converged floats, renormalized to sum exactly 1.
pub fn nash_numeric(game: &NormalFormGame, opts: &Options) -> Result<EquilibriumSet> {
    let n = game.num_players();
    if n < 3 {
        return Err(Error::ShapeMismatch(format!(
            "numeric solver expects 3+ players, got {n}"
        )));
    }
    let pay: Vec<Vec<f64>> = (0..game.num_cells())
        .map(|c| game.cell_at(c).iter().map(|r| r.to_f64().unwrap()).collect())
        .collect();
    let counts = game.strategy_counts().to_vec();

    let mut accepted: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut cap_skipped = false;

    let per_player: Vec<Vec<Vec<usize>>> = counts
        .iter()
        .map(|&c| subsets(c).collect::<Vec<_>>())
        .collect();
    let mut combo_index = vec![0usize; n];
    let mut combo_counter = 0u64;
    loop {
        let supports: Vec<&Vec<usize>> = (0..n)
            .map(|i| &per_player[i][combo_index[i]])
            .collect();
        let size: usize = supports.iter().map(|s| s.len()).product();
        if size > opts.max_support_product {
            cap_skipped = true;
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(combo_counter);
            for _ in 0..16 {
                if let Some(sigma) =
                    newton_attempt(&counts, &pay, &supports, opts.tol, &mut rng)
                {
                    if !accepted
                        .iter()
                        .any(|other| max_norm_distance(other, &sigma) < 1e-6)
                    {
                        accepted.push(sigma);
                    }
                }
            }
        }
        combo_counter += 1;
        // Odometer over per-player support choices.
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            combo_index[i] += 1;
            if combo_index[i] < per_player[i].len() {
                break;
            }
            combo_index[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }

    let mut profiles: Vec<StrategyProfile> = accepted
        .iter()
        .map(|sigma| float_profile_to_rational(sigma))
        .collect();
    profiles.sort();
    profiles.dedup();
    let empty = profiles.is_empty();
    Ok(EquilibriumSet {
        profiles,
        mode: SolveMode::Numeric,
        degenerate: false,
        complete: !cap_skipped && !empty,
    })
}

fn max_norm_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn float_profile_to_rational(sigma: &[Vec<f64>]) -> StrategyProfile {
    let strategies = sigma
        .iter()
        .map(|probs| {
            let rats: Vec<Rational> = probs
                .iter()
                .map(|&p| from_f64(p.max(0.0)).unwrap_or_else(Rational::zero))
                .collect();
            let total: Rational = rats.iter().sum();
            MixedStrategy {
                probs: rats.into_iter().map(|r| r / &total).collect(),
            }
        })
        .collect();
    StrategyProfile { strategies }
}

/// Expected payoff for `player` playing pure strategy `s` while everyone
/// else follows `sigma`; `fixed` optionally pins one more player.
fn pure_vs_mixed(
    counts: &[usize],
    pay: &[Vec<f64>],
    sigma: &[Vec<f64>],
    player: usize,
    s: usize,
    fixed: Option<(usize, usize)>,
) -> f64 {
    let n = counts.len();
    let mut total = 0.0;
    let mut profile = vec![0usize; n];
    // Iterate the full tensor; desk-scale games keep this cheap.
    let cells: usize = counts.iter().product();
    for cell in 0..cells {
        let mut idx = cell;
        for i in (0..n).rev() {
            profile[i] = idx % counts[i];
            idx /= counts[i];
        }
        if profile[player] != s {
            continue;
        }
        if let Some((j, t)) = fixed {
            if profile[j] != t {
                continue;
            }
        }
        let mut w = 1.0;
        for i in 0..n {
            if i == player || fixed.map_or(false, |(j, _)| j == i) {
                continue;
            }
            w *= sigma[i][profile[i]];
        }
        if w != 0.0 {
            total += w * pay[cell][player];
        }
    }
    total
}

fn newton_attempt(
    counts: &[usize],
    pay: &[Vec<f64>],
    supports: &[&Vec<usize>],
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<f64>>> {
    let n = counts.len();
    let sizes: Vec<usize> = supports.iter().map(|s| s.len()).collect();
    let dim: usize = sizes.iter().map(|k| k + 1).sum();
    let offsets: Vec<usize> = {
        let mut off = vec![0; n];
        for i in 1..n {
            off[i] = off[i - 1] + sizes[i - 1] + 1;
        }
        off
    };

    // Random interior start on each support simplex; values start at 0.
    let mut z = vec![0.0; dim];
    for i in 0..n {
        let mut total = 0.0;
        for k in 0..sizes[i] {
            let u: f64 = rng.gen_range(0.05..1.0);
            z[offsets[i] + k] = u;
            total += u;
        }
        for k in 0..sizes[i] {
            z[offsets[i] + k] /= total;
        }
    }

    let expand = |z: &[f64]| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut probs = vec![0.0; counts[i]];
                for (k, &s) in supports[i].iter().enumerate() {
                    probs[s] = z[offsets[i] + k];
                }
                probs
            })
            .collect()
    };

    let residual = |z: &[f64]| -> Vec<f64> {
        let sigma = expand(z);
        let mut f = vec![0.0; dim];
        for i in 0..n {
            let v = z[offsets[i] + sizes[i]];
            for (k, &s) in supports[i].iter().enumerate() {
                f[offsets[i] + k] = pure_vs_mixed(counts, pay, &sigma, i, s, None) - v;
            }
            f[offsets[i] + sizes[i]] =
                supports[i].iter().enumerate().map(|(k, _)| z[offsets[i] + k]).sum::<f64>() - 1.0;
        }
        f
    };

    let norm_inf = |f: &[f64]| f.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    // Seed the value unknowns with the payoffs at the start point.
    {
        let sigma = expand(&z);
        for i in 0..n {
            let v: f64 = supports[i]
                .iter()
                .enumerate()
                .map(|(k, &s)| z[offsets[i] + k] * pure_vs_mixed(counts, pay, &sigma, i, s, None))
                .sum();
            z[offsets[i] + sizes[i]] = v;
        }
    }

    let mut f = residual(&z);
    for _ in 0..60 {
        let fnorm = norm_inf(&f);
        if fnorm < tol * 1e-3 {
            break;
        }
        let sigma = expand(&z);
        // Jacobian: rows follow the residual layout.
        let mut jac = vec![vec![0.0; dim]; dim];
        for i in 0..n {
            for (k, &s) in supports[i].iter().enumerate() {
                let row = offsets[i] + k;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    for (l, &t) in supports[j].iter().enumerate() {
                        jac[row][offsets[j] + l] =
                            pure_vs_mixed(counts, pay, &sigma, i, s, Some((j, t)));
                    }
                }
                jac[row][offsets[i] + sizes[i]] = -1.0;
            }
            let row = offsets[i] + sizes[i];
            for k in 0..sizes[i] {
                jac[row][offsets[i] + k] = 1.0;
            }
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let step = solve_f64(&jac, &rhs)?;
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda >= 1.0 / 1024.0 {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + lambda * d).collect();
            let ftrial = residual(&trial);
            if norm_inf(&ftrial) < fnorm {
                z = trial;
                f = ftrial;
                improved = true;
                break;
            }
            lambda /= 2.0;
        }
        if !improved {
            break;
        }
    }

    if norm_inf(&f) >= tol {
        return None;
    }
    // Probabilities must be non-negative up to tol; clip and verify the
    // epsilon-best-response property on the cleaned profile.
    if z.iter()
        .enumerate()
        .any(|(idx, &v)| is_prob_slot(&offsets, &sizes, idx) && v < -tol)
    {
        return None;
    }
    let mut sigma = expand(&z);
    for probs in sigma.iter_mut() {
        let mut total = 0.0;
        for p in probs.iter_mut() {
            *p = p.max(0.0);
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
    }
    for i in 0..n {
        let v: f64 = (0..counts[i])
            .map(|s| sigma[i][s] * pure_vs_mixed(counts, pay, &sigma, i, s, None))
            .sum();
        for s in 0..counts[i] {
            if pure_vs_mixed(counts, pay, &sigma, i, s, None) > v + tol {
                return None;
            }
        }
    }
    Some(sigma)
}

fn is_prob_slot(offsets: &[usize], sizes: &[usize], idx: usize) -> bool {
    offsets
        .iter()
        .zip(sizes)
        .any(|(&off, &k)| idx >= off && idx < off + k)
}

/// Dispatch: 1-player argmax, exact support enumeration for 2 players,
/// otherwise pure equilibria united with the numeric solver's findings.
pub fn all_nash(game: &NormalFormGame, opts: &Options) -> Result<EquilibriumSet> {
    match game.num_players() {
        0 => Err(Error::InvalidInput("game has no players".into())),
        1 => {
            let count = game.strategy_counts()[0];
            let best = (0..count)
                .map(|s| game.payoff(&[s], 0).unwrap())
                .max()
                .unwrap()
                .clone();
            let profiles: Vec<StrategyProfile> = (0..count)
                .filter(|&s| game.payoff(&[s], 0).unwrap() == &best)
                .map(|s| StrategyProfile::from_pure(&[s], game.strategy_counts()))
                .collect();
            let degenerate = profiles.len() > 1;
            Ok(EquilibriumSet {
                profiles,
                mode: SolveMode::Exact,
                degenerate,
                complete: true,
            })
        }
        2 => support_enumeration_2p(game),
        _ => {
            let numeric = nash_numeric(game, opts)?;
            let mut profiles: Vec<StrategyProfile> = pure_nash(game)
                .iter()
                .map(|s| StrategyProfile::from_pure(s, game.strategy_counts()))
                .collect();
            for p in &numeric.profiles {
                let close = profiles.iter().any(|q| profile_distance_f64(p, q) < 1e-6);
                if !close {
                    profiles.push(p.clone());
                }
            }
            profiles.sort();
            profiles.dedup();
            let empty = profiles.is_empty();
            Ok(EquilibriumSet {
                profiles,
                mode: SolveMode::Numeric,
                degenerate: numeric.degenerate,
                complete: numeric.complete && !empty,
            })
        }
    }
}

fn profile_distance_f64(a: &StrategyProfile, b: &StrategyProfile) -> f64 {
    a.strategies
        .iter()
        .flat_map(|m| m.probs.iter())
        .zip(b.strategies.iter().flat_map(|m| m.probs.iter()))
        .map(|(x, y)| (x.to_f64().unwrap() - y.to_f64().unwrap()).abs())
        .fold(0.0, f64::max)
}

/// Independent best-response check: no player may gain (more than `tol`, if
/// given) by any unilateral pure deviation.
pub fn best_response_audit(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    tol: Option<f64>,
) -> Result<bool> {
    let slack = match tol {
        Some(t) => from_f64(t).unwrap_or_else(Rational::zero),
        None => Rational::zero(),
    };
    for i in 0..game.num_players() {
        let achieved = expected_payoff(game, profile, i)?;
        for s in 0..game.strategy_counts()[i] {
            let mut deviated = profile.clone();
            deviated.strategies[i] = MixedStrategy::pure(s, game.strategy_counts()[i]);
            if expected_payoff(game, &deviated, i)? > &achieved + &slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Convenience used by tests: every profile of the set passes the audit.
pub fn audit_set(game: &NormalFormGame, set: &EquilibriumSet) -> Result<bool> {
    let tol = match set.mode {
        SolveMode::Exact => None,
        SolveMode::Numeric => Some(1e-9),
    };
    for p in &set.profiles {
        if !best_response_audit(game, p, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
