//! The adaptation procedure: players repeatedly play a misinformed
//! equilibrium, learn the actual payoffs at the positions it realizes, and
//! update their subjective views. The state space is explored as a BFS over
//! position sets (the set of learned positions identifies a node), with a
//! parallel variant sharing lock-guarded structures.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::sync::{Arc, Condvar, Mutex};

use crate::error::{Error, Result};
use crate::game::StrategyProfile;
use crate::misinfo::{
    characteristic_set, nme, update, MisinformationGame, PositionSet, PositionVector,
};
use crate::Options;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: PositionSet,
    pub via: PositionVector,
    pub to: PositionSet,
    /// False when the update at `via` was a no-op (the views already agreed
    /// with the actual game there).
    pub changed: bool,
}

/// Output of the adaptation-graph traversal. All collections are sorted, so
/// two runs over the same input compare equal structurally.
#[derive(Debug, Clone)]
pub struct TraverseResult {
    pub root: Arc<MisinformationGame>,
    /// Node -> game after learning exactly that set of positions. Nodes
    /// whose update was a no-op share their parent's game handle.
    pub theta: BTreeMap<PositionSet, Arc<MisinformationGame>>,
    /// Node -> misinformed equilibria of its game.
    pub nmes: BTreeMap<PositionSet, Arc<Vec<StrategyProfile>>>,
    pub edges: Vec<Edge>,
    /// Sinks: nodes where every realizable update is a no-op. These games
    /// regenerate themselves and nothing else.
    pub terminal: Vec<PositionSet>,
    /// Nodes with at least one no-op realizable update (a self-loop in the
    /// game graph); superset of `terminal`. The adaptation closure of these
    /// games is the stable set, and SME extraction scans them.
    pub self_looping: Vec<PositionSet>,
    /// Distinct games reached, up to exact payoff equality.
    pub unique_mgs: usize,
    /// Support threshold used when reading equilibrium supports (0 for the
    /// exact 2-player path).
    pub support_eps: f64,
}

impl TraverseResult {
    pub fn nodes(&self) -> impl Iterator<Item = &PositionSet> {
        self.theta.keys()
    }

    pub fn num_nodes(&self) -> usize {
        self.theta.len()
    }

    /// Number of position sets whose game lies in the terminal set (the
    /// self-regenerating games); distinct sets sharing such a game all
    /// count, so this can exceed the number of distinct terminal games.
    pub fn leaves(&self) -> usize {
        let terminal_games: HashSet<&MisinformationGame> = self
            .self_looping
            .iter()
            .map(|x| self.theta[x].as_ref())
            .collect();
        self.theta
            .values()
            .filter(|g| terminal_games.contains(g.as_ref()))
            .count()
    }

    /// Terminal games up to exact equality, sorted by node.
    pub fn terminal_games(&self) -> Vec<&MisinformationGame> {
        let mut out: Vec<&MisinformationGame> = Vec::new();
        for x in &self.terminal {
            let g = self.theta[x].as_ref();
            if !out.iter().any(|&h| h == g) {
                out.push(g);
            }
        }
        out
    }

    /// Length of the longest chain of game-changing updates; equals the
    /// number of steps the naive fixpoint needs.
    pub fn longest_path(&self) -> usize {
        let mut adj: BTreeMap<&PositionSet, Vec<&PositionSet>> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.changed) {
            adj.entry(&e.from).or_default().push(&e.to);
        }
        fn depth<'a>(
            node: &'a PositionSet,
            adj: &BTreeMap<&'a PositionSet, Vec<&'a PositionSet>>,
            memo: &mut BTreeMap<&'a PositionSet, usize>,
        ) -> usize {
            if let Some(&d) = memo.get(node) {
                return d;
            }
            let d = adj
                .get(node)
                .map(|succ| 1 + succ.iter().map(|s| depth(s, adj, memo)).max().unwrap_or(0))
                .unwrap_or(0);
            memo.insert(node, d);
            d
        }
        let mut memo = BTreeMap::new();
        let root = PositionSet::empty();
        depth(&root, &adj, &mut memo)
    }
}

struct QueueState {
    queue: VecDeque<PositionSet>,
    in_flight: usize,
}

#[derive(Default)]
struct VisitState {
    visited: BTreeSet<PositionSet>,
    /// Visited nodes whose update changed the game (they get their own NME
    /// and outgoing edges); the rest are aliases of their parent.
    expanded: BTreeSet<PositionSet>,
}

#[derive(Default)]
struct Marks {
    terminal: BTreeSet<PositionSet>,
    self_looping: BTreeSet<PositionSet>,
}

struct Shared {
    queue: Mutex<QueueState>,
    queue_cv: Condvar,
    visit: Mutex<VisitState>,
    theta: Mutex<BTreeMap<PositionSet, Arc<MisinformationGame>>>,
    nmes: Mutex<BTreeMap<PositionSet, Arc<Vec<StrategyProfile>>>>,
    edges: Mutex<Vec<Edge>>,
    marks: Mutex<Marks>,
    error: Mutex<Option<Error>>,
}

impl Shared {
    fn fail(&self, e: Error) {
        let mut slot = self.error.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
        self.queue_cv.notify_all();
    }

    fn failed(&self) -> bool {
        self.error.lock().unwrap().is_some()
    }
}

fn chi_union(profiles: &[StrategyProfile], eps: f64) -> BTreeSet<PositionVector> {
    let mut union = BTreeSet::new();
    for p in profiles {
        union.extend(characteristic_set(p, eps));
    }
    union
}

fn worker_loop(shared: &Shared, opts: &Options, eps: f64) {
    loop {
        // Pop a node, or finish when the queue drained and nobody is busy.
        let w = {
            let mut qs = shared.queue.lock().unwrap();
            loop {
                if shared.failed() {
                    return;
                }
                if let Some(w) = qs.queue.pop_front() {
                    qs.in_flight += 1;
                    break w;
                }
                if qs.in_flight == 0 {
                    return;
                }
                qs = shared.queue_cv.wait(qs).unwrap();
            }
        };

        let game = shared.theta.lock().unwrap()[&w].clone();
        let profiles = shared.nmes.lock().unwrap()[&w].clone();
        let mut children = Vec::new();
        let mut any_noop = false;
        let mut all_noop = true;

        for v in chi_union(&profiles, eps) {
            if w.contains(&v) {
                any_noop = true;
                shared.edges.lock().unwrap().push(Edge {
                    from: w.clone(),
                    via: v.clone(),
                    to: w.clone(),
                    changed: false,
                });
                continue;
            }
            let x = w.with(&v);
            let updated = match update(&game, &v) {
                Ok(g) => g,
                Err(e) => {
                    shared.fail(e);
                    return;
                }
            };
            let changed = updated != *game;
            if !changed {
                any_noop = true;
                shared.edges.lock().unwrap().push(Edge {
                    from: w.clone(),
                    via: v.clone(),
                    to: x.clone(),
                    changed: false,
                });
                // Alias: same game, so nothing new can come out of x.
                let fresh = {
                    let mut vs = shared.visit.lock().unwrap();
                    vs.visited.insert(x.clone())
                };
                if fresh {
                    shared.theta.lock().unwrap().insert(x.clone(), game.clone());
                    shared.nmes.lock().unwrap().insert(x, profiles.clone());
                }
                continue;
            }
            all_noop = false;
            // Mark visited before the equilibrium work so no other worker
            // repeats it.
            let (fresh, expanded_before, over_cap) = {
                let mut vs = shared.visit.lock().unwrap();
                let fresh = vs.visited.insert(x.clone());
                if fresh {
                    vs.expanded.insert(x.clone());
                }
                (
                    fresh,
                    vs.expanded.contains(&x),
                    vs.visited.len() > opts.max_nodes,
                )
            };
            if over_cap {
                shared.fail(Error::CapExceeded(format!(
                    "more than {} position sets visited",
                    opts.max_nodes
                )));
                return;
            }
            if expanded_before {
                // Edges into alias nodes would show up as fake sinks, so
                // only expanded targets get their incoming edges recorded.
                shared.edges.lock().unwrap().push(Edge {
                    from: w.clone(),
                    via: v.clone(),
                    to: x.clone(),
                    changed: true,
                });
            }
            if !fresh {
                continue;
            }
            let handle = Arc::new(updated);
            shared
                .theta
                .lock()
                .unwrap()
                .insert(x.clone(), handle.clone());
            match nme(&handle, opts) {
                Ok(mut list) => {
                    list.sort();
                    shared.nmes.lock().unwrap().insert(x.clone(), Arc::new(list));
                }
                Err(e) => {
                    shared.fail(e);
                    return;
                }
            }
            children.push(x);
        }

        {
            let mut marks = shared.marks.lock().unwrap();
            if any_noop {
                marks.self_looping.insert(w.clone());
            }
            if all_noop {
                marks.terminal.insert(w.clone());
            }
        }

        let mut qs = shared.queue.lock().unwrap();
        qs.queue.extend(children);
        qs.in_flight -= 1;
        shared.queue_cv.notify_all();
    }
}

fn run_traversal(
    mg: &MisinformationGame,
    opts: &Options,
    threads: usize,
) -> Result<TraverseResult> {
    let root_profiles = {
        let mut list = nme(mg, opts)?;
        list.sort();
        Arc::new(list)
    };
    let eps = if mg.num_players() == 2 {
        0.0
    } else {
        opts.support_epsilon
    };
    let root = Arc::new(mg.clone());
    let empty = PositionSet::empty();

    let shared = Shared {
        queue: Mutex::new(QueueState {
            queue: VecDeque::from([empty.clone()]),
            in_flight: 0,
        }),
        queue_cv: Condvar::new(),
        visit: Mutex::new(VisitState::default()),
        theta: Mutex::new(BTreeMap::from([(empty.clone(), root.clone())])),
        nmes: Mutex::new(BTreeMap::from([(empty.clone(), root_profiles)])),
        edges: Mutex::new(Vec::new()),
        marks: Mutex::new(Marks::default()),
        error: Mutex::new(None),
    };
    {
        let mut vs = shared.visit.lock().unwrap();
        vs.visited.insert(empty.clone());
        vs.expanded.insert(empty);
    }

    if threads <= 1 {
        worker_loop(&shared, opts, eps);
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| worker_loop(&shared, opts, eps));
            }
        });
    }

    if let Some(e) = shared.error.lock().unwrap().take() {
        return Err(e);
    }

    let theta = shared.theta.into_inner().unwrap();
    let nmes = shared.nmes.into_inner().unwrap();
    let mut edges = shared.edges.into_inner().unwrap();
    edges.sort();
    let marks = shared.marks.into_inner().unwrap();
    let unique_mgs = {
        let distinct: HashSet<&MisinformationGame> =
            theta.values().map(|a| a.as_ref()).collect();
        distinct.len()
    };
    Ok(TraverseResult {
        root,
        theta,
        nmes,
        edges,
        terminal: marks.terminal.into_iter().collect(),
        self_looping: marks.self_looping.into_iter().collect(),
        unique_mgs,
        support_eps: eps,
    })
}

/// Breadth-first traversal of the set-based adaptation graph.
pub fn traverse(mg: &MisinformationGame, opts: &Options) -> Result<TraverseResult> {
    run_traversal(mg, opts, 1)
}

/// Same traversal with `threads` workers sharing the queue, visited set,
/// terminal marks and the game map, each behind its own lock. Nodes are
/// marked visited before their equilibrium work, so no node is processed
/// twice; the result is the same as the sequential run.
pub fn parallel_traverse(
    mg: &MisinformationGame,
    opts: &Options,
    threads: usize,
) -> Result<TraverseResult> {
    run_traversal(mg, opts, threads.max(1))
}

/// Stable misinformed equilibria: equilibria of self-regenerating games all
/// of whose realizable positions are already learned.
pub fn compute_sme(result: &TraverseResult) -> Vec<StrategyProfile> {
    let mut out = BTreeSet::new();
    for x in &result.self_looping {
        let game = &result.theta[x];
        for sigma in result.nmes[x].iter() {
            let stable = characteristic_set(sigma, result.support_eps)
                .iter()
                .all(|v| {
                    x.contains(v)
                        || update(game, v).map(|g| g == **game).unwrap_or(false)
                });
            if stable {
                out.insert(sigma.clone());
            }
        }
    }
    out.into_iter().collect()
}

/// Full pipeline: traverse, then extract the stable misinformed equilibria.
pub fn adaptation_procedure(
    mg: &MisinformationGame,
    opts: &Options,
) -> Result<Vec<StrategyProfile>> {
    Ok(compute_sme(&traverse(mg, opts)?))
}

#[derive(Debug, Clone)]
pub struct NaiveAdaptation {
    /// Fixpoint set of games, deduplicated by exact equality.
    pub stable_set: Vec<MisinformationGame>,
    /// Steps until two consecutive iterates coincide.
    pub lad: usize,
    /// Games generated across all computed steps, duplicates included, plus
    /// the root.
    pub total_nodes: u64,
}

/// One application of the adaptation step to a set of games: every game
/// branches over every realizable position of every equilibrium.
pub fn adapt_step(
    games: &[MisinformationGame],
    opts: &Options,
) -> Result<Vec<MisinformationGame>> {
    let mut out: Vec<MisinformationGame> = Vec::new();
    for g in games {
        let eps = if g.num_players() == 2 {
            0.0
        } else {
            opts.support_epsilon
        };
        for sigma in nme(g, opts)? {
            for v in characteristic_set(&sigma, eps) {
                let next = update(g, &v)?;
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
    }
    Ok(out)
}

fn set_equal(a: &[MisinformationGame], b: &[MisinformationGame]) -> bool {
    a.len() == b.len() && a.iter().all(|g| b.contains(g))
}

/// Reference implementation: iterate the adaptation step on the whole set
/// until it stops changing. Exponentially wasteful by design; used to
/// cross-check the graph traversal.
pub fn naive_adaptation(
    mg: &MisinformationGame,
    opts: &Options,
    max_steps: usize,
) -> Result<NaiveAdaptation> {
    let eps = if mg.num_players() == 2 {
        0.0
    } else {
        opts.support_epsilon
    };
    let mut nme_cache: Vec<(MisinformationGame, Arc<Vec<StrategyProfile>>)> = Vec::new();
    let mut cached_nme = |g: &MisinformationGame,
                          opts: &Options|
     -> Result<Arc<Vec<StrategyProfile>>> {
        if let Some((_, list)) = nme_cache.iter().find(|(h, _)| h == g) {
            return Ok(list.clone());
        }
        let list = Arc::new(nme(g, opts)?);
        nme_cache.push((g.clone(), list.clone()));
        Ok(list)
    };

    let mut current = vec![mg.clone()];
    let mut total_nodes = 1u64;
    for step in 0..=max_steps {
        let mut next: Vec<MisinformationGame> = Vec::new();
        for g in &current {
            for sigma in cached_nme(g, opts)?.iter() {
                for v in characteristic_set(sigma, eps) {
                    total_nodes += 1;
                    let produced = update(g, &v)?;
                    if !next.contains(&produced) {
                        next.push(produced);
                    }
                }
            }
        }
        if set_equal(&current, &next) {
            return Ok(NaiveAdaptation {
                stable_set: current,
                lad: step,
                total_nodes,
            });
        }
        current = next;
    }
    Err(Error::CapExceeded(format!(
        "naive adaptation did not stabilize within {max_steps} steps"
    )))
}

/// Follows a single greedy path: always the first equilibrium, always its
/// first unlearned position. Returns the final equilibrium (whose positions
/// are all learned) and the number of updates performed.
pub fn find_one_sme(
    mg: &MisinformationGame,
    opts: &Options,
) -> Result<(StrategyProfile, usize)> {
    let eps = if mg.num_players() == 2 {
        0.0
    } else {
        opts.support_epsilon
    };
    let mut current = mg.clone();
    let mut updates = 0usize;
    let cap = mg.actual.num_cells() + 1;
    for _ in 0..=cap {
        let mut profiles = nme(&current, opts)?;
        profiles.sort();
        let sigma = profiles
            .into_iter()
            .next()
            .ok_or(Error::EmptyEquilibriumSet)?;
        let mut advanced = false;
        for v in characteristic_set(&sigma, eps) {
            let next = update(&current, &v)?;
            if next != current {
                current = next;
                updates += 1;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok((sigma, updates));
        }
    }
    Err(Error::CapExceeded(
        "single-path search exceeded the position count".into(),
    ))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stable content hash of a game, identical across runs and platforms.
pub fn game_hash(mg: &MisinformationGame) -> u64 {
    let mut buf = String::new();
    let push_game = |g: &crate::game::NormalFormGame, buf: &mut String| {
        buf.push('[');
        for c in 0..g.num_cells() {
            for r in g.cell_at(c) {
                buf.push_str(&crate::rational::format_rational(r));
                buf.push(';');
            }
        }
        buf.push(']');
    };
    push_game(&mg.actual, &mut buf);
    for g in &mg.subjective {
        push_game(g, &mut buf);
    }
    fnv1a(buf.as_bytes())
}

fn position_set_label(x: &PositionSet) -> String {
    let vs: Vec<String> = x
        .iter()
        .map(|v| {
            let coords: Vec<String> = v.iter().map(|&i| (i + 1).to_string()).collect();
            format!("({})", coords.join(","))
        })
        .collect();
    format!("{{{}}}", vs.join(","))
}

/// Deterministic DOT rendering of the traversal. Nodes are labeled with
/// their position set (1-based) and a stable hash of their game; terminal
/// nodes are double-circled; no-op edges are dashed. With `loopless`, no-op
/// edges and the nodes only they reach are omitted, leaving the DAG of
/// game-changing updates.
pub fn export_dot(result: &TraverseResult, loopless: bool) -> String {
    let kept_edges: Vec<&Edge> = result
        .edges
        .iter()
        .filter(|e| !loopless || e.changed)
        .collect();
    let nodes: Vec<&PositionSet> = if loopless {
        let mut keep: BTreeSet<&PositionSet> = kept_edges
            .iter()
            .flat_map(|e| [&e.from, &e.to])
            .collect();
        let root = result
            .theta
            .keys()
            .next()
            .expect("traversal has a root node");
        keep.insert(root);
        keep.into_iter().collect()
    } else {
        result.theta.keys().collect()
    };
    let ids: BTreeMap<&PositionSet, usize> =
        nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let terminal: BTreeSet<&PositionSet> = result.terminal.iter().collect();

    let mut out = String::from("digraph adaptation {\n  rankdir=LR;\n");
    for (i, x) in nodes.iter().enumerate() {
        let hash = game_hash(&result.theta[*x]);
        let shape = if terminal.contains(x) {
            " shape=doublecircle"
        } else {
            " shape=circle"
        };
        out.push_str(&format!(
            "  n{} [label=\"{}\\n#{:08x}\"{}];\n",
            i,
            position_set_label(x),
            hash & 0xffff_ffff,
            shape
        ));
    }
    for e in kept_edges {
        let (Some(&from), Some(&to)) = (ids.get(&e.from), ids.get(&e.to)) else {
            continue;
        };
        let style = if e.changed { "" } else { " style=dashed" };
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{}\"{}];\n",
            from,
            to,
            position_set_label(&PositionSet::from_vec(vec![e.via.clone()])),
            style
        ));
    }
    out.push_str("}\n");
    out
}
