use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::Zero;
use petgraph::algo::toposort;
use petgraph::graph::DiGraph;

use crate::model::{Machine, RoundMarker, Scalar, StateId, Tape, Weight};

use super::absorb::{absorption, Target};
use super::graph::{ConfigGraph, Kind};
use super::{ensure_valid, EngineError, DEFAULT_NODE_CAP};

/// Halting statistics of one outer round, started at a round marker.
///
/// `p_rej` is the probability that the round rejects. `p_acc` is the
/// probability that a round which survived rejection passes, i.e. halts
/// accepting or hands control to the next phase. With these semantics the
/// geometric closure of `(p_acc, p_rej)` is the exact halting distribution
/// of the repeated round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundStats<W> {
    pub p_acc: W,
    pub p_rej: W,
    /// Unconditional probability that the round halts accepting.
    pub halt_accept: W,
    /// Probability that control returns to the marker with the register
    /// restored.
    pub renew: W,
    /// Probability of reaching each other round marker.
    pub handoff: Vec<(StateId, W)>,
}

impl<W: Weight> RoundStats<W> {
    /// Stats of a round that only halts: accepts with probability
    /// `p_acc (1 - p_rej)`, rejects with `p_rej`, renews otherwise.
    pub fn new(p_acc: W, p_rej: W) -> Self {
        let survive = W::one() - p_rej.clone();
        RoundStats {
            halt_accept: p_acc.clone() * survive.clone(),
            renew: (W::one() - p_acc.clone()) * survive,
            p_acc,
            p_rej,
            handoff: Vec::new(),
        }
    }

    /// Expected number of rounds until the round stops renewing.
    pub fn expected_rounds(&self) -> f64 {
        1.0 / (1.0 - self.renew.to_f64())
    }
}

/// Total `(accept, reject)` probabilities of a round repeated until it
/// halts:
///
/// `reject = p_rej / (p_acc + p_rej - p_acc p_rej)`,
/// `accept = (p_acc - p_acc p_rej) / (p_acc + p_rej - p_acc p_rej)`.
pub fn geometric_closure<W: Weight>(rs: &RoundStats<W>) -> Result<(W, W), EngineError> {
    let cross = rs.p_acc.clone() * rs.p_rej.clone();
    let denom = rs.p_acc.clone() + rs.p_rej.clone() - cross.clone();
    if denom.is_zero() || (!W::EXACT && denom.to_f64() <= 0.0) {
        return Err(EngineError::NonHalting);
    }
    let accept = (rs.p_acc.clone() - cross) / denom.clone();
    let reject = rs.p_rej.clone() / denom;
    Ok((accept, reject))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Exit {
    Accept,
    Reject,
    Marker(usize),
}

/// Explores from `start` until every path halts or reaches a round marker,
/// and returns the absorption probabilities of `start` into accept,
/// reject and each marker (in declaration order).
fn absorb_from<S: Scalar>(
    graph: &mut ConfigGraph<'_, S>,
    start: usize,
    marker_nodes: &[(RoundMarker, usize)],
) -> Result<(S::Prob, S::Prob, Vec<S::Prob>), EngineError> {
    let k = marker_nodes.len();
    let class_of = |e: Exit| match e {
        Exit::Accept => 0,
        Exit::Reject => 1,
        Exit::Marker(j) => 2 + j,
    };
    let exit_of = |graph: &ConfigGraph<'_, S>, x: usize| -> Result<Option<Exit>, EngineError> {
        match graph.kind(x) {
            Kind::Accept => return Ok(Some(Exit::Accept)),
            Kind::Reject => return Ok(Some(Exit::Reject)),
            Kind::Live => {}
        }
        let c = graph.config(x);
        match marker_nodes.iter().position(|(m, _)| m.state == c.state) {
            None => Ok(None),
            Some(j) if marker_nodes[j].1 == x => Ok(Some(Exit::Marker(j))),
            Some(_) => Err(EngineError::NotRoundRenewing {
                state: graph.machine.state_name(c.state).to_string(),
                head: c.head,
            }),
        }
    };

    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    local.insert(start, 0);
    let mut edges: Vec<Vec<(Target, S::Prob)>> = Vec::new();
    while let Some(x) = queue.pop_front() {
        graph.expand(x)?;
        let mut out = Vec::new();
        for (t, p) in graph.edges(x).to_vec() {
            let target = match exit_of(graph, t)? {
                Some(e) => Target::Absorb(class_of(e)),
                None => {
                    let next = local.len();
                    let id = *local.entry(t).or_insert_with(|| {
                        queue.push_back(t);
                        next
                    });
                    Target::Transient(id)
                }
            };
            out.push((target, p));
        }
        let id = local[&x];
        if edges.len() <= id {
            edges.resize_with(id + 1, Vec::new);
        }
        edges[id] = out;
    }
    let h = absorption(&edges, 2 + k)?;
    let h0 = &h[0];
    Ok((h0[0].clone(), h0[1].clone(), h0[2..].to_vec()))
}

fn marker_nodes<S: Scalar>(graph: &mut ConfigGraph<'_, S>) -> Vec<(RoundMarker, usize)> {
    let markers: Vec<RoundMarker> = graph.machine.round_markers().to_vec();
    markers
        .into_iter()
        .map(|m| (m, graph.basis_node(m.state, m.head, m.basis)))
        .collect()
}

fn stats_at<S: Scalar>(
    graph: &mut ConfigGraph<'_, S>,
    markers: &[(RoundMarker, usize)],
    j: usize,
) -> Result<RoundStats<S::Prob>, EngineError> {
    let (acc, rej, reach) = absorb_from(graph, markers[j].1, markers)?;
    let renew = reach[j].clone();
    let handoff: Vec<(StateId, S::Prob)> = reach
        .iter()
        .enumerate()
        .filter(|(i, p)| *i != j && !p.is_zero())
        .map(|(i, p)| (markers[i].0.state, p.clone()))
        .collect();
    let pass = handoff.iter().fold(acc.clone(), |s, (_, p)| s + p.clone());
    let survive = <S::Prob as num_traits::One>::one() - rej.clone();
    let p_acc = if survive.is_zero() {
        survive.clone()
    } else {
        pass / survive
    };
    Ok(RoundStats {
        p_acc,
        p_rej: rej,
        halt_accept: acc,
        renew,
        handoff,
    })
}

/// Statistics of one round of `m` on `w`, starting at the declared round
/// marker `marker`: the register in the declared basis state and the head
/// at the declared position.
///
/// Every path is followed until it halts, comes back to the marker's
/// configuration (renewal) or reaches another marker's configuration
/// (handoff). Arriving at a marker state in any other configuration is an
/// error. Probabilities are exact for rational machines.
pub fn round_stats<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    marker: StateId,
) -> Result<RoundStats<S::Prob>, EngineError> {
    ensure_valid(m)?;
    let tape = Tape::checked(w, m.alphabet())?;
    let mut graph = ConfigGraph::new(m, tape, DEFAULT_NODE_CAP);
    let markers = marker_nodes(&mut graph);
    let j = markers
        .iter()
        .position(|(mk, _)| mk.state == marker)
        .ok_or_else(|| EngineError::NotAMarker(m.state_name(marker).to_string()))?;
    stats_at(&mut graph, &markers, j)
}

/// Closed-form halting probabilities of a whole run.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm<W> {
    pub accept: W,
    pub reject: W,
    /// Probability of ever reaching each marker, with its round statistics.
    pub rounds: Vec<(StateId, W, RoundStats<W>)>,
    /// Configurations explored.
    pub explored: usize,
}

impl<W: Weight> ClosedForm<W> {
    /// Expected number of rounds over all phases, weighted by how likely
    /// each phase is to be reached.
    pub fn expected_rounds(&self) -> f64 {
        self.rounds.iter().fold(0.0, |acc, (_, reach, rs)| {
            acc + reach.to_f64() * rs.expected_rounds()
        })
    }
}

/// Exact acceptance and rejection probabilities of `m` on `w`.
///
/// The run is split at the round markers: the prefix from the initial
/// configuration to the first marker is solved as an absorbing chain, each
/// marker's round is summarized by [`round_stats`] and repeated with
/// [`geometric_closure`], and the pass mass of a round is split between
/// acceptance and the markers it hands over to. Machines without markers
/// are solved in one absorbing chain. `budget` caps the number of
/// configurations expanded.
pub fn closed_form<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    budget: usize,
) -> Result<ClosedForm<S::Prob>, EngineError> {
    ensure_valid(m)?;
    let tape = Tape::checked(w, m.alphabet())?;
    let mut graph = ConfigGraph::new(m, tape, budget);
    let markers = marker_nodes(&mut graph);
    let zero = <S::Prob as num_traits::Zero>::zero;
    let one = <S::Prob as num_traits::One>::one;

    let init = graph.initial();
    let (mut accept, mut reject, mut reach) = match graph.kind(init) {
        Kind::Accept => (one(), zero(), vec![zero(); markers.len()]),
        Kind::Reject => (zero(), one(), vec![zero(); markers.len()]),
        Kind::Live => match markers.iter().position(|(_, n)| *n == init) {
            Some(j) => {
                let mut r = vec![zero(); markers.len()];
                r[j] = one();
                (zero(), zero(), r)
            }
            None => absorb_from(&mut graph, init, &markers)?,
        },
    };

    // Round statistics of every marker that can be reached.
    let mut stats: BTreeMap<usize, RoundStats<S::Prob>> = BTreeMap::new();
    let mut pending: Vec<usize> = (0..markers.len())
        .filter(|&j| !reach[j].is_zero())
        .collect();
    while let Some(j) = pending.pop() {
        if stats.contains_key(&j) {
            continue;
        }
        let rs = stats_at(&mut graph, &markers, j)?;
        for (s, _) in &rs.handoff {
            let i = markers
                .iter()
                .position(|(mk, _)| mk.state == *s)
                .expect("handoffs target markers");
            pending.push(i);
        }
        stats.insert(j, rs);
    }

    let mut g = DiGraph::<usize, ()>::new();
    let ids: BTreeMap<usize, _> = stats.keys().map(|&j| (j, g.add_node(j))).collect();
    for (&j, rs) in &stats {
        for (s, _) in &rs.handoff {
            let i = markers
                .iter()
                .position(|(mk, _)| mk.state == *s)
                .expect("handoffs target markers");
            g.add_edge(ids[&j], ids[&i], ());
        }
    }
    let order = toposort(&g, None).map_err(|_| EngineError::CyclicRounds)?;

    let mut rounds = Vec::new();
    for node in order {
        let j = g[node];
        let rs = &stats[&j];
        let r = reach[j].clone();
        rounds.push((markers[j].0.state, r.clone(), rs.clone()));
        if r.is_zero() {
            continue;
        }
        let (acc_share, rej_share) = geometric_closure(rs)?;
        reject = reject + r.clone() * rej_share;
        let pass = rs
            .handoff
            .iter()
            .fold(rs.halt_accept.clone(), |s, (_, p)| s + p.clone());
        if pass.is_zero() {
            continue;
        }
        let scale = r * acc_share / pass;
        accept = accept + scale.clone() * rs.halt_accept.clone();
        for (s, p) in &rs.handoff {
            let i = markers
                .iter()
                .position(|(mk, _)| mk.state == *s)
                .expect("handoffs target markers");
            reach[i] = reach[i].clone() + scale.clone() * p.clone();
        }
    }
    Ok(ClosedForm {
        accept,
        reject,
        rounds,
        explored: graph.len(),
    })
}
