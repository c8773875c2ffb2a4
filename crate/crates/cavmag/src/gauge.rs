//! Per-mode phase rotations and spanning-tree gauge fixing.
//!
//! Rotating a mode `a` by `U = e^{i alpha a^+ a}` maps `a -> a e^{-i alpha}`,
//! so an edge `g e^{i phi} (from)(to)^+` picks up `-alpha` when the rotated
//! mode is `from` and `+alpha` when it is `to`; bare frequencies are untouched.
//! Phases on a spanning tree can always be rotated away; what survives is one
//! gauge-invariant loop phase per fundamental cycle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{normalize_phase, Coupling, CouplingGraph};

/// A fundamental cycle and its gauge-invariant loop phase.
///
/// The cycle is listed starting at its lexicographically smallest mode id,
/// moving toward that mode's smaller neighbor; `theta` is the signed sum of
/// edge phases along the traversal (`+phi` along an edge's from->to
/// orientation, `-phi` against), reduced to `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPhase {
    pub cycle: Vec<String>,
    pub theta: f64,
}

/// Result of gauge-fixing a graph.
#[derive(Debug, Clone)]
pub struct GaugeReport {
    /// Rotation angle per mode (the alpha in `U = e^{i alpha a^+ a}`).
    pub mode_rotations: BTreeMap<String, f64>,
    /// The input graph with all spanning-tree phases rotated to zero;
    /// residual phases live only on chord edges.
    pub canonical_graph: CouplingGraph,
    /// One entry per fundamental cycle of the spanning tree.
    pub cycles: Vec<LoopPhase>,
}

/// Rotate a single mode by `phase`.
pub fn rotate_mode(graph: &CouplingGraph, mode: &str, phase: f64) -> Result<CouplingGraph> {
    if !graph.contains_mode(mode) {
        return Err(Error::UnknownMode(mode.to_string()));
    }
    let couplings = graph
        .couplings()
        .iter()
        .map(|c| {
            let mut shifted = c.clone();
            if c.from == mode {
                shifted.phase = normalize_phase(c.phase - phase);
            } else if c.to == mode {
                shifted.phase = normalize_phase(c.phase + phase);
            }
            shifted
        })
        .collect();
    Ok(graph.with_couplings(couplings))
}

/// Apply a set of per-mode rotations simultaneously.
///
/// Each edge phase becomes `normalize(phi - psi_from + psi_to)`. Up to the
/// final normalization this equals composing [`rotate_mode`] over all modes in
/// any order.
pub fn apply_rotations(graph: &CouplingGraph, rotations: &BTreeMap<String, f64>) -> CouplingGraph {
    let psi = |id: &str| rotations.get(id).copied().unwrap_or(0.0);
    let couplings = graph
        .couplings()
        .iter()
        .map(|c| {
            let phase = normalize_phase((c.phase - psi(&c.from)) + psi(&c.to));
            Coupling { phase, ..c.clone() }
        })
        .collect();
    graph.with_couplings(couplings)
}

struct SpanningStructure {
    /// Rotation angle per mode that zeroes all tree-edge phases.
    psi: BTreeMap<String, f64>,
    /// Coupling indices not in the spanning forest, ordered lexicographically
    /// by their sorted endpoint pair.
    chords: Vec<usize>,
    /// Parent pointers within the forest: child id -> (parent id).
    parent: BTreeMap<String, String>,
}

/// Breadth-first spanning forest from the lexicographically smallest id of
/// each component, exploring neighbors in id order.
fn spanning_structure(graph: &CouplingGraph) -> SpanningStructure {
    let mut adjacency: BTreeMap<&str, Vec<(&str, usize)>> = BTreeMap::new();
    for mode in graph.modes() {
        adjacency.entry(&mode.id).or_default();
    }
    for (e, c) in graph.couplings().iter().enumerate() {
        adjacency.get_mut(c.from.as_str()).unwrap().push((&c.to, e));
        adjacency.get_mut(c.to.as_str()).unwrap().push((&c.from, e));
    }
    for neighbors in adjacency.values_mut() {
        neighbors.sort();
    }

    let mut psi: BTreeMap<String, f64> = BTreeMap::new();
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    let mut tree_edges: BTreeSet<usize> = BTreeSet::new();
    let mut visited: BTreeSet<&str> = BTreeSet::new();

    // BTreeMap iteration gives components in order of their smallest id.
    let ids: Vec<&str> = adjacency.keys().copied().collect();
    for root in ids {
        if visited.contains(root) {
            continue;
        }
        visited.insert(root);
        psi.insert(root.to_string(), 0.0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let psi_u = psi[u];
            for &(v, e) in &adjacency[u] {
                if visited.contains(v) {
                    continue;
                }
                visited.insert(v);
                let c = &graph.couplings()[e];
                // Choose psi_v so that (phi - psi_from) + psi_to cancels
                // exactly in floating point.
                let psi_v = if c.to == v {
                    -(c.phase - psi_u)
                } else {
                    c.phase + psi_u
                };
                psi.insert(v.to_string(), psi_v);
                parent.insert(v.to_string(), u.to_string());
                tree_edges.insert(e);
                queue.push_back(v);
            }
        }
    }

    let mut chords: Vec<usize> = (0..graph.couplings().len())
        .filter(|e| !tree_edges.contains(e))
        .collect();
    chords.sort_by_key(|&e| {
        let (a, b) = graph.couplings()[e].pair();
        (a.to_string(), b.to_string())
    });

    SpanningStructure {
        psi,
        chords,
        parent,
    }
}

/// Vertex sequence of the fundamental cycle closed by chord `e`, in canonical
/// orientation: starts at the smallest id, heading toward its smaller neighbor.
fn fundamental_cycle(
    structure: &SpanningStructure,
    graph: &CouplingGraph,
    e: usize,
) -> Vec<String> {
    let c = &graph.couplings()[e];
    let ancestors = |start: &str| -> Vec<String> {
        let mut path = vec![start.to_string()];
        let mut cur = start.to_string();
        while let Some(p) = structure.parent.get(&cur) {
            path.push(p.clone());
            cur = p.clone();
        }
        path
    };
    let up_from = ancestors(&c.from);
    let up_to = ancestors(&c.to);
    let to_set: BTreeMap<&str, usize> = up_to
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let (lca_i, lca_j) = up_from
        .iter()
        .enumerate()
        .find_map(|(i, id)| to_set.get(id.as_str()).map(|&j| (i, j)))
        .expect("chord endpoints share a tree component");

    // from -> ... -> lca -> ... -> to, closed by the chord (to -> from)
    let mut cycle: Vec<String> = up_from[..=lca_i].to_vec();
    cycle.extend(up_to[..lca_j].iter().rev().cloned());

    // Canonical orientation: rotate the smallest id to the front, then make
    // the second entry the smaller of that vertex's two cycle neighbors.
    let start = cycle
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    cycle.rotate_left(start);
    if cycle[cycle.len() - 1] < cycle[1] {
        cycle[1..].reverse();
    }
    cycle
}

/// Signed sum of edge phases around an ordered vertex loop.
fn signed_loop_phase(graph: &CouplingGraph, cycle: &[String]) -> f64 {
    let mut by_pair: BTreeMap<(&str, &str), &Coupling> = BTreeMap::new();
    for c in graph.couplings() {
        by_pair.insert(c.pair(), c);
    }
    let mut theta = 0.0;
    for i in 0..cycle.len() {
        let a = &cycle[i];
        let b = &cycle[(i + 1) % cycle.len()];
        let key = if a <= b {
            (a.as_str(), b.as_str())
        } else {
            (b.as_str(), a.as_str())
        };
        let c = by_pair[&key];
        if c.from == *a {
            theta += c.phase;
        } else {
            theta -= c.phase;
        }
    }
    normalize_phase(theta)
}

/// Gauge-invariant loop phases, one per fundamental cycle of the
/// deterministic spanning tree.
pub fn loop_phases(graph: &CouplingGraph) -> Vec<LoopPhase> {
    let structure = spanning_structure(graph);
    structure
        .chords
        .iter()
        .map(|&e| {
            let cycle = fundamental_cycle(&structure, graph, e);
            let theta = signed_loop_phase(graph, &cycle);
            LoopPhase { cycle, theta }
        })
        .collect()
}

/// Canonicalize coupling phases: zero on a spanning tree, residuals on chords.
///
/// The returned rotations, applied with [`apply_rotations`], reproduce
/// `canonical_graph` bit-for-bit. Works per component; an empty graph yields
/// an empty report.
pub fn reduce_phases(graph: &CouplingGraph) -> GaugeReport {
    let structure = spanning_structure(graph);
    let canonical_graph = apply_rotations(graph, &structure.psi);
    let cycles = structure
        .chords
        .iter()
        .map(|&e| {
            let cycle = fundamental_cycle(&structure, graph, e);
            let theta = signed_loop_phase(graph, &cycle);
            LoopPhase { cycle, theta }
        })
        .collect();
    GaugeReport {
        mode_rotations: structure.psi,
        canonical_graph,
        cycles,
    }
}

/// Number of independent cycles: |E| - |V| + #components.
pub fn cycle_rank(graph: &CouplingGraph) -> usize {
    let structure = spanning_structure(graph);
    structure.chords.len()
}
