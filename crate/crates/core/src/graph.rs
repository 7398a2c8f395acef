//! Orient the undirected edges of a skeleton/CPDAG by pairwise direction
//! scores, inserting edges in confidence order while keeping the graph
//! acyclic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataio::DataMatrix;
use crate::decision::decide;
use crate::error::{Error, Result};
use crate::pair::{Direction, Pair};
use crate::scoring::aggregate_score;
use crate::seeding::derive_seed;

/// Node names, undirected edges to orient, and already-oriented edges.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub nodes: Vec<String>,
    pub undirected: Vec<(usize, usize)>,
    pub oriented: Vec<(usize, usize)>,
}

impl Skeleton {
    /// Parse an edge-list: one edge per line, `A -- B` for undirected and
    /// `A -> B` for pre-oriented; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut node_index = |name: &str, nodes: &mut Vec<String>| -> usize {
            if let Some(k) = nodes.iter().position(|n| n == name) {
                k
            } else {
                nodes.push(name.to_string());
                nodes.len() - 1
            }
        };
        let mut undirected = Vec::new();
        let mut oriented = Vec::new();
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 || (tokens[1] != "--" && tokens[1] != "->") {
                return Err(Error::Graph(format!(
                    "line {}: expected \"A -- B\" or \"A -> B\", got {line:?}",
                    lineno + 1
                )));
            }
            let a = node_index(tokens[0], &mut nodes);
            let b = node_index(tokens[2], &mut nodes);
            if a == b {
                return Err(Error::Graph(format!("line {}: self-loop", lineno + 1)));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::Graph(format!(
                    "line {}: duplicate edge between {} and {}",
                    lineno + 1,
                    tokens[0],
                    tokens[2]
                )));
            }
            if tokens[1] == "--" {
                undirected.push((a, b));
            } else {
                oriented.push((a, b));
            }
        }
        let skeleton = Self {
            nodes,
            undirected,
            oriented,
        };
        if !is_acyclic(&skeleton.oriented, skeleton.nodes.len()) {
            return Err(Error::Graph("pre-oriented edges contain a cycle".into()));
        }
        Ok(skeleton)
    }
}

/// Kahn's algorithm: true when the directed edge list has no cycle.
pub fn is_acyclic(edges: &[(usize, usize)], node_count: usize) -> bool {
    let mut indegree = vec![0usize; node_count];
    let mut adj = vec![Vec::new(); node_count];
    for (a, b) in edges {
        adj[*a].push(*b);
        indegree[*b] += 1;
    }
    let mut queue: Vec<usize> = (0..node_count).filter(|k| indegree[*k] == 0).collect();
    let mut visited = 0usize;
    while let Some(k) = queue.pop() {
        visited += 1;
        for &next in &adj[k] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                queue.push(next);
            }
        }
    }
    visited == node_count
}

/// How an edge of the result got its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeOrigin {
    /// Pre-oriented in the input skeleton.
    Given,
    /// Inserted in the score-preferred direction.
    Preferred,
    /// Preferred direction would have closed a cycle; reverse inserted.
    Reversed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub from: String,
    pub to: String,
    pub score: Option<f64>,
    pub confidence: Option<f64>,
    pub origin: EdgeOrigin,
}

/// Acyclic directed graph produced by orientation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientedGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<OrientedEdge>,
}

/// A collider a -> c <- b with a and b nonadjacent.
pub type VStructure = (String, String, String);

/// Orientation output: the graph plus diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientResult {
    pub graph: OrientedGraph,
    /// Undirected edges dropped because both directions closed a cycle.
    pub dropped: Vec<(String, String)>,
    /// V-structures present in the result but not among the pre-oriented
    /// edges, and vice versa. Reported as a diagnostic, not enforced.
    pub v_structures_created: Vec<VStructure>,
    pub v_structures_destroyed: Vec<VStructure>,
}

/// Pairwise score attached to an undirected edge, before insertion.
#[derive(Debug, Clone)]
pub struct ScoredEdge {
    pub a: usize,
    pub b: usize,
    /// Direction score for a -> b.
    pub score: f64,
    pub confidence: f64,
}

/// Score every undirected edge on its two data columns, then insert edges
/// in confidence order, reversing or dropping any insertion that would
/// close a cycle.
pub fn orient(skeleton: &Skeleton, data: &DataMatrix, m: usize, seed: u64) -> Result<OrientResult> {
    let column = |k: usize| -> Result<&[f64]> {
        data.column(&skeleton.nodes[k])
            .ok_or_else(|| Error::Graph(format!("no data column named {:?}", skeleton.nodes[k])))
    };
    if !is_acyclic(&skeleton.oriented, skeleton.nodes.len()) {
        return Err(Error::Graph("pre-oriented edges contain a cycle".into()));
    }

    let mut scored = Vec::with_capacity(skeleton.undirected.len());
    for (k, (a, b)) in skeleton.undirected.iter().enumerate() {
        let pair = Pair::new(column(*a)?.to_vec(), column(*b)?.to_vec())?;
        let score = aggregate_score(&pair, m, derive_seed(seed, k as u64))?;
        scored.push(ScoredEdge {
            a: *a,
            b: *b,
            score,
            confidence: score.max(1.0 - score),
        });
    }

    let inserted = insert_ranked(&skeleton.oriented, &scored, &skeleton.nodes);
    build_result(skeleton, inserted)
}

/// Outcome of the ranked insertion stage: kept edges as
/// `(from, to, directed score, origin)` plus dropped node pairs.
#[derive(Debug, Clone)]
pub struct Inserted {
    pub kept: Vec<(usize, usize, f64, EdgeOrigin)>,
    pub dropped: Vec<(usize, usize)>,
}

/// The pure insertion stage of [`orient`], exposed so adversarial score
/// configurations can be exercised without data.
pub fn insert_ranked(
    pre_oriented: &[(usize, usize)],
    scored: &[ScoredEdge],
    names: &[String],
) -> Inserted {
    let mut ranked: Vec<&ScoredEdge> = scored.iter().collect();
    ranked.sort_by(|l, r| {
        r.confidence
            .total_cmp(&l.confidence)
            .then_with(|| edge_name(l, names).cmp(&edge_name(r, names)))
    });

    let mut directed: Vec<(usize, usize)> = pre_oriented.to_vec();
    let mut kept: Vec<(usize, usize, f64, EdgeOrigin)> = Vec::new();
    let mut dropped = Vec::new();
    for e in ranked {
        // Preferred direction: a -> b when the score favors it, b -> a
        // otherwise; an exactly undecided score keeps the listed order.
        let (from, to, score) = if e.score >= 0.5 {
            (e.a, e.b, e.score)
        } else {
            (e.b, e.a, 1.0 - e.score)
        };
        directed.push((from, to));
        if is_acyclic(&directed, names.len()) {
            kept.push((from, to, score, EdgeOrigin::Preferred));
            continue;
        }
        directed.pop();
        directed.push((to, from));
        if is_acyclic(&directed, names.len()) {
            kept.push((to, from, 1.0 - score, EdgeOrigin::Reversed));
            continue;
        }
        directed.pop();
        dropped.push((e.a, e.b));
    }
    Inserted { kept, dropped }
}

fn edge_name(e: &ScoredEdge, names: &[String]) -> (String, String) {
    let (x, y) = (&names[e.a], &names[e.b]);
    if x <= y {
        (x.clone(), y.clone())
    } else {
        (y.clone(), x.clone())
    }
}

fn build_result(skeleton: &Skeleton, inserted: Inserted) -> Result<OrientResult> {
    let names = &skeleton.nodes;
    let mut edges: Vec<OrientedEdge> = skeleton
        .oriented
        .iter()
        .map(|(a, b)| OrientedEdge {
            from: names[*a].clone(),
            to: names[*b].clone(),
            score: None,
            confidence: None,
            origin: EdgeOrigin::Given,
        })
        .collect();
    let mut directed: Vec<(usize, usize)> = skeleton.oriented.clone();
    for (from, to, score, origin) in &inserted.kept {
        directed.push((*from, *to));
        edges.push(OrientedEdge {
            from: names[*from].clone(),
            to: names[*to].clone(),
            score: Some(*score),
            confidence: Some(score.max(1.0 - score)),
            origin: *origin,
        });
    }
    debug_assert!(is_acyclic(&directed, names.len()));

    let before = v_structures(&skeleton.oriented, names.len());
    let after = v_structures(&directed, names.len());
    let name3 =
        |(a, c, b): &(usize, usize, usize)| (names[*a].clone(), names[*c].clone(), names[*b].clone());
    let created = after.difference(&before).map(name3).collect();
    let destroyed = before.difference(&after).map(name3).collect();

    Ok(OrientResult {
        graph: OrientedGraph {
            nodes: names.clone(),
            edges,
        },
        dropped: inserted
            .dropped
            .iter()
            .map(|(a, b)| (names[*a].clone(), names[*b].clone()))
            .collect(),
        v_structures_created: created,
        v_structures_destroyed: destroyed,
    })
}

/// Colliders a -> c <- b (a < b) with a, b nonadjacent in the edge set.
fn v_structures(edges: &[(usize, usize)], node_count: usize) -> BTreeSet<(usize, usize, usize)> {
    let mut adjacent = BTreeSet::new();
    for (a, b) in edges {
        adjacent.insert((*a.min(b), *a.max(b)));
    }
    let mut parents = vec![Vec::new(); node_count];
    for (a, b) in edges {
        parents[*b].push(*a);
    }
    let mut out = BTreeSet::new();
    for (c, ps) in parents.iter().enumerate() {
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                let (lo, hi) = (a.min(b), a.max(b));
                if !adjacent.contains(&(lo, hi)) {
                    out.insert((lo, c, hi));
                }
            }
        }
    }
    out
}
