use std::collections::HashMap;
use std::io::BufRead;

use crate::partition::Labeling;
use crate::rng::RngSeed;
use crate::{Error, Result};

/// Undirected simple graph over dense node indices `0..num_nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    /// Sorted, each pair stored as `(low, high)`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    node_ids: Option<Vec<String>>,
}

/// What [`load_edge_list`] dropped while reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadReport {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

impl Graph {
    /// Builds a graph, collapsing duplicates and dropping self-loops.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            if u != v {
                list.push((u.min(v), u.max(v)));
            }
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &list {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            num_nodes,
            edges: list,
            adjacency,
            node_ids: None,
        })
    }

    /// Attaches external ids, one per node.
    pub fn with_node_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.num_nodes {
            return Err(Error::InvalidParameter(format!(
                "{} node ids for {} nodes",
                ids.len(),
                self.num_nodes
            )));
        }
        self.node_ids = Some(ids);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn node_ids(&self) -> Option<&[String]> {
        self.node_ids.as_deref()
    }

    /// Component index of every node; components are numbered by their
    /// smallest node.
    pub fn connected_components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.num_nodes];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.num_nodes {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Induced subgraph on `nodes` (renumbered in the given order).
    pub fn induced(&self, nodes: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.num_nodes];
        for (new, &old) in nodes.iter().enumerate() {
            if old >= self.num_nodes || index[old] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "invalid or repeated node {old} in subgraph selection"
                )));
            }
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        let mut sub = Self::from_edges(nodes.len(), edges)?;
        if let Some(ids) = &self.node_ids {
            sub.node_ids = Some(nodes.iter().map(|&i| ids[i].clone()).collect());
        }
        Ok(sub)
    }

    /// Largest connected component (ties: the one containing the smallest
    /// node) and the original indices of its nodes in increasing order.
    pub fn largest_component(&self) -> Result<(Self, Vec<usize>)> {
        let comp = self.connected_components();
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count)
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .ok_or(Error::EmptyLabeling)?;
        let nodes: Vec<usize> = (0..self.num_nodes).filter(|&i| comp[i] == best).collect();
        Ok((self.induced(&nodes)?, nodes))
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.num_nodes];
        let valid = perm.len() == self.num_nodes
            && perm
                .iter()
                .all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true));
        if !valid {
            return Err(Error::InvalidParameter(
                "not a permutation of the nodes".into(),
            ));
        }
        Self::from_edges(
            self.num_nodes,
            self.edges.iter().map(|&(u, v)| (perm[u], perm[v])),
        )
    }
}

/// Reads a whitespace-separated edge list. Node tokens are mapped to dense
/// indices in first-appearance order; a third token (timestamp or weight) is
/// ignored. Blank lines and lines starting with `#` or `%` are skipped.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadReport)> {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw = Vec::new();
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        report.lines += 1;
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected two node tokens, found {trimmed:?}"),
            });
        };
        let mut intern = |tok: &str| {
            *index.entry(tok.to_owned()).or_insert_with(|| {
                ids.push(tok.to_owned());
                ids.len() - 1
            })
        };
        let (u, v) = (intern(a), intern(b));
        if u == v {
            report.self_loops += 1;
        } else {
            raw.push((u, v));
        }
    }
    let graph = Graph::from_edges(ids.len(), raw.iter().copied())?;
    report.duplicate_edges = raw.len() - graph.num_edges();
    Ok((graph.with_node_ids(ids)?, report))
}

pub fn parse_edge_list(text: &str) -> Result<(Graph, LoadReport)> {
    load_edge_list(text.as_bytes())
}

/// Reads ground-truth labels for the nodes of `graph`.
///
/// Two layouts are accepted. One label per line assigns labels in node
/// order, which is increasing id order when every node id is an integer and
/// first-appearance order otherwise. Two tokens per line (`id label`) assign by node id. Either
/// way every node must receive exactly one label.
pub fn load_node_labels(graph: &Graph, text: &str) -> Result<Labeling> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
        .collect();
    let n = graph.num_nodes();
    let width = rows.first().map_or(1, |(_, t)| t.len());
    if let Some((line, t)) = rows.iter().find(|(_, t)| t.len() != width || width > 2) {
        return Err(Error::Parse {
            line: *line,
            message: format!("expected 1 or 2 tokens consistently, found {}", t.len()),
        });
    }
    let lookup: HashMap<&str, usize> = match graph.node_ids() {
        Some(ids) => ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect(),
        None => HashMap::new(),
    };
    let node_of = |id: &str| -> Option<usize> {
        if graph.node_ids().is_some() {
            lookup.get(id).copied()
        } else {
            id.parse().ok().filter(|&i: &usize| i < n)
        }
    };
    let mut raw: Vec<Option<&str>> = vec![None; n];
    if width == 2 {
        for (line, t) in &rows {
            let node = node_of(t[0]).ok_or_else(|| Error::Parse {
                line: *line,
                message: format!("unknown node id {:?}", t[0]),
            })?;
            if raw[node].replace(t[1]).is_some() {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("node {:?} labeled twice", t[0]),
                });
            }
        }
        if let Some(node) = raw.iter().position(Option::is_none) {
            return Err(Error::InvalidParameter(format!(
                "truth file has no label for node {}",
                graph
                    .node_ids()
                    .map_or(node.to_string(), |ids| ids[node].clone())
            )));
        }
    } else {
        if rows.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: rows.len(),
            });
        }
        let numeric: Option<Vec<u64>> = match graph.node_ids() {
            Some(ids) => ids.iter().map(|id| id.parse().ok()).collect(),
            None => None,
        };
        let mut order: Vec<usize> = (0..n).collect();
        if let Some(numeric) = numeric {
            order.sort_by_key(|&i| numeric[i]);
        }
        for (&node, (_, t)) in order.iter().zip(&rows) {
            raw[node] = Some(t[0]);
        }
    }
    crate::partition::make_labeling(raw.into_iter().map(|l| l.expect("every node labeled")))
}

/// Stochastic block model with independent edges: probability `p_in` inside
/// a block, `p_out` across blocks. Nodes are numbered block by block.
pub fn sample_sbm(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: RngSeed,
) -> Result<(Graph, Labeling)> {
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
    }
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "block sizes must be positive".into(),
        ));
    }
    let labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = labels.len();
    let mut stream = seed.stream();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if stream.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    Ok((
        Graph::from_edges(n, edges)?,
        Labeling::from_labels(&labels)?,
    ))
}
