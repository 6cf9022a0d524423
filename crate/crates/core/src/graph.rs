//! Directed network storage and ingestion.
//!
//! A [`DirectedGraph`] keeps the binary adjacency in two compressed sparse
//! row structures: `forward` lists the out-neighbours of every node and
//! `reverse` lists the in-neighbours. Both are built at load time and never
//! mutated afterwards.

use std::borrow::Cow;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Largest node id that fits the `u32` edge storage.
pub const MAX_NODE_ID: u64 = u32::MAX as u64 - 1;

/// Compressed sparse rows over `n` rows with sorted, distinct column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// Builds from `(row, col)` pairs already sorted by row then column.
    fn from_sorted(n: usize, pairs: impl Iterator<Item = (u32, u32)>, n_pairs: usize) -> Self {
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(n_pairs);
        for (row, col) in pairs {
            offsets[row as usize + 1] += 1;
            targets.push(col);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, targets }
    }

    /// Row-swapped copy of `self` (counting sort, keeps columns ascending).
    fn transposed(&self, n: usize) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &t in &self.targets {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; self.targets.len()];
        for row in 0..n {
            for &col in self.row(row) {
                let slot = &mut cursor[col as usize];
                targets[*slot] = row as u32;
                *slot += 1;
            }
        }
        Csr { offsets, targets }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn n_entries(&self) -> usize {
        self.targets.len()
    }

    fn heap_bytes(&self) -> usize {
        self.offsets.capacity() * std::mem::size_of::<usize>()
            + self.targets.capacity() * std::mem::size_of::<u32>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub drop_self_loops: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            drop_self_loops: true,
        }
    }
}

/// Immutable binary directed graph on nodes `0..n_nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n_nodes: usize,
    forward: Csr,
    reverse: Csr,
}

impl DirectedGraph {
    /// Builds a graph from raw `(source, target)` pairs. Duplicates collapse
    /// to a single edge; self-loops are removed when the option says so.
    pub fn from_edges(
        n_nodes: usize,
        mut edges: Vec<(u32, u32)>,
        options: LoadOptions,
    ) -> Result<Self> {
        if n_nodes as u64 > MAX_NODE_ID + 1 {
            return Err(Error::invalid(format!(
                "{n_nodes} nodes exceed the supported maximum of {}",
                MAX_NODE_ID + 1
            )));
        }
        if let Some(&(s, t)) = edges
            .iter()
            .find(|&&(s, t)| s as usize >= n_nodes || t as usize >= n_nodes)
        {
            return Err(Error::NodeOutOfRange {
                id: s.max(t) as u64,
                n_nodes,
            });
        }
        if options.drop_self_loops {
            edges.retain(|&(s, t)| s != t);
        }
        edges.sort_unstable();
        edges.dedup();
        edges.shrink_to_fit();
        let n_edges = edges.len();
        let forward = Csr::from_sorted(n_nodes, edges.into_iter(), n_edges);
        let reverse = forward.transposed(n_nodes);
        Ok(DirectedGraph {
            n_nodes,
            forward,
            reverse,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.forward.n_entries()
    }

    /// Out-neighbours, ascending.
    pub fn successors(&self, node: usize) -> &[u32] {
        self.forward.row(node)
    }

    /// In-neighbours, ascending.
    pub fn predecessors(&self, node: usize) -> &[u32] {
        self.reverse.row(node)
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.forward.degree(node)
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.reverse.degree(node)
    }

    pub fn is_dangling(&self, node: usize) -> bool {
        self.forward.degree(node) == 0
    }

    pub fn dangling_mask(&self) -> Vec<bool> {
        (0..self.n_nodes).map(|j| self.is_dangling(j)).collect()
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.forward
            .row(source)
            .binary_search(&(target as u32))
            .is_ok()
    }

    pub fn forward(&self) -> &Csr {
        &self.forward
    }

    pub fn reverse(&self) -> &Csr {
        &self.reverse
    }

    /// Graph with every edge reversed. Swaps the two stored directions.
    pub fn transpose(&self) -> DirectedGraph {
        DirectedGraph {
            n_nodes: self.n_nodes,
            forward: self.reverse.clone(),
            reverse: self.forward.clone(),
        }
    }

    /// All edges in source-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_nodes)
            .flat_map(move |s| self.forward.row(s).iter().map(move |&t| (s, t as usize)))
    }

    /// Heap memory held by the adjacency structures.
    pub fn heap_bytes(&self) -> usize {
        self.forward.heap_bytes() + self.reverse.heap_bytes()
    }
}

/// Parses an edge list. Comment lines start with `#`; a leading
/// `# nodes: N` line fixes the node count, otherwise it is `max id + 1`.
pub fn load_edge_list<R: BufRead>(reader: R, options: LoadOptions) -> Result<DirectedGraph> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut max_id: Option<u64> = None;
    let mut seen_data = false;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if !seen_data && declared.is_none() {
                if let Some(value) = comment.trim().strip_prefix("nodes:") {
                    let n = value.trim().parse::<u64>().map_err(|_| {
                        Error::parse(line_no, format!("bad node count header {text:?}"))
                    })?;
                    if n > MAX_NODE_ID + 1 {
                        return Err(Error::parse(line_no, format!("node count {n} too large")));
                    }
                    declared = Some(n as usize);
                }
            }
            continue;
        }
        seen_data = true;
        let mut fields = text.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(
                line_no,
                format!("expected two node ids, found {text:?}"),
            ));
        };
        let src = parse_id(a, line_no)?;
        let dst = parse_id(b, line_no)?;
        max_id = Some(max_id.map_or(src.max(dst), |m: u64| m.max(src).max(dst)));
        edges.push((src as u32, dst as u32));
    }

    let n_nodes = match (declared, max_id) {
        (Some(n), Some(m)) if m >= n as u64 => {
            return Err(Error::NodeOutOfRange { id: m, n_nodes: n })
        }
        (Some(n), _) => n,
        (None, Some(m)) => m as usize + 1,
        (None, None) => 0,
    };
    DirectedGraph::from_edges(n_nodes, edges, options)
}

fn parse_id(token: &str, line_no: usize) -> Result<u64> {
    let id: u64 = token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid node id {token:?}")))?;
    if id > MAX_NODE_ID {
        return Err(Error::parse(
            line_no,
            format!("node id {id} exceeds the maximum {MAX_NODE_ID}"),
        ));
    }
    Ok(id)
}

/// Writes the graph in the format read by [`load_edge_list`], with an
/// explicit node-count header so trailing isolated nodes survive.
pub fn write_edge_list<W: Write>(mut w: W, graph: &DirectedGraph) -> Result<()> {
    writeln!(w, "# nodes: {}", graph.n_nodes())?;
    for (s, t) in graph.edges() {
        writeln!(w, "{s} {t}")?;
    }
    Ok(())
}

/// Node display names. Unlabelled ids render as their decimal value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    names: HashMap<usize, String>,
    duplicates: usize,
}

impl LabelMap {
    pub fn lookup(&self, id: usize) -> Cow<'_, str> {
        match self.names.get(&id) {
            Some(name) => Cow::Borrowed(name.as_str()),
            None => Cow::Owned(id.to_string()),
        }
    }

    pub fn get(&self, id: usize) -> Option<&str> {
        self.names.get(&id).map(String::as_str)
    }

    /// Number of lines that redefined an id seen earlier.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// First id whose label equals `name` exactly.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.names
            .iter()
            .filter(|(_, v)| v.as_str() == name)
            .map(|(&k, _)| k)
            .min()
    }

    pub fn insert(&mut self, id: usize, name: impl Into<String>) {
        if self.names.insert(id, name.into()).is_some() {
            self.duplicates += 1;
        }
    }
}

/// Reads `id<TAB>title` lines. A repeated id keeps the last title.
pub fn load_labels<R: BufRead>(reader: R) -> Result<LabelMap> {
    let mut labels = LabelMap::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, title)) = line.split_once('\t') else {
            return Err(Error::parse(line_no, "expected id<TAB>title"));
        };
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid node id {id:?}")))?;
        labels.insert(id, title);
    }
    if labels.duplicates > 0 {
        log::warn!("{} duplicate label ids; later lines win", labels.duplicates);
    }
    Ok(labels)
}
