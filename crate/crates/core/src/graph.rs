//! Undirected simple graphs, torus grids and the edge-list file format.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// An immutable simple undirected graph in compressed adjacency form.
///
/// Neighbor lists are sorted ascending, contain no duplicates and no
/// self-loops, and every edge appears in both endpoints' lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    /// Eight surrounding cells.
    Moore,
    /// Four orthogonal cells.
    VonNeumann,
}

impl Graph {
    /// Build from an undirected edge list. Duplicates and self-loops are rejected.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Sizing("graph needs at least one node".into()));
        }
        if node_count > u32::MAX as usize {
            return Err(Error::Sizing(format!("{node_count} nodes exceeds the id range")));
        }
        let mut degree = vec![0usize; node_count];
        for &(u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::Index { node: u.max(v), count: node_count });
            }
            if u == v {
                return Err(Error::Argument(format!("self-loop on node {u}")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut targets = vec![0u32; offsets[node_count]];
        for &(u, v) in edges {
            targets[fill[u]] = v as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..node_count {
            let list = &mut targets[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Argument(format!("duplicate edge {v}-{}", w[0])));
            }
        }
        Ok(Graph { offsets, targets })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u).iter().map(|&v| v as usize).filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        self.targets.len() as f64 / self.node_count() as f64
    }

    pub fn isolated_count(&self) -> usize {
        (0..self.node_count()).filter(|&v| self.degree(v) == 0).count()
    }

    /// Check symmetry, ordering, and absence of loops and duplicates.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        for v in 0..n {
            let list = self.neighbors(v);
            for (i, &w) in list.iter().enumerate() {
                let w = w as usize;
                if w >= n {
                    return Err(Error::Index { node: w, count: n });
                }
                if w == v {
                    return Err(Error::Argument(format!("self-loop on node {v}")));
                }
                if i > 0 && list[i - 1] as usize >= w {
                    return Err(Error::Argument(format!("neighbors of {v} not strictly sorted")));
                }
                if !self.has_edge(w, v) {
                    return Err(Error::Argument(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        Ok(())
    }
}

/// Square lattice on a torus. Cell `(x, y)` is node `y * width + x`.
pub fn grid_torus(width: usize, height: usize, neighborhood: Neighborhood) -> Result<Graph> {
    if width < 3 || height < 3 {
        return Err(Error::Sizing(format!("torus grid must be at least 3x3, got {width}x{height}")));
    }
    let offsets: &[(isize, isize)] = match neighborhood {
        Neighborhood::Moore => &[(1, -1), (1, 0), (1, 1), (0, 1)],
        Neighborhood::VonNeumann => &[(1, 0), (0, 1)],
    };
    let (w, h) = (width as isize, height as isize);
    let mut edges = Vec::with_capacity(width * height * offsets.len());
    for y in 0..h {
        for x in 0..w {
            let u = (y * w + x) as usize;
            for &(dx, dy) in offsets {
                let nx = (x + dx).rem_euclid(w);
                let ny = (y + dy).rem_euclid(h);
                let v = (ny * w + nx) as usize;
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    // On a 3-wide torus distinct offsets can land on the same pair.
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(width * height, &edges)
}

/// Parse the edge-list text format: `u v` per line, `# n=<count>` header optional.
pub fn load_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(count) = comment.trim().strip_prefix("n=") {
                let n = count.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node count {:?}", count.trim()),
                })?;
                declared = Some(n);
            }
            continue;
        }
        let mut tokens = line.split_whitespace();
        let id = |tok: Option<&str>| -> Result<usize> {
            let tok =
                tok.ok_or_else(|| Error::Parse { line: line_no, message: "expected two node ids".into() })?;
            tok.parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, message: format!("non-integer token {tok:?}") })
        };
        let u = id(tokens.next())?;
        let v = id(tokens.next())?;
        if tokens.next().is_some() {
            return Err(Error::Parse { line: line_no, message: "trailing tokens".into() });
        }
        if u == v {
            return Err(Error::Parse { line: line_no, message: format!("self-loop on node {u}") });
        }
        edges.push((u.min(v), u.max(v)));
        lines.push(line_no);
    }

    let max_id = edges.iter().map(|&(_, v)| v).max();
    let n = match (declared, max_id) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => {
            return Err(Error::Parse { line: 1, message: "empty edge list without n= header".into() })
        }
    };
    for (&(_, v), &line) in edges.iter().zip(&lines) {
        if v >= n {
            return Err(Error::Parse { line, message: format!("node id {v} >= n={n}") });
        }
    }

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| (edges[i], lines[i]));
    for pair in order.windows(2) {
        if edges[pair[0]] == edges[pair[1]] {
            let (u, v) = edges[pair[1]];
            return Err(Error::Parse {
                line: lines[pair[0]].max(lines[pair[1]]),
                message: format!("duplicate edge {u} {v}"),
            });
        }
    }
    Graph::from_edges(n, &edges)
}

/// Canonical edge-list text: header then one `u v` line per edge, `u < v`, sorted.
pub fn save_edge_list(graph: &Graph) -> String {
    let mut out = String::with_capacity(graph.edge_count() * 10 + 16);
    writeln!(out, "# n={}", graph.node_count()).unwrap();
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
