//! Random k-regular graphs and their combinatorial Laplacians.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::spectral::eig_sym;

/// Restart budget for the stub-pairing sampler.
pub const MAX_RESTARTS: usize = 1000;

// Random pair draws before falling back to an exhaustive scan of the
// remaining stubs.
const RANDOM_PAIR_TRIES: usize = 64;

/// A simple undirected graph in which every vertex has degree `k`.
///
/// Edges are stored as a sorted list of `(u, v)` pairs with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    p: usize,
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl RegularGraph {
    /// Builds a graph from an edge list, checking simplicity and regularity.
    pub fn from_edges(p: usize, k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if !(p * k).is_multiple_of(2) {
            return Err(Error::OddStubCount { p, k });
        }
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        let mut degree = vec![0usize; p];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if v >= p {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range for p = {p}")));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if i > 0 && edges[i - 1] == (u, v) {
                return Err(Error::InvalidArgument(format!("repeated edge ({u}, {v})")));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some(bad) = degree.iter().position(|&d| d != k) {
            return Err(Error::InvalidArgument(format!(
                "vertex {bad} has degree {} instead of {k}",
                degree[bad]
            )));
        }
        Ok(Self { p, k, edges })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut degree = vec![0; self.p];
        for &(u, v) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        degree
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::with_capacity(self.k); self.p];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.p == 0 {
            return true;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.p];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.p
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.p, self.p);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Signed `p x |E|` incidence matrix, each edge oriented from its smaller
    /// to its larger endpoint. `X Xᵀ` is the Laplacian.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.p, self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            x[(u, e)] = -1.0;
            x[(v, e)] = 1.0;
        }
        x
    }

    /// Writes the edge list: a `# p k seed` header, then one `u v` per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W, seed: u64) -> Result<()> {
        writeln!(w, "# {} {} {}", self.p, self.k, seed)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Parses the format produced by [`RegularGraph::write_edge_list`],
    /// returning the graph and the recorded seed.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<(Self, u64)> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))??;
        let fields: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?
            .split_whitespace()
            .collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let parse = |s: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let (p, k, seed) = (parse(fields[0])? as usize, parse(fields[1])? as usize, parse(fields[2])?);
        let mut edges = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => edges.push((parse(u)? as usize, parse(v)? as usize)),
                _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
            }
        }
        Ok((Self::from_edges(p, k, edges)?, seed))
    }
}

/// Samples a simple k-regular graph on `p` vertices.
///
/// Stubs are paired one edge at a time, drawing random stub pairs until one
/// joins two distinct, not yet adjacent vertices. When no admissible pair is
/// left the whole pairing restarts (at most [`MAX_RESTARTS`] times).
pub fn sample_regular_graph(p: usize, k: usize, seed: u64) -> Result<RegularGraph> {
    if k == 0 || p <= k {
        return Err(Error::InvalidArgument(format!("need p > k >= 1 (p = {p}, k = {k})")));
    }
    if !(p * k).is_multiple_of(2) {
        return Err(Error::OddStubCount { p, k });
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..=MAX_RESTARTS {
        if let Some(edges) = try_pairing(p, k, &mut rng) {
            return RegularGraph::from_edges(p, k, edges);
        }
    }
    Err(Error::GraphSampling {
        p,
        k,
        restarts: MAX_RESTARTS,
    })
}

fn try_pairing(p: usize, k: usize, rng: &mut Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..p).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(k); p];
    let mut edges = Vec::with_capacity(p * k / 2);
    let admissible = |u: usize, v: usize, adj: &[Vec<usize>]| u != v && !adj[u].contains(&v);

    while !stubs.is_empty() {
        let m = stubs.len();
        let mut pick = None;
        for _ in 0..RANDOM_PAIR_TRIES {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if i != j && admissible(stubs[i], stubs[j], &adj) {
                pick = Some((i, j));
                break;
            }
        }
        if pick.is_none() {
            let mut candidates = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    if admissible(stubs[i], stubs[j], &adj) {
                        candidates.push((i, j));
                    }
                }
            }
            if candidates.is_empty() {
                return None;
            }
            pick = Some(candidates[rng.random_range(0..candidates.len())]);
        }
        let (i, j) = pick?;
        let (u, v) = (stubs[i], stubs[j]);
        stubs.swap_remove(i.max(j));
        stubs.swap_remove(i.min(j));
        adj[u].push(v);
        adj[v].push(u);
        edges.push((u.min(v), u.max(v)));
    }
    Some(edges)
}

/// A population covariance matrix together with its sorted eigendecomposition.
#[derive(Debug, Clone)]
pub struct PopulationMatrix {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl PopulationMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (eigenvalues, eigenvectors) = eig_sym(&matrix)?;
        Ok(Self {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors; column `i` belongs to `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }
}

/// Dense combinatorial Laplacian `D - A`.
pub fn laplacian_matrix(g: &RegularGraph) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(g.p, g.p);
    for &(u, v) in &g.edges {
        c[(u, v)] -= 1.0;
        c[(v, u)] -= 1.0;
        c[(u, u)] += 1.0;
        c[(v, v)] += 1.0;
    }
    c
}

pub fn laplacian(g: &RegularGraph) -> Result<PopulationMatrix> {
    PopulationMatrix::new(laplacian_matrix(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..5 {
            let g = sample_regular_graph(4, 3, seed).unwrap();
            assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        }
    }

    #[test]
    fn two_regular_graph_is_cycle_cover() {
        let g = sample_regular_graph(6, 2, 11).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert!(g.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn same_seed_same_graph() {
        let a = sample_regular_graph(100, 20, 42).unwrap();
        let b = sample_regular_graph(100, 20, 42).unwrap();
        let c = sample_regular_graph(100, 20, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(sample_regular_graph(5, 3, 0), Err(Error::OddStubCount { .. })));
        assert!(sample_regular_graph(3, 3, 0).is_err());
        assert!(sample_regular_graph(3, 0, 0).is_err());
    }

    #[test]
    fn from_edges_validates() {
        assert!(RegularGraph::from_edges(3, 2, [(0, 1), (1, 2), (0, 2)]).is_ok());
        assert!(RegularGraph::from_edges(3, 2, [(0, 1), (1, 0), (0, 2)]).is_err());
        assert!(RegularGraph::from_edges(2, 1, [(0, 0)]).is_err());
        assert!(RegularGraph::from_edges(4, 1, [(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn k4_laplacian_entries_and_spectrum() {
        let g = sample_regular_graph(4, 3, 1).unwrap();
        let c = laplacian(&g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 3.0 } else { -1.0 };
                assert_eq!(c.matrix()[(i, j)], want);
            }
        }
        let expected = [0.0, 4.0, 4.0, 4.0];
        for (l, e) in c.eigenvalues().iter().zip(expected) {
            assert!((l - e).abs() < 1e-12, "{l} vs {e}");
        }
    }

    #[test]
    fn laplacian_has_constant_kernel() {
        let g = sample_regular_graph(60, 4, 3).unwrap();
        let c = laplacian(&g).unwrap();
        for row in c.matrix().row_iter() {
            assert_eq!(row.sum(), 0.0);
        }
        assert!(c.eigenvalues()[0].abs() < 1e-10);
        let u0 = c.eigenvectors().column(0);
        let level = 1.0 / (60f64).sqrt();
        assert!(u0.iter().all(|x| (x.abs() - level).abs() < 1e-8));
    }

    #[test]
    fn laplacian_spectrum_is_k_minus_adjacency_spectrum() {
        let g = sample_regular_graph(40, 6, 5).unwrap();
        let lap = laplacian(&g).unwrap();
        let mut adj: Vec<f64> = crate::spectral::eigenvalues_sym(&g.adjacency_matrix())
            .unwrap()
            .into_iter()
            .map(|mu| 6.0 - mu)
            .collect();
        adj.sort_by(f64::total_cmp);
        for (a, b) in lap.eigenvalues().iter().zip(adj) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn incidence_product_is_laplacian() {
        let g = sample_regular_graph(30, 5, 9).unwrap();
        let x = g.incidence_matrix();
        assert_eq!(&x * x.transpose(), laplacian_matrix(&g));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = sample_regular_graph(20, 3, 8).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf, 8).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# 20 3 8\n"));
        let (back, seed) = RegularGraph::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(seed, 8);
        assert!(RegularGraph::read_edge_list("0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn large_degree_graphs_are_connected() {
        let connected = (0..100)
            .filter(|&s| sample_regular_graph(100, 3, s).unwrap().is_connected())
            .count();
        assert!(connected >= 99, "{connected}/100 connected");
    }
}
