//! Community-partitioned random graphs: the two-parameter stochastic block
//! model and its disjoint k-cliques special case.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::RngStream;

/// A partition of vertices [0, n) into m = n/k communities of size exactly k.
///
/// The canonical layout puts community i on the contiguous range
/// [i·k, (i+1)·k), but arbitrary equal-size assignments are accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    n: usize,
    k: usize,
    m: usize,
    assignment: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl CommunityPartition {
    /// Canonical layout: community i owns vertices [i·k, (i+1)·k).
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        Self::check_sizes(n, k)?;
        let m = n / k;
        let assignment: Vec<u32> = (0..n).map(|v| (v / k) as u32).collect();
        let members: Vec<Vec<u32>> = (0..m)
            .map(|c| ((c * k) as u32..((c + 1) * k) as u32).collect())
            .collect();
        Ok(CommunityPartition {
            n,
            k,
            m,
            assignment,
            members,
        })
    }

    /// Builds from an explicit vertex → community map; every community must
    /// have exactly k members.
    pub fn from_assignment(k: usize, assignment: Vec<u32>) -> Result<Self> {
        let n = assignment.len();
        Self::check_sizes(n, k)?;
        let m = n / k;
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (v, &c) in assignment.iter().enumerate() {
            if (c as usize) >= m {
                return Err(Error::Domain(format!(
                    "partition: vertex {v} assigned to community {c}, but m = {m}"
                )));
            }
            members[c as usize].push(v as u32);
        }
        for (c, mem) in members.iter().enumerate() {
            if mem.len() != k {
                return Err(Error::Domain(format!(
                    "partition: community {c} has {} members, expected {k}",
                    mem.len()
                )));
            }
        }
        Ok(CommunityPartition {
            n,
            k,
            m,
            assignment,
            members,
        })
    }

    fn check_sizes(n: usize, k: usize) -> Result<()> {
        if n == 0 || k == 0 {
            return Err(Error::Domain(format!(
                "partition: n and k must be positive (n = {n}, k = {k})"
            )));
        }
        if !n.is_multiple_of(k) {
            return Err(Error::Domain(format!(
                "partition: k = {k} does not divide n = {n}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn community_of(&self, v: usize) -> u32 {
        self.assignment[v]
    }

    pub fn members(&self, community: usize) -> &[u32] {
        &self.members[community]
    }

    pub fn is_contiguous(&self) -> bool {
        self.assignment
            .iter()
            .enumerate()
            .all(|(v, &c)| c as usize == v / self.k)
    }
}

/// Parameters of the two-parameter stochastic block model: edge probability
/// p1 within a community, p2 across communities, with p2 ≤ p1.
#[derive(Debug, Clone)]
pub struct SbmGraphParams {
    partition: CommunityPartition,
    p1: f64,
    p2: f64,
}

impl SbmGraphParams {
    /// Validates 0 ≤ p2 ≤ p1 ≤ 1. Equality p1 = p2 is accepted with a
    /// warning on stderr since it degenerates to an Erdős–Rényi graph.
    pub fn new(partition: CommunityPartition, p1: f64, p2: f64) -> Result<Self> {
        for (name, v) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if p2 > p1 {
            return Err(Error::Domain(format!(
                "cross-community probability p2 = {p2} exceeds within-community p1 = {p1}"
            )));
        }
        if p2 == p1 && p1 > 0.0 {
            eprintln!("warning: p1 = p2 = {p1}; the block structure carries no information");
        }
        Ok(SbmGraphParams { partition, p1, p2 })
    }

    pub fn partition(&self) -> &CommunityPartition {
        &self.partition
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }
}

/// An undirected simple graph with a community partition.
///
/// Immutable after generation; adjacency is a per-vertex ascending neighbor
/// list plus an edge count, since degree lookups dominate the validation
/// workloads.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    partition: CommunityPartition,
}

impl Graph {
    /// Samples a graph: each unordered within-community pair is an edge with
    /// probability p1, each cross-community pair with probability p2.
    /// Deterministic given the stream; pairs are visited in ascending
    /// lexicographic order.
    pub fn generate_sbm(params: &SbmGraphParams, rng: &mut RngStream) -> Graph {
        let part = &params.partition;
        let n = part.n();
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                let p = if part.community_of(u) == part.community_of(v) {
                    params.p1
                } else {
                    params.p2
                };
                if rng.bernoulli(p) {
                    adjacency[u].push(v as u32);
                    adjacency[v].push(u as u32);
                    edge_count += 1;
                }
            }
        }
        Graph {
            adjacency,
            edge_count,
            partition: part.clone(),
        }
    }

    /// The deterministic q2 = 0 backbone: every within-community pair
    /// connected, no cross-community edges; exactly m·k·(k−1)/2 edges.
    pub fn disjoint_cliques(partition: CommunityPartition) -> Graph {
        let n = partition.n();
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for c in 0..partition.m() {
            let members = partition.members(c);
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    adjacency[u as usize].push(v);
                    adjacency[v as usize].push(u);
                    edge_count += 1;
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            adjacency,
            edge_count,
            partition,
        }
    }

    /// Builds a graph from explicit undirected edges (used by fixtures).
    /// Rejects self-loops, duplicates, and out-of-range endpoints.
    pub fn from_edges(partition: CommunityPartition, edges: &[(u32, u32)]) -> Result<Graph> {
        let n = partition.n();
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Domain(format!("self-loop at vertex {u}")));
            }
            if (u as usize) >= n || (v as usize) >= n {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) outside vertex range [0, {n})"
                )));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Graph {
            adjacency,
            edge_count: edges.len(),
            partition,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn partition(&self) -> &CommunityPartition {
        &self.partition
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.n() {
            return Err(Error::Domain(format!(
                "degree: vertex {v} outside [0, {})",
                self.n()
            )));
        }
        Ok(self.adjacency[v].len())
    }

    /// All edges as (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    /// Line-oriented edge-list text: header `n k m`, then one `u v` pair per
    /// line in ascending order. Only the canonical contiguous partition is
    /// representable in this format.
    pub fn to_edge_list(&self) -> Result<String> {
        if !self.partition.is_contiguous() {
            return Err(Error::Domain(
                "edge-list format only encodes the contiguous partition layout".into(),
            ));
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {}",
            self.partition.n(),
            self.partition.k(),
            self.partition.m()
        );
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        Ok(out)
    }

    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("edge list: missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "edge list: header must be `n k m`, got {header:?}"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("edge list: bad n {:?}", fields[0])))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("edge list: bad k {:?}", fields[1])))?;
        let m: usize = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("edge list: bad m {:?}", fields[2])))?;
        let partition = CommunityPartition::contiguous(n, k)?;
        if partition.m() != m {
            return Err(Error::Parse(format!(
                "edge list: header m = {m} inconsistent with n/k = {}",
                partition.m()
            )));
        }
        let mut edges = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let pair: Vec<&str> = line.split_whitespace().collect();
            if pair.len() != 2 {
                return Err(Error::Parse(format!("edge list: bad line {line:?}")));
            }
            let u: u32 = pair[0]
                .parse()
                .map_err(|_| Error::Parse(format!("edge list: bad vertex {:?}", pair[0])))?;
            let v: u32 = pair[1]
                .parse()
                .map_err(|_| Error::Parse(format!("edge list: bad vertex {:?}", pair[1])))?;
            edges.push((u, v));
        }
        Graph::from_edges(partition, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::summarize;

    #[test]
    fn partition_shapes() {
        let p = CommunityPartition::contiguous(12, 3).unwrap();
        assert_eq!((p.n(), p.k(), p.m()), (12, 3, 4));
        assert_eq!(p.members(2), &[6, 7, 8]);
        assert_eq!(p.community_of(7), 2);
        assert!(p.is_contiguous());

        assert!(CommunityPartition::contiguous(10, 3).is_err());
        assert!(CommunityPartition::contiguous(0, 3).is_err());

        // Interleaved assignment is fine as long as sizes are equal.
        let p = CommunityPartition::from_assignment(2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(p.members(0), &[0, 2]);
        assert!(!p.is_contiguous());

        assert!(CommunityPartition::from_assignment(2, vec![0, 0, 0, 1]).is_err());
        assert!(CommunityPartition::from_assignment(2, vec![0, 0, 5, 5]).is_err());
    }

    #[test]
    fn sbm_params_validation() {
        let part = CommunityPartition::contiguous(4, 2).unwrap();
        assert!(SbmGraphParams::new(part.clone(), 0.5, 0.1).is_ok());
        assert!(SbmGraphParams::new(part.clone(), 0.1, 0.5).is_err());
        assert!(SbmGraphParams::new(part.clone(), 1.5, 0.1).is_err());
        // Equality accepted (warns).
        assert!(SbmGraphParams::new(part, 0.3, 0.3).is_ok());
    }

    #[test]
    fn degenerate_graphs() {
        let part = CommunityPartition::contiguous(40, 8).unwrap();
        let mut rng = RngStream::new(1, 0);

        let empty = Graph::generate_sbm(
            &SbmGraphParams::new(part.clone(), 0.0, 0.0).unwrap(),
            &mut rng,
        );
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.degree(13).unwrap(), 0);

        let cliques = Graph::generate_sbm(
            &SbmGraphParams::new(part.clone(), 1.0, 0.0).unwrap(),
            &mut rng,
        );
        for v in 0..40 {
            assert_eq!(cliques.degree(v).unwrap(), 7);
        }
    }

    #[test]
    fn disjoint_cliques_counts() {
        let g = Graph::disjoint_cliques(CommunityPartition::contiguous(4, 2).unwrap());
        assert_eq!(g.edge_count(), 2);

        let g = Graph::disjoint_cliques(CommunityPartition::contiguous(6, 3).unwrap());
        assert_eq!(g.edge_count(), 6);
        for v in 0..6 {
            assert_eq!(g.degree(v).unwrap(), 2);
        }

        // Single community: the complete graph.
        let g = Graph::disjoint_cliques(CommunityPartition::contiguous(5, 5).unwrap());
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn cliques_equal_sbm_extreme() {
        let part = CommunityPartition::contiguous(30, 5).unwrap();
        let mut rng = RngStream::new(3, 1);
        let sbm = Graph::generate_sbm(
            &SbmGraphParams::new(part.clone(), 1.0, 0.0).unwrap(),
            &mut rng,
        );
        let cliques = Graph::disjoint_cliques(part);
        assert_eq!(sbm.edges(), cliques.edges());
    }

    #[test]
    fn degree_of_path_graph() {
        let part = CommunityPartition::contiguous(3, 3).unwrap();
        let g = Graph::from_edges(part, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degree(1).unwrap(), 2);
        assert_eq!(g.degree(0).unwrap(), 1);
        assert!(g.degree(3).is_err());
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        let part = CommunityPartition::contiguous(4, 2).unwrap();
        assert!(Graph::from_edges(part.clone(), &[(1, 1)]).is_err());
        assert!(Graph::from_edges(part.clone(), &[(0, 7)]).is_err());
        assert!(Graph::from_edges(part, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let part = CommunityPartition::contiguous(6, 3).unwrap();
        let mut rng = RngStream::new(8, 2);
        let g = Graph::generate_sbm(&SbmGraphParams::new(part, 0.8, 0.3).unwrap(), &mut rng);
        let text = g.to_edge_list().unwrap();
        let parsed = Graph::from_edge_list(&text).unwrap();
        assert_eq!(g.edges(), parsed.edges());
        assert_eq!(text, parsed.to_edge_list().unwrap());
    }

    #[test]
    fn edge_list_parse_errors() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("6 3\n0 1\n").is_err());
        assert!(Graph::from_edge_list("6 3 5\n").is_err());
        assert!(Graph::from_edge_list("6 3 2\n0\n").is_err());
        assert!(Graph::from_edge_list("6 3 2\n0 x\n").is_err());
    }

    #[test]
    fn within_community_density_matches_p1() {
        // Monte-Carlo density estimate over 100 graphs.
        let part = CommunityPartition::contiguous(200, 20).unwrap();
        let params = SbmGraphParams::new(part.clone(), 0.5, 0.1).unwrap();
        let within_pairs = (part.m() * part.k() * (part.k() - 1) / 2) as f64;
        let mut rng = RngStream::new(17, 0);
        let densities: Vec<f64> = (0..100)
            .map(|_| {
                let g = Graph::generate_sbm(&params, &mut rng);
                let within = g
                    .edges()
                    .iter()
                    .filter(|(u, v)| {
                        part.community_of(*u as usize) == part.community_of(*v as usize)
                    })
                    .count();
                within as f64 / within_pairs
            })
            .collect();
        let stats = summarize(&densities).unwrap();
        assert!(
            (stats.mean - 0.5).abs() <= 3.0 * stats.std_error,
            "within-community density {} (3se {})",
            stats.mean,
            3.0 * stats.std_error
        );
    }

    #[test]
    fn expected_edge_count() {
        // m·C(k,2)·p1 + (C(n,2) − m·C(k,2))·p2 over 200 graphs.
        let (n, k, p1, p2) = (60usize, 10usize, 0.3, 0.05);
        let part = CommunityPartition::contiguous(n, k).unwrap();
        let params = SbmGraphParams::new(part, p1, p2).unwrap();
        let m = (n / k) as f64;
        let within = m * (k * (k - 1) / 2) as f64;
        let total = (n * (n - 1) / 2) as f64;
        let expect = within * p1 + (total - within) * p2;
        let mut rng = RngStream::new(23, 0);
        let counts: Vec<f64> = (0..200)
            .map(|_| Graph::generate_sbm(&params, &mut rng).edge_count() as f64)
            .collect();
        let stats = summarize(&counts).unwrap();
        assert!(
            (stats.mean - expect).abs() <= 3.0 * stats.std_error,
            "edge count mean {} expected {expect} (3se {})",
            stats.mean,
            3.0 * stats.std_error
        );
    }
}
