//! Modularity-based community detection: Louvain and a smart-local-moving
//! variant with split-and-remerge refinement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{relabel, CommunityPartition, WeightedGraph};

/// Gains closer than this count as ties, so rounding noise never triggers
/// a move.
const EPS: f64 = 1e-12;

/// Weighted Newman modularity with resolution `gamma`. A graph without
/// edges has modularity 0.
pub fn modularity_with_resolution(g: &WeightedGraph, assignment: &[usize], gamma: f64) -> Result<f64> {
    if assignment.len() != g.node_count() {
        return Err(Error::IncompletePartition(format!(
            "{} of {} nodes assigned",
            assignment.len(),
            g.node_count()
        )));
    }
    let m = g.total_weight() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let k = assignment.iter().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for (u, v, e) in g.edges() {
        let w = e.weight as f64;
        degree[assignment[u]] += w;
        degree[assignment[v]] += w;
        if assignment[u] == assignment[v] {
            internal[assignment[u]] += w;
        }
    }
    let q = internal
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| l / m - gamma * (d / (2.0 * m)).powi(2))
        .sum();
    Ok(q)
}

pub fn modularity(g: &WeightedGraph, partition: &CommunityPartition) -> Result<f64> {
    modularity_with_resolution(g, &partition.assignment, 1.0)
}

/// One level of the coarsening hierarchy. Self-loops are implicit: they
/// travel with their node and only enter through `strength`.
#[derive(Debug, Clone)]
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    strength: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph(g: &WeightedGraph) -> Self {
        let adj = g.adjacency();
        let strength: Vec<f64> = adj.iter().map(|row| row.iter().map(|p| p.1).sum()).collect();
        let two_m = strength.iter().sum();
        Level { adj, strength, two_m }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community (dense labels) into one node.
    fn aggregate(&self, comm: &[usize]) -> Level {
        let k = comm.iter().max().map_or(0, |c| c + 1);
        let mut strength = vec![0.0; k];
        let mut rows: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for (i, row) in self.adj.iter().enumerate() {
            strength[comm[i]] += self.strength[i];
            for &(j, w) in row {
                if comm[i] != comm[j] {
                    *rows[comm[i]].entry(comm[j]).or_default() += w;
                }
            }
        }
        Level {
            adj: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
            strength,
            two_m: self.two_m,
        }
    }

    /// Moves single nodes to the neighboring community with the best
    /// modularity gain until no move improves. With `within`, nodes may
    /// only join communities of neighbors sharing their `within` label.
    /// Returns whether anything moved.
    fn local_moving(&self, comm: &mut [usize], gamma: f64, within: Option<&[usize]>, rng: &mut ChaCha8Rng) -> bool {
        let n = self.len();
        if self.two_m == 0.0 {
            return false;
        }
        let mut tot = vec![0.0; n.max(comm.iter().max().map_or(0, |c| c + 1))];
        for i in 0..n {
            tot[comm[i]] += self.strength[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut link = vec![0.0; tot.len()];
        let mut seen = vec![false; tot.len()];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let own = comm[i];
                let ki = self.strength[i];
                touched.clear();
                touched.push(own);
                seen[own] = true;
                for &(j, w) in &self.adj[i] {
                    if within.is_some_and(|p| p[i] != p[j]) {
                        continue;
                    }
                    let c = comm[j];
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= ki;
                let scale = gamma * ki / self.two_m;
                let mut best = own;
                let mut best_gain = link[own] - scale * tot[own];
                for &c in &touched[1..] {
                    let gain = link[c] - scale * tot[c];
                    if gain > best_gain + EPS {
                        best = c;
                        best_gain = gain;
                    }
                }
                tot[best] += ki;
                for &c in &touched {
                    link[c] = 0.0;
                    seen[c] = false;
                }
                if best != own {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                return moved_any;
            }
        }
    }
}

fn check(g: &WeightedGraph) -> Result<()> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(())
}

fn louvain_levels(base: &Level, gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut membership: Vec<usize> = (0..base.len()).collect();
    let mut level = base.clone();
    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        let moved = level.local_moving(&mut comm, gamma, None, rng);
        let comm = relabel(&comm);
        if !moved {
            return relabel(&membership);
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        level = level.aggregate(&comm);
    }
}

/// Two-phase Louvain: local moving in seeded random order, then
/// aggregation, repeated until no node moves. Equal-gain candidates keep
/// the node where it is, else go to the first community encountered.
pub fn louvain(g: &WeightedGraph, resolution: f64, seed: u64) -> Result<CommunityPartition> {
    check(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = louvain_levels(&Level::from_graph(g), resolution, &mut rng);
    let q = modularity_with_resolution(g, &labels, resolution)?;
    Ok(CommunityPartition::from_labels(&labels, q))
}

/// Local moving from `init`, then each community is split by local moving
/// within it, the split pieces are aggregated with their parent community
/// as starting assignment, and the procedure recurses on the coarser level.
fn slm_level(level: &Level, init: Vec<usize>, gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut comm = init;
    level.local_moving(&mut comm, gamma, None, rng);
    let comm = relabel(&comm);
    let k = comm.iter().max().map_or(0, |c| c + 1);
    if k == level.len() {
        return comm;
    }
    let mut refined: Vec<usize> = (0..level.len()).collect();
    level.local_moving(&mut refined, gamma, Some(&comm), rng);
    let mut refined = relabel(&refined);
    if refined.iter().max().map_or(0, |c| c + 1) == level.len() {
        refined = comm.clone();
    }
    let coarse = level.aggregate(&refined);
    let mut coarse_init = vec![0; coarse.len()];
    for (i, &r) in refined.iter().enumerate() {
        coarse_init[r] = comm[i];
    }
    let coarse_comm = slm_level(&coarse, coarse_init, gamma, rng);
    relabel(&refined.iter().map(|&r| coarse_comm[r]).collect::<Vec<_>>())
}

/// Louvain followed by rounds of smart-local-moving refinement started from
/// its result. The better of the two partitions is returned, so the
/// modularity is never below plain Louvain with the same seed.
pub fn slm_cluster(g: &WeightedGraph, seed: u64) -> Result<CommunityPartition> {
    const ROUNDS: usize = 10;
    let base = louvain(g, 1.0, seed)?;
    let level = Level::from_graph(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_51a7);
    let mut best = base;
    let mut current = best.assignment.clone();
    for _ in 0..ROUNDS {
        current = slm_level(&level, current, 1.0, &mut rng);
        let q = modularity_with_resolution(g, &current, 1.0)?;
        if q > best.modularity + EPS {
            best = CommunityPartition::from_labels(&current, q);
        } else {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::graph::{Node, WeightedGraph};

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_node(Node::new(format!("n{i:03}")));
        }
        for &(u, v) in edges {
            g.add_edge(u, v, 1, None).unwrap();
        }
        g
    }

    pub fn two_triangles() -> WeightedGraph {
        from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    /// Blocks of `size` nodes; node `i` belongs to block `i / size`.
    pub fn planted(blocks: usize, size: usize, p_in: f64, p_out: f64, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = blocks * size;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let p = if u / size == v / size { p_in } else { p_out };
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        from_edges(n, &edges)
    }
}
