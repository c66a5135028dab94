//! Complete-linkage agglomerative clustering and dendrogram cuts.

use serde::{Deserialize, Serialize};

use super::embedding::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::relabel;

/// Leaves are clusters `0..n`; merge `i` creates cluster `n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

/// Repeatedly merges the two clusters whose farthest members are closest.
/// Equal distances go to the smallest `(a, b)` cluster-id pair with
/// `a < b`.
pub fn agglomerative_complete(d: &DistanceMatrix) -> Dendrogram {
    let n = d.len();
    // working copy of cluster distances, indexed by slot
    let mut dist: Vec<Vec<f64>> = (0..n).map(|i| d.row(i).to_vec()).collect();
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut previous = f64::NEG_INFINITY;

    while active.len() > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (x, &p) in active.iter().enumerate() {
            for &q in &active[x + 1..] {
                let (lo, hi) = if id[p] < id[q] { (p, q) } else { (q, p) };
                let cand = (dist[p][q], id[lo], id[hi], lo, hi);
                let better = match best {
                    None => true,
                    Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let (distance, a, b, keep, gone) = best.expect("at least two active clusters");
        assert!(distance >= previous, "complete linkage produced a decreasing merge distance");
        previous = distance;
        for &k in &active {
            if k != keep && k != gone {
                let m = dist[k][keep].max(dist[k][gone]);
                dist[k][keep] = m;
                dist[keep][k] = m;
            }
        }
        let new_id = n + merges.len();
        size[keep] += size[gone];
        merges.push(Merge {
            a,
            b,
            distance,
            id: new_id,
            size: size[keep],
        });
        id[keep] = new_id;
        active.retain(|&s| s != gone);
    }
    Dendrogram { leaves: n, merges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutCriterion {
    NClusters(usize),
    Distance(f64),
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Flat cluster label per leaf, numbered by first appearance in leaf order.
pub fn cut_dendrogram(dg: &Dendrogram, criterion: CutCriterion) -> Result<Vec<usize>> {
    let n = dg.leaves;
    let applied = match criterion {
        CutCriterion::NClusters(k) => {
            if k == 0 || k > n {
                return Err(Error::ClusterCountOutOfRange { k, n });
            }
            n - k
        }
        CutCriterion::Distance(t) => dg.merges.iter().take_while(|m| m.distance <= t).count(),
    };
    let mut parent: Vec<usize> = (0..n + dg.merges.len()).collect();
    for m in &dg.merges[..applied] {
        let (ra, rb) = (find(&mut parent, m.a), find(&mut parent, m.b));
        parent[ra] = m.id;
        parent[rb] = m.id;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(relabel(&roots))
}
