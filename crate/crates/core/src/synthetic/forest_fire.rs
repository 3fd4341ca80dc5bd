use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::Rng;

use crate::graph_model::NodeId;

// Number of successes before the first failure: mean p / (1 - p).
fn geometric<R: Rng>(rng: &mut R, p: f64) -> usize {
    let mut count = 0;
    while rng.gen::<f64>() < p {
        count += 1;
    }
    count
}

fn pick_unvisited<R: Rng>(
    rng: &mut R,
    candidates: &[u32],
    want: usize,
    stamp: &mut [u32],
    mark: u32,
    queue: &mut VecDeque<u32>,
) {
    if want == 0 {
        return;
    }
    let open: Vec<u32> = candidates.iter().copied().filter(|&c| stamp[c as usize] != mark).collect();
    let take = want.min(open.len());
    for i in sample(rng, open.len(), take).into_iter() {
        let c = open[i];
        stamp[c as usize] = mark;
        queue.push_back(c);
    }
}

/// Edges of one forest-fire graph on `n` nodes, as undirected pairs.
///
/// Nodes arrive in id order. Each new node picks a uniform ambassador among
/// the earlier nodes and burns it; from every burned node it then burns a
/// geometric number (mean `p/(1-p)`) of not-yet-burned out-links with
/// `p = p_forward` and in-links with `p = p_backward`, recursively. The new
/// node links to every burned node. Link direction only steers the burning;
/// the result is read as undirected.
pub fn forest_fire_edges<R: Rng>(n: usize, p_forward: f64, p_backward: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut inn: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stamp = vec![u32::MAX; n];
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    let mut burned = Vec::new();
    for v in 1..n {
        let mark = v as u32;
        let ambassador = rng.gen_range(0..v) as u32;
        stamp[v] = mark;
        stamp[ambassador as usize] = mark;
        queue.clear();
        burned.clear();
        queue.push_back(ambassador);
        while let Some(x) = queue.pop_front() {
            burned.push(x);
            let forward = geometric(rng, p_forward);
            let backward = geometric(rng, p_backward);
            pick_unvisited(rng, &out[x as usize], forward, &mut stamp, mark, &mut queue);
            pick_unvisited(rng, &inn[x as usize], backward, &mut stamp, mark, &mut queue);
        }
        for &x in &burned {
            out[v].push(x);
            inn[x as usize].push(v as u32);
            edges.push((x as NodeId, v));
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_later_node_links_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let edges = forest_fire_edges(200, 0.35, 0.35, &mut rng);
        let mut has_earlier = [false; 200];
        for &(u, v) in &edges {
            assert!(u < v);
            has_earlier[v] = true;
        }
        assert!(has_earlier[1..].iter().all(|&b| b));
    }

    #[test]
    fn zero_burning_gives_a_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(forest_fire_edges(50, 0.0, 0.0, &mut rng).len(), 49);
        assert!(forest_fire_edges(1, 0.35, 0.35, &mut rng).is_empty());
    }
}
