//! Coarsest stable partition by splitter refinement.

use std::collections::BTreeSet;

use super::graph::Graph;

/// Block id per state such that two states share a block iff they are
/// strongly bisimilar in `g`.
pub fn coarsest_partition(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let labels = g.num_labels();
    let mut pred: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); labels]; n];
    for (p, out) in g.succ.iter().enumerate() {
        for &(l, q) in out {
            pred[q][l].push(p);
        }
    }
    let mut block = vec![0usize; n];
    let mut members: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut worklist: Vec<(usize, usize)> = (0..labels).map(|l| (0, l)).collect();
    let mut queued: BTreeSet<(usize, usize)> = worklist.iter().copied().collect();
    let mut mark = vec![false; n];

    while let Some((b, l)) = worklist.pop() {
        queued.remove(&(b, l));
        let mut pre: Vec<usize> = Vec::new();
        for &s in &members[b] {
            for &p in &pred[s][l] {
                if !mark[p] {
                    mark[p] = true;
                    pre.push(p);
                }
            }
        }
        let touched: BTreeSet<usize> = pre.iter().map(|&p| block[p]).collect();
        for x in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                members[x].iter().partition(|&&s| mark[s]);
            if outside.is_empty() {
                continue;
            }
            let new_id = members.len();
            for &s in &inside {
                block[s] = new_id;
            }
            members[x] = outside;
            members.push(inside);
            for lab in 0..labels {
                for blk in [x, new_id] {
                    if queued.insert((blk, lab)) {
                        worklist.push((blk, lab));
                    }
                }
            }
        }
        for p in pre {
            mark[p] = false;
        }
    }
    canonical(&block)
}

/// Renumbers blocks in order of first occurrence.
fn canonical(block: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    block
        .iter()
        .map(|b| {
            let next = map.len();
            *map.entry(*b).or_insert(next)
        })
        .collect()
}
