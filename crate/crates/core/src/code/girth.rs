use std::fmt;

use super::ParityCheckCode;

/// Length of the shortest Tanner-graph cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Girth {
    Finite(usize),
    /// The Tanner graph is a forest.
    Unbounded,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Exact girth by breadth-first search from every variable node.
///
/// Every cycle passes through a variable node, and the BFS rooted on a node of
/// a shortest cycle closes it at exactly its length, so the minimum over all
/// roots is the girth. Searches stop once they cannot beat the best cycle
/// found so far.
pub fn girth_of(code: &ParityCheckCode) -> Girth {
    let (n, m) = (code.n(), code.m());
    // node ids: variables 0..n, checks n..n+m
    let total = n + m;
    let mut dist = vec![u32::MAX; total];
    let mut parent = vec![u32::MAX; total];
    let mut touched: Vec<u32> = Vec::new();
    let mut queue: Vec<u32> = Vec::new();
    let mut best = usize::MAX;

    for root in 0..n {
        for &t in &touched {
            dist[t as usize] = u32::MAX;
        }
        touched.clear();
        queue.clear();
        dist[root] = 0;
        parent[root] = u32::MAX;
        touched.push(root as u32);
        queue.push(root as u32);
        let mut head = 0;
        'bfs: while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let du = dist[u] as usize;
            // any cycle closed from here has length >= 2*du + 1
            if 2 * du + 1 >= best {
                break;
            }
            let (neighbors, offset) = if u < n {
                (code.col(u), n)
            } else {
                (code.row(u - n), 0)
            };
            for w in neighbors.iter().map(|&x| x as usize + offset) {
                if w as u32 == parent[u] {
                    continue;
                }
                if dist[w] == u32::MAX {
                    dist[w] = du as u32 + 1;
                    parent[w] = u as u32;
                    touched.push(w as u32);
                    queue.push(w as u32);
                } else {
                    let len = du + dist[w] as usize + 1;
                    if len < best {
                        best = len;
                        if best <= 4 {
                            break 'bfs;
                        }
                    }
                }
            }
        }
        if best == 4 {
            break;
        }
    }
    if best == usize::MAX {
        Girth::Unbounded
    } else {
        Girth::Finite(best)
    }
}
