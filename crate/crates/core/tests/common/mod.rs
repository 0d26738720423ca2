//! Reference implementations used as oracles by the integration tests. They
//! share no code with the library beyond the `Hypergraph` accessors.

#![allow(dead_code)]

use std::collections::HashSet;

use hyperuni::{Hypergraph, Vertex};

pub fn edge_set(g: &Hypergraph) -> HashSet<Vec<Vertex>> {
    g.edges().map(|e| e.to_vec()).collect()
}

/// Sorted edges of a host with at most four vertices per edge, packed into
/// 128-bit keys, for membership queries on large hosts.
pub struct EdgeTable {
    n: usize,
    keys: Vec<u128>,
}

fn pack(set: &[Vertex]) -> u128 {
    set.iter().fold(0u128, |acc, &v| (acc << 32) | v as u128)
}

impl EdgeTable {
    pub fn new(host: &Hypergraph) -> Self {
        assert!(host.r() <= 4);
        let mut keys: Vec<u128> = host
            .edges()
            .map(|e| {
                let mut e = e.to_vec();
                e.sort_unstable();
                pack(&e)
            })
            .collect();
        keys.sort_unstable();
        EdgeTable { n: host.n(), keys }
    }

    pub fn contains(&self, set: &[Vertex]) -> bool {
        let mut set = set.to_vec();
        set.sort_unstable();
        self.keys.binary_search(&pack(&set)).is_ok()
    }

    /// Injective, in range, and every guest edge lands on a host edge.
    pub fn is_embedding(&self, guest: &Hypergraph, map: &[Vertex]) -> bool {
        if map.len() != guest.n() || map.iter().any(|&v| v as usize >= self.n) {
            return false;
        }
        let distinct: HashSet<Vertex> = map.iter().copied().collect();
        distinct.len() == map.len()
            && guest.edges().all(|e| {
                let image: Vec<Vertex> = e.iter().map(|&v| map[v as usize]).collect();
                self.contains(&image)
            })
    }
}

pub fn is_embedding(guest: &Hypergraph, host: &Hypergraph, map: &[Vertex]) -> bool {
    EdgeTable::new(host).is_embedding(guest, map)
}

/// Scans injections `0..guest.n -> 0..host.n` in lexicographic order,
/// abandoning a partial injection once an edge whose vertices are all
/// assigned misses the host. Returns the first full injection found.
pub fn naive_embedding(guest: &Hypergraph, host: &Hypergraph) -> Option<Vec<Vertex>> {
    if guest.n() > host.n() {
        return None;
    }
    let host_edges = edge_set(host);
    // guest edges grouped by their largest vertex
    let mut closing: Vec<Vec<Vec<Vertex>>> = vec![Vec::new(); guest.n()];
    for e in guest.edges() {
        let top = *e.iter().max().unwrap() as usize;
        closing[top].push(e.to_vec());
    }
    let mut map: Vec<Vertex> = Vec::with_capacity(guest.n());
    let mut used = vec![false; host.n()];
    fn go(
        v: usize,
        map: &mut Vec<Vertex>,
        used: &mut [bool],
        closing: &[Vec<Vec<Vertex>>],
        host_edges: &HashSet<Vec<Vertex>>,
    ) -> bool {
        if v == closing.len() {
            return true;
        }
        for u in 0..used.len() {
            if used[u] {
                continue;
            }
            map.push(u as Vertex);
            let fits = closing[v].iter().all(|e| {
                let mut image: Vec<Vertex> = e.iter().map(|&x| map[x as usize]).collect();
                image.sort_unstable();
                host_edges.contains(&image)
            });
            if fits {
                used[u] = true;
                if go(v + 1, map, used, closing, host_edges) {
                    return true;
                }
                used[u] = false;
            }
            map.pop();
        }
        false
    }
    go(0, &mut map, &mut used, &closing, &host_edges).then_some(map)
}

/// Largest number of edges a vertex closes with its predecessors in `order`.
pub fn max_back_degree(g: &Hypergraph, order: &[Vertex]) -> usize {
    let mut position = vec![0usize; g.n()];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }
    let mut back = vec![0usize; g.n()];
    for e in g.edges() {
        let last = e.iter().max_by_key(|&&v| position[v as usize]).unwrap();
        back[*last as usize] += 1;
    }
    back.into_iter().max().unwrap_or(0)
}

/// Minimum of [`max_back_degree`] over all `n!` orderings (Heap's algorithm).
pub fn exhaustive_degeneracy(g: &Hypergraph) -> usize {
    let n = g.n();
    let mut perm: Vec<Vertex> = (0..n as Vertex).collect();
    let mut best = max_back_degree(g, &perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(max_back_degree(g, &perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

pub fn degrees(g: &Hypergraph) -> Vec<usize> {
    let mut deg = vec![0usize; g.n()];
    for e in g.edges() {
        for &v in e {
            deg[v as usize] += 1;
        }
    }
    deg
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union-find over edges; graphs on at most one vertex count as connected.
pub fn connected(n: usize, edges: &[Vec<Vertex>]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    for e in edges {
        for w in e.windows(2) {
            let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
            parent[a] = b;
        }
    }
    let roots: HashSet<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    roots.len() <= 1
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<Vertex>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v as Vertex);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Counts edge sets on `0..n` in which every vertex closes at most `d`
/// edges with smaller vertices, by deciding each `r`-set in turn. With
/// `connected_only`, every vertex that can close an edge closes at least
/// one and the graph must be connected; `degree_cap` bounds every degree.
pub fn count_class(r: usize, n: usize, d: usize, connected_only: bool, degree_cap: Option<usize>) -> u64 {
    let all = subsets(n, r);
    let mut chosen: Vec<Vec<Vertex>> = Vec::new();
    let mut closes = vec![0usize; n];
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        all: &[Vec<Vertex>],
        chosen: &mut Vec<Vec<Vertex>>,
        closes: &mut [usize],
        r: usize,
        d: usize,
        connected_only: bool,
        degree_cap: Option<usize>,
    ) -> u64 {
        let n = closes.len();
        if i == all.len() {
            if connected_only && (r - 1..n).any(|v| closes[v] == 0) {
                return 0;
            }
            if let Some(cap) = degree_cap {
                let mut deg = vec![0usize; n];
                for e in chosen.iter() {
                    for &v in e {
                        deg[v as usize] += 1;
                    }
                }
                if deg.iter().any(|&x| x > cap) {
                    return 0;
                }
            }
            if connected_only && !connected(n, chosen) {
                return 0;
            }
            return 1;
        }
        let mut total = go(i + 1, all, chosen, closes, r, d, connected_only, degree_cap);
        let top = *all[i].last().unwrap() as usize;
        if closes[top] < d {
            closes[top] += 1;
            chosen.push(all[i].clone());
            total += go(i + 1, all, chosen, closes, r, d, connected_only, degree_cap);
            chosen.pop();
            closes[top] -= 1;
        }
        total
    }
    go(0, &all, &mut chosen, &mut closes, r, d, connected_only, degree_cap)
}
