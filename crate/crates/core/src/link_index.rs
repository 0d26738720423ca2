//! Inverted link index: for every `(r-1)`-set `b`, the ascending list of
//! vertices `u` with `b ∪ {u}` an edge.
//!
//! Stored in compressed-row form. Keys are sorted lexicographically and
//! looked up by binary search; member lists are sorted ascending so that
//! range restriction and intersection are both logarithmic per probe.

use std::ops::Range;

use fixedbitset::FixedBitSet;

use crate::hypergraph::{Hypergraph, LinkSet, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkIndex {
    key_len: usize,
    keys: Vec<Vertex>,
    offsets: Vec<usize>,
    members: Vec<Vertex>,
}

impl LinkIndex {
    pub fn build(graph: &Hypergraph) -> Self {
        match graph.r() {
            2 => build_fixed::<2>(graph),
            3 => build_fixed::<3>(graph),
            4 => build_fixed::<4>(graph),
            5 => build_fixed::<5>(graph),
            6 => build_fixed::<6>(graph),
            _ => build_generic(graph),
        }
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn key_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    fn key(&self, i: usize) -> &[Vertex] {
        &self.keys[i * self.key_len..(i + 1) * self.key_len]
    }

    /// Ascending members of the link set `key`; empty when absent.
    pub fn members(&self, key: &[Vertex]) -> &[Vertex] {
        let (mut lo, mut hi) = (0, self.key_count());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.key(mid).cmp(key) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => {
                    return &self.members[self.offsets[mid]..self.offsets[mid + 1]];
                }
            }
        }
        &[]
    }

    /// All `(key, members)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Vertex], &[Vertex])> + '_ {
        (0..self.key_count()).map(move |i| (self.key(i), &self.members[self.offsets[i]..self.offsets[i + 1]]))
    }

    /// Vertices `u` in `range`, not in `used`, such that `b ∪ {u}` is an edge
    /// for every `b` in `sets`. Intersects member lists smallest-first.
    /// An empty `sets` admits every unused vertex of the range.
    pub fn common_members(&self, sets: &[LinkSet], range: Range<Vertex>, used: &FixedBitSet) -> Vec<Vertex> {
        if sets.is_empty() {
            return range.filter(|&u| !used.contains(u as usize)).collect();
        }
        let mut lists: Vec<&[Vertex]> = sets
            .iter()
            .map(|b| clip(self.members(b), &range))
            .collect();
        lists.sort_by_key(|l| l.len());
        let (smallest, others) = lists.split_first().expect("nonempty");
        let mut cursors = vec![0usize; others.len()];
        let mut out = Vec::new();
        'outer: for &u in *smallest {
            if used.contains(u as usize) {
                continue;
            }
            for (list, cur) in others.iter().zip(cursors.iter_mut()) {
                let rest = &list[*cur..];
                let p = rest.partition_point(|&x| x < u);
                *cur += p;
                if rest.get(p) != Some(&u) {
                    continue 'outer;
                }
            }
            out.push(u);
        }
        out
    }
}

fn clip<'a>(list: &'a [Vertex], range: &Range<Vertex>) -> &'a [Vertex] {
    let lo = list.partition_point(|&x| x < range.start);
    let hi = list.partition_point(|&x| x < range.end);
    &list[lo..hi.max(lo)]
}

fn build_fixed<const R: usize>(graph: &Hypergraph) -> LinkIndex {
    let mut records: Vec<[Vertex; R]> = Vec::with_capacity(graph.edge_count() * R);
    for e in graph.edges() {
        for skip in 0..R {
            let mut rec = [0; R];
            let mut w = 0;
            for (i, &v) in e.iter().enumerate() {
                if i != skip {
                    rec[w] = v;
                    w += 1;
                }
            }
            rec[R - 1] = e[skip];
            records.push(rec);
        }
    }
    records.sort_unstable();
    assemble(R - 1, records.iter().map(|rec| (&rec[..R - 1], rec[R - 1])), records.len())
}

fn build_generic(graph: &Hypergraph) -> LinkIndex {
    let r = graph.r();
    let mut records: Vec<Vec<Vertex>> = Vec::with_capacity(graph.edge_count() * r);
    for e in graph.edges() {
        for skip in 0..r {
            let mut rec: Vec<Vertex> = e.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            rec.push(e[skip]);
            records.push(rec);
        }
    }
    records.sort_unstable();
    assemble(r - 1, records.iter().map(|rec| (&rec[..r - 1], rec[r - 1])), records.len())
}

fn assemble<'a>(key_len: usize, sorted: impl Iterator<Item = (&'a [Vertex], Vertex)>, len: usize) -> LinkIndex {
    let mut index = LinkIndex {
        key_len,
        keys: Vec::new(),
        offsets: vec![0],
        members: Vec::with_capacity(len),
    };
    let mut current: Option<&[Vertex]> = None;
    for (key, member) in sorted {
        if current != Some(key) {
            if current.is_some() {
                index.offsets.push(index.members.len());
            }
            index.keys.extend_from_slice(key);
            current = Some(key);
        }
        index.members.push(member);
    }
    if current.is_some() {
        index.offsets.push(index.members.len());
    }
    index
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_edges() {
        let g = Hypergraph::new(3, 5, [[0u32, 1, 2], [0, 1, 3], [1, 2, 4]]).unwrap();
        let idx = LinkIndex::build(&g);
        assert_eq!(idx.members(&[0, 1]), &[2, 3]);
        assert_eq!(idx.members(&[1, 2]), &[0, 4]);
        assert_eq!(idx.members(&[2, 4]), &[1]);
        assert!(idx.members(&[3, 4]).is_empty());
        assert_eq!(idx.iter().map(|(_, m)| m.len()).sum::<usize>(), 9);
    }

    #[test]
    fn generic_path_matches_fixed() {
        let g = Hypergraph::complete(7, 9).unwrap();
        let idx = LinkIndex::build(&g);
        assert_eq!(idx.key_len(), 6);
        assert_eq!(idx.members(&[0, 1, 2, 3, 4, 5]), &[6, 7, 8]);
    }

    #[test]
    fn common_members_intersects_and_filters() {
        let g = Hypergraph::new(3, 6, [[0u32, 1, 2], [0, 1, 3], [0, 1, 5], [2, 3, 5], [1, 3, 5]]).unwrap();
        let idx = LinkIndex::build(&g);
        let mut used = FixedBitSet::with_capacity(6);
        assert_eq!(idx.common_members(&[vec![0, 1]], 0..6, &used), vec![2, 3, 5]);
        assert_eq!(idx.common_members(&[vec![0, 1], vec![2, 3]], 0..6, &used), vec![5]);
        assert_eq!(idx.common_members(&[vec![0, 1]], 3..5, &used), vec![3]);
        used.insert(3);
        assert_eq!(idx.common_members(&[vec![0, 1]], 0..6, &used), vec![2, 5]);
        assert_eq!(idx.common_members(&[], 2..6, &used), vec![2, 4, 5]);
    }
}
