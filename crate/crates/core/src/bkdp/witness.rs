//! Concrete decomposition arena mirrored alongside class transitions during
//! reconstruction.

use crate::graph::Vertex;
use crate::treedec::TreeDecomposition;

pub(crate) type WId = usize;

#[derive(Clone, Debug, Default)]
pub(crate) struct Arena {
    pub bags: Vec<Vec<Vertex>>,
    pub adj: Vec<Vec<WId>>,
    pub alive: Vec<bool>,
}

impl Arena {
    pub fn add(&mut self, mut bag: Vec<Vertex>) -> WId {
        bag.sort_unstable();
        bag.dedup();
        self.bags.push(bag);
        self.adj.push(Vec::new());
        self.alive.push(true);
        self.bags.len() - 1
    }

    pub fn copy(&mut self, w: WId) -> WId {
        self.add(self.bags[w].clone())
    }

    pub fn link(&mut self, a: WId, b: WId) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn unlink(&mut self, a: WId, b: WId) {
        let pa = self.adj[a].iter().position(|&x| x == b).expect("arena edge missing");
        self.adj[a].swap_remove(pa);
        let pb = self.adj[b].iter().position(|&x| x == a).expect("arena edge missing");
        self.adj[b].swap_remove(pb);
    }

    /// Replaces the edge `a–b` by the path `a–c–b`.
    pub fn subdivide(&mut self, a: WId, b: WId, c: WId) {
        self.unlink(a, b);
        self.link(a, c);
        self.link(c, b);
    }

    pub fn insert_vertex(&mut self, w: WId, v: Vertex) {
        if let Err(pos) = self.bags[w].binary_search(&v) {
            self.bags[w].insert(pos, v);
        }
    }

    pub fn size(&self, w: WId) -> u32 {
        self.bags[w].len() as u32
    }

    /// Moves every node of `other` into `self`; returns the id offset.
    pub fn absorb(&mut self, other: Arena) -> usize {
        let offset = self.bags.len();
        self.bags.extend(other.bags);
        self.adj.extend(other.adj.into_iter().map(|l| l.into_iter().map(|x| x + offset).collect::<Vec<_>>()));
        self.alive.extend(other.alive);
        offset
    }

    /// Removes `dead` nodes: edges between two dead nodes vanish, edges from a
    /// dead node to a live one are re-pointed through `redirect`.
    pub fn retire(&mut self, dead: &[WId], redirect: impl Fn(WId) -> WId) {
        for &d in dead {
            self.alive[d] = false;
        }
        for &d in dead {
            let nbrs = std::mem::take(&mut self.adj[d]);
            for z in nbrs {
                if self.alive[z] {
                    let p = self.adj[z].iter().position(|&x| x == d).unwrap();
                    let target = redirect(d);
                    self.adj[z][p] = target;
                    self.adj[target].push(z);
                } else if let Some(p) = self.adj[z].iter().position(|&x| x == d) {
                    self.adj[z].swap_remove(p);
                }
            }
        }
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut index = vec![usize::MAX; self.bags.len()];
        let mut bags = Vec::new();
        for (w, bag) in self.bags.iter().enumerate() {
            if self.alive[w] {
                index[w] = bags.len();
                bags.push(bag.clone());
            }
        }
        let mut edges = Vec::new();
        for (w, nbrs) in self.adj.iter().enumerate() {
            if !self.alive[w] {
                continue;
            }
            for &z in nbrs {
                if w < z && self.alive[z] {
                    edges.push((index[w], index[z]));
                }
            }
        }
        TreeDecomposition::new(bags, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivide_and_retire() {
        let mut a = Arena::default();
        let x = a.add(vec![0, 1]);
        let y = a.add(vec![1, 2]);
        a.link(x, y);
        let c = a.copy(x);
        a.subdivide(x, y, c);
        let td = a.to_tree_decomposition();
        assert_eq!(td.len(), 3);
        assert_eq!(td.edges.len(), 2);

        let mut b = Arena::default();
        let p = b.add(vec![5]);
        let q = b.add(vec![5, 6]);
        b.link(p, q);
        let off = a.absorb(b);
        let merged = a.add(vec![0, 1, 5]);
        a.retire(&[x, off], |_| merged);
        let td = a.to_tree_decomposition();
        assert_eq!(td.len(), 4);
        assert_eq!(td.edges.len(), 3);
    }
}
