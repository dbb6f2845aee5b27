//! Finite groups from multiplication tables, with all normal subgroups found
//! as joins of normal closures of single elements.

use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub table: Vec<Vec<u32>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

type Subset = Vec<u64>;

fn bit(s: &Subset, i: usize) -> bool {
    s[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(s: &mut Subset, i: usize) {
    s[i / 64] |= 1 << (i % 64);
}

impl FiniteGroup {
    /// Group on 0..order with the given product; panics if there is no identity or inverse.
    pub fn from_fn(order: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let table: Vec<Vec<u32>> = (0..order)
            .map(|a| (0..order).map(|b| mul(a, b) as u32).collect())
            .collect();
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| table[e][a] as usize == a))
            .expect("identity");
        let inverse = (0..order)
            .map(|a| (0..order).find(|&b| table[a][b] as usize == identity).expect("inverse"))
            .collect();
        FiniteGroup {
            table,
            identity,
            inverse,
        }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }

    fn empty(&self) -> Subset {
        vec![0; self.order().div_ceil(64)]
    }

    fn members(&self, s: &Subset) -> Vec<usize> {
        (0..self.order()).filter(|&i| bit(s, i)).collect()
    }

    fn conjugacy_class(&self, g: usize) -> Vec<usize> {
        let mut c: Vec<usize> = (0..self.order())
            .map(|x| self.mul(self.mul(x, g), self.inverse[x]))
            .collect();
        c.sort();
        c.dedup();
        c
    }

    /// Subgroup generated by a set closed under conjugation.
    fn closure(&self, gens: &[usize]) -> Subset {
        let mut s = self.empty();
        set_bit(&mut s, self.identity);
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            for &g in gens {
                let y = self.mul(elems[i], g);
                if !bit(&s, y) {
                    set_bit(&mut s, y);
                    elems.push(y);
                }
            }
            i += 1;
        }
        s
    }

    /// AB for normal subgroups A, B.
    fn join(&self, a: &Subset, b: &Subset) -> Subset {
        let mut s = self.empty();
        let bm = self.members(b);
        for x in self.members(a) {
            for &y in &bm {
                set_bit(&mut s, self.mul(x, y));
            }
        }
        s
    }

    /// Every normal subgroup, as sorted element lists.
    pub fn normal_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Subset> = BTreeSet::new();
        let mut trivial = self.empty();
        set_bit(&mut trivial, self.identity);
        found.insert(trivial);
        let mut seen_classes = BTreeSet::new();
        let mut closures = Vec::new();
        for g in 0..self.order() {
            let class = self.conjugacy_class(g);
            if seen_classes.insert(class[0]) {
                let c = self.closure(&class);
                if found.insert(c.clone()) {
                    closures.push(c);
                }
            }
        }
        let mut frontier: Vec<Subset> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for c in &closures {
                    let j = self.join(a, c);
                    if found.insert(j.clone()) {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        found.iter().map(|s| self.members(s)).collect()
    }

    /// Least index of a normal subgroup not containing g.
    pub fn divisibility(&self, normals: &[Vec<usize>], g: usize) -> Option<usize> {
        normals
            .iter()
            .filter(|n| n.binary_search(&g).is_err())
            .map(|n| self.order() / n.len())
            .min()
    }
}
