//! Small dense bit sets over object universes.

/// Fixed-capacity bit set over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn negate(&mut self) {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        // mask off bits past len
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> extra;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}

/// Binary relation over `0..n` stored as per-source successor sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    rows: Vec<BitSet>,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        Relation {
            n,
            rows: (0..n).map(|_| BitSet::new(n)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.rows[x].insert(y);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::new(self.n);
        for x in 0..self.n {
            for y in self.rows[x].iter() {
                t.insert(y, x);
            }
        }
        t
    }

    /// Reflexive-transitive closure (Warshall over bit rows).
    pub fn star(&self) -> Relation {
        let mut c = self.clone();
        for x in 0..self.n {
            c.insert(x, x);
        }
        for k in 0..self.n {
            for x in 0..self.n {
                if c.rows[x].contains(k) {
                    let row_k = c.rows[k].clone();
                    c.rows[x].union_with(&row_k);
                }
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_masks_tail_bits() {
        let mut s = BitSet::new(70);
        s.insert(3);
        s.negate();
        assert!(!s.contains(3));
        assert_eq!(s.count(), 69);
        s.negate();
        assert_eq!(s.count(), 1);
    }

    #[test]
    fn star_closes_chains() {
        let mut r = Relation::new(4);
        r.insert(0, 1);
        r.insert(1, 2);
        let c = r.star();
        assert!(c.contains(0, 2));
        assert!(c.contains(3, 3));
        assert!(!c.contains(2, 0));
    }
}
