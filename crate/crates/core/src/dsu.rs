//! Disjoint-set forests sized for hot enumeration loops.

/// Union-find over `0..len` that is reset, not reallocated, between uses.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    pub fn new(len: usize) -> Self {
        Dsu { parent: (0..len as u32).collect() }
    }

    #[inline]
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the classes of `a` and `b`; the smaller root index survives.
    #[inline]
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }

    #[inline]
    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Copyable union-find on at most `N <= 256` elements, used where a state
/// has to be snapshotted at every level of a depth-first enumeration.
#[derive(Clone, Copy, Debug)]
pub struct SmallDsu<const N: usize> {
    parent: [u8; N],
}

impl<const N: usize> SmallDsu<N> {
    pub fn new() -> Self {
        let mut parent = [0u8; N];
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i as u8;
        }
        SmallDsu { parent }
    }

    #[inline(always)]
    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    #[inline(always)]
    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u8;
        }
    }

    #[inline(always)]
    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

impl<const N: usize> Default for SmallDsu<N> {
    fn default() -> Self {
        Self::new()
    }
}
