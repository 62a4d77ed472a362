//! Support structures of monotone symmetric strategies.
//!
//! A structure is a nondecreasing map `xi` from bid indices to value indices
//! with `xi(m-1) = k-1` (0-based). A value in the image of `xi` mixes over an
//! interval of bids; every other value bids a single bid.

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportStructure {
    xi: Vec<usize>,
    k: usize,
}

/// Bids a value may use under a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueSupport {
    /// Mixes over bids `lo..=hi`.
    Mixed { lo: usize, hi: usize },
    /// Always bids this index.
    Pure(usize),
}

impl ValueSupport {
    pub fn bids(&self) -> std::ops::RangeInclusive<usize> {
        match *self {
            Self::Mixed { lo, hi } => lo..=hi,
            Self::Pure(l) => l..=l,
        }
    }
}

impl SupportStructure {
    pub fn new(xi: Vec<usize>, k: usize) -> Option<Self> {
        let ok = !xi.is_empty()
            && xi.windows(2).all(|w| w[0] <= w[1])
            && xi.last() == Some(&(k.checked_sub(1)?));
        ok.then_some(Self { xi, k })
    }

    pub fn xi(&self) -> &[usize] {
        &self.xi
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.xi.len()
    }

    pub fn is_mixed(&self, j: usize) -> bool {
        self.xi.contains(&j)
    }

    pub fn support(&self, j: usize) -> ValueSupport {
        let m = self.m();
        if let Some(lo) = self.xi.iter().position(|&x| x == j) {
            let last = self.xi.iter().rposition(|&x| x == j).unwrap();
            ValueSupport::Mixed {
                lo,
                hi: (last + 1).min(m - 1),
            }
        } else {
            let l = self
                .xi
                .iter()
                .position(|&x| x > j)
                .expect("xi ends at the top value");
            ValueSupport::Pure(l)
        }
    }

    pub fn supports(&self) -> Vec<ValueSupport> {
        (0..self.k).map(|j| self.support(j)).collect()
    }
}

/// All structures for `k` values and `m` bids, in lexicographic order.
pub fn enumerate_structures(k: usize, m: usize) -> StructureIter {
    StructureIter {
        next: (k > 0 && m > 0).then(|| {
            let mut xi = vec![0; m];
            xi[m - 1] = k - 1;
            xi
        }),
        k,
    }
}

/// Binomial coefficient `C(k+m-2, m-1)`: the number of structures.
pub fn structure_count(k: usize, m: usize) -> u128 {
    if k == 0 || m == 0 {
        return 0;
    }
    let (top, r) = ((k + m - 2) as u128, (m - 1) as u128);
    (0..r).fold(1u128, |acc, t| acc * (top - t) / (t + 1))
}

pub struct StructureIter {
    next: Option<Vec<usize>>,
    k: usize,
}

impl Iterator for StructureIter {
    type Item = SupportStructure;

    fn next(&mut self) -> Option<SupportStructure> {
        let cur = self.next.take()?;
        let m = cur.len();
        // increment the free prefix xi[0..m-1] as a nondecreasing sequence
        let mut succ = cur.clone();
        let mut pos = m.checked_sub(1).filter(|&p| p > 0);
        while let Some(p) = pos {
            let i = p - 1;
            if succ[i] + 1 < self.k {
                let v = succ[i] + 1;
                for x in succ.iter_mut().take(m - 1).skip(i) {
                    *x = v;
                }
                self.next = Some(succ);
                break;
            }
            pos = (i > 0).then_some(i);
        }
        Some(SupportStructure { xi: cur, k: self.k })
    }
}
