use bnra_core::StateId;

/// A set of at most 64 states, stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn singleton(q: StateId) -> Self {
        StateSet(1 << q)
    }

    pub fn contains(self, q: StateId) -> bool {
        self.0 >> q & 1 == 1
    }

    pub fn insert(&mut self, q: StateId) {
        self.0 |= 1 << q;
    }

    pub fn with(self, q: StateId) -> Self {
        StateSet(self.0 | 1 << q)
    }

    pub fn union(self, other: StateSet) -> Self {
        StateSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = StateId> {
        (0..64).filter(move |&q| self.contains(q))
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut s = StateSet::EMPTY;
        for q in iter {
            s.insert(q);
        }
        s
    }
}
