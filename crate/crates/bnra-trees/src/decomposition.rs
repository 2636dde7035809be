//! Decompositions `(w0, m1, w1, …, mℓ, wℓ)` and their languages.

use bnra_core::{MsgId, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Decomposition {
    pub w0: Word,
    /// `(m_i, w_i)` for `i = 1..=ℓ`.
    pub parts: Vec<(MsgId, Word)>,
}

impl Decomposition {
    pub fn new(w0: Word) -> Self {
        Decomposition { w0, parts: Vec::new() }
    }

    pub fn then(mut self, m: MsgId, w: Word) -> Self {
        self.parts.push((m, w));
        self
    }

    /// `ℓ`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `w_i` for `i = 0..=ℓ`.
    pub fn segment(&self, i: usize) -> &Word {
        if i == 0 {
            &self.w0
        } else {
            &self.parts[i - 1].1
        }
    }

    /// `m_1, …, m_ℓ`.
    pub fn messages(&self) -> Vec<MsgId> {
        self.parts.iter().map(|(m, _)| *m).collect()
    }

    /// Index `i` such that `m_i = m`.
    pub fn index_of(&self, m: MsgId) -> Option<usize> {
        self.parts.iter().position(|(x, _)| *x == m).map(|i| i + 1)
    }

    /// `dec_i = (w0, m1, …, m_{i−1}, w_{i−1})`.
    pub fn prefix(&self, i: usize) -> Decomposition {
        Decomposition { w0: self.w0.clone(), parts: self.parts[..i.saturating_sub(1)].to_vec() }
    }

    /// The `m_i` are pairwise distinct.
    pub fn is_well_formed(&self) -> bool {
        let m = self.messages();
        m.iter().enumerate().all(|(i, x)| !m[..i].contains(x))
    }
}

/// How one letter is read by [`scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Read {
    /// Matched against position `pos` of segment `segment`.
    Match { segment: usize, pos: usize },
    /// Inserted freely in segment `segment`.
    Free { segment: usize },
}

struct Scanner<'a> {
    segments: &'a [Word],
    free: &'a [MsgId],
}

impl Scanner<'_> {
    fn allowed(&self, segment: usize, m: MsgId) -> bool {
        self.free[..segment.min(self.free.len())].contains(&m)
    }

    /// Greedy acceptance of `w` from segment `j`, position `k`.
    fn feasible(&self, w: &[MsgId], mut j: usize, mut k: usize) -> bool {
        let mut i = 0;
        while i < w.len() {
            if j >= self.segments.len() {
                return false;
            }
            if self.allowed(j, w[i]) {
                i += 1;
                continue;
            }
            match self.segments[j][k..].iter().position(|&x| x == w[i]) {
                Some(d) => {
                    k += d + 1;
                    i += 1;
                }
                None => {
                    j += 1;
                    k = 0;
                }
            }
        }
        true
    }

    /// Reads `w`, preferring matches whenever the rest stays readable.
    fn read(&self, w: &[MsgId]) -> Option<Vec<Read>> {
        if !self.feasible(w, 0, 0) {
            return None;
        }
        let mut out = Vec::with_capacity(w.len());
        let (mut j, mut k) = (0, 0);
        let mut i = 0;
        while i < w.len() {
            if let Some(d) = self.segments[j][k..].iter().position(|&x| x == w[i]) {
                if self.feasible(&w[i + 1..], j, k + d + 1) {
                    out.push(Read::Match { segment: j, pos: k + d });
                    k += d + 1;
                    i += 1;
                    continue;
                }
            }
            if self.allowed(j, w[i]) && self.feasible(&w[i + 1..], j, k) {
                out.push(Read::Free { segment: j });
                i += 1;
                continue;
            }
            j += 1;
            k = 0;
        }
        Some(out)
    }
}

/// Reads `w` against `segments`, where segment `j` may additionally absorb
/// any letter among `free[..j]`.
pub(crate) fn scan(w: &[MsgId], segments: &[Word], free: &[MsgId]) -> Option<Vec<Read>> {
    Scanner { segments, free }.read(w)
}

/// `w ∈ L(dec)`: `w ⊑ w′0 ⋯ w′ℓ` where each `w′j` is `wj` with letters of
/// `{m1, …, mj}` inserted.
pub fn admits_decomposition(w: &[MsgId], dec: &Decomposition) -> bool {
    let segments: Vec<Word> = (0..=dec.len()).map(|i| dec.segment(i).clone()).collect();
    Scanner { segments: &segments, free: &dec.messages() }.feasible(w, 0, 0)
}
