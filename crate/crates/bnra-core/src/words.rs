//! Words over message types and the subword order.

use crate::protocol::MsgId;

/// A finite word of message types; ε is the empty vector.
pub type Word = Vec<MsgId>;

/// `w1 ⊑ w2`: `w1` is obtained from `w2` by erasing letters.
pub fn subword<T: PartialEq>(w1: &[T], w2: &[T]) -> bool {
    let mut it = w2.iter();
    w1.iter().all(|x| it.any(|y| y == x))
}

/// Positions in `w2` of a leftmost embedding of `w1`, if any.
pub fn embedding<T: PartialEq>(w1: &[T], w2: &[T]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(w1.len());
    let mut j = 0;
    for x in w1 {
        while j < w2.len() && w2[j] != *x {
            j += 1;
        }
        if j == w2.len() {
            return None;
        }
        out.push(j);
        j += 1;
    }
    Some(out)
}
