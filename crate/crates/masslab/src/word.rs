//! Finite words over the naturals.

use std::cmp::Ordering;

use crate::error::{Error, Result};

pub type Sym = u64;
pub type Word = Vec<Sym>;

/// Length-lexicographic order: shorter first, then lexicographic.
pub fn llex(a: &[Sym], b: &[Sym]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn is_prefix(a: &[Sym], b: &[Sym]) -> bool {
    a.len() <= b.len() && &b[..a.len()] == a
}

pub fn compatible(a: &[Sym], b: &[Sym]) -> bool {
    is_prefix(a, b) || is_prefix(b, a)
}

/// `f ⊕ g` with `(f⊕g)(2n) = f(n)` and `(f⊕g)(2n+1) = g(n)`.
pub fn interleave(f: &[Sym], g: &[Sym]) -> Result<Word> {
    if f.len() != g.len() && f.len() != g.len() + 1 {
        return Err(Error::Shape(format!(
            "interleave needs |f| in {{|g|, |g|+1}}, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    let mut out = Vec::with_capacity(f.len() + g.len());
    for (i, &x) in f.iter().enumerate() {
        out.push(x);
        if let Some(&y) = g.get(i) {
            out.push(y);
        }
    }
    Ok(out)
}

/// Splits a word into its even and odd positions.
pub fn deinterleave(w: &[Sym]) -> (Word, Word) {
    let even = w.iter().step_by(2).copied().collect();
    let odd = w.iter().skip(1).step_by(2).copied().collect();
    (even, odd)
}

/// All words of length `n` over `0..b(d)` at each depth, in lexicographic order.
pub fn all_words(len: usize, bound: &dyn Fn(usize) -> u64) -> Vec<Word> {
    let mut level = vec![Vec::new()];
    for d in 0..len {
        let b = bound(d);
        let mut next = Vec::with_capacity(level.len() * b as usize);
        for w in &level {
            for k in 0..b {
                let mut x = w.clone();
                x.push(k);
                next.push(x);
            }
        }
        level = next;
    }
    level
}

pub fn fmt_word(w: &[Sym]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("⟨{}⟩", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleave_examples() {
        assert_eq!(interleave(&[1, 2], &[3, 4]).unwrap(), vec![1, 3, 2, 4]);
        assert_eq!(interleave(&[], &[]).unwrap(), Vec::<u64>::new());
        assert_eq!(interleave(&[5], &[]).unwrap(), vec![5]);
        assert!(interleave(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn llex_orders_by_length_first() {
        assert_eq!(llex(&[9], &[0, 0]), Ordering::Less);
        assert_eq!(llex(&[0, 1], &[0, 0]), Ordering::Greater);
    }
}
