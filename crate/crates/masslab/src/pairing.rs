//! Cantor pairing on machine words, shared by every module.

/// `⟨a,b⟩ = (a+b)(a+b+1)/2 + b`. Panics on overflow of `u64`.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    let v = s * (s + 1) / 2 + b as u128;
    u64::try_from(v).expect("pairing overflow")
}

/// Checked variant of [`pair`].
pub fn try_pair(a: u64, b: u64) -> Option<u64> {
    let s = a as u128 + b as u128;
    u64::try_from(s * (s + 1) / 2 + b as u128).ok()
}

pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    let mut w = isqrt(8 * z + 1);
    w = (w - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = z - t;
    let a = w - b;
    (a as u64, b as u64)
}

/// Codes a tuple as `⟨e₀,⟨e₁,…⟩⟩`; a 1-tuple is its own code.
pub fn tuple(xs: &[u64]) -> u64 {
    match xs {
        [] => 0,
        [x] => *x,
        [x, rest @ ..] => pair(*x, tuple(rest)),
    }
}

/// Inverse of [`tuple`] for a fixed arity `m ≥ 1`.
pub fn untuple(mut z: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    for _ in 1..m {
        let (a, b) = unpair(z);
        out.push(a);
        z = b;
    }
    out.push(z);
    out
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
        assert_eq!(pair(3, 3), 24);
        for z in 0..2000 {
            let (a, b) = unpair(z);
            assert_eq!(pair(a, b), z);
        }
    }

    #[test]
    fn tuples_round_trip() {
        for z in 0..500 {
            for m in 1..4 {
                assert_eq!(tuple(&untuple(z, m)), z);
            }
        }
    }
}
