//! Digit interleaving `(2^ω)^n → 2^ω` and a tail-separating block embedding.

use crate::error::{Error, Result};
use crate::point::{lcm, EpPoint};
use crate::word::Word;

/// `ψ_n(x_0,…,x_{n-1})(n·k + j) = x_j(k)`.
pub fn interleave(points: &[EpPoint]) -> Result<EpPoint> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Domain("interleave needs at least one component".into()));
    }
    let pre = points.iter().map(|p| p.preperiod().len()).max().unwrap_or(0);
    let per = points.iter().map(|p| p.period().len()).fold(1, lcm);
    let digit = |i: usize| points[i % n].digit(i / n);
    let preperiod = Word::from_digits_unchecked((0..n * pre).map(digit).collect());
    let period = Word::from_digits_unchecked((n * pre..n * (pre + per)).map(digit).collect());
    EpPoint::canonicalize(preperiod, period)
}

/// Exact inverse of [`interleave`].
pub fn deinterleave(x: &EpPoint, n: usize) -> Result<Vec<EpPoint>> {
    if n == 0 {
        return Err(Error::Domain("deinterleave arity must be at least 1".into()));
    }
    let u = x.preperiod().len();
    let v = x.period().len();
    // component j is periodic from index ceil(u/n) with period dividing v
    let pre = u.div_ceil(n);
    (0..n)
        .map(|j| {
            let d = |k: usize| x.digit(n * k + j);
            let preperiod = Word::from_digits_unchecked((0..pre).map(d).collect());
            let period = Word::from_digits_unchecked((pre..pre + v).map(d).collect());
            EpPoint::canonicalize(preperiod, period)
        })
        .collect()
}

/// Length-`depth` prefix of `φ(x) = B_0 B_1 B_2 …` with `B_k = 0^{k+2} 1 ⌢ x↾(k+1)`.
///
/// Marker runs `0^{k+2}1` grow strictly, so any tail of `φ(x)` fixes the block frame
/// and with it `x`; distinct inputs therefore give tail-inequivalent outputs.
pub fn silver_embed(x: &EpPoint, depth: usize) -> Word {
    let mut out = Vec::with_capacity(depth);
    let mut k = 0;
    while out.len() < depth {
        out.extend(std::iter::repeat_n(0u8, k + 2));
        out.push(1);
        out.extend((0..=k).map(|i| x.digit(i)));
        k += 1;
    }
    out.truncate(depth);
    Word::from_digits_unchecked(out)
}
