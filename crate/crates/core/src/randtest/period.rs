//! Period measurement over an observed window.

use crate::bits::BitVec;

/// Smallest `p >= 1` such that `seq[i] == seq[i + p]` over the whole
/// observed window, reported only when at least `2p` bits were observed;
/// `None` otherwise. Linear-time via the prefix function of the window.
pub fn measure_period(seq: &BitVec) -> Option<usize> {
    let n = seq.len();
    if n == 0 {
        return None;
    }
    let mut pi = vec![0usize; n];
    let mut k = 0usize;
    for i in 1..n {
        let bit = seq.get(i);
        while k > 0 && bit != seq.get(k) {
            k = pi[k - 1];
        }
        if bit == seq.get(k) {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    (2 * p <= n).then_some(p)
}
