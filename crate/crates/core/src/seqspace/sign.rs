//! Eventual sign of exponential-polynomial sequences `sum_i c_i * r_i^n * n^q_i`.
//!
//! The dominant group (largest `|r|`, then largest `q`) fixes the sign for all
//! large `n`; the index after which it does so is found from a decreasing
//! majorant of the remaining terms.

/// Longest explicit scan accepted before a sign question is declared
/// undecidable.
pub const SCAN_CAP: usize = 10_000_000;

const SEARCH_CAP: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// Identically zero for every `n >= 1`.
    Zero,
    Positive,
    Negative,
    /// Sign depends on the parity of `n`.
    Alternating {
        even_positive: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventualSign {
    pub pattern: SignPattern,
    /// For every `n > settled_after` the pattern holds strictly.
    pub settled_after: usize,
}

/// Sign pattern of `n -> sum c * r^n * n^q` for large `n`.
///
/// Returns `None` when the dominant group cancels on one parity class, which
/// would need a second-order analysis.
pub fn eventual_sign(terms: &[(f64, f64, f64)]) -> Option<EventualSign> {
    let terms: Vec<_> = terms
        .iter()
        .copied()
        .filter(|&(c, r, _)| c != 0.0 && r != 0.0)
        .collect();
    if terms.is_empty() {
        return Some(EventualSign {
            pattern: SignPattern::Zero,
            settled_after: 0,
        });
    }

    let big_r = terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    let big_q = terms
        .iter()
        .filter(|t| t.1.abs() == big_r)
        .map(|t| t.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let in_group = |t: &(f64, f64, f64)| t.1.abs() == big_r && t.2 == big_q;

    let even: f64 = terms.iter().filter(|t| in_group(t)).map(|t| t.0).sum();
    let odd: f64 = terms
        .iter()
        .filter(|t| in_group(t))
        .map(|t| t.0 * t.1.signum())
        .sum();
    if even == 0.0 || odd == 0.0 {
        return None;
    }
    let pattern = match (even > 0.0, odd > 0.0) {
        (true, true) => SignPattern::Positive,
        (false, false) => SignPattern::Negative,
        (even_positive, _) => SignPattern::Alternating { even_positive },
    };
    let margin = even.abs().min(odd.abs());

    // Remaining terms relative to the dominant scale, each eventually decreasing.
    let rest: Vec<(f64, f64, f64)> = terms
        .iter()
        .filter(|t| !in_group(t))
        .map(|&(c, r, q)| (c.abs(), (r.abs() / big_r).ln(), q - big_q))
        .collect();
    let mut start = 1.0_f64;
    for &(_, log_s, e) in &rest {
        if log_s < 0.0 && e > 0.0 {
            start = start.max((e / -log_s).ceil());
        }
    }
    let rest_at = |n: f64| -> f64 {
        rest.iter()
            .map(|&(c, log_s, e)| c * (n * log_s + e * n.ln()).exp())
            .sum()
    };

    if rest_at(start) < margin {
        return Some(EventualSign {
            pattern,
            settled_after: start as usize - 1,
        });
    }
    let mut lo = start;
    let mut hi = start * 2.0;
    while rest_at(hi) >= margin {
        lo = hi;
        hi *= 2.0;
        if hi > SEARCH_CAP {
            return None;
        }
    }
    // rest_at(lo) >= margin > rest_at(hi), decreasing on [start, inf)
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if rest_at(mid) < margin {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(EventualSign {
        pattern,
        settled_after: hi as usize - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(terms: &[(f64, f64, f64)], n: usize) -> f64 {
        terms
            .iter()
            .map(|&(c, r, q)| c * r.powi(n as i32) * (n as f64).powf(q))
            .sum()
    }

    #[test]
    fn zero_sequence() {
        let s = eventual_sign(&[(0.0, 1.0, 0.0), (2.0, 0.0, 0.0)]).unwrap();
        assert_eq!(s.pattern, SignPattern::Zero);
    }

    #[test]
    fn harmonic_beats_geometric_eventually() {
        // 1/n - 5 * 0.9^n is negative early and positive later
        let terms = [(1.0, 1.0, -1.0), (-5.0, 0.9, 0.0)];
        let s = eventual_sign(&terms).unwrap();
        assert_eq!(s.pattern, SignPattern::Positive);
        for n in s.settled_after + 1..s.settled_after + 2000 {
            assert!(brute(&terms, n) > 0.0, "n = {n}");
        }
        assert!(brute(&terms, 5) < 0.0);
    }

    #[test]
    fn alternating_dominant() {
        let terms = [(1.0, -0.8, 0.0), (0.5, 0.5, 0.0)];
        let s = eventual_sign(&terms).unwrap();
        assert_eq!(
            s.pattern,
            SignPattern::Alternating {
                even_positive: true
            }
        );
        for n in s.settled_after + 1..s.settled_after + 200 {
            let v = brute(&terms, n);
            assert_eq!(v > 0.0, n % 2 == 0, "n = {n}");
        }
    }

    #[test]
    fn cancelling_parity_is_undecided() {
        // 0.5^n + (-0.5)^n vanishes on odd n
        assert!(eventual_sign(&[(1.0, 0.5, 0.0), (1.0, -0.5, 0.0)]).is_none());
    }
}
