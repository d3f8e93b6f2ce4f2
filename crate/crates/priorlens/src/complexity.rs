//! Complexity functionals on output patterns: the Lempel–Ziv estimator used
//! by the scatter plots, DNF/CNF formula construction, and the
//! Boolean-complexity upper bounds with their tail estimate.
//!
//! All string-based measures read the truth table in the canonical input
//! order fixed by the hypercube module.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::hypercube::OutputPattern;

/// Number of phrases in the Lempel–Ziv 1976 parsing of the pattern's bit
/// string (exhaustive-history variant; the final incomplete phrase counts).
///
/// `lz76_phrases` of "0" is 1, of "0000000000" is 2 (phrases `0`,
/// `000000000`), of "0101010101" is 3 (phrases `0`, `1`, `01010101`).
pub fn lz76_phrases(p: &OutputPattern) -> usize {
    let n = p.len();
    if n == 0 {
        return 0;
    }
    // Exhaustive-history parser: the current phrase starting at l is extended
    // while some earlier position i < l reproduces it symbol by symbol.
    let mut c = 1usize; // the first symbol is always a phrase
    let mut l = 1usize; // parsed prefix length
    let mut i = 0usize; // candidate reproduction start
    let mut k = 1usize; // current extension length
    let mut kmax = 1usize;
    while l + k <= n {
        if p.bit(i + k - 1) == p.bit(l + k - 1) {
            k += 1;
        } else {
            kmax = kmax.max(k);
            i += 1;
            if i == l {
                // No history position reproduces the next symbol: the phrase
                // ends after kmax symbols.
                c += 1;
                l += kmax;
                i = 0;
                k = 1;
                kmax = 1;
            } else {
                k = 1;
            }
        }
    }
    if l < n {
        c += 1; // final, possibly incomplete phrase
    }
    c
}

/// Lempel–Ziv complexity estimate of a pattern.
///
/// Constant strings get `log2(m)`; anything else gets
/// `log2(m) * (lz76_phrases(s) + lz76_phrases(reverse(s))) / 2`, the
/// symmetrized form of the published estimator.
///
/// # Errors
/// Patterns shorter than 2 bits.
pub fn k_lz(p: &OutputPattern) -> Result<f64> {
    let m = p.len();
    if m < 2 {
        return Err(Error::InvalidArgument("k_lz needs a pattern of length >= 2".into()));
    }
    let log2m = (m as f64).log2();
    let t = p.t_value();
    if t == 0 || t == m as u64 {
        return Ok(log2m);
    }
    let fwd = lz76_phrases(p) as f64;
    let rev = lz76_phrases(&p.reversed()) as f64;
    Ok(log2m * (fwd + rev) / 2.0)
}

/// Binary connective of a [`BoolFormula`] gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

/// A Boolean formula: a tree of binary AND/OR gates over literals
/// `x_i` / `!x_i`, plus the two constants for the degenerate patterns.
/// The connective count of a tree is its leaf count minus one; constants
/// count zero connectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolFormula {
    Const(bool),
    Lit { var: usize, negated: bool },
    Gate { op: BoolOp, left: Box<BoolFormula>, right: Box<BoolFormula> },
}

impl BoolFormula {
    /// Evaluates the formula on an assignment (`assign[j]` is the value of
    /// variable j).
    pub fn eval(&self, assign: &[bool]) -> bool {
        match self {
            BoolFormula::Const(b) => *b,
            BoolFormula::Lit { var, negated } => assign[*var] ^ negated,
            BoolFormula::Gate { op, left, right } => match op {
                BoolOp::And => left.eval(assign) && right.eval(assign),
                BoolOp::Or => left.eval(assign) || right.eval(assign),
            },
        }
    }

    /// Evaluates on cube vertex `index` of an n-cube (canonical coordinate
    /// order: variable j is bit `n-1-j` of the index).
    pub fn eval_on_vertex(&self, index: usize, n: usize) -> bool {
        let assign: Vec<bool> = (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect();
        self.eval(&assign)
    }

    /// Number of binary connectives (gates) in the tree.
    pub fn connectives(&self) -> u64 {
        match self {
            BoolFormula::Const(_) | BoolFormula::Lit { .. } => 0,
            BoolFormula::Gate { left, right, .. } => 1 + left.connectives() + right.connectives(),
        }
    }

    /// Number of literal leaves.
    pub fn leaves(&self) -> u64 {
        match self {
            BoolFormula::Const(_) => 0,
            BoolFormula::Lit { .. } => 1,
            BoolFormula::Gate { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolFormula::Const(b) => write!(f, "{}", if *b { "true" } else { "false" }),
            BoolFormula::Lit { var, negated } => {
                write!(f, "{}x{}", if *negated { "!" } else { "" }, var)
            }
            BoolFormula::Gate { op, left, right } => {
                let sym = match op {
                    BoolOp::And => "&",
                    BoolOp::Or => "|",
                };
                write!(f, "({left} {sym} {right})")
            }
        }
    }
}

/// Left-folds formulas with one connective, returning `None` on empty input.
fn fold_gate(op: BoolOp, items: Vec<BoolFormula>) -> Option<BoolFormula> {
    let mut iter = items.into_iter();
    let first = iter.next()?;
    Some(iter.fold(first, |acc, item| BoolFormula::Gate {
        op,
        left: Box::new(acc),
        right: Box::new(item),
    }))
}

/// Checks a pattern/dimension pair describes a full truth table.
fn check_table(p: &OutputPattern, n: usize) -> Result<()> {
    if n == 0 || n >= usize::BITS as usize || p.len() != 1usize << n {
        return Err(Error::InvalidArgument(format!(
            "pattern length {} is not 2^{n}",
            p.len()
        )));
    }
    Ok(())
}

/// The n-literal clause that is true exactly on cube vertex `index`.
fn minterm(index: usize, n: usize) -> BoolFormula {
    let lits: Vec<BoolFormula> = (0..n)
        .map(|j| BoolFormula::Lit { var: j, negated: (index >> (n - 1 - j)) & 1 == 0 })
        .collect();
    fold_gate(BoolOp::And, lits).expect("n >= 1")
}

/// The n-literal clause that is false exactly on cube vertex `index`.
fn maxterm(index: usize, n: usize) -> BoolFormula {
    let lits: Vec<BoolFormula> = (0..n)
        .map(|j| BoolFormula::Lit { var: j, negated: (index >> (n - 1 - j)) & 1 == 1 })
        .collect();
    fold_gate(BoolOp::Or, lits).expect("n >= 1")
}

/// Disjunctive normal form of a full truth table: one n-literal AND clause
/// per 1-input, OR-joined; `t` clauses and `n*t - 1` connectives. The all-zero
/// pattern yields the constant `false` with 0 connectives.
pub fn dnf(p: &OutputPattern, n: usize) -> Result<BoolFormula> {
    check_table(p, n)?;
    let clauses: Vec<BoolFormula> =
        (0..p.len()).filter(|&i| p.bit(i)).map(|i| minterm(i, n)).collect();
    Ok(fold_gate(BoolOp::Or, clauses).unwrap_or(BoolFormula::Const(false)))
}

/// Conjunctive normal form of a full truth table: one n-literal OR clause per
/// 0-input, AND-joined; `2^n - t` clauses and `n*(2^n - t) - 1` connectives.
/// The all-one pattern yields the constant `true` with 0 connectives.
pub fn cnf(p: &OutputPattern, n: usize) -> Result<BoolFormula> {
    check_table(p, n)?;
    let clauses: Vec<BoolFormula> =
        (0..p.len()).filter(|&i| !p.bit(i)).map(|i| maxterm(i, n)).collect();
    Ok(fold_gate(BoolOp::And, clauses).unwrap_or(BoolFormula::Const(true)))
}

/// Linear upper bound on Boolean complexity: `n * min(t, 2^n - t) - 1`,
/// clamped to 0 at the constant functions.
pub fn kbool_bound_linear(n: u32, t: u64) -> u64 {
    let total = 1u64 << n;
    assert!(t <= total, "t={t} exceeds 2^{n}");
    let s = t.min(total - t);
    if s == 0 {
        0
    } else {
        n as u64 * s - 1
    }
}

/// The looser main-text variant of the linear bound: `2 * n * min(t, 2^n - t)`.
pub fn kbool_bound_linear_loose(n: u32, t: u64) -> u64 {
    let total = 1u64 << n;
    assert!(t <= total, "t={t} exceeds 2^{n}");
    2 * n as u64 * t.min(total - t)
}

/// Recursive upper bound on Boolean complexity:
///
/// ```text
/// C(n, 0) = C(n, 2^n) = 0
/// C(n, 1) = C(n, 2^n - 1) = n - 1
/// C(n, t) = C(n-1, ceil(t/2)) + C(n-1, floor(t/2)) + 2   otherwise
/// ```
///
/// Memoized; the recursion bottoms out in the base cases at n = 1.
pub fn kbool_bound_recursive(n: u32, t: u64) -> u64 {
    fn go(n: u32, t: u64, memo: &mut HashMap<(u32, u64), u64>) -> u64 {
        let total = 1u64 << n;
        assert!(t <= total, "t={t} exceeds 2^{n}");
        if t == 0 || t == total {
            return 0;
        }
        if t == 1 || t == total - 1 {
            return (n - 1) as u64;
        }
        if let Some(&v) = memo.get(&(n, t)) {
            return v;
        }
        let v = go(n - 1, t.div_ceil(2), memo) + go(n - 1, t / 2, memo) + 2;
        memo.insert((n, t), v);
        v
    }
    let mut memo = HashMap::new();
    go(n, t, &mut memo)
}

/// Tail estimate on the complexity distribution: a lower bound on the prior
/// probability mass at complexity below k, `1 - k/(2^n * n)`, clamped to
/// [0, 1]. Read as `P(K_Bool >= k) <= k / (2^n * n)` turned around.
pub fn kbool_tail_bound(n: u32, k: u64) -> f64 {
    let denom = (1u64 << n) as f64 * n as f64;
    (1.0 - k as f64 / denom).clamp(0.0, 1.0)
}

/// Exact minimal connective counts for every pattern on the n-cube, found by
/// exhaustive bottom-up search over AND/OR formula trees; the brute-force
/// oracle for the upper-bound tests. Index the result by the pattern's
/// little-endian bitmask (bit i = output on vertex i). Constants have
/// complexity 0 by convention.
///
/// # Errors
/// n > 3 (the table has 2^(2^n) entries; n = 4 would need 65536 entries and
/// hours of pairing — beyond the oracle's remit).
pub fn minimal_connectives_table(n: usize) -> Result<Vec<u32>> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidArgument(
            "minimal_connectives_table supports 1 <= n <= 3".into(),
        ));
    }
    let m = 1usize << n; // truth table bits
    let npat = 1usize << m; // number of patterns
    let full = npat - 1; // all-ones mask
    let mut cost = vec![u32::MAX; npat];
    // Cost 0: constants (by convention) and literals.
    cost[0] = 0;
    cost[full] = 0;
    for j in 0..n {
        let mut pos = 0usize;
        for i in 0..m {
            if (i >> (n - 1 - j)) & 1 == 1 {
                pos |= 1 << i;
            }
        }
        cost[pos] = 0;
        cost[full & !pos] = 0;
    }
    // Grow by total cost: a gate combining formulas of cost a and b costs
    // a + b + 1. Iterate until every pattern is priced.
    let mut by_cost: Vec<Vec<usize>> = vec![Vec::new()];
    by_cost[0] = (0..npat).filter(|&p| cost[p] == 0).collect();
    let mut priced = by_cost[0].len();
    let mut c = 1u32;
    while priced < npat {
        let mut found = Vec::new();
        for a in 0..c {
            let b = c - 1 - a;
            if b < a {
                break;
            }
            for &pa in &by_cost[a as usize] {
                for &pb in &by_cost[b as usize] {
                    for combined in [pa & pb, pa | pb] {
                        if cost[combined] > c {
                            cost[combined] = c;
                            found.push(combined);
                        }
                    }
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        priced += found.len();
        by_cost.push(found);
        c += 1;
        if c > 64 {
            return Err(Error::Internal("minimal formula search failed to converge".into()));
        }
    }
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::OutputPattern;
    use approx::assert_abs_diff_eq;

    fn pat(s: &str) -> OutputPattern {
        OutputPattern::from_bit_str(s).unwrap()
    }

    #[test]
    fn lz76_hand_parses() {
        assert_eq!(lz76_phrases(&pat("0")), 1);
        assert_eq!(lz76_phrases(&pat("0000000000")), 2);
        assert_eq!(lz76_phrases(&pat("0101010101")), 3);
    }

    #[test]
    fn k_lz_frozen_values() {
        let m = 128;
        assert_abs_diff_eq!(k_lz(&OutputPattern::zeros(m)).unwrap(), 7.0);
        assert_abs_diff_eq!(k_lz(&OutputPattern::zeros(m).complement()).unwrap(), 7.0);
        let alt = OutputPattern::from_bits((0..m).map(|i| i % 2 == 1));
        assert_abs_diff_eq!(k_lz(&alt).unwrap(), 21.0);
        assert!(k_lz(&pat("0")).is_err());
    }

    #[test]
    fn k_lz_lower_bound_is_log2m() {
        // Constants sit exactly at log2(m); everything else is above.
        for bits in 0u32..256 {
            let p = OutputPattern::from_bits((0..8).map(|i| (bits >> i) & 1 == 1));
            let v = k_lz(&p).unwrap();
            assert!(v >= 3.0 - 1e-12, "pattern {bits:08b} got {v}");
        }
    }

    #[test]
    fn dnf_cnf_structure_and_equality() {
        // XOR on two variables: DNF (!x0 & x1) | (x0 & !x1), 3 connectives.
        let xor = pat("0110");
        let d = dnf(&xor, 2).unwrap();
        assert_eq!(d.connectives(), 3);
        assert_eq!(d.leaves(), 4);
        let c = cnf(&xor, 2).unwrap();
        assert_eq!(c.connectives(), 3);
        for i in 0..4 {
            assert_eq!(d.eval_on_vertex(i, 2), xor.bit(i));
            assert_eq!(c.eval_on_vertex(i, 2), xor.bit(i));
        }

        // Constants.
        let zero = OutputPattern::zeros(4);
        assert_eq!(dnf(&zero, 2).unwrap(), BoolFormula::Const(false));
        assert_eq!(dnf(&zero, 2).unwrap().connectives(), 0);
        assert_eq!(cnf(&zero.complement(), 2).unwrap(), BoolFormula::Const(true));

        // Exhaustive evaluation equality and connective counts at n <= 3.
        for n in 1..=3usize {
            let m = 1usize << n;
            for bits in 0u64..(1u64 << m) {
                let p = OutputPattern::from_bits((0..m).map(|i| (bits >> i) & 1 == 1));
                let t = p.t_value();
                let d = dnf(&p, n).unwrap();
                let c = cnf(&p, n).unwrap();
                for i in 0..m {
                    assert_eq!(d.eval_on_vertex(i, n), p.bit(i));
                    assert_eq!(c.eval_on_vertex(i, n), p.bit(i));
                }
                if t > 0 {
                    assert_eq!(d.connectives(), n as u64 * t - 1);
                }
                if t < m as u64 {
                    assert_eq!(c.connectives(), n as u64 * (m as u64 - t) - 1);
                }
            }
        }
    }

    #[test]
    fn connectives_equal_leaves_minus_one() {
        let p = pat("01101001");
        for f in [dnf(&p, 3).unwrap(), cnf(&p, 3).unwrap()] {
            assert_eq!(f.connectives(), f.leaves() - 1);
        }
    }

    #[test]
    fn linear_bound_values() {
        assert_eq!(kbool_bound_linear(7, 9), 62);
        assert_eq!(kbool_bound_linear(7, 119), 62);
        assert_eq!(kbool_bound_linear(7, 0), 0);
        assert_eq!(kbool_bound_linear(7, 128), 0);
        assert_eq!(kbool_bound_linear_loose(7, 9), 126);
        assert_eq!(kbool_bound_linear_loose(7, 0), 0);
    }

    #[test]
    fn recursive_bound_values() {
        for n in 1..=10u32 {
            assert_eq!(kbool_bound_recursive(n, 1), (n - 1) as u64);
            assert_eq!(kbool_bound_recursive(n, (1 << n) - 1), (n - 1) as u64);
            assert_eq!(kbool_bound_recursive(n, 0), 0);
            assert_eq!(kbool_bound_recursive(n, 1 << n), 0);
        }
        assert_eq!(kbool_bound_recursive(3, 2), 4);
        // Frozen row computed by unfolding the recursion independently:
        let row: Vec<u64> = (0..=12).map(|t| kbool_bound_recursive(7, t)).collect();
        assert_eq!(row, vec![0, 6, 12, 17, 22, 26, 30, 34, 38, 41, 44, 47, 50]);
    }

    #[test]
    fn recursive_monotone_up_to_half_for_n_2_to_10() {
        // Strict growth in t below the midpoint. Holds for n >= 2; at n = 1
        // the two values C(1,0) = C(1,1) = 0 tie, which is why the scan
        // starts at 2.
        for n in 2..=10u32 {
            let half = 1u64 << (n - 1);
            for t in 0..half {
                assert!(
                    kbool_bound_recursive(n, t) < kbool_bound_recursive(n, t + 1),
                    "C({n},{t}) >= C({n},{})",
                    t + 1
                );
            }
        }
    }

    #[test]
    fn recursive_bound_below_linear_bound() {
        for n in 1..=10u32 {
            for t in 0..=(1u64 << n) {
                assert!(
                    kbool_bound_recursive(n, t) <= kbool_bound_linear(n, t).max(0),
                    "C({n},{t}) exceeds linear bound"
                );
                assert!(kbool_bound_linear(n, t) <= kbool_bound_linear_loose(n, t).max(1));
            }
        }
    }

    #[test]
    fn tail_bound_values() {
        assert_abs_diff_eq!(kbool_tail_bound(7, 0), 1.0);
        assert_abs_diff_eq!(kbool_tail_bound(7, 896), 0.0);
        assert_abs_diff_eq!(kbool_tail_bound(7, 100), 0.888392857142857, epsilon = 1e-12);
        assert_abs_diff_eq!(kbool_tail_bound(7, 10_000), 0.0);
    }

    #[test]
    fn minimal_table_known_values() {
        let t1 = minimal_connectives_table(1).unwrap();
        // n=1 patterns: 00 -> const, 01 -> x0?? table bit i = vertex i:
        // vertex 0 has x0=0, vertex 1 has x0=1, so mask 0b10 is x0.
        assert_eq!(t1, vec![0, 0, 0, 0]);

        let t2 = minimal_connectives_table(2).unwrap();
        // AND of two variables (pattern 0001 -> mask 0b1000) costs 1.
        assert_eq!(t2[0b1000], 1);
        // OR (pattern 0111 -> mask 0b1110) costs 1.
        assert_eq!(t2[0b1110], 1);
        // XOR (pattern 0110 -> mask 0b0110) genuinely needs 3 binary
        // AND/OR connectives over literals — more than the recursive bound
        // C(2,2)=2 predicts; XOR is not realizable by any threshold unit,
        // and the bound is only claimed for realizable patterns.
        assert_eq!(t2[0b0110], 3);
        assert_eq!(kbool_bound_recursive(2, 2), 2);

        assert!(minimal_connectives_table(4).is_err());
    }
}
