//! Exact ground truth at small point counts: depth-first enumeration of all
//! threshold-realizable output patterns with rational LP feasibility at every
//! branch, class-size tables, and the signed-magnitude bijectivity check
//! behind the uniform T-law.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypercube::{InputLabel, InputSet, OutputPattern};
use crate::ratlp::{dot, feasible_point, LinCon, Rat};

/// Exact enumeration guard: beyond this many points the pattern tree is out
/// of desk reach.
pub const MAX_ORACLE_POINTS: usize = 32;

/// Bijectivity check guard: the T sweep costs 4^n.
pub const MAX_BIJECTIVITY_DIM: usize = 13;

/// How vertex additivity lets two earlier labels force a later one, saving
/// an LP call. On the {0,1} cube without bias, x_(u|v) = x_u + x_v for
/// disjoint masks u, v and the origin's dot product is identically zero; in
/// the remaining full-cube cases x_(u|v) = x_u + x_v - x_origin (which also
/// holds in the bias-augmented coordinates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ForceRule {
    None,
    TwoPoint,
    ThreePoint,
}

/// Enumerates exactly the output patterns a threshold unit can realize on
/// the given points, deciding each branch by exact rational feasibility of
/// {<w,x> >= 1 for 1-labeled, <w,x> <= 0 for 0-labeled} — the margin form of
/// the sampler's strict 1(X > 0) convention, lossless by scale invariance.
/// `with_bias` adds a free constant coordinate.
///
/// Patterns whose every witness has a zero dot product somewhere (realized
/// by the sampler only on a measure-zero weight set) are included; on the
/// centered cube these are the patterns with t != m/2.
///
/// # Errors
/// More than [`MAX_ORACLE_POINTS`] points, or non-integer coordinates.
pub fn enumerate_threshold_patterns(
    inputs: &InputSet,
    with_bias: bool,
) -> Result<HashSet<OutputPattern>> {
    let m = inputs.len();
    if m == 0 || m > MAX_ORACLE_POINTS {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration supports 1..={MAX_ORACLE_POINTS} points, got {m}"
        )));
    }
    let rows = integer_rows(inputs, with_bias)?;
    let nvars = rows[0].len();
    let full_cube = m == 1usize << inputs.n();
    let rule = match inputs.label() {
        InputLabel::Hypercube01 if full_cube && !with_bias => ForceRule::TwoPoint,
        InputLabel::Hypercube01 if full_cube => ForceRule::ThreePoint,
        InputLabel::HypercubePm1 if full_cube => ForceRule::ThreePoint,
        _ => ForceRule::None,
    };

    let origin = vec![Rat::zero(); nvars];
    // Split the tree at a fixed depth and finish each prefix in parallel.
    let split = if m > 16 { 8.min(m) } else { 0 };
    if split == 0 {
        let mut out = HashSet::new();
        let mut labels = Vec::with_capacity(m);
        let mut cons = Vec::with_capacity(m);
        dfs(&rows, rule, nvars, m, &mut labels, &mut cons, &origin, &mut |l, _, _| {
            out.insert(pattern_from(l));
        });
        return Ok(out);
    }

    struct Prefix {
        labels: Vec<bool>,
        cons: Vec<LinCon>,
        witness: Vec<Rat>,
    }
    let mut prefixes = Vec::new();
    let mut labels = Vec::with_capacity(m);
    let mut cons = Vec::with_capacity(m);
    dfs(&rows, rule, nvars, split, &mut labels, &mut cons, &origin, &mut |l, c, w| {
        prefixes.push(Prefix { labels: l.to_vec(), cons: c.to_vec(), witness: w.to_vec() });
    });
    let sets: Vec<HashSet<OutputPattern>> = prefixes
        .into_par_iter()
        .map(|mut p| {
            let mut out = HashSet::new();
            dfs(
                &rows,
                rule,
                nvars,
                m,
                &mut p.labels,
                &mut p.cons,
                &p.witness,
                &mut |l, _, _| {
                    out.insert(pattern_from(l));
                },
            );
            out
        })
        .collect();
    let mut out = HashSet::new();
    for s in sets {
        out.extend(s);
    }
    Ok(out)
}

/// Group a pattern set by T-value: t -> |F_t|.
pub fn class_sizes(patterns: &HashSet<OutputPattern>) -> BTreeMap<u64, u64> {
    let mut map = BTreeMap::new();
    for p in patterns {
        *map.entry(p.t_value()).or_insert(0u64) += 1;
    }
    map
}

/// Checks that sign flips of a fixed magnitude vector sweep out every
/// T-value exactly once: {T(sigma * a) : sigma in {-1,1}^n} = {0..2^n-1}.
/// Entry order is irrelevant to the outcome.
///
/// # Errors
/// Non-positive entries, dimension beyond [`MAX_BIJECTIVITY_DIM`], or a
/// degenerate vector: two subsets of `a` sharing a sum (relative gap under
/// 1e-9), which is exactly when some signed combination ties at zero and
/// the strict threshold becomes order-sensitive. Callers drawing random
/// magnitudes should resample on that error.
pub fn bijectivity_check(a: &[f64]) -> Result<bool> {
    let n = a.len();
    if n == 0 || n > MAX_BIJECTIVITY_DIM {
        return Err(Error::InvalidArgument(format!(
            "bijectivity check supports 1..={MAX_BIJECTIVITY_DIM} dimensions, got {n}"
        )));
    }
    if a.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidArgument(
            "magnitude vector must be strictly positive and finite".into(),
        ));
    }
    let m = 1usize << n;
    // All 2^n subset sums must be pairwise distinct, otherwise some signed
    // combination vanishes and a dot product ties at the threshold.
    let mut subset_sums = vec![0.0f64; m];
    for i in 1..m {
        subset_sums[i] = subset_sums[i & (i - 1)] + a[i.trailing_zeros() as usize];
    }
    let mut sorted = subset_sums.clone();
    sorted.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite sums"));
    for pair in sorted.windows(2) {
        let gap = pair[1] - pair[0];
        if gap <= 1e-9 * pair[1].abs().max(1.0) {
            return Err(Error::Degenerate(format!(
                "subset sums collide near {:.6}; magnitudes are non-generic",
                pair[0]
            )));
        }
    }
    let mut seen = vec![false; m];
    let mut w = vec![0.0f64; n];
    for sigma in 0..m {
        for (i, slot) in w.iter_mut().enumerate() {
            *slot = if (sigma >> i) & 1 == 1 { -a[i] } else { a[i] };
        }
        let mut sums = vec![0.0f64; m];
        let mut t = 0usize;
        for i in 1..m {
            sums[i] = sums[i & (i - 1)] + w[i.trailing_zeros() as usize];
            if sums[i] > 0.0 {
                t += 1;
            }
        }
        if seen[t] {
            return Ok(false);
        }
        seen[t] = true;
    }
    Ok(true)
}

/// Input rows as exact integers (bias column appended when requested).
fn integer_rows(inputs: &InputSet, with_bias: bool) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::with_capacity(inputs.len());
    for i in 0..inputs.len() {
        let mut row = Vec::with_capacity(inputs.n() + usize::from(with_bias));
        for &v in inputs.point(i) {
            if !v.is_finite() || v != v.round() || v.abs() > 1e9 {
                return Err(Error::InvalidArgument(format!(
                    "exact enumeration needs integer coordinates; point {i} has {v}"
                )));
            }
            row.push(v as i64);
        }
        if with_bias {
            row.push(1);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn pattern_from(labels: &[bool]) -> OutputPattern {
    let mut p = OutputPattern::zeros(labels.len());
    for (i, &l) in labels.iter().enumerate() {
        if l {
            p.set_bit(i, true);
        }
    }
    p
}

/// A label for input k implied by earlier labels through vertex additivity,
/// or None when undetermined.
fn forced_label(rule: ForceRule, labels: &[bool], k: usize) -> Option<bool> {
    if rule == ForceRule::None || k.count_ones() < 2 {
        return None;
    }
    let mut s = (k - 1) & k;
    while s > 0 {
        let o = k ^ s;
        if s < o {
            let (lu, lv) = (labels[s], labels[o]);
            match rule {
                ForceRule::TwoPoint => {
                    // Origin dot is identically zero: equal sublabels push
                    // the sum strictly to their side.
                    if lu == lv {
                        return Some(lu);
                    }
                }
                ForceRule::ThreePoint => {
                    let l0 = labels[0];
                    if lu && lv && !l0 {
                        return Some(true);
                    }
                    if !lu && !lv && l0 {
                        return Some(false);
                    }
                }
                ForceRule::None => unreachable!(),
            }
        }
        s = (s - 1) & k;
    }
    None
}

/// Depth-first extension of partial labelings in canonical input order up to
/// `stop` labels, emitting each surviving prefix. Feasibility of a child is
/// settled, in cost order, by structural forcing, by the parent's witness
/// (reused as-is or rescaled), and only then by an exact LP.
#[allow(clippy::too_many_arguments)]
fn dfs<F: FnMut(&[bool], &[LinCon], &[Rat])>(
    rows: &[Vec<i64>],
    rule: ForceRule,
    nvars: usize,
    stop: usize,
    labels: &mut Vec<bool>,
    cons: &mut Vec<LinCon>,
    witness: &[Rat],
    emit: &mut F,
) {
    let k = labels.len();
    if k == stop {
        emit(labels, cons, witness);
        return;
    }
    let forced = forced_label(rule, labels, k);
    for label in [false, true] {
        if forced.is_some_and(|f| f != label) {
            continue;
        }
        let coeffs = &rows[k];
        let next_witness: Option<Vec<Rat>> = if forced.is_some() {
            // Forcing arguments bound the new dot strictly past the margin,
            // so the parent's witness still certifies feasibility.
            Some(witness.to_vec())
        } else {
            let d = dot(coeffs, witness);
            if label {
                if d >= Rat::one() {
                    Some(witness.to_vec())
                } else if d.is_positive() {
                    // Scaling by 1/d > 1 lifts this dot to exactly 1 and
                    // only strengthens earlier constraints.
                    let inv = d.recip();
                    Some(witness.iter().map(|v| v * &inv).collect())
                } else {
                    None
                }
            } else if d <= Rat::zero() {
                Some(witness.to_vec())
            } else {
                None
            }
        };
        let con = if label {
            LinCon::ge(coeffs.clone(), 1)
        } else {
            LinCon::le(coeffs.clone(), 0)
        };
        cons.push(con);
        let resolved = match next_witness {
            Some(w) => {
                debug_assert!(
                    cons.last().expect("just pushed").satisfied_by(&w),
                    "witness reuse produced an invalid certificate"
                );
                Some(w)
            }
            None => feasible_point(nvars, cons),
        };
        if let Some(w) = resolved {
            labels.push(label);
            dfs(rows, rule, nvars, stop, labels, cons, &w, emit);
            labels.pop();
        }
        cons.pop();
    }
}
