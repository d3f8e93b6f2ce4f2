//! Cone geometry of sorted-magnitude perceptrons: sign signatures, the
//! minimum/maximum T a signature allows, decision trees of the multi-term
//! magnitude inequalities that pin T to an exact value, and the chain
//! construction whose realizing cone needs many such inequalities.
//!
//! Everything here works in "sorted-magnitude space": a weight vector is
//! split as w = sigma ⊙ a with sigma ∈ {−1,+1}ⁿ and magnitudes
//! 0 < a₁ < a₂ < … < aₙ. All feasibility questions are decided by exact
//! rational LPs, because the interesting boundaries (a₄ = a₁+a₂ and kin)
//! are measure-zero hyperplanes that floating point misclassifies.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::hypercube::{OutputPattern, MAX_CUBE_DIM};
use crate::ratlp::{dot, feasible_point, LinCon, Rat};

/// Tree construction is exact-LP-bound; above this the pattern DFS blows up.
pub const MAX_TREE_DIM: usize = 8;

/// A sign pattern over sorted magnitudes: entry i is the sign of the weight
/// with the (i+1)-th smallest absolute value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    signs: Vec<i8>,
}

impl Signature {
    /// Builds a signature from ±1 entries.
    pub fn new(signs: Vec<i8>) -> Result<Signature> {
        if signs.is_empty() || signs.len() > MAX_CUBE_DIM {
            return Err(Error::InvalidArgument(format!(
                "signature length must be 1..={MAX_CUBE_DIM}, got {}",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(
                "signature entries must be +1 or -1".into(),
            ));
        }
        Ok(Signature { signs })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Signed weight vector sigma ⊙ a for sorted magnitudes a.
    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "magnitude vector has length {}, signature has {}",
                a.len(),
                self.n()
            )));
        }
        Ok(self
            .signs
            .iter()
            .zip(a)
            .map(|(&s, &v)| f64::from(s) * v)
            .collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Signature> {
        let signs: Vec<i8> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!(
                    "signature characters must be '+' or '-', got {other:?}"
                ))),
            })
            .collect::<Result<_>>()?;
        Signature::new(signs)
    }
}

/// Strict comparison direction of a [`LinearCondition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    Greater,
}

/// A strict inequality between two disjoint magnitude sums, e.g.
/// a₄ < a₁+a₂. Canonical form: the side containing the largest index is the
/// left-hand side, indices are 0-based ascending internally and rendered
/// 1-based. At least three magnitudes are involved — two-term comparisons
/// are already settled by the sort order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearCondition {
    lhs: Vec<usize>,
    rhs: Vec<usize>,
    relation: Relation,
}

impl LinearCondition {
    pub fn new(mut lhs: Vec<usize>, mut rhs: Vec<usize>, relation: Relation) -> Result<Self> {
        lhs.sort_unstable();
        rhs.sort_unstable();
        if lhs.is_empty() || rhs.is_empty() || lhs.len() + rhs.len() < 3 {
            return Err(Error::InvalidArgument(
                "a magnitude condition needs nonempty sides and at least 3 terms".into(),
            ));
        }
        if lhs.windows(2).any(|w| w[0] == w[1])
            || rhs.windows(2).any(|w| w[0] == w[1])
            || rhs.iter().any(|i| lhs.binary_search(i).is_ok())
        {
            return Err(Error::InvalidArgument(
                "condition sides must be disjoint sets of indices".into(),
            ));
        }
        let lmax = *lhs.last().expect("nonempty");
        let rmax = *rhs.last().expect("nonempty");
        if rmax > lmax {
            return Err(Error::InvalidArgument(
                "canonical form puts the largest index on the left side".into(),
            ));
        }
        Ok(LinearCondition { lhs, rhs, relation })
    }

    /// Same sides, flipped relation: the strict complement (up to the
    /// measure-zero equality boundary).
    pub fn complement(&self) -> LinearCondition {
        LinearCondition {
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
            relation: match self.relation {
                Relation::Less => Relation::Greater,
                Relation::Greater => Relation::Less,
            },
        }
    }

    pub fn lhs(&self) -> &[usize] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[usize] {
        &self.rhs
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// Number of magnitudes involved (always ≥ 3).
    pub fn terms(&self) -> usize {
        self.lhs.len() + self.rhs.len()
    }

    /// Strict evaluation at a concrete magnitude vector. Exact ties satisfy
    /// neither a condition nor its complement.
    pub fn satisfied_by(&self, a: &[f64]) -> Result<bool> {
        let max_idx = *self.lhs.last().expect("nonempty");
        if max_idx >= a.len() {
            return Err(Error::InvalidArgument(format!(
                "condition references a{} but only {} magnitudes given",
                max_idx + 1,
                a.len()
            )));
        }
        let ls: f64 = self.lhs.iter().map(|&i| a[i]).sum();
        let rs: f64 = self.rhs.iter().map(|&i| a[i]).sum();
        Ok(match self.relation {
            Relation::Less => ls < rs,
            Relation::Greater => ls > rs,
        })
    }

    /// Margin-1 LP row: strict homogeneous inequalities are feasible iff
    /// their margin-1 forms are, by scaling.
    fn margin_con(&self, n: usize) -> LinCon {
        let mut row = vec![0i64; n];
        let (plus, minus) = match self.relation {
            Relation::Less => (&self.rhs, &self.lhs),
            Relation::Greater => (&self.lhs, &self.rhs),
        };
        for &i in plus {
            row[i] = 1;
        }
        for &i in minus {
            row[i] = -1;
        }
        LinCon::ge(row, 1)
    }
}

impl fmt::Display for LinearCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |ix: &[usize]| {
            ix.iter()
                .map(|i| format!("a{}", i + 1))
                .collect::<Vec<_>>()
                .join("+")
        };
        let rel = match self.relation {
            Relation::Less => "<",
            Relation::Greater => ">",
        };
        write!(f, "{}{rel}{}", side(&self.lhs), side(&self.rhs))
    }
}

/// One node of a condition tree: either a resolved signature or a branch on
/// a magnitude condition (left subtree = condition true).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(Signature),
    Branch {
        condition: LinearCondition,
        when_true: Box<TreeNode>,
        when_false: Box<TreeNode>,
    },
}

/// Decision tree over sorted-magnitude space whose leaves carry the
/// signatures realizing T = t, with sibling edges holding complementary
/// conditions. Built by [`build_condition_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionTree {
    n: usize,
    t: u64,
    root: TreeNode,
}

impl ConditionTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// All leaves with the oriented conditions along their root paths
    /// (false-branch edges contribute the complement).
    pub fn leaves(&self) -> Vec<(Signature, Vec<LinearCondition>)> {
        fn walk(
            node: &TreeNode,
            path: &mut Vec<LinearCondition>,
            out: &mut Vec<(Signature, Vec<LinearCondition>)>,
        ) {
            match node {
                TreeNode::Leaf(sig) => out.push((sig.clone(), path.clone())),
                TreeNode::Branch { condition, when_true, when_false } => {
                    path.push(condition.clone());
                    walk(when_true, path, out);
                    path.pop();
                    path.push(condition.complement());
                    walk(when_false, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Routes a sorted magnitude vector to its leaf signature. Exact
    /// condition ties (measure zero) fall to the false branch.
    pub fn route(&self, a: &[f64]) -> Result<&Signature> {
        if a.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} magnitudes, got {}",
                self.n,
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || a[0] <= 0.0 {
            return Err(Error::InvalidArgument(
                "magnitudes must be finite and strictly positive".into(),
            ));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "magnitudes must be strictly increasing".into(),
            ));
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(sig) => return Ok(sig),
                TreeNode::Branch { condition, when_true, when_false } => {
                    node = if condition.satisfied_by(a)? {
                        when_true.as_ref()
                    } else {
                        when_false.as_ref()
                    };
                }
            }
        }
    }

    /// Indented text rendering: a branch prints its condition, then the
    /// true subtree, then the false subtree, each one level deeper.
    pub fn to_text(&self) -> String {
        fn walk(node: &TreeNode, depth: usize, out: &mut String) {
            for _ in 0..depth {
                out.push_str("  ");
            }
            match node {
                TreeNode::Leaf(sig) => {
                    out.push_str(&sig.to_string());
                    out.push('\n');
                }
                TreeNode::Branch { condition, when_true, when_false } => {
                    out.push_str(&condition.to_string());
                    out.push('\n');
                    walk(when_true, depth + 1, out);
                    walk(when_false, depth + 1, out);
                }
            }
        }
        let mut out = String::new();
        walk(&self.root, 0, &mut out);
        out
    }

    /// Nested-object JSON: branches as {"condition", "if_true", "if_false"},
    /// leaves as {"signature"}.
    pub fn to_json(&self) -> serde_json::Value {
        fn walk(node: &TreeNode) -> serde_json::Value {
            match node {
                TreeNode::Leaf(sig) => json!({ "signature": sig.to_string() }),
                TreeNode::Branch { condition, when_true, when_false } => json!({
                    "condition": condition.to_string(),
                    "if_true": walk(when_true),
                    "if_false": walk(when_false),
                }),
            }
        }
        json!({ "n": self.n, "t": self.t, "tree": walk(&self.root) })
    }
}

/// Smallest T(sigma ⊙ a) over valid sorted magnitudes a: counts the subsets
/// whose sum is positive for every such a, i.e. those where each active
/// negative index can be matched to a distinct larger active positive index
/// (checked as a running balance from the top index down).
pub fn t_min(sigma: &Signature) -> u64 {
    let n = sigma.n();
    let mut count = 0u64;
    'subsets: for x in 1usize..(1 << n) {
        let mut balance = 0i32;
        let mut i = n;
        while i > 0 {
            i -= 1;
            if (x >> i) & 1 == 1 {
                balance += i32::from(sigma.sign(i));
                if balance < 0 {
                    continue 'subsets;
                }
            }
        }
        count += 1;
    }
    count
}

/// Largest T for the signature with a single positive sign at 1-based
/// position k: the 2^(k−1) subsets pairing that index with smaller ones.
pub fn t_max_special(k: usize, n: usize) -> Result<u64> {
    if k == 0 || k > n || n > MAX_CUBE_DIM {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n <= {MAX_CUBE_DIM}, got k={k}, n={n}"
        )));
    }
    Ok(1u64 << (k - 1))
}

/// All signatures that can realize T = t: negative beyond position t, and
/// t_min at most t. Returned in ascending order of the positive-sign mask.
pub fn enumerate_signatures(n: usize, t: u64) -> Result<Vec<Signature>> {
    if n == 0 || n > 12 {
        return Err(Error::InvalidArgument(format!(
            "signature enumeration supports 1..=12 dimensions, got {n}"
        )));
    }
    if t >= 1u64 << n {
        return Err(Error::InvalidArgument(format!(
            "t must lie in 0..2^{n}, got {t}"
        )));
    }
    let prefix = (t as usize).min(n);
    let mut out = Vec::new();
    for mask in 0u64..(1 << prefix) {
        let signs: Vec<i8> = (0..n)
            .map(|b| if b < prefix && (mask >> b) & 1 == 1 { 1 } else { -1 })
            .collect();
        let sig = Signature::new(signs).expect("entries are ±1");
        if t_min(&sig) <= t {
            out.push(sig);
        }
    }
    Ok(out)
}

/// Builds the decision tree of magnitude conditions separating the
/// signatures that realize T = t. Each leaf's cone (path conditions plus
/// the sort order) maps exactly onto {a : T(sigma ⊙ a) = t}; leaf cones
/// tile the sorted positive cone.
///
/// # Errors
/// Dimensions beyond the exact-LP guideline (n, t ≤ 8), or an internal
/// error if the canonical chain-shaped merge is not uniquely determined —
/// surfaced loudly rather than emitting a wrong tree.
pub fn build_condition_tree(n: usize, t: u64) -> Result<ConditionTree> {
    if n == 0 || n > MAX_TREE_DIM {
        return Err(Error::InvalidArgument(format!(
            "condition trees support 1..={MAX_TREE_DIM} dimensions, got {n}"
        )));
    }
    if t > 8 {
        return Err(Error::InvalidArgument(format!(
            "condition trees support t <= 8 (exact LP budget), got {t}"
        )));
    }
    if t >= 1u64 << n {
        return Err(Error::InvalidArgument(format!(
            "t must lie in 0..2^{n}, got {t}"
        )));
    }
    let sigmas = enumerate_signatures(n, t)?;
    let base = base_rows(n);
    // Independent signatures explore their pattern trees in parallel.
    let per_sigma: Vec<Vec<Plan>> = sigmas
        .into_par_iter()
        .map(|sigma| {
            let cores = plans_for_sigma(n, t, &sigma, &base)?;
            Ok(cores.into_iter().map(|c| (sigma.clone(), c)).collect())
        })
        .collect::<Result<_>>()?;
    let mut plans: Vec<Plan> = per_sigma.into_iter().flatten().collect();
    if plans.is_empty() {
        return Err(Error::Internal(format!(
            "no signature realizes T={t} at n={n}; enumeration is broken"
        )));
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (sig, _) in &plans {
        *seen.entry(sig.to_string()).or_insert(0) += 1;
    }
    if let Some((sig, k)) = seen.iter().find(|(_, &k)| k > 1) {
        return Err(Error::Internal(format!(
            "signature {sig} realizes T={t} on {k} separate cells; the chain-shaped merge does not apply"
        )));
    }
    let root = merge_plans(n, &base, &mut plans, &mut Vec::new())?;
    Ok(ConditionTree { n, t, root })
}

/// The alternating-prefix pattern whose realizing cone needs a long chain
/// of magnitude conditions: the point with i leading ones maps to 1 for odd
/// i, extended one coordinate at a time by complementation. Returns the
/// pattern in canonical index order together with realizing weights
/// (coordinate j multiplies index bit n−1−j).
///
/// # Errors
/// n outside 2..=8, or — loudly — an infeasible realization LP, which would
/// falsify the inductive construction.
pub fn chain_function(n: usize) -> Result<(OutputPattern, Vec<f64>)> {
    if !(2..=MAX_TREE_DIM).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "chain construction supports 2..={MAX_TREE_DIM} dimensions, got {n}"
        )));
    }
    let proto = chain_proto(n);
    let m = 1usize << n;
    let mut pattern = OutputPattern::zeros(m);
    for (x, &on) in proto.iter().enumerate() {
        if on {
            pattern.set_bit(reverse_bits(x, n), true);
        }
    }
    let cons: Vec<LinCon> = (1..m)
        .map(|x| {
            let mut row = vec![0i64; n];
            for (i, slot) in row.iter_mut().enumerate() {
                if (x >> i) & 1 == 1 {
                    *slot = 1;
                }
            }
            if proto[x] {
                LinCon::ge(row, 1)
            } else {
                LinCon::le(row, -1)
            }
        })
        .collect();
    let witness = feasible_point(n, &cons).ok_or_else(|| {
        Error::Internal(format!(
            "chain pattern at n={n} has no realizing weights; the inductive argument is violated"
        ))
    })?;
    if !cons.iter().all(|c| c.satisfied_by(&witness)) {
        return Err(Error::Internal(
            "LP returned a point violating its own constraints".into(),
        ));
    }
    let weights: Vec<f64> = witness
        .iter()
        .map(|r| {
            r.to_f64()
                .ok_or_else(|| Error::Numerical("witness weight overflows f64".into()))
        })
        .collect::<Result<_>>()?;
    Ok((pattern, weights))
}

/// Irredundant constraint count of the chain function's realizing cone,
/// returned as (total facets, facets involving ≥ 3 coordinates). The
/// multi-term count grows at least like n−2 and overtakes it from n = 5.
pub fn chain_cone_facets(n: usize) -> Result<(usize, usize)> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "facet reduction is exact-LP-bound; supports 2..=6 dimensions, got {n}"
        )));
    }
    let proto = chain_proto(n);
    let row_of = |x: usize, out: bool| {
        let mut row = vec![0i64; n];
        for (i, slot) in row.iter_mut().enumerate() {
            if (x >> i) & 1 == 1 {
                *slot = 1;
            }
        }
        if out {
            LinCon::ge(row, 1)
        } else {
            LinCon::le(row, -1)
        }
    };
    let mut core: Vec<(usize, bool)> = (1..1usize << n).map(|x| (x, proto[x])).collect();
    // Drop any constraint implied by the rest: flipping it must stay
    // infeasible. The cone is full-dimensional, so the surviving set is its
    // unique facet description regardless of scan order.
    loop {
        let mut removed = false;
        let mut i = 0;
        while i < core.len() {
            let mut rows: Vec<LinCon> = core
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &(x, out))| row_of(x, out))
                .collect();
            let (x, out) = core[i];
            rows.push(row_of(x, !out));
            if feasible_point(n, &rows).is_none() {
                core.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            break;
        }
    }
    let multi = core.iter().filter(|(x, _)| x.count_ones() >= 3).count();
    Ok((core.len(), multi))
}

/// Strict-threshold T of a weight vector over the implicit {0,1}^n cube:
/// the number of subsets with positive weight sum.
pub fn t_of_weights(w: &[f64]) -> Result<u64> {
    let n = w.len();
    if n == 0 || n > MAX_CUBE_DIM {
        return Err(Error::InvalidArgument(format!(
            "expected 1..={MAX_CUBE_DIM} weights, got {n}"
        )));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("weights must be finite".into()));
    }
    let m = 1usize << n;
    let mut sums = vec![0.0f64; m];
    let mut t = 0u64;
    for i in 1..m {
        sums[i] = sums[i & (i - 1)] + w[i.trailing_zeros() as usize];
        if sums[i] > 0.0 {
            t += 1;
        }
    }
    Ok(t)
}

type Plan = (Signature, Vec<LinearCondition>);

/// Sorted-magnitude base constraints in margin-1 form: a₁ ≥ 1 and
/// a_{i+1} − a_i ≥ 1, equivalent to 0 < a₁ < … < aₙ by scaling.
fn base_rows(n: usize) -> Vec<LinCon> {
    let mut rows = Vec::with_capacity(n);
    let mut first = vec![0i64; n];
    first[0] = 1;
    rows.push(LinCon::ge(first, 1));
    for i in 0..n - 1 {
        let mut row = vec![0i64; n];
        row[i] = -1;
        row[i + 1] = 1;
        rows.push(LinCon::ge(row, 1));
    }
    rows
}

fn decision_coeffs(n: usize, sigma: &Signature, x: usize) -> Vec<i64> {
    let mut row = vec![0i64; n];
    for (i, slot) in row.iter_mut().enumerate() {
        if (x >> i) & 1 == 1 {
            *slot = i64::from(sigma.sign(i));
        }
    }
    row
}

/// Canonical condition expressing "subset x maps to `out`" for mixed-sign
/// subsets: positive-sum side vs negative-sum side, larger max index left.
fn condition_for(sigma: &Signature, x: usize, out: bool) -> Result<LinearCondition> {
    let pos: Vec<usize> = (0..sigma.n())
        .filter(|&i| (x >> i) & 1 == 1 && sigma.sign(i) > 0)
        .collect();
    let neg: Vec<usize> = (0..sigma.n())
        .filter(|&i| (x >> i) & 1 == 1 && sigma.sign(i) < 0)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Internal(
            "single-sign subsets are settled by the sort order, not branched".into(),
        ));
    }
    let pos_left = pos.last() > neg.last();
    let (lhs, rhs) = if pos_left { (pos, neg) } else { (neg, pos) };
    let relation = match (out, pos_left) {
        (true, true) | (false, false) => Relation::Greater,
        (true, false) | (false, true) => Relation::Less,
    };
    LinearCondition::new(lhs, rhs, relation)
}

fn implied(n: usize, base: &[LinCon], context: &[LinearCondition], c: &LinearCondition) -> bool {
    let mut rows = base.to_vec();
    rows.extend(context.iter().map(|cc| cc.margin_con(n)));
    rows.push(c.complement().margin_con(n));
    feasible_point(n, &rows).is_none()
}

/// All irredundant condition cores for one signature: depth-first over
/// subsets ordered by popcount then value, branching only where both
/// outputs stay feasible (recording the canonical condition each way),
/// pruning once more than t subsets map to 1, keeping completions with
/// exactly t.
fn plans_for_sigma(
    n: usize,
    t: u64,
    sigma: &Signature,
    base: &[LinCon],
) -> Result<Vec<Vec<LinearCondition>>> {
    let mut inputs: Vec<usize> = (1..1usize << n).collect();
    inputs.sort_unstable_by_key(|&x| (x.count_ones(), x));
    let search = PlanSearch { n, t, inputs, sigma };
    let mut cons = base.to_vec();
    // a = (1, 2, …, n) meets every base row with margin exactly 1.
    let witness: Vec<Rat> = (1..=n as i64).map(|v| Rat::from_integer(v.into())).collect();
    let mut plans = Vec::new();
    search.recurse(0, 0, &mut cons, &mut Vec::new(), &witness, &mut plans)?;
    debug_assert_eq!(cons.len(), base.len());
    Ok(plans
        .into_iter()
        .map(|p| irredundant_core(n, base, p))
        .collect())
}

struct PlanSearch<'a> {
    n: usize,
    t: u64,
    inputs: Vec<usize>,
    sigma: &'a Signature,
}

impl PlanSearch<'_> {
    fn recurse(
        &self,
        idx: usize,
        ones: u64,
        cons: &mut Vec<LinCon>,
        conds: &mut Vec<LinearCondition>,
        witness: &[Rat],
        out: &mut Vec<Vec<LinearCondition>>,
    ) -> Result<()> {
        if ones > self.t || ones + ((self.inputs.len() - idx) as u64) < self.t {
            return Ok(());
        }
        if idx == self.inputs.len() {
            if ones == self.t {
                out.push(conds.clone());
            }
            return Ok(());
        }
        let x = self.inputs[idx];
        let w1 = self.resolve(x, true, cons, witness);
        let w0 = self.resolve(x, false, cons, witness);
        match (w1, w0) {
            (Some(w1), Some(w0)) => {
                for (label, w) in [(true, w1), (false, w0)] {
                    cons.push(self.decision(x, label));
                    conds.push(condition_for(self.sigma, x, label)?);
                    self.recurse(idx + 1, ones + u64::from(label), cons, conds, &w, out)?;
                    conds.pop();
                    cons.pop();
                }
            }
            (Some(w), None) => {
                cons.push(self.decision(x, true));
                self.recurse(idx + 1, ones + 1, cons, conds, &w, out)?;
                cons.pop();
            }
            (None, Some(w)) => {
                cons.push(self.decision(x, false));
                self.recurse(idx + 1, ones, cons, conds, &w, out)?;
                cons.pop();
            }
            (None, None) => {
                return Err(Error::Internal(
                    "both outputs infeasible from a feasible state".into(),
                ));
            }
        }
        Ok(())
    }

    fn decision(&self, x: usize, out: bool) -> LinCon {
        let row = decision_coeffs(self.n, self.sigma, x);
        if out {
            LinCon::ge(row, 1)
        } else {
            LinCon::le(row, -1)
        }
    }

    /// Feasibility certificate for one more decision: reuse or upscale the
    /// parent witness when its dot product already points the right way
    /// (scaling by λ ≥ 1 preserves every margin-1 row), otherwise run the
    /// exact LP.
    fn resolve(
        &self,
        x: usize,
        out: bool,
        cons: &mut Vec<LinCon>,
        witness: &[Rat],
    ) -> Option<Vec<Rat>> {
        let row = decision_coeffs(self.n, self.sigma, x);
        let d = dot(&row, witness);
        let one = Rat::one();
        if out {
            if d >= one {
                return Some(witness.to_vec());
            }
            if d.is_positive() {
                let s = d.recip();
                return Some(witness.iter().map(|v| v * &s).collect());
            }
        } else {
            if d <= -one {
                return Some(witness.to_vec());
            }
            if d.is_negative() {
                let s = -d.recip();
                return Some(witness.iter().map(|v| v * &s).collect());
            }
        }
        cons.push(self.decision(x, out));
        let found = feasible_point(self.n, cons);
        cons.pop();
        found
    }
}

/// Greedy reduction to an irredundant core: drop any condition implied by
/// the rest (plus the sort order). The cell is open and full-dimensional,
/// so the result is its unique facet set.
fn irredundant_core(
    n: usize,
    base: &[LinCon],
    mut conds: Vec<LinearCondition>,
) -> Vec<LinearCondition> {
    loop {
        let mut removed = false;
        let mut i = 0;
        while i < conds.len() {
            let c = conds[i].clone();
            let rest: Vec<LinearCondition> = conds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, cc)| cc.clone())
                .collect();
            if implied(n, base, &rest, &c) {
                conds.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            return conds;
        }
    }
}

/// Chain-shaped merge: at each level exactly one plan is separated from the
/// rest by a single residual '<' condition; it becomes the true-branch
/// leaf and the complement joins the context for the remainder.
fn merge_plans(
    n: usize,
    base: &[LinCon],
    plans: &mut Vec<Plan>,
    context: &mut Vec<LinearCondition>,
) -> Result<TreeNode> {
    if plans.len() == 1 {
        let (sig, conds) = &plans[0];
        if let Some(c) = conds.iter().find(|c| !implied(n, base, context, c)) {
            return Err(Error::Internal(format!(
                "last signature {sig} still has unresolved condition {c}"
            )));
        }
        return Ok(TreeNode::Leaf(sig.clone()));
    }
    let mut picks: Vec<(usize, LinearCondition)> = Vec::new();
    for (i, (_, conds)) in plans.iter().enumerate() {
        let residual: Vec<&LinearCondition> = conds
            .iter()
            .filter(|c| !implied(n, base, context, c))
            .collect();
        if let [single] = residual[..] {
            if single.relation() == Relation::Less {
                picks.push((i, single.clone()));
            }
        }
    }
    let (idx, condition) = match picks.as_slice() {
        [one] => one.clone(),
        other => {
            return Err(Error::Internal(format!(
                "canonical merge expects exactly one single-'<' plan, found {}",
                other.len()
            )));
        }
    };
    let sig = plans[idx].0.clone();
    let mut rest: Vec<Plan> = plans.drain(..).filter(|(s, _)| *s != sig).collect();
    context.push(condition.complement());
    let when_false = merge_plans(n, base, &mut rest, context)?;
    context.pop();
    Ok(TreeNode::Branch {
        condition,
        when_true: Box::new(TreeNode::Leaf(sig)),
        when_false: Box::new(when_false),
    })
}

/// Pattern of the chain construction in subset-mask indexing (bit i of the
/// mask ↔ coordinate i): start from n=2 with only the first unit point
/// mapped to 1, then repeatedly complement-extend; the all-ones point
/// alternates with dimension.
fn chain_proto(n: usize) -> Vec<bool> {
    let mut pat = vec![false, true, false, false];
    for dim in 2..n {
        let full = (1usize << dim) - 1;
        let mut next = pat.clone();
        for x in 0..=full {
            if x == full {
                next.push((dim + 1) % 2 == 1);
            } else {
                next.push(!pat[full ^ x]);
            }
        }
        pat = next;
    }
    pat
}

fn reverse_bits(x: usize, n: usize) -> usize {
    let mut out = 0usize;
    for b in 0..n {
        if (x >> b) & 1 == 1 {
            out |= 1 << (n - 1 - b);
        }
    }
    out
}
