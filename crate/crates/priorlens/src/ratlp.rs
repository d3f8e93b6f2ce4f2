//! Exact linear-program feasibility over the rationals: a Phase-1 simplex
//! with Bland's rule on `Ratio<BigInt>` entries. No floating point touches
//! the decision, so separability questions are answered exactly — a "no"
//! is a proof, not a tolerance call.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub(crate) type Rat = Ratio<BigInt>;

/// Direction of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    /// coeffs . x >= rhs
    Ge,
    /// coeffs . x <= rhs
    Le,
}

/// One linear constraint with integer data.
#[derive(Debug, Clone)]
pub(crate) struct LinCon {
    pub coeffs: Vec<i64>,
    pub rel: Rel,
    pub rhs: i64,
}

impl LinCon {
    pub fn ge(coeffs: Vec<i64>, rhs: i64) -> LinCon {
        LinCon { coeffs, rel: Rel::Ge, rhs }
    }

    pub fn le(coeffs: Vec<i64>, rhs: i64) -> LinCon {
        LinCon { coeffs, rel: Rel::Le, rhs }
    }

    /// Exact check of a rational point against this constraint.
    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        let rhs = Rat::from(BigInt::from(self.rhs));
        match self.rel {
            Rel::Ge => lhs >= rhs,
            Rel::Le => lhs <= rhs,
        }
    }
}

/// Exact dot product of integer coefficients with a rational point.
pub(crate) fn dot(coeffs: &[i64], x: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (c, v) in coeffs.iter().zip(x) {
        if *c != 0 {
            acc += v * Rat::from(BigInt::from(*c));
        }
    }
    acc
}

/// Finds a rational point satisfying every constraint, or proves there is
/// none. Free variables are split into nonnegative pairs; feasibility is
/// decided by minimizing the sum of artificial variables with Bland's rule,
/// which cannot cycle.
pub(crate) fn feasible_point(nvars: usize, cons: &[LinCon]) -> Option<Vec<Rat>> {
    if cons.is_empty() {
        return Some(vec![Rat::zero(); nvars]);
    }
    let m = cons.len();
    // Column layout: [x+ 0..n) [x- n..2n) [slack 2n..2n+m) [artificials...].
    let nslack_base = 2 * nvars;
    let mut ncols = nslack_base + m;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_rows: Vec<usize> = Vec::new();

    for (i, con) in cons.iter().enumerate() {
        assert_eq!(con.coeffs.len(), nvars, "constraint arity mismatch");
        // Normalize to <= then to nonnegative right-hand side.
        let flip_le = if con.rel == Rel::Ge { -1i64 } else { 1i64 };
        let mut b = BigInt::from(flip_le * con.rhs);
        let negate_row = b.is_negative();
        let sign = if negate_row { -flip_le } else { flip_le };
        if negate_row {
            b = -b;
        }
        let mut row = vec![Rat::zero(); ncols];
        for (j, &c) in con.coeffs.iter().enumerate() {
            if c != 0 {
                let v = Rat::from(BigInt::from(sign * c));
                row[j] = v.clone();
                row[nvars + j] = -v;
            }
        }
        row[nslack_base + i] = Rat::from(BigInt::from(if negate_row { -1i64 } else { 1 }));
        if negate_row {
            // Slack entered with -1; an artificial carries the basis.
            art_rows.push(i);
            basis.push(usize::MAX); // patched below once artificial columns exist
        } else {
            basis.push(nslack_base + i);
        }
        rows.push(row);
        rhs.push(Rat::from(b));
    }

    // Append one artificial column per negative-rhs row.
    let nart = art_rows.len();
    let art_start = ncols;
    ncols += nart;
    for row in rows.iter_mut() {
        row.resize(ncols, Rat::zero());
    }
    for (k, &i) in art_rows.iter().enumerate() {
        rows[i][art_start + k] = Rat::from(BigInt::from(1));
        basis[i] = art_start + k;
    }
    if nart == 0 {
        // The origin (all decision variables zero, slacks basic) satisfies
        // everything already.
        return Some(extract(nvars, &basis, &rhs));
    }

    // Phase-1 objective: minimize the artificial sum. Reduced costs start
    // as -sum of artificial rows (artificial columns themselves have
    // reduced cost 0).
    let mut red = vec![Rat::zero(); ncols];
    let mut z = Rat::zero();
    for &i in &art_rows {
        for j in 0..ncols {
            if !rows[i][j].is_zero() {
                red[j] -= rows[i][j].clone();
            }
        }
        z += rhs[i].clone();
    }
    for k in 0..nart {
        red[art_start + k] = Rat::zero();
    }

    loop {
        // Bland: entering column is the smallest index with negative
        // reduced cost.
        let Some(enter) = (0..ncols).find(|&j| red[j].is_negative()) else {
            break;
        };
        // Ratio test; ties broken by smallest basic variable index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if rows[i][enter].is_positive() {
                let ratio = &rhs[i] / &rows[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b
                                && basis[i] < basis[leave.expect("best implies leave")])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Phase 1 is bounded below by zero; no leaving row means a
            // broken tableau.
            debug_assert!(false, "phase-1 simplex claims unboundedness");
            return None;
        };
        // Pivot at (r, enter).
        let p = rows[r][enter].clone();
        for v in rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= p.clone();
            }
        }
        rhs[r] /= p.clone();
        for i in 0..m {
            if i != r && !rows[i][enter].is_zero() {
                let f = rows[i][enter].clone();
                for j in 0..ncols {
                    if !rows[r][j].is_zero() {
                        let delta = &f * &rows[r][j];
                        rows[i][j] -= delta;
                    }
                }
                let delta = &f * &rhs[r];
                rhs[i] -= delta;
            }
        }
        if !red[enter].is_zero() {
            let f = red[enter].clone();
            for j in 0..ncols {
                if !rows[r][j].is_zero() {
                    let delta = &f * &rows[r][j];
                    red[j] -= delta;
                }
            }
            // Objective moves by r_enter * theta (negative times a
            // nonnegative step), driving the artificial sum toward zero.
            let delta = &f * &rhs[r];
            z += delta;
        }
        basis[r] = enter;
    }

    if z.is_zero() {
        Some(extract(nvars, &basis, &rhs))
    } else {
        None
    }
}

/// Reads x = x+ - x- off the basic solution.
fn extract(nvars: usize, basis: &[usize], rhs: &[Rat]) -> Vec<Rat> {
    let mut x = vec![Rat::zero(); nvars];
    for (i, &col) in basis.iter().enumerate() {
        if col < nvars {
            x[col] += rhs[i].clone();
        } else if col < 2 * nvars {
            x[col - nvars] -= rhs[i].clone();
        }
    }
    x
}
