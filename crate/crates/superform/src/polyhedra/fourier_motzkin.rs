//! Exact Fourier-Motzkin elimination over the rationals.
//!
//! The engine works on affine rows `coeffs . x (<=, <, =) rhs` and supports
//! two uses: projecting a system onto a prefix of its variables (used to turn
//! V-representations into H-representations) and deciding feasibility of a
//! mixed strict/non-strict system (used for every polyhedron containment and
//! implication question in `validate`).

use num_bigint::BigInt;
use std::collections::BTreeMap;

use crate::polyalg::Rat;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RowKind {
    /// `coeffs . x <= rhs`
    Le,
    /// `coeffs . x < rhs`
    Lt,
    /// `coeffs . x = rhs`
    Eq,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinRow {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub kind: RowKind,
}

impl LinRow {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat, kind: RowKind) -> Self {
        LinRow { coeffs, rhs, kind }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// True iff the constant row `0 (<=,<,=) rhs` holds.
    fn constant_holds(&self) -> bool {
        match self.kind {
            RowKind::Le => !self.rhs.is_negative(),
            RowKind::Lt => self.rhs.is_positive(),
            RowKind::Eq => self.rhs.is_zero(),
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Projection {
    Feasible(Vec<LinRow>),
    Infeasible,
}

/// Scale to a primitive integer row; inequalities keep their direction
/// (positive factor), equalities are additionally sign-canonicalized.
fn normalize(row: &LinRow) -> LinRow {
    let mut full: Vec<Rat> = row.coeffs.clone();
    full.push(row.rhs.clone());
    let ints: Vec<BigInt> = match row.kind {
        RowKind::Eq => crate::polyalg::linalg_internal::primitive_signed_row(&full),
        _ => crate::polyalg::linalg_internal::primitive_integer_row(&full),
    };
    let mut coeffs: Vec<Rat> = ints.into_iter().map(Rat::from).collect();
    let rhs = coeffs.pop().unwrap();
    LinRow {
        coeffs,
        rhs,
        kind: row.kind,
    }
}

/// Normalize, drop tautologies, merge duplicates, detect constant
/// contradictions. Returns `None` when the system is trivially infeasible.
fn cleanup(rows: Vec<LinRow>) -> Option<Vec<LinRow>> {
    // Keyed by coefficient vector; equalities and inequalities tracked apart.
    let mut ineqs: BTreeMap<Vec<Rat>, (Rat, RowKind)> = BTreeMap::new();
    let mut eqs: BTreeMap<Vec<Rat>, Rat> = BTreeMap::new();
    for row in rows {
        let row = normalize(&row);
        if row.is_constant() {
            if row.constant_holds() {
                continue;
            }
            return None;
        }
        match row.kind {
            RowKind::Eq => {
                if let Some(prev) = eqs.get(&row.coeffs) {
                    if *prev != row.rhs {
                        return None;
                    }
                } else {
                    eqs.insert(row.coeffs, row.rhs);
                }
            }
            kind => {
                match ineqs.get_mut(&row.coeffs) {
                    Some((rhs, prev_kind)) => {
                        // Keep the tighter of the two bounds.
                        if row.rhs < *rhs || (row.rhs == *rhs && kind == RowKind::Lt) {
                            *rhs = row.rhs;
                            *prev_kind = kind;
                        }
                    }
                    None => {
                        ineqs.insert(row.coeffs, (row.rhs, kind));
                    }
                }
            }
        }
    }
    let mut out: Vec<LinRow> = Vec::new();
    for (coeffs, rhs) in eqs {
        out.push(LinRow::new(coeffs, rhs, RowKind::Eq));
    }
    for (coeffs, (rhs, kind)) in ineqs {
        out.push(LinRow::new(coeffs, rhs, kind));
    }
    Some(out)
}

/// Eliminate variable `var` from the system.
fn eliminate(rows: Vec<LinRow>, var: usize) -> Option<Vec<LinRow>> {
    // Prefer Gaussian substitution through an equality containing the
    // variable; only true Fourier-Motzkin combination otherwise.
    if let Some(pos) = rows
        .iter()
        .position(|r| r.kind == RowKind::Eq && !r.coeffs[var].is_zero())
    {
        let eq = rows[pos].clone();
        let pivot = eq.coeffs[var].clone();
        let mut out = Vec::with_capacity(rows.len() - 1);
        for (i, row) in rows.into_iter().enumerate() {
            if i == pos {
                continue;
            }
            if row.coeffs[var].is_zero() {
                out.push(row);
                continue;
            }
            let factor = &row.coeffs[var] / &pivot;
            let coeffs: Vec<Rat> = row
                .coeffs
                .iter()
                .zip(&eq.coeffs)
                .map(|(a, e)| a - &(&factor * e))
                .collect();
            let rhs = &row.rhs - &(&factor * &eq.rhs);
            out.push(LinRow::new(coeffs, rhs, row.kind));
        }
        return cleanup(out);
    }

    let mut pos_rows = Vec::new();
    let mut neg_rows = Vec::new();
    let mut out = Vec::new();
    for row in rows {
        if row.coeffs[var].is_zero() {
            out.push(row);
        } else if row.coeffs[var].is_positive() {
            pos_rows.push(row);
        } else {
            neg_rows.push(row);
        }
    }
    for p in &pos_rows {
        for n in &neg_rows {
            let a = &p.coeffs[var];
            let c = &n.coeffs[var]; // negative
            // (-c) * p + a * n cancels the variable; both scalars positive.
            let pa = -c;
            let na = a.clone();
            let coeffs: Vec<Rat> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(x, y)| &(&pa * x) + &(&na * y))
                .collect();
            let rhs = &(&pa * &p.rhs) + &(&na * &n.rhs);
            let kind = if p.kind == RowKind::Lt || n.kind == RowKind::Lt {
                RowKind::Lt
            } else {
                RowKind::Le
            };
            out.push(LinRow::new(coeffs, rhs, kind));
        }
    }
    cleanup(out)
}

/// Project onto the first `keep` variables, eliminating the rest.
pub fn project(rows: Vec<LinRow>, num_vars: usize, keep: usize) -> Projection {
    let mut rows = match cleanup(rows) {
        Some(r) => r,
        None => return Projection::Infeasible,
    };
    for var in (keep..num_vars).rev() {
        rows = match eliminate(rows, var) {
            Some(r) => r,
            None => return Projection::Infeasible,
        };
        // Drop the eliminated trailing coordinate so cleanup dedupes on the
        // remaining prefix.
        for row in &mut rows {
            debug_assert!(row.coeffs[var].is_zero());
            row.coeffs.truncate(var);
        }
        rows = match cleanup(rows) {
            Some(r) => r,
            None => return Projection::Infeasible,
        };
    }
    Projection::Feasible(rows)
}

/// Exact feasibility of a mixed strict/non-strict system.
pub fn feasible(rows: Vec<LinRow>, num_vars: usize) -> bool {
    matches!(project(rows, num_vars, 0), Projection::Feasible(_))
}

/// Does `system` entail `row` (over the same variables)?
pub fn implies(system: &[LinRow], row: &LinRow, num_vars: usize) -> bool {
    let negations: Vec<LinRow> = match row.kind {
        // not(a.x <= b)  <=>  -a.x < -b
        RowKind::Le => vec![LinRow::new(
            row.coeffs.iter().map(|c| -c).collect(),
            -&row.rhs,
            RowKind::Lt,
        )],
        // not(a.x < b)  <=>  -a.x <= -b
        RowKind::Lt => vec![LinRow::new(
            row.coeffs.iter().map(|c| -c).collect(),
            -&row.rhs,
            RowKind::Le,
        )],
        // An equality is entailed iff both inequalities are.
        RowKind::Eq => {
            let le = LinRow::new(row.coeffs.clone(), row.rhs.clone(), RowKind::Le);
            let ge = LinRow::new(
                row.coeffs.iter().map(|c| -c).collect(),
                -&row.rhs,
                RowKind::Le,
            );
            return implies(system, &le, num_vars) && implies(system, &ge, num_vars);
        }
    };
    for neg in negations {
        let mut rows = system.to_vec();
        rows.push(neg);
        if feasible(rows, num_vars) {
            return false;
        }
    }
    true
}
