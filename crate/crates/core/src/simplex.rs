//! Dense two-phase primal simplex with Bland's rule.
//!
//! The noncontextual-bound LPs solved here are small (at most a few thousand
//! variables) but heavily degenerate: most right-hand sides are zero. Bland's
//! smallest-index pivoting rule is immune to cycling under degeneracy, at the
//! cost of speed that does not matter at these sizes, and it makes every run
//! bit-for-bit deterministic.
//!
//! Maximization over `x >= 0` subject to rows that are either `<=` or `=`.
//! Phase 1 drives artificial variables for equality (and sign-flipped
//! inequality) rows to zero; phase 2 optimizes the real objective with
//! artificial columns banned.

use crate::error::{Error, Result};

/// Reduced costs smaller than this are treated as optimal.
const COST_TOLERANCE: f64 = 1e-10;
/// Pivot elements smaller than this are treated as zero.
const PIVOT_TOLERANCE: f64 = 1e-9;
/// Phase-1 objective above this means infeasible.
const FEASIBILITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
}

/// One row `coefficients . x <relation> rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective_value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Slack,
    Surplus,
    Artificial,
}

/// Solves the program, returning [`Error::LpInfeasible`] or
/// [`Error::LpUnbounded`] when the geometry says so.
pub fn solve_maximize(program: &LinearProgram) -> Result<LpSolution> {
    let n = program.objective.len();
    let m = program.constraints.len();
    if m == 0 {
        return Err(Error::InvalidInput("LP has no constraints".into()));
    }
    for (i, row) in program.constraints.iter().enumerate() {
        if row.coefficients.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: row.coefficients.len(),
            });
        }
        if !row.rhs.is_finite() || row.coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: i, col: 0 });
        }
    }

    // Normalize every row to rhs >= 0; a flipped `<=` becomes `>=`, which
    // needs a surplus column plus an artificial.
    let mut kinds: Vec<RowKind> = Vec::with_capacity(m);
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m);
    for c in &program.constraints {
        let flip = c.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let coefficients: Vec<f64> = c.coefficients.iter().map(|v| sign * v).collect();
        let rhs = sign * c.rhs;
        let kind = match (c.relation, flip) {
            (Relation::Equal, _) => RowKind::Artificial,
            (Relation::LessEq, false) => RowKind::Slack,
            (Relation::LessEq, true) => RowKind::Surplus,
        };
        kinds.push(kind);
        rows.push((coefficients, rhs));
    }

    let n_slack = kinds
        .iter()
        .filter(|k| matches!(k, RowKind::Slack | RowKind::Surplus))
        .count();
    let n_artificial = kinds
        .iter()
        .filter(|k| matches!(k, RowKind::Artificial | RowKind::Surplus))
        .count();
    let total = n + n_slack + n_artificial;

    // Tableau rows 0..m are constraints; row m is the phase-2 objective
    // (z_j - c_j entries, value in the rhs slot); row m+1 is phase 1.
    let width = total + 1;
    let mut tableau = vec![0.0f64; (m + 2) * width];
    let idx = |r: usize, c: usize| r * width + c;
    let mut basis = vec![usize::MAX; m];
    let first_artificial = n + n_slack;

    let mut slack_cursor = n;
    let mut artificial_cursor = first_artificial;
    for (i, (coefficients, rhs)) in rows.iter().enumerate() {
        for (j, v) in coefficients.iter().enumerate() {
            tableau[idx(i, j)] = *v;
        }
        tableau[idx(i, total)] = *rhs;
        match kinds[i] {
            RowKind::Slack => {
                tableau[idx(i, slack_cursor)] = 1.0;
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            RowKind::Surplus => {
                tableau[idx(i, slack_cursor)] = -1.0;
                slack_cursor += 1;
                tableau[idx(i, artificial_cursor)] = 1.0;
                basis[i] = artificial_cursor;
                artificial_cursor += 1;
            }
            RowKind::Artificial => {
                tableau[idx(i, artificial_cursor)] = 1.0;
                basis[i] = artificial_cursor;
                artificial_cursor += 1;
            }
        }
    }

    // Phase-2 objective row: z_j - c_j with the all-logical starting basis.
    for j in 0..n {
        tableau[idx(m, j)] = -program.objective[j];
    }
    // Phase-1 objective row: minimize the artificial sum, i.e. maximize its
    // negation; price out the rows whose basic variable is artificial.
    for i in 0..m {
        if basis[i] >= first_artificial {
            for j in 0..=total {
                tableau[idx(m + 1, j)] -= tableau[idx(i, j)];
            }
        }
    }
    // Artificial columns themselves price to zero in phase 1.
    for j in first_artificial..total {
        tableau[idx(m + 1, j)] = 0.0;
    }

    let mut pivots = 0usize;
    if n_artificial > 0 {
        run_phase(
            &mut tableau,
            &mut basis,
            m,
            total,
            width,
            m + 1,
            total, // no banned columns in phase 1
            &mut pivots,
        )?;
        let infeasibility = -tableau[idx(m + 1, total)];
        if infeasibility > FEASIBILITY_TOLERANCE {
            return Err(Error::LpInfeasible {
                residual: infeasibility,
            });
        }
        // Pivot any artificial still basic (at zero level) onto a real
        // column; a row with no eligible column is redundant and inert.
        for i in 0..m {
            if basis[i] >= first_artificial {
                if let Some(j) =
                    (0..first_artificial).find(|&j| tableau[idx(i, j)].abs() > PIVOT_TOLERANCE)
                {
                    pivot(&mut tableau, &mut basis, m, total, width, i, j);
                    pivots += 1;
                }
            }
        }
    }

    run_phase(
        &mut tableau,
        &mut basis,
        m,
        total,
        width,
        m,
        first_artificial, // artificial columns are banned in phase 2
        &mut pivots,
    )?;

    let mut x = vec![0.0f64; total];
    for i in 0..m {
        if basis[i] < total {
            x[basis[i]] = tableau[idx(i, total)];
        }
    }
    x.truncate(n);
    Ok(LpSolution {
        objective_value: tableau[idx(m, total)],
        x,
        pivots,
    })
}

/// Runs Bland pivots against the given objective row until optimal.
#[allow(clippy::too_many_arguments)]
fn run_phase(
    tableau: &mut [f64],
    basis: &mut [usize],
    m: usize,
    total: usize,
    width: usize,
    objective_row: usize,
    allowed_columns: usize,
    pivots: &mut usize,
) -> Result<()> {
    let idx = |r: usize, c: usize| r * width + c;
    // Bland's rule terminates in finitely many pivots; the cap is a defence
    // against tolerance-induced stalls on pathological input.
    let cap = 200_000usize;
    for _ in 0..cap {
        // Entering: smallest-index column with an improving reduced cost.
        let mut entering = None;
        for j in 0..allowed_columns {
            if tableau[idx(objective_row, j)] < -COST_TOLERANCE {
                entering = Some(j);
                break;
            }
        }
        let Some(enter) = entering else {
            return Ok(());
        };

        // Leaving: minimum ratio; ties resolved toward the smallest basic
        // variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = tableau[idx(i, enter)];
            if a > PIVOT_TOLERANCE {
                let ratio = tableau[idx(i, total)] / a;
                let better = match leave {
                    None => true,
                    Some((row, best)) => {
                        ratio < best - 1e-12 || (ratio < best + 1e-12 && basis[i] < basis[row])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::LpUnbounded);
        };

        pivot(tableau, basis, m, total, width, row, enter);
        *pivots += 1;
    }
    panic!("simplex failed to terminate within {cap} pivots; numerical stall");
}

fn pivot(
    tableau: &mut [f64],
    basis: &mut [usize],
    m: usize,
    total: usize,
    width: usize,
    row: usize,
    col: usize,
) {
    let idx = |r: usize, c: usize| r * width + c;
    let pivot_value = tableau[idx(row, col)];
    debug_assert!(pivot_value.abs() > 0.0, "zero pivot");
    for j in 0..=total {
        tableau[idx(row, j)] /= pivot_value;
    }
    tableau[idx(row, col)] = 1.0;
    for r in 0..m + 2 {
        if r == row {
            continue;
        }
        let factor = tableau[idx(r, col)];
        if factor == 0.0 {
            continue;
        }
        for j in 0..=total {
            tableau[idx(r, j)] -= factor * tableau[idx(row, j)];
        }
        tableau[idx(r, col)] = 0.0;
    }
    basis[row] = col;
}
