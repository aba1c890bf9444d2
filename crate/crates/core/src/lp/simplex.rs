//! Two-phase dense tableau simplex over arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LinearProgram;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SimplexConfig {
    pub max_iterations: usize,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub objective: BigRational,
    /// One value per LP variable.
    pub values: Vec<BigRational>,
    pub iterations: usize,
}

const BLAND_AFTER: usize = 32;

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Clone)]
struct Tableau {
    rows: Vec<Vec<BigRational>>,
    /// Reduced costs, with the negated objective value in the last slot.
    cost: Vec<BigRational>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    allowed: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
        }
        let support: Vec<usize> = (0..=w).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &support {
                let d = &f * &pivot_row[j];
                row[j] -= d;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Pivots until the cost row is nonnegative. Entering columns follow
    /// Dantzig's rule; after a run of degenerate pivots Bland's rule takes
    /// over until the objective moves again, which rules out cycling.
    fn optimize(&mut self) -> Result<()> {
        let w = self.width();
        let mut degenerate = 0usize;
        loop {
            let entering = if degenerate >= BLAND_AFTER {
                (0..w).find(|&j| self.allowed[j] && self.cost[j].is_negative())
            } else {
                (0..w)
                    .filter(|&j| self.allowed[j] && self.cost[j].is_negative())
                    .min_by(|&a, &b| self.cost[a].cmp(&self.cost[b]))
            };
            let Some(c) = entering else {
                return Ok(());
            };
            if self.iterations >= self.max_iterations {
                return Err(Error::Aborted(format!(
                    "simplex iteration cap {} reached",
                    self.max_iterations
                )));
            }
            let mut best: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = best else {
                return Err(Error::Unbounded);
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
            self.iterations += 1;
        }
    }

    fn set_costs(&mut self, costs: &[BigRational]) {
        let w = self.width();
        let mut cost: Vec<BigRational> = costs.to_vec();
        cost.push(BigRational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    cost[j] -= cb * &row[j];
                }
            }
        }
        self.cost = cost;
    }

    /// Tries to reach a feasible basis without a phase 1: the artificial rows
    /// are pivoted onto structural columns by plain elimination, then a single
    /// pivot repairs the slack rows if one column can absorb every negative
    /// right-hand side. Returns false if that does not give a feasible basis.
    fn crash(&mut self, art0: usize) -> bool {
        let w = self.width();
        let mut basic = vec![false; w];
        for &b in &self.basis {
            basic[b] = true;
        }
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < art0 {
                i += 1;
                continue;
            }
            let row = &self.rows[i];
            let pick = (0..art0)
                .find(|&j| !basic[j] && row[j].is_positive())
                .or_else(|| (0..art0).find(|&j| !basic[j] && !row[j].is_zero()));
            match pick {
                Some(j) => {
                    basic[self.basis[i]] = false;
                    basic[j] = true;
                    self.pivot(i, j);
                    i += 1;
                }
                None if row[w].is_zero() => {
                    basic[self.basis[i]] = false;
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
                None => return false,
            }
        }
        let negative: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i][w].is_negative())
            .collect();
        let Some(&r) = negative
            .iter()
            .min_by(|&&a, &&b| self.rows[a][w].cmp(&self.rows[b][w]))
        else {
            return true;
        };
        let repair = (0..art0).find(|&c| {
            if basic[c] || !self.rows[r][c].is_negative() {
                return false;
            }
            let step = &self.rows[r][w] / &self.rows[r][c];
            self.rows
                .iter()
                .all(|row| row[c].is_zero() || !(&row[w] - &row[c] * &step).is_negative())
        });
        match repair {
            Some(c) => {
                self.pivot(r, c);
                true
            }
            None => false,
        }
    }
}

/// Exact optimum of `minimize v` for the given program.
pub fn solve_exact(lp: &LinearProgram, cfg: &SimplexConfig) -> Result<LpSolution> {
    let nv = lp.num_variables();
    let ni = lp.inequalities.len();
    let art0 = nv + ni;
    let zero = BigRational::zero();

    // rows lacking a slack usable as an initial basic variable get an artificial
    let all: Vec<&super::Row> = lp.inequalities.iter().chain(&lp.equalities).collect();
    let needs: Vec<usize> = (0..all.len())
        .filter(|&k| k >= ni || all[k].rhs < 0)
        .collect();
    let w_art = art0 + needs.len();

    let mut rows = Vec::with_capacity(all.len());
    let mut basis = Vec::with_capacity(all.len());
    for (k, row) in all.iter().enumerate() {
        let mut r = vec![zero.clone(); w_art + 1];
        let sign = if row.rhs < 0 { -1 } else { 1 };
        for &(j, c) in &row.terms {
            if j as usize >= nv {
                return Err(Error::InvalidArgument(format!(
                    "row {} references variable {j} of {nv}",
                    row.name
                )));
            }
            r[j as usize] += rat(sign * c as i64);
        }
        r[w_art] = rat(sign * row.rhs);
        if k < ni {
            r[nv + k] = rat(sign);
        }
        match needs.binary_search(&k) {
            Ok(a) => {
                r[art0 + a] = BigRational::one();
                basis.push(art0 + a);
            }
            Err(_) => basis.push(nv + k),
        }
        rows.push(r);
    }

    let mut t = Tableau {
        rows,
        cost: vec![zero.clone(); w_art + 1],
        basis,
        allowed: vec![true; w_art],
        iterations: 0,
        max_iterations: cfg.max_iterations,
    };

    let mut crashed = t.clone();
    if crashed.crash(art0) {
        t = crashed;
    } else {
        // phase 1: minimize the sum of the artificials
        let mut c1 = vec![zero.clone(); w_art];
        for c in c1.iter_mut().skip(art0) {
            *c = BigRational::one();
        }
        t.set_costs(&c1);
        t.optimize()?;
        if !t.cost[w_art].is_zero() {
            return Err(Error::Infeasible);
        }
    }
    for j in art0..w_art {
        t.allowed[j] = false;
    }
    // drive remaining (zero-level) artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= art0 {
            match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    // redundant row
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase 2: minimize v
    let mut c2 = vec![zero.clone(); w_art];
    c2[lp.objective] = BigRational::one();
    t.set_costs(&c2);
    t.optimize()?;

    let mut values = vec![zero.clone(); nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            values[b] = t.rows[i][w_art].clone();
        }
    }
    Ok(LpSolution {
        objective: -t.cost[w_art].clone(),
        values,
        iterations: t.iterations,
    })
}

/// Checks nonnegativity and every row of `lp` exactly at `x`.
pub fn check_feasible(lp: &LinearProgram, x: &[BigRational]) -> std::result::Result<(), String> {
    if x.len() != lp.num_variables() {
        return Err(format!(
            "expected {} values, got {}",
            lp.num_variables(),
            x.len()
        ));
    }
    if let Some(j) = x.iter().position(|v| v.is_negative()) {
        return Err(format!("{} is negative", lp.variables[j]));
    }
    let lhs = |terms: &[(u32, i32)]| -> BigRational {
        terms.iter().fold(BigRational::zero(), |acc, &(j, c)| {
            acc + rat(c as i64) * &x[j as usize]
        })
    };
    for row in &lp.inequalities {
        if lhs(&row.terms) > rat(row.rhs) {
            return Err(format!("inequality {} violated", row.name));
        }
    }
    for row in &lp.equalities {
        if lhs(&row.terms) != rat(row.rhs) {
            return Err(format!("equality {} violated", row.name));
        }
    }
    Ok(())
}
