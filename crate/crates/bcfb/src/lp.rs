//! Dense two-phase simplex for the small programs behind redundancy removal.
//!
//! Solves `max c·x  s.t.  A x ≤ b` with `x` free. Bland's rule keeps it
//! cycle-free; sizes here are a few dozen rows, so a dense tableau is fine.

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Unbounded,
    Infeasible,
}

const PIV: f64 = 1e-11;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `cost·z`; last entry is the objective value.
    fn objective_row(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = cost.iter().map(|c| -c).collect();
        obj.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o += cb * v;
                }
            }
        }
        obj
    }

    /// Runs simplex iterations; returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs = self.ncols;
        loop {
            let obj = self.objective_row(cost);
            let enter = (0..self.ncols).find(|&j| allowed(j) && obj[j] < -1e-10);
            let Some(c) = enter else { return true };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > PIV {
                    let ratio = row[rhs] / row[c];
                    match best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi]) {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Maximizes `c·x` subject to `a x ≤ b` over free `x`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let neg: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let art0 = 2 * n + m;
    let ncols = art0 + neg.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut k = 0;
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for j in 0..n {
            row[j] = s * a[i][j];
            row[n + j] = -s * a[i][j];
        }
        row[2 * n + i] = s;
        row[ncols] = s * b[i];
        if s < 0.0 {
            row[art0 + k] = 1.0;
            basis.push(art0 + k);
            k += 1;
        } else {
            basis.push(2 * n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };
    let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    if !neg.is_empty() {
        let mut cost = vec![0.0; ncols];
        cost[art0..].iter_mut().for_each(|v| *v = -1.0);
        t.optimize(&cost, &|_| true);
        let value = t.objective_row(&cost)[ncols];
        if value < -1e-9 * scale {
            return LpOutcome::Infeasible;
        }
        for r in 0..m {
            if t.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&j| t.rows[r][j].abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        cost[j] = c[j];
        cost[n + j] = -c[j];
    }
    if !t.optimize(&cost, &|j| j < art0) {
        return LpOutcome::Unbounded;
    }
    let mut z = vec![0.0; ncols];
    for (r, &bv) in t.basis.iter().enumerate() {
        z[bv] = t.rows[r][ncols];
    }
    let x: Vec<f64> = (0..n).map(|j| z[j] - z[n + j]).collect();
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, x }
}

/// True iff `a x ≤ b` has a solution.
pub fn feasible(a: &[Vec<f64>], b: &[f64], nvars: usize) -> bool {
    !matches!(maximize(&vec![0.0; nvars], a, b), LpOutcome::Infeasible)
}
