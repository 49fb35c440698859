//! Dense two-phase simplex for small linear programs.
//!
//! Solves `min c^T x` subject to row constraints and `x >= 0`. Meant for
//! problems with at most a few hundred variables.

use super::DistError;

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        LinearProgram {
            n_vars: objective.len(),
            objective,
            rows: Vec::new(),
        }
    }

    /// Adds `sum coeffs[j] x_j  cmp  rhs`, given as sparse `(j, coeff)` pairs.
    pub fn constrain(&mut self, coeffs: &[(usize, f64)], cmp: Cmp, rhs: f64) {
        let mut row = vec![0.0; self.n_vars];
        for &(j, a) in coeffs {
            row[j] += a;
        }
        self.rows.push((row, cmp, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, DistError> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize,
    first_art: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let n_slack = lp.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = lp
            .rows
            .iter()
            .filter(|r| {
                let flip = r.2 < 0.0;
                match r.1 {
                    Cmp::Le => flip,
                    Cmp::Ge => !flip,
                    Cmp::Eq => true,
                }
            })
            .count();
        let cols = n + n_slack + n_art;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut art = n + n_slack;
        for (i, (row, cmp, rhs)) in lp.rows.iter().enumerate() {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let r = &mut a[i * width..(i + 1) * width];
            for j in 0..n {
                r[j] = sign * row[j];
            }
            r[cols] = sign * rhs;
            let cmp = match (cmp, sign < 0.0) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (c, _) => *c,
            };
            match cmp {
                Cmp::Le => {
                    r[slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Cmp::Ge => {
                    r[slack] = -1.0;
                    slack += 1;
                    r[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    r[art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Tableau {
            m,
            width,
            a,
            basis,
            n_struct: n,
            first_art: n + n_slack,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.a[r * w + c];
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.a[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                let row = &mut self.a[i * w..(i + 1) * w];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `< allowed`; returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool, DistError> {
        let w = self.width;
        let mut degenerate = 0usize;
        for _ in 0..50_000 {
            // reduced costs
            let mut best = None;
            let mut best_val = -EPS;
            let bland = degenerate > 50;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for i in 0..self.m {
                    let a = self.a[i * w + j];
                    if a != 0.0 {
                        rc -= cost[self.basis[i]] * a;
                    }
                }
                if rc < best_val {
                    best = Some(j);
                    if bland {
                        break;
                    }
                    best_val = rc;
                }
            }
            let Some(c) = best else { return Ok(true) };
            let mut row = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.a[i * w + c];
                if a > EPS {
                    let t = self.rhs(i) / a;
                    let better = match row {
                        None => true,
                        Some(r) => t < ratio - 1e-14 || (t <= ratio + 1e-14 && self.basis[i] < self.basis[r]),
                    };
                    if better {
                        ratio = t;
                        row = Some(i);
                    }
                }
            }
            let Some(r) = row else { return Ok(false) };
            if ratio <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
        Err(DistError::Lp("iteration limit"))
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, DistError> {
        let cols = self.width - 1;
        if self.first_art < cols {
            let mut cost = vec![0.0; cols];
            for c in cost.iter_mut().skip(self.first_art) {
                *c = 1.0;
            }
            self.optimize(&cost, cols)?;
            let infeas: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_art)
                .map(|i| self.rhs(i))
                .sum();
            if infeas > 1e-9 {
                return Err(DistError::Lp("infeasible"));
            }
            // drive remaining artificials out of the basis
            for i in 0..self.m {
                if self.basis[i] >= self.first_art {
                    let w = self.width;
                    if let Some(c) = (0..self.first_art).find(|&j| self.a[i * w + j].abs() > 1e-9) {
                        self.pivot(i, c);
                    }
                }
            }
        }
        let mut cost = vec![0.0; cols];
        cost[..self.n_struct].copy_from_slice(&lp.objective);
        // rows still held by an artificial are redundant; zero cost keeps them inert
        if !self.optimize(&cost, self.first_art)? {
            return Err(DistError::Lp("unbounded"));
        }
        let mut x = vec![0.0; self.n_struct];
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.rhs(i);
            }
        }
        let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { value, x })
    }
}

/// Minimum of `sum |w_k - s_k v_k|` over non-negative `v` with
/// `v_{k+1} <= v_k` and `sum s_k v_k = 1`, solved as an explicit LP.
///
/// Returns the l1 objective and the optimal `v`.
pub fn monotone_fit_lp(w: &[f64], s: &[f64]) -> Result<(f64, Vec<f64>), DistError> {
    let l = w.len();
    // variables: v_0..v_{l-1}, e_0..e_{l-1}
    let mut obj = vec![0.0; 2 * l];
    for e in obj.iter_mut().skip(l) {
        *e = 1.0;
    }
    let mut lp = LinearProgram::minimize(obj);
    for k in 0..l {
        lp.constrain(&[(l + k, 1.0), (k, s[k])], Cmp::Ge, w[k]);
        lp.constrain(&[(l + k, 1.0), (k, -s[k])], Cmp::Ge, -w[k]);
        if k + 1 < l {
            lp.constrain(&[(k, 1.0), (k + 1, -1.0)], Cmp::Ge, 0.0);
        }
    }
    let sum: Vec<(usize, f64)> = (0..l).map(|k| (k, s[k])).collect();
    lp.constrain(&sum, Cmp::Eq, 1.0);
    let sol = lp.solve()?;
    Ok((sol.value, sol.x[..l].to_vec()))
}

/// Minimum of `sum |q_k - q'_k|` over pmfs `q'` with `q'_{k+1} <= caps[k] q'_k`.
pub fn growth_fit_lp(q: &[f64], caps: &[f64]) -> Result<(f64, Vec<f64>), DistError> {
    let l = q.len();
    let mut obj = vec![0.0; 2 * l];
    for e in obj.iter_mut().skip(l) {
        *e = 1.0;
    }
    let mut lp = LinearProgram::minimize(obj);
    for k in 0..l {
        lp.constrain(&[(l + k, 1.0), (k, 1.0)], Cmp::Ge, q[k]);
        lp.constrain(&[(l + k, 1.0), (k, -1.0)], Cmp::Ge, -q[k]);
        if k + 1 < l {
            lp.constrain(&[(k, caps[k]), (k + 1, -1.0)], Cmp::Ge, 0.0);
        }
    }
    let sum: Vec<(usize, f64)> = (0..l).map(|k| (k, 1.0)).collect();
    lp.constrain(&sum, Cmp::Eq, 1.0);
    let sol = lp.solve()?;
    Ok((sol.value, sol.x[..l].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::minimize(vec![-3.0, -5.0]);
        lp.constrain(&[(0, 1.0)], Cmp::Le, 4.0);
        lp.constrain(&[(1, 2.0)], Cmp::Le, 12.0);
        lp.constrain(&[(0, 3.0), (1, 2.0)], Cmp::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_infeasible() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.constrain(&[(0, 1.0), (1, 1.0)], Cmp::Eq, 2.0);
        lp.constrain(&[(0, 1.0)], Cmp::Ge, 0.5);
        let s = lp.solve().unwrap();
        assert!((s.value - 2.0).abs() < 1e-9);

        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.constrain(&[(0, 1.0)], Cmp::Le, 1.0);
        lp.constrain(&[(0, 1.0)], Cmp::Ge, 2.0);
        assert!(lp.solve().is_err());
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.constrain(&[(0, 1.0)], Cmp::Ge, 1.0);
        assert!(lp.solve().is_err());
    }

    #[test]
    fn two_point_monotone_fit() {
        let (v, x) = monotone_fit_lp(&[0.2, 0.8], &[1.0, 1.0]).unwrap();
        assert!((v - 0.6).abs() < 1e-9);
        assert!((x[0] - x[1]).abs() < 1e-9);
    }
}
