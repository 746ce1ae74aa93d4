//! Dense two-phase simplex over the rationals with Bland's rule.
//!
//! Problems are stated as `maximize c.x` subject to rows `a.x (<=|>=|=) b`, each variable
//! either free or nonnegative. Every outcome carries a certificate that can be checked
//! independently: optimal duals, or a Farkas vector for infeasibility.

use num::{One, Signed, Zero};

use crate::linalg::{dot, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub cmp: Cmp,
    pub rhs: Q,
}

#[derive(Clone, Debug)]
pub struct Lp {
    pub n_vars: usize,
    pub free: Vec<bool>,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// `duals[i]` is the multiplier of constraint i: >= 0 for `Le`, <= 0 for `Ge`.
    Optimal { x: Vec<Q>, value: Q, duals: Vec<Q> },
    /// Multipliers with the same sign convention proving the rows inconsistent.
    Infeasible { farkas: Vec<Q> },
    Unbounded,
}

impl Lp {
    pub fn new(n_vars: usize) -> Self {
        Lp { n_vars, free: vec![false; n_vars], objective: vec![Q::zero(); n_vars], constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Q>, cmp: Cmp, rhs: Q) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    fn multiplier_signs_ok(&self, y: &[Q]) -> bool {
        self.constraints.iter().zip(y).all(|(c, yi)| match c.cmp {
            Cmp::Le => !yi.is_negative(),
            Cmp::Ge => !yi.is_positive(),
            Cmp::Eq => true,
        })
    }

    fn combined_row(&self, y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.n_vars];
        for (c, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&c.coeffs) {
                if !a.is_zero() {
                    *o += yi * a;
                }
            }
        }
        out
    }

    /// Checks that `y` is dual feasible with objective `value` (so `value` bounds the optimum).
    pub fn verify_dual_bound(&self, y: &[Q], value: &Q) -> bool {
        if y.len() != self.constraints.len() || !self.multiplier_signs_ok(y) {
            return false;
        }
        let ya = self.combined_row(y);
        let feasible = (0..self.n_vars).all(|j| {
            if self.free[j] {
                ya[j] == self.objective[j]
            } else {
                ya[j] >= self.objective[j]
            }
        });
        let yb: Q = self.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
        feasible && &yb == value
    }

    pub fn verify_farkas(&self, y: &[Q]) -> bool {
        if y.len() != self.constraints.len() || !self.multiplier_signs_ok(y) {
            return false;
        }
        let ya = self.combined_row(y);
        let ok = (0..self.n_vars).all(|j| if self.free[j] { ya[j].is_zero() } else { !ya[j].is_negative() });
        let yb: Q = self.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
        ok && yb.is_negative()
    }

    pub fn is_feasible_point(&self, x: &[Q]) -> bool {
        x.len() == self.n_vars
            && (0..self.n_vars).all(|j| self.free[j] || !x[j].is_negative())
            && self.constraints.iter().all(|c| {
                let v = dot(&c.coeffs, x);
                match c.cmp {
                    Cmp::Le => v <= c.rhs,
                    Cmp::Ge => v >= c.rhs,
                    Cmp::Eq => v == c.rhs,
                }
            })
    }

    pub fn solve(&self) -> LpOutcome {
        Simplex::build(self).run(self)
    }
}

struct Simplex {
    m: usize,
    /// Number of structural + slack columns; artificials follow.
    n_real: usize,
    tab: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    flip: Vec<bool>,
    /// For each original variable, its (plus, minus) column.
    var_cols: Vec<(usize, Option<usize>)>,
    costs: Vec<Q>,
}

impl Simplex {
    fn build(lp: &Lp) -> Simplex {
        let m = lp.constraints.len();
        let mut var_cols = Vec::new();
        let mut col = 0;
        for j in 0..lp.n_vars {
            if lp.free[j] {
                var_cols.push((col, Some(col + 1)));
                col += 2;
            } else {
                var_cols.push((col, None));
                col += 1;
            }
        }
        let mut slack_col = vec![None; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            if c.cmp != Cmp::Eq {
                slack_col[i] = Some(col);
                col += 1;
            }
        }
        let n_real = col;
        let total = n_real + m;
        let mut tab = vec![vec![Q::zero(); total]; m];
        let mut rhs = vec![Q::zero(); m];
        let mut flip = vec![false; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (p, n) = var_cols[j];
                tab[i][p] = a.clone();
                if let Some(n) = n {
                    tab[i][n] = -a.clone();
                }
            }
            if let Some(s) = slack_col[i] {
                tab[i][s] = if c.cmp == Cmp::Le { Q::one() } else { -Q::one() };
            }
            rhs[i] = c.rhs.clone();
            if rhs[i].is_negative() {
                flip[i] = true;
                rhs[i] = -rhs[i].clone();
                for v in tab[i].iter_mut() {
                    *v = -v.clone();
                }
            }
            tab[i][n_real + i] = Q::one();
        }
        let mut costs = vec![Q::zero(); total];
        for (j, cj) in lp.objective.iter().enumerate() {
            let (p, n) = var_cols[j];
            costs[p] = cj.clone();
            if let Some(n) = n {
                costs[n] = -cj.clone();
            }
        }
        Simplex { m, n_real, tab, rhs, basis: (n_real..n_real + m).collect(), flip, var_cols, costs }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.tab[r][c].recip();
        for v in self.tab[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let prow = self.tab[r].clone();
        let pr = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.m {
            if i == r || self.tab[i][c].is_zero() {
                continue;
            }
            let f = self.tab[i][c].clone();
            for &j in &nz {
                let t = &f * &prow[j];
                self.tab[i][j] -= t;
            }
            let t = &f * &pr;
            self.rhs[i] -= t;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, costs: &[Q], j: usize) -> Q {
        let mut z = costs[j].clone();
        for i in 0..self.m {
            let cb = &costs[self.basis[i]];
            if !cb.is_zero() && !self.tab[i][j].is_zero() {
                z -= cb * &self.tab[i][j];
            }
        }
        z
    }

    /// Maximizes `costs` over the current basis; columns >= `allowed` never enter.
    fn optimize(&mut self, costs: &[Q], allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.reduced_cost(costs, j).is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.m {
                let a = &self.tab[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, enter);
        }
    }

    /// y = c_B^T B^{-1}, read off the artificial columns, mapped to original row orientation.
    fn duals(&self, costs: &[Q]) -> Vec<Q> {
        (0..self.m)
            .map(|i| {
                let mut y = Q::zero();
                for k in 0..self.m {
                    let cb = &costs[self.basis[k]];
                    if !cb.is_zero() {
                        y += cb * &self.tab[k][self.n_real + i];
                    }
                }
                if self.flip[i] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn run(mut self, lp: &Lp) -> LpOutcome {
        let total = self.n_real + self.m;
        let mut phase1 = vec![Q::zero(); total];
        for c in phase1.iter_mut().skip(self.n_real) {
            *c = -Q::one();
        }
        self.optimize(&phase1, total);
        let infeas: Q = (0..self.m).filter(|&i| self.basis[i] >= self.n_real).map(|i| self.rhs[i].clone()).sum();
        if infeas.is_positive() {
            // Phase-one duals satisfy A^T y >= 0 and b.y = -infeasibility < 0.
            return LpOutcome::Infeasible { farkas: self.duals(&phase1) };
        }
        for r in 0..self.m {
            if self.basis[r] >= self.n_real {
                if let Some(c) = (0..self.n_real).find(|&j| !self.tab[r][j].is_zero()) {
                    self.pivot(r, c);
                }
            }
        }
        let costs = self.costs.clone();
        if !self.optimize(&costs, self.n_real) {
            return LpOutcome::Unbounded;
        }
        let mut colval = vec![Q::zero(); total];
        for i in 0..self.m {
            colval[self.basis[i]] = self.rhs[i].clone();
        }
        let x: Vec<Q> = self
            .var_cols
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => &colval[p] - &colval[n],
                None => colval[p].clone(),
            })
            .collect();
        let value = dot(&lp.objective, &x);
        let duals = self.duals(&costs);
        LpOutcome::Optimal { x, value, duals }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};

    #[test]
    fn small_optimum_with_certificate() {
        // max x + y, x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> (8/5, 6/5), value 14/5
        let mut lp = Lp::new(2);
        lp.objective = vec![q(1), q(1)];
        lp.add(vec![q(1), q(2)], Cmp::Le, q(4));
        lp.add(vec![q(3), q(1)], Cmp::Le, q(6));
        match lp.solve() {
            LpOutcome::Optimal { x, value, duals } => {
                assert_eq!(x, vec![qf(8, 5), qf(6, 5)]);
                assert_eq!(value, qf(14, 5));
                assert!(lp.verify_dual_bound(&duals, &value));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // max t, phi free, phi = 1, 2 - phi >= t, t <= 1 -> t = 1
        let mut lp = Lp::new(2);
        lp.free = vec![true, true];
        lp.objective = vec![q(0), q(1)];
        lp.add(vec![q(1), q(0)], Cmp::Eq, q(1));
        lp.add(vec![q(-1), q(-1)], Cmp::Ge, q(-2));
        lp.add(vec![q(0), q(1)], Cmp::Le, q(1));
        match lp.solve() {
            LpOutcome::Optimal { value, duals, .. } => {
                assert_eq!(value, q(1));
                assert!(lp.verify_dual_bound(&duals, &value));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn infeasible_has_farkas() {
        let mut lp = Lp::new(1);
        lp.add(vec![q(1)], Cmp::Ge, q(2));
        lp.add(vec![q(1)], Cmp::Le, q(1));
        match lp.solve() {
            LpOutcome::Infeasible { farkas } => assert!(lp.verify_farkas(&farkas)),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = Lp::new(1);
        lp.objective = vec![q(1)];
        lp.add(vec![q(1)], Cmp::Ge, q(0));
        assert!(matches!(lp.solve(), LpOutcome::Unbounded));
    }
}
