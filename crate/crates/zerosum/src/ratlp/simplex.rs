//! Tableau internals.
//!
//! The public interface is rational, but the tableau is kept as an integer
//! matrix `t` with one positive denominator `den`; the true tableau is
//! `t / den`. A pivot on (r, c) leaves row r as is, rewrites every other row
//! i as `(t[r][c] * t[i] - t[i][c] * t[r]) / den`, and sets `den = |t[r][c]|`
//! (negating the whole tableau when the pivot element is negative, which only
//! happens on degenerate value-zero pivots). Since `den` always equals |det|
//! of the current basis, `den * basis_inverse` is an integer matrix and every
//! division above is exact. This keeps gcd reduction out of the inner loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LinearProgram, LpOutcome, MatrixGameSolution, Rational, Relation, Sense};

/// Mapping from one internal nonnegative column back to an original variable.
enum ColMap {
    /// x = lower + u
    Shift { var: usize, lower: Rational },
    /// x = upper - u
    Mirror { var: usize, upper: Rational },
    /// Positive half of a free variable: x = u_pos - u_neg.
    SplitPos { var: usize },
    /// Negative half of a free variable.
    SplitNeg { var: usize },
}

impl ColMap {
    fn var(&self) -> usize {
        match *self {
            ColMap::Shift { var, .. }
            | ColMap::Mirror { var, .. }
            | ColMap::SplitPos { var }
            | ColMap::SplitNeg { var } => var,
        }
    }

    /// Sign the original objective/constraint coefficient picks up on this
    /// column.
    fn sign(&self) -> i8 {
        match self {
            ColMap::Shift { .. } | ColMap::SplitPos { .. } => 1,
            ColMap::Mirror { .. } | ColMap::SplitNeg { .. } => -1,
        }
    }
}

struct Tableau {
    /// Row 0 is the objective row; rows 1..=m are constraints. The last
    /// column is the right-hand side.
    t: Vec<Vec<BigInt>>,
    /// Positive common denominator of the whole tableau.
    den: BigInt,
    /// Basic column of constraint row i+1.
    basis: Vec<usize>,
}

enum PrimalEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn rhs_col(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, prow: usize, pcol: usize) {
        let piv_row = self.t[prow].clone();
        let piv = piv_row[pcol].clone();
        debug_assert!(!piv.is_zero());
        let width = piv_row.len();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == prow {
                continue;
            }
            let factor = row[pcol].clone();
            for j in 0..width {
                if j == pcol {
                    row[j] = BigInt::zero();
                    continue;
                }
                let num = if factor.is_zero() {
                    if row[j].is_zero() {
                        continue;
                    }
                    &piv * &row[j]
                } else if row[j].is_zero() {
                    if piv_row[j].is_zero() {
                        continue;
                    }
                    -(&factor * &piv_row[j])
                } else {
                    &piv * &row[j] - &factor * &piv_row[j]
                };
                row[j] = exact_div(num, &self.den);
            }
        }
        self.basis[prow - 1] = pcol;
        if piv.is_negative() {
            for row in self.t.iter_mut() {
                for x in row.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            self.den = -piv;
        } else {
            self.den = piv;
        }
    }

    /// Primal simplex with Bland's rule: entering column is the smallest
    /// index with a negative reduced cost, leaving row has the smallest
    /// ratio with ties broken by the smallest basic column index.
    fn run_primal(&mut self) -> PrimalEnd {
        loop {
            let rhs = self.rhs_col();
            let Some(pcol) = (0..rhs).find(|&j| self.t[0][j].is_negative()) else {
                return PrimalEnd::Optimal;
            };
            let mut leave: Option<usize> = None;
            for r in 1..=self.rows() {
                if !self.t[r][pcol].is_positive() {
                    continue;
                }
                match leave {
                    None => leave = Some(r),
                    Some(b) => {
                        let lhs = &self.t[r][rhs] * &self.t[b][pcol];
                        let cur = &self.t[b][rhs] * &self.t[r][pcol];
                        if lhs < cur || (lhs == cur && self.basis[r - 1] < self.basis[b - 1]) {
                            leave = Some(r);
                        }
                    }
                }
            }
            match leave {
                Some(r) => self.pivot(r, pcol),
                None => return PrimalEnd::Unbounded,
            }
        }
    }

    /// Rational value of the named column in the current basic solution.
    fn basic_value(&self, col: usize) -> Rational {
        for (i, &b) in self.basis.iter().enumerate() {
            if b == col {
                return Rational::new(self.t[i + 1][self.rhs_col()].clone(), self.den.clone());
            }
        }
        Rational::zero()
    }
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    if den.is_one() {
        return num;
    }
    debug_assert!((&num % den).is_zero(), "fraction-free pivot division must be exact");
    num / den
}

/// Scales a rational row to integers by the lcm of its denominators.
fn integerize(coeffs: &[Rational], rhs: &Rational) -> (Vec<BigInt>, BigInt) {
    let mut l = BigInt::one();
    for x in coeffs.iter().chain(std::iter::once(rhs)) {
        l = l.lcm(x.denom());
    }
    let scale = |x: &Rational| x.numer() * (&l / x.denom());
    (coeffs.iter().map(scale).collect(), scale(rhs))
}

pub(super) fn solve(lp: &LinearProgram) -> LpOutcome {
    // Internal nonnegative columns from the variable bounds.
    let mut cols: Vec<ColMap> = Vec::new();
    let mut cap_rows: Vec<(usize, Rational)> = Vec::new();
    for (var, b) in lp.bounds.iter().enumerate() {
        match (&b.lower, &b.upper) {
            (Some(l), Some(u)) => {
                if l > u {
                    return LpOutcome::Infeasible;
                }
                cols.push(ColMap::Shift { var, lower: l.clone() });
                cap_rows.push((cols.len() - 1, u - l));
            }
            (Some(l), None) => cols.push(ColMap::Shift { var, lower: l.clone() }),
            (None, Some(u)) => cols.push(ColMap::Mirror { var, upper: u.clone() }),
            (None, None) => {
                cols.push(ColMap::SplitPos { var });
                cols.push(ColMap::SplitNeg { var });
            }
        }
    }
    let ns = cols.len();

    // Constraint rows rewritten over the internal columns.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Rational::zero(); ns];
        let mut rhs = c.rhs.clone();
        for (j, map) in cols.iter().enumerate() {
            let a = &c.coeffs[map.var()];
            if a.is_zero() {
                continue;
            }
            coeffs[j] = if map.sign() > 0 { a.clone() } else { -a };
            match map {
                ColMap::Shift { lower, .. } => rhs -= a * lower,
                ColMap::Mirror { upper, .. } => rhs -= a * upper,
                _ => {}
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (col, cap) in cap_rows {
        let mut coeffs = vec![Rational::zero(); ns];
        coeffs[col] = Rational::one();
        rows.push((coeffs, Relation::Le, cap));
    }

    // Integer rows with nonnegative right-hand sides.
    let m = rows.len();
    let mut irows: Vec<(Vec<BigInt>, Relation, BigInt)> = Vec::with_capacity(m);
    for (coeffs, rel, rhs) in &rows {
        let (mut ic, mut ir) = integerize(coeffs, rhs);
        let mut rel = *rel;
        if ir.is_negative() {
            for v in &mut ic {
                *v = -std::mem::take(v);
            }
            ir = -ir;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        irows.push((ic, rel, ir));
    }

    // Column layout: [structural | slack/surplus | artificial | rhs]. Slack
    // rows start basic; >= and = rows get an artificial basis.
    let mut nl = 0;
    let logical: Vec<Option<(usize, i8)>> = irows
        .iter()
        .map(|(_, rel, _)| match rel {
            Relation::Le => {
                nl += 1;
                Some((nl - 1, 1))
            }
            Relation::Ge => {
                nl += 1;
                Some((nl - 1, -1))
            }
            Relation::Eq => None,
        })
        .collect();
    let mut na = 0;
    let art: Vec<Option<usize>> = irows
        .iter()
        .map(|(_, rel, _)| match rel {
            Relation::Le => None,
            _ => {
                na += 1;
                Some(na - 1)
            }
        })
        .collect();
    let art_start = ns + nl;
    let width = ns + nl + na + 1;
    let rhs_col = width - 1;

    let mut t = vec![vec![BigInt::zero(); width]; m + 1];
    let mut basis = vec![0usize; m];
    for (i, (ic, _, ir)) in irows.iter().enumerate() {
        let r = i + 1;
        t[r][..ns].clone_from_slice(ic);
        if let Some((off, sign)) = logical[i] {
            t[r][ns + off] = BigInt::from(sign);
        }
        if let Some(off) = art[i] {
            t[r][art_start + off] = BigInt::one();
        }
        t[r][rhs_col] = ir.clone();
        basis[i] = match (logical[i], art[i]) {
            (_, Some(off)) => art_start + off,
            (Some((off, _)), None) => ns + off,
            (None, None) => unreachable!("every row is slack- or artificial-based"),
        };
    }
    let mut tab = Tableau { t, den: BigInt::one(), basis };

    if na > 0 {
        // Phase 1: maximize -(sum of artificials), which is bounded by zero.
        let mut z = vec![BigInt::zero(); width];
        for (i, a) in art.iter().enumerate() {
            if a.is_some() {
                for (zj, tij) in z.iter_mut().zip(&tab.t[i + 1]) {
                    *zj -= tij;
                }
            }
        }
        for zc in &mut z[art_start..art_start + na] {
            *zc += 1;
        }
        tab.t[0] = z;
        match tab.run_primal() {
            PrimalEnd::Optimal => {}
            PrimalEnd::Unbounded => unreachable!("phase 1 objective is bounded"),
        }
        if tab.t[0][rhs_col].is_negative() {
            return LpOutcome::Infeasible;
        }

        // Drive basic artificials (all at value zero) out of the basis;
        // rows with no nonartificial support are redundant and dropped.
        let mut r = 1;
        while r <= tab.rows() {
            if tab.basis[r - 1] >= art_start {
                match (0..art_start).find(|&c| !tab.t[r][c].is_zero()) {
                    Some(c) => {
                        tab.pivot(r, c);
                        r += 1;
                    }
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r - 1);
                    }
                }
            } else {
                r += 1;
            }
        }
        for row in tab.t.iter_mut() {
            row.drain(art_start..art_start + na);
        }
        debug_assert!(tab.basis.iter().all(|&b| b < art_start));
    }

    // Phase 2 objective over the internal columns, scaled to integers.
    let mut oc = vec![Rational::zero(); art_start];
    for (j, map) in cols.iter().enumerate() {
        let c = &lp.objective[map.var()];
        oc[j] = if map.sign() > 0 { c.clone() } else { -c };
        if lp.sense == Sense::Minimize {
            oc[j] = -std::mem::take(&mut oc[j]);
        }
    }
    let (ic, _) = integerize(&oc, &Rational::zero());
    let rhs_col = tab.rhs_col();
    let mut z = vec![BigInt::zero(); rhs_col + 1];
    for (j, zj) in z.iter_mut().enumerate() {
        if j < art_start {
            *zj = -(&ic[j] * &tab.den);
        }
    }
    for (i, &b) in tab.basis.iter().enumerate() {
        if ic[b].is_zero() {
            continue;
        }
        for (zj, tij) in z.iter_mut().zip(&tab.t[i + 1]) {
            if !tij.is_zero() {
                *zj += &ic[b] * tij;
            }
        }
    }
    tab.t[0] = z;

    match tab.run_primal() {
        PrimalEnd::Unbounded => LpOutcome::Unbounded,
        PrimalEnd::Optimal => {
            let mut internal = vec![Rational::zero(); art_start];
            for (i, &b) in tab.basis.iter().enumerate() {
                internal[b] = Rational::new(tab.t[i + 1][rhs_col].clone(), tab.den.clone());
            }
            let mut solution = vec![Rational::zero(); lp.objective.len()];
            for (j, map) in cols.iter().enumerate() {
                match map {
                    ColMap::Shift { var, lower } => solution[*var] = lower + &internal[j],
                    ColMap::Mirror { var, upper } => solution[*var] = upper - &internal[j],
                    ColMap::SplitPos { var } => solution[*var] += &internal[j],
                    ColMap::SplitNeg { var } => solution[*var] -= &internal[j],
                }
            }
            let value = lp
                .objective
                .iter()
                .zip(&solution)
                .map(|(c, x)| c * x)
                .sum();
            LpOutcome::Optimal { solution, value }
        }
    }
}

/// Zero-sum matrix game by the shift-and-reciprocate construction.
///
/// Shift the payoffs so every entry is at least one, then solve the column
/// player's program `max sum(v)` s.t. `M'v <= 1, v >= 0`, which starts from
/// the slack basis and needs no phase 1. The optimum `w` is the reciprocal of
/// the shifted game value; the row player's strategy is the dual solution
/// read off the slack columns' reduced costs.
pub(super) fn solve_matrix_game(payoff: &[Vec<Rational>]) -> MatrixGameSolution {
    let nx = payoff.len();
    let ny = payoff[0].len();
    let one = Rational::one();
    let min = payoff
        .iter()
        .flat_map(|r| r.iter())
        .min()
        .expect("matrix is non-empty");
    let sigma = if *min < one { &one - min } else { Rational::zero() };

    let shifted: Vec<Vec<Rational>> = payoff
        .iter()
        .map(|r| r.iter().map(|e| e + &sigma).collect())
        .collect();
    let mut d = BigInt::one();
    for e in shifted.iter().flat_map(|r| r.iter()) {
        d = d.lcm(e.denom());
    }

    let width = ny + nx + 1;
    let rhs_col = width - 1;
    let mut t = vec![vec![BigInt::zero(); width]; nx + 1];
    for cell in &mut t[0][..ny] {
        *cell = BigInt::from(-1);
    }
    for x in 0..nx {
        for y in 0..ny {
            t[x + 1][y] = shifted[x][y].numer() * (&d / shifted[x][y].denom());
        }
        t[x + 1][ny + x] = BigInt::one();
        t[x + 1][rhs_col] = d.clone();
    }
    let mut tab = Tableau {
        t,
        den: BigInt::one(),
        basis: (0..nx).map(|x| ny + x).collect(),
    };
    match tab.run_primal() {
        PrimalEnd::Optimal => {}
        PrimalEnd::Unbounded => unreachable!("columns of a positive matrix bound the program"),
    }

    let w = Rational::new(tab.t[0][rhs_col].clone(), tab.den.clone());
    assert!(w.is_positive(), "positive matrix game has positive value");
    let value = w.recip() - &sigma;
    let col_strategy: Vec<Rational> = (0..ny).map(|y| tab.basic_value(y) / &w).collect();
    // Slack reduced costs are the duals of the d-scaled rows; scale back.
    let row_strategy: Vec<Rational> = (0..nx)
        .map(|x| Rational::new(&tab.t[0][ny + x] * &d, tab.den.clone()) / &w)
        .collect();

    // The construction guarantees these exactly; check the cheap ones always.
    let sum_p: Rational = row_strategy.iter().cloned().sum();
    let sum_q: Rational = col_strategy.iter().cloned().sum();
    assert!(sum_p.is_one() && sum_q.is_one(), "strategies must be distributions");
    debug_assert!(row_strategy.iter().all(|p| !p.is_negative()));
    debug_assert!(col_strategy.iter().all(|q| !q.is_negative()));
    #[cfg(debug_assertions)]
    {
        for y in 0..ny {
            let got: Rational = row_strategy.iter().zip(payoff).map(|(p, row)| p * &row[y]).sum();
            debug_assert!(got >= value, "row strategy must guarantee the value");
        }
        for row in payoff {
            let got: Rational = row.iter().zip(&col_strategy).map(|(e, q)| e * q).sum();
            debug_assert!(got <= value, "column strategy must cap the value");
        }
    }

    MatrixGameSolution { value, row_strategy, col_strategy }
}
