use crate::crossover::types::{CrossoverState, VertexReport};
use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm_inf};
use crate::linalg::{lu_select_independent_columns, DenseLu};
use crate::lp::StandardLp;
use crate::Scalar;

/// Completes the basic columns with `m − |B|` columns of `D \ B` chosen by the
/// two-stage LU. Solution values are not touched.
pub fn independence_check<T: Scalar>(lp: &StandardLp<T>, st: &CrossoverState<T>) -> Result<Vec<usize>> {
    let candidates: Vec<usize> = st.active.iter().copied().filter(|j| !st.basic.contains(j)).collect();
    complete_basis(lp, &st.basic, &candidates)
}

/// `basic ∪ C` with `C ⊆ candidates` making the columns square and nonsingular.
pub fn complete_basis<T: Scalar>(lp: &StandardLp<T>, basic: &[usize], candidates: &[usize]) -> Result<Vec<usize>> {
    let sel = lu_select_independent_columns(&lp.a.select_columns(basic), &lp.a.select_columns(candidates))?;
    let mut basis: Vec<usize> = basic.iter().copied().chain(sel.selected_columns.iter().map(|&k| candidates[k])).collect();
    basis.sort_unstable();
    Ok(basis)
}

/// Recomputes `x_B = A_B⁻¹(b − A_N x_N)` and `y = A_B⁻ᵀ c_B` for a square
/// basis.
pub fn basic_solution<T: Scalar>(lp: &StandardLp<T>, x: &[T], basis: &[usize]) -> Result<(Vec<T>, Vec<T>)> {
    if basis.len() != lp.n_rows() {
        return Err(Error::Dimension(format!("basis of size {} for {} rows", basis.len(), lp.n_rows())));
    }
    let lu = DenseLu::new(&lp.a.select_columns(basis).to_dense())?;
    let mut xn = x.to_vec();
    basis.iter().for_each(|&j| xn[j] = T::zero());
    let ax = lp.a.mul_vec(&xn);
    let rhs: Vec<T> = lp.b.iter().zip(&ax).map(|(&b, &v)| b - v).collect();
    let xb = lu.solve(&rhs);
    basis.iter().zip(xb).for_each(|(&j, v)| xn[j] = v);
    let cb: Vec<T> = basis.iter().map(|&j| lp.c[j]).collect();
    Ok((xn, lu.solve_transpose(&cb)))
}

/// Checks the vertex optimality conditions for `(x, y)` with basis `basis`.
/// Tolerances are relative to `1 + ‖b‖∞`, `1 + |bound|` and `1 + ‖c‖∞`.
pub fn verify_vertex<T: Scalar>(lp: &StandardLp<T>, x: &[T], y: &[T], basis: &[usize]) -> VertexReport {
    let n = lp.n_cols();
    let nonsingular = basis.len() == lp.n_rows() && DenseLu::new(&lp.a.select_columns(basis).to_dense()).is_ok();
    let ax = lp.a.mul_vec(x);
    let bscale = T::one() + norm_inf(&lp.b);
    let primal_residual = (lp.b.iter().zip(&ax).map(|(&b, &v)| (b - v).abs()).fold(T::zero(), T::max) / bscale).as_f64();
    let mut in_basis = vec![false; n];
    basis.iter().for_each(|&j| in_basis[j] = true);
    let mut bound_violation = 0.0f64;
    let mut nonbasic_at_bounds = true;
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        let below = if l.is_finite() { (l - x[j]) / (T::one() + l.abs()) } else { T::zero() };
        let above = if u.is_finite() { (x[j] - u) / (T::one() + u.abs()) } else { T::zero() };
        bound_violation = bound_violation.max(below.as_f64()).max(above.as_f64());
        if !in_basis[j] && x[j] != l && x[j] != u {
            nonbasic_at_bounds = false;
        }
    }
    let r = lp.reduced_costs(y);
    let cscale = T::one() + norm_inf(&lp.c);
    let dual_residual = (basis.iter().map(|&j| r[j].abs()).fold(T::zero(), T::max) / cscale).as_f64();
    let mut dual_violation = 0.0f64;
    for j in (0..n).filter(|&j| !in_basis[j]) {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        let v = if l == u {
            T::zero()
        } else if x[j] == l {
            -r[j]
        } else if x[j] == u {
            r[j]
        } else {
            r[j].abs()
        };
        dual_violation = dual_violation.max((v / cscale).as_f64());
    }
    // dual objective bᵀy + Σ_{j∉B} x_j r_j, exact for nonbasic columns at bounds
    let primal_obj = lp.objective(x);
    let dual_obj = dot(&lp.b, y) + (0..n).filter(|&j| !in_basis[j]).map(|j| x[j] * r[j]).fold(T::zero(), |a, v| a + v);
    let gap = ((primal_obj - dual_obj).abs() / (T::one() + primal_obj.abs() + dual_obj.abs())).as_f64();
    VertexReport { nonsingular, primal_residual, bound_violation, nonbasic_at_bounds, dual_residual, dual_violation, gap }
}
