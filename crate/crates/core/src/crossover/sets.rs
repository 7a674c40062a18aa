use crate::crossover::types::{dual_slack, side, CrossoverConfig, CrossoverState, Side};
use crate::lp::StandardLp;
use crate::pdhg::PdhgState;
use crate::Scalar;

/// Splits the columns of a near-optimal point into basic columns and columns
/// fixed at a bound, snapping the latter exactly onto the bound, then forms
/// the dual sets from the result.
///
/// A column is fixed at its lower bound when `x_j − l_j ≤ max(γ r_j, ε)` and at
/// its upper bound when `u_j − x_j ≤ max(−γ r_j, ε)`, where `r = c − Aᵀy`.
/// For `l = 0, u = ∞` this is the complement of `x_j > max(γ r_j, ε)`.
pub fn identify_sets<T: Scalar>(z: &PdhgState<T>, lp: &StandardLp<T>, cfg: &CrossoverConfig) -> CrossoverState<T> {
    let (gamma, eps) = (T::of(cfg.gamma), T::of(cfg.eps));
    let r = lp.reduced_costs(&z.y);
    let mut x: Vec<T> = (0..lp.n_cols()).map(|j| lp.clamp(j, z.x[j])).collect();
    let (mut basic, mut at_bound) = (Vec::new(), Vec::new());
    for j in 0..lp.n_cols() {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        let dl = x[j] - l;
        let du = u - x[j];
        let near_lower = l.is_finite() && dl <= (gamma * r[j]).max(eps);
        let near_upper = u.is_finite() && du <= (-gamma * r[j]).max(eps);
        match (near_lower, near_upper) {
            (false, false) => {
                basic.push(j);
                continue;
            }
            (true, true) => x[j] = if dl <= du { l } else { u },
            (true, false) => x[j] = l,
            (false, true) => x[j] = u,
        }
        at_bound.push(j);
    }
    let mut st = CrossoverState { x, y: z.y.clone(), basic, at_bound, active: Vec::new(), inactive: Vec::new(), round: 0 };
    identify_dual_sets(lp, &mut st, cfg.eps);
    st
}

/// `D = {slack ≤ ε} ∪ B`, `N = {slack > ε} \ B`, with slacks signed by the bound
/// each column sits on. Columns with `l = u` carry no sign condition: they join
/// `D` when `|r_j| ≤ ε` and are left out of both sets otherwise.
pub fn identify_dual_sets<T: Scalar>(lp: &StandardLp<T>, st: &mut CrossoverState<T>, eps: f64) {
    let eps = T::of(eps);
    let r = lp.reduced_costs(&st.y);
    let mut is_basic = vec![false; lp.n_cols()];
    st.basic.iter().for_each(|&j| is_basic[j] = true);
    st.active.clear();
    st.inactive.clear();
    for j in 0..lp.n_cols() {
        if is_basic[j] {
            st.active.push(j);
            continue;
        }
        match dual_slack(lp, &st.x, &r, j) {
            Some(s) if s <= eps => st.active.push(j),
            Some(_) => st.inactive.push(j),
            None if side(lp, &st.x, j) == Side::Fixed && r[j].abs() <= eps => st.active.push(j),
            None if side(lp, &st.x, j) == Side::Between => st.active.push(j),
            None => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::lp::toy_example;

    #[test]
    fn toy_optimum() {
        let lp = toy_example::<f64>();
        let st = identify_sets(&PdhgState::new(vec![0.0, 0.5], vec![1.5]), &lp, &CrossoverConfig::default());
        assert_eq!(st.basic, vec![1]);
        assert_eq!(st.at_bound, vec![0]);
        assert_eq!(st.active, vec![1]);
        assert_eq!(st.inactive, vec![0]);
    }

    #[test]
    fn all_at_zero() {
        let lp = StandardLp::new(SparseMatrix::<f64>::identity(2), vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let st = identify_sets(&PdhgState::new(vec![0.0, 0.0], vec![0.0, 0.0]), &lp, &CrossoverConfig::default());
        assert!(st.basic.is_empty());
        assert_eq!(st.inactive, vec![0, 1]);
    }

    #[test]
    fn tiny_value_is_fixed() {
        let lp = StandardLp::new(SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, 1.0]]), vec![1.0], vec![1.0, 1.0]).unwrap();
        let st = identify_sets(&PdhgState::new(vec![1e-9, 1.0], vec![1.0]), &lp, &CrossoverConfig::default());
        assert_eq!(st.basic, vec![1]);
        assert_eq!(st.x[0], 0.0);
    }

    #[test]
    fn upper_bound_side() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, 1.0]]);
        let lp = StandardLp::with_bounds(a, vec![1.5], vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        // x₁ at its upper bound with negative reduced cost
        let st = identify_sets(&PdhgState::new(vec![1.0, 0.5], vec![0.0]), &lp, &CrossoverConfig::default());
        assert_eq!(st.basic, vec![1]);
        assert_eq!(st.inactive, vec![0]);
    }
}
