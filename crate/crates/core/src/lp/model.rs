use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::Scalar;

/// `min cᵀx  s.t.  Ax = b,  l ≤ x ≤ u`.
///
/// The textbook standard form has `l = 0`, `u = +∞`; [`StandardLp::new`]
/// builds exactly that. Finite or negative bounds appear after
/// [`reformulate`](crate::lp::reformulate) and are handled by the same
/// solver through componentwise clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp<T> {
    pub a: SparseMatrix<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> StandardLp<T> {
    /// Nonnegative standard form.
    pub fn new(a: SparseMatrix<T>, b: Vec<T>, c: Vec<T>) -> Result<Self> {
        let n = a.n_cols();
        Self::with_bounds(a, b, c, vec![T::zero(); n], vec![T::infinity(); n])
    }

    pub fn with_bounds(a: SparseMatrix<T>, b: Vec<T>, c: Vec<T>, lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let (m, n) = (a.n_rows(), a.n_cols());
        if b.len() != m || c.len() != n || lower.len() != n || upper.len() != n {
            return Err(Error::Dimension(format!(
                "A is {m}x{n}, b {}, c {}, bounds {}/{}",
                b.len(),
                c.len(),
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = b.iter().chain(&c).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "objective or right-hand side", index: i });
        }
        for j in 0..n {
            if lower[j] > upper[j] || lower[j] == T::infinity() || upper[j] == T::neg_infinity() || lower[j].is_nan() || upper[j].is_nan() {
                return Err(Error::Invalid(format!("column {j} has bounds [{}, {}]", lower[j], upper[j])));
            }
        }
        Ok(Self { a, b, c, lower, upper })
    }

    pub fn n_rows(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.a.n_cols()
    }

    /// True when every column has bounds `[0, +∞)`.
    pub fn is_nonnegative_form(&self) -> bool {
        self.lower.iter().all(|&l| l == T::zero()) && self.upper.iter().all(|&u| u == T::infinity())
    }

    pub fn objective(&self, x: &[T]) -> T {
        crate::linalg::vector::dot(&self.c, x)
    }

    /// Reduced costs `c − Aᵀy`.
    pub fn reduced_costs(&self, y: &[T]) -> Vec<T> {
        let mut r = self.a.tr_mul_vec(y);
        for (ri, &ci) in r.iter_mut().zip(&self.c) {
            *ri = ci - *ri;
        }
        r
    }

    /// Clamps `v` into `[lower_j, upper_j]`.
    pub fn clamp(&self, j: usize, v: T) -> T {
        v.max(self.lower[j]).min(self.upper[j])
    }
}

/// `min cᵀx + offset  s.t.  l_w ≤ Ax ≤ u_w,  l_x ≤ x ≤ u_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLp<T> {
    pub name: String,
    pub a: SparseMatrix<T>,
    pub c: Vec<T>,
    pub objective_offset: T,
    pub row_lower: Vec<T>,
    pub row_upper: Vec<T>,
    pub col_lower: Vec<T>,
    pub col_upper: Vec<T>,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
}

impl<T: Scalar> GeneralLp<T> {
    /// Builds an unnamed problem and validates dimensions and bound order.
    pub fn new(
        a: SparseMatrix<T>,
        c: Vec<T>,
        row_lower: Vec<T>,
        row_upper: Vec<T>,
        col_lower: Vec<T>,
        col_upper: Vec<T>,
    ) -> Result<Self> {
        let (m, n) = (a.n_rows(), a.n_cols());
        let lp = Self {
            name: String::new(),
            a,
            c,
            objective_offset: T::zero(),
            row_lower,
            row_upper,
            col_lower,
            col_upper,
            row_names: (0..m).map(|i| format!("R{i}")).collect(),
            col_names: (0..n).map(|j| format!("C{j}")).collect(),
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.a.n_rows(), self.a.n_cols());
        if self.c.len() != n || self.col_lower.len() != n || self.col_upper.len() != n {
            return Err(Error::Dimension(format!("{n} columns but c/bounds of length {}/{}/{}", self.c.len(), self.col_lower.len(), self.col_upper.len())));
        }
        if self.row_lower.len() != m || self.row_upper.len() != m {
            return Err(Error::Dimension(format!("{m} rows but row bounds of length {}/{}", self.row_lower.len(), self.row_upper.len())));
        }
        for (kind, lo, up) in [("row", &self.row_lower, &self.row_upper), ("column", &self.col_lower, &self.col_upper)] {
            for (i, (&l, &u)) in lo.iter().zip(up.iter()).enumerate() {
                if l.is_nan() || u.is_nan() || l > u || l == T::infinity() || u == T::neg_infinity() {
                    return Err(Error::Invalid(format!("{kind} {i} has bounds [{l}, {u}]")));
                }
            }
        }
        if let Some(j) = self.c.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "objective", index: j });
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.a.n_cols()
    }

    /// The nonnegative standard form `min cᵀx, Ax = b, x ≥ 0` as a general LP.
    pub fn from_standard(lp: &StandardLp<T>) -> Self {
        let mut g = Self::new(lp.a.clone(), lp.c.clone(), lp.b.clone(), lp.b.clone(), lp.lower.clone(), lp.upper.clone())
            .expect("standard LP is valid");
        g.name = "standard".into();
        g
    }

    /// The problem as `min cᵀx s.t. Ax = b, l ≤ x ≤ u` when every row is an
    /// equality; `None` otherwise. The objective offset is dropped.
    pub fn as_standard(&self) -> Option<StandardLp<T>> {
        if self.row_lower != self.row_upper || self.row_lower.iter().any(|v| !v.is_finite()) {
            return None;
        }
        StandardLp::with_bounds(self.a.clone(), self.row_lower.clone(), self.c.clone(), self.col_lower.clone(), self.col_upper.clone()).ok()
    }
}

/// `min 2x₁ + 3x₂  s.t.  x₁ + 2x₂ = 1,  x ≥ 0`; optimum `x = (0, 0.5)`, `y = 1.5`.
pub fn toy_example<T: Scalar>() -> StandardLp<T> {
    let a = SparseMatrix::from_dense_rows(&[vec![T::one(), T::two()]]);
    StandardLp::new(a, vec![T::one()], vec![T::two(), T::of(3.0)]).expect("toy LP is valid")
}
