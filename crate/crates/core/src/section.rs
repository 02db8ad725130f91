//! Sections over a time grid and the discrete connection `∇ₜ = ∂ₜ - A(t)`.
//!
//! A state section ψ(t) is annihilated by the connection when
//! `∂ₜψ = sign · iH(t) ψ`; an observable section α(t) when
//! `∂ₜα = sign · i[H(t), α]`. Time derivatives use second-order central
//! differences in the interior and second-order one-sided stencils at the
//! two endpoints.

use crate::algebra::{check_dims, ComplexMatrix, StateVector, C64};
use crate::error::{Error, Result};
use crate::path::{check_strictly_increasing, HamiltonianPath};

/// A fibre value: what a section holds at each grid point.
pub trait Fiber: Clone {
    fn dim(&self) -> usize;

    /// Euclidean norm for states, operator norm for observables.
    fn norm(&self) -> f64;

    /// `Σ c_k v_k`; all terms share one dimension.
    fn combine(terms: &[(f64, &Self)]) -> Self;

    /// Action of the flow generator `A = sign · iH(t)` on this fibre.
    fn generator_action(generator: &ComplexMatrix, value: &Self) -> Self;
}

impl Fiber for StateVector {
    fn dim(&self) -> usize {
        StateVector::dim(self)
    }

    fn norm(&self) -> f64 {
        StateVector::norm(self)
    }

    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut acc = terms[0].1.as_inner() * C64::new(terms[0].0, 0.0);
        for (c, v) in &terms[1..] {
            acc += v.as_inner() * C64::new(*c, 0.0);
        }
        StateVector::from_inner(acc)
    }

    fn generator_action(generator: &ComplexMatrix, value: &Self) -> Self {
        StateVector::from_inner(generator.as_inner() * value.as_inner())
    }
}

impl Fiber for ComplexMatrix {
    fn dim(&self) -> usize {
        ComplexMatrix::dim(self)
    }

    fn norm(&self) -> f64 {
        self.operator_norm()
    }

    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut acc = terms[0].1.as_inner() * C64::new(terms[0].0, 0.0);
        for (c, v) in &terms[1..] {
            acc += v.as_inner() * C64::new(*c, 0.0);
        }
        ComplexMatrix::from_inner(acc)
    }

    fn generator_action(generator: &ComplexMatrix, value: &Self) -> Self {
        &(generator * value) - &(value * generator)
    }
}

/// Values of a curve on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Section<V> {
    grid: Vec<f64>,
    values: Vec<V>,
}

impl<V: Fiber> Section<V> {
    pub fn new(grid: Vec<f64>, values: Vec<V>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.is_empty() {
            return Err(Error::InvalidGrid("empty section".into()));
        }
        check_strictly_increasing(&grid)?;
        let n = values[0].dim();
        for v in &values {
            check_dims(n, v.dim())?;
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> V) -> Result<Self> {
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.values.iter().map(Fiber::norm).collect()
    }

    /// Pointwise product `f(t_k) · v_k` with a scalar function.
    pub fn scaled_by(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&t, v)| V::combine(&[(f(t), v)]))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Discrete time derivative, second order at every point.
    pub fn time_derivative(&self) -> Result<Self> {
        let n = self.len();
        if n < 3 {
            return Err(Error::TooFewPoints(n));
        }
        let dt = uniform_spacing(&self.grid)?;
        let v = &self.values;
        let inv = 1.0 / (2.0 * dt);
        let mut out = Vec::with_capacity(n);
        out.push(V::combine(&[(-3.0 * inv, &v[0]), (4.0 * inv, &v[1]), (-inv, &v[2])]));
        for k in 1..n - 1 {
            out.push(V::combine(&[(inv, &v[k + 1]), (-inv, &v[k - 1])]));
        }
        out.push(V::combine(&[
            (3.0 * inv, &v[n - 1]),
            (-4.0 * inv, &v[n - 2]),
            (inv, &v[n - 3]),
        ]));
        Ok(Self {
            grid: self.grid.clone(),
            values: out,
        })
    }
}

fn uniform_spacing(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    let dt = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let tol = 1e-9 * dt;
    for (k, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "grid is not uniform at interval {k} (spacing {} vs {dt})",
                w[1] - w[0]
            )));
        }
    }
    Ok(dt)
}

/// `∇ₜs = ∂ₜs - A(t)·s` on the grid of `s`.
pub fn connection_apply<V: Fiber>(h: &HamiltonianPath, s: &Section<V>) -> Result<Section<V>> {
    check_dims(h.dim(), s.dim())?;
    let derivative = s.time_derivative()?;
    let mut values = Vec::with_capacity(s.len());
    for ((&t, v), dv) in s.grid.iter().zip(&s.values).zip(&derivative.values) {
        let a = h.generator(t)?;
        let action = V::generator_action(&a, v);
        values.push(V::combine(&[(1.0, dv), (-1.0, &action)]));
    }
    Ok(Section {
        grid: s.grid.clone(),
        values,
    })
}

/// Pointwise residual norms of the Schrödinger equation `∂ₜψ = sign · iH ψ`.
pub fn schrodinger_residual(h: &HamiltonianPath, s: &Section<StateVector>) -> Result<Vec<f64>> {
    Ok(connection_apply(h, s)?.norms())
}

/// Pointwise residual norms of the Heisenberg equation `∂ₜα = sign · i[H, α]`.
pub fn heisenberg_residual(h: &HamiltonianPath, s: &Section<ComplexMatrix>) -> Result<Vec<f64>> {
    Ok(connection_apply(h, s)?.norms())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::path::{PathKind, Polynomial, Sign};
    use crate::transport::uniform_grid;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sz() -> HamiltonianPath {
        HamiltonianPath::constant(hermitian(sigma_z()))
    }

    fn exact_state(t: f64) -> StateVector {
        StateVector::new(vec![c(0., t).exp(), c(0., 0.)]).unwrap()
    }

    fn exact_observable(t: f64) -> ComplexMatrix {
        &sigma_x().scale_real((2. * t).cos()) - &sigma_y().scale_real((2. * t).sin())
    }

    fn max(v: &[f64]) -> f64 {
        v.iter().copied().fold(0.0, f64::max)
    }

    #[test]
    fn constant_sections_under_zero_hamiltonian() {
        let grid = uniform_grid(0.0, 1.0, 10).unwrap();
        let h = HamiltonianPath::zero(2);
        let psi = Section::from_fn(grid.clone(), |_| StateVector::basis(2, 1)).unwrap();
        assert!(schrodinger_residual(&h, &psi).unwrap().iter().all(|&r| r == 0.0));
        let alpha = Section::from_fn(grid, |_| sigma_x()).unwrap();
        assert!(heisenberg_residual(&h, &alpha).unwrap().iter().all(|&r| r == 0.0));
        let nabla = connection_apply(&h, &alpha).unwrap();
        assert!(nabla.norms().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn closed_form_state_residual_is_second_order() {
        let res = |steps| {
            let grid = uniform_grid(0.0, 1.0, steps).unwrap();
            let s = Section::from_fn(grid, exact_state).unwrap();
            max(&schrodinger_residual(&sz(), &s).unwrap())
        };
        let ratio = res(50) / res(100);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn closed_form_observable_residual_is_second_order() {
        let res = |steps| {
            let grid = uniform_grid(0.0, 1.0, steps).unwrap();
            let s = Section::from_fn(grid, exact_observable).unwrap();
            max(&heisenberg_residual(&sz(), &s).unwrap())
        };
        let ratio = res(50) / res(100);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn wrong_sign_is_not_an_integral_section() {
        let grid = uniform_grid(0.0, 1.0, 100).unwrap();
        let s = Section::from_fn(grid, exact_state).unwrap();
        let flipped = sz().with_sign(Sign::Minus);
        assert!(max(&schrodinger_residual(&flipped, &s).unwrap()) > 1.0);
    }

    #[test]
    fn leibniz_rule_of_the_connection() {
        // ∇(fψ) = f'ψ + f∇ψ for a polynomial f and an arbitrary (non-integral) section
        let f = Polynomial::new(vec![0.5, -1.0, 2.0]).unwrap();
        let fp = f.derivative();
        let h = HamiltonianPath::new(
            PathKind::PauliSum(vec![
                (Polynomial::constant(1.0), hermitian(sigma_z())),
                (Polynomial::new(vec![0.0, 1.0]).unwrap(), hermitian(sigma_x())),
            ]),
            Sign::Plus,
        )
        .unwrap();
        let grid = uniform_grid(0.0, 1.0, 200).unwrap();
        let psi = Section::from_fn(grid, |t| {
            StateVector::new(vec![c(t.cos(), t * t), c(1.0, -t)]).unwrap()
        })
        .unwrap();
        let lhs = connection_apply(&h, &psi.scaled_by(|t| f.eval(t))).unwrap();
        let nabla = connection_apply(&h, &psi).unwrap();
        let gap = lhs
            .values()
            .iter()
            .zip(psi.values())
            .zip(nabla.values())
            .zip(psi.grid())
            .map(|(((l, p), n), &t)| {
                let rhs = StateVector::combine(&[(fp.eval(t), p), (f.eval(t), n)]);
                l.distance(&rhs).unwrap()
            })
            .fold(0.0, f64::max);
        // second-order finite-difference error with dt = 5e-3
        assert!(gap < 1e-3, "gap {gap}");
    }

    #[test]
    fn needs_three_points() {
        let s = Section::new(vec![0.0, 1.0], vec![StateVector::basis(2, 0); 2]).unwrap();
        assert_eq!(schrodinger_residual(&sz(), &s).unwrap_err(), Error::TooFewPoints(2));
    }

    #[test]
    fn shape_and_grid_errors() {
        let s = Section::from_fn(vec![0.0, 0.5, 1.0], |_| StateVector::basis(3, 0)).unwrap();
        assert!(matches!(
            schrodinger_residual(&sz(), &s),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Section::new(vec![0.0, 1.0, 0.5], vec![sigma_x(); 3]).is_err());
        assert!(Section::new(vec![0.0, 1.0], vec![sigma_x(); 3]).is_err());
        let uneven = Section::new(vec![0.0, 0.1, 1.0], vec![sigma_x(); 3]).unwrap();
        assert!(matches!(heisenberg_residual(&sz(), &uneven), Err(Error::InvalidGrid(_))));
    }
}
