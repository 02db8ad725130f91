//! Parallel transport along the time axis.
//!
//! The transport operator `G(t)` solves `∂ₜG = A(t) G`, `G(t₀) = I`, with
//! `A(t) = sign · iH(t)`. It is built as an ordered product of one-step
//! exponentials, so every accumulated factor stays in the unitary group up to
//! the error of the matrix exponential.

use crate::algebra::{check_dims, commutator, matrix_exp, ComplexMatrix, StateVector, UnitaryMatrix};
use crate::derivation::{derivation_superoperator, InnerDerivation, Superoperator};
use crate::error::{Error, Result};
use crate::path::{HamiltonianPath, Method, Sign};
use crate::section::Section;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const GAUSS_LO: f64 = 0.5 - SQRT3 / 6.0;
const GAUSS_HI: f64 = 0.5 + SQRT3 / 6.0;

/// Exponent `Ω` of one step from `t` to `t + dt`; `generator` maps a time to
/// the flow generator, `bracket` is the commutator in the matching algebra.
fn step_exponent<G, B>(method: Method, t: f64, dt: f64, generator: G, bracket: B) -> Result<ComplexMatrix>
where
    G: Fn(f64) -> Result<ComplexMatrix>,
    B: Fn(&ComplexMatrix, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    Ok(match method {
        Method::Euler => generator(t)?.scale_real(dt),
        Method::Midpoint => generator(t + 0.5 * dt)?.scale_real(dt),
        Method::Magnus4 => {
            let a1 = generator(t + GAUSS_LO * dt)?;
            let a2 = generator(t + GAUSS_HI * dt)?;
            let mean = (&a1 + &a2).scale_real(0.5 * dt);
            let correction = bracket(&a2, &a1)?.scale_real(SQRT3 * dt * dt / 12.0);
            &mean + &correction
        }
    })
}

fn check_step(h: &HamiltonianPath, t: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    h.check_interval(t, t + dt)
}

/// One-step propagator from `t` to `t + dt`.
pub fn step(h: &HamiltonianPath, t: f64, dt: f64, method: Method) -> Result<UnitaryMatrix> {
    check_step(h, t, dt)?;
    let omega = step_exponent(method, t, dt, |s| h.generator(s), commutator)?;
    UnitaryMatrix::new(matrix_exp(&omega)?)
}

/// Uniform grid of `steps + 1` points from `t0` to `t1` inclusive.
pub fn uniform_grid(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidGrid("steps must be at least 1".into()));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidGrid(format!(
            "interval [{t0}, {t1}] must be finite with t1 > t0"
        )));
    }
    let dt = (t1 - t0) / steps as f64;
    let mut grid: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * dt).collect();
    grid.push(t1);
    Ok(grid)
}

/// Accumulated unitaries `G(t_k)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportOperator {
    grid: Vec<f64>,
    unitaries: Vec<UnitaryMatrix>,
    method: Method,
    sign: Sign,
}

impl TransportOperator {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn unitaries(&self) -> &[UnitaryMatrix] {
        &self.unitaries
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn at(&self, k: usize) -> &UnitaryMatrix {
        &self.unitaries[k]
    }

    pub fn last(&self) -> &UnitaryMatrix {
        self.unitaries.last().expect("transport has at least two points")
    }

    /// Unitarity defect `|G*G - I|` at each grid point.
    pub fn unitarity_defects(&self) -> Vec<f64> {
        self.unitaries.iter().map(UnitaryMatrix::defect).collect()
    }

    /// Concatenates a transport that starts where `self` ends:
    /// `G(t) = G_later(t) · G_self(t_end)` for `t` on the later grid.
    pub fn then(&self, later: &TransportOperator) -> Result<TransportOperator> {
        check_dims(self.dim(), later.dim())?;
        let end = *self.grid.last().expect("non-empty grid");
        let start = later.grid[0];
        if (end - start).abs() > 1e-12 * f64::max(1.0, end.abs()) {
            return Err(Error::InvalidGrid(format!(
                "cannot compose: first transport ends at {end}, second starts at {start}"
            )));
        }
        let anchor = self.last();
        let mut grid = self.grid.clone();
        let mut unitaries = self.unitaries.clone();
        for (t, u) in later.grid.iter().zip(&later.unitaries).skip(1) {
            grid.push(*t);
            unitaries.push(u.compose(anchor)?);
        }
        Ok(TransportOperator {
            grid,
            unitaries,
            method: self.method,
            sign: self.sign,
        })
    }

    /// Observable pulled back to the initial time, `G(t_k)* a G(t_k)`.
    pub fn pullback(&self, k: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.unitaries[k].inverse().conjugate(a)
    }
}

/// `G(t)` on a uniform grid of `steps` intervals from `t0` to `t1`.
pub fn transport(
    h: &HamiltonianPath,
    t0: f64,
    t1: f64,
    steps: usize,
    method: Method,
) -> Result<TransportOperator> {
    let grid = uniform_grid(t0, t1, steps)?;
    h.check_interval(t0, t1)?;
    let mut unitaries = Vec::with_capacity(grid.len());
    let mut current = UnitaryMatrix::identity(h.dim());
    unitaries.push(current.clone());
    for w in grid.windows(2) {
        let u = step(h, w[0], w[1] - w[0], method)?;
        current = u.compose(&current)?;
        unitaries.push(current.clone());
    }
    Ok(TransportOperator {
        grid,
        unitaries,
        method,
        sign: h.sign(),
    })
}

/// `ψ(t_k) = G(t_k) y`.
pub fn evolve_state(g: &TransportOperator, y: &StateVector) -> Result<Section<StateVector>> {
    check_dims(g.dim(), y.dim())?;
    let values = g
        .unitaries
        .iter()
        .map(|u| u.apply(y))
        .collect::<Result<Vec<_>>>()?;
    Section::new(g.grid.clone(), values)
}

/// `α(t_k) = G(t_k) a G(t_k)*`.
pub fn heisenberg_transport(g: &TransportOperator, a: &ComplexMatrix) -> Result<Section<ComplexMatrix>> {
    check_dims(g.dim(), a.dim())?;
    let mut values = Vec::with_capacity(g.len());
    values.push(a.clone());
    for u in &g.unitaries[1..] {
        values.push(u.conjugate(a)?);
    }
    Section::new(g.grid.clone(), values)
}

/// Observable transport computed directly on the superoperator side:
/// the same product integral applied to `sign · δ_{H(t)}` acting on
/// column-stacked matrices. Independent of [`heisenberg_transport`].
pub fn superoperator_transport(
    h: &HamiltonianPath,
    t0: f64,
    t1: f64,
    steps: usize,
    method: Method,
) -> Result<Vec<Superoperator>> {
    let grid = uniform_grid(t0, t1, steps)?;
    h.check_interval(t0, t1)?;
    let n = h.dim();
    let sign = h.sign().value();
    let generator = |t: f64| -> Result<ComplexMatrix> {
        let d = InnerDerivation::new(h.evaluate(t)?);
        Ok(derivation_superoperator(&d).matrix().scale_real(sign))
    };
    let mut current = Superoperator::new(n, ComplexMatrix::identity(n * n))?;
    let mut out = Vec::with_capacity(grid.len());
    out.push(current.clone());
    for w in grid.windows(2) {
        let (t, dt) = (w[0], w[1] - w[0]);
        check_step(h, t, dt)?;
        let omega = step_exponent(method, t, dt, generator, commutator)?;
        let factor = Superoperator::new(n, matrix_exp(&omega)?)?;
        current = factor.compose(&current)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// `exp(sign · ∫_{t0}^{t} S)` applied to `a`, for paths whose values
/// commute; `None` otherwise.
pub fn commuting_superoperator_evolution(
    h: &HamiltonianPath,
    t0: f64,
    t: f64,
    a: &ComplexMatrix,
) -> Option<Result<ComplexMatrix>> {
    let integrated = h.integrated_hamiltonian(t0, t)?;
    let d = InnerDerivation::new(integrated);
    Some(
        derivation_superoperator(&d)
            .exp(h.sign().value())
            .and_then(|s| s.apply(a)),
    )
}

/// Exact `G(t)` for commuting paths: `exp(sign · i ∫_{t0}^{t} H)`.
pub fn commuting_propagator(h: &HamiltonianPath, t0: f64, t: f64) -> Option<Result<ComplexMatrix>> {
    let integrated = h.integrated_hamiltonian(t0, t)?;
    Some(matrix_exp(
        &integrated
            .matrix()
            .scale(crate::algebra::C64::new(0.0, h.sign().value())),
    ))
}
