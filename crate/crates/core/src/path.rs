//! Time-dependent Hamiltonians `t ↦ H(t)`.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{check_dims, commutator, ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Real polynomial `c[0] + c[1] t + c[2] t² + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidScenario(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            coefficients: vec![c],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        }
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Polynomial {
        let mut coefficients = Vec::with_capacity(self.coefficients.len() + 1);
        coefficients.push(0.0);
        coefficients.extend(
            self.coefficients
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Polynomial { coefficients }
    }

    /// `∫_{t0}^{t1} f`.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(t1) - anti.eval(t0)
    }
}

/// Orientation of the generator: the flow solves `∂ₜG = sign · iH(t) G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i32(s: i32) -> Option<Self> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    Constant(HermitianMatrix),
    /// `f(t) H₀` with scalar polynomial `f`.
    Commuting {
        coefficient: Polynomial,
        generator: HermitianMatrix,
    },
    /// `Σ_k f_k(t) P_k`.
    PauliSum(Vec<(Polynomial, HermitianMatrix)>),
    /// Piecewise-linear interpolation of samples on a strictly increasing grid.
    Sampled {
        times: Vec<f64>,
        values: Vec<HermitianMatrix>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPath {
    dim: usize,
    kind: PathKind,
    sign: Sign,
}

impl HamiltonianPath {
    pub fn new(kind: PathKind, sign: Sign) -> Result<Self> {
        let dim = match &kind {
            PathKind::Constant(h) => h.dim(),
            PathKind::Commuting { generator, .. } => generator.dim(),
            PathKind::PauliSum(terms) => {
                let first = terms.first().ok_or_else(|| {
                    Error::InvalidScenario("pauli_sum needs at least one term".into())
                })?;
                for (_, p) in terms {
                    check_dims(first.1.dim(), p.dim())?;
                }
                first.1.dim()
            }
            PathKind::Sampled { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::InvalidGrid(format!(
                        "{} sample times but {} matrices",
                        times.len(),
                        values.len()
                    )));
                }
                if times.len() < 2 {
                    return Err(Error::InvalidGrid("need at least two samples".into()));
                }
                check_strictly_increasing(times)?;
                for v in values {
                    check_dims(values[0].dim(), v.dim())?;
                }
                values[0].dim()
            }
        };
        Ok(Self { dim, kind, sign })
    }

    pub fn constant(h: HermitianMatrix) -> Self {
        Self::new(PathKind::Constant(h), Sign::Plus).expect("constant path is always valid")
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(HermitianMatrix::zeros(n))
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &PathKind {
        &self.kind
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Closed interval on which `H(t)` is defined.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            PathKind::Sampled { times, .. } => (times[0], times[times.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn check_interval(&self, t0: f64, t1: f64) -> Result<()> {
        self.clamp(t0)?;
        self.clamp(t1)?;
        Ok(())
    }

    /// Maps `t` into the domain, absorbing grid roundoff at the endpoints.
    fn clamp(&self, t: f64) -> Result<f64> {
        let (start, end) = self.domain();
        if !t.is_finite() {
            return Err(Error::OutsideDomain { t, start, end });
        }
        if start.is_infinite() {
            return Ok(t);
        }
        let slack = 1e-12 * f64::max(1.0, end - start);
        if t < start - slack || t > end + slack {
            return Err(Error::OutsideDomain { t, start, end });
        }
        Ok(t.clamp(start, end))
    }

    /// `H(t)`.
    pub fn evaluate(&self, t: f64) -> Result<HermitianMatrix> {
        let t = self.clamp(t)?;
        Ok(match &self.kind {
            PathKind::Constant(h) => h.clone(),
            PathKind::Commuting {
                coefficient,
                generator,
            } => HermitianMatrix::real_combination(&[(coefficient.eval(t), generator)], self.dim),
            PathKind::PauliSum(terms) => {
                let weighted: Vec<(f64, &HermitianMatrix)> =
                    terms.iter().map(|(f, p)| (f.eval(t), p)).collect();
                HermitianMatrix::real_combination(&weighted, self.dim)
            }
            PathKind::Sampled { times, values } => {
                let k = match times.partition_point(|&s| s <= t) {
                    0 => 0,
                    p if p >= times.len() => times.len() - 2,
                    p => p - 1,
                };
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                HermitianMatrix::real_combination(
                    &[(1.0 - w, &values[k]), (w, &values[k + 1])],
                    self.dim,
                )
            }
        })
    }

    /// `sign · i H(t)`, the right-hand side generator of the transport equation.
    pub fn generator(&self, t: f64) -> Result<ComplexMatrix> {
        Ok(self
            .evaluate(t)?
            .matrix()
            .scale(C64::new(0.0, self.sign.value())))
    }

    /// `∫_{t0}^{t1} H`, available when the values `H(t)` pairwise commute
    /// (constant, scalar multiples of one generator, or sums of mutually
    /// commuting terms).
    pub fn integrated_hamiltonian(&self, t0: f64, t1: f64) -> Option<HermitianMatrix> {
        match &self.kind {
            PathKind::Constant(h) => Some(HermitianMatrix::real_combination(&[(t1 - t0, h)], self.dim)),
            PathKind::Commuting {
                coefficient,
                generator,
            } => Some(HermitianMatrix::real_combination(
                &[(coefficient.integral(t0, t1), generator)],
                self.dim,
            )),
            PathKind::PauliSum(terms) if self.is_commuting() => {
                let weighted: Vec<(f64, &HermitianMatrix)> =
                    terms.iter().map(|(f, p)| (f.integral(t0, t1), p)).collect();
                Some(HermitianMatrix::real_combination(&weighted, self.dim))
            }
            _ => None,
        }
    }

    /// True when all values of the path commute with each other.
    pub fn is_commuting(&self) -> bool {
        match &self.kind {
            PathKind::Constant(_) | PathKind::Commuting { .. } => true,
            PathKind::PauliSum(terms) => pairwise_commuting(terms.iter().map(|(_, p)| p)),
            PathKind::Sampled { values, .. } => pairwise_commuting(values.iter()),
        }
    }
}

fn pairwise_commuting<'a>(mats: impl Iterator<Item = &'a HermitianMatrix> + Clone) -> bool {
    let all: Vec<&HermitianMatrix> = mats.collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let scale = f64::max(1.0, a.operator_norm() * b.operator_norm());
            let c = commutator(a.matrix(), b.matrix()).expect("dims checked at construction");
            if c.operator_norm() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

pub(crate) fn check_strictly_increasing(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite time {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "times must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Product-integral stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// `exp(A(t) dt)`, global order 1.
    Euler,
    /// `exp(A(t + dt/2) dt)`, global order 2.
    Midpoint,
    /// Two-point Gauss fourth-order Magnus stepper.
    #[default]
    Magnus4,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Euler, Method::Midpoint, Method::Magnus4];

    pub fn name(self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Midpoint => "midpoint",
            Method::Magnus4 => "magnus4",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Method::Euler => 1,
            Method::Midpoint => 2,
            Method::Magnus4 => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Method::Euler),
            "midpoint" => Ok(Method::Midpoint),
            "magnus4" => Ok(Method::Magnus4),
            other => Err(format!(
                "unknown method `{other}`, expected one of euler, midpoint, magnus4"
            )),
        }
    }
}
