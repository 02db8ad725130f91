//! Reproducible evolution runs and the oracle suite that checks them.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::algebra::{check_dims, pauli, ComplexMatrix, HermitianMatrix, StateVector, C64};
use crate::error::{Error, Result};
use crate::path::{HamiltonianPath, Method, PathKind, Polynomial, Sign};
use crate::section::{heisenberg_residual, schrodinger_residual};
use crate::transport::{
    commuting_propagator, commuting_superoperator_evolution, evolve_state, heisenberg_transport,
    superoperator_transport, transport, TransportOperator,
};

/// One evolution run: generator path, initial data, grid and stepper.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub path: HamiltonianPath,
    pub initial_state: Option<StateVector>,
    pub initial_observable: Option<ComplexMatrix>,
    pub t_final: f64,
    pub steps: usize,
    pub method: Method,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.initial_state.is_none() && self.initial_observable.is_none() {
            return Err(Error::InvalidScenario(
                "at least one of initial_state and initial_observable is required".into(),
            ));
        }
        if self.steps < 2 {
            return Err(Error::InvalidScenario(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "t_final must be positive and finite, got {}",
                self.t_final
            )));
        }
        if let Some(y) = &self.initial_state {
            check_dims(self.path.dim(), y.dim())?;
            if y.norm() == 0.0 {
                return Err(Error::ZeroState);
            }
        }
        if let Some(a) = &self.initial_observable {
            check_dims(self.path.dim(), a.dim())?;
        }
        self.path.check_interval(0.0, self.t_final)
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self {
            steps,
            ..self.clone()
        }
    }

    pub fn with_method(&self, method: Method) -> Self {
        Self {
            method,
            ..self.clone()
        }
    }

    pub fn transport(&self) -> Result<TransportOperator> {
        transport(&self.path, 0.0, self.t_final, self.steps, self.method)
    }
}

/// Counter-based generator used for every randomized ingredient.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    C64::new(normal.sample(rng), normal.sample(rng))
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let rows: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| complex_normal(rng)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).expect("finite square")
}

/// `(M + M*) / 2` for a random `M`.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let m = random_matrix(n, rng);
    let sym = (&m + &m.adjoint()).scale_real(0.5);
    // symmetrization is exact entrywise up to conjugation, so this cannot fail
    HermitianMatrix::new(sym).expect("symmetrized matrix is Hermitian")
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    StateVector::new((0..n).map(|_| complex_normal(rng)).collect()).expect("finite")
}

/// `<ψ, aψ> / <ψ, ψ>`.
pub fn expectation_value(a: &ComplexMatrix, psi: &StateVector) -> Result<C64> {
    check_dims(a.dim(), psi.dim())?;
    let norm_sq = psi.inner_product(psi)?.re;
    if norm_sq == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(psi.inner_product(&StateVector::apply(a, psi)?)? / norm_sq)
}

/// Per-grid-point diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeRecord {
    pub t: f64,
    pub psi_norm: Option<f64>,
    pub unitarity_defect: f64,
    pub schrodinger_residual: Option<f64>,
    pub heisenberg_residual: Option<f64>,
    pub picture_gap: Option<f64>,
    pub expectation: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvergenceOutcome {
    /// Least-squares slope of log(error) against log(dt).
    Slope { slope: f64, errors: Vec<(usize, f64)> },
    /// Every error at or below the exactness floor.
    Exact { max_error: f64, errors: Vec<(usize, f64)> },
}

impl ConvergenceOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            ConvergenceOutcome::Slope { slope, .. } => Some(*slope),
            ConvergenceOutcome::Exact { .. } => None,
        }
    }

    pub fn errors(&self) -> &[(usize, f64)] {
        match self {
            ConvergenceOutcome::Slope { errors, .. } | ConvergenceOutcome::Exact { errors, .. } => {
                errors
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub method: String,
    pub sign: i32,
    pub steps: usize,
    pub t_final: f64,
    pub max_unitarity_defect: f64,
    pub max_schrodinger_residual: Option<f64>,
    pub max_heisenberg_residual: Option<f64>,
    pub max_picture_gap: Option<f64>,
    pub convergence: Option<ConvergenceOutcome>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub records: Vec<TimeRecord>,
    pub summary: RunSummary,
}

impl RunReport {
    /// Equality of everything except wall time.
    pub fn same_results(&self, other: &RunReport) -> bool {
        let mut a = self.summary.clone();
        let mut b = other.summary.clone();
        a.wall_time_seconds = 0.0;
        b.wall_time_seconds = 0.0;
        self.records == other.records && a == b
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Per-point picture gaps: the mean-value gap `|<ψ, aψ> - <y, G*aG y>|` when
/// both initial data are present, and the operator-norm gap between the
/// conjugation transport and the superoperator transport of `a`.
fn picture_gaps(s: &Scenario, g: &TransportOperator) -> Result<Option<Vec<f64>>> {
    let Some(a) = &s.initial_observable else {
        return Ok(None);
    };
    let mut gaps = vec![0.0; g.len()];
    if let Some(y) = &s.initial_state {
        let psi = evolve_state(g, y)?;
        for (k, p) in psi.values().iter().enumerate() {
            let forward = p.inner_product(&StateVector::apply(a, p)?)?;
            let pulled = y.inner_product(&StateVector::apply(&g.pullback(k, a)?, y)?)?;
            gaps[k] = f64::max(gaps[k], (forward - pulled).norm());
        }
    }
    let alpha = heisenberg_transport(g, a)?;
    let supers = superoperator_transport(&s.path, 0.0, s.t_final, s.steps, s.method)?;
    for (k, (sup, conj)) in supers.iter().zip(alpha.values()).enumerate() {
        gaps[k] = f64::max(gaps[k], sup.apply(a)?.distance(conj)?);
    }
    Ok(Some(gaps))
}

/// Runs the transport, both pictures and all residual checks.
pub fn run_scenario(s: &Scenario) -> Result<RunReport> {
    let started = Instant::now();
    s.validate().map_err(Error::at("validate"))?;
    let g = s.transport().map_err(Error::at("transport"))?;
    let defects = g.unitarity_defects();

    let states = s
        .initial_state
        .as_ref()
        .map(|y| evolve_state(&g, y))
        .transpose()
        .map_err(Error::at("evolve_state"))?;
    let schrodinger = states
        .as_ref()
        .map(|psi| schrodinger_residual(&s.path, psi))
        .transpose()
        .map_err(Error::at("schrodinger_residual"))?;
    let observables = s
        .initial_observable
        .as_ref()
        .map(|a| heisenberg_transport(&g, a))
        .transpose()
        .map_err(Error::at("heisenberg_transport"))?;
    let heisenberg = observables
        .as_ref()
        .map(|alpha| heisenberg_residual(&s.path, alpha))
        .transpose()
        .map_err(Error::at("heisenberg_residual"))?;
    let gaps = picture_gaps(s, &g).map_err(Error::at("picture_equivalence"))?;

    let mut records = Vec::with_capacity(g.len());
    for (k, &t) in g.grid().iter().enumerate() {
        let psi = states.as_ref().map(|sec| &sec.values()[k]);
        let expectation = match (psi, &s.initial_observable) {
            (Some(p), Some(a)) => {
                let e = expectation_value(a, p).map_err(Error::at("expectation_value"))?;
                Some((e.re, e.im))
            }
            _ => None,
        };
        records.push(TimeRecord {
            t,
            psi_norm: psi.map(StateVector::norm),
            unitarity_defect: defects[k],
            schrodinger_residual: schrodinger.as_ref().map(|r| r[k]),
            heisenberg_residual: heisenberg.as_ref().map(|r| r[k]),
            picture_gap: gaps.as_ref().map(|r| r[k]),
            expectation,
        });
    }

    let summary = RunSummary {
        scenario: s.name.clone(),
        method: s.method.name().to_string(),
        sign: s.path.sign().as_i32(),
        steps: s.steps,
        t_final: s.t_final,
        max_unitarity_defect: max_of(defects.iter().copied()),
        max_schrodinger_residual: schrodinger.map(max_of),
        max_heisenberg_residual: heisenberg.map(max_of),
        max_picture_gap: gaps.map(max_of),
        convergence: None,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(RunReport { records, summary })
}

/// Errors at or below this floor count as exact.
pub const EXACTNESS_FLOOR: f64 = 1e-12;
/// Minimum number of reference steps for convergence studies.
pub const MIN_REFERENCE_STEPS: usize = 100_000;

/// Terminal-time operator-norm error of the scenario's stepper at each step
/// count against a fourth-order reference on a grid at least 100 times finer
/// than the finest requested one, and the fitted order.
pub fn estimate_convergence_order(s: &Scenario, step_counts: &[usize]) -> Result<ConvergenceOutcome> {
    if step_counts.len() < 3 {
        return Err(Error::Convergence(format!(
            "need at least 3 step counts, got {}",
            step_counts.len()
        )));
    }
    if step_counts.windows(2).any(|w| w[1] <= w[0]) || step_counts[0] == 0 {
        return Err(Error::Convergence(
            "step counts must be positive and strictly increasing".into(),
        ));
    }
    s.path.check_interval(0.0, s.t_final)?;
    let finest = *step_counts.last().expect("non-empty");
    let reference_steps = usize::max(100 * finest, MIN_REFERENCE_STEPS);
    let reference = transport(&s.path, 0.0, s.t_final, reference_steps, Method::Magnus4)
        .map_err(|e| Error::Convergence(format!("reference construction failed: {e}")))?;
    let target = reference.last().matrix();

    let mut errors = Vec::with_capacity(step_counts.len());
    for &n in step_counts {
        let g = transport(&s.path, 0.0, s.t_final, n, s.method)?;
        errors.push((n, g.last().matrix().distance(target)?));
    }
    let max_error = max_of(errors.iter().map(|e| e.1));
    if max_error <= EXACTNESS_FLOOR {
        return Ok(ConvergenceOutcome::Exact { max_error, errors });
    }
    if let Some(&(n, _)) = errors.iter().find(|e| e.1 == 0.0) {
        return Err(Error::Convergence(format!(
            "zero error at {n} steps while coarser grids are inexact"
        )));
    }
    let points: Vec<(f64, f64)> = errors
        .iter()
        .map(|&(n, e)| ((s.t_final / n as f64).ln(), e.ln()))
        .collect();
    Ok(ConvergenceOutcome::Slope {
        slope: least_squares_slope(&points),
        errors,
    })
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    sxy / sxx
}

/// Largest gap between the two pictures over the grid: the mean-value gap
/// `|<ψ(t), aψ(t)> - <y, G(t)* a G(t) y>|` and the operator-norm gap between
/// conjugation and superoperator transport of `a`.
pub fn check_picture_equivalence(s: &Scenario) -> Result<f64> {
    if s.initial_state.is_none() || s.initial_observable.is_none() {
        return Err(Error::InvalidScenario(
            "picture equivalence needs both initial_state and initial_observable".into(),
        ));
    }
    s.validate()?;
    let g = s.transport()?;
    let gaps = picture_gaps(s, &g)?.expect("observable present");
    Ok(max_of(gaps))
}

pub const BUILTIN_NAMES: [&str; 4] = ["conservative", "commuting", "benchmark", "random"];

pub const DEFAULT_STEPS: usize = 256;
const RANDOM_DIM: usize = 4;
const RANDOM_SEED: u64 = 7;

/// `σ_z + t σ_x`.
pub fn benchmark_path() -> HamiltonianPath {
    HamiltonianPath::new(
        PathKind::PauliSum(vec![
            (Polynomial::constant(1.0), pauli::hermitian(pauli::sigma_z())),
            (
                Polynomial::new(vec![0.0, 1.0]).expect("finite"),
                pauli::hermitian(pauli::sigma_x()),
            ),
        ]),
        Sign::Plus,
    )
    .expect("benchmark path is valid")
}

/// `(1 + 2t - 3t²) σ_z`.
pub fn commuting_path() -> HamiltonianPath {
    HamiltonianPath::new(
        PathKind::Commuting {
            coefficient: Polynomial::new(vec![1.0, 2.0, -3.0]).expect("finite"),
            generator: pauli::hermitian(pauli::sigma_z()),
        },
        Sign::Plus,
    )
    .expect("commuting path is valid")
}

/// Built-in scenario by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    let up = StateVector::basis(2, 0);
    let base = |name: &str, path, y, a| Scenario {
        name: name.to_string(),
        path,
        initial_state: Some(y),
        initial_observable: Some(a),
        t_final: 1.0,
        steps: DEFAULT_STEPS,
        method: Method::Magnus4,
        seed: 0,
    };
    match name {
        "conservative" => Some(base(
            name,
            HamiltonianPath::constant(pauli::hermitian(pauli::sigma_z())),
            up,
            pauli::sigma_x(),
        )),
        "commuting" => {
            let plus = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).expect("finite");
            Some(base(name, commuting_path(), plus, pauli::sigma_x()))
        }
        "benchmark" => Some(base(name, benchmark_path(), up, pauli::sigma_x())),
        "random" => {
            let mut rng = rng_from_seed(RANDOM_SEED);
            let h = random_hermitian(RANDOM_DIM, &mut rng);
            let y = random_state(RANDOM_DIM, &mut rng);
            let a = random_hermitian(RANDOM_DIM, &mut rng).into_matrix();
            let mut s = base(name, HamiltonianPath::constant(h), y, a);
            s.seed = RANDOM_SEED;
            Some(s)
        }
        _ => None,
    }
}

/// One oracle comparison: `value <= threshold` passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub scenario: String,
    pub check: String,
    pub value: f64,
    pub threshold: f64,
}

impl OracleCheck {
    fn new(scenario: &str, check: &str, value: f64, threshold: f64) -> Self {
        Self {
            scenario: scenario.to_string(),
            check: check.to_string(),
            value,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

/// Runs a built-in scenario at its defaults and compares it with the
/// oracles available for it.
pub fn verify_builtin(name: &str) -> Result<Vec<OracleCheck>> {
    let s = builtin(name)
        .ok_or_else(|| Error::InvalidScenario(format!("unknown built-in scenario `{name}`")))?;
    let report = run_scenario(&s)?;
    let g = s.transport()?;
    let sm = &report.summary;
    let mut checks = vec![OracleCheck::new(
        name,
        "max_unitarity_defect",
        sm.max_unitarity_defect,
        crate::algebra::UNITARITY_TOL,
    )];
    let y = s.initial_state.as_ref().expect("built-ins carry a state");
    let a = s.initial_observable.as_ref().expect("built-ins carry an observable");
    let max_norm_drift = max_of(
        report
            .records
            .iter()
            .map(|r| (r.psi_norm.unwrap_or(0.0) - y.norm()).abs() / y.norm()),
    );
    checks.push(OracleCheck::new(name, "state_norm_drift", max_norm_drift, 1e-9));

    match name {
        "conservative" => {
            let psi = evolve_state(&g, y)?;
            let alpha = heisenberg_transport(&g, a)?;
            let mut state_err: f64 = 0.0;
            let mut obs_err: f64 = 0.0;
            for ((&t, p), al) in g.grid().iter().zip(psi.values()).zip(alpha.values()) {
                let exact = StateVector::new(vec![C64::new(0.0, t).exp(), C64::new(0.0, 0.0)])?;
                state_err = state_err.max(p.distance(&exact)?);
                let exact_obs = &pauli::sigma_x().scale_real((2.0 * t).cos())
                    - &pauli::sigma_y().scale_real((2.0 * t).sin());
                obs_err = obs_err.max(al.distance(&exact_obs)?);
            }
            checks.push(OracleCheck::new(name, "state_vs_closed_form", state_err, 1e-10));
            checks.push(OracleCheck::new(name, "observable_vs_closed_form", obs_err, 1e-10));
            // one-sided endpoint stencils dominate: dt²/3 · |ψ'''| with |ψ'''| = |H|³|y| = 1
            let dt = s.t_final / s.steps as f64;
            checks.push(OracleCheck::new(
                name,
                "schrodinger_residual_vs_difference_bound",
                sm.max_schrodinger_residual.unwrap_or(f64::INFINITY),
                1.05 * dt * dt / 3.0 + 1e-12,
            ));
            checks.push(OracleCheck::new(
                name,
                "picture_gap",
                sm.max_picture_gap.unwrap_or(f64::INFINITY),
                1e-10,
            ));
        }
        "commuting" => {
            let mut prop_err: f64 = 0.0;
            let mut sup_err: f64 = 0.0;
            let alpha = heisenberg_transport(&g, a)?;
            for ((&t, u), al) in g.grid().iter().zip(g.unitaries()).zip(alpha.values()) {
                let exact = commuting_propagator(&s.path, 0.0, t).expect("commuting")?;
                prop_err = prop_err.max(u.matrix().distance(&exact)?);
                let via_sup = commuting_superoperator_evolution(&s.path, 0.0, t, a).expect("commuting")?;
                sup_err = sup_err.max(al.distance(&via_sup)?);
            }
            checks.push(OracleCheck::new(name, "propagator_vs_antiderivative", prop_err, 1e-10));
            checks.push(OracleCheck::new(
                name,
                "heisenberg_vs_integrated_superoperator",
                sup_err,
                1e-8,
            ));
            checks.push(OracleCheck::new(
                name,
                "picture_gap",
                sm.max_picture_gap.unwrap_or(f64::INFINITY),
                1e-10,
            ));
        }
        "benchmark" => {
            let reference = transport(&s.path, 0.0, s.t_final, MIN_REFERENCE_STEPS, Method::Magnus4)?;
            checks.push(OracleCheck::new(
                name,
                "terminal_vs_fine_reference",
                g.last().matrix().distance(reference.last().matrix())?,
                1e-8,
            ));
            checks.push(OracleCheck::new(
                name,
                "picture_gap",
                sm.max_picture_gap.unwrap_or(f64::INFINITY),
                1e-8,
            ));
        }
        "random" => {
            let mut prop_err: f64 = 0.0;
            for (&t, u) in g.grid().iter().zip(g.unitaries()) {
                let exact = commuting_propagator(&s.path, 0.0, t).expect("constant")?;
                prop_err = prop_err.max(u.matrix().distance(&exact)?);
            }
            checks.push(OracleCheck::new(name, "propagator_vs_exp_itH", prop_err, 1e-10));
            checks.push(OracleCheck::new(
                name,
                "picture_gap",
                sm.max_picture_gap.unwrap_or(f64::INFINITY),
                1e-9,
            ));
        }
        _ => unreachable!("builtin() accepted the name"),
    }
    Ok(checks)
}
