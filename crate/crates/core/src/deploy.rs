//! Polygon- and line-shaped deployment optimization on top of the GP core.
//!
//! Both shapes share one problem structure: variables are the epigraph level,
//! the two center coordinates, the per-hotspot powers and one distance
//! variable per (element, hotspot) pair. The room is translated into the
//! strictly positive quadrant before any GP is built (monomial coefficients
//! must stay positive) and translated back on output.

use clarabel::algebra::FloatT;

use crate::channel::channel_gain;
use crate::error::{Error, Result};
use crate::gp::{
    monomial_condense, sgp_solve, GpProblem, Monomial, Posynomial, SgpSettings, SolveStatus,
    SolverConfig, VarId,
};
use crate::scalar::{count, lit, Scalar};
use crate::scene::{place_line, place_polygon, polygon_radius, Deployment, Scenario};

/// Knobs of the successive-GP deployment optimizer.
#[derive(Debug, Clone)]
pub struct OptimizerSettings<S> {
    /// Trust-region parameter (> 1).
    pub omega: S,
    /// Objective-stall threshold ending the successive loop.
    pub epsilon: S,
    /// Cap on successive iterations.
    pub max_iters: usize,
    /// Number of line angles searched: `phi = k*pi/zeta`, `k = 1..=zeta`.
    pub zeta: usize,
    /// Starting center; defaults to the room center.
    pub initial_center: Option<[S; 2]>,
    /// Weight the line-angle selection metric by hotspot density.
    pub weighted_selection: bool,
    /// Inner solver tolerances.
    pub solver: SolverConfig<S>,
}

impl<S: Scalar> Default for OptimizerSettings<S> {
    fn default() -> Self {
        Self {
            omega: lit(1.1),
            epsilon: lit(1e-6),
            max_iters: 100,
            zeta: 10,
            initial_center: None,
            weighted_selection: false,
            solver: SolverConfig::default(),
        }
    }
}

impl<S: Scalar> OptimizerSettings<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > S::one()) {
            return Err(Error::Domain("omega must exceed 1".into()));
        }
        if !(self.epsilon > S::zero()) {
            return Err(Error::Domain("epsilon must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("imax must be at least 1".into()));
        }
        if self.zeta == 0 {
            return Err(Error::Domain("zeta must be at least 1".into()));
        }
        Ok(())
    }

    fn sgp(&self) -> SgpSettings<S> {
        SgpSettings {
            omega: self.omega,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            solver: self.solver,
        }
    }
}

/// One accepted iterate of the successive loop, in physical units.
#[derive(Debug, Clone)]
pub struct TracePoint<S> {
    /// Objective in the optimizer's reduced units.
    pub objective_raw: S,
    /// Objective in watts (reduced value times the dropped channel constant).
    pub objective_watts: S,
    /// Center position in room coordinates.
    pub center: [S; 2],
}

/// Per-angle outcome of the line search.
#[derive(Debug, Clone)]
pub struct AngleOutcome<S> {
    pub angle: S,
    /// Selection metric: minimum hotspot channel gain of the materialized line.
    pub metric: Option<S>,
    pub status: SolveStatus,
    pub selected: bool,
}

/// Result of one deployment optimization.
#[derive(Debug, Clone)]
pub struct DeploymentSolution<S> {
    pub deployment: Deployment<S>,
    /// Per-hotspot transmit powers, watts.
    pub powers: Vec<S>,
    /// Final objective (weighted minimum received power), watts.
    pub objective_watts: S,
    /// Final objective in reduced units.
    pub objective_raw: S,
    /// Optimized center in room coordinates.
    pub center: [S; 2],
    /// Line angle, for line-shaped runs.
    pub angle: Option<S>,
    pub trace: Vec<TracePoint<S>>,
    pub status: SolveStatus,
    /// All line angles tried (empty for polygon runs).
    pub angle_outcomes: Vec<AngleOutcome<S>>,
    /// Set when any element of the final deployment lies outside the room.
    pub out_of_room: bool,
}

/// The constant `2(b+1) (lambda/4pi)^2` dropped inside the optimizer and
/// reapplied whenever objectives are reported in watts.
pub fn objective_scale<S: Scalar>(b: S, lambda: S) -> S {
    let ratio = lambda / (lit::<S>(4.0) * S::PI());
    lit::<S>(2.0) * (b + S::one()) * ratio * ratio
}

/// Shared structure of the polygon and line GP formulations.
struct ProblemGeometry<S> {
    n: usize,
    m: usize,
    b: S,
    p_budget: S,
    h_c: S,
    shift: S,
    /// `offsets[i][j]`: hotspot position minus the element-j shape offset,
    /// in shifted coordinates.
    offsets: Vec<Vec<[S; 3]>>,
    /// Vertical gaps `h_c - q_z` per hotspot.
    e: Vec<S>,
    /// Hotspot densities.
    k: Vec<S>,
}

impl<S: Scalar> ProblemGeometry<S> {
    fn polygon(scenario: &Scenario<S>, n: usize, kappa: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("need at least one element".into()));
        }
        let r0 = match n {
            1 => S::zero(),
            2 => kappa / lit(2.0),
            _ => polygon_radius(n, kappa)?,
        };
        let phi = lit::<S>(2.0) * S::PI() / count::<S>(n);
        let shape_offsets: Vec<[S; 2]> = (1..=n)
            .map(|j| {
                let a = phi * count::<S>(j - 1);
                [r0 * a.cos(), r0 * a.sin()]
            })
            .collect();
        Self::from_offsets(scenario, n, kappa, r0, shape_offsets)
    }

    fn line(scenario: &Scenario<S>, n: usize, kappa: S, angle: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("need at least one element".into()));
        }
        let half = (n / 2) as isize;
        let (sin_a, cos_a) = angle.sin_cos();
        let shape_offsets: Vec<[S; 2]> = (0..n as isize)
            .map(|j| {
                let off = lit::<S>((j - half) as f64) * kappa;
                [off * cos_a, off * sin_a]
            })
            .collect();
        Self::from_offsets(scenario, n, kappa, S::zero(), shape_offsets)
    }

    fn from_offsets(
        scenario: &Scenario<S>,
        n: usize,
        kappa: S,
        r0: S,
        shape_offsets: Vec<[S; 2]>,
    ) -> Result<Self> {
        let m = scenario.num_hotspots();
        // Margin keeping every shifted coordinate strictly positive.
        let shift = r0 + count::<S>(n) * kappa / lit(2.0) + S::one();
        let mut offsets = Vec::with_capacity(m);
        for h in &scenario.hotspots {
            let q = [h.position[0] + shift, h.position[1] + shift, h.position[2]];
            let row: Vec<[S; 3]> = shape_offsets
                .iter()
                .map(|o| [q[0] - o[0], q[1] - o[1], q[2]])
                .collect();
            for (j, o) in row.iter().enumerate() {
                if !(o[0] > S::zero()) || !(o[1] > S::zero()) {
                    return Err(Error::ShiftFailure(format!(
                        "offset ({}, {}) for element {j} not strictly positive",
                        o[0], o[1]
                    )));
                }
            }
            offsets.push(row);
        }
        Ok(Self {
            n,
            m,
            b: scenario.boresight_gain,
            p_budget: scenario.power_budget,
            h_c: scenario.ceiling_height,
            shift,
            offsets,
            e: scenario
                .hotspots
                .iter()
                .map(|h| scenario.ceiling_height - h.position[2])
                .collect(),
            k: scenario.hotspots.iter().map(|h| h.density).collect(),
        })
    }

    fn var_g(&self, axis: usize) -> VarId {
        VarId(1 + axis)
    }

    fn var_p(&self, i: usize) -> VarId {
        VarId(3 + i)
    }

    fn var_d(&self, j: usize, i: usize) -> VarId {
        VarId(3 + self.m + i * self.n + j)
    }

    fn num_vars(&self) -> usize {
        3 + self.m + self.n * self.m
    }

    fn trust_vars(&self) -> Vec<VarId> {
        let mut v = vec![self.var_g(0), self.var_g(1)];
        for i in 0..self.m {
            for j in 0..self.n {
                v.push(self.var_d(j, i));
            }
        }
        v
    }

    /// Starting point: given center (shifted frame), true geometric distances,
    /// an even power split and a unit epigraph level.
    fn initial_point(&self, center: [S; 2]) -> Vec<S> {
        let mut x = vec![S::one(); self.num_vars()];
        x[self.var_g(0).0] = center[0];
        x[self.var_g(1).0] = center[1];
        for i in 0..self.m {
            x[self.var_p(i).0] = self.p_budget / count::<S>(self.m);
            for j in 0..self.n {
                x[self.var_d(j, i).0] = self.distance(center, j, i);
            }
        }
        x
    }

    fn distance(&self, center: [S; 2], j: usize, i: usize) -> S {
        let q = &self.offsets[i][j];
        let dx = center[0] - q[0];
        let dy = center[1] - q[1];
        let dz = self.h_c - q[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// GP approximation of the deployment problem around `point`.
    fn build_gp(&self, point: &[S]) -> Result<GpProblem<S>> {
        let two = lit::<S>(2.0);
        let mut p = GpProblem::new();
        let t = p.add_var("t");
        let g1 = p.add_var("g1");
        let g2 = p.add_var("g2");
        for i in 0..self.m {
            p.add_var(format!("P[{i}]"));
        }
        for i in 0..self.m {
            for j in 0..self.n {
                p.add_var(format!("d[{j},{i}]"));
            }
        }
        p.set_objective(Monomial::var(t))?;

        // Received-power epigraph per hotspot: the posynomial of inverse
        // distance powers is condensed to its local monomial under-estimator.
        for i in 0..self.m {
            let lhs = Monomial::constant(self.k[i] * self.e[i].powf(-self.b))?
                .with_exponent(t, S::one())
                .with_exponent(self.var_p(i), -S::one());
            let sum = Posynomial::new(
                (0..self.n)
                    .map(|j| {
                        Ok(Monomial::constant(S::one())?
                            .with_exponent(self.var_d(j, i), -(self.b + two)))
                    })
                    .collect::<Result<Vec<_>>>()?,
            )?;
            let rhs = monomial_condense(&sum, point)?;
            p.add_constraint(format!("rx_power[{i}]"), lhs.into(), rhs)?;
        }

        // Distance consistency per (element, hotspot): squared-distance
        // expansion with the cross-term posynomial condensed on the right.
        for i in 0..self.m {
            for j in 0..self.n {
                let d = self.var_d(j, i);
                let q = &self.offsets[i][j];
                let const_sq = self.h_c * self.h_c + q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                let lhs = Posynomial::new(vec![
                    Monomial::constant(S::one())?
                        .with_exponent(d, -two)
                        .with_exponent(g1, two),
                    Monomial::constant(S::one())?
                        .with_exponent(d, -two)
                        .with_exponent(g2, two),
                    Monomial::constant(const_sq)?.with_exponent(d, -two),
                ])?;
                let mut cross = Posynomial::from(Monomial::constant(S::one())?);
                cross.push(
                    Monomial::constant(two * q[0])?
                        .with_exponent(d, -two)
                        .with_exponent(g1, S::one()),
                );
                cross.push(
                    Monomial::constant(two * q[1])?
                        .with_exponent(d, -two)
                        .with_exponent(g2, S::one()),
                );
                if q[2] > S::zero() {
                    cross.push(Monomial::constant(two * self.h_c * q[2])?.with_exponent(d, -two));
                }
                let rhs = monomial_condense(&cross, point)?;
                p.add_constraint(format!("dist[{j},{i}]"), lhs, rhs)?;
            }
        }

        // Power budget.
        let budget = Posynomial::new(
            (0..self.m)
                .map(|i| Ok(Monomial::var(self.var_p(i))))
                .collect::<Result<Vec<_>>>()?,
        )?;
        p.add_constraint("power_budget", budget, Monomial::constant(self.p_budget)?)?;
        Ok(p)
    }

    fn center_from(&self, point: &[S]) -> [S; 2] {
        [
            point[self.var_g(0).0] - self.shift,
            point[self.var_g(1).0] - self.shift,
        ]
    }

    fn powers_from(&self, point: &[S]) -> Vec<S> {
        (0..self.m).map(|i| point[self.var_p(i).0]).collect()
    }
}

fn element_in_room<S: Scalar>(scenario: &Scenario<S>, e: &[S; 3]) -> bool {
    let tol = lit::<S>(1e-9);
    e[0] >= -tol
        && e[0] <= scenario.room_width + tol
        && e[1] >= -tol
        && e[1] <= scenario.room_depth + tol
}

struct ShapeRun<S> {
    solution_point: Vec<S>,
    objective_raw: S,
    status: SolveStatus,
    trace: Vec<TracePoint<S>>,
}

fn run_sgp<S: Scalar + FloatT>(
    geometry: &ProblemGeometry<S>,
    scenario: &Scenario<S>,
    lambda: S,
    settings: &OptimizerSettings<S>,
) -> Result<ShapeRun<S>> {
    let center0 = settings
        .initial_center
        .unwrap_or_else(|| scenario.room_center());
    let shifted0 = [center0[0] + geometry.shift, center0[1] + geometry.shift];
    let x0 = geometry.initial_point(shifted0);
    let outcome = sgp_solve(
        |pt| geometry.build_gp(pt),
        &geometry.trust_vars(),
        &x0,
        &settings.sgp(),
    )?;
    match outcome.result.status {
        SolveStatus::Infeasible => {
            return Err(Error::Optimization(format!(
                "first GP infeasible; violated: {}",
                outcome.result.violated.join("; ")
            )));
        }
        SolveStatus::NumericalFailure if outcome.trace.is_empty() => {
            return Err(Error::Optimization(format!(
                "solver failed before producing an iterate: {}",
                outcome.result.violated.join("; ")
            )));
        }
        _ => {}
    }
    let scale = objective_scale(scenario.boresight_gain, lambda);
    let trace = outcome
        .trace
        .iter()
        .map(|rec| TracePoint {
            objective_raw: rec.objective,
            objective_watts: rec.objective * scale,
            center: geometry.center_from(&rec.point),
        })
        .collect();
    Ok(ShapeRun {
        solution_point: outcome.result.values,
        objective_raw: outcome.result.objective,
        status: outcome.result.status,
        trace,
    })
}

/// Optimize the center of a polygon-shaped stripe.
pub fn optimize_polygon<S: Scalar + FloatT>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
    lambda: S,
    settings: &OptimizerSettings<S>,
) -> Result<DeploymentSolution<S>> {
    scenario.validate()?;
    settings.validate()?;
    let geometry = ProblemGeometry::polygon(scenario, n, kappa)?;
    let run = run_sgp(&geometry, scenario, lambda, settings)?;
    let center = geometry.center_from(&run.solution_point);
    let deployment = place_polygon(center, n, kappa, scenario.ceiling_height)?;
    let out_of_room = deployment
        .elements
        .iter()
        .any(|e| !element_in_room(scenario, e));
    let scale = objective_scale(scenario.boresight_gain, lambda);
    Ok(DeploymentSolution {
        powers: geometry.powers_from(&run.solution_point),
        objective_watts: run.objective_raw * scale,
        objective_raw: run.objective_raw,
        center,
        angle: None,
        trace: run.trace,
        status: run.status,
        angle_outcomes: Vec::new(),
        out_of_room,
        deployment,
    })
}

/// Optimize a line-shaped stripe: sweep the angle grid, run the successive
/// loop per angle and keep the deployment with the best minimum hotspot gain
/// (ties go to the later angle).
pub fn optimize_line<S: Scalar + FloatT>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
    lambda: S,
    settings: &OptimizerSettings<S>,
) -> Result<DeploymentSolution<S>> {
    scenario.validate()?;
    settings.validate()?;

    struct Candidate<S> {
        angle_index: usize,
        angle: S,
        metric: S,
        run: ShapeRun<S>,
        geometry: ProblemGeometry<S>,
        deployment: Deployment<S>,
    }

    let mut outcomes: Vec<AngleOutcome<S>> = Vec::with_capacity(settings.zeta);
    let mut best: Option<Candidate<S>> = None;
    let mut failures: Vec<String> = Vec::new();

    for k in 1..=settings.zeta {
        let angle = count::<S>(k) * S::PI() / count::<S>(settings.zeta);
        let geometry = ProblemGeometry::line(scenario, n, kappa, angle)?;
        let run = match run_sgp(&geometry, scenario, lambda, settings) {
            Ok(run) => run,
            Err(err) => {
                failures.push(format!("angle {k}/{}: {err}", settings.zeta));
                outcomes.push(AngleOutcome {
                    angle,
                    metric: None,
                    status: SolveStatus::NumericalFailure,
                    selected: false,
                });
                continue;
            }
        };
        let center = geometry.center_from(&run.solution_point);
        let deployment = place_line(center, angle, n, kappa, scenario.ceiling_height)?;
        let mut metric = S::infinity();
        for h in &scenario.hotspots {
            let gain = channel_gain(
                &deployment,
                &h.position,
                scenario.boresight_gain,
                lambda,
                scenario.ceiling_height,
            )?;
            let weighted = if settings.weighted_selection {
                gain / h.density
            } else {
                gain
            };
            if weighted < metric {
                metric = weighted;
            }
        }
        outcomes.push(AngleOutcome {
            angle,
            metric: Some(metric),
            status: run.status,
            selected: false,
        });
        // ">=" keeps the later angle on ties.
        if best.as_ref().is_none_or(|c| metric >= c.metric) {
            best = Some(Candidate {
                angle_index: outcomes.len() - 1,
                angle,
                metric,
                run,
                geometry,
                deployment,
            });
        }
    }

    let Some(best) = best else {
        return Err(Error::Optimization(format!(
            "all {} line angles failed: {}",
            settings.zeta,
            failures.join(" | ")
        )));
    };
    outcomes[best.angle_index].selected = true;
    let out_of_room = best
        .deployment
        .elements
        .iter()
        .any(|e| !element_in_room(scenario, e));
    let scale = objective_scale(scenario.boresight_gain, lambda);
    Ok(DeploymentSolution {
        powers: best.geometry.powers_from(&best.run.solution_point),
        objective_watts: best.run.objective_raw * scale,
        objective_raw: best.run.objective_raw,
        center: best.geometry.center_from(&best.run.solution_point),
        angle: Some(best.angle),
        trace: best.run.trace,
        status: best.run.status,
        angle_outcomes: outcomes,
        out_of_room,
        deployment: best.deployment,
    })
}

/// Default starting point of the successive loop (room center, true
/// distances, even power split) in the shifted coordinates `build_polygon_gp`
/// / `build_line_gp` expect. `angle` selects the line formulation.
pub fn initial_point<S: Scalar>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
    angle: Option<S>,
) -> Result<Vec<S>> {
    let geometry = match angle {
        Some(a) => ProblemGeometry::line(scenario, n, kappa, a)?,
        None => ProblemGeometry::polygon(scenario, n, kappa)?,
    };
    let [cx, cy] = scenario.room_center();
    Ok(geometry.initial_point([cx + geometry.shift, cy + geometry.shift]))
}

/// Build the polygon GP approximation around `point` (shifted coordinates);
/// exposed for inspection and testing.
pub fn build_polygon_gp<S: Scalar>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
    point: &[S],
) -> Result<GpProblem<S>> {
    ProblemGeometry::polygon(scenario, n, kappa)?.build_gp(point)
}

/// Build the line GP approximation around `point` (shifted coordinates).
pub fn build_line_gp<S: Scalar>(
    scenario: &Scenario<S>,
    n: usize,
    kappa: S,
    angle: S,
    point: &[S],
) -> Result<GpProblem<S>> {
    ProblemGeometry::line(scenario, n, kappa, angle)?.build_gp(point)
}
