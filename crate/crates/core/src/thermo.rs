//! Nonequilibrium thermodynamics along Gaussian trajectories.
//!
//! The instantaneous intrinsic Hamiltonian of mean force is `φ(t)a†a + c0(t)`,
//! evaluated at the dressed mode of ω(t) and the bath temperature. Energies,
//! free energies and work are measured against it; heat closes the first law
//! and the entropy production is Σ = ΔS − βQ#.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_moments, initial_moments_joint_gibbs, initial_moments_product, propagators_driven, reduced_covariance,
    Moments,
};
use crate::equilibrium::{free_energy_sharp, log_partition_star, phi_and_offset_with};
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_entropy, symplectic_eigenvalue};
use crate::model::{dressed_mode, drive_omega, drive_omega_dot, DressedMode, DrivingParams, ModelParams};
use crate::numerics::ode::OdeSpec;
use crate::numerics::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoRecord {
    pub t: f64,
    pub occupation: f64,
    pub energy_sharp: f64,
    pub entropy: f64,
    pub work_total: f64,
    pub work_sharp: f64,
    pub delta_f_rs: f64,
    pub heat_sharp: f64,
    pub entropy_production: f64,
    pub free_energy_noneq: f64,
    /// F̃# through the relative entropy to the instantaneous reference state.
    pub free_energy_relative: f64,
    /// Equilibrium F# of the instantaneous dressed mode.
    pub free_energy_sharp: f64,
    pub bare_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialState {
    /// Squeezed vacuum of the system times a thermal reaction coordinate,
    /// with the coupling switched on at t = 0.
    SqueezedProduct { r: f64, theta: f64 },
    /// Joint Gibbs state of the undriven pair.
    JointGibbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: ModelParams,
    pub driving: DrivingParams,
    pub initial: InitialState,
}

impl Scenario {
    pub fn relax(params: ModelParams, r: f64) -> Self {
        Self { params, driving: DrivingParams::NONE, initial: InitialState::SqueezedProduct { r, theta: 0.0 } }
    }

    pub fn driven(params: ModelParams, driving: DrivingParams) -> Self {
        Self { params, driving, initial: InitialState::JointGibbs }
    }

    fn is_quench(&self) -> bool {
        matches!(self.initial, InitialState::SqueezedProduct { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoSpec {
    pub ode: OdeSpec,
    pub quad: QuadratureSpec,
}

impl Default for ThermoSpec {
    fn default() -> Self {
        Self { ode: OdeSpec { rel_tol: 1e-10, abs_tol: 1e-13, ..OdeSpec::default() }, quad: QuadratureSpec::default() }
    }
}

/// Gibbs reference `φ a†a + c0` at inverse temperature β with free energy `free_energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceHamiltonian {
    pub phi: f64,
    pub c0: f64,
    pub free_energy: f64,
}

impl ReferenceHamiltonian {
    /// The bare system Hamiltonian `ω a†a`.
    pub fn bare(omega: f64, beta: f64) -> Self {
        Self { phi: omega, c0: 0.0, free_energy: log1m_exp(beta * omega) / beta }
    }

    /// H# of a dressed mode.
    pub fn sharp(beta: f64, mode: &DressedMode, q: &QuadratureSpec) -> Result<Self> {
        let f = free_energy_sharp(beta, mode, q)?;
        let (phi, c0) = phi_and_offset_with(beta, mode, f);
        Ok(Self { phi, c0, free_energy: f })
    }

    pub fn energy(&self, occupation: f64) -> f64 {
        self.phi * occupation + self.c0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WorkSeries {
    pub work_total: Vec<f64>,
    pub delta_f_rs: Vec<f64>,
    pub work_sharp: Vec<f64>,
}

/// log(1 − e^{−x}).
fn log1m_exp(x: f64) -> f64 {
    (-(-x).exp_m1()).ln()
}

/// Work assigned to the system by switching the coupling on at t = 0.
pub fn quench_work(beta: f64, p: &ModelParams, q: &QuadratureSpec) -> Result<f64> {
    p.validate()?;
    Ok(log_partition_star(beta, p) / beta + free_energy_sharp(beta, &p.static_mode(), q)?)
}

fn instantaneous_mode(t: f64, p: &ModelParams, d: &DrivingParams) -> Result<DressedMode> {
    dressed_mode(drive_omega(t, p, d), p)
}

/// Ẽ#(t) = φ(t)⟨a†a⟩_t + c0(t) at the instantaneous dressed mode.
pub fn internal_energy_noneq(
    m: &Moments,
    t: f64,
    p: &ModelParams,
    d: &DrivingParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    let reference = ReferenceHamiltonian::sharp(p.beta, &instantaneous_mode(t, p, d)?, q)?;
    Ok(reference.energy(m.na.re))
}

/// D(ρ‖e^{−βφ a†a}/Z_φ) for a state with occupation `n` and entropy `s`.
pub fn relative_entropy_to_thermal(occupation: f64, entropy: f64, phi: f64, beta: f64) -> f64 {
    -entropy + beta * phi * occupation - log1m_exp(beta * phi)
}

/// F̃# by both routes: `E − S/β` and `F + D/β`.
pub fn noneq_free_energy(occupation: f64, entropy: f64, reference: &ReferenceHamiltonian, beta: f64) -> (f64, f64) {
    let direct = reference.energy(occupation) - entropy / beta;
    let relative = reference.free_energy + relative_entropy_to_thermal(occupation, entropy, reference.phi, beta) / beta;
    (direct, relative)
}

fn grid_step(t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 3 {
        return Err(Error::InvalidParameter(format!("time grid needs at least 3 points, got {}", t_grid.len())));
    }
    let h = t_grid[1] - t_grid[0];
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("time grid must be increasing".into()));
    }
    let span = t_grid[t_grid.len() - 1] - t_grid[0];
    let uniform = t_grid.iter().enumerate().all(|(k, &t)| (t - t_grid[0] - k as f64 * h).abs() <= 1e-9 * span);
    if !uniform {
        return Err(Error::InvalidParameter("time grid must be uniform".into()));
    }
    Ok(h)
}

/// Running composite Simpson integral of samples `f` at spacing `h`.
fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for k in 1..f.len() {
        out[k] = if k % 2 == 0 {
            out[k - 2] + (f[k - 2] + 4.0 * f[k - 1] + f[k]) * h / 3.0
        } else if k == 1 {
            (5.0 * f[0] + 8.0 * f[1] - f[2]) * h / 12.0
        } else {
            out[k - 1] + (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]) * h / 12.0
        };
    }
    out
}

/// Richardson estimate of the Simpson error from halving the sample rate.
fn simpson_error(f: &[f64], h: f64) -> f64 {
    let n = (f.len() - 1) / 4 * 4;
    if n == 0 {
        return 0.0;
    }
    let fine = cumulative_simpson(&f[..=n], h)[n];
    let coarse_samples: Vec<f64> = f[..=n].iter().step_by(2).copied().collect();
    let coarse = cumulative_simpson(&coarse_samples, 2.0 * h)[n / 2];
    (fine - coarse).abs() / 15.0
}

fn sharp_references(
    t_grid: &[f64],
    p: &ModelParams,
    d: &DrivingParams,
    q: &QuadratureSpec,
) -> Result<Vec<ReferenceHamiltonian>> {
    t_grid.par_iter().map(|&t| ReferenceHamiltonian::sharp(p.beta, &instantaneous_mode(t, p, d)?, q)).collect()
}

fn log_partition_so(mode: &DressedMode, beta: f64) -> f64 {
    -log1m_exp(beta * mode.omega1) - log1m_exp(beta * mode.omega2)
}

fn work_series(
    t_grid: &[f64],
    occupations: &[f64],
    references: &[ReferenceHamiltonian],
    p: &ModelParams,
    d: &DrivingParams,
) -> Result<WorkSeries> {
    let h = grid_step(t_grid)?;
    let power: Vec<f64> = t_grid.iter().zip(occupations).map(|(&t, &n)| drive_omega_dot(t, d) * n).collect();
    let work_total = cumulative_simpson(&power, h);
    let estimate = simpson_error(&power, h);
    let limit = 1e-6 * work_total.iter().fold(0.0, |a: f64, w| a.max(w.abs()));
    if estimate > limit {
        return Err(Error::GridTooCoarse { estimate, limit });
    }
    let beta = p.beta;
    let log_z_so = |t: f64| -> Result<f64> { Ok(log_partition_so(&instantaneous_mode(t, p, d)?, beta)) };
    let z0 = log_z_so(t_grid[0])?;
    let f0 = references[0].free_energy;
    let delta_f_rs = t_grid
        .iter()
        .zip(references)
        .map(|(&t, r)| Ok(-(log_z_so(t)? - z0) / beta - (r.free_energy - f0)))
        .collect::<Result<Vec<f64>>>()?;
    let work_sharp = work_total.iter().zip(&delta_f_rs).map(|(w, f)| w - f).collect();
    Ok(WorkSeries { work_total, delta_f_rs, work_sharp })
}

/// W(t), ΔF_{R|S}(t) and W#(t) = W − ΔF_{R|S} on a uniform grid.
pub fn work_driven(
    t_grid: &[f64],
    moments: &[Moments],
    p: &ModelParams,
    d: &DrivingParams,
    q: &QuadratureSpec,
) -> Result<WorkSeries> {
    if moments.len() != t_grid.len() {
        return Err(Error::DimensionMismatch(format!("{} moments for {} times", moments.len(), t_grid.len())));
    }
    let refs = sharp_references(t_grid, p, d, q)?;
    let occ: Vec<f64> = moments.iter().map(|m| m.na.re).collect();
    work_series(t_grid, &occ, &refs, p, d)
}

/// Q#(t) = Ẽ#(t) − Ẽ#(0) − W#(t) and Σ(t) = ΔS(t) − βQ#(t).
pub fn heat_and_entropy_production(
    energy: &[f64],
    entropy: &[f64],
    work_sharp: &[f64],
    beta: f64,
) -> (Vec<f64>, Vec<f64>) {
    let (e0, s0) = (energy[0], entropy[0]);
    energy
        .iter()
        .zip(entropy)
        .zip(work_sharp)
        .map(|((e, s), w)| {
            let q = e - e0 - w;
            (q, s - s0 - beta * q)
        })
        .unzip()
}

/// Moments of the scenario on `t_grid` (which must start at 0).
pub fn scenario_moments(sc: &Scenario, t_grid: &[f64], ode: &OdeSpec) -> Result<Vec<Moments>> {
    let p = &sc.params;
    let m0 = match sc.initial {
        InitialState::SqueezedProduct { r, theta } => initial_moments_product(r, theta, p.beta, p),
        InitialState::JointGibbs => initial_moments_joint_gibbs(p.beta, p),
    };
    Ok(propagators_driven(t_grid, p, &sc.driving, ode)?.iter().map(|pr| evolve_moments(pr, &m0)).collect())
}

/// Full thermodynamic record of a scenario.
///
/// For a product initial state the first sample is measured with the bare
/// Hamiltonian and the quench work is assigned to every later sample.
pub fn run_scenario(sc: &Scenario, t_grid: &[f64], spec: &ThermoSpec) -> Result<Vec<ThermoRecord>> {
    let (p, d) = (&sc.params, &sc.driving);
    p.validate()?;
    d.validate(p)?;
    if t_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter("scenario time grid must start at 0".into()));
    }
    let moments = scenario_moments(sc, t_grid, &spec.ode)?;
    let mut refs = sharp_references(t_grid, p, d, &spec.quad)?;
    let occ: Vec<f64> = moments.iter().map(|m| m.na.re).collect();
    let entropy = moments
        .iter()
        .map(|m| {
            let state = reduced_covariance(m)?;
            gaussian_entropy(symplectic_eigenvalue(&state.cov)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut work = work_series(t_grid, &occ, &refs, p, d)?;
    if sc.is_quench() {
        let wq = quench_work(p.beta, p, &spec.quad)?;
        work.work_sharp.iter_mut().skip(1).for_each(|w| *w += wq);
        refs[0] = ReferenceHamiltonian::bare(drive_omega(0.0, p, d), p.beta);
    }
    let energy: Vec<f64> = refs.iter().zip(&occ).map(|(r, &n)| r.energy(n)).collect();
    let (heat, sigma) = heat_and_entropy_production(&energy, &entropy, &work.work_sharp, p.beta);
    Ok((0..t_grid.len())
        .map(|k| {
            let (direct, relative) = noneq_free_energy(occ[k], entropy[k], &refs[k], p.beta);
            ThermoRecord {
                t: t_grid[k],
                occupation: occ[k],
                energy_sharp: energy[k],
                entropy: entropy[k],
                work_total: work.work_total[k],
                work_sharp: work.work_sharp[k],
                delta_f_rs: work.delta_f_rs[k],
                heat_sharp: heat[k],
                entropy_production: sigma[k],
                free_energy_noneq: direct,
                free_energy_relative: relative,
                free_energy_sharp: refs[k].free_energy,
                bare_energy: drive_omega(t_grid[k], p, d) * occ[k],
            }
        })
        .collect())
}

/// Parameters of the weak-coupling family: κ = ω0/(4ζ), γ = ω0/(10ζ).
pub fn weak_coupling_params(base: &ModelParams, zeta: f64) -> Result<ModelParams> {
    if !(zeta >= 1.0) {
        return Err(Error::InvalidParameter(format!("zeta = {zeta} must be >= 1")));
    }
    let p = ModelParams { kappa: base.omega0 / (4.0 * zeta), gamma: base.omega0 / (10.0 * zeta), ..*base };
    p.validate()?;
    Ok(p)
}

/// sup_t |Ẽ#(t) − ⟨H_S(t)⟩| for each ζ.
pub fn weak_coupling_measure(
    base: &Scenario,
    zetas: &[f64],
    t_grid: &[f64],
    spec: &ThermoSpec,
) -> Result<Vec<(f64, f64)>> {
    zetas
        .par_iter()
        .map(|&zeta| {
            let sc = Scenario { params: weak_coupling_params(&base.params, zeta)?, ..*base };
            let records = run_scenario(&sc, t_grid, spec)?;
            let sup = records.iter().map(|r| (r.energy_sharp - r.bare_energy).abs()).fold(0.0, f64::max);
            Ok((zeta, sup))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{eq_occupation, internal_energy_sharp};
    use crate::numerics::ode::uniform_grid;

    fn squeezed_relaxation(r: f64) -> Scenario {
        Scenario::relax(ModelParams::new(1.0, 0.25, 0.1, 2.0).unwrap(), r)
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let inner: f64 = (1..panels).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
        (f(a) + f(b) + inner) * h / 3.0
    }

    #[test]
    fn quench_work_examples() {
        let q = QuadratureSpec::default();
        for &b in &[0.5, 2.0, 5.0] {
            let p = ModelParams::new(1.0, 0.0, 0.1, b).unwrap();
            assert!(quench_work(b, &p, &q).unwrap().abs() < 1e-11);
        }
        let p = ModelParams::new(1.0, 0.25, 0.1, 2.0).unwrap();
        let w = quench_work(2.0, &p, &q).unwrap();
        let mode = p.static_mode();
        let entropy = |u: f64| if u == 0.0 { 0.0 } else { crate::equilibrium::eq_entropy(1.0 / u, &mode) };
        let oracle = log_partition_star(2.0, &p) / 2.0 - simpson(entropy, 0.0, 0.5, 200_000);
        assert!((w - oracle).abs() < 1e-9, "{w} vs {oracle}");
    }

    #[test]
    fn running_simpson_exactness() {
        let h = 0.1;
        let quad: Vec<f64> = (0..12).map(|k| 3.0 * (k as f64 * h).powi(2) - 2.0).collect();
        for (k, v) in cumulative_simpson(&quad, h).iter().enumerate() {
            let t = k as f64 * h;
            assert!((v - (t.powi(3) - 2.0 * t)).abs() < 1e-13, "k = {k}");
        }
        let cubic: Vec<f64> = (0..12).map(|k| (k as f64 * h).powi(3)).collect();
        for (k, v) in cumulative_simpson(&cubic, h).iter().enumerate().step_by(2) {
            assert!((v - (k as f64 * h).powi(4) / 4.0).abs() < 1e-13, "k = {k}");
        }
        assert!(simpson_error(&cubic, h) < 1e-14);
    }

    #[test]
    fn equilibrium_state_has_equilibrium_energy() {
        let p = ModelParams::new(1.0, 0.3, 0.1, 1.5).unwrap();
        let q = QuadratureSpec::default();
        let m = initial_moments_joint_gibbs(1.5, &p);
        let e = internal_energy_noneq(&m, 0.0, &p, &DrivingParams::NONE, &q).unwrap();
        assert!((e - internal_energy_sharp(1.5, &p.static_mode(), &q).unwrap()).abs() < 1e-10);
        let occ = eq_occupation(1.5, &p.static_mode());
        let s = crate::gaussian::entropy_from_occupation(occ);
        let r = ReferenceHamiltonian::sharp(1.5, &p.static_mode(), &q).unwrap();
        let (direct, relative) = noneq_free_energy(occ, s, &r, 1.5);
        assert!((direct - r.free_energy).abs() < 1e-10 && (relative - r.free_energy).abs() < 1e-10);
        assert!(relative_entropy_to_thermal(occ, s, r.phi, 1.5).abs() < 1e-12);
    }

    #[test]
    fn undriven_work_vanishes() {
        let sc = Scenario::driven(ModelParams::new(1.0, 0.25, 0.1, 1.0).unwrap(), DrivingParams::NONE);
        let grid = uniform_grid(0.0, 20.0, 0.1);
        for r in run_scenario(&sc, &grid, &ThermoSpec::default()).unwrap() {
            assert!(r.work_total == 0.0 && r.delta_f_rs.abs() < 1e-15 && r.work_sharp.abs() < 1e-15);
            assert!(r.entropy_production.abs() < 1e-9, "t = {}", r.t);
        }
    }

    #[test]
    fn relaxation_laws() {
        let grid = uniform_grid(0.0, 120.0, 0.1);
        for &r in &[0.0, 0.5, 1.0] {
            let rec = run_scenario(&squeezed_relaxation(r), &grid, &ThermoSpec::default()).unwrap();
            assert_eq!(rec[0].heat_sharp, 0.0);
            assert_eq!(rec[0].entropy_production, 0.0);
            for x in &rec {
                assert!(x.entropy_production >= -1e-9, "r = {r}, t = {}", x.t);
                assert!((x.energy_sharp - rec[0].energy_sharp - x.heat_sharp - x.work_sharp).abs() < 1e-8);
                assert!((x.free_energy_noneq - x.free_energy_relative).abs() < 1e-9);
                assert!((x.free_energy_noneq - (x.energy_sharp - x.entropy / 2.0)).abs() < 1e-10);
            }
            let last = rec.last().unwrap();
            if r > 0.0 {
                assert!(rec[1].energy_sharp > last.energy_sharp);
            }
            assert!(last.entropy_production > rec[rec.len() / 2].entropy_production - 1e-6);
        }
    }

    #[test]
    fn stationary_measure_is_constant() {
        let base = Scenario::driven(ModelParams::new(1.0, 0.25, 0.1, 1.0).unwrap(), DrivingParams::NONE);
        let grid = uniform_grid(0.0, 10.0, 0.1);
        let spec = ThermoSpec::default();
        for (zeta, measure) in weak_coupling_measure(&base, &[1.0, 3.0], &grid, &spec).unwrap() {
            let p = weak_coupling_params(&base.params, zeta).unwrap();
            let mode = p.static_mode();
            let e = internal_energy_sharp(1.0, &mode, &spec.quad).unwrap();
            let expect = (e - eq_occupation(1.0, &mode)).abs();
            assert!((measure - expect).abs() < 1e-9, "zeta = {zeta}");
        }
        assert!(weak_coupling_params(&base.params, 0.5).is_err());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let sc = Scenario::driven(ModelParams::new(1.0, 0.25, 0.1, 1.0).unwrap(), DrivingParams::new(0.25, 2.0, 0.0));
        let grid = uniform_grid(0.0, 20.0, 0.5);
        assert!(matches!(run_scenario(&sc, &grid, &ThermoSpec::default()), Err(Error::GridTooCoarse { .. })));
    }
}
