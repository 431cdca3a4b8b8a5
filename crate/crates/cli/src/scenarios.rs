//! One function per scenario, each producing the tables of its panels.

use mforce::dos::{density_closed_forms, density_sharp, energy_grid, ClosedForm};
use mforce::equilibrium::{equilibrium_point, star_quantities};
use mforce::focklab::{
    add_coherence, build_block_state, gibbs_state, petz_map, verify_thermo_initial_condition, Block, BlockSpec,
    CMatrix, DensityMatrix,
};
use mforce::numerics::uniform_grid;
use mforce::thermo::{run_scenario, weak_coupling_measure, InitialState, Scenario, ThermoSpec};
use mforce::{IltSpec, QuadratureSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::table::{col, OutputTable, ENERGY, ENTROPY, HEAT_CAPACITY, INV_ENERGY, NONE, TIME};

type Result<T> = mforce::Result<T>;

/// Seed of the random states in the `petz-demo` scenario.
pub const PETZ_SEED: u64 = 7;

pub fn tables(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    match cfg.scenario {
        ScenarioKind::Equilibrium => equilibrium(cfg),
        ScenarioKind::Dos => dos(cfg),
        ScenarioKind::Relax => relax(cfg),
        ScenarioKind::DrivenDamped | ScenarioKind::DrivenPeriodic => driven(cfg),
        ScenarioKind::WeakLimit => weak_limit(cfg),
        ScenarioKind::PetzDemo => petz_demo(cfg),
    }
}

fn time_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    uniform_grid(0.0, cfg.t_max, cfg.dt_out)
}

fn equilibrium(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let q = QuadratureSpec::default();
    cfg.kappa_list
        .par_iter()
        .map(|&kappa| {
            let p = cfg.model.with_kappa(kappa);
            let mode = p.static_mode();
            let mut t = OutputTable::new(
                format!("equilibrium_kappa{kappa}"),
                vec![
                    col("beta", INV_ENERGY),
                    col("nu", NONE),
                    col("S", ENTROPY),
                    col("F_sharp", ENERGY),
                    col("E_sharp", ENERGY),
                    col("C_sharp", HEAT_CAPACITY),
                    col("E_star", ENERGY),
                    col("C_star", HEAT_CAPACITY),
                ],
            );
            for &beta in &cfg.beta_list {
                let eq = equilibrium_point(beta, &mode, &q)?;
                let star = star_quantities(beta, &p);
                t.push(vec![
                    beta,
                    eq.nu,
                    eq.entropy,
                    eq.free_energy_sharp,
                    eq.internal_energy_sharp,
                    eq.heat_capacity_sharp,
                    star.internal_energy_star,
                    star.heat_capacity_star,
                ]);
            }
            Ok(t)
        })
        .collect()
}

fn dos(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let q = QuadratureSpec { rel_tol: 1e-9, ..QuadratureSpec::default() };
    let eps = cfg.epsilon_reg;
    let grid = energy_grid(cfg.eps_max, eps / 4.0);
    cfg.kappa_list
        .par_iter()
        .map(|&kappa| {
            let p = cfg.model.with_kappa(kappa);
            let sharp = density_sharp(&p, &grid, eps, &IltSpec::default(), &q)?;
            let closed = [ClosedForm::S, ClosedForm::SO, ClosedForm::Star]
                .map(|which| density_closed_forms(which, &p, &grid, eps));
            let [s, so, star] = closed;
            let (s, so, star) = (s?, so?, star?);
            let mut t = OutputTable::new(
                format!("dos_kappa{kappa}"),
                vec![
                    col("epsilon", ENERGY),
                    col("rho_sharp", INV_ENERGY),
                    col("rho_S", INV_ENERGY),
                    col("rho_SO", INV_ENERGY),
                    col("rho_star", INV_ENERGY),
                ],
            );
            for (k, &e) in grid.iter().enumerate() {
                t.push(vec![e, sharp.values[k], s.values[k], so.values[k], star.values[k]]);
            }
            Ok(t)
        })
        .collect()
}

fn relax(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let grid = time_grid(cfg);
    let spec = ThermoSpec::default();
    cfg.r_list
        .par_iter()
        .map(|&r| {
            let sc = Scenario {
                params: cfg.model,
                driving: cfg.driving,
                initial: InitialState::SqueezedProduct { r, theta: cfg.theta },
            };
            let mut t = OutputTable::new(
                format!("relax_r{r}"),
                vec![col("t", TIME), col("E_sharp", ENERGY), col("S", ENTROPY), col("Sigma", ENTROPY)],
            );
            for x in run_scenario(&sc, &grid, &spec)? {
                t.push(vec![x.t, x.energy_sharp, x.entropy, x.entropy_production]);
            }
            Ok(t)
        })
        .collect()
}

fn driven(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let grid = time_grid(cfg);
    let spec = ThermoSpec::default();
    cfg.beta_list
        .par_iter()
        .map(|&beta| {
            let sc = Scenario::driven(cfg.model.with_beta(beta), cfg.driving);
            let mut t = OutputTable::new(
                format!("{}_beta{beta}", cfg.scenario),
                vec![
                    col("t", TIME),
                    col("E_sharp", ENERGY),
                    col("W_sharp", ENERGY),
                    col("S", ENTROPY),
                    col("Sigma", ENTROPY),
                ],
            );
            for x in run_scenario(&sc, &grid, &spec)? {
                t.push(vec![x.t, x.energy_sharp, x.work_sharp, x.entropy, x.entropy_production]);
            }
            Ok(t)
        })
        .collect()
}

fn weak_limit(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let grid = time_grid(cfg);
    let spec = ThermoSpec::default();
    let relax = Scenario {
        params: cfg.model,
        driving: mforce::DrivingParams::NONE,
        initial: InitialState::SqueezedProduct { r: cfg.r_list[0], theta: cfg.theta },
    };
    let periodic = Scenario::driven(cfg.model, cfg.driving);
    [("relax", relax), ("periodic", periodic)]
        .into_iter()
        .map(|(name, sc)| {
            let mut t = OutputTable::new(format!("weak-limit_{name}"), vec![col("zeta", NONE), col("measure", ENERGY)]);
            for (zeta, m) in weak_coupling_measure(&sc, &cfg.zeta_list, &grid, &spec)? {
                t.push(vec![zeta, m]);
            }
            Ok(t)
        })
        .collect()
}

fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let g = random_matrix(dim, rng);
    DensityMatrix::from_unnormalized(&g * g.adjoint())
}

/// Relative-entropy gaps of Petz-recovered states from random system states,
/// and of a two-block state under a growing cross-block coherence.
fn petz_demo(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let mut rng = ChaCha8Rng::seed_from_u64(PETZ_SEED);
    let (ds, dr) = (3, 4);
    let g = random_matrix(ds * dr, &mut rng);
    let gibbs = gibbs_state(&((&g + g.adjoint()).unscale(2.0)), cfg.model.beta)?;
    let mut random = OutputTable::new("petz-demo_random", vec![col("instance", NONE), col("gap", ENTROPY)]);
    for k in 0..20 {
        let out = petz_map(&random_state(ds, &mut rng)?, &gibbs, ds, dr)?;
        random.push(vec![k as f64, verify_thermo_initial_condition(&out, &gibbs, ds, dr)?]);
    }

    let mixed = |rng: &mut ChaCha8Rng| -> Result<DensityMatrix> {
        let r = random_state(3, rng)?;
        DensityMatrix::new((r.entries() + DensityMatrix::maximally_mixed(3).entries()).unscale(2.0))
    };
    let (s1, s2) = (mixed(&mut rng)?, mixed(&mut rng)?);
    let spec = |w: f64| BlockSpec {
        blocks: vec![
            Block { dim_a: 1, dim_b: 1, weight: w, state_a: DensityMatrix::maximally_mixed(1), state_br: s1.clone() },
            Block {
                dim_a: 1,
                dim_b: 1,
                weight: 1.0 - w,
                state_a: DensityMatrix::maximally_mixed(1),
                state_br: s2.clone(),
            },
        ],
    };
    let reference = build_block_state(&spec(0.3))?;
    let state = build_block_state(&spec(0.8))?;
    let mut blocks = OutputTable::new("petz-demo_blocks", vec![col("coherence", NONE), col("gap", ENTROPY)]);
    for k in 0..=10 {
        let amp = 0.005 * k as f64;
        let rho = if k == 0 { state.rho.clone() } else { add_coherence(&state.rho, 0, 3, amp)? };
        blocks.push(vec![amp, verify_thermo_initial_condition(&rho, &reference.rho, state.dim_s, state.dim_r)?]);
    }
    Ok(vec![random, blocks])
}
