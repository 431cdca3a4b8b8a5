//! Acceptance criteria at their stated tolerances. Each criterion prints one
//! PASS/FAIL line; the process exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mforce::dos::{
    closed_form_deltas, density_closed_forms, density_sharp, density_sharp_perturbative, energy_grid, forward_laplace,
    peak_centers, ClosedForm,
};
use mforce::dynamics::{
    covariance_no_driving, evolve_moments, initial_moments_product, normal_frame_propagators, propagators_driven,
    reduced_covariance, scaled_unitarity,
};
use mforce::equilibrium::{
    eq_entropy, eq_nu, free_energy_sharp, heat_capacity_sharp, internal_energy_sharp, partition_sharp, phi_and_offset,
};
use mforce::focklab::{
    add_coherence, build_block_state, gibbs_state, lindblad_evolve_truncated, petz_map, relative_entropy,
    single_mode_covariance, squeezed_vacuum_fock, thermal_fock, truncated_so_gibbs, verify_thermo_initial_condition,
    Block, BlockSpec, CMatrix, DensityMatrix, LindbladSpec,
};
use mforce::gaussian::symplectic_eigenvalue;
use mforce::numerics::{boxcar_factor, uniform_grid};
use mforce::thermo::{
    internal_energy_noneq, run_scenario, scenario_moments, weak_coupling_measure, work_driven, Scenario, ThermoRecord,
    ThermoSpec,
};
use mforce::{DrivingParams, IltSpec, ModelParams, OdeSpec, QuadratureSpec, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn base(kappa: f64, beta: f64) -> ModelParams {
    ModelParams::new(1.0, kappa, 0.1, beta).expect("valid parameters")
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn fock_equilibrium() -> Result<Verdict> {
    let mut worst = (0.0f64, 0.0, 0.0);
    let (mut within, mut total) = (0, 0);
    for &beta in &[0.5, 1.0, 2.0, 5.0] {
        for &kappa in &[0.1, 0.25, 0.5] {
            let p = base(kappa, beta);
            let g = truncated_so_gibbs(40, beta, &p)?;
            let s = g.system_state()?;
            let nu = symplectic_eigenvalue(&single_mode_covariance(&s))?;
            let mode = p.static_mode();
            let dev = (nu - eq_nu(beta, &mode)).abs().max((s.von_neumann_entropy() - eq_entropy(beta, &mode)).abs());
            total += 1;
            within += usize::from(dev <= 1e-6);
            if dev > worst.0 {
                worst = (dev, beta, kappa);
            }
        }
    }
    Ok(Verdict::new(
        within == total,
        format!("{within}/{total} points within 1e-6; max |Δν|,|ΔS| = {:.3e} at β={}, κ={}", worst.0, worst.1, worst.2),
    ))
}

fn thermostatic_identities() -> Result<Verdict> {
    let q = QuadratureSpec::default();
    let tight = QuadratureSpec { rel_tol: 1e-12, abs_tol: 1e-16, ..QuadratureSpec::default() };
    let mode = base(0.25, 1.0).static_mode();
    let (mut d_ident, mut d_occ, mut d_cap) = (0.0f64, 0.0f64, 0.0f64);
    for beta in linspace(0.2, 8.0, 50) {
        let f = free_energy_sharp(beta, &mode, &q)?;
        let e = internal_energy_sharp(beta, &mode, &q)?;
        let s = eq_entropy(beta, &mode);
        let (phi, c0) = phi_and_offset(beta, &mode, &q)?;
        let nu = eq_nu(beta, &mode);
        d_ident = d_ident.max((e - (f + s / beta)).abs());
        d_occ = d_occ.max((e - (phi * (nu - 1.0) / 2.0 + c0)).abs());
        let energy = |b: f64| internal_energy_sharp(b, &mode, &tight);
        let fd = |h: f64| -> Result<f64> { Ok(-(energy(beta + h)? - energy(beta - h)?) / (2.0 * h)) };
        let (h1, h2) = (5e-3, 2.5e-3);
        let de = (4.0 * fd(h2)? - fd(h1)?) / 3.0;
        let c_fd = beta * beta * de;
        let c = heat_capacity_sharp(beta, &mode);
        d_cap = d_cap.max(((c - c_fd) / c).abs());
    }
    let c_cold = heat_capacity_sharp(1e3, &mode);
    let pass = d_ident <= 1e-10 && d_occ <= 1e-8 && d_cap <= 1e-6 && c_cold < 1e-6;
    Ok(Verdict::new(
        pass,
        format!(
            "|E#−F#−S/β| = {d_ident:.2e} (1e-10), |E#−φ(ν−1)/2−c0| = {d_occ:.2e} (1e-8), C# vs FD rel {d_cap:.2e} (1e-6), C#(T=1e-3) = {c_cold:.1e}"
        ),
    ))
}

fn weak_coupling_free_energy() -> Result<Verdict> {
    let q = QuadratureSpec::default();
    let kappas = [0.1, 0.05, 0.025];
    let mut worst = 0.0f64;
    for beta in linspace(0.5, 5.0, 10) {
        let bare = (-(-beta).exp_m1()).ln() / beta;
        let dev: Vec<f64> = kappas
            .iter()
            .map(|&k| Ok((free_energy_sharp(beta, &base(k, beta).static_mode(), &q)? - bare).abs()))
            .collect::<Result<_>>()?;
        for w in dev.windows(2) {
            worst = worst.max(w[1] / w[0]);
        }
    }
    Ok(Verdict::new(worst < 0.5, format!("largest ratio under κ halving = {worst:.4} (< 0.5)")))
}

fn density_of_states() -> Result<Verdict> {
    let q = QuadratureSpec { rel_tol: 1e-9, ..QuadratureSpec::default() };
    let eps = 1e-3;
    let spacing = eps / 4.0;
    let grid = energy_grid(16.0, spacing);
    let (mut lap, mut off_lattice, mut peaks) = (0.0f64, 0.0f64, 0usize);
    for &kappa in &[0.05, 0.5] {
        let p = base(kappa, 1.0);
        let mode = p.static_mode();
        let d = density_sharp(&p, &grid, eps, &IltSpec::default(), &q)?;
        for beta in linspace(0.5, 3.0, 6) {
            let z = partition_sharp(beta, &mode, &q)? * boxcar_factor(Complex64::new(beta, 0.0), eps).re;
            lap = lap.max((forward_laplace(&d, beta) / z - 1.0).abs());
        }
        let lattice: Vec<f64> = closed_form_deltas(ClosedForm::SO, &p, 16.0).iter().map(|&(c, _)| c).collect();
        let top = d.values.iter().copied().fold(0.0, f64::max);
        for c in peak_centers(&d, 0.05 * top) {
            let c = c - eps / 2.0;
            let dist = lattice.iter().map(|l| (l - c).abs()).fold(f64::INFINITY, f64::min);
            off_lattice = off_lattice.max(dist);
            peaks += 1;
        }
    }
    let p = base(0.05, 1.0);
    let star = density_closed_forms(ClosedForm::Star, &p, &energy_grid(4.0, 2.5e-3), 1e-2)?;
    let star_min = star.values.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = lap <= 0.02 && off_lattice <= spacing && peaks > 0 && star_min < 0.0;
    Ok(Verdict::new(
        pass,
        format!(
            "Laplace rel dev {lap:.2e} (0.02), {peaks} peaks, max lattice offset {off_lattice:.2e} (cell {spacing:.1e}), min ϱ*(κ=1/20) = {star_min:.3e}"
        ),
    ))
}

fn perturbative_series() -> Result<Verdict> {
    let q = QuadratureSpec::default();
    let p = base(0.01, 1.0);
    let series = density_sharp_perturbative(&p, 200);
    let mode = p.static_mode();
    let mut worst = 0.0f64;
    for beta in linspace(0.5, 2.0, 16) {
        worst = worst.max((series.laplace(beta) / partition_sharp(beta, &mode, &q)? - 1.0).abs());
    }
    Ok(Verdict::new(worst <= 1e-6, format!("max rel dev {worst:.2e} (1e-6)")))
}

fn dynamics_closed_form() -> Result<Verdict> {
    let (r, theta, beta) = (1.0, 0.3, 2.0);
    let p = base(0.25, beta);
    let grid = uniform_grid(0.0, 100.0, 0.5);
    let spec = OdeSpec { rel_tol: 1e-10, abs_tol: 1e-13, ..OdeSpec::default() };
    let m0 = initial_moments_product(r, theta, beta, &p);
    let mut gauss = 0.0f64;
    for pr in propagators_driven(&grid, &p, &DrivingParams::NONE, &spec)? {
        let cov = reduced_covariance(&evolve_moments(&pr, &m0))?.cov;
        gauss = gauss.max(cov.max_abs_diff(&covariance_no_driving(pr.t, r, theta, beta, &p)));
    }

    let (r, n_max) = (0.5, 10);
    let rho0 = squeezed_vacuum_fock(r, 0.0, n_max)?.tensor(&thermal_fock(1.0, beta, n_max)?);
    let grid = uniform_grid(0.0, 30.0, 1.0);
    let deviation = |rhos: Vec<DensityMatrix>| -> Result<f64> {
        let mut worst = 0.0f64;
        for (t, rho) in grid.iter().zip(rhos) {
            let cov = single_mode_covariance(&rho.trace_second(n_max + 1, n_max + 1)?);
            worst = worst.max(cov.max_abs_diff(&covariance_no_driving(*t, r, 0.0, beta, &p)));
        }
        Ok(worst)
    };
    let (fock_pass, fock) = match lindblad_evolve_truncated(&rho0, &grid, &p, n_max, &LindbladSpec::default()) {
        Ok(rhos) => {
            let dev = deviation(rhos)?;
            (dev <= 1e-4, format!("truncated master equation dev {dev:.2e} (1e-4)"))
        }
        Err(e) => {
            let lifted = LindbladSpec { leakage_limit: 1.0, ..LindbladSpec::default() };
            let dev = deviation(lindblad_evolve_truncated(&rho0, &grid, &p, n_max, &lifted)?)?;
            (
                false,
                format!(
                    "truncated master equation rejected ({e}); with the leakage rule lifted dev = {dev:.2e} (1e-4)"
                ),
            )
        }
    };
    Ok(Verdict::new(gauss <= 1e-7 && fock_pass, format!("Gaussian pipeline dev {gauss:.2e} (1e-7); {fock}")))
}

fn scaled_unitarity_check() -> Result<Verdict> {
    let p = base(0.25, 1.0);
    let spec = OdeSpec { rel_tol: 1e-11, abs_tol: 1e-14, ..OdeSpec::default() };
    let grid = uniform_grid(0.0, 500.0, 1.0);
    let mut worst = 0.0f64;
    for d in [
        DrivingParams::new(0.25, 0.2, 0.0),
        DrivingParams::new(0.25, 0.2, 1.0 / 40.0),
        DrivingParams::new(0.5, 1.0, 0.0),
    ] {
        for nf in normal_frame_propagators(&grid, &p, &d, &spec)? {
            let (a, b, c) = scaled_unitarity(&nf, p.gamma);
            worst = worst.max(a).max(b).max(c);
        }
    }
    Ok(Verdict::new(worst <= 1e-8, format!("max singular-value defect {worst:.2e} (1e-8)")))
}

fn first_law_defect(rec: &[ThermoRecord]) -> f64 {
    rec.iter().map(|x| (x.energy_sharp - rec[0].energy_sharp - x.heat_sharp - x.work_sharp).abs()).fold(0.0, f64::max)
}

fn min_sigma(rec: &[ThermoRecord]) -> f64 {
    rec.iter().map(|x| x.entropy_production).fold(f64::INFINITY, f64::min)
}

/// Heat recomputed from independently evaluated Ẽ# and W#.
fn heat_cross_check(sc: &Scenario, grid: &[f64], rec: &[ThermoRecord], spec: &ThermoSpec) -> Result<f64> {
    let moments = scenario_moments(sc, grid, &spec.ode)?;
    let work = work_driven(grid, &moments, &sc.params, &sc.driving, &spec.quad)?;
    let e0 = internal_energy_noneq(&moments[0], 0.0, &sc.params, &sc.driving, &spec.quad)?;
    let mut worst = 0.0f64;
    for (k, m) in moments.iter().enumerate() {
        let e = internal_energy_noneq(m, grid[k], &sc.params, &sc.driving, &spec.quad)?;
        worst = worst.max((e - e0 - work.work_sharp[k] - rec[k].heat_sharp).abs());
    }
    Ok(worst)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn second_law() -> Result<Verdict> {
    let spec = ThermoSpec::default();
    let (mut law, mut sigma, mut cross) = (0.0f64, f64::INFINITY, 0.0f64);
    let mut notes = Vec::new();

    let relax_grid = uniform_grid(0.0, 120.0, 0.1);
    for &r in &[0.0, 0.5, 1.0] {
        let rec = run_scenario(&Scenario::relax(base(0.25, 2.0), r), &relax_grid, &spec)?;
        law = law.max(first_law_defect(&rec));
        sigma = sigma.min(min_sigma(&rec));
    }

    let mut slope_min = f64::INFINITY;
    let mut settle = 0.0f64;
    for &beta in &[0.5, 1.0, 2.0] {
        let p = base(0.25, beta);
        let damped = Scenario::driven(p, DrivingParams::new(0.25, 0.2, 1.0 / 40.0));
        let grid = uniform_grid(0.0, 50.0 / p.gamma, 0.1);
        let rec = run_scenario(&damped, &grid, &spec)?;
        law = law.max(first_law_defect(&rec));
        sigma = sigma.min(min_sigma(&rec));
        settle = settle.max((rec.last().unwrap().energy_sharp - rec[0].energy_sharp).abs());
        if beta == 1.0 {
            cross = cross.max(heat_cross_check(&damped, &grid, &rec, &spec)?);
        }

        let periodic = Scenario::driven(p, DrivingParams::new(0.25, 0.2, 0.0));
        let period = 2.0 * std::f64::consts::PI / 0.2;
        let grid = uniform_grid(0.0, 10.0 * period, 0.1);
        let rec = run_scenario(&periodic, &grid, &spec)?;
        law = law.max(first_law_defect(&rec));
        sigma = sigma.min(min_sigma(&rec));
        let tail: Vec<&ThermoRecord> = rec.iter().filter(|x| x.t >= 5.0 * period).collect();
        let ts: Vec<f64> = tail.iter().map(|x| x.t).collect();
        let ss: Vec<f64> = tail.iter().map(|x| x.entropy_production).collect();
        slope_min = slope_min.min(slope(&ts, &ss));
    }
    notes.push(format!("first law {law:.2e}, heat cross-check {cross:.2e} (1e-8)"));
    notes.push(format!("min Σ {sigma:.2e} (≥ −1e-9)"));
    notes.push(format!("periodic Σ slope ≥ {slope_min:.2e} (> 0)"));
    notes.push(format!("damped |ΔẼ#| at t=50/γ {settle:.2e} (1e-4)"));
    let pass = law <= 1e-8 && cross <= 1e-8 && sigma >= -1e-9 && slope_min > 0.0 && settle <= 1e-4;
    Ok(Verdict::new(pass, notes.join(", ")))
}

fn quasistatic() -> Result<Verdict> {
    let spec = ThermoSpec::default();
    let mut worst = 0.0f64;
    for &beta in &[0.5, 1.0, 2.0] {
        let d = DrivingParams::new(0.25, 1e-3, 0.0);
        let sc = Scenario::driven(base(0.25, beta), d);
        let grid = uniform_grid(0.0, 2.0 * std::f64::consts::PI / d.omega, 0.5);
        let rec = run_scenario(&sc, &grid, &spec)?;
        for x in &rec {
            worst = worst.max((x.work_sharp - (x.free_energy_sharp - rec[0].free_energy_sharp)).abs());
        }
    }
    Ok(Verdict::new(worst <= 1e-2, format!("sup |W# − ΔF#| over one period = {worst:.2e} (1e-2)")))
}

fn weak_coupling_limit() -> Result<Verdict> {
    let spec = ThermoSpec::default();
    let zetas = [1.0, 2.0, 4.0, 8.0];
    let grid = uniform_grid(0.0, 100.0, 0.1);
    let p = base(0.25, 2.0);
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, sc) in
        [("relax", Scenario::relax(p, 0.5)), ("periodic", Scenario::driven(p, DrivingParams::new(0.25, 0.2, 0.0)))]
    {
        let m: Vec<f64> = weak_coupling_measure(&sc, &zetas, &grid, &spec)?.into_iter().map(|(_, v)| v).collect();
        pass &= m.windows(2).all(|w| w[1] < w[0]);
        notes.push(format!("{name} {}", m.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" > ")));
    }
    Ok(Verdict::new(pass, notes.join("; ")))
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    DensityMatrix::from_unnormalized(&g * g.adjoint()).expect("Ginibre state")
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&g + g.adjoint()).unscale(2.0)
}

fn well_mixed(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let r = random_state(dim, rng);
    DensityMatrix::new((r.entries() + DensityMatrix::maximally_mixed(dim).entries()).unscale(2.0)).expect("mixture")
}

fn petz_and_blocks() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (ds, dr) = (3, 4);
    let gibbs = gibbs_state(&random_hermitian(ds * dr, &mut rng), 1.0)?;
    let mut petz_gap = 0.0f64;
    for _ in 0..50 {
        let out = petz_map(&random_state(ds, &mut rng), &gibbs, ds, dr)?;
        petz_gap = petz_gap.max(verify_thermo_initial_condition(&out, &gibbs, ds, dr)?.abs());
    }

    let (s1, s2) = (well_mixed(3, &mut rng), well_mixed(3, &mut rng));
    let two_blocks = |p: f64| BlockSpec {
        blocks: vec![
            Block { dim_a: 1, dim_b: 1, weight: p, state_a: DensityMatrix::maximally_mixed(1), state_br: s1.clone() },
            Block {
                dim_a: 1,
                dim_b: 1,
                weight: 1.0 - p,
                state_a: DensityMatrix::maximally_mixed(1),
                state_br: s2.clone(),
            },
        ],
    };
    let reference = build_block_state(&two_blocks(0.3))?;
    let (mut block_gap, mut perturbed_gap) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let state = build_block_state(&two_blocks(rng.random()))?;
        block_gap = block_gap.max(verify_thermo_initial_condition(&state.rho, &reference.rho, 2, 3)?.abs());
        let perturbed = add_coherence(&state.rho, 0, 3, 0.02)?;
        perturbed_gap = perturbed_gap.min(verify_thermo_initial_condition(&perturbed, &reference.rho, 2, 3)?);
    }

    let mut mono = f64::INFINITY;
    for _ in 0..100 {
        let (r, s) = (random_state(16, &mut rng), random_state(16, &mut rng));
        let full = relative_entropy(&r, &s);
        let reduced = relative_entropy(&r.trace_second(4, 4)?, &s.trace_second(4, 4)?);
        mono = mono.min(full - reduced);
    }
    let pass = petz_gap <= 1e-10 && block_gap <= 1e-10 && perturbed_gap > 0.0 && mono >= -1e-10;
    Ok(Verdict::new(
        pass,
        format!(
            "Petz-built gap max {petz_gap:.2e} (1e-10), block gap max {block_gap:.2e} (1e-10), perturbed gap min {perturbed_gap:.2e} (> 0), min D_SR − D_S {mono:.2e} (≥ −1e-10)"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("truncated Gibbs state vs Gaussian forms", fock_equilibrium),
        ("thermostatic identities", thermostatic_identities),
        ("weak-coupling limit of F#", weak_coupling_free_energy),
        ("density of states", density_of_states),
        ("perturbative density of states", perturbative_series),
        ("undriven dynamics vs closed form", dynamics_closed_form),
        ("scaled unitarity of propagators", scaled_unitarity_check),
        ("first and second law", second_law),
        ("quasistatic work", quasistatic),
        ("weak-coupling measure", weak_coupling_limit),
        ("relative-entropy gap and block states", petz_and_blocks),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!verdict.pass);
        println!("{tag} {:>2} {name}: {} [{:.1} s]", k + 1, verdict.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
