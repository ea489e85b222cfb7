//! Dev scratchpad 2 (deleted before release).

use edswave_core::functionals::compute_cfg;
use edswave_core::model::{Grid, ModelParams, StoppingPolicy};
use edswave_core::solver::Solver;
use edswave_core::special::{self, EvalControls};

fn five_point_derivative(ts: &[f64], ys: &[f64], i: usize) -> f64 {
    // Uniform spacing assumed.
    let h = ts[1] - ts[0];
    (-ys[i + 2] + 8.0 * ys[i + 1] - 8.0 * ys[i - 1] + ys[i - 2]) / (12.0 * h)
}

fn main() {
    let ctl = EvalControls::default();

    // eq6 residual: U'(t) + Γ(t)U(t) - ∫∫|u_t|^p ψ - ε C(f,g) on a
    // nonlinear run, refinement dx = R/32 vs R/64 vs R/128.
    for &den in &[32.0, 64.0, 128.0] {
        let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 0.3, 1.0).unwrap();
        let eps = mp.eps;
        let cfg = compute_cfg(&mp, &ctl).unwrap().value;
        let st = mp.spacetime();
        let grid = Grid::for_horizon_with(&mp, 3.0, 1.0 / den, 0.4).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let stop = StoppingPolicy::new(3.0, 0.02).unwrap();
        let (_, series) = solver.run(&stop).unwrap();
        let ts: Vec<f64> = series.samples.iter().map(|s| s.t).collect();
        let us: Vec<f64> = series.samples.iter().map(|s| s.u_psi).collect();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 2..ts.len() - 2 {
            let t = ts[i];
            let du = five_point_derivative(&ts, &us, i);
            let logd = special::rho_log_derivative(t, &st, &ctl).unwrap();
            let gamma = 1.0 / t - 2.0 * logd;
            let defect = du + gamma * us[i] - series.samples[i].nonlin_cum - eps * cfg;
            worst = worst.max(defect.abs());
            scale = scale.max((eps * cfg).abs().max(us[i].abs()));
        }
        println!("eq6 dx=1/{den}: worst defect={:.4e} (scale {scale:.3e})", worst);
    }

    // weak residual order on a linear run, k=0.25, mu=1.
    for &den in &[32.0, 64.0, 128.0] {
        let mp = ModelParams::new(1, 0.25, 1.0, 2.0, 0.3, 1.0)
            .unwrap()
            .with_nonlinearity(false);
        let grid = Grid::for_horizon_with(&mp, 4.0, 1.0 / den, 0.4).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let stop = StoppingPolicy::new(4.0, 0.1).unwrap();
        let (_, series) = solver.run(&stop).unwrap();
        let worst = series
            .samples
            .iter()
            .fold(0.0f64, |m, s| m.max(s.weak_residual.abs()));
        println!("weak dx=1/{den}: worst |wres| = {worst:.4e}");
    }

    // def23 residual with 5-point stencil, linear run.
    let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 0.5, 1.0)
        .unwrap()
        .with_nonlinearity(false);
    let st = mp.spacetime();
    let grid = Grid::for_horizon(&mp, 3.0).unwrap();
    let solver = Solver::new(mp, grid).unwrap();
    let stop = StoppingPolicy::new(3.0, 0.02).unwrap();
    let (_, series) = solver.run(&stop).unwrap();
    let ts: Vec<f64> = series.samples.iter().map(|s| s.t).collect();
    let us: Vec<f64> = series.samples.iter().map(|s| s.u_psi).collect();
    let vmax = series.samples.iter().fold(0.0f64, |m, s| m.max(s.ut_psi.abs()));
    let mut worst = 0.0f64;
    for i in 2..ts.len() - 2 {
        let du = five_point_derivative(&ts, &us, i);
        let logd = special::rho_log_derivative(ts[i], &st, &ctl).unwrap();
        let defect = du - logd * us[i] - series.samples[i].ut_psi;
        worst = worst.max(defect.abs());
    }
    println!("def23: worst defect = {:.4e}, relative {:.4e}", worst, worst / vmax);
}
