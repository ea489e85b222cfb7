//! Dev scratchpad (deleted before release).

use edswave_core::model::{Grid, ModelParams, Profile, StoppingPolicy};
use edswave_core::solver::{rescaled_run_compare, Solver};
use edswave_core::special::EvalControls;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    // (a) Reference subcritical blow-up run: N=1, k=0, mu=1, p=1.8, eps=0.3.
    let mp = ModelParams::new(1, 0.0, 1.0, 1.8, 0.3, 1.0).unwrap();
    let grid = Grid::for_horizon(&mp, 60.0).unwrap();
    let solver = Solver::new(mp.clone(), grid).unwrap();
    let stop = StoppingPolicy::new(60.0, 0.1).unwrap();
    let (out, series) = solver.run(&stop).unwrap();
    println!(
        "run(eps=0.3): status={:?} t_blow={:?} steps={} max_ut={:.3e} samples={} elapsed={:?}",
        out.status,
        out.t_blow,
        out.step_count,
        out.max_ut,
        series.samples.len(),
        t0.elapsed()
    );
    println!("diag: {:?}", out.diagnostics);
    for s in series.samples.iter().take(5) {
        println!(
            "  t={:.2} U={:.4e} V={:.4e} wres={:.2e} nl={:.4e}",
            s.t, s.u_psi, s.ut_psi, s.weak_residual, s.nonlin_cum
        );
    }
    let last = series.samples.last().unwrap();
    println!(
        "  last: t={:.3} U={:.4e} V={:.4e} wres={:.2e} nl={:.4e}",
        last.t, last.u_psi, last.ut_psi, last.weak_residual, last.nonlin_cum
    );

    // Worst weak residual over the run.
    let worst = series
        .samples
        .iter()
        .fold(0.0f64, |m, s| m.max(s.weak_residual.abs()));
    println!("worst weak residual: {worst:.3e}");

    // Residual profile mid-run (pre-blow-up window).
    for s in series.samples.iter().filter(|s| s.t > 2.0 && s.t < 10.0).step_by(10) {
        println!("  profile t={:.2} wres={:.3e} V={:.3e}", s.t, s.weak_residual, s.ut_psi);
    }

    // (b) eps ladder for the sweep constants.
    let mut pts = Vec::new();
    for &eps in &[0.32, 0.18, 0.1, 0.056, 0.032] {
        let t1 = Instant::now();
        let mp = ModelParams::new(1, 0.0, 1.0, 1.8, eps, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 250.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let stop = StoppingPolicy::new(250.0, 0.25).unwrap();
        let (out, _) = solver.run(&stop).unwrap();
        println!(
            "eps={eps}: {:?} t_blow={:?} steps={} in {:?}",
            out.status,
            out.t_blow,
            out.step_count,
            t1.elapsed()
        );
        if let Some(tb) = out.t_blow {
            pts.push((eps.ln(), tb.ln()));
        }
    }
    fit_slope("family1 (theory -4/3)", &pts);

    // (c) second sweep family: k=0.5, mu=0.5, p=2.
    let mut pts = Vec::new();
    for &eps in &[0.1, 0.056, 0.032, 0.018, 0.01] {
        let t1 = Instant::now();
        let mp = ModelParams::new(1, 0.5, 0.5, 2.0, eps, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 9000.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let stop = StoppingPolicy::new(9000.0, 0.5).unwrap();
        let (out, _) = solver.run(&stop).unwrap();
        println!(
            "k=.5 eps={eps}: {:?} t_blow={:?} steps={} in {:?}",
            out.status,
            out.t_blow,
            out.step_count,
            t1.elapsed()
        );
        if let Some(tb) = out.t_blow {
            pts.push((eps.ln(), tb.ln()));
        }
    }
    fit_slope("family2 (theory -2)", &pts);

    // (d) linear self-convergence, k=0.25, mu=1.
    let reference = |dx: f64| -> Vec<f64> {
        let mp = ModelParams::new(1, 0.25, 1.0, 2.0, 1.0, 1.0)
            .unwrap()
            .with_profiles(Profile::DEFAULT_BUMP, Profile::DEFAULT_BUMP)
            .with_nonlinearity(false);
        let grid = Grid::for_horizon_with(&mp, 2.0, dx, 0.4).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let (shots, _) = solver.snapshots(&[2.0]).unwrap();
        shots.into_iter().next().unwrap()
    };
    let fine = reference(1.0 / 256.0);
    let fine_half = (fine.len() - 1) / 2;
    let mut errs = Vec::new();
    for &den in &[32.0, 64.0, 128.0] {
        let sol = reference(1.0 / den);
        // Compare on shared coordinates: x = (i - half) dx.
        let stride = (256.0 / den) as usize;
        let half = (sol.len() - 1) / 2;
        let mut worst = 0.0f64;
        for (i, &v) in sol.iter().enumerate() {
            let j = (i as i64 - half as i64) * stride as i64 + fine_half as i64;
            if j >= 0 && (j as usize) < fine.len() {
                worst = worst.max((v - fine[j as usize]).abs());
            }
        }
        errs.push(worst);
        println!("dx=1/{den}: err={worst:.4e}");
    }
    println!(
        "orders: {:.2}, {:.2}",
        (errs[0] / errs[1]).log2(),
        (errs[1] / errs[2]).log2()
    );

    // (e) rescaled comparison convergence, k=0.5, mu=1, p=2 linear+nonlinear.
    for &nl in &[false, true] {
        let mut prev = f64::NAN;
        for &den in &[32.0, 64.0, 128.0] {
            let mp = ModelParams::new(1, 0.5, 1.0, 2.0, 0.05, 1.0)
                .unwrap()
                .with_nonlinearity(nl);
            let grid = Grid::for_horizon_with(&mp, 4.0, 1.0 / den, 0.4).unwrap();
            let rep = rescaled_run_compare(&mp, &grid, 4.0, 7).unwrap();
            println!(
                "rescale nl={nl} dx=1/{den}: disc={:.4e} ratio={:.2}",
                rep.max_rel_discrepancy,
                prev / rep.max_rel_discrepancy
            );
            prev = rep.max_rel_discrepancy;
        }
    }

    // (f) certificate timing.
    let t1 = Instant::now();
    let ctl = EvalControls::default();
    let cert = edswave_core::certificate::build_certificate(&mp_ref(), &ctl).unwrap();
    println!(
        "certificate: T0={:.4} T1={:.4} T2={:.4} T3={:.4} Cfg={:.4} kappa={:.4} C_U={:.4} C_V={:.4} C2={:.4} in {:?}",
        cert.t0,
        cert.t1,
        cert.t2_tilde,
        cert.t3_tilde,
        cert.cfg,
        cert.kappa,
        cert.c_u,
        cert.c_v,
        cert.c2,
        t1.elapsed()
    );
}

fn mp_ref() -> ModelParams {
    ModelParams::new(1, 0.0, 1.0, 1.8, 0.3, 1.0).unwrap()
}

fn fit_slope(label: &str, pts: &[(f64, f64)]) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    println!("{label}: fitted slope = {slope:.4}");
}
