use floq::ghz;
use floq::propagator::IntegratorConfig;
use floq::readout::{longitudinal_d_analytic, TwoBodyReadout};
use std::time::Instant;

fn main() {
    let kappa = ghz(0.05);
    let t_end = 5.0 / kappa;
    let times: Vec<f64> = (0..=100).map(|k| t_end * k as f64 / 100.0).collect();
    for &tilt in &[0.005, 0.01, 0.1, 0.3] {
        let exp = TwoBodyReadout {
            omega0: ghz(5.02),
            eps_d1: ghz(0.21),
            tilt,
            omega_r: ghz(7.0),
            g_mod: ghz(0.005),
            kappa,
            cavity_dim: 20,
        };
        let t0 = Instant::now();
        let cfg = IntegratorConfig::default();
        let pt = exp.run(&times, &cfg).unwrap();
        let d_inf = pt.d_inf_predicted();
        let mut max_dev: f64 = 0.0;
        for (k, &t) in times.iter().enumerate() {
            let ana = longitudinal_d_analytic(pt.params.g_eff, kappa, t).unwrap();
            max_dev = max_dev.max((pt.d[k] - ana).abs() / d_inf);
        }
        println!(
            "tilt {tilt}: D_end = {:.5}, D_inf_pred = {:.5}, ratio = {:.4}, max|dev|/Dinf = {:.4}, wall {:.1} s",
            pt.d.last().unwrap(),
            d_inf,
            pt.d.last().unwrap() / d_inf,
            max_dev,
            t0.elapsed().as_secs_f64()
        );
    }
}
