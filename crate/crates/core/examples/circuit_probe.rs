use floq::ghz;
use floq::propagator::IntegratorConfig;
use floq::readout::circuit::{build_circuit_model, fit_longitudinal, normal_mode_reduce, KerrCircuit, SidebandChoice};
use floq::readout::simulate_circuit_readout;
use std::time::Instant;

fn paper_circuit(trunc: [usize; 3]) -> KerrCircuit {
    KerrCircuit {
        omega: [ghz(8.2), ghz(5.2), ghz(7.78)],
        alpha_b: 2.0 * ghz(-0.17),
        alpha_c: 2.0 * ghz(0.4),
        g_ab: 0.0,
        g_bc: ghz(0.2),
        g_ca: ghz(0.2),
        mod_amp: ghz(0.06),
        sidebands: SidebandChoice::Both,
        eps_d1: ghz(0.7),
        trunc,
    }
}

fn main() {
    let circ = paper_circuit([5, 4, 3]);
    let nm = normal_mode_reduce(&circ).unwrap();
    println!("normal freqs/2π: {:?}", nm.freqs.map(|f| f / ghz(1.0)));
    println!("u = {:?}", nm.u);
    println!("coupling weight u_ac*u_bc = {:.5}", nm.coupling_weight());
    println!("alpha_eff/2π: {:?}", nm.alpha_eff.map(|f| f / ghz(1.0)));
    let model = build_circuit_model(&circ, 0.005).unwrap();
    println!("eps_eff/2π = {:.4}, omega_d1/2π = {:.4}, g_tilde/2π = {:.5}",
        model.eps_eff / ghz(1.0), model.omega_d1 / ghz(1.0), model.g_tilde / ghz(1.0));

    let kappa = ghz(0.05);
    let t_end = 5.0 / kappa;
    let times: Vec<f64> = (0..=80).map(|k| t_end * k as f64 / 80.0).collect();
    for trunc in [[5usize, 4, 3], [10, 4, 3], [5, 8, 3], [5, 4, 6]] {
        let c = paper_circuit(trunc);
        let t0 = Instant::now();
        let cfg = IntegratorConfig::default().with_substeps(32);
        match simulate_circuit_readout(&c, kappa, 0.005, &times, &cfg) {
            Ok((pt, _)) => {
                let d_inf_pred = pt.d_inf_predicted();
                let fit = fit_longitudinal(&pt.times, &pt.d, kappa).unwrap();
                println!(
                    "trunc {:?} (dim {}): D_end = {:.5} (pred {:.5}), fit g/2π = {:.5}, κ_eff/2π = {:.5}, rms/Dinf = {:.4}, wall {:.1} s",
                    trunc,
                    trunc.iter().product::<usize>(),
                    pt.d.last().unwrap(),
                    d_inf_pred * (1.0 - (-2.5f64).exp()),
                    fit.g_tilde / ghz(1.0),
                    fit.kappa_eff / ghz(1.0),
                    fit.rms / d_inf_pred,
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("trunc {:?}: FAILED {e}", trunc),
        }
    }
}
