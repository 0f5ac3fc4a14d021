use floq::ghz;
use floq::propagator::IntegratorConfig;
use floq::readout::circuit::{KerrCircuit, SidebandChoice};
use floq::readout::simulate_circuit_readout;
use std::time::Instant;

fn main() {
    let kappa = ghz(0.05);
    let t_end = 5.0 / kappa;
    let times: Vec<f64> = (0..=40).map(|k| t_end * k as f64 / 40.0).collect();
    let mut prev: Option<Vec<f64>> = None;
    for qt in [4usize, 6, 8, 10, 12] {
        let circ = KerrCircuit {
            omega: [ghz(8.2), ghz(5.2), ghz(7.78)],
            alpha_b: 2.0 * ghz(-0.17),
            alpha_c: 2.0 * ghz(0.4),
            g_ab: 0.0,
            g_bc: ghz(0.2),
            g_ca: ghz(0.2),
            mod_amp: ghz(0.06),
            sidebands: SidebandChoice::Both,
            eps_d1: ghz(0.7),
            trunc: [4, qt, 3],
        };
        let t0 = Instant::now();
        let cfg = IntegratorConfig::default().with_substeps(32);
        let (pt, _) = simulate_circuit_readout(&circ, kappa, 0.005, &times, &cfg).unwrap();
        let dmax = pt.d.iter().cloned().fold(0.0, f64::max);
        let rel = prev.as_ref().map(|p: &Vec<f64>| {
            p.iter().zip(pt.d.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / dmax
        });
        println!("qubit trunc {qt} (dim {}): D_end = {:.6}, max|ΔD|/Dmax vs prev = {:?}, wall {:.0} s",
            4 * qt * 3, pt.d.last().unwrap(), rel.map(|r| format!("{r:.4}")), t0.elapsed().as_secs_f64());
        prev = Some(pt.d.clone());
    }
}
