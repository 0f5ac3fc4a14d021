use floq::ghz;
use floq::floquet::{rwa_tls, RwaConvention};
use floq::hamiltonian::build_tls_two_tone;
use floq::propagator::IntegratorConfig;
use floq::twotone::{extract_anticrossing, quasiphase_spectrum, RatioGrid};
use std::time::Instant;

fn main() {
    let omega0 = ghz(5.02);
    let omega_d1 = ghz(5.0);
    let eps_d1 = ghz(0.21);
    let eps_d2 = ghz(0.006);
    let cfg = IntegratorConfig::default().with_tolerance(1e-8).with_substeps(64);

    let grid = RatioGrid::new(omega_d1, (1..=15).collect())
        .unwrap()
        .with_window(0.025, 0.1)
        .unwrap()
        .with_max_points(400);

    let t0 = Instant::now();
    let mut spectra = Vec::new();
    for p in 1..=15u32 {
        let t1 = Instant::now();
        let s = quasiphase_spectrum(
            |w2| build_tls_two_tone(omega0, eps_d1, omega_d1, eps_d2, w2),
            &grid,
            p,
            &cfg,
        )
        .unwrap();
        println!("p={p}: {} points, {} failures, {:.2} s", s.points.len(), s.failures.len(), t1.elapsed().as_secs_f64());
        spectra.push(s);
    }
    println!("scan total: {:.2} s", t0.elapsed().as_secs_f64());
    match extract_anticrossing(&spectra, omega_d1) {
        Ok(res) => {
            println!("interval ratio: [{:.6}, {:.6}] center {:.6}", res.ratio_low, res.ratio_high, res.ratio_center());
            println!("width {:.3e} vs bound(exact) {:.3e}", res.ratio_high - res.ratio_low, res.precision_bound_exact);
            println!("segments: {:?}", res.final_segments);
            let std_gap = rwa_tls(omega0, omega_d1, eps_d1, RwaConvention::Standard).gap();
            let un_gap = rwa_tls(omega0, omega_d1, eps_d1, RwaConvention::Unhalved).gap();
            println!("standard RWA ratio: {:.6}, unhalved: {:.6}", std_gap / omega_d1, un_gap / omega_d1);
            for e in &res.audit {
                let surv: Vec<u32> = e.triplets.iter().filter(|t| t.survived).map(|t| t.q).collect();
                println!("p={}: {} triplets, survivors at q = {:?}", e.p, e.triplets.len(), surv);
            }
        }
        Err(e) => println!("extraction failed: {e}"),
    }
}
