use floq::ghz;
use floq::hamiltonian::RampShape;
use floq::init::*;
use floq::propagator::IntegratorConfig;
use std::time::Instant;

fn main() {
    let sys = InitSystem { omega0: ghz(5.02), eps_d1: ghz(0.21) };
    let cfg = IntegratorConfig::default().with_tolerance(1e-6);
    let t0 = Instant::now();

    // adiabatic: tilts spanning [0.02, 0.3]
    let tilts_a = [0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3];
    for (target, label) in [(0.99, "99%"), (0.999, "99.9%"), (0.9999, "99.99%")] {
        let mut pts = Vec::new();
        for &tilt in &tilts_a {
            match min_ramp_time(ProtocolKind::Adiabatic, RampShape::Tanh, tilt, target, (1.0, 3000.0), 1.0, &sys, &cfg) {
                Ok(r) => pts.push((tilt, r.t_boundary)),
                Err(e) => println!("  adiabatic tilt {tilt} target {label}: {e}"),
            }
        }
        match fit_scaling_law(&pts) {
            Ok(fit) => println!("adiabatic {label}: C1 = {:.2} ns, slope = {:.3}, residual = {:.4} ({} pts)", fit.c, fit.free_slope, fit.residual, pts.len()),
            Err(e) => println!("adiabatic {label}: fit failed {e}"),
        }
    }

    // instantaneous: tilts where the boundary is inside [1, 3000] with fine resolution
    let tilts_i = [0.01, 0.015, 0.022, 0.033, 0.05, 0.08, 0.12];
    for (target, label) in [(0.99, "99%"), (0.999, "99.9%"), (0.9999, "99.99%")] {
        let mut pts = Vec::new();
        for &tilt in &tilts_i {
            match min_ramp_time(ProtocolKind::Instantaneous, RampShape::Tanh, tilt, target, (1.0, 3000.0), 0.05, &sys, &cfg) {
                Ok(r) => pts.push((tilt, r.t_boundary)),
                Err(e) => println!("  inst tilt {tilt} target {label}: {e}"),
            }
        }
        match fit_scaling_law(&pts) {
            Ok(fit) => println!("instantaneous {label}: C2 = {:.4} ns, slope = {:.3}, residual = {:.4} ({} pts)", fit.c, fit.free_slope, fit.residual, pts.len()),
            Err(e) => println!("instantaneous {label}: fit failed {e} (pts: {:?})", pts),
        }
    }
    println!("total {:.1} s", t0.elapsed().as_secs_f64());
}
