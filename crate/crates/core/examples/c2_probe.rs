use floq::ghz;
use floq::hamiltonian::RampShape;
use floq::init::*;
use floq::propagator::IntegratorConfig;

fn main() {
    let sys = InitSystem { omega0: ghz(5.02), eps_d1: ghz(0.21) };
    let cfg = IntegratorConfig::default().with_tolerance(1e-6);
    for shape in [RampShape::Tanh, RampShape::Linear] {
        for (target, label) in [(0.99, "99%"), (0.999, "99.9%"), (0.9999, "99.99%")] {
            let tilts = [0.004, 0.006, 0.01, 0.015, 0.022, 0.033, 0.05];
            let mut pts = Vec::new();
            for &tilt in &tilts {
                if let Ok(r) = min_ramp_time(ProtocolKind::Instantaneous, shape, tilt, target, (0.25, 3000.0), 0.02, &sys, &cfg) {
                    pts.push((tilt, r.t_boundary));
                }
            }
            match fit_scaling_law(&pts) {
                Ok(fit) => println!("{shape:?} {label}: C2 = {:.4}, slope = {:.3}, res = {:.4}, n = {}", fit.c, fit.free_slope, fit.residual, pts.len()),
                Err(e) => println!("{shape:?} {label}: {e} | pts {:?}", pts),
            }
        }
    }
    // adiabatic C1 for both shapes at 99%
    for shape in [RampShape::Tanh, RampShape::Linear] {
        for (target, label) in [(0.99, "99%"), (0.999, "99.9%")] {
            let tilts = [0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3];
            let mut pts = Vec::new();
            for &tilt in &tilts {
                if let Ok(r) = min_ramp_time(ProtocolKind::Adiabatic, shape, tilt, target, (1.0, 3000.0), 1.0, &sys, &cfg) {
                    pts.push((tilt, r.t_boundary));
                }
            }
            match fit_scaling_law(&pts) {
                Ok(fit) => println!("adiabatic {shape:?} {label}: C1 = {:.2}, slope = {:.3}, res = {:.4}, n = {}", fit.c, fit.free_slope, fit.residual, pts.len()),
                Err(e) => println!("adiabatic {shape:?} {label}: {e}"),
            }
        }
    }
}
