use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64 as C64;
use std::time::Instant;

fn main() {
    for &n in &[40usize, 60, 120, 144, 240, 288] {
        let mut h = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let re = ((i * 7 + j * 3) % 13) as f64 / 13.0;
                let im = ((i + 2 * j) % 11) as f64 / 11.0 - 0.5;
                h[(i, j)] = C64::new(re, im);
            }
        }
        let hh = (&h + &h.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        let t0 = Instant::now();
        let reps = if n <= 60 { 50 } else { 10 };
        let mut acc = 0.0;
        for _ in 0..reps {
            let (vals, _vecs) = hh.eigh(UPLO::Lower).unwrap();
            acc += vals[0];
        }
        let dt = t0.elapsed().as_secs_f64() / reps as f64;
        println!("zheev n={n}: {:.3} ms (acc {acc:.3})", dt * 1e3);
    }
    // general complex eig on a unitary-ish matrix
    let n = 40;
    let mut h = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        h[(i, (i + 1) % n)] = C64::new(1.0, 0.0);
    }
    let t0 = Instant::now();
    let (vals, _vecs) = h.eig().unwrap();
    println!("zgeev n={n}: {:.3} ms, |λ0| = {:.6}", t0.elapsed().as_secs_f64() * 1e3, vals[0].norm());
    // matmul timing
    for &n in &[40usize, 120, 240] {
        let a = Array2::<C64>::from_elem((n, n), C64::new(0.5, 0.2));
        let t0 = Instant::now();
        let reps = 200;
        for _ in 0..reps {
            let _c = a.dot(&a);
        }
        let dt = t0.elapsed().as_secs_f64() / reps as f64;
        let gf = 8.0 * (n as f64).powi(3) / dt / 1e9;
        println!("matmul n={n}: {:.3} ms ({gf:.1} GF)", dt * 1e3);
    }
}
