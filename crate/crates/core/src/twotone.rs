//! Two-tone quasiphase spectra over commensurate frequency ratios and the
//! anticrossing-extraction procedure that yields gate parameters.
//!
//! With both tones on, quasienergies are only defined modulo
//! ω_GCD = ω_d2/p = ω_d1/q for the reduced ratio ω_d2/ω_d1 = p/q, so a
//! continuous spectrum over ω_d2 does not exist. Instead, for each
//! numerator p one sweeps the denominator q and diagonalizes the
//! propagator over the common period 2πq/ω_d1; the eigenphases (the
//! quasiphases) are folded to [−π/2, π/2] to remove the propagator
//! eigenvalue sign ambiguity. The avoided crossing of the driven Floquet
//! qubit is the one local minimum of the quasiphase difference that
//! persists across all numerators; everything else is a folding artifact.
//!
//! The extraction keeps, per numerator, every triplet of consecutive
//! denominators with d[q−1] ≥ d[q] ≤ d[q+1], discards triplets whose
//! frequency interval fails to intersect a surviving interval of the
//! previous numerator, and finally intersects across all numerators. The
//! width of the surviving interval is bounded by the grid pitch
//! p/(q−1) − p/(q+1) ≈ 2p/q².

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FloqError, Result};
use crate::hamiltonian::DrivenHamiltonian;
use crate::propagator::{propagate, IntegratorConfig};

use std::f64::consts::{PI, TAU};

/// Sweep layout: fixed ω_d1, numerators p, and for each p the denominators
/// q with ratio ω_d2/ω_d1 = p/q inside the window.
#[derive(Debug, Clone, Serialize)]
pub struct RatioGrid {
    /// Fixed first-drive angular frequency (rad/ns).
    pub omega_d1: f64,
    /// Numerators p of the ratio ω_d2/ω_d1 = p/q.
    pub numerators: Vec<u32>,
    /// Ratio window (min, max) for ω_d2/ω_d1; default (0.01, 0.2).
    pub window: (f64, f64),
    /// Cap on grid points per numerator; the q range is subsampled evenly
    /// when it is larger. Default 200.
    pub max_points: usize,
}

impl RatioGrid {
    pub fn new(omega_d1: f64, numerators: Vec<u32>) -> Result<Self> {
        if omega_d1 <= 0.0 {
            return Err(FloqError::InvalidParameter("omega_d1 must be > 0".into()));
        }
        if numerators.is_empty() || numerators.iter().any(|&p| p < 1) {
            return Err(FloqError::InvalidParameter(
                "numerators must be nonempty integers ≥ 1".into(),
            ));
        }
        Ok(Self {
            omega_d1,
            numerators,
            window: (0.01, 0.2),
            max_points: 200,
        })
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 < lo && lo < hi) {
            return Err(FloqError::InvalidParameter(format!(
                "bad ratio window ({lo}, {hi})"
            )));
        }
        self.window = (lo, hi);
        Ok(self)
    }

    pub fn with_max_points(mut self, n: usize) -> Self {
        self.max_points = n.max(3);
        self
    }

    /// Denominators covering the window for numerator p, evenly subsampled
    /// to at most `max_points`.
    pub fn denominators_for(&self, p: u32) -> Vec<u32> {
        let (lo, hi) = self.window;
        let q_min = ((p as f64) / hi).ceil().max((p + 1) as f64) as u32;
        let q_max = ((p as f64) / lo).floor() as u32;
        if q_max < q_min {
            return Vec::new();
        }
        let span = (q_max - q_min + 1) as usize;
        if span <= self.max_points {
            (q_min..=q_max).collect()
        } else {
            (0..self.max_points)
                .map(|k| q_min + ((k as f64) * (span - 1) as f64 / (self.max_points - 1) as f64).round() as u32)
                .collect()
        }
    }

    pub fn omega_d2(&self, p: u32, q: u32) -> f64 {
        self.omega_d1 * p as f64 / q as f64
    }

    /// Common period 2π/ω_GCD = 2πq/ω_d1 of the pair (p, q).
    pub fn common_period(&self, q: u32) -> f64 {
        TAU * q as f64 / self.omega_d1
    }
}

/// One scan point: folded quasiphase pair at ω_d2 = ω_d1·p/q.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumPoint {
    pub p: u32,
    pub q: u32,
    /// ω_d2/ω_d1 = p/q.
    pub ratio: f64,
    /// Folded quasiphases in [−π/2, π/2], phi0 ≥ phi1.
    pub phi0: f64,
    pub phi1: f64,
}

impl SpectrumPoint {
    /// Quasiphase difference |φ₀ − φ₁| of the folded pair, in [0, π].
    ///
    /// The difference is deliberately NOT wrapped to [0, π/2]: wrapping
    /// turns the fold-boundary touch points (where the difference grazes π)
    /// into minima that sit at fixed rational multiples of the resonance
    /// ratio for every numerator, so the intersection over numerators can
    /// never discard them. With the plain difference those points are
    /// maxima and only genuine minima enter the bookkeeping.
    pub fn difference(&self) -> f64 {
        (self.phi0 - self.phi1).abs()
    }
}

/// Quasiphase spectrum for one numerator.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiphaseSpectrum {
    pub p: u32,
    /// Points ordered by ascending q (descending ratio).
    pub points: Vec<SpectrumPoint>,
    /// Grid points whose propagation failed, with the reason; these are
    /// recorded gaps, not scan aborts.
    pub failures: Vec<(u32, String)>,
}

/// Fold an eigenphase from [−π, π] to [−π/2, π/2]:
/// θ ↦ θ if |θ| ≤ π/2, else θ − sign(θ)·π.
pub fn fold_quasiphase(theta: f64) -> f64 {
    if theta > PI / 2.0 {
        theta - PI
    } else if theta < -PI / 2.0 {
        theta + PI
    } else {
        theta
    }
}

/// Scan one numerator: for each q, propagate over the common period
/// 2πq/ω_d1, diagonalize, and fold the eigenphases.
///
/// `build` maps ω_d2 (rad/ns) to the scan Hamiltonian; it must produce
/// constant envelopes (the scan assumes always-on tones) on a two-level
/// space. Points run in parallel; results are ordered by q.
pub fn quasiphase_spectrum<F>(
    build: F,
    grid: &RatioGrid,
    p: u32,
    cfg: &IntegratorConfig,
) -> Result<QuasiphaseSpectrum>
where
    F: Fn(f64) -> Result<DrivenHamiltonian> + Sync,
{
    let qs = grid.denominators_for(p);
    let results: Vec<(u32, std::result::Result<(f64, f64), String>)> = qs
        .par_iter()
        .map(|&q| {
            let omega_d2 = grid.omega_d2(p, q);
            let point = (|| -> Result<(f64, f64)> {
                let h = build(omega_d2)?;
                if h.dim() != 2 {
                    return Err(FloqError::InvalidParameter(
                        "quasiphase scan expects a two-level system".into(),
                    ));
                }
                if !h.all_envelopes_constant() {
                    return Err(FloqError::InvalidParameter(
                        "quasiphase scan needs constant envelopes".into(),
                    ));
                }
                let t_common = grid.common_period(q);
                let res = propagate(&h, 0.0, t_common, cfg)?;
                let (theta, _, _) = crate::linalg::unitary_eig(res.u.matrix(), 1e-12)?;
                // eigenvalue e^{−iεT}: quasiphase φ = ε·T = −θ
                let mut f0 = fold_quasiphase(-theta[0]);
                let mut f1 = fold_quasiphase(-theta[1]);
                if f0 < f1 {
                    std::mem::swap(&mut f0, &mut f1);
                }
                Ok((f0, f1))
            })();
            (q, point.map_err(|e| e.to_string()))
        })
        .collect();

    let mut points = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (q, r) in results {
        match r {
            Ok((phi0, phi1)) => points.push(SpectrumPoint {
                p,
                q,
                ratio: p as f64 / q as f64,
                phi0,
                phi1,
            }),
            Err(msg) => failures.push((q, msg)),
        }
    }
    Ok(QuasiphaseSpectrum { p, points, failures })
}

/// CSV export with columns (p, q, omega_d2_over_omega_d1, phiF_0, phiF_1).
pub fn spectrum_to_csv(spec: &QuasiphaseSpectrum) -> String {
    let mut out = String::from("p,q,omega_d2_over_omega_d1,phiF_0,phiF_1\n");
    for pt in &spec.points {
        out.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e}\n",
            pt.p, pt.q, pt.ratio, pt.phi0, pt.phi1
        ));
    }
    out
}

// --- extraction ---------------------------------------------------------------

/// One local-minimum triplet of the quasiphase difference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Triplet {
    pub q: u32,
    /// Ratio interval [lo, hi] spanned by the two neighbors.
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// Difference value at the anchor.
    pub depth: f64,
    pub survived: bool,
}

/// Audit record for one numerator.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub p: u32,
    pub triplets: Vec<Triplet>,
    /// True when this numerator produced no triplets and was skipped.
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnticrossingResult {
    /// Surviving interval in rad/ns (ω_d2 units).
    pub omega_low: f64,
    pub omega_high: f64,
    /// Same interval in ratio units.
    pub ratio_low: f64,
    pub ratio_high: f64,
    /// Exact grid-pitch bound p/(q−1) − p/(q+1) at the surviving triplet of
    /// the largest contributing numerator (ratio units).
    pub precision_bound_exact: f64,
    /// The 2p/q² approximation of the same bound.
    pub precision_bound_approx: f64,
    /// All disjoint segments of the final intersection (ratio units);
    /// normally exactly one.
    pub final_segments: Vec<(f64, f64)>,
    pub audit: Vec<AuditEntry>,
}

impl AnticrossingResult {
    pub fn ratio_center(&self) -> f64 {
        0.5 * (self.ratio_low + self.ratio_high)
    }

    pub fn omega_center(&self) -> f64 {
        0.5 * (self.omega_low + self.omega_high)
    }
}

fn find_triplets(points: &[SpectrumPoint]) -> Vec<Triplet> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let d: Vec<f64> = points.iter().map(|p| p.difference()).collect();
    let mut triplets = Vec::new();
    // maximal runs of equal difference; a run qualifies when flanked by
    // values ≥ on the left and ≤ on the right (single triplet at the middle)
    let mut a = 1;
    while a + 1 < n {
        let mut b = a;
        while b + 1 < n - 1 && (d[b + 1] - d[b]).abs() < 1e-15 {
            b += 1;
        }
        if d[a - 1] >= d[a] && d[b] <= d[b + 1] {
            let mid = (a + b) / 2;
            // points are ordered by ascending q: ratio decreases with index
            let (lo_idx, hi_idx) = (mid + 1, mid - 1);
            triplets.push(Triplet {
                q: points[mid].q,
                ratio_lo: points[lo_idx].ratio,
                ratio_hi: points[hi_idx].ratio,
                depth: d[mid],
                survived: false,
            });
        }
        a = b + 1;
    }
    triplets
}

fn intervals_intersect(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Intersection of a disjoint segment list with a union of intervals.
fn intersect_segments(current: &[(f64, f64)], others: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &c in current {
        for &o in others {
            let lo = c.0.max(o.0);
            let hi = c.1.min(o.1);
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    // merge touching segments
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for seg in out {
        if let Some(last) = merged.last_mut() {
            if seg.0 <= last.1 {
                last.1 = last.1.max(seg.1);
                continue;
            }
        }
        merged.push(seg);
    }
    merged
}

/// Run the triplet-survival bookkeeping over spectra ordered by numerator.
pub fn extract_anticrossing(
    spectra: &[QuasiphaseSpectrum],
    omega_d1: f64,
) -> Result<AnticrossingResult> {
    if spectra.len() < 2 {
        return Err(FloqError::InvalidParameter(
            "extraction needs at least two numerators".into(),
        ));
    }
    for s in spectra {
        if s.points.len() < 3 && !s.points.is_empty() {
            return Err(FloqError::InvalidParameter(format!(
                "spectrum p = {} has fewer than 3 points",
                s.p
            )));
        }
    }

    let mut audit: Vec<AuditEntry> = Vec::with_capacity(spectra.len());
    let mut running: Option<Vec<(f64, f64)>> = None;
    let mut last_bound: Option<(u32, u32)> = None; // (p, q) of last survivors' pitch
    let mut last_survivor_depth_ratio: Option<f64> = None;

    for spec in spectra {
        let mut triplets = find_triplets(&spec.points);
        if triplets.is_empty() {
            audit.push(AuditEntry {
                p: spec.p,
                triplets,
                skipped: true,
            });
            continue;
        }
        let survivors: Vec<(f64, f64)> = match &running {
            None => {
                for t in &mut triplets {
                    t.survived = true;
                }
                triplets.iter().map(|t| (t.ratio_lo, t.ratio_hi)).collect()
            }
            Some(current) => {
                for t in &mut triplets {
                    t.survived = current
                        .iter()
                        .any(|&seg| intervals_intersect(seg, (t.ratio_lo, t.ratio_hi)));
                }
                triplets
                    .iter()
                    .filter(|t| t.survived)
                    .map(|t| (t.ratio_lo, t.ratio_hi))
                    .collect()
            }
        };
        if survivors.is_empty() {
            let counts = audit
                .iter()
                .map(|e| (e.p, e.triplets.iter().filter(|t| t.survived).count()))
                .chain(std::iter::once((spec.p, 0)))
                .collect();
            return Err(FloqError::EmptyIntersection {
                at_p: spec.p,
                survivors: counts,
            });
        }
        let new_running = match &running {
            None => survivors.clone(),
            Some(current) => {
                let merged = intersect_segments(current, &survivors);
                if merged.is_empty() {
                    let counts = audit
                        .iter()
                        .map(|e| (e.p, e.triplets.iter().filter(|t| t.survived).count()))
                        .chain(std::iter::once((spec.p, survivors.len())))
                        .collect();
                    return Err(FloqError::EmptyIntersection {
                        at_p: spec.p,
                        survivors: counts,
                    });
                }
                merged
            }
        };
        // deepest surviving minimum of this stage, for disambiguation
        if let Some(best) = triplets
            .iter()
            .filter(|t| t.survived)
            .min_by(|a, b| a.depth.partial_cmp(&b.depth).unwrap())
        {
            last_bound = Some((spec.p, best.q));
            last_survivor_depth_ratio = Some(spec.p as f64 / best.q as f64);
        }
        running = Some(new_running);
        audit.push(AuditEntry {
            p: spec.p,
            triplets,
            skipped: false,
        });
    }

    let segments = running.ok_or_else(|| FloqError::InvalidParameter(
        "all numerators produced empty triplet sets".into(),
    ))?;
    // normally a single segment; with several, pick the one holding the
    // deepest surviving minimum of the largest numerator
    let pick = if segments.len() == 1 {
        segments[0]
    } else {
        let anchor = last_survivor_depth_ratio.unwrap_or(segments[0].0);
        *segments
            .iter()
            .find(|&&(lo, hi)| lo <= anchor && anchor <= hi)
            .unwrap_or(&segments[0])
    };
    let (p_b, q_b) = last_bound.expect("survivors imply a bound anchor");
    let bound = precision_bound(p_b, q_b)?;

    Ok(AnticrossingResult {
        omega_low: pick.0 * omega_d1,
        omega_high: pick.1 * omega_d1,
        ratio_low: pick.0,
        ratio_high: pick.1,
        precision_bound_exact: bound.exact,
        precision_bound_approx: bound.approx,
        final_segments: segments,
        audit,
    })
}

/// Grid-pitch precision bound of the extraction at (p_max, q_max).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrecisionBound {
    /// p/(q−1) − p/(q+1), exact (ratio units).
    pub exact: f64,
    /// 2p/q² approximation.
    pub approx: f64,
}

pub fn precision_bound(p_max: u32, q_max: u32) -> Result<PrecisionBound> {
    if !(q_max > p_max && p_max >= 1) {
        return Err(FloqError::InvalidParameter(format!(
            "precision bound needs q_max > p_max ≥ 1, got p = {p_max}, q = {q_max}"
        )));
    }
    let p = p_max as f64;
    let q = q_max as f64;
    Ok(PrecisionBound {
        exact: p / (q - 1.0) - p / (q + 1.0),
        approx: 2.0 * p / (q * q),
    })
}
