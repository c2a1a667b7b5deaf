//! 2D transverse-magnetic FDTD on a Yee grid with a convolutional PML
//! absorber.
//!
//! One out-of-plane electric component and two in-plane magnetic
//! components are staggered on square cells spanning the survey plane
//! (x along the line, z downward). A soft Ricker source is injected at
//! the transmitter node, the field at the receiver node is recorded every
//! step, and the antenna pair is stepped along the survey line for each
//! trace. Individual traces are independent simulations and run in
//! parallel.

use rayon::prelude::*;

use super::model::ForwardModel;
use super::{ricker_value, SynthError};
use crate::signal::{Radargram, Trace};

const EPS0: f64 = 8.854_187_812_8e-12;
const MU0: f64 = 1.256_637_062_12e-6;

/// Polynomial grading order of the PML conductivity profile.
const PML_ORDER: i32 = 3;
/// Low-frequency stretching at the inner PML edge.
const PML_ALPHA_MAX: f64 = 0.05;

/// Per-trace bookkeeping from a simulation run.
#[derive(Debug, Clone)]
pub struct TraceDiagnostics {
    /// Total field energy sampled every [`Self::energy_every_steps`] steps.
    pub energies: Vec<f64>,
    pub energy_every_steps: usize,
    pub dt_seconds: f64,
    pub steps: usize,
}

/// Precomputed grids shared by every trace of one model.
struct SimGrid {
    nx: usize,
    nz: usize,
    pml: usize,
    dt_s: f64,
    steps: usize,
    /// Ez update: `ez = ca*ez + cb*curl`, conductivity folded into both.
    ca: Vec<f64>,
    cb: Vec<f64>,
    /// Permittivity per node, for the energy diagnostic.
    eps: Vec<f64>,
    /// H update constant `dt/(mu0 dx)`.
    ch: f64,
    // CPML recursion coefficients along each axis, at integer (E) and
    // half-integer (H) positions.
    be_x: Vec<f64>,
    ae_x: Vec<f64>,
    bh_x: Vec<f64>,
    ah_x: Vec<f64>,
    be_z: Vec<f64>,
    ae_z: Vec<f64>,
    bh_z: Vec<f64>,
    ah_z: Vec<f64>,
    // source description
    fc_mhz: f64,
    source_delay_ns: f64,
    source_cutoff_ns: f64,
}

impl SimGrid {
    fn build(model: &ForwardModel) -> SimGrid {
        let pml = model.pml_cells;
        let cell = model.cell_m;
        let nxd = (model.width_m / cell).round() as usize + 1;
        let nzd = (model.depth_m / cell).round() as usize + 1;
        let nx = nxd + 2 * pml;
        let nz = nzd + 2 * pml;
        let dt = model.dt_seconds();
        let steps = (model.time_window_ns * 1e-9 / dt).ceil() as usize;

        let mut ca = vec![0.0; nx * nz];
        let mut cb = vec![0.0; nx * nz];
        let mut eps = vec![0.0; nx * nz];
        for i in 0..nx {
            // clamp into the domain so materials continue into the PML
            let x = ((i as f64 - pml as f64) * cell).clamp(0.0, model.width_m);
            for j in 0..nz {
                let z = ((j as f64 - pml as f64) * cell).clamp(0.0, model.depth_m);
                let m = model.material_at(x, z);
                let e = m.eps_r * EPS0;
                let loss = m.sigma * dt / (2.0 * e);
                ca[i * nz + j] = (1.0 - loss) / (1.0 + loss);
                cb[i * nz + j] = dt / (e * cell) / (1.0 + loss);
                eps[i * nz + j] = e;
            }
        }

        let sigma_max = 0.8 * (PML_ORDER + 1) as f64 / (376.730_313_668 * cell);
        let profile = |rho: f64| -> (f64, f64) {
            // (b, a) of the CPML recursion at normalized depth rho in [0, 1]
            if rho <= 0.0 {
                return (1.0, 0.0);
            }
            let sigma = sigma_max * rho.powi(PML_ORDER);
            let alpha = PML_ALPHA_MAX * (1.0 - rho);
            let b = (-(sigma + alpha) * dt / EPS0).exp();
            let a = if sigma + alpha > 0.0 {
                sigma * (b - 1.0) / (sigma + alpha)
            } else {
                0.0
            };
            (b, a)
        };
        let axis = |n: usize, stagger: f64| -> (Vec<f64>, Vec<f64>) {
            let mut bs = vec![1.0; n];
            let mut as_ = vec![0.0; n];
            let d = pml as f64;
            for i in 0..n {
                let pos = i as f64 + stagger;
                let left = (d - pos) / d;
                let right = (pos - (n as f64 - 1.0 - d)) / d;
                let rho = left.max(right);
                if rho > 0.0 {
                    let (b, a) = profile(rho.min(1.0));
                    bs[i] = b;
                    as_[i] = a;
                }
            }
            (bs, as_)
        };
        let (be_x, ae_x) = axis(nx, 0.0);
        let (bh_x, ah_x) = axis(nx, 0.5);
        let (be_z, ae_z) = axis(nz, 0.0);
        let (bh_z, ah_z) = axis(nz, 0.5);

        SimGrid {
            nx,
            nz,
            pml,
            dt_s: dt,
            steps,
            ca,
            cb,
            eps,
            ch: dt / (MU0 * cell),
            be_x,
            ae_x,
            bh_x,
            ah_x,
            be_z,
            ae_z,
            bh_z,
            ah_z,
            fc_mhz: model.fc_mhz,
            source_delay_ns: 1500.0 / model.fc_mhz,
            source_cutoff_ns: 3000.0 / model.fc_mhz,
        }
    }

    /// Grid index of a physical point.
    fn node(&self, model: &ForwardModel, x: f64, z: f64) -> (usize, usize) {
        let i = self.pml as isize + (x / model.cell_m).round() as isize;
        let j = self.pml as isize + (z / model.cell_m).round() as isize;
        (i as usize, j as usize)
    }

    /// Run one simulation with source at `tx` and receiver at `rx`
    /// (node indices). Returns the raw receiver series and energy samples.
    fn run(&self, tx: (usize, usize), rx: (usize, usize), energy_every: usize) -> (Vec<f64>, Vec<f64>) {
        let (nx, nz, d) = (self.nx, self.nz, self.pml);
        let mut ez = vec![0.0; nx * nz];
        let mut hx = vec![0.0; nx * nz];
        let mut hy = vec![0.0; nx * nz];
        let mut psi_hxz = vec![0.0; nx * nz];
        let mut psi_hyx = vec![0.0; nx * nz];
        let mut psi_ezx = vec![0.0; nx * nz];
        let mut psi_ezz = vec![0.0; nx * nz];

        let tx_idx = tx.0 * nz + tx.1;
        let rx_idx = rx.0 * nz + rx.1;
        let ch = self.ch;
        let dt_ns = self.dt_s * 1e9;

        let mut raw = Vec::with_capacity(self.steps);
        let mut energies = Vec::new();

        for step in 0..self.steps {
            // Hx += -ch * dEz/dz (z-derivative within a row)
            for i in 0..nx {
                let row = i * nz;
                for j in 0..nz - 1 {
                    hx[row + j] -= ch * (ez[row + j + 1] - ez[row + j]);
                }
                // CPML slabs along z
                for j in (0..d).chain(nz - 1 - d..nz - 1) {
                    let dezz = ez[row + j + 1] - ez[row + j];
                    let p = self.bh_z[j] * psi_hxz[row + j] + self.ah_z[j] * dezz;
                    psi_hxz[row + j] = p;
                    hx[row + j] -= ch * p;
                }
            }

            // Hy += ch * dEz/dx (x-derivative across rows)
            for i in 0..nx - 1 {
                let row = i * nz;
                let next = (i + 1) * nz;
                let in_pml_x = i < d || i >= nx - 1 - d;
                for j in 0..nz {
                    hy[row + j] += ch * (ez[next + j] - ez[row + j]);
                }
                if in_pml_x {
                    for j in 0..nz {
                        let dezx = ez[next + j] - ez[row + j];
                        let p = self.bh_x[i] * psi_hyx[row + j] + self.ah_x[i] * dezx;
                        psi_hyx[row + j] = p;
                        hy[row + j] += ch * p;
                    }
                }
            }

            // Ez update from the discrete curl; outermost ring stays PEC
            for i in 1..nx - 1 {
                let row = i * nz;
                let prev = (i - 1) * nz;
                let in_pml_x = i < d || i > nx - 1 - d - 1;
                for j in 1..nz - 1 {
                    let curl = (hy[row + j] - hy[prev + j]) - (hx[row + j] - hx[row + j - 1]);
                    ez[row + j] = self.ca[row + j] * ez[row + j] + self.cb[row + j] * curl;
                }
                if in_pml_x {
                    for j in 1..nz - 1 {
                        let dhy = hy[row + j] - hy[prev + j];
                        let p = self.be_x[i] * psi_ezx[row + j] + self.ae_x[i] * dhy;
                        psi_ezx[row + j] = p;
                        ez[row + j] += self.cb[row + j] * p;
                    }
                }
                for j in (1..d).chain(nz - 1 - d..nz - 1) {
                    let dhx = hx[row + j] - hx[row + j - 1];
                    let p = self.be_z[j] * psi_ezz[row + j] + self.ae_z[j] * dhx;
                    psi_ezz[row + j] = p;
                    ez[row + j] -= self.cb[row + j] * p;
                }
            }

            // soft Ricker source, gated off after 3/fc
            let t_ns = (step + 1) as f64 * dt_ns;
            if t_ns <= self.source_cutoff_ns {
                ez[tx_idx] += ricker_value(self.fc_mhz, t_ns - self.source_delay_ns);
            }

            raw.push(ez[rx_idx]);

            if energy_every > 0 && (step + 1) % energy_every == 0 {
                let mut e = 0.0;
                for k in 0..nx * nz {
                    e += 0.5 * self.eps[k] * ez[k] * ez[k]
                        + 0.5 * MU0 * (hx[k] * hx[k] + hy[k] * hy[k]);
                }
                energies.push(e);
            }
        }
        (raw, energies)
    }
}

/// Linear resampling of the raw receiver series (sample `n` taken at
/// `(n+1)*dt`, field zero at `t = 0`) onto `n_out` points spanning the
/// window.
fn resample(raw: &[f64], dt_s: f64, window_ns: f64, n_out: usize) -> Vec<f64> {
    let dt_ns = dt_s * 1e9;
    let out_dt = window_ns / n_out as f64;
    (0..n_out)
        .map(|k| {
            let t = k as f64 * out_dt;
            let u = t / dt_ns - 1.0;
            if u <= -1.0 {
                0.0
            } else if u < 0.0 {
                (u + 1.0) * raw[0]
            } else {
                let n0 = u.floor() as usize;
                let frac = u - n0 as f64;
                let a = raw[n0.min(raw.len() - 1)];
                let b = raw[(n0 + 1).min(raw.len() - 1)];
                a * (1.0 - frac) + b * frac
            }
        })
        .collect()
}

/// Simulate a single trace of the model.
pub fn simulate_trace(
    model: &ForwardModel,
    trace_idx: usize,
) -> Result<(Trace, TraceDiagnostics), SynthError> {
    model.validate()?;
    if trace_idx >= model.trace_count {
        return Err(SynthError::InvalidModel(format!(
            "trace index {trace_idx} out of range (model has {})",
            model.trace_count
        )));
    }
    let grid = SimGrid::build(model);
    Ok(run_trace(model, &grid, trace_idx))
}

fn run_trace(model: &ForwardModel, grid: &SimGrid, trace_idx: usize) -> (Trace, TraceDiagnostics) {
    let x = model.trace_x(trace_idx);
    let tx = grid.node(model, x - model.offset_m / 2.0, model.antenna_depth_m);
    let rx = grid.node(model, x + model.offset_m / 2.0, model.antenna_depth_m);
    let (raw, energies) = grid.run(tx, rx, 100);
    let samples = resample(&raw, grid.dt_s, model.time_window_ns, model.output_samples);
    let trace = Trace {
        samples,
        dt: model.time_window_ns / model.output_samples as f64,
        t0: 0.0,
    };
    let diag = TraceDiagnostics {
        energies,
        energy_every_steps: 100,
        dt_seconds: grid.dt_s,
        steps: grid.steps,
    };
    (trace, diag)
}

/// Run the forward model for every trace position. Traces are simulated
/// independently (in parallel) and assembled in survey order.
pub fn fdtd_forward(model: &ForwardModel) -> Result<Radargram, SynthError> {
    model.validate()?;
    let grid = SimGrid::build(model);
    let traces: Vec<Trace> = (0..model.trace_count)
        .into_par_iter()
        .map(|i| run_trace(model, &grid, i).0)
        .collect();
    Ok(Radargram {
        traces,
        dx: model.trace_spacing_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::analytic_signal;
    use crate::synth::model::{Material, MaterialRegion, Shape, AIR, DRY_SAND};

    /// Envelope-peak time of a trace, ns.
    fn envelope_peak_ns(t: &Trace) -> f64 {
        let env = analytic_signal(t).unwrap();
        let (idx, _) = env
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        t.time_at(idx)
    }

    fn all_air_model() -> ForwardModel {
        ForwardModel {
            width_m: 0.8,
            depth_m: 0.8,
            cell_m: 0.005,
            background: AIR,
            regions: vec![],
            fc_mhz: 900.0,
            offset_m: 0.025,
            antenna_depth_m: 0.4,
            trace_count: 1,
            trace_spacing_m: 0.8,
            scan_start_m: 0.4,
            time_window_ns: 12.0,
            output_samples: 512,
            pml_cells: 10,
            courant: 0.95,
        }
    }

    /// Air over sand with an optional strong reflector `d` metres below the
    /// interface.
    fn interface_model(cell: f64, reflector: bool) -> ForwardModel {
        let interface = 0.2;
        let d = 0.15;
        let mut regions = vec![MaterialRegion {
            shape: Shape::Rect {
                x0: 0.0,
                z0: interface,
                x1: 1.0,
                z1: 0.7,
            },
            material: DRY_SAND,
        }];
        if reflector {
            regions.push(MaterialRegion {
                shape: Shape::Rect {
                    x0: 0.0,
                    z0: interface + d,
                    x1: 1.0,
                    z1: 0.7,
                },
                material: Material {
                    eps_r: 81.0,
                    sigma: 0.05,
                },
            });
        }
        ForwardModel {
            width_m: 1.0,
            depth_m: 0.7,
            cell_m: cell,
            background: AIR,
            regions,
            fc_mhz: 900.0,
            offset_m: 0.025,
            antenna_depth_m: interface - 2.0 * cell,
            trace_count: 1,
            trace_spacing_m: 1.0,
            scan_start_m: 0.5,
            time_window_ns: 8.0,
            output_samples: 512,
            pml_cells: 10,
            courant: 0.95,
        }
    }

    #[test]
    fn homogeneous_model_has_quiet_tail() {
        let model = all_air_model();
        let (trace, _) = simulate_trace(&model, 0).unwrap();
        let peak = trace.samples.iter().cloned().fold(0.0_f64, |a, b| a.max(b.abs()));
        // direct wave has fully passed by delay + 1.8/fc + offset travel
        let window_end_ns = 1500.0 / model.fc_mhz + 1800.0 / model.fc_mhz + 0.1;
        let tail_start = (window_end_ns / trace.dt).ceil() as usize;
        let tail_max = trace.samples[tail_start..]
            .iter()
            .cloned()
            .fold(0.0_f64, |a, b| a.max(b.abs()));
        assert!(
            tail_max <= 0.01 * peak,
            "tail {tail_max:e} vs peak {peak:e}: boundary reflections too strong"
        );
    }

    #[test]
    fn reflection_arrival_matches_ray_travel_time() {
        let with = simulate_trace(&interface_model(0.005, true), 0).unwrap().0;
        let without = simulate_trace(&interface_model(0.005, false), 0).unwrap().0;

        let direct_peak = envelope_peak_ns(&without);
        let echo = without.with_samples(
            with.samples
                .iter()
                .zip(&without.samples)
                .map(|(a, b)| a - b)
                .collect(),
        );
        let echo_peak = envelope_peak_ns(&echo);

        let measured = echo_peak - direct_peak;
        let theory = 2.0 * 0.15 * 3.0_f64.sqrt() / 0.299_792_458; // ns
        assert!(
            (measured - theory).abs() <= 0.1 * theory,
            "two-way time {measured:.3} ns vs ray theory {theory:.3} ns"
        );
    }

    #[test]
    fn swapping_source_and_receiver_is_reciprocal() {
        let model = all_air_model();
        let grid = SimGrid::build(&model);
        let a = grid.node(&model, 0.25, 0.15);
        let b = grid.node(&model, 0.55, 0.55);
        let (fwd, _) = grid.run(a, b, 0);
        let (rev, _) = grid.run(b, a, 0);
        let scale = fwd.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = fwd
            .iter()
            .zip(&rev)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-6 * scale, "reciprocity violated: {diff:e} vs {scale:e}");
    }

    #[test]
    fn field_energy_decays_after_source_shutoff() {
        let model = all_air_model();
        let (_, diag) = simulate_trace(&model, 0).unwrap();
        let cutoff_ns = 3000.0 / model.fc_mhz;
        let cutoff_step = (cutoff_ns * 1e-9 / diag.dt_seconds).ceil() as usize;
        let first = cutoff_step / diag.energy_every_steps + 1;
        let tail = &diag.energies[first..];
        assert!(tail.len() >= 3, "not enough energy samples after shutoff");
        for w in tail.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-6),
                "energy grew after shutoff: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn out_of_grid_antennas_are_rejected() {
        let mut model = all_air_model();
        model.scan_start_m = 0.005; // tx would fall into the boundary
        assert!(matches!(
            simulate_trace(&model, 0),
            Err(SynthError::InvalidModel(_))
        ));
        let model = all_air_model();
        assert!(matches!(
            simulate_trace(&model, 5),
            Err(SynthError::InvalidModel(_))
        ));
    }
}
