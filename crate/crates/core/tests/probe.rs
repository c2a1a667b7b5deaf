use gpr_core::baselines::{emd, EmdConfig};
use gpr_core::denoise::{gate_entropy, GateConfig};
use gpr_core::eval::{snr_samples, SnrOutcome};
use gpr_core::io::read_radargram;
use gpr_core::signal::energy;
use std::path::Path;

fn snr_db(clean: &[f64], test: &[f64]) -> f64 {
    match snr_samples(clean, test).unwrap() {
        SnrOutcome::Finite(m) => m.db,
        SnrOutcome::Infinite => f64::INFINITY,
    }
}

#[test]
#[ignore]
fn probe() {
    let noisy = read_radargram(Path::new("/tmp/gprtest/fn.gprd")).unwrap();
    let clean = read_radargram(Path::new("/tmp/gprtest/fwd.gprd")).unwrap();
    let gate = GateConfig::default();
    for (variant, cfg) in [
        ("default", EmdConfig::default()),
        (
            "crisper",
            EmdConfig {
                sift_stop: 0.05,
                max_sifts: 30,
                ..EmdConfig::default()
            },
        ),
    ] {
        let idx = 0usize;
        let t = &noisy.traces[idx];
        let c = &clean.traces[idx];
        let r = emd(t, &cfg).unwrap();
        println!("--- {variant}: {} IMFs (trace {idx})", r.imfs.len());
        let mut comps: Vec<(&str, &[f64])> = vec![("residue", r.residue.samples.as_slice())];
        let names: Vec<String> = (0..r.imfs.len()).map(|i| format!("imf{i}")).collect();
        for (i, imf) in r.imfs.iter().enumerate().rev() {
            comps.push((names[i].as_str(), imf.samples.as_slice()));
        }
        // cumulative prefix SNR in ascending-frequency order
        let n = t.len();
        let mut acc = vec![0.0; n];
        for (name, comp) in &comps {
            for (a, v) in acc.iter_mut().zip(*comp) {
                *a += v;
            }
            let se = gate_entropy(comp, &gate).unwrap();
            println!(
                "  +{name}: comp energy {:.3e}, SE {:.3}, cumulative SNR {:+.3} dB",
                energy(comp),
                se,
                snr_db(&c.samples, &acc)
            );
        }
    }
}
