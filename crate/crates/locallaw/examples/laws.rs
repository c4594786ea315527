//! Deterministic law evaluation: spectral edges, densities, Stieltjes
//! transforms, control parameters, and classical eigenvalue locations.
//!
//! Run: `cargo run --release --example laws`

use locallaw::laws::{
    classical_locations, control_psi, law_asymptotics_check, mp_density, mp_edges, mp_stieltjes,
    mp_stieltjes_dual, mp_tail_mass, sc_stieltjes, stability_operator, AspectRatio, SpectralPoint,
};

fn main() {
    println!("== spectral edges gamma-+ ==");
    for phi in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let (lo, hi) = mp_edges(phi).unwrap();
        println!("  phi = {phi:<5}: [{lo:.6}, {hi:.6}]");
    }

    println!("\n== Marchenko-Pastur density at phi = 1/2 ==");
    let mut mass = 0.0;
    for x in [0.05, 0.5, 1.0, 2.0, 3.0, 4.0, 4.4] {
        let (cont, atom) = mp_density(x, 0.5).unwrap();
        mass = atom; // the atom is reported with each evaluation
        println!("  rho({x:.2}) = {cont:.6}");
    }
    let (lo, _) = mp_edges(0.5).unwrap();
    println!(
        "  continuous mass {:.12} + atom {mass:.2} = {:.12}",
        mp_tail_mass(lo, 0.5).unwrap(),
        mp_tail_mass(lo, 0.5).unwrap() + mass
    );

    println!("\n== Stieltjes transforms ==");
    let z = SpectralPoint::new(2.0, 0.05).unwrap();
    let m = mp_stieltjes(&z, 1.0).unwrap();
    println!("  m_1(2 + 0.05i)      = {:.12} + {:.12}i", m.re, m.im);
    let residual = stability_operator(m, &z, 1.0).unwrap().norm();
    println!("  |D(m_phi)(z)|       = {residual:.3e}");
    let dual = mp_stieltjes_dual(&z, 2.0).unwrap();
    println!("  m_(1/2)(2 + 0.05i)  = {:.12} + {:.12}i", dual.re, dual.im);
    let sc = sc_stieltjes(&SpectralPoint::new(0.0, 1.0).unwrap()).unwrap();
    println!("  semicircle m(i)     = {:.12} + {:.12}i (golden ratio: 0.618...)", sc.re, sc.im);

    println!("\n== control parameter Psi along eta at E = 2, N = 1000 ==");
    let aspect = AspectRatio::new(1000, 1000).unwrap();
    for eta in [0.005, 0.02, 0.1, 0.5, 2.0] {
        let z = SpectralPoint::new(2.0, eta).unwrap();
        let psi = control_psi(&z, &aspect, 1000).unwrap();
        println!("  eta = {eta:<6}: Psi = {psi:.6}");
    }

    println!("\n== classical locations, N = M = 12 ==");
    let alphas: Vec<usize> = (1..=12).collect();
    let gammas = classical_locations(12, 12, &alphas).unwrap();
    for (a, g) in alphas.iter().zip(&gammas) {
        println!("  gamma_{a:<2} = {g:.8}");
    }

    println!("\n== comparability checks on a bulk grid (phi = 4) ==");
    let grid: Vec<SpectralPoint> = (1..=8)
        .map(|i| SpectralPoint::new(1.0 + 0.4 * i as f64, 0.05).unwrap())
        .collect();
    let report = law_asymptotics_check(&grid, 4.0).unwrap();
    println!("  {} grid points, {} violations", report.points.len(), report.violations);
    for p in report.points.iter().take(3) {
        println!(
            "  E = {:.2}: |m| = {:.3}, |1-m^2|/sqrt(k+eta) = {:.3}, Im-ratio = {:.3}",
            p.z.e, p.abs_m, p.one_minus_m2_ratio, p.im_ratio
        );
    }
}
